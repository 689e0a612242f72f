import json
import logging
import os
import threading
from typing import Any, Dict, Hashable, Optional, Tuple


class AlphaCache:
    """
    Cache persistente (scheme hash, t) -> alpha su file JSON-lines in sola aggiunta.
    Formato di ogni riga: {"hash": hex, "t": int, "alpha": int}.
    I valori sono deterministici: in caso di chiavi ripetute vince l'ultima scrittura.
    """
    def __init__(self, path: str, logger: Optional[logging.Logger] = None):
        self.path = path
        self.logger = logger or logging.getLogger(__name__)
        self.lock = threading.Lock()
        self.entries: Dict[Tuple[str, int], int] = {}
        self.hits = 0
        self.misses = 0
        self._load()

    def _load(self):
        """Carica il file saltando le righe corrotte."""
        if not os.path.exists(self.path):
            return
        skipped = 0
        with open(self.path, 'r', encoding='utf-8') as f:
            for line_number, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    key = (str(record["hash"]), int(record["t"]))
                    self.entries[key] = int(record["alpha"])
                except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                    skipped += 1
                    self.logger.warning("Riga %d della cache %s corrotta, ignorata", line_number, self.path)
        self.logger.info("Cache alpha caricata: %d voci (%d righe scartate)", len(self.entries), skipped)

    def get(self, scheme_hash: str, t: int) -> Optional[int]:
        value = self.entries.get((scheme_hash, t))
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def put(self, scheme_hash: str, t: int, alpha: int):
        """Registra un valore e lo accoda al file."""
        record = json.dumps({"hash": scheme_hash, "t": t, "alpha": alpha}, separators=(",", ":"))
        with self.lock:
            self.entries[(scheme_hash, t)] = alpha
            directory = os.path.dirname(self.path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            try:
                with open(self.path, 'a', encoding='utf-8') as f:
                    f.write(record + "\n")
            except IOError as e:
                self.logger.error("Impossibile scrivere nella cache %s: %s", self.path, e, exc_info=True)

    def stats(self) -> Dict[str, Any]:
        return {
            "path": os.path.abspath(self.path),
            "entries": len(self.entries),
            "hits": self.hits,
            "misses": self.misses,
        }

    def clear(self):
        with self.lock:
            self.entries.clear()
            if os.path.exists(self.path):
                os.remove(self.path)
        self.logger.info("Cache alpha svuotata: %s", self.path)

    def compact(self):
        """Riscrive il file con una riga per chiave (ultima scrittura)."""
        with self.lock:
            tmp_path = self.path + ".tmp"
            with open(tmp_path, 'w', encoding='utf-8') as f:
                for (scheme_hash, t), alpha in sorted(self.entries.items()):
                    f.write(json.dumps({"hash": scheme_hash, "t": t, "alpha": alpha}, separators=(",", ":")) + "\n")
            os.replace(tmp_path, self.path)
        self.logger.info("Cache alpha compattata: %d voci", len(self.entries))


class ResultCache:
    """
    Cache in memoria dei risultati di dimensione, con espulsione FIFO quando piena.
    """
    def __init__(self, cache_size: int = 2048):
        self.cache: Dict[Hashable, Any] = {}
        self.cache_size = cache_size
        self.lock = threading.Lock()

    def get(self, key: Hashable) -> Optional[Any]:
        with self.lock:
            return self.cache.get(key)

    def set(self, key: Hashable, value: Any):
        with self.lock:
            if key not in self.cache and len(self.cache) >= self.cache_size:
                # dizionari ordinati per inserimento: il primo è il più vecchio
                oldest_key = next(iter(self.cache), None)
                if oldest_key is not None:
                    self.cache.pop(oldest_key, None)
            self.cache[key] = value

    def __len__(self) -> int:
        return len(self.cache)
