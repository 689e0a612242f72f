"""
Rapporti su file e su stdout: JSON canonico, CSV e markdown (pandas + tabulate).
I razionali arrivano già come stringhe "n/d".
"""
import json
import logging
import os
import threading
from datetime import datetime
from typing import Any, Dict, List, Optional

import pandas as pd

from src.config_manager import ConfigManager

REPORT_FORMATS = ("json", "csv", "markdown")


def _flatten(document: Dict[str, Any], prefix: str = "") -> List[tuple]:
    """Chiavi puntate per i dizionari annidati; liste e None serializzati in JSON."""
    items = []
    for key, value in document.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict) and value:
            items.extend(_flatten(value, name + "."))
        elif isinstance(value, (list, dict)) or value is None:
            items.append((name, json.dumps(value)))
        else:
            items.append((name, value))
    return items


class ReportWriter:
    """
    Serializza rapporti (dizionari con razionali già in forma "n/d") in JSON,
    CSV o markdown. Il timestamp vive solo nel campo `generated_at`, così i
    corpi dei rapporti restano identici tra esecuzioni con gli stessi input.
    """

    def __init__(self, logger: Optional[logging.Logger] = None, config_manager: Optional[ConfigManager] = None):
        self.logger = logger or logging.getLogger(__name__)
        self.output_dir = "reports"
        if config_manager is not None:
            self.output_dir = config_manager.get_nested("reports", "output_directory", default="reports")
        self.lock = threading.Lock()

    @staticmethod
    def envelope(body: Dict[str, Any], kind: str) -> Dict[str, Any]:
        return {"kind": kind, "generated_at": datetime.now().isoformat(timespec="seconds"), "body": body}

    @staticmethod
    def _tabular(document: Any) -> List[Dict[str, Any]]:
        """Righe per CSV/markdown: una lista di dizionari o un dizionario appiattito."""
        if isinstance(document, list):
            return [row if isinstance(row, dict) else {"value": row} for row in document]
        if isinstance(document, dict):
            return [{"field": k, "value": v} for k, v in _flatten(document)]
        return [{"value": document}]

    def render(self, document: Any, fmt: str = "json") -> str:
        if fmt not in REPORT_FORMATS:
            raise ValueError(f"Formato sconosciuto: {fmt} (ammessi: {', '.join(REPORT_FORMATS)})")
        if fmt == "json":
            return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False)
        frame = pd.DataFrame(self._tabular(document), dtype=object)
        if fmt == "csv":
            return frame.to_csv(index=False)
        return frame.to_markdown(index=False)

    def write(self, document: Any, name: str, fmt: str = "json") -> Optional[str]:
        """Scrive il rapporto in output_dir/name.<ext>; restituisce il percorso o None in caso di errore."""
        extension = {"json": "json", "csv": "csv", "markdown": "md"}[fmt]
        path = os.path.join(self.output_dir, f"{name}.{extension}")
        text = self.render(document, fmt)
        try:
            with self.lock:
                os.makedirs(self.output_dir, exist_ok=True)
                with open(path, 'w', encoding='utf-8', newline='') as f:
                    f.write(text if text.endswith("\n") else text + "\n")
            self.logger.info("Rapporto scritto: %s", path)
            return path
        except OSError as e:
            self.logger.error("Errore durante la scrittura del rapporto %s: %s", path, e, exc_info=True)
            return None

    def write_table_report(self, report, name: str = "table_report") -> Dict[str, Optional[str]]:
        """Tabella riassuntiva in markdown e documento completo in JSON."""
        paths = {
            "markdown": self.write(report.to_rows(), name, "markdown"),
            "json": self.write(self.envelope(report.to_dict(), "table"), name, "json"),
            "timings": self.write(report.timings(), f"{name}_timings", "json"),
        }
        return paths
