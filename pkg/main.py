import os
import sys
import signal
import logging  # Logging di base prima che la CLI configuri il logger del pacchetto
from dotenv import load_dotenv

from src.cli_commands import EXIT_ERROR, run

# Cattura i messaggi emessi prima della configurazione da file (su stderr: stdout è riservato ai documenti)
logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(levelname)s - %(message)s', stream=sys.stderr)
logger = logging.getLogger(__name__)


def main() -> int:
    # FATPOINT_CACHE, FATPOINT_CONFIG e FATPOINT_LONG_RUN possono arrivare da .env
    load_dotenv()
    logger.debug("Avvio (PID: %d, Python %s)", os.getpid(), sys.version.split()[0])
    try:
        return run(sys.argv[1:])
    except Exception as e:
        logger.critical("Errore critico non gestito: %s", e, exc_info=True)
        return EXIT_ERROR


def signal_handler(signum, frame):
    """Gestisce i segnali di interruzione (Ctrl+C) e terminazione."""
    logger.warning("Ricevuto segnale %s. Calcolo interrotto.", signal.Signals(signum).name)
    sys.exit(130 if signum == signal.SIGINT else 143)


if __name__ == "__main__":
    signal.signal(signal.SIGINT, signal_handler)  # Ctrl+C
    signal.signal(signal.SIGTERM, signal_handler)

    sys.exit(main())
