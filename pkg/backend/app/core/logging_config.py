"""
Logging configuration for the SSBFT consensus harness.

Sets up file-based logging with rotation. Simulation traces go to their own
non-propagating logger so that a long sweep does not drown the application log.
"""
import logging
import logging.handlers
from pathlib import Path
from typing import Optional
from app.core.config import settings

TRACE_LOGGER_NAME = "trace"
MAX_LOG_BYTES = 10 * 1024 * 1024
LOG_BACKUPS = 5


def _rotating(path: Path, level: int, formatter: logging.Formatter) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        filename=str(path), maxBytes=MAX_LOG_BYTES, backupCount=LOG_BACKUPS, encoding="utf-8"
    )
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def setup_logging(log_dir: Optional[Path] = None) -> Path:
    """
    Configure application-wide logging with file handlers.

    Creates:
    - logs/app.log: All application logs
    - logs/errors.log: Only errors and critical issues
    - logs/trace.log: Simulator step records (DEBUG level on the trace logger)

    All handlers use rotation to prevent log files from growing too large.
    """
    if log_dir is None:
        backend_dir = Path(__file__).parent.parent.parent  # app/core -> backend
        log_dir = backend_dir / settings.LOG_DIR
    log_dir.mkdir(parents=True, exist_ok=True)

    log_level = getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Clear any existing handlers to avoid duplicates
    root_logger.handlers.clear()

    detailed_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Trace lines are already structured
    trace_formatter = logging.Formatter('%(message)s')

    console_handler = logging.StreamHandler()
    console_handler.setLevel(log_level)
    console_handler.setFormatter(detailed_formatter)
    root_logger.addHandler(console_handler)

    root_logger.addHandler(_rotating(log_dir / "app.log", log_level, detailed_formatter))
    root_logger.addHandler(_rotating(log_dir / "errors.log", logging.ERROR, detailed_formatter))

    trace_logger = logging.getLogger(TRACE_LOGGER_NAME)
    trace_logger.handlers.clear()
    # Step records are only rendered when someone asks for them
    trace_logger.setLevel(logging.DEBUG if log_level <= logging.DEBUG else logging.INFO)
    trace_logger.addHandler(_rotating(log_dir / "trace.log", logging.DEBUG, trace_formatter))
    trace_logger.propagate = False

    logger = logging.getLogger(__name__)
    logger.info("=" * 60)
    logger.info("Logging configuration initialized")
    logger.info(f"Log level: {settings.LOG_LEVEL}")
    logger.info(f"Log directory: {log_dir.absolute()}")
    logger.info("Log files:")
    logger.info(f"  - {log_dir / 'app.log'} (all application logs)")
    logger.info(f"  - {log_dir / 'errors.log'} (errors only)")
    logger.info(f"  - {log_dir / 'trace.log'} (simulator steps, DEBUG only)")
    logger.info("=" * 60)
    return log_dir
