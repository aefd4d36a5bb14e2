"""
Logging Configuration
Structured logging for the entire application.
"""

import logging
import sys
from pathlib import Path
from datetime import datetime
from typing import Optional
from src.config.settings import settings

_HANDLER_TAG = "_access_model_handler"


def setup_logging(log_dir: Optional[Path] = None, level: Optional[str] = None) -> Path:
    """
    Configure application-wide logging.

    Safe to call more than once: handlers installed by an earlier call are replaced.

    Args:
        log_dir: Directory for the daily log file (default: settings.log_dir)
        level: Root log level name (default: settings.log_level)

    Returns:
        Path of the log file in use
    """
    log_dir = Path(log_dir) if log_dir is not None else settings.log_dir
    log_dir.mkdir(parents=True, exist_ok=True)

    log_format = logging.Formatter(
        fmt='%(asctime)s | %(levelname)-8s | %(name)s | %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Console handler (stderr keeps stdout for command results)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(log_format)

    log_file = log_dir / f"access_model_{datetime.now().strftime('%Y%m%d')}.log"
    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(log_format)

    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            root_logger.removeHandler(handler)
            handler.close()

    for handler in (console_handler, file_handler):
        setattr(handler, _HANDLER_TAG, True)
        root_logger.addHandler(handler)
    root_logger.setLevel(getattr(logging, (level or settings.log_level).upper()))

    root_logger.debug("Logging system initialized")
    root_logger.debug(f"Log file: {log_file}")
    return log_file
