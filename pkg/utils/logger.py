"""
logger.py

Centralized logging configuration for sclkit.
Console output goes to standard error so reports on standard output stay
byte-for-byte reproducible.
"""

import logging
import sys
from datetime import datetime
from logging.handlers import RotatingFileHandler
from pathlib import Path

from utils.config import config


class LoggerSetup:
    """
    Configures application-wide logging with console and optional file output.
    """

    _initialized = False

    @classmethod
    def setup(cls) -> logging.Logger:
        """
        Initialize and return the main application logger.
        Only configures once, subsequent calls return existing logger.
        """
        logger = logging.getLogger("sclkit")

        if cls._initialized:
            return logger

        log_level = config.get("logging.level", "WARNING")
        console_output = config.get("logging.console_output", True)
        file_output = config.get("logging.file_output", False)
        logs_dir = config.get("paths.logs_dir", "logs")
        max_bytes = config.get_int("logging.max_log_size_mb", 10) * 1024 * 1024
        backup_count = config.get_int("logging.backup_count", 5)

        numeric_level = getattr(logging, str(log_level).upper(), logging.WARNING)
        logger.setLevel(numeric_level)
        logger.propagate = False

        formatter = logging.Formatter(
            fmt="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        )

        if console_output:
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setFormatter(formatter)
            logger.addHandler(console_handler)

        if file_output:
            logs_path = Path(logs_dir)
            logs_path.mkdir(parents=True, exist_ok=True)

            log_file = logs_path / f"sclkit_{datetime.now().strftime('%Y%m%d')}.log"

            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=max_bytes,
                backupCount=backup_count,
                encoding="utf-8"
            )
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

        cls._initialized = True
        logger.debug("Logging system initialized")

        return logger


# Create global logger instance
app_logger = LoggerSetup.setup()
