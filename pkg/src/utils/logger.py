"""Logging configuration for the federated learning simulator."""

import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Optional

from .config_loader import ExperimentConfig, get_config_dir


ROOT_LOGGER = "fedchain"
LOG_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)s | %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


class ColoredFormatter(logging.Formatter):
    """Colored console log formatter for better readability."""

    # ANSI color codes
    COLORS = {
        'DEBUG': '\033[36m',      # Cyan
        'INFO': '\033[32m',       # Green
        'WARNING': '\033[33m',    # Yellow
        'ERROR': '\033[31m',      # Red
        'CRITICAL': '\033[35m',   # Magenta
    }
    RESET = '\033[0m'

    def format(self, record):
        # Color a copy so the file handler keeps the plain level name
        record = logging.makeLogRecord(record.__dict__)
        levelname = record.levelname
        if levelname in self.COLORS:
            record.levelname = f"{self.COLORS[levelname]}{levelname}{self.RESET}"
        return super().format(record)


def setup_logger(
    name: str = ROOT_LOGGER,
    config: Optional[ExperimentConfig] = None,
    log_file: Optional[Path] = None,
    level: Optional[str] = None
) -> logging.Logger:
    """
    Set up logging with console and optional rotating file handlers.

    Args:
        name: Logger name
        config: Experiment configuration (optional)
        log_file: Specific log file path (optional, overrides config)
        level: Log level (optional, overrides config)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Avoid adding handlers multiple times
    if logger.handlers:
        return logger

    if level:
        log_level = getattr(logging, level.upper(), logging.INFO)
    elif config:
        log_level = getattr(logging, config.logging.level, logging.INFO)
    else:
        log_level = logging.INFO

    logger.setLevel(log_level)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(ColoredFormatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(console_handler)

    # File handler with rotation
    log_path = None
    max_bytes = 10 * 1024 * 1024
    backup_count = 5
    if log_file:
        log_path = log_file
    elif config and config.logging.file:
        log_path = Path(config.logging.file)
        if not log_path.is_absolute():
            log_path = get_config_dir().parent / log_path
        max_bytes = config.logging.max_bytes
        backup_count = config.logging.backup_count

    if log_path is not None:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_path,
            maxBytes=max_bytes,
            backupCount=backup_count,
            encoding='utf-8'
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
        logger.addHandler(file_handler)

    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Get a logger below the simulator's root logger.

    Args:
        name: Area name such as 'ledger' (defaults to the root logger)

    Returns:
        Logger instance
    """
    if name is None:
        return logging.getLogger(ROOT_LOGGER)
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")
