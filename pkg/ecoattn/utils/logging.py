"""
Logging configuration for EcoAttn
"""

import os
import logging
import sys
from typing import Optional

from pythonjsonlogger import jsonlogger

TEXT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _resolve_level() -> int:
    level_name = os.getenv('LOG_LEVEL', 'INFO').upper()
    level = logging.getLevelName(level_name)
    return level if isinstance(level, int) else logging.INFO


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Get configured logger instance."""
    logger = logging.getLogger(name or __name__)

    if not logger.handlers:
        logger.setLevel(_resolve_level())

        # stdout carries CLI artifacts, so logs go to stderr
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.DEBUG)

        if os.getenv('LOG_FORMAT', 'text').lower() == 'json':
            formatter = jsonlogger.JsonFormatter(TEXT_FORMAT)
        else:
            formatter = logging.Formatter(TEXT_FORMAT)
        console_handler.setFormatter(formatter)

        logger.addHandler(console_handler)
        logger.propagate = False

    return logger


def set_level(level: str) -> None:
    """Override the level of every EcoAttn logger created so far."""
    resolved = logging.getLevelName(level.upper())
    if not isinstance(resolved, int):
        raise ValueError(f"Unknown log level: {level}")
    os.environ['LOG_LEVEL'] = level.upper()
    for name, logger in logging.root.manager.loggerDict.items():
        if name.startswith('ecoattn') and isinstance(logger, logging.Logger):
            logger.setLevel(resolved)
