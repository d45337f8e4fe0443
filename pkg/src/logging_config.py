"""
Logging setup shared by every module.

Usage:
    from src.logging_config import get_logger
    logger = get_logger(__name__)
"""

import logging
import os
from typing import Optional

# Configuration
LOG_LEVEL = os.environ.get("AB_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_configured = False


def configure_logging(level: Optional[str] = None) -> None:
    """Install the root handler once; later calls only change the level."""
    global _configured
    resolved = (level or LOG_LEVEL).upper()
    if not _configured:
        logging.basicConfig(level=resolved, format=LOG_FORMAT)
        _configured = True
    logging.getLogger("src").setLevel(resolved)


def get_logger(name: str) -> logging.Logger:
    """Return a module logger under the package hierarchy."""
    configure_logging()
    return logging.getLogger(name)
