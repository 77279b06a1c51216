"""Logging setup."""

import logging
from typing import Optional

from app.core.config import settings

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"

_configured = False


def setup_logging(level: Optional[str] = None) -> None:
    """Configure the root logger once; later calls only adjust the level."""
    global _configured
    level_name = (level or settings.log_level).upper()
    if not _configured:
        logging.basicConfig(level=level_name, format=LOG_FORMAT)
        _configured = True
    else:
        logging.getLogger().setLevel(level_name)
