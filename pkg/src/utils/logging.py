import logging
import logging.config
import re
from pathlib import Path
from typing import Optional

from src.config import settings

# ANSI escape codes (colour, bold, ...)
ANSI_ESCAPE_RE = re.compile(r"\x1b\[[0-9;]*m")

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DEFAULT_DATEFMT = "%Y-%m-%d %H:%M:%S"


class StripAnsiFilter(logging.Filter):
    """Remove ANSI colour codes from a log record (for file handlers)."""

    def filter(self, record: logging.LogRecord) -> bool:  # type: ignore[override]
        if isinstance(record.msg, str):
            record.msg = ANSI_ESCAPE_RE.sub("", record.msg)
        return True


def attach_strip_ansi_to_file_handlers() -> None:
    """
    Attach StripAnsiFilter to every FileHandler on the root and `src` loggers.

    Call after logging.config.fileConfig(...) so the handlers from
    logging.ini already exist.
    """
    for logger in (logging.getLogger(), logging.getLogger("src")):
        for handler in logger.handlers:
            if isinstance(handler, logging.FileHandler):
                handler.addFilter(StripAnsiFilter())


def configure_logging(config_path: Optional[Path] = None, level: Optional[str] = None) -> bool:
    """
    Configure logging from logging.ini, falling back to basicConfig.

    Returns True when the ini file was used.
    """
    path = config_path or Path(__file__).resolve().parents[2] / settings.LOG_CONFIG
    level = level or settings.LOG_LEVEL
    if path.exists():
        logging.config.fileConfig(
            path,
            defaults={"logfilename": settings.LOG_FILE},
            disable_existing_loggers=False,
        )
        attach_strip_ansi_to_file_handlers()
        logging.getLogger("src").setLevel(level)
        return True

    logging.basicConfig(level=level, format=DEFAULT_FORMAT, datefmt=DEFAULT_DATEFMT)
    return False
