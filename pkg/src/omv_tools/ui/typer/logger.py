"""
Logging configuration for the omv-tools command line.

Core modules only create module loggers (``logging.getLogger(__name__)``);
this module configures them once, from the root CLI callback.

Typical usage example:
    .. code-block:: python

        from omv_tools.ui.typer.logger import setup_logging

        setup_logging(app="omv_tools", verbosity=2, logger_file=Path("omv.log"))
"""
import logging
from pathlib import Path

logger = logging.getLogger(__name__)

LOG_LEVELS = {
    0: logging.WARNING,
    1: logging.INFO,
    2: logging.DEBUG,
}


def setup_logging(app: str, verbosity: int | None, logger_file: Path | None = None) -> None:
    """
    Configure logging for every module of the application.

    :param app: Base package name whose loggers get the level (``"omv_tools"``).
    :param verbosity: ``0`` WARNING, ``1`` INFO, ``2`` DEBUG; anything else INFO.
    :param logger_file: If given, records are appended there instead of the console.
    """
    log_level = LOG_LEVELS.get(verbosity, logging.INFO)

    logging_conf = {
        "level": log_level,
        "format": "[%(levelname)s] %(name)s: %(message)s",
        "datefmt": "%Y-%m-%d %H:%M:%S",
    }
    if logger_file:
        Path(logger_file).parent.mkdir(parents=True, exist_ok=True)
        logging_conf["filename"] = str(logger_file)
        logging_conf["filemode"] = "a"

    logging.basicConfig(**logging_conf)

    logger.setLevel(log_level)
    logging.getLogger(app).setLevel(log_level)
