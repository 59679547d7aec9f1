"""
Loguru sinks for charbeta runs.

Coverage studies can run for hours, so the presets differ mainly in how much
per-trial chatter reaches the console and whether a rotated file keeps it.
"""

import sys
from pathlib import Path
from typing import Any, Callable, Optional

from loguru import logger

from charbeta.core.config.config_utils import get_logging_defaults

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> | <level>{message}</level>"
)
PLAIN_FORMAT = "{time:HH:mm:ss} | {level} | {message}"


def configure_logging(
    level: Optional[str] = None,
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
    colorize: bool = True,
    rotation: str = "50 MB",
    retention: int = 5,
):
    """
    Replace every loguru sink with a stderr sink and an optional file sink.

    ``level`` and the file format fall back to ``CHARBETA_LOG_LEVEL`` and the
    configured log format.

    Examples:
        >>> configure_logging(level="DEBUG")
        >>> configure_logging(log_file="runs/uniform_coverage.log")
    """
    defaults = get_logging_defaults()
    level = level or defaults.LOG_LEVEL
    logger.remove()
    logger.add(
        sys.stderr,
        format=format_string or CONSOLE_FORMAT,
        level=level,
        colorize=colorize,
        backtrace=False,
    )
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            log_file,
            format=format_string or defaults.LOG_FORMAT,
            level=level,
            rotation=rotation,
            retention=retention,
        )
    logger.debug(f"charbeta logging at {level}", log_file=log_file)
    return logger


def configure_minimal_logging():
    """Warnings only; estimator diagnostics are warnings, so they still show."""
    return configure_logging(level="WARNING", format_string=PLAIN_FORMAT)


def configure_debug_logging(log_file: str = "charbeta_debug.log"):
    return configure_logging(level="DEBUG", log_file=log_file)


def configure_ci_logging():
    return configure_logging(level="INFO", format_string=PLAIN_FORMAT, colorize=False)


def disable_logging():
    logger.remove()


PRESETS: dict[str, Callable[..., Any]] = {
    "default": configure_logging,
    "minimal": configure_minimal_logging,
    "debug": configure_debug_logging,
    "ci": configure_ci_logging,
}


def use_preset(preset_name: str, **kwargs):
    """
    Apply one of ``PRESETS`` (the CLI ``--log`` flag).

    Raises:
        ValueError: If the preset is unknown
    """
    try:
        preset = PRESETS[preset_name]
    except KeyError:
        raise ValueError(
            f"Unknown logging preset '{preset_name}'. Available: {', '.join(PRESETS)}"
        ) from None
    return preset(**kwargs)


__all__ = [
    "configure_logging",
    "configure_minimal_logging",
    "configure_debug_logging",
    "configure_ci_logging",
    "disable_logging",
    "use_preset",
    "PRESETS",
]
