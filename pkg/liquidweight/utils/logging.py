"""
Logging configuration for liquidweight
"""
import logging
import sys
from pathlib import Path
from typing import Optional

logger = logging.getLogger("liquidweight")


def setup_logging(level: str = "WARNING", log_file: Optional[str] = None) -> logging.Logger:
    """Set up logging configuration"""
    logger.setLevel(getattr(logging, str(level).upper(), logging.WARNING))
    # Repeated CLI invocations in one process must not stack handlers
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    detailed_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(module)s:%(lineno)d - %(message)s'
    )
    simple_formatter = logging.Formatter(
        '%(asctime)s - %(levelname)s - %(message)s'
    )

    # stdout carries command output
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(simple_formatter)
    logger.addHandler(console_handler)

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path)
        file_handler.setFormatter(detailed_formatter)
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger


def log_command(command: str, **kwargs):
    """Log CLI command invocation"""
    extra_info = " ".join([f"{k}={v}" for k, v in kwargs.items() if v is not None])
    logger.info(f"Command: {command} - {extra_info}")


def log_error(error: Exception, context: str = ""):
    """Log error with context"""
    logger.error(f"Error in {context}: {str(error)}", exc_info=True)
