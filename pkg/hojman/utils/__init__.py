# Utility modules
from .logger import configure_logging, setup_logger
from .config import Config

__all__ = ["configure_logging", "setup_logger", "Config"]
