"""
日志工具模块

库内各模块使用 logging.getLogger(__name__)，均为 "hojman" 的子记录器，
入口处按配置文件的 logging 段配置一次即可。
"""

import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Union

if TYPE_CHECKING:
    from .config import Config

LOGGER_NAME = "hojman"


def setup_logger(
    name: str = LOGGER_NAME,
    level: Union[int, str] = logging.INFO,
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
    datefmt: Optional[str] = None,
) -> logging.Logger:
    """
    配置日志记录器

    控制台输出走 stderr，--json 时 stdout 只有报告。

    Args:
        name: 日志器名称
        level: 日志级别（整数或 "DEBUG" 等名称）
        log_file: 日志文件路径（可选）
        format_string: 日志格式
        datefmt: 时间格式

    Returns:
        配置好的日志记录器
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.handlers.clear()

    formatter = logging.Formatter(
        format_string or "[%(asctime)s] [%(levelname)s] %(message)s",
        datefmt=datefmt or "%Y-%m-%d %H:%M:%S",
    )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def configure_logging(config: "Config", verbose: bool = False) -> logging.Logger:
    """按配置文件 logging 段（level / format / datefmt / file）配置根日志器；verbose 强制 DEBUG"""
    return setup_logger(
        level=logging.DEBUG if verbose else config.log_level,
        log_file=config.log_file,
        format_string=config.log_format,
        datefmt=config.log_datefmt,
    )
