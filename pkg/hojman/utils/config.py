"""
配置管理模块
读取 config/config.yaml，环境变量优先于配置文件
"""

import logging
import os
from pathlib import Path
from typing import Any, Callable, List, Optional, TypeVar, Union

import yaml

from ..errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "./config/config.yaml"
DEFAULT_LOG_FORMAT = "[%(asctime)s] [%(levelname)s] %(message)s"
DEFAULT_LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"

T = TypeVar("T")


class Config:
    """配置管理类"""

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        """
        加载配置文件

        Args:
            config_path: 配置文件路径，None 时依次尝试环境变量 HOJMAN_CONFIG 与默认路径

        Raises:
            ConfigError: YAML 语法错误或顶层不是映射
        """
        config_path = config_path or os.getenv("HOJMAN_CONFIG") or DEFAULT_CONFIG_PATH
        self.config_path = Path(config_path)

        if self.config_path.exists():
            try:
                with open(self.config_path, "r", encoding="utf-8") as f:
                    data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigError(str(self.config_path), f"YAML 语法错误: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError(str(self.config_path), "顶层必须是映射")
            self._config = data
        else:
            self._config = {}
            logger.warning("配置文件不存在: %s，使用默认配置", config_path)

    @classmethod
    def defaults(cls) -> "Config":
        """不读文件的纯默认配置（测试与库调用使用）"""
        config = cls.__new__(cls)
        config.config_path = None
        config._config = {}
        return config

    def get(self, key: str, default: Any = None) -> Any:
        """获取配置值，支持点号分隔的嵌套键"""
        keys = key.split(".")
        value = self._config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value if value != "" else default

    def typed(self, key: str, default: T, cast: Callable[[Any], T]) -> T:
        """按类型读取配置值，类型不符时抛 ConfigError"""
        value = self.get(key, default)
        try:
            return cast(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(key, f"取值非法: {value!r}") from e

    def _pair(self, key: str, default: List[float]) -> List[float]:
        value = self.get(key, default)
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError(key, f"必须是两个数值: {value!r}")
        try:
            return [float(v) for v in value]
        except (TypeError, ValueError) as e:
            raise ConfigError(key, f"必须是两个数值: {value!r}") from e

    # ==================== 采样 ====================

    @property
    def sample_count(self) -> int:
        """随机判等的采样点数"""
        return self.typed("sampling.count", 32, int)

    @property
    def env_seed(self) -> Optional[int]:
        """环境变量 HOJMAN_SEED，未设置时为 None"""
        env_seed = os.getenv("HOJMAN_SEED")
        if not env_seed:
            return None
        try:
            return int(env_seed)
        except ValueError as e:
            raise ConfigError("HOJMAN_SEED", f"必须是整数，实际为 {env_seed!r}") from e

    @property
    def seed(self) -> int:
        """采样种子（环境变量 HOJMAN_SEED 优先）"""
        env_seed = self.env_seed
        if env_seed is not None:
            return env_seed
        return self.typed("sampling.seed", 20240601, int)

    @property
    def rtol(self) -> float:
        """全局相对容差"""
        return self.typed("sampling.rtol", 1e-9, float)

    # ==================== 几何 / 力学 ====================

    @property
    def eps_x(self) -> float:
        """正规化子检测时忽略的 |X^i| 下限"""
        return self.typed("normalizer.eps_x", 1e-8, float)

    @property
    def max_dimension(self) -> int:
        """Lagrange 符号求解允许的最大自由度"""
        return self.typed("lagrangian.max_dimension", 4, int)

    @property
    def det_floor(self) -> float:
        """|det W| 低于此值视为退化"""
        return self.typed("lagrangian.det_floor", 1e-12, float)

    # ==================== 数值积分 ====================

    @property
    def step(self) -> float:
        return self.typed("numeric.step", 1e-3, float)

    @property
    def span(self) -> List[float]:
        return self._pair("numeric.span", [0.0, 10.0])

    @property
    def drift_tol(self) -> float:
        return self.typed("numeric.drift_tol", 1e-6, float)

    @property
    def ratio_band(self) -> List[float]:
        return self._pair("numeric.ratio_band", [12.0, 40.0])

    @property
    def noise_floor(self) -> float:
        return self.typed("numeric.noise_floor", 1e-11, float)

    @property
    def blowup(self) -> float:
        return self.typed("numeric.blowup", 1e12, float)

    # ==================== 日志 ====================

    @property
    def log_level(self) -> str:
        level = str(self.get("logging.level", "INFO")).upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ConfigError("logging.level", f"未知的日志级别: {level}")
        return level

    @property
    def log_format(self) -> str:
        return str(self.get("logging.format", DEFAULT_LOG_FORMAT))

    @property
    def log_datefmt(self) -> str:
        return str(self.get("logging.datefmt", DEFAULT_LOG_DATEFMT))

    @property
    def log_file(self) -> Optional[str]:
        return self.get("logging.file")
