"""
异常定义
所有库异常均继承 HojmanError，CLI 据此映射退出码
"""

from typing import Any, Dict, FrozenSet, Optional


class HojmanError(Exception):
    """库内异常基类"""


# ==================== 表达式 ====================

class ParseError(HojmanError):
    """语法错误，携带字节偏移与期望的记号集合"""

    def __init__(self, message: str, offset: int, expected: FrozenSet[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} (字节偏移 {offset}"
        if self.expected:
            detail += f"，期望: {', '.join(sorted(self.expected))}"
        super().__init__(detail + ")")


class UnknownFunctionError(ParseError):
    """未知函数名"""

    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"未知函数: {name}", offset)


class UnboundVariableError(HojmanError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"变量未绑定: {name}")


class DomainError(HojmanError):
    """求值时的定义域错误（log/sqrt 非正、除零、非有限结果等）"""

    def __init__(self, subexpr: Any, reason: str):
        self.subexpr = subexpr
        self.reason = reason
        super().__init__(f"定义域错误: {reason} @ {subexpr}")


class InsufficientSamplesError(HojmanError):
    def __init__(self, retained: int, required: int):
        self.retained = retained
        self.required = required
        super().__init__(f"有效采样点不足: {retained}/{required}（定义域过于奇异）")


# ==================== 几何 ====================

class ChartError(HojmanError):
    """坐标卡不一致或分量含有坐标卡之外的变量"""


class PositivityError(HojmanError):
    def __init__(self, witness: Dict[str, float], value: float):
        self.witness = witness
        self.value = value
        super().__init__(f"乘子非正: R = {value:g} @ {witness}")


class DegenerateDirectionError(HojmanError):
    def __init__(self, degenerate: int, required: int):
        self.degenerate = degenerate
        self.required = required
        super().__init__(f"X 的所有分量在 {degenerate} 个采样点接近 0，无法判定正规化子")


# ==================== 守恒量构造 ====================

class PreconditionViolation(HojmanError):
    """构造前提不满足：which 取 div_free / commuting / multiplier / normalizer / nsode"""

    def __init__(self, which: str, witness: Optional[Dict[str, float]] = None, report: Any = None):
        self.which = which
        self.witness = witness
        self.report = report
        super().__init__(f"前提条件不满足: {which}" + (f" @ {witness}" if witness else ""))


class HInconsistentError(HojmanError):
    def __init__(self, witness: Optional[Dict[str, float]] = None):
        self.witness = witness
        super().__init__(f"给定的 h 与 [Y,X] = hX 不符" + (f" @ {witness}" if witness else ""))


class MissingTimeCoordinateError(HojmanError):
    def __init__(self):
        super().__init__("坐标卡缺少时间坐标")


class CertificationError(HojmanError):
    """内部一致性检查失败（有效输入下不应出现）"""

    def __init__(self, what: str, report: Any = None):
        self.what = what
        self.report = report
        super().__init__(f"认证失败: {what}")


# ==================== 力学 ====================

class DegenerateLagrangianError(HojmanError):
    def __init__(self, witness: Optional[Dict[str, float]] = None):
        self.witness = witness
        super().__init__("Lagrange 量退化: det W ≈ 0" + (f" @ {witness}" if witness else ""))


class DimensionTooLargeError(HojmanError):
    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(f"自由度 {n} 超过符号求解上限 {limit}")


class VelocityDependenceError(HojmanError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"点向量场不能依赖速度: {', '.join(self.names)}")


# ==================== 数值 ====================

class IntegrationError(HojmanError):
    def __init__(self, time: float, cause: Exception):
        self.time = time
        self.cause = cause
        super().__init__(f"积分在 s = {time:g} 处失败: {cause}")


class DriftError(HojmanError):
    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"第 {index} 个状态处无法求值: {cause}")


# ==================== CLI ====================

class ProblemFileError(HojmanError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (行 {line}，列 {column})" if line else message)


class ProblemSchemaError(HojmanError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConfigError(HojmanError):
    """配置文件或环境变量取值非法"""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"配置 {key}: {message}")
