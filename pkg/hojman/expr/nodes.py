"""
表达式树
不可变节点 + 结构相等；所有标量函数（X^i, R, L, F^i ...）都用它表示
"""

import math
import re
from dataclasses import dataclass
from functools import singledispatch
from typing import FrozenSet, Mapping, Union

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs")

Number = Union[int, float]


class Expr:
    """表达式基类，提供算术运算符重载（数字自动转为 Const）"""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, _coerce(other))

    def __radd__(self, other):
        return Add(_coerce(other), self)

    def __sub__(self, other):
        return Sub(self, _coerce(other))

    def __rsub__(self, other):
        return Sub(_coerce(other), self)

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __rmul__(self, other):
        return Mul(_coerce(other), self)

    def __truediv__(self, other):
        return Div(self, _coerce(other))

    def __rtruediv__(self, other):
        return Div(_coerce(other), self)

    def __pow__(self, other):
        return Pow(self, _coerce(other))

    def __rpow__(self, other):
        return Pow(_coerce(other), self)

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return render(self)


def _coerce(value: Union[Expr, Number]) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(float(value))


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"常数必须有限: {self.value}")


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __post_init__(self):
        if not IDENTIFIER.match(self.name):
            raise ValueError(f"非法变量名: {self.name!r}")


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"未知函数: {self.name}")


ZERO = Const(0.0)
ONE = Const(1.0)

BINARY = (Add, Sub, Mul, Div)


def const(value: Number) -> Const:
    return Const(float(value))


def var(name: str) -> Var:
    return Var(name)


def is_const(e: Expr, value: float = None) -> bool:
    """判断是否为常数节点（可选：是否等于给定值）"""
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


# ==================== 遍历 ====================

@singledispatch
def variables(e: Expr) -> FrozenSet[str]:
    """表达式中出现的全部变量名"""
    raise TypeError(f"不是表达式: {type(e).__name__}")


@variables.register
def _(e: Const) -> FrozenSet[str]:
    return frozenset()


@variables.register
def _(e: Var) -> FrozenSet[str]:
    return frozenset((e.name,))


@variables.register
def _(e: Neg) -> FrozenSet[str]:
    return variables(e.operand)


@variables.register(Add)
@variables.register(Sub)
@variables.register(Mul)
@variables.register(Div)
def _(e) -> FrozenSet[str]:
    return variables(e.left) | variables(e.right)


@variables.register
def _(e: Pow) -> FrozenSet[str]:
    return variables(e.base) | variables(e.exponent)


@variables.register
def _(e: Func) -> FrozenSet[str]:
    return variables(e.arg)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """将变量替换为表达式（不化简）"""
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.operand, mapping))
    if isinstance(e, BINARY):
        return type(e)(substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, mapping), substitute(e.exponent, mapping))
    if isinstance(e, Func):
        return Func(e.name, substitute(e.arg, mapping))
    raise TypeError(f"不是表达式: {type(e).__name__}")


def normalize(e: Expr) -> Expr:
    """负常数改写为 Neg(Const)，使 parse(render(e)) 与之结构相等"""
    if isinstance(e, Const):
        return Neg(Const(-e.value)) if e.value < 0 else e
    if isinstance(e, Var):
        return e
    if isinstance(e, Neg):
        return Neg(normalize(e.operand))
    if isinstance(e, BINARY):
        return type(e)(normalize(e.left), normalize(e.right))
    if isinstance(e, Pow):
        return Pow(normalize(e.base), normalize(e.exponent))
    if isinstance(e, Func):
        return Func(e.name, normalize(e.arg))
    raise TypeError(f"不是表达式: {type(e).__name__}")


def size(e: Expr) -> int:
    """节点数"""
    if isinstance(e, (Const, Var)):
        return 1
    if isinstance(e, Neg):
        return 1 + size(e.operand)
    if isinstance(e, BINARY):
        return 1 + size(e.left) + size(e.right)
    if isinstance(e, Pow):
        return 1 + size(e.base) + size(e.exponent)
    return 1 + size(e.arg)


# ==================== 打印 ====================

# 优先级：加减 1，乘除 2，幂 3，一元负号与原子 4
# 文法中一元负号比 ^ 结合更紧："-x^2" 即 (-x)^2
_PREC_SUM, _PREC_TERM, _PREC_POW, _PREC_UNARY = 1, 2, 3, 4

_SYMBOLS = {Add: " + ", Sub: " - ", Mul: "*", Div: "/"}


def format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _precedence(e: Expr) -> int:
    if isinstance(e, Const) and e.value < 0:
        return _PREC_UNARY
    if isinstance(e, (Add, Sub)):
        return _PREC_SUM
    if isinstance(e, (Mul, Div)):
        return _PREC_TERM
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_UNARY


def _wrap(e: Expr, needs_parens: bool) -> str:
    text = render(e)
    return f"({text})" if needs_parens else text


def render(e: Expr) -> str:
    """
    按文法输出最少括号的文本，可被 parse_expr 重新解析

    Args:
        e: 表达式

    Returns:
        文本形式
    """
    if isinstance(e, Const):
        if e.value < 0:
            return "-" + format_number(-e.value)
        return format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({render(e.arg)})"
    if isinstance(e, Neg):
        return "-" + _wrap(e.operand, _precedence(e.operand) < _PREC_UNARY)
    if isinstance(e, Pow):
        # 底数须为一元项；指数右结合
        base = _wrap(e.base, _precedence(e.base) < _PREC_UNARY)
        exponent = _wrap(e.exponent, _precedence(e.exponent) < _PREC_POW)
        return f"{base}^{exponent}"
    if isinstance(e, BINARY):
        prec = _precedence(e)
        left = _wrap(e.left, _precedence(e.left) < prec)
        right = _wrap(e.right, _precedence(e.right) <= prec)
        return f"{left}{_SYMBOLS[type(e)]}{right}"
    raise TypeError(f"不是表达式: {type(e).__name__}")
