"""
数值求值

表达式先编译为闭包树（每个节点一个闭包），再按坐标顺序传入浮点数组。
求值失败时抛出 DomainError，并携带出错的子表达式；不会静默产生 NaN。
"""

import math
from typing import Callable, Mapping, Sequence, Tuple

from ..errors import DomainError, UnboundVariableError
from .nodes import Add, Const, Div, Expr, Func, Mul, Neg, Pow, Sub, Var, variables

Compiled = Callable[[Sequence[float]], float]


def apply_function(name: str, x: float) -> float:
    """对单个浮点数应用内置函数，非法输入抛 ValueError / ZeroDivisionError"""
    if name == "sin":
        return math.sin(x)
    if name == "cos":
        return math.cos(x)
    if name == "tan":
        if math.cos(x) == 0.0:
            raise ZeroDivisionError("tan 的极点")
        return math.tan(x)
    if name == "exp":
        return math.exp(x)
    if name == "log":
        if x <= 0:
            raise ValueError("log 的自变量非正")
        return math.log(x)
    if name == "sqrt":
        if x < 0:
            raise ValueError("sqrt 的自变量为负")
        return math.sqrt(x)
    if name == "abs":
        return abs(x)
    raise ValueError(f"未知函数: {name}")


def _finite(node: Expr, value: float) -> float:
    if not math.isfinite(value):
        raise DomainError(node, "结果非有限")
    return value


def _power(node: Expr, base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0:
        raise DomainError(node, "0 的负数次幂")
    if base < 0 and not float(exponent).is_integer():
        raise DomainError(node, "负数的非整数次幂")
    try:
        return _finite(node, math.pow(base, exponent))
    except OverflowError:
        raise DomainError(node, "幂溢出")


def _compile(e: Expr, index: Mapping[str, int]) -> Compiled:
    if isinstance(e, Const):
        value = e.value
        return lambda x: value
    if isinstance(e, Var):
        if e.name not in index:
            raise UnboundVariableError(e.name)
        i = index[e.name]
        return lambda x: x[i]
    if isinstance(e, Neg):
        operand = _compile(e.operand, index)
        return lambda x: -operand(x)
    if isinstance(e, Add):
        left, right = _compile(e.left, index), _compile(e.right, index)
        return lambda x: _finite(e, left(x) + right(x))
    if isinstance(e, Sub):
        left, right = _compile(e.left, index), _compile(e.right, index)
        return lambda x: _finite(e, left(x) - right(x))
    if isinstance(e, Mul):
        left, right = _compile(e.left, index), _compile(e.right, index)
        return lambda x: _finite(e, left(x) * right(x))
    if isinstance(e, Div):
        left, right = _compile(e.left, index), _compile(e.right, index)

        def divide(x):
            den = right(x)
            if den == 0.0:
                raise DomainError(e, "除以零")
            return _finite(e, left(x) / den)

        return divide
    if isinstance(e, Pow):
        base, exponent = _compile(e.base, index), _compile(e.exponent, index)
        return lambda x: _power(e, base(x), exponent(x))
    if isinstance(e, Func):
        arg = _compile(e.arg, index)
        name = e.name

        def call(x):
            try:
                return _finite(e, apply_function(name, arg(x)))
            except (ValueError, ZeroDivisionError, OverflowError) as exc:
                raise DomainError(e, str(exc))

        return call
    raise TypeError(f"不是表达式: {type(e).__name__}")


def compile_expr(e: Expr, order: Sequence[str]) -> Compiled:
    """
    编译表达式

    Args:
        e: 表达式
        order: 变量顺序，编译结果接受同顺序的浮点序列

    Returns:
        可调用对象 f(values) -> float

    Raises:
        UnboundVariableError: 表达式含有 order 之外的变量
    """
    index = {name: i for i, name in enumerate(order)}
    return _compile(e, index)


def compile_many(exprs: Sequence[Expr], order: Sequence[str]) -> Callable[[Sequence[float]], Tuple[float, ...]]:
    """一次编译多个表达式（向量场分量）"""
    compiled = [compile_expr(e, order) for e in exprs]
    return lambda x: tuple(f(x) for f in compiled)


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """
    在给定绑定下求值

    Args:
        e: 表达式
        bindings: 变量名 -> 浮点值

    Returns:
        有限浮点数

    Raises:
        UnboundVariableError: 有变量未绑定
        DomainError: 定义域错误，携带出错子表达式
    """
    names = sorted(variables(e))
    for name in names:
        if name not in bindings:
            raise UnboundVariableError(name)
    values = [float(bindings[name]) for name in names]
    return compile_expr(e, names)(values)
