"""
符号微分与结构化简

化简只使用可靠的结构规则：常数折叠、0/1 恒等式、双重负号、
结构相等子树的 x - x -> 0、常数系数合并。构造导数时即边构造边化简，
避免零项膨胀。
"""

import math
from functools import singledispatch

from .nodes import (
    ONE,
    ZERO,
    Add,
    Const,
    Div,
    Expr,
    Func,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    is_const,
)


def _integral(value: float) -> bool:
    return math.isfinite(value) and float(value).is_integer()


def _folded(value: float, unfolded: Expr) -> Expr:
    """常数折叠溢出时保留原结构"""
    return Const(value) if math.isfinite(value) else unfolded


def _coefficient(e: Expr):
    """拆出常数系数: c*u -> (c, u)，-u -> (-1, u)"""
    if isinstance(e, Mul) and isinstance(e.left, Const):
        return e.left.value, e.right
    if isinstance(e, Neg):
        c, rest = _coefficient(e.operand)
        return -c, rest
    return 1.0, e


# ==================== 带化简的构造函数 ====================

def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value) if a.value != 0 else ZERO
    if isinstance(a, Neg):
        return a.operand
    if isinstance(a, Sub):
        return Sub(a.right, a.left)
    if isinstance(a, Mul) and isinstance(a.left, Const) and a.left.value < 0:
        return mul(Const(-a.left.value), a.right)
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return _folded(a.value + b.value, Add(a, b))
    if is_const(a, 0):
        return b
    if is_const(b, 0):
        return a
    if isinstance(b, Neg):
        return sub(a, b.operand)
    if isinstance(b, Const) and b.value < 0:
        return sub(a, Const(-b.value))
    if isinstance(a, Neg):
        return sub(b, a.operand)
    if a == b:
        return mul(Const(2.0), a)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return _folded(a.value - b.value, Sub(a, b))
    if is_const(b, 0):
        return a
    if is_const(a, 0):
        return neg(b)
    if a == b:
        return ZERO
    if isinstance(b, Neg):
        return add(a, b.operand)
    if isinstance(b, Const) and b.value < 0:
        return add(a, Const(-b.value))
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return _folded(a.value * b.value, Mul(a, b))
    if is_const(a, 0) or is_const(b, 0):
        return ZERO
    if is_const(a, 1):
        return b
    if is_const(b, 1):
        return a
    if is_const(a, -1):
        return neg(b)
    if is_const(b, -1):
        return neg(a)
    # 常数放在左侧
    if isinstance(b, Const):
        a, b = b, a
    if isinstance(a, Neg):
        return neg(mul(a.operand, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.operand))
    if isinstance(a, Const):
        c, rest = _coefficient(b)
        if c != 1.0 and math.isfinite(a.value * c):
            return mul(Const(a.value * c), rest)
        if a.value < 0:
            return neg(Mul(Const(-a.value), b))
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        quotient = a.value / b.value
        if _integral(quotient):
            return Const(quotient)
    if is_const(b, 1):
        return a
    if is_const(b, -1):
        return neg(a)
    if is_const(a, 0):
        return ZERO
    if isinstance(a, Neg):
        return neg(div(a.operand, b))
    if isinstance(b, Neg):
        return neg(div(a, b.operand))
    if isinstance(b, Const) and b.value != 0:
        c, rest = _coefficient(a)
        if c != 1.0 and _integral(c / b.value):
            return mul(Const(c / b.value), rest)
    return Div(a, b)


def power(base: Expr, exponent: Expr) -> Expr:
    if is_const(exponent, 0):
        return ONE
    if is_const(exponent, 1):
        return base
    if is_const(base, 1):
        return ONE
    if isinstance(base, Const) and isinstance(exponent, Const) and _integral(exponent.value):
        try:
            value = math.pow(base.value, exponent.value)
        except (ValueError, OverflowError, ZeroDivisionError):
            return Pow(base, exponent)
        if math.isfinite(value):
            return Const(value)
    return Pow(base, exponent)


def func(name: str, arg: Expr) -> Expr:
    if isinstance(arg, Const):
        from .evaluate import apply_function

        try:
            value = apply_function(name, arg.value)
        except (ValueError, OverflowError, ZeroDivisionError):
            return Func(name, arg)
        if _integral(value):
            return Const(value)
    return Func(name, arg)


# ==================== 化简 ====================

@singledispatch
def simplify(e: Expr) -> Expr:
    """
    结构化简（自底向上重建）

    保证 equal_numeric(e, simplify(e)) 成立；不做一般性的代数化简。
    """
    raise TypeError(f"不是表达式: {type(e).__name__}")


@simplify.register(Const)
@simplify.register(Var)
def _(e) -> Expr:
    return e


@simplify.register
def _(e: Neg) -> Expr:
    return neg(simplify(e.operand))


@simplify.register
def _(e: Add) -> Expr:
    return add(simplify(e.left), simplify(e.right))


@simplify.register
def _(e: Sub) -> Expr:
    return sub(simplify(e.left), simplify(e.right))


@simplify.register
def _(e: Mul) -> Expr:
    return mul(simplify(e.left), simplify(e.right))


@simplify.register
def _(e: Div) -> Expr:
    return div(simplify(e.left), simplify(e.right))


@simplify.register
def _(e: Pow) -> Expr:
    return power(simplify(e.base), simplify(e.exponent))


@simplify.register
def _(e: Func) -> Expr:
    return func(e.name, simplify(e.arg))


# ==================== 微分 ====================

@singledispatch
def _diff(e: Expr, name: str) -> Expr:
    raise TypeError(f"不是表达式: {type(e).__name__}")


@_diff.register
def _(e: Const, name: str) -> Expr:
    return ZERO


@_diff.register
def _(e: Var, name: str) -> Expr:
    return ONE if e.name == name else ZERO


@_diff.register
def _(e: Neg, name: str) -> Expr:
    return neg(_diff(e.operand, name))


@_diff.register
def _(e: Add, name: str) -> Expr:
    return add(_diff(e.left, name), _diff(e.right, name))


@_diff.register
def _(e: Sub, name: str) -> Expr:
    return sub(_diff(e.left, name), _diff(e.right, name))


# 以下各规则假定子树已化简（diff 入口处统一化简一次）

@_diff.register
def _(e: Mul, name: str) -> Expr:
    left, right = e.left, e.right
    return add(mul(_diff(left, name), right), mul(left, _diff(right, name)))


@_diff.register
def _(e: Div, name: str) -> Expr:
    num, den = e.left, e.right
    d_num, d_den = _diff(num, name), _diff(den, name)
    if is_const(d_den, 0):
        return div(d_num, den)
    return div(sub(mul(d_num, den), mul(num, d_den)), power(den, Const(2.0)))


@_diff.register
def _(e: Pow, name: str) -> Expr:
    base, exponent = e.base, e.exponent
    d_base, d_exp = _diff(base, name), _diff(exponent, name)
    if is_const(d_exp, 0):
        # 幂法则 c * u^(c-1) * u'
        reduced = power(base, sub(exponent, ONE))
        return mul(mul(exponent, reduced), d_base)
    if is_const(d_base, 0):
        return mul(mul(power(base, exponent), func("log", base)), d_exp)
    # u^v * (v' log u + v u'/u)
    inner = add(mul(d_exp, func("log", base)), div(mul(exponent, d_base), base))
    return mul(power(base, exponent), inner)


@_diff.register
def _(e: Func, name: str) -> Expr:
    u = e.arg
    du = _diff(u, name)
    if is_const(du, 0):
        return ZERO
    if e.name == "sin":
        outer = func("cos", u)
    elif e.name == "cos":
        outer = neg(func("sin", u))
    elif e.name == "tan":
        outer = div(ONE, power(func("cos", u), Const(2.0)))
    elif e.name == "exp":
        outer = func("exp", u)
    elif e.name == "log":
        return div(du, u)
    elif e.name == "sqrt":
        outer = div(ONE, mul(Const(2.0), func("sqrt", u)))
    else:
        # abs: u/|u|，在 u = 0 处求值时报定义域错误
        outer = div(u, func("abs", u))
    return mul(outer, du)


def diff(e: Expr, name: str) -> Expr:
    """
    精确偏导数

    Args:
        e: 表达式
        name: 求导变量名

    Returns:
        化简后的偏导数
    """
    return _diff(simplify(e), name)
