"""
微分几何基本运算：散度、Lie 导数、Lie 括号、Jacobi 乘子条件

约定：
    X(f)      = Σ X^i ∂f/∂x^i
    [X, Y]^i  = X(Y^i) - Y(X^i)
    div(X)    = Σ ∂X^i/∂x^i（坐标体积形式，含时间坐标时包括 ∂X^0/∂t）
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..errors import ChartError
from ..expr import ZERO, EqualityReport, Expr, Func, SampleBox, equal_numeric, is_zero
from ..expr.calculus import add, diff, mul, simplify, sub
from ..expr.oracle import DEFAULT_RTOL
from .chart import Multiplier, VectorField, same_chart

logger = logging.getLogger(__name__)


def divergence(X: VectorField) -> Expr:
    """div(X) = Σ ∂X^i/∂x^i（对所有坐标，包括时间）"""
    total = ZERO
    for name, comp in zip(X.chart.coords, X.components):
        total = add(total, diff(comp, name))
    return simplify(total)


def lie_derivative(X: VectorField, f: Expr) -> Expr:
    """𝓛_X f = Σ X^i ∂f/∂x^i"""
    X.chart.check_expr(f, "函数")
    total = ZERO
    for name, comp in zip(X.chart.coords, X.components):
        total = add(total, mul(comp, diff(f, name)))
    return simplify(total)


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """
    Lie 括号 [X, Y]，第 i 个分量为 X(Y^i) - Y(X^i)

    Raises:
        ChartError: 两个场的坐标卡不一致
    """
    same_chart(X, Y)
    components = tuple(
        simplify(sub(lie_derivative(X, y), lie_derivative(Y, x)))
        for x, y in zip(X.components, Y.components)
    )
    return VectorField(X.chart, components)


@dataclass
class FieldReport:
    """逐分量判零报告"""
    zero: bool
    components: List[EqualityReport] = field(default_factory=list)

    @property
    def witness(self) -> Optional[Dict[str, float]]:
        for report in self.components:
            if not report.equal:
                return report.worst_point
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {"zero": self.zero, "components": [r.to_dict() for r in self.components]}


def is_zero_field(B: VectorField, box: SampleBox, rtol: float = DEFAULT_RTOL, label: str = "") -> FieldReport:
    """所有分量在 box 上数值为零"""
    reports = [
        is_zero(comp, box, rtol, label=f"{label}[{name}]")
        for name, comp in zip(B.chart.coords, B.components)
    ]
    return FieldReport(all(r.equal for r in reports), reports)


def scale_divergence_check(X: VectorField, f: Expr, box: SampleBox, rtol: float = DEFAULT_RTOL) -> EqualityReport:
    """验证 div(fX) = X(f) + f·div(X)"""
    lhs = divergence(X.scale(f))
    rhs = add(lie_derivative(X, f), mul(f, divergence(X)))
    return equal_numeric(lhs, rhs, box, rtol, label="div(fX)")


def bracket_divergence_residual(
    X: VectorField,
    Y: VectorField,
    box: SampleBox,
    rtol: float = DEFAULT_RTOL
) -> EqualityReport:
    """
    散度-括号恒等式自检：𝓛_X(div Y) - 𝓛_Y(div X) = div([X, Y])

    两侧分别独立计算后交给数值判等。
    """
    same_chart(X, Y)
    lhs = sub(lie_derivative(X, divergence(Y)), lie_derivative(Y, divergence(X)))
    rhs = divergence(lie_bracket(X, Y))
    report = equal_numeric(lhs, rhs, box, rtol, label="bracket-divergence")
    logger.debug("散度-括号恒等式: %s (worst %.3e)", report.equal, report.worst_residual)
    return report


def multiplier_residual(X: VectorField, R: Multiplier) -> Expr:
    """
    Jacobi 乘子条件的残差 div(X) + 𝓛_X(log R)

    R 是 X 的 Jacobi 乘子当且仅当该残差在定义域上恒为零。
    """
    if X.chart != R.chart:
        raise ChartError(f"乘子坐标卡 {R.chart.coords} 与向量场 {X.chart.coords} 不一致")
    return simplify(add(divergence(X), lie_derivative(X, Func("log", R.R))))


def multiplier_report(X: VectorField, R: Multiplier, box: SampleBox, rtol: float = DEFAULT_RTOL) -> EqualityReport:
    return is_zero(multiplier_residual(X, R), box, rtol, label="multiplier")


def is_multiplier(X: VectorField, R: Multiplier, box: SampleBox, rtol: float = DEFAULT_RTOL) -> bool:
    """R 是否为 X 的 Jacobi 乘子（对常数正倍数不变）"""
    return multiplier_report(X, R, box, rtol).equal
