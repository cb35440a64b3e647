"""
Darboux 坐标 (q, p) 上的 Hamilton 场与其守恒量
"""

import logging
from typing import Optional, Sequence

from ..errors import CertificationError, ChartError
from ..expr import ONE, ZERO, Expr, SampleBox, equal_numeric
from ..expr.calculus import add, diff, div, mul, neg, simplify, sub
from ..expr.oracle import DEFAULT_RTOL
from ..geometry import Chart, Multiplier, VectorField, lie_derivative, same_chart
from ..invariants import (
    InvariantResult,
    invariant_divfree,
    invariant_multiplier,
    invariant_nonautonomous,
    invariant_normalizer,
)

logger = logging.getLogger(__name__)


def hamiltonian_vector_field(
    H: Expr,
    q: Sequence[str],
    p: Sequence[str],
    time: Optional[str] = None
) -> VectorField:
    """
    Hamilton 方程 q̇ = ∂H/∂p，ṗ = -∂H/∂q

    time 给出时坐标卡为 (t, q, p)，时间分量为 1。
    """
    if len(q) != len(p) or not q:
        raise ChartError(f"q 与 p 的个数必须相同且非零: {len(q)} vs {len(p)}")
    coords = tuple(q) + tuple(p)
    components = tuple(diff(H, pi) for pi in p) + tuple(neg(diff(H, qi)) for qi in q)
    if time is not None:
        coords = (time,) + coords
        components = (ONE,) + components
    chart = Chart(coords, time)
    chart.check_expr(H, "H")
    return VectorField.create(chart, components)


def nonautonomous_hamiltonian_expansion(
    X: VectorField,
    Y: VectorField,
    R: Optional[Multiplier] = None
) -> Expr:
    """
    展开式 (1/R)∂(Rσ)/∂t + (1/R)Σ(∂(Rξ^i)/∂q^i + ∂(Rη_i)/∂p_i) - X(σ)

    Y = σ ∂/∂t + ξ^i ∂/∂q^i + η_i ∂/∂p_i；R 缺省取 1。
    """
    same_chart(X, Y)
    if not X.chart.has_time:
        raise ChartError("展开式需要 (t, q, p) 坐标卡")
    weight = R.R if R is not None else ONE
    total = ZERO
    for name, comp in zip(X.chart.coords, Y.components):
        total = add(total, diff(mul(weight, comp), name))
    return simplify(sub(div(total, weight), lie_derivative(X, Y.components[0])))


def hamiltonian_invariant(
    X: VectorField,
    Y: VectorField,
    box: SampleBox,
    R: Optional[Multiplier] = None,
    h: Optional[Expr] = None,
    rtol: float = DEFAULT_RTOL
) -> InvariantResult:
    """
    相空间守恒量 Σ(∂ξ^i/∂q^i + ∂η_i/∂p_i + ξ^i ∂log R/∂q^i + η_i ∂log R/∂p_i)

    按输入分派：
        (t, q, p) 坐标卡     非自治构造，并与展开式交叉核对
        给出 h               正规化子构造
        给出 R               乘子构造
        否则                 无散构造（Hamilton 场的乘子为常数）
    """
    if X.chart.has_time:
        result = invariant_nonautonomous(X, Y, box, R=R, rtol=rtol)
        expansion = nonautonomous_hamiltonian_expansion(X, Y, R)
        report = equal_numeric(result.invariant, expansion, box, rtol, label="phase-space expansion")
        if not report.equal:
            raise CertificationError("相空间展开式与非自治构造不一致", report)
        result.preconditions.append(report)
        return result
    if h is not None:
        return invariant_normalizer(X, Y, box, R=R, h=h, rtol=rtol)
    if R is not None:
        return invariant_multiplier(X, Y, R, box, rtol)
    return invariant_divfree(X, Y, box, rtol)
