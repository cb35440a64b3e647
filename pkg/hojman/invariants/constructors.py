"""
Hojman 守恒量构造

四种构造共享同一流程：
    1. 检查前提（无散/乘子、对易/正规化子），失败抛 PreconditionViolation 并附反例点
    2. 按闭式公式组装 I
    3. 自检 𝓛_X I ≈ 0，失败抛 CertificationError
    4. 判断 I 在采样盒上是否为常数
"""

import logging
from typing import List, Optional, Sequence

from ..errors import (
    CertificationError,
    HInconsistentError,
    MissingTimeCoordinateError,
    PreconditionViolation,
)
from ..expr import ZERO, Const, EqualityReport, Expr, Func, SampleBox, equal_numeric, evaluate, first_point, is_zero
from ..expr.calculus import add, neg, simplify, sub
from ..expr.oracle import DEFAULT_RTOL, residual
from ..geometry import (
    Multiplier,
    VectorField,
    divergence,
    is_zero_field,
    lie_bracket,
    lie_derivative,
    multiplier_report,
    normalizer_factor,
    same_chart,
)
from ..geometry.normalizer import EPS_X
from .results import InvariantResult, TheoremTag

logger = logging.getLogger(__name__)


# ==================== 前提检查 ====================

def _require(report: EqualityReport, which: str) -> EqualityReport:
    if not report.equal:
        raise PreconditionViolation(which, report.worst_point, report)
    return report


def _require_divfree(X: VectorField, box: SampleBox, rtol: float) -> EqualityReport:
    return _require(is_zero(divergence(X), box, rtol, label="div X"), "div_free")


def _require_multiplier(X: VectorField, R: Multiplier, box: SampleBox, rtol: float) -> EqualityReport:
    return _require(multiplier_report(X, R, box, rtol), "multiplier")


def _require_commuting(X: VectorField, Y: VectorField, box: SampleBox, rtol: float) -> List[EqualityReport]:
    report = is_zero_field(lie_bracket(Y, X), box, rtol, label="[Y,X]")
    if not report.zero:
        raise PreconditionViolation("commuting", report.witness, report)
    return report.components


def _volume_term(X: VectorField, R: Optional[Multiplier], box: SampleBox, rtol: float) -> EqualityReport:
    """有乘子时检查乘子条件，否则检查无散"""
    if R is None:
        return _require_divfree(X, box, rtol)
    return _require_multiplier(X, R, box, rtol)


def _log_term(Y: VectorField, R: Optional[Multiplier]) -> Expr:
    """Y(log R)，R 缺省时为 0"""
    if R is None:
        return ZERO
    return lie_derivative(Y, Func("log", R.R))


# ==================== 自检与平凡性 ====================

def _constant_value(I: Expr, box: SampleBox, rtol: float) -> Optional[float]:
    """I 在 box 上数值为常数时返回该常数"""
    point = first_point([I], box)
    value = evaluate(I, point)
    if equal_numeric(I, Const(value), box, rtol, label="constant").equal:
        return value
    return None


def certify(
    X: VectorField,
    I: Expr,
    theorem: TheoremTag,
    Y: VectorField,
    box: SampleBox,
    rtol: float,
    R: Optional[Multiplier] = None,
    h: Optional[Expr] = None,
    preconditions: Sequence[EqualityReport] = ()
) -> InvariantResult:
    """
    验证 𝓛_X I ≈ 0 并封装结果

    Raises:
        CertificationError: 𝓛_X I 在采样盒上不为零
    """
    I = simplify(I)
    report = is_zero(lie_derivative(X, I), box, rtol, label="X(I)")
    if not report.equal:
        raise CertificationError(f"X(I) ≠ 0 @ {report.worst_point}", report)

    result = InvariantResult(
        invariant=I,
        theorem=theorem,
        X=X,
        Y=Y,
        box=box,
        rtol=rtol,
        R=R,
        h=h,
        certification=report,
        constant_value=_constant_value(I, box, rtol),
        preconditions=list(preconditions),
    )
    logger.info("守恒量 [%s]: I = %s%s", theorem.value, result.text, "（常数）" if result.trivial else "")
    return result


# ==================== 构造 ====================

def invariant_divfree(X: VectorField, Y: VectorField, box: SampleBox, rtol: float = DEFAULT_RTOL) -> InvariantResult:
    """
    无散场 X 与对称 Y（[Y, X] = 0）：I = div(Y)

    Raises:
        PreconditionViolation: which = div_free / commuting
    """
    same_chart(X, Y)
    X.chart.check_box(box)
    pre = [_require_divfree(X, box, rtol)]
    pre += _require_commuting(X, Y, box, rtol)
    return certify(X, divergence(Y), TheoremTag.DIVFREE_SYMMETRY, Y, box, rtol, preconditions=pre)


def invariant_multiplier(
    X: VectorField,
    Y: VectorField,
    R: Multiplier,
    box: SampleBox,
    rtol: float = DEFAULT_RTOL
) -> InvariantResult:
    """
    Jacobi 乘子 R 与对称 Y：I = div(Y) + Y(log R)

    Raises:
        PreconditionViolation: which = multiplier / commuting
    """
    same_chart(X, Y)
    X.chart.check_box(box)
    pre = [_require_multiplier(X, R, box, rtol)]
    pre += _require_commuting(X, Y, box, rtol)
    I = add(divergence(Y), _log_term(Y, R))
    return certify(X, I, TheoremTag.MULTIPLIER_SYMMETRY, Y, box, rtol, R=R, preconditions=pre)


def _constant_h(values: Sequence[float], rtol: float) -> Optional[Expr]:
    """逐点 h 值彼此一致时取为常数（保留 12 位有效数字）"""
    if not values:
        return None
    h0 = values[0]
    if all(residual(h0, h) <= rtol for h in values):
        return Const(float(f"{h0:.12g}"))
    return None


def invariant_normalizer(
    X: VectorField,
    Y: VectorField,
    box: SampleBox,
    *,
    R: Optional[Multiplier] = None,
    h: Optional[Expr] = None,
    rtol: float = DEFAULT_RTOL,
    eps_x: float = EPS_X
) -> InvariantResult:
    """
    正规化子 [Y, X] = h·X：I = div(Y) + Y(log R) + h

    R 缺省时要求 X 无散。h 缺省时取 normalizer_factor 的闭式结果；
    只有逐点数值时，若各点 h 一致则按常数处理。

    Raises:
        HInconsistentError: 给定的 h 不满足 [Y, X] = h·X
        PreconditionViolation: which = normalizer / div_free / multiplier
    """
    same_chart(X, Y)
    X.chart.check_box(box)
    nr = normalizer_factor(X, Y, box, rtol, h_expr=h, eps_x=eps_x)
    if not nr.ok:
        if h is not None:
            raise HInconsistentError(nr.witness)
        raise PreconditionViolation("normalizer", nr.witness, nr)

    factor = nr.h if nr.h is not None else _constant_h(nr.h_values, rtol)
    if factor is None:
        # 非常数 h 只能由调用方给出闭式
        raise PreconditionViolation("normalizer", None, nr)
    if nr.h is None:
        logger.debug("由逐点数值得到常数 h = %s", factor)

    pre = [_volume_term(X, R, box, rtol)] + list(nr.reports)
    I = add(add(divergence(Y), _log_term(Y, R)), factor)
    return certify(X, I, TheoremTag.NORMALIZER, Y, box, rtol, R=R, h=factor, preconditions=pre)


def invariant_nonautonomous(
    X: VectorField,
    Y: VectorField,
    box: SampleBox,
    *,
    R: Optional[Multiplier] = None,
    rtol: float = DEFAULT_RTOL
) -> InvariantResult:
    """
    (t, x) 上的时间分量为 1 的场 X：I = div(Y) + Y(log R) - X(Y^0)

    div 包含 ∂Y^0/∂t；Y(log R) 使用完整的 Y（含 Y^0 ∂/∂t 项）。
    前提 [Y, X] = h·X 以 h = -X(Y^0) 验证。

    Raises:
        MissingTimeCoordinateError: 坐标卡没有时间坐标
        PreconditionViolation: which = nsode / normalizer / div_free / multiplier
    """
    if not X.chart.has_time:
        raise MissingTimeCoordinateError()
    same_chart(X, Y)
    X.chart.check_box(box)
    if not X.nsode_flag:
        raise PreconditionViolation("nsode")

    time_term = lie_derivative(X, Y.components[0])
    h = simplify(neg(time_term))
    nr = normalizer_factor(X, Y, box, rtol, h_expr=h)
    if not nr.ok:
        raise PreconditionViolation("normalizer", nr.witness, nr)

    pre = [_volume_term(X, R, box, rtol)] + list(nr.reports)
    I = sub(add(divergence(Y), _log_term(Y, R)), time_term)
    tag = TheoremTag.NONAUTONOMOUS_DIVFREE if R is None else TheoremTag.NONAUTONOMOUS_MULTIPLIER
    return certify(X, I, tag, Y, box, rtol, R=R, h=h, preconditions=pre)
