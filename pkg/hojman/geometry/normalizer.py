"""
正规化子检测：判断 [Y, X] = h·X

h 只在能精确得到时以闭式返回（对易、用户给定、或 X 的时间分量为 1）；
其余情况返回逐点的数值候选值与一致性结论。
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from ..errors import DegenerateDirectionError, InsufficientSamplesError
from ..expr import ZERO, EqualityReport, Expr, SampleBox, equal_numeric, render
from ..expr.calculus import mul, simplify
from ..expr.oracle import DEFAULT_RTOL, residual, retained_points
from .chart import VectorField, same_chart
from .operations import is_zero_field, lie_bracket

logger = logging.getLogger(__name__)

EPS_X = 1e-8


class NormalizerKind(Enum):
    """正规化子判定结果"""
    COMMUTING = "commuting"
    NORMALIZER = "normalizer"
    NOT_NORMALIZER = "not_normalizer"


@dataclass
class NormalizerResult:
    kind: NormalizerKind
    h: Optional[Expr] = None  # 闭式 h（若可得）
    witness: Optional[Dict[str, float]] = None
    h_values: List[float] = field(default_factory=list)  # 数值路径下的逐点候选值
    bracket: Optional[VectorField] = None
    reports: List[EqualityReport] = field(default_factory=list)
    h_supplied: bool = False

    @property
    def ok(self) -> bool:
        return self.kind is not NormalizerKind.NOT_NORMALIZER

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "h": render(self.h) if self.h is not None else None,
            "witness": self.witness,
            "h_supplied": self.h_supplied,
        }


def _verify_closed_form(
    B: VectorField,
    X: VectorField,
    h: Expr,
    box: SampleBox,
    rtol: float,
    supplied: bool
) -> NormalizerResult:
    """逐分量验证 B^i = h·X^i"""
    reports = [
        equal_numeric(b, mul(h, x), box, rtol, label=f"[Y,X]^{name} = h X^{name}")
        for name, b, x in zip(X.chart.coords, B.components, X.components)
    ]
    for report in reports:
        if not report.equal:
            return NormalizerResult(
                NormalizerKind.NOT_NORMALIZER,
                h=h,
                witness=report.worst_point,
                bracket=B,
                reports=reports,
                h_supplied=supplied,
            )
    return NormalizerResult(NormalizerKind.NORMALIZER, h=h, bracket=B, reports=reports, h_supplied=supplied)


def _verify_pointwise(
    B: VectorField,
    X: VectorField,
    box: SampleBox,
    rtol: float,
    eps_x: float
) -> NormalizerResult:
    """无闭式 h 时的逐点检验：取 |X^i| 最大的分量求候选 h = B^i / X^i"""
    n = X.chart.dimension
    h_values: List[float] = []
    degenerate = 0
    for point, values in retained_points(list(X.components) + list(B.components), box):
        xs, bs = values[:n], values[n:]
        i = max(range(n), key=lambda k: abs(xs[k]))
        if abs(xs[i]) <= eps_x:
            degenerate += 1
            continue
        h = bs[i] / xs[i]
        for b, x in zip(bs, xs):
            if residual(b, h * x) > rtol:
                return NormalizerResult(
                    NormalizerKind.NOT_NORMALIZER,
                    witness=point,
                    h_values=h_values,
                    bracket=B,
                )
        h_values.append(h)
        if len(h_values) >= box.count:
            break

    if len(h_values) < box.count:
        if degenerate > 0:
            raise DegenerateDirectionError(degenerate, box.count)
        raise InsufficientSamplesError(len(h_values), box.count)
    return NormalizerResult(NormalizerKind.NORMALIZER, h_values=h_values, bracket=B)


def normalizer_factor(
    X: VectorField,
    Y: VectorField,
    box: SampleBox,
    rtol: float = DEFAULT_RTOL,
    h_expr: Optional[Expr] = None,
    eps_x: float = EPS_X
) -> NormalizerResult:
    """
    判断 Y 是否为 X 的正规化子，即 [Y, X] = h·X

    Args:
        X: 动力学向量场
        Y: 候选对称场
        box: 采样盒
        rtol: 相对容差
        h_expr: 用户给定的 h（可选），给定时逐分量验证
        eps_x: 忽略 |X^i| ≤ eps_x 的分量

    Returns:
        NormalizerResult：commuting（h = 0）/ normalizer(h) / not_normalizer(witness)

    Raises:
        DegenerateDirectionError: X 在过多采样点上所有分量都接近 0
    """
    same_chart(X, Y)
    B = lie_bracket(Y, X)

    if h_expr is None:
        zero_report = is_zero_field(B, box, rtol, label="[Y,X]")
        if zero_report.zero:
            logger.debug("[Y,X] = 0，对易")
            return NormalizerResult(NormalizerKind.COMMUTING, h=ZERO, bracket=B, reports=zero_report.components)
        if X.nsode_flag:
            # 时间分量为 1，h·1 = B^0
            return _verify_closed_form(B, X, simplify(B.components[0]), box, rtol, supplied=False)
        return _verify_pointwise(B, X, box, rtol, eps_x)

    X.chart.check_expr(h_expr, "h")
    result = _verify_closed_form(B, X, simplify(h_expr), box, rtol, supplied=True)
    if result.ok and all(r.equal for r in is_zero_field(B, box, rtol).components):
        result.kind = NormalizerKind.COMMUTING
    return result
