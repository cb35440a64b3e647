"""
二阶系统 (SODE / NSODE) 的一阶提升、点向量场延拓与对称条件

坐标约定：
    自治系统      (x^1..x^n, v^1..v^n)
    非自治系统    (t, x^1..x^n, v^1..v^n)
    演化空间      总是 (t, x, v)，自治系统以时间分量 1 嵌入
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..errors import CertificationError, ChartError, PreconditionViolation, VelocityDependenceError
from ..expr import ONE, ZERO, Const, EqualityReport, Expr, SampleBox, Var, equal_numeric, render, variables
from ..expr.calculus import add, diff, mul, neg, simplify, sub
from ..expr.oracle import DEFAULT_RTOL
from ..geometry import (
    Chart,
    Multiplier,
    NormalizerKind,
    VectorField,
    divergence,
    lie_derivative,
    normalizer_factor,
    same_chart,
)
from ..invariants import (
    InvariantResult,
    TheoremTag,
    invariant_divfree,
    invariant_multiplier,
    invariant_nonautonomous,
)

logger = logging.getLogger(__name__)

TIME = "t"
DEFAULT_TIME_INTERVAL = (0.0, 1.0)


def default_base_coords(n: int) -> Tuple[str, ...]:
    return ("x",) if n == 1 else tuple(f"x{i}" for i in range(1, n + 1))


def velocity_name(base: str) -> str:
    return f"v_{base}"


def evolution_box(box: SampleBox, time: str = TIME) -> SampleBox:
    """采样盒缺少时间区间时补上 t ∈ [0, 1]"""
    if time in box.names:
        return box
    return box.with_interval(time, *DEFAULT_TIME_INTERVAL)


@dataclass(frozen=True)
class SecondOrderSystem:
    """
    二阶系统 ẍ^i = F^i(t?, x, v)

    速度坐标默认命名为 "v_" + 基坐标名。
    """
    base_coords: Tuple[str, ...]
    velocity_coords: Tuple[str, ...]
    forces: Tuple[Expr, ...]
    time_dependent: bool = False
    time_coord: str = TIME

    def __post_init__(self):
        n = len(self.base_coords)
        if n < 1:
            raise ChartError("二阶系统至少需要一个自由度")
        if len(self.velocity_coords) != n or len(self.forces) != n:
            raise ChartError(f"速度坐标数 / 力的个数必须等于自由度 {n}")
        allowed = set(self.base_coords) | set(self.velocity_coords)
        if self.time_dependent:
            allowed.add(self.time_coord)
        for i, F in enumerate(self.forces):
            extra = variables(F) - allowed
            if extra:
                raise ChartError(f"F^{i + 1} 含有不允许的变量: {', '.join(sorted(extra))}")

    @classmethod
    def create(
        cls,
        base_coords: Sequence[str],
        forces: Sequence[Expr],
        time_dependent: bool = False,
        velocity_coords: Optional[Sequence[str]] = None,
        time_coord: str = TIME
    ) -> "SecondOrderSystem":
        base = tuple(base_coords)
        velocities = tuple(velocity_coords) if velocity_coords else tuple(velocity_name(b) for b in base)
        return cls(base, velocities, tuple(simplify(F) for F in forces), time_dependent, time_coord)

    @property
    def n(self) -> int:
        return len(self.base_coords)

    @property
    def chart(self) -> Chart:
        """提升场所在的坐标卡：(x, v) 或 (t, x, v)"""
        coords = self.base_coords + self.velocity_coords
        if self.time_dependent:
            return Chart((self.time_coord,) + coords, self.time_coord)
        return Chart(coords)

    @property
    def evolution_chart(self) -> Chart:
        return Chart((self.time_coord,) + self.base_coords + self.velocity_coords, self.time_coord)

    @property
    def point_coords(self) -> Tuple[str, ...]:
        """点向量场允许的变量 (t, x)"""
        return (self.time_coord,) + self.base_coords

    def with_forces(self, forces: Sequence[Expr]) -> "SecondOrderSystem":
        return SecondOrderSystem.create(
            self.base_coords, forces, self.time_dependent, self.velocity_coords, self.time_coord
        )


def _velocities(sys: SecondOrderSystem) -> Tuple[Expr, ...]:
    return tuple(Var(v) for v in sys.velocity_coords)


def sode_lift(sys: SecondOrderSystem) -> VectorField:
    """Γ = [∂/∂t +] v^i ∂/∂x^i + F^i ∂/∂v^i"""
    components = _velocities(sys) + sys.forces
    if sys.time_dependent:
        components = (ONE,) + components
    return VectorField(sys.chart, components)


def evolution_lift(sys: SecondOrderSystem) -> VectorField:
    """演化空间 (t, x, v) 上的 Γ，时间分量为 1"""
    return VectorField(sys.evolution_chart, (ONE,) + _velocities(sys) + sys.forces)


# ==================== 延拓 ====================

@dataclass(frozen=True)
class PointField:
    """(t, x) 上的点向量场 X^0 ∂/∂t + X^i ∂/∂x^i，分量不含速度"""
    X0: Expr
    Xi: Tuple[Expr, ...]

    @classmethod
    def create(cls, sys: SecondOrderSystem, X0: Expr, Xi: Sequence[Expr]) -> "PointField":
        Xi = tuple(simplify(c) for c in Xi)
        if len(Xi) != sys.n:
            raise ChartError(f"点向量场分量数 {len(Xi)} 与自由度 {sys.n} 不符")
        used = variables(X0).union(*(variables(c) for c in Xi))
        velocity = used & set(sys.velocity_coords)
        if velocity:
            raise VelocityDependenceError(velocity)
        extra = used - set(sys.point_coords)
        if extra:
            raise ChartError(f"点向量场含有 (t, x) 之外的变量: {', '.join(sorted(extra))}")
        return cls(simplify(X0), Xi)


def _lift(Y0: Expr, Yi: Sequence[Expr], sys: SecondOrderSystem) -> VectorField:
    """速度分量 Γ(Y^i) - v^i Γ(Y^0)"""
    gamma = evolution_lift(sys)
    time_rate = lie_derivative(gamma, Y0)
    bar = tuple(
        simplify(sub(lie_derivative(gamma, y), mul(v, time_rate)))
        for y, v in zip(Yi, _velocities(sys))
    )
    return VectorField(sys.evolution_chart, (simplify(Y0),) + tuple(simplify(y) for y in Yi) + bar)


def prolong(pf: PointField, sys: SecondOrderSystem) -> VectorField:
    """
    点向量场在演化空间上的一阶延拓 X^(1)

    保持接触形式 dx^i - v^i dt；结果与 Γ 的力无关。
    """
    return _lift(pf.X0, pf.Xi, sys)


LIFT_PRESETS = ("space", "time", "general")


def lift_symmetry(
    Y0: Optional[Expr],
    Yi: Optional[Sequence[Expr]],
    sys: SecondOrderSystem,
    preset: str = "general"
) -> VectorField:
    """
    把 (t, x, v) 上的 Y^0, Y^i 提升为演化空间上的场，速度分量为 Γ(Y^i) - v^i Γ(Y^0)

    preset:
        space    Y^0 ≡ 0（速度分量退化为 Γ(Y^i)）
        time     Y^i ≡ 0
        general  两者都由调用方给出
    """
    if preset not in LIFT_PRESETS:
        raise ValueError(f"未知的提升预设: {preset}")
    if preset == "space":
        Y0 = ZERO
    if preset == "time":
        Yi = [ZERO] * sys.n
    if Y0 is None or Yi is None:
        raise ValueError(f"预设 {preset} 需要同时给出 Y0 与 Yi")
    if len(Yi) != sys.n:
        raise ChartError(f"Yi 分量数 {len(Yi)} 与自由度 {sys.n} 不符")
    allowed = set(sys.evolution_chart.coords)
    for e in [Y0, *Yi]:
        extra = variables(e) - allowed
        if extra:
            raise ChartError(f"对称分量含有坐标卡之外的变量: {', '.join(sorted(extra))}")
    return _lift(Y0, Yi, sys)


def prolongation_divergence_check(
    pf: PointField,
    sys: SecondOrderSystem,
    box: SampleBox,
    rtol: float = DEFAULT_RTOL
) -> EqualityReport:
    """
    验证 div(X^(1)) = 2Σ(∂X^i/∂x^i - v^i ∂X^0/∂x^i) - (n-1)Γ(X^0)
    """
    box = evolution_box(box, sys.time_coord)
    gamma = evolution_lift(sys)
    lhs = divergence(prolong(pf, sys))
    rhs = mul(Const(2.0), _spatial_trace(pf, sys))
    rhs = sub(rhs, mul(Const(float(sys.n - 1)), lie_derivative(gamma, pf.X0)))
    return equal_numeric(lhs, rhs, box, rtol, label="div X^(1)")


def _spatial_trace(pf: PointField, sys: SecondOrderSystem) -> Expr:
    """Σ(∂X^i/∂x^i - v^i ∂X^0/∂x^i)"""
    total = ZERO
    for x, v, Xi in zip(sys.base_coords, _velocities(sys), pf.Xi):
        total = add(total, sub(diff(Xi, x), mul(v, diff(pf.X0, x))))
    return simplify(total)


# ==================== 对称条件 ====================

@dataclass
class SodeSymmetryReport:
    """二阶系统对称/正规化子条件的逐条检验"""
    commuting: bool
    normalizer: bool
    h: Expr
    conditions: List[EqualityReport] = field(default_factory=list)
    bracket_kind: Optional[NormalizerKind] = None

    @property
    def witness(self) -> Optional[Dict[str, float]]:
        for report in self.conditions:
            if not report.equal:
                return report.worst_point
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "commuting": self.commuting,
            "normalizer": self.normalizer,
            "h": render(self.h),
            "bracket_kind": self.bracket_kind.value if self.bracket_kind else None,
            "conditions": [r.to_dict() for r in self.conditions],
        }


def _embed(Y: VectorField, gamma: VectorField, time: str) -> Tuple[VectorField, VectorField]:
    """自治场嵌入演化空间；Y 的时间分量取 0"""
    if gamma.chart.has_time:
        return Y, gamma
    return Y.embed_time(time, ZERO), gamma.embed_time(time, ONE)


def sode_symmetry_conditions(
    Y: VectorField,
    gamma: VectorField,
    box: SampleBox,
    rtol: float = DEFAULT_RTOL,
    time: str = TIME
) -> SodeSymmetryReport:
    """
    逐条检验 Y 对二阶系统提升场 Γ 的对易 / 正规化子条件，并与括号路线交叉核对

    对易：     Γ(Y^0) = 0，Ȳ^i = Γ(Y^i)，Γ(Γ(Y^i)) = Y(F^i)
    正规化子： h = -Γ(Y^0)，Ȳ^i = Γ(Y^i) - Γ(Y^0) v^i，
              Y(F^i) = Γ(Γ(Y^i)) - 2Γ(Y^0) F^i - Γ(Γ(Y^0)) v^i

    自治的 Γ 与 Y 先嵌入 (t, x, v)。

    Raises:
        PreconditionViolation: Γ 不是二阶系统提升场
        CertificationError: 逐条条件与括号路线 [Y, Γ] = hΓ 的结论不一致
    """
    Y, gamma = _embed(Y, gamma, time)
    same_chart(Y, gamma)
    if not gamma.nsode_flag or (gamma.chart.dimension - 1) % 2:
        raise PreconditionViolation("nsode")
    box = evolution_box(box, gamma.chart.time_coord)

    n = (gamma.chart.dimension - 1) // 2
    coords = gamma.chart.coords
    velocities = [Var(v) for v in coords[1 + n:]]
    forces = gamma.components[1 + n:]
    Y0, Yi, Ybar = Y.components[0], Y.components[1:1 + n], Y.components[1 + n:]

    rate = lie_derivative(gamma, Y0)
    rate2 = lie_derivative(gamma, rate)
    h = simplify(neg(rate))

    commuting_checks = [equal_numeric(rate, ZERO, box, rtol, label="Γ(Y^0) = 0")]
    normalizer_checks = []
    for i in range(n):
        g_y = lie_derivative(gamma, Yi[i])
        gg_y = lie_derivative(gamma, g_y)
        y_f = lie_derivative(Y, forces[i])
        name = coords[1 + i]
        commuting_checks.append(equal_numeric(Ybar[i], g_y, box, rtol, label=f"Ȳ^{name} = Γ(Y^{name})"))
        commuting_checks.append(equal_numeric(gg_y, y_f, box, rtol, label=f"Γ(Γ(Y^{name})) = Y(F^{name})"))
        normalizer_checks.append(equal_numeric(
            Ybar[i], sub(g_y, mul(rate, velocities[i])), box, rtol,
            label=f"Ȳ^{name} = Γ(Y^{name}) - Γ(Y^0) v^{name}",
        ))
        expected = sub(sub(gg_y, mul(Const(2.0), mul(rate, forces[i]))), mul(rate2, velocities[i]))
        normalizer_checks.append(equal_numeric(
            y_f, expected, box, rtol, label=f"Y(F^{name}) normalizer form",
        ))

    commuting = all(r.equal for r in commuting_checks)
    normalizer = all(r.equal for r in normalizer_checks)

    # 括号路线
    bracket = normalizer_factor(gamma, Y, box, rtol, h_expr=h)
    report = SodeSymmetryReport(
        commuting=commuting,
        normalizer=normalizer,
        h=h,
        conditions=commuting_checks + normalizer_checks,
        bracket_kind=bracket.kind,
    )
    if commuting != (bracket.kind is NormalizerKind.COMMUTING) or normalizer != bracket.ok:
        logger.error("二阶条件与括号路线结论不一致: commuting=%s normalizer=%s bracket=%s",
                     commuting, normalizer, bracket.kind.value)
        raise CertificationError("二阶对称条件与括号路线结论不一致", report)
    return report


# ==================== 二阶系统的守恒量 ====================

def _restrict(Y: VectorField, chart: Chart) -> VectorField:
    """演化空间上时间分量为 0 的场限制回 (x, v)"""
    if Y.chart == chart:
        return Y
    if Y.chart.has_time and Y.chart.coords[1:] == chart.coords and Y.components[0] == ZERO:
        return VectorField(chart, Y.components[1:])
    raise ChartError(f"对称场坐标卡 {Y.chart.coords} 与系统坐标卡 {chart.coords} 不一致")


def sode_invariant(
    Y: VectorField,
    sys: SecondOrderSystem,
    box: SampleBox,
    R: Optional[Multiplier] = None,
    rtol: float = DEFAULT_RTOL
) -> InvariantResult:
    """
    二阶系统的守恒量 Σ(∂Y^i/∂x^i + ∂Ȳ^i/∂v^i) [+ Y(log R)]

    自治系统在 (x, v) 上构造，非自治系统走 (t, x, v) 上的非自治构造。
    """
    gamma = sode_lift(sys)
    if sys.time_dependent:
        box = evolution_box(box, sys.time_coord)
        result = invariant_nonautonomous(gamma, Y, box, R=R, rtol=rtol)
    else:
        Y = _restrict(Y, gamma.chart)
        if R is None:
            result = invariant_divfree(gamma, Y, box, rtol)
        else:
            result = invariant_multiplier(gamma, Y, R, box, rtol)
    result.notes.append(f"base: {result.theorem.value}")
    result.theorem = TheoremTag.SODE_LIFTED
    return result
