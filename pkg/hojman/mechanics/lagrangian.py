"""
Lagrange 系统：Hessian W、混合矩阵 A、Euler-Lagrange 力、det W 乘子与延拓对称守恒量

    W_ij = ∂²L/∂v^i∂v^j
    A_ij = ∂²L/∂x^i∂v^j
    Σ_j W_ij F^j = ∂L/∂x^i - Σ_j A_ji v^j - ∂²L/∂t∂v^i
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..errors import (
    CertificationError,
    ChartError,
    DegenerateLagrangianError,
    DimensionTooLargeError,
    PreconditionViolation,
)
from ..expr import ZERO, Const, EqualityReport, Expr, Func, SampleBox, Var, equal_numeric, is_zero, retained_points, variables
from ..expr.calculus import add, diff, div, mul, neg, simplify, sub
from ..expr.oracle import DEFAULT_RTOL
from ..geometry import Multiplier, lie_derivative, multiplier_report, normalizer_factor
from ..invariants import InvariantResult, TheoremTag, certify, invariant_normalizer
from .sode import (
    TIME,
    PointField,
    SecondOrderSystem,
    default_base_coords,
    evolution_box,
    evolution_lift,
    prolong,
    sode_lift,
    velocity_name,
)

logger = logging.getLogger(__name__)

MAX_DIMENSION = 4
DET_FLOOR = 1e-12

Matrix = Tuple[Tuple[Expr, ...], ...]


def determinant(M: Sequence[Sequence[Expr]]) -> Expr:
    """按第一行 Laplace 展开的符号行列式"""
    n = len(M)
    if n == 1:
        return simplify(M[0][0])
    total = ZERO
    for j in range(n):
        if M[0][j] == ZERO:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = mul(M[0][j], determinant(minor))
        total = add(total, term) if j % 2 == 0 else sub(total, term)
    return simplify(total)


def _replace_column(M: Matrix, j: int, column: Sequence[Expr]) -> List[Tuple[Expr, ...]]:
    return [row[:j] + (column[i],) + row[j + 1:] for i, row in enumerate(M)]


@dataclass(frozen=True)
class LagrangianData:
    """正则 Lagrange 量及其导出量"""
    L: Expr
    system: SecondOrderSystem
    W: Matrix
    A: Matrix
    detW: Expr
    energy: Expr
    det_sign: int = 1
    el_report: Optional[EqualityReport] = None

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def forces(self) -> Tuple[Expr, ...]:
        return self.system.forces

    @property
    def time_dependent(self) -> bool:
        return self.system.time_dependent

    @property
    def sign_note(self) -> Optional[str]:
        if self.det_sign < 0:
            return "det W < 0，乘子取 -det W"
        return None


def _check_regular(detW: Expr, box: SampleBox, det_floor: float) -> int:
    """在采样盒上检查 |det W| > det_floor 且符号不变，返回符号"""
    if detW == ZERO:
        raise DegenerateLagrangianError()
    signs = set()
    checked = 0
    for point, (value,) in retained_points([detW], box):
        if abs(value) <= det_floor:
            raise DegenerateLagrangianError(point)
        signs.add(1 if value > 0 else -1)
        if len(signs) > 1:
            # 采样盒内 det W 过零
            raise DegenerateLagrangianError(point)
        checked += 1
        if checked >= box.count:
            break
    if not signs:
        raise DegenerateLagrangianError()
    return signs.pop()


def lagrangian_analyze(
    L: Expr,
    n: int,
    time_dependent: bool,
    box: SampleBox,
    base_coords: Optional[Sequence[str]] = None,
    velocity_coords: Optional[Sequence[str]] = None,
    rtol: float = DEFAULT_RTOL,
    max_dimension: int = MAX_DIMENSION,
    det_floor: float = DET_FLOOR
) -> LagrangianData:
    """
    由 Lagrange 量导出 W、A、det W、力与能量

    力由 Cramer 法则得到：F^i = det(W 的第 i 列换成右端项) / det W。

    Args:
        L: Lagrange 量，变量取自 (t?, x, v)
        n: 自由度
        time_dependent: L 是否显含时间
        box: 采样盒（检查正则性与 EL 恒等式）
        base_coords: 基坐标名，默认 x 或 x1..xn
        velocity_coords: 速度坐标名，默认 v_<基坐标>

    Raises:
        DimensionTooLargeError: n 超过上限
        DegenerateLagrangianError: det W 在采样点接近 0 或变号
        CertificationError: EL 恒等式未通过（不应出现）
    """
    if n < 1:
        raise ChartError(f"自由度必须 ≥ 1: {n}")
    if n > max_dimension:
        raise DimensionTooLargeError(n, max_dimension)

    base = tuple(base_coords) if base_coords else default_base_coords(n)
    velocities = tuple(velocity_coords) if velocity_coords else tuple(velocity_name(b) for b in base)
    if len(base) != n or len(velocities) != n:
        raise ChartError(f"坐标名个数与自由度 {n} 不符")

    allowed = set(base) | set(velocities) | ({TIME} if time_dependent else set())
    extra = variables(L) - allowed
    if extra:
        raise ChartError(f"L 含有不允许的变量: {', '.join(sorted(extra))}")

    L = simplify(L)
    dL_dv = [diff(L, v) for v in velocities]
    W: Matrix = tuple(tuple(diff(dL_dv[i], velocities[j]) for j in range(n)) for i in range(n))
    A: Matrix = tuple(tuple(diff(diff(L, base[i]), velocities[j]) for j in range(n)) for i in range(n))

    if time_dependent:
        box = evolution_box(box)
    detW = determinant(W)
    det_sign = _check_regular(detW, box, det_floor)

    rhs = []
    for i in range(n):
        r = diff(L, base[i])
        for j in range(n):
            r = sub(r, mul(A[j][i], Var(velocities[j])))
        if time_dependent:
            r = sub(r, diff(dL_dv[i], TIME))
        rhs.append(simplify(r))

    forces = [simplify(div(determinant(_replace_column(W, i, rhs)), detW)) for i in range(n)]
    system = SecondOrderSystem.create(base, forces, time_dependent, velocities)

    energy = neg(L)
    for i in range(n):
        energy = add(energy, mul(Var(velocities[i]), dL_dv[i]))
    energy = simplify(energy)

    el_report = el_residual_report(L, W, A, system, box, rtol)
    if not el_report.equal:
        raise CertificationError("Euler-Lagrange 恒等式", el_report)

    if det_sign < 0:
        logger.warning("det W 在采样盒上为负，乘子取 -det W")
    logger.debug("Lagrange 分析完成: n=%d detW=%s", n, detW)
    return LagrangianData(L, system, W, A, detW, energy, det_sign, el_report)


def el_residual_report(
    L: Expr,
    W: Matrix,
    A: Matrix,
    system: SecondOrderSystem,
    box: SampleBox,
    rtol: float = DEFAULT_RTOL
) -> EqualityReport:
    """Σ_j W_ij F^j + Σ_j A_ji v^j + ∂²L/∂t∂v^i - ∂L/∂x^i 逐分量为零，返回首个失败或残差最大的一条"""
    reports = []
    for i, (x, v) in enumerate(zip(system.base_coords, system.velocity_coords)):
        r = neg(diff(L, x))
        for j in range(system.n):
            r = add(r, mul(W[i][j], system.forces[j]))
            r = add(r, mul(A[j][i], Var(system.velocity_coords[j])))
        if system.time_dependent:
            r = add(r, diff(diff(L, v), TIME))
        reports.append(is_zero(r, box, rtol, label=f"EL[{x}]"))
    failed = [r for r in reports if not r.equal]
    if failed:
        return failed[0]
    return max(reports, key=lambda r: r.worst_residual)


def lagrangian_multiplier(
    ld: LagrangianData,
    box: SampleBox,
    rtol: float = DEFAULT_RTOL,
    evolution: bool = False
) -> Multiplier:
    """
    det W（或 -det W）作为提升场 Γ 的 Jacobi 乘子，并以乘子条件自检

    Args:
        evolution: True 时在演化空间 (t, x, v) 上给出

    Raises:
        CertificationError: 乘子条件未通过（有效输入下不应出现）
    """
    gamma = evolution_lift(ld.system) if evolution else sode_lift(ld.system)
    if gamma.chart.has_time:
        box = evolution_box(box, gamma.chart.time_coord)
    R = ld.detW if ld.det_sign > 0 else neg(ld.detW)
    multiplier = Multiplier.create(gamma.chart, R, box)
    report = multiplier_report(gamma, multiplier, box, rtol)
    if not report.equal:
        raise CertificationError("det W 乘子条件", report)
    logger.info("det W 乘子已验证: R = %s", multiplier.R)
    return multiplier


def lagrangian_invariant_expr(pf: PointField, ld: LagrangianData, R: Multiplier) -> Expr:
    """I = 2Σ(∂X^i/∂x^i - v^i ∂X^0/∂x^i) - n·Γ(X^0) + X^(1)(log det W)"""
    sys = ld.system
    gamma = evolution_lift(sys)
    trace = ZERO
    for x, v, Xi in zip(sys.base_coords, sys.velocity_coords, pf.Xi):
        trace = add(trace, sub(diff(Xi, x), mul(Var(v), diff(pf.X0, x))))
    I = sub(mul(Const(2.0), trace), mul(Const(float(sys.n)), lie_derivative(gamma, pf.X0)))
    return simplify(add(I, lie_derivative(prolong(pf, sys), Func("log", R.R))))


def hojman_invariant_lagrangian(
    pf: PointField,
    ld: LagrangianData,
    box: SampleBox,
    rtol: float = DEFAULT_RTOL
) -> InvariantResult:
    """
    Lagrange 系统中点对称的守恒量

    要求 X^(1) 是演化空间上 Γ 的正规化子，h = -Γ(X^0)。
    闭式结果与一般正规化子构造（乘子 det W）交叉核对。

    Raises:
        PreconditionViolation: which = normalizer
        CertificationError: 两条路线结果不一致
    """
    sys = ld.system
    box = evolution_box(box, sys.time_coord)
    gamma = evolution_lift(sys)
    X1 = prolong(pf, sys)
    R = lagrangian_multiplier(ld, box, rtol, evolution=True)

    h = simplify(neg(lie_derivative(gamma, pf.X0)))
    nr = normalizer_factor(gamma, X1, box, rtol, h_expr=h)
    if not nr.ok:
        raise PreconditionViolation("normalizer", nr.witness, nr)

    I = lagrangian_invariant_expr(pf, ld, R)
    result = certify(gamma, I, TheoremTag.LAGRANGIAN_PROLONGED, X1, box, rtol, R=R, h=h,
                     preconditions=list(nr.reports))

    generic = invariant_normalizer(gamma, X1, box, R=R, h=h, rtol=rtol)
    agreement = equal_numeric(result.invariant, generic.invariant, box, rtol, label="route agreement")
    if not agreement.equal:
        raise CertificationError("延拓公式与一般正规化子构造不一致", agreement)
    result.preconditions.append(agreement)
    if ld.sign_note:
        result.notes.append(ld.sign_note)
    return result
