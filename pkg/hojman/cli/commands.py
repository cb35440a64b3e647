"""
子命令实现：check / invariant / verify / lagrangian

每个命令接收已加载的问题文件与运行选项，返回 Report；
库异常在 run_command 中统一映射为 fail（前提/认证）或 error（输入）。
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

from ..errors import (
    CertificationError,
    DegenerateDirectionError,
    HInconsistentError,
    HojmanError,
    PreconditionViolation,
    ProblemSchemaError,
)
from ..expr import Expr, SampleBox, render, variables
from ..expr.calculus import neg, simplify
from ..geometry import (
    NormalizerKind,
    VectorField,
    bracket_divergence_residual,
    divergence,
    lie_derivative,
    multiplier_report,
    normalizer_factor,
)
from ..geometry.normalizer import EPS_X
from ..invariants import (
    InvariantResult,
    invariant_divfree,
    invariant_multiplier,
    invariant_nonautonomous,
    invariant_normalizer,
)
from ..mechanics import (
    LagrangianData,
    PointField,
    SecondOrderSystem,
    evolution_box,
    evolution_lift,
    hamiltonian_invariant,
    hojman_invariant_lagrangian,
    lagrangian_analyze,
    lagrangian_multiplier,
    lift_symmetry,
    prolong,
    prolongation_divergence_check,
    sode_invariant,
    sode_lift,
    sode_symmetry_conditions,
)
from ..numeric import CertificationSuite, DriftRun, certify_invariant, integrate, judge_drift, write_csv
from ..utils import Config
from .problem import ProblemFile
from .report import Check, Report

logger = logging.getLogger(__name__)

# 规范名 t21/t22/t23/t41 对应四种一阶构造；描述性名称作为别名保留
THEOREM_CODES = {"t21": "divfree", "t22": "multiplier", "t23": "normalizer", "t41": "nonautonomous"}
THEOREMS = ("auto", "t21", "t22", "t23", "t41", "lagrangian", "hamiltonian", "sode")
THEOREM_CHOICES = THEOREMS + tuple(THEOREM_CODES.values())
SHOW_CHOICES = ("all", "hessian", "forces", "multiplier", "energy")

# 前提或认证不满足：结论为 fail
FAIL_ERRORS = (PreconditionViolation, HInconsistentError, CertificationError, DegenerateDirectionError)


@dataclass
class RunOptions:
    """命令行参数与配置合并后的运行选项"""
    theorem: str = "auto"
    rtol: float = 1e-9
    eps_x: float = EPS_X
    max_dimension: int = 4
    det_floor: float = 1e-12
    step: float = 1e-3
    span: Tuple[float, float] = (0.0, 10.0)
    step_override: Optional[float] = None
    span_override: Optional[Tuple[float, float]] = None
    drift_tol: float = 1e-6
    ratio_band: Tuple[float, float] = (12.0, 40.0)
    noise_floor: float = 1e-11
    blowup: float = 1e12
    csv: Optional[str] = None
    show: str = "all"

    @classmethod
    def from_config(cls, config: Config, **overrides) -> "RunOptions":
        options = cls(
            rtol=config.rtol,
            eps_x=config.eps_x,
            max_dimension=config.max_dimension,
            det_floor=config.det_floor,
            step=config.step,
            span=tuple(config.span),
            drift_tol=config.drift_tol,
            ratio_band=tuple(config.ratio_band),
            noise_floor=config.noise_floor,
            blowup=config.blowup,
        )
        for key, value in overrides.items():
            if value is not None:
                setattr(options, key, value)
        return options


# ==================== 共用 ====================

def _midpoint(box: SampleBox) -> Dict[str, float]:
    """没有具体反例点时用采样盒中心作为见证"""
    return {name: (lo + hi) / 2.0 for name, lo, hi in box.intervals}


def _require(value, field_name: str, why: str):
    if value is None:
        raise ProblemSchemaError(field_name, f"缺少字段（{why}）")
    return value


def _analyze(problem: ProblemFile, options: RunOptions) -> LagrangianData:
    spec = _require(problem.lagrangian, "lagrangian", "需要 Lagrange 量")
    return lagrangian_analyze(
        spec.L,
        spec.n,
        spec.time_dependent,
        problem.box,
        base_coords=spec.base_coords,
        velocity_coords=spec.velocity_coords,
        rtol=options.rtol,
        max_dimension=options.max_dimension,
        det_floor=options.det_floor,
    )


def _system(problem: ProblemFile, options: RunOptions) -> Tuple[SecondOrderSystem, Optional[LagrangianData]]:
    if problem.lagrangian is not None:
        ld = _analyze(problem, options)
        return ld.system, ld
    return _require(problem.system, "forces", "需要二阶系统"), None


def _first_order_field(problem: ProblemFile, options: RunOptions, I: Expr) -> VectorField:
    """一阶场；二阶自治系统的守恒量含时间时改用演化空间上的 Γ"""
    if problem.vector_field is not None:
        return problem.vector_field
    sys, _ = _system(problem, options)
    if not sys.time_dependent and sys.time_coord in variables(I):
        return evolution_lift(sys)
    return sode_lift(sys)


def _sode_symmetry(problem: ProblemFile, sys: SecondOrderSystem) -> Optional[VectorField]:
    """二阶问题的对称场：sode_symmetry 预设提升到 (t, x, v)，或直接给在提升坐标卡上"""
    spec = problem.sode_symmetry
    if spec is not None:
        return lift_symmetry(spec.Y0, spec.Yi, sys, spec.preset)
    return problem.symmetry_field(sys.chart)


def _point_field(problem: ProblemFile, sys: SecondOrderSystem) -> PointField:
    spec = _require(problem.point_field, "point_field", "需要点向量场")
    return PointField.create(sys, spec.X0, spec.Xi)


def _report_check(report: Report, name: str, equality) -> Check:
    return report.add(Check(name, equality.equal, equality.to_dict(), equality.witness))


# ==================== check ====================

def cmd_check(problem: ProblemFile, options: RunOptions, report: Report) -> Report:
    """对给出的成分运行所有适用的结构检查"""
    box = problem.box
    if problem.vector_field is not None:
        X = problem.vector_field
        X.chart.check_box(box)
        report.outputs["divergence"] = render(divergence(X))
        R = problem.multiplier_on(X.chart, box)
        if R is not None:
            _report_check(report, "multiplier", multiplier_report(X, R, box, options.rtol))
        Y = problem.symmetry_field(X.chart)
        if Y is not None:
            _report_check(report, "bracket_divergence", bracket_divergence_residual(X, Y, box, options.rtol))
            nr = normalizer_factor(X, Y, box, options.rtol, h_expr=problem.h, eps_x=options.eps_x)
            report.outputs["symmetry"] = nr.kind.value
            if nr.h is not None:
                report.outputs["h"] = render(nr.h)
            name = "h_consistency" if problem.h is not None else "normalizer"
            report.add(Check(name, nr.ok, nr.to_dict(), nr.witness))
        return report.finalize()

    sys, ld = _system(problem, options)
    if ld is not None:
        _report_check(report, "euler_lagrange", ld.el_report)
        R = lagrangian_multiplier(ld, box, options.rtol)
        report.outputs["multiplier"] = render(R.R)
        report.add(Check("det_w_multiplier", True, {"R": render(R.R), "sign_note": ld.sign_note}))
    if problem.point_field is not None:
        pf = _point_field(problem, sys)
        ebox = evolution_box(box, sys.time_coord)
        gamma = evolution_lift(sys)
        X1 = prolong(pf, sys)
        report.outputs["prolongation"] = [render(c) for c in X1.components]
        _report_check(report, "prolongation_divergence", prolongation_divergence_check(pf, sys, box, options.rtol))
        h = simplify(neg(lie_derivative(gamma, pf.X0)))
        nr = normalizer_factor(gamma, X1, ebox, options.rtol, h_expr=h, eps_x=options.eps_x)
        report.outputs["symmetry"] = nr.kind.value
        report.add(Check("prolonged_normalizer", nr.ok, nr.to_dict(), nr.witness))
    Y = _sode_symmetry(problem, sys)
    if Y is not None:
        sr = sode_symmetry_conditions(Y, sode_lift(sys), box, options.rtol, sys.time_coord)
        report.outputs["sode_symmetry"] = "commuting" if sr.commuting else ("normalizer" if sr.normalizer else "none")
        report.add(Check("sode_symmetry", sr.commuting or sr.normalizer, sr.to_dict(), sr.witness))
    return report.finalize()


# ==================== invariant ====================

def _first_order_invariant(problem: ProblemFile, options: RunOptions, theorem: str) -> InvariantResult:
    X = problem.vector_field
    box = problem.box
    Y = _require(problem.symmetry_field(X.chart), "symmetry", "构造守恒量需要对称场")
    R = problem.multiplier_on(X.chart, box)
    h = problem.h

    if theorem == "auto":
        if problem.dynamics == "hamiltonian":
            theorem = "hamiltonian"
        elif X.nsode_flag:
            theorem = "nonautonomous"
        elif h is not None:
            theorem = "normalizer"
        elif normalizer_factor(X, Y, box, options.rtol, eps_x=options.eps_x).kind is NormalizerKind.NORMALIZER:
            theorem = "normalizer"
        elif R is not None:
            theorem = "multiplier"
        else:
            theorem = "divfree"
        logger.info("自动选择构造方式: %s", theorem)

    if theorem == "divfree":
        return invariant_divfree(X, Y, box, options.rtol)
    if theorem == "multiplier":
        return invariant_multiplier(X, Y, _require(R, "multiplier", "乘子构造需要 R"), box, options.rtol)
    if theorem == "normalizer":
        return invariant_normalizer(X, Y, box, R=R, h=h, rtol=options.rtol, eps_x=options.eps_x)
    if theorem == "nonautonomous":
        return invariant_nonautonomous(X, Y, box, R=R, rtol=options.rtol)
    if theorem == "hamiltonian":
        return hamiltonian_invariant(X, Y, box, R=R, h=h, rtol=options.rtol)
    raise ProblemSchemaError("lagrangian", f"构造方式 {theorem} 需要二阶问题（lagrangian 或 forces）")


def _second_order_invariant(problem: ProblemFile, options: RunOptions, theorem: str) -> InvariantResult:
    sys, ld = _system(problem, options)
    if theorem == "auto":
        theorem = "lagrangian" if ld is not None and problem.point_field is not None else "sode"
        logger.info("自动选择构造方式: %s", theorem)

    if theorem == "lagrangian":
        if ld is None:
            raise ProblemSchemaError("lagrangian", "延拓构造需要 Lagrange 量")
        return hojman_invariant_lagrangian(_point_field(problem, sys), ld, problem.box, options.rtol)
    if theorem == "sode":
        Y = _require(_sode_symmetry(problem, sys), "symmetry", "二阶构造需要 symmetry 或 sode_symmetry")
        if ld is not None:
            R = lagrangian_multiplier(ld, problem.box, options.rtol)
        else:
            chart = sode_lift(sys).chart
            R = problem.multiplier_on(chart, evolution_box(problem.box) if chart.has_time else problem.box)
        return sode_invariant(Y, sys, problem.box, R=R, rtol=options.rtol)
    raise ProblemSchemaError("vector_field", f"构造方式 {theorem} 需要一阶向量场")


def build_invariant(problem: ProblemFile, options: RunOptions) -> InvariantResult:
    """按 --theorem 与问题成分构造守恒量"""
    theorem = THEOREM_CODES.get(options.theorem, options.theorem)
    if problem.vector_field is not None:
        return _first_order_invariant(problem, options, theorem)
    return _second_order_invariant(problem, options, theorem)


def _fill_invariant(report: Report, result: InvariantResult):
    report.theorem = result.theorem.value
    report.invariant = result.text
    report.trivial = result.trivial
    report.constant_value = result.constant_value
    if result.h is not None:
        report.outputs["h"] = render(result.h)
    if result.notes:
        report.outputs["notes"] = list(result.notes)


def cmd_invariant(problem: ProblemFile, options: RunOptions, report: Report) -> Report:
    result = build_invariant(problem, options)
    _fill_invariant(report, result)
    for pre in result.preconditions:
        _report_check(report, pre.label or "precondition", pre)
    _report_check(report, "certification", result.certification)
    return report.finalize()


# ==================== verify ====================

def cmd_verify(problem: ProblemFile, options: RunOptions, report: Report) -> Report:
    """逐点 + 沿轨线的完整认证；候选量缺省时使用 invariant 命令的结果"""
    if problem.candidate is not None:
        I: Expr = problem.candidate
        report.invariant = render(I)
    else:
        result = build_invariant(problem, options)
        _fill_invariant(report, result)
        I = result.invariant
    X = _first_order_field(problem, options, I)

    box = evolution_box(problem.box, X.chart.time_coord) if X.chart.has_time else problem.box
    numeric = problem.numeric
    step = options.step_override or numeric.step or options.step
    span = options.span_override or numeric.span or options.span
    x0 = dict(_require(numeric.x0, "numeric.x0", "轨线认证需要初值"))
    if X.chart.has_time:
        x0.setdefault(X.chart.time_coord, span[0])

    suite = CertificationSuite(
        boxes=[box],
        runs=[DriftRun(x0, tuple(span), step)],
        rtol=options.rtol,
        drift_tol=options.drift_tol,
        ratio_band=tuple(options.ratio_band),
        noise_floor=options.noise_floor,
        blowup=options.blowup,
    )
    verdict = certify_invariant(X, I, suite)
    for pointwise in verdict.pointwise:
        _report_check(report, "pointwise", pointwise)
    for d in verdict.drifts:
        reason = judge_drift(d, suite)
        detail = d.to_dict()
        if reason:
            detail["reason"] = reason
        report.add(Check("drift", reason is None, detail, d.initial_state if reason else None))
    if not verdict.passed and all(c.passed for c in report.checks):
        report.add(Check("certification", False, {"failures": verdict.failures}, verdict.witness or x0))

    if options.csv:
        traj = integrate(X, x0, span, step, options.blowup)
        report.outputs["csv"] = str(write_csv(traj, options.csv))
    return report.finalize()


# ==================== lagrangian ====================

def cmd_lagrangian(problem: ProblemFile, options: RunOptions, report: Report) -> Report:
    """输出 Lagrange 导出量，并总是重新认证 det W 乘子"""
    ld = _analyze(problem, options)
    R = lagrangian_multiplier(ld, problem.box, options.rtol)
    gamma = sode_lift(ld.system)
    box = evolution_box(problem.box) if gamma.chart.has_time else problem.box

    show = options.show
    if show in ("all", "hessian"):
        report.outputs["hessian"] = [[render(w) for w in row] for row in ld.W]
        report.outputs["det_w"] = render(ld.detW)
    if show in ("all", "forces"):
        report.outputs["forces"] = [render(F) for F in ld.forces]
    if show in ("all", "multiplier"):
        report.outputs["multiplier"] = render(R.R)
        if ld.sign_note:
            report.outputs["sign_note"] = ld.sign_note
    if show in ("all", "energy"):
        report.outputs["energy"] = render(ld.energy)

    _report_check(report, "euler_lagrange", ld.el_report)
    _report_check(report, "det_w_multiplier", multiplier_report(gamma, R, box, options.rtol))
    return report.finalize()


# ==================== 分派 ====================

COMMANDS: Dict[str, Callable[[ProblemFile, RunOptions, Report], Report]] = {
    "check": cmd_check,
    "invariant": cmd_invariant,
    "verify": cmd_verify,
    "lagrangian": cmd_lagrangian,
}


def run_command(command: str, problem: ProblemFile, options: RunOptions, report: Optional[Report] = None) -> Report:
    """
    执行子命令并把库异常映射为结论

    前提/认证类异常 → fail（附反例点，缺省为采样盒中心）；其余库异常 → error。
    """
    report = report or Report(command)
    try:
        return COMMANDS[command](problem, options, report)
    except FAIL_ERRORS as e:
        logger.warning("%s: %s", type(e).__name__, e)
        return report.fail(str(e), getattr(e, "witness", None) or _midpoint(problem.box))
    except HojmanError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return report.error(str(e))
