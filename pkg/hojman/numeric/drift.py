"""
沿轨线的守恒量漂移与综合认证

认证 = 逐点检验 𝓛_X I ≈ 0 + 沿轨线的漂移检验（含步长减半的收敛比）。
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import DomainError, DriftError, HojmanError
from ..expr import EqualityReport, Expr, SampleBox, compile_expr, is_zero, render
from ..expr.oracle import DEFAULT_RTOL
from ..geometry import VectorField, lie_derivative
from .integrator import BLOWUP, Trajectory, integrate

logger = logging.getLogger(__name__)

DRIFT_TOL = 1e-6
RATIO_BAND = (12.0, 40.0)
NOISE_FLOOR = 1e-11


@dataclass
class DriftReport:
    """守恒量沿轨线的漂移"""
    invariant_name: str
    initial_value: float
    max_abs_drift: float
    relative_drift: float
    per_halving_ratio: Optional[float] = None
    step: float = 0.0
    truncated: bool = False
    truncation_time: Optional[float] = None
    initial_state: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "invariant": self.invariant_name,
            "initial_value": self.initial_value,
            "max_abs_drift": self.max_abs_drift,
            "relative_drift": self.relative_drift,
            "per_halving_ratio": self.per_halving_ratio,
            "step": self.step,
            "truncated": self.truncated,
            "truncation_time": self.truncation_time,
            "x0": self.initial_state,
        }


def _values_along(traj: Trajectory, I: Expr) -> np.ndarray:
    traj.chart.check_expr(I, "守恒量")
    f = compile_expr(I, traj.chart.coords)
    values = np.empty(len(traj))
    for index, row in enumerate(traj.states):
        try:
            values[index] = f(row.tolist())
        except DomainError as e:
            raise DriftError(index, e) from e
    return values


def _max_drift(traj: Trajectory, I: Expr) -> Tuple[float, float]:
    values = _values_along(traj, I)
    return float(values[0]), float(np.max(np.abs(values - values[0])))


def drift(traj: Trajectory, I: Expr, name: Optional[str] = None, halving: bool = True) -> DriftReport:
    """
    I 沿轨线的漂移

    max_abs_drift = max |I(s) - I(s0)|，relative_drift = max_abs_drift / (1 + |I(s0)|)。
    halving 为真时以 step/2 和相同的 blowup 重新积分，per_halving_ratio 为两次漂移之比；
    两次漂移都为 0 时比值为 None。

    Raises:
        DriftError: 某个状态处 I 无法求值
    """
    initial, worst = _max_drift(traj, I)
    ratio = None
    if halving:
        fine = integrate(traj.field, traj.initial, traj.t_span, traj.step / 2.0, blowup=traj.blowup)
        _, fine_worst = _max_drift(fine, I)
        if fine_worst > 0:
            ratio = worst / fine_worst
        elif worst > 0:
            ratio = float("inf")

    report = DriftReport(
        invariant_name=name or render(I),
        initial_value=initial,
        max_abs_drift=worst,
        relative_drift=worst / (1.0 + abs(initial)),
        per_halving_ratio=ratio,
        step=traj.step,
        truncated=traj.truncated,
        truncation_time=traj.truncation_time,
        initial_state=traj.initial,
    )
    logger.debug("漂移 [%s]: rel=%.3e ratio=%s", report.invariant_name, report.relative_drift, ratio)
    return report


@dataclass
class DriftRun:
    """一次轨线试验：初值、区间、步长"""
    x0: Mapping[str, float]
    span: Tuple[float, float] = (0.0, 10.0)
    step: float = 1e-3


@dataclass
class CertificationSuite:
    """认证所用的采样盒与轨线试验集合"""
    boxes: Sequence[SampleBox]
    runs: Sequence[DriftRun]
    rtol: float = DEFAULT_RTOL
    drift_tol: float = DRIFT_TOL
    ratio_band: Tuple[float, float] = RATIO_BAND
    noise_floor: float = NOISE_FLOOR
    blowup: float = BLOWUP


@dataclass
class CertificationVerdict:
    """综合认证结论；失败是结论而不是异常"""
    passed: bool
    pointwise: List[EqualityReport] = field(default_factory=list)
    drifts: List[DriftReport] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)
    witness: Optional[Dict[str, float]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "pointwise": [r.to_dict() for r in self.pointwise],
            "drifts": [d.to_dict() for d in self.drifts],
            "failures": list(self.failures),
            "witness": self.witness,
        }


def judge_drift(report: DriftReport, suite: CertificationSuite) -> Optional[str]:
    """返回失败原因，通过时返回 None"""
    if report.truncated:
        return f"轨线在 s = {report.truncation_time:g} 处爆破"
    if report.relative_drift > suite.drift_tol:
        return f"相对漂移 {report.relative_drift:.3e} 超过 {suite.drift_tol:g}"
    if report.relative_drift <= suite.noise_floor or report.per_halving_ratio is None:
        # 漂移处于舍入噪声水平，收敛比没有意义
        return None
    lo, hi = suite.ratio_band
    if not lo <= report.per_halving_ratio <= hi:
        return f"步长减半比 {report.per_halving_ratio:.2f} 不在 [{lo:g}, {hi:g}]"
    return None


def certify_invariant(X: VectorField, I: Expr, suite: CertificationSuite) -> CertificationVerdict:
    """
    综合认证 I 是 X 的守恒量

    逐点：每个采样盒上 𝓛_X I ≈ 0；动力学：每次试验的漂移与收敛比。
    两者都满足才通过；所有子报告都保留在结论中。
    """
    verdict = CertificationVerdict(passed=True)
    if not suite.boxes or not suite.runs:
        verdict.passed = False
        verdict.failures.append("认证集合缺少采样盒或轨线试验")
        return verdict

    derivative = lie_derivative(X, I)
    for box in suite.boxes:
        try:
            report = is_zero(derivative, box, suite.rtol, label="X(I)")
        except HojmanError as e:
            verdict.failures.append(f"逐点检验无法完成: {e}")
            continue
        verdict.pointwise.append(report)
        if not report.equal:
            verdict.failures.append(f"X(I) ≠ 0，最大残差 {report.worst_residual:.3e}")
            verdict.witness = verdict.witness or report.worst_point

    for run in suite.runs:
        try:
            traj = integrate(X, run.x0, run.span, run.step, suite.blowup)
            report = drift(traj, I)
        except HojmanError as e:
            verdict.failures.append(f"轨线试验失败: {e}")
            verdict.witness = verdict.witness or dict(run.x0)
            continue
        verdict.drifts.append(report)
        reason = judge_drift(report, suite)
        if reason:
            verdict.failures.append(reason)
            verdict.witness = verdict.witness or report.initial_state

    verdict.passed = not verdict.failures
    logger.info("认证 %s: %s", render(I), "通过" if verdict.passed else "; ".join(verdict.failures))
    return verdict
