"""
定步长 RK4 积分器

对任意 VectorField 积分其流；参数记为 s（时间坐标存在时 dt/ds = 1 由分量自然给出）。
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DomainError, IntegrationError, UnboundVariableError
from ..expr import compile_many
from ..geometry import Chart, VectorField

logger = logging.getLogger(__name__)

BLOWUP = 1e12


@dataclass
class Trajectory:
    """
    积分轨线

    times 严格递增；states 每行一个状态，列顺序同坐标卡。
    truncated 为真时轨线在 truncation_time 处因状态超过 blowup 而提前终止。
    """
    chart: Chart
    times: np.ndarray
    states: np.ndarray
    step: float
    field: VectorField
    t_span: Tuple[float, float]
    method: str = "rk4"
    blowup: float = BLOWUP
    truncated: bool = False
    truncation_time: Optional[float] = None

    @property
    def initial(self) -> dict:
        return dict(zip(self.chart.coords, self.states[0].tolist()))

    @property
    def final(self) -> dict:
        return dict(zip(self.chart.coords, self.states[-1].tolist()))

    def __len__(self) -> int:
        return len(self.times)


def _rk4_step(f, s: np.ndarray, h: float) -> np.ndarray:
    k1 = np.asarray(f(s.tolist()))
    k2 = np.asarray(f((s + 0.5 * h * k1).tolist()))
    k3 = np.asarray(f((s + 0.5 * h * k2).tolist()))
    k4 = np.asarray(f((s + h * k3).tolist()))
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    X: VectorField,
    x0: Mapping[str, float],
    t_span: Sequence[float],
    step: float,
    blowup: float = BLOWUP
) -> Trajectory:
    """
    经典四阶 Runge-Kutta 定步长积分

    步数为 ceil((t1 - t0) / step)，最后一步缩短到恰好落在 t1。

    Args:
        X: 向量场
        x0: 初始状态，须绑定所有坐标
        t_span: [t0, t1]，t1 > t0
        step: 步长 (> 0)
        blowup: 任一坐标绝对值超过此值即截断

    Returns:
        Trajectory（爆破时 truncated=True）

    Raises:
        IntegrationError: 分量求值出现定义域错误
    """
    if not step > 0 or not math.isfinite(step):
        raise ValueError(f"步长必须为正: {step}")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError(f"积分区间无效: [{t0}, {t1}]")
    for name in X.chart.coords:
        if name not in x0:
            raise UnboundVariableError(name)

    f = compile_many(X.components, X.chart.coords)
    state = np.array([float(x0[name]) for name in X.chart.coords], dtype=float)
    count = max(1, math.ceil((t1 - t0) / step - 1e-9))

    times = [t0]
    states = [state]
    s = t0
    truncated, truncation_time = False, None
    for k in range(count):
        h = min(step, t1 - s) if k == count - 1 else step
        try:
            state = _rk4_step(f, state, h)
        except DomainError as e:
            raise IntegrationError(s, e) from e
        s = t1 if k == count - 1 else t0 + (k + 1) * step
        if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > blowup:
            truncated, truncation_time = True, s
            logger.warning("轨线在 s = %g 处爆破，已截断", s)
            break
        times.append(s)
        states.append(state)

    return Trajectory(
        chart=X.chart,
        times=np.array(times),
        states=np.vstack(states),
        step=float(step),
        field=X,
        t_span=(t0, t1),
        blowup=float(blowup),
        truncated=truncated,
        truncation_time=truncation_time,
    )


def write_csv(traj: Trajectory, path: Union[str, Path]) -> Path:
    """导出 CSV：表头 t_param + 坐标名，17 位有效数字"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([traj.times, traj.states])
    header = ",".join(("t_param",) + traj.chart.coords)
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=header, comments="")
    logger.info("轨线已导出: %s (%d 行)", path, len(traj))
    return path
