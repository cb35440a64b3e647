"""
随机数值判等

符号恒等式一律通过在采样盒上的确定性随机求值来判定，而不是规范形。
采样由 numpy 的 Philox（基于计数器）生成器驱动，种子相同则报告逐位一致。
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import DomainError, InsufficientSamplesError, UnboundVariableError
from .calculus import diff
from .evaluate import compile_expr, evaluate
from .nodes import ZERO, Expr, variables

logger = logging.getLogger(__name__)

DEFAULT_COUNT = 32
DEFAULT_SEED = 20240601
DEFAULT_RTOL = 1e-9
RESAMPLE_FACTOR = 10


@dataclass(frozen=True)
class SampleBox:
    """
    采样盒：每个变量一个闭区间 [lo, hi]，加种子与采样点数

    intervals 以 (name, lo, hi) 元组按名称排序存放，保证不可变与顺序确定。
    """
    intervals: Tuple[Tuple[str, float, float], ...]
    seed: int = DEFAULT_SEED
    count: int = DEFAULT_COUNT

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"采样点数必须 ≥ 1: {self.count}")
        seen = set()
        for name, lo, hi in self.intervals:
            if name in seen:
                raise ValueError(f"变量重复: {name}")
            seen.add(name)
            if not lo < hi:
                raise ValueError(f"区间退化: {name} ∈ [{lo}, {hi}]")

    @classmethod
    def create(
        cls,
        intervals: Mapping[str, Sequence[float]],
        seed: int = DEFAULT_SEED,
        count: int = DEFAULT_COUNT
    ) -> "SampleBox":
        """
        由字典构造采样盒

        Args:
            intervals: 变量名 -> [lo, hi]
            seed: 64 位种子
            count: 采样点数
        """
        items = tuple(
            (name, float(bounds[0]), float(bounds[1]))
            for name, bounds in sorted(intervals.items())
        )
        return cls(items, int(seed), int(count))

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _, _ in self.intervals)

    def interval(self, name: str) -> Tuple[float, float]:
        for n, lo, hi in self.intervals:
            if n == name:
                return lo, hi
        raise UnboundVariableError(name)

    def with_interval(self, name: str, lo: float, hi: float) -> "SampleBox":
        """增加（或替换）一个变量的区间"""
        mapping = {n: (l, h) for n, l, h in self.intervals}
        mapping[name] = (lo, hi)
        return SampleBox.create(mapping, self.seed, self.count)

    def with_seed(self, seed: int) -> "SampleBox":
        return replace(self, seed=int(seed))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "intervals": {name: [lo, hi] for name, lo, hi in self.intervals},
            "seed": self.seed,
            "count": self.count,
        }


def sample_matrix(box: SampleBox, rows: int) -> np.ndarray:
    """按种子确定地生成 rows 个均匀采样点（行），列顺序为 box.names"""
    rng = np.random.Generator(np.random.Philox(key=box.seed % (1 << 64)))
    lows = np.array([lo for _, lo, _ in box.intervals], dtype=float)
    highs = np.array([hi for _, _, hi in box.intervals], dtype=float)
    return rng.uniform(lows, highs, size=(rows, len(lows)))


def retained_points(
    exprs: Sequence[Expr],
    box: SampleBox,
    resample_factor: int = RESAMPLE_FACTOR
) -> Iterator[Tuple[Dict[str, float], List[float]]]:
    """
    依次产出所有表达式都能求值的采样点

    遇到定义域错误的点跳过，总尝试次数不超过 count * resample_factor。

    Yields:
        (点的绑定, 各表达式的值)
    """
    names = box.names
    for e in exprs:
        missing = variables(e) - set(names)
        if missing:
            raise UnboundVariableError(sorted(missing)[0])
    compiled = [compile_expr(e, names) for e in exprs]
    for row in sample_matrix(box, box.count * resample_factor):
        point = row.tolist()
        try:
            values = [f(point) for f in compiled]
        except DomainError:
            continue
        yield dict(zip(names, point)), values


@dataclass
class EqualityReport:
    """数值判等报告"""
    equal: bool
    worst_point: Optional[Dict[str, float]]
    worst_residual: float
    retained: int
    rtol: float
    label: str = ""
    notes: List[str] = field(default_factory=list)

    @property
    def witness(self) -> Optional[Dict[str, float]]:
        """不相等时的反例点"""
        return None if self.equal else self.worst_point

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "equal": self.equal,
            "worst_point": self.worst_point,
            "worst_residual": self.worst_residual,
            "retained": self.retained,
            "rtol": self.rtol,
        }


def residual(a: float, b: float) -> float:
    """|a - b| / (1 + max(|a|, |b|))"""
    return abs(a - b) / (1.0 + max(abs(a), abs(b)))


def equal_numeric(
    a: Expr,
    b: Expr,
    box: SampleBox,
    rtol: float = DEFAULT_RTOL,
    label: str = "",
    resample_factor: int = RESAMPLE_FACTOR
) -> EqualityReport:
    """
    随机数值判等

    在 box 上确定性地取 count 个两侧都可求值的点，
    当且仅当每点满足 |a-b| ≤ rtol·(1+max(|a|,|b|)) 时判为相等。

    Args:
        a, b: 待比较的表达式
        box: 采样盒
        rtol: 相对容差 (> 0)
        label: 报告标签
        resample_factor: 重采样预算倍数

    Returns:
        EqualityReport

    Raises:
        InsufficientSamplesError: 有效点数不足 count
    """
    if rtol <= 0:
        raise ValueError(f"rtol 必须为正: {rtol}")

    worst_point, worst = None, 0.0
    retained = 0
    for point, (va, vb) in retained_points([a, b], box, resample_factor):
        r = residual(va, vb)
        if worst_point is None or r > worst:
            worst_point, worst = point, r
        retained += 1
        if retained >= box.count:
            break

    if retained < box.count:
        raise InsufficientSamplesError(retained, box.count)

    report = EqualityReport(
        equal=worst <= rtol,
        worst_point=worst_point,
        worst_residual=worst,
        retained=retained,
        rtol=rtol,
        label=label,
    )
    logger.debug("equal_numeric[%s]: equal=%s worst=%.3e", label, report.equal, worst)
    return report


def is_zero(e: Expr, box: SampleBox, rtol: float = DEFAULT_RTOL, label: str = "") -> EqualityReport:
    """equal_numeric(e, 0) 的简写"""
    return equal_numeric(e, ZERO, box, rtol, label=label)


def first_point(exprs: Sequence[Expr], box: SampleBox) -> Dict[str, float]:
    """第一个所有表达式都可求值的采样点"""
    for point, _ in retained_points(exprs, box):
        return point
    raise InsufficientSamplesError(0, 1)


def fd_check(e: Expr, name: str, bindings: Mapping[str, float], h: float = 1e-5) -> float:
    """
    用中心差分校验符号导数

    Args:
        e: 表达式
        name: 求导变量
        bindings: 求值点（须绑定所有变量）
        h: 差分步长 (> 0)

    Returns:
        |d - fd| / (1 + |d|)，d 为符号导数值，fd 为中心差分
    """
    if h <= 0:
        raise ValueError(f"步长必须为正: {h}")
    if name not in bindings:
        raise UnboundVariableError(name)
    exact = evaluate(diff(e, name), bindings)

    x0 = float(bindings[name])
    plus = dict(bindings)
    minus = dict(bindings)
    plus[name] = x0 + h
    minus[name] = x0 - h
    central = (evaluate(e, plus) - evaluate(e, minus)) / (2.0 * h)
    return abs(exact - central) / (1.0 + abs(exact))
