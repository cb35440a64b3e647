"""
坐标卡、向量场与 Jacobi 乘子

体积形式固定为坐标卡的坐标体积形式 dx^1 ∧ ... ∧ dx^n
（含时间坐标时为 dt ∧ dx^1 ∧ ... ∧ dx^n）。
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from ..errors import ChartError, InsufficientSamplesError, PositivityError
from ..expr import ONE, ZERO, Const, Expr, SampleBox, render, retained_points, variables
from ..expr.calculus import add, mul, neg, simplify
from ..expr.nodes import IDENTIFIER


@dataclass(frozen=True)
class Chart:
    """有序坐标列表；时间坐标存在时必须是第一个坐标"""
    coords: Tuple[str, ...]
    time_coord: Optional[str] = None

    def __post_init__(self):
        if len(self.coords) < 1:
            raise ChartError("坐标卡至少需要一个坐标")
        if len(set(self.coords)) != len(self.coords):
            raise ChartError(f"坐标名重复: {self.coords}")
        for name in self.coords:
            if not isinstance(name, str) or not IDENTIFIER.match(name):
                raise ChartError(f"非法坐标名: {name!r}")
        if self.time_coord is not None and self.time_coord != self.coords[0]:
            raise ChartError(f"时间坐标 {self.time_coord} 必须是第一个坐标")

    @classmethod
    def create(cls, coords: Sequence[str], time: bool = False) -> "Chart":
        coords = tuple(coords)
        return cls(coords, coords[0] if time and coords else None)

    @property
    def dimension(self) -> int:
        return len(self.coords)

    @property
    def has_time(self) -> bool:
        return self.time_coord is not None

    def index(self, name: str) -> int:
        return self.coords.index(name)

    def check_expr(self, e: Expr, what: str = "表达式"):
        """表达式变量必须包含在坐标卡中"""
        extra = variables(e) - set(self.coords)
        if extra:
            raise ChartError(f"{what} 含有坐标卡之外的变量: {', '.join(sorted(extra))}")

    def check_box(self, box: SampleBox):
        missing = set(self.coords) - set(box.names)
        if missing:
            raise ChartError(f"采样盒缺少坐标区间: {', '.join(sorted(missing))}")


@dataclass(frozen=True)
class VectorField:
    """
    向量场 X = Σ X^i ∂/∂x^i

    分量按坐标卡顺序存放。nsode_flag 在含时间坐标且时间分量结构上等于 1 时为真。
    """
    chart: Chart
    components: Tuple[Expr, ...]

    def __post_init__(self):
        if len(self.components) != self.chart.dimension:
            raise ChartError(
                f"分量数 {len(self.components)} 与坐标卡维数 {self.chart.dimension} 不符"
            )
        for name, comp in zip(self.chart.coords, self.components):
            self.chart.check_expr(comp, f"分量 {name}")

    @classmethod
    def create(cls, chart: Chart, components: Sequence[Expr]) -> "VectorField":
        return cls(chart, tuple(simplify(c) for c in components))

    @property
    def nsode_flag(self) -> bool:
        return self.chart.has_time and self.components[0] == ONE

    def component(self, name: str) -> Expr:
        return self.components[self.chart.index(name)]

    def as_dict(self) -> Dict[str, Expr]:
        return dict(zip(self.chart.coords, self.components))

    # ==================== 场的代数运算 ====================

    def scale(self, f: Expr) -> "VectorField":
        """逐分量乘以函数 f"""
        self.chart.check_expr(f, "系数")
        return VectorField(self.chart, tuple(mul(f, c) for c in self.components))

    def add(self, other: "VectorField") -> "VectorField":
        same_chart(self, other)
        return VectorField(self.chart, tuple(add(a, b) for a, b in zip(self.components, other.components)))

    def negate(self) -> "VectorField":
        return VectorField(self.chart, tuple(neg(c) for c in self.components))

    def embed_time(self, time_name: str = "t", time_component: Expr = ONE) -> "VectorField":
        """把自治场嵌入 (t, x) 坐标卡，时间分量默认 1"""
        if self.chart.has_time:
            return self
        chart = Chart((time_name,) + self.chart.coords, time_name)
        return VectorField(chart, (time_component,) + self.components)

    def __str__(self):
        parts = ", ".join(render(c) for c in self.components)
        return f"({parts}) on ({', '.join(self.chart.coords)})"


def zero_field(chart: Chart) -> VectorField:
    return VectorField(chart, tuple(ZERO for _ in chart.coords))


def coordinate_field(chart: Chart, name: str) -> VectorField:
    """坐标向量场 ∂/∂name"""
    return VectorField(chart, tuple(ONE if c == name else ZERO for c in chart.coords))


def same_chart(X: VectorField, Y: VectorField):
    if X.chart != Y.chart:
        raise ChartError(f"坐标卡不一致: {X.chart.coords} vs {Y.chart.coords}")


@dataclass(frozen=True)
class Multiplier:
    """
    Jacobi 乘子候选：正函数 R

    构造时在 positivity_box 上采样检查 R > 0（以采样代替证明）。
    """
    chart: Chart
    R: Expr
    positivity_box: SampleBox

    def __post_init__(self):
        self.chart.check_expr(self.R, "乘子")
        checked = 0
        for point, (value,) in retained_points([self.R], self.positivity_box):
            if not value > 0:
                raise PositivityError(point, value)
            checked += 1
            if checked >= self.positivity_box.count:
                break
        if checked < self.positivity_box.count:
            raise InsufficientSamplesError(checked, self.positivity_box.count)

    @classmethod
    def create(cls, chart: Chart, R: Expr, box: SampleBox) -> "Multiplier":
        return cls(chart, simplify(R), box)

    @classmethod
    def unit(cls, chart: Chart, box: SampleBox) -> "Multiplier":
        return cls(chart, ONE, box)

    def rescale(self, c: float) -> "Multiplier":
        """常数倍 c·R（c > 0）"""
        return Multiplier.create(self.chart, mul(Const(float(c)), self.R), self.positivity_box)
