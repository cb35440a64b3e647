"""
问题文件 (JSON, schema_version 1) 的读取与校验

动力学来源恰好一个：vector_field / hamiltonian / lagrangian / forces。
二阶问题（lagrangian、forces）中 chart 是位形坐标卡 (t?, x)，速度坐标为 v_<x>。
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ..errors import ParseError, ProblemFileError, ProblemSchemaError
from ..expr import Expr, SampleBox, parse_expr
from ..geometry import Chart, Multiplier, VectorField
from ..mechanics import LIFT_PRESETS, SecondOrderSystem, default_base_coords, hamiltonian_vector_field
from ..utils import Config

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DYNAMICS_FIELDS = ("vector_field", "hamiltonian", "lagrangian", "forces")


@dataclass(frozen=True)
class LagrangianSpec:
    L: Expr
    n: int
    time_dependent: bool
    base_coords: Tuple[str, ...]
    velocity_coords: Optional[Tuple[str, ...]] = None


@dataclass(frozen=True)
class PointFieldSpec:
    X0: Expr
    Xi: Tuple[Expr, ...]


@dataclass(frozen=True)
class SodeSymmetrySpec:
    preset: str
    Y0: Optional[Expr] = None
    Yi: Optional[Tuple[Expr, ...]] = None


@dataclass(frozen=True)
class NumericSpec:
    step: Optional[float] = None
    span: Optional[Tuple[float, float]] = None
    x0: Optional[Dict[str, float]] = None


@dataclass
class ProblemFile:
    """解析并校验后的问题文件"""
    path: Path
    sha256: str
    box: SampleBox
    chart: Optional[Chart] = None
    vector_field: Optional[VectorField] = None
    symmetry: Optional[List[Expr]] = None
    multiplier: Optional[Expr] = None
    h: Optional[Expr] = None
    candidate: Optional[Expr] = None
    lagrangian: Optional[LagrangianSpec] = None
    point_field: Optional[PointFieldSpec] = None
    system: Optional[SecondOrderSystem] = None
    sode_symmetry: Optional[SodeSymmetrySpec] = None
    numeric: NumericSpec = field(default_factory=NumericSpec)
    raw: Dict[str, Any] = field(default_factory=dict)

    @property
    def dynamics(self) -> str:
        for name in DYNAMICS_FIELDS:
            if self.raw.get(name) is not None:
                return name
        raise ProblemSchemaError("dynamics", "缺少动力学定义")

    def symmetry_field(self, chart: Chart) -> Optional[VectorField]:
        """symmetry 分量放到给定坐标卡上"""
        if self.symmetry is None:
            return None
        if len(self.symmetry) != chart.dimension:
            raise ProblemSchemaError(
                "symmetry", f"分量数 {len(self.symmetry)} 与坐标卡 {chart.coords} 不符"
            )
        return VectorField.create(chart, self.symmetry)

    def multiplier_on(self, chart: Chart, box: SampleBox) -> Optional[Multiplier]:
        if self.multiplier is None:
            return None
        return Multiplier.create(chart, self.multiplier, box)


# ==================== 字段读取 ====================

def _require(data: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in data or data[key] is None:
        raise ProblemSchemaError(f"{where}.{key}" if where else key, "缺少必填字段")
    return data[key]


def _expr(src: Any, where: str) -> Expr:
    if not isinstance(src, str):
        raise ProblemSchemaError(where, f"表达式必须是字符串，实际为 {type(src).__name__}")
    try:
        return parse_expr(src)
    except ParseError:
        logger.error("字段 %s 的表达式无法解析: %r", where, src)
        raise


def _expr_list(src: Any, where: str) -> List[Expr]:
    if not isinstance(src, list) or not src:
        raise ProblemSchemaError(where, "必须是非空的表达式列表")
    return [_expr(s, f"{where}[{i}]") for i, s in enumerate(src)]


def _number(src: Any, where: str) -> float:
    if isinstance(src, bool) or not isinstance(src, (int, float)):
        raise ProblemSchemaError(where, f"必须是数值，实际为 {src!r}")
    return float(src)


def _integer(src: Any, where: str) -> int:
    if isinstance(src, bool) or not isinstance(src, int):
        if isinstance(src, float) and src.is_integer():
            return int(src)
        raise ProblemSchemaError(where, f"必须是整数，实际为 {src!r}")
    return src


def _span(src: Any, where: str) -> Tuple[float, float]:
    if not isinstance(src, list) or len(src) != 2:
        raise ProblemSchemaError(where, "必须是 [a, b]")
    a, b = _number(src[0], where), _number(src[1], where)
    if not b > a:
        raise ProblemSchemaError(where, f"区间无效: [{a}, {b}]")
    return a, b


def _chart(data: Optional[Mapping[str, Any]]) -> Optional[Chart]:
    if data is None:
        return None
    coords = _require(data, "coords", "chart")
    if not isinstance(coords, list) or not all(isinstance(c, str) for c in coords):
        raise ProblemSchemaError("chart.coords", "必须是坐标名列表")
    return Chart.create(coords, bool(data.get("time", False)))


def _box(data: Mapping[str, Any], config: Config) -> SampleBox:
    intervals = _require(data, "intervals", "box")
    if not isinstance(intervals, dict):
        raise ProblemSchemaError("box.intervals", "必须是 {变量: [lo, hi]}")
    parsed = {name: _span(bounds, f"box.intervals.{name}") for name, bounds in intervals.items()}
    seed = _integer(data["seed"], "box.seed") if "seed" in data else config.seed
    count = _integer(data["count"], "box.count") if "count" in data else config.sample_count
    try:
        return SampleBox.create(parsed, seed, count)
    except ValueError as e:
        raise ProblemSchemaError("box", str(e)) from e


def _numeric(data: Optional[Mapping[str, Any]]) -> NumericSpec:
    if data is None:
        return NumericSpec()
    step = _number(data["step"], "numeric.step") if "step" in data else None
    if step is not None and not step > 0:
        raise ProblemSchemaError("numeric.step", f"步长必须为正: {step}")
    span = _span(data["span"], "numeric.span") if "span" in data else None
    x0 = None
    if "x0" in data:
        if not isinstance(data["x0"], dict):
            raise ProblemSchemaError("numeric.x0", "必须是 {坐标: 值}")
        x0 = {k: _number(v, f"numeric.x0.{k}") for k, v in data["x0"].items()}
    return NumericSpec(step, span, x0)


def _configuration_coords(chart: Optional[Chart], where: str) -> Tuple[Tuple[str, ...], bool]:
    """二阶问题的位形坐标卡 → (基坐标, 是否含时间)"""
    if chart is None:
        raise ProblemSchemaError("chart", f"{where} 需要 chart")
    if chart.has_time:
        return chart.coords[1:], True
    return chart.coords, False


# ==================== 入口 ====================

def load_problem(path: Union[str, Path], config: Optional[Config] = None) -> ProblemFile:
    """
    读取并校验问题文件

    Raises:
        ProblemFileError: 文件不存在或 JSON 语法错误（附行列号）
        ProblemSchemaError: 字段缺失或取值非法
        ParseError: 表达式语法错误
    """
    config = config or Config.defaults()
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as e:
        raise ProblemFileError(f"无法读取问题文件 {path}: {e}") from e
    digest = hashlib.sha256(text).hexdigest()
    try:
        data = json.loads(text.decode("utf-8"))
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"JSON 语法错误: {e.msg}", e.lineno, e.colno) from e
    except UnicodeDecodeError as e:
        raise ProblemFileError(f"文件不是 UTF-8 编码: {e}") from e
    if not isinstance(data, dict):
        raise ProblemSchemaError("", "顶层必须是 JSON 对象")
    return parse_problem(data, path, digest, config)


def parse_problem(data: Mapping[str, Any], path: Path, digest: str, config: Config) -> ProblemFile:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ProblemSchemaError("schema_version", f"只支持 {SCHEMA_VERSION}，实际为 {version!r}")

    sources = [name for name in DYNAMICS_FIELDS if data.get(name) is not None]
    if len(sources) != 1:
        raise ProblemSchemaError(
            "dynamics", f"{' / '.join(DYNAMICS_FIELDS)} 必须恰好给出一个，实际: {sources or '无'}"
        )

    chart = _chart(data.get("chart"))
    problem = ProblemFile(
        path=path,
        sha256=digest,
        box=_box(_require(data, "box", ""), config),
        chart=chart,
        numeric=_numeric(data.get("numeric")),
        raw=dict(data),
    )

    if data.get("symmetry") is not None:
        problem.symmetry = _expr_list(data["symmetry"], "symmetry")
    if data.get("multiplier") is not None:
        problem.multiplier = _expr(data["multiplier"], "multiplier")
    if data.get("h") is not None:
        problem.h = _expr(data["h"], "h")
    if data.get("candidate") is not None:
        problem.candidate = _expr(data["candidate"], "candidate")

    source = sources[0]
    if source == "vector_field":
        if chart is None:
            raise ProblemSchemaError("chart", "vector_field 需要 chart")
        components = _expr_list(data["vector_field"], "vector_field")
        if len(components) != chart.dimension:
            raise ProblemSchemaError("vector_field", f"分量数 {len(components)} 与坐标卡维数 {chart.dimension} 不符")
        problem.vector_field = VectorField.create(chart, components)
    elif source == "hamiltonian":
        spec = data["hamiltonian"]
        q = _require(spec, "q", "hamiltonian")
        p = _require(spec, "p", "hamiltonian")
        time = spec.get("time")
        problem.vector_field = hamiltonian_vector_field(_expr(_require(spec, "H", "hamiltonian"), "hamiltonian.H"), q, p, time)
        problem.chart = problem.vector_field.chart
    elif source == "lagrangian":
        spec = data["lagrangian"]
        n = _integer(_require(spec, "n", "lagrangian"), "lagrangian.n")
        if n < 1:
            raise ProblemSchemaError("lagrangian.n", f"自由度必须 ≥ 1: {n}")
        time_dependent = bool(spec.get("time_dependent", False))
        if chart is not None:
            base, has_time = _configuration_coords(chart, "lagrangian")
            if has_time != time_dependent:
                raise ProblemSchemaError("lagrangian.time_dependent", "与 chart.time 不一致")
        else:
            base = default_base_coords(n)
        velocities = spec.get("velocity_coords")
        problem.lagrangian = LagrangianSpec(
            L=_expr(_require(spec, "L", "lagrangian"), "lagrangian.L"),
            n=n,
            time_dependent=time_dependent,
            base_coords=tuple(base),
            velocity_coords=tuple(velocities) if velocities else None,
        )
    else:
        base, time_dependent = _configuration_coords(chart, "forces")
        forces = _expr_list(data["forces"], "forces")
        if len(forces) != len(base):
            raise ProblemSchemaError("forces", f"力的个数 {len(forces)} 与基坐标 {base} 不符")
        problem.system = SecondOrderSystem.create(base, forces, time_dependent)

    if data.get("point_field") is not None:
        spec = data["point_field"]
        problem.point_field = PointFieldSpec(
            _expr(_require(spec, "X0", "point_field"), "point_field.X0"),
            tuple(_expr_list(_require(spec, "Xi", "point_field"), "point_field.Xi")),
        )
    if data.get("sode_symmetry") is not None:
        spec = data["sode_symmetry"]
        preset = spec.get("preset", "general")
        if preset not in LIFT_PRESETS:
            raise ProblemSchemaError("sode_symmetry.preset", f"必须是 {', '.join(LIFT_PRESETS)}")
        needed = {"space": ("Yi",), "time": ("Y0",), "general": ("Y0", "Yi")}[preset]
        for key in needed:
            _require(spec, key, "sode_symmetry")
        problem.sode_symmetry = SodeSymmetrySpec(
            preset,
            _expr(spec["Y0"], "sode_symmetry.Y0") if spec.get("Y0") is not None else None,
            tuple(_expr_list(spec["Yi"], "sode_symmetry.Yi")) if spec.get("Yi") is not None else None,
        )

    logger.debug("问题文件已加载: %s (%s)", path, source)
    return problem
