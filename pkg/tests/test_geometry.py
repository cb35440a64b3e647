"""
几何层：坐标卡、散度、Lie 括号、Jacobi 乘子、正规化子判定
"""

import pytest
from hypothesis import assume, given, settings

from hojman.errors import ChartError, DegenerateDirectionError, InsufficientSamplesError, PositivityError
from hojman.expr import ONE, Div, Neg, SampleBox, diff, equal_numeric, evaluate, is_zero, parse_expr
from hojman.geometry import (
    Chart,
    Multiplier,
    NormalizerKind,
    VectorField,
    bracket_divergence_residual,
    coordinate_field,
    divergence,
    is_multiplier,
    is_zero_field,
    lie_bracket,
    lie_derivative,
    multiplier_residual,
    normalizer_factor,
    scale_divergence_check,
    zero_field,
)

from .conftest import make_field
from .strategies import VARIABLES, expressions, expressions_over, field_components, field_pairs, small_components

PLANE = Chart.create(["x", "y"])


# ==================== 坐标卡与向量场 ====================

def test_chart_validation():
    with pytest.raises(ChartError):
        Chart.create(["x", "x"])
    with pytest.raises(ChartError):
        Chart(("x", "t"), "t")
    chart = Chart.create(["t", "x"], time=True)
    assert chart.has_time and chart.time_coord == "t"


def test_field_rejects_foreign_variables():
    with pytest.raises(ChartError):
        make_field(["x", "y"], ["y", "z"])
    with pytest.raises(ChartError):
        make_field(["x", "y"], ["y"])


def test_nsode_flag():
    assert make_field(["t", "x"], ["1", "x"], time=True).nsode_flag
    assert not make_field(["t", "x"], ["2", "x"], time=True).nsode_flag
    assert not make_field(["x", "y"], ["1", "x"]).nsode_flag


def test_embed_time():
    X = make_field(["x", "y"], ["y", "-x"]).embed_time()
    assert X.chart.coords == ("t", "x", "y")
    assert X.nsode_flag
    assert X.embed_time() is X


# ==================== 散度与 Lie 括号 ====================

def test_divergence_examples(unit_box):
    assert is_zero(divergence(make_field(["x", "y"], ["y", "-x"])), unit_box).equal
    assert evaluate(divergence(make_field(["x", "y"], ["x", "y"])), {}) == 2.0


def test_divergence_includes_time_component():
    Y = make_field(["t", "x"], ["t", "2*x"], time=True)
    assert evaluate(divergence(Y), {}) == 3.0


def test_bracket_sign_convention():
    X = coordinate_field(PLANE, "x")
    Y = make_field(["x", "y"], ["x", "0"])
    B = lie_bracket(X, Y)
    # [X, Y]^i = X(Y^i) - Y(X^i)
    assert evaluate(B.components[0], {"x": 0.3, "y": 0.1}) == 1.0
    assert evaluate(B.components[1], {"x": 0.3, "y": 0.1}) == 0.0


def test_lie_derivative_of_energy_vanishes(unit_box):
    X = make_field(["x", "y"], ["y", "-x"])
    assert is_zero(lie_derivative(X, parse_expr("x^2 + y^2")), unit_box).equal


def test_lie_derivative_rejects_foreign_function():
    X = make_field(["x", "y"], ["y", "-x"])
    with pytest.raises(ChartError):
        lie_derivative(X, parse_expr("z"))


@given(field_components, field_components)
def test_bracket_is_antisymmetric(a, b):
    box = SampleBox.create({"x": [-1, 1], "y": [-1, 1]}, seed=2, count=8)
    X, Y = VectorField.create(PLANE, a), VectorField.create(PLANE, b)
    total = lie_bracket(X, Y).add(lie_bracket(Y, X))
    try:
        report = is_zero_field(total, box, rtol=1e-8)
    except InsufficientSamplesError:
        assume(False)
    assert report.zero


@given(field_components, field_components)
def test_bracket_divergence_identity(a, b):
    box = SampleBox.create({"x": [-1, 1], "y": [-1, 1]}, seed=2, count=8)
    X, Y = VectorField.create(PLANE, a), VectorField.create(PLANE, b)
    try:
        report = bracket_divergence_residual(X, Y, box, rtol=1e-8)
    except InsufficientSamplesError:
        assume(False)
    assert report.equal


def test_scale_divergence_identity(unit_box):
    X = make_field(["x", "y"], ["x*y", "sin(x)"])
    assert scale_divergence_check(X, parse_expr("exp(x) + y^2"), unit_box).equal


def test_field_algebra(unit_box):
    X = make_field(["x", "y"], ["y", "-x"])
    assert is_zero_field(X.add(X.negate()), unit_box).zero
    assert is_zero_field(zero_field(PLANE), unit_box).zero
    doubled = X.scale(parse_expr("2"))
    assert equal_numeric(doubled.components[0], parse_expr("2*y"), unit_box).equal


# ==================== Jacobi 乘子 ====================

def test_dilation_multiplier(positive_box):
    X = make_field(["x", "y"], ["x", "y"])
    R = Multiplier.create(PLANE, parse_expr("1/(x*y)"), positive_box)
    assert is_multiplier(X, R, positive_box)
    assert is_multiplier(X, R.rescale(5.0), positive_box)
    assert not is_multiplier(X, Multiplier.unit(PLANE, positive_box), positive_box)


def test_multiplier_must_be_positive(unit_box):
    with pytest.raises(PositivityError) as info:
        Multiplier.create(PLANE, parse_expr("x"), unit_box)
    assert info.value.value <= 0


@pytest.mark.parametrize("src", ["1/(x - x)", "log(-1 - x^2)", "sqrt(-1 - y^2)"])
def test_multiplier_without_valid_samples(unit_box, src):
    with pytest.raises(InsufficientSamplesError) as info:
        Multiplier.create(PLANE, parse_expr(src), unit_box)
    assert info.value.retained == 0


def test_multiplier_on_partial_domain():
    box = SampleBox.create({"x": [-1, 1], "y": [-1, 1]}, seed=3, count=16)
    # 只有 x ≥ 0 的一半采样点可求值
    R = Multiplier.create(PLANE, parse_expr("1 + sqrt(x)"), box)
    assert R.positivity_box is box


def test_multiplier_chart_mismatch(positive_box):
    X = make_field(["x", "y"], ["x", "y"])
    other = Chart.create(["y", "x"])
    R = Multiplier.create(other, parse_expr("1/(x*y)"), positive_box)
    with pytest.raises(ChartError):
        multiplier_residual(X, R)


# ==================== 正规化子 ====================

def test_commuting_symmetry(unit_box):
    X = make_field(["x", "y"], ["y", "-x"])
    Y = make_field(["x", "y"], ["x", "y"])
    result = normalizer_factor(X, Y, unit_box)
    assert result.kind is NormalizerKind.COMMUTING
    assert result.ok
    assert evaluate(result.h, {}) == 0.0


def test_closed_form_factor_on_time_chart():
    box = SampleBox.create({"t": [0, 1], "x": [-1, 1]}, seed=4)
    X = make_field(["t", "x"], ["1", "t"], time=True)
    Y = make_field(["t", "x"], ["t", "2*x"], time=True)
    result = normalizer_factor(X, Y, box)
    assert result.kind is NormalizerKind.NORMALIZER
    assert evaluate(result.h, {}) == pytest.approx(-1.0)
    assert result.to_dict()["kind"] == "normalizer"


def test_pointwise_factor_without_closed_form(positive_box):
    X = make_field(["x", "y"], ["x", "2*y"])
    Y = X.scale(parse_expr("x"))
    result = normalizer_factor(X, Y, positive_box)
    assert result.kind is NormalizerKind.NORMALIZER
    assert result.h is None
    assert len(result.h_values) == positive_box.count
    # [xX, X] = -X(x)·X = -x·X
    assert normalizer_factor(X, Y, positive_box, h_expr=parse_expr("-x")).ok
    assert min(result.h_values) < -1.0 < max(result.h_values)


def test_not_a_normalizer(unit_box):
    X = make_field(["x", "y"], ["y", "-x"])
    Y = make_field(["x", "y"], ["x", "0"])
    result = normalizer_factor(X, Y, unit_box)
    assert result.kind is NormalizerKind.NOT_NORMALIZER
    assert set(result.witness) == {"x", "y"}


def test_supplied_factor_is_checked():
    box = SampleBox.create({"t": [0, 1], "x": [-1, 1]}, seed=4)
    X = make_field(["t", "x"], ["1", "t"], time=True)
    Y = make_field(["t", "x"], ["t", "2*x"], time=True)
    assert normalizer_factor(X, Y, box, h_expr=parse_expr("-1")).ok
    wrong = normalizer_factor(X, Y, box, h_expr=parse_expr("1"))
    assert wrong.kind is NormalizerKind.NOT_NORMALIZER
    assert wrong.h_supplied


def test_supplied_zero_factor_reports_commuting(unit_box):
    X = make_field(["x", "y"], ["y", "-x"])
    Y = make_field(["x", "y"], ["x", "y"])
    result = normalizer_factor(X, Y, unit_box, h_expr=parse_expr("0"))
    assert result.kind is NormalizerKind.COMMUTING


def test_normalizer_needs_nonzero_field():
    box = SampleBox.create({"x": [-1e-10, 1e-10], "y": [-1e-10, 1e-10]}, seed=1, count=4)
    X = make_field(["x", "y"], ["x", "y"])
    Y = make_field(["x", "y"], ["x^2", "0"])
    with pytest.raises(DegenerateDirectionError):
        normalizer_factor(X, Y, box, rtol=1e-30)


def test_one_is_unit_constant():
    assert Multiplier.unit(PLANE, SampleBox.create({"x": [0, 1], "y": [0, 1]})).R == ONE


# ==================== 括号的代数性质 ====================

PROPERTY_BOX = SampleBox.create({"x": [-1, 1], "y": [-1, 1]}, seed=2, count=8)


def _zero_field(B, box=PROPERTY_BOX):
    try:
        return is_zero_field(B, box, rtol=1e-8).zero
    except InsufficientSamplesError:
        assume(False)


@given(small_components, small_components, small_components)
def test_jacobi_identity(a, b, c):
    X, Y, Z = (VectorField.create(PLANE, comps) for comps in (a, b, c))
    total = lie_bracket(X, lie_bracket(Y, Z))
    total = total.add(lie_bracket(Y, lie_bracket(Z, X)))
    total = total.add(lie_bracket(Z, lie_bracket(X, Y)))
    assert _zero_field(total)


@given(field_components, field_components, expressions)
def test_bracket_leibniz_rule(a, b, f):
    X, Y = VectorField.create(PLANE, a), VectorField.create(PLANE, b)
    left = lie_bracket(X, Y.scale(f))
    right = Y.scale(lie_derivative(X, f)).add(lie_bracket(X, Y).scale(f))
    assert _zero_field(left.add(right.negate()))


@given(field_components)
def test_field_normalizes_itself(a):
    X = VectorField.create(PLANE, a)
    assert normalizer_factor(X, X, PROPERTY_BOX).kind is NormalizerKind.COMMUTING


@given(expressions_over(VARIABLES, max_leaves=5))
def test_multiplier_of_rescaled_divergence_free_field(g):
    # (∂g/∂y, -∂g/∂x) 无散；除以 R 后 R 是其 Jacobi 乘子
    R = parse_expr("1 + x^2 + y^2")
    hamiltonian = VectorField.create(PLANE, [diff(g, "y"), Neg(diff(g, "x"))])
    X = hamiltonian.scale(Div(ONE, R))
    assert is_zero(divergence(X.scale(R)), PROPERTY_BOX, rtol=1e-8).equal
    assert is_multiplier(X, Multiplier.create(PLANE, R, PROPERTY_BOX), PROPERTY_BOX, rtol=1e-8)


@settings(max_examples=50)
@given(field_pairs)
def test_bracket_divergence_identity_in_one_to_three_dimensions(pair):
    coords, a, b = pair
    chart = Chart.create(list(coords))
    box = SampleBox.create({name: [-1, 1] for name in coords}, seed=5, count=32)
    X, Y = VectorField.create(chart, a), VectorField.create(chart, b)
    try:
        report = bracket_divergence_residual(X, Y, box, rtol=1e-8)
    except InsufficientSamplesError:
        assume(False)
    assert report.equal
