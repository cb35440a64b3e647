"""
表达式层：解析、打印、求值、微分、化简、随机数值判等
"""

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hojman.errors import (
    DomainError,
    InsufficientSamplesError,
    ParseError,
    UnboundVariableError,
    UnknownFunctionError,
)
from hojman.expr import (
    Add,
    Const,
    Mul,
    Neg,
    Pow,
    SampleBox,
    Var,
    diff,
    equal_numeric,
    evaluate,
    fd_check,
    is_zero,
    normalize,
    parse_expr,
    render,
    simplify,
    substitute,
    variables,
)

from .strategies import expressions, smooth_expressions


# ==================== 解析 ====================

def test_unary_minus_binds_tighter_than_power():
    assert parse_expr("-x^2") == Pow(Neg(Var("x")), Const(2.0))
    assert evaluate(parse_expr("-x^2"), {"x": 3}) == 9.0


def test_power_is_right_associative():
    assert evaluate(parse_expr("2^3^2"), {}) == 512.0


def test_precedence_and_parentheses():
    assert evaluate(parse_expr("1 + 2*3"), {}) == 7.0
    assert evaluate(parse_expr("(1 + 2)*3"), {}) == 9.0
    assert evaluate(parse_expr("8/4/2"), {}) == 1.0
    assert evaluate(parse_expr("1 - 2 - 3"), {}) == -4.0


def test_functions_and_scientific_numbers():
    e = parse_expr("exp(log(x)) + sqrt(4) + 1.5e-1")
    assert evaluate(e, {"x": 2.0}) == pytest.approx(4.15)


def test_parse_error_reports_offset_and_expected():
    with pytest.raises(ParseError) as info:
        parse_expr("x + ")
    assert info.value.offset == 4
    assert "NUMBER" in info.value.expected


def test_implicit_multiplication_is_rejected():
    with pytest.raises(ParseError):
        parse_expr("2x")


def test_unknown_function():
    with pytest.raises(UnknownFunctionError) as info:
        parse_expr("1 + foo(x)")
    assert info.value.name == "foo"
    assert info.value.offset == 4


def test_illegal_character_offset_counts_bytes():
    with pytest.raises(ParseError) as info:
        parse_expr("x + λ")
    assert info.value.offset == 4


def test_render_minimal_parentheses():
    assert render(parse_expr("(x + y)*z")) == "(x + y)*z"
    assert render(parse_expr("x - (y - z)")) == "x - (y - z)"
    assert render(parse_expr("(x^2)^3")) == "(x^2)^3"
    assert render(parse_expr("x^2^3")) == "x^2^3"


@given(expressions)
def test_render_parses_back_to_same_tree(e):
    assert parse_expr(render(e)) == normalize(e)


def test_variables_and_substitute():
    e = parse_expr("x*sin(y) + t")
    assert variables(e) == {"x", "y", "t"}
    replaced = substitute(e, {"t": parse_expr("x^2")})
    assert variables(replaced) == {"x", "y"}
    assert evaluate(replaced, {"x": 2, "y": 0}) == 4.0


# ==================== 求值 ====================

def test_unbound_variable():
    with pytest.raises(UnboundVariableError) as info:
        evaluate(parse_expr("x + y"), {"x": 1})
    assert info.value.name == "y"


@pytest.mark.parametrize("src, bindings", [
    ("log(x)", {"x": -1.0}),
    ("sqrt(x)", {"x": -4.0}),
    ("1/x", {"x": 0.0}),
    ("x^0.5", {"x": -2.0}),
    ("0^-1", {}),
    ("exp(x)", {"x": 1000.0}),
])
def test_domain_errors(src, bindings):
    with pytest.raises(DomainError):
        evaluate(parse_expr(src), bindings)


def test_negative_base_with_integer_exponent():
    assert evaluate(parse_expr("x^3"), {"x": -2.0}) == -8.0


# ==================== 微分与化简 ====================

def test_diff_known_derivatives():
    box = SampleBox.create({"x": [0.5, 1.5]}, seed=3)
    cases = {
        "sin(x)": "cos(x)",
        "exp(2*x)": "2*exp(2*x)",
        "log(x)": "1/x",
        "sqrt(x)": "1/(2*sqrt(x))",
        "x^x": "x^x*(log(x) + 1)",
        "1/x": "-1/x^2",
        "tan(x)": "1 + tan(x)^2",
    }
    for src, expected in cases.items():
        report = equal_numeric(diff(parse_expr(src), "x"), parse_expr(expected), box)
        assert report.equal, src


def test_diff_of_abs_is_sign():
    d = diff(parse_expr("abs(x)"), "x")
    assert evaluate(d, {"x": -2.0}) == -1.0
    assert evaluate(d, {"x": 3.0}) == 1.0


def test_diff_of_other_variable_is_zero():
    assert simplify(diff(parse_expr("y^3 + sin(y)"), "x")) == Const(0.0)


@given(expressions, st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_diff_agrees_with_central_difference(e, x, y):
    try:
        error = fd_check(e, "x", {"x": x, "y": y})
    except DomainError:
        assume(False)
    assert error < 1e-4


@given(expressions)
def test_simplify_preserves_value(e):
    box = SampleBox.create({"x": [-1, 1], "y": [-1, 1]}, seed=11, count=8)
    try:
        report = equal_numeric(e, simplify(e), box, rtol=1e-9)
    except InsufficientSamplesError:
        assume(False)
    assert report.equal


def test_simplify_folds_constants_and_identities():
    assert simplify(parse_expr("0*x + 1*y - 0")) == Var("y")
    assert simplify(parse_expr("2*3 + (x - x)")) == Const(6.0)
    assert simplify(parse_expr("x^1")) == Var("x")


def test_diff_matches_sympy():
    sympy = pytest.importorskip("sympy")
    src = "x^3*sin(y) + exp(x*y)/(1 + x^2)"
    x, y = sympy.symbols("x y")
    expected = sympy.diff(sympy.sympify(src.replace("^", "**")), x)
    ours = diff(parse_expr(src), "x")
    for px, py in [(0.3, -0.7), (-0.5, 0.2), (0.9, 0.9)]:
        value = float(expected.subs({x: px, y: py}))
        assert evaluate(ours, {"x": px, "y": py}) == pytest.approx(value, rel=1e-12)


# ==================== 随机数值判等 ====================

def test_trig_identity_is_equal(unit_box):
    report = equal_numeric(parse_expr("sin(x)^2 + cos(x)^2"), Const(1.0), unit_box)
    assert report.equal
    assert report.witness is None
    assert report.retained == unit_box.count


def test_small_difference_is_detected(unit_box):
    report = equal_numeric(parse_expr("x"), parse_expr("x + 1e-6"), unit_box)
    assert not report.equal
    assert set(report.witness) == {"x", "y"}
    assert report.worst_residual > 1e-9


def test_equality_is_deterministic_for_a_seed(unit_box):
    a, b = parse_expr("x^2 + y"), parse_expr("x*x + y + 0.01*x")
    first = equal_numeric(a, b, unit_box)
    second = equal_numeric(a, b, unit_box)
    assert first.worst_point == second.worst_point
    assert first.worst_residual == second.worst_residual


def test_domain_errors_are_skipped():
    box = SampleBox.create({"x": [-1, 1]}, seed=5, count=8)
    report = is_zero(parse_expr("sqrt(x)^2 - x"), box)
    assert report.equal
    assert report.retained == 8


def test_insufficient_samples():
    box = SampleBox.create({"x": [-2, -1]}, seed=5, count=8)
    with pytest.raises(InsufficientSamplesError):
        is_zero(parse_expr("log(x)"), box)


def test_rtol_must_be_positive(unit_box):
    with pytest.raises(ValueError):
        equal_numeric(parse_expr("x"), parse_expr("x"), unit_box, rtol=0)


def test_box_validation():
    with pytest.raises(ValueError):
        SampleBox.create({"x": [1, 1]})
    with pytest.raises(ValueError):
        SampleBox.create({"x": [0, 1]}, count=0)
    box = SampleBox.create({"y": [0, 1], "x": [2, 3]})
    assert box.names == ("x", "y")
    assert box.with_seed(99).seed == 99
    assert box.with_interval("t", 0, 1).interval("t") == (0.0, 1.0)


def test_fd_check_requires_bound_variable():
    with pytest.raises(UnboundVariableError) as info:
        fd_check(parse_expr("x*y"), "x", {"y": 1.0})
    assert info.value.name == "x"


# ==================== 微分的代数性质 ====================

PROPERTY_BOX = SampleBox.create({"x": [-1, 1], "y": [-1, 1]}, seed=13, count=8)
coefficients = st.integers(min_value=-3, max_value=3).map(lambda v: Const(float(v)))


def _same(a, b):
    try:
        return equal_numeric(a, b, PROPERTY_BOX, rtol=1e-8).equal
    except InsufficientSamplesError:
        assume(False)


@given(expressions, expressions, coefficients, coefficients)
def test_diff_is_linear(f, g, a, b):
    left = diff(Add(Mul(a, f), Mul(b, g)), "x")
    right = Add(Mul(a, diff(f, "x")), Mul(b, diff(g, "x")))
    assert _same(left, right)


@given(expressions, expressions)
def test_diff_product_rule(f, g):
    right = Add(Mul(diff(f, "x"), g), Mul(f, diff(g, "x")))
    assert _same(diff(Mul(f, g), "x"), right)


@given(expressions)
def test_mixed_partials_commute(e):
    assert _same(diff(diff(e, "x"), "y"), diff(diff(e, "y"), "x"))


@settings(max_examples=200)
@given(smooth_expressions, st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_diff_agrees_with_central_difference_tightly(e, x, y):
    assert fd_check(e, "x", {"x": x, "y": y}) < 1e-6
