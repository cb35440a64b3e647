# Expression modules
from .nodes import (
    FUNCTIONS,
    ONE,
    ZERO,
    Add,
    Const,
    Div,
    Expr,
    Func,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    const,
    normalize,
    render,
    size,
    substitute,
    var,
    variables,
)
from .parser import parse_expr
from .calculus import diff, simplify
from .evaluate import compile_expr, compile_many, evaluate
from .oracle import (
    EqualityReport,
    SampleBox,
    equal_numeric,
    fd_check,
    first_point,
    is_zero,
    retained_points,
)

__all__ = [
    "FUNCTIONS", "ONE", "ZERO",
    "Expr", "Const", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Func",
    "const", "var", "normalize", "render", "size", "substitute", "variables",
    "parse_expr", "diff", "simplify",
    "compile_expr", "compile_many", "evaluate",
    "EqualityReport", "SampleBox", "equal_numeric", "fd_check", "first_point",
    "is_zero", "retained_points",
]
