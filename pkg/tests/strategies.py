"""
hypothesis 表达式生成策略

只使用在 [-1, 1] 上处处有定义的运算，便于数值比较。
"""

from typing import Sequence

from hypothesis import strategies as st

from hojman.expr import Add, Const, Func, Mul, Neg, Pow, Sub, Var

VARIABLES = ("x", "y")
SPACE = ("x", "y", "z")


def expressions_over(names: Sequence[str], max_leaves: int = 8, max_const: int = 3, powers: bool = True):
    """names 上的多项式与 sin/cos 表达式；powers 为假时不生成 Pow 节点"""
    constants = st.integers(min_value=-max_const, max_value=max_const).map(lambda v: Const(float(v)))
    leaves = st.one_of(constants, st.sampled_from(tuple(names)).map(Var))

    def extend(children):
        options = [
            st.builds(Add, children, children),
            st.builds(Sub, children, children),
            st.builds(Mul, children, children),
            st.builds(Neg, children),
            st.builds(Func, st.sampled_from(["sin", "cos"]), children),
        ]
        if powers:
            options.append(st.builds(Pow, children, st.sampled_from([Const(2.0), Const(3.0)])))
        return st.one_of(*options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def components_over(names: Sequence[str], max_leaves: int = 8):
    """与坐标个数相同的分量列表"""
    n = len(names)
    return st.lists(expressions_over(names, max_leaves), min_size=n, max_size=n)


expressions = expressions_over(VARIABLES)

# 高阶导数温和，供有限差分比较使用
smooth_expressions = expressions_over(VARIABLES, max_leaves=6, max_const=2, powers=False)

# 向量场分量：只用多项式与 sin/cos，保证导数数值温和
field_components = components_over(VARIABLES)

# 嵌套括号用更小的表达式，避免舍入误差淹没容差
small_components = components_over(VARIABLES, max_leaves=4)

# 1~3 维坐标卡上的一对向量场
field_pairs = st.integers(min_value=1, max_value=3).flatmap(
    lambda n: st.tuples(st.just(SPACE[:n]), components_over(SPACE[:n]), components_over(SPACE[:n]))
)


@st.composite
def regular_lagrangians(draw):
    """
    正则 Lagrange 量 Σ a_ij(x, t) v^i v^j / 2 - V(x, t) 的文本

    对角元 c + x_i^2（c ≥ 1），非对角元绝对值 ≤ 0.2，n ≤ 3 时严格对角占优，
    因此 (a_ij) 在整个采样盒上正定。含时情形整体乘以 2 + sin(t)。

    Returns:
        (L 文本, n, 是否含时)
    """
    n = draw(st.integers(min_value=1, max_value=3))
    time_dependent = draw(st.booleans())
    xs = ["x"] if n == 1 else [f"x{i}" for i in range(1, n + 1)]
    vs = [f"v_{x}" for x in xs]

    kinetic = []
    for i in range(n):
        c = draw(st.integers(min_value=1, max_value=3))
        kinetic.append(f"({c} + {xs[i]}^2)*{vs[i]}^2/2")
        for j in range(i + 1, n):
            k = draw(st.integers(min_value=-2, max_value=2))
            if k:
                trig = draw(st.sampled_from(["sin", "cos"]))
                kinetic.append(f"{k / 10}*{trig}({xs[j]})*{vs[i]}*{vs[j]}")
    T = " + ".join(kinetic)
    if time_dependent:
        T = f"(2 + sin(t))*({T})"

    potential = [f"{draw(st.integers(min_value=1, max_value=3))}*{x}^2/2" for x in xs]
    if n > 1 and draw(st.booleans()):
        potential.append(f"{xs[0]}*{xs[1]}/2")
    if draw(st.booleans()):
        potential.append(f"{xs[-1]}^4/4")
    if time_dependent:
        potential.append(f"t*{xs[0]}")
    return f"{T} - ({' + '.join(potential)})", n, time_dependent
