"""Random expression trees that stay finite and smooth on [-1, 1]^n.

Trees are built from raw nodes (no simplification) so that simplify and the
printer see redundant structure. Every ln, sqrt, division and negative power
gets an argument that is positive by construction.
"""

import numpy as np
from hypothesis import strategies as st

from metallic.expr import Binary, Constant, Coordinate, Unary

ONE = Constant(1.0)


def positive(e):
    """1 + e^2, bounded away from zero."""
    return Binary("add", ONE, Binary("pow", e, Constant(2.0)))


def safe_div(a, b):
    return Binary("div", a, Binary("add", Constant(1.5), Unary("sin", b)))


def combine(op, a, b):
    if op in ("add", "sub", "mul"):
        return Binary(op, a, b)
    if op == "div":
        return safe_div(a, b)
    if op == "sin" or op == "cos":
        return Unary(op, a)
    if op == "neg":
        return Unary("neg", a)
    if op == "exp":
        return Unary("exp", Unary("sin", a))
    if op == "ln":
        return Unary("ln", positive(a))
    if op == "sqrt":
        return Unary("sqrt", positive(a))
    if op == "square":
        return Binary("pow", a, Constant(2.0))
    if op == "inverse":
        return Binary("pow", positive(a), Constant(-1.0))
    raise ValueError(op)


OPS = ("add", "sub", "mul", "div", "sin", "cos", "neg", "exp", "ln", "sqrt", "square", "inverse")


def random_expression(rng, n, depth=4):
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.6:
            return Coordinate(int(rng.integers(n)))
        return Constant(round(float(rng.uniform(-2.0, 2.0)), 3))
    op = OPS[int(rng.integers(len(OPS)))]
    a = random_expression(rng, n, depth - 1)
    b = random_expression(rng, n, depth - 1)
    return combine(op, a, b)


def expressions(n=2, max_leaves=12):
    leaves = st.one_of(
        st.integers(0, n - 1).map(Coordinate),
        st.floats(-3.0, 3.0, allow_nan=False).map(Constant),
        st.sampled_from([0.0, 1.0, -1.0, 2.0]).map(Constant),
    )

    def extend(children):
        return st.builds(combine, st.sampled_from(OPS), children, children)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def points(n=2):
    return st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=n, max_size=n).map(np.array)
