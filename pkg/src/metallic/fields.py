"""Arrays of Expressions: small symbolic linear algebra used to build tensor fields.

Arrays are numpy object arrays holding ``Expression`` nodes. Sums are built
with the simplifying constructors, so structurally zero terms vanish as the
formula is assembled.
"""

from itertools import permutations

import numpy as np

from .expr import ONE, ZERO, Expression, as_expr, differentiate, evaluate_array, total


def zeros(*shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = ONE
    return out


def to_field(values) -> np.ndarray:
    """Coerce nested lists of numbers/Expressions into an object array."""
    arr = np.array(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(*arr.shape):
        out[idx] = as_expr(arr[idx])
    return out


def matmul(a, b) -> np.ndarray:
    n, m = a.shape
    m2, k = b.shape
    if m != m2:
        raise ValueError("shape mismatch")
    out = np.empty((n, k), dtype=object)
    for i in range(n):
        for j in range(k):
            out[i, j] = total(a[i, s] * b[s, j] for s in range(m))
    return out


def add(a, b) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(*a.shape):
        out[idx] = a[idx] + b[idx]
    return out


def sub(a, b) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(*a.shape):
        out[idx] = a[idx] - b[idx]
    return out


def scale(c, a) -> np.ndarray:
    c = as_expr(c)
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(*a.shape):
        out[idx] = c * a[idx]
    return out


def partial(a, i: int) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(*a.shape):
        out[idx] = differentiate(a[idx], i)
    return out


def determinant(a) -> Expression:
    """Leibniz expansion; meant for the small (n <= 4) matrices of a chart."""
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    if n == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    terms = []
    for perm in permutations(range(n)):
        sign = _parity(perm)
        prod = ONE
        for i, j in enumerate(perm):
            prod = prod * a[i, j]
        terms.append(prod if sign > 0 else -prod)
    return total(terms)


def _parity(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _minor(a, row, col):
    keep_r = [r for r in range(a.shape[0]) if r != row]
    keep_c = [c for c in range(a.shape[1]) if c != col]
    return a[np.ix_(keep_r, keep_c)]


def inverse(a) -> np.ndarray:
    """Adjugate over determinant."""
    n = a.shape[0]
    det = determinant(a)
    if n == 1:
        return to_field([[ONE / det]])
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            cof = determinant(_minor(a, j, i))
            if (i + j) % 2:
                cof = -cof
            out[i, j] = cof / det
    return out


def evaluate(field, points) -> np.ndarray:
    """Evaluate a field at an (N, n) point array; sample axis first."""
    values = evaluate_array(field, points)
    return np.moveaxis(values, -1, 0)
