"""Symbolic scalar expressions in chart coordinates.

Nodes are immutable and hash-consed: structurally identical trees are the
same Python object, so equality is identity and derivative caches are shared
between every field that reuses a subexpression.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := number | identifier | func '(' expr ')' | '(' expr ')'
    func   := sin | cos | exp | ln | sqrt

Exponents must be constant; ``x^y`` is rejected when ``y`` mentions a
coordinate.
"""

from __future__ import annotations

import math
import re
import threading
import weakref
from numbers import Real

import numpy as np

from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifier

UNARY_OPS = ("neg", "sin", "cos", "exp", "ln", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")

_intern_table: "weakref.WeakValueDictionary[tuple, Expression]" = weakref.WeakValueDictionary()
_intern_lock = threading.Lock()


def _intern(key, build):
    with _intern_lock:
        node = _intern_table.get(key)
        if node is None:
            node = build()
            _intern_table[key] = node
        return node


class Expression:
    __slots__ = ("_dcache", "__weakref__")

    def __setattr__(self, name, value):
        if name != "_dcache" and hasattr(self, name):
            raise AttributeError(f"{type(self).__name__} is immutable")
        object.__setattr__(self, name, value)

    # Arithmetic sugar goes through the simplifying constructors so that
    # tensor formulas built in Python stay compact.
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __str__(self):
        return to_string(self)

    @property
    def is_constant(self) -> bool:
        return isinstance(self, Constant)


class Constant(Expression):
    __slots__ = ("value",)

    def __new__(cls, value):
        value = float(value)
        key = ("c", value, math.copysign(1.0, value))

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "value", value)
            object.__setattr__(node, "_dcache", None)
            return node

        return _intern(key, build)

    def __repr__(self):
        return _format_number(self.value)


class Coordinate(Expression):
    __slots__ = ("index",)

    def __new__(cls, index):
        index = int(index)
        if index < 0:
            raise ValueError("coordinate index must be non-negative")

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "index", index)
            object.__setattr__(node, "_dcache", None)
            return node

        return _intern(("x", index), build)

    def __repr__(self):
        return f"Coord{self.index}"


class Unary(Expression):
    __slots__ = ("op", "child")

    def __new__(cls, op, child):
        if op not in UNARY_OPS:
            raise ValueError(f"unknown unary op {op!r}")
        if not isinstance(child, Expression):
            raise TypeError("child must be an Expression")

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "op", op)
            object.__setattr__(node, "child", child)
            object.__setattr__(node, "_dcache", None)
            return node

        return _intern(("u", op, id(child)), build)

    def __repr__(self):
        return f"{self.op}({self.child!r})"


class Binary(Expression):
    __slots__ = ("op", "left", "right")

    def __new__(cls, op, left, right):
        if op not in BINARY_OPS:
            raise ValueError(f"unknown binary op {op!r}")
        if not (isinstance(left, Expression) and isinstance(right, Expression)):
            raise TypeError("operands must be Expressions")
        if op == "pow" and not isinstance(right, Constant):
            raise ValueError("pow exponent must be a constant")

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "op", op)
            object.__setattr__(node, "left", left)
            object.__setattr__(node, "right", right)
            object.__setattr__(node, "_dcache", None)
            return node

        return _intern(("b", op, id(left), id(right)), build)

    def __repr__(self):
        return f"{self.op}({self.left!r},{self.right!r})"


ZERO = Constant(0.0)
ONE = Constant(1.0)


def as_expr(value) -> Expression:
    if isinstance(value, Expression):
        return value
    if isinstance(value, (Real, np.floating, np.integer)):
        return Constant(float(value))
    raise TypeError(f"cannot convert {type(value).__name__} to Expression")


# ---------------------------------------------------------------------------
# numeric kernels (shared by evaluation and constant folding so that folding
# never changes a value)

def _apply_unary(op, x):
    if op == "neg":
        return -x
    if op == "sin":
        return np.sin(x)
    if op == "cos":
        return np.cos(x)
    if op == "exp":
        return np.exp(x)
    if op == "ln":
        if np.any(x <= 0):
            raise DomainError("ln of a non-positive value")
        return np.log(x)
    if op == "sqrt":
        if np.any(x < 0):
            raise DomainError("sqrt of a negative value")
        return np.sqrt(x)
    raise ValueError(op)


def _apply_binary(op, a, b):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if np.any(b == 0):
            raise DomainError("division by zero")
        return a / b
    if op == "pow":
        r = float(b)
        if r < 0 and np.any(a == 0):
            raise DomainError("zero raised to a negative power")
        if not r.is_integer() and np.any(a < 0):
            raise DomainError("negative base with non-integer exponent")
        return np.power(a, r)
    raise ValueError(op)


def _fold(fn, *args):
    """Apply a kernel to constant operands; None if it would raise or overflow."""
    try:
        with np.errstate(all="ignore"):
            value = float(fn(*[np.float64(a) for a in args]))
    except DomainError:
        return None
    if not math.isfinite(value):
        return None
    return Constant(value)


# ---------------------------------------------------------------------------
# simplifying constructors

def _is_value(e, v):
    return isinstance(e, Constant) and e.value == v


def neg(a: Expression) -> Expression:
    if isinstance(a, Constant):
        return _fold(lambda x: _apply_unary("neg", x), a.value) or Unary("neg", a)
    if isinstance(a, Unary) and a.op == "neg":
        return a.child
    return Unary("neg", a)


def func(op: str, a: Expression) -> Expression:
    if op not in FUNCTIONS:
        raise ValueError(f"unknown function {op!r}")
    if isinstance(a, Constant):
        folded = _fold(lambda x: _apply_unary(op, x), a.value)
        if folded is not None:
            return folded
    return Unary(op, a)


def sin(a):
    return func("sin", as_expr(a))


def cos(a):
    return func("cos", as_expr(a))


def exp(a):
    return func("exp", as_expr(a))


def ln(a):
    return func("ln", as_expr(a))


def sqrt(a):
    return func("sqrt", as_expr(a))


def _binary(op, a, b):
    if isinstance(a, Constant) and isinstance(b, Constant):
        folded = _fold(lambda x, y: _apply_binary(op, x, y), a.value, b.value)
        if folded is not None:
            return folded
    return Binary(op, a, b)


def add(a: Expression, b: Expression) -> Expression:
    if _is_value(a, 0):
        return b
    if _is_value(b, 0):
        return a
    return _binary("add", a, b)


def sub(a: Expression, b: Expression) -> Expression:
    if _is_value(b, 0):
        return a
    if _is_value(a, 0):
        return neg(b)
    return _binary("sub", a, b)


def mul(a: Expression, b: Expression) -> Expression:
    if _is_value(a, 0) or _is_value(b, 0):
        return ZERO
    if _is_value(a, 1):
        return b
    if _is_value(b, 1):
        return a
    if _is_value(a, -1):
        return neg(b)
    if _is_value(b, -1):
        return neg(a)
    return _binary("mul", a, b)


def div(a: Expression, b: Expression) -> Expression:
    if _is_value(b, 1):
        return a
    if _is_value(a, 0) and isinstance(b, Constant) and b.value != 0:
        return ZERO
    return _binary("div", a, b)


def power(a: Expression, exponent) -> Expression:
    r = exponent.value if isinstance(exponent, Constant) else float(exponent)
    if r == 1:
        return a
    if r == 0:
        return ONE
    return _binary("pow", a, Constant(r))


def total(terms) -> Expression:
    """Left-folded sum that drops zero terms."""
    acc = ZERO
    for t in terms:
        acc = add(acc, as_expr(t))
    return acc


_REBUILD_BINARY = {"add": add, "sub": sub, "mul": mul, "div": div}


def simplify(e: Expression) -> Expression:
    """Constant folding plus the neutral/absorbing identities, bottom up."""
    memo = {}

    def walk(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, (Constant, Coordinate)):
            out = node
        elif isinstance(node, Unary):
            child = walk(node.child)
            out = neg(child) if node.op == "neg" else func(node.op, child)
        elif node.op == "pow":
            out = power(walk(node.left), node.right)
        else:
            out = _REBUILD_BINARY[node.op](walk(node.left), walk(node.right))
        memo[key] = out
        return out

    return walk(e)


# ---------------------------------------------------------------------------
# differentiation

def differentiate(e: Expression, coord: int) -> Expression:
    """Exact partial derivative with respect to coordinate ``coord``."""
    coord = int(coord)
    cache = e._dcache
    if cache is not None and coord in cache:
        return cache[coord]
    if isinstance(e, Constant):
        out = ZERO
    elif isinstance(e, Coordinate):
        out = ONE if e.index == coord else ZERO
    elif isinstance(e, Unary):
        c = e.child
        dc = differentiate(c, coord)
        if _is_value(dc, 0):
            out = ZERO
        elif e.op == "neg":
            out = neg(dc)
        elif e.op == "sin":
            out = mul(func("cos", c), dc)
        elif e.op == "cos":
            out = neg(mul(func("sin", c), dc))
        elif e.op == "exp":
            out = mul(e, dc)
        elif e.op == "ln":
            out = div(dc, c)
        else:  # sqrt
            out = div(dc, mul(Constant(2.0), e))
    else:
        a, b = e.left, e.right
        da = differentiate(a, coord)
        if e.op == "pow":
            r = b.value
            out = mul(mul(Constant(r), power(a, r - 1)), da)
        else:
            db = differentiate(b, coord)
            if e.op == "add":
                out = add(da, db)
            elif e.op == "sub":
                out = sub(da, db)
            elif e.op == "mul":
                out = add(mul(da, b), mul(a, db))
            elif _is_value(db, 0):
                out = div(da, b)
            else:
                out = div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if cache is None:
        cache = {}
        object.__setattr__(e, "_dcache", cache)
    cache[coord] = out
    return out


def gradient(e: Expression, n: int) -> list:
    return [differentiate(e, i) for i in range(n)]


def max_coordinate(e: Expression) -> int:
    """Largest coordinate index mentioned in ``e`` (-1 if none)."""
    seen = set()
    best = -1
    stack = [e]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Coordinate):
            best = max(best, node.index)
        elif isinstance(node, Unary):
            stack.append(node.child)
        elif isinstance(node, Binary):
            stack.extend((node.left, node.right))
    return best


# ---------------------------------------------------------------------------
# evaluation

class _Evaluator:
    """Evaluates many expressions against one point set, sharing subtrees."""

    def __init__(self, coords):
        self.coords = coords
        self.memo = {}

    def __call__(self, node):
        key = id(node)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Constant):
            out = np.float64(node.value)
        elif isinstance(node, Coordinate):
            if node.index >= len(self.coords):
                raise IndexError(
                    f"coordinate {node.index} outside a {len(self.coords)}-dim point")
            out = self.coords[node.index]
        elif isinstance(node, Unary):
            out = _apply_unary(node.op, self(node.child))
        else:
            right = node.right.value if node.op == "pow" else self(node.right)
            out = _apply_binary(node.op, self(node.left), right)
        # keep a reference so ids stay valid for the life of the memo
        self.memo[key] = out
        return out


def evaluate(e: Expression, point):
    """Value of ``e`` at ``point``.

    ``point`` is a length-n sequence of floats (returns a float) or of equally
    shaped arrays (returns an array, one value per point).
    """
    coords = [np.asarray(c, dtype=np.float64) for c in point]
    with np.errstate(all="ignore"):
        out = _Evaluator(coords)(e)
    if all(c.ndim == 0 for c in coords):
        return float(out)
    shape = np.broadcast_shapes(*(c.shape for c in coords)) if coords else ()
    return np.broadcast_to(out, shape).astype(np.float64)


def evaluate_array(exprs, points) -> np.ndarray:
    """Evaluate an array of expressions at an (N, n) array of points.

    Returns an array of shape ``exprs.shape + (N,)``.
    """
    exprs = np.asarray(exprs, dtype=object)
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    coords = [pts[:, i] for i in range(pts.shape[1])]
    ev = _Evaluator(coords)
    out = np.empty(exprs.shape + (pts.shape[0],))
    with np.errstate(all="ignore"):
        for idx in np.ndindex(*exprs.shape):
            out[idx] = ev(as_expr(exprs[idx]))
    return out


# ---------------------------------------------------------------------------
# printing

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 2 ** 53:
        return str(int(v))
    return repr(v)


def _precedence(e):
    if isinstance(e, Constant):
        return 3 if (e.value < 0 or math.copysign(1.0, e.value) < 0) else 5
    if isinstance(e, Coordinate):
        return 5
    if isinstance(e, Unary):
        return 3 if e.op == "neg" else 5
    return _PREC[e.op]


def to_string(e: Expression, coord_names=None) -> str:
    """Print ``e`` in the parse grammar; re-parsing gives back the same tree
    up to negative constants, which come back as negations."""

    def name(i):
        if coord_names is None:
            return f"x{i}"
        return coord_names[i]

    def wrap(node, needed):
        text = walk(node)
        return f"({text})" if _precedence(node) < needed else text

    def walk(node):
        if isinstance(node, Constant):
            v = node.value
            if not math.isfinite(v):
                raise ValueError(f"cannot print non-finite constant {v}")
            if math.copysign(1.0, v) < 0:
                return "-" + _format_number(-v)
            return _format_number(v)
        if isinstance(node, Coordinate):
            return name(node.index)
        if isinstance(node, Unary):
            if node.op == "neg":
                return "-" + wrap(node.child, 3)
            return f"{node.op}({walk(node.child)})"
        p = _PREC[node.op]
        sym = _SYMBOL[node.op]
        if node.op == "pow":
            # the base must bind tighter than '^'; the exponent is a constant
            return f"{wrap(node.left, 5)}^{wrap(node.right, 5)}"
        return f"{wrap(node.left, p)}{sym}{wrap(node.right, p + 1)}"

    return walk(e)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, names):
        self.text = text
        self.names = names
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ExpressionSyntaxError(message, self.text, tok[2])

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] != "op":
            self.fail(f"expected {value!r}")
        return self.take()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = "add" if self.take()[1] == "+" else "sub"
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = "mul" if self.take()[1] == "*" else "div"
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Unary("neg", self.unary())
        if tok[0] == "op" and tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            exp_tok = self.peek()
            exponent = self.unary()
            if max_coordinate(exponent) >= 0:
                self.fail("exponent must not depend on coordinates", exp_tok)
            try:
                value = evaluate(exponent, [])
            except DomainError as err:
                self.fail(f"exponent is undefined ({err})", exp_tok)
            if not math.isfinite(value):
                self.fail("exponent is not finite", exp_tok)
            return Binary("pow", base, Constant(value))
        return base

    def atom(self):
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            return Constant(float(value))
        if kind == "id":
            if value in FUNCTIONS:
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return Unary(value, inner)
            if value not in self.names:
                raise UnknownIdentifier(value)
            return Coordinate(self.names.index(value))
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected token {value!r}", tok)


def check_coord_names(coord_names) -> list:
    names = list(coord_names)
    if len(set(names)) != len(names):
        raise ValueError("coordinate names must be distinct")
    for name in names:
        if not isinstance(name, str) or not _IDENT.match(name):
            raise ValueError(f"invalid coordinate name {name!r}")
        if name in FUNCTIONS:
            raise ValueError(f"coordinate name {name!r} clashes with a function")
    return names


def parse(text: str, coord_names) -> Expression:
    """Parse ``text`` into an unsimplified tree.

    >>> parse("x^2 + 3*y", ["x", "y"])
    add(pow(Coord0,2),mul(3,Coord1))
    """
    if isinstance(coord_names, str):
        coord_names = [coord_names]
    names = check_coord_names(coord_names)
    if not isinstance(text, str) or not text.strip():
        raise ExpressionSyntaxError("empty expression", text or "", 0)
    return _Parser(text, names).parse()
