"""Metallic numbers, trivial structures and the Norden <-> metallic conversions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fields
from .errors import NegativeDiscriminant, NotNorden, WrongDiscriminant
from .expr import Constant
from .manifold import (DEFAULT_TOL, ChartManifold, CheckReport, points_of, report)

# (p, q) of the named members of the metallic mean family
METALLIC_MEANS = {
    "golden": (1, 1),
    "silver": (2, 1),
    "bronze": (3, 1),
    "subtle": (4, 1),
    "copper": (1, 2),
    "nickel": (1, 3),
}


@dataclass(frozen=True)
class MetallicParams:
    p: float
    q: float

    @property
    def discriminant(self) -> float:
        return self.p * self.p + 4.0 * self.q

    @property
    def kind(self) -> str:
        d = self.discriminant
        if d > 0:
            return "hyperbolic"
        if d == 0:
            return "parabolic"
        return "elliptic-Norden"


@dataclass(frozen=True)
class NordenFamilyParams:
    a: float
    b: float

    @property
    def induced(self) -> MetallicParams:
        return MetallicParams(2.0 * self.b, -(self.a * self.a + self.b * self.b))


def metallic_number(p: float, q: float) -> float:
    """Positive root of x^2 - p x - q = 0."""
    d = p * p + 4.0 * q
    if d < 0:
        raise NegativeDiscriminant(f"p^2 + 4q = {d} < 0")
    return (p + math.sqrt(d)) / 2.0


def metallic_root(p: float, q: float, sign: int = 1) -> float:
    d = p * p + 4.0 * q
    if d < 0:
        raise NegativeDiscriminant(f"p^2 + 4q = {d} < 0")
    return (p + math.copysign(1.0, sign) * math.sqrt(d)) / 2.0


def trivial_structure(p: float, q: float, n: int, sign: int = 1) -> np.ndarray:
    """mu * I with mu a root of x^2 = p x + q; ``sign`` picks the root."""
    return metallic_root(p, q, sign) * np.eye(n)


def trivial_manifold(M: ChartManifold, p: float, q: float, sign: int = 1) -> ChartManifold:
    mu = Constant(metallic_root(p, q, sign))
    J = fields.scale(mu, fields.identity(M.n))
    return M.with_structure(J, p, q, name=f"{M.name}[trivial]")


def check_norden(M: ChartManifold, sample=None, tol=DEFAULT_TOL) -> tuple[CheckReport, CheckReport]:
    """J^2 = -I and g-symmetry of M.J on the sample."""
    pts = points_of(M, sample)
    G = fields.evaluate(M.g, pts)
    J = fields.evaluate(M.J, pts)
    square = report("norden.square", M.name, J @ J + np.eye(M.n), tol)
    sym = report("norden.g_symmetric", M.name, np.swapaxes(J, 1, 2) @ G - G @ J, tol)
    return square, sym


def metallic_from_norden(M: ChartManifold, a: float, b: float, sample=None,
                         tol=DEFAULT_TOL) -> ChartManifold:
    """Treat M.J as a Norden structure and return the chart carrying a J + b I.

    The result has (p, q) = (2b, -(a^2 + b^2)).
    """
    for rep in check_norden(M, sample, tol):
        if not rep.passed:
            raise NotNorden(f"{M.name}: {rep.check_id} fails (max error {rep.max_abs_err:.3e})")
    params = NordenFamilyParams(float(a), float(b)).induced
    J = fields.add(fields.scale(a, M.J), fields.scale(b, fields.identity(M.n)))
    return M.with_structure(J, params.p, params.q, name=f"{M.name}[a={a:g},b={b:g}]")


def norden_from_metallic(M: ChartManifold, sign: int = 1) -> ChartManifold:
    """J_pm = pm (2J - pI) / sqrt(-p^2 - 4q), a Norden structure (p, q) = (0, -1)."""
    d = M.discriminant
    if not d < 0:
        raise WrongDiscriminant(f"{M.name}: p^2 + 4q = {d} is not negative")
    s = math.sqrt(-d)
    sgn = math.copysign(1.0, sign)
    J = fields.sub(fields.scale(2.0 * sgn / s, M.J),
                   fields.scale(M.p * sgn / s, fields.identity(M.n)))
    tag = "+" if sgn > 0 else "-"
    return M.with_structure(J, 0.0, -1.0, name=f"{M.name}[J{tag}]")


def reconstruction_params(M: ChartManifold, sign: int = 1) -> NordenFamilyParams:
    """(a, b) with J = a J_pm + b I for the Norden structure J_pm of M."""
    d = M.discriminant
    if not d < 0:
        raise WrongDiscriminant(f"{M.name}: p^2 + 4q = {d} is not negative")
    return NordenFamilyParams(math.copysign(math.sqrt(-d) / 2.0, sign), M.p / 2.0)
