"""Levi-Civita machinery, Nijenhuis tensor and the metallic natural connection.

Array layouts (all numpy object arrays of Expressions):

* connection coefficients ``C[k, i, j]`` = C^k_{ij}, with D_{d_i} d_j = C^k_{ij} d_k
  (the first lower index is the differentiation direction);
* (1,2)-tensors ``K[k, i, j]`` = K^k_{ij}; for a covariant derivative of J this is
  (D_i J)^k_j, for Nijenhuis and torsion it is N(d_i, d_j)^k;
* curvature ``R[l, i, j, k]`` = R^l_{ijk}, with R(d_i, d_j) d_k = R^l_{ijk} d_l and
  R^l_{ijk} = d_i C^l_{jk} - d_j C^l_{ik} + C^l_{im} C^m_{jk} - C^l_{jm} C^m_{ik}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import fields
from .errors import ZeroDiscriminant
from .expr import Constant, total
from .manifold import (DEFAULT_TOL, ChartManifold, CheckReport, metrics_on, points_of,
                       report)


def _require_nonzero_discriminant(M):
    if M.discriminant == 0:
        raise ZeroDiscriminant(f"{M.name}: p^2 + 4q = 0")


# ---------------------------------------------------------------------------
# field construction

@lru_cache(maxsize=64)
def inverse_metric(M: ChartManifold) -> np.ndarray:
    return fields.inverse(M.g)


@lru_cache(maxsize=64)
def levi_civita(M: ChartManifold) -> np.ndarray:
    """Christoffel symbols of the second kind, Gamma[k, i, j] = Gamma^k_{ij}."""
    n = M.n
    ginv = inverse_metric(M)
    dg = [fields.partial(M.g, m) for m in range(n)]  # dg[m][j, k] = d_m g_{jk}
    first = np.empty((n, n, n), dtype=object)  # first[m, j, k] = Gamma_{m jk}
    half = Constant(0.5)
    for m in range(n):
        for j in range(n):
            for k in range(j, n):
                val = half * (dg[j][m, k] + dg[k][m, j] - dg[m][j, k])
                first[m, j, k] = first[m, k, j] = val
    out = np.empty((n, n, n), dtype=object)
    for l in range(n):
        for j in range(n):
            for k in range(j, n):
                val = total(ginv[l, m] * first[m, j, k] for m in range(n))
                out[l, j, k] = out[l, k, j] = val
    return out


def covariant_derivative(T, C) -> np.ndarray:
    """(D_i T)^k_j = d_i T^k_j + C^k_{is} T^s_j - C^s_{ij} T^k_s, as K[k, i, j]."""
    n = T.shape[0]
    out = np.empty((n, n, n), dtype=object)
    dT = [fields.partial(T, i) for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = (dT[i][k, j]
                                + total(C[k, i, s] * T[s, j] for s in range(n))
                                - total(C[s, i, j] * T[k, s] for s in range(n)))
    return out


def covariant_derivative_metric(g, C) -> np.ndarray:
    """(D_i g)_{jk} = d_i g_{jk} - C^s_{ij} g_{sk} - C^s_{ik} g_{js}, as A[i, j, k]."""
    n = g.shape[0]
    out = np.empty((n, n, n), dtype=object)
    for i in range(n):
        dg = fields.partial(g, i)
        for j in range(n):
            for k in range(n):
                out[i, j, k] = (dg[j, k]
                                - total(C[s, i, j] * g[s, k] for s in range(n))
                                - total(C[s, i, k] * g[j, s] for s in range(n)))
    return out


@lru_cache(maxsize=64)
def _nabla_J(M):
    return covariant_derivative(M.J, levi_civita(M))


def covariant_derivative_J(M: ChartManifold, Gamma=None) -> np.ndarray:
    """Levi-Civita derivative of J, K[k, i, j] = (nabla_i J)^k_j."""
    if Gamma is None:
        return _nabla_J(M)
    return covariant_derivative(M.J, Gamma)


def nijenhuis_of(J) -> np.ndarray:
    """Coordinate Nijenhuis tensor of an endomorphism field given as J[i, j] = J^i_j.

    N^k_{ij} = J^s_i d_s J^k_j - J^s_j d_s J^k_i + J^k_s d_j J^s_i - J^k_s d_i J^s_j
    (the J^2 [X, Y] term drops out on coordinate fields).
    """
    n = J.shape[0]
    dJ = [fields.partial(J, s) for s in range(n)]
    out = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if i == j:
                    out[k, i, j] = Constant(0.0)
                    continue
                out[k, i, j] = total(
                    J[s, i] * dJ[s][k, j] - J[s, j] * dJ[s][k, i]
                    + J[k, s] * dJ[j][s, i] - J[k, s] * dJ[i][s, j]
                    for s in range(n))
    return out


@lru_cache(maxsize=64)
def nijenhuis_bracket(M: ChartManifold) -> np.ndarray:
    return nijenhuis_of(M.J)


def nijenhuis_via_connection(M: ChartManifold, Gamma=None) -> np.ndarray:
    """N_J from a torsion-free connection:
    N(X, Y) = (nabla_{JX} J)Y - (nabla_{JY} J)X + J(nabla_Y J)X - J(nabla_X J)Y.
    """
    nJ = covariant_derivative_J(M, Gamma)
    J = M.J
    n = M.n
    out = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = total(
                    J[s, i] * nJ[k, s, j] - J[s, j] * nJ[k, s, i]
                    + J[k, s] * nJ[s, j, i] - J[k, s] * nJ[s, i, j]
                    for s in range(n))
    return out


def curvature(C) -> np.ndarray:
    """Curvature R[l, i, j, k] of connection coefficients C (torsion allowed)."""
    n = C.shape[0]
    dC = [fields.partial(C, i) for i in range(n)]  # dC[i][l, j, k] = d_i C^l_{jk}
    out = np.empty((n, n, n, n), dtype=object)
    for l in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if i == j:
                        out[l, i, j, k] = Constant(0.0)
                        continue
                    out[l, i, j, k] = (dC[i][l, j, k] - dC[j][l, i, k]
                                       + total(C[l, i, m] * C[m, j, k] - C[l, j, m] * C[m, i, k]
                                               for m in range(n)))
    return out


@lru_cache(maxsize=64)
def _riemann(M):
    return curvature(levi_civita(M))


def riemann(M: ChartManifold, Gamma=None) -> np.ndarray:
    if Gamma is None:
        return _riemann(M)
    return curvature(Gamma)


@lru_cache(maxsize=64)
def _natural(M):
    return natural_connection_from(M, levi_civita(M))


def natural_connection(M: ChartManifold, Gamma=None) -> np.ndarray:
    """C^k_{ij} = Gamma^k_{ij} + 2/d J^k_s (nabla_i J)^s_j - p/d (nabla_i J)^k_j,
    d = p^2 + 4q. Makes both J and g parallel."""
    _require_nonzero_discriminant(M)
    if Gamma is None:
        return _natural(M)
    return natural_connection_from(M, Gamma)


def natural_connection_from(M, Gamma):
    _require_nonzero_discriminant(M)
    d = M.discriminant
    nJ = covariant_derivative(M.J, Gamma)
    a = Constant(2.0 / d)
    b = Constant(M.p / d)
    n = M.n
    out = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = (Gamma[k, i, j]
                                + a * total(M.J[k, s] * nJ[s, i, j] for s in range(n))
                                - b * nJ[k, i, j])
    return out


def norden_b_connection(M: ChartManifold, Gamma=None) -> np.ndarray:
    """nabla - 1/2 J (nabla J): the connection of Ganchev and Mihova on a Norden
    manifold, written without reference to (p, q)."""
    Gamma = levi_civita(M) if Gamma is None else Gamma
    nJ = covariant_derivative(M.J, Gamma)
    n = M.n
    out = np.empty((n, n, n), dtype=object)
    half = Constant(0.5)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = Gamma[k, i, j] - half * total(M.J[k, s] * nJ[s, i, j]
                                                            for s in range(n))
    return out


def torsion_of(C) -> np.ndarray:
    n = C.shape[0]
    out = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = C[k, i, j] - C[k, j, i]
    return out


def torsion_formula(M: ChartManifold, Gamma=None) -> np.ndarray:
    """T(X, Y) = 1/d {(2J - pI)(nabla_X JY - nabla_Y JX) - (pJ + 2qI)[X, Y]}
    on coordinate fields, where nabla_i (J d_j) = ((nabla_i J)^k_j + J^k_s Gamma^s_{ij}) d_k."""
    _require_nonzero_discriminant(M)
    Gamma = levi_civita(M) if Gamma is None else Gamma
    nJ = covariant_derivative(M.J, Gamma)
    n = M.n
    d = M.discriminant
    two_j_minus_p = fields.sub(fields.scale(2.0, M.J), fields.scale(M.p, fields.identity(n)))

    def nabla_J_field(i, j, k):
        return nJ[k, i, j] + total(M.J[k, s] * Gamma[s, i, j] for s in range(n))

    out = np.empty((n, n, n), dtype=object)
    inv_d = Constant(1.0 / d)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = inv_d * total(
                    two_j_minus_p[k, m] * (nabla_J_field(i, j, m) - nabla_J_field(j, i, m))
                    for m in range(n))
    return out


# ---------------------------------------------------------------------------
# numeric helpers

def _eval(field, pts):
    return fields.evaluate(field, pts)


def lowered_riemann(R, G):
    """R_{lijk} = g_{lm} R^m_{ijk} from evaluated arrays (sample axis first)."""
    return np.einsum("nlm,nmijk->nlijk", G, R)


# ---------------------------------------------------------------------------
# checks

def check_levi_civita(M, sample=None, tol=DEFAULT_TOL) -> list[CheckReport]:
    pts = points_of(M, sample)
    metrics_on(M, pts)
    Gamma = levi_civita(M)
    compat = _eval(covariant_derivative_metric(M.g, Gamma), pts)
    G = _eval(Gamma, pts)
    return [report("connections.levi_civita_metric", M.name, compat, tol),
            report("connections.levi_civita_symmetric", M.name, G - np.swapaxes(G, 2, 3), tol)]


def check_nijenhuis_cross(M, sample=None, tol=DEFAULT_TOL) -> CheckReport:
    pts = points_of(M, sample)
    a = _eval(nijenhuis_bracket(M), pts)
    b = _eval(nijenhuis_via_connection(M), pts)
    return report("connections.nijenhuis_cross", M.name, a - b, tol)


def natural_residuals(M, C=None):
    """Symbolic DJ[k, i, j] and Dg[i, j, k] for the natural connection."""
    C = natural_connection(M) if C is None else C
    return covariant_derivative(M.J, C), covariant_derivative_metric(M.g, C)


def check_natural_connection(M, sample=None, tol=DEFAULT_TOL) -> tuple[CheckReport, CheckReport]:
    _require_nonzero_discriminant(M)
    pts = points_of(M, sample)
    DJ, Dg = natural_residuals(M)
    return (report("connections.natural_DJ", M.name, _eval(DJ, pts), tol),
            report("connections.natural_Dg", M.name, _eval(Dg, pts), tol))


def check_torsion_formula(M, sample=None, tol=DEFAULT_TOL) -> CheckReport:
    _require_nonzero_discriminant(M)
    pts = points_of(M, sample)
    T = _eval(torsion_of(natural_connection(M)), pts)
    closed = _eval(torsion_formula(M), pts)
    return report("connections.torsion_formula", M.name, T - closed, tol)


def torsion_identity_sides(M, pts, scaled=False):
    """Both sides of T(JX,Y) + T(X,JY) - pT(X,Y) = c (2J - pI) N_J(X,Y), evaluated.

    c = 1 by default. With ``scaled`` c = 1/(p^2 + 4q), the factor that makes
    the identity hold when N_J does not vanish.
    """
    T = _eval(torsion_of(natural_connection(M)), pts)
    N = _eval(nijenhuis_bracket(M), pts)
    J = _eval(M.J, pts)
    lhs = (np.einsum("nsi,nksj->nkij", J, T) + np.einsum("nsj,nkis->nkij", J, T)
           - M.p * T)
    rhs = 2.0 * np.einsum("nks,nsij->nkij", J, N) - M.p * N
    if scaled:
        rhs = rhs / M.discriminant
    return lhs, rhs


def check_torsion_identity(M, sample=None, tol=DEFAULT_TOL) -> CheckReport:
    _require_nonzero_discriminant(M)
    pts = points_of(M, sample)
    lhs, rhs = torsion_identity_sides(M, pts)
    return report("connections.torsion_identity", M.name, lhs - rhs, tol)


def check_torsion_identity_scaled(M, sample=None, tol=DEFAULT_TOL) -> CheckReport:
    _require_nonzero_discriminant(M)
    pts = points_of(M, sample)
    lhs, rhs = torsion_identity_sides(M, pts, scaled=True)
    return report("connections.torsion_identity_scaled", M.name, lhs - rhs, tol)


def check_curvature_symmetries(M, sample=None, tol=DEFAULT_TOL) -> list[CheckReport]:
    pts = points_of(M, sample)
    R = _eval(riemann(M), pts)
    G = metrics_on(M, pts)
    low = lowered_riemann(R, G)
    bianchi = R + np.transpose(R, (0, 1, 3, 4, 2)) + np.transpose(R, (0, 1, 4, 2, 3))
    return [
        report("connections.riemann_antisym_ij", M.name, R + np.swapaxes(R, 2, 3), tol),
        report("connections.riemann_antisym_kl", M.name, low + np.swapaxes(low, 1, 4), tol),
        report("connections.bianchi", M.name, bianchi, tol),
    ]


def check_ganchev_mihova(M, sample=None, tol=DEFAULT_TOL) -> CheckReport:
    """Natural connection at (p, q) = (0, -1) against nabla - 1/2 J(nabla J)."""
    pts = points_of(M, sample)
    N = M if (M.p, M.q) == (0.0, -1.0) else M.with_structure(M.J, 0.0, -1.0)
    a = _eval(natural_connection(N), pts)
    b = _eval(norden_b_connection(N), pts)
    return report("connections.ganchev_mihova", M.name, a - b, tol)


# ---------------------------------------------------------------------------
# classification

@dataclass
class StructureFlags:
    integrable: bool
    locally_metallic: bool
    nearly_locally_metallic: bool
    flat: bool
    max_nijenhuis: float
    max_nabla_J: float
    max_nearly: float
    max_curvature: float
    nearly_identity_err: float | None = None
    half_p_eigen_distance: float | None = None

    def flags(self) -> dict:
        return {"integrable": self.integrable, "locally_metallic": self.locally_metallic,
                "nearly_locally_metallic": self.nearly_locally_metallic, "flat": self.flat}


def classify(M: ChartManifold, sample=None, tol=DEFAULT_TOL) -> StructureFlags:
    pts = points_of(M, sample)
    N = _eval(nijenhuis_bracket(M), pts)
    nJ = _eval(covariant_derivative_J(M), pts)  # [n, k, i, j]
    R = _eval(riemann(M), pts)
    nearly = nJ + np.swapaxes(nJ, 2, 3)
    m_n, m_j, m_nearly, m_r = (float(np.max(np.abs(a))) for a in (N, nJ, nearly, R))
    flags = StructureFlags(m_n <= tol, m_j <= tol, m_nearly <= tol, m_r <= tol,
                           m_n, m_j, m_nearly, m_r)
    J = _eval(M.J, pts)
    eig = np.linalg.eigvals(J)
    flags.half_p_eigen_distance = float(np.min(np.abs(eig - M.p / 2.0)))
    if flags.nearly_locally_metallic and M.discriminant > 0:
        # N(X, Y) = 2 (2J - pI)(nabla_Y J) X for nearly locally metallic structures
        two_j = 2.0 * J - M.p * np.eye(M.n)
        rhs = 2.0 * np.einsum("nks,nsji->nkij", two_j, nJ)
        flags.nearly_identity_err = float(np.max(np.abs(N - rhs)))
    return flags


def check_lemma_integrable(M, sample=None, tol=DEFAULT_TOL) -> CheckReport:
    """Locally metallic implies integrable; reports max |N| when nabla J = 0."""
    flags = classify(M, sample, tol)
    err = flags.max_nijenhuis if flags.locally_metallic else 0.0
    count = points_of(M, sample).shape[0]
    return report("connections.lemma_integrable", M.name, np.array([err]), tol,
                  sample_count=count)
