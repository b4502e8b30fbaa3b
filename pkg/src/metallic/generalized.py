"""Pointwise structures on TM + T*M and the generalized natural connection.

Everything is written in the basis (d_1..d_n, dx^1..dx^n). A generalized
vector X + alpha is the column (X^1..X^n, alpha_1..alpha_n); an endomorphism
acts as (X, alpha) -> (A X + B alpha, C X + E alpha).

In components flat_g is G, sharp_g is G^{-1}, and the dual J* acts on a
covector by (J* alpha)_i = J^s_i alpha_s, i.e. by the matrix J^T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fields
from .connections import curvature, inverse_metric, natural_connection, torsion_of
from .errors import DegenerateMetric, NotNorden, WrongDiscriminant, ZeroDiscriminant
from .expr import Constant, differentiate, total
from .manifold import (DEFAULT_TOL, DET_FLOOR, ChartManifold, CheckReport, metric_at,
                       points_of, report, structure_at)


@dataclass(frozen=True)
class GeneralizedVector:
    vec: np.ndarray
    form: np.ndarray

    @property
    def array(self) -> np.ndarray:
        return np.concatenate([self.vec, self.form])

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=np.float64)
        n = arr.shape[0] // 2
        return cls(arr[:n], arr[n:])


@dataclass(frozen=True)
class GeneralizedEndo:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    E: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.E]])

    @classmethod
    def from_matrix(cls, m):
        n = m.shape[0] // 2
        return cls(m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:])

    def __call__(self, sigma: GeneralizedVector) -> GeneralizedVector:
        return GeneralizedVector(self.A @ sigma.vec + self.B @ sigma.form,
                                 self.C @ sigma.vec + self.E @ sigma.form)

    def __matmul__(self, other: "GeneralizedEndo") -> "GeneralizedEndo":
        return GeneralizedEndo.from_matrix(self.matrix @ other.matrix)

    def polynomial_residual(self, p, q) -> np.ndarray:
        m = self.matrix
        return m @ m - p * m - q * np.eye(2 * self.n)


@dataclass(frozen=True)
class GeneralizedMetric:
    matrix: np.ndarray

    def __post_init__(self):
        if abs(np.linalg.det(self.matrix)) < DET_FLOOR:
            raise DegenerateMetric("generalized metric is degenerate")

    def __call__(self, sigma: GeneralizedVector, tau: GeneralizedVector) -> float:
        return float(sigma.array @ self.matrix @ tau.array)

    def symmetry_residual(self, endo: GeneralizedEndo) -> np.ndarray:
        """h(F s, t) - h(s, F t) as a matrix: F^T H - H F."""
        F = endo.matrix
        return F.T @ self.matrix - self.matrix @ F


def _base(M, x):
    G = metric_at(M, x)
    return G, np.linalg.inv(G), structure_at(M, x)


def _pq(M, p, q):
    return (M.p if p is None else p), (M.q if q is None else q)


def _t(a):
    return np.swapaxes(a, -1, -2)


def _eye_like(a):
    return np.broadcast_to(np.eye(a.shape[-1]), a.shape)


def _block(A, B, C, E):
    top = np.concatenate([A, B], axis=-1)
    bottom = np.concatenate([C, E], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


# Batch builders: G, Gi, J carry any leading batch shape (..., n, n) and the
# results are (..., 2n, 2n) block matrices.

def hat_J_matrix(G, J, p):
    return _block(J, np.zeros_like(J), G, -_t(J) + p * _eye_like(J))


def hat_J_prime_matrix(G, J, p):
    return _block(-J + p * _eye_like(J), np.zeros_like(J), G, _t(J))


def _defect(J, p, q):
    return -J @ J + p * J + q * _eye_like(J)


def check_J_matrix(G, Gi, J, p, q):
    return _block(J, _defect(J, p, q) @ Gi, G, -_t(J) + p * _eye_like(J))


def check_J_prime_matrix(G, Gi, J, p, q):
    return _block(-J + p * _eye_like(J), _defect(J, p, q) @ Gi, G, _t(J))


def hat_g_matrix(G, Gi, J, p, q):
    d = p * p + 4.0 * q
    if d == 0:
        raise ZeroDiscriminant("p^2 + 4q = 0")
    K = (p * _eye_like(J) - 2.0 * _t(J)) / d
    return _block(G, K, _t(K), Gi)


def check_g_matrix(G, Gi, J, p, q):
    K = 0.25 * p * _eye_like(J) - 0.5 * _t(J)
    return _block(G, K, _t(K), 0.25 * (p * p + 4.0 * q) * Gi)


def norden_g_matrix(G, Gi, J):
    K = 0.5 * _t(J)
    return _block(G, K, _t(K), Gi)


def hat_J(M: ChartManifold, x) -> GeneralizedEndo:
    G, _, J = _base(M, x)
    return GeneralizedEndo.from_matrix(hat_J_matrix(G, J, M.p))


def hat_J_prime(M: ChartManifold, x) -> GeneralizedEndo:
    G, _, J = _base(M, x)
    return GeneralizedEndo.from_matrix(hat_J_prime_matrix(G, J, M.p))


def check_J(M: ChartManifold, x, p=None, q=None) -> GeneralizedEndo:
    """Generalized metallic structure built from any g-symmetric J and any (p, q)."""
    p, q = _pq(M, p, q)
    G, Gi, J = _base(M, x)
    return GeneralizedEndo.from_matrix(check_J_matrix(G, Gi, J, p, q))


def check_J_prime(M: ChartManifold, x, p=None, q=None) -> GeneralizedEndo:
    p, q = _pq(M, p, q)
    G, Gi, J = _base(M, x)
    return GeneralizedEndo.from_matrix(check_J_prime_matrix(G, Gi, J, p, q))


def tilde_J(M: ChartManifold, x) -> GeneralizedEndo:
    """Generalized Norden structure (J, 0, flat_g, -J*) of a Norden chart."""
    G, _, J = _base(M, x)
    return GeneralizedEndo(J, np.zeros_like(J), G, -J.T)


def hat_g(M: ChartManifold, x) -> GeneralizedMetric:
    G, Gi, J = _base(M, x)
    return GeneralizedMetric(hat_g_matrix(G, Gi, J, M.p, M.q))


def check_g(M: ChartManifold, x, p=None, q=None) -> GeneralizedMetric:
    p, q = _pq(M, p, q)
    G, Gi, J = _base(M, x)
    return GeneralizedMetric(check_g_matrix(G, Gi, J, p, q))


def norden_generalized_metric(M: ChartManifold, x) -> GeneralizedMetric:
    G, Gi, J = _base(M, x)
    return GeneralizedMetric(norden_g_matrix(G, Gi, J))


def dual_structure(M: ChartManifold, x) -> np.ndarray:
    """flat_g . J . sharp_g as a matrix on covector components."""
    G, Gi, J = _base(M, x)
    return G @ J @ Gi


# ---------------------------------------------------------------------------
# symplectic pairing

def pairing_matrix(n: int) -> np.ndarray:
    half = 0.5 * np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, half], [-half, zero]])


def symplectic_pairing(sigma: GeneralizedVector, tau: GeneralizedVector) -> float:
    """(X + alpha, Y + beta) = -1/2 (alpha(Y) - beta(X))."""
    return -0.5 * (float(sigma.form @ tau.vec) - float(tau.form @ sigma.vec))


def symplectic_defect(endo: GeneralizedEndo, p, sigma, tau) -> float:
    return (symplectic_pairing(endo(sigma), tau) + symplectic_pairing(sigma, endo(tau))
            - p * symplectic_pairing(sigma, tau))


def random_pairs(n: int, count: int, rng):
    for _ in range(count):
        a = rng.standard_normal(2 * n)
        b = rng.standard_normal(2 * n)
        yield GeneralizedVector.from_array(a), GeneralizedVector.from_array(b)


def check_symplectic_identity(M, x, p=None, q=None, pairs=100, seed=0) -> CheckReport:
    p, q = _pq(M, p, q)
    endo = check_J(M, x, p, q)
    rng = np.random.default_rng(seed)
    errs = [symplectic_defect(endo, p, s, t) for s, t in random_pairs(M.n, pairs, rng)]
    return report("generalized.symplectic", M.name, np.array(errs), DEFAULT_TOL,
                  sample_count=1)


# ---------------------------------------------------------------------------
# Norden families

def _require_norden_at(M, x, tol=DEFAULT_TOL):
    G, _, J = _base(M, x)
    if (np.max(np.abs(J @ J + np.eye(M.n))) > tol
            or np.max(np.abs(J.T @ G - G @ J)) > tol):
        raise NotNorden(f"{M.name}: J is not a Norden structure at {list(x)}")
    return G, J


def generalized_norden_family(M: ChartManifold, a, b, x) -> GeneralizedEndo:
    """(aJ + bI, 0, flat_g, -aJ* + bI) for a Norden J; squares to 2b F - (a^2 + b^2) I."""
    G, J = _require_norden_at(M, x)
    return GeneralizedEndo.from_matrix(norden_family_matrix(G, J, a, b))


def generalized_norden_from_check(M: ChartManifold, x, p=None, q=None, sign=1) -> GeneralizedEndo:
    p, q = _pq(M, p, q)
    d = p * p + 4.0 * q
    if not d < 0:
        raise WrongDiscriminant(f"p^2 + 4q = {d} is not negative")
    s = math.copysign(1.0, sign) / math.sqrt(-d)
    m = check_J(M, x, p, q).matrix
    return GeneralizedEndo.from_matrix(s * (2.0 * m - p * np.eye(2 * M.n)))


# ---------------------------------------------------------------------------
# symbolic generalized fields and the connection D-hat

def hat_J_field(M: ChartManifold) -> np.ndarray:
    n = M.n
    out = fields.zeros(2 * n, 2 * n)
    out[:n, :n] = M.J
    out[n:, :n] = M.g
    out[n:, n:] = fields.add(fields.scale(-1.0, M.J.T.copy()), fields.scale(M.p, fields.identity(n)))
    return out


def hat_g_field(M: ChartManifold) -> np.ndarray:
    n = M.n
    d = M.discriminant
    if d == 0:
        raise ZeroDiscriminant(f"{M.name}: p^2 + 4q = 0")
    K = fields.scale(1.0 / d, fields.sub(fields.scale(M.p, fields.identity(n)),
                                         fields.scale(2.0, M.J.T.copy())))
    out = fields.zeros(2 * n, 2 * n)
    out[:n, :n] = M.g
    out[:n, n:] = K
    out[n:, :n] = K.T
    out[n:, n:] = inverse_metric(M)
    return out


def d_hat_matrices(C) -> list:
    """omega_i with D-hat_{d_i} e_B = omega_i[A, B] e_A on the basis (d_k, dx^k);
    D-hat along a pure covector direction vanishes."""
    n = C.shape[0]
    out = []
    for i in range(n):
        w = fields.zeros(2 * n, 2 * n)
        for k in range(n):
            for j in range(n):
                w[k, j] = C[k, i, j]
                w[n + k, n + j] = -C[j, i, k]
        out.append(w)
    return out


@dataclass(frozen=True)
class GeneralizedSectionField:
    """Symbolic section X + alpha: n vector and n covector component Expressions."""
    vec: np.ndarray
    form: np.ndarray

    @classmethod
    def basis(cls, n: int, index: int) -> "GeneralizedSectionField":
        comps = fields.zeros(2 * n)
        comps[index] = Constant(1.0)
        return cls(comps[:n].copy(), comps[n:].copy())

    def evaluate(self, pts) -> np.ndarray:
        return fields.evaluate(np.concatenate([self.vec, self.form]), pts)


def d_hat(C, sigma: GeneralizedSectionField, tau: GeneralizedSectionField) -> GeneralizedSectionField:
    """D-hat_{X+alpha}(Y+beta) = D_X Y + D_X beta."""
    n = C.shape[0]
    X = sigma.vec
    vec = np.empty(n, dtype=object)
    form = np.empty(n, dtype=object)
    for k in range(n):
        vec[k] = total(X[i] * (differentiate(tau.vec[k], i)
                               + total(C[k, i, s] * tau.vec[s] for s in range(n)))
                       for i in range(n))
        form[k] = total(X[i] * (differentiate(tau.form[k], i)
                                - total(C[s, i, k] * tau.form[s] for s in range(n)))
                        for i in range(n))
    return GeneralizedSectionField(vec, form)


def bracket_D(C, sigma: GeneralizedSectionField, tau: GeneralizedSectionField) -> GeneralizedSectionField:
    """[X+alpha, Y+beta]_D = [X, Y] + D_X beta - D_Y alpha."""
    n = C.shape[0]
    X, Y = sigma.vec, tau.vec
    vec = np.empty(n, dtype=object)
    for k in range(n):
        vec[k] = total(X[i] * differentiate(Y[k], i) - Y[i] * differentiate(X[k], i)
                       for i in range(n))
    zero = fields.zeros(n)
    dx_beta = d_hat(C, sigma, GeneralizedSectionField(zero, tau.form)).form
    dy_alpha = d_hat(C, tau, GeneralizedSectionField(zero, sigma.form)).form
    return GeneralizedSectionField(vec, fields.sub(dx_beta, dy_alpha))


def _section_sub(a, b):
    return GeneralizedSectionField(fields.sub(a.vec, b.vec), fields.sub(a.form, b.form))


def torsion_hat(C, sigma, tau) -> GeneralizedSectionField:
    return _section_sub(_section_sub(d_hat(C, sigma, tau), d_hat(C, tau, sigma)),
                        bracket_D(C, sigma, tau))


def curvature_hat(C, sigma, tau, rho) -> GeneralizedSectionField:
    a = d_hat(C, sigma, d_hat(C, tau, rho))
    b = d_hat(C, tau, d_hat(C, sigma, rho))
    c = d_hat(C, bracket_D(C, sigma, tau), rho)
    return _section_sub(_section_sub(a, b), c)


def torsion_expected(T, sigma, tau) -> GeneralizedSectionField:
    """T^D(X, Y) placed in the vector slot."""
    n = T.shape[0]
    vec = np.empty(n, dtype=object)
    for k in range(n):
        vec[k] = total(T[k, i, j] * sigma.vec[i] * tau.vec[j]
                       for i in range(n) for j in range(n))
    return GeneralizedSectionField(vec, fields.zeros(n))


def curvature_expected(R, sigma, tau, rho) -> GeneralizedSectionField:
    """R^D(X, Y) Z + R^D(X, Y) gamma, the covector part acting by the dual action."""
    n = R.shape[0]
    X, Y = sigma.vec, tau.vec
    vec = np.empty(n, dtype=object)
    form = np.empty(n, dtype=object)
    for l in range(n):
        vec[l] = total(R[l, i, j, k] * X[i] * Y[j] * rho.vec[k]
                       for i in range(n) for j in range(n) for k in range(n))
    for k in range(n):
        form[k] = -total(R[l, i, j, k] * X[i] * Y[j] * rho.form[l]
                         for i in range(n) for j in range(n) for l in range(n))
    return GeneralizedSectionField(vec, form)


def d_hat_residuals(M: ChartManifold, C=None):
    """Symbolic (D-hat_i J-hat) and (D-hat_i g-hat), one 2n x 2n block per direction."""
    C = natural_connection(M) if C is None else C
    Jh = hat_J_field(M)
    Gh = hat_g_field(M)
    dJ, dg = [], []
    for i, w in enumerate(d_hat_matrices(C)):
        dJ.append(fields.sub(fields.add(fields.partial(Jh, i), fields.matmul(w, Jh)),
                             fields.matmul(Jh, w)))
        wT = w.T.copy()
        dg.append(fields.sub(fields.sub(fields.partial(Gh, i), fields.matmul(wT, Gh)),
                             fields.matmul(Gh, w)))
    return np.array(dJ, dtype=object), np.array(dg, dtype=object)


def check_d_hat(M: ChartManifold, sample=None, tol=DEFAULT_TOL) -> list[CheckReport]:
    """D-hat J-hat = 0, D-hat g-hat = 0, torsion and curvature of D-hat against D,
    all on the 2n coordinate sections."""
    pts = points_of(M, sample)
    C = natural_connection(M)
    n = M.n
    dJ, dg = d_hat_residuals(M, C)
    out = [report("generalized.dhat_J", M.name, fields.evaluate(dJ, pts), tol),
           report("generalized.dhat_g", M.name, fields.evaluate(dg, pts), tol)]
    T = torsion_of(C)
    R = curvature(C)
    basis = [GeneralizedSectionField.basis(n, a) for a in range(2 * n)]
    t_res = []
    for s in basis:
        for t in basis:
            got = torsion_hat(C, s, t)
            want = torsion_expected(T, s, t)
            t_res.append(_section_sub(got, want).evaluate(pts))
    out.append(report("generalized.dhat_torsion", M.name, np.stack(t_res, axis=1), tol))
    r_vec, r_form = [], []
    for s in basis:
        for t in basis:
            for r in basis:
                diff = _section_sub(curvature_hat(C, s, t, r), curvature_expected(R, s, t, r))
                vals = diff.evaluate(pts)
                r_vec.append(vals[:, :n])
                r_form.append(vals[:, n:])
    out.append(report("generalized.dhat_curvature_vector", M.name, np.stack(r_vec, axis=1), tol))
    out.append(report("generalized.dhat_curvature_form", M.name, np.stack(r_form, axis=1), tol))
    return out


# ---------------------------------------------------------------------------
# pointwise suite over a sample

def _poly(F, p, q):
    return F @ F - p * F - q * _eye_like(F)


def _sym(F, H):
    """Matrix of h(F s, t) - h(s, F t)."""
    return _t(F) @ H - H @ F


def norden_family_matrix(G, Jn, a, b):
    """Batch (aJ + bI, 0, flat_g, -aJ* + bI) for a Norden J."""
    I = _eye_like(Jn)
    return _block(a * Jn + b * I, np.zeros_like(Jn), G, -a * _t(Jn) + b * I)


def check_pointwise(M: ChartManifold, sample=None, tol=1e-12) -> list[CheckReport]:
    """Polynomial, metric-symmetry and pairing identities at every sample point.

    Bilinear identities are checked as matrices, which covers every pair of
    generalized vectors at once.
    """
    pts = points_of(M, sample)
    p, q, d = M.p, M.q, M.discriminant
    G = fields.evaluate(M.g, pts)
    Gi = np.linalg.inv(G)
    J = fields.evaluate(M.J, pts)
    W = np.broadcast_to(pairing_matrix(M.n), G.shape[:-2] + (2 * M.n, 2 * M.n))
    Jh = hat_J_matrix(G, J, p)
    Jhp = hat_J_prime_matrix(G, J, p)
    Jc = check_J_matrix(G, Gi, J, p, q)
    Jcp = check_J_prime_matrix(G, Gi, J, p, q)
    res = {
        "hat_J": _poly(Jh, p, q),
        "hat_J_prime": _poly(Jhp, p, q),
        "check_J": _poly(Jc, p, q),
        "check_J_prime": _poly(Jcp, p, q),
        "check_equals_hat": Jc - Jh,
        "check_g_sym": _sym(Jc, check_g_matrix(G, Gi, J, p, q)),
    }
    if d != 0:
        res["hat_g_sym"] = _sym(Jh, hat_g_matrix(G, Gi, J, p, q))
    res["symplectic"] = _t(Jc) @ W + W @ Jc - p * W
    res["pairing_antisym"] = W + _t(W)
    res["product"] = _poly(check_J_matrix(G, Gi, J, 0.0, 1.0), 0.0, 1.0)
    res["complex"] = _poly(check_J_matrix(G, Gi, J, 0.0, -1.0), 0.0, -1.0)
    res["dual"] = G @ J @ Gi - _t(J)
    if d < 0:
        s = math.sqrt(-d)
        I = _eye_like(J)
        out = []
        for sj in (1, -1):
            Jn = sj * (2.0 * J - p * I) / s
            for sa in (1, -1):
                target = Jh if sj == sa else Jhp
                out.append(norden_family_matrix(G, Jn, sa * s / 2.0, p / 2.0) - target)
        res["norden_family"] = np.stack(out, axis=1)
    return [report(f"generalized.{key}", M.name, val, tol) for key, val in res.items()]


def norden_reconstruction(M: ChartManifold, x, sign_J=1, sign_a=1) -> GeneralizedEndo:
    """Rescaled family (aJ_pm + bI, 0, flat_g, -aJ_pm* + bI) with
    a = sign_a sqrt(-p^2 - 4q)/2, b = p/2, built from the Norden structure J_pm."""
    from .core import norden_from_metallic

    Jpm = norden_from_metallic(M, sign_J)
    a = math.copysign(math.sqrt(-M.discriminant) / 2.0, sign_a)
    return generalized_norden_family(Jpm, a, M.p / 2.0, x)
