"""Metallic structures lifted to the tangent and cotangent bundles.

A base chart with coordinates x^1..x^n becomes a 2n-dimensional chart with
coordinates (x^1..x^n, y^1..y^n), the y being fiber coordinates. The Levi-Civita
connection splits the bundle tangent space into horizontal and vertical parts:

* tangent bundle:    X_i^H = d/dx^i - y^s Gamma^k_{is} d/dy^k
* cotangent bundle:  X_i^H = d/dx^i + y_s Gamma^s_{ik} d/dy_k

The adapted frame is (X_1^H..X_n^H, d/dy^1..d/dy^n). ``frame`` holds these
vectors as columns in the coordinate basis, so a tensor with frame
components T_f has coordinate components F T_f F^{-1} (endomorphisms) or
F^{-T} T_f F^{-1} (bilinear forms).

Frame components of the lifted structure depend only on the base point.
They come from the generalized structure check-J carried across by the bundle
morphism Psi (tangent: d_i -> X_i^H, dx^j -> g^{jk} d/dy^k) or Phi
(cotangent: d_i -> X_i^H, dx^j -> d/dy_j).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import fields
from .connections import covariant_derivative_J, inverse_metric, levi_civita, nijenhuis_of, riemann
from .errors import ZeroDiscriminant
from .expr import Coordinate, total
from .generalized import (check_g_matrix, check_J_matrix, hat_g_matrix)
from .manifold import (DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, ChartManifold, CheckReport,
                       PointSample, metrics_on, points_of, report, sample_points)

FIBER_BOX = (-1.0, 1.0)
TANGENT, COTANGENT = "tangent", "cotangent"


@dataclass(frozen=True)
class BundleMorphismField:
    """Frame matrix of a bundle morphism; columns are images of the source basis."""
    name: str
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class LiftedChart:
    base: ChartManifold
    kind: str
    chart: ChartManifold
    frame: np.ndarray = field(repr=False)
    frame_inv: np.ndarray = field(repr=False)
    J_frame: np.ndarray = field(repr=False)
    g_frame: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    def sample(self, count=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> PointSample:
        return sample_points(self.chart.domain, count, seed)


# ---------------------------------------------------------------------------
# construction

def fiber_names(coords, prefix) -> tuple:
    """Fiber coordinate names prefix+c, padded with underscores on collision."""
    taken = set(coords)
    out = []
    for c in coords:
        name = prefix + c
        while name in taken:
            name += "_"
        taken.add(name)
        out.append(name)
    return tuple(out)


def _defect_field(M):
    """-J^2 + pJ + qI as a symbolic field."""
    J = M.J
    JJ = fields.matmul(J, J)
    return fields.add(fields.sub(fields.scale(M.p, J), JJ), fields.scale(M.q, fields.identity(M.n)))


def _block(A, B, C, E):
    n = A.shape[0]
    out = fields.zeros(2 * n, 2 * n)
    out[:n, :n], out[:n, n:], out[n:, :n], out[n:, n:] = A, B, C, E
    return out


def _fiber(n):
    return [Coordinate(n + s) for s in range(n)]


def horizontal_shift(M: ChartManifold, kind: str) -> np.ndarray:
    """Vertical part of X_i^H in the coordinate basis, shift[k, i]."""
    n = M.n
    Gamma = levi_civita(M)
    y = _fiber(n)
    out = fields.zeros(n, n)
    for k in range(n):
        for i in range(n):
            if kind == TANGENT:
                out[k, i] = -total(y[s] * Gamma[k, i, s] for s in range(n))
            else:
                out[k, i] = total(y[s] * Gamma[s, i, k] for s in range(n))
    return out


def frame_matrices(M: ChartManifold, kind: str):
    S = horizontal_shift(M, kind)
    I, Z = fields.identity(M.n), fields.zeros(M.n, M.n)
    return _block(I, Z, S, I), _block(I, Z, fields.scale(-1.0, S), I)


def tangent_tables(M: ChartManifold):
    """Frame components (J, g) of the tangent lift, entered as closed formulas.

    J(X_i^H) = J^k_i X_k^H + d/dy^i
    J(d/dy^j) = (-J^2 + pJ + qI)^k_j X_k^H - J^k_j d/dy^k + p d/dy^j
    g(X_i^H, X_j^H) = g_ij, g(d/dy^i, d/dy^j) = g_ij,
    g(X_i^H, d/dy^j) = (p g_ij - 2 g_jl J^l_i) / (p^2 + 4q)
    """
    d = M.discriminant
    if d == 0:
        raise ZeroDiscriminant(f"{M.name}: p^2 + 4q = 0")
    n = M.n
    I = fields.identity(n)
    J_frame = _block(M.J, _defect_field(M), I, fields.sub(fields.scale(M.p, I), M.J))
    GJ = fields.matmul(M.g, M.J)  # GJ[j, i] = g_jl J^l_i
    K = fields.scale(1.0 / d, fields.sub(fields.scale(M.p, M.g), fields.scale(2.0, GJ.T.copy())))
    g_frame = _block(M.g, K, K.T.copy(), M.g)
    return J_frame, g_frame


def cotangent_tables(M: ChartManifold):
    """Frame components (J, g) of the cotangent lift as they appear in the
    closed-form table, read literally.

    J(X_i^H) = J^k_i X_k^H + g_ik d/dy_k
    J(d/dy_j) = (-J^2 + pJ + qI)^l_k g^{jk} d/dy_l - J^j_k d/dy_k + p d/dy_j
    g(X_i^H, X_j^H) = g_ij, g(X_i^H, d/dy_j) = p/4 delta_ij - 1/2 J^j_i,
    g(d/dy_i, d/dy_j) = g^{ij}
    """
    n = M.n
    I = fields.identity(n)
    ginv = inverse_metric(M)
    vert = fields.add(fields.matmul(_defect_field(M), ginv),
                      fields.sub(fields.scale(M.p, I), M.J.T.copy()))
    J_frame = _block(M.J, fields.zeros(n, n), M.g, vert)
    K = fields.sub(fields.scale(0.25 * M.p, I), fields.scale(0.5, M.J.T.copy()))
    g_frame = _block(M.g, K, K.T.copy(), ginv)
    return J_frame, g_frame


def cotangent_frame_structures(M: ChartManifold):
    """(J, g) in the cotangent frame obtained by carrying check-J and check-g
    across Phi, which is the identity on frame components."""
    n = M.n
    I = fields.identity(n)
    ginv = inverse_metric(M)
    J_frame = _block(M.J, fields.matmul(_defect_field(M), ginv), M.g,
                     fields.sub(fields.scale(M.p, I), M.J.T.copy()))
    K = fields.sub(fields.scale(0.25 * M.p, I), fields.scale(0.5, M.J.T.copy()))
    g_frame = _block(M.g, K, K.T.copy(), fields.scale(0.25 * M.discriminant, ginv))
    return J_frame, g_frame


def _conjugate(F, Finv, T):
    return fields.matmul(fields.matmul(F, T), Finv)


def _pull(Finv, B):
    return fields.matmul(fields.matmul(Finv.T.copy(), B), Finv)


def _lifted_manifold(M, kind, J_frame, g_frame, F, Finv):
    prefix = "d" if kind == TANGENT else "p"
    coords = tuple(M.coords) + fiber_names(M.coords, prefix)
    domain = tuple(M.domain) + (FIBER_BOX,) * M.n
    name = f"{M.name}[{'TM' if kind == TANGENT else 'T*M'}]"
    return ChartManifold(name, coords, _pull(Finv, g_frame), _conjugate(F, Finv, J_frame),
                         M.p, M.q, domain)


@lru_cache(maxsize=32)
def build_tangent_lift(M: ChartManifold) -> LiftedChart:
    J_frame, g_frame = tangent_tables(M)
    F, Finv = frame_matrices(M, TANGENT)
    chart = _lifted_manifold(M, TANGENT, J_frame, g_frame, F, Finv)
    return LiftedChart(M, TANGENT, chart, F, Finv, J_frame, g_frame)


@lru_cache(maxsize=32)
def build_cotangent_lift(M: ChartManifold) -> LiftedChart:
    """Cotangent lift. The chart metric is the pullback of check-g; the
    table metric (vertical block g^{ij}) is kept for comparison only, since it
    is compatible with the lifted J only when p^2 + 4q = 4."""
    J_frame, g_frame = cotangent_frame_structures(M)
    F, Finv = frame_matrices(M, COTANGENT)
    chart = _lifted_manifold(M, COTANGENT, J_frame, g_frame, F, Finv)
    return LiftedChart(M, COTANGENT, chart, F, Finv, J_frame, g_frame)


def build_lift(M: ChartManifold, kind: str) -> LiftedChart:
    if kind == TANGENT:
        return build_tangent_lift(M)
    if kind == COTANGENT:
        return build_cotangent_lift(M)
    raise ValueError(f"unknown lift kind {kind!r}")


# ---------------------------------------------------------------------------
# bundle morphisms, evaluated on base points

def psi_matrix(G) -> np.ndarray:
    """Psi in frame components: diag(I, G^{-1}), batch over leading axes."""
    n = G.shape[-1]
    out = np.zeros(G.shape[:-2] + (2 * n, 2 * n))
    out[..., :n, :n] = np.eye(n)
    out[..., n:, n:] = np.linalg.inv(G)
    return out


def phi_matrix(G) -> np.ndarray:
    n = G.shape[-1]
    return np.broadcast_to(np.eye(2 * n), G.shape[:-2] + (2 * n, 2 * n)).copy()


def morphism_field(M: ChartManifold, which: str) -> BundleMorphismField:
    """Symbolic frame matrix of psi, phi or psi_phi_inv (= psi here)."""
    n = M.n
    I, Z = fields.identity(n), fields.zeros(n, n)
    if which == "phi":
        return BundleMorphismField(which, _block(I, Z, Z, I))
    if which in ("psi", "psi_phi_inv"):
        return BundleMorphismField(which, _block(I, Z, Z, inverse_metric(M)))
    raise ValueError(f"unknown morphism {which!r}")


def _base_arrays(M, pts):
    G = metrics_on(M, pts)
    return G, np.linalg.inv(G), fields.evaluate(M.J, pts)


def conjugated_structures(M: ChartManifold, pts, kind: str):
    """Frame components built mechanically from check-J, hat-g and check-g.

    Returns (J_frame, {"hat": pullback of hat-g, "check": pullback of check-g}).
    """
    G, Gi, J = _base_arrays(M, pts)
    p, q = M.p, M.q
    if kind == TANGENT:
        P = psi_matrix(G)
    else:
        P = phi_matrix(G)
    Pi = np.linalg.inv(P)
    Pi_T = np.swapaxes(Pi, -1, -2)
    J_frame = P @ check_J_matrix(G, Gi, J, p, q) @ Pi
    metrics = {"check": Pi_T @ check_g_matrix(G, Gi, J, p, q) @ Pi}
    if M.discriminant != 0:
        metrics["hat"] = Pi_T @ hat_g_matrix(G, Gi, J, p, q) @ Pi
    return J_frame, metrics


def table_structures(M: ChartManifold, pts, kind: str):
    J_t, g_t = tangent_tables(M) if kind == TANGENT else cotangent_tables(M)
    return fields.evaluate(J_t, pts), fields.evaluate(g_t, pts)


# ---------------------------------------------------------------------------
# Nijenhuis tensor of the lift, in frame components

@lru_cache(maxsize=32)
def _chart_nijenhuis(L: LiftedChart):
    return nijenhuis_of(L.chart.J)


def brute_force_nijenhuis(L: LiftedChart, pts) -> np.ndarray:
    """N of the lifted J from coordinate brackets, rotated into the adapted
    frame: Nf[c, a, b] = (F^{-1})^c_k N^k_{ij} F^i_a F^j_b."""
    N = fields.evaluate(_chart_nijenhuis(L), pts)
    F = fields.evaluate(L.frame, pts)
    Fi = fields.evaluate(L.frame_inv, pts)
    return np.einsum("nck,nkij,nia,njb->ncab", Fi, N, F, F)


def _base_tensors(M, pts):
    n = M.n
    base = pts[:, :n]
    J = fields.evaluate(M.J, base)
    K = fields.evaluate(covariant_derivative_J(M), base)  # K[n, k, i, j] = (nabla_i J)^k_j
    R = fields.evaluate(riemann(M), base)  # R[n, l, i, j, k] = R^l_{ijk}
    Nb = fields.evaluate(nijenhuis_of(M.J), base)
    return J, K, R, Nb, pts[:, n:]


def _assemble(n, count, hh_h, hh_v, hv_v):
    """Frame array Nf[N, c, a, b] from the horizontal/horizontal and
    horizontal/vertical families; vertical/vertical and all horizontal
    components of the mixed family are zero."""
    out = np.zeros((count, 2 * n, 2 * n, 2 * n))
    out[:, :n, :n, :n] = hh_h
    out[:, n:, :n, :n] = hh_v
    out[:, n:, :n, n:] = hv_v
    out[:, n:, n:, :n] = -np.swapaxes(hv_v, 2, 3)
    return out


def _mixed_core(J, K):
    """A[m, i, j] = ((nabla_{J X_i} J) X_j - J (nabla_{X_i} J) X_j)^m."""
    return np.einsum("nsi,nmsj->nmij", J, K) - np.einsum("nms,nsij->nmij", J, K)


def nijenhuis_frame_formulas(L: LiftedChart, pts) -> np.ndarray:
    """The closed-form component families evaluated at lifted points.

    Tangent bundle, vertical parts of
      N(X_i^H, d/dy^j) = ((nabla_{JX_i} J) X_j - J (nabla_{X_i} J) X_j)^k
      N(X_i^H, X_j^H)  = -y^s (J^k_i J^h_j R^r_{khs} - J^r_l J^k_i R^l_{kjs}
                         - J^h_j J^r_l R^l_{ihs} + p J^r_l R^l_{ijs} + q R^r_{ijs})
    cotangent bundle, vertical parts of
      N(X_i^H, d/dy_j) = ((nabla_{JX_i} J) X_k - J (nabla_{X_i} J) X_k)^j
      N(X_i^H, X_j^H)  = y_l (J^k_i J^h_j R^l_{khs} - J^r_s J^k_i R^l_{kjr}
                         - J^r_s J^k_j R^l_{ikr} + p J^k_s R^l_{ijk} + q R^l_{ijs})
    with horizontal part N_J(X_i, X_j) in both cases, and N(V, W) = 0 on
    vertical pairs. R^l_{ijk} is read as R(d_i, d_j) d_k.
    """
    M = L.base
    n, p, q = M.n, M.p, M.q
    J, K, R, Nb, y = _base_tensors(M, pts)
    A = _mixed_core(J, K)
    if L.kind == TANGENT:
        hv = A  # [N, k, i, j]
        curv = (np.einsum("nki,nhj,nrkhs->nrijs", J, J, R)
                - np.einsum("nrl,nki,nlkjs->nrijs", J, J, R)
                - np.einsum("nhj,nrl,nlihs->nrijs", J, J, R)
                + p * np.einsum("nrl,nlijs->nrijs", J, R)
                + q * R)
        hh_v = -np.einsum("ns,nrijs->nrij", y, curv)
    else:
        hv = np.einsum("njik->nkij", A)  # component k of N(X_i, d/dy_j) is A^j_{ik}
        curv = (np.einsum("nki,nhj,nlkhs->nlijs", J, J, R)
                - np.einsum("nrs,nki,nlkjr->nlijs", J, J, R)
                - np.einsum("nrs,nkj,nlikr->nlijs", J, J, R)
                + p * np.einsum("nks,nlijk->nlijs", J, R)
                + q * R)
        hh_v = np.einsum("nl,nlijs->nsij", y, curv)
    return _assemble(n, pts.shape[0], Nb, hh_v, hv)


FAMILIES = ("vv", "hv", "hh_horizontal", "hh_vertical")


def family_slices(n):
    h, v = slice(0, n), slice(n, 2 * n)
    return {
        "vv": (slice(None), slice(None), v, v),
        "hv": (slice(None), slice(None), h, v),
        "hh_horizontal": (slice(None), h, h, h),
        "hh_vertical": (slice(None), v, h, h),
    }


def derived_nijenhuis(L: LiftedChart, pts) -> np.ndarray:
    """Component families worked out from the bracket relations of the
    adapted frame, with the lifted vertical block L = pI - J.

    Writing Z^H, W^V for lifts of base fields and y for the fiber point:
      N(Z^H, W^V) = (-(nabla_{JZ} J) W + L (nabla_Z J) W)^V
      N(Z^H, W^H) = N_J(Z, W)^H + ((nabla_W J) Z - (nabla_Z J) W)^V
                    - (R(JZ, JW) - L R(JZ, W) - L R(Z, JW) + (pL + q) R(Z, W)) y
    on the tangent bundle, R acting on y as a vector. On the cotangent bundle
    the same expressions hold with the vertical factors transported by flat_g,
    L acting on covectors as pI - J^T, and R acting on y as a covector
    (y R)_k = y_l R^l_{..k} with the opposite overall sign.
    """
    M = L.base
    n, p, q = M.n, M.p, M.q
    J, K, R, Nb, y = _base_tensors(M, pts)
    I = np.eye(n)
    Lm = p * I - J
    A = (-np.einsum("nsi,nmsj->nmij", J, K)            # -(nabla_{J X_i} J) X_j
         + np.einsum("nms,nsij->nmij", Lm, K))          # L (nabla_{X_i} J) X_j
    non_y = np.einsum("nkji->nkij", K) - K               # (nabla_j J) X_i - (nabla_i J) X_j
    # Rc[r, i, j, s] = (R(JX_i, JX_j) - L R(JX_i, X_j) - L R(X_i, JX_j) + (pL + q) R(X_i, X_j))^r_s
    RJJ = np.einsum("nki,nhj,nrkhs->nrijs", J, J, R)
    RJ_ = np.einsum("nki,nrkjs->nrijs", J, R)
    R_J = np.einsum("nhj,nrihs->nrijs", J, R)
    Rc = (RJJ - np.einsum("nrl,nlijs->nrijs", Lm, RJ_ + R_J)
          + np.einsum("nrl,nlijs->nrijs", p * Lm + q * I, R))
    if L.kind == TANGENT:
        hv = A
        hh_v = non_y - np.einsum("ns,nrijs->nrij", y, Rc)
    else:
        G = fields.evaluate(M.g, pts[:, :n])
        # component k of N(X_i^H, d/dy_j): the mixed family acting on dx^j
        hv = (-np.einsum("nsi,njsk->nkij", J, K)
              + p * np.einsum("njik->nkij", K)
              - np.einsum("nmk,njim->nkij", J, K))
        hh_v = np.einsum("nkm,nmij->nkij", G, non_y)
        # on covectors L acts from the right: (y R L)_s = y_l R^l_{..r} L^r_s
        RcT = (RJJ - np.einsum("nlijr,nrs->nlijs", RJ_ + R_J, Lm)
               + np.einsum("nlijr,nrs->nlijs", R, p * Lm + q * I))
        hh_v = hh_v + np.einsum("nl,nlijs->nsij", y, RcT)
    return _assemble(n, pts.shape[0], Nb, hh_v, hv)


# ---------------------------------------------------------------------------
# checks

STRUCTURE_TOL = 1e-12
NIJENHUIS_TOL = 1e-8
INTEGRABLE_TOL = 1e-10


def _lift_points(L, sample, count=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
    if sample is None:
        return L.sample(count, seed).points
    return points_of(L.chart, sample)


def check_lift_chart(L: LiftedChart, sample=None, tol=DEFAULT_TOL) -> list[CheckReport]:
    """The lifted chart is metallic pseudo-Riemannian at sampled 2n-points."""
    pts = _lift_points(L, sample)
    G = metrics_on(L.chart, pts)
    J = fields.evaluate(L.chart.J, pts)
    M, prefix, name = L.chart, f"lifts.{L.kind}", L.base.name
    return [
        report(f"{prefix}.polynomial", name, J @ J - M.p * J - M.q * np.eye(2 * L.n), tol),
        report(f"{prefix}.g_symmetric", name, np.swapaxes(J, 1, 2) @ G - G @ J, tol),
        report(f"{prefix}.metric_symmetric", name, G - np.swapaxes(G, 1, 2), tol),
    ]


def check_frame_tables(M: ChartManifold, sample=None, tol=STRUCTURE_TOL) -> list[CheckReport]:
    """Closed-form frame tables against conjugation of check-J through Psi / Phi.

    The tangent metric table is compared whole with the hat-g pullback. For
    the cotangent table only the horizontal and mixed blocks are compared with
    the check-g pullback; the vertical block is covered by
    ``metric_pullback_comparison``.
    """
    pts = points_of(M, sample)
    n = M.n
    out = []
    kinds = (TANGENT, COTANGENT) if M.discriminant != 0 else (COTANGENT,)
    for kind in kinds:
        J_t, g_t = table_structures(M, pts, kind)
        J_c, metrics = conjugated_structures(M, pts, kind)
        out.append(report(f"lifts.{kind}.J_table", M.name, J_t - J_c, tol))
        if kind == TANGENT:
            out.append(report(f"lifts.{kind}.g_table", M.name, g_t - metrics["hat"], tol))
        else:
            diff = (g_t - metrics["check"])[:, :n, :]
            out.append(report(f"lifts.{kind}.g_table_mixed", M.name, diff, tol))
    return out


@dataclass
class MetricComparison:
    """How the closed-form metric table of one lift relates to the two pullbacks."""
    kind: str
    table_compatibility: float
    pullback_compatibility: dict
    table_minus_pullback: dict
    vertical_ratio: dict


def metric_pullback_comparison(M: ChartManifold, sample=None) -> list[MetricComparison]:
    """Diagnostic, not a pass/fail check: compatibility of each candidate lifted
    metric with the lifted J, and the vertical-block ratio pullback / table."""
    pts = points_of(M, sample)
    n = M.n
    out = []
    kinds = (TANGENT, COTANGENT) if M.discriminant != 0 else (COTANGENT,)
    for kind in kinds:
        _, g_t = table_structures(M, pts, kind)
        J_c, metrics = conjugated_structures(M, pts, kind)

        def compat(g):
            return float(np.max(np.abs(np.swapaxes(J_c, 1, 2) @ g - g @ J_c)))

        ratios = {}
        for key, g in metrics.items():
            with np.errstate(divide="ignore", invalid="ignore"):
                r = g[:, n:, n:] / g_t[:, n:, n:]
            r = r[np.isfinite(r)]
            ratios[key] = float(np.median(r)) if r.size else float("nan")
        out.append(MetricComparison(
            kind, compat(g_t), {k: compat(g) for k, g in metrics.items()},
            {k: float(np.max(np.abs(g - g_t))) for k, g in metrics.items()}, ratios))
    return out


def _family_reports(L, prefix, got, want, tol):
    return [report(f"{prefix}.{fam}", L.base.name, got[sl] - want[sl], tol)
            for fam, sl in family_slices(L.n).items()]


def check_nijenhuis_tables(L: LiftedChart, sample=None, tol=NIJENHUIS_TOL) -> list[CheckReport]:
    """Closed-form Nijenhuis families, read literally, against brute force."""
    pts = _lift_points(L, sample)
    return _family_reports(L, f"lifts.{L.kind}.nijenhuis_printed",
                           nijenhuis_frame_formulas(L, pts), brute_force_nijenhuis(L, pts), tol)


def check_nijenhuis_derived(L: LiftedChart, sample=None, tol=NIJENHUIS_TOL) -> list[CheckReport]:
    """Frame-derived Nijenhuis families (``derived_nijenhuis``) against brute force."""
    pts = _lift_points(L, sample)
    return _family_reports(L, f"lifts.{L.kind}.nijenhuis_derived",
                           derived_nijenhuis(L, pts), brute_force_nijenhuis(L, pts), tol)


def check_vertical_nijenhuis(L: LiftedChart, sample=None, tol=STRUCTURE_TOL) -> CheckReport:
    pts = _lift_points(L, sample)
    B = brute_force_nijenhuis(L, pts)
    return report(f"lifts.{L.kind}.nijenhuis_vv", L.base.name, B[family_slices(L.n)["vv"]], tol)


def check_integrable_lift(L: LiftedChart, sample=None, tol=INTEGRABLE_TOL) -> CheckReport:
    """Brute-force Nijenhuis of the lifted J; expected to vanish over a flat
    locally metallic base."""
    pts = _lift_points(L, sample)
    return report(f"lifts.{L.kind}.integrable", L.base.name, brute_force_nijenhuis(L, pts), tol)


def intertwine_residual(M: ChartManifold, pts) -> np.ndarray:
    """J_TM S - S J_T*M in frame components, S = Psi o Phi^{-1} = diag(I, G^{-1})."""
    Jt, _ = conjugated_structures(M, pts, TANGENT)
    Jc, _ = conjugated_structures(M, pts, COTANGENT)
    S = psi_matrix(metrics_on(M, pts)) @ np.linalg.inv(phi_matrix(metrics_on(M, pts)))
    return Jt @ S - S @ Jc


def intertwine_check(M: ChartManifold, sample=None, tol=STRUCTURE_TOL) -> CheckReport:
    pts = points_of(M, sample)
    return report("lifts.intertwine", M.name, intertwine_residual(M, pts), tol)
