"""Chart manifolds carrying a metric and a (1,1)-tensor, plus pointwise checks.

Index conventions used throughout the package:

* ``g[i, j]`` is g_{ij}; ``J[i, j]`` is J^i_j, so (JX)^i = J[i, j] X^j.
* g-symmetry of J reads ``J.T @ G == G @ J``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fields
from .errors import DegenerateMetric, DimensionMismatch, SchemaError
from .expr import check_coord_names, parse, to_string

DEFAULT_SAMPLES = 200
DEFAULT_SEED = 42
DEFAULT_TOL = 1e-9
DET_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class ChartManifold:
    name: str
    coords: tuple
    g: np.ndarray
    J: np.ndarray
    p: float
    q: float
    domain: tuple

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def discriminant(self) -> float:
        return self.p * self.p + 4.0 * self.q

    def with_structure(self, J, p, q, name=None) -> "ChartManifold":
        return ChartManifold(name or self.name, self.coords, self.g,
                             fields.to_field(J), float(p), float(q), self.domain)

    def with_metric(self, g, name=None) -> "ChartManifold":
        return ChartManifold(name or self.name, self.coords, fields.to_field(g),
                             self.J, self.p, self.q, self.domain)


@dataclass(frozen=True)
class PointSample:
    seed: int
    count: int
    points: np.ndarray = field(repr=False)


@dataclass
class CheckReport:
    check_id: str
    manifold_id: str
    sample_count: int
    max_abs_err: float
    passed: bool
    tolerance: float

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out

    @classmethod
    def from_dict(cls, data) -> "CheckReport":
        return cls(data["check_id"], data["manifold_id"], int(data["sample_count"]),
                   float(data["max_abs_err"]), bool(data["pass"]), float(data["tolerance"]))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"CHECK {self.check_id} {self.manifold_id} "
                f"max_err={self.max_abs_err:.3e} tol={self.tolerance:.1e} [{status}]")


def report(check_id, manifold_id, residual, tol, sample_count=None, scale=None) -> CheckReport:
    """Summarise a residual array (sample axis first) into a CheckReport.

    With ``scale`` the tolerance becomes tol * (1 + scale), for checks whose
    operands exceed unit size.
    """
    residual = np.asarray(residual, dtype=np.float64)
    if sample_count is None:
        sample_count = residual.shape[0] if residual.ndim else 1
    if residual.size == 0:
        err = 0.0
    elif not np.all(np.isfinite(residual)):
        err = float("inf")
    else:
        err = float(np.max(np.abs(residual)))
    tolerance = tol if scale is None else tol * (1.0 + float(scale))
    return CheckReport(check_id, manifold_id, int(sample_count), err, err <= tolerance, tolerance)


# ---------------------------------------------------------------------------
# construction and manifests

def _matrix(rows, coords, label, n):
    if not isinstance(rows, list) or len(rows) != n or any(
            not isinstance(r, list) or len(r) != n for r in rows):
        shape = (len(rows), len(rows[0]) if rows and isinstance(rows[0], list) else 0) \
            if isinstance(rows, list) else None
        raise DimensionMismatch(f"{label} must be {n}x{n}, got {shape}")
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            cell = rows[i][j]
            if isinstance(cell, (int, float)) and not isinstance(cell, bool):
                cell = repr(float(cell))
            if not isinstance(cell, str):
                raise SchemaError(f"{label}[{i}][{j}] must be an expression string")
            out[i, j] = parse(cell, coords)
    return out


def from_strings(name, coords, g, J, p, q, domain) -> ChartManifold:
    coords = tuple(check_coord_names(coords))
    n = len(coords)
    dom = tuple((float(lo), float(hi)) for lo, hi in domain)
    if len(dom) != n:
        raise DimensionMismatch(f"domain has {len(dom)} intervals for {n} coordinates")
    for lo, hi in dom:
        if not lo <= hi:
            raise SchemaError(f"empty domain interval [{lo}, {hi}]")
    return ChartManifold(str(name), coords, _matrix(g, coords, "g", n),
                         _matrix(J, coords, "J", n), float(p), float(q), dom)


_KEYS = {"name": str, "dim": int, "coords": list, "p": (int, float), "q": (int, float),
         "domain": list, "g": list, "J": list}


def manifest_from_dict(data) -> ChartManifold:
    if not isinstance(data, dict):
        raise SchemaError("manifest must be a JSON object")
    for key, kind in _KEYS.items():
        if key not in data:
            raise SchemaError(f"manifest is missing {key!r}")
        if not isinstance(data[key], kind) or isinstance(data[key], bool):
            raise SchemaError(f"manifest field {key!r} has the wrong type")
    extra = set(data) - set(_KEYS)
    if extra:
        raise SchemaError(f"unknown manifest fields {sorted(extra)}")
    n = data["dim"]
    if n < 1 or len(data["coords"]) != n:
        raise DimensionMismatch(f"dim={n} but {len(data['coords'])} coordinates given")
    for interval in data["domain"]:
        if not (isinstance(interval, list) and len(interval) == 2
                and all(isinstance(v, (int, float)) for v in interval)):
            raise SchemaError("domain entries must be [lo, hi] pairs")
    try:
        check_coord_names(data["coords"])
    except ValueError as err:
        raise SchemaError(str(err)) from err
    return from_strings(data["name"], data["coords"], data["g"], data["J"],
                        data["p"], data["q"], data["domain"])


def load_manifest(text: str) -> ChartManifold:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"manifest is not valid JSON: {err}") from err
    return manifest_from_dict(data)


def manifest_dict(M: ChartManifold) -> dict:
    names = list(M.coords)
    return {
        "name": M.name,
        "dim": M.n,
        "coords": names,
        "p": M.p,
        "q": M.q,
        "domain": [list(iv) for iv in M.domain],
        "g": [[to_string(M.g[i, j], names) for j in range(M.n)] for i in range(M.n)],
        "J": [[to_string(M.J[i, j], names) for j in range(M.n)] for i in range(M.n)],
    }


def dump_manifest(M: ChartManifold) -> str:
    return json.dumps(manifest_dict(M), indent=2)


# ---------------------------------------------------------------------------
# sampling

def sample_points(domain, count=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> PointSample:
    if count < 1:
        raise ValueError("sample count must be positive")
    rng = np.random.default_rng(seed)
    lo = np.array([iv[0] for iv in domain], dtype=np.float64)
    hi = np.array([iv[1] for iv in domain], dtype=np.float64)
    pts = lo + (hi - lo) * rng.random((count, len(domain)))
    return PointSample(seed, count, pts)


def default_sample(M: ChartManifold, count=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> PointSample:
    return sample_points(M.domain, count, seed)


def points_of(M, sample):
    if sample is None:
        sample = default_sample(M)
    if isinstance(sample, PointSample):
        return sample.points
    return np.atleast_2d(np.asarray(sample, dtype=np.float64))


# ---------------------------------------------------------------------------
# pointwise algebra

def metric_at(M: ChartManifold, x) -> np.ndarray:
    G = fields.evaluate(M.g, np.atleast_2d(x))[0]
    if abs(np.linalg.det(G)) < DET_FLOOR:
        raise DegenerateMetric(f"metric of {M.name} is degenerate at {list(x)}")
    return G


def inverse_metric_at(M: ChartManifold, x) -> np.ndarray:
    return np.linalg.inv(metric_at(M, x))


def structure_at(M: ChartManifold, x) -> np.ndarray:
    return fields.evaluate(M.J, np.atleast_2d(x))[0]


def metrics_on(M: ChartManifold, points) -> np.ndarray:
    """Metric matrices at many points, shape (N, n, n); degenerate points raise."""
    G = fields.evaluate(M.g, points)
    det = np.linalg.det(G)
    if np.any(np.abs(det) < DET_FLOOR):
        bad = points[int(np.argmin(np.abs(det)))]
        raise DegenerateMetric(f"metric of {M.name} is degenerate at {list(bad)}")
    return G


def flat(M: ChartManifold, x, vector) -> np.ndarray:
    return metric_at(M, x) @ np.asarray(vector, dtype=np.float64)


def sharp(M: ChartManifold, x, covector) -> np.ndarray:
    return np.linalg.solve(metric_at(M, x), np.asarray(covector, dtype=np.float64))


def signature(G) -> tuple:
    """(positive, negative) eigenvalue counts of the symmetrised matrix."""
    eig = np.linalg.eigvalsh(0.5 * (G + G.T))
    return int(np.sum(eig > 0)), int(np.sum(eig < 0))


def fd_partial(f, x, i, h=1e-5) -> float:
    """Central difference of a scalar function along coordinate ``i``."""
    x = np.asarray(x, dtype=np.float64)
    step = np.zeros_like(x)
    step[i] = h
    return (f(x + step) - f(x - step)) / (2.0 * h)


# ---------------------------------------------------------------------------
# checks

def check_metric(M, sample=None, tol=DEFAULT_TOL) -> CheckReport:
    """g symmetric and nondegenerate on the sample."""
    pts = points_of(M, sample)
    G = metrics_on(M, pts)
    return report("metric.symmetric", M.name, G - np.swapaxes(G, 1, 2), tol)


def check_g_symmetric_endo(M, sample=None, tol=DEFAULT_TOL) -> CheckReport:
    pts = points_of(M, sample)
    G = fields.evaluate(M.g, pts)
    J = fields.evaluate(M.J, pts)
    residual = np.swapaxes(J, 1, 2) @ G - G @ J
    return report("core.g_symmetric", M.name, residual, tol)


def check_polynomial(M, sample=None, tol=DEFAULT_TOL) -> CheckReport:
    pts = points_of(M, sample)
    J = fields.evaluate(M.J, pts)
    residual = J @ J - M.p * J - M.q * np.eye(M.n)
    return report("core.polynomial", M.name, residual, tol)


def signatures_on(M, sample=None) -> set:
    pts = points_of(M, sample)
    return {signature(G) for G in metrics_on(M, pts)}
