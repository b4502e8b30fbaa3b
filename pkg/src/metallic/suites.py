"""Named groups of checks, as run by the command line tool.

Each suite takes a chart and a ``SuiteContext`` and returns a list of timed
reports together with the checks it skipped (and why). A check whose stated
tolerance is tighter than the run tolerance keeps the tighter one.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import connections, core, fields, generalized, lifts
from .manifold import (DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, ChartManifold, CheckReport,
                       PointSample, check_g_symmetric_endo, check_metric, check_polynomial,
                       report, sample_points)

SUITE_NAMES = ("core", "connections", "generalized", "lifts")
POINTWISE_TOL = 1e-12


@dataclass
class SuiteContext:
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL

    def sample(self, domain) -> PointSample:
        return sample_points(domain, self.samples, self.seed)

    def tight(self, native: float) -> float:
        return min(self.tol, native)


@dataclass
class TimedReport:
    report: CheckReport
    wall_time: float

    def to_dict(self, timing=True) -> dict:
        out = self.report.to_dict()
        if timing:
            out["wall_time"] = self.wall_time
        return out


@dataclass
class SuiteResult:
    reports: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (check_id, manifold_id, reason)

    def add(self, fn, *args, **kwargs):
        """Run a check function and time it; its reports share the wall time."""
        start = time.perf_counter()
        out = fn(*args, **kwargs)
        elapsed = time.perf_counter() - start
        if isinstance(out, CheckReport):
            out = [out]
        self.reports.extend(TimedReport(r, elapsed) for r in out)

    def skip(self, check_id, manifold_id, reason):
        self.skipped.append((check_id, manifold_id, reason))

    def extend(self, other: "SuiteResult"):
        self.reports.extend(other.reports)
        self.skipped.extend(other.skipped)


def _is_norden(M, s, tol) -> bool:
    return all(r.passed for r in core.check_norden(M, s, tol))


def run_core(M: ChartManifold, ctx: SuiteContext) -> SuiteResult:
    s = ctx.sample(M.domain)
    res = SuiteResult()
    res.add(check_metric, M, s, ctx.tol)
    res.add(check_g_symmetric_endo, M, s, ctx.tol)
    res.add(check_polynomial, M, s, ctx.tol)
    if M.discriminant < 0:
        res.add(_norden_round_trip, M, s, ctx.tol)
    else:
        res.skip("core.norden_*", M.name, "p^2 + 4q >= 0")
    return res


def _norden_round_trip(M, s, tol) -> list[CheckReport]:
    """J_pm are Norden structures, and a J_pm + b I gives back J."""
    J = fields.evaluate(M.J, s.points)
    out = []
    for sign in (1, -1):
        tag = "plus" if sign > 0 else "minus"
        Jn = core.norden_from_metallic(M, sign)
        square, sym = core.check_norden(Jn, s, tol)
        for name, r in (("square", square), ("g_symmetric", sym)):
            r.check_id = f"core.norden_{tag}_{name}"
            r.manifold_id = M.name
            out.append(r)
        params = core.reconstruction_params(M, sign)
        # rebuild at a loose gate so that a failing Norden check above is
        # reported rather than raised
        back = core.metallic_from_norden(Jn, params.a, params.b, s, tol=np.inf)
        out.append(report(f"core.norden_{tag}_reconstruct", M.name,
                          fields.evaluate(back.J, s.points) - J, tol))
    return out


def run_connections(M: ChartManifold, ctx: SuiteContext) -> SuiteResult:
    s = ctx.sample(M.domain)
    res = SuiteResult()
    res.add(connections.check_levi_civita, M, s, ctx.tol)
    res.add(connections.check_nijenhuis_cross, M, s, ctx.tol)
    res.add(connections.check_curvature_symmetries, M, s, ctx.tol)
    res.add(connections.check_lemma_integrable, M, s, ctx.tol)
    if M.discriminant != 0:
        res.add(connections.check_natural_connection, M, s, ctx.tol)
        res.add(connections.check_torsion_formula, M, s, ctx.tol)
        res.add(connections.check_torsion_identity, M, s, ctx.tol)
        res.add(connections.check_torsion_identity_scaled, M, s, ctx.tol)
    else:
        res.skip("connections.natural_*", M.name, "p^2 + 4q = 0")
    if (M.p, M.q) == (0.0, -1.0) and _is_norden(M, s, ctx.tol):
        res.add(connections.check_ganchev_mihova, M, s, ctx.tol)
    else:
        res.skip("connections.ganchev_mihova", M.name, "not a Norden structure")
    return res


def run_generalized(M: ChartManifold, ctx: SuiteContext) -> SuiteResult:
    s = ctx.sample(M.domain)
    res = SuiteResult()
    res.add(generalized.check_pointwise, M, s, ctx.tight(POINTWISE_TOL))
    if M.discriminant != 0:
        res.add(generalized.check_d_hat, M, s, ctx.tol)
    else:
        res.skip("generalized.dhat_*", M.name, "p^2 + 4q = 0")
    return res


def run_lifts(M: ChartManifold, ctx: SuiteContext) -> SuiteResult:
    s = ctx.sample(M.domain)
    res = SuiteResult()
    tight = ctx.tight(lifts.STRUCTURE_TOL)
    res.add(lifts.check_frame_tables, M, s, tight)
    flags = connections.classify(M, s, ctx.tol)
    flat_parallel = flags.flat and flags.locally_metallic
    kinds = [lifts.COTANGENT]
    if M.discriminant != 0:
        kinds.insert(0, lifts.TANGENT)
        res.add(lifts.intertwine_check, M, s, tight)
    else:
        res.skip("lifts.tangent.*", M.name, "p^2 + 4q = 0")
        res.skip("lifts.intertwine", M.name, "p^2 + 4q = 0")
    for kind in kinds:
        L = lifts.build_lift(M, kind)
        ls = L.sample(ctx.samples, ctx.seed)
        res.add(lifts.check_lift_chart, L, ls, ctx.tol)
        res.add(lifts.check_vertical_nijenhuis, L, ls, tight)
        res.add(lifts.check_nijenhuis_derived, L, ls, ctx.tight(lifts.NIJENHUIS_TOL))
        if flat_parallel:
            res.add(lifts.check_integrable_lift, L, ls, ctx.tight(lifts.INTEGRABLE_TOL))
        else:
            res.skip(f"lifts.{kind}.integrable", M.name, "base is not flat and locally metallic")
    return res


SUITES = {
    "core": run_core,
    "connections": run_connections,
    "generalized": run_generalized,
    "lifts": run_lifts,
}


def resolve_suites(names) -> list:
    names = list(names) or ["all"]
    out = []
    for name in names:
        if name == "all":
            picked = SUITE_NAMES
        elif name in SUITES:
            picked = (name,)
        else:
            raise ValueError(f"unknown suite {name!r}; choose from {list(SUITE_NAMES) + ['all']}")
        out.extend(p for p in picked if p not in out)
    return out


def run_suites(M: ChartManifold, names, ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult()
    for name in resolve_suites(names):
        res.extend(SUITES[name](M, ctx))
    return res
