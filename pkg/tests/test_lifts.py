import numpy as np
import pytest

import charts
from metallic import builtin, lifts
from metallic.errors import DegenerateMetric, ZeroDiscriminant
from metallic.fields import evaluate
from metallic.manifold import dump_manifest, fd_partial, load_manifest, sample_points

KINDS = (lifts.TANGENT, lifts.COTANGENT)
EXTRA = {"helix": charts.helix, "sphere_phi": charts.sphere_trivial,
         "twisted": charts.twisted_norden, "warped": charts.product_structure}


def _chart(name):
    return EXTRA[name]() if name in EXTRA else builtin.load_example(name)


def _fd_nijenhuis(M, x):
    """Coordinate Nijenhuis tensor from central differences of J."""
    n = M.n
    J = evaluate(M.J, [x])[0]
    dJ = np.array([[[fd_partial(lambda z: evaluate(M.J, [z])[0][k, j], x, i)
                     for j in range(n)] for k in range(n)] for i in range(n)])  # dJ[i, k, j]
    return (np.einsum("si,skj->kij", J, dJ) - np.einsum("sj,ski->kij", J, dJ)
            + np.einsum("ks,jsi->kij", J, dJ) - np.einsum("ks,isj->kij", J, dJ))


def test_fiber_names():
    assert lifts.fiber_names(("x", "y"), "d") == ("dx", "dy")
    assert lifts.fiber_names(("x", "dx"), "d") == ("dx_", "ddx")
    assert lifts.fiber_names(("u", "pu"), "p") == ("pu_", "ppu")


def test_tangent_lift_of_e1_is_constant():
    L = lifts.build_tangent_lift(builtin.load_example("E1"))
    assert L.chart.n == 4
    assert L.chart.coords == ("x", "y", "dx", "dy")
    J = evaluate(L.chart.J, L.sample().points)
    assert np.all(J == J[0])
    assert np.max(np.abs(J[0] @ J[0] - 2 * J[0] + 2 * np.eye(4))) <= 1e-12


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("name", ["E1", "E2", "E3", "E4", "helix", "sphere_phi", "twisted"])
def test_lifted_chart_is_metallic(name, kind):
    L = lifts.build_lift(_chart(name), kind)
    for r in lifts.check_lift_chart(L):
        assert r.passed, r
    assert L.chart.domain[L.n:] == (lifts.FIBER_BOX,) * L.n


def test_frame_is_invertible(example):
    for kind in KINDS:
        L = lifts.build_lift(example, kind)
        pts = L.sample(20).points
        F, Fi = evaluate(L.frame, pts), evaluate(L.frame_inv, pts)
        np.testing.assert_allclose(F @ Fi, np.broadcast_to(np.eye(4), F.shape), atol=1e-13)


def test_zero_discriminant_tangent_lift():
    M = builtin.load_example("E1").with_structure(np.eye(2), 2, -1)
    with pytest.raises(ZeroDiscriminant):
        lifts.build_tangent_lift(M)
    # the cotangent structure still exists, but its metric has a zero vertical block
    L = lifts.build_cotangent_lift(M)
    J = evaluate(L.chart.J, L.sample(20).points)
    assert np.max(np.abs(J @ J - 2 * J + np.eye(4))) <= 1e-12
    with pytest.raises(DegenerateMetric):
        lifts.check_lift_chart(L)


@pytest.mark.parametrize("name", ["E1", "E2", "E3", "E4", "helix", "twisted"])
def test_frame_tables_match_conjugation(name):
    for r in lifts.check_frame_tables(_chart(name), tol=1e-12):
        assert r.passed, r


def test_cotangent_table_for_trivial_structure():
    M = builtin.load_example("E3")
    pts = sample_points(M.domain, 10, 1).points
    J_t, _ = lifts.table_structures(M, pts, lifts.COTANGENT)
    phi = (1 + 5 ** 0.5) / 2
    np.testing.assert_allclose(J_t[:, :2, :2], np.broadcast_to(phi * np.eye(2), (10, 2, 2)),
                               atol=1e-15)
    np.testing.assert_allclose(J_t[:, 2:, 2:], np.broadcast_to((1 - phi) * np.eye(2), (10, 2, 2)),
                               atol=1e-14)
    np.testing.assert_allclose(J_t[:, :2, 2:], 0, atol=1e-14)


@pytest.mark.parametrize("name,d", [("E1", -4.0), ("E2", 5.0), ("warped", 4.0)])
def test_cotangent_metric_comparison(name, d):
    M = _chart(name)
    cot = [c for c in lifts.metric_pullback_comparison(M) if c.kind == lifts.COTANGENT][0]
    # the pullback of check-g is always compatible with the lifted J; the
    # vertical block g^{ij} of the table only when p^2 + 4q = 4
    assert cot.pullback_compatibility["check"] <= 1e-12
    assert (cot.table_compatibility <= 1e-12) == (d == 4.0)
    assert cot.vertical_ratio["check"] == pytest.approx(d / 4)


def test_tangent_metric_table_is_hat_pullback(example):
    tan = [c for c in lifts.metric_pullback_comparison(example) if c.kind == lifts.TANGENT][0]
    assert tan.table_minus_pullback["hat"] <= 1e-12
    assert tan.table_compatibility <= 1e-12


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("name", ["E2", "helix"])
def test_brute_force_against_finite_differences(name, kind):
    L = lifts.build_lift(_chart(name), kind)
    for x in L.sample(3, 8).points:
        sym = evaluate(lifts._chart_nijenhuis(L), [x])[0]
        np.testing.assert_allclose(sym, _fd_nijenhuis(L.chart, x), atol=1e-6)


@pytest.mark.parametrize("kind", KINDS)
def test_vertical_family_vanishes(example, kind):
    assert lifts.check_vertical_nijenhuis(lifts.build_lift(example, kind)).passed


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("name", ["E1", "E2", "E3", "E4", "helix", "sphere_phi", "twisted",
                                  "warped"])
def test_derived_families_match_brute_force(name, kind):
    M = _chart(name)
    if kind == lifts.TANGENT and M.discriminant == 0:
        pytest.skip("tangent lift needs p^2 + 4q != 0")
    for r in lifts.check_nijenhuis_derived(lifts.build_lift(M, kind)):
        assert r.passed, r


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("name", ["E1", "E3"])
def test_closed_form_families_on_parallel_flat_bases(name, kind):
    for r in lifts.check_nijenhuis_tables(lifts.build_lift(_chart(name), kind)):
        assert r.passed, r


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("name", ["E2", "E4", "sphere_phi"])
def test_closed_form_families_depart_from_brute_force(name, kind):
    """Records the measured gap: the closed-form mixed and curvature families
    disagree with the brute-force tensor once nabla J or R is nonzero."""
    reports = {r.check_id.rsplit(".", 1)[1]: r
               for r in lifts.check_nijenhuis_tables(lifts.build_lift(_chart(name), kind))}
    assert reports["vv"].passed and reports["hh_horizontal"].passed
    assert not (reports["hv"].passed and reports["hh_vertical"].passed)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("name", ["E1", "E3"])
def test_lift_of_flat_parallel_base_is_integrable(name, kind):
    assert lifts.check_integrable_lift(lifts.build_lift(_chart(name), kind), tol=1e-10).passed


@pytest.mark.parametrize("kind", KINDS)
def test_lift_of_curved_base_is_not_integrable(kind):
    assert not lifts.check_integrable_lift(lifts.build_lift(charts.sphere_trivial(), kind)).passed


@pytest.mark.parametrize("name", ["E1", "E2", "E3", "E4", "helix", "twisted"])
def test_intertwining(name):
    assert lifts.intertwine_check(_chart(name), tol=1e-12).passed


def test_morphism_fields():
    M = builtin.load_example("E4")
    x = [[0.7, 0.1]]
    G = evaluate(M.g, x)
    np.testing.assert_allclose(evaluate(lifts.morphism_field(M, "psi").matrix, x),
                               lifts.psi_matrix(G), atol=1e-15)
    np.testing.assert_array_equal(evaluate(lifts.morphism_field(M, "phi").matrix, x)[0],
                                  np.eye(4))
    with pytest.raises(ValueError):
        lifts.morphism_field(M, "chi")
    with pytest.raises(ValueError):
        lifts.build_lift(M, "jet")


@pytest.mark.parametrize("kind", KINDS)
def test_lifted_chart_export_round_trip(kind):
    L = lifts.build_lift(builtin.load_example("E4"), kind)
    back = load_manifest(dump_manifest(L.chart))
    assert back.coords == L.chart.coords
    pts = L.sample(30).points
    np.testing.assert_allclose(evaluate(back.J, pts), evaluate(L.chart.J, pts), rtol=1e-15,
                               atol=1e-15)
    np.testing.assert_allclose(evaluate(back.g, pts), evaluate(L.chart.g, pts), rtol=1e-15,
                               atol=1e-15)
