"""Lie algebra structure, gauge curvatures, residuals, Cartan frames."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ymcone import geometry, liegauge, runner

algebra_vectors = st.lists(
    st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=3,
    max_size=3).map(np.array)


def test_su2_structure_constants_antisymmetric():
    c = liegauge.su2().c
    assert np.max(np.abs(c + np.swapaxes(c, 0, 1))) == 0.0


def test_su2_jacobi_identity():
    su2 = liegauge.su2()
    rng = np.random.default_rng(0)
    x, y, z = rng.standard_normal((3, su2.dim))
    jac = (su2.bracket(x, su2.bracket(y, z))
           + su2.bracket(y, su2.bracket(z, x))
           + su2.bracket(z, su2.bracket(x, y)))
    assert np.max(np.abs(jac)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(algebra_vectors, algebra_vectors, algebra_vectors)
def test_su2_ad_invariance(x, y, z):
    su2 = liegauge.su2()
    lhs = su2.inner(su2.bracket(z, x), y) + su2.inner(x, su2.bracket(z, y))
    scale = 1.0 + np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z)
    assert abs(lhs) < 1e-10 * scale


def test_u1_brackets_vanish():
    u1 = liegauge.u1()
    assert np.max(np.abs(u1.c)) == 0.0
    assert abs(u1.bracket(np.array([2.0]), np.array([3.0]))[0]) == 0.0


def test_abelian_curl_curvature():
    # A_y = x e1 gives F_xy = 1 exactly
    u1 = liegauge.u1()

    def fn(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (4, 1))
        out[..., 2, 0] = x[..., 1]
        return out

    A = liegauge.GaugePotential(u1, fn, step=1e-3)
    F = liegauge.curvature_from_potential(A)
    val = F(np.array([0.2, 1.5, -0.4, 0.9]))
    expected = np.zeros((4, 4, 1))
    expected[1, 2, 0], expected[2, 1, 0] = 1.0, -1.0
    assert np.max(np.abs(val - expected)) < 1e-9


def test_nonabelian_constant_potential_curvature():
    # constant A: F_mn = [A_m, A_n] exactly
    su2 = liegauge.su2()
    a = np.zeros((4, su2.dim))
    a[1, 0], a[2, 1] = 0.7, -0.3

    A = liegauge.GaugePotential(su2, lambda x: np.broadcast_to(
        a, np.asarray(x).shape[:-1] + (4, su2.dim)).copy(), step=1e-3)
    F = liegauge.curvature_from_potential(A)
    val = F(np.zeros(4))
    expected = np.einsum("ijk,mi,nj->mnk", su2.c, a, a)
    assert np.max(np.abs(val - expected)) < 1e-9


def test_plane_wave_solves_field_equations(flat_chart):
    u1 = liegauge.u1()
    F = runner.plane_wave_field(u1, omega=1.3, direction=(1.0, 2.0, 0.0))
    A = liegauge.zero_potential(u1)
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((10, 4))
    res = liegauge.ym_residual(flat_chart, pts, F, A)
    bia = liegauge.bianchi_residual(flat_chart, pts, F, A)
    assert np.max(np.abs(res)) < 1e-9
    assert np.max(np.abs(bia)) < 1e-9


def test_coulomb_solves_field_equations_on_schwarzschild(schw_chart):
    u1 = liegauge.u1()
    F = runner.coulomb_field(u1, charge=1.0)
    A = liegauge.zero_potential(u1)
    pts = np.array([[0.0, 9.0, 1.2, 0.3], [1.0, 11.0, 0.8, 2.0]])
    res = liegauge.ym_residual(schw_chart, pts, F, A)
    assert np.max(np.abs(res)) < 1e-9


def test_bianchi_refinement_order_is_four(flat_chart):
    su2 = liegauge.su2()
    A = runner.su2_bump_potential(su2, amplitude=0.3)
    F0 = liegauge.curvature_from_potential(A, step=1e-3)
    rng = np.random.default_rng(2)
    pts = 0.5 * rng.standard_normal((8, 4))
    errs = []
    for h in (0.2, 0.1, 0.05):
        F = liegauge.FieldStrength(su2, F0.fn, step=h)
        errs.append(np.max(np.abs(
            liegauge.bianchi_residual(flat_chart, pts, F, A))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 4.0) < 0.5)


def test_cartan_connection_vanishes_on_flat_chart(flat_chart):
    ff = liegauge.static_diagonal_frame(flat_chart)
    conn = liegauge.cartan_connection(flat_chart, ff)
    val = conn(np.array([0.0, 1.0, 2.0, 3.0]))
    assert np.max(np.abs(val)) < 1e-10


def test_cartan_curvature_matches_riemann(schw_chart):
    ff = liegauge.static_diagonal_frame(schw_chart)
    x = np.array([0.0, 9.0, 1.1, 0.2])
    step = 1e-3 * schw_chart.coordinate_scale
    curv = liegauge.cartan_curvature(schw_chart, ff, step=step)(x)
    riem = geometry.riemann(schw_chart, x).riemann
    e = ff(x)
    frame_riem = np.einsum("rsmn,ar,bs->mnab", riem, e, e)
    assert np.max(np.abs(curv - frame_riem)) < 1e-7


def test_wave_source_vanishes_flat_abelian(flat_chart):
    u1 = liegauge.u1()
    F = runner.plane_wave_field(u1)
    src = liegauge.wave_source(flat_chart, np.zeros((3, 4)), F)
    assert np.max(np.abs(src)) < 1e-12
