"""Stress tensor algebra, fluxes, slice quadrature, divergence identity."""

import numpy as np
import pytest

from ymcone import energy, geometry, liegauge, runner


@pytest.fixture(scope="module")
def u1():
    return liegauge.u1()


def _wave(u1):
    return runner.plane_wave_field(u1, omega=1.0, direction=(1.0, 1.0, 0.0))


def test_stress_tensor_symmetric_traceless(flat_chart, u1):
    F = _wave(u1)
    pts = np.random.default_rng(0).standard_normal((6, 4))
    T = energy.stress_tensor(flat_chart, pts, F)
    assert np.max(np.abs(T - np.swapaxes(T, -1, -2))) < 1e-12
    ginv = geometry.inverse_metric(flat_chart, pts)
    tr = np.einsum("...mn,...mn->...", ginv, T)
    assert np.max(np.abs(tr)) < 1e-10


def test_stress_tensor_traceless_curved(schw_chart, u1):
    F = runner.coulomb_field(u1)
    pts = np.array([[0.0, 9.0, 1.2, 0.3], [0.5, 11.0, 0.9, 1.0]])
    T = energy.stress_tensor(schw_chart, pts, F)
    ginv = geometry.inverse_metric(schw_chart, pts)
    tr = np.einsum("...mn,...mn->...", ginv, T)
    assert np.max(np.abs(tr)) < 1e-12


def test_energy_density_nonnegative(flat_chart, u1):
    F = _wave(u1)
    pts = np.random.default_rng(1).standard_normal((20, 4))
    dens = energy.frame_energy_density(flat_chart, pts, F)
    assert np.all(dens >= -1e-14)


def test_flux_frame_form_matches_direct(schw_bundle, u1):
    from ymcone import parametrix
    F = runner.coulomb_field(u1)
    F_nodes = parametrix.sample_field(schw_bundle, F, (4, 4, 1))
    d1 = energy.flux_density_frame(schw_bundle, F_nodes)
    d2 = energy.flux_density_direct(schw_bundle, F_nodes)
    scale = np.max(np.abs(d2)) + 1e-300
    assert np.max(np.abs(d1[1:] - d2[1:])) / scale < 1e-10


def test_slice_quadrature_ball_volume(flat_bundle):
    # the crossing region of the flat cone with t = -a is a ball of radius a
    cr = flat_bundle.crossing(-0.8)
    pts, w = energy.slice_region_quadrature(cr, n_radial=20)
    vol = float(np.sum(w))
    assert abs(vol - 4.0 * np.pi * 0.8 ** 3 / 3.0) < 1e-8
    # all quadrature points sit on the slice
    assert np.max(np.abs(pts[..., 0] + 0.8)) < 1e-10


def test_bulk_term_zero_flat(flat_bundle, u1):
    F = _wave(u1)
    val = energy.bulk_term(flat_bundle.chart, F, flat_bundle, -0.8, -0.4,
                           n_time=4, n_radial=8)
    assert abs(val) < 1e-12


def test_divergence_identity_flat(flat_bundle, u1):
    F = _wave(u1)
    rep = energy.divergence_identity_report(flat_bundle.chart, F,
                                            flat_bundle, -0.9, -0.45)
    assert rep["bulk"] == 0.0
    assert rep["relative_residual"] < 1e-3


def test_divergence_identity_schwarzschild(schw_bundle, u1):
    F = runner.coulomb_field(u1)
    rep = energy.divergence_identity_report(schw_bundle.chart, F,
                                            schw_bundle, -0.45, -0.2)
    # static chart, static field: the bulk term vanishes (Killing time)
    assert rep["relative_residual"] < 1e-2


def test_deformation_bound_zero_for_killing_time(schw_bundle):
    cr = schw_bundle.crossing(-0.3)
    val = energy.deformation_bound(schw_bundle.chart, cr, n_radial=6)
    assert abs(val) < 1e-7


def test_gradient_energy_density_nonnegative(flat_chart, u1):
    F = _wave(u1)
    A = liegauge.zero_potential(u1)
    pts = np.random.default_rng(2).standard_normal((10, 4))
    dens = energy.gradient_energy_density(flat_chart, pts, F, A)
    assert np.all(dens >= -1e-12)
