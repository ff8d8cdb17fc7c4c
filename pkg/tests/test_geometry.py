"""Geometry oracles: symbolic Christoffel/Riemann, closed forms, frames."""

import numpy as np
import pytest
import sympy as sp

from ymcone import geometry

POINT = np.array([0.3, 7.3, 1.1, 0.4])


def _sympy_schwarzschild():
    """Symbolic Christoffel and Riemann (fully lowered) for M = 1."""
    t, r, th, ph = sp.symbols("t r theta phi", positive=True)
    coords = (t, r, th, ph)
    f = 1 - 2 / r
    g = sp.diag(-f, 1 / f, r ** 2, r ** 2 * sp.sin(th) ** 2)
    ginv = g.inv()
    gamma = [[[sum(ginv[a, d] * (sp.diff(g[d, m], coords[n])
                                 + sp.diff(g[d, n], coords[m])
                                 - sp.diff(g[m, n], coords[d])) / 2
                   for d in range(4))
               for n in range(4)] for m in range(4)] for a in range(4)]
    riem_up = [[[[sp.diff(gamma[a][n][s], coords[m])
                  - sp.diff(gamma[a][m][s], coords[n])
                  + sum(gamma[a][m][l] * gamma[l][n][s]
                        - gamma[a][n][l] * gamma[l][m][s] for l in range(4))
                  for n in range(4)] for m in range(4)]
                for s in range(4)] for a in range(4)]
    riem = [[[[sp.simplify(sum(g[a, c] * riem_up[c][s][m][n]
                               for c in range(4)))
               for n in range(4)] for m in range(4)]
             for s in range(4)] for a in range(4)]
    subs = dict(zip(coords, POINT))
    gamma_num = np.array(
        [[[float(sp.N(gamma[a][m][n].subs(subs))) for n in range(4)]
          for m in range(4)] for a in range(4)])
    riem_num = np.array(
        [[[[float(sp.N(riem[a][s][m][n].subs(subs))) for n in range(4)]
           for m in range(4)] for s in range(4)] for a in range(4)])
    return gamma_num, riem_num


@pytest.fixture(scope="module")
def schw_symbolic():
    return _sympy_schwarzschild()


def test_christoffel_matches_symbolic_oracle(schw_chart, schw_symbolic):
    gamma, _ = schw_symbolic
    got = geometry.christoffel(schw_chart, POINT)
    assert np.max(np.abs(got - gamma)) < 1e-9


def test_riemann_matches_symbolic_oracle(schw_chart, schw_symbolic):
    _, riem = schw_symbolic
    got = geometry.riemann(schw_chart, POINT).riemann
    assert np.max(np.abs(got - riem)) < 1e-7


def test_christoffel_t_tr_closed_form(schw_chart):
    # Gamma^t_{tr} = M / (r (r - 2M)) = 0.0125 at r = 10, M = 1
    x = np.array([0.0, 10.0, np.pi / 2, 0.0])
    gamma = geometry.christoffel(schw_chart, x)
    assert abs(gamma[0, 0, 1] - 0.0125) < 1e-10


def test_kretschmann_closed_form(schw_chart):
    # 48 M^2 / r^6 = 4.8e-5 at r = 10
    x = np.array([0.0, 10.0, np.pi / 2, 0.0])
    k = geometry.kretschmann(schw_chart, x)
    assert abs(k - 4.8e-5) < 1e-11


def test_schwarzschild_is_ricci_flat(schw_chart):
    ricci = geometry.riemann(schw_chart, POINT).ricci
    assert np.max(np.abs(ricci)) < 1e-8


def test_flat_chart_curvature_vanishes(flat_chart):
    x = np.array([1.0, 2.0, -3.0, 0.5])
    assert np.max(np.abs(geometry.christoffel(flat_chart, x))) == 0.0
    assert np.max(np.abs(geometry.riemann(flat_chart, x).riemann)) == 0.0


def test_flrw_ricci_nonzero_and_symmetric():
    chart = geometry.make_chart("flrw", power=0.5)
    x = np.array([2.0, 0.3, -0.1, 0.7])
    ricci = geometry.riemann(chart, x).ricci
    assert np.max(np.abs(ricci)) > 1e-3
    assert np.max(np.abs(ricci - ricci.T)) < 1e-8


def test_inverse_metric_identity(schw_chart):
    g = schw_chart.metric(POINT)
    ginv = geometry.inverse_metric(schw_chart, POINT)
    assert np.max(np.abs(g @ ginv - np.eye(4))) < 1e-12


@pytest.mark.parametrize("name,params,x", [
    ("minkowski", {}, [0.0, 1.0, -2.0, 0.3]),
    ("schwarzschild", {"mass": 1.0}, [0.0, 8.0, 1.2, 0.4]),
    ("schwarzschild-isotropic", {"mass": 1.0}, [0.0, 8.0, -1.0, 2.0]),
    ("flrw", {"power": 1.0}, [1.5, 0.2, 0.4, -0.3]),
])
def test_orthonormal_frame_gram(name, params, x):
    chart = geometry.make_chart(name, **params)
    x = np.asarray(x, dtype=float)
    frame = geometry.orthonormal_frame(chart, x)
    g = chart.metric(x)
    gram = np.einsum("am,bn,mn->ab", frame.vectors, frame.vectors, g)
    assert np.max(np.abs(gram - np.diag([-1.0, 1.0, 1.0, 1.0]))) < 1e-10


def test_static_time_is_killing_on_schwarzschild(schw_chart):
    pi = geometry.deformation_tensor(schw_chart, POINT,
                                     geometry.coordinate_time_field())
    assert np.max(np.abs(pi)) < 1e-8


def test_flrw_time_is_not_killing():
    chart = geometry.make_chart("flrw", power=1.0)
    x = np.array([2.0, 0.1, 0.2, 0.3])
    pi = geometry.deformation_tensor(chart, x,
                                     geometry.coordinate_time_field())
    assert np.max(np.abs(pi)) > 1e-3


def test_h_metric_positive_definite(schw_chart):
    frame = geometry.orthonormal_frame(schw_chart, POINT)
    h = geometry.h_metric(schw_chart, POINT, frame.that)
    eig = np.linalg.eigvalsh(h)
    assert np.all(eig > 0)


def test_unit_time_field_normalized(schw_chart):
    that = geometry.unit_time_field(schw_chart)(POINT)
    g = schw_chart.metric(POINT)
    assert abs(that @ g @ that + 1.0) < 1e-12


def test_unknown_chart_rejected():
    with pytest.raises(Exception):
        geometry.make_chart("not_a_chart")
