"""Past null cone bundles.

A bundle is a fan of past-directed null geodesics from a vertex p, one per
node of a direction sphere grid, integrated at fixed affine step with RK4.
The affine parameter s is normalized by g(L, T_p) = 1 at the vertex.  All
transverse (angular) derivatives are spectral on the fixed-s spheres; the
optical scalars, null frames, area density and cone quadrature are derived
from them.  Derivatives transverse to the cone itself (mass aspect, frame
shift) use a twin-cone finite difference: the point q + h Lbar lies on the
cone emanating from p - 2h T_p at affine parameter s - h (exactly so in flat
space, to O(h^2) generally).

Array layout: per-node fields have shape (n_s + 1, n_theta, n_phi, ...) with
slice index 0 at the vertex.
"""

from __future__ import annotations

import numpy as np

from . import geometry
from .sphere import SphereGrid


class ConeError(RuntimeError):
    pass


class CausticError(ConeError):
    """The s-sphere area density degenerated along some ray."""


def _dot(g, u, v):
    return np.einsum("...mn,...m,...n->...", g, u, v)


class NullConeBundle:
    """Fan of past null geodesics from ``vertex`` with frames and scalars."""

    def __init__(self, chart, vertex, grid: SphereGrid, s_max, ds,
                 T_p=None, renorm_every=100, vertex_factor=10.0,
                 chunk=64):
        self.chart = chart
        self.grid = grid
        self.p = np.asarray(vertex, dtype=float)
        self.ds = float(ds)
        self.n_s = int(round(s_max / ds))
        self.s = self.ds * np.arange(self.n_s + 1)
        self.s_min = vertex_factor * self.ds
        self.renorm_every = int(renorm_every)
        self.chunk = int(chunk)
        self.renorm_max = 0.0

        g_p = chart.metric(self.p)
        if T_p is None:
            T_p = np.zeros(4)
            T_p[0] = (-g_p[0, 0]) ** -0.5
        self.T_p = np.asarray(T_p, dtype=float)
        tt = self.T_p @ g_p @ self.T_p
        if abs(tt + 1.0) > 1e-10:
            raise ConeError("vertex time axis must be unit timelike")

        self._cache = {}
        self._integrate()

    # ------------------------------------------------------------------
    # geodesic fan
    # ------------------------------------------------------------------

    def _initial_null_vectors(self):
        """l_omega = -T_p + omega^i E_i: past-directed, g(l, T_p) = 1."""
        frame = geometry.orthonormal_frame(self.chart, self.p,
                                           time_axis_hint=self.T_p)
        triad = frame.spatial                     # (3, 4)
        omega = self.grid.directions()            # (nth, nph, 3)
        return -self.T_p + np.einsum("tpi,im->tpm", omega, triad)

    def _geodesic_rhs(self, x, L):
        gamma = geometry.christoffel(self.chart, x)
        return L, -np.einsum("...mab,...a,...b->...m", gamma, L, L)

    def _renormalize(self, x, L):
        """Project L back onto the null cone of g along the local that axis."""
        g = self.chart.metric(x)
        that = np.zeros_like(L)
        that[..., 0] = (-g[..., 0, 0]) ** -0.5
        b = _dot(g, L, that)
        c = _dot(g, L, L)
        eps = b - np.sqrt(b * b + c)
        self.renorm_max = max(self.renorm_max, float(np.max(np.abs(eps))))
        return L + eps[..., None] * that

    def _integrate(self):
        nth, nph = self.grid.n_theta, self.grid.n_phi
        x = np.empty((self.n_s + 1, nth, nph, 4))
        L = np.empty_like(x)
        x[0] = np.broadcast_to(self.p, (nth, nph, 4))
        L[0] = self._initial_null_vectors()
        h = self.ds
        xc, Lc = x[0].copy(), L[0].copy()
        for i in range(1, self.n_s + 1):
            k1x, k1L = self._geodesic_rhs(xc, Lc)
            k2x, k2L = self._geodesic_rhs(xc + 0.5 * h * k1x, Lc + 0.5 * h * k1L)
            k3x, k3L = self._geodesic_rhs(xc + 0.5 * h * k2x, Lc + 0.5 * h * k2L)
            k4x, k4L = self._geodesic_rhs(xc + h * k3x, Lc + h * k3L)
            xc = xc + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
            Lc = Lc + (h / 6.0) * (k1L + 2 * k2L + 2 * k3L + k4L)
            if self.renorm_every and i % self.renorm_every == 0:
                Lc = self._renormalize(xc, Lc)
            x[i], L[i] = xc, Lc
        self.x, self.L = x, L

    # ------------------------------------------------------------------
    # pointwise frame fields
    # ------------------------------------------------------------------

    def _field(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    @property
    def metric_nodes(self):
        return self._field("g", lambda: self.chart.metric(self.x))

    @property
    def that(self):
        def build():
            g = self.metric_nodes
            t = np.zeros_like(self.x)
            t[..., 0] = (-g[..., 0, 0]) ** -0.5
            return t
        return self._field("that", build)

    @property
    def gLt(self):
        """g(L, that) > 0; equals 1/phi (inverse null lapse)."""
        return self._field(
            "gLt", lambda: _dot(self.metric_nodes, self.L, self.that))

    @property
    def phi(self):
        """Null lapse, 1 at the vertex."""
        return self._field("phi", lambda: 1.0 / self.gLt)

    @property
    def Lbar(self):
        def build():
            gLt = self.gLt[..., None]
            return -(2.0 * self.that + self.L / gLt) / gLt
        return self._field("Lbar", build)

    @property
    def dL_ds(self):
        def build():
            gamma = geometry.christoffel(self.chart, self.x)
            return -np.einsum("...mab,...a,...b->...m", gamma, self.L, self.L)
        return self._field("dLds", build)

    def _s_derivative(self, f):
        """Central finite difference along the ray parameter (axis 0)."""
        out = np.empty_like(f)
        out[1:-1] = (f[2:] - f[:-2]) / (2.0 * self.ds)
        out[0] = (f[1] - f[0]) / self.ds
        out[-1] = (f[-1] - f[-2]) / self.ds
        return out

    def _angular(self, f):
        """Spectral (d_theta, d_phi) of per-node data, new axis at the end.

        ``f`` has shape (n_s+1, nth, nph, ...); the sphere axes must be 1, 2.
        """
        moved = np.moveaxis(f, (1, 2), (-2, -1))
        dth = self.grid.dtheta(moved)
        dph = self.grid.dphi(moved)
        out = np.stack([np.moveaxis(dth, (-2, -1), (1, 2)),
                        np.moveaxis(dph, (-2, -1), (1, 2))], axis=-1)
        return out

    # ------------------------------------------------------------------
    # optical scalars
    # ------------------------------------------------------------------

    def optical(self):
        """Compute (and cache) optical scalars at every node.

        Returns a dict with keys: trchi, chihat2, zeta, trchibar, J, phi,
        mtilde, minv, cb, Ytilde.  Slices with s < s_min carry the flat-cone
        closure (trchi = 2/s, chihat = zeta = 0, J continued as s^2 times the
        limit shape).
        """
        if "optical" in self._cache:
            return self._cache["optical"]

        nth, nph = self.grid.n_theta, self.grid.n_phi
        n1 = self.n_s + 1
        shape = (n1, nth, nph)
        out = {
            "trchi": np.empty(shape), "chihat2": np.empty(shape),
            "trchibar": np.empty(shape), "J": np.empty(shape),
            "kscreen": np.empty(shape),
            "zeta": np.empty(shape + (2,)), "cb": np.empty(shape + (2,)),
            "mtilde": np.empty(shape + (2, 2)), "minv": np.empty(shape + (2, 2)),
            "Ytilde": np.empty(shape + (2, 4)),
            "chi_asym": 0.0,
        }
        # global angular derivatives of positions and L (chunk over s)
        dY = self._angular(self.x)         # (n1, nth, nph, 4, 2) = d_b x^mu
        dL = self._angular(self.L)
        dLbar_s = self._s_derivative(self.Lbar)
        dLbar_ang = self._angular(self.Lbar)
        dthat_s = self._s_derivative(self.that)
        dthat_ang = self._angular(self.that)
        g = self.metric_nodes
        Lbar = self.Lbar
        L = self.L
        dLs = self.dL_ds
        sin_th = self.grid.sin_theta[None, :, None]

        for i0 in range(0, n1, self.chunk):
            i1 = min(i0 + self.chunk, n1)
            sl = slice(i0, i1)
            gamma = geometry.christoffel(self.chart, self.x[sl])
            Y = dY[sl]                                    # (..., mu, b)
            cb = -0.5 * np.einsum("...mn,...mb,...n->...b", g[sl], Y, Lbar[sl])
            Yt = Y - cb[..., None, :] * L[sl][..., :, None]   # (..., mu, b)
            mt = np.einsum("...mn,...mb,...nc->...bc", g[sl], Yt, Yt)
            det = mt[..., 0, 0] * mt[..., 1, 1] - mt[..., 0, 1] * mt[..., 1, 0]
            # covariant angular derivative of L along Ytilde_b
            dLtil = dL[sl] - cb[..., None, :] * dLs[sl][..., :, None]
            nabL = dLtil + np.einsum("...mab,...ac,...b->...mc",
                                     gamma, Yt, L[sl])
            chi = np.einsum("...mn,...mb,...nc->...bc", g[sl], nabL, Yt)
            asym = np.abs(chi - np.swapaxes(chi, -1, -2))
            live_chunk = self.s[sl] >= self.s_min
            if np.any(live_chunk):
                out["chi_asym"] = max(out["chi_asym"],
                                      float(np.max(asym[live_chunk])))
            chi = 0.5 * (chi + np.swapaxes(chi, -1, -2))
            minv = np.empty_like(mt)
            minv[..., 0, 0] = mt[..., 1, 1]
            minv[..., 1, 1] = mt[..., 0, 0]
            minv[..., 0, 1] = -mt[..., 0, 1]
            minv[..., 1, 0] = -mt[..., 1, 0]
            with np.errstate(divide="ignore", invalid="ignore"):
                minv = minv / det[..., None, None]
                trchi = np.einsum("...bc,...bc->...", minv, chi)
                chi2 = np.einsum("...bc,...de,...bd,...ce->...",
                                 chi, chi, minv, minv)
                zeta = 0.5 * np.einsum("...mn,...mb,...n->...b",
                                       g[sl], nabL, Lbar[sl])
                # trace of the Lbar second fundamental form on the screen
                dLbt = dLbar_ang[sl] - cb[..., None, :] * dLbar_s[sl][..., :, None]
                nabLb = dLbt + np.einsum("...mab,...ac,...b->...mc",
                                         gamma, Yt, Lbar[sl])
                chib = np.einsum("...mn,...mb,...nc->...bc", g[sl], nabLb, Yt)
                trchibar = np.einsum("...bc,...bc->...", minv, chib)
                # screen trace of the t-slice extrinsic curvature
                dtt = dthat_ang[sl] - cb[..., None, :] * dthat_s[sl][..., :, None]
                nabt = dtt + np.einsum("...mab,...ac,...b->...mc",
                                       gamma, Yt, self.that[sl])
                kt = np.einsum("...mn,...mb,...nc->...bc", g[sl], nabt, Yt)
                out["kscreen"][sl] = np.einsum("...bc,...bc->...", minv, kt)
            out["trchi"][sl] = trchi
            out["chihat2"][sl] = chi2 - 0.5 * trchi ** 2
            out["zeta"][sl] = zeta
            out["trchibar"][sl] = trchibar
            out["J"][sl] = np.sqrt(np.maximum(det, 0.0)) / sin_th
            out["mtilde"][sl] = mt
            out["minv"][sl] = minv
            out["cb"][sl] = cb
            out["Ytilde"][sl] = np.swapaxes(Yt, -1, -2)     # (..., b, mu)

        # vertex closure for s < s_min
        near = self.s < self.s_min
        with np.errstate(divide="ignore"):
            flat = 2.0 / self.s
        out["trchi"][near] = flat[near, None, None]
        out["chihat2"][near] = 0.0
        out["zeta"][near] = 0.0
        # J ~ s^2 continuation using the shape at the first live slice
        ilive = int(np.searchsorted(self.s, self.s_min))
        ilive = min(ilive, self.n_s)
        Jshape = out["J"][ilive] / self.s[ilive] ** 2
        out["J"][near] = self.s[near, None, None] ** 2 * Jshape[None]
        with np.errstate(divide="ignore"):
            out["trchibar"][near] = np.broadcast_to(
                (-2.0 / self.s)[near, None, None], out["trchibar"][near].shape)
        out["minv"][0] = 0.0
        out["kscreen"][0] = out["kscreen"][1]
        live = ~near
        if np.any(out["J"][live] <= 0.0):
            bad = np.argwhere(out["J"] <= 0.0)
            bad = bad[bad[:, 0] >= ilive]
            if bad.size:
                i, t, p_ = bad[0]
                raise CausticError(
                    f"area density vanished at s={self.s[i]:.4g}, "
                    f"node ({t},{p_})")
        self._cache["optical"] = out
        return out

    # ------------------------------------------------------------------
    # null frames on the screen
    # ------------------------------------------------------------------

    def null_frames(self):
        """Screen-orthonormal pair e_1, e_2 per node, shape (..., 2, 4).

        Built from the sphere-tangent vectors, projected exactly off L and
        Lbar, then Gram-Schmidt with g.  Cached.
        """
        def build():
            opt = self.optical()
            g = self.metric_nodes
            L, Lbar = self.L, self.Lbar
            e = np.moveaxis(opt["Ytilde"].copy(), -2, 0)    # (2, ..., mu)
            out = []
            for a in range(2):
                v = e[a]
                v = v + 0.5 * _dot(g, v, Lbar)[..., None] * L \
                      + 0.5 * _dot(g, v, L)[..., None] * Lbar
                for w in out:
                    v = v - _dot(g, v, w)[..., None] * w
                n2 = _dot(g, v, v)
                with np.errstate(divide="ignore", invalid="ignore"):
                    v = v / np.sqrt(n2)[..., None]
                v[0] = 0.0          # the screen degenerates at the vertex
                out.append(v)
            return np.stack(out, axis=-2)
        return self._field("frames", build)

    def frame_pairing_residuals(self):
        """Max deviation of every null-frame inner product from its target.

        Checks g(L,L) = 0, g(Lbar,Lbar) = 0, g(L,Lbar) = -2, g(L,e_a) = 0,
        g(Lbar,e_a) = 0 and g(e_a,e_b) = delta_ab at every node past the
        vertex slice.  Returns a dict of per-pairing maxima.
        """
        g = self.metric_nodes
        L, Lbar = self.L, self.Lbar
        e = self.null_frames()
        sl = slice(1, None)                     # the screen is 0 at the vertex
        out = {
            "LL": np.max(np.abs(_dot(g, L, L))),
            "LbarLbar": np.max(np.abs(_dot(g, Lbar, Lbar)[sl])),
            "LLbar": np.max(np.abs(_dot(g, L, Lbar)[sl] + 2.0)),
        }
        for a in range(2):
            ea = e[..., a, :]
            out[f"Le{a + 1}"] = np.max(np.abs(_dot(g, L, ea)[sl]))
            out[f"Lbare{a + 1}"] = np.max(np.abs(_dot(g, Lbar, ea)[sl]))
            for b in range(a, 2):
                eb = e[..., b, :]
                target = 1.0 if a == b else 0.0
                out[f"e{a + 1}e{b + 1}"] = np.max(
                    np.abs(_dot(g, ea, eb)[sl] - target))
        return {k: float(v) for k, v in out.items()}

    # ------------------------------------------------------------------
    # quadrature
    # ------------------------------------------------------------------

    def area(self):
        """Sphere areas |S_s| for every s node."""
        J = self.optical()["J"]
        return np.einsum("stp,tp->s", J, self.grid.weights)

    def shell_integral(self, f, i):
        """Integral of f over the s-sphere with index i (induced measure)."""
        J = self.optical()["J"]
        return np.einsum("tp,tp->", np.asarray(f) * J[i], self.grid.weights)

    def cone_integral(self, f, s_lo=0.0, s_hi=None):
        """ds x dA cone integral of per-node scalar data ``f``.

        Trapezoid in s over [s_lo, s_hi], spectral product quadrature in the
        directions.  NaN in the integrand propagates with node identification.
        """
        f = np.asarray(f, dtype=float)
        if np.any(np.isnan(f)):
            idx = np.argwhere(np.isnan(f))[0]
            raise ConeError(f"NaN integrand at node (s_index, theta, phi) = "
                            f"{tuple(int(v) for v in idx)}")
        J = self.optical()["J"]
        shells = np.einsum("stp,tp->s", f * J, self.grid.weights)
        if s_hi is None:
            s_hi = self.s[-1]
        w = np.full(self.n_s + 1, self.ds)
        w[0] = w[-1] = 0.5 * self.ds
        inside = (self.s >= s_lo - 1e-12) & (self.s <= s_hi + 1e-12)
        wi = np.where(inside, w, 0.0)
        # endpoint halving at the range boundary
        edges = np.flatnonzero(inside)
        if edges.size:
            wi[edges[0]] = 0.5 * self.ds
            wi[edges[-1]] = 0.5 * self.ds
        return float(np.dot(wi, shells))

    def transport_consistency(self):
        """Residual of dJ/ds = trchi J, skipping the vertex closure region.

        The area density here comes from the induced-metric determinant, so
        this checks it against the independent optical expansion route.
        """
        opt = self.optical()
        J, trchi = opt["J"], opt["trchi"]
        dJ = self._s_derivative(J)
        live = self.s >= self.s_min
        live[0] = False
        live[-1] = False  # one-sided endpoint difference is less accurate
        r = dJ[live] - trchi[live] * J[live]
        scale = np.max(np.abs(trchi[live] * J[live]))
        return float(np.max(np.abs(r)) / scale)

    # ------------------------------------------------------------------
    # crossing a constant-t slice
    # ------------------------------------------------------------------

    def crossing(self, t_value):
        """Per-ray interpolation data where coordinate time crosses t_value.

        Returns a ``Crossing`` with fractional indices; ``interpolate`` maps
        any per-node array to the crossing ring (cubic in s).
        """
        t = self.x[..., 0]                         # (n_s+1, nth, nph)
        below = t <= t_value
        if not np.all(np.any(below, axis=0)):
            raise ConeError("some rays never reach the requested slice")
        idx = np.argmax(below, axis=0)             # first index past the slice
        idx = np.clip(idx, 1, self.n_s)
        i0 = idx - 1
        t0 = np.take_along_axis(t, i0[None], axis=0)[0]
        t1 = np.take_along_axis(t, idx[None], axis=0)[0]
        frac = (t_value - t0) / (t1 - t0)
        return Crossing(self, i0, np.clip(frac, 0.0, 1.0))

    # ------------------------------------------------------------------
    # transverse (off-cone) derivatives via twin cones
    # ------------------------------------------------------------------

    def _twin(self, delta):
        key = ("twin", round(delta / self.ds))
        if key not in self._cache:
            vertex, velocity = _timelike_geodesic_shoot(
                self.chart, self.p, self.T_p, delta)
            self._cache[key] = NullConeBundle(
                self.chart, vertex, self.grid, s_max=self.s[-1] + abs(delta),
                ds=self.ds, T_p=velocity, renorm_every=self.renorm_every,
                vertex_factor=self.s_min / self.ds, chunk=self.chunk)
        return self._cache[key]

    def lbar_derivative(self, extract, h=None):
        """Centered transverse derivative along Lbar of a per-cone field.

        ``extract(bundle) -> per-node array``; the twin cones from
        p -+ 2h T_p are sampled at s +- h (cubic interpolation in s).
        """
        if h is None:
            h = 8.0 * self.ds
        n_shift = max(1, int(round(h / self.ds)))
        h = n_shift * self.ds
        minus = self._twin(-2.0 * h)     # vertex p - 2h T: holds f(q + h Lbar)
        plus = self._twin(+2.0 * h)
        f_m = np.asarray(extract(minus), dtype=float)
        f_p = np.asarray(extract(plus), dtype=float)
        n1 = self.n_s + 1
        # on the minus twin the matching affine parameter is s - h
        fm = _shift_slices(f_m, -n_shift, n1)
        fp = _shift_slices(f_p, +n_shift, n1)
        return (fm - fp) / (2.0 * h)

    def mass_aspect(self, h=None):
        """Mass aspect mu and frame shift omega per node.

        mu = nabla_Lbar trchi + trchi trchibar / 2 + 2 omega trchi;
        omega = -g(nabla_Lbar Lbar, L) / 4.  Twin-cone finite differences for
        the Lbar-direction derivatives; below s_min the flat closure gives
        mu = omega = 0.
        """
        key = ("mass_aspect", None if h is None else float(h))
        if key in self._cache:
            return self._cache[key]
        opt = self.optical()

        def smooth_expansion(b):
            # difference only the regular part of trchi; the universal 2/s
            # vertex singularity would wreck the finite difference near s=0
            with np.errstate(divide="ignore", invalid="ignore"):
                q = b.optical()["trchi"] - 2.0 / b.s[:, None, None]
            q[0] = 0.0
            return q

        with np.errstate(divide="ignore"):
            d_trchi = (2.0 / self.s ** 2)[:, None, None] \
                + self.lbar_derivative(smooth_expansion, h=h)
        dLbar = self.lbar_derivative(lambda b: b.Lbar, h=h)
        gamma_corr = np.einsum("...mab,...a,...b->...m",
                               geometry.christoffel(self.chart, self.x),
                               self.Lbar, self.Lbar) if not self.chart.flat \
            else 0.0
        nab_Lbar = dLbar + gamma_corr
        omega = -0.25 * _dot(self.metric_nodes, nab_Lbar, self.L)
        with np.errstate(invalid="ignore"):
            mu = d_trchi + 0.5 * opt["trchi"] * opt["trchibar"] \
                + 2.0 * omega * opt["trchi"]
        near = self.s < self.s_min
        mu[near] = 0.0
        omega[near] = 0.0
        self._cache[key] = (mu, omega)
        return mu, omega


def _timelike_geodesic_shoot(chart, p, v0, tau, n_steps=32):
    """Proper-time geodesic from (p, v0); returns position and velocity.

    The transverse-derivative construction needs vertices displaced along
    the timelike geodesic through p, not along the coordinate time axis: a
    non-geodesic vertex family would bias the centered difference at first
    order through its velocity error.
    """
    if chart.flat:
        return p + tau * v0, v0
    x, v = p.astype(float).copy(), np.asarray(v0, float).copy()
    h = tau / n_steps

    def rhs(x, v):
        gamma = geometry.christoffel(chart, x)
        return v, -np.einsum("mab,a,b->m", gamma, v, v)

    for _ in range(n_steps):
        k1x, k1v = rhs(x, v)
        k2x, k2v = rhs(x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v = rhs(x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v = rhs(x + h * k3x, v + h * k3v)
        x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
    return x, v


def _shift_slices(f, shift, n_out):
    """Cubic interpolation of ray data at slice index + shift (integer)."""
    idx = np.arange(n_out) + shift
    idx = np.clip(idx, 0, f.shape[0] - 1)
    return f[idx]


class Crossing:
    """Interpolation helper for the ring where the cone meets a t-slice."""

    def __init__(self, bundle, i0, frac):
        self.bundle = bundle
        self.i0 = i0
        self.frac = frac

    @property
    def s_star(self):
        return (self.i0 + self.frac) * self.bundle.ds

    def interpolate(self, f, order=3):
        """Interpolate per-node data (n_s+1, nth, nph, ...) to the ring."""
        f = np.asarray(f)
        i0, frac = self.i0, self.frac
        n = f.shape[0]
        extra = f.ndim - 3
        fr = frac.reshape(frac.shape + (1,) * extra)

        def take(k):
            idx = np.clip(i0 + k, 0, n - 1)
            return np.take_along_axis(
                f, idx.reshape(idx.shape + (1,) * extra)[None], axis=0)[0]

        if order == 1:
            return (1 - fr) * take(0) + fr * take(1)
        # cubic Lagrange on slices i0-1 .. i0+2 in the local variable fr
        fm1, f0, f1, f2 = take(-1), take(0), take(1), take(2)
        t = fr
        return (-t * (t - 1) * (t - 2) / 6.0 * fm1
                + (t * t - 1) * (t - 2) / 2.0 * f0
                - t * (t + 1) * (t - 2) / 2.0 * f1
                + t * (t * t - 1) / 6.0 * f2)

    def ring_integral(self, f_ring):
        """Integral over the ring with measure phi dA (slice-induced area)."""
        b = self.bundle
        J = self.interpolate(b.optical()["J"])
        phi = self.interpolate(b.phi)
        return float(np.einsum("tp,tp->", np.asarray(f_ring) * J * phi,
                               b.grid.weights))
