"""Coherent pulse families and their classical field envelopes.

A pulse is labeled by a propagation direction m_hat, a transverse vector
n_hat (polarization reference, perpendicular to m_hat), a nominal position
r0, and for the Gaussian-lineshape kind a central wavenumber k0.  Its
momentum-space kernel is

    K = N * radial(k) * upsilon(k_hat . m_hat) * (e*_{k,lambda} . (k x n_hat))

where radial(k) is either exp(-|k - k0 m_hat|^2 / 2 sigma^2) (Gaussian kind,
with upsilon absent) or 1/(k sqrt(e^{beta hbar c k} - 1)) with an explicit
directional profile upsilon (thermal kind).  Since k x n_hat is already
transverse, summing over helicities just reproduces it, and the envelope is

    E(r,t) = i N alpha int d3k sqrt(hbar c k / 16 pi^3 eps0)
             (k x n_hat) radial upsilon e^{i k.(r-r0) - i c k t}.

In the canonical frame (m_hat = z', n_hat = x') the azimuthal integral is
analytic and leaves two scalar transforms

    T_y(P,Z) = int dx dmu w(x,mu) mu            J0(x P st) e^{i x Z mu}
    T_z(P,Z) = int dx dmu w(x,mu) sqrt(1-mu^2)  J1(x P st) e^{i x Z mu}

with (P, Phi, Z) cylindrical coordinates of (r-r0)/(beta hbar c), giving

    E = pref * 2 pi * [ T_y * (m_hat x n_hat) - i sin(Phi) T_z * m_hat ].

Envelope evaluation is needed at millions of points by the Monte Carlo
estimators, so T_y and T_z are precomputed on a (P, Z) grid: substituting
a = x st, b = x mu turns the mu-oscillation into a plain Fourier transform
over b (done by FFT) and the P-dependence into Hankel transforms over a
(done by dense Bessel matrices).  The table builder was validated against
direct 2D Gauss-Legendre quadrature and against an importance-sampled 3D
Monte Carlo evaluation of the unreduced integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special
from scipy.interpolate import RegularGridInterpolator

from .specfun import ZETA3, PI4_OVER_15
from .units import PhysicalContext

_SIXTEEN_PI3 = 16.0 * math.pi**3


def upsilon_function(kind: str, param: float) -> Callable[[np.ndarray], np.ndarray]:
    """Directional profiles peaked at mu = 1.

    'exp'   : exp(kappa (mu - 1))
    'power' : ((1 + mu)/2)^q
    """
    if kind == "exp":
        if param <= 0:
            raise ValueError("kappa must be positive")
        return lambda mu: np.exp(param * (np.asarray(mu) - 1.0))
    if kind == "power":
        if param <= 0:
            raise ValueError("q must be positive")
        return lambda mu: ((1.0 + np.asarray(mu)) / 2.0) ** param
    raise ValueError(f"unknown upsilon kind {kind!r}")


def _orthonormal_transverse(m_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic right-handed pair (e1, e2) perpendicular to m_hat."""
    ref = np.array([0.0, 0.0, 1.0])
    if abs(m_hat[2]) > 0.9:
        ref = np.array([1.0, 0.0, 0.0])
    e1 = np.cross(ref, m_hat)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(m_hat, e1)
    return e1, e2


@dataclass(frozen=True)
class PulseParams:
    """Labels of one pulse: orientation frame, nominal position, optional k0."""

    m_hat: np.ndarray
    n_hat: np.ndarray
    psi: float
    r0: np.ndarray
    k0: float | None = None

    def __post_init__(self):
        m = np.asarray(self.m_hat, float)
        n = np.asarray(self.n_hat, float)
        if abs(np.linalg.norm(m) - 1.0) > 1e-12 or abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("m_hat and n_hat must be unit vectors")
        if abs(float(np.dot(m, n))) > 1e-12:
            raise ValueError("n_hat must be perpendicular to m_hat")


def make_pulse_params(m_hat, psi: float, r0, k0: float | None = None) -> PulseParams:
    """Construct PulseParams with n_hat at angle psi in the plane normal to m_hat."""
    m = np.asarray(m_hat, float)
    m = m / np.linalg.norm(m)
    e1, e2 = _orthonormal_transverse(m)
    n = math.cos(psi) * e1 + math.sin(psi) * e2
    return PulseParams(m_hat=m, n_hat=n, psi=float(psi),
                       r0=np.asarray(r0, float), k0=k0)


@dataclass(frozen=True)
class FieldEnvelope:
    """Complex field vector [V/m] of one pulse at a query point."""

    value: np.ndarray


@dataclass(frozen=True)
class EnvelopeTable:
    """Interpolation table of the canonical-frame transforms T_y, T_z."""

    P_grid: np.ndarray
    Z_grid: np.ndarray
    Ty: np.ndarray
    Tz: np.ndarray
    u_delay: float
    interp_y: RegularGridInterpolator = field(repr=False, compare=False, default=None)
    interp_z: RegularGridInterpolator = field(repr=False, compare=False, default=None)

    @property
    def support_radius(self) -> float:
        """Largest |Delta| (dimensionless) the table can evaluate."""
        return min(float(self.P_grid[-1]), float(self.Z_grid[-1]),
                   float(-self.Z_grid[0]))

    def lookup(self, P: np.ndarray, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """T_y, T_z at arrays of cylindrical coordinates; zero outside range."""
        P = np.asarray(P, float)
        Z = np.asarray(Z, float)
        ok = (P <= self.P_grid[-1]) & (Z >= self.Z_grid[0]) & (Z <= self.Z_grid[-1])
        ty = np.zeros(P.shape, complex)
        tz = np.zeros(P.shape, complex)
        if np.any(ok):
            pts = np.stack([P[ok], Z[ok]], axis=-1)
            ty[ok] = self.interp_y(pts)
            tz[ok] = self.interp_z(pts)
        return ty, tz


@dataclass(frozen=True)
class PulseFamily:
    """A normalized family of coherent pulses sharing one spectral shape.

    kind 'thermal': radial lineshape 1/(k sqrt(e^x - 1)) with directional
    profile upsilon; norm_N is a single number.  kind 'gaussian': lineshape
    exp(-|k - k0 m_hat|^2/2 sigma^2); the normalization depends on k0 and is
    exposed through norm_N(k0).
    """

    kind: str
    ctx: PhysicalContext
    alpha: complex
    sigma: float | None = None              # 1/m, gaussian kind
    upsilon_kind: str | None = None         # thermal kind
    upsilon_param: float | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- spectral weights (dimensionless) ------------------------------

    def upsilon(self, mu):
        return upsilon_function(self.upsilon_kind, self.upsilon_param)(mu)

    def sigma_x(self) -> float:
        """sigma in dimensionless units."""
        return self.sigma * self.ctx.length_scale

    def angular_second_moment(self) -> float:
        """J = int_{-1}^{1} upsilon(mu)^2 (1 + mu^2) dmu (thermal kind)."""
        ups = upsilon_function(self.upsilon_kind, self.upsilon_param)
        val, err = integrate.quad(lambda mu: ups(mu) ** 2 * (1.0 + mu * mu),
                                  -1.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
        return val

    def norm_N(self, k0: float | None = None) -> float:
        """Normalization constant N (SI, m^{3/2}) making sum_lambda int |K|^2 = 1."""
        bhc = self.ctx.length_scale
        if self.kind == "thermal":
            J = self.angular_second_moment()
            return math.sqrt(bhc**3 / (2.0 * ZETA3 * math.pi * J))
        if self.kind == "gaussian":
            if k0 is None:
                raise ValueError("gaussian kind needs k0")
            x0 = k0 * bhc
            s = self.sigma_x()
            xg, wg = _log_radial_grid(x0, s)
            phi = gaussian_angular_kernel(xg, np.array([x0]), s)[:, 0]
            denom = math.pi * float(np.sum(wg * xg**4 * phi))
            # the gaussian amplitude carries an extra factor k, so the
            # squared-norm integral scales as (beta hbar c)^{-5}
            return math.sqrt(bhc**5 / denom)
        raise ValueError(f"unknown family kind {self.kind!r}")

    def envelope_prefactor(self, k0: float | None = None) -> complex:
        """i N alpha sqrt(hbar c / 16 pi^3 eps0) (beta hbar c)^p, SI V/m.

        p is -3.5 for the thermal weight x^{5/2}/sqrt(e^x-1) and -4.5 for
        the gaussian weight x^{7/2} L(x), matching the dimensionless tables.
        """
        ctx = self.ctx
        base = 1j * self.alpha * math.sqrt(ctx.hbar * ctx.c / (_SIXTEEN_PI3 * ctx.epsilon0))
        if self.kind == "thermal":
            return base * self.norm_N() * ctx.length_scale ** (-3.5)
        return base * self.norm_N(k0) * ctx.length_scale ** (-4.5)

    # -- envelope tables ------------------------------------------------

    def table(self, u_delay: float = 0.0, reach: float = 16.0,
              k0: float | None = None) -> EnvelopeTable:
        key = (round(u_delay, 12), round(reach, 6), k0)
        if key not in self._cache:
            self._cache[key] = _build_table(self, u_delay, reach, k0)
        return self._cache[key]


def make_thermal_family(ctx: PhysicalContext, upsilon_kind: str = "exp",
                        upsilon_param: float = 20.0,
                        alpha: complex = 1.0 + 0.0j) -> PulseFamily:
    """Family with the occupation-matched radial lineshape.

    The radial normalization integrand reduces to x^2/(e^x - 1), whose
    integral is 2 zeta(3); the angular factor is pi * J with
    J = int upsilon^2 (1 + mu^2) dmu.
    """
    upsilon_function(upsilon_kind, upsilon_param)  # validate early
    return PulseFamily(kind="thermal", ctx=ctx, alpha=complex(alpha),
                       upsilon_kind=upsilon_kind, upsilon_param=float(upsilon_param))


def make_gaussian_family(ctx: PhysicalContext, sigma: float,
                         alpha: complex = 1.0 + 0.0j) -> PulseFamily:
    """Family of Gaussian-lineshape pulses with width sigma [1/m]."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return PulseFamily(kind="gaussian", ctx=ctx, alpha=complex(alpha),
                       sigma=float(sigma))


# ---------------------------------------------------------------------------
# spectral helpers


def thermal_radial_weight(x: np.ndarray) -> np.ndarray:
    """x^{5/2} / sqrt(e^x - 1), finite (zero) at x = 0."""
    x = np.asarray(x, float)
    out = np.zeros_like(x)
    pos = x > 1e-12
    out[pos] = x[pos] ** 2.5 / np.sqrt(np.expm1(x[pos]))
    return out


def gaussian_angular_kernel(x: np.ndarray, x0: np.ndarray, s: float) -> np.ndarray:
    """Phi[x, x0] = int_{-1}^{1} (1+mu^2) exp(-(x^2+x0^2-2 x x0 mu)/s^2) dmu.

    Evaluated in factored form exp(-(x-x0)^2/s^2) * e^{-a} * raw(a) with
    a = 2 x x0 / s^2, which stays finite for arbitrarily small s.
    """
    X, X0 = np.meshgrid(np.asarray(x, float), np.asarray(x0, float), indexing="ij")
    a = 2.0 * X * X0 / (s * s)
    out = np.empty_like(a)
    big = a >= 0.5
    ab = a[big]
    sh = 1.0 - np.exp(-2.0 * ab)
    ch = 1.0 + np.exp(-2.0 * ab)
    out[big] = sh / ab + ((ab * ab + 2.0) * sh - 2.0 * ab * ch) / ab**3
    if np.any(~big):
        xg, wg = leggauss(48)
        asm = a[~big]
        out[~big] = np.exp(-asm) * np.array(
            [np.sum(wg * (1.0 + xg**2) * np.exp(av * xg)) for av in asm])
    return np.exp(-(X - X0) ** 2 / (s * s)) * out


def _log_radial_grid(x0: float, s: float, n: int = 600) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights covering the gaussian radial support."""
    lo = max(0.0, x0 - 10.0 * s)
    hi = x0 + 10.0 * s
    xg, wg = leggauss(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * xg, half * wg


# ---------------------------------------------------------------------------
# table construction


def _table_weight_ab(family: PulseFamily, A: np.ndarray, B: np.ndarray,
                     k0: float | None) -> np.ndarray:
    """Scalar weight h(a,b) (without the mu / st vector factors)."""
    X = np.hypot(A, B)
    jac = np.divide(A, X * X, out=np.zeros_like(A), where=X > 0)
    if family.kind == "thermal":
        MU = np.divide(B, X, out=np.zeros_like(B), where=X > 0)
        return thermal_radial_weight(X) * family.upsilon(MU) * jac
    x0 = k0 * family.ctx.length_scale
    s = family.sigma_x()
    return X**3.5 * np.exp(-(A * A + (B - x0) ** 2) / (2.0 * s * s)) * jac


def _build_table(family: PulseFamily, u_delay: float, reach: float,
                 k0: float | None) -> EnvelopeTable:
    """FFT-Hankel construction of T_y, T_z on a (P, Z) grid.

    reach sets the largest |Delta| that must be representable; accuracy was
    tuned to a few-times-1e-5 of the peak against direct quadrature.
    """
    da = db = 0.025
    amax = 40.0
    bmin, bmax = -8.0, 40.0
    if family.kind == "gaussian":
        x0 = k0 * family.ctx.length_scale
        s = family.sigma_x()
        da = db = min(0.025, s / 4.0)
        amax = min(amax, x0 + 10.0 * s)
        bmin, bmax = min(-4.0 * s, x0 - 10.0 * s), x0 + 10.0 * s

    a = np.arange(0.0, amax + da / 2, da)
    b = np.arange(bmin, bmax + db / 2, db)
    A, B = np.meshgrid(a, b, indexing="ij")
    W = _table_weight_ab(family, A, B, k0)
    if u_delay != 0.0:
        W = W * np.exp(-1j * np.hypot(A, B) * u_delay)
    X = np.hypot(A, B)
    MU = np.divide(B, X, out=np.zeros_like(B), where=X > 0)
    ST = np.divide(A, X, out=np.zeros_like(A), where=X > 0)

    hy = W * MU
    hz = W * ST

    nfft = 16384
    while math.pi / db < 1.05 * reach * (16384.0 / nfft):
        nfft *= 2  # never triggers for the default grids; safety for big reach
    # e^{+i b Z} convention: ifft * nfft
    Hy = np.fft.ifft(hy, n=nfft, axis=1) * nfft
    Hz = np.fft.ifft(hz, n=nfft, axis=1) * nfft
    Zk = 2.0 * math.pi * np.fft.fftfreq(nfft, d=db)
    keep = np.abs(Zk) <= reach
    Zg = Zk[keep]
    phase = np.exp(1j * b[0] * Zg) * db
    Hy = Hy[:, keep] * phase[None, :]
    Hz = Hz[:, keep] * phase[None, :]
    order = np.argsort(Zg)
    Zg = Zg[order]
    Hy = Hy[:, order]
    Hz = Hz[:, order]

    wa = np.full_like(a, da)
    wa[0] *= 0.5
    wa[-1] *= 0.5
    dP = 0.03
    Pg = np.arange(0.0, reach + dP / 2, dP)
    J0m = special.j0(np.outer(Pg, a)) * wa[None, :]
    J1m = special.j1(np.outer(Pg, a)) * wa[None, :]
    Ty = J0m @ Hy
    Tz = J1m @ Hz

    iy = RegularGridInterpolator((Pg, Zg), Ty, method="cubic",
                                 bounds_error=False, fill_value=0.0)
    iz = RegularGridInterpolator((Pg, Zg), Tz, method="cubic",
                                 bounds_error=False, fill_value=0.0)
    return EnvelopeTable(P_grid=Pg, Z_grid=Zg, Ty=Ty, Tz=Tz, u_delay=u_delay,
                         interp_y=iy, interp_z=iz)


def transforms_direct(family: PulseFamily, P: float, Z: float,
                      u_delay: float = 0.0, k0: float | None = None,
                      nx: int | None = None, nmu: int | None = None
                      ) -> tuple[complex, complex]:
    """T_y, T_z by direct 2D Gauss-Legendre quadrature (oracle path).

    Node counts scale with the phase x*Z across the radial range so the
    oscillatory far zone stays resolved; doubling them is the convergence
    check used in the tests.
    """
    dist = math.hypot(P, Z)
    if family.kind == "thermal":
        xlo, xhi = 0.0, 40.0
    else:
        x0 = k0 * family.ctx.length_scale
        s = family.sigma_x()
        xlo, xhi = max(0.0, x0 - 10 * s), x0 + 10 * s
    if nx is None:
        nx = int(max(300, 12 * dist))
    if nmu is None:
        nmu = int(max(1600, 24 * dist))
    xg, xw = leggauss(nx)
    x = 0.5 * (xhi + xlo) + 0.5 * (xhi - xlo) * xg
    xw = xw * 0.5 * (xhi - xlo)
    mg, mw = leggauss(nmu)
    st = np.sqrt(1.0 - mg**2)
    if family.kind == "thermal":
        wx = thermal_radial_weight(x)[:, None] * family.upsilon(mg)[None, :]
    else:
        wx = x[:, None] ** 3.5 * np.exp(
            -(x[:, None] ** 2 + x0**2 - 2.0 * x[:, None] * x0 * mg[None, :])
            / (2.0 * s * s))
    ph = np.exp(1j * np.outer(x, mg) * Z)
    if u_delay != 0.0:
        ph = ph * np.exp(-1j * x[:, None] * u_delay)
    jy = special.j0(np.outer(x, st) * P)
    jz = special.j1(np.outer(x, st) * P)
    ty = np.einsum("i,j,ij->", xw, mw * mg, wx * jy * ph)
    tz = np.einsum("i,j,ij->", xw, mw * st, wx * jz * ph)
    return complex(ty), complex(tz)


# ---------------------------------------------------------------------------
# envelope evaluation


def _canonical_coords(params: PulseParams, delta: np.ndarray
                      ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cylindrical coordinates of delta in the (n, m x n, m) frame."""
    m = params.m_hat
    n = params.n_hat
    e2 = np.cross(m, n)
    dx = delta @ n
    dy = delta @ e2
    dz = delta @ m
    return np.hypot(dx, dy), np.arctan2(dy, dx), dz


def field_envelope(family: PulseFamily, params: PulseParams,
                   r: np.ndarray, t: float = 0.0,
                   direct: bool = False) -> FieldEnvelope:
    """Classical field envelope of one pulse at the point r and time t.

    By construction the result depends on r and r0 only through r - r0, has
    no component along n_hat, and scales linearly in alpha.  direct=True
    bypasses the interpolation table (slow, used for validation).
    """
    sigma_small = family.kind == "gaussian" and family.sigma_x() < 0.05
    delta = (np.asarray(r, float) - params.r0) / family.ctx.length_scale
    if sigma_small:
        return _gaussian_narrow_envelope(family, params, delta, t)
    u = t / family.ctx.time_scale
    P, Phi, Z = _canonical_coords(params, delta[None, :])
    if direct:
        ty, tz = transforms_direct(family, float(P[0]), float(Z[0]), u, params.k0)
    else:
        dist = math.hypot(float(P[0]), float(Z[0]))
        reach = 16.0 if dist <= 15.8 else dist * 1.05 + 2.0
        tab = family.table(u, reach=reach, k0=params.k0)
        tyv, tzv = tab.lookup(P, Z)
        ty, tz = tyv[0], tzv[0]
    pref = family.envelope_prefactor(params.k0) * 2.0 * math.pi
    e2 = np.cross(params.m_hat, params.n_hat)
    vec = pref * (ty * e2 - 1j * math.sin(float(Phi[0])) * tz * params.m_hat)
    return FieldEnvelope(value=vec)


def _gaussian_narrow_envelope(family: PulseFamily, params: PulseParams,
                              delta: np.ndarray, t: float) -> FieldEnvelope:
    """Leading small-sigma form: carrier plane wave times a Gaussian ball.

    Relative corrections are O(sigma/k0); the regime switch at
    sigma*length_scale = 0.05 is covered by a cross-check test.
    """
    ctx = family.ctx
    k0 = params.k0
    if k0 is None:
        raise ValueError("gaussian kind needs k0")
    x0 = k0 * ctx.length_scale
    s = family.sigma_x()
    pref = 1j * family.alpha * family.norm_N(k0) * math.sqrt(
        ctx.hbar * ctx.c * k0 / (_SIXTEEN_PI3 * ctx.epsilon0)) * k0
    ct = ctx.c * t / ctx.length_scale
    moving = delta - ct * params.m_hat
    phase = np.exp(1j * x0 * (float(delta @ params.m_hat) - ct))
    ball = math.exp(-s * s * float(moving @ moving) / 2.0)
    amp_si = (2.0 * math.pi * family.sigma**2) ** 1.5
    vec = pref * amp_si * phase * ball * np.cross(params.m_hat, params.n_hat)
    return FieldEnvelope(value=vec.astype(complex))


def envelope_batch(family: PulseFamily, m_hats: np.ndarray, n_hats: np.ndarray,
                   deltas: np.ndarray, t: float = 0.0,
                   reach: float = 16.0, k0: float | None = None) -> np.ndarray:
    """Vectorized envelopes for many pulses at once.

    m_hats, n_hats, deltas: (N, 3) arrays, deltas in meters (already r - r0).
    Returns an (N, 3) complex array of lab-frame field vectors.  Thermal
    families go through the interpolation table; narrow gaussian lineshapes
    use the analytic carrier-times-ball form.
    """
    ctx = family.ctx
    d = deltas / ctx.length_scale
    e2 = np.cross(m_hats, n_hats)
    if family.kind == "gaussian":
        if not family.sigma_x() < 0.05:
            raise NotImplementedError("batch path needs the narrow-lineshape regime")
        x0 = k0 * ctx.length_scale
        s = family.sigma_x()
        pref = 1j * family.alpha * family.norm_N(k0) * math.sqrt(
            ctx.hbar * ctx.c * k0 / (_SIXTEEN_PI3 * ctx.epsilon0)) * k0
        amp_si = (2.0 * math.pi * family.sigma**2) ** 1.5
        ct = ctx.c * t / ctx.length_scale
        dz = np.einsum("ij,ij->i", d, m_hats)
        moving = d - ct * m_hats
        ball = np.exp(-s * s * np.einsum("ij,ij->i", moving, moving) / 2.0)
        phase = np.exp(1j * x0 * (dz - ct))
        return (pref * amp_si) * (phase * ball)[:, None] * e2
    u = t / ctx.time_scale
    tab = family.table(u, reach=reach)
    dx = np.einsum("ij,ij->i", d, n_hats)
    dy = np.einsum("ij,ij->i", d, e2)
    dz = np.einsum("ij,ij->i", d, m_hats)
    P = np.hypot(dx, dy)
    ty, tz = tab.lookup(P, dz)
    sphi = np.divide(dy, P, out=np.zeros_like(dy), where=P > 1e-300)
    pref = family.envelope_prefactor() * 2.0 * math.pi
    return pref * (ty[:, None] * e2 - 1j * (sphi * tz)[:, None] * m_hats)


# ---------------------------------------------------------------------------
# intensity diagnostics


def mean_intensity_radial(family: PulseFamily, delta_grid: np.ndarray,
                          table: EnvelopeTable | None = None,
                          n_theta: int = 200) -> np.ndarray:
    """Orientation-averaged total intensity profile I(|delta|), SI (V/m)^2.

    Averaging |E|^2 over the pulse orientation at fixed |delta| equals
    averaging over the direction of delta in the canonical frame, with the
    azimuthal average already analytic: <|E|^2> = |pref 2 pi|^2
    (|T_y|^2 + |T_z|^2/2) averaged over cos(theta).
    """
    if table is None:
        table = family.table(0.0)
    cg, cw = leggauss(n_theta)
    st = np.sqrt(1.0 - cg**2)
    pref2 = abs(family.envelope_prefactor() * 2.0 * math.pi) ** 2
    out = np.empty(len(delta_grid))
    for i, dl in enumerate(delta_grid):
        ty, tz = table.lookup(dl * st, dl * cg)
        out[i] = 0.5 * float(np.sum(cw * (np.abs(ty) ** 2 + 0.5 * np.abs(tz) ** 2)))
    return pref2 * out


def total_intensity_integral(family: PulseFamily) -> float:
    """int d3r |E|^2 from the spectral side (Parseval), SI (V/m)^2 m^3.

    Equals |alpha|^2 (hbar c / 2 eps0) <k> with <k> the normalized first
    moment of the family's spectral density; for the thermal lineshape
    <k> = (pi^4/15) / (2 zeta3 beta hbar c).
    """
    ctx = family.ctx
    if family.kind == "thermal":
        kmean = PI4_OVER_15 / (2.0 * ZETA3 * ctx.length_scale)
    else:
        raise NotImplementedError("spectral total only used for the thermal kind")
    return abs(family.alpha) ** 2 * ctx.hbar * ctx.c / (2.0 * ctx.epsilon0) * kmean


def radial_intensity_profile(family: PulseFamily, n: int = 3000
                             ) -> tuple[np.ndarray, np.ndarray]:
    """Cached (grid, profile) of the orientation-averaged intensity.

    The grid is dimensionless |delta| up to the default table reach; the
    profile is in SI (V/m)^2.
    """
    key = ("radial_profile", n)
    if key not in family._cache:
        table = family.table(0.0)
        edge = table.support_radius * 0.995
        grid = np.linspace(1e-4, edge, n)
        prof = mean_intensity_radial(family, grid, table)
        family._cache[key] = (grid, prof)
    return family._cache[key]


def pulse_extent(family: PulseFamily, fraction: float = 0.99,
                 k0: float | None = None) -> float:
    """Radius [m] of the sphere around r0 holding `fraction` of int |E|^2 d3r.

    The quantile is taken against the spectral-side (Parseval) total, so
    mass beyond the interpolation table counts toward the denominator; the
    profile itself falls off as 1/|delta|^6, leaving the quantile position
    insensitive to the table reach.  Independent of alpha and of m_hat.
    """
    if not 0.0 < fraction < 0.9999:
        raise ValueError("fraction must be in (0, 0.9999)")
    ctx = family.ctx
    if family.kind == "gaussian":
        if k0 is None:
            raise ValueError("gaussian kind needs k0")
        if family.sigma_x() < 0.05:
            # |E|^2 ~ exp(-sigma^2 |r|^2) in the narrow limit
            return math.sqrt(special.gammaincinv(1.5, fraction)) / family.sigma
        raise NotImplementedError("extent for broad gaussian lineshapes is not needed")
    grid, prof = radial_intensity_profile(family)
    cum = integrate.cumulative_trapezoid(grid**2 * prof, grid, initial=0.0)
    total = total_intensity_integral(family) / (4.0 * math.pi * ctx.length_scale**3)
    target = fraction * total
    if cum[-1] < target:
        raise RuntimeError(
            f"extent quantile {fraction} beyond table reach "
            f"(captured {cum[-1]/total:.6f} of the intensity)")
    return float(np.interp(target, cum, grid)) * ctx.length_scale


def peak_intensity(family: PulseFamily) -> float:
    """|E(r0, 0)|^2, SI (V/m)^2 (thermal kind)."""
    table = family.table(0.0)
    ty, _ = table.lookup(np.array([0.0]), np.array([0.0]))
    return abs(family.envelope_prefactor() * 2.0 * math.pi * ty[0]) ** 2


def mu_integral(family: PulseFamily, m_hat, psi: float, r: np.ndarray,
                omega: float, nodes_per_unit: float = 6.0) -> np.ndarray:
    """Position integral of per-component envelope intensity over a cube.

    mu_i = int_Omega |E_i(r; r0)|^2 d3r0 over the cube of volume omega [m^3]
    centered at the origin, for a pulse of fixed orientation.  Coherent
    pulses factorize their correlation functions, so this is also the
    diagonal first-order function integrated over pulse positions.  Returns
    the three Cartesian components [V^2/m^2 * m^3].
    """
    if not omega > 0.0:
        raise ValueError("omega must be positive")
    ctx = family.ctx
    params = make_pulse_params(m_hat, psi, np.zeros(3))
    L = omega ** (1.0 / 3.0) / ctx.length_scale
    rd = np.asarray(r, float) / ctx.length_scale
    table = family.table(0.0)
    S = table.support_radius * 0.999

    axes = []
    for i in range(3):
        lo, hi = rd[i] - L / 2.0, rd[i] + L / 2.0
        lo, hi = max(lo, -S), min(hi, S)
        if lo >= hi:
            return np.zeros(3)
        n = int(max(32, nodes_per_unit * (hi - lo)))
        xg, wg = leggauss(n)
        axes.append((0.5 * (hi + lo) + 0.5 * (hi - lo) * xg,
                     0.5 * (hi - lo) * wg))
    (gx, wx), (gy, wy), (gz, wz) = axes
    DX, DY, DZ = np.meshgrid(gx, gy, gz, indexing="ij")
    delta = np.stack([DX.ravel(), DY.ravel(), DZ.ravel()], axis=1)
    P, Phi, Z = _canonical_coords(params, delta)
    ty, tz = table.lookup(P, Z)
    pref = family.envelope_prefactor() * 2.0 * math.pi
    e2 = np.cross(params.m_hat, params.n_hat)
    comp = (pref * ty)[:, None] * e2[None, :] \
        - 1j * (pref * np.sin(Phi) * tz)[:, None] * params.m_hat[None, :]
    w3 = (wx[:, None, None] * wy[None, :, None] * wz[None, None, :]).ravel()
    out = np.einsum("p,pi->i", w3, np.abs(comp) ** 2)
    return out * ctx.length_scale**3


def sphere_in_cube_fraction(d: float) -> float:
    """Fraction of a sphere's surface (radius*d = half-side) inside a cube.

    Argument d = radius / (L/2).  Exact for the face-cap band; the edge
    band uses a deterministic spherical average.
    """
    if d <= 1.0:
        return 1.0
    if d >= math.sqrt(3.0):
        return 0.0
    if d <= math.sqrt(2.0):
        return 3.0 / d - 2.0
    pts = _fibonacci_sphere(20000)
    return float(np.mean(np.max(np.abs(pts), axis=1) <= 1.0 / d))


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    mu = 1.0 - 2.0 * i / n
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    st = np.sqrt(1.0 - mu**2)
    return np.stack([st * np.cos(phi), st * np.sin(phi), mu], axis=1)
