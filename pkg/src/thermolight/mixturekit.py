"""First-order coherence of pulse mixtures and weight feasibility solvers.

Two mixture normalizations appear throughout:

  * UnitTrace: pulse labels s = (r0, m_hat, Psi) are drawn from a proper
    probability density over a quantization volume Omega (uniform positions,
    isotropic directions, uniform polarization angle).
  * TraceImproper: positions range over all space with a constant density
    p_const per unit volume per unit label measure; the trace scale is
    calV = 1/(8 pi^2 p_const), so the label integral equals 1/calV per the
    mixture's bookkeeping convention.

For the occupation-matched (thermal-kind) family the improper mixture
reproduces the blackbody first-order function exactly when the product
p |alpha|^2 equals matched_product(ctx).  The position integral collapses
the double k-integral onto the diagonal, leaving a radial transform times
an orientation average that is evaluated here by explicit quadrature on the
sphere (m_hat) and circle (Psi); no closed-form angular identity is wired
in, so the cancellation of the directional profile upsilon between the
normalization and the average is a genuine numerical outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import nnls

from . import pulsekit
from .pulsekit import PulseFamily, gaussian_angular_kernel
from .specfun import ZETA3, bose_moment
from .thermal import g1_temporal
from .units import PhysicalContext

_LABEL_MEASURE = 8.0 * math.pi**2  # int dm_hat dPsi = 4pi * 2pi


def matched_product(ctx: PhysicalContext) -> float:
    """The product p |alpha|^2 [1/m^3] matching the improper mixture to
    the blackbody first-order function.

    Fixed by equating the mixture value at tau = 0 with the blackbody one;
    the result is zeta(3)/(4 pi^4 (beta hbar c)^3).
    """
    return ZETA3 / (4.0 * math.pi**4 * ctx.length_scale**3)


@dataclass(frozen=True)
class WeightSpec:
    """Weight assignment over pulse labels.

    p_const [1/m^3 per unit dm_hat dPsi measure] is the label density for
    both kinds; for UnitTrace it must integrate to one over the quantization
    volume (stored in quant_volume), for TraceImproper over all space it
    integrates to 1/calV per unit volume convention.  Gaussian-lineshape
    mixtures carry their k0 distribution as node masses on k0_grid.
    """

    kind: str                      # "UnitTrace" | "TraceImproper"
    alpha_sq: float
    p_const: float | None = None
    calV: float | None = None
    quant_volume: float | None = None
    k0_grid: np.ndarray | None = None
    p_of_k0: np.ndarray | None = None
    direction_law: str = "isotropic"

    def validate(self) -> None:
        if self.kind not in ("UnitTrace", "TraceImproper"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.direction_law != "isotropic":
            raise ValueError("only the isotropic direction law is supported")
        if self.alpha_sq < 0.0:
            raise ValueError("alpha_sq must be nonnegative")
        if self.p_of_k0 is not None and np.any(np.asarray(self.p_of_k0) < 0):
            raise ValueError("k0 weights must be nonnegative")
        if self.kind == "TraceImproper":
            if self.p_const is None or self.calV is None:
                raise ValueError("TraceImproper needs p_const and calV")
            target = 1.0 / self.calV
            if abs(self.p_const * _LABEL_MEASURE - target) > 1e-10 * abs(target):
                raise ValueError("p_const and calV are inconsistent")
        else:
            if self.p_const is None or self.quant_volume is None:
                raise ValueError("UnitTrace needs p_const and quant_volume")
            total = self.p_const * self.quant_volume * _LABEL_MEASURE
            if abs(total - 1.0) > 1e-10:
                raise ValueError(f"UnitTrace weights integrate to {total}, not 1")


def make_matched_improper_weights(ctx: PhysicalContext,
                                  alpha_sq: float = 1.0,
                                  product: float | None = None) -> WeightSpec:
    """TraceImproper weights with p |alpha|^2 = product (matched by default)."""
    if product is None:
        product = matched_product(ctx)
    p = product / alpha_sq
    spec = WeightSpec(kind="TraceImproper", alpha_sq=alpha_sq, p_const=p,
                      calV=1.0 / (_LABEL_MEASURE * p))
    spec.validate()
    return spec


def make_unit_trace_weights(omega: float, alpha_sq: float = 1.0) -> WeightSpec:
    """Proper mixture weights, normalized over the volume omega [m^3]."""
    if not omega > 0.0:
        raise ValueError("omega must be positive")
    spec = WeightSpec(kind="UnitTrace", alpha_sq=alpha_sq,
                      p_const=1.0 / (omega * _LABEL_MEASURE), quant_volume=omega)
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# improper-mixture first-order function


def _angular_trace(family: PulseFamily, n_mu: int = 200, n_phi: int = 64,
                   n_psi: int = 128) -> float:
    """int dm_hat dPsi upsilon^2(mu) |z_hat x n_hat|^2 by direct quadrature.

    The propagation direction of the surviving wave is pinned to z_hat by
    the position integral; m_hat runs over the sphere (Gauss-Legendre in
    cos(theta), uniform in phi) and Psi over the circle.
    """
    key = ("angtrace", n_mu, n_phi, n_psi)
    if key in family._cache:
        return family._cache[key]
    mug, muw = leggauss(n_mu)
    phig = 2.0 * math.pi * np.arange(n_phi) / n_phi
    psig = 2.0 * math.pi * np.arange(n_psi) / n_psi
    total = 0.0
    for mu, w in zip(mug, muw):
        st = math.sqrt(1.0 - mu * mu)
        m_hats = np.stack([st * np.cos(phig), st * np.sin(phig),
                           np.full(n_phi, mu)], axis=1)
        ups2 = float(family.upsilon(np.array([mu]))[0]) ** 2
        acc = 0.0
        for m in m_hats:
            e1, e2 = pulsekit._orthonormal_transverse(m)
            nz = np.cos(psig) * e1[2] + np.sin(psig) * e2[2]
            acc += float(np.mean(1.0 - nz**2)) * 2.0 * math.pi
        total += w * ups2 * acc * (2.0 * math.pi / n_phi)
    family._cache[key] = total
    return total


def g1_improper(family: PulseFamily, weights: WeightSpec, tau: float) -> complex:
    """Equal-point diagonal element of the improper mixture's first-order
    function at time delay tau [s], SI (V/m)^2.

    The all-space position integral forces k' = k, after which the label
    average factorizes into the numeric orientation trace and a radial
    occupation transform; the result is linear in p_const * alpha_sq.
    """
    if weights.kind != "TraceImproper":
        raise ValueError("g1_improper requires TraceImproper weights")
    weights.validate()
    ctx = family.ctx
    u = tau / ctx.time_scale
    pa2 = weights.p_const * weights.alpha_sq
    if family.kind == "thermal":
        tr_ang = _angular_trace(family)
        n_sq = family.norm_N() ** 2
        pref = (pa2 * n_sq * (2.0 * math.pi) ** 3 * 4.0 * math.pi
                * ctx.hbar * ctx.c / (16.0 * math.pi**3 * ctx.epsilon0)
                * (tr_ang / 3.0) / ctx.length_scale**4)
        return pref * bose_moment(3, u)
    if family.kind == "gaussian":
        if weights.k0_grid is None or weights.p_of_k0 is None:
            raise ValueError("gaussian kind needs k0_grid and p_of_k0 masses")
        key = ("gauss_dens", np.asarray(weights.k0_grid).tobytes(),
               np.asarray(weights.p_of_k0).tobytes(), weights.alpha_sq)
        if key not in family._cache:
            family._cache[key] = _gaussian_spectral_density(family, weights)
        dens, x = family._cache[key]
        du = x[1] - x[0]
        return complex(np.sum(dens * np.exp(-1j * x * u)) * du
                       * ctx.hbar * ctx.c / (ctx.epsilon0 * ctx.length_scale**4))
    raise ValueError(f"unknown family kind {family.kind!r}")


def _gaussian_spectral_density(family: PulseFamily, weights: WeightSpec,
                               x_max: float = 25.0, dx: float | None = None
                               ) -> tuple[np.ndarray, np.ndarray]:
    """Mixture spectral density (dimensionless) on a uniform x grid.

    Returns (density, x) with G1_imp(tau) = (hbar c / eps0 (bhc)^4) *
    int density(x) e^{-i x u} dx; the same kernel feeds the weight solver.
    The step must resolve the kernel columns, whose width is sigma_x.
    """
    ctx = family.ctx
    if dx is None:
        dx = min(0.01, family.sigma_x() / 4.0)
    x = np.arange(dx, x_max, dx)
    x0 = np.asarray(weights.k0_grid, float) * ctx.length_scale
    M = _weight_kernel(x, x0, family.sigma_x())
    masses = np.asarray(weights.p_of_k0, float) * weights.alpha_sq \
        * ctx.length_scale**3
    return M @ masses, x


# ---------------------------------------------------------------------------
# simulation condition


@dataclass(frozen=True)
class SimulationReport:
    residual: float
    tau_grid: np.ndarray
    g1_imp: np.ndarray
    g1_th: np.ndarray


def simulation_residual(family: PulseFamily, weights: WeightSpec,
                        tau_grid: Sequence[float]) -> SimulationReport:
    """Relative L2 mismatch between the mixture and blackbody first-order
    functions over a grid of time delays."""
    taus = np.asarray(tau_grid, float)
    if taus.size == 0:
        raise ValueError("tau_grid must be non-empty")
    ctx = family.ctx
    imp = np.array([g1_improper(family, weights, t) for t in taus])
    th = np.array([g1_temporal(ctx, t) for t in taus])
    resid = float(np.linalg.norm(imp - th) / np.linalg.norm(th))
    return SimulationReport(residual=resid, tau_grid=taus, g1_imp=imp, g1_th=th)


# ---------------------------------------------------------------------------
# gaussian-lineshape weight solver


def _weight_kernel(x: np.ndarray, x0: np.ndarray, s: float) -> np.ndarray:
    """Kernel M[x, x0] mapping k0 node masses to the spectral density.

    Row x of M times a nonnegative mass vector gives the mixture's
    dimensionless spectral density at x; the blackbody target is
    t(x) = x^3 / (6 pi^2 (e^x - 1)).  Columns are per-pulse densities
    x^5 Phi(x, x0) normalized by the family normalization pi int x^4 Phi.
    """
    phi = gaussian_angular_kernel(x, x0, s)
    denom = math.pi * np.trapezoid(x[:, None] ** 4 * phi, x, axis=0)
    return (math.pi**2 / 3.0) * x[:, None] ** 5 * phi / denom[None, :]


def blackbody_spectral_target(x: np.ndarray) -> np.ndarray:
    """t(x) = x^3/(6 pi^2 (e^x - 1)), the per-component blackbody density."""
    x = np.asarray(x, float)
    return x**3 / (6.0 * math.pi**2 * np.expm1(x))


@dataclass(frozen=True)
class GaussianWeightFit:
    k0_grid: np.ndarray
    weights: np.ndarray        # node masses of p(k0) |alpha|^2 (beta hbar c)^3
    residual: float
    kkt_violation: float
    x_grid: np.ndarray


def solve_gaussian_weights(ctx: PhysicalContext, sigma: float,
                           k0_grid: np.ndarray | None = None,
                           x_grid: np.ndarray | None = None) -> GaussianWeightFit:
    """Best nonnegative k0 weights for a Gaussian-lineshape mixture.

    sigma [1/m] is the lineshape width.  Solves min ||M w - t||_2, w >= 0
    with columns rescaled to unit norm for conditioning, and reports the
    relative residual; residual below ~1e-3 marks a feasible (physical)
    weight assignment, above ~0.1 an infeasible one.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    bhc = ctx.length_scale
    if k0_grid is None:
        k0_grid = np.geomspace(0.01, 20.0, 200) / bhc
    if x_grid is None:
        x_grid = np.geomspace(0.01, 20.0, 200)
    x0 = np.asarray(k0_grid, float) * bhc
    M = _weight_kernel(np.asarray(x_grid, float), x0, sigma * bhc)
    t = blackbody_spectral_target(x_grid)
    col = np.linalg.norm(M, axis=0)
    col[col == 0.0] = 1.0
    y, _ = nnls(M / col[None, :], t)
    w = y / col
    r = M @ w - t
    residual = float(np.linalg.norm(r) / np.linalg.norm(t))
    grad = M.T @ r
    active = w > 0
    kkt = max(float(np.abs(grad[active]).max(initial=0.0)),
              float(-grad[~active].min(initial=0.0)))
    return GaussianWeightFit(k0_grid=np.asarray(k0_grid, float), weights=w,
                             residual=residual, kkt_violation=kkt,
                             x_grid=np.asarray(x_grid, float))


def gaussian_weights_to_spec(ctx: PhysicalContext, fit: GaussianWeightFit,
                             alpha_sq: float = 1.0) -> WeightSpec:
    """Package solver masses as TraceImproper weights for g1_improper.

    The solver works with the dimensionless combination
    w = p(k0) |alpha|^2 (beta hbar c)^3 dk0-mass; undoing it gives the
    physical node masses of p(k0).
    """
    masses = fit.weights / (alpha_sq * ctx.length_scale**3)
    p_eff = float(np.sum(masses))  # all-space density per unit label measure
    return WeightSpec(kind="TraceImproper", alpha_sq=alpha_sq,
                      p_const=p_eff, calV=1.0 / (_LABEL_MEASURE * p_eff),
                      k0_grid=fit.k0_grid, p_of_k0=masses)


# ---------------------------------------------------------------------------
# 1/Omega scaling of proper mixtures


@dataclass(frozen=True)
class ScalingCurve:
    omegas: np.ndarray
    g1: np.ndarray
    g1_compensated: np.ndarray   # with alpha_sq rescaled proportional to Omega

    def loglog_slope(self) -> float:
        return float(np.polyfit(np.log(self.omegas), np.log(self.g1), 1)[0])


def unit_trace_scaling(family: PulseFamily, weights: WeightSpec,
                       omega_list: Sequence[float],
                       method: str = "radial", n_dirs: int = 24,
                       n_psi: int = 6) -> ScalingCurve:
    """G1 of the proper mixture at the origin versus quantization volume.

    method 'radial' integrates the orientation-isotropized intensity
    profile against the exact in-cube sphere fraction (the full orientation
    average of the per-component position integral reduces to this, since
    averaging a fixed Cartesian component over all pulse orientations at
    fixed |delta| gives one third of the radial total-intensity profile).
    method 'grid' averages pulsekit.mu_integral over an explicit orientation
    quadrature; it is slow and kept as a cross-check.
    """
    omegas = np.asarray(omega_list, float)
    if np.any(np.diff(omegas) <= 0.0):
        raise ValueError("omega_list must be increasing")
    if weights.kind != "UnitTrace":
        raise ValueError("unit_trace_scaling requires UnitTrace weights")
    ctx = family.ctx
    vals = np.empty(len(omegas))
    if method == "radial":
        grid, prof = pulsekit.radial_intensity_profile(family)
        base = grid**2 * prof
        for i, om in enumerate(omegas):
            L = om ** (1.0 / 3.0) / ctx.length_scale
            frac = np.array([pulsekit.sphere_in_cube_fraction(2.0 * d / L)
                             for d in grid])
            inner = 4.0 * math.pi * np.trapezoid(base * frac, grid)
            vals[i] = inner * ctx.length_scale**3 / (3.0 * om)
    elif method == "grid":
        m_nodes = pulsekit._fibonacci_sphere(n_dirs)
        psis = 2.0 * math.pi * np.arange(n_psi) / n_psi
        for i, om in enumerate(omegas):
            acc = 0.0
            for m in m_nodes:
                for psi in psis:
                    acc += pulsekit.mu_integral(family, m, float(psi),
                                                np.zeros(3), om)[2]
            vals[i] = acc / (len(m_nodes) * len(psis)) / om
    else:
        raise ValueError(f"unknown method {method!r}")
    vals = vals * weights.alpha_sq
    comp = vals * omegas / omegas[0]
    return ScalingCurve(omegas=omegas, g1=vals, g1_compensated=comp)
