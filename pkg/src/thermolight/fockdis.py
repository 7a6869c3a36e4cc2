"""Discrete-mode density matrices for mixtures of multimode coherent states.

Modes live on the reciprocal lattice of a cubic quantization volume V:
k = (2 pi / V^{1/3}) * n_int with integer 3-vectors n_int.  A pulse is a
multimode coherent state with per-mode amplitudes gamma_j = alpha * F_j,
sum_j |F_j|^2 = 1.  Mixing pulses whose per-mode phases follow a linear law
arg(gamma_j) = a + b . k_j and averaging a over [0, 2 pi) and b over the
reciprocal unit cell kills every matrix element except those with

    sum_j (n_j - m_j) = 0      and      sum_j k_j (n_j - m_j) = 0,

and on the survivors the phase factors drop out entirely, leaving the
positive sum of B coefficients.  The averages are realized here as exact
finite grids (phases wrap exactly on the lattice), so the cancellation is
exact rather than statistical; a free-phase Monte Carlo ensemble shows the
complementary 1/sqrt(N) decay toward a fully diagonal matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .units import PhysicalContext


@dataclass(frozen=True)
class ModeSet:
    """Discrete modes: integer lattice vectors, helicities, volume, cutoff."""

    n_int: tuple[tuple[int, int, int], ...]
    lambdas: tuple[int, ...]
    quant_volume_V: float
    cutoff: int

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        if len(self.n_int) != len(self.lambdas):
            raise ValueError("n_int and lambdas must have equal length")
        if any(lam not in (-1, 1) for lam in self.lambdas):
            raise ValueError("helicities must be +-1")
        if len(set(zip(self.n_int, self.lambdas))) != len(self.n_int):
            raise ValueError("modes must be distinct")
        if not self.quant_volume_V > 0.0:
            raise ValueError("quantization volume must be positive")

    @property
    def n_modes(self) -> int:
        return len(self.n_int)

    @property
    def k_vectors(self) -> np.ndarray:
        scale = 2.0 * math.pi / self.quant_volume_V ** (1.0 / 3.0)
        return scale * np.asarray(self.n_int, float)

    @property
    def dimension(self) -> int:
        return (self.cutoff + 1) ** self.n_modes

    def fock_tuples(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.cutoff + 1),
                                      repeat=self.n_modes))


@dataclass(frozen=True)
class DiscretePulse:
    """One multimode coherent state: amplitude, normalized spectrum, phase law.

    phase_law is "free" or ("linear", a, b) with b a 3-vector; the linear
    law constrains arg(alpha F_j) = a + b . k_j per mode.
    """

    amplitude_alpha: complex
    spectrum_F: tuple[complex, ...]
    phase_law: object = "free"

    def validate(self, modes: ModeSet) -> None:
        F = np.asarray(self.spectrum_F, complex)
        if len(F) != modes.n_modes:
            raise ValueError("spectrum length must match the mode count")
        if abs(float(np.sum(np.abs(F) ** 2)) - 1.0) > 1e-12:
            raise ValueError("spectrum must be normalized to 1")
        if self.phase_law != "free":
            tag, a, b = self.phase_law
            if tag != "linear":
                raise ValueError(f"unknown phase law {tag!r}")
            gam = self.amplitude_alpha * F
            expect = a + modes.k_vectors @ np.asarray(b, float)
            nz = np.abs(gam) > 0
            mism = np.angle(gam[nz] * np.exp(-1j * expect[nz]))
            if np.max(np.abs(mism), initial=0.0) > 1e-12:
                raise ValueError("phases do not follow the declared linear law")

    def gammas(self) -> np.ndarray:
        return self.amplitude_alpha * np.asarray(self.spectrum_F, complex)


@dataclass(frozen=True)
class DenseDensityMatrix:
    """Sparse-keyed density matrix over Fock tuples, dense on demand."""

    modes: ModeSet
    elements: dict = field(repr=False)
    truncation_mass: float = 0.0

    def element(self, n: tuple[int, ...], m: tuple[int, ...]) -> complex:
        return self.elements.get((tuple(n), tuple(m)), 0.0 + 0.0j)

    def trace(self) -> float:
        return float(sum(self.elements.get((n, n), 0.0).real
                         for n in self.modes.fock_tuples()))

    def dense(self) -> np.ndarray:
        tuples = self.modes.fock_tuples()
        index = {t: i for i, t in enumerate(tuples)}
        out = np.zeros((len(tuples), len(tuples)), complex)
        for (n, m), v in self.elements.items():
            out[index[n], index[m]] = v
        return out


def _coherent_vector(gammas: np.ndarray, cutoff: int) -> np.ndarray:
    """Fock amplitudes of the product coherent state, log-space factorials."""
    ns = np.arange(cutoff + 1)
    lg = [math.lgamma(k + 1) for k in ns]
    per_mode = []
    for g in gammas:
        if abs(g) == 0.0:
            v = np.zeros(cutoff + 1, complex)
            v[0] = 1.0
        else:
            v = np.exp(ns * np.log(abs(g)) - 0.5 * np.array(lg)) \
                * np.exp(1j * ns * np.angle(g))
        per_mode.append(v)
    psi = per_mode[0]
    for v in per_mode[1:]:
        psi = np.kron(psi, v)
    return psi * math.exp(-0.5 * float(np.sum(np.abs(gammas) ** 2)))


def build_rho_mixture(modes: ModeSet,
                      pulses: list[tuple[DiscretePulse, float]],
                      drop_tol: float = 1e-16) -> DenseDensityMatrix:
    """Density matrix of a probabilistic mixture of coherent pulses.

    Each pulse contributes prob * |psi><psi| with psi the product coherent
    vector; entries below drop_tol * max are not stored.  The probabilities
    must be nonnegative and sum to 1.
    """
    dim = modes.dimension
    if dim > 10**6:
        raise ValueError("Hilbert dimension exceeds 10^6; reduce cutoff or modes")
    if dim > 4096:
        raise ValueError("dense accumulation capped at dimension 4096")
    probs = np.array([p for _, p in pulses], float)
    if np.any(probs < 0.0) or abs(float(probs.sum()) - 1.0) > 1e-12:
        raise ValueError("pulse probabilities must be nonnegative and sum to 1")
    acc = np.zeros((dim, dim), complex)
    for pulse, prob in pulses:
        pulse.validate(modes)
        psi = _coherent_vector(pulse.gammas(), modes.cutoff)
        acc += prob * np.outer(psi, np.conj(psi))
    tuples = modes.fock_tuples()
    cut = drop_tol * float(np.max(np.abs(acc)))
    elements = {}
    for i, n in enumerate(tuples):
        row = acc[i]
        for j in np.nonzero(np.abs(row) > cut)[0]:
            elements[(n, tuples[j])] = complex(row[j])
    return DenseDensityMatrix(modes=modes, elements=elements)


def b_coefficient_sum(modes: ModeSet,
                      pulses: list[tuple[DiscretePulse, float]],
                      n: tuple[int, ...], m: tuple[int, ...]) -> float:
    """sum_sigma B_{nm;sigma}: the positive magnitude part of rho_nm.

    B = p e^{-|alpha|^2} prod_j |gamma_j|^{n_j + m_j} / sqrt(n_j! m_j!),
    accumulated in log space.
    """
    total = 0.0
    for pulse, prob in pulses:
        if prob == 0.0:
            continue
        gam = np.abs(pulse.gammas())
        logs = -abs(pulse.amplitude_alpha) ** 2 + math.log(prob)
        ok = True
        for g, nj, mj in zip(gam, n, m):
            if g == 0.0:
                if nj + mj > 0:
                    ok = False
                    break
                continue
            logs += (nj + mj) * math.log(g) \
                - 0.5 * (math.lgamma(nj + 1) + math.lgamma(mj + 1))
        if ok:
            total += math.exp(logs)
    return total


def coherence_scan(rho: DenseDensityMatrix, tolerance: float
                   ) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (n, m) pairs with n != m somewhere and |rho_nm| > tolerance."""
    out = [(n, m) for (n, m), v in rho.elements.items()
           if n != m and abs(v) > tolerance]
    return sorted(out)


def thermal_rho_dis(modes: ModeSet, ctx: PhysicalContext,
                    cutoff: int | None = None) -> DenseDensityMatrix:
    """Product of per-mode occupation-weighted diagonals, renormalized.

    Per mode, p(n) = nbar^n / (1 + nbar)^{n+1} with
    nbar = 1/(e^{beta hbar c |k|} - 1); the discarded tail mass is reported
    as truncation_mass.
    """
    if cutoff is None:
        cutoff = modes.cutoff
    kmag = np.linalg.norm(modes.k_vectors, axis=1)
    if np.any(kmag == 0.0):
        raise ValueError("zero wavevector has no occupation weight")
    ns = np.arange(cutoff + 1)
    per_mode = []
    kept = 1.0
    for k in kmag:
        x = ctx.beta * ctx.hbar * ctx.c * k
        nbar = 1.0 / math.expm1(x) if x < 700.0 else 0.0
        if nbar == 0.0:
            p = np.zeros(cutoff + 1)
            p[0] = 1.0
        else:
            p = nbar**ns / (1.0 + nbar) ** (ns + 1)
        kept *= float(p.sum())
        per_mode.append(p)
    diag = per_mode[0]
    for p in per_mode[1:]:
        diag = np.kron(diag, p)
    diag = diag / diag.sum()
    tuples = modes.fock_tuples()
    elements = {(n, n): complex(diag[i]) for i, n in enumerate(tuples)
                if diag[i] > 0.0}
    return DenseDensityMatrix(modes=modes, elements=elements,
                              truncation_mass=1.0 - kept)


def mean_photon_numbers(rho: DenseDensityMatrix) -> np.ndarray:
    """Per-mode <n> of a density matrix (diagonal part only)."""
    out = np.zeros(rho.modes.n_modes)
    for n in rho.modes.fock_tuples():
        w = rho.elements.get((n, n), 0.0).real
        if w:
            out += w * np.asarray(n, float)
    return out


# ---------------------------------------------------------------------------
# ensembles


def make_linear_phase_pulse(modes: ModeSet, a: float, b, magnitudes,
                            alpha_abs: float) -> DiscretePulse:
    """Pulse whose mode phases follow arg(gamma_j) = a + b . k_j exactly."""
    mags = np.asarray(magnitudes, float)
    mags = mags / math.sqrt(float(np.sum(mags**2)))
    phases = modes.k_vectors @ np.asarray(b, float)
    F = mags * np.exp(1j * phases)
    alpha = alpha_abs * np.exp(1j * a)
    pulse = DiscretePulse(amplitude_alpha=complex(alpha),
                          spectrum_F=tuple(F),
                          phase_law=("linear", float(a), tuple(np.asarray(b, float))))
    pulse.validate(modes)
    return pulse


def linear_phase_ensemble(modes: ModeSet, magnitudes, alpha_abs: float,
                          n_a: int = 16, n_b: int = 64
                          ) -> list[tuple[DiscretePulse, float]]:
    """Deterministic grid over the phase parameters a and b.

    a runs over n_a points of [0, 2 pi); b over n_b points per lattice axis
    actually used by the modes, spanning the reciprocal unit cell so that
    every b . k phase wraps exactly.  Grid sizes must exceed the largest
    possible photon-number imbalance for the modular sums to be exact.
    """
    side = modes.quant_volume_V ** (1.0 / 3.0)
    used_axes = [ax for ax in range(3)
                 if any(v[ax] != 0 for v in modes.n_int)]
    a_vals = 2.0 * math.pi * np.arange(n_a) / n_a
    b_axis = side * np.arange(n_b) / n_b
    b_grids = [b_axis if ax in used_axes else np.array([0.0]) for ax in range(3)]
    pulses = []
    n_total = n_a * int(np.prod([len(g) for g in b_grids]))
    for a in a_vals:
        for bx in b_grids[0]:
            for by in b_grids[1]:
                for bz in b_grids[2]:
                    pulses.append((make_linear_phase_pulse(
                        modes, float(a), (float(bx), float(by), float(bz)),
                        magnitudes, alpha_abs), 1.0 / n_total))
    return pulses


def free_phase_ensemble(modes: ModeSet, magnitudes, alpha_abs: float,
                        n_samples: int, seed: int
                        ) -> list[tuple[DiscretePulse, float]]:
    """Independent uniform phases on every mode (and on alpha)."""
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    mags = np.asarray(magnitudes, float)
    mags = mags / math.sqrt(float(np.sum(mags**2)))
    pulses = []
    for _ in range(n_samples):
        th = 2.0 * math.pi * rng.random(modes.n_modes)
        a0 = 2.0 * math.pi * rng.random()
        pulse = DiscretePulse(
            amplitude_alpha=complex(alpha_abs * np.exp(1j * a0)),
            spectrum_F=tuple(mags * np.exp(1j * th)),
            phase_law="free")
        pulses.append((pulse, 1.0 / n_samples))
    return pulses


# ---------------------------------------------------------------------------
# selection rules


@dataclass(frozen=True)
class SelectionRuleSummary:
    satisfying: list
    violating: list
    max_violating_magnitude: float
    all_clean: bool


def linear_phase_selection_rules(modes: ModeSet,
                                 pulses: list[tuple[DiscretePulse, float]],
                                 tolerance: float = 1e-12
                                 ) -> SelectionRuleSummary:
    """Check which off-diagonal survivors obey both phase sum rules.

    Builds the mixture, scans coherences above `tolerance`, and sorts them
    by whether sum(n - m) = 0 and sum n_int (n - m) = 0 hold.  For exact
    grid ensembles the violating list must be empty and at least one
    satisfying element nonzero.
    """
    for pulse, _ in pulses:
        if pulse.phase_law == "free" or pulse.phase_law[0] != "linear":
            raise ValueError("selection rules apply to linear-phase ensembles")
    rho = build_rho_mixture(modes, pulses)
    lattice = np.asarray(modes.n_int, int)
    satisfying = []
    violating = []
    worst = 0.0
    for (n, m) in coherence_scan(rho, tolerance):
        dn = np.asarray(n, int) - np.asarray(m, int)
        rule_tot = int(dn.sum()) == 0
        rule_k = bool(np.all(lattice.T @ dn == 0))
        entry = (n, m, abs(rho.element(n, m)))
        if rule_tot and rule_k:
            satisfying.append(entry)
        else:
            violating.append(entry)
            worst = max(worst, abs(rho.element(n, m)))
    return SelectionRuleSummary(satisfying=satisfying, violating=violating,
                                max_violating_magnitude=worst,
                                all_clean=(not violating) and bool(satisfying))


def three_mode_example(quant_volume_V: float = 1.0, cutoff: int = 3
                       ) -> ModeSet:
    """Collinear lattice modes (1, 2, 3) * (2 pi / V^{1/3}) x_hat.

    These satisfy k1 - 2 k2 + k3 = 0, so the element
    <(1,0,1)| rho |(0,2,0)> passes both sum rules and survives the linear
    phase average.
    """
    return ModeSet(n_int=((1, 0, 0), (2, 0, 0), (3, 0, 0)),
                   lambdas=(1, 1, 1), quant_volume_V=quant_volume_V,
                   cutoff=cutoff)
