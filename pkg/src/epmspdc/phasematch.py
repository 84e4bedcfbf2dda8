"""Quasi-phase-matched mismatch, grating and EPM solvers, bandwidths.

Frequencies are angular (rad/s), lengths in metres. The degenerate output
point is always omega_s = omega_i = omega_p / 2.

The grating's Fourier spectrum contains both +K and -K (K = 2 pi m / period),
so the order that opposes the material mismatch is the one applied:

    dk_Q = dk_mat - sign(dk_mat) * K
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .dispersion import (
    SellmeierSet,
    bandwidth_to_wavelength,
    gvd,
    group_slowness,
    omega_from_wavelength,
    wavevector,
)
from .errors import BracketError, DegenerateError, InfeasibleError
from .roots import bisect_secant

# sinc^2(x) = 1/2
SINC2_HALF_MAX = 1.3915573782515103

EPM_SLOPE_TOL = 1e-18  # s/m
EPM_WAVELENGTH_TOL = 1e-15  # m


@dataclass(frozen=True)
class CrystalSpec:
    length: float
    pump: SellmeierSet
    signal: SellmeierSet
    idler: SellmeierSet
    period: float | None = None
    order: int = 1

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("crystal length must be positive")
        if self.period is not None and not self.period > 0:
            raise ValueError("poling period must be positive")
        if int(self.order) != self.order or self.order < 1 or self.order % 2 == 0:
            raise ValueError("QPM order must be an odd positive integer")
        if self.signal.axis == self.idler.axis:
            raise ValueError(
                f"type-II crystal needs signal and idler on different axes (both {self.signal.axis!r})"
            )

    def with_period(self, period):
        return replace(self, period=period)

    def with_length(self, length):
        return replace(self, length=length)

    @property
    def grating_vector(self) -> float:
        if self.period is None:
            return 0.0
        return 2.0 * math.pi * self.order / self.period


def material_mismatch(crystal: CrystalSpec, omega_p, omega_s):
    """k_p(omega_p) - k_s(omega_s) - k_i(omega_p - omega_s), no grating."""
    omega_i = np.asarray(omega_p) - np.asarray(omega_s)
    if np.any(~(omega_i > 0)):
        raise ValueError("idler frequency omega_p - omega_s must be positive")
    return (
        wavevector(crystal.pump, omega_p)
        - wavevector(crystal.signal, omega_s)
        - wavevector(crystal.idler, omega_i)
    )


def phase_mismatch(crystal: CrystalSpec, omega_p, omega_s):
    """QPM mismatch dk_Q in rad/m (scalar or broadcast arrays)."""
    dk = material_mismatch(crystal, omega_p, omega_s)
    K = crystal.grating_vector
    if K == 0.0:
        return dk
    out = dk - np.where(dk >= 0, 1.0, -1.0) * K
    return float(out) if np.ndim(out) == 0 else out


def phase_mismatch_slope(crystal: CrystalSpec, omega_p):
    """d(dk)/d(omega_p) at degenerate output: k'_p - (k'_s + k'_i)/2, in s/m."""
    half = 0.5 * np.asarray(omega_p)
    return group_slowness(crystal.pump, omega_p) - 0.5 * (
        group_slowness(crystal.signal, half) + group_slowness(crystal.idler, half)
    )


def phase_mismatch_curvature(crystal: CrystalSpec, omega_p):
    """d2(dk)/d(omega_p)2 at degenerate output: k''_p - (k''_s + k''_i)/4, in s^2/m."""
    half = 0.5 * np.asarray(omega_p)
    return gvd(crystal.pump, omega_p) - 0.25 * (gvd(crystal.signal, half) + gvd(crystal.idler, half))


def signal_idler_walkoff(crystal: CrystalSpec, pump_wavelength: float) -> float:
    """k'_s - k'_i at degeneracy, in s/m (signed)."""
    half = 0.5 * omega_from_wavelength(pump_wavelength)
    return group_slowness(crystal.signal, half) - group_slowness(crystal.idler, half)


def solve_grating_period(crystal: CrystalSpec, pump_wavelength: float, order: int | None = None) -> float:
    """Grating period cancelling the degenerate material mismatch (closed form).

    ``order`` defaults to ``crystal.order``; any positive integer is accepted
    here so the period-vs-order scaling can be inspected directly.
    """
    m = crystal.order if order is None else order
    if int(m) != m or m < 1:
        raise ValueError("grating order must be a positive integer")
    wp = omega_from_wavelength(pump_wavelength)
    dk = material_mismatch(crystal, wp, 0.5 * wp)
    if dk == 0.0 or not math.isfinite(dk):
        raise InfeasibleError(
            f"material mismatch is {dk!r} rad/m at {pump_wavelength * 1e9:.3f} nm; "
            "no finite grating period applies"
        )
    return 2.0 * math.pi * m / abs(dk)


def phasematch_bandwidth(crystal: CrystalSpec, pump_wavelength: float) -> float:
    """Omega_c = 2 pi / (|k'_s - k'_i| L) in rad/s."""
    walk = abs(signal_idler_walkoff(crystal, pump_wavelength))
    if walk == 0.0:
        raise DegenerateError(
            "k'_s == k'_i at degeneracy: no group-velocity walk-off, bandwidth undefined "
            f"(signal axis {crystal.signal.axis!r}, idler axis {crystal.idler.axis!r})"
        )
    return 2.0 * math.pi / (walk * crystal.length)


def sinc_fwhm_bandwidth(crystal: CrystalSpec, pump_wavelength: float) -> float:
    """FWHM of sinc^2 along the antidiagonal, 4 x_half / (|k'_s - k'_i| L), in rad/s.

    Per-photon detuning nu gives dk ~ -(k'_s - k'_i) nu, so |dk| L / 2 = x_half at
    nu = 2 x_half / (|k'_s - k'_i| L).
    """
    walk = abs(signal_idler_walkoff(crystal, pump_wavelength))
    if walk == 0.0:
        raise DegenerateError("k'_s == k'_i at degeneracy")
    return 4.0 * SINC2_HALF_MAX / (walk * crystal.length)


def biphoton_coherence_time(omega_c: float) -> float:
    if not omega_c > 0:
        raise ValueError("bandwidth must be positive")
    return 2.0 * math.pi / omega_c


def epm_bandwidth(crystal: CrystalSpec, pump_wavelength: float, definition: str = "fwhm") -> float:
    """Full pump-frequency width over which the degenerate output stays phase matched.

    Under dk ~ (1/2) dk'' d^2 the sinc^2 response reaches the chosen level
    x (|dk| L / 2 = x) at d = sqrt(4 x / (|dk''| L)); the width is 2 d.
    ``definition`` is ``"fwhm"`` (sinc^2 half maximum, default) or
    ``"first_zero"`` (x = pi).
    """
    levels = {"fwhm": SINC2_HALF_MAX, "first_zero": math.pi}
    if definition not in levels:
        raise ValueError(f"unknown EPM bandwidth definition {definition!r}")
    curv = phase_mismatch_curvature(crystal, omega_from_wavelength(pump_wavelength))
    if curv == 0.0:
        raise DegenerateError("dk'' = 0: EPM bandwidth is unbounded at quadratic order")
    return 2.0 * math.sqrt(4.0 * levels[definition] / (abs(curv) * crystal.length))


def output_tuning_width_nm(omega_epm: float, pump_wavelength: float) -> float:
    """Pump-frequency width expressed as the degenerate-output tuning width in nm.

    Tuning the pump by d moves each degenerate photon by d/2; the carrier is
    the output wavelength 2 * pump_wavelength.
    """
    return bandwidth_to_wavelength(0.5 * omega_epm, 2.0 * pump_wavelength) * 1e9


@dataclass(frozen=True)
class EpmSolution:
    pump_wavelength: float
    period: float
    dk_residual: float
    dk_slope_residual: float
    omega_c: float
    omega_c_sinc_fwhm: float
    omega_epm: float
    omega_epm_first_zero: float
    tau_c: float
    crystal: CrystalSpec
    iterations: int = 0

    @property
    def output_wavelength(self) -> float:
        return 2.0 * self.pump_wavelength

    @property
    def omega_c_nm(self) -> float:
        """Omega_c as a wavelength width at the output carrier (nm)."""
        return bandwidth_to_wavelength(self.omega_c, self.output_wavelength) * 1e9

    @property
    def omega_epm_nm(self) -> float:
        return output_tuning_width_nm(self.omega_epm, self.pump_wavelength)


def solve_epm_point(crystal: CrystalSpec, interval=(700e-9, 900e-9)) -> EpmSolution:
    """Pump wavelength with dk' = 0, then the grating period giving dk = 0."""
    lo, hi = sorted(float(x) for x in interval)
    slope = lambda lam: float(phase_mismatch_slope(crystal, omega_from_wavelength(lam)))

    if hi - lo < EPM_WAVELENGTH_TOL:
        lam = 0.5 * (lo + hi)
        if abs(slope(lam)) >= 10 * EPM_SLOPE_TOL:
            raise BracketError(f"degenerate interval at {lam!r} m is not an EPM point")
        its = 0
    else:
        root = bisect_secant(slope, lo, hi, xtol=EPM_WAVELENGTH_TOL, ftol=EPM_SLOPE_TOL)
        lam, its = root.x, root.iterations

    period = solve_grating_period(crystal, lam)
    solved = crystal.with_period(period)
    wp = omega_from_wavelength(lam)
    omega_c = phasematch_bandwidth(solved, lam)
    return EpmSolution(
        pump_wavelength=lam,
        period=period,
        dk_residual=abs(float(phase_mismatch(solved, wp, 0.5 * wp))),
        dk_slope_residual=abs(slope(lam)),
        omega_c=omega_c,
        omega_c_sinc_fwhm=sinc_fwhm_bandwidth(solved, lam),
        omega_epm=epm_bandwidth(solved, lam, "fwhm"),
        omega_epm_first_zero=epm_bandwidth(solved, lam, "first_zero"),
        tau_c=biphoton_coherence_time(omega_c),
        crystal=solved,
        iterations=its,
    )


class Regime(str, Enum):
    SATISFIED = "satisfied"
    MARGINAL = "marginal"
    VIOLATED = "violated"


def regime_check(omega_c: float, omega_p: float, omega_epm: float, ratio: float = 2.0) -> Regime:
    """Classify Omega_c << Omega_p << Omega_epm with a ratio threshold."""
    if omega_p <= omega_c or omega_epm <= omega_p:
        return Regime.VIOLATED
    if omega_p >= ratio * omega_c and omega_epm >= ratio * omega_p:
        return Regime.SATISFIED
    return Regime.MARGINAL

