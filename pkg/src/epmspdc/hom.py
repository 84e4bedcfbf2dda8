"""Hong-Ou-Mandel coincidence curves, dip fitting and coherence times.

Delays are the internal coordinate. Positions are single-pass air-gap
displacements, x = c * tau. A base-to-base dip width l_c in position is
converted to the reported biphoton coherence time with tau_c = l_c / (2 c).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c
from scipy.optimize import brentq, minimize

from .dispersion import omega_from_wavelength
from .errors import DegenerateError, FitError
from .jsa import JointSpectralAmplitude, _require_normalized
from .phasematch import CrystalSpec, phase_mismatch, phasematch_bandwidth, signal_idler_walkoff


class DegenerateCurveWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class HomCurve:
    delays: np.ndarray  # s
    coincidence: np.ndarray  # normalized; distinguishable baseline 0.5
    provenance: str  # "cw-analytic" | "pulsed-grid" | "synthetic"

    def __post_init__(self):
        d = np.asarray(self.delays, dtype=float)
        v = np.asarray(self.coincidence, dtype=float)
        object.__setattr__(self, "delays", d)
        object.__setattr__(self, "coincidence", v)
        if d.ndim != 1 or d.shape != v.shape or d.size == 0:
            raise ValueError("delays and coincidence must be equal-length 1-D arrays")
        if np.any(np.diff(d) <= 0):
            raise ValueError("delay axis must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("coincidence values must be finite")

    @property
    def positions(self) -> np.ndarray:
        """Air-gap positions in metres."""
        return c * self.delays

    def axis(self, unit: str = "delay") -> np.ndarray:
        if unit == "delay":
            return self.delays
        if unit == "position":
            return self.positions
        raise ValueError(f"unknown axis unit {unit!r}")

    def to_csv(self, path):
        table = np.column_stack([self.delays, self.positions, self.coincidence])
        np.savetxt(path, table, delimiter=",", header="delay_s,position_m,coincidence_prob",
                   comments="", fmt="%.17g")


def interference_term(jsa: JointSpectralAmplitude, delays) -> np.ndarray:
    """W(tau) = sum A(ws, wi) A*(wi, ws) exp(i (ws - wi) tau) dw^2.

    The phase depends only on j - k, so M = A * conj(A^T) is first reduced
    along its diagonals.
    """
    a = jsa.amplitude
    n = jsa.grid.n
    dw = jsa.grid.step
    m = a * np.conj(a.T) * dw * dw
    offsets = np.arange(-(n - 1), n)  # j - k
    diag = np.array([np.trace(m, offset=-o) for o in offsets])
    tau = np.asarray(delays, dtype=float)
    phase = np.exp(1j * np.outer(tau, offsets * dw))
    return phase @ diag


def hom_coincidence_curve(jsa: JointSpectralAmplitude, delays) -> HomCurve:
    """C(tau) = (1 - Re W(tau)) / 2 for a normalized JSA."""
    _require_normalized(jsa)
    delays = np.asarray(delays, dtype=float)
    if delays.size == 0:
        raise ValueError("empty delay list")
    w = interference_term(jsa, delays)
    return HomCurve(delays, 0.5 * (1.0 - w.real), "pulsed-grid")


def cw_kernel(crystal: CrystalSpec, pump_wavelength: float, n_points: int = 4097, lobes: float = 6.0):
    """Detuning samples nu and real kernel Phi(nu) = sinc(dk_Q(nu) L / 2)."""
    if n_points < 4096:
        raise ValueError("cw quadrature needs at least 4096 points")
    wp = omega_from_wavelength(pump_wavelength)
    span = lobes * phasematch_bandwidth(crystal, pump_wavelength)
    nu = np.linspace(-span, span, n_points)
    x = 0.5 * crystal.length * phase_mismatch(crystal, wp, 0.5 * wp + nu)
    return nu, np.sinc(x / math.pi)


def cw_hom_curve(crystal: CrystalSpec, pump_wavelength: float, delays, n_points: int = 4097) -> HomCurve:
    """cw HOM curve from the 1-D antidiagonal reduction of the JSA.

    C(tau) = (1 - Re int Phi(nu) Phi*(-nu) e^{2 i nu tau} dnu / int |Phi|^2 dnu) / 2,
    trapezoidal quadrature on a symmetric detuning grid spanning +-6 sinc lobes.
    """
    delays = np.asarray(delays, dtype=float)
    if delays.size == 0:
        raise ValueError("empty delay list")
    nu, phi = cw_kernel(crystal, pump_wavelength, n_points)
    prod = phi * phi[::-1]
    norm = np.trapezoid(phi * phi, nu)
    # prod is even in nu, so only the cosine part survives
    w = np.trapezoid(prod[None, :] * np.cos(2.0 * np.outer(delays, nu)), nu, axis=1) / norm
    return HomCurve(delays, 0.5 * (1.0 - w), "cw-analytic")


def expected_dip_center(crystal: CrystalSpec, pump_wavelength: float) -> float:
    """Delay of the pulsed-grid dip: (k'_s - k'_i) L / 2 under the JSA phase convention."""
    return 0.5 * signal_idler_walkoff(crystal, pump_wavelength) * crystal.length


def default_delays(crystal: CrystalSpec, pump_wavelength: float, center: float = 0.0, points: int = 601):
    """Delay scan of +-2 biphoton base widths around ``center``."""
    base = abs(signal_idler_walkoff(crystal, pump_wavelength)) * crystal.length
    return center + np.linspace(-2.0 * base, 2.0 * base, points)


# -- visibility -----------------------------------------------------------

def _baseline(x, y):
    """Mean of the flattest 20% of samples among those farthest from the minimum."""
    n = len(y)
    i0 = int(np.argmin(y))
    dist = np.abs(x - x[i0])
    far = np.argsort(-dist, kind="stable")[: max(2, int(round(0.4 * n)))]
    slope = np.abs(np.gradient(y, x))
    k = max(1, int(round(0.2 * n)))
    flat = far[np.argsort(slope[far], kind="stable")[:k]]
    return float(np.mean(y[flat]))


def visibility(curve: HomCurve) -> float:
    """V = 1 - C_min / C_max, C_max taken from the flat part of the curve."""
    y = curve.coincidence
    x = curve.delays
    if y.size < 4:
        raise ValueError("visibility needs at least 4 samples")
    ymax, ymin = float(np.max(y)), float(np.min(y))
    if ymax - ymin <= 1e-12 * max(abs(ymax), 1e-300):
        warnings.warn("flat curve: visibility set to 0", DegenerateCurveWarning, stacklevel=2)
        return 0.0
    if abs(int(np.argmax(y)) - int(np.argmin(y))) < 3:
        raise ValueError("curve minimum and maximum are fewer than 3 samples apart")
    base = _baseline(x, y)
    if base <= 0:
        raise DegenerateError("non-positive baseline")
    return 1.0 - ymin / base


def leakage_adjusted_visibility(v_ideal: float, leakage: float) -> float:
    """First-order polarization-leakage penalty: V - 2 eps, clamped at 0."""
    if not 0.0 <= leakage <= 0.5:
        raise ValueError("leakage must lie in [0, 0.5]")
    if not 0.0 <= v_ideal <= 1.0:
        raise ValueError("visibility must lie in [0, 1]")
    return max(0.0, v_ideal - 2.0 * leakage)


# -- triangular dip fit ---------------------------------------------------

def triangle_model(x, baseline, vis, center, width):
    """B [1 - V max(0, 1 - |x - x0| / (w/2))]."""
    h = np.maximum(0.0, 1.0 - np.abs(np.asarray(x) - center) / (0.5 * width))
    return baseline * (1.0 - vis * h)


@dataclass(frozen=True)
class DipFit:
    visibility: float
    width: float  # base-to-base, in units of ``unit``
    center: float
    baseline: float
    residual_rms: float
    unit: str  # "delay" (s) or "position" (m)
    uncertainties: dict = field(default_factory=dict)
    iterations: int = 0

    @property
    def delay_width(self) -> float:
        return self.width if self.unit == "delay" else self.width / c

    @property
    def position_width(self) -> float:
        """l_c, base-to-base air-gap width in metres."""
        return self.width if self.unit == "position" else self.width * c

    @property
    def coherence_time(self) -> float:
        """Reported tau_c = l_c / (2 c)."""
        return dip_width_to_coherence_time(self.position_width)

    def model(self, x):
        return triangle_model(x, self.baseline, self.visibility, self.center, self.width)

    def model_curve(self, points: int = 401) -> HomCurve:
        """Model sampled on +-2 widths around the centre (centre is a sample)."""
        half = points // 2
        x = self.center + np.arange(-half, half + 1) * (2.0 * self.width / half)
        t = x if self.unit == "delay" else x / c
        return HomCurve(t, self.model(x), "synthetic")


def _profile(x, y, center, width):
    """Best (B, B*V) for fixed (x0, w) with 0 <= V <= 1, and the SSR.

    ``center`` and ``width`` may be arrays of equal shape; the 2x2 normal
    equations are then solved for every pair at once.
    """
    center = np.asarray(center, dtype=float)[..., None]
    width = np.asarray(width, dtype=float)[..., None]
    h = np.maximum(0.0, 1.0 - np.abs(x - center) / (0.5 * width))
    n = float(x.size)
    sy, syy = float(y.sum()), float(y @ y)
    sh, shh, shy = h.sum(-1), (h * h).sum(-1), h @ y
    det = n * shh - sh * sh
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(det > 0, (sy * shh - sh * shy) / det, sy / n)
        v = np.where(det > 0, (sh * sy - n * shy) / det, 0.0)
        # clamp V to the violated bound; B alone is then a 1-parameter fit
        one_h = 1.0 - h
        b_v1 = (one_h @ y) / (one_h * one_h).sum(-1)
    over = (b > 0) & (v > b)
    under = (b > 0) & (v < 0)
    b = np.where(over, b_v1, np.where(under, sy / n, b))
    v = np.where(over, b, np.where(under, 0.0, v))
    ssr = syy - 2 * b * sy + 2 * v * shy + b * b * n - 2 * b * v * sh + v * v * shh
    return b, v, np.maximum(ssr, 0.0)


def fit_triangular_dip(curve: HomCurve, unit: str = "delay", max_iter: int = 200, rtol: float = 1e-9) -> DipFit:
    """Least-squares fit of the triangular dip model.

    (B, V) enter linearly for fixed (x0, w) and are profiled out; (x0, w) are
    searched with a Nelder-Mead simplex from the three best cells of a coarse
    grid. Converged when the relative simplex size drops below ``rtol``.
    """
    x_raw = curve.axis(unit)
    y = curve.coincidence
    if y.size < 12:
        raise ValueError("fit needs at least 12 samples")
    scale = float(x_raw[-1] - x_raw[0])
    off = float(x_raw[0])
    x = (x_raw - off) / scale  # [0, 1]
    base_guess = _baseline(curve.delays, y)
    if base_guess <= 0 or 1.0 - y.min() / base_guess <= 0.05:
        raise ValueError("no dip present (visibility estimate <= 0.05)")

    def ssr(p):
        x0, w = p
        if w <= 1e-6:
            return 1e30
        return float(_profile(x, y, x0, w)[2])

    x0_grid, w_grid = np.meshgrid(np.linspace(x[0], x[-1], 41), np.linspace(0.02, 1.0, 50), indexing="ij")
    x0_grid, w_grid = x0_grid.ravel(), w_grid.ravel()
    coarse = _profile(x, y, x0_grid, w_grid)[2]
    best = None
    for k in np.argsort(coarse, kind="stable")[:3]:
        a, b = x0_grid[k], w_grid[k]
        res = minimize(
            ssr, np.array([a, b]), method="Nelder-Mead",
            options={"xatol": rtol, "fatol": np.inf, "maxiter": max_iter, "maxfev": 10 * max_iter},
        )
        if best is None or res.fun < best.fun:
            best = res
    x0, w = best.x
    b, bv, s = (float(v) for v in _profile(x, y, x0, w))
    if not best.success:
        raise FitError(
            f"triangular fit did not converge in {max_iter} iterations: {best.message}",
            last_params=(b, bv / b if b else float("nan"), x0 * scale + off, w * scale),
            residual=math.sqrt(s / y.size),
        )
    vis = bv / b
    center = x0 * scale + off
    width = abs(w) * scale
    params = np.array([b, vis, center, width])
    resid = y - triangle_model(x_raw, *params)
    rms = float(np.sqrt(np.mean(resid**2)))
    return DipFit(
        visibility=float(vis), width=float(width), center=float(center), baseline=float(b),
        residual_rms=rms, unit=unit, uncertainties=_uncertainties(x_raw, y, params, resid),
        iterations=int(best.nit),
    )


def _uncertainties(x, y, params, resid):
    """1-sigma errors from the residual covariance s^2 (J^T J)^-1 (numerical Jacobian)."""
    dof = max(1, y.size - 4)
    s2 = float(resid @ resid) / dof
    jac = np.empty((y.size, 4))
    for i in range(4):
        h = 1e-6 * max(abs(params[i]), 1e-3 * abs(params[3]) if i == 2 else 1e-12)
        up, dn = params.copy(), params.copy()
        up[i] += h
        dn[i] -= h
        jac[:, i] = (triangle_model(x, *up) - triangle_model(x, *dn)) / (2 * h)
    try:
        cov = s2 * np.linalg.inv(jac.T @ jac)
        err = np.sqrt(np.clip(np.diag(cov), 0, None))
    except np.linalg.LinAlgError:
        err = np.full(4, np.nan)
    return dict(zip(("baseline", "visibility", "center", "width"), (float(e) for e in err)))


def dip_width_to_coherence_time(l_c: float) -> float:
    """tau_c = l_c / (2 c) for a base-to-base air-gap width l_c in metres."""
    if l_c < 0:
        raise ValueError("dip width must be non-negative")
    return l_c / (2.0 * c)


def field_autocorrelation_coherence_time(omegas, spectrum) -> float:
    """FWHM of |g(tau)|, g(tau) = int S(omega) e^{i omega tau} d omega."""
    w = np.asarray(omegas, dtype=float)
    s = np.asarray(spectrum, dtype=float)
    if np.any(s < 0):
        raise ValueError("spectrum must be non-negative")
    if not np.any(s > 0):
        raise DegenerateError("all-zero spectrum")
    total = np.trapezoid(s, w)
    wc = np.trapezoid(s * w, w) / total
    dw = w - wc

    def g(tau):
        return abs(np.trapezoid(s * np.exp(1j * dw * tau), w)) / abs(total)

    rms = math.sqrt(np.trapezoid(s * dw * dw, w) / total)
    t = 0.5 / rms
    while g(t) > 0.5:
        t *= 1.5
        if t > 1e6 / rms:
            raise DegenerateError("|g| never falls to half maximum")
    # first crossing: walk out from zero on a fine ladder so a later recovery is ignored
    ladder = np.linspace(0.0, t, 257)
    vals = np.array([g(v) for v in ladder])
    k = int(np.argmax(vals <= 0.5))
    half = brentq(lambda v: g(v) - 0.5, ladder[k - 1], ladder[k], xtol=1e-15 * t, rtol=1e-13)
    return 2.0 * half
