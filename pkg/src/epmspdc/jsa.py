"""Joint spectral amplitude on a uniform (omega_s, omega_i) grid.

A(omega_s, omega_i) = alpha(omega_s + omega_i) * Phi(omega_s, omega_i), with a
transform-limited Gaussian pump envelope alpha and the sinc phase-matching
kernel Phi. Continuous-wave pumping is not represented here; see
:func:`epmspdc.hom.cw_hom_curve`.
"""

from __future__ import annotations

import logging
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dispersion import bandwidth_to_omega, omega_from_wavelength
from .errors import DegenerateError, NumericError, ResolutionError
from .phasematch import CrystalSpec, phase_mismatch, phasematch_bandwidth

log = logging.getLogger(__name__)

MIN_POINTS_ACROSS = 8
DEFAULT_N = 512
BINARY_MAGIC = b"JSA1"
# magic, n_s, n_i, center (rad/s), half_span (rad/s); little-endian
BINARY_HEADER = struct.Struct("<4sIIdd")


@dataclass(frozen=True)
class PumpSpec:
    mode: str
    center_wavelength: float
    fwhm_bandwidth: float | None = None

    def __post_init__(self):
        if self.mode not in ("cw", "pulsed"):
            raise ValueError(f"pump mode must be 'cw' or 'pulsed', got {self.mode!r}")
        if not self.center_wavelength > 0:
            raise ValueError("pump center wavelength must be positive")
        if self.mode == "pulsed" and not (self.fwhm_bandwidth and self.fwhm_bandwidth > 0):
            raise ValueError("pulsed pump needs a positive FWHM bandwidth")

    @property
    def center_omega(self) -> float:
        return omega_from_wavelength(self.center_wavelength)

    @property
    def omega_fwhm(self) -> float:
        """Intensity FWHM in rad/s."""
        self._need_pulsed()
        return bandwidth_to_omega(self.fwhm_bandwidth, self.center_wavelength)

    @property
    def sigma(self) -> float:
        """Width of alpha = exp(-d^2 / (2 sigma^2)) whose |alpha|^2 has FWHM omega_fwhm."""
        return self.omega_fwhm / (2.0 * math.sqrt(math.log(2.0)))

    def _need_pulsed(self):
        if self.mode != "pulsed":
            raise ValueError("continuous-wave pump has no spectral envelope")


def pump_envelope(pump: PumpSpec, omega):
    pump._need_pulsed()
    d = np.asarray(omega, dtype=float) - pump.center_omega
    out = np.exp(-(d * d) / (2.0 * pump.sigma**2))
    return float(out) if out.ndim == 0 else out


def phase_matching_function(crystal: CrystalSpec, omega_s, omega_i):
    """Phi = sinc(dk_Q L / 2) exp(i dk_Q L / 2)."""
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    x = 0.5 * crystal.length * np.asarray(phase_mismatch(crystal, omega_s + omega_i, omega_s))
    out = np.sinc(x / math.pi) * np.exp(1j * x)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FrequencyGrid:
    center: float
    half_span: float
    n: int = DEFAULT_N

    def __post_init__(self):
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError(f"grid size must be a power of two >= 16, got {self.n}")
        if not (self.center > 0 and 0 < self.half_span < self.center):
            raise ValueError("grid must satisfy 0 < half_span < center")

    @property
    def step(self) -> float:
        return 2.0 * self.half_span / (self.n - 1)

    @property
    def omegas(self) -> np.ndarray:
        return self.center + (np.arange(self.n) - 0.5 * (self.n - 1)) * self.step


def default_grid(crystal: CrystalSpec, pump: PumpSpec, n: int | None = None, half_span: float | None = None):
    """Grid centred on degeneracy.

    Half-span is 4 x max(per-axis pump width sigma/2, Omega_c). When ``n`` is
    None the size starts at 512 and doubles until the resolution rule of
    :func:`check_resolution` is met.
    """
    omega_c = phasematch_bandwidth(crystal, pump.center_wavelength)
    if half_span is None:
        half_span = 4.0 * max(0.5 * pump.sigma, omega_c)
    center = 0.5 * pump.center_omega
    if n is not None:
        return FrequencyGrid(center, half_span, n)
    n = DEFAULT_N
    while True:
        grid = FrequencyGrid(center, half_span, n)
        try:
            check_resolution(grid, crystal, pump)
            return grid
        except ResolutionError:
            if n >= 8192:
                raise
            n *= 2
            log.info("raising grid size to %d for resolution", n)


def check_resolution(grid: FrequencyGrid, crystal: CrystalSpec, pump: PumpSpec):
    """Require >= 8 samples across min(Omega_c, pump sigma).

    Sums and differences of grid frequencies are sampled at the same step as
    each axis, so the pump sigma (a sum-frequency width) is compared directly.
    """
    omega_c = phasematch_bandwidth(crystal, pump.center_wavelength)
    feature = min(omega_c, pump.sigma)
    if feature / grid.step < MIN_POINTS_ACROSS:
        raise ResolutionError(
            f"grid step {grid.step:.3e} rad/s gives {feature / grid.step:.1f} points across "
            f"{feature:.3e} rad/s (need {MIN_POINTS_ACROSS}); n={grid.n}, half_span={grid.half_span:.3e}"
        )


@dataclass(frozen=True, eq=False)
class JointSpectralAmplitude:
    grid: FrequencyGrid
    amplitude: np.ndarray  # [signal index, idler index]
    normalized: bool = True

    def __post_init__(self):
        if self.amplitude.shape != (self.grid.n, self.grid.n):
            raise ValueError("amplitude shape does not match the grid")
        if not np.all(np.isfinite(self.amplitude)):
            raise NumericError("JSA contains non-finite entries")

    @property
    def omegas(self) -> np.ndarray:
        return self.grid.omegas

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitude) ** 2) * self.grid.step**2)

    def transpose(self) -> "JointSpectralAmplitude":
        return JointSpectralAmplitude(self.grid, np.ascontiguousarray(self.amplitude.T), self.normalized)

    @classmethod
    def from_array(cls, grid: FrequencyGrid, amplitude) -> "JointSpectralAmplitude":
        """Wrap and L2-normalize an arbitrary complex matrix on ``grid``."""
        a = np.asarray(amplitude, dtype=complex)
        total = np.sum(np.abs(a) ** 2) * grid.step**2
        if not total > 0:
            raise DegenerateError("all-zero amplitude cannot be normalized")
        return cls(grid, a / math.sqrt(total), True)


def _fill_row(crystal, pump, omegas, j):
    ws = omegas[j]
    return pump_envelope(pump, ws + omegas) * phase_matching_function(crystal, np.full_like(omegas, ws), omegas)


def joint_spectral_amplitude(
    crystal: CrystalSpec, pump: PumpSpec, grid: FrequencyGrid | None = None, workers: int = 1
) -> JointSpectralAmplitude:
    """Fill A(omega_s, omega_i) = alpha(omega_s + omega_i) Phi(omega_s, omega_i) and normalize.

    Rows are computed independently with identical code paths, so the result
    does not depend on ``workers``.
    """
    if pump.mode != "pulsed":
        raise ValueError("2-D JSA needs a pulsed pump; use the cw HOM reduction for cw")
    if crystal.period is None:
        raise ValueError("crystal has no poling period; solve for it first")
    if grid is None:
        grid = default_grid(crystal, pump)
    check_resolution(grid, crystal, pump)
    omegas = grid.omegas
    a = np.empty((grid.n, grid.n), dtype=complex)
    if workers <= 1:
        for j in range(grid.n):
            a[j] = _fill_row(crystal, pump, omegas, j)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            for j, row in enumerate(ex.map(lambda j: _fill_row(crystal, pump, omegas, j), range(grid.n))):
                a[j] = row
    return JointSpectralAmplitude.from_array(grid, a)


def _require_normalized(jsa: JointSpectralAmplitude, tol: float = 1e-9):
    if abs(jsa.norm - 1.0) > tol:
        raise ValueError(f"JSA is not normalized (norm {jsa.norm:.12f})")


def marginal_spectra(jsa: JointSpectralAmplitude):
    """(S_s, S_i): |A|^2 integrated over the partner frequency."""
    _require_normalized(jsa)
    p = np.abs(jsa.amplitude) ** 2 * jsa.grid.step
    return p.sum(axis=1), p.sum(axis=0)


@dataclass(frozen=True, eq=False)
class SchmidtResult:
    coefficients: np.ndarray

    @property
    def purity(self) -> float:
        return float(np.sum(self.coefficients**4))

    @property
    def schmidt_number(self) -> float:
        return 1.0 / self.purity


def schmidt_decompose(jsa: JointSpectralAmplitude) -> SchmidtResult:
    _require_normalized(jsa)
    try:
        s = np.linalg.svd(jsa.amplitude * jsa.grid.step, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"SVD did not converge on {jsa.grid.n}x{jsa.grid.n} grid "
            f"(step {jsa.grid.step:.3e} rad/s): {exc}"
        ) from None
    return SchmidtResult(s)


def frequency_correlation(jsa: JointSpectralAmplitude) -> float:
    """Pearson coefficient of |A|^2 as a joint density in (omega_s, omega_i)."""
    _require_normalized(jsa)
    p = np.abs(jsa.amplitude) ** 2
    p = p / p.sum()
    x = jsa.omegas - jsa.grid.center
    ps, pi = p.sum(axis=1), p.sum(axis=0)
    ms, mi = ps @ x, pi @ x
    vs = ps @ (x - ms) ** 2
    vi = pi @ (x - mi) ** 2
    if vs <= 0 or vi <= 0:
        raise DegenerateError("zero marginal variance: correlation undefined")
    cov = (x - ms) @ p @ (x - mi)
    return float(cov / math.sqrt(vs * vi))


# -- export ---------------------------------------------------------------

def write_jsa_csv(jsa: JointSpectralAmplitude, path):
    w = jsa.omegas
    a = jsa.amplitude
    ws, wi = np.meshgrid(w, w, indexing="ij")
    table = np.column_stack([ws.ravel(), wi.ravel(), a.real.ravel(), a.imag.ravel(), (np.abs(a) ** 2).ravel()])
    header = "omega_s_rad_per_s,omega_i_rad_per_s,re_A_s,im_A_s,abs_A_sq_s2"
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt="%.17g")


def write_jsa_binary(jsa: JointSpectralAmplitude, path):
    """Header (see BINARY_HEADER) then row-major complex128, little-endian."""
    with open(path, "wb") as fh:
        fh.write(BINARY_HEADER.pack(BINARY_MAGIC, jsa.grid.n, jsa.grid.n, jsa.grid.center, jsa.grid.half_span))
        fh.write(np.ascontiguousarray(jsa.amplitude, dtype="<c16").tobytes())


def read_jsa_binary(path) -> JointSpectralAmplitude:
    raw = Path(path).read_bytes()
    magic, ns, ni, center, half_span = BINARY_HEADER.unpack_from(raw)
    if magic != BINARY_MAGIC or ns != ni:
        raise ValueError(f"{path}: not a JSA dump")
    body = np.frombuffer(raw, dtype="<c16", offset=BINARY_HEADER.size)
    grid = FrequencyGrid(center, half_span, ns)
    return JointSpectralAmplitude(grid, body.reshape(ns, ni).astype(complex), True)
