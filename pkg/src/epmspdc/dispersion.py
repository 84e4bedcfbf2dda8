"""Sellmeier dispersion for a single crystal axis.

Each axis is described by

    n^2(lam) = A + sum_j B_j / (1 - C_j / lam^2) - D * lam^2

with ``lam`` in micrometres. Public functions take SI inputs (metres, rad/s).
Derivatives with respect to angular frequency are analytic: writing
``s = omega^2`` the rational form is a function g(s), and

    f   = n^2 = g(s)
    f'  = 2 omega g'(s)
    f'' = 2 g'(s) + 4 omega^2 g''(s)

from which n', n'' and the wavevector derivatives follow by the chain rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.constants import c

from .errors import ConfigError, SingularityError, WavelengthRangeError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

# 1/lam_um^2 = BETA * omega^2
BETA = 1.0 / (2.0 * math.pi * c * 1e6) ** 2

DEFAULT_SELLMEIER_FILE = Path(__file__).with_name("data") / "ktp_sellmeier.toml"


def omega_from_wavelength(wavelength):
    """Vacuum wavelength (m) -> angular frequency (rad/s)."""
    wavelength = np.asarray(wavelength, dtype=float)
    if np.any(~(wavelength > 0)):
        raise ValueError("wavelength must be strictly positive")
    out = 2.0 * math.pi * c / wavelength
    return float(out) if out.ndim == 0 else out


def wavelength_from_omega(omega):
    """Angular frequency (rad/s) -> vacuum wavelength (m)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega > 0)):
        raise ValueError("optical frequency must be strictly positive")
    out = 2.0 * math.pi * c / omega
    return float(out) if out.ndim == 0 else out


def bandwidth_to_wavelength(delta_omega, carrier_wavelength):
    """Frequency width (rad/s) -> wavelength width (m) at the given carrier."""
    return carrier_wavelength**2 * delta_omega / (2.0 * math.pi * c)


def bandwidth_to_omega(delta_wavelength, carrier_wavelength):
    """Wavelength width (m) -> frequency width (rad/s) at the given carrier."""
    return 2.0 * math.pi * c * delta_wavelength / carrier_wavelength**2


@dataclass(frozen=True)
class SellmeierSet:
    axis: str
    A: float
    B: tuple[float, ...]
    C: tuple[float, ...]
    D: float = 0.0
    lambda_min_um: float = 0.2
    lambda_max_um: float = 5.0
    citation: str = ""
    _check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(float(b) for b in self.B))
        object.__setattr__(self, "C", tuple(float(x) for x in self.C))
        if len(self.B) != len(self.C):
            raise ValueError(f"axis {self.axis!r}: B and C must have equal length")
        if not 0 < self.lambda_min_um < self.lambda_max_um:
            raise ValueError(f"axis {self.axis!r}: invalid wavelength range")
        if self._check:
            lam = np.linspace(self.lambda_min_um, self.lambda_max_um, 512)
            with np.errstate(divide="ignore", invalid="ignore"):
                n2 = self._n2_um(lam)
            if not np.all(np.isfinite(n2) & (n2 > 1.0)):
                raise ValueError(
                    f"axis {self.axis!r}: n^2 must exceed 1 everywhere in "
                    f"[{self.lambda_min_um}, {self.lambda_max_um}] um"
                )

    @classmethod
    def constant(cls, index: float, axis: str = "const", lambda_min_um=0.2, lambda_max_um=5.0):
        """Dispersionless axis with fixed refractive index."""
        return cls(axis, index**2, (), (), 0.0, lambda_min_um, lambda_max_um, "constant index")

    @property
    def lambda_min(self) -> float:
        return self.lambda_min_um * 1e-6

    @property
    def lambda_max(self) -> float:
        return self.lambda_max_um * 1e-6

    def _n2_um(self, lam_um):
        inv = 1.0 / lam_um**2
        out = self.A - self.D * lam_um**2
        for b, cc in zip(self.B, self.C):
            out = out + b / (1.0 - cc * inv)
        return out

    def check_wavelength(self, wavelength):
        wl = np.atleast_1d(np.asarray(wavelength, dtype=float))
        ok = (wl >= self.lambda_min) & (wl <= self.lambda_max)
        if not np.all(ok):
            bad = wl[~ok][0]
            raise WavelengthRangeError(
                f"wavelength {float(bad) * 1e9:.3f} nm outside the valid range "
                f"[{self.lambda_min_um * 1e3:.1f}, {self.lambda_max_um * 1e3:.1f}] nm "
                f"of Sellmeier axis {self.axis!r}"
            )


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def refractive_index(sset: SellmeierSet, wavelength):
    """Phase index n at vacuum wavelength(s) in metres."""
    sset.check_wavelength(wavelength)
    lam_um = np.asarray(wavelength, dtype=float) * 1e6
    return _scalar_or_array(np.sqrt(sset._n2_um(lam_um)))


def _check_omega(sset, omega):
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega > 0)):
        raise ValueError("optical frequency must be strictly positive")
    sset.check_wavelength(2.0 * math.pi * c / omega)
    return omega


def _g_derivs(sset: SellmeierSet, omega):
    """g, dg/ds, d2g/ds2 with s = omega^2."""
    s = omega * omega
    inv_lam2 = BETA * s
    g = sset.A - sset.D / inv_lam2
    g1 = sset.D / (BETA * s * s)
    g2 = -2.0 * sset.D / (BETA * s * s * s)
    for b, cc in zip(sset.B, sset.C):
        den = 1.0 - cc * inv_lam2
        if np.any(np.abs(den) < 1e-12):
            raise SingularityError(
                f"Sellmeier pole of axis {sset.axis!r} at {math.sqrt(cc) * 1e3:.3f} nm"
            )
        g = g + b / den
        g1 = g1 + b * cc * BETA / den**2
        g2 = g2 + 2.0 * b * cc**2 * BETA**2 / den**3
    return g, g1, g2


def _n_derivs(sset, omega):
    g, g1, g2 = _g_derivs(sset, omega)
    n = np.sqrt(g)
    f1 = 2.0 * omega * g1
    f2 = 2.0 * g1 + 4.0 * omega * omega * g2
    n1 = f1 / (2.0 * n)
    n2 = f2 / (2.0 * n) - f1 * f1 / (4.0 * n**3)
    return n, n1, n2


def wavevector(sset: SellmeierSet, omega):
    """k(omega) = n omega / c in rad/m."""
    omega = _check_omega(sset, omega)
    lam_um = 2.0 * math.pi * c / omega * 1e6
    n = np.sqrt(sset._n2_um(lam_um))
    return _scalar_or_array(n * omega / c)


def group_slowness(sset: SellmeierSet, omega):
    """k' = dk/domega = (n + omega n') / c in s/m (inverse group velocity)."""
    omega = _check_omega(sset, omega)
    n, n1, _ = _n_derivs(sset, omega)
    return _scalar_or_array((n + omega * n1) / c)


def gvd(sset: SellmeierSet, omega):
    """k'' = d2k/domega2 = (2 n' + omega n'') / c in s^2/m."""
    omega = _check_omega(sset, omega)
    _, n1, n2 = _n_derivs(sset, omega)
    return _scalar_or_array((2.0 * n1 + omega * n2) / c)


# -- data file -------------------------------------------------------------

_REQUIRED = ("A", "B", "C", "lambda_min_um", "lambda_max_um", "citation")


def parse_sellmeier_data(data: dict, source: str = "<memory>") -> dict[str, SellmeierSet]:
    axes = data.get("axes")
    if not isinstance(axes, dict) or not axes:
        raise ConfigError(f"{source}: missing [axes.<name>] sections")
    out = {}
    for name, sec in axes.items():
        for key in _REQUIRED:
            if key not in sec:
                raise ConfigError(f"{source}: axis {name!r}: missing field {key!r}")
        try:
            B = [float(v) for v in sec["B"]]
            C = [float(v) for v in sec["C"]]
        except (TypeError, ValueError):
            raise ConfigError(f"{source}: axis {name!r}: fields 'B' and 'C' must be lists of numbers") from None
        for key in ("A", "D", "lambda_min_um", "lambda_max_um"):
            if key in sec and not isinstance(sec[key], (int, float)):
                raise ConfigError(f"{source}: axis {name!r}: field {key!r} must be a number")
        try:
            out[name] = SellmeierSet(
                axis=name,
                A=float(sec["A"]),
                B=tuple(B),
                C=tuple(C),
                D=float(sec.get("D", 0.0)),
                lambda_min_um=float(sec["lambda_min_um"]),
                lambda_max_um=float(sec["lambda_max_um"]),
                citation=str(sec["citation"]),
            )
        except ValueError as exc:
            raise ConfigError(f"{source}: {exc}") from None
    return out


def load_sellmeier_file(path=None) -> dict[str, SellmeierSet]:
    """Load every axis from a Sellmeier TOML file (default: shipped KTP)."""
    path = Path(path) if path is not None else DEFAULT_SELLMEIER_FILE
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"Sellmeier file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_sellmeier_data(data, str(path))
