"""Gated Geiger-mode detection statistics for photon pairs.

Pairs arrive as a Poisson process. Each photon reaches a detector through a
path transmission t (interferometer and fibre coupling combined). Outside the
HOM dip the 50-50 coupler sends the two photons to different detectors half
the time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

DEFAULT_SPLITTING = 0.5


@dataclass(frozen=True)
class DetectionConfig:
    efficiency: tuple[float, float]  # eta_1, eta_2
    dark_rate: tuple[float, float]  # counts/s
    gate_width: float  # s
    gate_rate: float  # gates/s
    window: float  # coincidence window, s
    transmission: tuple[float, float]  # per-photon path transmission to D1, D2
    pair_rate: float | None = None  # pairs/s produced in the collected mode
    splitting: float = DEFAULT_SPLITTING
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        t = self.transmission
        if isinstance(t, (int, float)):
            object.__setattr__(self, "transmission", (float(t), float(t)))
        for name in ("efficiency", "dark_rate", "transmission"):
            v = getattr(self, name)
            if len(v) != 2:
                raise ValueError(f"{name} needs one value per detector")
            object.__setattr__(self, name, (float(v[0]), float(v[1])))
        for name in ("efficiency", "transmission"):
            if not all(0.0 <= v <= 1.0 for v in getattr(self, name)):
                raise ValueError(f"{name} values must lie in [0, 1]")
        if min(self.dark_rate) < 0:
            raise ValueError("dark rates must be non-negative")
        if not (self.gate_width > 0 and self.gate_rate > 0):
            raise ValueError("gate width and gate rate must be positive")
        if self.gate_width * self.gate_rate > 1:
            raise ValueError("gate width times gate rate exceeds 1")
        if not 0 < self.window <= self.gate_width:
            raise ValueError("coincidence window must satisfy 0 < window <= gate width")
        if self.pair_rate is not None and self.pair_rate < 0:
            raise ValueError("pair rate must be non-negative")
        if not 0 < self.splitting <= 1:
            raise ValueError("splitting factor must lie in (0, 1]")

    @property
    def duty_cycle(self) -> float:
        return self.gate_width * self.gate_rate

    def with_pair_rate(self, pair_rate):
        return replace(self, pair_rate=pair_rate)


def paper_detection_config(pair_rate: float | None = 4e6) -> DetectionConfig:
    """InGaAs gated counters at ~1580 nm: 16%/24% efficiency, 40/20 dark counts/s,
    20 ns gates at 50 kHz, 1.8 ns window, 65% interferometer x 30% fibre coupling."""
    return DetectionConfig(
        efficiency=(0.16, 0.24),
        dark_rate=(40.0, 20.0),
        gate_width=20e-9,
        gate_rate=50e3,
        window=1.8e-9,
        transmission=(0.65 * 0.30, 0.65 * 0.30),
        pair_rate=pair_rate,
        metadata={"gate_excess_bias_V": 3.9},
    )


def singles_probability(cfg: DetectionConfig, flux: float, detector: int = 0) -> float:
    """Per-gate click probability 1 - exp(-(eta phi + d) T_g)."""
    if flux < 0:
        raise ValueError("photon flux must be non-negative")
    rate = cfg.efficiency[detector] * flux + cfg.dark_rate[detector]
    return -math.expm1(-rate * cfg.gate_width)


def dark_count_probability(cfg: DetectionConfig, detector: int = 0) -> dict:
    """Dark-count probability per gate under two bookkeeping conventions.

    ``per_gate``: continuous dark rate integrated over one gate, d T_g.
    ``per_gate_over_duty``: the same divided by the duty cycle, i.e. the dark
    counts per second spread over the gates fired in that second, d / R_g.
    """
    d = cfg.dark_rate[detector]
    p = -math.expm1(-d * cfg.gate_width)
    return {"per_gate": p, "per_gate_over_duty": p / cfg.duty_cycle}


def accidental_probability(p1: float, p2: float, window: float, gate_width: float) -> float:
    """P1 P2 (window / gate): uncorrelated clicks uniformly spread over the gate."""
    if not (0 <= p1 <= 1 and 0 <= p2 <= 1):
        raise ValueError("probabilities must lie in [0, 1]")
    if not 0 < window <= gate_width:
        raise ValueError("need 0 < window <= gate width")
    return p1 * p2 * (window / gate_width)


@dataclass(frozen=True)
class CoincidenceRates:
    singles_prob: tuple[float, float]
    true_prob: float
    accidental_prob: float
    gate_rate: float

    @property
    def singles_rate(self) -> tuple[float, float]:
        return (self.singles_prob[0] * self.gate_rate, self.singles_prob[1] * self.gate_rate)

    @property
    def true_rate(self) -> float:
        return self.true_prob * self.gate_rate

    @property
    def accidental_rate(self) -> float:
        return self.accidental_prob * self.gate_rate

    def rows(self):
        """(quantity, per gate, per second) triples."""
        return [
            ("singles_D1", self.singles_prob[0], self.singles_rate[0]),
            ("singles_D2", self.singles_prob[1], self.singles_rate[1]),
            ("true_coincidence", self.true_prob, self.true_rate),
            ("accidental_coincidence", self.accidental_prob, self.accidental_rate),
        ]


def pair_probability_per_gate(cfg: DetectionConfig, pair_rate: float) -> float:
    """R_pair t1 t2 eta1 eta2 T_g * splitting."""
    t1, t2 = cfg.transmission
    e1, e2 = cfg.efficiency
    return pair_rate * t1 * t2 * e1 * e2 * cfg.gate_width * cfg.splitting


def coincidence_rates(cfg: DetectionConfig) -> CoincidenceRates:
    if cfg.pair_rate is None:
        raise ValueError("detection config has no pair rate")
    singles = tuple(
        singles_probability(cfg, cfg.pair_rate * cfg.transmission[j], j) for j in (0, 1)
    )
    return CoincidenceRates(
        singles_prob=singles,
        true_prob=pair_probability_per_gate(cfg, cfg.pair_rate),
        accidental_prob=accidental_probability(singles[0], singles[1], cfg.window, cfg.gate_width),
        gate_rate=cfg.gate_rate,
    )


@dataclass(frozen=True)
class PairRateEstimate:
    pair_rate: float
    factors: dict  # every multiplicative factor between pair rate and observed rate


def infer_pair_rate(observed_rate: float, cfg: DetectionConfig) -> PairRateEstimate:
    """Invert the true-coincidence model for the source pair rate.

    observed = R_pair * duty * t1 t2 * eta1 eta2 * splitting, where
    duty = T_g R_g converts per-gate probability to counts per second.
    """
    if observed_rate <= 0:
        raise ValueError("observed coincidence rate must be positive")
    factors = {
        "duty_cycle": cfg.duty_cycle,
        "transmission_product": cfg.transmission[0] * cfg.transmission[1],
        "efficiency_product": cfg.efficiency[0] * cfg.efficiency[1],
        "splitting": cfg.splitting,
    }
    denom = math.prod(factors.values())
    if denom == 0:
        raise ZeroDivisionError("zero efficiency, transmission or duty cycle: pair rate unobservable")
    return PairRateEstimate(observed_rate / denom, factors)


def flux_for_singles(cfg: DetectionConfig, probability: float, detector: int = 0) -> float:
    """Photon flux at the detector giving the requested per-gate click probability."""
    if not 0 <= probability < 1:
        raise ValueError("probability must lie in [0, 1)")
    total = -math.log1p(-probability) / cfg.gate_width
    eta = cfg.efficiency[detector]
    if eta == 0:
        raise ZeroDivisionError("zero efficiency")
    return max(0.0, (total - cfg.dark_rate[detector]) / eta)


def tune_transmission_to_singles(cfg: DetectionConfig, singles: tuple[float, float]) -> DetectionConfig:
    """Per-arm transmissions reproducing the given per-gate singles at cfg.pair_rate."""
    if not cfg.pair_rate:
        raise ValueError("tuning needs a positive pair rate")
    t = tuple(flux_for_singles(cfg, singles[j], j) / cfg.pair_rate for j in (0, 1))
    return replace(cfg, transmission=t)
