"""Regression of the headline numbers against the shipped defaults.

Each ``criterion_*`` function recomputes what it needs from a RunConfig and
returns a :class:`Criterion` holding one or more checks. ``run_all`` is what
``epmspdc reproduce`` prints.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import counts, hom, jsa
from .config import RunConfig, load_run_config
from .dispersion import bandwidth_to_wavelength
from .phasematch import solve_epm_point

PS = 1e-12


@dataclass
class Check:
    label: str
    value: float
    target: str
    passed: bool
    unit: str = ""

    def line(self) -> str:
        v = f"{self.value:.6g}" if isinstance(self.value, float) else str(self.value)
        return f"{self.label} = {v} {self.unit} (target {self.target}) {'ok' if self.passed else 'FAIL'}"


@dataclass
class Criterion:
    number: int
    title: str
    checks: list[Check] = field(default_factory=list)
    runtime: float = 0.0
    runtime_limit: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        timely = self.runtime_limit is None or self.runtime < self.runtime_limit
        return timely and all(c.passed for c in self.checks)

    def add(self, label, value, lo=None, hi=None, unit="", target=None, ok=None):
        if ok is None:
            ok = (lo is None or value >= lo) and (hi is None or value <= hi)
        if target is None:
            target = f"[{lo:.6g}, {hi:.6g}]" if lo is not None and hi is not None else (
                f">= {lo:.6g}" if lo is not None else f"<= {hi:.6g}")
        self.checks.append(Check(label, float(value), target, bool(ok), unit))

    def as_dict(self):
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "runtime_s": self.runtime,
            "runtime_limit_s": self.runtime_limit,
            "checks": [c.__dict__ for c in self.checks],
            "notes": self.notes,
        }


@dataclass
class Context:
    run: RunConfig
    period_offset: float = 0.0  # m, added to the solved grating period
    leakage: float = 0.01

    def solution(self):
        return solve_epm_point(self.run.crystal(), self.run.epm_search)

    def crystal(self):
        cr = self.solution().crystal
        return cr.with_period(cr.period + self.period_offset) if self.period_offset else cr


class _timer:
    def __init__(self, crit):
        self.crit = crit

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.crit.runtime = time.perf_counter() - self.t0


def _cw_fit(ctx):
    cr = ctx.crystal()
    lam = ctx.run.pump_cw().center_wavelength
    curve = hom.cw_hom_curve(cr, lam, hom.default_delays(cr, lam, points=ctx.run.delay_points))
    return curve, hom.fit_triangular_dip(curve)


def _pulsed(ctx, n=None):
    cr = ctx.crystal()
    pump = ctx.run.pump()
    grid = jsa.default_grid(cr, pump, n=n or ctx.run.grid_n, half_span=ctx.run.grid_half_span)
    return cr, pump, jsa.joint_spectral_amplitude(cr, pump, grid)


def _pulsed_fit(ctx, cr, pump, amp):
    center = hom.expected_dip_center(cr, pump.center_wavelength)
    delays = hom.default_delays(cr, pump.center_wavelength, center, ctx.run.delay_points)
    curve = hom.hom_coincidence_curve(amp, delays)
    return curve, hom.fit_triangular_dip(curve)


def criterion_1(ctx: Context) -> Criterion:
    crit = Criterion(1, "EPM operating point", runtime_limit=1.0)
    with _timer(crit):
        sol = ctx.solution()
    crit.add("pump wavelength", sol.pump_wavelength * 1e9, 782.0, 802.0, "nm")
    crit.add("grating period", sol.period * 1e6, 45.15, 47.15, "um")
    return crit


def criterion_2(ctx: Context) -> Criterion:
    crit = Criterion(2, "biphoton coherence time", runtime_limit=5.0)
    with _timer(crit):
        sol = ctx.solution()
        tau = sol.tau_c
        _, fit = _cw_fit(ctx)
    crit.add("tau_c = |k's - k'i| L", tau / PS, 1.42 * 0.8, 1.42 * 1.2, "ps")
    crit.add("cw dip base (delay) / tau_c", fit.delay_width / tau, 0.95, 1.05)
    crit.notes.append(
        f"dip-derived l_c = {fit.position_width * 1e3:.4f} mm -> l_c/2c = {fit.coherence_time / PS:.4f} ps"
    )
    return crit


def criterion_3(ctx: Context) -> Criterion:
    crit = Criterion(3, "EPM bandwidth", runtime_limit=1.0)
    with _timer(crit):
        sol = ctx.solution()
    nm = bandwidth_to_wavelength(0.5 * sol.omega_epm, 1584e-9) * 1e9
    crit.add("Omega_epm as output tuning width at 1584 nm", nm, 67 * 0.6, 67 * 1.4, "nm")
    crit.notes.append(f"Omega_epm = {sol.omega_epm:.4e} rad/s (pump frequency, sinc^2 FWHM)")
    return crit


def criterion_4(ctx: Context) -> Criterion:
    crit = Criterion(4, "cw HOM dip", runtime_limit=10.0)
    with _timer(crit):
        curve, fit = _cw_fit(ctx)
        v = hom.visibility(curve)
        v_leak = hom.leakage_adjusted_visibility(v, ctx.leakage)
    crit.add("fit residual RMS / baseline", fit.residual_rms / fit.baseline, hi=0.02)
    crit.add("visibility", v, 0.99, 1.01)
    crit.add(f"visibility with leakage {ctx.leakage:g}", v_leak, 0.978, 0.982)
    return crit


def criterion_5(ctx: Context) -> Criterion:
    crit = Criterion(5, "pulsed HOM dip", runtime_limit=60.0)
    with _timer(crit):
        cr, pump, amp = _pulsed(ctx)
        curve, fit = _pulsed_fit(ctx, cr, pump, amp)
        v = hom.visibility(curve)
        _, cw_fit = _cw_fit(ctx)
    crit.add("visibility", v, lo=0.90)
    rel = abs(fit.coherence_time - cw_fit.coherence_time) / cw_fit.coherence_time
    crit.add("|tau_pulsed - tau_cw| / tau_cw", rel, hi=0.15)
    crit.notes.append(
        f"pulsed tau_c = {fit.coherence_time / PS:.4f} ps, cw tau_c = {cw_fit.coherence_time / PS:.4f} ps "
        f"(l_c/2c), grid n = {amp.grid.n}"
    )
    return crit


def criterion_6(ctx: Context) -> Criterion:
    crit = Criterion(6, "coincident-frequency signature")
    with _timer(crit):
        cr, pump, amp = _pulsed(ctx, n=512)
        rho = jsa.frequency_correlation(amp)
        k512 = jsa.schmidt_decompose(amp).schmidt_number
        k256 = jsa.schmidt_decompose(_pulsed(ctx, n=256)[2]).schmidt_number
        nb = ctx.run.pump_narrowband()
        nb_amp = jsa.joint_spectral_amplitude(cr, nb, jsa.default_grid(cr, nb))
        rho_nb = jsa.frequency_correlation(nb_amp)
    drift = abs(k256 - k512) / k512
    crit.add("pulsed rho", rho, target="> 0.5", ok=rho > 0.5)
    crit.add("pulsed Schmidt K", k512, target="> 2", ok=k512 > 2.0)
    crit.add("narrowband rho", rho_nb, target="< -0.9", ok=rho_nb < -0.9)
    crit.add("|K(256) - K(512)| / K(512)", drift, target="< 0.02", ok=drift < 0.02)
    crit.notes.append(f"narrowband grid n = {nb_amp.grid.n}")
    return crit


def criterion_7(ctx: Context) -> Criterion:
    crit = Criterion(7, "biphoton vs single-photon coherence")
    with _timer(crit):
        cr, pump, amp = _pulsed(ctx)
        _, fit = _pulsed_fit(ctx, cr, pump, amp)
        s_sig, s_idl = jsa.marginal_spectra(amp)
        t_sig = hom.field_autocorrelation_coherence_time(amp.omegas, s_sig)
        t_idl = hom.field_autocorrelation_coherence_time(amp.omegas, s_idl)
    ratio = fit.delay_width / max(t_sig, t_idl)
    crit.add("biphoton base width / single-photon FWHM", ratio, target="> 3", ok=ratio > 3.0)
    crit.notes.append(
        f"signal {t_sig / 1e-15:.1f} fs, idler {t_idl / 1e-15:.1f} fs, "
        f"biphoton base {fit.delay_width / PS:.4f} ps (l_c/2c = {fit.coherence_time / PS:.4f} ps)"
    )
    return crit


def criterion_8(ctx: Context) -> Criterion:
    crit = Criterion(8, "counts arithmetic")
    with _timer(crit):
        cfg, obs = ctx.run.detection()
        p1, p2 = obs.singles_per_gate
        acc = counts.accidental_probability(p1, p2, cfg.window, cfg.gate_width)
        tuned = counts.tune_transmission_to_singles(cfg, obs.singles_per_gate)
        rates = counts.coincidence_rates(tuned)
        pair_rate_s = obs.pair_probability_per_gate * cfg.gate_rate
        est = counts.infer_pair_rate(obs.coincidence_rate_per_s, cfg)
        dark = counts.dark_count_probability(cfg, 0)
    crit.add("accidental probability per gate", acc, 5e-7 * 0.9, 5e-7 * 1.1)
    crit.add("singles rate D1", rates.singles_rate[0], 114.5, 115.5, "1/s")
    crit.add("singles rate D2", rates.singles_rate[1], 124.5, 125.5, "1/s")
    crit.add("coincidence rate from 2e-5 per gate", pair_rate_s, 0.999, 1.001, "1/s")
    crit.add("inferred pair rate", est.pair_rate, 4e6 / 4, 4e6 * 4, "1/s")
    crit.notes.append(
        f"D1 dark probability: {dark['per_gate']:.3e} per gate (d T_g), "
        f"{dark['per_gate_over_duty']:.3e} per gate / duty (d / R_g)"
    )
    return crit


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8)


def run_all(ctx: Context | None = None) -> list[Criterion]:
    ctx = ctx or Context(load_run_config())
    return [f(ctx) for f in CRITERIA]


def format_table(results: list[Criterion]) -> str:
    lines = []
    for r in results:
        limit = f" (limit {r.runtime_limit:g} s)" if r.runtime_limit else ""
        lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.number}. {r.title}  {r.runtime:.3f} s{limit}")
        lines.extend(f"       {c.line()}" for c in r.checks)
        lines.extend(f"       note: {n}" for n in r.notes)
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} criteria passed")
    return "\n".join(lines)
