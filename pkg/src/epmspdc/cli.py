"""Command-line front end.

Subcommands: dispersion | epm | jsa | hom | counts | reproduce.
Exit codes: 0 success, 1 physics/numeric failure, 2 config/IO failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
from scipy.constants import c

from . import counts, hom, jsa
from .config import DEFAULT_RUN_CONFIG, RunConfig, load_run_config
from .dispersion import bandwidth_to_wavelength, gvd, group_slowness, omega_from_wavelength, refractive_index, wavevector
from .errors import ConfigError, EpmError
from .phasematch import (
    CrystalSpec,
    EpmSolution,
    regime_check,
    solve_epm_point,
)
from .reproduce import Context, format_table, run_all

log = logging.getLogger("epmspdc")

PS, FS = 1e-12, 1e-15


class Report:
    """Ordered key/value report printed as aligned text or JSON."""

    def __init__(self, title):
        self.title = title
        self.items: list[tuple[str, object, str]] = []

    def add(self, key, value, unit=""):
        self.items.append((key, value, unit))

    def text(self) -> str:
        width = max((len(k) for k, _, _ in self.items), default=0)
        lines = [f"# {self.title}"]
        for k, v, u in self.items:
            v = f"{v:.8g}" if isinstance(v, float) else v
            lines.append(f"{k.ljust(width)} = {v}{' ' + u if u else ''}")
        return "\n".join(lines) + "\n"

    def as_dict(self):
        return {"title": self.title, **{k: v for k, v, _ in self.items}}


def _emit(report: Report, args, out_name: str | None = None):
    if out_name:
        path = Path(args.run.out_dir) / out_name
        path.write_text(report.text())
    if args.json:
        print(json.dumps(report.as_dict(), indent=2, default=str))
    else:
        sys.stdout.write(report.text())


def _citations(report: Report, crystal: CrystalSpec):
    seen = {}
    for wave in ("pump", "signal", "idler"):
        s = getattr(crystal, wave)
        seen.setdefault(s.axis, s.citation)
    for axis, cite in seen.items():
        report.add(f"sellmeier[{axis}]", cite)


def _crystal(args) -> tuple[CrystalSpec, EpmSolution | None]:
    """Configured crystal; solve for the EPM grating when no period is given."""
    cr = args.run.crystal()
    sol = None
    if cr.period is None:
        sol = solve_epm_point(cr, args.run.epm_search)
        cr = sol.crystal
    if args.period_offset_um:
        cr = cr.with_period(cr.period + args.period_offset_um * 1e-6)
    return cr, sol


# -- subcommands ----------------------------------------------------------

def cmd_dispersion(args) -> int:
    sets = args.run.sellmeier()
    wls = args.wavelengths_nm or [w * 1e9 for w in args.run.wavelengths]
    rows = []
    for lam_nm in wls:
        lam = lam_nm * 1e-9
        w = omega_from_wavelength(lam)
        for name, s in sets.items():
            rows.append((lam, lam_nm, name, refractive_index(s, lam), wavevector(s, w),
                         group_slowness(s, w), gvd(s, w)))
    path = Path(args.run.out_dir) / "dispersion.csv"
    with open(path, "w") as fh:
        fh.write("wavelength_m,wavelength_nm,axis,n,k_rad_per_m,k1_s_per_m,k2_s2_per_m\n")
        for r in rows:
            fh.write(f"{r[0]:.17g},{r[1]:.17g},{r[2]},{r[3]:.17g},{r[4]:.17g},{r[5]:.17g},{r[6]:.17g}\n")
    rep = Report("dispersion")
    for r in rows:
        rep.add(f"{r[1]:g} nm {r[2]}: n, group index, k'' [fs^2/mm]",
                f"{r[3]:.6f}, {r[5] * c:.6f}, {r[6] * 1e30 / 1e3:.3f}")
    for name, s in sets.items():
        rep.add(f"sellmeier[{name}]", s.citation)
    rep.add("csv", str(path))
    _emit(rep, args)
    return 0


def cmd_epm(args) -> int:
    cr = args.run.crystal()
    sol = solve_epm_point(cr, args.run.epm_search)
    rep = Report("extended phase matching")
    rep.add("pump wavelength", sol.pump_wavelength, "m")
    rep.add("pump wavelength [nm]", sol.pump_wavelength * 1e9, "nm")
    rep.add("grating period", sol.period, "m")
    rep.add("grating period [um]", sol.period * 1e6, "um")
    rep.add("residual |dk|", sol.dk_residual, "rad/m")
    rep.add("residual |dk'|", sol.dk_slope_residual, "s/m")
    rep.add("Omega_c (2 pi / |k's-k'i| L)", sol.omega_c, "rad/s")
    rep.add(f"Omega_c [nm at {sol.output_wavelength * 1e9:.1f} nm]", sol.omega_c_nm, "nm")
    rep.add("Omega_c [nm at 1584 nm]", bandwidth_to_wavelength(sol.omega_c, 1584e-9) * 1e9, "nm")
    rep.add("Omega_c sinc^2 FWHM", sol.omega_c_sinc_fwhm, "rad/s")
    rep.add("Omega_epm (pump frequency, sinc^2 FWHM)", sol.omega_epm, "rad/s")
    rep.add("Omega_epm (pump frequency, first zero)", sol.omega_epm_first_zero, "rad/s")
    rep.add(f"Omega_epm [output tuning nm at {sol.output_wavelength * 1e9:.1f} nm]", sol.omega_epm_nm, "nm")
    rep.add("Omega_epm [output tuning nm at 1584 nm]",
            bandwidth_to_wavelength(0.5 * sol.omega_epm, 1584e-9) * 1e9, "nm")
    rep.add("tau_c = |k's - k'i| L", sol.tau_c, "s")
    rep.add("tau_c [ps]", sol.tau_c / PS, "ps")
    rep.add("bandwidth conversion", "d_lambda = lambda^2 d_omega / (2 pi c)")
    try:
        pump = args.run.pump()
        if pump.mode == "pulsed":
            # compare all widths as output-photon frequency widths
            regime = regime_check(sol.omega_c, 0.5 * pump.omega_fwhm, 0.5 * sol.omega_epm)
            rep.add("regime (Omega_c << Omega_p << Omega_epm)", regime.value)
    except ConfigError:
        pass
    _citations(rep, sol.crystal)
    _emit(rep, args, "epm_report.txt")
    return 0


def cmd_jsa(args) -> int:
    cr, _ = _crystal(args)
    pump = args.run.pump()
    grid = jsa.default_grid(cr, pump, n=args.run.grid_n, half_span=args.run.grid_half_span)
    amp = jsa.joint_spectral_amplitude(cr, pump, grid, workers=args.workers)
    out = Path(args.run.out_dir)
    jsa.write_jsa_csv(amp, out / "jsa.csv")
    jsa.write_jsa_binary(amp, out / "jsa.bin")
    sch = jsa.schmidt_decompose(amp)
    rho = jsa.frequency_correlation(amp)
    s_sig, s_idl = jsa.marginal_spectra(amp)
    rep = Report("joint spectral amplitude")
    rep.add("pump", f"{pump.mode} {pump.center_wavelength * 1e9:g} nm, FWHM {pump.fwhm_bandwidth * 1e9:g} nm")
    rep.add("grid n", amp.grid.n)
    rep.add("grid half span", amp.grid.half_span, "rad/s")
    rep.add("grid step", amp.grid.step, "rad/s")
    rep.add("Schmidt number K", sch.schmidt_number)
    rep.add("purity", sch.purity)
    rep.add("leading Schmidt coefficients", ", ".join(f"{v:.5f}" for v in sch.coefficients[:5]))
    rep.add("frequency correlation rho", rho)
    rep.add("signal coherence time (|g| FWHM)", hom.field_autocorrelation_coherence_time(amp.omegas, s_sig) / FS, "fs")
    rep.add("idler coherence time (|g| FWHM)", hom.field_autocorrelation_coherence_time(amp.omegas, s_idl) / FS, "fs")
    rep.add("csv", str(out / "jsa.csv"))
    rep.add("binary", str(out / "jsa.bin"))
    _citations(rep, cr)
    _emit(rep, args, "jsa_report.txt")
    return 0


def cmd_hom(args) -> int:
    cr, _ = _crystal(args)
    npts = args.run.delay_points
    if args.mode == "cw":
        lam = args.run.pump_cw().center_wavelength
        center = 0.0
    else:
        pump = args.run.pump()
        lam = pump.center_wavelength
        center = hom.expected_dip_center(cr, lam)
    if args.run.delay_half_range:
        delays = center + np.linspace(-args.run.delay_half_range, args.run.delay_half_range, npts)
    else:
        delays = hom.default_delays(cr, lam, center, npts)

    if args.mode == "cw":
        curve = hom.cw_hom_curve(cr, lam, delays)
    else:
        grid = jsa.default_grid(cr, pump, n=args.run.grid_n, half_span=args.run.grid_half_span)
        curve = hom.hom_coincidence_curve(jsa.joint_spectral_amplitude(cr, pump, grid, workers=args.workers), delays)

    fit = hom.fit_triangular_dip(curve)
    v = hom.visibility(curve)
    v_rep = hom.leakage_adjusted_visibility(v, args.leakage) if args.leakage else v
    out = Path(args.run.out_dir)
    curve.to_csv(out / f"hom_{args.mode}.csv")

    rep = Report(f"HOM dip ({args.mode})")
    rep.add("pump wavelength [nm]", lam * 1e9, "nm")
    rep.add("grating period [um]", cr.period * 1e6, "um")
    rep.add("V", v_rep)
    rep.add("V ideal (1 - C_min/C_max)", v)
    rep.add("leakage per port", args.leakage or 0.0)
    rep.add("fit V", fit.visibility)
    rep.add("fit baseline", fit.baseline)
    rep.add("fit center", fit.center, "s")
    rep.add("fit residual rms", fit.residual_rms)
    rep.add("base width (delay)", fit.delay_width, "s")
    rep.add("base width (delay) [ps]", fit.delay_width / PS, "ps")
    rep.add("l_c (air gap)", fit.position_width, "m")
    rep.add("l_c [mm]", fit.position_width * 1e3, "mm")
    rep.add("tau_c = l_c / 2c", fit.coherence_time, "s")
    rep.add("tau_c [ps]", fit.coherence_time / PS, "ps")
    for k, e in fit.uncertainties.items():
        rep.add(f"sigma({k})", e)
    rep.add("fit iterations", fit.iterations)
    rep.add("csv", str(out / f"hom_{args.mode}.csv"))
    _citations(rep, cr)
    _emit(rep, args, f"hom_{args.mode}_fit.txt")
    return 0


def cmd_counts(args) -> int:
    cfg, obs = args.run.detection()
    rep = Report("detection statistics")
    csv_rows = []
    if cfg.pair_rate is not None:
        rates = counts.coincidence_rates(cfg)
        rep.add("model pair rate", cfg.pair_rate, "1/s")
        for name, pg, ps in rates.rows():
            rep.add(f"{name} (model)", f"{pg:.4e} per gate, {ps:.4g} per s")
            csv_rows.append(("model", name, pg, ps))
        if obs.singles_per_gate:
            tuned = counts.tune_transmission_to_singles(cfg, obs.singles_per_gate)
            rep.add("per-arm transmission matching observed singles",
                    f"{tuned.transmission[0]:.5f}, {tuned.transmission[1]:.5f}")
            for name, pg, ps in counts.coincidence_rates(tuned).rows():
                rep.add(f"{name} (tuned model)", f"{pg:.4e} per gate, {ps:.4g} per s")
                csv_rows.append(("tuned_model", name, pg, ps))
    for j in (0, 1):
        dark = counts.dark_count_probability(cfg, j)
        rep.add(f"dark D{j + 1}", f"{dark['per_gate']:.3e} per gate (d T_g); "
                               f"{dark['per_gate_over_duty']:.3e} per gate / duty (d / R_g)")
    rep.add("duty cycle", cfg.duty_cycle)
    if obs.singles_per_gate:
        p1, p2 = obs.singles_per_gate
        acc = counts.accidental_probability(p1, p2, cfg.window, cfg.gate_width)
        rep.add("accidentals from observed singles", f"{acc:.4e} per gate, {acc * cfg.gate_rate:.4g} per s")
        csv_rows.append(("observed", "accidental_coincidence", acc, acc * cfg.gate_rate))
        for j, p in enumerate(obs.singles_per_gate):
            rep.add(f"observed singles D{j + 1}", f"{p:.4e} per gate, {p * cfg.gate_rate:.4g} per s")
            csv_rows.append(("observed", f"singles_D{j + 1}", p, p * cfg.gate_rate))
    if obs.pair_probability_per_gate:
        p = obs.pair_probability_per_gate
        rep.add("observed pair probability", f"{p:.4e} per gate, {p * cfg.gate_rate:.4g} per s")
        csv_rows.append(("observed", "true_coincidence", p, p * cfg.gate_rate))
    if obs.coincidence_rate_per_s:
        est = counts.infer_pair_rate(obs.coincidence_rate_per_s, cfg)
        rep.add("inferred pair rate", est.pair_rate, "1/s")
        for k, v in est.factors.items():
            rep.add(f"  factor {k}", v)
    path = Path(args.run.out_dir) / "counts.csv"
    with open(path, "w") as fh:
        fh.write("source,quantity,per_gate,per_second\n")
        for src, name, pg, ps in csv_rows:
            fh.write(f"{src},{name},{pg:.17g},{ps:.17g}\n")
    rep.add("csv", str(path))
    _emit(rep, args, "counts_report.txt")
    return 0


def cmd_reproduce(args) -> int:
    ctx = Context(args.run, period_offset=(args.period_offset_um or 0.0) * 1e-6,
                  leakage=args.leakage if args.leakage is not None else 0.01)
    results = run_all(ctx)
    cite = {s.axis: s.citation for s in args.run.sellmeier().values()}
    table = format_table(results)
    (Path(args.run.out_dir) / "reproduce.txt").write_text(table + "\n")
    if args.json:
        print(json.dumps({"criteria": [r.as_dict() for r in results], "sellmeier": cite,
                          "all_passed": all(r.passed for r in results)}, indent=2))
    else:
        print(table)
        for axis, text in cite.items():
            print(f"sellmeier[{axis}] = {text}")
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "dispersion": cmd_dispersion,
    "epm": cmd_epm,
    "jsa": cmd_jsa,
    "hom": cmd_hom,
    "counts": cmd_counts,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help=f"run config TOML (default: {DEFAULT_RUN_CONFIG.name} shipped with the package)")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--grid-n", type=int, default=None, help="JSA grid points per axis (power of two)")
    common.add_argument("--span", type=float, default=None, help="JSA grid half-span in rad/s")
    common.add_argument("--leakage", type=float, default=None,
                        help="per-port polarization leakage applied to the reported visibility")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    common.add_argument("--pump", type=Path, default=None, help="override the pulsed pump file")
    common.add_argument("--period-offset-um", type=float, default=None,
                        help="add this offset (um) to the grating period")
    common.add_argument("--workers", type=int, default=1, help="threads for the JSA fill")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="epmspdc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("dispersion", parents=[common], help="n, k, k', k'' per axis")
    p.add_argument("--wavelengths-nm", type=lambda s: [float(v) for v in s.split(",")], default=None)
    sub.add_parser("epm", parents=[common], help="solve the extended-phase-matching point")
    sub.add_parser("jsa", parents=[common], help="joint spectrum, Schmidt and correlation analysis")
    p = sub.add_parser("hom", parents=[common], help="HOM curve and triangular-dip fit")
    p.add_argument("--mode", choices=("cw", "pulsed"), default="cw")
    sub.add_parser("counts", parents=[common], help="gated detection statistics")
    sub.add_parser("reproduce", parents=[common], help="pass/fail table of every acceptance criterion")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run: RunConfig = load_run_config(args.config)
        run = run.override(out_dir=args.out, grid_n=args.grid_n, grid_half_span=args.span,
                           seed=args.seed, pump_path=args.pump)
        Path(run.out_dir).mkdir(parents=True, exist_ok=True)
        args.run = run
        return COMMANDS[args.command](args)
    except (ConfigError, OSError) as exc:
        print(f"epmspdc: error: {exc}", file=sys.stderr)
        return 2
    except (EpmError, ValueError, ArithmeticError) as exc:
        print(f"epmspdc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
