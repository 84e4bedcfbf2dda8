"""Pulsed HOM visibility and spectral entanglement away from the EPM point.

Scans a grating-period offset and a pump-centre offset around the solved
operating point and writes one CSV row per setting:

    python scripts/epm_deviation_scan.py --out out/epm_scan.csv
"""

import argparse
import csv
from dataclasses import replace
from pathlib import Path

from epmspdc import hom, jsa
from epmspdc.config import load_run_config
from epmspdc.phasematch import solve_epm_point


def evaluate(crystal, pump, delay_points):
    a = jsa.joint_spectral_amplitude(crystal, pump, jsa.default_grid(crystal, pump))
    lam = pump.center_wavelength
    delays = hom.default_delays(crystal, lam, hom.expected_dip_center(crystal, lam), delay_points)
    curve = hom.hom_coincidence_curve(a, delays)
    return {
        "visibility": hom.visibility(curve),
        "schmidt_K": jsa.schmidt_decompose(a).schmidt_number,
        "rho": jsa.frequency_correlation(a),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--out", type=Path, default=Path("out/epm_deviation_scan.csv"))
    ap.add_argument("--period-offsets-um", type=float, nargs="+",
                    default=[-0.5, -0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2, 0.5])
    ap.add_argument("--pump-offsets-nm", type=float, nargs="+", default=[-10.0, -5.0, 0.0, 5.0, 10.0])
    ap.add_argument("--delay-points", type=int, default=401)
    args = ap.parse_args(argv)

    run = load_run_config(args.config)
    sol = solve_epm_point(run.crystal(), run.epm_search)
    pump0 = run.pump()
    rows = []
    for dp in args.period_offsets_um:
        cr = sol.crystal.with_period(sol.period + dp * 1e-6)
        rows.append({"scan": "period", "offset": dp, "unit": "um", **evaluate(cr, pump0, args.delay_points)})
    for dl in args.pump_offsets_nm:
        pump = replace(pump0, center_wavelength=pump0.center_wavelength + dl * 1e-9)
        rows.append({"scan": "pump_center", "offset": dl, "unit": "nm",
                     **evaluate(sol.crystal, pump, args.delay_points)})

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    print(f"EPM point {sol.pump_wavelength * 1e9:.3f} nm, period {sol.period * 1e6:.4f} um")
    for r in rows:
        print(f"{r['scan']:>11} {r['offset']:+7.2f} {r['unit']}: V = {r['visibility']:.4f}  "
              f"K = {r['schmidt_K']:.3f}  rho = {r['rho']:+.3f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
