import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from epmspdc.dispersion import SellmeierSet, omega_from_wavelength
from epmspdc.errors import BracketError, InfeasibleError, NumericError
from epmspdc.phasematch import (
    CrystalSpec,
    Regime,
    biphoton_coherence_time,
    epm_bandwidth,
    output_tuning_width_nm,
    phase_mismatch,
    phase_mismatch_curvature,
    phase_mismatch_slope,
    phasematch_bandwidth,
    regime_check,
    signal_idler_walkoff,
    sinc_fwhm_bandwidth,
    solve_epm_point,
    solve_grating_period,
)
from epmspdc.roots import bisect_secant

from . import oracles


def _deg(crystal, lam):
    w = omega_from_wavelength(lam)
    return phase_mismatch(crystal, w, 0.5 * w)


# -- crystal spec --------------------------------------------------------

def test_crystal_validation(ktp):
    y, z = ktp["y"], ktp["z"]
    with pytest.raises(ValueError, match="different axes"):
        CrystalSpec(0.01, y, y, y)
    with pytest.raises(ValueError, match="odd"):
        CrystalSpec(0.01, y, y, z, order=2)
    with pytest.raises(ValueError):
        CrystalSpec(-0.01, y, y, z)
    with pytest.raises(ValueError):
        CrystalSpec(0.01, y, y, z, period=0.0)


# -- phase mismatch -------------------------------------------------------

def test_dispersionless_degenerate_mismatch_vanishes(const_crystal):
    w = omega_from_wavelength(800e-9)
    k = 2.0 * w / 299792458.0
    assert abs(phase_mismatch(const_crystal, w, 0.5 * w)) <= 1e-15 * k


def test_solved_period_cancels_mismatch(crystal):
    lam = 792e-9
    cr = crystal.with_period(solve_grating_period(crystal, lam))
    assert abs(_deg(cr, lam)) < 1e-3
    assert abs(_deg(cr, lam)) < 1e-6  # exact algebraic inverse


@pytest.mark.parametrize("lam", [760e-9, 792e-9, 830e-9])
def test_sign_flips_across_solved_period(crystal, lam):
    period = solve_grating_period(crystal, lam)
    lo = _deg(crystal.with_period(0.99 * period), lam)
    hi = _deg(crystal.with_period(1.01 * period), lam)
    assert lo * hi < 0


def test_period_oracle(crystal):
    assert solve_grating_period(crystal, oracles.EPM_PUMP_WAVELENGTH) == pytest.approx(
        oracles.EPM_PERIOD, rel=1e-10
    )
    assert solve_grating_period(crystal, 792e-9) * 1e6 == pytest.approx(46.15, abs=1.0)


@pytest.mark.parametrize("m", [1, 3, 5])
def test_doubling_order_doubles_period(crystal, m):
    assert solve_grating_period(crystal, 792e-9, order=2 * m) == 2 * solve_grating_period(crystal, 792e-9, order=m)


def test_crystal_order_used_by_default(crystal):
    p1 = solve_grating_period(crystal, 792e-9)
    assert solve_grating_period(replace(crystal, order=3), 792e-9) == pytest.approx(3 * p1, rel=1e-15)
    with pytest.raises(ValueError):
        solve_grating_period(crystal, 792e-9, order=0)


def test_infeasible_when_no_mismatch():
    a = SellmeierSet.constant(1.7, "a")
    b = SellmeierSet.constant(1.7, "b")
    cr = CrystalSpec(0.01, a, a, b)
    with pytest.raises(InfeasibleError):
        solve_grating_period(cr, 800e-9)


# -- slope and EPM solver ------------------------------------------------

def test_dispersionless_slope_zero(const_crystal):
    assert phase_mismatch_slope(const_crystal, omega_from_wavelength(800e-9)) == pytest.approx(0, abs=1e-24)


def test_epm_point_oracle(epm):
    assert epm.pump_wavelength == pytest.approx(oracles.EPM_PUMP_WAVELENGTH, rel=1e-10)
    assert epm.period == pytest.approx(oracles.EPM_PERIOD, rel=1e-9)
    assert 782e-9 <= epm.pump_wavelength <= 802e-9
    assert epm.dk_slope_residual < 1e-18
    assert epm.dk_residual < 1e-6


def test_slope_changes_sign_within_30nm(crystal, epm):
    lam = epm.pump_wavelength
    lo = phase_mismatch_slope(crystal, omega_from_wavelength(lam - 30e-9))
    hi = phase_mismatch_slope(crystal, omega_from_wavelength(lam + 30e-9))
    assert lo * hi < 0


def test_rerun_on_returned_point_is_bit_identical(crystal, epm):
    again = solve_epm_point(crystal, (epm.pump_wavelength, epm.pump_wavelength))
    assert again.pump_wavelength == epm.pump_wavelength
    assert again.period == epm.period


def test_no_root_in_short_interval(crystal):
    with pytest.raises(BracketError):
        solve_epm_point(crystal, (700e-9, 750e-9))


@pytest.mark.parametrize("interval", [(750e-9, 850e-9), (780e-9, 900e-9), (900e-9, 700e-9)])
def test_interval_independence(crystal, epm, interval):
    other = solve_epm_point(crystal, interval)
    assert other.pump_wavelength == pytest.approx(epm.pump_wavelength, abs=2e-15)


def test_solution_residuals_by_reevaluation(epm):
    cr = epm.crystal
    w = omega_from_wavelength(epm.pump_wavelength)
    assert abs(phase_mismatch(cr, w, 0.5 * w)) < 1e-6
    assert abs(phase_mismatch_slope(cr, w)) < 1e-18
    assert epm.omega_c > 0 and epm.omega_epm > 0 and epm.tau_c > 0


# -- bandwidths -----------------------------------------------------------

def test_bandwidth_formula_arithmetic():
    walk_l = 142e-15 / 1e-3 * 10e-3  # 142 fs/mm over 10 mm
    assert 2 * math.pi / walk_l == pytest.approx(4.42e12, rel=2e-3)
    assert biphoton_coherence_time(2 * math.pi * 1e12) == pytest.approx(1e-12, rel=1e-15)


def test_walkoff_oracle(epm_crystal, epm):
    walk = signal_idler_walkoff(epm_crystal, epm.pump_wavelength) * epm_crystal.length
    assert walk == pytest.approx(oracles.EPM_WALKOFF_TIMES_L, rel=1e-9)


def test_coherence_time_identity(epm_crystal, epm):
    lam = epm.pump_wavelength
    tau = biphoton_coherence_time(phasematch_bandwidth(epm_crystal, lam))
    walk = abs(signal_idler_walkoff(epm_crystal, lam)) * epm_crystal.length
    assert tau == pytest.approx(walk, rel=1e-15)


def test_sinc_fwhm_relation(epm_crystal, epm):
    lam = epm.pump_wavelength
    ratio = sinc_fwhm_bandwidth(epm_crystal, lam) / phasematch_bandwidth(epm_crystal, lam)
    assert ratio == pytest.approx(4 * oracles.SINC2_HALF_MAX_X / (2 * math.pi), rel=1e-12)


@pytest.mark.parametrize("factor", [0.5, 2.0])
def test_length_scaling(epm_crystal, epm, factor):
    lam = epm.pump_wavelength
    other = epm_crystal.with_length(epm_crystal.length * factor)
    assert phasematch_bandwidth(other, lam) == pytest.approx(phasematch_bandwidth(epm_crystal, lam) / factor, rel=1e-14)
    assert epm_bandwidth(other, lam) == pytest.approx(epm_bandwidth(epm_crystal, lam) / math.sqrt(factor), rel=1e-14)


def test_quadruple_length_halves_epm_bandwidth(epm_crystal, epm):
    lam = epm.pump_wavelength
    assert epm_bandwidth(epm_crystal.with_length(0.04), lam) == pytest.approx(
        0.5 * epm_bandwidth(epm_crystal, lam), rel=1e-14
    )


def test_curvature_oracle_and_epm_width(epm_crystal, epm):
    w = omega_from_wavelength(epm.pump_wavelength)
    curv = phase_mismatch_curvature(epm_crystal, w)
    assert curv == pytest.approx(oracles.EPM_CURVATURE, rel=1e-8)
    expected = 2 * math.sqrt(4 * oracles.SINC2_HALF_MAX_X / (abs(oracles.EPM_CURVATURE) * 0.01))
    assert epm.omega_epm == pytest.approx(expected, rel=1e-8)
    expected0 = 2 * math.sqrt(4 * math.pi / (abs(oracles.EPM_CURVATURE) * 0.01))
    assert epm.omega_epm_first_zero == pytest.approx(expected0, rel=1e-8)


def test_epm_much_wider_than_coherence_bandwidth(epm):
    assert epm.omega_epm / epm.omega_c > 10


def test_output_tuning_width_conversion():
    # d = 2 pi c * 1e-9 / (1.6e-6)^2 * 2 is 1 nm of output tuning at 1600 nm
    d = 2 * 2 * math.pi * 299792458.0 * 1e-9 / (1.6e-6) ** 2
    assert output_tuning_width_nm(d, 800e-9) == pytest.approx(1.0, rel=1e-14)


def test_unknown_bandwidth_definition(epm_crystal, epm):
    with pytest.raises(ValueError):
        epm_bandwidth(epm_crystal, epm.pump_wavelength, "rms")


# -- regime --------------------------------------------------------------

def test_regime_examples():
    assert regime_check(1.0, 1.0, 10.0) is Regime.VIOLATED
    assert regime_check(1.0, 100.0, 1e4, ratio=100) is Regime.SATISFIED
    assert regime_check(1.0, 1.5, 10.0) is Regime.MARGINAL
    assert regime_check(1.0, 5.0, 4.0) is Regime.VIOLATED


def test_regime_at_quoted_widths():
    """2.5 nm and 67 nm at 1584 nm, 6 nm pump at 792 nm, as output-photon widths."""
    to_w = lambda dl, lam: 2 * math.pi * 299792458.0 * dl / lam**2
    oc = to_w(2.5e-9, 1584e-9)
    op = 0.5 * to_w(6e-9, 792e-9)  # pump frequency width shared by two photons
    oe = to_w(67e-9, 1584e-9)
    assert regime_check(oc, op, oe, 2.0) is Regime.SATISFIED


@given(st.floats(1e9, 1e13), st.floats(1.0, 1e3), st.floats(1.0, 1e3))
def test_regime_monotone(oc, a, b):
    r = regime_check(oc, a * oc, a * b * oc, ratio=2.0)
    if a > 2 and b > 2:
        assert r is Regime.SATISFIED
    if a <= 1 or b <= 1:
        assert r is Regime.VIOLATED


# -- root finder ---------------------------------------------------------

@given(st.floats(-0.9, 0.9))
def test_bisect_secant_finds_cubic_root(r):
    f = lambda x: (x - r) ** 3 + (x - r)
    root = bisect_secant(f, -1.0, 1.0, xtol=1e-14)
    assert root.x == pytest.approx(r, abs=1e-13)


def test_bisect_secant_errors():
    with pytest.raises(BracketError):
        bisect_secant(lambda x: x * x + 1, -1.0, 1.0, xtol=1e-12)
    with pytest.raises(NumericError):
        bisect_secant(lambda x: math.nan, -1.0, 1.0, xtol=1e-12)


def test_bisect_secant_endpoint_root():
    assert bisect_secant(lambda x: x, 0.0, 1.0, xtol=1e-12).x == 0.0


def test_array_mismatch_matches_scalar(epm_crystal):
    wp = omega_from_wavelength(790e-9)
    ws = 0.5 * wp + np.linspace(-1e13, 1e13, 5)
    arr = phase_mismatch(epm_crystal, wp, ws)
    assert np.array_equal(arr, [phase_mismatch(epm_crystal, wp, w) for w in ws])
