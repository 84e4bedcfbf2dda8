import numpy as np
import pytest
from hypothesis import settings

from epmspdc.config import load_run_config
from epmspdc.dispersion import SellmeierSet, load_sellmeier_file
from epmspdc.jsa import FrequencyGrid, JointSpectralAmplitude
from epmspdc.phasematch import CrystalSpec, solve_epm_point

settings.register_profile("ci", max_examples=50, deadline=None)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def run_config():
    return load_run_config()


@pytest.fixture(scope="session")
def ktp():
    return load_sellmeier_file()


@pytest.fixture(scope="session")
def crystal(run_config):
    """Shipped crystal without a grating period."""
    return run_config.crystal()


@pytest.fixture(scope="session")
def epm(crystal):
    return solve_epm_point(crystal)


@pytest.fixture(scope="session")
def epm_crystal(epm):
    return epm.crystal


@pytest.fixture(scope="session")
def pulsed_pump(run_config):
    return run_config.pump()


@pytest.fixture(scope="session")
def narrow_pump(run_config):
    return run_config.pump_narrowband()


@pytest.fixture
def const_crystal():
    """Dispersionless n = 2 for all three waves (distinct axis labels)."""
    a = SellmeierSet.constant(2.0, "a")
    b = SellmeierSet.constant(2.0, "b")
    return CrystalSpec(length=0.01, pump=a, signal=a, idler=b)


def gaussian_jsa(n=128, width=0.15, corr=0.0, phase=None):
    """Bivariate Gaussian test amplitude on a unit-free grid scaled to ~1e15 rad/s."""
    grid = FrequencyGrid(center=1.2e15, half_span=1e13, n=n)
    x = (grid.omegas - grid.center) / grid.half_span
    xs, xi = np.meshgrid(x, x, indexing="ij")
    q = (xs**2 + xi**2 - 2 * corr * xs * xi) / (2 * width**2 * (1 - corr**2))
    a = np.exp(-q).astype(complex)
    if phase is not None:
        a = a * np.exp(1j * phase(xs, xi))
    return JointSpectralAmplitude.from_array(grid, a)


# -- acceptance summary --------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def record():
    """record(number, ok, text): store one summary line per acceptance criterion."""

    def _record(number, ok, text):
        ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}"
        print(ACCEPTANCE_LINES[number])
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
