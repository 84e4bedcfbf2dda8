from pathlib import Path

import pytest

from epmspdc.config import DATA_DIR, load_crystal, load_detection, load_pump, load_run_config
from epmspdc.errors import ConfigError


def test_default_run_config_resolves_files(run_config):
    for name in ("sellmeier_path", "crystal_path", "pump_path", "pump_cw_path",
                 "pump_narrowband_path", "detection_path"):
        assert getattr(run_config, name).is_file()
    assert run_config.epm_search == pytest.approx((700e-9, 900e-9))
    assert run_config.grid_n is None


def test_override_ignores_none(run_config):
    r = run_config.override(grid_n=256, out_dir=None)
    assert r.grid_n == 256 and r.out_dir == run_config.out_dir


def test_shipped_crystal_and_pumps(run_config):
    cr = run_config.crystal()
    assert cr.length == pytest.approx(0.01)
    assert (cr.pump.axis, cr.signal.axis, cr.idler.axis) == ("y", "y", "z")
    assert cr.period is None
    assert run_config.pump().fwhm_bandwidth == pytest.approx(6e-9)
    assert run_config.pump_cw().mode == "cw"
    assert run_config.pump_narrowband().fwhm_bandwidth == pytest.approx(0.05e-9)


def test_unknown_axis_named(tmp_path, ktp):
    p = tmp_path / "c.toml"
    p.write_text('[crystal]\nlength_mm = 10\npump_axis = "y"\nsignal_axis = "x"\nidler_axis = "z"\n')
    with pytest.raises(ConfigError, match="signal_axis.*'x'"):
        load_crystal(p, ktp)


def test_missing_field_named(tmp_path):
    p = tmp_path / "p.toml"
    p.write_text('[pump]\nmode = "pulsed"\nfwhm_nm = 6\n')
    with pytest.raises(ConfigError, match="center_nm"):
        load_pump(p)


def test_invalid_values_rejected(tmp_path, ktp):
    p = tmp_path / "c.toml"
    p.write_text('[crystal]\nlength_mm = 10\norder = 2\npump_axis = "y"\nsignal_axis = "y"\nidler_axis = "z"\n')
    with pytest.raises(ConfigError, match="odd"):
        load_crystal(p, ktp)
    p.write_text('[crystal]\nlength_mm = "ten"\npump_axis = "y"\nsignal_axis = "y"\nidler_axis = "z"\n')
    with pytest.raises(ConfigError, match="length_mm"):
        load_crystal(p, ktp)


def test_syntax_error_has_line(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text("[files]\nsellmeier = \n")
    with pytest.raises(ConfigError, match="line 2"):
        load_run_config(p)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_run_config(tmp_path / "absent.toml")


def test_detection_scalar_transmission(tmp_path):
    src = (DATA_DIR / "detection_paper.toml").read_text()
    p = tmp_path / "d.toml"
    p.write_text(src.replace("transmission = [0.195, 0.195]", "transmission = 0.195"))
    cfg, _ = load_detection(p)
    assert cfg.transmission == (0.195, 0.195)


def test_relative_paths_resolve_against_file(tmp_path):
    text = (DATA_DIR / "default_run.toml").read_text()
    for name in ("ktp_sellmeier", "ppktp_10mm", "pump_pulsed", "pump_cw", "pump_narrowband", "detection_paper"):
        (tmp_path / f"{name}.toml").write_text((DATA_DIR / f"{name}.toml").read_text())
    (tmp_path / "run.toml").write_text(text)
    r = load_run_config(tmp_path / "run.toml")
    assert r.crystal_path == tmp_path / "ppktp_10mm.toml"
    assert Path(r.source) == tmp_path / "run.toml"
