"""TOML configuration files: crystal, pump, detection and run configs.

Every loader raises :class:`ConfigError` naming the file and the offending
field; TOML syntax errors carry the parser's line and column.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .counts import DetectionConfig
from .dispersion import SellmeierSet, load_sellmeier_file
from .errors import ConfigError
from .jsa import PumpSpec
from .phasematch import CrystalSpec

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

DATA_DIR = Path(__file__).with_name("data")
DEFAULT_RUN_CONFIG = DATA_DIR / "default_run.toml"


def read_toml(path) -> dict:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    except IsADirectoryError:
        raise ConfigError(f"expected a file, got a directory: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _section(data, name, source):
    sec = data.get(name)
    if not isinstance(sec, dict):
        raise ConfigError(f"{source}: missing [{name}] section")
    return sec


def _get(sec, key, source, section, kind=float, default=...):
    if key not in sec:
        if default is ...:
            raise ConfigError(f"{source}: [{section}] missing field {key!r}")
        return default
    val = sec[key]
    try:
        if kind is float:
            if isinstance(val, bool):
                raise TypeError
            return float(val)
        if kind is int:
            if isinstance(val, bool) or int(val) != val:
                raise TypeError
            return int(val)
        if kind == "pair":
            if len(val) != 2:
                raise TypeError
            return (float(val[0]), float(val[1]))
        if kind is str:
            if not isinstance(val, str):
                raise TypeError
            return val
    except (TypeError, ValueError):
        raise ConfigError(f"{source}: [{section}] field {key!r} has invalid value {val!r}") from None
    raise AssertionError(kind)


def load_crystal(path, sellmeier: dict[str, SellmeierSet]) -> CrystalSpec:
    src = str(path)
    sec = _section(read_toml(path), "crystal", src)
    axes = {}
    for wave in ("pump", "signal", "idler"):
        name = _get(sec, f"{wave}_axis", src, "crystal", str)
        if name not in sellmeier:
            raise ConfigError(
                f"{src}: [crystal] field '{wave}_axis' names axis {name!r}, "
                f"not in Sellmeier file (have {sorted(sellmeier)})"
            )
        axes[wave] = sellmeier[name]
    period = _get(sec, "period_um", src, "crystal", float, None)
    try:
        return CrystalSpec(
            length=_get(sec, "length_mm", src, "crystal") * 1e-3,
            period=None if period is None else period * 1e-6,
            order=_get(sec, "order", src, "crystal", int, 1),
            **axes,
        )
    except ValueError as exc:
        raise ConfigError(f"{src}: {exc}") from None


def load_pump(path) -> PumpSpec:
    src = str(path)
    sec = _section(read_toml(path), "pump", src)
    mode = _get(sec, "mode", src, "pump", str)
    fwhm = _get(sec, "fwhm_nm", src, "pump", float, None)
    try:
        return PumpSpec(
            mode=mode,
            center_wavelength=_get(sec, "center_nm", src, "pump") * 1e-9,
            fwhm_bandwidth=None if fwhm is None else fwhm * 1e-9,
        )
    except ValueError as exc:
        raise ConfigError(f"{src}: {exc}") from None


@dataclass(frozen=True)
class Observations:
    singles_per_gate: tuple[float, float] | None = None
    pair_probability_per_gate: float | None = None
    coincidence_rate_per_s: float | None = None
    accidental_probability_per_gate: float | None = None


def load_detection(path) -> tuple[DetectionConfig, Observations]:
    src = str(path)
    data = read_toml(path)
    sec = _section(data, "detection", src)
    g = lambda key, kind=float, default=...: _get(sec, key, src, "detection", kind, default)
    trans = sec.get("transmission")
    if isinstance(trans, (int, float)) and not isinstance(trans, bool):
        trans = (float(trans), float(trans))
    else:
        trans = g("transmission", "pair")
    try:
        cfg = DetectionConfig(
            efficiency=g("efficiency", "pair"),
            dark_rate=g("dark_rate_per_s", "pair"),
            gate_width=g("gate_width_s"),
            gate_rate=g("gate_rate_hz"),
            window=g("window_s"),
            transmission=trans,
            pair_rate=g("pair_rate_per_s", float, None),
            splitting=g("splitting", float, 0.5),
            metadata=dict(sec.get("metadata", {})),
        )
    except ValueError as exc:
        raise ConfigError(f"{src}: {exc}") from None
    obs = data.get("observed", {})
    o = lambda key, kind=float: _get(obs, key, src, "observed", kind, None)
    return cfg, Observations(
        singles_per_gate=o("singles_per_gate", "pair"),
        pair_probability_per_gate=o("pair_probability_per_gate"),
        coincidence_rate_per_s=o("coincidence_rate_per_s"),
        accidental_probability_per_gate=o("accidental_probability_per_gate"),
    )


@dataclass(frozen=True)
class RunConfig:
    sellmeier_path: Path
    crystal_path: Path
    pump_path: Path
    pump_cw_path: Path
    pump_narrowband_path: Path
    detection_path: Path
    out_dir: Path = Path("out")
    grid_n: int | None = None
    grid_half_span: float | None = None
    delay_points: int = 601
    delay_half_range: float | None = None
    epm_search: tuple[float, float] = (700e-9, 900e-9)
    wavelengths: tuple[float, ...] = (792e-9, 1584e-9)
    seed: int = 0
    source: str = field(default="<defaults>", compare=False)

    def override(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def sellmeier(self) -> dict[str, SellmeierSet]:
        return load_sellmeier_file(self.sellmeier_path)

    def crystal(self) -> CrystalSpec:
        return load_crystal(self.crystal_path, self.sellmeier())

    def pump(self) -> PumpSpec:
        return load_pump(self.pump_path)

    def pump_cw(self) -> PumpSpec:
        return load_pump(self.pump_cw_path)

    def pump_narrowband(self) -> PumpSpec:
        return load_pump(self.pump_narrowband_path)

    def detection(self):
        return load_detection(self.detection_path)


def load_run_config(path=None) -> RunConfig:
    path = Path(path) if path is not None else DEFAULT_RUN_CONFIG
    src = str(path)
    data = read_toml(path)
    base = path.parent
    files = _section(data, "files", src)
    p = lambda key: base / _get(files, key, src, "files", str)
    grid = data.get("grid", {})
    delays = data.get("delays", {})
    epm = data.get("epm", {})
    disp = data.get("dispersion", {})
    search = epm.get("search_nm", [700.0, 900.0])
    wls = disp.get("wavelengths_nm", [792.0, 1584.0])
    try:
        search = tuple(float(v) * 1e-9 for v in search)
        wls = tuple(float(v) * 1e-9 for v in wls)
    except (TypeError, ValueError):
        raise ConfigError(f"{src}: [epm]/[dispersion] wavelength lists must be numbers") from None
    if len(search) != 2:
        raise ConfigError(f"{src}: [epm] field 'search_nm' needs two values")
    return RunConfig(
        sellmeier_path=p("sellmeier"),
        crystal_path=p("crystal"),
        pump_path=p("pump"),
        pump_cw_path=p("pump_cw"),
        pump_narrowband_path=p("pump_narrowband"),
        detection_path=p("detection"),
        out_dir=Path(_get(data.get("output", {}), "dir", src, "output", str, "out")),
        grid_n=_get(grid, "n", src, "grid", int, None),
        grid_half_span=_get(grid, "half_span_rad_per_s", src, "grid", float, None),
        delay_points=_get(delays, "points", src, "delays", int, 601),
        delay_half_range=_get(delays, "half_range_s", src, "delays", float, None),
        epm_search=search,
        wavelengths=wls,
        seed=_get(data, "seed", src, "top level", int, 0),
        source=src,
    )
