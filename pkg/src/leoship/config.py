"""
INI-style configuration with mandatory unit suffixes.

Example::

    [constellation]
    n_sats = 1000
    n_channels = 10
    altitude = 1200 km

    [link]
    p_bd = 80 W
    g_bd = 2 dBi
    sigma2_bd = -174 dBm/Hz      # multiplied by b_bd
    b_bd = 30 MHz

    [scenario]
    r_bd = 40 nmile
    tau = 10 dB

    [sweep]
    axis = tau_db
    values = -10:30:1            # or a comma list
    engines = theory, mc_distributional

Every key is optional except ``axis`` and ``values`` inside ``[sweep]``;
omitted keys take the reference values of :func:`leoship.model.default_scenario`.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError, InvalidArgumentError
from .fading import FadingSpec, RicianParams
from .model import NMILE_KM, Scenario, default_scenario

__all__ = [
    "AXES",
    "ENGINES",
    "SweepSpec",
    "parse_quantity",
    "parse_values",
    "load_config",
    "build",
    "read_raw",
]

AXES = ("tau_db", "n_sats", "altitude_km", "r_bd_nmile", "n_channels")
ENGINES = ("theory", "mc_distributional", "mc_positional")


@dataclass(frozen=True)
class SweepSpec:
    """A one-axis sweep over a base scenario."""

    base: Scenario
    axis: str
    values: tuple
    engines: tuple = ("theory",)
    mc_trials: int = 100_000
    seed: int = 1
    capacity: bool = True
    label: str = ""

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"unknown axis {self.axis!r}; expected one of {AXES}", "sweep.axis")
        if not self.values:
            raise ConfigError("values must be non-empty", "sweep.values")
        vals = tuple(self.values)
        if list(vals) != sorted(vals):
            raise ConfigError("values must be sorted ascending", "sweep.values")
        object.__setattr__(self, "values", vals)
        bad = [e for e in self.engines if e not in ENGINES]
        if bad or not self.engines:
            raise ConfigError(f"engines must be a non-empty subset of {ENGINES}", "sweep.engines")
        object.__setattr__(self, "engines", tuple(self.engines))
        if self.mc_trials < 1:
            raise ConfigError("mc_trials must be >= 1", "sweep.mc_trials")

    def scenario_at(self, value) -> Scenario:
        """Base scenario with the swept field replaced by ``value``."""
        b = self.base
        if self.axis == "tau_db":
            return b.with_tau_db(float(value))
        if self.axis == "r_bd_nmile":
            return replace(b, r_bd_km=float(value) * NMILE_KM)
        if self.axis == "altitude_km":
            return b.with_constellation(altitude_km=float(value))
        return b.with_constellation(**{self.axis: int(value)})


# --------------------------------------------------------------------------
# Quantities
# --------------------------------------------------------------------------

_NUM = r"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
_QTY = re.compile(rf"^\s*{_NUM}\s*([A-Za-z/]*)\s*$")

_UNITS = {
    "power": {"w": 1.0, "mw": 1e-3, "dbw": "dbw", "dbm": "dbm"},
    "noise": {"w": 1.0, "mw": 1e-3, "dbw": "dbw", "dbm": "dbm", "dbm/hz": "psd"},
    "gain": {"dbi": "db", "db": "db", "linear": 1.0},
    "ratio": {"db": "db", "linear": 1.0},
    "bandwidth": {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9},
    "length": {"m": 1e-3, "km": 1.0, "nmile": NMILE_KM, "nmi": NMILE_KM},
    "number": {"": 1.0},
    "count": {"": 1.0},
}


def parse_quantity(text: str, kind: str, key: str, bandwidth_hz: float | None = None) -> float:
    """Parse ``"<number> <unit>"`` into canonical units.

    Canonical units: watts, linear gain, Hz, km.  ``dBm/Hz`` noise needs
    ``bandwidth_hz``.  Dimensionless kinds (``number``, ``count``) take a
    bare number.
    """
    m = _QTY.match(text)
    if not m:
        raise ConfigError(f"cannot parse {text!r} as a number with unit", key)
    value, unit = float(m.group(1)), m.group(2).lower()
    table = _UNITS[kind]
    if unit not in table:
        allowed = ", ".join(repr(u) for u in table if u) or "a bare number"
        if unit == "":
            raise ConfigError(f"a unit suffix is required in {text!r}; use {allowed}", key)
        raise ConfigError(f"unit {unit!r} not accepted; use {allowed}", key)
    if not math.isfinite(value):
        raise ConfigError("value must be finite", key)
    rule = table[unit]
    if rule in ("db", "dbw"):
        return 10 ** (value / 10)
    if rule == "dbm":
        return 10 ** (value / 10) / 1000
    if rule == "psd":
        if bandwidth_hz is None:
            raise ConfigError("dBm/Hz needs a bandwidth", key)
        return 10 ** (value / 10) / 1000 * bandwidth_hz
    if kind == "count":
        if value != int(value):
            raise ConfigError(f"expected an integer, got {text!r}", key)
        return int(value)
    return value * rule


def parse_values(text: str, key: str = "sweep.values", integer: bool = False) -> tuple:
    """Parse ``a, b, c`` or an inclusive ``start:stop:step`` range."""
    text = text.strip()
    if not text:
        raise ConfigError("empty value list", key)
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise ValueError
            n = int(math.floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1
            vals = [parts[0] + i * parts[2] for i in range(n)]
            vals = [round(v, 12) for v in vals]
        else:
            vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse {text!r}; use 'a, b, c' or 'start:stop:step'", key) from None
    if not vals:
        raise ConfigError("empty value list", key)
    if integer:
        if any(v != int(v) for v in vals):
            raise ConfigError("values must be integers for this axis", key)
        vals = [int(v) for v in vals]
    return tuple(vals)


# --------------------------------------------------------------------------
# Schema
# --------------------------------------------------------------------------

_SCHEMA = {
    "constellation": {"n_sats": "count", "n_channels": "count", "altitude": "length",
                      "earth_radius": "length"},
    "link": {"p_bd": "power", "p_u": "power", "p_d": "power", "p_i": "power",
             "g_bd": "gain", "g_u": "gain", "g_d": "gain", "g_i": "gain",
             "alpha_bd": "number", "alpha": "number",
             "sigma2_bd": "noise", "sigma2_u": "noise", "sigma2_d": "noise",
             "b_bd": "bandwidth", "b_esd": "bandwidth"},
    "fading": {"k_rician": "ratio", "sr_b": "number", "sr_m": "count", "sr_omega": "number"},
    "scenario": {"r_bd": "length", "tau": "ratio"},
    "sweep": {"axis": "text", "values": "text", "engines": "text", "mc_trials": "count",
              "seed": "count", "capacity": "text"},
}
_NOISE_BW = {"sigma2_bd": "b_bd", "sigma2_u": "b_esd", "sigma2_d": "b_esd"}


def read_raw(path) -> dict:
    """Read a config file into ``{"section.key": "text"}`` after schema checks."""
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", str(path)) from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed file {path}: {exc}", str(path)) from exc
    raw = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", section)
        for key, text in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError("unknown key", f"{section}.{key}")
            raw[f"{section}.{key}"] = text.strip().strip('"').strip("'")
        if section == "sweep":
            raw.setdefault("sweep.axis", None)
            raw.setdefault("sweep.values", None)
    return raw


def _get(raw, full_key, bandwidth_hz=None):
    section, key = full_key.split(".")
    return parse_quantity(raw[full_key], _SCHEMA[section][key], full_key, bandwidth_hz)


def build(raw: dict) -> Scenario | SweepSpec:
    """Turn ``{"section.key": text}`` into a validated Scenario or SweepSpec."""
    for full_key in raw:
        section, _, key = full_key.partition(".")
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError("unknown key", full_key)
    base = default_scenario()
    try:
        con = base.constellation
        con_kw = {}
        for key, field_name in (("n_sats", "n_sats"), ("n_channels", "n_channels"),
                                ("altitude", "altitude_km"), ("earth_radius", "earth_radius_km")):
            if f"constellation.{key}" in raw:
                con_kw[field_name] = _get(raw, f"constellation.{key}")
        con = replace(con, **con_kw) if con_kw else con

        link_kw = {}
        for key in ("b_bd", "b_esd"):
            if f"link.{key}" in raw:
                link_kw[key] = _get(raw, f"link.{key}")
        for key in _SCHEMA["link"]:
            if key in link_kw or f"link.{key}" not in raw:
                continue
            bw = link_kw.get(_NOISE_BW.get(key), getattr(base.link, _NOISE_BW.get(key, "b_bd")))
            link_kw[key] = _get(raw, f"link.{key}", bw)
        link = replace(base.link, **link_kw) if link_kw else base.link

        marine, space = base.fading.marine, base.fading.space
        if "fading.k_rician" in raw:
            marine = RicianParams(_get(raw, "fading.k_rician"))
        sr_kw = {}
        for key, field_name in (("sr_b", "b"), ("sr_m", "m"), ("sr_omega", "omega")):
            if f"fading.{key}" in raw:
                sr_kw[field_name] = _get(raw, f"fading.{key}")
        if sr_kw:
            space = replace(space, **sr_kw)

        scen_kw = {}
        if "scenario.r_bd" in raw:
            scen_kw["r_bd_km"] = _get(raw, "scenario.r_bd")
        if "scenario.tau" in raw:
            scen_kw["tau_linear"] = _get(raw, "scenario.tau")
        scenario = Scenario(con, link, FadingSpec(marine, space), **{
            "r_bd_km": base.r_bd_km, "tau_linear": base.tau_linear, **scen_kw})
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc), _guess_key(str(exc))) from exc

    if not any(k.startswith("sweep.") for k in raw):
        return scenario
    for required in ("sweep.axis", "sweep.values"):
        if not raw.get(required):
            raise ConfigError("missing required key", required)
    axis = raw["sweep.axis"]
    values = parse_values(raw["sweep.values"], integer=axis in ("n_sats", "n_channels"))
    engines = tuple(e.strip() for e in raw.get("sweep.engines", "theory").split(",") if e.strip())
    capacity_text = raw.get("sweep.capacity", "yes").lower()
    if capacity_text not in ("yes", "no", "true", "false"):
        raise ConfigError("expected yes/no", "sweep.capacity")
    return SweepSpec(
        base=scenario, axis=axis, values=values, engines=engines,
        mc_trials=_get(raw, "sweep.mc_trials") if "sweep.mc_trials" in raw else 100_000,
        seed=_get(raw, "sweep.seed") if "sweep.seed" in raw else 1,
        capacity=capacity_text in ("yes", "true"),
    )


def _guess_key(message: str) -> str | None:
    for section, keys in _SCHEMA.items():
        for key in keys:
            if message.startswith(key) or f" {key} " in message:
                return f"{section}.{key}"
    return None


def load_config(path, overrides: dict | None = None) -> Scenario | SweepSpec:
    """Load a config file; ``overrides`` (``{"section.key": text}``) win over the file."""
    raw = read_raw(path) if path is not None else {}
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build(raw)
