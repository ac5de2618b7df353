"""Run configuration: parsing, validation, defaults, and serialization.

Config files are flat ``key = value`` text grouped into sections; keys are
globally unique so overrides can address them without naming the section.
Unset keys fall back to per-case defaults at resolve time.
"""

import configparser
import io
from dataclasses import dataclass

from . import cases
from .errors import ConfigError

MAXWELL_NAMES = {"multid": "multid", "phm": "phm",
                 "notreatment": "no_treatment", "no_treatment": "no_treatment"}
MAXWELL_CANON = {"multid": "MultiD", "phm": "PHM", "no_treatment": "NoTreatment"}
INTEGRATORS = ("explicit", "imex")


@dataclass
class SchemeConfig:
    """Everything a run needs; None fields resolve from case defaults."""

    test_case: str = ""
    maxwell_scheme: str = "multid"
    integrator: str = "imex"
    fluid_order: int = 2
    cfl: float | None = None
    t_end: float | None = None
    nx: int | None = None
    ny: int | None = None
    max_steps: int | None = None
    paper_scale: bool = False
    r_i: float | None = None
    r_e: float | None = None
    eta: float | None = None
    maxwell_source_scale: float | None = None
    kappa: float = 1.0
    xi: float = 1.0
    b0: float | None = None
    psi0: float = 0.1
    gamma_i: float | None = None
    gamma_e: float | None = None
    gem_pressure: str = "printed"
    output_dir: str = "out"
    snapshot_cadence: int = 0
    binary_snapshots: bool = False


# section -> keys, also the canonical serialization order
_SECTIONS = {
    "run": ("test_case", "nx", "ny", "t_end", "cfl", "max_steps", "paper_scale"),
    "scheme": ("maxwell_scheme", "integrator", "fluid_order"),
    "sources": ("r_i", "r_e", "eta", "maxwell_source_scale"),
    "phm": ("kappa", "xi"),
    "case": ("b0", "psi0", "gamma_i", "gamma_e", "gem_pressure"),
    "output": ("output_dir", "snapshot_cadence", "binary_snapshots"),
}
_ALIASES = {"scheme": "maxwell_scheme"}
_ALL_KEYS = {k for keys in _SECTIONS.values() for k in keys}
_INT_KEYS = ("nx", "ny", "max_steps", "fluid_order", "snapshot_cadence")
_BOOL_KEYS = ("paper_scale", "binary_snapshots")
_FLOAT_KEYS = ("cfl", "t_end", "r_i", "r_e", "eta", "maxwell_source_scale",
               "kappa", "xi", "b0", "psi0", "gamma_i", "gamma_e")


def _coerce(key, raw):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _BOOL_KEYS:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: cannot parse value {raw!r}") from exc


def _assign(cfg, key, raw, where=""):
    key = key.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in _ALL_KEYS:
        raise ConfigError(f"unknown config key {key!r}{where}; "
                          f"valid keys: {sorted(_ALL_KEYS)}")
    val = _coerce(key, raw)
    if key == "maxwell_scheme":
        name = str(val).lower().replace("-", "").replace("_", "")
        name = {"multid": "multid", "phm": "phm",
                "notreatment": "no_treatment"}.get(name)
        if name is None:
            raise ConfigError(
                f"invalid maxwell scheme {val!r}{where}; valid values: "
                f"{', '.join(MAXWELL_CANON.values())}")
        val = name
    elif key == "integrator":
        val = str(val).lower()
        if val not in INTEGRATORS:
            raise ConfigError(f"invalid integrator {val!r}{where}; "
                              f"valid values: Explicit, IMEX")
    elif key == "fluid_order" and val not in (1, 2):
        raise ConfigError(f"fluid_order must be 1 or 2, got {val}{where}")
    elif key == "gem_pressure" and val not in ("printed", "balanced"):
        raise ConfigError(f"gem_pressure must be 'printed' or 'balanced'{where}")
    setattr(cfg, key, val)


def parse_config(path):
    """Read and validate a config file; returns an unresolved SchemeConfig."""
    with open(path) as fh:
        text = fh.read()
    return parse_config_text(text)


def parse_config_text(text):
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc
    cfg = SchemeConfig()
    seen = set()
    for sec in cp.sections():
        for key, raw in cp.items(sec):
            norm = _ALIASES.get(key.strip().lower(), key.strip().lower())
            if norm in seen:
                raise ConfigError(f"duplicate config key {norm!r} in section [{sec}]")
            _assign(cfg, key, raw, where=f" in section [{sec}]")
            seen.add(norm)
    if not cfg.test_case:
        raise ConfigError("missing required key 'test_case'")
    if cfg.test_case not in cases.CASE_IDS:
        raise ConfigError(f"unknown test case {cfg.test_case!r}; "
                          f"valid cases: {', '.join(cases.CASE_IDS)}")
    return cfg


def apply_overrides(cfg, overrides):
    """Apply command-line 'key=value' overrides in order."""
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, raw = item.partition("=")
        _assign(cfg, key, raw, where=" (override)")
    return cfg


def serialize_config(cfg):
    """Render a config back to the file grammar; parses back identically."""
    out = io.StringIO()
    for sec, keys in _SECTIONS.items():
        lines = []
        for key in keys:
            val = getattr(cfg, key)
            if val is None:
                continue
            if key == "maxwell_scheme":
                val = MAXWELL_CANON[val]
            elif key == "integrator":
                val = {"explicit": "Explicit", "imex": "IMEX"}[val]
            lines.append(f"{key} = {val}")
        if lines:
            out.write(f"[{sec}]\n")
            out.write("\n".join(lines) + "\n\n")
    return out.getvalue()


def resolve_config(cfg):
    """Fill every None field from the case catalog; returns a new SchemeConfig."""
    import copy

    if cfg.test_case not in cases.CASE_IDS:
        raise ConfigError(f"unknown test case {cfg.test_case!r}; "
                          f"valid cases: {', '.join(cases.CASE_IDS)}")
    r = copy.copy(cfg)
    scale_key = "paper" if cfg.paper_scale else "desk"
    nx_d, ny_d, t_d = cases.CASE_DEFAULTS[cfg.test_case][scale_key]
    r.nx = cfg.nx if cfg.nx is not None else nx_d
    r.ny = cfg.ny if cfg.ny is not None else ny_d
    r.t_end = cfg.t_end if cfg.t_end is not None else t_d
    phys = cases.CASE_PHYSICS[cfg.test_case]
    r.gamma_i = cfg.gamma_i if cfg.gamma_i is not None else phys["gamma"]
    r.gamma_e = cfg.gamma_e if cfg.gamma_e is not None else phys["gamma"]
    r.r_i = cfg.r_i if cfg.r_i is not None else phys["r_i"]
    r.r_e = cfg.r_e if cfg.r_e is not None else phys["r_e"]
    r.eta = cfg.eta if cfg.eta is not None else phys["eta"]
    r.maxwell_source_scale = (cfg.maxwell_source_scale
                              if cfg.maxwell_source_scale is not None
                              else phys["scale"])
    r.b0 = cfg.b0 if cfg.b0 is not None else phys["b0"]
    if r.cfl is None:
        one_d = r.ny == 1
        if one_d:
            r.cfl = 0.8
        else:
            r.cfl = 0.45 if r.integrator == "imex" else 0.2
    return r
