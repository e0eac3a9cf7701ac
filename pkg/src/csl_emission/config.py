"""JSON run configuration with dotted-path overrides."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kernels import Order
from .noise import NoiseModel, make_noise
from .params import PhysicalParams
from .rates import DEFAULT_GUARD, Formula

__all__ = ["ConfigError", "SweepSpec", "ScalingStudySpec", "PhotonNumberSpec", "RunConfig",
           "DEFAULTS", "load_config", "apply_overrides", "build_config"]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key path."""


DEFAULTS = {
    "params": {},
    "noise": {"kind": "White", "tau": None},
    "sweep": {
        "k_min": 1e6,
        "k_max": 1e9,
        "n_points": 50,
        "spacing": "log",
        "formulas": ["NaiveFirstOrder", "ResummedFree"],
        "t_final": None,
        "order": "LowestOrder",
        "beta_scale": 1.0,
        "guard": DEFAULT_GUARD,
    },
    "scaling": {
        "beta_multipliers": [1.0, 2.0, 4.0, 7.0, 10.0],
        "base_beta_scale": 1e6,
        "k_fixed": 1e7,
        "t_final": 1e-14,
        "order": "LowestOrder",
    },
    "photon_number": {
        "k": 1e7,
        "times": [1e-15, 1e-14, 1e-13],
        "order": "LowestOrder",
        "beta_scale": 1.0,
    },
    "verify": {"tolerance_scale": 1.0},
}

_PARAM_KEYS = {"e", "m", "m0", "eps0", "hbar", "c", "lambda_csl", "gamma", "r_C", "omega0"}


@dataclass(frozen=True)
class SweepSpec:
    k_min: float
    k_max: float
    n_points: int
    spacing: str
    formulas: tuple
    t_final: float | None
    order: Order
    beta_scale: float
    guard: float

    def grid(self):
        if self.spacing == "log":
            ks = np.logspace(math.log10(self.k_min), math.log10(self.k_max), self.n_points)
        else:
            ks = np.linspace(self.k_min, self.k_max, self.n_points)
        # pin the endpoints exactly
        ks[0], ks[-1] = self.k_min, self.k_max
        return [float(k) for k in ks]


@dataclass(frozen=True)
class ScalingStudySpec:
    beta_multipliers: tuple
    base_beta_scale: float
    k_fixed: float
    t_final: float
    order: Order


@dataclass(frozen=True)
class PhotonNumberSpec:
    k: float
    times: tuple
    order: Order
    beta_scale: float


@dataclass(frozen=True)
class RunConfig:
    params: PhysicalParams
    noise: NoiseModel
    noise_kind: str
    tau: float | None
    sweep: SweepSpec
    scaling: ScalingStudySpec
    photon_number: PhotonNumberSpec
    tolerance_scale: float


def _merge(base, extra, path=""):
    out = copy.deepcopy(base)
    for key, value in extra.items():
        where = f"{path}{key}"
        if key not in base and not (path == "params." and key in _PARAM_KEYS):
            raise ConfigError(f"unknown config key '{where}'")
        if isinstance(base.get(key), dict):
            if not isinstance(value, dict):
                raise ConfigError(f"'{where}' must be an object")
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = value
    return out


def load_config(path: str | Path | None) -> dict:
    """Read a JSON file and merge it over :data:`DEFAULTS`."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    return _merge(DEFAULTS, raw)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(cfg: dict, overrides) -> dict:
    """Apply ``["section.key=value", ...]``; values are parsed as JSON when possible."""
    cfg = copy.deepcopy(cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' must look like section.key=value")
        path, text = item.split("=", 1)
        parts = path.split(".")
        if len(parts) != 2:
            raise ConfigError(f"override key '{path}' must be section.key")
        section, key = parts
        if section not in cfg or not isinstance(cfg[section], dict):
            raise ConfigError(f"unknown config section '{section}'")
        if key not in cfg[section] and not (section == "params" and key in _PARAM_KEYS):
            raise ConfigError(f"unknown config key '{path}'")
        cfg[section][key] = _parse_value(text)
    return cfg


def _num(cfg, section, key, *, positive=True, allow_none=False):
    value = cfg[section][key]
    where = f"{section}.{key}"
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{where}' must be a number, got {value!r}")
    if not math.isfinite(value) or value < 0 or (positive and value == 0):
        kind = "positive" if positive else "nonnegative"
        raise ConfigError(f"'{where}' must be a {kind} finite number, got {value!r}")
    return float(value)


def _enum(cls, value, where):
    try:
        return cls(value)
    except ValueError:
        raise ConfigError(f"'{where}' must be one of {[m.value for m in cls]}, got {value!r}") from None


def build_config(cfg: dict) -> RunConfig:
    """Validate a merged config dict into typed specs."""
    p = dict(cfg["params"])
    try:
        if "gamma" in p:
            if "lambda_csl" in p:
                raise ConfigError("give either 'params.gamma' or 'params.lambda_csl', not both")
            gamma = p.pop("gamma")
            r_C = p.pop("r_C", PhysicalParams().r_C)
            params = PhysicalParams.from_gamma(gamma, r_C, **p)
        else:
            params = PhysicalParams(**p)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"params: {exc}") from exc

    kind = cfg["noise"]["kind"]
    tau = _num(cfg, "noise", "tau", allow_none=True)
    try:
        noise = make_noise(kind, tau)
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from exc

    s = cfg["sweep"]
    k_min, k_max = _num(cfg, "sweep", "k_min"), _num(cfg, "sweep", "k_max")
    if k_max <= k_min:
        raise ConfigError("'sweep.k_max' must exceed 'sweep.k_min'")
    n_points = s["n_points"]
    if isinstance(n_points, bool) or not isinstance(n_points, int) or n_points < 2:
        raise ConfigError(f"'sweep.n_points' must be an integer >= 2, got {n_points!r}")
    if s["spacing"] not in ("linear", "log"):
        raise ConfigError(f"'sweep.spacing' must be 'linear' or 'log', got {s['spacing']!r}")
    formulas = s["formulas"]
    if isinstance(formulas, str):
        formulas = [formulas]
    if not formulas:
        raise ConfigError("'sweep.formulas' must not be empty")
    formulas = tuple(_enum(Formula, f, "sweep.formulas") for f in formulas)
    t_final = _num(cfg, "sweep", "t_final", allow_none=True)
    if Formula.FromPhotonNumber in formulas and t_final is None:
        raise ConfigError("'sweep.t_final' is required for FromPhotonNumber")
    sweep = SweepSpec(k_min, k_max, n_points, s["spacing"], formulas, t_final,
                      _enum(Order, s["order"], "sweep.order"),
                      _num(cfg, "sweep", "beta_scale", positive=False),
                      _num(cfg, "sweep", "guard"))

    sc = cfg["scaling"]
    mults = sc["beta_multipliers"]
    if not isinstance(mults, list) or not mults:
        raise ConfigError("'scaling.beta_multipliers' must be a non-empty list")
    if any(isinstance(x, bool) or not isinstance(x, (int, float)) or not x > 0 for x in mults):
        raise ConfigError("'scaling.beta_multipliers' must all be positive numbers")
    if list(mults) != sorted(mults):
        raise ConfigError("'scaling.beta_multipliers' must be sorted ascending")
    if len(mults) < 4:
        raise ConfigError("'scaling.beta_multipliers' needs at least 4 values for a slope fit")
    scaling = ScalingStudySpec(tuple(float(x) for x in mults),
                               _num(cfg, "scaling", "base_beta_scale"),
                               _num(cfg, "scaling", "k_fixed"),
                               _num(cfg, "scaling", "t_final"),
                               _enum(Order, sc["order"], "scaling.order"))

    pn = cfg["photon_number"]
    times = pn["times"]
    if not isinstance(times, list) or not times or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) or not x > 0 for x in times):
        raise ConfigError("'photon_number.times' must be a non-empty list of positive times")
    photon = PhotonNumberSpec(_num(cfg, "photon_number", "k"), tuple(float(x) for x in times),
                              _enum(Order, pn["order"], "photon_number.order"),
                              _num(cfg, "photon_number", "beta_scale", positive=False))

    return RunConfig(params, noise, kind, tau, sweep, scaling, photon,
                     _num(cfg, "verify", "tolerance_scale"))
