"""Toolkit configuration: one TOML file wiring every module.

The file has one section per subsystem; CLI flags override file values
and the fully merged dict is what gets written into campaign manifests,
so a manifest is itself a valid config that reproduces the campaign.
Unknown sections or keys are rejected.

The pulse nominals shipped here are the calibrated optimum of the default
system (found once with scripts/calibrate_nominal.py and frozen): the
quarter-rotation amplitude, the half-derivative quadrature coefficient,
and zero drive detuning.
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .harness import CampaignConfig
from .hyperopt import RatingConfig
from .optimizers import ALGORITHMS
from .orbit import OrbitConfig
from .problems import AnalyticProblem, OrbitProblem, analytic_problem
from .pulses import DragParams, drag_parameter_space, pwc_parameter_space
from .system import SystemConfig

ENV_CONFIG_PATH = "ORBITCAL_CONFIG"

DEFAULTS = {
    "system": {
        "qubit_frequency": 4.8e9,
        "anharmonicity": -200e6,
        "levels": 3,
        "dt": 1.0 / (64 * 4.8e9),
    },
    "pulse": {
        "mode": "drag",
        "gate_time": 15e-9,
        "gauss_width": 3.75e-9,
        "phase": 0.0,
        "amplitude": 196827144.11732188,
        "drag_coeff": 3.9262807708692615e-10,
        "detuning": 0.0,
        "amplitude_bounds": [0.0, 8.0e8],
        "drag_bounds": [-4.0e-9, 4.0e-9],
        "detuning_bounds": [-2.0e7, 2.0e7],
        "pwc_num_steps": 41,
        "pwc_halfwidth_frac": 0.4,
    },
    "orbit": {
        "num_sequences": 20,
        "sequence_length": 20,
        "target": "excited",
        "shots": 0,  # 0: exact measurement
        "sequence_seed": 7,
        "infidelity_floor": 1e-9,
        "resample_sequences": False,
    },
    "campaign": {
        "problem": "drag",
        "optimizers": [
            "cmaes",
            "nelder_mead",
            "powell",
            "one_plus_one",
            "differential_evolution",
            "simulated_annealing",
        ],
        "num_seeds": 20,
        "eval_budget": 1000,
        "detuning_fraction": 0.05,
        "output_dir": "campaign_out",
    },
    "hyperopt": {
        "slope_weight": 100.0,
        "final_weight": 1.0,
        "tail_length": 50,
        "num_seeds": 20,
        "inner_budget": 500,
        "meta_budget": 30,
    },
    "run": {
        "global_seed": 0,
        "workers": 0,  # 0: all available cores
    },
    "hyperparams": {},  # optional [hyperparams.<algorithm>] override tables
}


class ConfigError(ValueError):
    """Bad config file: unknown keys, wrong types, or invalid values."""


def _merge_section(section, defaults, overrides, path):
    merged = copy.deepcopy(defaults)
    for key, value in overrides.items():
        if key not in defaults:
            raise ConfigError(f"unknown key {path}.{key}")
        default = defaults[key]
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{path}.{key} must be a boolean")
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{path}.{key} must be an integer")
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{path}.{key} must be a number")
            value = float(value)
        elif isinstance(default, str):
            if not isinstance(value, str):
                raise ConfigError(f"{path}.{key} must be a string")
        elif isinstance(default, list):
            if not isinstance(value, list):
                raise ConfigError(f"{path}.{key} must be a list")
        merged[key] = value
    return merged


def merge_config(overrides: dict) -> dict:
    """Validate a parsed TOML dict against the schema and fill defaults."""
    if not isinstance(overrides, dict):
        raise ConfigError("config root must be a table")
    merged = {}
    for section, defaults in DEFAULTS.items():
        sub = overrides.get(section, {})
        if not isinstance(sub, dict):
            raise ConfigError(f"[{section}] must be a table")
        if section == "hyperparams":
            merged[section] = _merge_hyperparams(sub)
        else:
            merged[section] = _merge_section(section, defaults, sub, section)
    for key in overrides:
        if key not in DEFAULTS:
            raise ConfigError(f"unknown section [{key}]")
    return merged


def _merge_hyperparams(sub: dict) -> dict:
    out = {}
    for tag, table in sub.items():
        if tag not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm [hyperparams.{tag}]")
        if not isinstance(table, dict):
            raise ConfigError(f"[hyperparams.{tag}] must be a table")
        out[tag] = dict(table)
    return out


@dataclass(frozen=True)
class ToolkitConfig:
    """Validated, fully merged configuration."""

    data: dict

    # -- section accessors ---------------------------------------------
    def system(self) -> SystemConfig:
        s = self.data["system"]
        return SystemConfig(
            qubit_frequency=s["qubit_frequency"],
            anharmonicity=s["anharmonicity"],
            levels=s["levels"],
            dt=s["dt"],
        )

    def base_drag(self) -> DragParams:
        p = self.data["pulse"]
        return DragParams(
            amplitude=p["amplitude"],
            drag_coeff=p["drag_coeff"],
            drive_freq=self.data["system"]["qubit_frequency"] + p["detuning"],
            phase=p["phase"],
            gate_time=p["gate_time"],
            gauss_width=p["gauss_width"],
        )

    def parameter_space(self, mode: str | None = None):
        p = self.data["pulse"]
        mode = mode or p["mode"]
        qubit_frequency = self.data["system"]["qubit_frequency"]
        if mode == "drag":
            return drag_parameter_space(
                self.base_drag(),
                qubit_frequency,
                amplitude_bounds=tuple(p["amplitude_bounds"]),
                drag_bounds=tuple(p["drag_bounds"]),
                detuning_bounds=tuple(p["detuning_bounds"]),
            )
        if mode == "pwc":
            return pwc_parameter_space(
                self.base_drag(),
                qubit_frequency,
                num_steps=p["pwc_num_steps"],
                halfwidth_frac=p["pwc_halfwidth_frac"],
            )
        raise ConfigError(f"unknown pulse mode {mode!r}")

    def orbit(self) -> OrbitConfig:
        o = self.data["orbit"]
        return OrbitConfig(
            num_sequences=o["num_sequences"],
            sequence_length=o["sequence_length"],
            target=o["target"],
            shots=o["shots"] if o["shots"] > 0 else None,
            sequence_seed=o["sequence_seed"],
            infidelity_floor=o["infidelity_floor"],
            resample_sequences=o["resample_sequences"],
        )

    def problem(self, name: str | None = None):
        name = name or self.data["campaign"]["problem"]
        if name in ("drag", "pwc"):
            return OrbitProblem(
                name=name,
                space=self.parameter_space(name),
                system=self.system(),
                orbit=self.orbit(),
            )
        if name.startswith("analytic:"):
            return analytic_problem(name)
        raise ConfigError(f"unknown problem {name!r}")

    def campaign(self) -> CampaignConfig:
        c = self.data["campaign"]
        hyperparams = self.data["hyperparams"]
        return CampaignConfig(
            problem=c["problem"],
            optimizers=tuple((tag, hyperparams.get(tag)) for tag in c["optimizers"]),
            num_seeds=c["num_seeds"],
            eval_budget=c["eval_budget"],
            detuning_fraction=c["detuning_fraction"],
            output_dir=c["output_dir"],
        )

    def rating(self) -> RatingConfig:
        h = self.data["hyperopt"]
        return RatingConfig(
            slope_weight=h["slope_weight"],
            final_weight=h["final_weight"],
            tail_length=h["tail_length"],
            num_seeds=h["num_seeds"],
            inner_budget=h["inner_budget"],
        )

    @property
    def meta_budget(self) -> int:
        return self.data["hyperopt"]["meta_budget"]

    @property
    def global_seed(self) -> int:
        return self.data["run"]["global_seed"]

    @property
    def workers(self) -> int | None:
        w = self.data["run"]["workers"]
        return w if w > 0 else None

    # -- serialization ---------------------------------------------------
    def manifest(self, version: str) -> str:
        data = copy.deepcopy(self.data)
        return f"# orbitcal {version} campaign manifest\n" + dump_toml(data)

    def override(self, section: str, key: str, value) -> "ToolkitConfig":
        data = copy.deepcopy(self.data)
        data[section][key] = value
        return ToolkitConfig(merge_config(data))


def load_config(path: str | None = None) -> ToolkitConfig:
    """Load and validate a TOML config; None falls back to env, then defaults."""
    if path is None:
        path = os.environ.get(ENV_CONFIG_PATH)
    if path is None:
        return ToolkitConfig(merge_config({}))
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from None
    return ToolkitConfig(merge_config(raw))


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = repr(value)
        if "." in text or "e" in text or "inf" in text or "nan" in text:
            return text
        return text + ".0"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__} to TOML")


def dump_toml(data: dict) -> str:
    """Serialize the (restricted) config schema deterministically."""
    lines = []
    for section, table in data.items():
        plain = {k: v for k, v in table.items() if not isinstance(v, dict)}
        subtables = {k: v for k, v in table.items() if isinstance(v, dict)}
        if plain or not subtables:
            lines.append(f"[{section}]")
            for key, value in plain.items():
                lines.append(f"{key} = {_toml_value(value)}")
            lines.append("")
        for sub, subtable in subtables.items():
            lines.append(f"[{section}.{sub}]")
            for key, value in subtable.items():
                lines.append(f"{key} = {_toml_value(value)}")
            lines.append("")
    return "\n".join(lines)
