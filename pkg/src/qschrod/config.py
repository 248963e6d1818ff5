"""Experiment configuration files.

A config is a flat TOML table. ``include`` pulls in a shipped preset (by
name) or another file (by path), and the including file's keys win::

    include = "fig2a"
    n = 60

``e_ref = "auto"`` places the lowest analytic level inside the energy window
(see :func:`qschrod.phase_estimation.calibrate_e_ref`).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError, DomainError
from .evolution import Coulomb, Harmonic, PotentialSpec, SquareWell
from .mesh import MeshConvention, SampledWavefunction
from .phase_estimation import (
    RESCALE,
    PhaseAnchor,
    PhaseEstimationConfig,
    SpectrumResult,
    calibrate_e_ref,
    phase_estimate,
    random_state_average,
)
from .reference import INITIAL_STATES, analytic_levels, initial_state_library

ALIASES = {
    "ho-ground": "fig2a",
    "well-sym-ground": "fig10",
    "coulomb-ground": "fig13",
}

POTENTIALS = {
    "harmonic": (Harmonic, "omega"),
    "square_well": (SquareWell, "v0"),
    "coulomb": (Coulomb, "kappa"),
}

_TYPES = {
    "include": str,
    "description": str,
    "potential": str,
    "omega": float,
    "v0": float,
    "kappa": float,
    "w": int,
    "s": int,
    "t": float,
    "n": int,
    "e_ref": (float, str),
    "convention": str,
    "power_mode": str,
    "initial": str,
    "random_count": int,
    "random_seed": int,
    "anchor_x": float,
    "output": str,
}


def _presets_dir():
    return resources.files("qschrod") / "presets"


def list_presets() -> dict[str, str]:
    """Preset name -> description, aliases included."""
    out = {}
    natural = lambda p: [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", p.name)]
    for entry in sorted(_presets_dir().iterdir(), key=natural):
        if entry.name.endswith(".toml"):
            data = tomllib.loads(entry.read_text())
            out[entry.name[:-5]] = data.get("description", "")
    for alias, target in ALIASES.items():
        out[alias] = f"alias of {target}: {out.get(target, '')}"
    return out


def _line_of(text: str, key: str) -> int | None:
    m = re.search(rf"^\s*{re.escape(key)}\s*=", text, re.MULTILINE)
    return text[: m.start()].count("\n") + 1 if m else None


def _read(source: str | Path, seen: tuple = ()) -> tuple[dict, dict[str, str]]:
    """Raw merged table and, per key, a ``file:line`` location for diagnostics."""
    name = str(source)
    name = ALIASES.get(name, name)
    path = Path(name)
    if path.is_file():
        text, label = path.read_text(), str(path)
    else:
        preset = _presets_dir() / f"{name}.toml"
        if not preset.is_file():
            raise ConfigError(f"{name}: no such config file or preset")
        text, label = preset.read_text(), f"preset {name}"
    if label in seen:
        raise ConfigError(f"{label}: include cycle")
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{label}: {exc}") from None
    where = {k: f"{label}:{_line_of(text, k)}" for k in data}
    merged, merged_where = {}, {}
    if "include" in data:
        inc = data["include"]
        if not isinstance(inc, str):
            raise ConfigError(f"{where['include']}: field 'include' must be a string")
        if not Path(inc).is_absolute() and path.is_file() and (path.parent / inc).is_file():
            inc = str(path.parent / inc)
        merged, merged_where = _read(inc, seen + (label,))
    merged.update(data)
    merged_where.update(where)
    merged.pop("include", None)
    return merged, merged_where


@dataclass
class ExperimentConfig:
    name: str
    potential: str
    strength: float
    w: int = 4
    s: int = 4
    t: float = 0.045
    n: int = 30
    e_ref: float | str = "auto"
    convention: str = "symmetric"
    power_mode: str = RESCALE
    initial: str | None = None
    random_count: int | None = None
    random_seed: int | None = None
    anchor_x: float | None = None
    description: str = ""
    output: str | None = None

    def potential_spec(self) -> PotentialSpec:
        cls, _ = POTENTIALS[self.potential]
        return cls(self.strength)

    def mesh(self) -> MeshConvention:
        return MeshConvention(self.convention, 2**self.s)

    def resolved_e_ref(self) -> float:
        if isinstance(self.e_ref, str):
            return calibrate_e_ref(analytic_levels(self.potential_spec(), 1)[0], self.t)
        return float(self.e_ref)

    def phase_config(self) -> PhaseEstimationConfig:
        return PhaseEstimationConfig(
            w=self.w,
            s=self.s,
            t=self.t,
            n=self.n,
            e_ref=self.resolved_e_ref(),
            convention=self.mesh(),
            power_mode=self.power_mode,
        )

    @property
    def is_random(self) -> bool:
        return self.random_count is not None

    def initial_state(self) -> SampledWavefunction:
        omega = self.strength if self.potential == "harmonic" else 100.0
        return initial_state_library(self.initial, self.mesh(), omega)

    def anchor(self) -> PhaseAnchor:
        return PhaseAnchor(self.anchor_x)

    def run(self) -> SpectrumResult:
        pot, cfg = self.potential_spec(), self.phase_config()
        if self.is_random:
            return random_state_average(pot, cfg, self.random_count, self.random_seed)
        return phase_estimate(self.initial_state(), pot, cfg)


def _check_type(key, value, loc):
    want = _TYPES[key]
    if want is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    kinds = want if isinstance(want, tuple) else (want,)
    if float in kinds and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, kinds) or isinstance(value, bool):
        names = " or ".join(k.__name__ for k in kinds)
        raise ConfigError(f"{loc}: field '{key}' must be {names}, got {value!r}")
    return value


def load_config(source: str | Path) -> ExperimentConfig:
    """Parse a config file or preset name into a validated :class:`ExperimentConfig`."""
    data, where = _read(source)
    loc = lambda k: where.get(k, str(source))
    for key in data:
        if key not in _TYPES:
            raise ConfigError(f"{loc(key)}: unknown field '{key}'")
        data[key] = _check_type(key, data[key], loc(key))

    pot = data.get("potential")
    if pot not in POTENTIALS:
        raise ConfigError(
            f"{loc('potential')}: field 'potential' must be one of {', '.join(POTENTIALS)}, got {pot!r}"
        )
    _, strength_key = POTENTIALS[pot]
    for other in ("omega", "v0", "kappa"):
        if other in data and other != strength_key:
            raise ConfigError(f"{loc(other)}: field '{other}' does not apply to potential '{pot}'")
    if strength_key not in data:
        raise ConfigError(f"{source}: potential '{pot}' needs field '{strength_key}'")

    has_initial = "initial" in data
    has_random = "random_count" in data or "random_seed" in data
    if has_initial == has_random:
        raise ConfigError(f"{source}: give exactly one of 'initial' or 'random_count'/'random_seed'")
    if has_initial and data["initial"] not in INITIAL_STATES:
        raise ConfigError(
            f"{loc('initial')}: unknown initial state {data['initial']!r}; "
            f"valid names: {', '.join(INITIAL_STATES)}"
        )
    if has_random and "random_count" not in data:
        raise ConfigError(f"{loc('random_seed')}: field 'random_count' is required with 'random_seed'")
    if isinstance(data.get("e_ref"), str) and data["e_ref"] != "auto":
        raise ConfigError(f"{loc('e_ref')}: field 'e_ref' must be a number or \"auto\"")
    if "t" in data and not (data["t"] > 0 and math.isfinite(data["t"])):
        raise ConfigError(f"{loc('t')}: field 't' must be positive so that dt = t/n > 0")
    if "n" in data and data["n"] < 1:
        raise ConfigError(f"{loc('n')}: field 'n' must be >= 1 so that dt = t/n > 0")

    name = Path(str(source)).stem if Path(str(source)).is_file() else ALIASES.get(str(source), str(source))
    kwargs = {k: v for k, v in data.items() if k not in ("potential", strength_key)}
    cfg = ExperimentConfig(name=name, potential=pot, strength=data[strength_key], **kwargs)
    try:
        cfg.potential_spec().check(cfg.mesh())
        cfg.phase_config()
    except DomainError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return cfg
