"""Run and verifier-suite configuration, parsed from and echoed to JSON.

Every field has an explicit default, and ``to_dict`` writes all of them so the
echo in ``summary.json`` is a complete record of the run.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

from .evolution import EvolutionConfig, step_count
from .model import ModelParams
from .spectral import SpectralGrid


class ConfigError(ValueError):
    """Malformed or out-of-range configuration."""


INITIAL_KINDS = ("gaussian", "modulated_gaussian", "eigen_projected_plane_wave", "file")
AMPLITUDE_MODES = ("peak", "l2", "h_half")
SNAPSHOT_MODES = ("none", "final", "all")
VERIFY_CHECKS = (
    "bernstein",
    "dyadic_multiplier",
    "product_estimate",
    "brezis_gallouet",
    "kernel_bound",
    "kernel_lp",
    "potential_term",
)


def _build(cls, data: Any, where: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _finite(value, what: str, positive: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{what} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ValueError(f"{what} must be finite")
    if positive and not value > 0:
        raise ValueError(f"{what} must be positive, got {value}")


@dataclass
class GridSection:
    n: int = 128
    L: float = 16 * math.pi

    def __post_init__(self):
        _finite(self.L, "L", positive=True)
        self.grid  # validates n

    @property
    def grid(self) -> SpectralGrid:
        return SpectralGrid(self.n, float(self.L))


@dataclass
class ModelSection:
    m: float = 1.0
    b: float = 1.0
    density_form: str = "gamma0"
    coupling_sign: int = -1

    def __post_init__(self):
        _finite(self.m, "m")
        _finite(self.b, "b")
        self.params

    @property
    def params(self) -> ModelParams:
        return ModelParams(float(self.m), float(self.b), self.density_form, self.coupling_sign)


@dataclass
class PicardSection:
    window_T: float = 0.1
    tol: float = 1e-12
    max_iter: int = 50
    quad_nodes: int = 17


@dataclass
class EvolutionSection:
    method: str = "strang"
    dt: float = 1e-2
    t_final: float = 1.0
    picard: PicardSection = field(default_factory=PicardSection)
    ladder: Optional[list] = None
    reference_dt: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.picard, dict) or self.picard is None:
            self.picard = _build(PicardSection, self.picard, "evolution.picard")
        if self.ladder is not None:
            if not isinstance(self.ladder, list):
                raise ValueError("ladder must be a list of time steps")
            for h in self.ladder:
                _finite(h, "ladder entry", positive=True)
        if self.reference_dt is not None:
            _finite(self.reference_dt, "reference_dt", positive=True)


@dataclass
class InitialDataSection:
    kind: str = "gaussian"
    parameters: dict = field(default_factory=dict)
    amplitude: float = 1.0
    amplitude_mode: str = "peak"

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ValueError(f"kind must be one of {INITIAL_KINDS}, got {self.kind!r}")
        if self.amplitude_mode not in AMPLITUDE_MODES:
            raise ValueError(f"amplitude_mode must be one of {AMPLITUDE_MODES}")
        if not isinstance(self.parameters, dict):
            raise ValueError("parameters must be an object")
        _finite(self.amplitude, "amplitude")
        if self.kind == "file" and "path" not in self.parameters:
            raise ValueError("kind 'file' needs parameters.path")
        if self.kind in ("modulated_gaussian", "eigen_projected_plane_wave") and "xi0" not in self.parameters:
            raise ValueError(f"kind {self.kind!r} needs parameters.xi0")


@dataclass
class DiagnosticsSection:
    s: list = field(default_factory=list)
    sample_every: int = 10
    snapshots: str = "none"

    def __post_init__(self):
        if not isinstance(self.s, list):
            raise ValueError("s must be a list")
        for v in self.s:
            _finite(v, "s entry")
        if self.snapshots not in SNAPSHOT_MODES:
            raise ValueError(f"snapshots must be one of {SNAPSHOT_MODES}")


@dataclass
class RunConfig:
    grid: GridSection = field(default_factory=GridSection)
    model: ModelSection = field(default_factory=ModelSection)
    evolution: EvolutionSection = field(default_factory=EvolutionSection)
    initial_data: InitialDataSection = field(default_factory=InitialDataSection)
    diagnostics: DiagnosticsSection = field(default_factory=DiagnosticsSection)
    seed: int = 0
    output_dir: str = "out"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("run config must be a JSON object")
        sections = {
            "grid": GridSection,
            "model": ModelSection,
            "evolution": EvolutionSection,
            "initial_data": InitialDataSection,
            "diagnostics": DiagnosticsSection,
        }
        unknown = sorted(set(data) - set(sections) - {"seed", "output_dir"})
        if unknown:
            raise ConfigError(f"unknown top-level keys {unknown}")
        kwargs = {name: _build(t, data.get(name), name) for name, t in sections.items()}
        seed = data.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError("seed must be an integer")
        out = data.get("output_dir", "out")
        if not isinstance(out, str):
            raise ConfigError("output_dir must be a string")
        cfg = cls(**kwargs, seed=seed, output_dir=out)
        cfg.evolution_config()  # cross-field validation
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    def evolution_config(self, dt: Optional[float] = None) -> EvolutionConfig:
        ev = self.evolution
        p = ev.picard
        try:
            cfg = EvolutionConfig(
                dt=float(ev.dt if dt is None else dt),
                t_final=float(ev.t_final),
                method=ev.method,
                model=self.model.params,
                picard_tol=float(p.tol),
                picard_max_iter=int(p.max_iter),
                quad_nodes=int(p.quad_nodes),
                window_T=float(p.window_T),
                sample_every=int(self.diagnostics.sample_every),
            )
            step_count(cfg.t_final, cfg.dt if cfg.method == "strang" else cfg.window_T)
            return cfg
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"evolution: {exc}") from exc


@dataclass
class VerifySuiteConfig:
    """Which verifier checks to run, with per-check sweep overrides.

    ``sweeps`` maps a check name to a partial parameter dict merged over that
    check's defaults.
    """

    which: list = field(default_factory=lambda: ["bernstein"])
    sweeps: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "."

    def __post_init__(self):
        if not isinstance(self.which, list) or not self.which:
            raise ConfigError("which must be a nonempty list of checks")
        bad = [w for w in self.which if w not in VERIFY_CHECKS]
        if bad:
            raise ConfigError(f"unknown checks {bad}; choose from {VERIFY_CHECKS}")
        if len(set(self.which)) != len(self.which):
            raise ConfigError("which lists a check twice")
        if not isinstance(self.sweeps, dict):
            raise ConfigError("sweeps must be an object")
        bad = [k for k in self.sweeps if k not in VERIFY_CHECKS]
        if bad:
            raise ConfigError(f"sweeps given for unknown checks {bad}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")

    @classmethod
    def from_dict(cls, data: dict) -> "VerifySuiteConfig":
        return _build(cls, data, "verify suite")

    def to_dict(self) -> dict:
        return asdict(self)


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def load_run_config(path) -> RunConfig:
    return RunConfig.from_dict(load_json(path))


def load_verify_config(path) -> VerifySuiteConfig:
    return VerifySuiteConfig.from_dict(load_json(path))


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
