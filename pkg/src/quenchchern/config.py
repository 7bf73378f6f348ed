"""Experiment configuration: parsing, validation and the bundled figure configs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .dynamics import LOCAL_TOL, SWITCH_FACTOR
from .model import ModelError, ModelParams

OUTPUTS = ("tasp_grid", "rings", "windings", "charges", "process_class", "g_sweep", "tso_sweep")
SWEEP_AXES = ("g", "t_so")


class ConfigError(ValueError):
    pass


@dataclass
class SweepSpec:
    axis: str
    values: list[float]
    m_initial: float | None = None  # g-sweep: hold s*g/t_int + m_z fixed
    n_line: int = 401
    coarse_n: int | None = None
    grid_n: int | None = None  # t_so sweep resolution; defaults to the run grid

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep values must not be empty")
        self.values = [float(v) for v in self.values]


@dataclass
class ExperimentConfig:
    name: str
    params: ModelParams
    grid_n: int = 201
    outputs: tuple[str, ...] = ("tasp_grid", "rings", "windings", "charges", "process_class")
    out_dir: str = "out"
    images: bool = True
    tol: float = LOCAL_TOL
    switch_factor: float = SWITCH_FACTOR
    full_integration: bool = False
    threads: int | None = None
    sweep: SweepSpec | None = None
    description: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise ConfigError(f"unknown outputs {bad}; choose from {OUTPUTS}")
        if self.grid_n < 3:
            raise ConfigError("grid_n must be >= 3")
        needs_rings = {"rings", "windings", "charges", "process_class"} & set(self.outputs)
        if needs_rings and self.grid_n < 41:
            raise ConfigError("ring outputs need grid_n >= 41")
        if not self.tol > 0 or not 0 < self.switch_factor < 1:
            raise ConfigError("tol must be positive and 0 < switch_factor < 1")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads must be >= 1")
        for kind in ("g_sweep", "tso_sweep"):
            if kind in self.outputs and (self.sweep is None
                                         or self.sweep.axis != ("g" if kind == "g_sweep" else "t_so")):
                raise ConfigError(f"output {kind} needs a matching sweep section")

    @property
    def numerics(self) -> dict:
        return {"tol": self.tol, "switch_factor": self.switch_factor,
                "full_integration": self.full_integration, "threads": self.threads}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        try:
            params = ModelParams(**d.pop("model"))
        except KeyError:
            raise ConfigError("config needs a 'model' section") from None
        except (TypeError, ModelError) as exc:
            raise ConfigError(f"invalid model parameters: {exc}") from exc
        num = d.pop("numerics", {}) or {}
        sweep = d.pop("sweep", None)
        try:
            sw = SweepSpec(**sweep) if sweep else None
            return cls(params=params, sweep=sw, tol=num.get("tol", LOCAL_TOL),
                       switch_factor=num.get("switch_factor", SWITCH_FACTOR),
                       full_integration=num.get("full_integration", False),
                       threads=num.get("threads"),
                       outputs=tuple(d.pop("outputs", cls.outputs)), **d)
        except TypeError as exc:
            raise ConfigError(f"bad config field: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "model": self.params.to_dict(),
            "grid_n": self.grid_n,
            "outputs": list(self.outputs),
            "out_dir": self.out_dir,
            "images": self.images,
            "numerics": {"tol": self.tol, "switch_factor": self.switch_factor,
                         "full_integration": self.full_integration, "threads": self.threads},
            "sweep": asdict(self.sweep) if self.sweep else None,
            "extra": self.extra,
        }

    def replace(self, **changes) -> "ExperimentConfig":
        d = self.to_dict()
        num = d["numerics"]
        for k in ("tol", "switch_factor", "full_integration", "threads"):
            if k in changes:
                num[k] = changes.pop(k)
        d.update(changes)
        return ExperimentConfig.from_dict(d)


def bundled_configs() -> list[str]:
    root = resources.files("quenchchern") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(name_or_path: str) -> ExperimentConfig:
    """Load a config from a JSON file, or by bundled name (e.g. ``fig1``)."""
    path = Path(name_or_path)
    try:
        if path.is_file():
            text = path.read_text()
        elif name_or_path in bundled_configs():
            text = (resources.files("quenchchern") / "configs" / f"{name_or_path}.json").read_text()
        else:
            raise ConfigError(f"no config file or bundled config named {name_or_path!r}")
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return ExperimentConfig.from_dict(data)
