import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from .dynamics.base import GOLDEN_ALPHA

THREADS_ENV = "COCYCLE_FORGE_THREADS"

PSI_KINDS = ("identity", "constant_rotation", "diagonal_rotations", "cyclic_random")
RHO_KINDS = ("zero", "constant", "fourier", "cyclic_random")
SEQUENCE_KINDS = ("u_lambda", "constant", "alternating", "cosine")


def _strictly_increasing(values: List[Any], label: str) -> None:
    if not values:
        raise ValueError(f"{label} must not be empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{label} must be strictly increasing, got {values}")


class Base(BaseModel):
    kind: Literal["circle", "torus", "cyclic"] = "circle"
    alpha: Union[float, List[float]] = GOLDEN_ALPHA
    dim: int = Field(default=1, ge=1)
    period: int = Field(default=8, ge=1)
    uniquely_ergodic_extension: bool = False

    @model_validator(mode="after")
    def _check_alpha(self):
        if self.kind == "torus":
            alpha = self.alpha if isinstance(self.alpha, list) else [self.alpha]
            if len(alpha) != self.dim:
                raise ValueError(f"Torus rotation needs {self.dim} components, got {len(alpha)}")
        elif self.kind == "circle" and isinstance(self.alpha, list):
            raise ValueError("Circle rotation takes a single rotation number")
        return self


class Grid(BaseModel):
    size: int = Field(default=1024, ge=1)
    offset: float = 0.0
    golden_offset: bool = False


class Angle(BaseModel):
    offset: float = 0.0
    winding: int = 0
    amplitude: float = 0.0
    harmonic: int = 1


class Psi(BaseModel):
    kind: str = "constant_rotation"
    beta: float = 1.0
    angles: List[Angle] = []

    @field_validator("kind")
    @classmethod
    def _known(cls, v: str) -> str:
        if v not in PSI_KINDS:
            raise ValueError(f"Unknown Ψ kind: {v}")
        return v


class Rho(BaseModel):
    # Built-in kind or the name of an entry in the registry file
    kind: str = "fourier"
    constant: List[float] = []
    fourier: List[List[float]] = [[1, 1.0, 0.0]]


class Cocycle(BaseModel):
    dim: int = Field(default=2, ge=1)
    psi: Psi = Field(default_factory=Psi)
    rho: Rho = Field(default_factory=Rho)


class Experiment(BaseModel):
    kind: Literal["solve", "sweep", "drift", "displacement", "theoremB", "averaging",
                  "oracle-check", "attractor"] = "solve"
    lambdas: List[float] = [0.9, 0.99, 0.999]
    n_schedule: List[int] = [100, 1000, 10000, 100000]
    frobenius_schedule: List[int] = [100, 1000, 10000]
    eps: float = Field(default=1e-10, gt=0)
    cesaro_n: int = Field(default=10000, ge=1)
    # Also solve the genuine equation (λ = 1) on cyclic bases
    lambda_one: bool = False
    sequence: str = "u_lambda"
    sequence_value: float = 1.0
    x: Optional[Union[float, List[float]]] = None
    instances: int = Field(default=100, ge=1)
    max_period: int = Field(default=16, ge=1)
    max_dim: int = Field(default=3, ge=1)
    oracle_lambdas: List[float] = [0.5, 0.9, 0.99]
    denom_threshold: float = Field(default=1e-8, ge=0)
    attractor_steps: int = Field(default=200, ge=1)
    attractor_lambdas: List[float] = [0.5, 0.9]
    # Predicted distances at or below this only count toward the absolute error
    attractor_relative_floor: float = Field(default=1e-4, gt=0)

    @field_validator("lambdas", "oracle_lambdas", "attractor_lambdas")
    @classmethod
    def _lambda_schedule(cls, v: List[float]) -> List[float]:
        for lam in v:
            if not 0.0 < lam < 1.0:
                raise ValueError(f"λ must lie in (0, 1), got {lam}")
        _strictly_increasing(v, "λ schedule")
        return v

    @field_validator("n_schedule", "frobenius_schedule")
    @classmethod
    def _n_schedule(cls, v: List[int]) -> List[int]:
        if any(n < 1 for n in v):
            raise ValueError(f"n schedule entries must be positive, got {v}")
        _strictly_increasing(v, "n schedule")
        return v

    @field_validator("sequence")
    @classmethod
    def _sequence(cls, v: str) -> str:
        if v not in SEQUENCE_KINDS:
            raise ValueError(f"Unknown averaging sequence: {v}")
        return v


class Output(BaseModel):
    dir: str = "outputs"
    float_format: str = "%.17e"


class Alerts(BaseModel):
    enabled: bool = False
    webhook_url_env: str = "COCYCLE_FORGE_WEBHOOK_URL"
    webhook_url: str = ""


class Config(BaseModel):
    seed: int = 0
    threads: int = Field(default=1, ge=1)
    timezone: str = "UTC"
    registry_file: Optional[str] = None
    base: Base = Field(default_factory=Base)
    grid: Grid = Field(default_factory=Grid)
    cocycle: Cocycle = Field(default_factory=Cocycle)
    experiment: Experiment = Field(default_factory=Experiment)
    output: Output = Field(default_factory=Output)
    alerts: Alerts = Field(default_factory=Alerts)

    @model_validator(mode="after")
    def _check_registry(self):
        if self.registry_file is None and self.cocycle.rho.kind not in RHO_KINDS:
            raise ValueError(f"Unknown ρ kind: {self.cocycle.rho.kind}")
        random_parts = [k for k in (self.cocycle.psi.kind, self.cocycle.rho.kind) if k == "cyclic_random"]
        if random_parts and self.base.kind != "cyclic":
            raise ValueError("cyclic_random entries need a cyclic base")
        return self


def expand_dotted(data: Dict[str, Any]) -> Dict[str, Any]:
    """{'base.alpha': 0.5} -> {'base': {'alpha': 0.5}}; nested input passes through."""
    out: Dict[str, Any] = {}
    for key, value in data.items():
        if isinstance(value, dict):
            value = expand_dotted(value)
        parts = str(key).split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ValueError(f"Config key {key!r} conflicts with a scalar value")
        leaf = parts[-1]
        if isinstance(value, dict) and isinstance(node.get(leaf), dict):
            node[leaf].update(value)
        else:
            node[leaf] = value
    return out


def load_config(config_path: str = "config.yaml") -> Config:
    """
    Load configuration from a YAML file and return a Config object.

    Flat dotted keys and nested sections are both accepted. The
    COCYCLE_FORGE_THREADS environment variable overrides `threads`.

    Raises:
        FileNotFoundError: If the configuration file doesn't exist.
        ValueError: If a value fails validation.
    """
    config_file = Path(config_path)
    if not config_file.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_file, 'r') as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"Config file {config_path} must contain a mapping")
    data = expand_dotted(data)

    threads = os.getenv(THREADS_ENV)
    if threads:
        data["threads"] = int(threads)

    alerts = data.setdefault('alerts', {})
    env_var = alerts.get('webhook_url_env', Alerts().webhook_url_env)
    alerts['webhook_url'] = os.getenv(env_var, "")

    return Config(**data)


def config_hash(cfg: Config) -> str:
    """SHA-256 of the canonical JSON form; thread count and secrets are left out."""
    payload = cfg.model_dump(mode="json", exclude={"threads": True, "alerts": {"webhook_url"}})
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
