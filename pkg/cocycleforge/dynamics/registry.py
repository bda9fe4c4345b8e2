"""
Named base systems, Ψ fields and ρ fields, and the builders that turn a
config into a CocycleSpec. Extra ρ entries can be declared in a YAML
registry file:

    rho:
      two_modes:
        description: "ρ = e^{2πiθ} + 0.25·e^{-4πiθ}"
        fourier: [[1, 1.0, 0.0], [-2, 0.25, 0.0]]
      shift:
        constant: [1.0, 0.0]
"""

from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import yaml
from pydantic import BaseModel, model_validator

from ..config import Base as BaseConfig
from ..config import Config
from ..logging_config import get_logger
from .base import BaseSystem, CircleRotation, FiniteCyclic, TorusRotation
from .cocycle import CocycleSpec
from .fields import (AngleFunction, ConstantField, ConstantRotationField, DiagonalRotationField, FourierField,
                     IdentityField, OrthogonalField, VectorField, ZeroField, fourier_from_rows)

logger = get_logger("registry")


class RegistryEntry(BaseModel):
    category: str
    name: str
    params: str
    description: str
    source: str = "builtin"


class CustomRho(BaseModel):
    description: str = ""
    constant: Optional[List[float]] = None
    fourier: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _one_form(self):
        if (self.constant is None) == (self.fourier is None):
            raise ValueError("A registry ρ entry needs exactly one of 'constant' or 'fourier'")
        return self


BUILTINS = [
    RegistryEntry(category="base", name="circle", params="alpha, uniquely_ergodic_extension",
                  description="θ -> θ + α mod 1"),
    RegistryEntry(category="base", name="torus", params="alpha[dim], dim",
                  description="x -> x + α mod 1 on the dim-torus"),
    RegistryEntry(category="base", name="cyclic", params="period",
                  description="x -> x + 1 mod period"),
    RegistryEntry(category="psi", name="identity", params="cocycle.dim",
                  description="Ψ ≡ Id"),
    RegistryEntry(category="psi", name="constant_rotation", params="beta, cocycle.dim (even)",
                  description="Ψ ≡ e^{iβ} on each 2x2 block"),
    RegistryEntry(category="psi", name="diagonal_rotations", params="angles[offset, winding, amplitude, harmonic]",
                  description="Block rotations by offset + 2π·winding·θ + amplitude·sin(2π·harmonic·θ)"),
    RegistryEntry(category="psi", name="cyclic_random", params="seed, base.period, cocycle.dim",
                  description="Haar-random orthogonal matrix per cyclic state"),
    RegistryEntry(category="rho", name="zero", params="cocycle.dim", description="ρ ≡ 0"),
    RegistryEntry(category="rho", name="constant", params="constant[dim]", description="ρ ≡ c"),
    RegistryEntry(category="rho", name="fourier", params="fourier[[k, re, im], ...], cocycle.dim = 2",
                  description="ρ(θ) = Σ ρ̂_k e^{2πikθ} read in R^2 = C"),
    RegistryEntry(category="rho", name="cyclic_random", params="seed, base.period, cocycle.dim",
                  description="Gaussian vector per cyclic state"),
]


def load_registry(registry_file: Optional[str]) -> Dict[str, CustomRho]:
    """
    Custom ρ entries from a YAML registry file; an empty file gives none.

    Raises:
        FileNotFoundError: If the file doesn't exist
        ValueError: If an entry is malformed or shadows a built-in
    """
    if registry_file is None:
        return {}
    path = Path(registry_file)
    if not path.exists():
        raise FileNotFoundError(f"Registry file not found: {registry_file}")
    with open(path, 'r') as f:
        data = yaml.safe_load(f) or {}

    entries = {}
    builtin_rho = {e.name for e in BUILTINS if e.category == "rho"}
    for name, body in (data.get("rho") or {}).items():
        if name in builtin_rho:
            raise ValueError(f"Registry entry {name!r} shadows a built-in ρ")
        entries[str(name)] = CustomRho(**(body or {}))
    return entries


def list_registry(registry_file: Optional[str] = None) -> List[RegistryEntry]:
    """Built-ins in fixed order, then custom ρ entries sorted by name."""
    rows = list(BUILTINS)
    for name, entry in sorted(load_registry(registry_file).items()):
        params = "fourier" if entry.fourier is not None else "constant"
        rows.append(RegistryEntry(category="rho", name=name, params=params,
                                  description=entry.description, source=str(registry_file)))
    return rows


def build_system(base: BaseConfig) -> BaseSystem:
    """
    Raises:
        ValueError: If the base kind is not supported.
    """
    if base.kind == "circle":
        return CircleRotation(base.alpha, uniquely_ergodic_extension=base.uniquely_ergodic_extension)
    elif base.kind == "torus":
        alpha = base.alpha if isinstance(base.alpha, list) else [base.alpha]
        return TorusRotation(alpha, uniquely_ergodic_extension=base.uniquely_ergodic_extension)
    elif base.kind == "cyclic":
        return FiniteCyclic(base.period)
    else:
        raise ValueError(f"Unknown base: {base.kind}")


def build_psi(cfg: Config) -> OrthogonalField:
    psi, dim = cfg.cocycle.psi, cfg.cocycle.dim
    if psi.kind == "identity":
        return IdentityField(dim)
    elif psi.kind == "constant_rotation":
        return ConstantRotationField(psi.beta, dim)
    elif psi.kind == "diagonal_rotations":
        return DiagonalRotationField([AngleFunction(**a.model_dump()) for a in psi.angles], dim)
    else:
        raise ValueError(f"Unknown Ψ: {psi.kind}")


def _rho_from_values(dim: int, constant: Optional[List[float]], fourier: Optional[List[List[float]]],
                     name: str) -> VectorField:
    if constant is not None:
        if len(constant) != dim:
            raise ValueError(f"Constant ρ {name!r} has dimension {len(constant)}, expected {dim}")
        return ConstantField(constant)
    if dim != 2:
        raise ValueError(f"Fourier ρ {name!r} needs fiber dimension 2, got {dim}")
    return FourierField(fourier_from_rows(fourier), name=name)


def build_rho(cfg: Config) -> VectorField:
    rho, dim = cfg.cocycle.rho, cfg.cocycle.dim
    if rho.kind == "zero":
        return ZeroField(dim)
    elif rho.kind == "constant":
        return _rho_from_values(dim, rho.constant, None, "constant")
    elif rho.kind == "fourier":
        return _rho_from_values(dim, None, rho.fourier, "fourier")
    custom = load_registry(cfg.registry_file)
    if rho.kind not in custom:
        raise ValueError(f"Unknown ρ: {rho.kind}")
    entry = custom[rho.kind]
    return _rho_from_values(dim, entry.constant, entry.fourier, rho.kind)


def build_cocycle(cfg: Config) -> CocycleSpec:
    """
    The cocycle named by the config; cyclic_random parts are drawn from seed.

    Raises:
        ValueError: If an entry is unknown or dimensions disagree
    """
    system = build_system(cfg.base)
    kinds = (cfg.cocycle.psi.kind, cfg.cocycle.rho.kind)
    random_spec = None
    if "cyclic_random" in kinds:
        from ..oracles.cyclic import random_cyclic_spec
        random_spec = random_cyclic_spec(system.period, cfg.cocycle.dim, np.random.default_rng(cfg.seed))

    psi = random_spec.psi if kinds[0] == "cyclic_random" else build_psi(cfg)
    rho = random_spec.rho if kinds[1] == "cyclic_random" else build_rho(cfg)
    spec = CocycleSpec(system, psi, rho, name=f"{kinds[0]}+{kinds[1]}")
    logger.debug(f"Built {spec!r} with sup|ρ|={spec.rho_sup:.6g}")
    return spec
