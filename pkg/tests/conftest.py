import shutil
import tempfile

import numpy as np
import pytest

from cocycleforge.config import Config
from cocycleforge.dynamics.base import GOLDEN_ALPHA, CircleRotation, FiniteCyclic, make_grid
from cocycleforge.dynamics.cocycle import CocycleSpec
from cocycleforge.dynamics.fields import (ConstantField, ConstantRotationField, FourierField, IdentityField,
                                          ZeroField)

BETA = 1.0

# ρ̂ for the multi-harmonic golden vortex, |k| ≤ 2
MULTI_HARMONIC = {-2: 0.25 + 0.0j, -1: 0.5j, 0: 1.0 + 0.0j, 1: 0.5 + 0.0j, 2: -0.25j}


@pytest.fixture
def circle():
    """Golden rotation of the circle."""
    return CircleRotation(GOLDEN_ALPHA)


@pytest.fixture
def small_grid(circle):
    """64-point uniform grid on the circle."""
    return make_grid(circle, 64)


@pytest.fixture
def golden_vortex(circle):
    """Ψ ≡ e^{i}, ρ a trigonometric polynomial of degree 2."""
    return CocycleSpec(circle, ConstantRotationField(BETA), FourierField(MULTI_HARMONIC), name="golden_vortex")


@pytest.fixture
def single_vortex(circle):
    """Ψ ≡ e^{i}, ρ(θ) = e^{2πiθ}."""
    return CocycleSpec(circle, ConstantRotationField(BETA), FourierField({1: 1.0}), name="single_vortex")


@pytest.fixture
def constant_vortex(circle):
    """Ψ ≡ e^{i}, ρ ≡ 1."""
    return CocycleSpec(circle, ConstantRotationField(BETA), ConstantField([1.0, 0.0]), name="constant_vortex")


@pytest.fixture
def translation(circle):
    """Ψ ≡ Id, ρ ≡ c with |c| = 0.5."""
    return CocycleSpec(circle, IdentityField(2), ConstantField([0.3, 0.4]), name="translation")


@pytest.fixture
def trivial(circle):
    """Ψ ≡ Id, ρ ≡ 0."""
    return CocycleSpec(circle, IdentityField(2), ZeroField(2), name="trivial")


@pytest.fixture
def cyclic8():
    return FiniteCyclic(8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir)


@pytest.fixture
def sample_config():
    """Small solve configuration on the golden vortex."""
    return Config(
        seed=7,
        grid={"size": 32},
        cocycle={"dim": 2, "psi": {"kind": "constant_rotation", "beta": BETA},
                 "rho": {"kind": "fourier", "fourier": [[1, 1.0, 0.0], [-1, 0.0, 0.5]]}},
        experiment={"kind": "solve", "lambdas": [0.5, 0.9], "eps": 1e-10},
    )

