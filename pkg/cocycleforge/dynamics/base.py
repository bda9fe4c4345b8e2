"""
Base dynamics: circle and torus rotations and finite cyclic permutations.

Points are carried as coordinate arrays: shape (M,) for the circle (turns),
(M, d) for the torus, (M,) integers for a cyclic base. Orbits are always
generated by repeated single steps reduced mod 1, so the orbit of Tx is
bit-for-bit the tail of the orbit of x.
"""

import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

GOLDEN_ALPHA = (math.sqrt(5.0) - 1.0) / 2.0
# Above this many steps `step` uses the closed formula instead of iterating.
DIRECT_STEP_THRESHOLD = 1024


def _wrap(values: np.ndarray) -> np.ndarray:
    """Reduce mod 1 into [0, 1); np.mod can return 1.0 for tiny negatives."""
    out = np.mod(values, 1.0)
    return np.where(out >= 1.0, 0.0, out)


class BasePoint:
    """A single point of a base system."""

    __slots__ = ("kind", "coords")

    def __init__(self, kind: str, coords):
        self.kind = kind
        self.coords = np.asarray(coords)

    def as_array(self) -> np.ndarray:
        """Coordinates with a leading batch axis of length one."""
        return self.coords[np.newaxis, ...]

    def __repr__(self) -> str:
        return f"BasePoint({self.kind}, {self.coords.tolist()})"


class BaseSystem:
    """Common interface of the base maps T."""

    kind = "base"
    uniquely_ergodic_extension = False

    def advance(self, coords: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def retreat(self, coords: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _direct(self, coords: np.ndarray, n: int) -> np.ndarray:
        raise NotImplementedError

    def angle(self, coords: np.ndarray) -> np.ndarray:
        """First angular coordinate in turns, used by closed-form fields."""
        raise NotImplementedError

    def point(self, coords) -> BasePoint:
        raise NotImplementedError

    def grid_coords(self, size: int, offset: float) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> Dict[str, Any]:
        raise NotImplementedError

    def step_coords(self, coords: np.ndarray, n: int) -> np.ndarray:
        """Apply T^n to a coordinate array."""
        n = int(n)
        if abs(n) > DIRECT_STEP_THRESHOLD:
            return self._direct(coords, n)
        out = np.array(coords, copy=True)
        move = self.advance if n > 0 else self.retreat
        for _ in range(abs(n)):
            out = move(out)
        return out

    def step(self, x: BasePoint, n: int = 1) -> BasePoint:
        if x.kind != self.kind:
            raise ValueError(f"Point of kind {x.kind!r} does not belong to a {self.kind} base")
        return self.point(self.step_coords(x.as_array(), n)[0])


class CircleRotation(BaseSystem):
    """θ -> θ + α mod 1 on the circle, θ measured in turns."""

    kind = "circle"

    def __init__(self, alpha: float = GOLDEN_ALPHA, uniquely_ergodic_extension: bool = False):
        if not math.isfinite(alpha):
            raise ValueError("Rotation number must be finite")
        self.alpha = float(alpha) % 1.0
        self.uniquely_ergodic_extension = bool(uniquely_ergodic_extension)

    def advance(self, coords):
        return _wrap(np.asarray(coords, dtype=float) + self.alpha)

    def retreat(self, coords):
        return _wrap(np.asarray(coords, dtype=float) - self.alpha)

    def _direct(self, coords, n):
        shift = math.fmod(n * self.alpha, 1.0)
        return _wrap(np.asarray(coords, dtype=float) + shift)

    def angle(self, coords):
        return np.asarray(coords, dtype=float)

    def point(self, coords) -> BasePoint:
        value = float(np.asarray(coords, dtype=float).reshape(()))
        return BasePoint(self.kind, _wrap(np.asarray(value)))

    def grid_coords(self, size, offset):
        return _wrap(offset + np.arange(size) / size)

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha,
                "uniquely_ergodic_extension": self.uniquely_ergodic_extension}


class TorusRotation(BaseSystem):
    """Translation by α on the d-torus."""

    kind = "torus"

    def __init__(self, alpha: Sequence[float], uniquely_ergodic_extension: bool = False):
        a = np.atleast_1d(np.asarray(alpha, dtype=float))
        if a.ndim != 1 or a.size < 1:
            raise ValueError("Torus rotation vector must be one-dimensional and non-empty")
        if not np.all(np.isfinite(a)):
            raise ValueError("Torus rotation vector must be finite")
        self.alpha = np.mod(a, 1.0)
        self.uniquely_ergodic_extension = bool(uniquely_ergodic_extension)

    @property
    def dim(self) -> int:
        return self.alpha.shape[0]

    def advance(self, coords):
        return _wrap(np.asarray(coords, dtype=float) + self.alpha)

    def retreat(self, coords):
        return _wrap(np.asarray(coords, dtype=float) - self.alpha)

    def _direct(self, coords, n):
        shift = np.array([math.fmod(n * a, 1.0) for a in self.alpha])
        return _wrap(np.asarray(coords, dtype=float) + shift)

    def angle(self, coords):
        return np.asarray(coords, dtype=float)[..., 0]

    def point(self, coords) -> BasePoint:
        c = np.asarray(coords, dtype=float).reshape(self.dim)
        return BasePoint(self.kind, _wrap(c))

    def grid_coords(self, size, offset):
        # Kronecker lattice: first coordinate uniform, the rest golden-spaced.
        i = np.arange(size)
        cols = [i / size]
        for k in range(1, self.dim):
            cols.append(i * math.fmod(GOLDEN_ALPHA * (k + 1), 1.0))
        return _wrap(np.stack(cols, axis=-1) + offset)

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha.tolist(),
                "uniquely_ergodic_extension": self.uniquely_ergodic_extension}


class FiniteCyclic(BaseSystem):
    """x -> x + 1 mod p on Z/p."""

    kind = "cyclic"
    uniquely_ergodic_extension = True

    def __init__(self, period: int):
        if int(period) < 1:
            raise ValueError(f"Cyclic period must be at least 1, got {period}")
        self.period = int(period)

    def advance(self, coords):
        return np.mod(np.asarray(coords, dtype=np.int64) + 1, self.period)

    def retreat(self, coords):
        return np.mod(np.asarray(coords, dtype=np.int64) - 1, self.period)

    def _direct(self, coords, n):
        return np.mod(np.asarray(coords, dtype=np.int64) + n, self.period)

    def step_coords(self, coords, n):
        return self._direct(coords, int(n))

    def angle(self, coords):
        return np.asarray(coords, dtype=float) / self.period

    def point(self, coords) -> BasePoint:
        value = int(np.asarray(coords).reshape(()))
        return BasePoint(self.kind, np.int64(value % self.period))

    def grid_coords(self, size, offset):
        return np.arange(self.period, dtype=np.int64)

    def describe(self):
        return {"kind": self.kind, "period": self.period}


class SampleGrid:
    """Finite set of base points used as the sup-norm and quadrature proxy."""

    def __init__(self, system: BaseSystem, coords: np.ndarray, descriptor: Dict[str, Any]):
        self.system = system
        self.coords = np.asarray(coords)
        self.coords.setflags(write=False)
        self.descriptor = descriptor

    def __len__(self) -> int:
        return self.coords.shape[0]

    @property
    def points(self) -> List[BasePoint]:
        return [self.system.point(c) for c in self.coords]

    def stepped(self, n: int = 1) -> np.ndarray:
        return self.system.step_coords(self.coords, n)

    def with_image(self, n: int = 1) -> "SampleGrid":
        """The grid followed by its image T^n(grid), as one grid of twice the size."""
        coords = np.concatenate([self.coords, self.stepped(n)])
        return SampleGrid(self.system, coords, {**self.descriptor, "size": int(len(coords)), "image_step": int(n)})

    def chunks(self, count: int) -> List[np.ndarray]:
        """Split the coordinates into at most `count` contiguous pieces."""
        count = max(1, min(int(count), len(self)))
        return [c for c in np.array_split(self.coords, count) if len(c)]

    def mean(self, values: np.ndarray) -> np.ndarray:
        """Grid quadrature of sampled values over the first axis."""
        return np.mean(np.asarray(values), axis=0)

    def __repr__(self) -> str:
        return f"SampleGrid({self.descriptor})"


def make_grid(system: BaseSystem, size: int = 1024, offset: float = 0.0,
              golden_offset: bool = False) -> SampleGrid:
    """
    Build a sample grid on a base system.

    Args:
        system: The base system
        size: Number of points; ignored for cyclic bases, which use every state
        offset: Shift of the grid in turns
        golden_offset: If True, add GOLDEN_ALPHA / size to the offset

    Returns:
        SampleGrid: The grid

    Raises:
        ValueError: If size is not positive
    """
    if int(size) < 1:
        raise ValueError(f"Grid size must be positive, got {size}")
    size = int(size)
    shift = float(offset) + (GOLDEN_ALPHA / size if golden_offset else 0.0)
    coords = system.grid_coords(size, shift)
    descriptor = {"system": system.describe(), "size": int(len(coords)),
                  "offset": shift if system.kind != "cyclic" else 0.0}
    return SampleGrid(system, coords, descriptor)


def point_grid(system: BaseSystem, x: Optional[BasePoint] = None) -> SampleGrid:
    """A one-point grid, for single-point experiments."""
    if x is None:
        x = system.point(np.zeros(getattr(system, "dim", 1)) if system.kind == "torus" else 0)
    return SampleGrid(system, x.as_array(), {"system": system.describe(), "size": 1,
                                             "point": x.coords.tolist()})
