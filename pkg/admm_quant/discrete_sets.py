"""
Discrete Product Sets
=====================

The feasible set A is a Cartesian product of per-coordinate finite (or
countable) scalar sets. Because of the product structure every operation here
decomposes coordinate-wise: projection is O(d), and the lexicographically
smallest nearest point of A is obtained by breaking each coordinate tie
towards the smaller value.

Three coordinate kinds are supported:

* ``Binary``        {-1, +1}
* ``ScaledLattice`` {v*k : k integer, a <= v*k <= b}, either bound optional
* ``ExplicitGrid``  an arbitrary strictly increasing list of reals
"""

import itertools
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from admm_quant.errors import (
    CardinalityExceededError,
    DimensionMismatchError,
    InvalidSetError,
    NonFiniteInputError,
    UnboundedSetError,
)

logger = logging.getLogger(__name__)

# slack for deciding that a/v or b/v sits on a lattice point
_BOUND_EPS = 1e-9

DEFAULT_ENUMERATION_LIMIT = 10**7


class CoordinateSet(ABC):
    """A finite or countable set of reals for a single coordinate"""

    kind: str = ""

    @abstractmethod
    def project_values(self, values: np.ndarray) -> np.ndarray:
        """Elementwise nearest member; works on arrays of any shape"""

    @abstractmethod
    def members(self) -> np.ndarray:
        """Sorted members (only for finite sets)"""

    @property
    @abstractmethod
    def cardinality(self) -> float:
        """Number of members, ``math.inf`` when unbounded"""

    @property
    @abstractmethod
    def typical_spacing(self) -> float:
        """Default scale for random initial points"""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.cardinality)

    def contains(self, values: np.ndarray, tol: float = 0.0) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return np.abs(self.project_values(values) - values) <= tol


@dataclass(frozen=True)
class Binary(CoordinateSet):
    """{-1, +1}; a coordinate at exactly 0 goes to +1"""

    kind = "binary"

    def project_values(self, values: np.ndarray) -> np.ndarray:
        return np.where(np.asarray(values) >= 0.0, 1.0, -1.0)

    def members(self) -> np.ndarray:
        return np.array([-1.0, 1.0])

    @property
    def cardinality(self) -> float:
        return 2

    @property
    def typical_spacing(self) -> float:
        return 1.0

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind}


@dataclass(frozen=True)
class ScaledLattice(CoordinateSet):
    """Multiples of ``v`` inside the optional box ``[a, b]``"""

    v: float
    a: Optional[float] = None
    b: Optional[float] = None

    kind = "lattice"

    def __post_init__(self):
        if not (math.isfinite(self.v) and self.v > 0):
            raise InvalidSetError(f"lattice spacing must be positive, got {self.v}")
        for bound in (self.a, self.b):
            if bound is not None and math.isnan(bound):
                raise InvalidSetError("lattice bound is NaN")
        if self.k_min > self.k_max:
            raise InvalidSetError(
                f"lattice v={self.v} has no members in [{self.a}, {self.b}]"
            )

    @property
    def k_min(self) -> float:
        if self.a is None or math.isinf(self.a):
            return -math.inf
        return math.ceil(self.a / self.v - _BOUND_EPS)

    @property
    def k_max(self) -> float:
        if self.b is None or math.isinf(self.b):
            return math.inf
        return math.floor(self.b / self.v + _BOUND_EPS)

    def project_values(self, values: np.ndarray) -> np.ndarray:
        # ceil(t - 1/2) rounds half-way cases down, i.e. towards the smaller multiple
        k = np.ceil(np.asarray(values, dtype=float) / self.v - 0.5)
        k = np.clip(k, self.k_min, self.k_max)
        return self.v * k

    def members(self) -> np.ndarray:
        if not self.is_finite:
            raise UnboundedSetError(f"lattice v={self.v} is unbounded")
        return self.v * np.arange(self.k_min, self.k_max + 1, dtype=float)

    @property
    def cardinality(self) -> float:
        if math.isinf(self.k_min) or math.isinf(self.k_max):
            return math.inf
        return int(self.k_max - self.k_min + 1)

    @property
    def typical_spacing(self) -> float:
        return self.v

    def bounded(self, lo: float, hi: float) -> "ScaledLattice":
        """Intersect the lattice with ``[lo, hi]``"""
        a = lo if self.a is None else max(self.a, lo)
        b = hi if self.b is None else min(self.b, hi)
        return ScaledLattice(self.v, a, b)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "v": self.v, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class ExplicitGrid(CoordinateSet):
    """Finite sorted list of distinct reals; projection by binary search"""

    values: Tuple[float, ...]

    kind = "grid"

    def __post_init__(self):
        if len(self.values) < 1:
            raise InvalidSetError("grid needs at least one value")
        arr = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise InvalidSetError("grid values must be finite")
        if np.any(np.diff(arr) <= 0):
            raise InvalidSetError("grid values must be strictly increasing")
        object.__setattr__(self, "values", tuple(float(v) for v in arr))

    def project_values(self, values: np.ndarray) -> np.ndarray:
        grid = np.asarray(self.values)
        values = np.asarray(values, dtype=float)
        hi = np.clip(np.searchsorted(grid, values), 1, max(len(grid) - 1, 1))
        lo = hi - 1
        if len(grid) == 1:
            return np.full(values.shape, grid[0])
        lo_val, hi_val = grid[lo], grid[hi]
        # strict comparison: ties stay on the smaller value
        return np.where(hi_val - values < values - lo_val, hi_val, lo_val)

    def members(self) -> np.ndarray:
        return np.asarray(self.values)

    @property
    def cardinality(self) -> float:
        return len(self.values)

    @property
    def typical_spacing(self) -> float:
        if len(self.values) == 1:
            return 1.0
        return float(np.median(np.diff(self.values)))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "values": list(self.values)}


def coordinate_from_dict(data: Dict[str, Any]) -> CoordinateSet:
    kind = data.get("kind")
    if kind == "binary":
        return Binary()
    if kind == "lattice":
        if "v" not in data:
            raise InvalidSetError("lattice coordinate needs 'v'")
        return ScaledLattice(float(data["v"]), _opt_float(data.get("a")), _opt_float(data.get("b")))
    if kind == "grid":
        return ExplicitGrid(tuple(float(v) for v in data.get("values", [])))
    raise InvalidSetError(f"unknown coordinate kind: {kind!r}")


def _opt_float(value: Any) -> Optional[float]:
    return None if value is None else float(value)


class DiscreteProductSet:
    """
    Cartesian product of coordinate sets.

    Coordinates sharing the same description are grouped once at construction
    so that projecting a homogeneous set (the common case) is a single
    vectorized call.
    """

    def __init__(self, coords: Sequence[CoordinateSet]):
        if len(coords) < 1:
            raise InvalidSetError("product set needs at least one coordinate")
        self.coords: Tuple[CoordinateSet, ...] = tuple(coords)
        groups: Dict[CoordinateSet, List[int]] = {}
        for i, coord in enumerate(self.coords):
            groups.setdefault(coord, []).append(i)
        self._groups = [(coord, np.asarray(idx)) for coord, idx in groups.items()]

    @classmethod
    def binary(cls, dim: int) -> "DiscreteProductSet":
        return cls([Binary()] * dim)

    @classmethod
    def lattice(
        cls, dim: int, v: float, a: Optional[float] = None, b: Optional[float] = None
    ) -> "DiscreteProductSet":
        return cls([ScaledLattice(v, a, b)] * dim)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscreteProductSet":
        coords = data.get("coords")
        if not isinstance(coords, list):
            raise InvalidSetError("set description needs a 'coords' list")
        return cls([coordinate_from_dict(c) for c in coords])

    def to_dict(self) -> Dict[str, Any]:
        return {"coords": [c.to_dict() for c in self.coords]}

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def cardinality(self) -> float:
        return math.prod(c.cardinality for c in self.coords)

    @property
    def is_finite(self) -> bool:
        return all(c.is_finite for c in self.coords)

    @property
    def is_homogeneous(self) -> bool:
        return len(self._groups) == 1

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DiscreteProductSet) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        if self.is_homogeneous:
            return f"DiscreteProductSet({self.coords[0]!r} ** {self.dim})"
        return f"DiscreteProductSet({list(self.coords)!r})"

    def check_vector(self, x: Any, name: str = "x") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] != self.dim:
            raise DimensionMismatchError(self.dim, x.shape[-1] if x.ndim else 0, name)
        if not np.all(np.isfinite(x)):
            raise NonFiniteInputError(f"{name} contains non-finite entries")
        return x

    def project_unchecked(self, x: np.ndarray) -> np.ndarray:
        """Projection without validation, for solver inner loops"""
        if len(self._groups) == 1:
            return self._groups[0][0].project_values(x)
        out = np.empty_like(x, dtype=float)
        for coord, idx in self._groups:
            out[..., idx] = coord.project_values(x[..., idx])
        return out

    def project_batch(self, points: np.ndarray) -> np.ndarray:
        """Project every row of an (n, dim) array"""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise DimensionMismatchError(self.dim, points.shape[-1], "point batch")
        return self.project_unchecked(points)

    def covering_radius(self) -> float:
        """sup over z of the distance from z to A (finite only for unbounded lattices)"""
        radius_sq = 0.0
        for coord in self.coords:
            if not isinstance(coord, ScaledLattice) or coord.a is not None or coord.b is not None:
                return math.inf
            radius_sq += (coord.v / 2.0) ** 2
        return math.sqrt(radius_sq)

    def default_scale(self) -> float:
        return float(np.median([c.typical_spacing for c in self.coords]))

    def with_bounds(self, lo: float, hi: float) -> "DiscreteProductSet":
        """Box every lattice coordinate into ``[lo, hi]``; other kinds are kept"""
        return DiscreteProductSet(
            [c.bounded(lo, hi) if isinstance(c, ScaledLattice) else c for c in self.coords]
        )


def project(discrete_set: DiscreteProductSet, x: Any) -> np.ndarray:
    """Coordinate-wise nearest member of A, ties resolved to the smaller value"""
    x = discrete_set.check_vector(x)
    return discrete_set.project_unchecked(x)


def soft_indicator(discrete_set: DiscreteProductSet, x: Any) -> float:
    """Euclidean distance from x to A"""
    x = discrete_set.check_vector(x)
    return float(np.linalg.norm(x - discrete_set.project_unchecked(x)))


def is_member(discrete_set: DiscreteProductSet, x: Any, tol: float = 1e-9) -> bool:
    x = discrete_set.check_vector(x)
    return bool(np.all(np.abs(discrete_set.project_unchecked(x) - x) <= tol))


def _check_enumerable(discrete_set: DiscreteProductSet, limit: int) -> int:
    if not discrete_set.is_finite:
        unbounded = [i for i, c in enumerate(discrete_set.coords) if not c.is_finite]
        raise UnboundedSetError(f"coordinates {unbounded} are unbounded")
    cardinality = discrete_set.cardinality
    if cardinality > limit:
        raise CardinalityExceededError(cardinality, limit)
    return int(cardinality)


def iter_member_blocks(
    discrete_set: DiscreteProductSet,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
    block_size: int = 65536,
) -> Iterator[np.ndarray]:
    """
    Yield members of A in lexicographic order as (n, dim) blocks.

    Block k holds the members with flat indices [k*block_size, (k+1)*block_size)
    of the C-ordered mixed-radix numbering, which is exactly the order of
    ``itertools.product`` over the sorted coordinate members.
    """
    total = _check_enumerable(discrete_set, limit)
    member_lists = [c.members() for c in discrete_set.coords]
    shape = tuple(len(m) for m in member_lists)
    for start in range(0, total, block_size):
        flat = np.arange(start, min(start + block_size, total))
        digits = np.unravel_index(flat, shape)
        block = np.empty((flat.shape[0], discrete_set.dim))
        for i, members in enumerate(member_lists):
            block[:, i] = members[digits[i]]
        yield block


def enumerate_members(
    discrete_set: DiscreteProductSet, limit: int = DEFAULT_ENUMERATION_LIMIT
) -> List[np.ndarray]:
    """All members of A exactly once, lexicographically ordered"""
    _check_enumerable(discrete_set, limit)
    member_lists = [c.members() for c in discrete_set.coords]
    return [np.array(point) for point in itertools.product(*member_lists)]
