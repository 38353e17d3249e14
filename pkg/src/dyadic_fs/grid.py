"""Dyadic cube algebra on the truncated domain [0,1)^n.

Cells of the finest level L are stored in a flat array in row-major order
with axis 0 varying fastest: the cell with integer coordinates
``(i_0, ..., i_{n-1})`` sits at ``sum(i_a * 2**(L*a))``.  Internally the
values are viewed as an n-dimensional array ``arr[i_0, ..., i_{n-1}]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import GridError, LeafHasNoChildren, RootHasNoParent, SpecMismatch

MAX_CELL_BITS = 24


@dataclass(frozen=True)
class GridSpec:
    n: int
    L: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise GridError(f"dimension n must be an integer >= 1, got {self.n}")
        if int(self.L) != self.L or self.L < 0:
            raise GridError(f"depth L must be an integer >= 0, got {self.L}")
        if self.n * self.L > MAX_CELL_BITS:
            raise GridError(
                f"grid with 2^{self.n * self.L} cells exceeds the 2^{MAX_CELL_BITS} limit")

    @property
    def side_cells(self) -> int:
        return 1 << self.L

    @property
    def num_cells(self) -> int:
        return 1 << (self.n * self.L)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side_cells,) * self.n

    def level_shape(self, k: int) -> tuple[int, ...]:
        return (1 << k,) * self.n

    def validate(self, Q: DyadicCube) -> None:
        if len(Q.index) != self.n:
            raise GridError(f"cube {Q} has dimension {len(Q.index)}, grid has n={self.n}")
        if not 0 <= Q.level <= self.L:
            raise GridError(f"cube level {Q.level} outside [0, {self.L}]")
        hi = 1 << Q.level
        if any(not 0 <= i < hi for i in Q.index):
            raise GridError(f"cube index {Q.index} outside [0, {hi}) at level {Q.level}")

    def cubes(self, level: int | None = None) -> Iterator[DyadicCube]:
        """All cubes of one level, or of every level top-down."""
        levels = range(self.L + 1) if level is None else [level]
        for k in levels:
            for idx in np.ndindex(*self.level_shape(k)):
                yield DyadicCube(k, tuple(int(i) for i in idx))

    def to_nd(self, flat: np.ndarray) -> np.ndarray:
        return np.asarray(flat).reshape(self.shape, order="F")

    def to_flat(self, arr: np.ndarray) -> np.ndarray:
        return np.asarray(arr).reshape(-1, order="F")


@dataclass(frozen=True, order=True)
class DyadicCube:
    """The cube ``2^-level * (index + [0,1)^n)``."""

    level: int
    index: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(int(i) for i in self.index))
        if self.level < 0:
            raise GridError(f"negative cube level {self.level}")

    @classmethod
    def root(cls, n: int) -> DyadicCube:
        return cls(0, (0,) * n)

    @property
    def n(self) -> int:
        return len(self.index)

    @property
    def side_length(self) -> float:
        return float(np.ldexp(1.0, -self.level))

    @property
    def volume(self) -> float:
        return float(np.ldexp(1.0, -self.n * self.level))

    def parent(self) -> DyadicCube:
        if self.level == 0:
            raise RootHasNoParent("the root cube has no parent")
        return DyadicCube(self.level - 1, tuple(i >> 1 for i in self.index))

    def children(self, spec: GridSpec) -> list[DyadicCube]:
        spec.validate(self)
        if self.level >= spec.L:
            raise LeafHasNoChildren(f"cube {self} is a finest-level cell")
        out = []
        for offs in np.ndindex(*(2,) * self.n):
            out.append(DyadicCube(self.level + 1,
                                  tuple(2 * i + o for i, o in zip(self.index, offs))))
        return out

    def ancestor(self, level: int) -> DyadicCube:
        if not 0 <= level <= self.level:
            raise GridError(f"no ancestor at level {level} for {self}")
        s = self.level - level
        return DyadicCube(level, tuple(i >> s for i in self.index))

    def ancestors(self) -> list[DyadicCube]:
        """pi^1(Q), pi^2(Q), ..., root."""
        return [self.ancestor(k) for k in range(self.level - 1, -1, -1)]

    def contains(self, other: DyadicCube) -> bool:
        if other.level < self.level:
            return False
        return other.ancestor(self.level) == self

    def slices(self, spec: GridSpec) -> tuple[slice, ...]:
        """Slices selecting this cube's finest cells in the n-d value array."""
        w = 1 << (spec.L - self.level)
        return tuple(slice(i * w, (i + 1) * w) for i in self.index)

    def mask(self, spec: GridSpec) -> np.ndarray:
        spec.validate(self)
        m = np.zeros(spec.shape, dtype=bool)
        m[self.slices(spec)] = True
        return spec.to_flat(m)

    def __str__(self):
        return f"Q(k={self.level}, j={self.index})"


def parent(Q: DyadicCube) -> DyadicCube:
    return Q.parent()


def children(Q: DyadicCube, spec: GridSpec) -> list[DyadicCube]:
    return Q.children(spec)


def block_sum(arr: np.ndarray) -> np.ndarray:
    """Sum each 2x...x2 block of an n-d array (one level up the tree)."""
    n = arr.ndim
    half = arr.shape[0] // 2
    r = arr.reshape(sum(((half, 2) for _ in range(n)), ()))
    return r.sum(axis=tuple(range(1, 2 * n, 2)))


def block_reduce(arr: np.ndarray, ufunc) -> np.ndarray:
    n = arr.ndim
    half = arr.shape[0] // 2
    r = arr.reshape(sum(((half, 2) for _ in range(n)), ()))
    return ufunc.reduce(r, axis=tuple(range(1, 2 * n, 2)))


def upsample(arr: np.ndarray) -> np.ndarray:
    """Copy each entry onto its 2^n children (one level down the tree)."""
    out = arr
    for a in range(arr.ndim):
        out = np.repeat(out, 2, axis=a)
    return out


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nonnegative step function constant on the finest cells."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        if v.size != self.spec.num_cells:
            raise GridError(f"expected {self.spec.num_cells} values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise GridError("grid function values must be finite")
        if np.any(v < 0):
            raise GridError("grid function values must be nonnegative")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, spec: GridSpec, c: float = 1.0) -> GridFunction:
        return cls(spec, np.full(spec.num_cells, float(c)))

    @classmethod
    def from_array(cls, spec: GridSpec, arr: np.ndarray) -> GridFunction:
        return cls(spec, spec.to_flat(arr))

    @classmethod
    def indicator(cls, spec: GridSpec, Q: DyadicCube) -> GridFunction:
        return cls(spec, Q.mask(spec).astype(np.float64))

    @property
    def array(self) -> np.ndarray:
        return self.spec.to_nd(self.values)

    @cached_property
    def level_sums(self) -> list[np.ndarray]:
        """Cube sums per level, built bottom-up by 2^n-way pairwise blocks."""
        sums = [None] * (self.spec.L + 1)
        cur = self.array
        sums[self.spec.L] = cur
        for k in range(self.spec.L - 1, -1, -1):
            cur = block_sum(cur)
            sums[k] = cur
        return sums

    @cached_property
    def level_maxima(self) -> list[np.ndarray]:
        out = [None] * (self.spec.L + 1)
        cur = self.array
        out[self.spec.L] = cur
        for k in range(self.spec.L - 1, -1, -1):
            cur = block_reduce(cur, np.maximum)
            out[k] = cur
        return out

    def level_averages(self, k: int) -> np.ndarray:
        return np.ldexp(self.level_sums[k], -self.spec.n * (self.spec.L - k))

    def average(self, Q: DyadicCube) -> float:
        self.spec.validate(Q)
        s = self.level_sums[Q.level][Q.index]
        return float(np.ldexp(s, -self.spec.n * (self.spec.L - Q.level)))

    def integral(self, Q: DyadicCube | None = None) -> float:
        """Lebesgue integral over Q (default: the whole domain)."""
        Q = Q or DyadicCube.root(self.spec.n)
        return self.average(Q) * Q.volume

    def level_set(self, t: float) -> CellSet:
        return level_set(self, t)

    def power(self, e: float) -> GridFunction:
        return GridFunction(self.spec, _safe_power(self.values, e))

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            _check_same(self.spec, other.spec)
            return GridFunction(self.spec, self.values * other.values)
        return GridFunction(self.spec, self.values * float(other))

    __rmul__ = __mul__

    def __add__(self, other: GridFunction) -> GridFunction:
        _check_same(self.spec, other.spec)
        return GridFunction(self.spec, self.values + other.values)

    def __repr__(self):
        return f"GridFunction(n={self.spec.n}, L={self.spec.L}, max={self.values.max():.6g})"


def _safe_power(v: np.ndarray, e: float) -> np.ndarray:
    out = np.zeros_like(v, dtype=np.float64)
    pos = v > 0
    out[pos] = np.power(v[pos], e)
    return out


def _check_same(a: GridSpec, b: GridSpec) -> None:
    if a != b:
        raise SpecMismatch(f"grid mismatch: (n={a.n}, L={a.L}) vs (n={b.n}, L={b.L})")


@dataclass(frozen=True, eq=False)
class CellSet:
    """A subset of the finest cells, stored as a boolean mask."""

    spec: GridSpec
    mask: np.ndarray

    def __post_init__(self):
        m = np.array(self.mask, dtype=bool).reshape(-1)
        if m.size != self.spec.num_cells:
            raise GridError(f"membership length {m.size} != cell count {self.spec.num_cells}")
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @classmethod
    def empty(cls, spec: GridSpec) -> CellSet:
        return cls(spec, np.zeros(spec.num_cells, dtype=bool))

    @classmethod
    def full(cls, spec: GridSpec) -> CellSet:
        return cls(spec, np.ones(spec.num_cells, dtype=bool))

    @classmethod
    def from_cells(cls, spec: GridSpec, cells: Sequence[int]) -> CellSet:
        m = np.zeros(spec.num_cells, dtype=bool)
        m[list(cells)] = True
        return cls(spec, m)

    @classmethod
    def from_cubes(cls, spec: GridSpec, cubes) -> CellSet:
        m = np.zeros(spec.shape, dtype=bool)
        for Q in cubes:
            spec.validate(Q)
            m[Q.slices(spec)] = True
        return cls(spec, spec.to_flat(m))

    @property
    def array(self) -> np.ndarray:
        return self.spec.to_nd(self.mask)

    def cells(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self):
        return int(self.mask.sum())

    def is_empty(self) -> bool:
        return not self.mask.any()

    def issubset(self, other: CellSet) -> bool:
        _check_same(self.spec, other.spec)
        return not np.any(self.mask & ~other.mask)

    def __or__(self, other: CellSet) -> CellSet:
        _check_same(self.spec, other.spec)
        return CellSet(self.spec, self.mask | other.mask)

    def __and__(self, other: CellSet) -> CellSet:
        _check_same(self.spec, other.spec)
        return CellSet(self.spec, self.mask & other.mask)

    def __eq__(self, other):
        if not isinstance(other, CellSet):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.mask, other.mask)

    def measure(self) -> float:
        return float(np.ldexp(float(len(self)), -self.spec.n * self.spec.L))


def average(f: GridFunction, Q: DyadicCube) -> float:
    return f.average(Q)


def level_set(f: GridFunction, t: float) -> CellSet:
    """Cells where f > t (strict)."""
    if t < 0:
        raise GridError(f"level_set threshold must be >= 0, got {t}")
    return CellSet(f.spec, f.values > t)
