"""Deterministic test-instance generators for (f, w) pairs."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..grid import DyadicCube, GridFunction, GridSpec
from ..operators import fractional_maximal

F_KINDS = ("indicator", "lacunary", "rough", "root", "zero")
W_KINDS = ("one", "rough", "a1", "indicator", "zero")


@dataclass(frozen=True)
class GeneratorSpec:
    """How to draw f and w.

    f kinds: indicator (a), lacunary (b), rough (c), plus root (f = 1_root) and zero.
    w kinds: one, rough (c), a1 (d), indicator (a), zero.
    """

    n: int
    L: int
    f_kind: str = "indicator"
    w_kind: str = "rough"
    max_cubes: int = 4
    beta: float | None = None

    def __post_init__(self):
        if self.f_kind not in F_KINDS:
            raise ParameterError(f"unknown f generator {self.f_kind!r}; choose from {F_KINDS}")
        if self.w_kind not in W_KINDS:
            raise ParameterError(f"unknown w generator {self.w_kind!r}; choose from {W_KINDS}")
        if self.max_cubes < 1:
            raise ParameterError("max_cubes must be >= 1")
        if self.beta is not None and not 0 < self.beta < self.n:
            raise ParameterError(f"beta must lie in (0, n={self.n}), got {self.beta}")

    @property
    def spec(self) -> GridSpec:
        return GridSpec(self.n, self.L)

    @property
    def generator_id(self) -> str:
        parts = [f"f={self.f_kind}", f"w={self.w_kind}", f"n={self.n}", f"L={self.L}"]
        if self.f_kind == "indicator" or self.w_kind == "indicator":
            parts.append(f"m={self.max_cubes}")
        if self.w_kind == "a1":
            parts.append("beta=" + ("random" if self.beta is None else repr(self.beta)))
        return ";".join(parts)


def random_cube(spec: GridSpec, rng: np.random.Generator) -> DyadicCube:
    k = int(rng.integers(0, spec.L + 1))
    return DyadicCube(k, tuple(int(i) for i in rng.integers(0, 1 << k, size=spec.n)))


def indicator_sum(spec: GridSpec, cubes, coefficients) -> GridFunction:
    arr = np.zeros(spec.shape)
    for Q, c in zip(cubes, coefficients):
        spec.validate(Q)
        arr[Q.slices(spec)] += c
    return GridFunction.from_array(spec, arr)


def gen_indicator(spec, rng, max_cubes=4) -> GridFunction:
    m = int(rng.integers(1, max_cubes + 1))
    cubes = [random_cube(spec, rng) for _ in range(m)]
    coeffs = np.exp2(rng.uniform(-4.0, 4.0, size=m))
    return indicator_sum(spec, cubes, coeffs)


def gen_lacunary(spec, rng, chains=None) -> GridFunction:
    """Values 2^e on nested cubes: along a random chain of ancestors of a cell,
    each deeper cube gets a larger power of two."""
    arr = np.zeros(spec.shape)
    chains = int(rng.integers(1, 4)) if chains is None else chains
    for _ in range(chains):
        cell = DyadicCube(spec.L, tuple(int(i) for i in rng.integers(0, 1 << spec.L, size=spec.n)))
        levels = sorted(int(x) for x in rng.choice(spec.L + 1, size=int(rng.integers(1, spec.L + 2)),
                                                   replace=False))
        e = int(rng.integers(-6, 1))
        for k in levels:
            Q = cell.ancestor(k)
            arr[Q.slices(spec)] = np.maximum(arr[Q.slices(spec)], np.ldexp(1.0, e))
            e += int(rng.integers(1, 3))
    return GridFunction.from_array(spec, arr)


def gen_rough(spec, rng) -> GridFunction:
    return GridFunction(spec, np.exp2(rng.uniform(-8.0, 8.0, size=spec.num_cells)))


def power_weight(spec: GridSpec, beta: float, center) -> GridFunction:
    """|x - x0|^(-beta) at cell centers, the distance clipped below at half a cell."""
    h = np.ldexp(1.0, -spec.L)
    grids = np.meshgrid(*[(np.arange(spec.side_cells) + 0.5) * h] * spec.n, indexing="ij")
    r2 = sum((g - c) ** 2 for g, c in zip(grids, center))
    r = np.maximum(np.sqrt(r2), 0.5 * h)
    return GridFunction.from_array(spec, r ** (-beta))


def gen_a1(spec, rng, beta=None) -> GridFunction:
    beta = float(rng.uniform(0.05, 0.95) * spec.n) if beta is None else beta
    cell = rng.integers(0, spec.side_cells, size=spec.n)
    center = (cell + 0.5) * np.ldexp(1.0, -spec.L)
    return power_weight(spec, beta, center)


def a1_constant(w: GridFunction) -> float:
    """max over cells of M_0 w / w (infinite if w vanishes where M_0 w does not)."""
    m = fractional_maximal(w, 0.0).values
    v = w.values
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(v > 0, m / np.where(v > 0, v, 1.0), np.where(m > 0, np.inf, 1.0))
    return float(r.max())


def generate_instance(gen: GeneratorSpec, seed: int) -> tuple[GridFunction, GridFunction]:
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    spec = gen.spec
    if gen.f_kind == "indicator":
        f = gen_indicator(spec, rng, gen.max_cubes)
    elif gen.f_kind == "lacunary":
        f = gen_lacunary(spec, rng)
    elif gen.f_kind == "rough":
        f = gen_rough(spec, rng)
    elif gen.f_kind == "root":
        f = GridFunction.constant(spec, 1.0)
    else:
        f = GridFunction.constant(spec, 0.0)
    if gen.w_kind == "one":
        w = GridFunction.constant(spec, 1.0)
    elif gen.w_kind == "rough":
        w = gen_rough(spec, rng)
    elif gen.w_kind == "a1":
        w = gen_a1(spec, rng, gen.beta)
    elif gen.w_kind == "indicator":
        w = gen_indicator(spec, rng, gen.max_cubes)
    else:
        w = GridFunction.constant(spec, 0.0)
    return f, w


def trial_seed(seed: int, trial: int) -> int:
    """64-bit seed of one trial, derived from (run seed, trial index)."""
    ss = np.random.SeedSequence([int(seed), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def instance_digest(f: GridFunction, w: GridFunction) -> str:
    h = hashlib.sha256()
    for g in (f, w):
        h.update(f"{g.spec.n},{g.spec.L};".encode())
        h.update(np.ascontiguousarray(g.values, dtype="<f8").tobytes())
    return h.hexdigest()[:16]
