"""Weighted dyadic Hausdorff content, Choquet integrals, Choquet-Lorentz quasinorms.

The content of E is the cheapest covering of E by dyadic cubes of levels
0..L, a cube Q costing average(w, Q) * l(Q)^d.  Refining any covering to a
disjoint antichain never raises its cost, so the minimum is a bottom-up fold
over the cube tree::

    cost(Q) = 0                                  if Q misses E
            = min(own(Q), sum of children cost)  otherwise (own(Q) at leaves)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError, SpecMismatch
from .grid import (CellSet, DyadicCube, GridFunction, GridSpec, block_reduce,
                   block_sum, upsample)

INFINITY = math.inf
_TINY = 1e-300


@dataclass(frozen=True, eq=False)
class ContentParams:
    """Dimension d in (0, n] and weight w; ``weight=None`` is the unweighted H^d."""

    d: float
    weight: GridFunction | None = None

    def __post_init__(self):
        object.__setattr__(self, "d", float(self.d))
        if self.d <= 0 or not math.isfinite(self.d):
            raise ParameterError(f"content dimension d must be > 0, got {self.d}")
        if self.weight is not None and self.d > self.weight.spec.n:
            raise ParameterError(
                f"content dimension d must satisfy d <= n={self.weight.spec.n}, got {self.d}")

    def check(self, spec: GridSpec) -> None:
        if self.d > spec.n:
            raise ParameterError(f"content dimension d must satisfy d <= n={spec.n}, got {self.d}")
        if self.weight is not None and self.weight.spec != spec:
            raise SpecMismatch("weight and set live on different grids")

    def own_costs(self, spec: GridSpec) -> list[np.ndarray]:
        """Per level, the n-d array of average(w, Q) * l(Q)^d."""
        out = []
        for k in range(spec.L + 1):
            side = float(np.exp2(-k * self.d))
            if self.weight is None:
                out.append(np.full(spec.level_shape(k), side))
            else:
                out.append(self.weight.level_averages(k) * side)
        return out


@dataclass(frozen=True)
class LorentzParams:
    """Exponents of L^{p,q}; q may be ``INFINITY`` (the weak space)."""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ParameterError(f"Lorentz exponent p must be a finite positive number, got {self.p}")
        if not self.q > 0:
            raise ParameterError(f"Lorentz exponent q must be positive or infinite, got {self.q}")


def _cover_tables(E: CellSet, params: ContentParams):
    spec = E.spec
    params.check(spec)
    own = params.own_costs(spec)
    L = spec.L
    nonempty = [None] * (L + 1)
    cost = [None] * (L + 1)
    take = [None] * (L + 1)
    nonempty[L] = E.array
    cost[L] = np.where(nonempty[L], own[L], 0.0)
    take[L] = np.ones(spec.shape, dtype=bool)
    for k in range(L - 1, -1, -1):
        nonempty[k] = block_reduce(nonempty[k + 1], np.logical_or)
        kids = block_sum(cost[k + 1])
        take[k] = own[k] <= kids
        cost[k] = np.where(nonempty[k], np.minimum(own[k], kids), 0.0)
    return nonempty, cost, take


def content(E: CellSet, params: ContentParams) -> float:
    """H^d_w(E): minimum covering cost over dyadic cubes of levels 0..L."""
    _, cost, _ = _cover_tables(E, params)
    return float(cost[0].flat[0])


def optimal_cover(E: CellSet, params: ContentParams) -> list[DyadicCube]:
    """A disjoint minimum-cost covering of E; ties go to the larger cube."""
    nonempty, _, take = _cover_tables(E, params)
    spec = E.spec
    out = []
    covered = np.zeros(spec.level_shape(0), dtype=bool)
    for k in range(spec.L + 1):
        pick = nonempty[k] & take[k] & ~covered
        for idx in zip(*np.nonzero(pick)):
            out.append(DyadicCube(k, tuple(int(i) for i in idx)))
        if k < spec.L:
            covered = upsample(covered | pick)
    return out


def cover_cost(cubes, params: ContentParams, spec: GridSpec) -> float:
    own = params.own_costs(spec)
    return float(sum(own[Q.level][Q.index] for Q in cubes))


@lru_cache(maxsize=32)
def _tree_links(n: int, L: int):
    """Flat (C-order) ancestor indices of every cell, and child lists per cube."""
    spec = GridSpec(n, L)
    coords = np.indices(spec.shape).reshape(n, -1, order="F")  # cell order
    anc = []
    for k in range(L + 1):
        c = coords >> (L - k)
        flat = np.ravel_multi_index(tuple(c), spec.level_shape(k))
        anc.append(flat.tolist())
    kids = []
    for k in range(L):
        idx = np.arange(1 << (n * k))
        parent_coords = np.unravel_index(idx, spec.level_shape(k))
        rows = []
        for offs in np.ndindex(*(2,) * n):
            cc = tuple(2 * pc + o for pc, o in zip(parent_coords, offs))
            rows.append(np.ravel_multi_index(cc, spec.level_shape(k + 1)))
        kids.append(np.stack(rows, axis=1).tolist())
    return anc, kids


def superlevel_contents(f: GridFunction, params: ContentParams) -> tuple[np.ndarray, np.ndarray]:
    """Distinct positive values t_1 < ... < t_m of f and H_i = content({f >= t_i}).

    Cells are inserted in decreasing value order and the covering costs are
    repaired along the inserted cell's ancestor chain, stopping as soon as a
    cost is unchanged.  O(N L 2^n) in the worst case.
    """
    spec = f.spec
    params.check(spec)
    L = spec.L
    anc, kids = _tree_links(spec.n, L)
    own = [o.reshape(-1).tolist() for o in params.own_costs(spec)]
    cost = [[0.0] * (1 << (spec.n * k)) for k in range(L + 1)]
    vals = f.values
    order = np.argsort(-vals, kind="stable")
    order = order[vals[order] > 0]
    if order.size == 0:
        return np.zeros(0), np.zeros(0)
    sorted_vals = vals[order]
    # group boundaries for equal values
    breaks = np.flatnonzero(np.diff(sorted_vals)) + 1
    starts = np.concatenate(([0], breaks)).tolist()
    ends = np.concatenate((breaks, [order.size])).tolist()
    order = order.tolist()
    ts, hs = [], []
    leaf_anc = anc[L]
    for s, e in zip(starts, ends):
        for c in order[s:e]:
            leaf = leaf_anc[c]
            new = own[L][leaf]
            if new == cost[L][leaf]:
                continue
            cost[L][leaf] = new
            for k in range(L - 1, -1, -1):
                a = anc[k][c]
                below = cost[k + 1]
                ssum = 0.0
                for ch in kids[k][a]:
                    ssum += below[ch]
                o = own[k][a]
                new = o if o <= ssum else ssum
                if new == cost[k][a]:
                    break
                cost[k][a] = new
        ts.append(float(sorted_vals[s]))
        hs.append(cost[0][0])
    return np.array(ts[::-1]), np.array(hs[::-1])


def _pow(base: float, e: float) -> float:
    if base == 0.0:
        return 0.0
    if base < _TINY:
        return math.exp(e * math.log(base))
    return base ** e


def choquet_integral(f: GridFunction, params: ContentParams) -> float:
    """Layer-cake integral sum_i (t_i - t_{i-1}) * content({f >= t_i})."""
    ts, hs = superlevel_contents(f, params)
    total = 0.0
    prev = 0.0
    for t, h in zip(ts.tolist(), hs.tolist()):
        total += (t - prev) * h
        prev = t
    return total


def lorentz_from_distribution(ts, hs, lp: LorentzParams) -> float:
    """Quasinorm from ascending breakpoints t_i and contents H_i = H({f >= t_i})."""
    p, q = lp.p, lp.q
    if len(ts) == 0:
        return 0.0
    if math.isinf(q):
        best = 0.0
        for t, h in zip(ts, hs):
            best = max(best, t * _pow(h, 1.0 / p))
        return best
    # factor out the largest value so t^q neither underflows nor overflows
    top = ts[-1]
    total = 0.0
    prev = 0.0
    for t, h in zip(ts, hs):
        tq = _pow(t / top, q)
        total += _pow(h, q / p) * (tq - prev)
        prev = tq
    return top * _pow(total / q, 1.0 / q)


def lorentz_quasinorm(f: GridFunction, lp: LorentzParams, cp: ContentParams) -> float:
    """(int_0^inf (t^p H({f>t}))^{q/p} dt/t)^{1/q}, or sup_t t H({f>t})^{1/p} for q = inf."""
    ts, hs = superlevel_contents(f, cp)
    return lorentz_from_distribution(ts.tolist(), hs.tolist(), lp)
