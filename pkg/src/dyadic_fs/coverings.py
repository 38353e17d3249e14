"""Covering constructions used in the proofs of the strong and weak estimates.

* ``maximal_cubes``: Calderon-Zygmund family of maximal cubes above a threshold.
* ``layer_decomposition``: optimal coverings of the dyadic layers {2^k < f <= 2^(k+1)}.
* ``packing_subfamily``: selected cubes obeying a packing bound plus residual cubes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .content import ContentParams, content, cover_cost, optimal_cover
from .errors import GridError, PackingViolation, ParameterError
from .grid import CellSet, DyadicCube, GridFunction, GridSpec, upsample
from .operators import check_alpha, scaled_averages

# slack on floating comparisons of packing sums; sums are of exact powers
# of two only when d is an integer
PACKING_RTOL = 1e-12


@dataclass(frozen=True)
class CubeFamily:
    spec: GridSpec
    cubes: tuple[DyadicCube, ...] = ()
    disjoint: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cubes", tuple(self.cubes))
        for Q in self.cubes:
            self.spec.validate(Q)
        if self.disjoint and not self.is_disjoint():
            raise GridError("family flagged disjoint contains overlapping cubes")

    def __len__(self):
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    def is_disjoint(self) -> bool:
        seen = set(self.cubes)
        if len(seen) != len(self.cubes):
            return False
        for Q in self.cubes:
            for A in Q.ancestors():
                if A in seen:
                    return False
        return True

    def union(self) -> CellSet:
        return CellSet.from_cubes(self.spec, self.cubes)

    def cost(self, params: ContentParams) -> float:
        return cover_cost(self.cubes, params, self.spec)


def maximal_cubes(f: GridFunction, alpha: float, t: float) -> CubeFamily:
    """Inclusion-maximal cubes with average(f, Q) * l(Q)^alpha > t."""
    if not t > 0:
        raise ParameterError(f"threshold t must be > 0, got {t}")
    check_alpha(alpha, f.spec.n)
    vals = scaled_averages(f, alpha)
    spec = f.spec
    out = []
    covered = np.zeros(spec.level_shape(0), dtype=bool)
    for k in range(spec.L + 1):
        pick = (vals[k] > t) & ~covered
        for idx in zip(*np.nonzero(pick)):
            out.append(DyadicCube(k, tuple(int(i) for i in idx)))
        if k < spec.L:
            covered = upsample(covered | pick)
    return CubeFamily(spec, out, disjoint=True)


@dataclass(frozen=True)
class Layer:
    k: int
    family: CubeFamily
    coefficient: float
    cells: CellSet
    cost: float
    content: float


@dataclass(frozen=True)
class LayerDecomposition:
    p: float
    layers: tuple[Layer, ...] = field(default_factory=tuple)

    def dominating_function(self) -> GridFunction:
        """g = sum_k 2^(p(k+1)) 1_{A_k}, A_k the union of layer k's cubes."""
        spec = self.layers[0].family.spec
        g = np.zeros(spec.num_cells)
        for layer in self.layers:
            g += layer.coefficient * layer.family.union().mask
        return GridFunction(spec, g)


def layer_range(f: GridFunction) -> range:
    pos = f.values[f.values > 0]
    lo = math.floor(math.log2(pos.min())) - 1
    hi = math.ceil(math.log2(pos.max()))
    return range(lo, hi + 1)


def layer_decomposition(f: GridFunction, p: float, cp: ContentParams) -> LayerDecomposition:
    """Optimal coverings of each nonempty layer {2^k < f <= 2^(k+1)}.

    The layer costs meet the factor-2 slack of the argument with factor 1.
    """
    if not np.any(f.values > 0):
        raise ParameterError("layer decomposition needs f not identically 0")
    layers = []
    v = f.values
    for k in layer_range(f):
        cells = CellSet(f.spec, (v > np.ldexp(1.0, k)) & (v <= np.ldexp(1.0, k + 1)))
        if cells.is_empty():
            continue
        fam = CubeFamily(f.spec, optimal_cover(cells, cp), disjoint=True)
        layers.append(Layer(k, fam, float(np.exp2(p * (k + 1))), cells,
                            fam.cost(cp), content(cells, cp)))
    return LayerDecomposition(float(p), tuple(layers))


@dataclass(frozen=True)
class PackingResult:
    selected: CubeFamily
    residual: CubeFamily


def packing_subfamily(family: CubeFamily, d: float) -> PackingResult:
    """Greedy packing subfamily.

    Cubes are taken largest first.  A cube whose insertion would push some
    ancestor A over sum l^d <= 2 l(A)^d is dropped; the smallest such ancestor
    becomes a residual cube and swallows the family cubes (and any earlier
    residuals) inside it.  The three properties are checked before returning.
    """
    spec = family.spec
    if not 0 < d <= spec.n:
        raise ParameterError(f"packing dimension d must lie in (0, n={spec.n}], got {d}")
    if not family.is_disjoint():
        raise GridError("packing_subfamily requires a pairwise disjoint family")
    load: dict[DyadicCube, float] = {}
    selected: list[DyadicCube] = []
    residual: list[DyadicCube] = []
    for Q in sorted(family.cubes, key=lambda c: (c.level, c.index)):
        if any(R.contains(Q) for R in residual):
            continue
        lq = float(np.exp2(-Q.level * d))
        bad = None
        for A in Q.ancestors():  # smallest first
            if load.get(A, 0.0) + lq > 2.0 * float(np.exp2(-A.level * d)):
                bad = A
                break
        if bad is None:
            selected.append(Q)
            for A in [Q] + Q.ancestors():
                load[A] = load.get(A, 0.0) + lq
        else:
            residual = [R for R in residual if not bad.contains(R)]
            residual.append(bad)
    result = PackingResult(CubeFamily(spec, selected, disjoint=True),
                           CubeFamily(spec, residual, disjoint=True))
    check_packing(family, result, d)
    return result


def packing_report(family: CubeFamily, result: PackingResult, d: float) -> dict:
    """Worst slack of each property; a property holds iff its flag is True."""
    spec = family.spec
    load: dict[DyadicCube, float] = {}
    for Q in result.selected:
        lq = float(np.exp2(-Q.level * d))
        for A in [Q] + Q.ancestors():
            load[A] = load.get(A, 0.0) + lq
    worst_i = max((s / (2.0 * float(np.exp2(-A.level * d))) for A, s in load.items()),
                  default=0.0)
    sel_set = set(result.selected)
    covered = (result.selected.union() | result.residual.union())
    ii = family.union().issubset(covered)
    worst_iii = math.inf
    for R in result.residual:
        inner = sum(float(np.exp2(-Q.level * d)) for Q in sel_set if R.contains(Q))
        need = float(np.exp2(-R.level * d))
        worst_iii = min(worst_iii, inner / need if need > 0 else math.inf)
    subset = sel_set.issubset(set(family.cubes))
    return {
        "packing_ratio": worst_i,
        "i": worst_i <= 1.0 + PACKING_RTOL,
        "ii": bool(ii),
        "residual_ratio": worst_iii,
        "iii": worst_iii >= 1.0 - PACKING_RTOL,
        "subfamily": subset,
        "residual_disjoint": result.residual.is_disjoint(),
    }


def check_packing(family: CubeFamily, result: PackingResult, d: float) -> dict:
    rep = packing_report(family, result, d)
    failed = [k for k in ("i", "ii", "iii", "subfamily", "residual_disjoint") if not rep[k]]
    if failed:
        raise PackingViolation(f"packing properties {failed} failed: {rep}")
    return rep
