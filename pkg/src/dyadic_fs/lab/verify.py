"""Both sides of each inequality, evaluated on one instance.

Every side goes through the same content DP and layer-cake code, so the
reported ratios are constants of the truncated model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..content import (INFINITY, ContentParams, LorentzParams, choquet_integral, content,
                       lorentz_quasinorm, superlevel_contents)
from ..coverings import CubeFamily, layer_decomposition, maximal_cubes
from ..errors import ParameterError
from ..grid import DyadicCube, GridFunction
from ..operators import fractional_maximal, maximal_on_indicator_closed_form
from .params import STRONG, WEAK, TheoremParams

# relative slack for inequalities that hold exactly in real arithmetic
EXACT_RTOL = 1e-12

PROVEN = ("lemma21", "strong", "weak", "eq21", "adams", "tang", "ov")
CONJECTURED = ("remark14-strong", "remark14-weak")


@dataclass
class RatioReport:
    params: TheoremParams
    lhs: float
    rhs: float
    theorem_id: str
    seed: int | None = None
    instance_digest: str | None = None
    generator_id: str | None = None
    extras: dict = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return self.lhs == 0 and self.rhs == 0

    @property
    def valid(self) -> bool:
        """rhs = 0 must force lhs = 0."""
        return not (self.rhs == 0 and self.lhs > 0)

    @property
    def ratio(self) -> float:
        if self.rhs > 0:
            return self.lhs / self.rhs
        return 0.0 if self.lhs == 0 else math.inf

    @property
    def candidate(self) -> bool:
        return self.theorem_id in CONJECTURED and not self.valid

    def to_json(self) -> dict:
        ratio = self.ratio
        out = {
            "params": self.params.record(),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": ratio if math.isfinite(ratio) else None,
            "degenerate": self.degenerate,
            "valid": self.valid,
            "seed": self.seed,
            "instance_digest": self.instance_digest,
            "generator_id": self.generator_id,
            "theorem_id": self.theorem_id,
        }
        if self.theorem_id in CONJECTURED:
            out["candidate"] = self.candidate
        if self.extras:
            out["extras"] = self.extras
        return out


def transformed_weight(w: GridFunction, tp: TheoremParams) -> GridFunction:
    """(M_{gamma q} w)^{p/q}, the weight carried by the right-hand sides."""
    return fractional_maximal(w, tp.weight_order).power(tp.weight_exponent)


def _require_kind(tp: TheoremParams, kind: str) -> None:
    if tp.kind != kind:
        raise ParameterError(f"this verifier needs {kind}-type parameters, got {tp.kind}")
    tp.validate()


def _check_grid(tp: TheoremParams, *gs: GridFunction) -> None:
    for g in gs:
        if (g.spec.n, g.spec.L) != (tp.n, tp.L):
            raise ParameterError(
                f"instance grid (n={g.spec.n}, L={g.spec.L}) does not match params (n={tp.n}, L={tp.L})")


def strong_lhs(f: GridFunction, w: GridFunction | None, tp: TheoremParams) -> float:
    """||M_alpha f|| in L^{q,p}(H^delta_w)."""
    Mf = fractional_maximal(f, tp.alpha)
    return lorentz_quasinorm(Mf, LorentzParams(tp.q, tp.p), ContentParams(tp.delta, w))


def weak_lhs(f: GridFunction, w: GridFunction | None, tp: TheoremParams) -> float:
    """sup_t t H^delta_w({M_alpha f > t})^{1/q}, exact over the breakpoints."""
    Mf = fractional_maximal(f, tp.alpha)
    return lorentz_quasinorm(Mf, LorentzParams(tp.q, INFINITY), ContentParams(tp.delta, w))


def rhs_weighted_content(f: GridFunction, W: GridFunction, tp: TheoremParams) -> float:
    """(int f^p dH^d_W)^{1/p}."""
    return choquet_integral(f.power(tp.p), ContentParams(tp.d, W)) ** (1.0 / tp.p)


def rhs_pointwise_weight(f: GridFunction, W: GridFunction, tp: TheoremParams) -> float:
    """(int f^p W dH^d)^{1/p}, the weight multiplying the integrand."""
    return choquet_integral(f.power(tp.p) * W, ContentParams(tp.d)) ** (1.0 / tp.p)


def verify_lemma_2_1(Q: DyadicCube, w: GridFunction, tp: TheoremParams) -> RatioReport:
    _require_kind(tp, STRONG)
    _check_grid(tp, w)
    M1 = maximal_on_indicator_closed_form(Q, tp.alpha, w.spec)
    lhs = lorentz_quasinorm(M1, LorentzParams(tp.q, tp.p), ContentParams(tp.delta, w)) ** tp.p
    W = transformed_weight(w, tp)
    rhs = W.average(Q) * float(np.exp2(-Q.level * tp.d))
    return RatioReport(tp, lhs, rhs, "lemma21", extras={"cube": [Q.level, *Q.index]})


def verify_strong_type(f: GridFunction, w: GridFunction, tp: TheoremParams) -> RatioReport:
    _require_kind(tp, STRONG)
    _check_grid(tp, f, w)
    lhs = strong_lhs(f, w, tp)
    rhs = rhs_weighted_content(f, transformed_weight(w, tp), tp)
    return RatioReport(tp, lhs, rhs, "strong")


def verify_weak_type(f: GridFunction, w: GridFunction, tp: TheoremParams) -> RatioReport:
    _require_kind(tp, WEAK)
    _check_grid(tp, f, w)
    lhs = weak_lhs(f, w, tp)
    rhs = rhs_pointwise_weight(f, transformed_weight(w, tp), tp)
    return RatioReport(tp, lhs, rhs, "weak")


def verify_remark_1_4(f: GridFunction, w: GridFunction, tp: TheoremParams, variant: str) -> RatioReport:
    """The conjectured pairings: strong lhs against the pointwise-weight rhs,
    weak lhs against the weighted-content rhs.  Nothing is asserted."""
    _check_grid(tp, f, w)
    W = transformed_weight(w, tp)
    if variant == "strong":
        _require_kind(tp, STRONG)
        lhs, rhs = strong_lhs(f, w, tp), rhs_pointwise_weight(f, W, tp)
    elif variant == "weak":
        _require_kind(tp, WEAK)
        lhs, rhs = weak_lhs(f, w, tp), rhs_weighted_content(f, W, tp)
    else:
        raise ParameterError(f"variant must be 'strong' or 'weak', got {variant!r}")
    return RatioReport(tp, lhs, rhs, f"remark14-{variant}")


def adams_sides(f: GridFunction, tp: TheoremParams) -> tuple[float, float]:
    """Unweighted sides (gamma = 0, w = 1) through the weight-free content path."""
    Mf = fractional_maximal(f, tp.alpha)
    cp = ContentParams(tp.delta)
    fp = f.power(tp.p)
    rhs = choquet_integral(fp, ContentParams(tp.d)) ** (1.0 / tp.p)
    if tp.kind == WEAK:
        return lorentz_quasinorm(Mf, LorentzParams(tp.q, INFINITY), cp), rhs
    return lorentz_quasinorm(Mf, LorentzParams(tp.q, tp.p), cp), rhs


def tang_sides(f: GridFunction, w: GridFunction, tp: TheoremParams) -> tuple[float, float]:
    """int (M_alpha f)^p dH^{d - alpha p}_w and int f^p dH^d_w (p = q, gamma = 0)."""
    if tp.p != tp.q or tp.gamma != 0:
        raise ParameterError("the Tang form needs p = q and gamma = 0")
    Mf = fractional_maximal(f, tp.alpha)
    lhs = choquet_integral(Mf.power(tp.p), ContentParams(tp.d - tp.alpha * tp.p, w))
    rhs = choquet_integral(f.power(tp.p), ContentParams(tp.d, w))
    return lhs, rhs


def power_identity_sides(f: GridFunction, w: GridFunction, tp: TheoremParams) -> tuple[float, float]:
    """||M f||^p in L^{q,p} and (1/p)||(M f)^p|| in L^{q/p,1}, same content."""
    Mf = fractional_maximal(f, tp.alpha)
    cp = ContentParams(tp.delta, w)
    lhs = lorentz_quasinorm(Mf, LorentzParams(tp.q, tp.p), cp) ** tp.p
    rhs = lorentz_quasinorm(Mf.power(tp.p), LorentzParams(tp.q / tp.p, 1.0), cp) / tp.p
    return lhs, rhs


def _exceeds(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cells where a > b beyond the exact-arithmetic slack."""
    return a > b * (1.0 + EXACT_RTOL) + 1e-300


def domination_violations(f: GridFunction, alpha: float, p: float, cp: ContentParams) -> dict:
    """Cellwise checks of the pointwise chains in the strong-type argument.

    For p >= 1: (M_a f)^p <= M_{ap}(f^p) <= sum_k 2^{p(k+1)} sum_j M_{ap}(1_{Q_j^k}).
    For p < 1:  (M_a f)^p <= sum_k 2^{p(k+1)} sum_j (M_a 1_{Q_j^k})^p.
    Returns violation counts per link (absent links are not applicable).
    """
    spec = f.spec
    out = {}
    Maf_p = fractional_maximal(f, alpha).power(p).values
    dec = layer_decomposition(f, p, cp)
    if p >= 1:
        if alpha * p >= spec.n:
            raise ParameterError("power domination needs alpha*p < n")
        M_fp = fractional_maximal(f.power(p), alpha * p).values
        total = np.zeros(spec.num_cells)
        for layer in dec.layers:
            for Q in layer.family:
                total += layer.coefficient * maximal_on_indicator_closed_form(Q, alpha * p, spec).values
        out["power"] = int(_exceeds(Maf_p, M_fp).sum())
        out["layers_ge1"] = int(_exceeds(M_fp, total).sum())
    else:
        total = np.zeros(spec.num_cells)
        for layer in dec.layers:
            for Q in layer.family:
                total += layer.coefficient * maximal_on_indicator_closed_form(Q, alpha, spec).power(p).values
        out["layers_lt1"] = int(_exceeds(Maf_p, total).sum())
    out["f_le_g"] = int(_exceeds(f.power(p).values, dec.dominating_function().values).sum())
    out["layer_cost"] = sum(1 for layer in dec.layers
                            if layer.cost > 2 * layer.content * (1 + EXACT_RTOL))
    return out


def proof_chain_constant(f: GridFunction, w: GridFunction, tp: TheoremParams) -> float:
    """lhs^p over (1/p) sum_k 2^{p(k+1)} sum_j ||M_{ap} 1_{Q_j^k}||_{L^{q/p,1}} (p >= 1 branch).

    The layers are covered with weight (M_{gamma q} w)^{p/q}, as in the argument.
    The returned number is the quasi-subadditivity factor actually used.
    """
    if tp.p < 1:
        raise ParameterError("the recorded chain is the p >= 1 branch")
    W = transformed_weight(w, tp)
    dec = layer_decomposition(f, tp.p, ContentParams(tp.d, W))
    cp = ContentParams(tp.delta, w)
    lp = LorentzParams(tp.q / tp.p, 1.0)
    total = 0.0
    for layer in dec.layers:
        for Q in layer.family:
            M1 = maximal_on_indicator_closed_form(Q, tp.alpha * tp.p, f.spec)
            total += layer.coefficient * lorentz_quasinorm(M1, lp, cp)
    total /= tp.p
    lhs = strong_lhs(f, w, tp) ** tp.p
    if total == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / total


def quasi_triangle_ratio(f: GridFunction, g: GridFunction, lp: LorentzParams, cp: ContentParams) -> float:
    """||f+g|| / (||f|| + ||g||); its sup is the empirical quasi-triangle constant."""
    a = lorentz_quasinorm(f + g, lp, cp)
    b = lorentz_quasinorm(f, lp, cp) + lorentz_quasinorm(g, lp, cp)
    return 0.0 if b == 0 else a / b


def verify_eq_2_1(f: GridFunction, family: CubeFamily, tp: TheoremParams, t: float) -> list[RatioReport]:
    """Per maximal cube Q: t^q l^delta <= (l^gamma int_Q f)^q is checked as an
    exact inequality (``extras['first_holds']``); the report's lhs/rhs are the
    middle and right terms (l^gamma int_Q f)^q and l^{gamma q} (int_Q f^p dH^d)^{q/p}.
    """
    _require_kind(tp, WEAK)
    _check_grid(tp, f)
    expected = maximal_cubes(f, tp.alpha, t)
    if set(expected.cubes) != set(family.cubes):
        raise ParameterError("family is not the maximal-cube family of f at threshold t")
    spec = f.spec
    fp = f.power(tp.p)
    cp = ContentParams(tp.d)
    out = []
    for Q in family:
        side = Q.side_length
        first = t ** tp.q * side ** tp.delta
        middle = (side ** tp.gamma * f.integral(Q)) ** tp.q
        local = choquet_integral(fp * GridFunction.indicator(spec, Q), cp)
        right = side ** (tp.gamma * tp.q) * local ** (tp.q / tp.p)
        rep = RatioReport(tp, middle, right, "eq21",
                          extras={"cube": [Q.level, *Q.index], "t": t, "first": first,
                                  "first_holds": bool(first <= middle * (1 + EXACT_RTOL))})
        out.append(rep)
    return out


def weak_cover_bound(f: GridFunction, w: GridFunction, tp: TheoremParams, t: float,
                     selected: CubeFamily, residual: CubeFamily) -> tuple[float, float]:
    """t^q H^delta_w(union Q_j) against t^q times the cost of selected + residual cubes."""
    fam = maximal_cubes(f, tp.alpha, t)
    cp = ContentParams(tp.delta, w)
    lhs = t ** tp.q * content(fam.union(), cp)
    rhs = t ** tp.q * (selected.cost(cp) + residual.cost(cp))
    return lhs, rhs


def weak_breakpoints(f: GridFunction, tp: TheoremParams, w: GridFunction | None = None):
    """Distinct values of M_alpha f with the delta-content of their superlevel sets."""
    Mf = fractional_maximal(f, tp.alpha)
    return superlevel_contents(Mf, ContentParams(tp.delta, w))
