"""Suite runner, constant estimation and adversarial search."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..coverings import packing_subfamily, packing_report, maximal_cubes
from ..errors import ParameterError
from ..grid import GridFunction
from .generators import (GeneratorSpec, a1_constant, generate_instance, instance_digest,
                         random_cube, trial_seed)
from .params import STRONG, WEAK, TheoremParams
from .verify import (CONJECTURED, EXACT_RTOL, RatioReport, adams_sides, tang_sides,
                     verify_eq_2_1, verify_lemma_2_1, verify_remark_1_4, verify_strong_type,
                     verify_weak_type, weak_breakpoints, weak_cover_bound)

THEOREM_IDS = ("lemma21", "strong", "weak", "eq21", "adams", "tang", "ov",
               "remark14-strong", "remark14-weak")

SPECIALIZATION_RTOL = 1e-10


def check_suite_params(theorem_id: str, tp: TheoremParams) -> None:
    """Admissibility of tp for the suite; raises ParameterError naming the constraint."""
    if theorem_id not in THEOREM_IDS:
        raise ParameterError(f"unknown theorem id {theorem_id!r}; choose from {THEOREM_IDS}")
    tp.validate()
    need = {"lemma21": STRONG, "strong": STRONG, "weak": WEAK, "eq21": WEAK,
            "remark14-strong": STRONG, "remark14-weak": WEAK}.get(theorem_id)
    if need is not None and tp.kind != need:
        raise ParameterError(f"{theorem_id} requires {need}-type parameters")
    if theorem_id == "adams" and tp.gamma != 0:
        raise ParameterError("adams requires gamma = 0")
    if theorem_id == "ov" and (tp.alpha != 0 or tp.gamma != 0 or tp.p != tp.q):
        raise ParameterError("ov requires alpha = gamma = 0 and p = q")
    if theorem_id == "tang" and (tp.kind != STRONG or tp.gamma != 0 or tp.p != tp.q):
        raise ParameterError("tang requires strong-type parameters with p = q and gamma = 0")
    if theorem_id == "tang" and tp.delta != tp.d - tp.alpha * tp.p:
        raise ParameterError("tang requires delta = d - alpha p")


def suite_generator(theorem_id: str, gen: GeneratorSpec) -> GeneratorSpec:
    """Weights forced by the specialization: w = 1 for Adams, power weights for Tang."""
    if theorem_id == "adams" and gen.w_kind != "one":
        return replace(gen, w_kind="one")
    if theorem_id == "tang" and gen.w_kind != "a1":
        return replace(gen, w_kind="a1")
    return gen


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def evaluate(theorem_id: str, f: GridFunction, w: GridFunction, tp: TheoremParams,
             aux_seed: int = 0, thresholds: int = 3) -> list[RatioReport]:
    """All reports the suite produces for one (f, w) instance."""
    aux = np.random.default_rng(np.random.SeedSequence([int(aux_seed), 1]))
    main = verify_strong_type if tp.kind == STRONG else verify_weak_type
    if theorem_id in ("strong", "weak", "ov"):
        rep = main(f, w, tp)
        rep.theorem_id = theorem_id
        return [rep]
    if theorem_id == "adams":
        rep = main(f, w, tp)
        rep.theorem_id = "adams"
        lhs, rhs = adams_sides(f, tp)
        rep.extras.update(adams_lhs=lhs, adams_rhs=rhs,
                          adams_consistent=_rel(lhs, rep.lhs) <= SPECIALIZATION_RTOL
                          and _rel(rhs, rep.rhs) <= SPECIALIZATION_RTOL)
        return [rep]
    if theorem_id == "tang":
        rep = main(f, w, tp)
        rep.theorem_id = "tang"
        lhs, rhs = tang_sides(f, w, tp)
        rep.extras.update(tang_lhs=lhs, tang_rhs=rhs,
                          tang_ratio=(lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else None)),
                          a1_constant=a1_constant(w))
        return [rep]
    if theorem_id == "lemma21":
        Q = random_cube(f.spec, aux)
        return [verify_lemma_2_1(Q, w, tp)]
    if theorem_id.startswith("remark14-"):
        return [verify_remark_1_4(f, w, tp, theorem_id.split("-", 1)[1])]
    if theorem_id == "eq21":
        return _eq21_reports(f, w, tp, aux, thresholds)
    raise ParameterError(f"unknown theorem id {theorem_id!r}")


def _eq21_reports(f, w, tp, aux, thresholds) -> list[RatioReport]:
    ts, _ = weak_breakpoints(f, tp, w)
    if ts.size == 0:
        return []
    lows = np.concatenate(([0.0], ts[:-1]))
    picks = aux.choice(ts.size, size=min(thresholds, ts.size), replace=False)
    out = []
    for i in sorted(int(x) for x in picks):
        t = 0.5 * (lows[i] + ts[i])
        fam = maximal_cubes(f, tp.alpha, t)
        pk = packing_subfamily(fam, tp.d)
        prep = packing_report(fam, pk, tp.d)
        clhs, crhs = weak_cover_bound(f, w, tp, t, pk.selected, pk.residual)
        extras = {"family_size": len(fam), "selected": len(pk.selected),
                  "residual": len(pk.residual),
                  "packing": {k: prep[k] for k in ("i", "ii", "iii")},
                  "cover_bound_holds": bool(clhs <= crhs * (1 + EXACT_RTOL))}
        for rep in verify_eq_2_1(f, fam, tp, t):
            rep.extras.update(extras)
            out.append(rep)
    return out


def report_ok(rep: RatioReport) -> bool:
    """Validity of a proven-theorem report, including the exact side conditions."""
    if not rep.valid:
        return False
    ex = rep.extras
    if ex.get("first_holds") is False or ex.get("cover_bound_holds") is False:
        return False
    if "packing" in ex and not all(ex["packing"].values()):
        return False
    if ex.get("adams_consistent") is False:
        return False
    return True


@dataclass
class EstimatedConstant:
    params: TheoremParams
    theorem_id: str
    sup_ratio: float
    argmax_digest: str | None
    trials: int
    generator_id: str
    seed: int
    reports: int = 0
    violations: int = 0

    def row(self) -> dict:
        rec = self.params.record()
        return {"theorem_id": self.theorem_id, **rec, "generator_id": self.generator_id,
                "seed": self.seed, "trials": self.trials, "reports": self.reports,
                "sup_ratio": self.sup_ratio, "argmax_digest": self.argmax_digest or "",
                "violations": self.violations}


@dataclass
class SuiteResult:
    estimate: EstimatedConstant
    reports: list[RatioReport] = field(default_factory=list)

    @property
    def proven_violations(self) -> int:
        if self.estimate.theorem_id in CONJECTURED:
            return 0
        return self.estimate.violations


def run_suite(theorem_id: str, tp: TheoremParams, gen: GeneratorSpec, trials: int,
              seed: int, keep_reports: bool = True) -> SuiteResult:
    """Run ``trials`` generated instances; trial i draws from (seed, i) alone."""
    check_suite_params(theorem_id, tp)
    if (gen.n, gen.L) != (tp.n, tp.L):
        raise ParameterError("generator grid does not match theorem parameters")
    if trials < 0:
        raise ParameterError("trials must be >= 0")
    gen = suite_generator(theorem_id, gen)
    reports = []
    best, best_digest, count, bad = 0.0, None, 0, 0
    for i in range(trials):
        s = trial_seed(seed, i)
        f, w = generate_instance(gen, s)
        digest = instance_digest(f, w)
        for rep in evaluate(theorem_id, f, w, tp, aux_seed=s):
            rep.seed, rep.instance_digest, rep.generator_id = s, digest, gen.generator_id
            count += 1
            ok = report_ok(rep) if theorem_id not in CONJECTURED else rep.valid
            bad += not ok
            r = rep.ratio
            if best_digest is None or r > best:
                best, best_digest = r, digest
            if keep_reports:
                reports.append(rep)
    est = EstimatedConstant(tp, theorem_id, best, best_digest, trials, gen.generator_id,
                            int(seed), count, bad)
    return SuiteResult(est, reports)


def estimate_constant(tp: TheoremParams, generator: GeneratorSpec, trials: int, seed: int,
                      theorem_id: str | None = None) -> EstimatedConstant:
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    theorem_id = theorem_id or tp.kind
    return run_suite(theorem_id, tp, generator, trials, seed, keep_reports=False).estimate


def instance_ratio(verifier_id: str, f, w, tp) -> float:
    if verifier_id == "strong":
        return verify_strong_type(f, w, tp).ratio
    if verifier_id == "weak":
        return verify_weak_type(f, w, tp).ratio
    if verifier_id in ("remark14-strong", "remark14-weak"):
        return verify_remark_1_4(f, w, tp, verifier_id.split("-", 1)[1]).ratio
    raise ParameterError(f"hill climbing supports strong, weak, remark14-strong, remark14-weak; got {verifier_id!r}")


@dataclass
class ClimbResult:
    estimate: EstimatedConstant
    f: GridFunction
    w: GridFunction
    initial_ratio: float
    trajectory: list[float]
    accepted: int


def hill_climb_adversary(tp: TheoremParams, verifier_id: str, init_seed: int, steps: int,
                         generator: GeneratorSpec) -> ClimbResult:
    """Single-cell x2 / x1/2 perturbations of f or w, kept when the ratio increases."""
    if steps < 0:
        raise ParameterError("steps must be >= 0")
    f, w = generate_instance(generator, init_seed)
    best = instance_ratio(verifier_id, f, w, tp)
    initial = best
    traj = [best]
    rng = np.random.default_rng(np.random.SeedSequence([int(init_seed), 2]))
    vary_w = generator.w_kind not in ("one", "zero")
    N = f.spec.num_cells
    accepted = 0
    for _ in range(steps):
        target = "w" if vary_w and rng.random() < 0.5 else "f"
        cell = int(rng.integers(N))
        factor = 2.0 if rng.random() < 0.5 else 0.5
        g = f if target == "f" else w
        vals = g.values.copy()
        vals[cell] *= factor
        cand = GridFunction(g.spec, vals)
        nf, nw = (cand, w) if target == "f" else (f, cand)
        r = instance_ratio(verifier_id, nf, nw, tp)
        if r > best:
            f, w, best = nf, nw, r
            accepted += 1
            traj.append(best)
    est = EstimatedConstant(tp, verifier_id, best, instance_digest(f, w), 1,
                            generator.generator_id + ";climb", int(init_seed), 1 + steps, 0)
    return ClimbResult(est, f, w, initial, traj, accepted)


def refinement_pairs(theorem_id: str, tp: TheoremParams, gen: GeneratorSpec, depths,
                     trials: int, seed: int) -> list[dict]:
    """sup_ratio at each depth L, for human review of growth under refinement."""
    rows = []
    for L in depths:
        tpl = replace(tp, L=int(L))
        genl = replace(gen, L=int(L))
        est = run_suite(theorem_id, tpl, genl, trials, seed, keep_reports=False).estimate
        rows.append({"theorem_id": theorem_id, "L": int(L), "sup_ratio": est.sup_ratio,
                     "trials": trials, "argmax_digest": est.argmax_digest or ""})
    return rows
