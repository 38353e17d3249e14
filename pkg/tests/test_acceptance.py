"""Acceptance gate: ten criteria, each printed as one PASS/FAIL line.

Run under pytest (``pytest tests/test_acceptance.py -v``) or directly
(``python3 tests/test_acceptance.py``).  Each ``criterion_*`` function returns
(ok, detail) and never raises on a failed check, so the printed summary is
complete even when something breaks.
"""

import math
import os
import sys
import time
from functools import lru_cache

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from oracles import AntichainTable, random_function  # noqa: E402

from dyadic_fs.content import ContentParams, choquet_integral, content  # noqa: E402
from dyadic_fs.coverings import (maximal_cubes, packing_report,  # noqa: E402
                                 packing_subfamily)
from dyadic_fs.errors import PackingViolation  # noqa: E402
from dyadic_fs.grid import CellSet, GridFunction, GridSpec, level_set  # noqa: E402
from dyadic_fs.lab.generators import GeneratorSpec, generate_instance, trial_seed  # noqa: E402
from dyadic_fs.lab.params import TheoremParams, weak_delta_consistent  # noqa: E402
from dyadic_fs.lab.reports import SUMMARY_FIELDS, csv_text, dumps_report  # noqa: E402
from dyadic_fs.lab.reports import validate_report  # noqa: E402
from dyadic_fs.lab.suites import (hill_climb_adversary, refinement_pairs,  # noqa: E402
                                  run_suite)
from dyadic_fs.lab.verify import domination_violations, power_identity_sides  # noqa: E402
from dyadic_fs.operators import (fractional_maximal,  # noqa: E402
                                 maximal_on_indicator_closed_form)

import json  # noqa: E402

SUITE_TRIALS = 1000
SUITE_SECONDS = 60.0

# (theorem id, params, generator kinds) at n = 2, L = 5
SUITE_POINTS = [
    ("strong", TheoremParams.strong(2, 5, 1.5, 0.5, 0.25, 1.0, 1.5), ("indicator", "rough")),
    ("strong", TheoremParams.strong(2, 5, 1.5, 0.25, 0.1, 0.9, 1.2), ("lacunary", "indicator")),
    ("adams", TheoremParams.strong(2, 5, 1.0, 0.5, 0.0, 1.0, 1.5), ("rough", "one")),
    ("ov", TheoremParams.strong(2, 5, 1.5, 0.0, 0.0, 1.25, 1.25), ("lacunary", "rough")),
    ("tang", TheoremParams.strong(2, 5, 1.5, 0.5, 0.0, 1.0, 1.0), ("indicator", "a1")),
    ("weak", TheoremParams.weak(2, 5, 1.0, 0.5, 0.25, 0.6), ("indicator", "rough")),
    ("ov", TheoremParams.weak(2, 5, 1.5, 0.0, 0.0, 0.75), ("rough", "rough")),
    ("adams", TheoremParams.weak(2, 5, 1.0, 0.5, 0.0, 0.75), ("lacunary", "one")),
]

# weak-type points of the family suite (maximal cubes, packing, first inequality)
EQ21_POINTS = [
    (TheoremParams.weak(2, 5, 1.0, 0.5, 0.25, 0.6), ("indicator", "rough"), 120),
    (TheoremParams.weak(2, 5, 1.5, 0.5, 0.0, 1.0), ("lacunary", "rough"), 120),
    (TheoremParams.weak(2, 4, 0.5, 1.0, 0.5, 0.5), ("rough", "indicator"), 120),
]


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def criterion_1():
    """Closed-form M_alpha[1_Q] equals the operator on every cube."""
    start = time.perf_counter()
    worst, checked = 0.0, 0
    for n in (1, 2):
        for L in range(0, 6):
            spec = GridSpec(n, L)
            for alpha in (0.0, 0.5, 1.0):
                if alpha >= n:
                    continue
                for Q in spec.cubes():
                    a = maximal_on_indicator_closed_form(Q, alpha, spec).values
                    b = fractional_maximal(GridFunction.indicator(spec, Q), alpha).values
                    worst = max(worst, float(np.max(np.abs(a - b))))
                    checked += 1
    secs = time.perf_counter() - start
    ok = worst <= 1e-12 and secs < 10
    return ok, f"{checked} (cube, alpha) pairs, max abs error {worst:.3g}, {secs:.2f}s"


def criterion_2():
    """Content DP against the exhaustive antichain minimum."""
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    worst, checked = 0.0, 0
    for n, subsets in ((1, None), (2, 200)):
        spec = GridSpec(n, 2)
        table = AntichainTable(spec)
        N = spec.num_cells
        if subsets is None:
            masks = [np.array([(b >> i) & 1 for i in range(N)], dtype=bool) for b in range(1 << N)]
        else:
            masks = [rng.random(N) < rng.uniform(0.1, 0.9) for _ in range(subsets)]
        for d in (0.5, 1.0, 1.5, 2.0):
            if d > n:
                continue
            for _ in range(5):
                w = GridFunction(spec, np.exp2(rng.uniform(-4, 4, size=N)))
                costs = table.costs(w.values, d)
                cp = ContentParams(d, w)
                for m in masks:
                    got = content(CellSet(spec, m), cp)
                    want = table.minimum(m, costs) if m.any() else 0.0
                    worst = max(worst, _rel(got, want))
                    checked += 1
    secs = time.perf_counter() - start
    ok = worst <= 1e-12 and secs < 30
    return ok, f"{checked} (set, d, weight) cases, max rel error {worst:.3g}, {secs:.2f}s"


def criterion_3():
    """Unweighted content at d = n is Lebesgue measure; Choquet integral is the mean."""
    rng = np.random.default_rng(3)
    spec = GridSpec(2, 5)
    cp = ContentParams(2.0, GridFunction.constant(spec))
    worst_set = 0.0
    for _ in range(100):
        m = rng.random(spec.num_cells) < rng.uniform(0, 1)
        E = CellSet(spec, m)
        worst_set = max(worst_set, abs(content(E, cp) - E.measure()))
    worst_int = 0.0
    for _ in range(100):
        f = GridFunction(spec, random_function(rng, spec))
        worst_int = max(worst_int, _rel(choquet_integral(f, cp), float(np.mean(f.values))))
    ok = worst_set <= 1e-12 and worst_int <= 1e-10
    return ok, f"set abs error {worst_set:.3g}, integral rel error {worst_int:.3g}"


POWER_TRIPLES = [
    TheoremParams.strong(2, 4, 1.2, 0.5, 0.0, 1.0, 2.0),
    TheoremParams.strong(2, 4, 1.2, 0.5, 0.0, 0.75, 1.5),
    TheoremParams.strong(2, 4, 1.5, 0.25, 0.1, 1.25, 1.5),
]


def criterion_4():
    """||M f||^p in L^{q,p} equals (1/p)||(M f)^p|| in L^{q/p,1}."""
    worst, count = 0.0, 0
    for j, tp in enumerate(POWER_TRIPLES):
        gen = GeneratorSpec(tp.n, tp.L, "rough", "rough")
        for i in range(100):
            f, w = generate_instance(gen, trial_seed(40 + j, i))
            lhs, rhs = power_identity_sides(f, w, tp)
            worst = max(worst, _rel(lhs, rhs))
            count += 1
    return worst <= 1e-10, f"{count} instances over {len(POWER_TRIPLES)} (d, alpha, gamma, p, q), max rel error {worst:.3g}"


def criterion_5():
    """Pointwise power and layer dominations, cell by cell."""
    rng = np.random.default_rng(5)
    spec = GridSpec(2, 4)
    totals = {}
    branches = {"ge1": 0, "lt1": 0}
    for i in range(200):
        f = GridFunction(spec, random_function(rng, spec, 0.4))
        w = GridFunction(spec, np.exp2(rng.uniform(-6, 6, size=spec.num_cells)))
        d = float(rng.uniform(0.5, 2.0))
        for p in (1.0, 1.5, 2.0):
            alpha = float(rng.uniform(0, 0.99 * spec.n / p))
            for k, v in domination_violations(f, alpha, p, ContentParams(d, w)).items():
                totals[k] = totals.get(k, 0) + v
            branches["ge1"] += 1
        p = float(rng.uniform(d / spec.n, 1.0))
        if d / spec.n < p < 1:
            alpha = float(rng.uniform(0, 0.99 * d / p))
            for k, v in domination_violations(f, alpha, p, ContentParams(d, w)).items():
                totals[k] = totals.get(k, 0) + v
            branches["lt1"] += 1
    ok = sum(totals.values()) == 0 and branches["lt1"] > 0
    return ok, f"branch runs {branches}, violations {totals}"


@lru_cache(maxsize=1)
def eq21_suite():
    """Family-level statistics of the weak-type family suite."""
    stats = {"families": 0, "cubes": 0, "first_fail": 0, "packing_fail": 0, "cover_fail": 0,
             "errors": 0, "finite": True, "points": []}
    for tp, (fk, wk), trials in EQ21_POINTS:
        gen = GeneratorSpec(tp.n, tp.L, fk, wk)
        try:
            res = run_suite("eq21", tp, gen, trials, seed=21)
        except PackingViolation:
            stats["errors"] += 1
            continue
        fams = set()
        for rep in res.reports:
            ex = rep.extras
            fams.add((rep.seed, ex["t"]))
            stats["cubes"] += 1
            stats["first_fail"] += not ex["first_holds"]
            stats["packing_fail"] += not all(ex["packing"].values())
            stats["cover_fail"] += not ex["cover_bound_holds"]
            stats["finite"] &= math.isfinite(rep.ratio)
        stats["families"] += len(fams)
        stats["points"].append(tp)
    return stats


def criterion_6():
    """Maximal cubes tile the superlevel set of M_alpha f; first family inequality exact."""
    rng = np.random.default_rng(6)
    bad = {"union": 0, "overlap": 0, "parent": 0}
    for i in range(500):
        spec = GridSpec(int(rng.integers(1, 3)), int(rng.integers(1, 6)))
        f = GridFunction(spec, random_function(rng, spec))
        alpha = float(rng.uniform(0, 0.99 * spec.n))
        Mf = fractional_maximal(f, alpha)
        top = float(Mf.values.max())
        if top == 0:
            f = GridFunction.constant(spec, 1.0)
            Mf, top = fractional_maximal(f, alpha), 1.0
        t = float(rng.uniform(0.01, 1.1)) * top
        fam = maximal_cubes(f, alpha, t)
        bad["union"] += fam.union() != level_set(Mf, t)
        bad["overlap"] += not fam.is_disjoint()
        for Q in fam:
            if Q.level and f.average(Q.parent()) * 2.0 ** (-(Q.level - 1) * alpha) > t:
                bad["parent"] += 1
    st = eq21_suite()
    ok = sum(bad.values()) == 0 and st["first_fail"] == 0 and st["cubes"] > 0 and st["errors"] == 0
    return ok, f"500 random (f, alpha, t) violations {bad}; first inequality failures {st['first_fail']} of {st['cubes']} cubes"


def criterion_7():
    """Packing subfamily properties (i)-(iii) on every family of the weak-type suite."""
    st = eq21_suite()
    ok = (st["families"] >= 500 and st["packing_fail"] == 0 and st["cover_fail"] == 0
          and st["errors"] == 0)
    return ok, (f"{st['families']} families, packing failures {st['packing_fail']}, "
                f"cover-bound failures {st['cover_fail']}, aborted points {st['errors']}")


def _suite_point(theorem_id, tp, kinds, seed=8):
    gen = GeneratorSpec(tp.n, tp.L, *kinds)
    start = time.perf_counter()
    res = run_suite(theorem_id, tp, gen, SUITE_TRIALS, seed)
    secs = time.perf_counter() - start
    return res, secs, csv_text([res.estimate.row()], SUMMARY_FIELDS)


def criterion_8():
    """Theorem suites: validity, finite ratios, recorded sup, reproducible CSV, runtime."""
    lines, ok = [], True
    for theorem_id, tp, kinds in SUITE_POINTS:
        res, secs, text = _suite_point(theorem_id, tp, kinds)
        _, _, again = _suite_point(theorem_id, tp, kinds)
        reps = res.reports
        invalid = sum(not r.valid for r in reps)
        infinite = sum(not math.isfinite(r.ratio) for r in reps)
        est = res.estimate
        good = (len(reps) >= SUITE_TRIALS and invalid == 0 and infinite == 0
                and est.violations == 0 and math.isfinite(est.sup_ratio)
                and est.argmax_digest is not None and text == again and secs < SUITE_SECONDS)
        ok &= good
        lines.append(f"{theorem_id}/{tp.kind} d={tp.d} a={tp.alpha} g={tp.gamma} p={tp.p} q={tp.q}: "
                     f"sup={est.sup_ratio:.4g} viol={est.violations} csv_same={text == again} "
                     f"{secs:.1f}s {'ok' if good else 'BAD'}")
    return ok, "; ".join(lines)


def criterion_9():
    """Conjectured-pairing suites across L = 3, 4, 5: complete, deterministic, schema-valid."""
    problems, traj = [], []
    for variant, tp in (("remark14-strong", TheoremParams.strong(2, 3, 1.5, 0.5, 0.25, 1.0, 1.5)),
                        ("remark14-weak", TheoremParams.weak(2, 3, 1.0, 0.5, 0.25, 0.6))):
        gen = GeneratorSpec(2, 3, "indicator", "indicator")
        a = refinement_pairs(variant, tp, gen, [3, 4, 5], 30, 9)
        b = refinement_pairs(variant, tp, gen, [3, 4, 5], 30, 9)
        if a != b:
            problems.append(f"{variant} refinement rows differ")
        traj.append(f"{variant} sup by L " + ",".join(f"{r['sup_ratio']:.3g}" for r in a))
        for L in (3, 4, 5):
            tpl = TheoremParams(tp.n, L, tp.d, tp.alpha, tp.gamma, tp.p, tp.q, tp.kind)
            genl = GeneratorSpec(2, L, "indicator", "indicator")
            for rep in run_suite(variant, tpl, genl, 10, 9).reports:
                rec = json.loads(dumps_report(rep.to_json()))
                problems.extend(validate_report(rec))
            c1 = hill_climb_adversary(tpl, variant, 9, 20, genl)
            c2 = hill_climb_adversary(tpl, variant, 9, 20, genl)
            if c1.trajectory != c2.trajectory:
                problems.append(f"{variant} L={L} climb not deterministic")
            if any(y < x for x, y in zip(c1.trajectory, c1.trajectory[1:])):
                problems.append(f"{variant} L={L} trajectory decreased")
    return not problems, "; ".join(traj) + (f"; problems {problems[:3]}" if problems else "")


def criterion_10():
    """Exact rational delta identity at p = d/n for every weak-type point used."""
    pts = [tp for _, tp, _ in SUITE_POINTS if tp.kind == "weak"] + [tp for tp, _, _ in EQ21_POINTS]
    bad = [tp for tp in pts if not weak_delta_consistent(tp.n, tp.d, tp.alpha, tp.gamma, tp.q)]
    return not bad, f"{len(pts)} weak-type points, {len(bad)} inconsistent"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def _line(i, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {i}: {detail}"


@pytest.mark.parametrize("i", range(1, len(CRITERIA) + 1))
def test_criterion(i, capsys):
    ok, detail = CRITERIA[i - 1]()
    with capsys.disabled():
        print("\n" + _line(i, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        results.append(ok)
        print(_line(i, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
