"""Acceptance criteria 1-9, each at its stated tolerance and runtime limit.

Each criterion returns a list of failure descriptions; an empty list is a
pass.  A PASS/FAIL line per criterion is printed in the pytest terminal
summary, and running this file directly prints the same lines.
"""

import itertools
import random
import time
from fractions import Fraction

import pytest

from artifact import allosteric, covers_pou, groups, lsp, ltc, simplicial
from artifact.coarse import Cover, multiplicity
from artifact.dynamics import torus_translation_action
from clumping_oracle import cover_from_signatures, run_signature_family, subfamily_violations
from ltc_cases import proper_systems, violations

RESULTS: dict = {}

Z, Z2, H = groups.lattice(1), groups.lattice(2), groups.heisenberg()


def interval(lo, hi):
    return {(i,) for i in range(lo, hi + 1)}


def expect(fails, cond, what):
    if not cond:
        fails.append(what)


# --- criteria --------------------------------------------------------------------------------


def criterion_1():
    fails = []
    t2 = groups.ball(Z2, 12)
    expect(fails, list(t2.growth) == [2 * n * n + 2 * n + 1 for n in range(13)], "Z^2 closed form")
    t1 = groups.ball(Z, 12)
    expect(fails, list(t1.growth) == [2 * n + 1 for n in range(13)], "Z closed form")
    words = {H.identity()}
    for k in (1, 2):
        for w in itertools.product(H.generators, repeat=k):
            g = H.identity()
            for s in w:
                g = H.mul(g, s)
            words.add(g)
    th = groups.ball(H, 12)
    expect(fails, len(words) == 17 == th.growth[2], f"Heisenberg Gr(2) = {th.growth[2]}, oracle {len(words)}")
    d2 = groups.growth_degree_estimate(t2, range(4, 13))
    expect(fails, abs(d2 - 2) <= 0.3, f"Z^2 degree {d2:.3f}")
    dh = groups.growth_degree_estimate(th, range(6, 13))
    expect(fails, abs(dh - 4) <= 0.5, f"Heisenberg degree {dh:.3f}")
    return fails


def criterion_2():
    fails = []
    c = lsp.lsp_certificate(Z, 0, 1)
    expect(fails, c.m == 3 and c.lhs == 1 * (2 * (3 * c.R // 2 + 1) + 1) and c.rhs == 4 * (2 * (c.R // 2) + 1)
           and c.lhs < c.rhs, f"Z certificate {c.to_dict()}")
    expect(fails, lsp.lsp_certificate(Z2, 0, 1).m == 9, "Z^2 m")
    expect(fails, lsp.lsp_certificate(groups.infinite_dihedral(), 0, 1).m == 3, "dihedral m")
    vals = [lsp.lsp_bad_max(Z, interval(-R - 1, R + 1), interval(-R, R), 0) for R in (2, 4, 6)]
    expect(fails, vals == [3, 3, 3], f"bad-max {vals}")
    return fails


def criterion_3():
    fails = []
    cert = lsp.lsp_certificate(Z, 0, 1)
    for q in (50, 100):
        rep = lsp.lsp_cover_demo(torus_translation_action(Z, [q]), interval(-1, 1), cert)
        m = rep["multiplicity"].value
        expect(fails, m <= 3 and (q != 100 or m == 3), f"q={q} multiplicity {m}")
    rep = lsp.lsp_cover_demo(torus_translation_action(Z2, [30, 30]), groups.ball(Z2, 1).ball_set(1),
                             lsp.lsp_certificate(Z2, 0, 1))
    expect(fails, rep["multiplicity"].value <= 9, f"(Z/30)^2 multiplicity {rep['multiplicity'].value}")
    return fails


def criterion_4():
    fails = []
    rng = random.Random(20240)
    L = interval(-1, 1)
    actions = {}
    for i in range(200):
        q = rng.randint(3, 60)
        N = rng.choice([2, 3, 5])
        a = actions.setdefault(q, torus_translation_action(Z, [q]))
        den = rng.randint(1, 9)
        f = covers_pou.ScalarField(tuple(Fraction(rng.randint(0, den), den) if rng.random() < 0.3 else 0
                                         for _ in range(q)))
        xi = covers_pou.staircase(a, f, L, N)
        if not all(f[x] <= xi[x] <= 1 for x in range(q)):
            fails.append(f"sample {i}: bounds")
        if not xi.support() <= a.orbit_power(L, f.support(), N):
            fails.append(f"sample {i}: support")
        if covers_pou.invariance_defect(a, xi, L) > Fraction(1, N):
            fails.append(f"sample {i}: defect")
    return fails


def criterion_5():
    fails = []
    a = torus_translation_action(Z, [60])
    cover = Cover.from_sets(60, [range(15 * i, 15 * i + 15) for i in range(4)], colors=[0, 1, 0, 1])
    witness = covers_pou.OrbitAsdimWitness(cover, interval(-14, 14))
    for eps in (Fraction(1), Fraction(1, 2)):
        pou = covers_pou.build_orbit_pou(a, range(60), interval(-1, 1), eps, witness)
        rep = covers_pou.verify_orbit_pou(a, pou)
        expect(fails, rep.passed, f"eps={eps}: failed {rep.failed()}")
        sums = {sum(f[x] for *_, f in pou.entries()) for x in range(60)}
        expect(fails, sums == {1}, f"eps={eps}: sums {sums}")
        expect(fails, rep["In"].value <= eps, f"eps={eps}: defect {rep['In'].value}")
    return fails


def criterion_6():
    fails = []
    rep = simplicial.run_property_suite(seed=0, samples=1000, max_support=6)
    expect(fails, rep.passed, f"property suite failed {rep.failed()}")
    # Clumping.  Points with equal membership signatures are interchangeable, so
    # covers with distinct signatures exhaust all covers up to duplicated points.
    count4, bad4 = run_signature_family(4, 8)
    expect(fails, not bad4, f"|Theta|<=4 failures {bad4[:3]}")
    count5, bad5 = run_signature_family(5, 4)
    expect(fails, not bad5, f"|Theta|=5 failures {bad5[:3]}")
    names = [f"U{i}" for i in range(5)]
    for r in range(1, 6):
        for sig in itertools.combinations(names, r):
            xi = simplicial.FinSupportFn({s: Fraction(1, r) for s in sig})
            if simplicial.regions_containing(xi, 0) != [frozenset(sig)]:
                fails.append(f"signature {sig} regions")
    rng = random.Random(6)
    for i in range(1500):
        sigs = [rng.randrange(32) for _ in range(8)]
        theta = cover_from_signatures(sigs, 5)
        if theta is None:
            continue
        K = theta.union()
        if subfamily_violations(simplicial.cover_clumping(8, K, theta), K, theta):
            fails.append(f"random cover {sigs}")
    rng = random.Random(200)
    for i in range(200):
        n = rng.randint(1, 10)
        Ks = [set(rng.sample(range(n), rng.randint(0, n))) for _ in range(rng.randint(1, 5))]
        Us = simplicial.thicken_multiplicity(n, Ks)
        if multiplicity(Us) != multiplicity(Ks) or not all(U >= K for U, K in zip(Us, Ks)):
            fails.append(f"thicken instance {i}")
    return fails


def criterion_7():
    fails = []
    for label, a, theta in proper_systems():
        w, params = ltc.build_proper_witness(a, theta)
        rep = ltc.verify_ltc_witness(a, params, w)
        expect(fails, rep.passed and params.d == 0, f"{label}: {rep.failed()}")
    for clause, a, params, w in violations():
        got = ltc.verify_ltc_witness(a, params, w).failed()
        expect(fails, got == [clause], f"violation {clause}: rejected with {got}")
    return fails


def criterion_8():
    fails = []
    for base, d, delta, levels in (([2], 1, Fraction(1, 2), 3), ([2], 2, Fraction(1, 10), 4)):
        tower = allosteric.auto_tower(base, d, delta, levels)
        rep = allosteric.tower_report(tower, radius=2)
        expect(fails, rep.passed, f"tower {base} rank {d}: {rep.failed()}")
        expect(fails, rep["escape_levels"].passed, f"tower {base} rank {d}: escape levels")
    hand = allosteric.build_tower([2], 1, Fraction(1, 5), [({(0,)}, 5, (2,))])
    ff = allosteric.fixed_fraction(hand, 1, (1,))
    expect(fails, ff.exact == Fraction(4, 5), f"hand instance {ff.exact}")
    tiny = allosteric.build_tower([2], 1, Fraction(1, 2), [({(0,)}, 4, (2,))])
    red = allosteric.fixed_fraction(tiny, 1, (1,)).exact
    brute = allosteric.brute_force_fixed_fraction(tiny, 1, (1,))
    expect(fails, red == brute, f"tiny instance: torus {red} vs brute force {brute}")
    return fails


def criterion_9():
    fails = []
    v = ltc.bounds_calculator(ltc.BoundsInput(asdim=1, dimX_plus=0, dimLTC=2, dstab=0))["values"]
    expect(fails, v["main"] == (1 + 1) * (0 + 1) * (2 + 1) * (0 + 1) == 6, f"main {v['main']}")
    v = ltc.bounds_calculator(ltc.BoundsInput(dimLTC=2, dstab=0))["values"]
    expect(fails, v["abstract"] == (2 + 1) ** 3 * (0 + 1) == 27, f"abstract {v['abstract']}")
    v = ltc.bounds_calculator(ltc.BoundsInput(rank=1, dstab=0, dimX=0))["values"]
    expect(fails, v["virnil"] == 9 ** 1 * 1 * 1 == 9, f"virnil {v['virnil']}")
    return fails


CRITERIA = [
    (1, "growth tables and degree estimates", criterion_1, 60),
    (2, "LSP certificates and bad-max oracle", criterion_2, 10),
    (3, "greedy cover multiplicity", criterion_3, 30),
    (4, "staircase lemma on 200 random fields", criterion_4, None),
    (5, "orbit partition of unity on Z/60", criterion_5, 30),
    (6, "simplicial suite, clumping and thickening", criterion_6, 60),
    (7, "LTC proper witnesses and single-clause violations", criterion_7, None),
    (8, "allosteric towers, fixed fractions, escape levels", criterion_8, 60),
    (9, "dimension bound calculators", criterion_9, None),
]


def evaluate(number, fn, limit):
    start = time.perf_counter()
    fails = fn()
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed >= limit:
        fails = fails + [f"runtime {elapsed:.1f}s exceeds {limit}s"]
    RESULTS[number] = (not fails, elapsed, fails)
    return fails


def summary_lines():
    out = []
    for number, title, _, _ in CRITERIA:
        if number in RESULTS:
            ok, elapsed, fails = RESULTS[number]
            tail = "" if ok else " :: " + "; ".join(fails[:3])
            out.append(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {title}{tail}")
    return out


@pytest.mark.parametrize("number,title,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, limit):
    fails = evaluate(number, fn, limit)
    assert fails == [], f"criterion {number} ({title}): {fails}"


if __name__ == "__main__":
    for number, _, fn, limit in CRITERIA:
        evaluate(number, fn, limit)
    print("\n".join(summary_lines()))
