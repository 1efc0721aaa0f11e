import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from artifact import coarse as C
from artifact.errors import ArgumentError, BudgetExceeded


def E_of(n, pairs):
    return C.Entourage(n, frozenset(pairs))


def test_set_operations():
    assert C.invert(E_of(3, {(0, 1)})).pairs == {(1, 0)}
    assert C.compose(E_of(3, {(0, 1)}), E_of(3, {(1, 2)})).pairs == {(0, 2)}
    assert C.restrict(E_of(3, {(0, 1), (1, 2)}), {0, 1}).pairs == {(0, 1)}
    assert C.union(E_of(3, {(0, 1)}), E_of(3, {(1, 2)})).pairs == {(0, 1), (1, 2)}
    with pytest.raises(ArgumentError):
        C.compose(E_of(3, set()), E_of(4, set()))


def test_entourage_rejects_outside_pairs():
    with pytest.raises(ArgumentError):
        E_of(3, {(0, 3)})


def test_e_components_examples():
    E = C.line_entourage(10, 1)
    assert sorted(map(sorted, C.e_components({0, 1, 2, 5, 6}, E))) == [[0, 1, 2], [5, 6]]
    assert sorted(map(sorted, C.e_components({0, 1, 2}, C.diagonal(10)))) == [[0], [1], [2]]
    assert C.e_components(set(), E) == []


def test_neighborhood_and_core():
    E = C.line_entourage(10, 1)
    A = {3, 4, 5}
    assert C.e_neighborhood(A, E) == {2, 3, 4, 5, 6}
    assert C.e_core(A, E) == {4}
    D = C.diagonal(10)
    assert C.e_neighborhood(A, D) == A == C.e_core(A, D)


def test_multiplicity_examples():
    blocks = C.Cover.from_sets(12, [range(3 * i, 3 * i + 3) for i in range(4)])
    assert C.multiplicity(blocks) == 1
    assert C.e_multiplicity(blocks, C.diagonal(12)) == 1
    assert C.e_multiplicity(blocks, C.line_entourage(12, 1, cyclic=True)) == 2
    one = C.Cover.from_sets(5, [range(5)])
    assert C.multiplicity(one) == 1 == C.e_multiplicity(one, C.full(5))


def test_empty_member_rejected():
    with pytest.raises(ArgumentError):
        C.Cover.from_sets(3, [[0], []])


def test_e_multiplicity_budget():
    cover = C.Cover.from_sets(30, [range(i, i + 6) for i in range(0, 25)])
    with pytest.raises(BudgetExceeded) as exc:
        C.e_multiplicity(cover, C.full(30), budget=3)
    assert exc.value.best is not None


def interval_cover(colors=True):
    sets = [[x for x in range(10 * k - 4, 10 * k + 6) if 0 <= x < 100] for k in range(11)]
    sets = [s for s in sets if s]
    return C.Cover.from_sets(100, sets, colors=[i % 2 for i in range(len(sets))] if colors else None)


def test_check_asdim_separated_pass_and_fail():
    E = C.line_entourage(100, 3)
    W = C.line_entourage(100, 9)
    cov = interval_cover()
    assert C.check_asdim_witness(cov, E, W, 1, "separated").passed
    rep = C.check_asdim_witness(cov, E, W, 0, "separated")
    assert not rep.passed
    assert rep["colors"].passed is False
    w = rep["colors"].witness
    assert "overlap_point" in w
    # The intervals are disjoint; the witness is an E-close pair spanning two members.
    x, y = w["pair"]
    assert w["overlap_point"] == x
    assert (x, y) in E.pairs
    a, b = (cov.member(m) for m in w["members"])
    assert x in a and y in b


def test_check_asdim_trivial_cover_any_style():
    n = 7
    cov = C.Cover.from_sets(n, [range(n)], colors=[0])
    E, W = C.line_entourage(n, 2), C.full(n)
    for style in ("separated", "mult", "multWide"):
        for d in (0, 3):
            assert C.check_asdim_witness(cov, E, W, d, style).passed


def test_check_asdim_errors_and_violations():
    cov = interval_cover(colors=False)
    with pytest.raises(ArgumentError):
        C.check_asdim_witness(cov, C.diagonal(100), C.full(100), 1, "separated")
    with pytest.raises(ArgumentError):
        C.check_asdim_witness(cov, C.diagonal(100), C.full(100), 1, "bogus")
    rep = C.check_asdim_witness(cov, C.diagonal(100), C.line_entourage(100, 3), 5, "mult")
    assert not rep["bounded"].passed
    part = C.Cover.from_sets(10, [range(5)])
    rep = C.check_asdim_witness(part, C.diagonal(10), C.full(10), 0, "mult")
    assert rep["cover"].witness == {"point": 5}


def test_check_asdim_mult_wide():
    E = C.line_entourage(20, 1)
    cov = C.Cover.from_sets(20, [range(0, 11), range(9, 20)])
    rep = C.check_asdim_witness(cov, E, C.full(20), 1, "mult")
    assert rep.passed
    rep = C.check_asdim_witness(C.Cover.from_sets(20, [range(0, 10), range(10, 20)]), E, C.full(20), 1, "mult")
    assert not rep["wide"].passed


def test_finitary_probe_examples():
    E = C.line_entourage(30, 2)
    W = C.line_entourage(30, 8)
    assert C.finitary_asdim_probe([range(30)], E, W, 1).passed
    rep = C.finitary_asdim_probe([[4]], E, W, 0)
    assert rep.passed and rep["Y0"].value["members"] == 1
    rep = C.finitary_asdim_probe([[0, 1, 2]], E, C.diagonal(30), 0)
    assert not rep.passed
    assert "inconclusive" in rep["Y0"].note
    assert rep["Y0"].value["e_multiplicity"] == 3


def test_exact_asdim_min():
    E = C.line_entourage(8, 1)
    d, cov = C.exact_asdim_min(range(8), E, C.line_entourage(8, 2))
    assert d == 1
    d0, _ = C.exact_asdim_min(range(8), E, C.full(8))
    assert d0 == 0
    with pytest.raises(ArgumentError):
        C.exact_asdim_min(range(17), C.line_entourage(20, 1), C.full(20))


def test_json_roundtrip():
    E = C.line_entourage(5, 1)
    assert C.entourage_from_json(5, E.to_json()).pairs == E.pairs
    cov = interval_cover()
    back = C.Cover.from_json(100, cov.to_json())
    assert back.members == cov.members and back.colors == cov.colors


# --- property tests -----------------------------------------------------------------------


@st.composite
def instances(draw, max_n=12):
    n = draw(st.integers(2, max_n))
    pts = st.integers(0, n - 1)
    pairs = draw(st.sets(st.tuples(pts, pts), max_size=3 * n))
    sets = draw(st.lists(st.sets(pts, min_size=1, max_size=4), min_size=1, max_size=5))
    return n, C.Entourage(n, frozenset(pairs)), C.Cover.from_sets(n, sets)


def sym_refl(E):
    return C.union(C.union(E, C.invert(E)), C.diagonal(E.n))


@given(instances())
def test_multiplicity_is_diagonal_e_multiplicity(inst):
    n, _, cov = inst
    assert C.multiplicity(cov) == C.e_multiplicity(cov, C.diagonal(n))


@given(instances(), st.data())
def test_restrict_never_increases_e_multiplicity(inst, data):
    n, E, cov = inst
    Y = data.draw(st.sets(st.integers(0, n - 1)))
    assert C.e_multiplicity(cov, C.restrict(E, Y)) <= C.e_multiplicity(cov, E)


@given(instances(), st.data())
def test_components_pairwise_separated(inst, data):
    n, E, _ = inst
    Y = data.draw(st.sets(st.integers(0, n - 1)))
    comps = C.e_components(Y, E)
    assert set().union(*comps) == Y if comps else not Y
    for i, A in enumerate(comps):
        for B in comps[i + 1:]:
            assert not any((x, y) in E.pairs or (y, x) in E.pairs for x in A for y in B)


@given(instances(), st.data())
def test_core_neighborhood_sandwich(inst, data):
    n, E, _ = inst
    E = sym_refl(E)
    A = data.draw(st.sets(st.integers(0, n - 1)))
    assert C.e_neighborhood(C.e_core(A, E), E) <= A <= C.e_core(C.e_neighborhood(A, E), E)


def test_shrink_enlarge_monotonicity_random():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(5, 40)
        r = rng.randint(0, 2)
        E = C.line_entourage(n, r, cyclic=rng.random() < 0.5)
        sets = []
        for _ in range(rng.randint(1, 6)):
            a = rng.randrange(n)
            sets.append({(a + i) % n for i in range(rng.randint(1, 8))})
        cov = C.Cover.from_sets(n, sets)
        cores = [C.e_core(s, E) for s in sets]
        cores = [c for c in cores if c]
        if cores:
            assert C.e_multiplicity(C.Cover.from_sets(n, cores), E) <= C.multiplicity(cov)
        nb = C.Cover.from_sets(n, [C.e_neighborhood(s, E) for s in sets])
        assert C.multiplicity(nb) <= C.e_multiplicity(cov, C.compose(E, E))


def test_max_clique_matches_bruteforce():
    import itertools

    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(1, 9)
        adj = {v: set() for v in range(n)}
        for u, v in itertools.combinations(range(n), 2):
            if rng.random() < 0.5:
                adj[u].add(v)
                adj[v].add(u)
        best = max(k for k in range(n + 1) for S in itertools.combinations(range(n), k)
                   if all(b in adj[a] for a, b in itertools.combinations(S, 2)))
        res = C.max_clique(list(range(n)), adj)
        assert res.exact and res.size == best
