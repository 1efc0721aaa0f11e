import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from artifact import groups as G
from artifact.errors import ArgumentError, BudgetExceeded, CapabilityError, StructuralError


def word_oracle(spec, n):
    """Every product of at most n generators, computed without BFS."""
    out = {spec.identity()}
    for k in range(1, n + 1):
        for word in itertools.product(spec.generators, repeat=k):
            g = spec.identity()
            for s in word:
                g = spec.mul(g, s)
            out.add(g)
    return out


# --- element arithmetic -------------------------------------------------------------


def test_heisenberg_products():
    H = G.heisenberg()
    assert H.mul((1, 0, 0), (0, 1, 0)) == (1, 1, 1)
    assert H.mul((0, 1, 0), (1, 0, 0)) == (1, 1, 0)


def test_lattice_inverse_law():
    Z2 = G.lattice(2)
    assert Z2.mul((3, -1), (-3, 1)) == (0, 0)


def test_arity_mismatch_is_structural():
    with pytest.raises(StructuralError):
        G.lattice(2).mul((1, 2, 3), (0, 0))
    with pytest.raises(StructuralError):
        G.finite_abelian([3]).validate((5,))


def test_generators_closed_under_inversion():
    for spec in (G.lattice(3), G.heisenberg(), G.finite_abelian([2, 3]), G.infinite_dihedral(),
                 G.wreath([2], 1)):
        gens = set(spec.generators)
        assert spec.identity() not in gens
        assert {spec.inv(s) for s in gens} == gens


def test_wreath_canonical_sparse_form():
    W = G.wreath([2], 1)
    lamp = ((((0,), (1,)),), (0,))
    assert W.mul(lamp, lamp) == ((), (0,))
    assert W.mul(lamp, W.inv(lamp)) == W.identity()


ints = st.integers(-6, 6)


def heis_el():
    return st.tuples(ints, ints, ints)


def wreath_el():
    f = st.dictionaries(st.tuples(st.integers(-3, 3)), st.tuples(st.integers(1, 2)), max_size=3)
    return st.builds(lambda m, h: (tuple(sorted(m.items())), h), f, st.tuples(ints))


def vc_el():
    return st.tuples(ints, st.tuples(st.integers(0, 1)))


CASES = [
    (G.lattice(2), st.tuples(ints, ints)),
    (G.heisenberg(), heis_el()),
    (G.finite_abelian([4, 6]), st.tuples(st.integers(0, 3), st.integers(0, 5))),
    (G.infinite_dihedral(), vc_el()),
    (G.wreath([3], 1), wreath_el()),
]


@pytest.mark.parametrize("spec,els", CASES, ids=lambda c: getattr(c, "kind", ""))
def test_group_laws(spec, els):
    @given(els, els, els)
    def run(x, y, z):
        e = spec.identity()
        assert spec.mul(spec.mul(x, y), z) == spec.mul(x, spec.mul(y, z))
        assert spec.mul(x, e) == x == spec.mul(e, x)
        assert spec.mul(x, spec.inv(x)) == e == spec.mul(spec.inv(x), x)

    run()


# --- balls and growth -----------------------------------------------------------------


def test_lattice_growth_closed_forms():
    t2 = G.ball(G.lattice(2), 12)
    assert list(t2.growth) == [2 * n * n + 2 * n + 1 for n in range(13)]
    t1 = G.ball(G.lattice(1), 12)
    assert list(t1.growth) == [2 * n + 1 for n in range(13)]


def test_heisenberg_gr2_against_word_oracle():
    H = G.heisenberg()
    oracle = word_oracle(H, 2)
    assert len(oracle) == 17
    assert G.ball(H, 2).ball_set(2) == oracle


@pytest.mark.parametrize("spec", [G.lattice(2), G.heisenberg(), G.infinite_dihedral(), G.wreath([2], 1)],
                         ids=lambda s: s.kind)
def test_ball_equals_iterated_products(spec):
    t = G.ball(spec, 4)
    B1 = t.ball_set(1)
    for n in range(5):
        assert t.ball_set(n) == G.set_power(spec, B1, n)


def test_ball_table_invariants():
    H = G.heisenberg()
    t = G.ball(H, 6)
    assert t.growth[0] == 1
    assert all(a <= b for a, b in zip(t.growth, t.growth[1:]))
    for g, w in t.words.items():
        assert len(w) <= 6
        assert G.evaluate_word(H, w) == g


def test_ball_words_are_lex_least_shortest():
    H = G.heisenberg()
    t = G.ball(H, 3)
    best = {}
    for k in range(4):
        for w in itertools.product(range(len(H.generators)), repeat=k):
            g = G.evaluate_word(H, w)
            if g not in best:
                best[g] = w
    assert best == t.words


def test_ball_cap_and_negative_radius():
    with pytest.raises(BudgetExceeded):
        G.ball(G.lattice(2), 10, cap=50)
    with pytest.raises(ArgumentError):
        G.ball(G.lattice(1), -1)


def test_degree_estimates():
    assert abs(G.growth_degree_estimate(G.ball(G.lattice(2), 12), range(4, 13)) - 2) <= 0.3
    assert abs(G.growth_degree_estimate(G.ball(G.lattice(1), 12), range(4, 13)) - 1) <= 0.1
    assert abs(G.growth_degree_estimate(G.ball(G.heisenberg(), 12), range(6, 13)) - 4) <= 0.5


def test_degree_window_errors():
    t = G.ball(G.lattice(1), 5)
    with pytest.raises(ArgumentError):
        G.growth_degree_estimate(t, [3])
    with pytest.raises(ArgumentError):
        G.growth_degree_estimate(t, range(1, 4))


# --- structured balls and set products ---------------------------------------------------


def test_structured_ball_examples():
    assert len(G.structured_ball(G.infinite_dihedral(), 1)) == 6
    assert G.structured_ball(G.lattice(1), 0) == {(0,)}
    assert len(G.structured_ball(G.lattice(2), 3)) == 49
    with pytest.raises(CapabilityError):
        G.structured_ball(G.heisenberg(), 1)


@pytest.mark.parametrize("spec", [G.lattice(1), G.lattice(2), G.infinite_dihedral(),
                                  G.virtually_cyclic([2, 3], [-1, 1]), G.finite_abelian([2, 5])],
                         ids=lambda s: s.kind + str(s.params))
def test_structured_ball_sizes_and_products(spec):
    for n in range(11):
        assert len(G.structured_ball(spec, n)) == G.structured_ball_size(spec, n)
    for n, m in [(1, 2), (0, 3), (2, 2)]:
        prod = G.set_product(spec, G.structured_ball(spec, n), G.structured_ball(spec, m))
        assert prod == G.structured_ball(spec, n + m)


def test_closed_form_sizes():
    assert G.structured_ball_size(G.lattice(3), 2) == 125
    vc = G.virtually_cyclic([2, 3], [-1, 1])
    assert G.structured_ball_size(vc, 4) == 9 * 6


def test_set_product_trivial_examples():
    H = G.heisenberg()
    A = {(1, 2, 3), (0, -1, 4)}
    assert G.set_product(H, A, {H.identity()}) == A
    x = (2, 1, 5)
    assert G.set_product(H, {x}, {H.inv(x)}) == {H.identity()}


def test_group_json_roundtrip_and_parse():
    for spec in (G.lattice(2), G.heisenberg(), G.finite_abelian([3]), G.infinite_dihedral(), G.wreath([2], 2)):
        assert G.from_json(spec.to_json()) == spec
    assert G.parse_group("Z2") == G.lattice(2)
    assert G.parse_group("cyclic:6") == G.finite_abelian([6])
    with pytest.raises(ArgumentError):
        G.parse_group("free:2")


def test_growth_csv():
    csv = G.ball(G.lattice(1), 2).to_csv()
    assert csv == "n,Gr(n)\n0,1\n1,3\n2,5\n"


def test_lattice_growth_window_bounds():
    from artifact.lsp import fit_growth_constants

    for d in (1, 2):
        t = G.ball(G.lattice(d), 10)
        C, D = fit_growth_constants(t, d)
        for n in range(1, 11):
            assert C * n ** d <= t.growth[n] <= D * n ** d + 1
        assert C > 0 and math.isfinite(float(D))
