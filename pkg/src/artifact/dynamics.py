"""Finite group actions, the orbit coarse structure and action-level multiplicities.

A group element acts through the stored shortest word of a Cayley ball: the
word (i_1, ..., i_k) acts as alpha_{s_{i_1}} o ... o alpha_{s_{i_k}}.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, Sequence

from .coarse import Cover, CliqueResult, Entourage, multiplicity, transversal_multiplicity
from .errors import ArgumentError, BudgetExceeded, CapabilityError
from .groups import DEFAULT_BALL_CAP, BallEnumerator, GroupSpec, set_inverse
from .groups import from_json as group_from_json
from .report import Report

DEFAULT_COSET_CAP = 100_000


def _compose(p: Sequence[int], q: Sequence[int]) -> tuple:
    """(p o q)(x) = p[q[x]]."""
    return tuple(p[y] for y in q)


def _inverse_perm(p: Sequence[int]) -> tuple:
    out = [0] * len(p)
    for i, y in enumerate(p):
        out[y] = i
    return tuple(out)


class FiniteAction:
    """A group acting on ``{0..n-1}`` through permutations of its generators.

    ``generator_perms[i]`` is the permutation of generator ``spec.generators[i]``.
    On construction the permutations are checked to be bijections, compatible
    with inversion, and to define an action on the Cayley ball of radius
    ``check_radius`` (perm(g s) must equal perm(g) o perm(s)).
    """

    def __init__(self, spec: GroupSpec, n: int, generator_perms: Sequence[Sequence[int]], *,
                 check_radius: int = 3, max_radius: int = 64, ball_cap: int = DEFAULT_BALL_CAP):
        if len(generator_perms) != len(spec.generators):
            raise ArgumentError(f"need {len(spec.generators)} generator permutations, got {len(generator_perms)}")
        self.spec = spec
        self.n = n
        self.gen_perms = tuple(tuple(int(v) for v in p) for p in generator_perms)
        for i, p in enumerate(self.gen_perms):
            if sorted(p) != list(range(n)):
                raise ArgumentError(f"generator {spec.generator_names[i]} is not a permutation of {n} points")
        index = {g: i for i, g in enumerate(spec.generators)}
        for i, g in enumerate(spec.generators):
            j = index[spec.inv(g)]
            if self.gen_perms[j] != _inverse_perm(self.gen_perms[i]):
                raise ArgumentError(
                    f"perm of {spec.generator_names[j]} is not the inverse of perm of {spec.generator_names[i]}"
                )
        self.max_radius = max_radius
        self._ball = BallEnumerator(spec, ball_cap)
        self._cache: dict = {spec.identity(): tuple(range(n))}
        self._check_action(check_radius)

    def _check_action(self, radius: int) -> None:
        en = self._ball
        while en.radius < radius and not en.saturated:
            en.step()
        for g, w in list(en.words.items()):
            if len(w) >= radius:
                continue
            pg = self.perm(g)
            for i, s in enumerate(self.spec.generators):
                gs = self.spec.mul(g, s)
                if self.perm(gs) != _compose(pg, self.gen_perms[i]):
                    raise ArgumentError(
                        f"generator permutations do not define an action: words for {gs} disagree"
                    )

    # --- evaluation -------------------------------------------------------------

    def word(self, g) -> tuple:
        en = self._ball
        while g not in en.words:
            if en.saturated or en.radius >= self.max_radius:
                raise CapabilityError(
                    f"element {g} lies outside the enumerated ball (radius {en.radius}); enumerate a larger ball"
                )
            en.step()
        return en.words[g]

    def perm(self, g) -> tuple:
        p = self._cache.get(g)
        if p is None:
            p = tuple(range(self.n))
            for i in self.word(g):
                p = _compose(p, self.gen_perms[i])
            self._cache[g] = p
        return p

    def act(self, g, x: int) -> int:
        return self.perm(g)[x]

    def image(self, S: Iterable, Y: Iterable[int]) -> set:
        """alpha_S(Y) = {alpha_g(y) : g in S, y in Y}."""
        Y = list(Y)
        out = set()
        for g in S:
            p = self.perm(g)
            out.update(p[y] for y in Y)
        return out

    def orbit_power(self, L: Iterable, Y: Iterable[int], k: int) -> set:
        """alpha_{L^k}(Y), computed by applying L k times."""
        perms = [self.perm(g) for g in L]
        cur = set(Y)
        for _ in range(k):
            cur = {p[y] for p in perms for y in cur}
        return cur

    def orbits(self) -> list[frozenset]:
        seen: set = set()
        out = []
        for x in range(self.n):
            if x in seen:
                continue
            orb = {x}
            stack = [x]
            while stack:
                y = stack.pop()
                for p in self.gen_perms:
                    z = p[y]
                    if z not in orb:
                        orb.add(z)
                        stack.append(z)
            seen |= orb
            out.append(frozenset(orb))
        return out

    def group_elements(self) -> list:
        """All elements of a finite acting group, in canonical word order."""
        if not self.spec.is_finite:
            raise CapabilityError("acting group is infinite")
        en = self._ball
        while not en.saturated:
            en.step()
        return sorted(en.words, key=lambda g: (len(en.words[g]), en.words[g]))

    def to_json(self) -> dict:
        return {
            "points": self.n,
            "group": self.spec.to_json(),
            "generators": {name: list(p) for name, p in zip(self.spec.generator_names, self.gen_perms)},
        }


def action_from_json(data: Mapping, **kw) -> FiniteAction:
    """Parse ``{"points": n, "group": GroupSpec, "generators": {name: perm}}``.

    Missing generators are filled in as inverses of listed ones.
    """
    spec = group_from_json(data["group"])
    n = int(data["points"])
    given = {str(k): v for k, v in data["generators"].items()}
    perms: list = [None] * len(spec.generators)
    for i, name in enumerate(spec.generator_names):
        if name in given:
            perms[i] = given[name]
        elif str(i) in given:
            perms[i] = given[str(i)]
    index = {g: i for i, g in enumerate(spec.generators)}
    for i, g in enumerate(spec.generators):
        if perms[i] is None:
            j = index[spec.inv(g)]
            if perms[j] is None:
                raise ArgumentError(f"no permutation for generator {spec.generator_names[i]} or its inverse")
            perms[i] = _inverse_perm(perms[j])
    return FiniteAction(spec, n, perms, **kw)


def action_from_function(spec: GroupSpec, n: int, fn: Callable, **kw) -> FiniteAction:
    """Build an action from ``fn(generator_element, x) -> point``."""
    return FiniteAction(spec, n, [[fn(g, x) for x in range(n)] for g in spec.generators], **kw)


def torus_translation_action(spec: GroupSpec, moduli: Sequence[int], **kw) -> FiniteAction:
    """Z^d acting on prod Z/q_i by translation; points are mixed-radix ids."""
    if spec.kind != "lattice" or spec.params[0] != len(moduli):
        raise ArgumentError("need a lattice spec whose rank matches the torus")
    coords = list(itertools.product(*(range(q) for q in moduli)))
    ids = {c: i for i, c in enumerate(coords)}

    def move(g, x):
        return ids[tuple((a + b) % q for a, b, q in zip(coords[x], g, moduli))]

    return action_from_function(spec, len(coords), move, **kw)


def regular_action(spec: GroupSpec, **kw) -> FiniteAction:
    """A finite abelian group acting on itself by translation."""
    if not spec.is_finite:
        raise CapabilityError("regular action needs a finite group")
    elems = sorted(itertools.product(*(range(m) for m in spec.params[0])))
    ids = {g: i for i, g in enumerate(elems)}
    return action_from_function(spec, len(elems), lambda g, x: ids[spec.mul(g, elems[x])], **kw)


# --- orbit coarse structure ------------------------------------------------------


def orbit_entourage(a: FiniteAction, K: Iterable[int], L: Iterable) -> Entourage:
    """E_{K,L} = {(alpha_g x, x) : g in L, x in K, alpha_g x in K}."""
    K = set(K)
    pairs = set()
    for g in L:
        p = a.perm(g)
        for x in K:
            if p[x] in K:
                pairs.add((p[x], x))
    return Entourage(a.n, frozenset(pairs))


def _step_neighbours(a: FiniteAction, Y: set, L: Iterable) -> dict:
    perms = [a.perm(g) for g in L]
    nb: dict = {y: set() for y in Y}
    for y in Y:
        for p in perms:
            z = p[y]
            if z in Y and z != y:
                nb[y].add(z)
                nb[z].add(y)
    return nb


def l_components(a: FiniteAction, Y: Iterable[int], L: Iterable) -> list[frozenset]:
    """L-connected components of Y (steps from L or its inverse, staying in Y)."""
    Y = set(Y)
    nb = _step_neighbours(a, Y, L)
    seen: set = set()
    out = []
    for y in sorted(Y):
        if y in seen:
            continue
        comp = {y}
        stack = [y]
        while stack:
            u = stack.pop()
            for v in nb[u]:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        out.append(frozenset(comp))
    return out


def l_distances(a: FiniteAction, Y: Iterable[int], L: Iterable) -> dict:
    """All-pairs path lengths inside Y (missing entries mean disconnected)."""
    Y = set(Y)
    nb = _step_neighbours(a, Y, L)
    dist: dict = {}
    for s in Y:
        d = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in nb[u]:
                    if v not in d:
                        d[v] = d[u] + 1
                        nxt.append(v)
            frontier = nxt
        for t, k in d.items():
            dist[(s, t)] = k
    return dist


def is_l_bounded(a: FiniteAction, Y: Iterable[int], L: Iterable, N: int) -> bool:
    """Whether every pair of Y is joined inside Y by at most N steps from L or its inverse."""
    Y = set(Y)
    dist = l_distances(a, Y, L)
    return all(dist.get((x, y), N + 1) <= N for x in Y for y in Y)


def close_sets(a: FiniteAction, L: Iterable) -> list[set]:
    """For each x, alpha_{L u {e} u L^{-1}}(x)."""
    L = set(L)
    S = L | set_inverse(a.spec, L) | {a.spec.identity()}
    perms = [a.perm(g) for g in S]
    return [{p[x] for p in perms} for x in range(a.n)]


def alpha_l_multiplicity_search(a: FiniteAction, cover: Cover, L: Iterable,
                                budget: int | None = None) -> CliqueResult:
    near = close_sets(a, L)
    return transversal_multiplicity(cover.sets, lambda x, y: y in near[x], budget)


def alpha_l_multiplicity(a: FiniteAction, cover: Cover, L: Iterable, budget: int | None = None) -> int:
    """(alpha, L)-multiplicity of the cover; BudgetExceeded carries a lower bound."""
    res = alpha_l_multiplicity_search(a, cover, L, budget)
    if not res.exact:
        raise BudgetExceeded("(alpha,L)-multiplicity search exceeded its budget", best=res.size)
    return res.size


def modified_stabilizer(a: FiniteAction, x: int, P: Iterable) -> list:
    """Generators {p in P : alpha_p(x) = x} of the modified stabilizer G_x^P."""
    return sorted((p for p in set(P) if a.act(p, x) == x), key=repr)


def shrink_set(a: FiniteAction, Y: Iterable[int], L: Iterable) -> set:
    """alpha^cap_L(Y) = {y : alpha_{h^{-1}}(y) in Y for every h in L}."""
    Y = set(Y)
    inv_perms = [a.perm(a.spec.inv(h)) for h in L]
    return {y for y in range(a.n) if all(p[y] in Y for p in inv_perms)}


def enlarge_set(a: FiniteAction, Y: Iterable[int], L: Iterable) -> set:
    """alpha^cup_L(Y) = union of alpha_h(Y) over h in L."""
    return a.image(L, Y)


def shrink(a: FiniteAction, cover: Cover, L: Iterable) -> tuple[Cover | None, list[str]]:
    """Member-wise shrinking; empty results are dropped and their names returned."""
    L = list(L)
    kept, dropped = [], []
    for name, pts in cover.members:
        s = shrink_set(a, pts, L)
        (kept if s else dropped).append((name, s))
    new = Cover(a.n, tuple(kept)) if kept else None
    return new, [name for name, _ in dropped]


def enlarge(a: FiniteAction, cover: Cover, L: Iterable) -> Cover:
    L = list(L)
    return Cover(a.n, tuple((name, enlarge_set(a, pts, L)) for name, pts in cover.members))


# --- coset actions ----------------------------------------------------------------


class CosetAction(FiniteAction):
    """Left translation on G/H with canonical representatives."""

    representatives: list


def coset_action(spec: GroupSpec, membership: Callable, seed_radius: int, *,
                 cap: int = DEFAULT_COSET_CAP, check_radius: int = 3) -> CosetAction:
    """Enumerate G/H for the subgroup H = {g : membership(g)} and act by left translation.

    Representatives are the first ball elements of each coset in (length, word)
    order, i.e. the lexicographically least shortest-word elements.  The
    transversal is accepted only if left multiplication by every generator
    maps it into itself, which proves it meets every coset.
    """
    en = BallEnumerator(spec)
    while en.radius < seed_radius and not en.saturated:
        en.step()
    ordered = sorted(en.words, key=lambda g: (len(en.words[g]), en.words[g]))
    reps: list = []
    for g in ordered:
        if not any(membership(spec.mul(spec.inv(r), g)) for r in reps):
            reps.append(g)
            if len(reps) > cap:
                raise BudgetExceeded(f"coset count exceeds cap {cap}", best=len(reps))

    def locate(h):
        for i, r in enumerate(reps):
            if membership(spec.mul(spec.inv(r), h)):
                return i
        return None

    perms = []
    for s in spec.generators:
        row = []
        for r in reps:
            i = locate(spec.mul(s, r))
            if i is None:
                raise CapabilityError(
                    f"incomplete transversal: ball of radius {seed_radius} misses the coset of {spec.mul(s, r)}"
                )
            row.append(i)
        perms.append(row)
    act = CosetAction.__new__(CosetAction)
    FiniteAction.__init__(act, spec, len(reps), perms, check_radius=check_radius)
    act.representatives = reps
    return act


# --- orbit asdim witness ------------------------------------------------------------


def bounded_violation(a: FiniteAction, Y: Iterable[int], B: Iterable):
    """First pair (x, y) of Y with x != y and x not in alpha_{B u B^{-1}}(y), else None."""
    B = set(B)
    S = B | set_inverse(a.spec, B)
    perms = [a.perm(g) for g in S]
    Y = sorted(set(Y))
    for y in Y:
        reach = {p[y] for p in perms}
        for x in Y:
            if x != y and x not in reach:
                return (x, y)
    return None


def long_violation(a: FiniteAction, K: Iterable[int], L: Iterable, sets: Sequence[frozenset]):
    """First x in K such that no set contains alpha_L(x), else None."""
    L = list(L)
    for x in sorted(set(K)):
        orbit = a.image(L, [x])
        if not any(orbit <= s for s in sets):
            return x
    return None


def check_orbit_asdim_witness(a: FiniteAction, K: Iterable[int], L: Iterable, B: Iterable,
                              cover: Cover, d: int) -> Report:
    """Conditions (Lo), (Mu), (Bo) of the multiplicity form of orbit asdim <= d."""
    rep = Report("prop:orbit-asdim", meta={"d": d, "scope": "certifies this finite instance only"})
    x = long_violation(a, K, L, cover.sets)
    rep.add("Lo", x is None, witness=None if x is None else {"point": x})
    m = multiplicity(cover)
    rep.add("Mu", m <= d + 1, value=m)
    bad = None
    for name, pts in cover.members:
        v = bounded_violation(a, pts, B)
        if v is not None:
            bad = {"member": name, "pair": list(v)}
            break
    rep.add("Bo", bad is None, witness=bad)
    return rep


# --- near orbit selections -------------------------------------------------------


class NearOrbitWitness:
    """A cover with a selection map N_C: C -> ids for each member C."""

    def __init__(self, cover: Cover, selection: Mapping):
        sel = {}
        for name, pts in cover.members:
            if name not in selection:
                raise ArgumentError(f"no selection for member {name!r}")
            m = {int(k): int(v) for k, v in dict(selection[name]).items()}
            if set(m) != set(pts):
                raise ArgumentError(f"selection for {name!r} must be defined on exactly the member's points")
            if any(not 0 <= v < cover.n for v in m.values()):
                raise ArgumentError(f"selection for {name!r} leaves the base")
            sel[name] = m
        self.cover = cover
        self.selection = sel

    def image(self, name: str) -> set:
        return set(self.selection[name].values())

    def fiber(self, name: str, y: int) -> set:
        return {x for x, v in self.selection[name].items() if v == y}

    def to_json(self) -> dict:
        out = self.cover.to_json()
        out["selection"] = {name: {str(x): v for x, v in sorted(m.items())} for name, m in self.selection.items()}
        return out

    @classmethod
    def from_json(cls, n: int, data: Mapping) -> "NearOrbitWitness":
        return cls(Cover.from_json(n, data), data["selection"])
