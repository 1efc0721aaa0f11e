"""Finite coarse-space primitives: entourages, components, multiplicities, witnesses.

Points are the ids ``0..n-1``.  Entourages are explicit sets of ordered pairs;
metric-style relations are materialized with :func:`from_predicate`.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import ArgumentError, BudgetExceeded
from .report import Report

DEFAULT_BUDGET = 10_000_000
BUDGET_ENV = "ARTIFACT_BUDGET"


def default_budget() -> int:
    """Candidate-check budget for exhaustive searches (overridable by environment)."""
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class PointSet:
    size: int
    labels: tuple = ()

    def __post_init__(self):
        if self.size < 0:
            raise ArgumentError("point set size must be nonnegative")
        if self.labels and len(self.labels) != self.size:
            raise ArgumentError("need one label per point")
        if self.labels and len(set(self.labels)) != self.size:
            raise ArgumentError("labels must be unique")

    def ids(self) -> range:
        return range(self.size)


@dataclass(frozen=True)
class Entourage:
    """A finite relation on ``{0..n-1}``."""

    n: int
    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset((int(a), int(b)) for a, b in self.pairs))
        for a, b in self.pairs:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ArgumentError(f"pair {(a, b)} lies outside the {self.n}-point base")

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def fiber(self, y: int) -> set:
        """E(y) = {x : (x, y) in E}."""
        return {a for a, b in self.pairs if b == y}

    def fibers(self) -> dict:
        out: dict = {}
        for a, b in self.pairs:
            out.setdefault(b, set()).add(a)
        return out

    def to_json(self) -> dict:
        return {"pairs": [list(p) for p in sorted(self.pairs)]}


def from_predicate(n: int, pred: Callable[[int, int], bool]) -> Entourage:
    return Entourage(n, frozenset((i, j) for i in range(n) for j in range(n) if pred(i, j)))


def diagonal(n: int) -> Entourage:
    return Entourage(n, frozenset((i, i) for i in range(n)))


def full(n: int) -> Entourage:
    return Entourage(n, frozenset(itertools.product(range(n), repeat=2)))


def line_entourage(n: int, r: int, cyclic: bool = False) -> Entourage:
    """{(i, j) : |i - j| <= r}, optionally measured on the cycle Z/n."""
    if cyclic:
        return from_predicate(n, lambda i, j: min((i - j) % n, (j - i) % n) <= r)
    return from_predicate(n, lambda i, j: abs(i - j) <= r)


def entourage_from_json(n: int, data: Mapping) -> Entourage:
    return Entourage(n, frozenset(tuple(p) for p in data["pairs"]))


def _same_base(E: Entourage, F: Entourage) -> None:
    if E.n != F.n:
        raise ArgumentError(f"entourages live on different bases ({E.n} vs {F.n} points)")


def invert(E: Entourage) -> Entourage:
    return Entourage(E.n, frozenset((b, a) for a, b in E.pairs))


def compose(E: Entourage, F: Entourage) -> Entourage:
    """{(x, y) : exists z with (x, z) in E and (z, y) in F}."""
    _same_base(E, F)
    by_first: dict = {}
    for z, y in F.pairs:
        by_first.setdefault(z, []).append(y)
    return Entourage(E.n, frozenset((x, y) for x, z in E.pairs for y in by_first.get(z, ())))


def union(E: Entourage, F: Entourage) -> Entourage:
    _same_base(E, F)
    return Entourage(E.n, E.pairs | F.pairs)


def restrict(E: Entourage, Y: Iterable[int]) -> Entourage:
    Y = set(Y)
    return Entourage(E.n, frozenset((a, b) for a, b in E.pairs if a in Y and b in Y))


def e_components(Y: Iterable[int], E: Entourage) -> list[frozenset]:
    """Classes of the equivalence relation on Y generated by E and its inverse."""
    Y = set(Y)
    parent = {y: y for y in Y}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in E.pairs:
        if a in Y and b in Y:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    classes: dict = {}
    for y in Y:
        classes.setdefault(find(y), set()).add(y)
    return sorted((frozenset(c) for c in classes.values()), key=min)


def e_neighborhood(A: Iterable[int], E: Entourage) -> set:
    """{x : exists y in A with (x, y) in E}."""
    A = set(A)
    return {a for a, b in E.pairs if b in A}


def e_core(A: Iterable[int], E: Entourage) -> set:
    """{y : E(y) is a subset of A}; only points of the base are considered."""
    A = set(A)
    fib = E.fibers()
    return {y for y in range(E.n) if fib.get(y, set()) <= A}


# --- covers -------------------------------------------------------------------


@dataclass(frozen=True)
class Cover:
    """A named family of nonempty point subsets, optionally colored."""

    n: int
    members: tuple
    colors: Mapping | None = None

    def __post_init__(self):
        mems = tuple((str(name), frozenset(int(x) for x in pts)) for name, pts in self.members)
        names = [m[0] for m in mems]
        if len(set(names)) != len(names):
            raise ArgumentError("member names must be unique")
        for name, pts in mems:
            if not pts:
                raise ArgumentError(f"empty member {name!r} rejected")
            if any(not 0 <= x < self.n for x in pts):
                raise ArgumentError(f"member {name!r} leaves the {self.n}-point base")
        object.__setattr__(self, "members", mems)
        if self.colors is not None:
            cols = {str(k): int(v) for k, v in dict(self.colors).items()}
            missing = set(names) - set(cols)
            if missing:
                raise ArgumentError(f"colors missing for members {sorted(missing)}")
            object.__setattr__(self, "colors", cols)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]], prefix: str = "U", colors: Sequence[int] | None = None):
        sets = [frozenset(s) for s in sets]
        members = tuple((f"{prefix}{i}", s) for i, s in enumerate(sets))
        cols = None if colors is None else {f"{prefix}{i}": c for i, c in enumerate(colors)}
        return cls(n, members, cols)

    @classmethod
    def from_json(cls, n: int, data: Mapping) -> "Cover":
        mem = data["members"]
        members = tuple((k, v) for k, v in mem.items()) if isinstance(mem, Mapping) else tuple(
            (f"U{i}", v) for i, v in enumerate(mem)
        )
        return cls(n, members, data.get("colors"))

    def to_json(self) -> dict:
        out: dict = {"members": {name: sorted(pts) for name, pts in self.members}}
        if self.colors is not None:
            out["colors"] = dict(self.colors)
        return out

    @property
    def names(self) -> list[str]:
        return [m[0] for m in self.members]

    @property
    def sets(self) -> list[frozenset]:
        return [m[1] for m in self.members]

    def member(self, name: str) -> frozenset:
        for nm, pts in self.members:
            if nm == name:
                return pts
        raise KeyError(name)

    def union(self) -> set:
        out: set = set()
        for _, pts in self.members:
            out |= pts
        return out

    def membership(self) -> dict:
        """point -> list of member indices containing it."""
        out: dict = {}
        for i, (_, pts) in enumerate(self.members):
            for x in pts:
                out.setdefault(x, []).append(i)
        return out

    def __len__(self) -> int:
        return len(self.members)


def multiplicity(cover: Cover | Sequence[Iterable[int]]) -> int:
    """Largest number of members sharing a common point (0 for an empty family)."""
    sets = cover.sets if isinstance(cover, Cover) else [set(s) for s in cover]
    counts: dict = {}
    for s in sets:
        for x in s:
            counts[x] = counts.get(x, 0) + 1
    return max(counts.values(), default=0)


def multiplicity_point(cover: Cover) -> tuple[int, int | None]:
    counts: dict = {}
    for s in cover.sets:
        for x in s:
            counts[x] = counts.get(x, 0) + 1
    if not counts:
        return 0, None
    best = max(sorted(counts), key=lambda x: counts[x])
    return counts[best], best


# --- exhaustive clique engine ---------------------------------------------------


@dataclass(frozen=True)
class CliqueResult:
    """Outcome of an exhaustive clique search.

    ``exact`` is False when the budget ran out; ``size`` is then a lower bound.
    """

    size: int
    clique: tuple
    exact: bool
    checks: int


def max_clique(vertices: Sequence[Hashable], adj: Mapping, budget: int | None = None,
               group: Mapping | None = None) -> CliqueResult:
    """Maximum clique by branch and bound with greedy-coloring bounds.

    ``adj[v]`` is the set of neighbours of ``v`` (no self loops).  When
    ``group`` is given, no two clique vertices may share a group label and the
    number of distinct labels among candidates is used as an extra bound.
    Candidates are ordered by a degeneracy ordering.
    """
    budget = default_budget() if budget is None else budget
    order = _degeneracy_order(list(vertices), adj)
    best: list = []
    checks = 0

    def colour_sort(P):
        nonlocal checks
        colour_classes: list[list] = []
        for v in P:
            nv = adj[v]
            for cls in colour_classes:
                checks += len(cls)
                if not any(u in nv for u in cls):
                    cls.append(v)
                    break
            else:
                colour_classes.append([v])
        ordered, bounds = [], []
        for k, cls in enumerate(colour_classes, start=1):
            for v in cls:
                ordered.append(v)
                bounds.append(k)
        return ordered, bounds

    def expand(R, P):
        nonlocal best, checks
        if checks > budget:
            raise _Abort()
        if group is not None and len(R) + len({group[v] for v in P}) <= len(best):
            return
        ordered, bounds = colour_sort(P)
        while ordered:
            if len(R) + bounds[-1] <= len(best):
                return
            v = ordered.pop()
            bounds.pop()
            nv = adj[v]
            checks += len(ordered)
            newP = [u for u in ordered if u in nv]
            R2 = R + [v]
            if newP:
                expand(R2, newP)
            elif len(R2) > len(best):
                best = list(R2)
            if checks > budget:
                raise _Abort()

    try:
        if order:
            best = [order[0]]
            expand([], order)
        return CliqueResult(len(best), tuple(best), True, checks)
    except _Abort:
        return CliqueResult(len(best), tuple(best), False, checks)


class _Abort(Exception):
    pass


def _degeneracy_order(vertices: list, adj: Mapping) -> list:
    # Repeatedly strip a minimum-degree vertex; the reverse of the stripping
    # order puts densely connected vertices first.
    deg = {v: len(adj[v]) for v in vertices}
    alive = set(vertices)
    stripped = []
    index = {v: i for i, v in enumerate(vertices)}
    while alive:
        v = min(alive, key=lambda u: (deg[u], index[u]))
        stripped.append(v)
        alive.discard(v)
        for u in adj[v]:
            if u in alive:
                deg[u] -= 1
    return stripped[::-1]


def transversal_multiplicity(sets: Sequence[frozenset], close: Callable[[int, int], bool],
                             budget: int | None = None) -> CliqueResult:
    """Largest subfamily with a pairwise-close transversal (repeated points allowed).

    The search graph has a vertex (i, x) for each member i and point x in it,
    and an edge between (i, x), (j, y) when i != j and ``close(x, y)``.
    """
    verts = [(i, x) for i, s in enumerate(sets) for x in sorted(s)]
    by_point: dict = {}
    for v in verts:
        by_point.setdefault(v[1], []).append(v)
    pts = sorted(by_point)
    near = {x: [y for y in pts if y == x or close(x, y)] for x in pts}
    adj = {}
    for (i, x) in verts:
        nb = set()
        for y in near[x]:
            for (j, yy) in by_point[y]:
                if j != i:
                    nb.add((j, yy))
        adj[(i, x)] = nb
    group = {v: v[0] for v in verts}
    res = max_clique(verts, adj, budget, group)
    return res


def e_multiplicity_search(cover: Cover, E: Entourage, budget: int | None = None) -> CliqueResult:
    pairs = E.pairs
    return transversal_multiplicity(cover.sets, lambda x, y: (x, y) in pairs or (y, x) in pairs, budget)


def e_multiplicity(cover: Cover, E: Entourage, budget: int | None = None) -> int:
    """E-multiplicity; raises BudgetExceeded (with the lower bound in ``best``) on budget exhaustion."""
    res = e_multiplicity_search(cover, E, budget)
    if not res.exact:
        raise BudgetExceeded("E-multiplicity search exceeded its budget", best=res.size)
    return res.size


# --- asymptotic dimension witnesses -------------------------------------------------


def _bounded_violation(sets_named, W: Entourage):
    for name, pts in sets_named:
        for x in sorted(pts):
            for y in sorted(pts):
                if (x, y) not in W.pairs:
                    return {"member": name, "pair": [x, y]}
    return None


def _cross_member_close_pair(cover: Cover, E: Entourage):
    for (na, A), (nb, B) in itertools.combinations(cover.members, 2):
        for x in sorted(A):
            for y in sorted(B):
                if x == y or (x, y) in E.pairs or (y, x) in E.pairs:
                    return {"members": [na, nb], "overlap_point": x, "pair": [x, y]}
    return None


def check_asdim_witness(cover: Cover, E: Entourage, W: Entourage, d: int, style: str = "separated",
                        budget: int | None = None) -> Report:
    """Check one finite instance of the three equivalent asdim condition sets.

    ``separated``: cover, W-bounded members, at most d+1 colors with E-separated
    colour classes.  ``mult``: cover, W-bounded, multiplicity <= d+1 and every
    E(x) inside a member.  ``multWide``: cover, W-bounded, E-multiplicity <= d+1.
    """
    if style not in ("separated", "mult", "multWide"):
        raise ArgumentError(f"unknown style {style!r}")
    rep = Report("def:asdim" if style == "separated" else
                 ("lem:asdim-multiplicity" if style == "mult" else "lem:asdim-multiplicity-wide"),
                 meta={"style": style, "d": d, "scope": "certifies this finite instance only"})
    uncovered = sorted(set(range(cover.n)) - cover.union())
    rep.add("cover", not uncovered, witness={"point": uncovered[0]} if uncovered else None)
    bad = _bounded_violation(cover.members, W)
    rep.add("bounded", bad is None, witness=bad)
    if style == "separated":
        if cover.colors is None:
            raise ArgumentError("style=separated needs colour metadata on the cover")
        used = sorted(set(cover.colors.values()))
        witness = None
        if len(used) > d + 1:
            # Two members joined by an E-close pair can never share a colour,
            # so such a pair explains why fewer colours cannot work.
            witness = {"colors_used": len(used)}
            close = _cross_member_close_pair(cover, E)
            if close is not None:
                witness.update(close)
        rep.add("colors", len(used) <= d + 1, value=len(used), witness=witness)
        sep_bad = None
        for (na, A), (nb, B) in itertools.combinations(cover.members, 2):
            if cover.colors[na] != cover.colors[nb]:
                continue
            for x in sorted(A):
                hit = [y for y in sorted(B) if (x, y) in E.pairs or (y, x) in E.pairs]
                if hit:
                    sep_bad = {"members": [na, nb], "pair": [x, hit[0]]}
                    break
            if sep_bad:
                break
        rep.add("separated", sep_bad is None, witness=sep_bad)
    elif style == "mult":
        m, x = multiplicity_point(cover)
        rep.add("multiplicity", m <= d + 1, value=m, witness={"point": x} if m > d + 1 else None)
        fib = E.fibers()
        wide_bad = None
        for y in range(cover.n):
            Ey = fib.get(y, set())
            if not any(Ey <= pts for pts in cover.sets):
                wide_bad = {"point": y}
                break
        rep.add("wide", wide_bad is None, witness=wide_bad)
    else:
        res = e_multiplicity_search(cover, E, budget)
        if not res.exact:
            rep.add("e_multiplicity", False, value=res.size, note="budget exceeded; value is a lower bound")
        else:
            rep.add("e_multiplicity", res.size <= d + 1, value=res.size,
                    witness=[list(v) for v in res.clique] if res.size > d + 1 else None)
    return rep


def greedy_bounded_cover(Y: Iterable[int], E: Entourage, W: Entourage, n: int) -> Cover:
    """Greedy synthesizer used by the finitary probe.

    If every E-component of Y is W-bounded the components form the cover.
    Otherwise chunks grow breadth-first along E from the least unassigned point,
    admitting a point only if the chunk stays W-bounded.
    """
    Y = sorted(set(Y))
    comps = e_components(Y, E)
    if all(_bounded_violation([("c", c)], W) is None for c in comps):
        return Cover.from_sets(n, comps, prefix="C")
    Yset = set(Y)
    nbrs: dict = {y: set() for y in Y}
    for a, b in E.pairs:
        if a in Yset and b in Yset and a != b:
            nbrs[a].add(b)
            nbrs[b].add(a)
    assigned: set = set()
    chunks = []
    for start in Y:
        if start in assigned:
            continue
        chunk = [start]
        assigned.add(start)
        queue = [start]
        while queue:
            u = queue.pop(0)
            for v in sorted(nbrs[u]):
                if v in assigned:
                    continue
                if all((v, c) in W.pairs and (c, v) in W.pairs for c in chunk) and (v, v) in W.pairs:
                    chunk.append(v)
                    assigned.add(v)
                    queue.append(v)
        chunks.append(frozenset(chunk))
    return Cover.from_sets(n, chunks, prefix="C")


def finitary_asdim_probe(family: Iterable[Iterable[int]], E: Entourage, W: Entourage, d: int,
                         budget: int | None = None) -> Report:
    """For each finite Y, try to synthesize a W-bounded cover with E-multiplicity <= d+1.

    The synthesizer is greedy, so a miss is reported as inconclusive rather
    than as a disproof.
    """
    rep = Report("cor:asdim-finitary", meta={"d": d, "method": "greedy (not exhaustive)"})
    for idx, Y in enumerate(family):
        Y = sorted(set(Y))
        cov = greedy_bounded_cover(Y, E, W, E.n)
        res = e_multiplicity_search(cov, E, budget)
        bounded = _bounded_violation(cov.members, W) is None
        found = bounded and res.exact and res.size <= d + 1
        rep.add(
            f"Y{idx}",
            found,
            value={"members": len(cov), "e_multiplicity": res.size, "exact": res.exact},
            witness={"cover": cov.to_json()["members"]},
            note=None if found else "inconclusive: greedy synthesizer found no cover",
        )
    return rep


def exact_asdim_min(Y: Iterable[int], E: Entourage, W: Entourage, max_members: int = 6,
                    budget: int | None = None) -> tuple[int | None, Cover | None]:
    """Least d admitting a W-bounded cover of Y with E-multiplicity <= d+1.

    Searches partitions of Y into at most ``max_members`` blocks; restricting
    to partitions loses nothing because shrinking members never raises the
    E-multiplicity.  Only offered for |Y| <= 16.  Returns (None, None) when no
    W-bounded partition with that many blocks exists.
    """
    Y = sorted(set(Y))
    if len(Y) > 16:
        raise ArgumentError("exact search is limited to |Y| <= 16")
    budget = default_budget() if budget is None else budget
    steps = 0
    best: list = [None, None]
    blocks: list[list[int]] = []

    def fits(block, y):
        return (y, y) in W.pairs and all((y, c) in W.pairs and (c, y) in W.pairs for c in block)

    def rec(i):
        nonlocal steps
        steps += 1
        if steps > budget:
            raise BudgetExceeded("exact asdim search exceeded its budget", best=best[0])
        if i == len(Y):
            cov = Cover.from_sets(E.n, blocks, prefix="P")
            m = e_multiplicity(cov, E, budget)
            if best[0] is None or m - 1 < best[0]:
                best[0], best[1] = m - 1, cov
            return
        y = Y[i]
        for block in blocks:
            if fits(block, y):
                block.append(y)
                rec(i + 1)
                block.pop()
        if len(blocks) < max_members and (y, y) in W.pairs:
            blocks.append([y])
            rec(i + 1)
            blocks.pop()

    rec(0)
    return best[0], best[1]
