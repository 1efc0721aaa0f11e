"""Large scale packing constants: an exact small-scale oracle and growth-counting certificates.

Certificates follow the pigeonhole argument: with B a ball of even radius R and
L inside a ball of radius r, the counting inequality

    (d+1) * |B(floor(3R/2) + r)| < (m+1) * |B(R/2)|

shows that among any m+1 elements of B L some d+2 are pairwise B-close.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .coarse import default_budget, max_clique, multiplicity
from .covers_pou import greedy_bdiscrete_cover
from .dynamics import FiniteAction
from .errors import ArgumentError, BudgetExceeded, CapabilityError
from .groups import BallTable, GroupSpec, ball, set_inverse, structured_ball, structured_ball_size
from .report import Report

MIS_CAP = 40
MULTI_CAP = 25
DEFAULT_R_CAP = 64
NILPOTENT_RADIUS = 12
NILPOTENT_DEGREE = 4


def _closeness(spec: GroupSpec, verts: list, B: set) -> dict:
    return {u: {v for v in verts if v != u and spec.mul(u, spec.inv(v)) in B} for u in verts}


def _check_B(spec: GroupSpec, B: set) -> None:
    if spec.identity() not in B:
        raise ArgumentError("B must contain the identity")
    if set_inverse(spec, B) != B:
        raise ArgumentError("B must be symmetric")


def _max_weight_clique(verts: list, adj: dict, w: dict) -> int:
    """Max total weight of a clique among ``verts`` (tiny sets only)."""
    best = 0

    def rec(cands, total):
        nonlocal best
        best = max(best, total)
        if total + sum(w[v] for v in cands) <= best:
            return
        for i, v in enumerate(cands):
            rec([u for u in cands[i + 1:] if u in adj[v]], total + w[v])

    rec([v for v in verts if w[v] > 0], 0)
    return best


def _clique_cover_bound(verts: list, adj: dict, cap: int) -> int:
    """cap times the size of a greedy clique cover of ``verts``."""
    remaining = list(verts)
    count = 0
    while remaining:
        clique = [remaining[0]]
        for v in remaining[1:]:
            if all(v in adj[c] for c in clique):
                clique.append(v)
        remaining = [v for v in remaining if v not in clique]
        count += 1
    return count * cap


def lsp_bad_max(spec: GroupSpec, BL: Iterable, B: Iterable, d: int, budget: int | None = None) -> int:
    """Longest tuple from BL with no d+2 indices pairwise B-close.

    Repetitions are allowed, so this is the maximum of sum mu(v) over
    mu: BL -> {0..d+1} with at most d+1 total weight on every clique of the
    closeness graph (g ~ g' iff g g'^{-1} in B).  For d = 0 it is the maximum
    independent set.
    """
    B = set(B)
    _check_B(spec, B)
    if d < 0:
        raise ArgumentError("d must be nonnegative")
    verts = sorted(set(BL), key=repr)
    if not verts:
        return 0
    adj = _closeness(spec, verts, B)
    if d == 0:
        if len(verts) > MIS_CAP:
            raise CapabilityError(f"|BL| = {len(verts)} exceeds the exact cap {MIS_CAP}")
        comp = {u: {v for v in verts if v != u and v not in adj[u]} for u in verts}
        res = max_clique(verts, comp, budget=budget)
        if not res.exact:
            raise BudgetExceeded("independent set search ran out of budget", best=res.size)
        return res.size
    if len(verts) > MULTI_CAP:
        raise CapabilityError(f"|BL| = {len(verts)} exceeds the exact cap {MULTI_CAP} for d >= 1")
    cap = d + 1
    order = sorted(verts, key=lambda v: -len(adj[v]))
    w = {v: 0 for v in verts}
    best = 0
    steps = 0
    limit = default_budget() if budget is None else budget

    def rec(i, total):
        nonlocal best, steps
        steps += 1
        if steps > limit:
            raise BudgetExceeded("multiplicity search ran out of budget", best=best)
        if total > best:
            best = total
        if i == len(order):
            return
        if total + _clique_cover_bound(order[i:], adj, cap) <= best:
            return
        v = order[i]
        assigned = [u for u in order[:i] if w[u] > 0 and u in adj[v]]
        room = cap - _max_weight_clique(assigned, adj, w)
        for t in range(room, -1, -1):
            w[v] = t
            rec(i + 1, total + t)
        w[v] = 0

    rec(0, 0)
    return best


@dataclass(frozen=True)
class LspCertificate:
    """B = ball(R) and m with (d+1) Gr(floor(3R/2)+r) < (m+1) Gr(R/2) recorded exactly."""

    spec: GroupSpec
    d: int
    r: int
    R: int
    B: frozenset
    m: int
    lhs: int
    rhs: int
    route: str
    window: tuple | None = None
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.lhs < self.rhs:
            raise ArgumentError("certificate inequality does not hold")
        _check_B(self.spec, set(self.B))

    def to_dict(self) -> dict:
        return {
            "group": self.spec.to_json(),
            "d": self.d, "r": self.r, "R": self.R, "m": self.m,
            "B_size": len(self.B),
            "inequality": {"form": "(d+1)*Gr(floor(3R/2)+r) < (m+1)*Gr(R/2)", "lhs": self.lhs, "rhs": self.rhs},
            "route": self.route,
            "window": list(self.window) if self.window else None,
            "constants": self.constants,
        }


def fit_growth_constants(table: BallTable, k: int) -> tuple[Fraction, Fraction]:
    """Tightest C, D with C n^k <= Gr(n) <= D n^k + 1 on n in [1, radius]."""
    if k < 1:
        raise ArgumentError("k must be at least 1")
    if table.radius < 4:
        raise ArgumentError("growth table is degenerate: radius must be at least 4")
    ns = range(1, table.radius + 1)
    C = min(Fraction(table.growth[n], n ** k) for n in ns)
    D = max(Fraction(table.growth[n] - 1, n ** k) for n in ns)
    return C, D


def _search(spec, d, r, m, size, R_max, route, B_of, window=None, constants=None) -> LspCertificate:
    for R in range(2, R_max + 1, 2):
        outer = 3 * R // 2 + r
        lhs = (d + 1) * size(outer)
        rhs = (m + 1) * size(R // 2)
        if lhs < rhs:
            return LspCertificate(spec, d, r, R, frozenset(B_of(R)), m, lhs, rhs, route, window, constants or {})
    raise CapabilityError(f"inequality never satisfied at cap R <= {R_max}")


def lsp_certificate(spec: GroupSpec, d: int, r: int, R_cap: int = DEFAULT_R_CAP,
                    table_radius: int = NILPOTENT_RADIUS, k: int = NILPOTENT_DEGREE) -> LspCertificate:
    """Search even R for the counting inequality with the theorem's target m."""
    if d < 0 or r < 0:
        raise ArgumentError("d and r must be nonnegative")
    kind = spec.kind
    if kind in ("lattice", "finite_abelian"):
        rank = spec.params[0] if kind == "lattice" else 0
        m = 3 ** rank * (d + 1)
        return _search(spec, d, r, m, lambda t: structured_ball_size(spec, t), R_cap, "abelian",
                       lambda R: structured_ball(spec, R), constants={"rank": rank})
    if kind == "virtually_cyclic":
        m = 3 * (d + 1)
        return _search(spec, d, r, m, lambda t: structured_ball_size(spec, t), R_cap, "virtually_cyclic",
                       lambda R: structured_ball(spec, R))
    if kind == "heisenberg":
        table = ball(spec, table_radius)
        C, D = fit_growth_constants(table, k)
        m = math.floor(3 ** k * (d + 1) * D / C)
        R_max = 2 * (table_radius - r) // 3
        return _search(spec, d, r, m, lambda t: table.growth[t], R_max, "nilpotent",
                       lambda R: table.ball_set(R), window=(1, table_radius),
                       constants={"C": C, "D": D, "k": k})
    raise CapabilityError(f"no packing certificate route for kind {kind!r}")


def lsp_cover_demo(a: FiniteAction, L: Iterable, cert: LspCertificate) -> Report:
    """Greedy B-discrete cover with B = cert.B; its multiplicity must be at most cert.m."""
    L = set(L)
    D, cover = greedy_bdiscrete_cover(a, range(a.n), L, cert.B)
    mult = multiplicity(cover) if cover else 0
    rep = Report("thm:lsp-asdim", meta={"m": cert.m, "R": cert.R, "centers": len(D)})
    rep.add("multiplicity", mult <= cert.m, value=mult, note=f"bound m = {cert.m}")
    return rep
