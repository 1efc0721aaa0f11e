"""Staircase smoothing, greedy B-discrete covers and orbit partitions of unity.

All field values are exact :class:`fractions.Fraction` objects, so the
partition-of-unity identity is checked as an equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .coarse import Cover, multiplicity
from .dynamics import FiniteAction, bounded_violation, long_violation
from .errors import ArgumentError
from .groups import set_inverse, set_power, set_product
from .report import Report, frac_str


@dataclass(frozen=True)
class ScalarField:
    """An exact rational-valued function on ``{0..n-1}``."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    @classmethod
    def indicator(cls, n: int, S: Iterable[int]) -> "ScalarField":
        S = set(S)
        return cls(tuple(Fraction(1) if x in S else Fraction(0) for x in range(n)))

    @classmethod
    def constant(cls, n: int, v) -> "ScalarField":
        return cls((Fraction(v),) * n)

    @property
    def n(self) -> int:
        return len(self.values)

    def __getitem__(self, x: int) -> Fraction:
        return self.values[x]

    def support(self) -> set:
        return {x for x, v in enumerate(self.values) if v != 0}

    def sup(self) -> Fraction:
        return max((abs(v) for v in self.values), default=Fraction(0))


def _require_symmetric_with_identity(a: FiniteAction, L: set, what: str) -> None:
    if a.spec.identity() not in L:
        raise ArgumentError(f"{what} must contain the identity")
    if set_inverse(a.spec, L) != L:
        raise ArgumentError(f"{what} must be symmetric")


def staircase(a: FiniteAction, f: ScalarField, L: Iterable, N: int) -> ScalarField:
    """Xi_{L,N}(f)(x) = max over k <= N and g in L^k of f(alpha_{g^{-1}} x) - k/N.

    Uses D_k(x) = max_{h in L} D_{k-1}(alpha_{h^{-1}} x), which equals the max of
    f(alpha_{g^{-1}} x) over g in L^k because alpha_{(g h)^{-1}} = alpha_{g^{-1}} o alpha_{h^{-1}}.
    """
    L = set(L)
    _require_symmetric_with_identity(a, L, "L")
    if N < 1:
        raise ArgumentError("N must be positive")
    if f.n != a.n:
        raise ArgumentError("field and action live on different point sets")
    if any(v < 0 or v > 1 for v in f.values):
        raise ArgumentError("staircase input must take values in [0, 1]")
    back = [a.perm(a.spec.inv(h)) for h in sorted(L, key=repr)]
    cur = list(f.values)
    best = list(cur)
    for k in range(1, N + 1):
        cur = [max(cur[p[x]] for p in back) for x in range(a.n)]
        drop = Fraction(k, N)
        best = [max(b, c - drop) for b, c in zip(best, cur)]
    return ScalarField(tuple(best))


def invariance_defect(a: FiniteAction, f: ScalarField, L: Iterable) -> Fraction:
    """max over g in L and x of |f(x) - f(alpha_{g^{-1}} x)|."""
    out = Fraction(0)
    vals = f.values
    for g in L:
        p = a.perm(a.spec.inv(g))
        for x in range(a.n):
            d = abs(vals[x] - vals[p[x]])
            if d > out:
                out = d
    return out


def greedy_bdiscrete_cover(a: FiniteAction, K: Iterable[int], L: Iterable, B: Iterable) -> tuple[list[int], Cover | None]:
    """Maximal B-discrete subset D of K and the cover {alpha_{LB}(y) : y in D}.

    Ids are scanned in ascending order and x joins D when alpha_B(x) meets D
    at most in x itself.
    """
    L, B = set(L), set(B)
    if set_inverse(a.spec, L) != L:
        raise ArgumentError("L must be symmetric")
    _require_symmetric_with_identity(a, B, "B")
    Bperms = [a.perm(b) for b in B]
    D: list[int] = []
    Dset: set = set()
    for x in sorted(set(K)):
        hit = {p[x] for p in Bperms} & Dset
        if hit <= {x}:
            D.append(x)
            Dset.add(x)
    if not D:
        return [], None
    LB = set_product(a.spec, L, B)
    members = tuple((f"y{y}", a.image(LB, [y])) for y in D)
    return D, Cover(a.n, members)


@dataclass(frozen=True)
class OrbitAsdimWitness:
    """A coloured cover whose members are B'-bounded, as consumed by build_orbit_pou."""

    cover: Cover
    bound: frozenset

    def __post_init__(self):
        if self.cover.colors is None:
            raise ArgumentError("witness cover needs colours")
        object.__setattr__(self, "bound", frozenset(self.bound))


@dataclass(frozen=True)
class PartitionOfUnity:
    """Colour classes of (name, member, field) triples plus construction parameters."""

    colors: tuple
    L: frozenset
    K: frozenset
    eps: Fraction
    B: frozenset
    N: int
    dropped: int = 0

    @property
    def d(self) -> int:
        return len(self.colors) - 1

    def entries(self):
        for l, cls in enumerate(self.colors):
            for name, member, fld in cls:
                yield l, name, member, fld

    def to_csv(self) -> str:
        rows = ["point,color,member,value"]
        for l, name, member, fld in self.entries():
            for x in range(fld.n):
                if fld[x] != 0:
                    rows.append(f"{x},{l},{name},{frac_str(fld[x])}")
        return "\n".join(rows) + "\n"

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "eps": self.eps,
            "d": self.d,
            "dropped_members": self.dropped,
            "colors": [
                [{"name": name, "member": sorted(member),
                  "values": {str(x): v for x, v in enumerate(fld.values) if v != 0}} for name, member, fld in cls]
                for cls in self.colors
            ],
        }


def build_orbit_pou(a: FiniteAction, K: Iterable[int], L: Iterable, eps, witness: OrbitAsdimWitness) -> PartitionOfUnity:
    """Partition of unity from a coloured asdim witness, following the orbit-asdim construction.

    With N = ceil((d+2)/eps): C_A = alpha^cup_{L^N}(A n K), h_A = Xi_{L,N}(chi_{A n K})
    and f_A = h_A / max(1, sum of all h).  B = L^N (B' u {e}) L^N.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ArgumentError("eps must be positive")
    spec = a.spec
    e = spec.identity()
    L = set(L) | set_inverse(spec, L) | {e}
    K = set(K)
    cover = witness.cover
    colors = sorted(set(cover.colors.values()))
    if colors != list(range(len(colors))):
        raise ArgumentError("witness colours must be 0..d")
    d = len(colors) - 1
    N = math.ceil((d + 2) / eps)

    uncovered = sorted(K - cover.union())
    if uncovered:
        raise ArgumentError(f"witness does not cover K (point {uncovered[0]})")
    for name, pts in cover.members:
        v = bounded_violation(a, pts & K, witness.bound)
        if v is not None:
            raise ArgumentError(f"witness member {name} is not B'-bounded at pair {v}")

    # Separation: same-colour members must be E_{K, L^{2N}}-separated.
    reach = {}
    for l in colors:
        cls = [(name, pts & K) for name, pts in cover.members if cover.colors[name] == l]
        for i, (na, A) in enumerate(cls):
            for nb, Bset in cls[i + 1:]:
                for y in sorted(Bset):
                    if y not in reach:
                        reach[y] = a.orbit_power(L, [y], 2 * N)
                    hit = reach[y] & A
                    if hit:
                        raise ArgumentError(
                            f"separation violated: members {na} and {nb} are joined by "
                            f"({min(hit)}, {y}) in E_(K, L^{2 * N}); disjointness would break"
                        )

    hs = []
    dropped = 0
    for name, pts in cover.members:
        core = pts & K
        if not core:
            dropped += 1
            continue
        C = a.orbit_power(L, core, N)
        h = staircase(a, ScalarField.indicator(a.n, core), L, N)
        hs.append((cover.colors[name], name, frozenset(C), h))
    totals = [sum((h[x] for *_, h in hs), Fraction(0)) for x in range(a.n)]
    denom = [max(Fraction(1), t) for t in totals]
    classes: list[list] = [[] for _ in colors]
    for l, name, C, h in hs:
        classes[l].append((name, C, ScalarField(tuple(h[x] / denom[x] for x in range(a.n)))))
    LN = set_power(spec, L, N)
    B = set_product(spec, set_product(spec, LN, set(witness.bound) | {e}), LN)
    return PartitionOfUnity(tuple(tuple(c) for c in classes), frozenset(L), frozenset(K), eps,
                            frozenset(B), N, dropped)


def verify_orbit_pou(a: FiniteAction, pou: PartitionOfUnity) -> Report:
    """Check (Di), (Lo), (Bo), (Su), (In), (Un) exactly."""
    rep = Report("prop:orbit-asdim", meta={"N": pou.N, "eps": pou.eps, "d": pou.d,
                                           "scope": "certifies this finite instance only"})
    di_bad = None
    for l, cls in enumerate(pou.colors):
        seen: dict = {}
        for name, member, _ in cls:
            for x in member:
                if x in seen:
                    di_bad = {"color": l, "members": [seen[x], name], "point": x}
                    break
                seen[x] = name
            if di_bad:
                break
        if di_bad:
            break
    rep.add("Di", di_bad is None, witness=di_bad)
    members = [m for _, _, m, _ in pou.entries()]
    x = long_violation(a, pou.K, pou.L, members)
    rep.add("Lo", x is None, witness=None if x is None else {"point": x})
    bo_bad = None
    for _, name, member, _ in pou.entries():
        v = bounded_violation(a, member, pou.B)
        if v is not None:
            bo_bad = {"member": name, "pair": list(v)}
            break
    rep.add("Bo", bo_bad is None, witness=bo_bad)
    su_bad = None
    for l, name, member, fld in pou.entries():
        outside = sorted(fld.support() - member)
        if outside:
            su_bad = {"member": name, "point": outside[0]}
            break
        if any(v < 0 or v > 1 for v in fld.values):
            su_bad = {"member": name, "note": "value outside [0,1]"}
            break
    rep.add("Su", su_bad is None, witness=su_bad)
    worst, worst_at = Fraction(0), None
    for _, name, _, fld in pou.entries():
        dft = invariance_defect(a, fld, pou.L)
        if dft > worst:
            worst, worst_at = dft, name
    rep.add("In", worst <= pou.eps, value=worst, witness=None if worst <= pou.eps else {"member": worst_at})
    un_bad = None
    for x in range(a.n):
        s = sum((fld[x] for *_, fld in pou.entries()), Fraction(0))
        if (x in pou.K and s != 1) or s > 1:
            un_bad = {"point": x, "sum": s}
            break
    rep.add("Un", un_bad is None, witness=un_bad)
    return rep
