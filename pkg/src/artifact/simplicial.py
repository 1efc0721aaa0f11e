"""Sorting functionals, the difference operator and barycentric regions on finite supports.

Functions are finitely supported nonnegative rationals keyed by arbitrary
hashable ids.  mu^(l) is the (l+1)-th largest value counting repetitions,
delta_l = mu^(l) - mu^(l+1), and the barycentric regions are

* ``region_l(xi, l, eps)``: delta_l(xi) > eps,
* ``region_F(xi, F, eps)``: min xi(F) > eps + max(xi(S minus F) and 0).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .coarse import Cover, multiplicity
from .errors import ArgumentError
from .report import Report

ZERO = Fraction(0)


@dataclass(frozen=True)
class FinSupportFn:
    """Finitely supported nonnegative rational function (zero entries are dropped)."""

    items: tuple

    def __init__(self, values: Mapping | Iterable = ()):
        data = dict(values.items() if isinstance(values, Mapping) else values)
        clean = {}
        for k, v in data.items():
            v = Fraction(v)
            if v < 0:
                raise ArgumentError(f"negative value at {k!r}")
            if v:
                clean[k] = v
        object.__setattr__(self, "items", tuple(sorted(clean.items(), key=lambda kv: repr(kv[0]))))

    @property
    def values(self) -> dict:
        return dict(self.items)

    def __call__(self, key) -> Fraction:
        return self.values.get(key, ZERO)

    def support(self) -> set:
        return {k for k, _ in self.items}

    def norm(self) -> Fraction:
        return max((v for _, v in self.items), default=ZERO)

    def total(self) -> Fraction:
        return sum((v for _, v in self.items), ZERO)

    def sorted_values(self) -> list[Fraction]:
        return sorted((v for _, v in self.items), reverse=True)

    def to_json(self) -> dict:
        return {"values": {str(k): f"{v.numerator}/{v.denominator}" for k, v in self.items}}

    @classmethod
    def from_json(cls, data: Mapping) -> "FinSupportFn":
        return cls({k: Fraction(v) for k, v in data["values"].items()})


def distance(xi: FinSupportFn, eta: FinSupportFn) -> Fraction:
    """Sup-norm distance."""
    keys = xi.support() | eta.support()
    return max((abs(xi(k) - eta(k)) for k in keys), default=ZERO)


def mu(l: int, xi: FinSupportFn) -> Fraction:
    """(l+1)-th largest value of xi counting repetitions, 0 past the support."""
    if l < 0:
        raise ArgumentError("l must be nonnegative")
    vals = xi.sorted_values()
    return vals[l] if l < len(vals) else ZERO


def delta_l(l: int, xi: FinSupportFn) -> Fraction:
    return mu(l, xi) - mu(l + 1, xi)


def delta(xi: FinSupportFn) -> FinSupportFn:
    """The difference operator as a function on the naturals."""
    vals = xi.sorted_values() + [ZERO]
    return FinSupportFn({l: vals[l] - vals[l + 1] for l in range(len(vals) - 1)})


def region_l(xi: FinSupportFn, l: int, eps) -> bool:
    return delta_l(l, xi) > Fraction(eps)


def region_F(xi: FinSupportFn, F: Iterable[Hashable], eps) -> bool:
    F = set(F)
    if not F:
        raise ArgumentError("F must be nonempty")
    inside = min(xi(k) for k in F)
    outside = max([v for k, v in xi.items if k not in F] + [ZERO])
    return inside > Fraction(eps) + outside


def top_set(xi: FinSupportFn, l: int) -> frozenset:
    """{s : xi(s) > mu^(l+1)(xi)}, the candidate F of size l+1 for region l."""
    cut = mu(l + 1, xi)
    return frozenset(k for k, v in xi.items if v > cut)


def regions_containing(xi: FinSupportFn, eps=0) -> list[frozenset]:
    """All nonempty F with xi in region_F(F, eps).

    By the partition property these are exactly the top sets of size l+1 for
    the l with delta_l > eps, so no subset enumeration is needed.
    """
    out = []
    for l in range(len(xi.items)):
        if region_l(xi, l, eps):
            F = top_set(xi, l)
            if len(F) != l + 1 or not region_F(xi, F, eps):
                raise AssertionError("partition property failed")  # unreachable if the lemma holds
            out.append(F)
    return out


# --- lemma checks ----------------------------------------------------------------


def check_lipschitz(xi: FinSupportFn, eta: FinSupportFn) -> list[str]:
    """Failures of |mu_l(xi)-mu_l(eta)| <= d and |delta_l(xi)-delta_l(eta)| <= 2d."""
    d = distance(xi, eta)
    fails = []
    for l in range(max(len(xi.items), len(eta.items)) + 1):
        if abs(mu(l, xi) - mu(l, eta)) > d:
            fails.append(f"mu_{l}")
        if abs(delta_l(l, xi) - delta_l(l, eta)) > 2 * d:
            fails.append(f"delta_{l}")
    return fails


def check_identities(xi: FinSupportFn) -> list[str]:
    """Telescoping, mass identity, norm sandwich and the support bound."""
    fails = []
    m = len(xi.items)
    dx = delta(xi)
    for l in range(m + 1):
        if mu(l, xi) != sum((dx(k) for k in range(l, m)), ZERO):
            fails.append(f"telescoping_{l}")
    if xi.total() != sum((mu(l, xi) for l in range(m)), ZERO):
        fails.append("mass")
    nd, nx = dx.norm(), xi.norm()
    if not (nd <= nx <= len(dx.support()) * nd):
        fails.append("norm_sandwich")
    for eps in {ZERO} | set(xi.values.values()):
        big = {l for l, v in dx.items if v > eps}
        count = sum(1 for _, v in xi.items if v > eps)
        if not big <= set(range(count)):
            fails.append(f"support_bound_{eps}")
    return fails


def check_region_partition(xi: FinSupportFn, keys: Sequence[Hashable], eps) -> list[str]:
    """Exhaustive check over all nonempty F of ``keys`` of the partition and cover properties."""
    eps = Fraction(eps)
    fails = []
    subsets = [frozenset(c) for r in range(1, len(keys) + 1) for c in itertools.combinations(keys, r)]
    for l in range(len(keys) + 1):
        hits = [F for F in subsets if len(F) == l + 1 and region_F(xi, F, eps)]
        if region_l(xi, l, eps):
            if len(hits) != 1 or hits[0] != top_set(xi, l):
                fails.append(f"partition_{l}")
        elif hits:
            fails.append(f"partition_converse_{l}")
    m = len(xi.items)
    if m and eps < xi.norm() / m:
        if not any(region_l(xi, l, eps) for l in range(m)):
            fails.append("cover")
    return fails


def check_neighborhood(xi: FinSupportFn, eta: FinSupportFn, F: Iterable[Hashable], eps, r) -> bool:
    """xi in region_F(eps + 2r) and |xi - eta| <= r imply eta in region_F(eps)."""
    eps, r = Fraction(eps), Fraction(r)
    if region_F(xi, F, eps + 2 * r) and distance(xi, eta) <= r:
        return region_F(eta, F, eps)
    return True


def clumping_point(Fs: Sequence[Iterable[Hashable]], xi0: FinSupportFn):
    """A key s lying in every F_i, given xi0 in the intersection of the region_F(F_i, 0)."""
    if not all(region_F(xi0, F, 0) for F in Fs):
        raise ArgumentError("xi0 is not in every region")
    top = max(xi0.items, key=lambda kv: (kv[1], repr(kv[0])))[0]
    return top


# --- cover clumping and thickening ------------------------------------------------------


def equal_weight_pou(n: int, theta: Cover) -> list[FinSupportFn]:
    """x -> (1/c(x) on the members containing x), zero off the union of theta."""
    memb = theta.membership()
    out = []
    for x in range(n):
        idx = memb.get(x, [])
        out.append(FinSupportFn({theta.names[i]: Fraction(1, len(idx)) for i in idx}))
    return out


@dataclass(frozen=True)
class ClumpingResult:
    cover: Cover | None
    dropped: int
    pou: str = "equal weights 1/(membership count) on the members containing each point"


def cover_clumping(n: int, K: Iterable[int], theta: Cover) -> ClumpingResult:
    """Regions f^{-1}(region_F(F, 0)) of a partition of unity subordinate to theta.

    Empty regions are dropped; ``dropped`` counts them among the 2^|theta| - 1
    nonempty F.
    """
    K = set(K)
    missing = sorted(K - theta.union())
    if missing:
        raise ArgumentError(f"K is not covered by theta (point {missing[0]})")
    f = equal_weight_pou(n, theta)
    regions: dict = {}
    for x in range(n):
        for F in regions_containing(f[x], 0):
            regions.setdefault(F, set()).add(x)
    order = {name: i for i, name in enumerate(theta.names)}
    keyed = sorted(regions.items(), key=lambda kv: sorted(order[s] for s in kv[0]))
    members = tuple(("A[" + ",".join(sorted(F, key=order.get)) + "]", pts) for F, pts in keyed)
    dropped = (2 ** len(theta) - 1) - len(members)
    return ClumpingResult(Cover(n, members) if members else None, dropped)


def check_clumping(result: ClumpingResult, K: Iterable[int], theta: Cover) -> list[str]:
    """K inside the union, and every subfamily with a common point sits inside one theta member.

    It suffices to test, for each point x, the family of all members through x,
    since sub-subfamilies have smaller unions.
    """
    fails = []
    A = result.cover.sets if result.cover else []
    union = set().union(*A) if A else set()
    if not set(K) <= union:
        fails.append("covers_K")
    for x in sorted(union):
        through = [S for S in A if x in S]
        U = set().union(*through)
        if not any(U <= T for T in theta.sets):
            fails.append(f"clumping_at_{x}")
    return fails


def thicken_multiplicity(n: int, Ks: Sequence[Iterable[int]]) -> list[frozenset]:
    """Supersets U_i of K_i with the same multiplicity, following the clumping proof.

    A_F = X minus the union of K_j over j not in F, for |F| <= m = mult(Ks); clump
    {A_F}; U_i is the union of the clumped regions meeting K_i.  On a finite
    discrete space this returns U_i = K_i, which the procedure reaches on its own.
    """
    Ks = [frozenset(k) for k in Ks]
    m = multiplicity(Ks)
    idx = range(len(Ks))
    if m == 0:
        return [frozenset() for _ in Ks]
    X = set(range(n))
    theta_members = []
    for r in range(m + 1):
        for F in itertools.combinations(idx, r):
            A = X - set().union(*(Ks[j] for j in idx if j not in F))
            if A:
                theta_members.append(("F" + "_".join(map(str, F)), A))
    theta = Cover(n, tuple(theta_members))
    K = set().union(*Ks)
    clump = cover_clumping(n, K, theta)
    regions = clump.cover.sets if clump.cover else []
    return [frozenset().union(*(T for T in regions if T & Ki)) if Ki else frozenset() for Ki in Ks]


# --- property suite ---------------------------------------------------------------------


def random_fn(rng: random.Random, max_support: int = 6, max_den: int = 12, keys: Sequence = "abcdefgh") -> FinSupportFn:
    size = rng.randint(0, max_support)
    chosen = rng.sample(list(keys), size)
    return FinSupportFn({k: Fraction(rng.randint(0, max_den), rng.randint(1, max_den)) for k in chosen})


def run_property_suite(seed: int = 0, samples: int = 1000, max_support: int = 6) -> Report:
    """Randomized exact checks of the sorting, difference and barycentric lemmas."""
    rng = random.Random(seed)
    rep = Report("lem:simplicial-diff-op", meta={"seed": seed, "samples": samples})
    counters = {"lipschitz": [], "identities": [], "regions": [], "neighborhood": [], "clumping": []}
    keys = "abcdefg"
    for i in range(samples):
        xi = random_fn(rng, max_support, keys=keys)
        eta = random_fn(rng, max_support, keys=keys)
        if check_lipschitz(xi, eta):
            counters["lipschitz"].append(i)
        if check_identities(xi):
            counters["identities"].append(i)
        eps = Fraction(rng.randint(0, 4), rng.randint(1, 8))
        support_keys = sorted(xi.support() | {"z"})
        if check_region_partition(xi, support_keys, eps):
            counters["regions"].append(i)
        r = Fraction(rng.randint(0, 3), 8)
        for F in regions_containing(xi, 0):
            if not check_neighborhood(xi, eta, F, Fraction(0), r):
                counters["neighborhood"].append(i)
        Fs = regions_containing(xi, 0)
        if Fs:
            s = clumping_point(Fs, xi)
            if not all(s in F for F in Fs):
                counters["clumping"].append(i)
    for name, bad in counters.items():
        rep.add(name, not bad, value=len(bad), witness=bad[:5] or None)
    return rep
