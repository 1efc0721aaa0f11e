"""Allosteric wreath-product towers G wr Z^d with exact fixed-point counts on finite levels.

Level n carries a finite set E_n of lattice points, H_n = (m_n Z)^d and
G_n = prod d_{n,i} Z/b_i inside G = prod Z/b_i.  The coset space
Gamma/Gamma_n projects onto the torus (Z/m_n)^d, where all counting happens.

The theorem's hypothesis parameter (the guaranteed fixed fraction) is
instantiated as delta' = 1 - delta, where delta bounds the share of the torus
covered by the union of E_j H_j.  Reports carry both numbers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .dynamics import coset_action
from .errors import ArgumentError, CapabilityError
from .groups import GroupSpec, ball, wreath
from .report import Report

TORUS_CAP = 2_000_000
M_CAP = 100_000


def box(d: int, r: int) -> frozenset:
    return frozenset(itertools.product(range(-r, r + 1), repeat=d))


def _smallest_prime(k: int) -> int:
    p = 2
    while k % p:
        p += 1
    return p


def default_g_chain(base: Sequence[int], levels: int) -> list[tuple]:
    """Divisor lists d_n: each level multiplies every unfinished coordinate by its smallest remaining prime."""
    cur = [1] * len(base)
    out = []
    for _ in range(levels):
        cur = [c * _smallest_prime(b // c) if c < b else c for c, b in zip(cur, base)]
        out.append(tuple(cur))
    return out


@dataclass(frozen=True)
class Level:
    n: int
    E: frozenset
    m: int
    gdiv: tuple
    count: int
    delta_n: Fraction

    def in_G(self, v: Sequence[int]) -> bool:
        return all(x % dv == 0 for x, dv in zip(v, self.gdiv))

    def E_mod(self) -> set:
        return {tuple(c % self.m for c in e) for e in self.E}

    def to_dict(self, base: Sequence[int], d: int) -> dict:
        return {
            "n": self.n, "E": sorted(self.E), "m": self.m,
            "H": f"({self.m}Z)^{d}",
            "G_divisors": list(self.gdiv),
            "G_order": math.prod(b // dv for b, dv in zip(base, self.gdiv)),
            "union_count": self.count, "delta_n": self.delta_n,
        }


@dataclass(frozen=True)
class WreathTower:
    base: tuple
    d: int
    delta: Fraction
    levels: tuple

    def level(self, n: int) -> Level:
        if not 1 <= n <= len(self.levels):
            raise ArgumentError(f"level {n} outside 1..{len(self.levels)}")
        return self.levels[n - 1]

    @property
    def spec(self) -> GroupSpec:
        return wreath(self.base, self.d)

    def to_dict(self) -> dict:
        return {"base": list(self.base), "rank": self.d, "delta": self.delta,
                "fixed_fraction_target": 1 - self.delta,
                "levels": [lv.to_dict(self.base, self.d) for lv in self.levels]}


def _union_count(levels: Sequence[tuple], d: int, m: int) -> int:
    """|(union of E_j H_j) / H_n| on (Z/m)^d for (E_j mod m_j, m_j) pairs with m_j | m."""
    if m ** d > TORUS_CAP:
        raise CapabilityError(f"torus (Z/{m})^{d} exceeds the counting cap {TORUS_CAP}")
    count = 0
    for c in itertools.product(range(m), repeat=d):
        if any(tuple(x % mj for x in c) in Ej for Ej, mj in levels):
            count += 1
    return count


def build_tower(base: Sequence[int], d: int, delta, specs: Sequence[tuple]) -> WreathTower:
    """Tower from explicit (E_n, m_n, G-divisors) triples; counts delta_n exactly, checks nothing else."""
    base = tuple(int(b) for b in base)
    if math.prod(base) < 2:
        raise ArgumentError("base group must be nontrivial")
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ArgumentError("delta must lie in (0, 1)")
    levels: list[Level] = []
    mods: list[tuple] = []
    for n, (E, m, gdiv) in enumerate(specs, start=1):
        E = frozenset(tuple(p) for p in E)
        gdiv = tuple(int(x) for x in gdiv)
        if len(gdiv) != len(base) or any(b % g for b, g in zip(base, gdiv)):
            raise ArgumentError(f"level {n}: G divisors must divide the base moduli")
        mods.append(({tuple(c % m for c in e) for e in E}, m))
        if any(m % mj for _, mj in mods):
            raise ArgumentError(f"level {n}: H_n must lie inside every earlier H_j")
        count = _union_count(mods, d, m)
        levels.append(Level(n, E, m, gdiv, count, Fraction(count, m ** d)))
    return WreathTower(base, d, delta, tuple(levels))


def auto_tower(base: Sequence[int], d: int, delta, levels: int, radii: Sequence[int] | None = None,
               g_chain: Sequence[Sequence[int]] | None = None, m_cap: int = M_CAP) -> WreathTower:
    """Inductive choice of H_n = (m_n Z)^d with E_n = [-r_n, r_n]^d (r_n = n by default).

    m_n is the least multiple of m_{n-1} with m_n > 2 r_n, which gives
    (E_n - E_n) n H_n = {0}, and m_n^d > |E'_n| / (delta - delta_{n-1}).
    """
    base = tuple(int(b) for b in base)
    if math.prod(base) < 2:
        raise ArgumentError("base group must be nontrivial")
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ArgumentError("delta must lie in (0, 1)")
    if levels < 1:
        raise ArgumentError("need at least one level")
    radii = list(radii) if radii is not None else list(range(1, levels + 1))
    if len(radii) < levels or any(b < a for a, b in zip(radii, radii[1:])):
        raise ArgumentError("radius schedule must be nondecreasing with one entry per level")
    chain = [tuple(g) for g in g_chain] if g_chain is not None else default_g_chain(base, levels)
    if len(chain) < levels:
        raise ArgumentError("G chain needs one divisor list per level")
    specs: list[tuple] = []
    prev_m, prev_delta, prev_E = 1, Fraction(0), frozenset()
    for n in range(1, levels + 1):
        E = box(d, radii[n - 1])
        fresh = len(E - prev_E)
        gap = delta - prev_delta
        k = 1
        while True:
            m = prev_m * k
            if m > 2 * radii[n - 1] and Fraction(m ** d) > Fraction(fresh) / gap:
                break
            k += 1
            if prev_m * k > m_cap:
                raise CapabilityError(f"infeasible delta schedule at level {n}: no m_n <= {m_cap}")
        specs.append((E, m, chain[n - 1]))
        tower = build_tower(base, d, delta, specs)
        prev_m, prev_delta, prev_E = m, tower.levels[-1].delta_n, E
    return tower


# --- per-level certificates -------------------------------------------------------------


def level_certificates(tower: WreathTower) -> list[dict]:
    """Conditions (1) and (2) plus the nesting of E, H and G, each verified exactly."""
    out = []
    prev = None
    for lv in tower.levels:
        diffs = {tuple(a - b for a, b in zip(p, q)) for p in lv.E for q in lv.E}
        zero = (0,) * tower.d
        bad_diff = sorted(v for v in diffs if v != zero and all(c % lv.m == 0 for c in v))
        cert = {
            "n": lv.n,
            "E_increasing": prev is None or prev.E <= lv.E,
            "H_decreasing": prev is None or lv.m % prev.m == 0,
            "G_decreasing": prev is None or all(g % p == 0 for g, p in zip(lv.gdiv, prev.gdiv)),
            "cond1": not bad_diff,
            "cond2": lv.count < tower.delta * lv.m ** tower.d,
            "delta_n_below_delta": lv.delta_n < tower.delta,
        }
        if bad_diff:
            cert["cond1_witness"] = bad_diff[0]
        out.append(cert)
        prev = lv
    return out


# --- membership, escape levels, fixed points ---------------------------------------------


def gamma_membership(tower: WreathTower, n: int, g) -> bool:
    """Whether g = (f, h) lies in Gamma_n = N_n x| H_n (n = 0 means the whole group)."""
    f, h = g
    if n == 0:
        return True
    if any(c % tower.level(n).m for c in h):
        return False
    for j in range(1, n + 1):
        lv = tower.level(j)
        sums: dict = {}
        for p, v in f:
            key = tuple(c % lv.m for c in p)
            cur = sums.get(key, (0,) * len(tower.base))
            sums[key] = tuple((a + b) % m for a, b, m in zip(cur, v, tower.base))
        Emod = lv.E_mod()
        for key, total in sums.items():
            if key in Emod and not lv.in_G(total):
                return False
    return True


def escape_level(tower: WreathTower, g) -> dict:
    """Least level with g outside Gamma_n, and the level where the proof's sufficient condition kicks in."""
    f, h = g
    if not f and not any(h):
        raise ArgumentError("escape level is undefined for the identity")
    L = len(tower.levels)
    least = next((n for n in range(1, L + 1) if not gamma_membership(tower, n, g)), None)
    proof = None
    D = {p for p, _ in f}
    R = {v for _, v in f}
    for n in range(1, L + 1):
        lv = tower.level(n)
        if any(h):
            ok = any(c % lv.m for c in h)
        else:
            diffs = {tuple(a - b for a, b in zip(p, q)) for p in D for q in D}
            ok = (D <= lv.E and all(v == (0,) * tower.d or any(c % lv.m for c in v) for v in diffs)
                  and not any(lv.in_G(r) for r in R))
        if ok:
            proof = n
            break
    out = {"level": least, "proof_level": proof}
    if least is None:
        out["diagnostic"] = f"g stays in Gamma_n for all {L} simulated levels; the tower is too short"
    return out


@dataclass(frozen=True)
class FixedFraction:
    exact: Fraction
    lower: Fraction
    target: Fraction

    @property
    def ok(self) -> bool:
        return self.exact >= self.lower >= self.target


def fixed_fraction(tower: WreathTower, n: int, z: Sequence[int]) -> FixedFraction:
    """Share of Gamma/Gamma_n fixed by s = (z at the origin, 0), counted on (Z/m_n)^d.

    [h] is fixed iff -h avoids E_j H_j for every j <= n with z outside G_j.
    The lower bound is the share of [h] with -h outside every E_j H_j.
    """
    z = tuple(int(c) % b for c, b in zip(z, tower.base))
    if len(z) != len(tower.base) or not any(z):
        raise ArgumentError("z must be a nonidentity base element")
    lv_n = tower.level(n)
    m, d = lv_n.m, tower.d
    if m ** d > TORUS_CAP:
        raise CapabilityError(f"torus (Z/{m})^{d} exceeds the counting cap {TORUS_CAP}")
    active = [(tower.level(j).E_mod(), tower.level(j).m, not tower.level(j).in_G(z)) for j in range(1, n + 1)]
    fixed = free = 0
    for c in itertools.product(range(m), repeat=d):
        neg = tuple(-x for x in c)
        hits = [(tuple(x % mj for x in neg) in Ej, act) for Ej, mj, act in active]
        if not any(hit and act for hit, act in hits):
            fixed += 1
        if not any(hit for hit, _ in hits):
            free += 1
    total = m ** d
    return FixedFraction(Fraction(fixed, total), Fraction(free, total), 1 - tower.delta)


def lamp(tower: WreathTower, z: Sequence[int]):
    """The element s = (f_0, 0) with f_0 = z at the origin."""
    zero = (0,) * tower.d
    return (((zero, tuple(z)),), zero)


def brute_force_fixed_fraction(tower: WreathTower, n: int, z: Sequence[int], seed_radius: int = 8) -> Fraction:
    """Enumerate Gamma/Gamma_n through coset_action and count the points fixed by s."""
    a = coset_action(tower.spec, lambda g: gamma_membership(tower, n, g), seed_radius)
    p = a.perm(lamp(tower, z))
    return Fraction(sum(1 for x in range(a.n) if p[x] == x), a.n)


def tower_report(tower: WreathTower, z: Sequence[int] | None = None, radius: int = 2) -> Report:
    """Per-level certificates, fixed fractions for z, and escape levels on a word ball of Gamma."""
    z = tuple(z) if z is not None else tuple(1 if i == 0 else 0 for i in range(len(tower.base)))
    rep = Report("thm:allosteric-condition", meta={
        "delta": tower.delta, "fixed_fraction_target": 1 - tower.delta, "z": list(z),
        "tower": tower.to_dict(),
        "verdict": "allostery criteria verified at simulated levels; the inverse-limit statement "
                   "is a mathematical consequence, not computed",
    })
    for cert in level_certificates(tower):
        for key in ("E_increasing", "H_decreasing", "G_decreasing", "cond1", "cond2", "delta_n_below_delta"):
            rep.add(f"level{cert['n']}.{key}", cert[key],
                    witness=cert.get("cond1_witness") if key == "cond1" and not cert[key] else None)
    for lv in tower.levels:
        ff = fixed_fraction(tower, lv.n, z)
        rep.add(f"level{lv.n}.fixed_fraction", ff.ok, value={"exact": ff.exact, "lower": ff.lower},
                note=f"needs exact >= lower >= {ff.target}")
    table = ball(tower.spec, radius)
    missing = []
    levels = {}
    for g in table.sphere_order():
        if g == tower.spec.identity():
            continue
        esc = escape_level(tower, g)
        levels[esc["level"]] = levels.get(esc["level"], 0) + 1
        if esc["level"] is None:
            missing.append(g)
    rep.add("escape_levels", not missing, value={str(k): v for k, v in sorted(levels.items(), key=str)},
            witness=missing[:3] or None, note=f"all nontrivial elements of the radius-{radius} ball")
    return rep
