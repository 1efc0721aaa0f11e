"""Long thin covering witnesses, their partition-of-unity form, BLR labelings and bound arithmetic.

Every verifier certifies the supplied finite instance only.  A pass does not
show dim_LTC <= d, which quantifies over all L, K and covers Theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .coarse import Cover, multiplicity
from .covers_pou import ScalarField, invariance_defect
from .dynamics import (FiniteAction, NearOrbitWitness, alpha_l_multiplicity, is_l_bounded, l_components,
                       long_violation)
from .errors import ArgumentError, CapabilityError
from .groups import GroupSpec
from .report import Report

SCOPE = "certifies this finite instance only, not dim_LTC <= d"
VACUOUS = "vacuously true (finite discrete)"


@dataclass(frozen=True)
class LtcParams:
    L: frozenset
    K: frozenset
    theta: tuple
    d: int
    N: int
    B: frozenset | None = None

    def __init__(self, L: Iterable, K: Iterable[int], theta: Iterable[Iterable[int]] | Cover, d: int, N: int,
                 B: Iterable | None = None):
        sets = theta.sets if isinstance(theta, Cover) else [frozenset(t) for t in theta]
        if d < 0 or N < 0:
            raise ArgumentError("d and N must be nonnegative")
        object.__setattr__(self, "L", frozenset(L))
        object.__setattr__(self, "K", frozenset(K))
        object.__setattr__(self, "theta", tuple(frozenset(t) for t in sets))
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "B", None if B is None else frozenset(B))


def _meta(params: LtcParams) -> dict:
    return {"d": params.d, "N": params.N, "scope": SCOPE}


def _eq_violation(a: FiniteAction, L: Iterable, domain: set, sel: Mapping):
    for g in sorted(L, key=repr):
        p = a.perm(g)
        for x in sorted(domain):
            y = p[x]
            if y in domain and sel[y] != p[sel[x]]:
                return {"g": g, "x": x}
    return None


def _th_violation(theta: Sequence[frozenset], sel: Mapping):
    for y in sorted(set(sel.values())):
        block = {x for x, v in sel.items() if v == y} | {y}
        if not any(block <= t for t in theta):
            return {"y": y, "block": sorted(block)}
    return None


def _alpha_bounded_violation(a: FiniteAction, points: set, B: Iterable):
    """First (u, v) of ``points`` with u not in alpha_B(v); the literal reading of N(x) in alpha_B(N(y))."""
    perms = [a.perm(b) for b in B]
    for v in sorted(points):
        reach = {p[v] for p in perms}
        for u in sorted(points):
            if u not in reach:
                return (u, v)
    return None


def verify_ltc_witness(a: FiniteAction, params: LtcParams, w: NearOrbitWitness) -> Report:
    """Conditions (Lo), (Mu), (Eq), (Th), (Ca) with violating witnesses."""
    rep = Report("def:ltc-dim", meta=_meta(params))
    x = long_violation(a, params.K, params.L, w.cover.sets)
    rep.add("Lo", x is None, witness=None if x is None else {"point": x})
    m = multiplicity(w.cover)
    rep.add("Mu", m <= params.d + 1, value=m)
    bad = None
    for name, pts in w.cover.members:
        v = _eq_violation(a, params.L, set(pts), w.selection[name])
        if v:
            bad = {"member": name, **v}
            break
    rep.add("Eq", bad is None, witness=bad)
    bad = None
    for name, _ in w.cover.members:
        v = _th_violation(params.theta, w.selection[name])
        if v:
            bad = {"member": name, **v}
            break
    rep.add("Th", bad is None, witness=bad)
    sizes = {name: len(w.image(name)) for name in w.cover.names}
    worst = max(sizes, key=sizes.get) if sizes else None
    top = sizes[worst] if worst else 0
    rep.add("Ca", top <= params.N, value=top, witness=None if top <= params.N else {"member": worst})
    return rep


def selection_components(a: FiniteAction, w: NearOrbitWitness, L: Iterable) -> dict:
    """(N_C, L)-connected components: preimages under N_C of the L-components of N_C(C)."""
    out = {}
    for name, _ in w.cover.members:
        comps = l_components(a, w.image(name), L)
        sel = w.selection[name]
        out[name] = [frozenset(x for x, v in sel.items() if v in comp) for comp in comps]
    return out


def verify_ltc_extras(a: FiniteAction, params: LtcParams, w: NearOrbitWitness,
                      clauses: Iterable[str] | None = None) -> Report:
    """(Mu+), (Co), (Co+) and, when B is supplied or requested, (Bo)."""
    wanted = list(clauses) if clauses is not None else ["Mu+", "Co", "Co+"] + (["Bo"] if params.B else [])
    if "Bo" in wanted and params.B is None:
        raise ArgumentError("clause (Bo) needs a set B")
    refinement = selection_components(a, w, params.L)
    rep = Report("def:ltc-dim-extra", meta={**_meta(params),
                                           "refinement": {k: [sorted(p) for p in v] for k, v in refinement.items()}})
    if "Mu+" in wanted:
        m = alpha_l_multiplicity(a, w.cover, params.L)
        rep.add("Mu+", m <= params.d + 1, value=m)
    if "Co" in wanted:
        bad = next((name for name in w.cover.names if len(refinement[name]) != 1), None)
        rep.add("Co", bad is None, witness=None if bad is None else {"member": bad, "parts": len(refinement[bad])})
    if "Co+" in wanted:
        bad = next((name for name in w.cover.names if not is_l_bounded(a, w.image(name), params.L, params.N)), None)
        rep.add("Co+", bad is None, witness=None if bad is None else {"member": bad})
    if "Bo" in wanted:
        bad = None
        for name in w.cover.names:
            v = _alpha_bounded_violation(a, w.image(name), params.B)
            if v:
                bad = {"member": name, "pair": list(v)}
                break
        rep.add("Bo", bad is None, witness=bad)
    return rep


def verify_ltc_pou(a: FiniteAction, params: LtcParams, colors: Sequence[Sequence[tuple]],
                   selections: Sequence[Mapping], fields: Sequence[ScalarField], eps) -> Report:
    """Partition-of-unity form: (Lo), (Eq), (Th), (Bo), (Pr), (Fi), (Su), (In), (Un).

    ``colors[l]`` lists (name, point set) pairs, ``selections[l]`` is N^(l) on
    their union and ``fields[l]`` is phi^(l).  Members of one colour must be
    disjoint (reported as Di).
    """
    eps = Fraction(eps)
    if params.B is None:
        raise ArgumentError("clause (Bo) needs a set B")
    if not (len(colors) == len(selections) == len(fields)):
        raise ArgumentError("colors, selections and fields must have equal length")
    rep = Report("prop:ltc-dim", meta={**_meta(params), "eps": eps, "colors": len(colors)})
    unions = []
    di_bad = None
    for l, cls in enumerate(colors):
        seen: dict = {}
        for name, pts in cls:
            for x in pts:
                if x in seen and di_bad is None:
                    di_bad = {"color": l, "members": [seen[x], name], "point": x}
                seen[x] = name
        unions.append(set(seen))
        sel = {int(k): int(v) for k, v in dict(selections[l]).items()}
        if set(sel) != unions[l]:
            raise ArgumentError(f"selection of colour {l} must be defined on exactly its union")
    sels = [{int(k): int(v) for k, v in dict(s).items()} for s in selections]
    rep.add("Di", di_bad is None, witness=di_bad)
    all_sets = [frozenset(pts) for cls in colors for _, pts in cls]
    x = long_violation(a, params.K, params.L, all_sets)
    rep.add("Lo", x is None, witness=None if x is None else {"point": x})
    bad = None
    for l in range(len(colors)):
        v = _eq_violation(a, params.L, unions[l], sels[l])
        if v:
            bad = {"color": l, **v}
            break
    rep.add("Eq", bad is None, witness=bad)
    bad = None
    for l in range(len(colors)):
        v = _th_violation(params.theta, sels[l])
        if v:
            bad = {"color": l, **v}
            break
    rep.add("Th", bad is None, witness=bad)
    bad = None
    for l, cls in enumerate(colors):
        for name, pts in cls:
            v = _alpha_bounded_violation(a, {sels[l][x] for x in pts}, params.B)
            if v:
                bad = {"color": l, "member": name, "pair": list(v)}
                break
        if bad:
            break
    rep.add("Bo", bad is None, witness=bad)
    rep.add("Pr", True, note=VACUOUS)
    rep.add("Fi", True, value=len(all_sets))
    bad = None
    for l, f in enumerate(fields):
        if f.n != a.n:
            raise ArgumentError("field and action live on different point sets")
        outside = sorted(f.support() - unions[l])
        if outside:
            bad = {"color": l, "point": outside[0]}
            break
        if any(v < 0 or v > 1 for v in f.values):
            bad = {"color": l, "note": "value outside [0,1]"}
            break
    rep.add("Su", bad is None, witness=bad)
    defects = [invariance_defect(a, f, params.L) for f in fields]
    worst = max(defects, default=Fraction(0))
    rep.add("In", worst <= eps, value=worst)
    bad = None
    for x in range(a.n):
        s = sum((f[x] for f in fields), Fraction(0))
        if (x in params.K and s != 1) or s > 1:
            bad = {"point": x, "sum": s}
            break
    rep.add("Un", bad is None, witness=bad)
    return rep


def build_proper_witness(a: FiniteAction, theta: Iterable[Iterable[int]] | Cover,
                         K: Iterable[int] | None = None) -> tuple[NearOrbitWitness, LtcParams]:
    """Orbit members with the identity selection, for a finite acting group.

    Choosing the least id of each orbit and transporting it by group elements
    returns x itself, so the selection is the identity on each orbit.  The
    result passes verify_ltc_witness with d = 0, N = |G| and L = G.
    """
    if not a.spec.is_finite:
        raise CapabilityError("build_proper_witness needs a finite acting group")
    theta_sets = theta.sets if isinstance(theta, Cover) else [frozenset(t) for t in theta]
    uncovered = set(range(a.n)) - set().union(*theta_sets) if theta_sets else set(range(a.n))
    if uncovered:
        raise ArgumentError(f"theta must cover the space (point {min(uncovered)})")
    G = a.group_elements()
    orbits = sorted(a.orbits(), key=min)
    cover = Cover(a.n, tuple((f"O{i}", orb) for i, orb in enumerate(orbits)))
    w = NearOrbitWitness(cover, {name: {x: x for x in pts} for name, pts in cover.members})
    params = LtcParams(G, range(a.n) if K is None else K, theta_sets, 0, len(G), B=G)
    return w, params


# --- BLR labelings --------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    """An opaque subgroup: ``contains`` returns True, False, or None when membership is unknown."""

    name: str
    contains: Callable = field(compare=False)

    @classmethod
    def whole(cls) -> "Subgroup":
        return cls("G", lambda g: True)

    @classmethod
    def trivial(cls, spec: GroupSpec) -> "Subgroup":
        e = spec.identity()
        return cls("{e}", lambda g: g == e)

    @classmethod
    def lattice_multiples(cls, moduli: Sequence[int]) -> "Subgroup":
        """prod m_i Z inside Z^d (m_i = 0 means the zero coordinate)."""
        mods = tuple(moduli)

        def contains(g):
            return all((c == 0) if m == 0 else (c % m == 0) for c, m in zip(g, mods))

        return cls("x".join(f"{m}Z" for m in mods), contains)

    @classmethod
    def from_window(cls, name: str, members: Iterable, window: Iterable) -> "Subgroup":
        """Known only inside ``window``: True on members, False on the rest, None outside."""
        mem, win = frozenset(members), frozenset(window)
        return cls(name, lambda g: True if g in mem else (False if g in win else None))

    @classmethod
    def from_json(cls, spec: GroupSpec, data: Mapping) -> "Subgroup":
        t = data.get("type")
        if t == "all":
            return cls.whole()
        if t == "trivial":
            return cls.trivial(spec)
        if t == "lattice":
            return cls.lattice_multiples(data["moduli"])
        if t == "elements":
            mem = [spec.validate(_tuple(g)) for g in data["elements"]]
            win = [spec.validate(_tuple(g)) for g in data.get("window", data["elements"])]
            return cls.from_window(data.get("name", "H"), mem, win)
        raise ArgumentError(f"unknown subgroup type {t!r}")


def _tuple(g):
    return tuple(_tuple(c) for c in g) if isinstance(g, list) else g


class BlrWitness:
    """Cover with a subgroup G_C and a labeling x -> group element (coset representative) per member."""

    def __init__(self, cover: Cover, subgroups: Mapping[str, Subgroup], labels: Mapping):
        lab = {}
        for name, pts in cover.members:
            if name not in subgroups or name not in labels:
                raise ArgumentError(f"member {name!r} needs a subgroup and a labeling")
            m = {int(k): v for k, v in dict(labels[name]).items()}
            if set(m) != set(pts):
                raise ArgumentError(f"labeling of {name!r} must be total on the member")
            lab[name] = m
        self.cover = cover
        self.subgroups = dict(subgroups)
        self.labels = lab


def _coset_eq(spec: GroupSpec, H: Subgroup, u, v) -> bool:
    """u H == v H, i.e. v^{-1} u in H."""
    res = H.contains(spec.mul(spec.inv(v), u))
    if res is None:
        raise CapabilityError(f"insufficient ball: membership of {spec.mul(spec.inv(v), u)!r} in {H.name} unknown")
    return bool(res)


def verify_blr_witness(a: FiniteAction, L: Iterable, K: Iterable[int], w: BlrWitness, d: int,
                       B: Iterable | None = None) -> Report:
    """(Lo), (Mu), (Eq) of the labeling form of eqasdim <= d, plus (Bo) when B is given."""
    spec = a.spec
    L = set(L)
    rep = Report("lem:BLR-reformu", meta={"d": d, "scope": "certifies this finite instance only"})
    x = long_violation(a, K, L, w.cover.sets)
    rep.add("Lo", x is None, witness=None if x is None else {"point": x})
    m = multiplicity(w.cover)
    rep.add("Mu", m <= d + 1, value=m)
    bad = None
    for name, pts in w.cover.members:
        H, lab = w.subgroups[name], w.labels[name]
        for g in sorted(L, key=repr):
            p = a.perm(g)
            for x in sorted(pts):
                y = p[x]
                if y in pts and not _coset_eq(spec, H, lab[y], spec.mul(g, lab[x])):
                    bad = {"member": name, "g": g, "x": x}
                    break
            if bad:
                break
        if bad:
            break
    rep.add("Eq", bad is None, witness=bad)
    if B is not None:
        B = list(B)
        bad = None
        for name, pts in w.cover.members:
            H, lab = w.subgroups[name], w.labels[name]
            for x in sorted(pts):
                for y in sorted(pts):
                    if not any(_coset_eq(spec, H, lab[x], spec.mul(b, lab[y])) for b in B):
                        bad = {"member": name, "pair": [x, y]}
                        break
                if bad:
                    break
            if bad:
                break
        rep.add("Bo", bad is None, witness=bad)
    return rep


# --- bound arithmetic -----------------------------------------------------------------


@dataclass(frozen=True)
class BoundsInput:
    """Nonnegative integer inputs; any may be omitted (None)."""

    asdim: int | None = None
    dimX_plus: int | None = None
    dimX: int | None = None
    dimLTC: int | None = None
    dstab: int | None = None
    rank: int | None = None
    eqasdim: int | None = None
    sup_dimLTC_H: int | None = None
    lsp0: int | None = None
    lsp_d: int | None = None
    hirsch: int | None = None

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if v is not None and (not isinstance(v, int) or v < 0):
                raise ArgumentError(f"{k} must be a nonnegative integer")


def _have(inp: BoundsInput, *names) -> bool:
    return all(getattr(inp, n) is not None for n in names)


def bounds_calculator(inp: BoundsInput) -> dict:
    """Every formula whose inputs are present, plus consistency flags.

    main, abstract and virnil bound dim_nuc + 1 of the crossed product; relative
    bounds dim_LTC + 1; hirsch bounds dim_nuc for the allosteric wreath examples.
    """
    out: dict = {"values": {}, "flags": {}}
    v, f = out["values"], out["flags"]
    if _have(inp, "asdim", "dimX_plus", "dimLTC", "dstab"):
        v["main"] = (inp.asdim + 1) * (inp.dimX_plus + 1) * (inp.dimLTC + 1) * (inp.dstab + 1)
    if _have(inp, "dimLTC", "dstab"):
        v["abstract"] = (inp.dimLTC + 1) ** 3 * (inp.dstab + 1)
    if _have(inp, "rank", "dstab", "dimX"):
        v["virnil"] = 9 ** inp.rank * (inp.dstab + 1) * (inp.dimX + 1) ** 2
    if _have(inp, "eqasdim", "sup_dimLTC_H"):
        v["relative"] = (inp.eqasdim + 1) * (inp.sup_dimLTC_H + 1)
        if inp.dimLTC is not None:
            f["dimLTC_within_relative"] = inp.dimLTC + 1 <= v["relative"]
    if inp.hirsch is not None and inp.hirsch >= 1:
        v["hirsch"] = 10 ** (inp.hirsch - 1) * math.factorial(inp.hirsch)
    if _have(inp, "asdim", "lsp0"):
        f["asdim_le_lsp0_minus_1"] = inp.asdim <= inp.lsp0 - 1
    if _have(inp, "dimLTC", "lsp_d"):
        f["dimLTC_le_lspd_minus_1"] = inp.dimLTC <= inp.lsp_d - 1
    if _have(inp, "asdim", "dimLTC"):
        f["asdim_le_dimLTC"] = inp.asdim <= inp.dimLTC
    return out
