"""Concrete finitely generated groups with exact normal-form arithmetic.

Five realizations are supported:

* ``lattice``: Z^d, elements are d-tuples of integers.
* ``heisenberg``: triples (a, b, c) with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab').
* ``finite_abelian``: tuples of residues modulo the given moduli.
* ``virtually_cyclic``: Z semidirect a finite abelian H, elements (n, h) with
  (n,h)(n',h') = (n + sign(h) n', h + h').
* ``wreath``: G wr Z^r for finite abelian G, elements (f, h) where f is a sparse
  map lattice point -> G stored as a sorted tuple of pairs, with
  (f,h)(f',h') = (f + lambda_h f', h + h') and (lambda_h f)(x) = f(x - h).

Every spec carries a symmetric generating set with the identity removed.
Python integers never overflow, so Heisenberg twist terms stay exact.
"""

from __future__ import annotations

import itertools
import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ArgumentError, BudgetExceeded, CapabilityError, StructuralError

DEFAULT_BALL_CAP = 5_000_000
WREATH_MAX_RANK = 3
WREATH_MAX_BASE_ORDER = 64

KINDS = ("lattice", "heisenberg", "finite_abelian", "virtually_cyclic", "wreath")

Element = tuple


@dataclass(frozen=True)
class GroupSpec:
    """A group realization plus its symmetric generating set.

    ``params`` is a kind-specific hashable tuple; use the constructor helpers
    (:func:`lattice`, :func:`heisenberg`, ...) rather than building it by hand.
    """

    kind: str
    params: tuple
    generators: tuple = field(default=())
    generator_names: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown group kind {self.kind!r}")
        if not self.generators:
            object.__setattr__(self, "generators", tuple(_default_generators(self)))
        if not self.generator_names:
            object.__setattr__(self, "generator_names", tuple(f"s{i}" for i in range(len(self.generators))))
        for g in self.generators:
            self.validate(g)
        ident = self.identity()
        gens = set(self.generators)
        if ident in gens:
            raise ArgumentError("identity must not be listed as a generator")
        for g in self.generators:
            if self.inv(g) not in gens:
                raise ArgumentError(f"generating set is not closed under inversion: missing inverse of {g}")

    # --- arithmetic -----------------------------------------------------

    def identity(self) -> Element:
        k, p = self.kind, self.params
        if k == "lattice":
            return (0,) * p[0]
        if k == "heisenberg":
            return (0, 0, 0)
        if k == "finite_abelian":
            return (0,) * len(p[0])
        if k == "virtually_cyclic":
            return (0, (0,) * len(p[0]))
        return ((), (0,) * p[1])

    def mul(self, g: Element, h: Element) -> Element:
        k, p = self.kind, self.params
        arity = _ARITY[k](p)
        if len(g) != arity or len(h) != arity:
            raise StructuralError(f"arity mismatch for {k}: {g!r} * {h!r}")
        if k == "lattice":
            return tuple(a + b for a, b in zip(g, h))
        if k == "heisenberg":
            return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])
        if k == "finite_abelian":
            return tuple((a + b) % m for a, b, m in zip(g, h, p[0]))
        if k == "virtually_cyclic":
            moduli = p[0]
            s = self.sign(g[1])
            return (g[0] + s * h[0], tuple((a + b) % m for a, b, m in zip(g[1], h[1], moduli)))
        moduli = p[0]
        f = dict(g[0])
        shift = g[1]
        for x, v in h[0]:
            y = tuple(a + b for a, b in zip(x, shift))
            f[y] = _add_res(f.get(y), v, moduli)
        return (_canon_sparse(f), tuple(a + b for a, b in zip(g[1], h[1])))

    def inv(self, g: Element) -> Element:
        k, p = self.kind, self.params
        if k == "lattice":
            return tuple(-a for a in g)
        if k == "heisenberg":
            a, b, c = g
            return (-a, -b, -c + a * b)
        if k == "finite_abelian":
            return tuple((-a) % m for a, m in zip(g, p[0]))
        if k == "virtually_cyclic":
            return (-self.sign(g[1]) * g[0], tuple((-a) % m for a, m in zip(g[1], p[0])))
        moduli = p[0]
        h = g[1]
        f = {}
        for x, v in g[0]:
            y = tuple(a - b for a, b in zip(x, h))
            f[y] = tuple((-a) % m for a, m in zip(v, moduli))
        return (_canon_sparse(f), tuple(-a for a in h))

    def sign(self, h: Sequence[int]) -> int:
        """The homomorphism H -> {+1, -1} of a virtually cyclic spec."""
        signs = self.params[1]
        s = 1
        for a, e in zip(h, signs):
            if e == -1 and a % 2:
                s = -s
        return s

    def power(self, g: Element, k: int) -> Element:
        base = g if k >= 0 else self.inv(g)
        out = self.identity()
        for _ in range(abs(k)):
            out = self.mul(out, base)
        return out

    def validate(self, g: Element) -> Element:
        """Return ``g`` if it is a well-formed element, else raise StructuralError."""
        k, p = self.kind, self.params
        try:
            if k == "lattice":
                ok = len(g) == p[0] and all(isinstance(a, int) for a in g)
            elif k == "heisenberg":
                ok = len(g) == 3 and all(isinstance(a, int) for a in g)
            elif k == "finite_abelian":
                ok = _is_residue_tuple(g, p[0])
            elif k == "virtually_cyclic":
                ok = len(g) == 2 and isinstance(g[0], int) and _is_residue_tuple(g[1], p[0])
            else:
                moduli, rank = p
                ok = len(g) == 2 and len(g[1]) == rank and all(isinstance(a, int) for a in g[1])
                if ok:
                    pts = [x for x, _ in g[0]]
                    ok = pts == sorted(set(pts)) and all(
                        len(x) == rank and _is_residue_tuple(v, moduli) and any(v) for x, v in g[0]
                    )
        except TypeError:
            ok = False
        if not ok:
            raise StructuralError(f"{g!r} is not a valid {self.kind} element for params {self.params}")
        return g

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite_abelian"

    @property
    def order(self) -> int | None:
        if self.kind == "finite_abelian":
            return math.prod(self.params[0])
        return None

    # --- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        k, p = self.kind, self.params
        if k == "lattice":
            params = {"d": p[0]}
        elif k == "heisenberg":
            params = {"generating_set": "x^{+-1}, y^{+-1}"}
        elif k == "finite_abelian":
            params = {"moduli": list(p[0])}
        elif k == "virtually_cyclic":
            params = {"moduli": list(p[0]), "signs": list(p[1])}
        else:
            params = {"base_moduli": list(p[0]), "rank": p[1]}
        return {"kind": k, "params": params}


_ARITY = {
    "lattice": lambda p: p[0],
    "heisenberg": lambda p: 3,
    "finite_abelian": lambda p: len(p[0]),
    "virtually_cyclic": lambda p: 2,
    "wreath": lambda p: 2,
}


def _is_residue_tuple(g, moduli) -> bool:
    return len(g) == len(moduli) and all(isinstance(a, int) and 0 <= a < m for a, m in zip(g, moduli))


def _add_res(a, b, moduli):
    if a is None:
        return b
    return tuple((x + y) % m for x, y, m in zip(a, b, moduli))


def _canon_sparse(f: dict) -> tuple:
    return tuple(sorted((x, v) for x, v in f.items() if any(v)))


def _unit(n: int, i: int, value: int = 1) -> tuple:
    return tuple(value if j == i else 0 for j in range(n))


def _default_generators(spec: GroupSpec) -> list:
    k, p = spec.kind, spec.params
    gens: list = []
    if k == "lattice":
        for i in range(p[0]):
            gens += [_unit(p[0], i, 1), _unit(p[0], i, -1)]
    elif k == "heisenberg":
        gens = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]
    elif k == "finite_abelian":
        for i, m in enumerate(p[0]):
            gens += [_unit(len(p[0]), i, 1 % m), _unit(len(p[0]), i, (-1) % m)]
    elif k == "virtually_cyclic":
        moduli = p[0]
        zero = (0,) * len(moduli)
        gens = [(1, zero), (-1, zero)]
        for i, m in enumerate(moduli):
            gens += [(0, _unit(len(moduli), i, 1 % m)), (0, _unit(len(moduli), i, (-1) % m))]
    else:
        moduli, rank = p
        zero = (0,) * rank
        for i in range(rank):
            gens += [((), _unit(rank, i, 1)), ((), _unit(rank, i, -1))]
        for i, m in enumerate(moduli):
            for v in (1 % m, (-1) % m):
                gens.append((((zero, _unit(len(moduli), i, v)),), zero))
    out = []
    ident = spec.identity()
    for g in gens:
        g = _normalize_identity(spec, g)
        if g != ident and g not in out:
            out.append(g)
    return out


def _normalize_identity(spec: GroupSpec, g):
    # Drop zero-valued sparse entries produced by modulus-1 factors.
    if spec.kind == "wreath":
        return (tuple((x, v) for x, v in g[0] if any(v)), g[1])
    return g


# --- constructors ---------------------------------------------------------


def lattice(d: int) -> GroupSpec:
    if d < 1:
        raise ArgumentError("lattice rank must be positive")
    return GroupSpec("lattice", (d,))


def heisenberg() -> GroupSpec:
    """Discrete Heisenberg group with generating set {x^{+-1}, y^{+-1}}."""
    return GroupSpec("heisenberg", (), generator_names=("x", "x^-1", "y", "y^-1"))


def finite_abelian(moduli: Iterable[int]) -> GroupSpec:
    moduli = tuple(int(m) for m in moduli)
    if not moduli or any(m < 1 for m in moduli):
        raise ArgumentError("moduli must be a nonempty list of positive integers")
    return GroupSpec("finite_abelian", (moduli,))


def virtually_cyclic(moduli: Iterable[int], signs: Iterable[int]) -> GroupSpec:
    """Z semidirect H for H = sum of Z/m_i; ``signs[i]`` is the sign of the i-th unit vector."""
    moduli = tuple(int(m) for m in moduli)
    signs = tuple(int(s) for s in signs)
    if not moduli or any(m < 1 for m in moduli) or len(signs) != len(moduli):
        raise ArgumentError("need one sign per finite-factor modulus")
    for m, s in zip(moduli, signs):
        if s not in (1, -1):
            raise ArgumentError("signs must be +1 or -1")
        if s == -1 and m % 2:
            raise ArgumentError(f"sign -1 on Z/{m} is not a homomorphism (odd modulus)")
    return GroupSpec("virtually_cyclic", (moduli, signs))


def infinite_dihedral() -> GroupSpec:
    return virtually_cyclic([2], [-1])


def wreath(base_moduli: Iterable[int], rank: int, *, max_rank: int = WREATH_MAX_RANK,
           max_base_order: int = WREATH_MAX_BASE_ORDER) -> GroupSpec:
    moduli = tuple(int(m) for m in base_moduli)
    if not moduli or any(m < 1 for m in moduli):
        raise ArgumentError("base moduli must be positive")
    if not 1 <= rank <= max_rank:
        raise CapabilityError(f"wreath lattice rank must lie in 1..{max_rank}")
    if math.prod(moduli) > max_base_order:
        raise CapabilityError(f"wreath base order exceeds {max_base_order}")
    return GroupSpec("wreath", (moduli, int(rank)))


def from_json(data: dict) -> GroupSpec:
    """Build a spec from ``{"kind": ..., "params": {...}}``."""
    kind = data.get("kind", "").lower().replace("-", "_")
    params = data.get("params", {}) or {}
    aliases = {"finiteabelian": "finite_abelian", "virtuallycyclic": "virtually_cyclic"}
    kind = aliases.get(kind, kind)
    if kind == "lattice":
        return lattice(int(params.get("d", 1)))
    if kind == "heisenberg":
        return heisenberg()
    if kind == "finite_abelian":
        return finite_abelian(params["moduli"])
    if kind == "virtually_cyclic":
        moduli = params.get("moduli", params.get("finiteFactorModuli"))
        if "signs" in params:
            return virtually_cyclic(moduli, params["signs"])
        table = params["sign"]
        signs = []
        for i in range(len(moduli)):
            key = ",".join(str(a) for a in _unit(len(moduli), i, 1 % moduli[i]))
            signs.append(int(table.get(key, 1)))
        spec = virtually_cyclic(moduli, signs)
        for key, s in table.items():
            h = tuple(int(a) for a in str(key).split(","))
            if spec.sign(h) != int(s):
                raise ArgumentError(f"sign table is not a homomorphism at {key}")
        return spec
    if kind == "wreath":
        base = params.get("base_moduli", params.get("base"))
        if isinstance(base, dict):
            base = base.get("params", base).get("moduli")
        return wreath(base, int(params.get("rank", params.get("latticeRank", 1))))
    raise ArgumentError(f"unknown group kind {data.get('kind')!r}")


def parse_group(text: str) -> GroupSpec:
    """Short CLI names: ``Z``, ``Z2`` (rank 2), ``Zd:3``, ``heisenberg``, ``dihedral``, ``cyclic:6``."""
    t = text.strip().lower()
    if t in ("z", "zz"):
        return lattice(1)
    if t.startswith("zd:"):
        return lattice(int(t[3:]))
    if t.startswith("z") and t[1:].isdigit():
        return lattice(int(t[1:]))
    if t in ("heisenberg", "h3"):
        return heisenberg()
    if t in ("dihedral", "d_inf", "dinf", "infinite_dihedral"):
        return infinite_dihedral()
    if t.startswith("cyclic:") or t.startswith("abelian:"):
        return finite_abelian(int(m) for m in t.split(":", 1)[1].split(","))
    raise ArgumentError(f"cannot parse group {text!r}")


# --- balls and growth -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BallTable:
    """Cayley ball B_S(e, radius) with one lexicographically least shortest word per element."""

    spec: GroupSpec
    radius: int
    words: dict
    growth: tuple

    @property
    def elements(self) -> dict:
        return self.words

    def __contains__(self, g) -> bool:
        return g in self.words

    def __len__(self) -> int:
        return len(self.words)

    def sphere_order(self) -> list:
        """Elements sorted by (word length, word), the canonical enumeration order."""
        return sorted(self.words, key=lambda g: (len(self.words[g]), self.words[g]))

    def ball_set(self, r: int) -> set:
        if r > self.radius:
            raise ArgumentError(f"table radius {self.radius} < requested {r}")
        return {g for g, w in self.words.items() if len(w) <= r}

    def to_csv(self) -> str:
        lines = ["n,Gr(n)"] + [f"{n},{v}" for n, v in enumerate(self.growth)]
        return "\n".join(lines) + "\n"


class BallEnumerator:
    """Incremental breadth-first enumeration of Cayley balls.

    The frontier is kept in lexicographic word order, so the first word that
    reaches an element is the lexicographically least among its shortest words.
    """

    def __init__(self, spec: GroupSpec, cap: int = DEFAULT_BALL_CAP):
        self.spec = spec
        self.cap = cap
        e = spec.identity()
        self.words = {e: ()}
        self.frontier = [e]
        self.growth = [1]

    @property
    def radius(self) -> int:
        return len(self.growth) - 1

    @property
    def saturated(self) -> bool:
        return not self.frontier

    def step(self) -> None:
        spec, words = self.spec, self.words
        nxt = []
        for g in self.frontier:
            w = words[g]
            for i, s in enumerate(spec.generators):
                x = spec.mul(g, s)
                if x not in words:
                    words[x] = w + (i,)
                    nxt.append(x)
                    if len(words) > self.cap:
                        raise BudgetExceeded(
                            f"ball exceeds element cap {self.cap} at radius {self.radius + 1}", best=len(words)
                        )
        self.frontier = nxt
        self.growth.append(len(words))

    def extend_to(self, n: int) -> None:
        while self.radius < n:
            self.step()

    def table(self, n: int | None = None) -> BallTable:
        n = self.radius if n is None else n
        self.extend_to(n)
        if n == self.radius:
            words = dict(self.words)
        else:
            words = {g: w for g, w in self.words.items() if len(w) <= n}
        return BallTable(self.spec, n, words, tuple(self.growth[: n + 1]))


def ball(spec: GroupSpec, n: int, cap: int = DEFAULT_BALL_CAP) -> BallTable:
    """Exact BFS enumeration of B_S(e, n)."""
    if n < 0:
        raise ArgumentError("radius must be nonnegative")
    en = BallEnumerator(spec, cap)
    en.extend_to(n)
    return en.table()


def evaluate_word(spec: GroupSpec, word: Iterable[int]) -> Element:
    out = spec.identity()
    for i in word:
        out = spec.mul(out, spec.generators[i])
    return out


def structured_ball(spec: GroupSpec, n: int) -> set:
    """Box-shaped balls of the abelian and virtually cyclic packing arguments.

    Lattice: [-n, n]^d.  Finite abelian: the whole group (rank 0 plus torsion).
    Virtually cyclic: {a^i : |i| <= n} . H, which also covers Z + T when all
    signs are +1.
    """
    if n < 0:
        raise ArgumentError("radius must be nonnegative")
    k, p = spec.kind, spec.params
    if k == "lattice":
        return set(itertools.product(range(-n, n + 1), repeat=p[0]))
    if k == "finite_abelian":
        return set(itertools.product(*(range(m) for m in p[0])))
    if k == "virtually_cyclic":
        hs = list(itertools.product(*(range(m) for m in p[0])))
        return {(i, h) for i in range(-n, n + 1) for h in hs}
    raise CapabilityError(f"no structured ball for kind {k!r}")


def structured_ball_size(spec: GroupSpec, n: int) -> int:
    """Closed-form |B(n)|: (2n+1)^rank |T| or (2n+1)|H|."""
    k, p = spec.kind, spec.params
    if k == "lattice":
        return (2 * n + 1) ** p[0]
    if k == "finite_abelian":
        return math.prod(p[0])
    if k == "virtually_cyclic":
        return (2 * n + 1) * math.prod(p[0])
    raise CapabilityError(f"no structured ball for kind {k!r}")


def set_product(spec: GroupSpec, A: Iterable, B: Iterable, cap: int = DEFAULT_BALL_CAP) -> set:
    """{a b : a in A, b in B}, deduplicated."""
    B = list(B)
    out = set()
    for a in A:
        for b in B:
            out.add(spec.mul(a, b))
            if len(out) > cap:
                raise BudgetExceeded(f"set product exceeds cap {cap}", best=len(out))
    return out


def set_power(spec: GroupSpec, L: Iterable, k: int, cap: int = DEFAULT_BALL_CAP) -> set:
    """L^k = {g_1 ... g_k}; L^0 = {e}."""
    L = set(L)
    out = {spec.identity()}
    for _ in range(k):
        out = set_product(spec, out, L, cap)
    return out


def set_inverse(spec: GroupSpec, A: Iterable) -> set:
    return {spec.inv(a) for a in A}


def growth_degree_estimate(table: BallTable, window: Iterable[int]) -> float:
    """Least-squares slope of log Gr(n) against log n over ``window`` (approximate)."""
    ns = list(window)
    if len(ns) < 2:
        raise ArgumentError("window needs at least two radii")
    if min(ns) < 2 or max(ns) > table.radius:
        raise ArgumentError(f"window must lie in [2, {table.radius}]")
    xs = [math.log(n) for n in ns]
    ys = [math.log(table.growth[n]) for n in ns]
    return statistics.linear_regression(xs, ys).slope
