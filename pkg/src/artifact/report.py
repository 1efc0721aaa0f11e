"""Pass/fail reports and exact serialization helpers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def frac_str(q: Fraction | int) -> str:
    """Render a rational as ``"p/q"`` (always with an explicit denominator)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"``, an integer, or a terminating decimal into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


def to_jsonable(obj: Any) -> Any:
    """Convert nested results into JSON-ready data with deterministic order."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: _sort_key(kv[0]))}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj, key=_sort_key)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return str(obj)


def _key(k: Any) -> str:
    if isinstance(k, str):
        return k
    if isinstance(k, Fraction):
        return frac_str(k)
    return json.dumps(to_jsonable(k), separators=(",", ":"))


def _sort_key(v: Any):
    # Mixed-type collections sort by type name first, then by value.
    if isinstance(v, Fraction):
        return ("Fraction", v)
    if isinstance(v, tuple):
        return ("tuple", tuple(_sort_key(x) for x in v))
    return (type(v).__name__, v)


def dumps(obj: Any) -> str:
    """Byte-stable JSON rendering used by every CLI report."""
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


@dataclass
class Check:
    """One named condition of a verifier together with its outcome."""

    name: str
    passed: bool
    value: Any = None
    witness: Any = None
    note: str | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "pass": self.passed}
        if self.value is not None:
            out["value"] = self.value
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note is not None:
            out["note"] = self.note
        return out


@dataclass
class Report:
    """A list of checks tagged with the statement they exercise."""

    tag: str
    checks: list[Check] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, value: Any = None, witness: Any = None, note: str | None = None) -> Check:
        c = Check(name, bool(passed), value, witness, note)
        self.checks.append(c)
        return c

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "violations": [c.to_dict() for c in self.checks if not c.passed],
            "meta": self.meta,
        }
