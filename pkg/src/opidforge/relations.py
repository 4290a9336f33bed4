"""Stable many-to-one relationships between object types.

A pair ``(many, one)`` is stable in a log when every object of type
``many`` occurs together with exactly one object of type ``one`` and every
object of type ``one`` occurs together with at least one ``many`` object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import Obj
from .ocel import Ocel

SCHEMA_VERSION = 1

NOISE_SEMANTICS = (
    "object-fraction thresholding per side: at noise e a pair is stable when at least "
    "(1 - e) of the many-side objects occurring in some event meet exactly one one-side "
    "object (and at least one does), and at least (1 - e) of the one-side objects meet "
    "some many-side object; counts are approximate with respect to other tools"
)


@dataclass(frozen=True)
class PairStats:
    many: str
    one: str
    many_ok: int
    many_total: int
    one_ok: int
    one_total: int
    stable: bool

    def to_json(self) -> dict:
        return {
            "many": self.many,
            "one": self.one,
            "manyOk": self.many_ok,
            "manyTotal": self.many_total,
            "oneOk": self.one_ok,
            "oneTotal": self.one_total,
            "stableAtNoise": self.stable,
        }


def _holds(ok: int, total: int, noise: float) -> bool:
    # at most a `noise` fraction may fail; the slack absorbs float rounding
    return total - ok <= noise * total + 1e-9


@dataclass
class MiningReport:
    noise: float
    pairs: dict = field(default_factory=dict)

    @property
    def stable(self) -> list:
        return sorted(pair for pair, stats in self.pairs.items() if stats.stable)

    @property
    def one_to_one(self) -> list:
        found = set(self.stable)
        return sorted((a, b) for a, b in found if a < b and (b, a) in found)

    @property
    def m2o_count(self) -> int:
        return len(self.stable)

    def count_line(self) -> str:
        """``"N (m+2*k)"`` where k counts pairs stable in both directions."""
        k = len(self.one_to_one)
        m = self.m2o_count - 2 * k
        return f"{self.m2o_count} ({m}+2*{k})" if k else f"{self.m2o_count} ({m}+0)"

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "noise": self.noise,
            "noise_semantics": NOISE_SEMANTICS,
            "perPair": {f"{m}->{o}": self.pairs[(m, o)].to_json() for m, o in sorted(self.pairs)},
            "summary": {
                "m2oCount": self.m2o_count,
                "oneToOnePairCount": len(self.one_to_one),
                "countLine": self.count_line(),
                "stablePairs": [list(p) for p in self.stable],
            },
        }

    def to_text(self) -> str:
        header = ("many", "one", "many ok", "one ok", "stable")
        rows = [header]
        for p in sorted(self.pairs):
            s = self.pairs[p]
            rows.append((s.many, s.one, f"{s.many_ok}/{s.many_total}", f"{s.one_ok}/{s.one_total}",
                         "yes" if s.stable else "no"))
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        lines.append(f"#m2o(noise={self.noise:g}) = {self.count_line()}")
        return "\n".join(lines) + "\n"


def _partners(log: Ocel, o: Obj, type_: str) -> frozenset:
    return log.cooccurrence.get(o, {}).get(type_, frozenset())


def discover_stable_m2o(log: Ocel, noise: float = 0.0) -> MiningReport:
    """Test every ordered pair of distinct log types for stability at ``noise``.

    Many-side objects that occur in no event carry no evidence and are left
    out of the many-side count.
    """
    if not 0.0 <= noise <= 1.0:
        raise ValueError(f"noise must lie in [0, 1], got {noise}")
    report = MiningReport(noise)
    types = sorted(log.types)
    observed = log.observed
    for many in types:
        seen = [o for o in log.objects_of(many) if o in observed]
        for one in types:
            if one == many:
                continue
            many_ok = sum(1 for o in seen if len(_partners(log, o, one)) == 1)
            ones = log.objects_of(one)
            one_ok = sum(1 for o in ones if _partners(log, o, many))
            stable = many_ok > 0 and _holds(many_ok, len(seen), noise) and _holds(one_ok, len(ones), noise)
            report.pairs[(many, one)] = PairStats(many, one, many_ok, len(seen), one_ok, len(ones), stable)
    return report


@dataclass(frozen=True)
class LinkViolation:
    pair: tuple
    object: Obj
    lo: frozenset

    def to_json(self) -> dict:
        return {"pair": list(self.pair), "object": self.object.id, "lo": sorted(o.id for o in self.lo)}


@dataclass
class Conformance:
    conforms: bool
    violations: list

    def to_json(self) -> dict:
        return {"conforms": self.conforms, "violations": [v.to_json() for v in self.violations]}


def check_conformance(log: Ocel, relations: Iterable) -> Conformance:
    """List every object breaking one of the given relationships.

    Unlike mining, this is strict: a many-side object listed in the log but
    occurring in no event meets no one-side object and is a violation. A
    relationship between types without objects holds vacuously.
    """
    violations = []
    for many, one in dict.fromkeys(tuple(r) for r in relations):
        pair = (many, one)
        for o in log.objects_of(many):
            partners = _partners(log, o, one)
            if len(partners) != 1:
                violations.append(LinkViolation(pair, o, partners))
        for o in log.objects_of(one):
            partners = _partners(log, o, many)
            if not partners:
                violations.append(LinkViolation(pair, o, partners))
    return Conformance(not violations, violations)
