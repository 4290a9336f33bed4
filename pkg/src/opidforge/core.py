"""Shared vocabulary: objects, variables, inscriptions, tokens, replay results.

Object types are plain strings. An object is an ``Obj(id, type)`` pair, a
token is a tuple of objects and a color is a tuple of type names.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Mapping, NamedTuple, Optional

NORMAL = "normal"
LIST = "list"
FRESH = "fresh"
VARIABLE_KINDS = (NORMAL, LIST, FRESH)

DEFAULT_BUDGET = 10**6

Color = tuple  # tuple[str, ...]
Token = tuple  # tuple[Obj, ...]


class Obj(NamedTuple):
    id: str
    type: str

    def __str__(self):
        return self.id


class Variable(NamedTuple):
    kind: str
    type: str
    name: str

    def __str__(self):
        return self.name


_PREFIX = {NORMAL: "x_", LIST: "X_", FRESH: "nu_"}


def var(kind: str, type_: str) -> Variable:
    """Canonical variable of ``kind`` over ``type_`` (``x_T``, ``X_T``, ``nu_T``).

    The kind prefixes are pairwise distinct, so two canonical variables
    share a name only if they share kind and type.
    """
    if kind not in _PREFIX:
        raise ValueError(f"unknown variable kind {kind!r}")
    return Variable(kind, type_, _PREFIX[kind] + type_)


def normal_var(type_: str) -> Variable:
    return var(NORMAL, type_)


def list_var(type_: str) -> Variable:
    return var(LIST, type_)


def fresh_var(type_: str) -> Variable:
    return var(FRESH, type_)


@dataclass(frozen=True)
class Inscription:
    vars: tuple

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise ValueError("inscription needs at least one variable")
        for v in self.vars:
            if not isinstance(v, Variable) or v.kind not in VARIABLE_KINDS:
                raise ValueError(f"not a variable: {v!r}")
        if sum(v.kind == LIST for v in self.vars) > 1:
            raise ValueError("inscription may contain at most one list variable")

    @property
    def color(self) -> Color:
        return color_of(self)

    @property
    def is_template(self) -> bool:
        return any(v.kind == LIST for v in self.vars)

    @property
    def list_position(self) -> Optional[int]:
        for i, v in enumerate(self.vars):
            if v.kind == LIST:
                return i
        return None

    def __str__(self):
        return "⟨" + ",".join(v.name for v in self.vars) + "⟩"


def ins(*variables: Variable) -> Inscription:
    return Inscription(tuple(variables))


def color_of(inscription: Inscription) -> Color:
    # list variables contribute their element type
    return tuple(v.type for v in inscription.vars)


def token_color(token: Token) -> Color:
    return tuple(o.type for o in token)


def default_budget() -> int:
    raw = os.environ.get("OPIDFORGE_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_BUDGET


class Step(NamedTuple):
    """One fired transition of a run with its binding."""

    transition: str
    binding: Mapping[Any, Any]


@dataclass(frozen=True)
class Failure:
    reason: str
    event_index: Optional[int] = None
    details: tuple = ()


@dataclass
class ReplayResult:
    accepted: bool
    failure: Optional[Failure] = None
    trace: tuple = ()
    links: dict = field(default_factory=dict)
    states: int = 0

    @property
    def budget_exhausted(self) -> bool:
        return self.failure is not None and self.failure.reason == "budget-exhausted"


def binding_to_json(binding: Mapping) -> dict:
    out = {}
    for key, value in binding.items():
        name = key.name if isinstance(key, Variable) else str(key)
        if isinstance(value, Obj):
            out[name] = value.id
        else:
            out[name] = sorted(o.id for o in value) if isinstance(value, frozenset) else [o.id for o in value]
    return out


def result_to_json(result: ReplayResult) -> dict:
    failure = None
    if result.failure is not None:
        failure = {
            "reason": result.failure.reason,
            "eventIndex": result.failure.event_index,
            "details": list(result.failure.details),
        }
    return {
        "accepted": result.accepted,
        "failure": failure,
        "trace": [
            {"transition": s.transition, "binding": binding_to_json(s.binding)}
            for s in result.trace
        ],
        "links": {
            f"{m}->{o}": [list(pair) for pair in pairs]
            for (m, o), pairs in sorted(result.links.items())
        },
        "states": result.states,
    }
