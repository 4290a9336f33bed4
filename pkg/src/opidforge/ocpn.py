"""Object-centric Petri nets: structure, firing and log replay.

Markings are frozensets of ``(place_id, Obj)`` pairs; every place holds an
object at most once.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .core import Failure, Obj, ReplayResult, Step, default_budget
from .errors import InvalidBinding, InvalidOcpn, NotEnabled, UnknownType
from .ocel import Ocel


@dataclass(frozen=True)
class Place:
    id: str
    type: str
    play: bool = False
    stop: bool = False


@dataclass(frozen=True)
class Transition:
    id: str
    label: Optional[str] = None  # None marks a silent transition

    @property
    def silent(self) -> bool:
        return self.label is None


@dataclass(frozen=True)
class Flow:
    source: str
    target: str
    variable: bool = False


@dataclass(frozen=True)
class Violation:
    kind: str
    element: str
    message: str = ""

    def __str__(self):
        return f"{self.kind}({self.element})" + (f": {self.message}" if self.message else "")


class Ocpn:
    """An object-centric Petri net with play and stop places per type."""

    def __init__(self, types: Iterable[str], places: Iterable[Place],
                 transitions: Iterable[Transition], flows: Iterable[Flow]):
        self.types = tuple(dict.fromkeys(types))
        self.places = {p.id: p for p in places}
        self.transitions = {t.id: t for t in transitions}
        self.flows = tuple(dict.fromkeys(flows))
        self._pre = defaultdict(list)
        self._post = defaultdict(list)
        for f in self.flows:
            if f.source in self.places and f.target in self.transitions:
                self._pre[f.target].append(f)
            elif f.source in self.transitions and f.target in self.places:
                self._post[f.source].append(f)

    def __repr__(self):
        return f"Ocpn(places={len(self.places)}, transitions={len(self.transitions)}, flows={len(self.flows)})"

    def __eq__(self, other):
        if not isinstance(other, Ocpn):
            return NotImplemented
        return (set(self.types) == set(other.types) and self.places == other.places
                and self.transitions == other.transitions and set(self.flows) == set(other.flows))

    def preset(self, t: str) -> list:
        return [self.places[f.source] for f in self._pre.get(t, ())]

    def postset(self, t: str) -> list:
        return [self.places[f.target] for f in self._post.get(t, ())]

    def in_flows(self, t: str) -> list:
        return list(self._pre.get(t, ()))

    def out_flows(self, t: str) -> list:
        return list(self._post.get(t, ()))

    def tpl(self, t: str) -> set:
        return self.tpl_var(t) | self.tpl_nv(t)

    def tpl_var(self, t: str) -> set:
        return {self._flow_type(f) for f in self._flows_of(t) if f.variable}

    def tpl_nv(self, t: str) -> set:
        return {self._flow_type(f) for f in self._flows_of(t) if not f.variable}

    def _flows_of(self, t):
        return itertools.chain(self._pre.get(t, ()), self._post.get(t, ()))

    def _flow_type(self, f: Flow) -> str:
        pid = f.source if f.source in self.places else f.target
        return self.places[pid].type

    def play_place(self, type_: str) -> Place:
        return self._unique(type_, "play")

    def stop_place(self, type_: str) -> Place:
        return self._unique(type_, "stop")

    def _unique(self, type_, attr):
        found = [p for p in self.places.values() if p.type == type_ and getattr(p, attr)]
        if len(found) != 1:
            raise UnknownType(f"type {type_} has {len(found)} {attr} places")
        return found[0]

    def labelled(self, label: str) -> list:
        return [t for t in self.transitions.values() if t.label == label]

    @property
    def silent_transitions(self) -> list:
        return [t for t in self.transitions.values() if t.silent]


def validate(net: Ocpn) -> list:
    """Hard structural violations; an empty list means the net is usable."""
    out = []
    node_ids = set(net.places) | set(net.transitions)
    for pid in sorted(set(net.places) & set(net.transitions)):
        out.append(Violation("duplicate-id", pid, "used by a place and a transition"))
    for p in net.places.values():
        if p.type not in net.types:
            out.append(Violation("unknown-type", p.id, f"type {p.type} not declared"))
    for f in net.flows:
        for end in (f.source, f.target):
            if end not in node_ids:
                out.append(Violation("unknown-node", end, f"flow {f.source}->{f.target}"))
        if (f.source in net.places) == (f.target in net.places) and f.source in node_ids and f.target in node_ids:
            out.append(Violation("non-bipartite", f"{f.source}->{f.target}"))
    seen = {}
    for f in net.flows:
        key = (f.source, f.target)
        if key in seen and seen[key] != f.variable:
            out.append(Violation("conflicting-flow", f"{f.source}->{f.target}", "variable and non-variable"))
        seen[key] = f.variable
    for t in sorted(net.transitions):
        clash = net.tpl_var(t) & net.tpl_nv(t)
        if clash:
            out.append(Violation("well-formedness", t, f"variable and non-variable flows for {sorted(clash)}"))
    for type_ in net.types:
        for attr in ("play", "stop"):
            n = sum(1 for p in net.places.values() if p.type == type_ and getattr(p, attr))
            if n != 1:
                out.append(Violation(f"{attr}-place-cardinality", type_, f"{n} {attr} places"))
    return out


def soundness_warnings(net: Ocpn) -> list:
    """Places not on a same-type path from the play place to the stop place.

    The per-type components are assumed to be workflow nets; this is only
    checked as connectivity and reported as warnings.
    """
    succ = defaultdict(set)
    for t in net.transitions:
        for p in net.preset(t):
            for q in net.postset(t):
                if p.type == q.type:
                    succ[p.id].add(q.id)
    pred = defaultdict(set)
    for a, bs in succ.items():
        for b in bs:
            pred[b].add(a)

    def reach(start, graph):
        seen, todo = {start}, [start]
        while todo:
            for nxt in graph[todo.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return seen

    out = []
    for type_ in net.types:
        plays = [p for p in net.places.values() if p.type == type_ and p.play]
        stops = [p for p in net.places.values() if p.type == type_ and p.stop]
        if len(plays) != 1 or len(stops) != 1:
            continue
        fwd = reach(plays[0].id, succ)
        bwd = reach(stops[0].id, pred)
        for p in net.places.values():
            if p.type != type_:
                continue
            if p.id not in fwd:
                out.append(Violation("unreachable-place", p.id, f"not reachable from play place of {type_}"))
            if p.id not in bwd:
                out.append(Violation("dead-end-place", p.id, f"cannot reach stop place of {type_}"))
    return out


@dataclass(frozen=True)
class BindingExecution:
    transition: str
    binding: Mapping  # type -> frozenset of Obj

    def codom(self) -> frozenset:
        return frozenset().union(*self.binding.values()) if self.binding else frozenset()


def check_binding(net: Ocpn, t: str, b: Mapping) -> dict:
    if t not in net.transitions:
        raise InvalidBinding(f"unknown transition {t}")
    b = {k: frozenset(v) for k, v in b.items()}
    if set(b) != net.tpl(t):
        raise InvalidBinding(f"binding types {sorted(b)} != {sorted(net.tpl(t))} for {t}")
    for type_, objs in b.items():
        if not objs:
            raise InvalidBinding(f"empty object set for {type_} at {t}")
        if type_ in net.tpl_nv(t) and len(objs) != 1:
            raise InvalidBinding(f"{t} binds exactly one {type_}, got {len(objs)}")
        for o in objs:
            if o.type != type_:
                raise InvalidBinding(f"object {o.id} is not of type {type_}")
    return b


def cons_prod(net: Ocpn, t: str, b: Mapping) -> tuple:
    b = check_binding(net, t, b)
    cons = frozenset((p.id, o) for p in net.preset(t) for o in b[p.type])
    prod = frozenset((p.id, o) for p in net.postset(t) for o in b[p.type])
    return cons, prod


def fire(net: Ocpn, marking: frozenset, t: str, b: Mapping) -> frozenset:
    cons, prod = cons_prod(net, t, b)
    if not cons <= marking:
        missing = sorted(f"{p}:{o.id}" for p, o in cons - marking)
        raise NotEnabled(f"{t} not enabled, missing {missing}")
    return (marking - cons) | prod


def initial_marking(net: Ocpn, objects: Iterable[Obj]) -> frozenset:
    return frozenset((net.play_place(o.type).id, o) for o in objects)


def final_marking(net: Ocpn, objects: Iterable[Obj]) -> frozenset:
    return frozenset((net.stop_place(o.type).id, o) for o in objects)


def event_binding(net: Ocpn, t: str, objects: frozenset) -> Optional[dict]:
    """Partition an event's objects by type into a binding for ``t``, if valid."""
    b = defaultdict(set)
    for o in objects:
        b[o.type].add(o)
    if set(b) != net.tpl(t):
        return None
    nv = net.tpl_nv(t)
    if any(len(b[s]) != 1 for s in nv):
        return None
    return {s: frozenset(v) for s, v in b.items()}


def enabled_bindings(net: Ocpn, marking: frozenset, t: str, universe: Iterable[Obj] = ()):
    """Yield every binding of ``t`` enabled in ``marking``.

    Types produced but not consumed by ``t`` range over ``universe``.
    """
    present = defaultdict(set)
    for pid, o in marking:
        present[pid].add(o)
    pools = {}
    by_type = defaultdict(list)
    for p in net.preset(t):
        by_type[p.type].append(p.id)
    for type_ in sorted(net.tpl(t)):
        if by_type[type_]:
            pool = set.intersection(*(present[pid] for pid in by_type[type_]))
        else:
            pool = {o for o in universe if o.type == type_}
        pools[type_] = sorted(pool)
    var = net.tpl_var(t)
    choices = []
    for type_, pool in pools.items():
        if type_ in var:
            subsets = [frozenset(c) for k in range(1, len(pool) + 1)
                       for c in itertools.combinations(pool, k)]
        else:
            subsets = [frozenset([o]) for o in pool]
        if not subsets:
            return
        choices.append([(type_, s) for s in subsets])
    for combo in itertools.product(*choices):
        yield dict(combo)


class _Budget(Exception):
    pass


def _local_silent(net: Ocpn) -> Optional[list]:
    """The silent transitions, if each of them touches a single type."""
    silent = net.silent_transitions
    if all(len(net.tpl(t.id)) == 1 for t in silent):
        return silent
    return None


def _finish(net: Ocpn, places: frozenset, o: Obj, silent: list, memo: dict) -> Optional[list]:
    """Silent moves taking the tokens of ``o`` from ``places`` to its stop place."""
    key = (o.type, places)
    if key not in memo:
        goal = frozenset([net.stop_place(o.type).id])
        own = [t for t in silent if net.tpl(t.id) == {o.type}]
        parent = {places: None}
        queue = deque([places])
        found = None
        while queue:
            cur = queue.popleft()
            if cur == goal:
                found = cur
                break
            for t in own:
                pre = {p.id for p in net.preset(t.id)}
                if not pre <= cur:
                    continue
                nxt = (cur - pre) | {p.id for p in net.postset(t.id)}
                if nxt not in parent:
                    parent[nxt] = (cur, t.id)
                    queue.append(nxt)
        path = None
        if found is not None:
            path = []
            while parent[found] is not None:
                found, tid = parent[found]
                path.append(tid)
            path.reverse()
        memo[key] = path
    path = memo[key]
    if path is None:
        return None
    return [Step(tid, {o.type: frozenset([o])}) for tid in path]


def replay(net: Ocpn, log: Ocel, budget: Optional[int] = None) -> ReplayResult:
    """Decide whether ``log`` is an accepted run of ``net``.

    Each event must fire one transition carrying its activity with the
    event's objects partitioned by type; any number of silent firings may
    happen between events. The search is a breadth-first exploration of
    the silent closure with memoized markings.

    When every silent transition touches a single type, a silent firing
    only moves its own objects and can be split per object and postponed
    until that object's next event. The closure before an event then only
    moves the event's objects, and after the last event each object is
    walked to its stop place on its own.
    """
    problems = validate(net)
    if problems:
        raise InvalidOcpn("net is not a valid OCPN", problems)
    budget = default_budget() if budget is None else budget
    try:
        start = initial_marking(net, log.objects)
        goal = final_marking(net, log.objects)
    except UnknownType as exc:
        return ReplayResult(False, Failure("unknown-type", None, (str(exc),)))
    universe = sorted(log.objects)
    local = _local_silent(net)
    silent = net.silent_transitions
    layers = []
    count = [1]

    def bindings(m, t, focus):
        if focus is None:
            yield from enabled_bindings(net, m, t.id, universe)
            return
        type_ = next(iter(net.tpl(t.id)))
        for o in focus:
            if o.type == type_:
                b = {type_: frozenset([o])}
                if cons_prod(net, t.id, b)[0] <= m:
                    yield b

    def closure(frontier: dict, focus) -> dict:
        layer = dict(frontier)
        queue = deque(frontier)
        while queue:
            m = queue.popleft()
            for t in silent:
                for b in bindings(m, t, focus):
                    m2 = fire(net, m, t.id, b)
                    if m2 not in layer:
                        count[0] += 1
                        if count[0] > budget:
                            raise _Budget()
                        layer[m2] = (len(layers), m, Step(t.id, b))
                        queue.append(m2)
        return layer

    def focus_of(i):
        if local is None:
            return None
        return sorted(log.events[i].objects) if i < len(log.events) else []

    try:
        layers.append(closure({start: None}, focus_of(0)))
        for i, e in enumerate(log.events):
            candidates = net.labelled(e.activity)
            if not candidates:
                return ReplayResult(False, Failure("unknown-activity", i, (e.activity,)), states=count[0])
            frontier = {}
            for m in layers[-1]:
                for t in candidates:
                    b = event_binding(net, t.id, e.objects)
                    if b is None:
                        continue
                    cons, prod = cons_prod(net, t.id, b)
                    if cons <= m:
                        m2 = (m - cons) | prod
                        if m2 not in frontier:
                            count[0] += 1
                            if count[0] > budget:
                                raise _Budget()
                            frontier[m2] = (len(layers) - 1, m, Step(t.id, b))
            if not frontier:
                return ReplayResult(False, Failure("no-enabled-binding", i, (e.id,)), states=count[0])
            layers.append(closure(frontier, focus_of(i + 1)))
    except _Budget:
        return ReplayResult(False, Failure("budget-exhausted", None, (budget,)), states=count[0])
    if local is None:
        if goal not in layers[-1]:
            return ReplayResult(False, Failure("final-marking-not-reached", len(log.events)), states=count[0])
        return ReplayResult(True, None, tuple(_backtrack(layers, goal)), states=count[0])
    memo = {}
    for m in layers[-1]:
        where = defaultdict(set)
        for pid, o in m:
            where[o].add(pid)
        tail = []
        for o in universe:
            steps = _finish(net, frozenset(where[o]), o, local, memo)
            if steps is None:
                break
            tail += steps
        else:
            return ReplayResult(True, None, tuple(_backtrack(layers, m) + tail), states=count[0])
    return ReplayResult(False, Failure("final-marking-not-reached", len(log.events)), states=count[0])


def _backtrack(layers: list, marking) -> list:
    steps = []
    k = len(layers) - 1
    entry = layers[k][marking]
    while entry is not None:
        k, marking, step = entry
        steps.append(step)
        entry = layers[k][marking]
    steps.reverse()
    return steps
