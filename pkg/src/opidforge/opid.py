"""Object-centric Petri nets with identifiers.

Markings are frozensets of ``(place_id, token)`` pairs where a token is a
tuple of ``Obj``. Bindings map ``Variable`` to an ``Obj`` (normal and fresh
variables) or to a tuple of ``Obj`` (list variables).
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .core import (
    FRESH,
    LIST,
    Failure,
    Inscription,
    Obj,
    ReplayResult,
    Step,
    Variable,
    default_budget,
    fresh_var,
    list_var,
    normal_var,
    token_color,
)
from .errors import NotEnabled, NotT1Net, NotTRNet, TypeMismatch, UnboundVariable
from .ocel import Ocel
from .ocpn import Violation

# place roles
CORE = "core"
PLAY = "play"
STOP = "stop"
LINK = "link"
BEFORE = "before"
AFTER = "after"
# transition roles (CORE and LINK are shared with places)
EMIT = "emit"
CONSUME = "consume"
PRE_EMIT = "pre_emit"

PLACE_ROLES = (CORE, PLAY, STOP, LINK, BEFORE, AFTER)
TRANSITION_ROLES = (CORE, EMIT, CONSUME, PRE_EMIT, LINK)


@dataclass(frozen=True)
class OPlace:
    id: str
    color: tuple
    role: str = CORE
    # relationship (many, one) for link/before/after places
    rel: Optional[tuple] = None


@dataclass(frozen=True)
class OTransition:
    id: str
    label: Optional[str] = None
    role: str = CORE
    # object type handled by emit/consume/pre_emit transitions
    otype: Optional[str] = None
    rel: Optional[tuple] = None

    @property
    def silent(self) -> bool:
        return self.label is None


class Opid:
    def __init__(self, types: Iterable[str], places: Iterable[OPlace],
                 transitions: Iterable[OTransition], fin: Mapping, fout: Mapping,
                 relations: Iterable = ()):
        self.types = tuple(dict.fromkeys(types))
        self.places = {p.id: p for p in places}
        self.transitions = {t.id: t for t in transitions}
        self.fin = dict(fin)    # (place, transition) -> Inscription
        self.fout = dict(fout)  # (transition, place) -> Inscription
        self.relations = tuple(tuple(r) for r in relations)
        self._pre = defaultdict(list)
        self._post = defaultdict(list)
        for (p, t), i in self.fin.items():
            self._pre[t].append((p, i))
        for (t, p), i in self.fout.items():
            self._post[t].append((p, i))
        self._invars = {t: frozenset(v for _, i in self._pre[t] for v in i.vars) for t in self.transitions}
        self._outvars = {t: frozenset(v for _, i in self._post[t] for v in i.vars) for t in self.transitions}

    def __repr__(self):
        return (f"Opid(places={len(self.places)}, transitions={len(self.transitions)}, "
                f"arcs={len(self.fin) + len(self.fout)})")

    def __eq__(self, other):
        if not isinstance(other, Opid):
            return NotImplemented
        return (set(self.types) == set(other.types) and self.places == other.places
                and self.transitions == other.transitions and self.fin == other.fin
                and self.fout == other.fout and set(self.relations) == set(other.relations))

    def pre(self, t: str) -> list:
        return self._pre.get(t, [])

    def post(self, t: str) -> list:
        return self._post.get(t, [])

    def invars(self, t: str) -> frozenset:
        return self._invars[t]

    def outvars(self, t: str) -> frozenset:
        return self._outvars[t]

    @property
    def kind(self) -> Optional[str]:
        """``"tR"``, ``"t1"`` or None, read off the role tags."""
        roles = {t.role for t in self.transitions.values()}
        if LINK in roles or PRE_EMIT in roles:
            return "tR"
        if EMIT in roles:
            return "t1"
        return None

    def by_role(self, role: str, otype: str = None, rel=None) -> list:
        return [t for t in self.transitions.values() if t.role == role
                and (otype is None or t.otype == otype) and (rel is None or t.rel == tuple(rel))]

    def places_with_role(self, role: str) -> list:
        return [p for p in self.places.values() if p.role == role]


def validate_opid(net: Opid) -> list:
    out = []
    for (p, t), i in net.fin.items():
        if p not in net.places or t not in net.transitions:
            out.append(Violation("unknown-node", f"{p}->{t}"))
            continue
        if i.color != net.places[p].color:
            out.append(Violation("color-mismatch", f"{p}->{t}", f"{i} vs {net.places[p].color}"))
    for (t, p), i in net.fout.items():
        if p not in net.places or t not in net.transitions:
            out.append(Violation("unknown-node", f"{t}->{p}"))
            continue
        if i.color != net.places[p].color:
            out.append(Violation("color-mismatch", f"{t}->{p}", f"{i} vs {net.places[p].color}"))
    for t in net.transitions:
        inv, outv = net.invars(t), net.outvars(t)
        if any(v.kind == FRESH for v in inv):
            out.append(Violation("fresh-input", t, "fresh variable on an input flow"))
        stray = [v.name for v in outv if v.kind != FRESH and v not in inv]
        if stray:
            out.append(Violation("unbound-output", t, f"output variables {sorted(stray)} not read"))
    for p in net.places.values():
        for s in p.color:
            if s not in net.types:
                out.append(Violation("unknown-type", p.id, s))
    return out


def marking(contents: Mapping) -> frozenset:
    """Build a marking from ``{place: iterable of tokens}``."""
    return frozenset((p, tuple(tok)) for p, toks in contents.items() for tok in toks)


def tokens_at(m: frozenset, place: str) -> set:
    return {tok for p, tok in m if p == place}


def as_dict(m: frozenset) -> dict:
    out = defaultdict(set)
    for p, tok in m:
        out[p].add(tok)
    return dict(out)


def check_marking(net: Opid, m: frozenset) -> list:
    return [f"{p}:{tok}" for p, tok in m if token_color(tok) != net.places[p].color]


def extend_binding(beta: Mapping, inscription: Inscription) -> frozenset:
    """The set of tokens an inscription denotes under ``beta``."""
    values = []
    for v in inscription.vars:
        if v not in beta:
            raise UnboundVariable(v.name)
        value = beta[v]
        if v.kind == LIST:
            if isinstance(value, Obj) or not all(isinstance(o, Obj) for o in value):
                raise TypeMismatch(f"{v.name} needs a list of objects")
            if any(o.type != v.type for o in value):
                raise TypeMismatch(f"{v.name} bound to objects of another type")
        else:
            if not isinstance(value, Obj):
                raise TypeMismatch(f"{v.name} needs a single object")
            if value.type != v.type:
                raise TypeMismatch(f"{v.name} bound to {value.id} of type {value.type}")
        values.append(value)
    pos = inscription.list_position
    if pos is None:
        return frozenset([tuple(values)])
    return frozenset(tuple(values[:pos]) + (u,) + tuple(values[pos + 1:]) for u in values[pos])


def codom(beta: Mapping) -> frozenset:
    out = set()
    for value in beta.values():
        if isinstance(value, Obj):
            out.add(value)
        else:
            out.update(value)
    return frozenset(out)


def _objects_in(m: frozenset) -> set:
    return {o for _, tok in m for o in tok}


def enabled(net: Opid, m: frozenset, t: str, beta: Mapping) -> bool:
    fresh = [v for v in net.outvars(t) if v.kind == FRESH]
    if fresh:
        chosen = [beta.get(v) for v in fresh]
        if None in chosen:
            raise UnboundVariable(",".join(v.name for v in fresh if v not in beta))
        if len(set(chosen)) != len(chosen):
            return False
        if _objects_in(m) & set(chosen):
            return False
    for p, i in net.pre(t):
        for tok in extend_binding(beta, i):
            if (p, tok) not in m:
                return False
    # output inscriptions must be well-typed as well
    for _, i in net.post(t):
        extend_binding(beta, i)
    return True


def fire_opid(net: Opid, m: frozenset, t: str, beta: Mapping) -> frozenset:
    """Fire ``t`` under ``beta``.

    Places in both the pre- and postset first lose their consumed tokens
    and then gain the produced ones; with set-valued markings the uniform
    ``M - consumed | produced`` realises all three cases.
    """
    if not enabled(net, m, t, beta):
        raise NotEnabled(f"{t} not enabled")
    removed = {(p, tok) for p, i in net.pre(t) for tok in extend_binding(beta, i)}
    added = {(p, tok) for p, i in net.post(t) for tok in extend_binding(beta, i)}
    return (m - removed) | added


def marking_bindings(net: Opid, m: frozenset, t: str, fixed: Mapping = None):
    """Yield enabled bindings of ``t`` whose values are read off ``m``.

    Every input variable ranges over the objects found at its position in
    the tokens of the places it reads; list variables range over non-empty
    subsets in ascending id order. Fresh variables must be supplied in
    ``fixed``.
    """
    fixed = dict(fixed or {})
    pools = {}
    for p, i in net.pre(t):
        here = tokens_at(m, p)
        for pos, v in enumerate(i.vars):
            if v in fixed:
                continue
            found = {tok[pos] for tok in here}
            pools[v] = pools[v] & found if v in pools else found
    for v in net.outvars(t):
        if v not in fixed and v not in pools:
            return
    names = sorted(pools, key=lambda v: (v.kind, v.type, v.name))
    choices = []
    for v in names:
        pool = sorted(pools[v])
        if v.kind == LIST:
            opts = [c for k in range(1, len(pool) + 1) for c in itertools.combinations(pool, k)]
        else:
            opts = pool
        if not opts:
            return
        choices.append(opts)
    for combo in itertools.product(*choices):
        beta = dict(fixed)
        beta.update(zip(names, combo))
        if enabled(net, m, t, beta):
            yield beta


def event_bindings(net: Opid, t: str, objects: frozenset):
    """Bindings of ``t`` whose codomain is exactly ``objects``.

    List variables take all objects of their type in ascending id order; a
    normal variable takes the single object of its type, or any one of them
    when the transition also has a list variable of that type.
    """
    grouped = defaultdict(list)
    for o in sorted(objects):
        grouped[o.type].append(o)
    variables = net.invars(t) | net.outvars(t)
    if any(v.kind == FRESH for v in variables):
        return
    if {v.type for v in variables} != set(grouped):
        return
    listed = {v.type for v in variables if v.kind == LIST}
    base = {}
    free = []
    for v in sorted(variables, key=lambda v: (v.kind, v.type)):
        objs = grouped[v.type]
        if v.kind == LIST:
            base[v] = tuple(objs)
        elif v.type in listed:
            free.append(v)
        elif len(objs) == 1:
            base[v] = objs[0]
        else:
            return
    for combo in itertools.product(*(grouped[v.type] for v in free)):
        beta = dict(base)
        beta.update(zip(free, combo))
        yield beta


class _Budget(Exception):
    pass


def _objects_outside(net: Opid, log: Ocel) -> list:
    return sorted(o.id for o in log.objects if o.type not in net.types)


def _local_variable(net: Opid, t: str) -> Optional[Variable]:
    """The one variable of ``t`` if every arc of ``t`` carries just it."""
    arcs = net.pre(t) + net.post(t)
    variables = {v for _, i in arcs for v in i.vars}
    if len(variables) != 1 or not arcs:
        return None
    v = next(iter(variables))
    if v.kind == FRESH or any(i.vars != (v,) for _, i in arcs):
        return None
    return v


def _single(v: Variable, o: Obj):
    return (o,) if v.kind == LIST else o


def _finish(net: Opid, m: frozenset, o: Obj, local: dict, memo: dict) -> Optional[list]:
    """Silent core steps moving the tokens of ``o`` onto its stop place."""
    places = frozenset(p for p, tok in m if tok == (o,))
    key = (o.type, places)
    if key not in memo:
        stops = frozenset(p.id for p in net.places_with_role(STOP) if p.color == (o.type,))
        own = [(tid, v) for tid, v in local.items() if v.type == o.type]
        parent = {places: None}
        queue = deque([places])
        found = None
        while queue:
            cur = queue.popleft()
            if len(cur) == 1 and cur <= stops:
                found = cur
                break
            for tid, v in own:
                pre = {p for p, _ in net.pre(tid)}
                if not pre <= cur:
                    continue
                nxt = (cur - pre) | {p for p, _ in net.post(tid)}
                if nxt not in parent:
                    parent[nxt] = (cur, tid)
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
    return [Step(tid, {local[tid]: _single(local[tid], o)}) for tid in path]


def _walk_home(net: Opid, m: frozenset, objects: list, local: dict, memo: dict) -> Optional[list]:
    moves = []
    for o in objects:
        steps = _finish(net, m, o, local, memo)
        if steps is None:
            return None
        moves += steps
    return moves


def _structured_replay(net: Opid, log: Ocel, prologue: list, budget: Optional[int],
                       links: dict = None) -> ReplayResult:
    budget = default_budget() if budget is None else budget
    m = frozenset()
    head = []
    for tid, beta in prologue:
        m = fire_opid(net, m, tid, beta)
        head.append(Step(tid, beta))
    silent = [t for t in net.transitions.values() if t.role == CORE and t.silent]
    # silent steps that move one object at a time can wait for that object's next event
    local = {t.id: _local_variable(net, t.id) for t in silent}
    if None in local.values():
        local = None
    layers = []
    count = [1]

    def bindings(cur, t, focus):
        if focus is None:
            yield from marking_bindings(net, cur, t.id)
            return
        v = local[t.id]
        for o in focus:
            if o.type == v.type:
                beta = {v: _single(v, o)}
                if enabled(net, cur, t.id, beta):
                    yield beta

    def closure(frontier: dict, focus) -> dict:
        layer = dict(frontier)
        queue = deque(frontier)
        while queue:
            cur = queue.popleft()
            for t in silent:
                for beta in bindings(cur, t, focus):
                    nxt = fire_opid(net, cur, t.id, beta)
                    if nxt not in layer:
                        count[0] += 1
                        if count[0] > budget:
                            raise _Budget()
                        layer[nxt] = (len(layers), cur, Step(t.id, beta))
                        queue.append(nxt)
        return layer

    def focus_of(i):
        if local is None:
            return None
        return sorted(log.events[i].objects) if i < len(log.events) else []

    def done(result: ReplayResult) -> ReplayResult:
        result.links = links or {}
        result.states = count[0]
        return result

    try:
        layers.append(closure({m: None}, focus_of(0)))
        for idx, e in enumerate(log.events):
            candidates = [t for t in net.transitions.values() if t.role == CORE and t.label == e.activity]
            if not candidates:
                return done(ReplayResult(False, Failure("unknown-activity", idx, (e.activity,))))
            frontier = {}
            for cur in layers[-1]:
                for t in candidates:
                    for beta in event_bindings(net, t.id, e.objects):
                        if not enabled(net, cur, t.id, beta):
                            continue
                        nxt = fire_opid(net, cur, t.id, beta)
                        if nxt not in frontier:
                            count[0] += 1
                            if count[0] > budget:
                                raise _Budget()
                            frontier[nxt] = (len(layers) - 1, cur, Step(t.id, beta))
            if not frontier:
                return done(ReplayResult(False, Failure("no-enabled-binding", idx, (e.id,))))
            layers.append(closure(frontier, focus_of(idx + 1)))
    except _Budget:
        return done(ReplayResult(False, Failure("budget-exhausted", None, (budget,))))
    memo = {}
    for cur in layers[-1]:
        moves = _walk_home(net, cur, sorted(log.objects), local, memo) if local is not None else []
        if moves is None:
            continue
        end = cur
        for step in moves:
            end = fire_opid(net, end, step.transition, step.binding)
        tail = _collapse(net, end)
        if tail is not None:
            body = _backtrack(layers, cur)
            return done(ReplayResult(True, None, tuple(head + body + moves + tail)))
    return done(ReplayResult(False, Failure("final-marking-not-reached", len(log.events))))


def _collapse(net: Opid, m: frozenset) -> Optional[list]:
    """Consume every object on a stop place; None unless that empties ``m``."""
    for p, _ in m:
        if net.places[p].role not in (STOP, LINK):
            return None
    steps = []
    for p, tok in sorted(m, key=lambda pt: (pt[0], pt[1])):
        if net.places[p].role != STOP:
            continue
        o = tok[0]
        consumers = net.by_role(CONSUME, otype=o.type)
        if not consumers:
            return None
        t = consumers[0].id
        beta = next(marking_bindings(net, m, t, {normal_var(o.type): o}), None)
        if beta is None:
            return None
        m = fire_opid(net, m, t, beta)
        steps.append(Step(t, beta))
    return steps if not m else None


def _backtrack(layers: list, m) -> list:
    steps = []
    k = len(layers) - 1
    entry = layers[k][m]
    while entry is not None:
        k, m, step = entry
        steps.append(step)
        entry = layers[k][m]
    steps.reverse()
    return steps


def _require_emitters(net: Opid, types: Iterable[str], error) -> None:
    for s in types:
        if len(net.by_role(EMIT, otype=s)) != 1 or len(net.by_role(CONSUME, otype=s)) != 1:
            raise error(f"net lacks emitting/consuming transitions for {s}")


def replay_t1(net: Opid, log: Ocel, budget: Optional[int] = None) -> ReplayResult:
    """Replay ``log`` on a net produced by ``transform.t1``.

    Every log object is emitted first, the events are replayed with silent
    core steps in between, and the objects are finally consumed from the
    stop places; the log is accepted iff the empty marking is reached.
    """
    if net.kind != "t1":
        raise NotT1Net(f"expected a t1 net, got {net.kind}")
    _require_emitters(net, net.types, NotT1Net)
    outside = _objects_outside(net, log)
    if outside:
        return ReplayResult(False, Failure("unknown-type", None, tuple(outside)))
    prologue = [(net.by_role(EMIT, otype=o.type)[0].id, {fresh_var(o.type): o}) for o in sorted(log.objects)]
    return _structured_replay(net, log, prologue, budget)


def infer_links(log: Ocel, relations: Iterable) -> tuple:
    """Links each relationship requires, derived from co-occurrence in ``log``.

    Returns ``(links, violations)``. ``links`` maps each pair to
    ``{one_side_object: [many_side_objects]}``; ``violations`` lists every
    many-side object without exactly one partner and every one-side object
    without any partner, each as ``(pair, object, partners)``.
    """
    links = {}
    violations = []
    for many, one in relations:
        pair = (many, one)
        groups = defaultdict(list)
        for o_m in log.objects_of(many):
            partners = log.cooccurrence.get(o_m, {}).get(one, frozenset())
            if len(partners) != 1:
                violations.append((pair, o_m, partners))
            else:
                groups[next(iter(partners))].append(o_m)
        for o_o in log.objects_of(one):
            partners = log.cooccurrence.get(o_o, {}).get(many, frozenset())
            if not partners:
                violations.append((pair, o_o, partners))
        links[pair] = {o_o: sorted(ms) for o_o, ms in groups.items()}
    return links, violations


def replay_tr(net: Opid, log: Ocel, budget: Optional[int] = None) -> ReplayResult:
    """Replay ``log`` on a net produced by ``transform.tr``.

    The links every relationship needs are read off the log first; when a
    many-side object does not meet exactly one one-side object, or a
    one-side object meets none, the log is rejected with a
    ``link-inference-failed`` diagnostic naming the offending objects.
    Otherwise objects are created, linked in one step per one-side object,
    placed on their play places, and the log is replayed as in
    ``replay_t1`` with the link places constraining every binding.
    """
    if net.kind not in ("t1", "tR"):
        raise NotTRNet(f"expected a tR net, got {net.kind}")
    _require_emitters(net, net.types, NotTRNet)
    outside = _objects_outside(net, log)
    if outside:
        return ReplayResult(False, Failure("unknown-type", None, tuple(outside)))
    relations = net.relations
    related = {s for pair in relations for s in pair}
    links, violations = infer_links(log, relations)
    if violations:
        details = tuple(
            {"pair": list(pair), "object": o.id, "lo": sorted(x.id for x in partners)}
            for pair, o, partners in violations
        )
        return ReplayResult(False, Failure("link-inference-failed", None, details))
    prologue = []
    for o in sorted(log.objects):
        if o.type in related:
            found = net.by_role(PRE_EMIT, otype=o.type)
            if len(found) != 1:
                raise NotTRNet(f"no pre-emitting transition for {o.type}")
            prologue.append((found[0].id, {fresh_var(o.type): o}))
    for many, one in relations:
        found = net.by_role(LINK, rel=(many, one))
        if len(found) != 1:
            raise NotTRNet(f"no link transition for {(many, one)}")
        for o_o, group in sorted(links[(many, one)].items()):
            prologue.append((found[0].id, {normal_var(one): o_o, list_var(many): tuple(group)}))
    for o in sorted(log.objects):
        emit = net.by_role(EMIT, otype=o.type)[0].id
        v = normal_var(o.type) if o.type in related else fresh_var(o.type)
        prologue.append((emit, {v: o}))
    shown = {
        pair: sorted((o_m.id, o_o.id) for o_o, ms in groups.items() for o_m in ms)
        for pair, groups in links.items()
    }
    return _structured_replay(net, log, prologue, budget, shown)


@dataclass
class ExecutionResult:
    accepted: bool
    witness: tuple = ()
    budget_exhausted: bool = False
    states: int = 0


class BoundedExecutor:
    """Exhaustive search for runs from and to the empty marking.

    Bindings are enumerated over the whole object universe rather than read
    off the marking, and fresh variables only take objects never emitted
    before. A run is accepted when its visible firings match the requested
    ``(label, objects)`` sequence and every universe object was emitted.

    Two reductions keep the search small without losing runs. Transitions
    with an empty preset (generators) only fire before any other
    transition: since an object is emitted at most once, a generator's
    tokens are untouched by everything that fires before them, so moving
    the generator to the front yields the same markings. The opening phase
    therefore only ends once every object no later transition can emit has
    been emitted. And a variable on
    an input arc only ranges over the objects at its position in the
    tokens of that place.

    When every other silent transition moves the tokens of one variable
    only, its firings split into single-object firings that commute with
    everything not touching that object. Such firings are then only tried
    for objects of the next visible event, and once all visible firings
    are done objects are moved home one after another in ascending order.
    """

    def __init__(self, net: Opid, universe: Iterable[Obj], max_states: Optional[int] = None,
                 reduce: bool = True):
        self.net = net
        self.universe = frozenset(universe)
        self.max_states = default_budget() if max_states is None else max_states
        self._by_type = defaultdict(list)
        for o in sorted(self.universe):
            self._by_type[o.type].append(o)
        self._transitions = sorted(net.transitions.values(), key=lambda t: t.id)
        self._generators = {t.id for t in self._transitions if reduce and not net.pre(t.id)}
        self._vars = {
            t.id: sorted(net.invars(t.id) | net.outvars(t.id), key=lambda v: (v.kind, v.type, v.name))
            for t in self._transitions
        }
        self._fresh = {t.id: [v for v in net.outvars(t.id) if v.kind == FRESH] for t in self._transitions}
        # types that can still be emitted once the generators are done
        self._late = {v.type for t in self._transitions if t.id not in self._generators for v in self._fresh[t.id]}
        local = {t.id: _local_variable(net, t.id) for t in self._transitions
                 if t.silent and t.id not in self._generators}
        self._local = None if None in local.values() or not reduce else local

    def _domains(self, t: str, pool: Mapping, emitted: frozenset, at: Mapping):
        allowed = {}
        for p, i in self.net.pre(t):
            here = at.get(p, ())
            for pos, v in enumerate(i.vars):
                found = {tok[pos] for tok in here}
                allowed[v] = allowed[v] & found if v in allowed else found
        domains = []
        for v in self._vars[t]:
            objs = pool.get(v.type, [])
            if v.kind == FRESH:
                objs = [o for o in objs if o not in emitted]
            if v in allowed:
                objs = [o for o in objs if o in allowed[v]]
            if v.kind == LIST:
                opts = [c for k in range(1, len(objs) + 1) for c in itertools.combinations(objs, k)]
            else:
                opts = list(objs)
            if not opts:
                return None
            domains.append(opts)
        return domains

    def _successors(self, state, visible):
        idx, m, emitted, opening, cursor = state
        at = as_dict(m)
        final = idx == len(visible)
        for t in self._transitions:
            generator = t.id in self._generators
            if generator and not opening:
                continue
            if opening and not generator and self._generators and any(o.type not in self._late for o in self.universe - emitted):
                continue
            if self._local is not None and t.id in self._local:
                yield from self._local_steps(t.id, state, visible)
                continue
            if t.silent:
                pool, target = self._by_type, None
            elif not final and visible[idx][0] == t.label:
                target = frozenset(visible[idx][1])
                pool = defaultdict(list)
                for o in sorted(target):
                    pool[o.type].append(o)
            else:
                continue
            domains = self._domains(t.id, pool, emitted, at)
            if domains is None:
                continue
            for combo in itertools.product(*domains):
                beta = dict(zip(self._vars[t.id], combo))
                if target is not None and codom(beta) != target:
                    continue
                if not enabled(self.net, m, t.id, beta):
                    continue
                new_emitted = emitted | {beta[v] for v in self._fresh[t.id]}
                nxt = (idx + (target is not None), fire_opid(self.net, m, t.id, beta), new_emitted,
                       opening and generator, cursor)
                yield nxt, Step(t.id, beta)

    def _local_steps(self, t: str, state, visible):
        idx, m, emitted, _, cursor = state
        v = self._local[t]
        if idx < len(visible):
            objs = sorted(o for o in visible[idx][1] if o.type == v.type)
        elif cursor is not None and any(cursor in tok for _, tok in m):
            # the current object must be gone before the next one moves
            objs = [cursor] if cursor.type == v.type else []
        else:
            objs = [o for o in self._by_type.get(v.type, ()) if cursor is None or o >= cursor]
        for o in objs:
            beta = {v: (o,) if v.kind == LIST else o}
            if enabled(self.net, m, t, beta):
                nxt = (idx, fire_opid(self.net, m, t, beta), emitted, False,
                       o if idx == len(visible) else None)
                yield nxt, Step(t, beta)

    def run(self, visible: Sequence) -> ExecutionResult:
        visible = [(label, frozenset(objs)) for label, objs in visible]
        start = (0, frozenset(), frozenset(), True, None)
        goal = (len(visible), frozenset(), self.universe)
        parent = {start: None}
        queue = deque([start])
        while queue:
            state = queue.popleft()
            if state[:3] == goal:
                steps = []
                while parent[state] is not None:
                    state, step = parent[state]
                    steps.append(step)
                return ExecutionResult(True, tuple(reversed(steps)), False, len(parent))
            for nxt, step in self._successors(state, visible):
                if nxt in parent:
                    continue
                if len(parent) >= self.max_states:
                    return ExecutionResult(False, (), True, len(parent))
                parent[nxt] = (state, step)
                queue.append(nxt)
        return ExecutionResult(False, (), False, len(parent))

    def accepts_log(self, log: Ocel) -> ExecutionResult:
        return self.run(log.visible_sequence())
