"""Lowering an OCPN to an OPID, and injecting stable-relationship links."""

from __future__ import annotations

from typing import Iterable

from .core import fresh_var, ins, list_var, normal_var
from .errors import InvalidOcpn, NotT1Net, SelfRelationship, UnknownTypeInRelations, UnsoundFlow
from .ocpn import Ocpn, validate
from .opid import (
    AFTER,
    BEFORE,
    CONSUME,
    CORE,
    EMIT,
    LINK,
    PLAY,
    PRE_EMIT,
    STOP,
    Opid,
    OPlace,
    OTransition,
)


def emit_id(type_):
    return f"emit__{type_}"


def consume_id(type_):
    return f"consume__{type_}"


def pre_emit_id(type_):
    return f"preemit__{type_}"


def link_place_id(many, one):
    return f"link__{many}__{one}"


def link_transition_id(many, one):
    return f"linkt__{many}__{one}"


def before_id(type_, many, one):
    return f"before__{type_}__{many}__{one}"


def after_id(many, one, type_):
    return f"after__{many}__{one}__{type_}"


def _claim(wanted: str, taken: set) -> str:
    name, n = wanted, 1
    while name in taken:
        n += 1
        name = f"{wanted}_{n}"
    taken.add(name)
    return name


def t1(net: Ocpn) -> Opid:
    """Give every place the color of its type and every arc an inscription.

    Non-variable arcs carry ``x_T``, variable arcs ``X_T``. One silent
    emitting transition per type feeds the play place with a fresh object,
    one silent consuming transition per type empties the stop place.
    """
    problems = validate(net)
    if problems:
        raise InvalidOcpn("net is not a valid OCPN", problems)
    taken = set(net.places) | set(net.transitions)
    places = []
    for p in net.places.values():
        role = PLAY if p.play else STOP if p.stop else CORE
        places.append(OPlace(p.id, (p.type,), role))
    transitions = [OTransition(t.id, t.label, CORE) for t in net.transitions.values()]
    fin, fout = {}, {}
    for f in net.flows:
        if f.source in net.places:
            type_ = net.places[f.source].type
            fin[(f.source, f.target)] = ins(list_var(type_) if f.variable else normal_var(type_))
        else:
            type_ = net.places[f.target].type
            fout[(f.source, f.target)] = ins(list_var(type_) if f.variable else normal_var(type_))
    for type_ in net.types:
        e = _claim(emit_id(type_), taken)
        c = _claim(consume_id(type_), taken)
        transitions.append(OTransition(e, None, EMIT, otype=type_))
        transitions.append(OTransition(c, None, CONSUME, otype=type_))
        fout[(e, net.play_place(type_).id)] = ins(fresh_var(type_))
        fin[(net.stop_place(type_).id, c)] = ins(normal_var(type_))
    return Opid(net.types, places, transitions, fin, fout)


def tr(net: Opid, relations: Iterable) -> Opid:
    """Add link machinery enforcing each stable many-to-one relationship.

    ``relations`` holds ordered ``(many, one)`` type pairs. A one-to-one
    relationship is given as both orientations.
    """
    if net.kind != "t1":
        raise NotT1Net(f"tr expects an untouched t1 net, got {net.kind}")
    relations = list(dict.fromkeys(tuple(r) for r in relations))
    for many, one in relations:
        if many == one:
            raise SelfRelationship(f"relationship ({many}, {one}) relates a type to itself")
        for s in (many, one):
            if s not in net.types or not any(p.color == (s,) for p in net.places.values()):
                raise UnknownTypeInRelations(f"type {s} in ({many}, {one}) has no places")
    if not relations:
        return net
    core = [t for t in net.transitions.values() if t.role == CORE]
    unsound = []
    for t in core:
        ins_types = {net.places[p].color[0] for p, _ in net.pre(t.id)}
        out_types = {net.places[p].color[0] for p, _ in net.post(t.id)}
        if ins_types != out_types:
            unsound.append(f"{t.id}: consumes {sorted(ins_types)} but produces {sorted(out_types)}")
    if unsound:
        raise UnsoundFlow("core transitions must consume and produce the same types", unsound)

    taken = set(net.places) | set(net.transitions)
    places = dict(net.places)
    transitions = dict(net.transitions)
    fin, fout = dict(net.fin), dict(net.fout)
    related = list(dict.fromkeys(s for pair in relations for s in pair))
    emit = {t.otype: t.id for t in net.transitions.values() if t.role == EMIT}
    consume = {t.otype: t.id for t in net.transitions.values() if t.role == CONSUME}
    play = {p.color[0]: p.id for p in net.places.values() if p.role == PLAY}

    pre_emit = {}
    for s in related:
        tid = _claim(pre_emit_id(s), taken)
        transitions[tid] = OTransition(tid, None, PRE_EMIT, otype=s)
        pre_emit[s] = tid
        # the emitter now forwards linked objects instead of creating them
        fout[(emit[s], play[s])] = ins(normal_var(s))

    for many, one in relations:
        rel = (many, one)
        lp = _claim(link_place_id(many, one), taken)
        lt = _claim(link_transition_id(many, one), taken)
        places[lp] = OPlace(lp, (many, one), LINK, rel)
        transitions[lt] = OTransition(lt, None, LINK, rel=rel)
        fout[(lt, lp)] = ins(list_var(many), normal_var(one))
        for s in (many, one):
            var = list_var(s) if s == many else normal_var(s)
            b = _claim(before_id(s, many, one), taken)
            a = _claim(after_id(many, one, s), taken)
            places[b] = OPlace(b, (s,), BEFORE, rel)
            places[a] = OPlace(a, (s,), AFTER, rel)
            fout[(pre_emit[s], b)] = ins(fresh_var(s))
            fin[(b, lt)] = ins(var)
            fout[(lt, a)] = ins(var)
            fin[(a, emit[s])] = ins(normal_var(s))
        for t in core:
            many_arcs = [i for p, i in net.pre(t.id) if net.places[p].color == (many,)]
            one_arcs = [i for p, i in net.pre(t.id) if net.places[p].color == (one,)]
            if not many_arcs or not one_arcs:
                continue
            first = list_var(many) if many_arcs[0].is_template else normal_var(many)
            fin[(lp, t.id)] = fout[(t.id, lp)] = ins(first, normal_var(one))
        fin[(lp, consume[many])] = ins(normal_var(many), normal_var(one))

    return Opid(net.types, places.values(), transitions.values(), fin, fout, relations)
