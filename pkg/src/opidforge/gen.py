"""Seedable generators for small OCPNs, logs and relationship sets.

Every type gets a chain of places from its play to its stop place; labelled
transitions move objects of one or more types along the chain (sometimes
skipping ahead or looping back) and silent single-type transitions cover
chain steps no labelled transition covers. Logs come from random walks of
the net, optionally steered by hidden links and then perturbed.
"""

from __future__ import annotations

import random
import string
from typing import Optional

from .core import Obj
from .ocel import Event, Ocel
from .ocpn import Flow, Ocpn, Place, Transition, enabled_bindings, final_marking, fire, initial_marking

TYPE_NAMES = ("A", "B", "C", "D", "E")


def random_ocpn(rng: random.Random, max_places: int = 10, max_types: int = 3,
                max_activities: int = 4) -> Ocpn:
    k = rng.randint(1, min(max_types, max_places // 2))
    types = list(TYPE_NAMES[:k])
    spare = max_places - 2 * k
    mids = {s: 0 for s in types}
    for _ in range(rng.randint(0, spare)):
        mids[rng.choice(types)] += 1
    chains = {}
    places = []
    for s in types:
        chain = [f"{s.lower()}_play"] + [f"{s.lower()}_{i}" for i in range(1, mids[s] + 1)] + [f"{s.lower()}_stop"]
        chains[s] = chain
        for i, pid in enumerate(chain):
            places.append(Place(pid, s, play=i == 0, stop=i == len(chain) - 1))

    transitions, flows = [], []
    covered = {s: set() for s in types}

    def add(tid, label, moves):
        transitions.append(Transition(tid, label))
        for s, (i, j), variable in moves:
            flows.append(Flow(chains[s][i], tid, variable))
            flows.append(Flow(tid, chains[s][j], variable))
            if j == i + 1:
                covered[s].add(i)

    def step(s):
        n = len(chains[s])
        roll = rng.random()
        if roll < 0.75 or n == 2:
            i = rng.randrange(n - 1)
            return i, i + 1
        if roll < 0.9 and n > 2:
            i = rng.randrange(n - 2)
            return i, rng.randrange(i + 2, n)
        j = rng.randrange(1, n)
        return j, rng.randrange(1, j) if j > 1 else 0

    labels = list(string.ascii_lowercase[:rng.randint(1, max_activities)])
    for n, label in enumerate(labels):
        size = rng.choice([1, 1, 2, 2, 3])
        part = rng.sample(types, min(size, k))
        add(f"t_{label}", label, [(s, step(s), rng.random() < 0.4) for s in part])
    if rng.random() < 0.2:
        label = rng.choice(labels)
        part = rng.sample(types, rng.randint(1, k))
        add(f"t_{label}_dup", label, [(s, step(s), rng.random() < 0.4) for s in part])
    silent = 0
    for s in types:
        for i in range(len(chains[s]) - 1):
            if i not in covered[s]:
                silent += 1
                add(f"tau{silent}", None, [(s, (i, i + 1), rng.random() < 0.3)])
        if rng.random() < 0.25 and len(chains[s]) > 2:
            # loop back from the stop place, like re-opening an item
            silent += 1
            j = len(chains[s]) - 1
            add(f"tau{silent}", None, [(s, (j, rng.randrange(1, j)), False)])
    return Ocpn(types, places, transitions, flows)


def random_objects(rng: random.Random, types, max_objects: int = 8) -> list:
    total = rng.randint(0, max_objects)
    objs = []
    counts = {s: 0 for s in types}
    for _ in range(total):
        s = rng.choice(list(types))
        counts[s] += 1
        objs.append(Obj(f"{s.lower()}{counts[s]}", s))
    return objs


def random_relations(rng: random.Random, types, p: float = 0.35) -> list:
    return [(a, b) for a in types for b in types if a != b and rng.random() < p]


def _respects(binding: dict, links: dict) -> bool:
    for (many, one), partner in links.items():
        if many in binding and one in binding:
            ones = binding[one]
            if len(ones) != 1:
                return False
            target = next(iter(ones))
            if any(partner.get(o) != target for o in binding[many]):
                return False
    return True


def random_log(rng: random.Random, net: Ocpn, max_objects: int = 8, hint: Optional[list] = None,
               mutate: float = 0.3, max_steps: int = 40) -> Ocel:
    """A log from a random walk of ``net``.

    With ``hint`` (a relationship list) each many-side object is secretly
    assigned a one-side partner and the walk only binds objects together
    with their partners. With probability ``mutate`` one event is then
    dropped, swapped, relabelled or has an object exchanged.
    """
    objs = random_objects(rng, net.types, max_objects)
    links = {}
    for many, one in hint or ():
        ones = [o for o in objs if o.type == one]
        if ones:
            links[(many, one)] = {o: rng.choice(ones) for o in objs if o.type == many}
    m = initial_marking(net, objs)
    goal = final_marking(net, objs)
    trail = []
    transitions = sorted(net.transitions.values(), key=lambda t: t.id)
    for _ in range(max_steps):
        if m == goal and rng.random() < 0.7:
            break
        options = []
        for t in transitions:
            bs = [b for b in enabled_bindings(net, m, t.id, objs) if _respects(b, links)]
            if bs:
                options.append((t, bs))
        if not options:
            break
        t, bs = rng.choice(options)
        b = rng.choice(bs)
        m = fire(net, m, t.id, b)
        if t.label is not None:
            trail.append([t.label, set().union(*b.values())])
    if trail and rng.random() < mutate:
        _mutate(rng, trail, objs, sorted({t.label for t in transitions if t.label}))
    trail = [(label, o) for label, o in trail if o]
    events = tuple(Event(f"e{i + 1}", label, frozenset(o), i) for i, (label, o) in enumerate(trail))
    return Ocel(frozenset(net.types), frozenset(objs), events)


def _mutate(rng, trail, objs, labels):
    kind = rng.choice(["drop", "swap", "relabel", "exchange", "exchange"])
    i = rng.randrange(len(trail))
    if kind == "drop":
        del trail[i]
    elif kind == "swap" and len(trail) > 1:
        j = rng.randrange(len(trail))
        trail[i], trail[j] = trail[j], trail[i]
    elif kind == "relabel" and labels:
        trail[i][0] = rng.choice(labels)
    else:
        old = rng.choice(sorted(trail[i][1]))
        others = [o for o in objs if o.type == old.type and o != old]
        if others:
            trail[i][1] = (trail[i][1] - {old}) | {rng.choice(others)}


def instance(seed: int, max_places: int = 10, max_types: int = 3, max_objects: int = 8,
             with_relations: bool = False):
    """Net, log and (optionally) relationship set for one seed."""
    rng = random.Random(seed)
    net = random_ocpn(rng, max_places, max_types)
    relations = random_relations(rng, net.types) if with_relations else None
    log = random_log(rng, net, max_objects, hint=relations if relations and rng.random() < 0.6 else None)
    return net, log, relations
