import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opidforge.core import Obj
from opidforge.errors import InvalidBinding, InvalidOcpn, NotEnabled, UnknownType
from opidforge.gen import instance, random_ocpn
from opidforge.ocel import Ocel, make_log
from opidforge.ocpn import (
    Flow,
    Ocpn,
    Place,
    Transition,
    cons_prod,
    enabled_bindings,
    final_marking,
    fire,
    initial_marking,
    replay,
    soundness_warnings,
    validate,
)

from oracles import ocpn_accepts

W = {f"w{i}": Obj(f"w{i}", "Wheel") for i in range(1, 8)}
F = {f"f{i}": Obj(f"f{i}", "Frame") for i in range(1, 5)}
H = {f"h{i}": Obj(f"h{i}", "Handlebar") for i in range(1, 5)}


def first_binding():
    return {"Wheel": {W["w1"], W["w2"]}, "Frame": {F["f1"]}, "Handlebar": {H["h1"]}}


def chain(type_="A", variable=False, label="a"):
    """play -> t -> stop for a single type."""
    s = type_.lower()
    return Ocpn(
        [type_],
        [Place(f"{s}_play", type_, play=True), Place(f"{s}_stop", type_, stop=True)],
        [Transition("t", label)],
        [Flow(f"{s}_play", "t", variable), Flow("t", f"{s}_stop", variable)],
    )


def test_bike_net_is_valid(bike):
    assert validate(bike) == []
    assert soundness_warnings(bike) == []
    assert len(bike.places) == 9 and len(bike.transitions) == 4


def test_mixed_variability_is_reported():
    net = Ocpn(
        ["Wheel"],
        [Place("p", "Wheel", play=True), Place("q", "Wheel", stop=True)],
        [Transition("t", "a")],
        [Flow("p", "t", True), Flow("t", "q", False)],
    )
    assert [(v.kind, v.element) for v in validate(net)] == [("well-formedness", "t")]


def test_two_play_places_are_reported(bike):
    net = Ocpn(bike.types, list(bike.places.values()) + [Place("frame_play2", "Frame", play=True)],
               bike.transitions.values(), bike.flows)
    assert [(v.kind, v.element) for v in validate(net)] == [("play-place-cardinality", "Frame")]


def test_structural_violations():
    net = Ocpn(
        ["A"],
        [Place("p", "A", play=True, stop=True), Place("q", "B")],
        [Transition("p", "dup"), Transition("t", "a")],
        [Flow("p", "q"), Flow("t", "nowhere")],
    )
    kinds = {v.kind for v in validate(net)}
    assert {"duplicate-id", "unknown-type", "unknown-node"} <= kinds


def test_non_bipartite_flow():
    net = Ocpn(["A"], [Place("p", "A", play=True), Place("q", "A", stop=True)], [], [Flow("p", "q")])
    assert [v.kind for v in validate(net)] == ["non-bipartite"]


def test_soundness_warnings_for_stranded_place():
    net = Ocpn(
        ["A"],
        [Place("p", "A", play=True), Place("q", "A", stop=True), Place("r", "A")],
        [Transition("t", "a"), Transition("u", "b")],
        [Flow("p", "t"), Flow("t", "q"), Flow("p", "u"), Flow("u", "r")],
    )
    assert validate(net) == []
    assert [(v.kind, v.element) for v in soundness_warnings(net)] == [("dead-end-place", "r")]


def test_cons_prod_collect(bike):
    cons, prod = cons_prod(bike, "collect", first_binding())
    assert {p for p, _ in cons} == {"wheel_play", "frame_play", "handlebar_play"}
    assert len(cons) == 4
    assert {p for p, _ in prod} == {"wheel_mid", "frame_mid", "handlebar_mid"}


def test_cons_assemble_w(bike):
    cons, _ = cons_prod(bike, "assemble_w", {"Wheel": {W["w1"], W["w2"]}, "Frame": {F["f1"]}})
    assert cons == {("wheel_mid", W["w1"]), ("wheel_mid", W["w2"]), ("frame_mid", F["f1"])}


def test_cons_single_type(bike):
    cons, _ = cons_prod(bike, "s1", {"Frame": {F["f1"]}})
    assert len(cons) == len(bike.preset("s1"))


def test_invalid_bindings(bike):
    with pytest.raises(InvalidBinding):
        cons_prod(bike, "collect", {"Wheel": {W["w1"]}, "Frame": {F["f1"], F["f2"]}, "Handlebar": {H["h1"]}})
    with pytest.raises(InvalidBinding):
        cons_prod(bike, "collect", {"Wheel": set(), "Frame": {F["f1"]}, "Handlebar": {H["h1"]}})
    with pytest.raises(InvalidBinding):
        cons_prod(bike, "collect", {"Wheel": {W["w1"]}, "Frame": {F["f1"]}})
    with pytest.raises(InvalidBinding):
        cons_prod(bike, "s1", {"Frame": {W["w1"]}})


def test_fire_collect(bike, l1):
    m = fire(bike, initial_marking(bike, l1.objects), "collect", first_binding())
    assert {o for p, o in m if p == "wheel_mid"} == {W["w1"], W["w2"]}
    assert {o for p, o in m if p == "frame_mid"} == {F["f1"]}
    assert {o for p, o in m if p == "handlebar_mid"} == {H["h1"]}
    assert {o for p, o in m if p == "wheel_play"} == {W["w3"], W["w4"]}
    assert {o for p, o in m if p == "frame_play"} == {F["f2"]}


def test_fire_not_enabled(bike):
    with pytest.raises(NotEnabled):
        fire(bike, frozenset(), "s1", {"Frame": {F["f1"]}})


def test_silent_loop_moves_frame_back(bike):
    m = fire(bike, frozenset([("frame_stop", F["f1"])]), "s1", {"Frame": {F["f1"]}})
    assert m == {("frame_mid", F["f1"])}


def test_initial_and_final_markings(bike, l1):
    m = initial_marking(bike, l1.objects)
    counts = {p: sum(1 for q, _ in m if q == p) for p in ("wheel_play", "frame_play", "handlebar_play")}
    assert counts == {"wheel_play": 4, "frame_play": 2, "handlebar_play": 2}
    assert initial_marking(bike, []) == frozenset()
    assert {p for p, _ in final_marking(bike, l1.objects)} == {"wheel_stop", "frame_stop", "handlebar_stop"}
    with pytest.raises(UnknownType):
        initial_marking(bike, [Obj("s1", "Saddle")])


def test_replay_worked_examples(bike, l1, l2):
    r1 = replay(bike, l1)
    assert r1.accepted and r1.failure is None
    assert [s.transition for s in r1.trace if s.transition != "s1"] == [e.activity for e in l1.events]
    assert replay(bike, l2).accepted


def test_replay_trace_is_a_valid_run(bike, l1):
    m = initial_marking(bike, l1.objects)
    for step in replay(bike, l1).trace:
        m = fire(bike, m, step.transition, step.binding)
    assert m == final_marking(bike, l1.objects)


def test_missing_last_event_strands_objects(bike, l1):
    cut = Ocel(l1.types, l1.objects, l1.events[:-1])
    res = replay(bike, cut)
    assert not res.accepted
    assert res.failure.reason == "final-marking-not-reached"
    assert res.failure.event_index == 5


def test_unknown_activity(bike, l1):
    log = make_log(l1.types, [("paint", [F["f1"]])])
    res = replay(bike, log)
    assert res.failure.reason == "unknown-activity" and res.failure.event_index == 0


def test_no_enabled_binding(bike):
    # assembling before collecting
    log = make_log(["Wheel", "Frame", "Handlebar"], [("assemble_h", [F["f1"], H["h1"]])])
    res = replay(bike, log)
    assert res.failure.reason == "no-enabled-binding" and res.failure.event_index == 0


def test_log_with_foreign_type(bike):
    log = make_log(["Saddle"], [], [Obj("s1", "Saddle")])
    assert replay(bike, log).failure.reason == "unknown-type"


def test_invalid_net_is_refused():
    net = Ocpn(["A"], [Place("p", "A")], [], [])
    with pytest.raises(InvalidOcpn):
        replay(net, make_log(["A"], []))


def test_budget_exhaustion(bike, l1):
    res = replay(bike, l1, budget=3)
    assert not res.accepted and res.budget_exhausted


def test_budget_from_environment(bike, l1, monkeypatch):
    monkeypatch.setenv("OPIDFORGE_BUDGET", "2")
    assert replay(bike, l1).budget_exhausted


def test_singleton_on_variable_arc():
    net = chain(variable=True)
    a1 = Obj("a1", "A")
    assert replay(net, make_log(["A"], [("a", [a1])])).accepted


def test_duplicate_labels_are_searched():
    # two "a" transitions; only the second leads to the stop place
    net = Ocpn(
        ["A"],
        [Place("p", "A", play=True), Place("dead", "A"), Place("q", "A", stop=True)],
        [Transition("t1", "a"), Transition("t2", "a")],
        [Flow("p", "t1"), Flow("t1", "dead"), Flow("p", "t2"), Flow("t2", "q")],
    )
    res = replay(net, make_log(["A"], [("a", [Obj("a1", "A")])]))
    assert res.accepted and res.trace[0].transition == "t2"


def test_shared_object_across_same_type_preplaces():
    # t needs the same object in both p1 and p2 (an AND-join within a type)
    net = Ocpn(
        ["A"],
        [Place("p", "A", play=True), Place("p1", "A"), Place("p2", "A"), Place("q", "A", stop=True)],
        [Transition("split", None), Transition("t", "a")],
        [Flow("p", "split"), Flow("split", "p1"), Flow("split", "p2"),
         Flow("p1", "t"), Flow("p2", "t"), Flow("t", "q")],
    )
    a1, a2 = Obj("a1", "A"), Obj("a2", "A")
    m = frozenset([("p1", a1), ("p2", a2)])
    assert list(enabled_bindings(net, m, "t")) == []
    assert replay(net, make_log(["A"], [("a", [a1]), ("a", [a2])])).accepted


def test_no_silent_transitions_means_one_firing_per_event():
    net = chain()
    log = make_log(["A"], [("a", [Obj("a1", "A")]), ("a", [Obj("a2", "A")])])
    res = replay(net, log)
    assert res.accepted and len(res.trace) == len(log.events)


def test_empty_log_on_empty_net():
    assert replay(Ocpn([], [], [], []), make_log([], [])).accepted


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_replay_agrees_with_brute_force(seed):
    net, log, _ = instance(seed, max_places=7, max_objects=4)
    assert replay(net, log).accepted == ocpn_accepts(net, log)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_firing_keeps_types_and_counts(seed):
    rng = random.Random(seed)
    net = random_ocpn(rng)
    objs = [Obj(f"o{i}", rng.choice(net.types)) for i in range(rng.randint(1, 5))]
    m = initial_marking(net, objs)
    for _ in range(15):
        options = [(t, b) for t in sorted(net.transitions) for b in enabled_bindings(net, m, t, objs)]
        if not options:
            break
        t, b = rng.choice(options)
        cons, prod = cons_prod(net, t, b)
        m2 = fire(net, m, t, b)
        assert all(net.places[p].type == o.type for p, o in m2)
        assert len(m2) == len(m) - len(cons) + len(prod)
        m = m2
