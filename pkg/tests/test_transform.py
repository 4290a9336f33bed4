import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opidforge.core import fresh_var, ins, list_var, normal_var
from opidforge.errors import (
    InvalidOcpn,
    NotT1Net,
    SelfRelationship,
    UnknownTypeInRelations,
    UnsoundFlow,
)
from opidforge.gen import instance, random_relations
from opidforge.ocpn import Flow, Ocpn, Place, Transition
from opidforge.opid import AFTER, BEFORE, LINK, PLAY, STOP, validate_opid
from opidforge.transform import t1, tr

from conftest import HF, WF


def test_t1_counts(bike_t1):
    assert len(bike_t1.places) == 9
    assert len(bike_t1.transitions) == 10
    assert {p.id for p in bike_t1.places.values() if p.role == PLAY} == {
        "wheel_play", "frame_play", "handlebar_play"}
    assert {p.id for p in bike_t1.places.values() if p.role == STOP} == {
        "wheel_stop", "frame_stop", "handlebar_stop"}


def test_t1_inscriptions(bike_t1):
    assert bike_t1.fin[("wheel_play", "collect")] == ins(list_var("Wheel"))
    assert bike_t1.fin[("frame_play", "collect")] == ins(normal_var("Frame"))
    assert bike_t1.fout[("emit__Wheel", "wheel_play")] == ins(fresh_var("Wheel"))
    assert bike_t1.fin[("wheel_stop", "consume__Wheel")] == ins(normal_var("Wheel"))
    assert all(p.color == (p.id.split("_")[0].capitalize(),) for p in bike_t1.places.values())


def test_tr_counts(bike_t1, bike_tr):
    added_places = set(bike_tr.places) - set(bike_t1.places)
    added_transitions = set(bike_tr.transitions) - set(bike_t1.transitions)
    roles = [bike_tr.places[p].role for p in added_places]
    assert roles.count(LINK) == 2 and roles.count(BEFORE) == 4 and roles.count(AFTER) == 4
    assert len(bike_tr.places) == 19
    assert sorted(added_transitions) == [
        "linkt__Handlebar__Frame", "linkt__Wheel__Frame",
        "preemit__Frame", "preemit__Handlebar", "preemit__Wheel"]
    assert len(bike_tr.transitions) == 15
    assert all(bike_tr.transitions[t].silent for t in added_transitions)


def test_tr_link_arcs_on_core_transitions(bike_tr):
    wf = "link__Wheel__Frame"
    assert bike_tr.fin[(wf, "collect")] == bike_tr.fout[("collect", wf)] == ins(list_var("Wheel"), normal_var("Frame"))
    assert bike_tr.fin[(wf, "assemble_w")] == ins(list_var("Wheel"), normal_var("Frame"))
    assert (wf, "assemble_h") not in bike_tr.fin
    hf = "link__Handlebar__Frame"
    assert bike_tr.fin[(hf, "assemble_h")] == ins(normal_var("Handlebar"), normal_var("Frame"))
    assert bike_tr.fin[(wf, "consume__Wheel")] == ins(normal_var("Wheel"), normal_var("Frame"))
    assert bike_tr.places[wf].color == ("Wheel", "Frame")


def test_tr_rewires_emitters(bike_tr):
    assert bike_tr.fout[("emit__Wheel", "wheel_play")] == ins(normal_var("Wheel"))
    assert bike_tr.fin[("after__Wheel__Frame__Wheel", "emit__Wheel")] == ins(normal_var("Wheel"))
    assert bike_tr.fout[("preemit__Wheel", "before__Wheel__Wheel__Frame")] == ins(fresh_var("Wheel"))
    assert bike_tr.fin[("before__Wheel__Wheel__Frame", "linkt__Wheel__Frame")] == ins(list_var("Wheel"))


def test_tr_errors(bike_t1, bike_tr):
    with pytest.raises(NotT1Net):
        tr(bike_tr, [WF])
    with pytest.raises(SelfRelationship):
        tr(bike_t1, [("Wheel", "Wheel")])
    with pytest.raises(UnknownTypeInRelations):
        tr(bike_t1, [("Saddle", "Frame")])


def test_t1_refuses_invalid_nets():
    net = Ocpn(["A"], [Place("p", "A")], [], [])
    with pytest.raises(InvalidOcpn) as info:
        t1(net)
    assert info.value.violations


def test_tr_refuses_type_changing_transitions():
    net = Ocpn(
        ["A", "B"],
        [Place("a0", "A", play=True), Place("a1", "A", stop=True),
         Place("b0", "B", play=True), Place("b1", "B", stop=True)],
        [Transition("t", "t"), Transition("u", "u")],
        [Flow("a0", "t"), Flow("b0", "t"), Flow("t", "a1"), Flow("u", "b1")],
    )
    with pytest.raises(UnsoundFlow):
        tr(t1(net), [("A", "B")])


def test_empty_relations_keep_the_net(bike_t1):
    assert tr(bike_t1, []) is bike_t1


def test_duplicate_relations_are_merged(bike_t1):
    assert tr(bike_t1, [WF, WF, HF]) == tr(bike_t1, [WF, HF])


def test_generated_ids_avoid_clashes():
    net = Ocpn(
        ["A"],
        [Place("emit__A", "A", play=True), Place("q", "A", stop=True)],
        [Transition("t", "a")],
        [Flow("emit__A", "t"), Flow("t", "q")],
    )
    out = t1(net)
    assert "emit__A_2" in out.transitions and "emit__A" in out.places


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_links_only_add_to_the_lowered_net(seed):
    net, _, _ = instance(seed)
    low = t1(net)
    relations = random_relations(random.Random(seed), list(net.types))
    high = tr(low, relations)
    assert validate_opid(low) == validate_opid(high) == []
    # erasing the added nodes gives back the lowered net up to emitter inputs and outputs
    assert set(low.places) <= set(high.places) and set(low.transitions) <= set(high.transitions)
    for key, i in low.fin.items():
        assert high.fin[key] == i
    for (t, p), i in low.fout.items():
        if low.transitions[t].role != "emit" or not relations:
            assert high.fout[(t, p)] == i
    kept = {k: v for k, v in high.fin.items() if k[0] in low.places and k[1] in low.transitions}
    assert set(kept) == set(low.fin)
    assert all(high.transitions[t].silent for t in set(high.transitions) - set(low.transitions))
    n = len(relations)
    typed = {s for pair in relations for s in pair}
    assert len(high.places) - len(low.places) == 5 * n
    assert len(high.transitions) - len(low.transitions) == n + len(typed)
