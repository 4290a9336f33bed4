import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opidforge.core import Obj
from opidforge.ocel import make_log
from opidforge.opid import replay_tr
from opidforge.relations import check_conformance, discover_stable_m2o
from opidforge.transform import tr

from conftest import FH, HF, WF
from oracles import conforms, random_raw_log, stable_pairs


def test_l1_pairs(l1):
    report = discover_stable_m2o(l1)
    assert report.stable == [FH, HF, ("Wheel", "Frame"), ("Wheel", "Handlebar")]
    assert report.one_to_one == [FH]
    assert report.count_line() == "4 (2+2*1)"


def test_l2_pairs(l2):
    report = discover_stable_m2o(l2)
    assert report.stable == [("Wheel", "Handlebar")]
    assert report.count_line() == "1 (1+0)"
    stats = report.pairs[WF]
    assert (stats.many_ok, stats.many_total) == (2, 3)


def test_l2_conformance(l2):
    result = check_conformance(l2, [WF])
    assert not result.conforms
    assert [v.to_json() for v in result.violations] == [
        {"pair": ["Wheel", "Frame"], "object": "w6", "lo": ["f3", "f4"]}]
    assert check_conformance(l2, [("Wheel", "Handlebar")]).conforms


def noisy_log():
    """Ten wheels on one frame each, except w9 which meets two frames."""
    frames = [Obj(f"f{i}", "Frame") for i in range(10)]
    events = [("mount", [Obj(f"w{i}", "Wheel"), frames[i]]) for i in range(10)]
    events.append(("mount", [Obj("w9", "Wheel"), frames[0]]))
    return make_log(["Wheel", "Frame"], events)


def test_noise_tolerance():
    log = noisy_log()
    assert WF not in discover_stable_m2o(log, 0.0).stable
    assert WF in discover_stable_m2o(log, 0.1).stable
    assert discover_stable_m2o(log, 0.1).pairs[WF].many_ok == 9


def test_noise_bounds(l1):
    with pytest.raises(ValueError):
        discover_stable_m2o(l1, 1.5)
    with pytest.raises(ValueError):
        discover_stable_m2o(l1, -0.1)


def test_unseen_objects_do_not_count_for_mining():
    w1, w2, f1 = Obj("w1", "Wheel"), Obj("w2", "Wheel"), Obj("f1", "Frame")
    log = make_log(["Wheel", "Frame"], [("mount", [w1, f1])], [w2])
    assert WF in discover_stable_m2o(log).stable
    # the strict check still reports the idle wheel
    assert [v.object for v in check_conformance(log, [WF]).violations] == [w2]


def test_empty_types_are_vacuous():
    log = make_log(["Wheel", "Frame"], [])
    assert discover_stable_m2o(log).stable == []
    assert check_conformance(log, [WF]).conforms


def test_report_json_and_text(l1):
    report = discover_stable_m2o(l1)
    doc = json.loads(json.dumps(report.to_json()))
    assert doc["schema_version"] == 1
    assert doc["summary"]["m2oCount"] == 4
    assert doc["summary"]["oneToOnePairCount"] == 1
    assert doc["summary"]["countLine"] == "4 (2+2*1)"
    assert len(doc["perPair"]) == 6
    wf = doc["perPair"]["Wheel->Frame"]
    assert wf == {"many": "Wheel", "one": "Frame", "manyOk": 4, "manyTotal": 4,
                  "oneOk": 2, "oneTotal": 2, "stableAtNoise": True}
    text = report.to_text()
    assert text.splitlines()[0].split() == ["many", "one", "many", "ok", "one", "ok", "stable"]
    assert text.rstrip().endswith("#m2o(noise=0) = 4 (2+2*1)")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_mining_matches_brute_force(seed):
    log = random_raw_log(random.Random(seed))
    assert set(discover_stable_m2o(log).stable) == stable_pairs(log)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 1), st.floats(0, 1))
def test_more_noise_never_loses_pairs(seed, a, b):
    log = random_raw_log(random.Random(seed))
    lo_, hi = sorted((a, b))
    assert set(discover_stable_m2o(log, lo_).stable) <= set(discover_stable_m2o(log, hi).stable)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_conformance_matches_brute_force(seed):
    rng = random.Random(seed)
    log = random_raw_log(rng)
    types = sorted(log.types)
    relations = [(a, b) for a in types for b in types if a != b and rng.random() < 0.4]
    assert check_conformance(log, relations).conforms == conforms(log, relations)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_conformance_agrees_with_mining_on_fully_observed_logs(seed):
    rng = random.Random(seed)
    log = random_raw_log(rng)
    if log.objects - log.observed:
        return
    stable = set(discover_stable_m2o(log).stable)
    present = {o.type for o in log.objects}
    for a in sorted(present):
        for b in sorted(present):
            if a != b:
                assert check_conformance(log, [(a, b)]).conforms == ((a, b) in stable)


def test_mined_relations_replay(bike_t1, l1):
    relations = discover_stable_m2o(l1).stable
    assert replay_tr(tr(bike_t1, relations), l1).accepted


def test_empty_log_is_accepted_with_links(bike_tr, l1):
    assert replay_tr(bike_tr, make_log(l1.types, [])).accepted
