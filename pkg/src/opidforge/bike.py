"""The bicycle workshop example: an OCPN and two logs.

``log_l1`` keeps wheels with the frame they were collected with;
``log_l2`` reshuffles wheel ``w6`` onto another frame.
"""

from .core import Obj
from .ocel import Ocel, make_log
from .ocpn import Flow, Ocpn, Place, Transition

WHEEL, FRAME, HANDLEBAR = "Wheel", "Frame", "Handlebar"
TYPES = (WHEEL, FRAME, HANDLEBAR)


def bike_ocpn() -> Ocpn:
    places = []
    for type_, stem in ((WHEEL, "wheel"), (FRAME, "frame"), (HANDLEBAR, "handlebar")):
        places += [
            Place(f"{stem}_play", type_, play=True),
            Place(f"{stem}_mid", type_),
            Place(f"{stem}_stop", type_, stop=True),
        ]
    transitions = [
        Transition("collect", "collect"),
        Transition("assemble_w", "assemble_w"),
        Transition("assemble_h", "assemble_h"),
        Transition("s1", None),
    ]
    flows = [
        Flow("wheel_play", "collect", True),
        Flow("frame_play", "collect"),
        Flow("handlebar_play", "collect"),
        Flow("collect", "wheel_mid", True),
        Flow("collect", "frame_mid"),
        Flow("collect", "handlebar_mid"),
        Flow("wheel_mid", "assemble_w", True),
        Flow("frame_mid", "assemble_w"),
        Flow("assemble_w", "wheel_stop", True),
        Flow("assemble_w", "frame_stop"),
        Flow("frame_mid", "assemble_h"),
        Flow("handlebar_mid", "assemble_h"),
        Flow("assemble_h", "frame_stop"),
        Flow("assemble_h", "handlebar_stop"),
        Flow("frame_stop", "s1"),
        Flow("s1", "frame_mid"),
    ]
    return Ocpn(TYPES, places, transitions, flows)


def _objects(names: str) -> list:
    kinds = {"w": WHEEL, "f": FRAME, "h": HANDLEBAR}
    return [Obj(name, kinds[name[0]]) for name in names.split()]


def log_l1() -> Ocel:
    return make_log(TYPES, [
        ("collect", _objects("f1 h1 w1 w2")),
        ("assemble_w", _objects("f1 w1 w2")),
        ("assemble_h", _objects("f1 h1")),
        ("collect", _objects("f2 h2 w3 w4")),
        ("assemble_h", _objects("f2 h2")),
        ("assemble_w", _objects("f2 w3 w4")),
    ])


def log_l2() -> Ocel:
    return make_log(TYPES, [
        ("collect", _objects("f3 h3 w5 w6")),
        ("collect", _objects("f4 h4 w7")),
        ("assemble_w", _objects("f3 w5")),
        ("assemble_h", _objects("f3 h4")),
        ("assemble_w", _objects("f4 w6 w7")),
        ("assemble_h", _objects("f4 h3")),
    ])
