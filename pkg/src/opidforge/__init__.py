"""Object-centric Petri nets with identifiers: lowering, linking and replay."""

from .core import Inscription, Obj, ReplayResult, Variable, fresh_var, ins, list_var, normal_var
from .ocel import Event, Ocel, load_ocel, lo, make_log
from .ocpn import Flow, Ocpn, Place, Transition, replay, validate
from .opid import BoundedExecutor, Opid, OPlace, OTransition, fire_opid, replay_t1, replay_tr
from .relations import check_conformance, discover_stable_m2o
from .transform import t1, tr

__version__ = "0.1.0"

__all__ = [
    "BoundedExecutor",
    "Event",
    "Flow",
    "Inscription",
    "Obj",
    "Ocel",
    "Ocpn",
    "Opid",
    "OPlace",
    "OTransition",
    "Place",
    "ReplayResult",
    "Transition",
    "Variable",
    "check_conformance",
    "discover_stable_m2o",
    "fire_opid",
    "fresh_var",
    "ins",
    "list_var",
    "lo",
    "load_ocel",
    "make_log",
    "normal_var",
    "replay",
    "replay_t1",
    "replay_tr",
    "t1",
    "tr",
    "validate",
]
