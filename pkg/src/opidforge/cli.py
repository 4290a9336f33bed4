"""Command-line front end.

Exit codes: 0 success/accepted, 1 rejected, 2 unreadable or invalid input,
3 transformation precondition failed, 4 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import gen
from .core import binding_to_json, result_to_json
from .errors import OpidForgeError, TransformError
from .io import ocpn_to_json, read_ocpn_json, read_opid_json, read_opid_pnml, write_dot, write_opid_json, write_opid_pnml
from .ocel import load_ocel, ocel_to_json
from .ocpn import Ocpn, replay
from .opid import BoundedExecutor, replay_t1, replay_tr
from .relations import discover_stable_m2o
from .transform import t1, tr

EXIT_OK, EXIT_REJECTED, EXIT_INPUT, EXIT_PRECONDITION, EXIT_BUDGET = 0, 1, 2, 3, 4
SCHEMA_VERSION = 1


class InputError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_model(path: str):
    """An Ocpn or Opid, told apart by file content."""
    data = _read(path)
    if data.lstrip().startswith(b"<"):
        return read_opid_pnml(data)
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: neither PNML nor JSON ({exc})") from None
    if isinstance(doc, dict) and "arcs" in doc:
        return read_opid_json(doc)
    return read_ocpn_json(doc)


def load_relations(path: str) -> list:
    try:
        doc = json.loads(_read(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: not JSON ({exc})") from None
    if not isinstance(doc, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(s, str) for s in p) for p in doc
    ):
        raise InputError(f"{path}: expected a list of [many, one] type pairs")
    return [tuple(p) for p in doc]


def _write(path: str, data: bytes):
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def cmd_transform(args) -> int:
    net = read_ocpn_json(_read(args.ocpn))
    if args.relations == "mine":
        if not args.log:
            raise InputError("--relations mine needs --log")
        relations = discover_stable_m2o(load_ocel(_read(args.log)), args.noise).stable
        print("mined relations: " + (", ".join(f"({m},{o})" for m, o in relations) or "none"))
    elif args.relations:
        relations = load_relations(args.relations)
    else:
        relations = []
    out = t1(net)
    if relations:
        out = tr(out, relations)
    _write(args.out_pnml, write_opid_pnml(out))
    if args.out_dot:
        _write(args.out_dot, write_dot(out))
    if args.out_json:
        _write(args.out_json, write_opid_json(out))
    print(f"wrote {args.out_pnml}: {len(out.places)} places, {len(out.transitions)} transitions")
    return EXIT_OK


def _detect(model, kind: str) -> str:
    if kind != "auto":
        return kind
    if isinstance(model, Ocpn):
        return "ocpn"
    if model.kind == "tR":
        return "tr"
    if model.kind == "t1":
        return "t1"
    raise InputError("cannot tell how to replay this net; pass --kind generic")


def replay_one(model, kind: str, log, budget=None) -> dict:
    if kind == "ocpn":
        if not isinstance(model, Ocpn):
            raise InputError("--kind ocpn needs an OCPN JSON model")
        return result_to_json(replay(model, log, budget))
    if isinstance(model, Ocpn):
        raise InputError(f"--kind {kind} needs an OPID model")
    if kind == "t1":
        return result_to_json(replay_t1(model, log, budget))
    if kind == "tr":
        return result_to_json(replay_tr(model, log, budget))
    run = BoundedExecutor(model, log.objects, budget).accepts_log(log)
    failure = None
    if not run.accepted:
        reason = "budget-exhausted" if run.budget_exhausted else "no-accepting-run"
        failure = {"reason": reason, "eventIndex": None, "details": []}
    return {
        "accepted": run.accepted,
        "failure": failure,
        "trace": [{"transition": s.transition, "binding": binding_to_json(s.binding)} for s in run.witness],
        "links": {},
        "states": run.states,
    }


def _describe(path: str, res: dict) -> str:
    if res["accepted"]:
        return f"ACCEPTED {path}"
    f = res["failure"]
    where = f" at event {f['eventIndex']}" if f["eventIndex"] is not None else ""
    line = f"REJECTED {path}: {f['reason']}{where}"
    for d in f["details"]:
        if isinstance(d, dict):
            line += f"\n  {d['object']} in ({','.join(d['pair'])}) meets [{', '.join(d['lo'])}]"
        else:
            line += f"\n  {d}"
    return line


def cmd_replay(args) -> int:
    model = load_model(args.model)
    kind = _detect(model, args.kind)
    results = []
    for path in args.log:
        log = load_ocel(_read(path))
        results.append((path, replay_one(model, kind, log, args.budget)))
    if args.json:
        doc = {"schema_version": SCHEMA_VERSION, "kind": kind,
               "results": [dict(log=path, **res) for path, res in results]}
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        for path, res in results:
            print(_describe(path, res))
    if any(r["failure"] and r["failure"]["reason"] == "budget-exhausted" for _, r in results):
        return EXIT_BUDGET
    return EXIT_OK if all(r["accepted"] for _, r in results) else EXIT_REJECTED


def cmd_discover(args) -> int:
    report = discover_stable_m2o(load_ocel(_read(args.log)), args.noise)
    if args.json:
        print(json.dumps(report.to_json(), indent=2, ensure_ascii=False))
    else:
        sys.stdout.write(report.to_text())
    return EXIT_OK


def cmd_gen(args) -> int:
    net, log, relations = gen.instance(args.seed, args.max_places, args.max_types, args.max_objects,
                                       with_relations=args.relations)
    doc = {"schema_version": SCHEMA_VERSION, "seed": args.seed, "ocpn": ocpn_to_json(net), "log": ocel_to_json(log)}
    if args.relations:
        doc["relations"] = [list(r) for r in relations]
    print(json.dumps(doc, indent=2, ensure_ascii=False))
    return EXIT_OK


def _noise(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("noise must lie in [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opidforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="lower an OCPN to an OPID, optionally adding links")
    p.add_argument("--ocpn", required=True)
    p.add_argument("--relations", help='JSON file of [many, one] pairs, or "mine"')
    p.add_argument("--noise", type=_noise, default=0.0)
    p.add_argument("--log", help="log to mine relations from")
    p.add_argument("--out-pnml", required=True)
    p.add_argument("--out-dot")
    p.add_argument("--out-json")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("replay", help="check logs against a net")
    p.add_argument("--model", required=True)
    p.add_argument("--log", required=True, action="append")
    p.add_argument("--budget", type=int)
    p.add_argument("--json", action="store_true")
    p.add_argument("--kind", choices=["auto", "ocpn", "t1", "tr", "generic"], default="auto")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("discover", help="mine stable many-to-one relationships")
    p.add_argument("--log", required=True)
    p.add_argument("--noise", type=_noise, default=0.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("gen", help="random net and log (testing aid)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-places", type=int, default=10)
    p.add_argument("--max-types", type=int, default=3)
    p.add_argument("--max-objects", type=int, default=8)
    p.add_argument("--relations", action="store_true")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TransformError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (OpidForgeError, InputError) as exc:
        code = getattr(exc, "code", "input-error")
        print(f"error [{code}]: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
