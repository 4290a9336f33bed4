"""Reading and writing nets: OCPN JSON, OPID JSON, PNML and DOT.

All writers are deterministic: elements are emitted sorted by id and
arcs by ``(source, target)``.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from typing import Union

from .core import FRESH, LIST, NORMAL, Inscription, Variable
from .errors import MalformedDocument, SchemaViolation
from .ocel import _load
from .ocpn import Flow, Ocpn, Place, Transition
from .opid import PLACE_ROLES, TRANSITION_ROLES, Opid, OPlace, OTransition

SCHEMA_VERSION = 1
TOOL = "opid"
TOOL_VERSION = "1"
PTNET = "http://www.pnml.org/version-2009/grammar/ptnet"


def _field(doc: dict, key: str, kinds, path: str, default=...):
    if key not in doc:
        if default is not ...:
            return default
        raise SchemaViolation(f"{path}/{key}", "missing")
    value = doc[key]
    if not isinstance(value, kinds) or (isinstance(value, bool) and bool not in _tuple(kinds)):
        raise SchemaViolation(f"{path}/{key}", f"unexpected value {value!r}")
    return value


def _tuple(kinds):
    return kinds if isinstance(kinds, tuple) else (kinds,)


def _items(doc: dict, key: str, path: str = "") -> list:
    items = _field(doc, key, list, path)
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise SchemaViolation(f"{path}/{key}/{i}", "expected object")
    return items


def _type_names(doc: dict) -> list:
    types = _field(doc, "types", list, "")
    for i, t in enumerate(types):
        if not isinstance(t, str) or not t:
            raise SchemaViolation(f"/types/{i}", "type name must be a non-empty string")
    return types


def _unique_ids(items, path):
    seen = set()
    for i, item in enumerate(items):
        if item in seen:
            raise SchemaViolation(f"{path}/{i}/id", f"duplicate id {item!r}")
        seen.add(item)


# -- OCPN JSON ---------------------------------------------------------------

def read_ocpn_json(data) -> Ocpn:
    """Parse an OCPN document (bytes, text or decoded dict)."""
    doc = _load(data)
    types = _type_names(doc)
    places = []
    for i, p in enumerate(_items(doc, "places")):
        path = f"/places/{i}"
        pid = _field(p, "id", str, path)
        type_ = _field(p, "type", str, path)
        if type_ not in types:
            raise SchemaViolation(path + "/type", f"undeclared type {type_!r}")
        places.append(Place(pid, type_, _field(p, "play", bool, path, False), _field(p, "stop", bool, path, False)))
    transitions = []
    for i, t in enumerate(_items(doc, "transitions")):
        path = f"/transitions/{i}"
        transitions.append(Transition(_field(t, "id", str, path), _field(t, "label", (str, type(None)), path, None)))
    ids = [p.id for p in places] + [t.id for t in transitions]
    _unique_ids([p.id for p in places], "/places")
    _unique_ids([t.id for t in transitions], "/transitions")
    known = set(ids)
    flows = []
    for i, f in enumerate(_items(doc, "flows")):
        path = f"/flows/{i}"
        ends = []
        for key in ("from", "to"):
            node = _field(f, key, str, path)
            if node not in known:
                raise SchemaViolation(f"{path}/{key}", f"unknown node {node!r}")
            ends.append(node)
        flows.append(Flow(ends[0], ends[1], _field(f, "variable", bool, path, False)))
    return Ocpn(types, places, transitions, flows)


def ocpn_to_json(net: Ocpn) -> dict:
    return {
        "types": list(net.types),
        "places": [{"id": p.id, "type": p.type, "play": p.play, "stop": p.stop}
                   for p in sorted(net.places.values(), key=lambda p: p.id)],
        "transitions": [{"id": t.id, "label": t.label}
                        for t in sorted(net.transitions.values(), key=lambda t: t.id)],
        "flows": [{"from": f.source, "to": f.target, "variable": f.variable}
                  for f in sorted(net.flows, key=lambda f: (f.source, f.target))],
    }


def write_ocpn_json(net: Ocpn) -> bytes:
    return (json.dumps(ocpn_to_json(net), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# -- OPID JSON ---------------------------------------------------------------

def _var_json(v: Variable) -> dict:
    return {"kind": v.kind, "type": v.type, "name": v.name}


def _read_var(doc, path, types) -> Variable:
    if not isinstance(doc, dict):
        raise SchemaViolation(path, "expected object")
    kind = _field(doc, "kind", str, path)
    if kind not in (NORMAL, LIST, FRESH):
        raise SchemaViolation(path + "/kind", f"unknown variable kind {kind!r}")
    type_ = _field(doc, "type", str, path)
    if type_ not in types:
        raise SchemaViolation(path + "/type", f"undeclared type {type_!r}")
    return Variable(kind, type_, _field(doc, "name", str, path))


def _inscription(variables, path) -> Inscription:
    try:
        return Inscription(tuple(variables))
    except ValueError as exc:
        raise SchemaViolation(path, str(exc)) from None


def _pair(value, path, types):
    if value is None:
        return None
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(s, str) and s in types for s in value)):
        raise SchemaViolation(path, "expected a pair of declared types")
    return tuple(value)


def opid_to_json(net: Opid) -> dict:
    arcs = [(p, t, i) for (p, t), i in net.fin.items()] + [(t, p, i) for (t, p), i in net.fout.items()]
    return {
        "schema_version": SCHEMA_VERSION,
        "types": list(net.types),
        "relations": [list(r) for r in net.relations],
        "places": [
            {"id": p.id, "color": list(p.color), "role": p.role, "rel": list(p.rel) if p.rel else None}
            for p in sorted(net.places.values(), key=lambda p: p.id)
        ],
        "transitions": [
            {"id": t.id, "label": t.label, "role": t.role, "otype": t.otype,
             "rel": list(t.rel) if t.rel else None}
            for t in sorted(net.transitions.values(), key=lambda t: t.id)
        ],
        "arcs": [
            {"from": a, "to": b, "inscription": [_var_json(v) for v in i.vars]}
            for a, b, i in sorted(arcs, key=lambda x: (x[0], x[1]))
        ],
    }


def write_opid_json(net: Opid) -> bytes:
    return (json.dumps(opid_to_json(net), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def read_opid_json(data) -> Opid:
    doc = _load(data)
    types = _type_names(doc)
    relations = [_pair(r, f"/relations/{i}", types) for i, r in enumerate(_field(doc, "relations", list, "", []))]
    places = []
    for i, p in enumerate(_items(doc, "places")):
        path = f"/places/{i}"
        color = _field(p, "color", list, path)
        if not color or not all(isinstance(s, str) and s in types for s in color):
            raise SchemaViolation(path + "/color", "color must list declared types")
        role = _field(p, "role", str, path, "core")
        if role not in PLACE_ROLES:
            raise SchemaViolation(path + "/role", f"unknown place role {role!r}")
        places.append(OPlace(_field(p, "id", str, path), tuple(color), role,
                             _pair(p.get("rel"), path + "/rel", types)))
    transitions = []
    for i, t in enumerate(_items(doc, "transitions")):
        path = f"/transitions/{i}"
        role = _field(t, "role", str, path, "core")
        if role not in TRANSITION_ROLES:
            raise SchemaViolation(path + "/role", f"unknown transition role {role!r}")
        otype = _field(t, "otype", (str, type(None)), path, None)
        if otype is not None and otype not in types:
            raise SchemaViolation(path + "/otype", f"undeclared type {otype!r}")
        transitions.append(OTransition(_field(t, "id", str, path), _field(t, "label", (str, type(None)), path, None),
                                       role, otype, _pair(t.get("rel"), path + "/rel", types)))
    _unique_ids([p.id for p in places] + [t.id for t in transitions], "/nodes")
    pids = {p.id for p in places}
    tids = {t.id for t in transitions}
    fin, fout = {}, {}
    for i, a in enumerate(_items(doc, "arcs")):
        path = f"/arcs/{i}"
        src, dst = _field(a, "from", str, path), _field(a, "to", str, path)
        variables = [_read_var(v, f"{path}/inscription/{j}", types)
                     for j, v in enumerate(_field(a, "inscription", list, path))]
        inscription = _inscription(variables, path + "/inscription")
        if src in pids and dst in tids:
            fin[(src, dst)] = inscription
        elif src in tids and dst in pids:
            fout[(src, dst)] = inscription
        else:
            raise SchemaViolation(path, f"arc {src} -> {dst} must join a place and a transition")
    return Opid(types, places, transitions, fin, fout, relations)


# -- PNML ----------------------------------------------------------------------

def _text(parent, tag, value):
    el = ET.SubElement(parent, tag)
    ET.SubElement(el, "text").text = value
    return el


def _tool(parent):
    return ET.SubElement(parent, "toolspecific", tool=TOOL, version=TOOL_VERSION)


def _rel(parent, rel):
    if rel:
        ET.SubElement(parent, "rel", many=rel[0], one=rel[1])


def write_opid_pnml(net: Opid) -> bytes:
    """PNML document; colors, roles and inscriptions sit in ``toolspecific`` blocks."""
    for s in net.types:
        if "," in s:
            raise ValueError(f"type name {s!r} contains a comma and cannot be written as a color")
    root = ET.Element("pnml")
    net_el = ET.SubElement(root, "net", id="opid", type=PTNET)
    _text(net_el, "name", "opid")
    tool = _tool(net_el)
    types_el = ET.SubElement(tool, "types")
    for s in net.types:
        ET.SubElement(types_el, "type").text = s
    rels = ET.SubElement(tool, "relations")
    for many, one in net.relations:
        ET.SubElement(rels, "relation", many=many, one=one)
    page = ET.SubElement(net_el, "page", id="page0")
    for p in sorted(net.places.values(), key=lambda p: p.id):
        el = ET.SubElement(page, "place", id=p.id)
        _text(el, "name", p.id)
        ext = _tool(el)
        ET.SubElement(ext, "color").text = ",".join(p.color)
        ET.SubElement(ext, "role").text = p.role
        _rel(ext, p.rel)
    for t in sorted(net.transitions.values(), key=lambda t: t.id):
        el = ET.SubElement(page, "transition", id=t.id)
        _text(el, "name", t.id if t.label is None else t.label)
        ext = _tool(el)
        if t.label is None:
            ET.SubElement(ext, "silent")
        else:
            ET.SubElement(ext, "label").text = t.label
        ET.SubElement(ext, "role").text = t.role
        if t.otype is not None:
            ET.SubElement(ext, "otype").text = t.otype
        _rel(ext, t.rel)
    arcs = [(p, t, i) for (p, t), i in net.fin.items()] + [(t, p, i) for (t, p), i in net.fout.items()]
    for n, (src, dst, i) in enumerate(sorted(arcs, key=lambda x: (x[0], x[1]))):
        el = ET.SubElement(page, "arc", id=f"a{n + 1}", source=src, target=dst)
        _text(el, "inscription", str(i))
        ext = _tool(el)
        for v in i.vars:
            ET.SubElement(ext, "inscription-vars", kind=v.kind, type=v.type, name=v.name)
    ET.indent(root, space="  ")
    return b'<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="utf-8") + b"\n"


def _own_tool(el, path):
    for ext in el.findall("toolspecific"):
        if ext.get("tool") == TOOL:
            return ext
    raise SchemaViolation(path, f'missing <toolspecific tool="{TOOL}">')


def _child_text(el, tag, path, default=...):
    found = el.find(tag)
    if found is None or found.text is None:
        if default is not ...:
            return default
        raise SchemaViolation(f"{path}/{tag}", "missing")
    return found.text.strip()


def _read_rel(ext, path, types):
    el = ext.find("rel")
    if el is None:
        return None
    return _pair([el.get("many"), el.get("one")], path + "/rel", types)


def read_opid_pnml(data: Union[bytes, str]) -> Opid:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedDocument(f"not XML: {exc}") from None
    net_el = root.find("net")
    if root.tag != "pnml" or net_el is None:
        raise SchemaViolation("/pnml/net", "missing")
    tool = _own_tool(net_el, "/pnml/net")
    types = [el.text.strip() for el in tool.findall("types/type") if el.text]
    relations = [_pair([el.get("many"), el.get("one")], "/pnml/net/toolspecific/relations", types)
                 for el in tool.findall("relations/relation")]
    places, transitions, fin, fout = [], [], {}, {}
    pages = net_el.findall("page")
    for k, page in enumerate(pages):
        base = f"/pnml/net/page[{k}]"
        for i, el in enumerate(page.findall("place")):
            path = f"{base}/place[{i}]"
            ext = _own_tool(el, path)
            color = tuple(_child_text(ext, "color", path).split(","))
            if not all(s in types for s in color):
                raise SchemaViolation(path + "/color", "color must list declared types")
            role = _child_text(ext, "role", path, "core")
            if role not in PLACE_ROLES:
                raise SchemaViolation(path + "/role", f"unknown place role {role!r}")
            places.append(OPlace(el.get("id"), color, role, _read_rel(ext, path, types)))
        for i, el in enumerate(page.findall("transition")):
            path = f"{base}/transition[{i}]"
            ext = _own_tool(el, path)
            label = None if ext.find("silent") is not None else _child_text(ext, "label", path)
            role = _child_text(ext, "role", path, "core")
            if role not in TRANSITION_ROLES:
                raise SchemaViolation(path + "/role", f"unknown transition role {role!r}")
            otype = _child_text(ext, "otype", path, None)
            transitions.append(OTransition(el.get("id"), label, role, otype, _read_rel(ext, path, types)))
    pids = {p.id for p in places}
    tids = {t.id for t in transitions}
    for k, page in enumerate(pages):
        for i, el in enumerate(page.findall("arc")):
            path = f"/pnml/net/page[{k}]/arc[{i}]"
            ext = _own_tool(el, path)
            variables = []
            for j, v in enumerate(ext.findall("inscription-vars")):
                variables.append(_read_var(dict(v.attrib), f"{path}/inscription-vars[{j}]", types))
            inscription = _inscription(variables, path)
            src, dst = el.get("source"), el.get("target")
            if src in pids and dst in tids:
                fin[(src, dst)] = inscription
            elif src in tids and dst in pids:
                fout[(src, dst)] = inscription
            else:
                raise SchemaViolation(path, f"arc {src} -> {dst} must join a place and a transition")
    return Opid(types, places, transitions, fin, fout, relations)


# -- DOT -----------------------------------------------------------------------

def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(net: Union[Ocpn, Opid]) -> str:
    """Graphviz source: places are circles labelled by their color,
    silent transitions small black boxes, variable and template arcs bold."""
    lines = [f"digraph {_q('ocpn' if isinstance(net, Ocpn) else 'opid')} {{", "  rankdir=LR;"]
    if isinstance(net, Ocpn):
        places = [(p.id, p.type) for p in net.places.values()]
        edges = [(f.source, f.target, None, f.variable) for f in net.flows]
    else:
        places = [(p.id, ",".join(p.color)) for p in net.places.values()]
        edges = [(p, t, str(i), i.is_template) for (p, t), i in net.fin.items()]
        edges += [(t, p, str(i), i.is_template) for (t, p), i in net.fout.items()]
    for pid, color in sorted(places):
        lines.append(f"  {_q(pid)} [shape=circle, label={_q(color)}, xlabel={_q(pid)}];")
    for t in sorted(net.transitions.values(), key=lambda t: t.id):
        if t.label is None:
            lines.append(f'  {_q(t.id)} [shape=box, style=filled, fillcolor=black, label="", '
                         f"width=0.2, tooltip={_q(t.id)}];")
        else:
            lines.append(f"  {_q(t.id)} [shape=box, label={_q(t.label)}];")
    for src, dst, label, bold in sorted(edges, key=lambda e: (e[0], e[1])):
        attrs = []
        if label is not None:
            attrs.append(f"label={_q(label)}")
        if bold:
            attrs.append("penwidth=2")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_q(src)} -> {_q(dst)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(net: Union[Ocpn, Opid]) -> bytes:
    return to_dot(net).encode("utf-8")
