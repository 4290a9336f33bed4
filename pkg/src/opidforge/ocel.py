"""Object-centric event logs: model, JSON ingestion and co-occurrence."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import cached_property
from typing import Iterable, Union

from .core import Obj
from .errors import (
    DanglingObjectReference,
    MalformedDocument,
    SchemaViolation,
    TypeConflict,
    UnknownObject,
    UnknownType,
)

NATIVE = "native-json"
OCEL2 = "ocel2-json"


@dataclass(frozen=True)
class Event:
    id: str
    activity: str
    objects: frozenset
    # datetime, or an int position for logs without timestamps
    time: Union[datetime, int] = 0

    def types(self) -> set:
        return {o.type for o in self.objects}

    def of_type(self, type_: str) -> frozenset:
        return frozenset(o for o in self.objects if o.type == type_)


@dataclass(eq=False)
class Ocel:
    types: frozenset
    objects: frozenset
    events: tuple = field(default=())

    def __post_init__(self):
        self.types = frozenset(self.types)
        self.objects = frozenset(self.objects)
        ids = {}
        for o in self.objects:
            if o.type not in self.types:
                raise UnknownType(f"object {o.id} has undeclared type {o.type}")
            if ids.setdefault(o.id, o) != o:
                raise TypeConflict(f"object {o.id} has types {ids[o.id].type} and {o.type}")
        for e in self.events:
            if not e.objects:
                raise SchemaViolation(f"/events/{e.id}", "event without objects")
            for o in e.objects:
                if ids.get(o.id) != o:
                    raise DanglingObjectReference(f"event {e.id} references unknown object {o.id}")
        self.events = tuple(sorted(self.events, key=_event_key))
        self._by_id = ids

    def object(self, object_id: str) -> Obj:
        try:
            return self._by_id[object_id]
        except KeyError:
            raise UnknownObject(object_id) from None

    @property
    def activities(self) -> set:
        return {e.activity for e in self.events}

    def objects_of(self, type_: str) -> list:
        return sorted(o for o in self.objects if o.type == type_)

    @cached_property
    def cooccurrence(self) -> dict:
        """Map ``obj -> type -> set of objects`` seen together in some event."""
        index = defaultdict(lambda: defaultdict(set))
        for e in self.events:
            for o in e.objects:
                row = index[o]
                for other in e.objects:
                    row[other.type].add(other)
        return {o: {t: frozenset(s) for t, s in row.items()} for o, row in index.items()}

    @cached_property
    def observed(self) -> frozenset:
        """Objects that occur in at least one event."""
        return frozenset(o for e in self.events for o in e.objects)

    def visible_sequence(self) -> list:
        return [(e.activity, e.objects) for e in self.events]


def _event_key(e: Event):
    t = e.time
    if isinstance(t, datetime):
        return (1, t.timestamp(), e.id)
    return (0, t, e.id)


def lo(log: Ocel, o: Obj, type_: str) -> frozenset:
    """Objects of ``type_`` that occur together with ``o`` in some event.

    ``o`` itself is included when it has type ``type_`` and occurs at all.
    """
    if isinstance(o, str):
        o = log.object(o)
    if o not in log.objects:
        raise UnknownObject(o.id)
    if type_ not in log.types:
        raise UnknownType(type_)
    return log.cooccurrence.get(o, {}).get(type_, frozenset())


def parse_time(raw, where: str) -> datetime:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return datetime.fromtimestamp(raw, tz=timezone.utc)
    if not isinstance(raw, str):
        raise SchemaViolation(where, "timestamp must be an ISO-8601 string")
    text = raw.strip()
    if text.endswith("Z") or text.endswith("z"):
        text = text[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError:
        raise SchemaViolation(where, f"bad timestamp {raw!r}") from None
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp


def _load(data) -> dict:
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"not UTF-8: {exc}") from None
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(str(exc)) from None
    if not isinstance(data, dict):
        raise MalformedDocument("top-level JSON value must be an object")
    return data


def _require(doc, key, kind, path):
    if key not in doc:
        raise SchemaViolation(f"{path}/{key}", "missing")
    value = doc[key]
    if not isinstance(value, kind):
        raise SchemaViolation(f"{path}/{key}", f"expected {kind.__name__}")
    return value


def parse_ocel(data, format: str = NATIVE) -> Ocel:
    """Parse a log from bytes, text or an already-decoded dict."""
    doc = _load(data)
    if format == NATIVE:
        return _parse_native(doc)
    if format == OCEL2:
        return _parse_ocel2(doc)
    raise ValueError(f"unknown log format {format!r}")


def sniff_format(doc: dict) -> str:
    if "objectTypes" in doc or any(
        isinstance(e, dict) and "relationships" in e for e in doc.get("events", [])
    ):
        return OCEL2
    return NATIVE


def load_ocel(data) -> Ocel:
    doc = _load(data)
    return parse_ocel(doc, sniff_format(doc))


def _build(types, raw_objects, raw_events) -> Ocel:
    objects = {}
    for i, (oid, otype) in enumerate(raw_objects):
        seen = objects.get(oid)
        if seen is not None and seen.type != otype:
            raise TypeConflict(f"object {oid} has types {seen.type} and {otype}")
        objects[oid] = Obj(oid, otype)
    timed = [t is not None for _, _, t, _ in raw_events]
    if any(timed) and not all(timed):
        raise SchemaViolation("/events", "either all events carry a time or none does")
    events = []
    for i, (eid, activity, stamp, refs) in enumerate(raw_events):
        objs = set()
        for ref in refs:
            if ref not in objects:
                raise DanglingObjectReference(f"event {eid} references unknown object {ref}")
            objs.add(objects[ref])
        if not objs:
            raise SchemaViolation(f"/events/{i}/objects", "event without objects")
        # untimed logs get their list position as a synthetic timestamp
        time = stamp if stamp is not None else i
        events.append(Event(eid, activity, frozenset(objs), time))
    ids = [e.id for e in events]
    if len(set(ids)) != len(ids):
        raise SchemaViolation("/events", "duplicate event id")
    return Ocel(frozenset(types), frozenset(objects.values()), tuple(events))


def _parse_native(doc: dict) -> Ocel:
    types = _require(doc, "types", list, "")
    for i, t in enumerate(types):
        if not isinstance(t, str) or not t:
            raise SchemaViolation(f"/types/{i}", "type name must be a non-empty string")
    raw_objects = []
    for i, o in enumerate(_require(doc, "objects", list, "")):
        if not isinstance(o, dict):
            raise SchemaViolation(f"/objects/{i}", "expected object")
        oid = _require(o, "id", str, f"/objects/{i}")
        otype = _require(o, "type", str, f"/objects/{i}")
        if otype not in types:
            raise UnknownType(f"object {oid} has undeclared type {otype}")
        raw_objects.append((oid, otype))
    raw_events = []
    for i, e in enumerate(_require(doc, "events", list, "")):
        path = f"/events/{i}"
        if not isinstance(e, dict):
            raise SchemaViolation(path, "expected object")
        eid = _require(e, "id", str, path)
        activity = _require(e, "activity", str, path)
        refs = _require(e, "objects", list, path)
        stamp = parse_time(e["time"], path + "/time") if e.get("time") is not None else None
        raw_events.append((eid, activity, stamp, refs))
    return _build(types, raw_objects, raw_events)


def _parse_ocel2(doc: dict) -> Ocel:
    types = []
    for i, t in enumerate(doc.get("objectTypes", [])):
        name = t.get("name") if isinstance(t, dict) else t
        if not isinstance(name, str) or not name:
            raise SchemaViolation(f"/objectTypes/{i}", "type needs a name")
        types.append(name)
    raw_objects = []
    for i, o in enumerate(_require(doc, "objects", list, "")):
        if not isinstance(o, dict):
            raise SchemaViolation(f"/objects/{i}", "expected object")
        oid = _require(o, "id", str, f"/objects/{i}")
        otype = _require(o, "type", str, f"/objects/{i}")
        if otype not in types:
            # OCEL 2.0 files occasionally omit the type table
            types.append(otype)
        raw_objects.append((oid, otype))
    raw_events = []
    for i, e in enumerate(_require(doc, "events", list, "")):
        path = f"/events/{i}"
        if not isinstance(e, dict):
            raise SchemaViolation(path, "expected object")
        eid = _require(e, "id", str, path)
        activity = e.get("type", e.get("activity"))
        if not isinstance(activity, str):
            raise SchemaViolation(path + "/type", "missing activity")
        refs = []
        for j, rel in enumerate(e.get("relationships", [])):
            if not isinstance(rel, dict) or not isinstance(rel.get("objectId"), str):
                raise SchemaViolation(f"{path}/relationships/{j}", "missing objectId")
            refs.append(rel["objectId"])
        stamp = parse_time(e["time"], path + "/time") if e.get("time") is not None else None
        raw_events.append((eid, activity, stamp, refs))
    return _build(types, raw_objects, raw_events)


def ocel_to_json(log: Ocel) -> dict:
    """Native JSON document for ``log``."""
    events = []
    for e in log.events:
        item = {"id": e.id, "activity": e.activity}
        if isinstance(e.time, datetime):
            item["time"] = e.time.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")
        item["objects"] = sorted(o.id for o in e.objects)
        events.append(item)
    return {
        "types": sorted(log.types),
        "objects": [{"id": o.id, "type": o.type} for o in sorted(log.objects)],
        "events": events,
    }


def make_log(types: Iterable[str], events: Iterable, objects: Iterable[Obj] = ()) -> Ocel:
    """Build an untimed log from ``(activity, objects)`` pairs in order.

    Objects referenced by events are added to the object table automatically.
    """
    table = {o.id: o for o in objects}
    built = []
    for i, (activity, objs) in enumerate(events):
        objs = frozenset(objs)
        for o in objs:
            table.setdefault(o.id, o)
        built.append(Event(f"e{i + 1}", activity, objs, i))
    return Ocel(frozenset(types), frozenset(table.values()), tuple(built))
