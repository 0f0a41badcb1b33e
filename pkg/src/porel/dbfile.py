"""JSON database files.

Layout::

    {"relations": {"Rest": {"arity": 2,
                            "tuples": [{"id": "g", "values": ["Gagnaire", 8]}, ...],
                            "order": [["g", "t"], ...]}},
     "attributes": {"Rest": ["restname", "distr"]}}

``attributes`` is optional and only feeds named-attribute sugar in queries.
"""

from __future__ import annotations

import json

from .core import InvalidRelation, PoDatabase, PoRelation, is_domain_value, validate


class DatabaseError(ValueError):
    pass


def _value(v, where: str):
    if not is_domain_value(v):
        raise DatabaseError(f"{where}: value {v!r} is neither a natural number nor a string")
    return v


def relation_from_json(name: str, spec: dict) -> PoRelation:
    if not isinstance(spec, dict):
        raise DatabaseError(f"relation {name}: expected an object")
    try:
        arity = spec["arity"]
    except KeyError:
        raise DatabaseError(f"relation {name}: missing 'arity'") from None
    if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
        raise DatabaseError(f"relation {name}: arity must be a non-negative integer")
    ids, labels = [], []
    index = {}
    for k, entry in enumerate(spec.get("tuples", [])):
        if isinstance(entry, dict):
            ident, values = entry.get("id", f"t{k}"), entry.get("values")
        else:
            ident, values = f"t{k}", entry
        if not isinstance(values, list):
            raise DatabaseError(f"relation {name}: tuple {ident!r} needs a 'values' list")
        ident = str(ident)
        if ident in index:
            raise DatabaseError(f"relation {name}: duplicate identifier {ident!r}")
        if len(values) != arity:
            raise DatabaseError(f"relation {name}: tuple {ident!r} has {len(values)} values, arity is {arity}")
        index[ident] = len(ids)
        ids.append(ident)
        labels.append(tuple(_value(v, f"relation {name}, tuple {ident!r}") for v in values))
    pairs = []
    for pair in spec.get("order", []):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise DatabaseError(f"relation {name}: order entries must be [id, id] pairs")
        a, b = (str(x) for x in pair)
        for x in (a, b):
            if x not in index:
                raise DatabaseError(f"relation {name}: order pair [{a}, {b}] references undeclared id {x!r}")
        pairs.append((index[a], index[b]))
    rel = PoRelation.build(labels, pairs, arity=arity, names=ids, check=False)
    problems = validate(rel)
    if problems:
        raise DatabaseError(f"relation {name}: " + "; ".join(problems))
    return rel


def parse_database(text: str) -> PoDatabase:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DatabaseError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("relations", {}), dict):
        raise DatabaseError("expected an object with a 'relations' object")
    rels = {name: relation_from_json(name, spec) for name, spec in doc.get("relations", {}).items()}
    attrs = doc.get("attributes", {})
    for name, names in attrs.items():
        if name not in rels:
            raise DatabaseError(f"attributes given for unknown relation {name!r}")
        if not isinstance(names, list) or len(names) != rels[name].arity:
            raise DatabaseError(f"relation {name}: attribute list must name all {rels[name].arity} positions")
    return PoDatabase(rels, {k: tuple(v) for k, v in attrs.items()})


def load_database(path: str) -> PoDatabase:
    with open(path, encoding="utf-8") as f:
        return parse_database(f.read())


def relation_to_json(r: PoRelation) -> dict:
    names = [str(r.name_of(i)) if r.names is not None else f"t{i}" for i in range(len(r))]
    return {
        "arity": r.arity,
        "tuples": [{"id": names[i], "values": list(t)} for i, t in enumerate(r.labels)],
        "order": [[names[a], names[b]] for a, b in r.cover_edges()],
    }


def serialize_database(db: PoDatabase) -> str:
    doc = {"relations": {name: relation_to_json(r) for name, r in db.relations.items()}}
    if db.attributes:
        doc["attributes"] = {k: list(v) for k, v in db.attributes.items()}
    return json.dumps(doc, indent=2)


__all__ = ["DatabaseError", "InvalidRelation", "load_database", "parse_database", "relation_to_json", "serialize_database"]
