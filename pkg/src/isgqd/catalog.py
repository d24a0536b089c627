"""Semigroup specification files: schema, loader, and the bundled catalog."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .constructions import (
    brandt,
    brandt_z_window,
    clifford,
    cyclic_group,
    default_tower_generators,
    direct_product,
    from_partial_bijections,
    group_from_table,
    qdnotr_family,
    quotient_tower,
    symmetric_inverse_monoid,
    trivial_group,
)
from .constructions.tower import QuotientTower
from .errors import IsgqdError, SpecInvalid, Unsupported
from .groups import ZWindow
from .semigroup import InverseSemigroup, build_from_table

_TABLE = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}

_GROUP = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["trivial", "cyclic", "table", "Z", "product"]},
        "n": {"type": "integer", "minimum": 1},
        "elements": {"type": "array", "items": {"type": "string"}},
        "mul": _TABLE,
        "window": {"type": "integer", "minimum": 1},
        "factors": {"type": "array"},
    },
}

SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "format_version": {"const": 1},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "type": {"enum": ["table", "partial_bijections", "brandt", "clifford", "symmetric_inverse", "qdnotr", "tower"]},
    },
    "allOf": [
        {"if": {"properties": {"type": {"const": "table"}}},
         "then": {"required": ["elements", "mul", "zero"],
                  "properties": {"elements": {"type": "array", "items": {"type": "string"}}, "mul": _TABLE,
                                 "zero": {"type": ["string", "integer"]}}}},
        {"if": {"properties": {"type": {"const": "partial_bijections"}}},
         "then": {"required": ["degree", "generators"],
                  "properties": {"degree": {"type": "integer", "minimum": 1}, "generators": _TABLE}}},
        {"if": {"properties": {"type": {"const": "brandt"}}},
         "then": {"required": ["group", "k"], "properties": {"group": _GROUP, "k": {"type": "integer", "minimum": 1}}}},
        {"if": {"properties": {"type": {"const": "clifford"}}},
         "then": {"required": ["labels", "meet"],
                  "properties": {"labels": {"type": "array", "items": {"type": "string"}}, "meet": _TABLE,
                                 "groups": {"type": "array", "items": _GROUP},
                                 "homs": {"type": "array", "items": {
                                     "type": "object", "required": ["from", "to", "map"],
                                     "properties": {"from": {"type": "integer"}, "to": {"type": "integer"},
                                                    "map": {"type": "array", "items": {"type": "integer"}}}}}}}},
        {"if": {"properties": {"type": {"const": "symmetric_inverse"}}},
         "then": {"required": ["n"], "properties": {"n": {"type": "integer", "minimum": 1, "maximum": 4}}}},
        {"if": {"properties": {"type": {"const": "qdnotr"}}},
         "then": {"required": ["k"], "properties": {"k": {"type": "integer", "minimum": 1}, "unital": {"type": "boolean"}}}},
        {"if": {"properties": {"type": {"const": "tower"}}},
         "then": {"required": ["radius"],
                  "properties": {"radius": {"type": "integer", "minimum": 1},
                                 "levels": {"type": "array", "items": _TABLE},
                                 "default": {"type": "object"},
                                 "truncate": {"type": ["integer", "null"]},
                                 "nonfl": {"type": "object"}}}},
    ],
}


@dataclass
class LoadedSpec:
    name: str
    raw: dict
    semigroup: InverseSemigroup | None
    tower: QuotientTower | None = None
    notes: list[str] = field(default_factory=list)


def _group(spec: dict):
    t = spec["type"]
    if t == "trivial":
        return trivial_group()
    if t == "cyclic":
        return cyclic_group(spec["n"])
    if t == "table":
        return group_from_table(spec["elements"], spec["mul"])
    if t == "product":
        g = _group(spec["factors"][0])
        for f in spec["factors"][1:]:
            g = direct_product(g, _group(f))
        return g
    return ZWindow(spec["window"])


def parse_text(text: str, source: str = "<spec>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecInvalid(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise SpecInvalid(f"{source}: at {where}: {exc.message}") from exc
    return data


def build(data: dict, name: str = "spec") -> LoadedSpec:
    t = data["type"]
    try:
        if t == "table":
            zero = data["zero"]
            zero = data["elements"].index(zero) if isinstance(zero, str) else zero
            S = build_from_table(data["elements"], data["mul"], zero, meta={"family": "table"})
        elif t == "partial_bijections":
            S = from_partial_bijections(data["generators"], data["degree"])
        elif t == "brandt":
            grp = _group(data["group"])
            S = brandt_z_window(data["k"], grp.N) if isinstance(grp, ZWindow) else brandt(grp, data["k"])
        elif t == "clifford":
            groups = [_group(g) for g in data["groups"]] if "groups" in data else None
            homs = {(h["from"], h["to"]): h["map"] for h in data.get("homs", [])}
            S = clifford(data["labels"], data["meet"], groups, homs)
        elif t == "symmetric_inverse":
            S = symmetric_inverse_monoid(data["n"])
        elif t == "qdnotr":
            S = qdnotr_family(data["k"], data.get("unital", True))
        else:
            if "levels" in data:
                gens = [(lv[0], lv[1]) for lv in data["levels"]]
            else:
                gens = default_tower_generators(**data.get("default", {}))
            tower = quotient_tower(gens, data["radius"], meta={"name": name})
            m = data.get("truncate")
            S = tower.truncate(m) if m is not None else None
            return LoadedSpec(name, data, S, tower)
    except IsgqdError:
        raise
    except (ValueError, IndexError, KeyError) as exc:
        raise SpecInvalid(f"{name}: {exc}") from exc
    return LoadedSpec(name, data, S)


def load_spec(path: str | Path) -> LoadedSpec:
    path = Path(path)
    if not path.exists():
        raise SpecInvalid(f"{path}: no such file")
    return build(parse_text(path.read_text(), str(path)), path.stem)


def catalog_names() -> list[str]:
    root = resources.files("isgqd") / "catalog"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def catalog_path(name: str) -> Path:
    p = resources.files("isgqd") / "catalog" / f"{name}.json"
    if not p.is_file():
        raise Unsupported(f"no catalog entry {name!r}")
    return Path(str(p))


def load_catalog(name: str) -> LoadedSpec:
    return load_spec(catalog_path(name))


def semigroup_catalog() -> dict[str, InverseSemigroup]:
    """Every catalog entry that materializes a semigroup."""
    out = {}
    for name in catalog_names():
        spec = load_catalog(name)
        if spec.semigroup is not None:
            out[name] = spec.semigroup
    return out


def resolve(path_or_name: str) -> LoadedSpec:
    """A spec file path, or the name of a bundled catalog entry."""
    p = Path(path_or_name)
    if p.suffix == ".json" or p.exists():
        return load_spec(p)
    return load_catalog(path_or_name)


__all__ = ["SCHEMA", "LoadedSpec", "build", "catalog_names", "catalog_path", "load_catalog", "load_spec",
           "parse_text", "resolve", "semigroup_catalog"]
