"""Threat and control knowledge base.

An immutable catalog of STRIDE-categorized threats, security controls with
compliance cross-references, and threat-to-control mappings carrying the
minimum risk level at which a control becomes required. Extension never
mutates a catalog in place; it returns a new one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from typing import Mapping

from .domain import RiskLevel, StrideCategory, _check_factor
from .errors import NotFoundError, SchemaError

KB_VERSION = 1


@dataclass(frozen=True)
class ThreatEntry:
    id: str
    title: str
    description: str
    stride: StrideCategory
    asset_types: frozenset[str]
    # Optional pre-populated technical/business impact factors (0-9 each),
    # offered as editable starting values when scoring.
    impact_defaults: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "title": self.title,
            "description": self.description,
            "stride": self.stride.value,
            "asset_types": sorted(self.asset_types),
        }
        if self.impact_defaults is not None:
            doc["impact_defaults"] = {
                "technical": list(self.impact_defaults[0]),
                "business": list(self.impact_defaults[1]),
            }
        return doc


@dataclass(frozen=True)
class ControlEntry:
    id: str
    title: str
    description: str
    ccm_ids: tuple[str, ...]
    measurement: str

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "description": self.description,
            "ccm_ids": list(self.ccm_ids),
            "measurement": self.measurement,
        }


@dataclass(frozen=True)
class ThreatControlMapping:
    threat_id: str
    control_id: str
    minimum_level: RiskLevel

    def to_doc(self) -> dict:
        return {
            "threat_id": self.threat_id,
            "control_id": self.control_id,
            "minimum_level": self.minimum_level.value,
        }


@dataclass(frozen=True)
class KnowledgeBase:
    asset_types: frozenset[str]
    threats: Mapping[str, ThreatEntry]
    controls: Mapping[str, ControlEntry]
    mappings: tuple[ThreatControlMapping, ...]

    def threat(self, threat_id: str) -> ThreatEntry:
        entry = self.threats.get(threat_id)
        if entry is None:
            raise NotFoundError(f"unknown threat {threat_id!r}")
        return entry

    def control(self, control_id: str) -> ControlEntry:
        entry = self.controls.get(control_id)
        if entry is None:
            raise NotFoundError(f"unknown control {control_id!r}")
        return entry


def _parse_impact_defaults(doc, where: str):
    if doc is None:
        return None
    if not isinstance(doc, Mapping) or set(doc) != {"technical", "business"}:
        raise SchemaError(
            "impact_defaults must hold exactly 'technical' and 'business'", where
        )
    groups = []
    for key in ("technical", "business"):
        values = doc[key]
        if not isinstance(values, list) or len(values) != 4:
            raise SchemaError(f"{key} must be a list of 4 factors", where)
        try:
            groups.append(tuple(_check_factor(v) for v in values))
        except Exception as exc:
            raise SchemaError(str(exc), where) from None
    return (groups[0], groups[1])


def _parse_threat(doc, where: str, asset_types: frozenset[str]) -> ThreatEntry:
    for key in ("id", "title", "description", "stride", "asset_types"):
        if key not in doc:
            raise SchemaError(f"threat missing {key!r}", where)
    try:
        stride = StrideCategory(doc["stride"])
    except ValueError:
        raise SchemaError(f"unknown STRIDE category {doc['stride']!r}", where) from None
    tags = doc["asset_types"]
    if not isinstance(tags, list):
        raise SchemaError("asset_types must be a list", where)
    dangling = sorted(set(tags) - asset_types)
    if dangling:
        raise SchemaError(f"undeclared asset type(s): {', '.join(dangling)}", where)
    return ThreatEntry(
        id=doc["id"],
        title=doc["title"],
        description=doc["description"],
        stride=stride,
        asset_types=frozenset(tags),
        impact_defaults=_parse_impact_defaults(doc.get("impact_defaults"), where),
    )


def _parse_control(doc, where: str) -> ControlEntry:
    for key in ("id", "title", "description", "ccm_ids", "measurement"):
        if key not in doc:
            raise SchemaError(f"control missing {key!r}", where)
    if not isinstance(doc["ccm_ids"], list):
        raise SchemaError("ccm_ids must be a list", where)
    return ControlEntry(
        id=doc["id"],
        title=doc["title"],
        description=doc["description"],
        ccm_ids=tuple(doc["ccm_ids"]),
        measurement=doc["measurement"],
    )


def _parse_mapping(doc, where: str) -> ThreatControlMapping:
    for key in ("threat_id", "control_id", "minimum_level"):
        if key not in doc:
            raise SchemaError(f"mapping missing {key!r}", where)
    try:
        level = RiskLevel(doc["minimum_level"])
    except ValueError:
        raise SchemaError(
            f"unknown risk level {doc['minimum_level']!r}", where
        ) from None
    return ThreatControlMapping(
        threat_id=doc["threat_id"], control_id=doc["control_id"], minimum_level=level
    )


def knowledge_base_from_doc(doc) -> KnowledgeBase:
    if not isinstance(doc, Mapping):
        raise SchemaError("knowledge base document must be a JSON object")
    if doc.get("kb_version") != KB_VERSION:
        raise SchemaError(f"unsupported kb_version {doc.get('kb_version')!r}")
    asset_types = frozenset(doc.get("asset_types", ()))
    if not asset_types:
        raise SchemaError("asset_types must be a non-empty list")

    threats: dict[str, ThreatEntry] = {}
    for i, tdoc in enumerate(doc.get("threats", ())):
        entry = _parse_threat(tdoc, f"threats[{i}]", asset_types)
        if entry.id in threats:
            raise SchemaError(f"duplicate threat id {entry.id!r}", f"threats[{i}]")
        threats[entry.id] = entry

    controls: dict[str, ControlEntry] = {}
    for i, cdoc in enumerate(doc.get("controls", ())):
        entry = _parse_control(cdoc, f"controls[{i}]")
        if entry.id in controls:
            raise SchemaError(f"duplicate control id {entry.id!r}", f"controls[{i}]")
        controls[entry.id] = entry

    mappings = []
    seen_pairs = set()
    for i, mdoc in enumerate(doc.get("mappings", ())):
        mapping = _parse_mapping(mdoc, f"mappings[{i}]")
        if mapping.threat_id not in threats:
            raise SchemaError(
                f"mapping references unknown threat {mapping.threat_id!r}",
                f"mappings[{i}]",
            )
        if mapping.control_id not in controls:
            raise SchemaError(
                f"mapping references unknown control {mapping.control_id!r}",
                f"mappings[{i}]",
            )
        pair = (mapping.threat_id, mapping.control_id)
        if pair in seen_pairs:
            raise SchemaError(f"duplicate mapping for {pair}", f"mappings[{i}]")
        seen_pairs.add(pair)
        mappings.append(mapping)

    return KnowledgeBase(
        asset_types=asset_types,
        threats=threats,
        controls=controls,
        mappings=tuple(mappings),
    )


def load_knowledge_base(text: str) -> KnowledgeBase:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return knowledge_base_from_doc(doc)


def knowledge_base_to_doc(kb: KnowledgeBase) -> dict:
    return {
        "kb_version": KB_VERSION,
        "asset_types": sorted(kb.asset_types),
        "threats": [kb.threats[t].to_doc() for t in sorted(kb.threats)],
        "controls": [kb.controls[c].to_doc() for c in sorted(kb.controls)],
        "mappings": [
            m.to_doc()
            for m in sorted(kb.mappings, key=lambda m: (m.threat_id, m.control_id))
        ],
    }


def serialize_knowledge_base(kb: KnowledgeBase) -> str:
    return json.dumps(knowledge_base_to_doc(kb), indent=2, sort_keys=True) + "\n"


def load_default_knowledge_base() -> KnowledgeBase:
    text = resources.files("riskboard.data").joinpath("knowledge.json").read_text()
    return load_knowledge_base(text)


def recommend_threats(kb: KnowledgeBase, asset_type: str) -> list[ThreatEntry]:
    """Threats applicable to an asset type, sorted by id.

    A threat with an empty asset_types set applies universally.
    """
    return [
        kb.threats[tid]
        for tid in sorted(kb.threats)
        if not kb.threats[tid].asset_types or asset_type in kb.threats[tid].asset_types
    ]


def recommend_controls(
    kb: KnowledgeBase, threat_id: str, level: RiskLevel
) -> tuple[list[ControlEntry], list[ControlEntry]]:
    """Partition the catalog's controls for a threat at a given risk level.

    Required: controls mapped to the threat whose minimum level is at or
    below the given level; Low-level risks require nothing. Optional:
    every other control, available for defense in depth.
    """
    kb.threat(threat_id)
    required_ids = set()
    if level != RiskLevel.LOW:
        for m in kb.mappings:
            if m.threat_id == threat_id and m.minimum_level.rank <= level.rank:
                required_ids.add(m.control_id)
    required = [kb.controls[c] for c in sorted(required_ids)]
    optional = [kb.controls[c] for c in sorted(set(kb.controls) - required_ids)]
    return required, optional


def parse_extension(doc) -> ThreatEntry | ControlEntry | ThreatControlMapping:
    """Parse a single catalog-extension entry: {"kind": ..., "entry": {...}}.

    The threat/control/mapping payload shape matches the catalog document.
    Reference checks against an actual catalog happen in extend_catalog.
    """
    if not isinstance(doc, Mapping) or "kind" not in doc or "entry" not in doc:
        raise SchemaError("extension must be an object with 'kind' and 'entry'")
    kind, entry = doc["kind"], doc["entry"]
    if kind == "threat":
        # Asset-type tags are validated against the target catalog on merge.
        tags = entry.get("asset_types", ())
        return _parse_threat(entry, "entry", frozenset(tags))
    if kind == "control":
        return _parse_control(entry, "entry")
    if kind == "mapping":
        return _parse_mapping(entry, "entry")
    raise SchemaError(f"unknown extension kind {kind!r}")


def extend_catalog(
    kb: KnowledgeBase, entry: ThreatEntry | ControlEntry | ThreatControlMapping
) -> KnowledgeBase:
    """Return a new catalog with the entry added. Duplicate ids and dangling
    references are rejected; the input catalog is never modified."""
    if isinstance(entry, ThreatEntry):
        if entry.id in kb.threats:
            raise SchemaError(f"duplicate threat id {entry.id!r}")
        dangling = sorted(entry.asset_types - kb.asset_types)
        if dangling:
            raise SchemaError(f"undeclared asset type(s): {', '.join(dangling)}")
        return replace(kb, threats={**kb.threats, entry.id: entry})
    if isinstance(entry, ControlEntry):
        if entry.id in kb.controls:
            raise SchemaError(f"duplicate control id {entry.id!r}")
        return replace(kb, controls={**kb.controls, entry.id: entry})
    if isinstance(entry, ThreatControlMapping):
        if entry.threat_id not in kb.threats:
            raise SchemaError(f"mapping references unknown threat {entry.threat_id!r}")
        if entry.control_id not in kb.controls:
            raise SchemaError(
                f"mapping references unknown control {entry.control_id!r}"
            )
        if any(
            m.threat_id == entry.threat_id and m.control_id == entry.control_id
            for m in kb.mappings
        ):
            raise SchemaError(
                f"duplicate mapping for ({entry.threat_id!r}, {entry.control_id!r})"
            )
        return replace(kb, mappings=kb.mappings + (entry,))
    raise SchemaError(f"unsupported extension entry {type(entry).__name__}")
