"""Architecture model ingestion.

A model document (JSON or YAML) lists the components of a system and the
links between them; importing one seeds the board with one asset card per
component. Links are kept for context but carry no board semantics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import yaml

from .errors import SchemaError

MODEL_VERSION = 1


@dataclass(frozen=True)
class ComponentSpec:
    id: str
    name: str
    asset_type: str
    description: str = ""
    provider: str | None = None

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "name": self.name,
            "type": self.asset_type,
            "description": self.description,
        }
        if self.provider is not None:
            doc["provider"] = self.provider
        return doc


@dataclass(frozen=True)
class ComponentLink:
    source: str
    target: str
    channel: str = ""

    def to_doc(self) -> dict:
        return {"from": self.source, "to": self.target, "channel": self.channel}


@dataclass(frozen=True)
class ArchitectureModel:
    name: str
    components: tuple[ComponentSpec, ...]
    links: tuple[ComponentLink, ...] = ()


def _require_str(doc: Mapping, key: str, where: str, allow_empty: bool = False) -> str:
    value = doc.get(key)
    if not isinstance(value, str) or (not allow_empty and not value.strip()):
        raise SchemaError(f"{key!r} must be a non-empty string", where)
    return value


def model_from_doc(doc) -> ArchitectureModel:
    if not isinstance(doc, Mapping):
        raise SchemaError("model document must be an object")
    if doc.get("model_version") != MODEL_VERSION:
        raise SchemaError(f"unsupported model_version {doc.get('model_version')!r}")
    name = _require_str(doc, "name", "model")

    raw_components = doc.get("components")
    if not isinstance(raw_components, list):
        raise SchemaError("'components' must be a list")

    components: list[ComponentSpec] = []
    seen: set[str] = set()
    for i, cdoc in enumerate(raw_components):
        where = f"components[{i}]"
        if not isinstance(cdoc, Mapping):
            raise SchemaError("component must be an object", where)
        cid = _require_str(cdoc, "id", where)
        if cid in seen:
            raise SchemaError(f"duplicate component id {cid!r}", where)
        seen.add(cid)
        provider = cdoc.get("provider")
        if provider is not None and not isinstance(provider, str):
            raise SchemaError("'provider' must be a string", where)
        components.append(
            ComponentSpec(
                id=cid,
                name=_require_str(cdoc, "name", where),
                asset_type=_require_str(cdoc, "type", where),
                description=str(cdoc.get("description", "")),
                provider=provider,
            )
        )

    links: list[ComponentLink] = []
    for i, ldoc in enumerate(doc.get("links", ()) or ()):
        where = f"links[{i}]"
        if not isinstance(ldoc, Mapping):
            raise SchemaError("link must be an object", where)
        source = _require_str(ldoc, "from", where)
        target = _require_str(ldoc, "to", where)
        for endpoint in (source, target):
            if endpoint not in seen:
                raise SchemaError(f"link references unknown component {endpoint!r}", where)
        links.append(
            ComponentLink(source=source, target=target, channel=str(ldoc.get("channel", "")))
        )

    return ArchitectureModel(name=name, components=tuple(components), links=tuple(links))


def parse_model(text: str) -> ArchitectureModel:
    """Parse a model document from JSON or YAML text.

    JSON is tried first when the text looks like JSON so its error positions
    survive; otherwise YAML (a superset here) handles both.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    else:
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise SchemaError(f"invalid YAML: {exc}") from None
    return model_from_doc(doc)


def model_to_assets(model: ArchitectureModel) -> list:
    """One card seed per component, placed in the first column with an empty
    risk list. Total: an empty model yields an empty list (the import layer
    is where empty imports get rejected)."""
    from .board import AssetCard  # deferred: board depends on this module's types

    return [
        AssetCard(
            id=c.id,
            name=c.name,
            asset_type=c.asset_type,
            description=c.description,
        )
        for c in model.components
    ]


def model_to_doc(model: ArchitectureModel) -> dict:
    return {
        "model_version": MODEL_VERSION,
        "name": model.name,
        "components": [c.to_doc() for c in model.components],
        "links": [l.to_doc() for l in model.links],
    }


def serialize_model(model: ArchitectureModel) -> str:
    return json.dumps(model_to_doc(model), indent=2) + "\n"
