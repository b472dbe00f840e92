"""Threat/control catalog: parsing, lookup, recommendation, extension."""

import pytest

from riskboard.domain import RiskLevel, StrideCategory
from riskboard.errors import NotFoundError, SchemaError
from riskboard.knowledge import (
    ControlEntry,
    ThreatControlMapping,
    ThreatEntry,
    extend_catalog,
    knowledge_base_from_doc,
    knowledge_base_to_doc,
    load_default_knowledge_base,
    load_knowledge_base,
    parse_extension,
    recommend_controls,
    recommend_threats,
    serialize_knowledge_base,
)

KB = load_default_knowledge_base()


def minimal_doc(**overrides):
    doc = {
        "kb_version": 1,
        "asset_types": ["service"],
        "threats": [
            {
                "id": "T1",
                "title": "Forged identity",
                "description": "An attacker presents a stolen identity.",
                "stride": "SpoofingIdentity",
                "asset_types": ["service"],
            }
        ],
        "controls": [
            {
                "id": "C1",
                "title": "Mutual TLS",
                "description": "Authenticate both ends of every connection.",
                "ccm_ids": ["IAM-03"],
                "measurement": "share of connections using mTLS",
            }
        ],
        "mappings": [
            {"threat_id": "T1", "control_id": "C1", "minimum_level": "Medium"}
        ],
    }
    doc.update(overrides)
    return doc


# ---------------------------------------------------------------- parsing

def test_default_catalog_loads_and_is_internally_consistent():
    assert KB.asset_types == frozenset({"database", "gateway", "service", "ui"})
    assert len(KB.threats) >= 12
    assert len(KB.controls) >= 16
    threat_ids = set(KB.threats)
    control_ids = set(KB.controls)
    for m in KB.mappings:
        assert m.threat_id in threat_ids
        assert m.control_id in control_ids
    # Every threat should have at least one mapped control.
    mapped = {m.threat_id for m in KB.mappings}
    assert mapped == threat_ids


def test_default_catalog_covers_all_stride_categories():
    seen = {t.stride for t in KB.threats.values()}
    assert seen == set(StrideCategory)


def test_catalog_doc_round_trip():
    doc = knowledge_base_to_doc(KB)
    again = knowledge_base_from_doc(doc)
    assert knowledge_base_to_doc(again) == doc


def test_serialize_is_valid_catalog_text():
    text = serialize_knowledge_base(KB)
    assert text.endswith("\n")
    reloaded = load_knowledge_base(text)
    assert set(reloaded.threats) == set(KB.threats)


def test_minimal_doc_parses():
    kb = knowledge_base_from_doc(minimal_doc())
    assert kb.threat("T1").stride == StrideCategory.SPOOFING_IDENTITY
    assert kb.control("C1").ccm_ids == ("IAM-03",)
    assert kb.mappings[0].minimum_level == RiskLevel.MEDIUM


def test_rejects_duplicate_threat_id():
    doc = minimal_doc()
    doc["threats"].append(dict(doc["threats"][0]))
    with pytest.raises(SchemaError, match="duplicate threat id"):
        knowledge_base_from_doc(doc)


def test_rejects_undeclared_asset_type():
    doc = minimal_doc()
    doc["threats"][0]["asset_types"] = ["mainframe"]
    with pytest.raises(SchemaError, match="undeclared asset type"):
        knowledge_base_from_doc(doc)


def test_rejects_unknown_stride_and_level():
    doc = minimal_doc()
    doc["threats"][0]["stride"] = "Phishing"
    with pytest.raises(SchemaError, match="unknown STRIDE"):
        knowledge_base_from_doc(doc)
    doc = minimal_doc()
    doc["mappings"][0]["minimum_level"] = "Severe"
    with pytest.raises(SchemaError, match="unknown risk level"):
        knowledge_base_from_doc(doc)


def test_rejects_dangling_and_duplicate_mappings():
    doc = minimal_doc()
    doc["mappings"].append(
        {"threat_id": "T9", "control_id": "C1", "minimum_level": "Low"}
    )
    with pytest.raises(SchemaError, match="unknown threat"):
        knowledge_base_from_doc(doc)
    doc = minimal_doc()
    doc["mappings"].append(dict(doc["mappings"][0]))
    with pytest.raises(SchemaError, match="duplicate mapping"):
        knowledge_base_from_doc(doc)


def test_rejects_wrong_version_and_bad_json():
    with pytest.raises(SchemaError, match="kb_version"):
        knowledge_base_from_doc(minimal_doc(kb_version=2))
    with pytest.raises(SchemaError, match="invalid JSON"):
        load_knowledge_base("{not json")


def test_impact_defaults_shape_is_enforced():
    doc = minimal_doc()
    doc["threats"][0]["impact_defaults"] = {"technical": [1, 2, 3]}
    with pytest.raises(SchemaError):
        knowledge_base_from_doc(doc)
    doc["threats"][0]["impact_defaults"] = {
        "technical": [1, 2, 3, 4],
        "business": [5, 6, 7, 8],
    }
    kb = knowledge_base_from_doc(doc)
    assert kb.threat("T1").impact_defaults == ((1, 2, 3, 4), (5, 6, 7, 8))


def test_unknown_ids_raise_not_found():
    with pytest.raises(NotFoundError):
        KB.threat("TH-NOPE-99")
    with pytest.raises(NotFoundError):
        KB.control("XX-0")


# ---------------------------------------------------------------- recommendation

def test_recommend_threats_sorted_and_filtered():
    for asset_type in sorted(KB.asset_types):
        entries = recommend_threats(KB, asset_type)
        ids = [t.id for t in entries]
        assert ids == sorted(ids)
        assert entries, f"no threats recommended for {asset_type}"
        for t in entries:
            assert not t.asset_types or asset_type in t.asset_types


def test_universal_threats_apply_to_every_asset_type():
    universal = {t.id for t in KB.threats.values() if not t.asset_types}
    assert universal
    for asset_type in KB.asset_types:
        ids = {t.id for t in recommend_threats(KB, asset_type)}
        assert universal <= ids


def test_recommend_controls_requires_nothing_at_low():
    for tid in KB.threats:
        required, optional = recommend_controls(KB, tid, RiskLevel.LOW)
        assert required == []
        assert {c.id for c in optional} == set(KB.controls)


def test_recommend_controls_partitions_the_catalog():
    for tid in KB.threats:
        for level in (RiskLevel.MEDIUM, RiskLevel.HIGH):
            required, optional = recommend_controls(KB, tid, level)
            req_ids = [c.id for c in required]
            opt_ids = [c.id for c in optional]
            assert req_ids == sorted(req_ids)
            assert opt_ids == sorted(opt_ids)
            assert not set(req_ids) & set(opt_ids)
            assert set(req_ids) | set(opt_ids) == set(KB.controls)
            mapped = {
                m.control_id
                for m in KB.mappings
                if m.threat_id == tid and m.minimum_level.rank <= level.rank
            }
            assert set(req_ids) == mapped


def test_recommend_controls_grow_with_level():
    for tid in KB.threats:
        med, _ = recommend_controls(KB, tid, RiskLevel.MEDIUM)
        high, _ = recommend_controls(KB, tid, RiskLevel.HIGH)
        assert {c.id for c in med} <= {c.id for c in high}


def test_recommend_controls_unknown_threat():
    with pytest.raises(NotFoundError):
        recommend_controls(KB, "TH-NOPE-99", RiskLevel.HIGH)


# ---------------------------------------------------------------- extension

def test_extend_with_threat_control_and_mapping():
    threat = ThreatEntry(
        id="TH-TEST-01",
        title="Test threat",
        description="Only for tests.",
        stride=StrideCategory.TAMPERING,
        asset_types=frozenset({"service"}),
    )
    control = ControlEntry(
        id="XC-1",
        title="Test control",
        description="Only for tests.",
        ccm_ids=(),
        measurement="n/a",
    )
    mapping = ThreatControlMapping(
        threat_id="TH-TEST-01", control_id="XC-1", minimum_level=RiskLevel.MEDIUM
    )
    kb = extend_catalog(KB, threat)
    kb = extend_catalog(kb, control)
    kb = extend_catalog(kb, mapping)
    assert kb.threat("TH-TEST-01").title == "Test threat"
    required, _ = recommend_controls(kb, "TH-TEST-01", RiskLevel.MEDIUM)
    assert [c.id for c in required] == ["XC-1"]
    # The original catalog must be untouched.
    with pytest.raises(NotFoundError):
        KB.threat("TH-TEST-01")
    assert "XC-1" not in KB.controls


def test_extend_rejects_duplicates_and_dangling_references():
    existing_threat = next(iter(KB.threats.values()))
    with pytest.raises(SchemaError, match="duplicate threat id"):
        extend_catalog(KB, existing_threat)
    with pytest.raises(SchemaError, match="undeclared asset type"):
        extend_catalog(
            KB,
            ThreatEntry(
                id="TH-TEST-02",
                title="t",
                description="d",
                stride=StrideCategory.REPUDIATION,
                asset_types=frozenset({"satellite"}),
            ),
        )
    with pytest.raises(SchemaError, match="unknown control"):
        extend_catalog(
            KB,
            ThreatControlMapping(
                threat_id=existing_threat.id,
                control_id="XC-404",
                minimum_level=RiskLevel.LOW,
            ),
        )
    some_mapping = KB.mappings[0]
    with pytest.raises(SchemaError, match="duplicate mapping"):
        extend_catalog(KB, some_mapping)


def test_parse_extension_shapes():
    entry = parse_extension(
        {
            "kind": "control",
            "entry": {
                "id": "XC-9",
                "title": "t",
                "description": "d",
                "ccm_ids": [],
                "measurement": "m",
            },
        }
    )
    assert isinstance(entry, ControlEntry)
    mapping = parse_extension(
        {
            "kind": "mapping",
            "entry": {
                "threat_id": "T1",
                "control_id": "C1",
                "minimum_level": "High",
            },
        }
    )
    assert isinstance(mapping, ThreatControlMapping)
    with pytest.raises(SchemaError, match="unknown extension kind"):
        parse_extension({"kind": "policy", "entry": {}})
    with pytest.raises(SchemaError):
        parse_extension(["not", "an", "object"])
