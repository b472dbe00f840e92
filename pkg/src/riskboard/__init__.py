"""Kanban-style agile risk management for multi-cloud software projects.

Asset cards flow across a board whose columns mirror the assessment
methodology; movement is gated by a declarative rule set, risks are scored
with OWASP-style factors, and every change is an event appended to a
replayable log.
"""

from .board import (
    AssetCard,
    Board,
    BoardDefinition,
    COL_COMPONENTS,
    COL_CONTROLS,
    COL_RISKS,
    COL_VALIDATION,
    Event,
    EventKind,
    apply_events,
    board_from_doc,
    board_to_doc,
    create_default_board,
    default_definition,
    replay_events,
)
from .domain import (
    CriScore,
    FactorSet,
    RiskAssessment,
    RiskLevel,
    RoamStatus,
    StrideCategory,
    compute_cri,
    cri_level,
    is_fully_addressed,
    quantize_band,
    score_from_factors,
)
from .errors import (
    DomainError,
    NotFoundError,
    RevisionConflictError,
    RiskboardError,
    SchemaError,
)
from .knowledge import (
    KnowledgeBase,
    extend_catalog,
    knowledge_base_from_doc,
    load_default_knowledge_base,
    load_knowledge_base,
    recommend_controls,
    recommend_threats,
)
from .model import ArchitectureModel, model_to_assets, parse_model, serialize_model
from .reporting import RiskReport, generate_report, render_report
from .rules import (
    Condition,
    MovementRequest,
    Rule,
    Verdict,
    default_ruleset,
    evaluate_movement,
    ruleset_from_doc,
    ruleset_to_doc,
)
from .storage import BoardStore

__version__ = "0.1.0"

__all__ = [
    "ArchitectureModel",
    "AssetCard",
    "Board",
    "BoardDefinition",
    "BoardStore",
    "COL_COMPONENTS",
    "COL_CONTROLS",
    "COL_RISKS",
    "COL_VALIDATION",
    "Condition",
    "CriScore",
    "DomainError",
    "Event",
    "EventKind",
    "FactorSet",
    "KnowledgeBase",
    "MovementRequest",
    "NotFoundError",
    "RevisionConflictError",
    "RiskAssessment",
    "RiskLevel",
    "RiskReport",
    "RiskboardError",
    "RoamStatus",
    "Rule",
    "SchemaError",
    "StrideCategory",
    "Verdict",
    "apply_events",
    "board_from_doc",
    "board_to_doc",
    "compute_cri",
    "create_default_board",
    "cri_level",
    "default_definition",
    "default_ruleset",
    "evaluate_movement",
    "extend_catalog",
    "generate_report",
    "is_fully_addressed",
    "knowledge_base_from_doc",
    "load_default_knowledge_base",
    "load_knowledge_base",
    "model_to_assets",
    "parse_model",
    "quantize_band",
    "recommend_controls",
    "recommend_threats",
    "render_report",
    "replay_events",
    "ruleset_from_doc",
    "ruleset_to_doc",
    "score_from_factors",
    "serialize_model",
    "__version__",
]
