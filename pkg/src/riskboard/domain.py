"""Risk-scoring core: OWASP-style factor sets, band quantization, the
composite risk index (CRI), STRIDE taxonomy, risk levels, and the ROAM
lifecycle.

Everything in this module is a plain value or a pure function; no I/O, no
clock, no randomness. The scoring pipeline is::

    16 factors (0-9)  -->  likelihood mean, impact mean  -->  1-5 bands
                      -->  CRI = likelihood_band * impact_band  (1-25)
                      -->  level Low / Medium / High
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import DomainError

FACTOR_MIN = 0.0
FACTOR_MAX = 9.0

# Upper bounds (exclusive) of bands 1-4 on the 0-9 scale; anything at or above
# the last threshold is band 5. The grid is uniform: 9 / 5 = 1.8 per band.
_BAND_THRESHOLDS = (1.8, 3.6, 5.4, 7.2)

# Midpoint of each band interval. Used to materialize a factor set when a
# likelihood/impact band is supplied directly instead of individual factors,
# so that "score present implies factors present" holds everywhere.
BAND_MIDPOINTS = {1: 0.9, 2: 2.7, 3: 4.5, 4: 6.3, 5: 8.1}

THREAT_AGENT_FACTORS = ("skill_level", "motive", "opportunity", "size")
VULNERABILITY_FACTORS = (
    "ease_of_discovery",
    "ease_of_exploit",
    "awareness",
    "intrusion_detection",
)
TECHNICAL_IMPACT_FACTORS = (
    "loss_of_confidentiality",
    "loss_of_integrity",
    "loss_of_availability",
    "loss_of_accountability",
)
BUSINESS_IMPACT_FACTORS = (
    "financial_damage",
    "reputation_damage",
    "non_compliance",
    "privacy_violation",
)

FACTOR_GROUPS = (
    "threat_agent",
    "vulnerability",
    "technical_impact",
    "business_impact",
)


class StrideCategory(str, Enum):
    """The six STRIDE threat categories."""

    SPOOFING_IDENTITY = "SpoofingIdentity"
    TAMPERING = "Tampering"
    REPUDIATION = "Repudiation"
    INFORMATION_DISCLOSURE = "InformationDisclosure"
    DENIAL_OF_SERVICE = "DenialOfService"
    ELEVATION_OF_PRIVILEGE = "ElevationOfPrivilege"

    @property
    def display_name(self) -> str:
        names = {
            StrideCategory.SPOOFING_IDENTITY: "Spoofing identity",
            StrideCategory.TAMPERING: "Tampering",
            StrideCategory.REPUDIATION: "Repudiation",
            StrideCategory.INFORMATION_DISCLOSURE: "Information disclosure",
            StrideCategory.DENIAL_OF_SERVICE: "Denial of service",
            StrideCategory.ELEVATION_OF_PRIVILEGE: "Elevation of privilege",
        }
        return names[self]


class RiskLevel(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"

    @property
    def rank(self) -> int:
        return {"Low": 1, "Medium": 2, "High": 3}[self.value]


class RoamStatus(str, Enum):
    """ROAM lifecycle of an identified risk.

    Resolved means the risk turned out not to apply and its analysis is
    eliminated from the card entirely. Owned is an interim state and requires
    an owner identity. Only Accepted and Mitigated count as fully addressed.
    """

    UNSET = "Unset"
    RESOLVED = "Resolved"
    OWNED = "Owned"
    ACCEPTED = "Accepted"
    MITIGATED = "Mitigated"


FULLY_ADDRESSED_STATUSES = frozenset({RoamStatus.ACCEPTED, RoamStatus.MITIGATED})


def _check_factor(value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"factor value must be a number, got {value!r}") from None
    if not FACTOR_MIN <= value <= FACTOR_MAX:
        raise DomainError(f"factor value {value!r} outside [0, 9]")
    return value


def validate_band(value: object, name: str = "band") -> int:
    # bool is an int subclass; reject it explicitly.
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"{name} must be an integer in 1..5, got {value!r}")
    if not 1 <= value <= 5:
        raise DomainError(f"{name} {value!r} outside 1..5")
    return value


def average_factor_group(factors: Sequence[float]) -> float:
    """Arithmetic mean of a non-empty sequence of 0-9 factor values."""
    values = [_check_factor(v) for v in factors]
    if not values:
        raise DomainError("cannot average an empty factor group")
    return sum(values) / len(values)


def quantize_band(value: float) -> int:
    """Map a 0-9 scale value onto bands 1-5 over a uniform 1.8-wide grid.

    Boundaries belong to the upper band: 1.8 is band 2, 7.2 is band 5.
    """
    value = _check_factor(value)
    return bisect_right(_BAND_THRESHOLDS, value) + 1


def cri_level(cri: int) -> RiskLevel:
    """Classify a composite risk index: 1-5 Low, 6-12 Medium, 13-25 High."""
    if isinstance(cri, bool) or not isinstance(cri, int) or not 1 <= cri <= 25:
        raise DomainError(f"CRI must be an integer in 1..25, got {cri!r}")
    if cri <= 5:
        return RiskLevel.LOW
    if cri <= 12:
        return RiskLevel.MEDIUM
    return RiskLevel.HIGH


@dataclass(frozen=True)
class CriScore:
    """A computed composite risk index with its two band inputs."""

    likelihood: int
    impact: int
    cri: int
    level: RiskLevel

    def __post_init__(self) -> None:
        validate_band(self.likelihood, "likelihood")
        validate_band(self.impact, "impact")
        if self.cri != self.likelihood * self.impact:
            raise DomainError(
                f"CRI {self.cri} is not likelihood {self.likelihood} "
                f"x impact {self.impact}"
            )
        if self.level != cri_level(self.cri):
            raise DomainError(f"level {self.level} does not match CRI {self.cri}")

    def to_doc(self) -> dict:
        return {
            "likelihood": self.likelihood,
            "impact": self.impact,
            "cri": self.cri,
            "level": self.level.value,
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "CriScore":
        return cls(
            likelihood=doc["likelihood"],
            impact=doc["impact"],
            cri=doc["cri"],
            level=RiskLevel(doc["level"]),
        )


def compute_cri(likelihood: int, impact: int) -> CriScore:
    """Combine two 1-5 bands into a CriScore."""
    validate_band(likelihood, "likelihood")
    validate_band(impact, "impact")
    cri = likelihood * impact
    return CriScore(likelihood=likelihood, impact=impact, cri=cri, level=cri_level(cri))


@dataclass(frozen=True)
class FactorSet:
    """The sixteen 0-9 scoring factors, four per group.

    Likelihood is driven by the threat-agent and vulnerability groups,
    impact by the technical and business groups.
    """

    threat_agent: tuple[float, float, float, float]
    vulnerability: tuple[float, float, float, float]
    technical_impact: tuple[float, float, float, float]
    business_impact: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        for group in FACTOR_GROUPS:
            raw = getattr(self, group)
            if not isinstance(raw, Sequence) or isinstance(raw, (str, bytes)):
                raise DomainError(f"{group} must be a sequence of 4 factors")
            if len(raw) != 4:
                raise DomainError(f"{group} must hold exactly 4 factors, got {len(raw)}")
            object.__setattr__(self, group, tuple(_check_factor(v) for v in raw))

    def likelihood_factors(self) -> tuple[float, ...]:
        return self.threat_agent + self.vulnerability

    def impact_factors(self) -> tuple[float, ...]:
        return self.technical_impact + self.business_impact

    def to_doc(self) -> dict:
        return {group: list(getattr(self, group)) for group in FACTOR_GROUPS}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "FactorSet":
        if not isinstance(doc, Mapping):
            raise DomainError("factor set must be an object with the four groups")
        missing = [g for g in FACTOR_GROUPS if g not in doc]
        if missing:
            raise DomainError(f"incomplete factor set: missing {', '.join(missing)}")
        extra = [k for k in doc if k not in FACTOR_GROUPS]
        if extra:
            raise DomainError(f"unknown factor group(s): {', '.join(sorted(extra))}")
        return cls(**{g: tuple(doc[g]) for g in FACTOR_GROUPS})

    @classmethod
    def uniform(cls, likelihood: int, impact: int) -> "FactorSet":
        """Materialize the factor set for directly-supplied bands, pinning
        every factor at its band's interval midpoint."""
        lmid = BAND_MIDPOINTS[validate_band(likelihood, "likelihood")]
        imid = BAND_MIDPOINTS[validate_band(impact, "impact")]
        return cls(
            threat_agent=(lmid,) * 4,
            vulnerability=(lmid,) * 4,
            technical_impact=(imid,) * 4,
            business_impact=(imid,) * 4,
        )


def score_from_factors(factors: FactorSet) -> CriScore:
    """Full pipeline: mean the eight likelihood and eight impact factors,
    quantize each mean to a band, multiply."""
    likelihood = quantize_band(average_factor_group(factors.likelihood_factors()))
    impact = quantize_band(average_factor_group(factors.impact_factors()))
    return compute_cri(likelihood, impact)


@dataclass
class RiskAssessment:
    """One identified risk on an asset card: a catalog threat instance plus
    its scoring, ROAM status, selected controls and deferral flag."""

    id: str
    threat_id: str
    factors: FactorSet | None = None
    score: CriScore | None = None
    roam: RoamStatus = RoamStatus.UNSET
    roam_owner: str | None = None
    controls: set[str] = field(default_factory=set)
    deferred: bool = False
    impact_prefill: dict | None = None

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "threat_id": self.threat_id,
            "factors": self.factors.to_doc() if self.factors else None,
            "score": self.score.to_doc() if self.score else None,
            "roam": self.roam.value,
            "roam_owner": self.roam_owner,
            "controls": sorted(self.controls),
            "deferred": self.deferred,
            "impact_prefill": self.impact_prefill,
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "RiskAssessment":
        return cls(
            id=doc["id"],
            threat_id=doc["threat_id"],
            factors=FactorSet.from_doc(doc["factors"]) if doc.get("factors") else None,
            score=CriScore.from_doc(doc["score"]) if doc.get("score") else None,
            roam=RoamStatus(doc.get("roam", "Unset")),
            roam_owner=doc.get("roam_owner"),
            controls=set(doc.get("controls", ())),
            deferred=bool(doc.get("deferred", False)),
            impact_prefill=doc.get("impact_prefill"),
        )


def is_fully_addressed(risks: Iterable[RiskAssessment]) -> bool:
    """True when every non-deferred risk is Accepted or Mitigated.

    Vacuously true for an empty collection; whether an empty card counts as
    addressed is decided by the caller (attestation required).
    """
    return all(
        r.roam in FULLY_ADDRESSED_STATUSES for r in risks if not r.deferred
    )
