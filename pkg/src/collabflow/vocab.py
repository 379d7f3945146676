"""Closed concept/predicate vocabulary of the collaboration knowledge base.

The vocabulary is fixed: unknown concept or predicate names are rejected at
load time. Each predicate declares its domain concepts and its range, which
is either a set of concepts, a set of enum individuals, or a literal string.
"""
from __future__ import annotations

from dataclasses import dataclass

COLLABORATIVE_NETWORK = "CollaborativeNetwork"
PARTICIPANT = "Participant"
ROLE = "Role"
ABSTRACT_SERVICE = "AbstractService"
BUSINESS_SERVICE = "BusinessService"
RESOURCE = "Resource"
COORDINATION_SERVICE = "CoordinationService"
MIS_SERVICE = "MISService"
COMMON_GOAL = "CommonGoal"
RELATIONSHIP = "Relationship"
TOPOLOGY = "Topology"
BUSINESS_DEPENDENCY = "DependencyBetweenBusinessServices"
MIS_DEPENDENCY = "DependencyBetweenMISServices"

CONCEPTS = frozenset(
    {
        COLLABORATIVE_NETWORK,
        PARTICIPANT,
        ROLE,
        ABSTRACT_SERVICE,
        BUSINESS_SERVICE,
        RESOURCE,
        COORDINATION_SERVICE,
        MIS_SERVICE,
        COMMON_GOAL,
        RELATIONSHIP,
        TOPOLOGY,
        BUSINESS_DEPENDENCY,
        MIS_DEPENDENCY,
    }
)

POWERS = ("central", "equal", "hierarchical")
DURATIONS = ("continuous", "discontinuous")
TOPOLOGY_TYPES = ("star", "P2P", "chain")
RELATIONSHIP_TYPES = ("competition", "supplier-customer", "group-of-interest")

ENUM_INDIVIDUALS = frozenset(POWERS + DURATIONS + TOPOLOGY_TYPES + RELATIONSHIP_TYPES)

# Accepted spelling variants, normalized at ingestion time.
ENUM_ALIASES = {"hierarchic": "hierarchical", "peer-to-peer": "P2P", "p2p": "P2P"}


@dataclass(frozen=True)
class PredicateSpec:
    """Domain/range contract of one predicate.

    ``domains`` of None means any instance is an acceptable subject.
    Exactly one of ``range_concepts``, ``range_enum``, ``literal_range``
    is set.
    """

    name: str
    domains: frozenset[str] | None
    range_concepts: frozenset[str] | None = None
    range_enum: frozenset[str] | None = None
    literal_range: bool = False


def _p(name, domains, *, concepts=None, enum=None, literal=False) -> PredicateSpec:
    return PredicateSpec(
        name=name,
        domains=frozenset(domains) if domains is not None else None,
        range_concepts=frozenset(concepts) if concepts else None,
        range_enum=frozenset(enum) if enum else None,
        literal_range=literal,
    )


_DEPENDENCY_KINDS = (BUSINESS_DEPENDENCY, MIS_DEPENDENCY)

PREDICATES: dict[str, PredicateSpec] = {
    spec.name: spec
    for spec in (
        _p("playRole", (PARTICIPANT,), concepts=(ROLE,)),
        _p("performAService", (ROLE,), concepts=(ABSTRACT_SERVICE,)),
        _p("provideAService", (PARTICIPANT,), concepts=(ABSTRACT_SERVICE,)),
        _p("hasBusinessService", (ABSTRACT_SERVICE,), concepts=(BUSINESS_SERVICE,)),
        _p("provideBusinessService", (PARTICIPANT,), concepts=(BUSINESS_SERVICE,)),
        _p("hasInput", (BUSINESS_SERVICE,), concepts=(RESOURCE,)),
        _p("hasOutput", (BUSINESS_SERVICE,), concepts=(RESOURCE,)),
        _p("hasRelationship", (COLLABORATIVE_NETWORK,), concepts=(RELATIONSHIP,)),
        _p("P1", (RELATIONSHIP,), concepts=(PARTICIPANT,)),
        _p("P2", (RELATIONSHIP,), concepts=(PARTICIPANT,)),
        _p("manipulateResource", (COORDINATION_SERVICE,), concepts=(RESOURCE,)),
        _p("fromBusinessService", _DEPENDENCY_KINDS, concepts=(BUSINESS_SERVICE,)),
        _p("toBusinessService", _DEPENDENCY_KINDS, concepts=(BUSINESS_SERVICE,)),
        _p("containResource", _DEPENDENCY_KINDS, concepts=(RESOURCE,)),
        _p("isCoordinatedBy", (BUSINESS_DEPENDENCY,), concepts=(COORDINATION_SERVICE,)),
        _p("hasMISservice", (COLLABORATIVE_NETWORK,), concepts=(COORDINATION_SERVICE,)),
        _p("achievesAService", (COMMON_GOAL,), concepts=(ABSTRACT_SERVICE,)),
        _p("description", (COMMON_GOAL,), literal=True),
        _p("name", None, literal=True),
        _p("hasPower", (TOPOLOGY,), enum=POWERS),
        _p("hasDuration", (TOPOLOGY, RELATIONSHIP), enum=DURATIONS),
        _p("hasType", (TOPOLOGY, RELATIONSHIP), enum=TOPOLOGY_TYPES + RELATIONSHIP_TYPES),
        _p("hasCommonGoal", (COLLABORATIVE_NETWORK,), concepts=(COMMON_GOAL,)),
        _p("hasTopology", (COLLABORATIVE_NETWORK,), concepts=(TOPOLOGY,)),
    )
}

# Pseudo-predicate for concept membership in rule heads, query patterns and
# derivation reports. Not assertable through the regular fact interface.
TYPE_PREDICATE = "a"


def slug(*parts: str) -> str:
    """Deterministic identifier from name parts: lowercased, spaces to dashes."""
    cleaned = []
    for part in parts:
        token = "-".join(part.strip().lower().split())
        if token:
            cleaned.append(token)
    return "-".join(cleaned)
