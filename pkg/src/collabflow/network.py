"""Collaboration network documents: the user-authored description of who
collaborates, in which roles, under which relationships, toward which goals.

Canonical encoding is UTF-8 XML (elements ``network``, ``participants``,
``role``, ``relationship``, ``topology``, ``commonGoals``); a one-to-one
JSON encoding is accepted everywhere XML is. Ingestion maps each element
kind onto the knowledge base: the network itself, participants with their
played roles, relationships with endpoints, the topology with its power and
duration, and the common goals.
"""
from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import (
    Diagnostic,
    ParseError,
    UnknownAbstractService,
    UnknownRole,
    ValidationError,
)
from .kb import KnowledgeBase, Lit
from .vocab import (
    ABSTRACT_SERVICE,
    COLLABORATIVE_NETWORK,
    COMMON_GOAL,
    DURATIONS,
    ENUM_ALIASES,
    PARTICIPANT,
    POWERS,
    RELATIONSHIP,
    RELATIONSHIP_TYPES,
    ROLE,
    TOPOLOGY,
    slug,
)

# Power/duration pairs the topology rules can classify.
TYPABLE_TOPOLOGIES = {
    ("central", "continuous"): "star",
    ("equal", "discontinuous"): "P2P",
    ("hierarchical", "continuous"): "chain",
}


@dataclass
class ParticipantSpec:
    name: str
    roles: list[str] = field(default_factory=list)
    abstract_services: list[str] = field(default_factory=list)


@dataclass
class RelationshipSpec:
    type: str
    p1: str
    p2: str
    duration: str


@dataclass
class TopologySpec:
    power: str
    duration: str


@dataclass
class CollaborativeNetworkDoc:
    name: str
    participants: list[ParticipantSpec] = field(default_factory=list)
    relationships: list[RelationshipSpec] = field(default_factory=list)
    topology: TopologySpec | None = None
    common_goals: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "participants": [
                {
                    "name": p.name,
                    "roles": list(p.roles),
                    "abstractServices": list(p.abstract_services),
                }
                for p in self.participants
            ],
            "relationships": [
                {"type": r.type, "p1": r.p1, "p2": r.p2, "duration": r.duration}
                for r in self.relationships
            ],
            "topology": (
                {"power": self.topology.power, "duration": self.topology.duration}
                if self.topology
                else None
            ),
            "commonGoals": list(self.common_goals),
        }


def _norm_enum(value: str) -> str:
    value = value.strip()
    return ENUM_ALIASES.get(value.lower(), value)


def doc_from_dict(data: dict) -> CollaborativeNetworkDoc:
    try:
        doc = CollaborativeNetworkDoc(name=str(data.get("name", "")).strip())
        for p in data.get("participants", []):
            doc.participants.append(
                ParticipantSpec(
                    name=str(p.get("name", "")).strip(),
                    roles=[str(r).strip() for r in p.get("roles", [])],
                    abstract_services=[str(s).strip() for s in p.get("abstractServices", [])],
                )
            )
        for r in data.get("relationships", []):
            doc.relationships.append(
                RelationshipSpec(
                    type=_norm_enum(str(r.get("type", ""))),
                    p1=str(r.get("p1", "")).strip(),
                    p2=str(r.get("p2", "")).strip(),
                    duration=_norm_enum(str(r.get("duration", ""))),
                )
            )
        topo = data.get("topology")
        if topo:
            doc.topology = TopologySpec(
                power=_norm_enum(str(topo.get("power", ""))),
                duration=_norm_enum(str(topo.get("duration", ""))),
            )
        doc.common_goals = [str(g) for g in data.get("commonGoals", [])]
        return doc
    except AttributeError as exc:
        raise ParseError(f"malformed network document: {exc}") from exc


def doc_from_xml(text: str) -> CollaborativeNetworkDoc:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"network XML does not parse: {exc}") from exc
    if root.tag != "network":
        raise ParseError(f"expected <network> root, found <{root.tag}>")
    doc = CollaborativeNetworkDoc(name=(root.get("name") or "").strip())
    for element in root:
        if element.tag == "participants":
            participant = ParticipantSpec(name=(element.get("name") or "").strip())
            for child in element:
                if child.tag == "role":
                    participant.roles.append((child.text or "").strip())
                elif child.tag == "abstractService":
                    participant.abstract_services.append((child.text or "").strip())
                else:
                    raise ParseError(f"unexpected <{child.tag}> under <participants>")
            doc.participants.append(participant)
        elif element.tag == "relationship":
            endpoints = {child.tag: (child.text or "").strip() for child in element}
            doc.relationships.append(
                RelationshipSpec(
                    type=_norm_enum(element.get("type") or ""),
                    p1=endpoints.get("P1", ""),
                    p2=endpoints.get("P2", ""),
                    duration=_norm_enum(element.get("duration") or ""),
                )
            )
        elif element.tag == "topology":
            doc.topology = TopologySpec(
                power=_norm_enum(element.get("power") or ""),
                duration=_norm_enum(element.get("duration") or ""),
            )
        elif element.tag == "commonGoals":
            for child in element:
                if child.tag != "goal":
                    raise ParseError(f"unexpected <{child.tag}> under <commonGoals>")
                doc.common_goals.append(child.text or "")
        else:
            raise ParseError(f"unexpected <{element.tag}> under <network>")
    return doc


def parse_network(text: str) -> CollaborativeNetworkDoc:
    """Parse a network document from XML or the JSON mirror."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return doc_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"network JSON does not parse: {exc}") from exc
    return doc_from_xml(text)


def doc_to_xml(doc: CollaborativeNetworkDoc) -> str:
    """Canonical XML form (deterministic, document order preserved)."""
    root = ET.Element("network", {"name": doc.name})
    for p in doc.participants:
        element = ET.SubElement(root, "participants", {"name": p.name})
        for role in p.roles:
            ET.SubElement(element, "role").text = role
        for service in p.abstract_services:
            ET.SubElement(element, "abstractService").text = service
    for r in doc.relationships:
        element = ET.SubElement(
            root, "relationship", {"type": r.type, "duration": r.duration}
        )
        ET.SubElement(element, "P1").text = r.p1
        ET.SubElement(element, "P2").text = r.p2
    if doc.topology:
        ET.SubElement(
            root,
            "topology",
            {"power": doc.topology.power, "duration": doc.topology.duration},
        )
    if doc.common_goals:
        goals = ET.SubElement(root, "commonGoals")
        for goal in doc.common_goals:
            ET.SubElement(goals, "goal").text = goal
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


# ---------------------------------------------------------------- validation


def validate_network(
    doc: CollaborativeNetworkDoc, kb: KnowledgeBase | None = None
) -> list[Diagnostic]:
    """Diagnostics for a document; no errors means ingestion will succeed.

    With a seed knowledge base given, role and abstract-service references
    are resolved against it. Warnings (for example a topology the rules
    cannot classify) do not block ingestion.
    """
    out: list[Diagnostic] = []

    def error(code: str, message: str, subject: str | None = None) -> None:
        out.append(Diagnostic("error", code, message, subject))

    def warning(code: str, message: str, subject: str | None = None) -> None:
        out.append(Diagnostic("warning", code, message, subject))

    if not doc.name:
        error("missing-name", "network needs a name")
    names = [p.name for p in doc.participants]
    if len(doc.participants) < 2:
        error("too-few-participants", "a collaboration needs at least two participants")
    lowered = [n.lower() for n in names]
    for name in names:
        if not name:
            error("missing-name", "participant needs a name")
        elif lowered.count(name.lower()) > 1:
            error("duplicate-participant", f"participant {name!r} declared twice", name)
    for p in doc.participants:
        if not p.roles and not p.abstract_services:
            warning(
                "no-role",
                f"participant {p.name!r} has no role or declared service; "
                f"nothing will be deduced for it",
                p.name,
            )
        if kb is not None:
            for role in p.roles:
                if role not in kb.instances_of(ROLE):
                    error("unknown-role", f"unknown role {role!r}", p.name)
            for service in p.abstract_services:
                if service not in kb.instances_of(ABSTRACT_SERVICE):
                    error(
                        "unknown-abstract-service",
                        f"unknown abstract service {service!r}",
                        p.name,
                    )
    for index, r in enumerate(doc.relationships):
        where = f"relationship #{index + 1}"
        if r.type not in RELATIONSHIP_TYPES:
            error("bad-relationship-type", f"{where}: unknown type {r.type!r}", where)
        if r.duration not in DURATIONS:
            error("bad-duration", f"{where}: unknown duration {r.duration!r}", where)
        for endpoint in (r.p1, r.p2):
            if endpoint not in names:
                error(
                    "dangling-endpoint",
                    f"{where}: endpoint {endpoint!r} is not a declared participant",
                    where,
                )
        if r.p1 == r.p2 and r.p1:
            error("self-relationship", f"{where}: endpoints must differ", where)
    if doc.topology is None:
        error("missing-topology", "network needs a topology (power and duration)")
    else:
        if doc.topology.power not in POWERS:
            error("bad-power", f"unknown decision-making power {doc.topology.power!r}")
        if doc.topology.duration not in DURATIONS:
            error("bad-duration", f"unknown duration {doc.topology.duration!r}")
        elif (
            doc.topology.power in POWERS
            and (doc.topology.power, doc.topology.duration) not in TYPABLE_TOPOLOGIES
        ):
            warning(
                "untypable-topology",
                f"no rule classifies power {doc.topology.power!r} with "
                f"duration {doc.topology.duration!r}; the topology stays untyped",
            )
    for goal in doc.common_goals:
        if not goal.strip():
            error("empty-goal", "common goal descriptions must be non-empty")
    return out


# ----------------------------------------------------------------- ingestion


def relationship_id(doc_name: str, r: RelationshipSpec) -> str:
    return slug("rel", doc_name, r.type, r.p1, r.p2)


def topology_id(doc_name: str) -> str:
    return slug(doc_name, "topology")


def goal_id(doc_name: str, description: str) -> str:
    return slug("goal", doc_name, description)


def ingest_network(kb: KnowledgeBase, doc: CollaborativeNetworkDoc) -> KnowledgeBase:
    """Assert a validated document into the knowledge base.

    Idempotent per document: every created id is a pure function of the
    document content, and facts have set semantics.
    """
    diagnostics = validate_network(doc, kb)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        for d in errors:
            if d.code == "unknown-role":
                raise UnknownRole(d.message)
            if d.code == "unknown-abstract-service":
                raise UnknownAbstractService(d.message)
        raise ValidationError(
            "; ".join(d.message for d in errors), diagnostics=diagnostics
        )
    kb.add_instance(doc.name, doc.name, (COLLABORATIVE_NETWORK,))
    kb.add_fact(doc.name, "name", Lit(doc.name))
    for p in doc.participants:
        kb.add_instance(p.name, p.name, (PARTICIPANT,))
        kb.add_fact(p.name, "name", Lit(p.name))
        for role in p.roles:
            kb.add_fact(p.name, "playRole", role)
        for service in p.abstract_services:
            kb.add_fact(p.name, "provideAService", service)
    for r in doc.relationships:
        rid = relationship_id(doc.name, r)
        kb.add_instance(rid, rid, (RELATIONSHIP,))
        kb.add_fact(doc.name, "hasRelationship", rid)
        kb.add_fact(rid, "P1", r.p1)
        kb.add_fact(rid, "P2", r.p2)
        kb.add_fact(rid, "hasType", r.type)
        kb.add_fact(rid, "hasDuration", r.duration)
    if doc.topology:
        tid = topology_id(doc.name)
        kb.add_instance(tid, tid, (TOPOLOGY,))
        kb.add_fact(doc.name, "hasTopology", tid)
        kb.add_fact(tid, "hasPower", doc.topology.power)
        kb.add_fact(tid, "hasDuration", doc.topology.duration)
    for goal in doc.common_goals:
        gid = goal_id(doc.name, goal)
        kb.add_instance(gid, gid, (COMMON_GOAL,))
        kb.add_fact(doc.name, "hasCommonGoal", gid)
        kb.add_fact(gid, "description", Lit(goal))
    return kb
