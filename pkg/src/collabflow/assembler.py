"""Build the collaborative process graph from deduced knowledge.

The graph has one pool per participant (tasks for the business services it
provides, grouped into role lanes) and one mediation pool with a lane per
coordination service in use. Every deduced dependency between business
services becomes one mediation task occurrence with a message flow in from
the producing service and out to the consuming one; deduced flows between
mediation services become sequence flows between occurrences.

Gateway insertion rewires every branching or merging point in the mediation
sequence-flow graph through an explicit gateway; event generation closes the
graph with one start and one end event. Gateway types are a human decision:
they start ``unset`` and block export until assigned.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace

from .errors import (
    Diagnostic,
    NoDependencies,
    ParseError,
    UnknownGateway,
    UnsupportedType,
    ValidationError,
)
from .kb import KnowledgeBase
from .vocab import (
    BUSINESS_DEPENDENCY,
    COLLABORATIVE_NETWORK,
    MIS_DEPENDENCY,
    PARTICIPANT,
    slug,
)

GATEWAY_TYPES = (
    "parallel",
    "event-based-exclusive",
    "data-based-exclusive",
    "data-based-inclusive",
)
UNSET = "unset"

MEDIATION_POOL = "mediation"
START_EVENT = "ev-start"
END_EVENT = "ev-end"


@dataclass(frozen=True)
class Task:
    """A partner business service exposed in the participant's pool."""

    id: str
    service: str
    pool: str
    lane: str
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Occurrence:
    """One mediation task: a coordination service applied to one dependency."""

    id: str
    dependency: str
    coordinator: str
    from_service: str
    to_service: str
    resource: str
    alternates: tuple[str, ...] = ()


@dataclass(frozen=True)
class Gateway:
    id: str
    direction: str  # diverging | converging
    type: str = UNSET


@dataclass(frozen=True)
class Event:
    id: str
    kind: str  # start | end


@dataclass
class ProcessGraph:
    name: str
    partner_pools: dict[str, list[str]] = field(default_factory=dict)
    mediation_lanes: list[str] = field(default_factory=list)
    tasks: dict[str, Task] = field(default_factory=dict)
    occurrences: dict[str, Occurrence] = field(default_factory=dict)
    gateways: dict[str, Gateway] = field(default_factory=dict)
    events: dict[str, Event] = field(default_factory=dict)
    seq_flows: set = field(default_factory=set)
    msg_flows: set = field(default_factory=set)

    def mediation_nodes(self) -> list[str]:
        """Sorted ids of all nodes living in the mediation pool."""
        return sorted([*self.occurrences, *self.gateways, *self.events])

    def successors(self, node: str) -> list[str]:
        return sorted(t for (s, t) in self.seq_flows if s == node)

    def predecessors(self, node: str) -> list[str]:
        return sorted(s for (s, t) in self.seq_flows if t == node)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProcessGraph):
            return NotImplemented
        return (
            self.name == other.name
            and self.partner_pools == other.partner_pools
            and self.mediation_lanes == other.mediation_lanes
            and self.tasks == other.tasks
            and self.occurrences == other.occurrences
            and self.gateways == other.gateways
            and self.events == other.events
            and self.seq_flows == other.seq_flows
            and self.msg_flows == other.msg_flows
        )

    def to_dict(self) -> dict:
        """JSON mirror of the XML form, one-to-one."""
        return {
            "name": self.name,
            "partnerPools": {p: list(l) for p, l in sorted(self.partner_pools.items())},
            "mediationLanes": list(self.mediation_lanes),
            "tasks": [
                {
                    "id": t.id,
                    "service": t.service,
                    "pool": t.pool,
                    "lane": t.lane,
                    "inputs": list(t.inputs),
                    "outputs": list(t.outputs),
                }
                for t in (self.tasks[k] for k in sorted(self.tasks))
            ],
            "occurrences": [
                {
                    "id": o.id,
                    "dependency": o.dependency,
                    "coordinator": o.coordinator,
                    "from": o.from_service,
                    "to": o.to_service,
                    "resource": o.resource,
                    "alternates": list(o.alternates),
                }
                for o in (self.occurrences[k] for k in sorted(self.occurrences))
            ],
            "gateways": [
                {"id": g.id, "direction": g.direction, "type": g.type}
                for g in (self.gateways[k] for k in sorted(self.gateways))
            ],
            "events": [
                {"id": e.id, "kind": e.kind}
                for e in (self.events[k] for k in sorted(self.events))
            ],
            "seqFlows": [{"from": s, "to": t} for s, t in sorted(self.seq_flows)],
            "msgFlows": [{"from": s, "to": t} for s, t in sorted(self.msg_flows)],
        }


def task_id(participant: str, service: str) -> str:
    return slug("task", participant, service)


def occurrence_id(dependency: str) -> str:
    return f"occ-{dependency}"


# ------------------------------------------------------------------ assembly


def _lane_for(kb: KnowledgeBase, participant: str, service: str) -> str:
    """Role lane owning a business service: a played role whose abstract
    services decompose into it; falls back to the first role, then to a
    participant-named lane."""
    roles = [str(r) for r in kb.objects(participant, "playRole")]
    for role in roles:
        for abstract in kb.objects(role, "performAService"):
            if service in kb.objects(abstract, "hasBusinessService"):
                return role
    return roles[0] if roles else participant


def assemble(kb: KnowledgeBase) -> ProcessGraph:
    """Construct the process graph from a knowledge base after deduction."""
    networks = kb.instances_of(COLLABORATIVE_NETWORK)
    name = networks[0] if len(networks) == 1 else "-".join(networks) or "collaboration"
    dependencies = kb.instances_of(BUSINESS_DEPENDENCY)
    if not dependencies:
        raise NoDependencies(
            "no dependencies between business services were deduced; "
            "nothing to mediate"
        )
    graph = ProcessGraph(name=name)

    tasks_by_service: dict[str, list[str]] = {}
    for participant in kb.instances_of(PARTICIPANT):
        lanes: set[str] = set()
        for service in kb.objects(participant, "provideBusinessService"):
            lane = _lane_for(kb, participant, service)
            tid = task_id(participant, service)
            graph.tasks[tid] = Task(
                id=tid,
                service=service,
                pool=participant,
                lane=lane,
                inputs=tuple(kb.objects(service, "hasInput")),
                outputs=tuple(kb.objects(service, "hasOutput")),
            )
            tasks_by_service.setdefault(service, []).append(tid)
            lanes.add(lane)
        graph.partner_pools[participant] = sorted(lanes)

    for dependency in dependencies:
        coordinators = [str(c) for c in kb.objects(dependency, "isCoordinatedBy")]
        if not coordinators:
            raise ValidationError(
                f"dependency {dependency!r} has no coordination service"
            )
        from_service = str(kb.objects(dependency, "fromBusinessService")[0])
        to_service = str(kb.objects(dependency, "toBusinessService")[0])
        resource = str(kb.objects(dependency, "containResource")[0])
        oid = occurrence_id(dependency)
        graph.occurrences[oid] = Occurrence(
            id=oid,
            dependency=dependency,
            coordinator=coordinators[0],
            from_service=from_service,
            to_service=to_service,
            resource=resource,
            alternates=tuple(coordinators[1:]),
        )
        for tid in tasks_by_service.get(from_service, []):
            graph.msg_flows.add((tid, oid))
        for tid in tasks_by_service.get(to_service, []):
            graph.msg_flows.add((oid, tid))

    graph.mediation_lanes = sorted({o.coordinator for o in graph.occurrences.values()})

    occ_by_target: dict[str, list[str]] = {}
    occ_by_source: dict[str, list[str]] = {}
    for occ in graph.occurrences.values():
        occ_by_target.setdefault(occ.to_service, []).append(occ.id)
        occ_by_source.setdefault(occ.from_service, []).append(occ.id)
    for handover in kb.instances_of(MIS_DEPENDENCY):
        from_service = str(kb.objects(handover, "fromBusinessService")[0])
        to_service = str(kb.objects(handover, "toBusinessService")[0])
        for upstream in occ_by_target.get(from_service, []):
            for downstream in occ_by_source.get(to_service, []):
                if upstream != downstream:
                    graph.seq_flows.add((upstream, downstream))
    return graph


# ------------------------------------------------------------------ gateways


def _gateway_for(graph: ProcessGraph, gid: str, direction: str) -> Gateway:
    """The node's deterministic gateway; reused when a later pass routes
    additional flows through an already-rewired node."""
    existing = graph.gateways.get(gid)
    if existing is not None:
        return existing
    if gid in graph.occurrences or gid in graph.events:
        raise ValidationError(f"gateway id collision at {gid!r}")
    gateway = Gateway(gid, direction)
    graph.gateways[gid] = gateway
    return gateway


def _rewire_degrees(graph: ProcessGraph) -> None:
    """Route every non-gateway node with multiple sequence successors or
    predecessors through its gateway; path connectivity is preserved."""
    non_gateway = [n for n in graph.mediation_nodes() if n not in graph.gateways]
    for node in non_gateway:
        successors = graph.successors(node)
        if len(successors) > 1:
            gid = _gateway_for(graph, f"gw-div-{node}", "diverging").id
            for target in successors:
                if target == gid:
                    continue
                graph.seq_flows.discard((node, target))
                graph.seq_flows.add((gid, target))
            graph.seq_flows.add((node, gid))
    for node in non_gateway:
        predecessors = graph.predecessors(node)
        if len(predecessors) > 1:
            gid = _gateway_for(graph, f"gw-conv-{node}", "converging").id
            for source in predecessors:
                if source == gid:
                    continue
                graph.seq_flows.discard((source, node))
                graph.seq_flows.add((source, gid))
            graph.seq_flows.add((gid, node))


def insert_gateways(graph: ProcessGraph) -> ProcessGraph:
    """Insert diverging/converging gateways at every branch and merge point."""
    _rewire_degrees(graph)
    return graph


# -------------------------------------------------------------------- events


def generate_events(graph: ProcessGraph, literal_start_rule: bool = False) -> ProcessGraph:
    """Close the mediation graph with one start and one end event.

    Mediation nodes without an outgoing sequence flow get one to the end
    event. Initiator business services send a message flow to the start
    event, and the start event flows to the occurrence of each dependency an
    initiator triggers. By default an initiator is a service with no incoming
    message flow and no input produced elsewhere in the graph;
    ``literal_start_rule`` widens this to every service without an incoming
    message flow. Idempotent: re-running changes nothing.
    """
    graph.events.setdefault(START_EVENT, Event(START_EVENT, "start"))
    graph.events.setdefault(END_EVENT, Event(END_EVENT, "end"))
    for node in graph.mediation_nodes():
        if node in graph.events:
            continue
        if not graph.successors(node):
            graph.seq_flows.add((node, END_EVENT))

    produced: set[str] = set()
    for task in graph.tasks.values():
        produced.update(task.outputs)
    fed = {target for (_source, target) in graph.msg_flows}
    for tid in sorted(graph.tasks):
        task = graph.tasks[tid]
        if tid in fed:
            continue
        if not literal_start_rule and any(r in produced for r in task.inputs):
            continue
        graph.msg_flows.add((tid, START_EVENT))
        for oid in sorted(graph.occurrences):
            if graph.occurrences[oid].from_service == task.service:
                graph.seq_flows.add((START_EVENT, oid))
    _rewire_degrees(graph)
    return graph


# ----------------------------------------------------------- human decisions


def assign_gateway_type(graph: ProcessGraph, gateway_id: str, gateway_type: str) -> ProcessGraph:
    """Record a manually chosen gateway type; re-assignment overwrites."""
    if gateway_id not in graph.gateways:
        raise UnknownGateway(f"unknown gateway {gateway_id!r}")
    if gateway_type not in GATEWAY_TYPES:
        raise UnsupportedType(
            f"gateway type {gateway_type!r} is not supported; "
            f"choose one of {', '.join(GATEWAY_TYPES)}"
        )
    graph.gateways[gateway_id] = replace(graph.gateways[gateway_id], type=gateway_type)
    return graph


def completeness_check(graph: ProcessGraph) -> list[Diagnostic]:
    """Empty iff all gateways are typed and one start and one end event
    connect every mediation node."""
    out: list[Diagnostic] = []
    for gid in sorted(graph.gateways):
        if graph.gateways[gid].type == UNSET:
            out.append(
                Diagnostic("error", "untyped-gateway", f"gateway {gid!r} has no type", gid)
            )
    starts = sorted(e.id for e in graph.events.values() if e.kind == "start")
    ends = sorted(e.id for e in graph.events.values() if e.kind == "end")
    if len(starts) != 1:
        out.append(
            Diagnostic("error", "start-events", f"expected exactly one start event, found {len(starts)}")
        )
    if len(ends) != 1:
        out.append(
            Diagnostic("error", "end-events", f"expected exactly one end event, found {len(ends)}")
        )
    if len(starts) == 1 and len(ends) == 1:
        forward = _reachable(graph, starts[0], backwards=False)
        backward = _reachable(graph, ends[0], backwards=True)
        for node in graph.mediation_nodes():
            if node not in forward:
                out.append(
                    Diagnostic("error", "unreachable", f"{node!r} is not reachable from the start event", node)
                )
            elif node not in backward:
                out.append(
                    Diagnostic("error", "dead-end", f"{node!r} never reaches the end event", node)
                )
    return out


def _reachable(graph: ProcessGraph, origin: str, backwards: bool) -> set[str]:
    seen = {origin}
    frontier = [origin]
    while frontier:
        node = frontier.pop()
        steps = graph.predecessors(node) if backwards else graph.successors(node)
        for other in steps:
            if other not in seen:
                seen.add(other)
                frontier.append(other)
    return seen


# ------------------------------------------------------------- serialization

_JOIN = "|"


def serialize_graph(graph: ProcessGraph) -> str:
    """Canonical XML form of the process graph (stable bytes)."""
    root = ET.Element("collaborativeProcess", {"name": graph.name})
    for pool in sorted(graph.partner_pools):
        pool_el = ET.SubElement(root, "participants", {"name": pool})
        for lane in graph.partner_pools[pool]:
            lane_el = ET.SubElement(pool_el, "role", {"name": lane})
            for tid in sorted(graph.tasks):
                task = graph.tasks[tid]
                if task.pool != pool or task.lane != lane:
                    continue
                ET.SubElement(
                    lane_el,
                    "performsBusinessService",
                    {
                        "id": task.id,
                        "name": task.service,
                        "in": _JOIN.join(task.inputs),
                        "out": _JOIN.join(task.outputs),
                    },
                )
    cis = ET.SubElement(root, "CIS", {"name": MEDIATION_POOL})
    for lane in graph.mediation_lanes:
        lane_el = ET.SubElement(cis, "role", {"name": lane})
        for oid in sorted(graph.occurrences):
            occ = graph.occurrences[oid]
            if occ.coordinator != lane:
                continue
            ET.SubElement(
                lane_el,
                "CISservices",
                {
                    "id": occ.id,
                    "name": occ.coordinator,
                    "dependency": occ.dependency,
                    "from": occ.from_service,
                    "to": occ.to_service,
                    "resource": occ.resource,
                    "alternates": _JOIN.join(occ.alternates),
                },
            )
    for gid in sorted(graph.gateways):
        gateway = graph.gateways[gid]
        ET.SubElement(
            cis,
            "gateways",
            {"id": gateway.id, "direction": gateway.direction, "type": gateway.type},
        )
    for eid in sorted(graph.events):
        event = graph.events[eid]
        ET.SubElement(cis, "events", {"id": event.id, "kind": event.kind})
    flows = sorted(
        [("msgFlow",) + f for f in graph.msg_flows]
        + [("seqFlow",) + f for f in graph.seq_flows]
    )
    for kind, source, target in flows:
        ET.SubElement(root, "flows", {"type": kind, "from": source, "to": target})
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def parse_graph(text: str) -> ProcessGraph:
    """Inverse of :func:`serialize_graph`."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"process XML does not parse: {exc}") from exc
    if root.tag != "collaborativeProcess":
        raise ParseError(f"expected <collaborativeProcess> root, found <{root.tag}>")
    graph = ProcessGraph(name=root.get("name") or "")

    def split(value: str | None) -> tuple[str, ...]:
        return tuple(v for v in (value or "").split(_JOIN) if v)

    for pool_el in root.findall("participants"):
        pool = pool_el.get("name") or ""
        lanes = []
        for lane_el in pool_el.findall("role"):
            lane = lane_el.get("name") or ""
            lanes.append(lane)
            for task_el in lane_el.findall("performsBusinessService"):
                task = Task(
                    id=task_el.get("id") or "",
                    service=task_el.get("name") or "",
                    pool=pool,
                    lane=lane,
                    inputs=split(task_el.get("in")),
                    outputs=split(task_el.get("out")),
                )
                graph.tasks[task.id] = task
        graph.partner_pools[pool] = sorted(lanes)
    cis = root.find("CIS")
    if cis is not None:
        for lane_el in cis.findall("role"):
            lane = lane_el.get("name") or ""
            graph.mediation_lanes.append(lane)
            for occ_el in lane_el.findall("CISservices"):
                occ = Occurrence(
                    id=occ_el.get("id") or "",
                    dependency=occ_el.get("dependency") or "",
                    coordinator=lane,
                    from_service=occ_el.get("from") or "",
                    to_service=occ_el.get("to") or "",
                    resource=occ_el.get("resource") or "",
                    alternates=split(occ_el.get("alternates")),
                )
                graph.occurrences[occ.id] = occ
        for gw_el in cis.findall("gateways"):
            gateway = Gateway(
                id=gw_el.get("id") or "",
                direction=gw_el.get("direction") or "",
                type=gw_el.get("type") or UNSET,
            )
            graph.gateways[gateway.id] = gateway
        for ev_el in cis.findall("events"):
            event = Event(id=ev_el.get("id") or "", kind=ev_el.get("kind") or "")
            graph.events[event.id] = event
    graph.mediation_lanes.sort()
    for flow_el in root.findall("flows"):
        kind = flow_el.get("type")
        edge = (flow_el.get("from") or "", flow_el.get("to") or "")
        if kind == "seqFlow":
            graph.seq_flows.add(edge)
        elif kind == "msgFlow":
            graph.msg_flows.add(edge)
        else:
            raise ParseError(f"unknown flow type {kind!r}")
    return graph
