"""BPMN 2.0 export of a complete process graph.

Pools map to ``participant``/``process`` pairs, role and mediation lanes to
``lane`` elements, business services and mediation occurrences to ``task``
elements, and gateways to the four supported concrete gateway elements
(parallel, event-based exclusive, data-based exclusive, data-based
inclusive). Sequence flows stay inside a process; message flows live on the
collaboration and always cross pools.

Only the semantic model is emitted (no diagram-interchange section); the
serialization is byte-stable and validated against the schema subset shipped
in ``data/bpmn20-subset.json``.
"""
from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from importlib import resources

from .assembler import MEDIATION_POOL, ProcessGraph, completeness_check
from .errors import Diagnostic, IncompleteProcess, ParseError
from .vocab import slug

BPMN_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"
TARGET_NS = "urn:collabflow:bpmn"

_GATEWAY_ELEMENTS = {
    "parallel": "parallelGateway",
    "event-based-exclusive": "eventBasedGateway",
    "data-based-exclusive": "exclusiveGateway",
    "data-based-inclusive": "inclusiveGateway",
}
_GATEWAY_TYPES_BY_ELEMENT = {v: k for k, v in _GATEWAY_ELEMENTS.items()}


@dataclass(frozen=True)
class BpmnNode:
    id: str
    kind: str  # task | gateway | startEvent | endEvent
    name: str
    pool: str
    lane: str
    gateway_type: str | None = None
    direction: str | None = None


@dataclass(frozen=True)
class BpmnLane:
    id: str
    name: str
    node_ids: tuple[str, ...]


@dataclass(frozen=True)
class BpmnPool:
    id: str
    name: str
    process_id: str
    lanes: tuple[BpmnLane, ...]


@dataclass
class BpmnDocument:
    id: str
    name: str
    pools: list[BpmnPool] = field(default_factory=list)
    nodes: dict[str, BpmnNode] = field(default_factory=dict)
    sequence_edges: list[tuple[str, str]] = field(default_factory=list)
    message_edges: list[tuple[str, str]] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        kinds = [n.kind for n in self.nodes.values()]
        return {
            "pools": len(self.pools),
            "lanes": sum(len(p.lanes) for p in self.pools),
            "tasks": kinds.count("task"),
            "gateways": kinds.count("gateway"),
            "events": kinds.count("startEvent") + kinds.count("endEvent"),
            "sequenceEdges": len(self.sequence_edges),
            "messageEdges": len(self.message_edges),
        }


# -------------------------------------------------------------------- export


def _mediation_lane(graph: ProcessGraph, node_id: str) -> str:
    """Lane for a gateway or event: the smallest lane among the nearest
    occurrences in the undirected sequence-flow graph."""
    if node_id in graph.occurrences:
        return graph.occurrences[node_id].coordinator
    seen = {node_id}
    frontier = [node_id]
    while frontier:
        lanes = set()
        next_frontier = []
        for node in frontier:
            for neighbor in graph.successors(node) + graph.predecessors(node):
                if neighbor in seen:
                    continue
                seen.add(neighbor)
                if neighbor in graph.occurrences:
                    lanes.add(graph.occurrences[neighbor].coordinator)
                else:
                    next_frontier.append(neighbor)
        if lanes:
            return min(lanes)
        frontier = next_frontier
    return graph.mediation_lanes[0] if graph.mediation_lanes else MEDIATION_POOL


def export_bpmn(graph: ProcessGraph) -> BpmnDocument:
    """Transform a complete process graph into a BPMN document.

    Requires an empty completeness check: every gateway typed and the event
    structure in place.
    """
    diagnostics = completeness_check(graph)
    if diagnostics:
        raise IncompleteProcess(
            "; ".join(d.message for d in diagnostics), diagnostics=diagnostics
        )
    doc = BpmnDocument(id=slug(graph.name) or "collaboration", name=graph.name)
    lane_members: dict[tuple[str, str], list[str]] = {}

    for tid in sorted(graph.tasks):
        task = graph.tasks[tid]
        doc.nodes[tid] = BpmnNode(tid, "task", task.service, task.pool, task.lane)
        lane_members.setdefault((task.pool, task.lane), []).append(tid)
    for oid in sorted(graph.occurrences):
        occ = graph.occurrences[oid]
        doc.nodes[oid] = BpmnNode(
            oid, "task", occ.coordinator, MEDIATION_POOL, occ.coordinator
        )
        lane_members.setdefault((MEDIATION_POOL, occ.coordinator), []).append(oid)
    for gid in sorted(graph.gateways):
        gateway = graph.gateways[gid]
        lane = _mediation_lane(graph, gid)
        doc.nodes[gid] = BpmnNode(
            gid,
            "gateway",
            gid,
            MEDIATION_POOL,
            lane,
            gateway_type=gateway.type,
            direction=gateway.direction,
        )
        lane_members.setdefault((MEDIATION_POOL, lane), []).append(gid)
    for eid in sorted(graph.events):
        event = graph.events[eid]
        lane = _mediation_lane(graph, eid)
        doc.nodes[eid] = BpmnNode(
            eid, f"{event.kind}Event", eid, MEDIATION_POOL, lane
        )
        lane_members.setdefault((MEDIATION_POOL, lane), []).append(eid)

    pool_lanes: dict[str, list[str]] = {
        pool: list(lanes) for pool, lanes in graph.partner_pools.items()
    }
    pool_lanes[MEDIATION_POOL] = list(graph.mediation_lanes)
    for pool, lane in lane_members:
        if lane not in pool_lanes.setdefault(pool, []):
            pool_lanes[pool].append(lane)
    for name in sorted(pool_lanes):
        lanes = tuple(
            BpmnLane(
                id=slug("lane", name, lane),
                name=lane,
                node_ids=tuple(sorted(lane_members.get((name, lane), []))),
            )
            for lane in sorted(pool_lanes[name])
        )
        doc.pools.append(
            BpmnPool(
                id=slug("pool", name),
                name=name,
                process_id=slug("process", name),
                lanes=lanes,
            )
        )
    doc.sequence_edges = sorted(graph.seq_flows)
    doc.message_edges = sorted(graph.msg_flows)
    return doc


# --------------------------------------------------------------- serializing


def serialize_bpmn(doc: BpmnDocument, pretty: bool = True) -> bytes:
    """UTF-8 BPMN XML; the same document always yields identical bytes."""
    ET.register_namespace("", BPMN_NS)

    def q(tag: str) -> str:
        return f"{{{BPMN_NS}}}{tag}"

    pool_of_node = {nid: node.pool for nid, node in doc.nodes.items()}
    pool_ids = {pool.name: pool.id for pool in doc.pools}

    root = ET.Element(
        q("definitions"),
        {"id": f"{doc.id}-definitions", "name": doc.name, "targetNamespace": TARGET_NS},
    )
    collaboration = ET.SubElement(root, q("collaboration"), {"id": f"{doc.id}-collaboration"})
    for pool in doc.pools:
        ET.SubElement(
            collaboration,
            q("participant"),
            {"id": pool.id, "name": pool.name, "processRef": pool.process_id},
        )
    for source, target in doc.message_edges:
        ET.SubElement(
            collaboration,
            q("messageFlow"),
            {"id": f"mf-{source}--{target}", "sourceRef": source, "targetRef": target},
        )
    for pool in doc.pools:
        process = ET.SubElement(root, q("process"), {"id": pool.process_id, "name": pool.name})
        if pool.lanes:
            lane_set = ET.SubElement(process, q("laneSet"), {"id": f"{pool.process_id}-lanes"})
            for lane in pool.lanes:
                lane_el = ET.SubElement(lane_set, q("lane"), {"id": lane.id, "name": lane.name})
                for nid in lane.node_ids:
                    ET.SubElement(lane_el, q("flowNodeRef")).text = nid
        for nid in sorted(n for n, p in pool_of_node.items() if p == pool.name):
            node = doc.nodes[nid]
            if node.kind == "task":
                ET.SubElement(process, q("task"), {"id": nid, "name": node.name})
            elif node.kind == "gateway":
                attrs = {"id": nid}
                if node.direction:
                    attrs["gatewayDirection"] = node.direction.capitalize()
                ET.SubElement(process, q(_GATEWAY_ELEMENTS[node.gateway_type]), attrs)
            else:
                ET.SubElement(process, q(node.kind), {"id": nid})
        for source, target in doc.sequence_edges:
            if pool_of_node.get(source) == pool.name:
                ET.SubElement(
                    process,
                    q("sequenceFlow"),
                    {"id": f"sf-{source}--{target}", "sourceRef": source, "targetRef": target},
                )
    if pretty:
        ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    if pretty:
        body += "\n"
    return ('<?xml version="1.0" encoding="UTF-8"?>\n' + body).encode("utf-8")


def _local(tag: str) -> tuple[str, str]:
    if tag.startswith("{"):
        ns, _, local = tag[1:].partition("}")
        return ns, local
    return "", tag


def _load_subset() -> dict:
    path = resources.files("collabflow") / "data" / "bpmn20-subset.json"
    return json.loads(path.read_text(encoding="utf-8"))


def validate_bpmn(data: "bytes | str") -> list[Diagnostic]:
    """Diagnostics for a BPMN file: schema-subset conformance plus
    structural soundness (references resolve, edges stay in bounds)."""
    out: list[Diagnostic] = []
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        return [Diagnostic("error", "xml-parse", f"not well-formed XML: {exc}")]
    subset = _load_subset()
    elements = subset["elements"]

    ns, local = _local(root.tag)
    if ns != subset["namespace"]:
        out.append(Diagnostic("error", "bad-namespace", f"unexpected namespace {ns!r}"))
    if local != subset["root"]:
        out.append(Diagnostic("error", "bad-root", f"expected <{subset['root']}>, found <{local}>"))
        return out

    def walk(element: ET.Element, local_tag: str) -> None:
        spec = elements[local_tag]
        allowed = set(spec["attributes"]["required"]) | set(spec["attributes"]["optional"])
        for attr in element.attrib:
            attr_ns, attr_local = _local(attr)
            if attr_ns:
                continue  # foreign-namespace attributes tolerated
            if attr_local not in allowed:
                out.append(
                    Diagnostic(
                        "error", "bad-attribute",
                        f"<{local_tag}> does not allow attribute {attr_local!r}",
                        element.get("id"),
                    )
                )
        for attr in spec["attributes"]["required"]:
            if element.get(attr) is None:
                out.append(
                    Diagnostic(
                        "error", "missing-attribute",
                        f"<{local_tag}> requires attribute {attr!r}",
                        element.get("id"),
                    )
                )
        for child in element:
            child_ns, child_local = _local(child.tag)
            if child_ns != subset["namespace"] or child_local not in spec["children"]:
                out.append(
                    Diagnostic(
                        "error", "bad-child",
                        f"<{local_tag}> does not allow child <{child_local}>",
                        element.get("id"),
                    )
                )
                continue
            walk(child, child_local)

    walk(root, local)
    if out:
        return out

    # structural soundness
    ids: set[str] = set()
    for element in root.iter():
        eid = element.get("id")
        if eid is None:
            continue
        if eid in ids:
            out.append(Diagnostic("error", "duplicate-id", f"duplicate id {eid!r}", eid))
        ids.add(eid)

    processes = root.findall(f"{{{BPMN_NS}}}process")
    node_process: dict[str, str] = {}
    node_tags = set(_GATEWAY_ELEMENTS.values()) | {"task", "startEvent", "endEvent"}
    for process in processes:
        pid = process.get("id") or ""
        for child in process:
            _, child_local = _local(child.tag)
            if child_local in node_tags:
                node_process[child.get("id") or ""] = pid
    for process in processes:
        pid = process.get("id") or ""
        in_lane: set[str] = set()
        for lane in process.findall(f"{{{BPMN_NS}}}laneSet/{{{BPMN_NS}}}lane"):
            for ref in lane.findall(f"{{{BPMN_NS}}}flowNodeRef"):
                target = (ref.text or "").strip()
                if node_process.get(target) != pid:
                    out.append(
                        Diagnostic(
                            "error", "bad-lane-ref",
                            f"lane {lane.get('id')!r} references unknown node {target!r}",
                        )
                    )
                in_lane.add(target)
        for node, owner in node_process.items():
            if owner == pid and node not in in_lane:
                out.append(
                    Diagnostic("error", "node-outside-lanes", f"node {node!r} is not in any lane", node)
                )
        for flow in process.findall(f"{{{BPMN_NS}}}sequenceFlow"):
            for attr in ("sourceRef", "targetRef"):
                ref = flow.get(attr) or ""
                if node_process.get(ref) != pid:
                    out.append(
                        Diagnostic(
                            "error", "bad-edge",
                            f"sequence flow {flow.get('id')!r} endpoint {ref!r} "
                            f"is not a node of process {pid!r}",
                        )
                    )

    collaboration = root.find(f"{{{BPMN_NS}}}collaboration")
    if collaboration is None:
        out.append(Diagnostic("error", "missing-collaboration", "no <collaboration> element"))
        return out
    process_ids = {p.get("id") for p in processes}
    for participant in collaboration.findall(f"{{{BPMN_NS}}}participant"):
        if participant.get("processRef") not in process_ids:
            out.append(
                Diagnostic(
                    "error", "bad-process-ref",
                    f"participant {participant.get('id')!r} references unknown process",
                )
            )
    for flow in collaboration.findall(f"{{{BPMN_NS}}}messageFlow"):
        source = flow.get("sourceRef") or ""
        target = flow.get("targetRef") or ""
        if source not in node_process or target not in node_process:
            out.append(
                Diagnostic(
                    "error", "bad-edge",
                    f"message flow {flow.get('id')!r} endpoint does not exist",
                )
            )
        elif node_process[source] == node_process[target]:
            out.append(
                Diagnostic(
                    "error", "message-flow-inside-pool",
                    f"message flow {flow.get('id')!r} does not cross pools",
                )
            )
    return out


def parse_bpmn(data: "bytes | str") -> BpmnDocument:
    """Rebuild a document from serialized BPMN (inverse of serialization)."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"BPMN XML does not parse: {exc}") from exc

    def q(tag: str) -> str:
        return f"{{{BPMN_NS}}}{tag}"

    doc_id = (root.get("id") or "").removesuffix("-definitions")
    doc = BpmnDocument(id=doc_id, name=root.get("name") or "")
    collaboration = root.find(q("collaboration"))
    pools_by_process: dict[str, str] = {}
    if collaboration is not None:
        for participant in collaboration.findall(q("participant")):
            pools_by_process[participant.get("processRef") or ""] = participant.get("name") or ""
        for flow in collaboration.findall(q("messageFlow")):
            doc.message_edges.append((flow.get("sourceRef") or "", flow.get("targetRef") or ""))
    for process in root.findall(q("process")):
        pid = process.get("id") or ""
        pool_name = pools_by_process.get(pid, process.get("name") or "")
        lane_of: dict[str, str] = {}
        lanes = []
        for lane in process.findall(f"{q('laneSet')}/{q('lane')}"):
            refs = tuple(
                sorted((ref.text or "").strip() for ref in lane.findall(q("flowNodeRef")))
            )
            lanes.append(BpmnLane(id=lane.get("id") or "", name=lane.get("name") or "", node_ids=refs))
            for ref in refs:
                lane_of[ref] = lane.get("name") or ""
        participant_el = None
        if collaboration is not None:
            for candidate in collaboration.findall(q("participant")):
                if candidate.get("processRef") == pid:
                    participant_el = candidate
        doc.pools.append(
            BpmnPool(
                id=(participant_el.get("id") if participant_el is not None else pid) or pid,
                name=pool_name,
                process_id=pid,
                lanes=tuple(lanes),
            )
        )
        for child in process:
            _, local = _local(child.tag)
            nid = child.get("id") or ""
            if local == "task":
                doc.nodes[nid] = BpmnNode(
                    nid, "task", child.get("name") or "", pool_name, lane_of.get(nid, "")
                )
            elif local in _GATEWAY_TYPES_BY_ELEMENT:
                doc.nodes[nid] = BpmnNode(
                    nid,
                    "gateway",
                    nid,
                    pool_name,
                    lane_of.get(nid, ""),
                    gateway_type=_GATEWAY_TYPES_BY_ELEMENT[local],
                    direction=(child.get("gatewayDirection") or "").lower() or None,
                )
            elif local in ("startEvent", "endEvent"):
                doc.nodes[nid] = BpmnNode(nid, local, nid, pool_name, lane_of.get(nid, ""))
            elif local == "sequenceFlow":
                doc.sequence_edges.append((child.get("sourceRef") or "", child.get("targetRef") or ""))
    doc.pools.sort(key=lambda p: p.name)
    doc.sequence_edges.sort()
    doc.message_edges.sort()
    return doc
