import pytest

from collabflow.assembler import assign_gateway_type
from collabflow.bpmn import (
    BpmnDocument,
    BpmnLane,
    BpmnNode,
    BpmnPool,
    export_bpmn,
    parse_bpmn,
    serialize_bpmn,
    validate_bpmn,
)
from collabflow.errors import IncompleteProcess


@pytest.fixture
def complete_graph(ab_graph):
    for gid in sorted(ab_graph.gateways):
        assign_gateway_type(
            ab_graph, gid, "parallel" if "div" in gid else "data-based-exclusive"
        )
    return ab_graph


def test_ab_export_counts(complete_graph):
    doc = export_bpmn(complete_graph)
    assert doc.counts() == {
        "pools": 3,
        "lanes": 4,
        "tasks": 9,
        "gateways": 2,
        "events": 2,
        "sequenceEdges": 7,
        "messageEdges": 7,
    }


def test_export_blocks_on_untyped_gateway(ab_graph):
    with pytest.raises(IncompleteProcess) as excinfo:
        export_bpmn(ab_graph)
    assert excinfo.value.diagnostics


def test_pool_and_lane_mapping(complete_graph):
    doc = export_bpmn(complete_graph)
    pools = {p.name: p for p in doc.pools}
    assert set(pools) == {"A", "B", "mediation"}
    assert [lane.name for lane in pools["A"].lanes] == ["seller"]
    assert [lane.name for lane in pools["B"].lanes] == ["buyer"]
    assert [lane.name for lane in pools["mediation"].lanes] == [
        "manage flow of document",
        "manage flow of material",
    ]


def test_export_is_injective_on_nodes(complete_graph):
    doc = export_bpmn(complete_graph)
    graph_nodes = (
        set(complete_graph.tasks)
        | set(complete_graph.occurrences)
        | set(complete_graph.gateways)
        | set(complete_graph.events)
    )
    assert set(doc.nodes) == graph_nodes
    lane_refs = [n for p in doc.pools for l in p.lanes for n in l.node_ids]
    assert sorted(lane_refs) == sorted(graph_nodes)  # each node in exactly one lane


def test_gateway_types_map_to_the_four_supported_elements(complete_graph):
    data = serialize_bpmn(export_bpmn(complete_graph)).decode()
    assert "<parallelGateway" in data
    assert "<exclusiveGateway" in data
    for gid in complete_graph.gateways:
        assign_gateway_type(complete_graph, gid, "event-based-exclusive")
    data = serialize_bpmn(export_bpmn(complete_graph)).decode()
    assert "<eventBasedGateway" in data
    for gid in complete_graph.gateways:
        assign_gateway_type(complete_graph, gid, "data-based-inclusive")
    data = serialize_bpmn(export_bpmn(complete_graph)).decode()
    assert "<inclusiveGateway" in data


def minimal_doc():
    return BpmnDocument(
        id="mini",
        name="mini",
        pools=[
            BpmnPool(
                id="pool-x",
                name="x",
                process_id="process-x",
                lanes=(BpmnLane(id="lane-x", name="x", node_ids=("t1",)),),
            )
        ],
        nodes={"t1": BpmnNode("t1", "task", "do it", "x", "x")},
    )


def test_minimal_document_validates():
    assert validate_bpmn(serialize_bpmn(minimal_doc())) == []


def test_ab_document_validates_and_round_trips(complete_graph):
    doc = export_bpmn(complete_graph)
    data = serialize_bpmn(doc)
    assert validate_bpmn(data) == []
    assert parse_bpmn(data) == doc


def test_serialization_is_byte_stable(complete_graph):
    doc = export_bpmn(complete_graph)
    assert serialize_bpmn(doc) == serialize_bpmn(doc)
    compact = serialize_bpmn(doc, pretty=False)
    assert compact != serialize_bpmn(doc)
    assert compact.count(b"\n") == 1  # xml declaration line only
    assert validate_bpmn(compact) == []
    assert parse_bpmn(compact) == doc


def test_truncated_file_yields_parse_diagnostic(complete_graph):
    data = serialize_bpmn(export_bpmn(complete_graph))
    diagnostics = validate_bpmn(data[: len(data) // 2])
    assert [d.code for d in diagnostics] == ["xml-parse"]


def test_edge_to_missing_node_is_flagged(complete_graph):
    data = serialize_bpmn(export_bpmn(complete_graph)).decode()
    broken = data.replace(
        'sourceRef="ev-start"', 'sourceRef="ev-ghost"', 1
    )
    codes = {d.code for d in validate_bpmn(broken)}
    assert "bad-edge" in codes


def test_foreign_elements_are_flagged(complete_graph):
    data = serialize_bpmn(export_bpmn(complete_graph)).decode()
    broken = data.replace(
        "<task ", '<scriptTask id="zz" name="zz"/><task ', 1
    )
    codes = {d.code for d in validate_bpmn(broken)}
    assert "bad-child" in codes


def test_message_flow_must_cross_pools():
    doc = minimal_doc()
    doc.nodes["t2"] = BpmnNode("t2", "task", "again", "x", "x")
    doc.pools[0] = BpmnPool(
        id="pool-x",
        name="x",
        process_id="process-x",
        lanes=(BpmnLane(id="lane-x", name="x", node_ids=("t1", "t2")),),
    )
    doc.message_edges = [("t1", "t2")]
    codes = {d.code for d in validate_bpmn(serialize_bpmn(doc))}
    assert "message-flow-inside-pool" in codes
