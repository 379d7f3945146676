import random

import pytest

from collabflow.assembler import (
    END_EVENT,
    START_EVENT,
    UNSET,
    Occurrence,
    ProcessGraph,
    Task,
    assemble,
    assign_gateway_type,
    completeness_check,
    generate_events,
    insert_gateways,
    parse_graph,
    serialize_graph,
)
from collabflow.errors import NoDependencies, UnknownGateway, UnsupportedType
from collabflow.rules import run_to_fixpoint
from collabflow.seed import load_seed
from collabflow.network import ingest_network

from conftest import DEP_INVOICE, DEP_ORDER, DEP_PRODUCTS, OCC_INVOICE, OCC_ORDER, OCC_PRODUCTS
from generators import random_process_graph


def reachability(seq_flows, nodes):
    """Transitive closure restricted to the given nodes."""
    succ = {}
    for s, t in seq_flows:
        succ.setdefault(s, set()).add(t)
    closure = set()
    for origin in nodes:
        seen = set()
        frontier = [origin]
        while frontier:
            node = frontier.pop()
            for nxt in succ.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        closure.update((origin, target) for target in seen if target in nodes)
    return closure


# ------------------------------------------------------------------ assembly


def test_ab_assembly_counts(deduced_kb):
    graph = assemble(deduced_kb)
    assert sorted(graph.partner_pools) == ["A", "B"]  # plus the mediation pool
    assert len(graph.tasks) == 6
    assert len(graph.occurrences) == 3
    assert len(graph.tasks) + len(graph.occurrences) == 9
    assert len(graph.msg_flows) == 2 * len(graph.occurrences) == 6
    assert graph.mediation_lanes == [
        "manage flow of document",
        "manage flow of material",
    ]
    assert graph.partner_pools["A"] == ["seller"]
    assert graph.partner_pools["B"] == ["buyer"]


def test_occurrences_match_dependencies_one_to_one(deduced_kb):
    graph = assemble(deduced_kb)
    assert sorted(o.dependency for o in graph.occurrences.values()) == [
        DEP_ORDER,
        DEP_PRODUCTS,
        DEP_INVOICE,
    ]


def test_assemble_without_dependencies_fails(seed_kb):
    with pytest.raises(NoDependencies):
        assemble(seed_kb)


MINI_SEED = """
[roles]
orderer | performs: ordering
fulfiller | performs: fulfilment
[abstract-services]
ordering | business: place order
fulfilment | business: obtain order
[business-services]
place order | out: purchase order
obtain order | in: purchase order
[resources]
purchase order
[coordination-services]
manage flow of document | manipulates: purchase order
"""

MINI_DOC = """
<network name="mini">
  <participants name="X"><role>orderer</role></participants>
  <participants name="Y"><role>fulfiller</role></participants>
  <relationship type="supplier-customer" duration="continuous">
    <P1>X</P1><P2>Y</P2>
  </relationship>
  <topology power="central" duration="continuous"/>
</network>
"""


def test_single_dependency_graph(tmp_path):
    from collabflow.network import parse_network
    from collabflow.seed import build_kb, parse_seed

    kb = build_kb(parse_seed(MINI_SEED))
    ingest_network(kb, parse_network(MINI_DOC))
    run_to_fixpoint(kb)
    graph = assemble(kb)
    assert len(graph.occurrences) == 1
    assert len(graph.msg_flows) == 2
    assert len(graph.seq_flows) == 0


def test_message_flows_always_cross_the_mediation_boundary(ab_graph):
    partner_nodes = set(ab_graph.tasks)
    mediation_nodes = set(ab_graph.mediation_nodes())
    for source, target in ab_graph.msg_flows:
        assert (source in partner_nodes) != (target in partner_nodes)
        assert (source in mediation_nodes) != (target in mediation_nodes)


def test_sequence_flows_stay_inside_the_mediation_pool(ab_graph):
    mediation_nodes = set(ab_graph.mediation_nodes())
    for source, target in ab_graph.seq_flows:
        assert source in mediation_nodes and target in mediation_nodes


def test_multiple_coordinators_pick_smallest_and_annotate():
    kb = load_seed("ph-mini")
    kb.add_instance("also manage documents", "also manage documents", ("CoordinationService",))
    kb.add_fact("also manage documents", "manipulateResource", "purchase order")
    from conftest import AB_XML
    from collabflow.network import parse_network

    ingest_network(kb, parse_network(AB_XML))
    run_to_fixpoint(kb)
    graph = assemble(kb)
    occ = graph.occurrences[OCC_ORDER]
    assert occ.coordinator == "also manage documents"  # lexicographically first
    assert occ.alternates == ("manage flow of document",)


# ------------------------------------------------------------------ gateways


def linear_graph():
    graph = ProcessGraph(name="chain")
    for index in range(3):
        oid = f"occ-{index}"
        graph.occurrences[oid] = Occurrence(
            id=oid, dependency=f"dep-{index}", coordinator="c",
            from_service=f"f{index}", to_service=f"t{index}", resource=f"r{index}",
        )
    graph.mediation_lanes = ["c"]
    graph.seq_flows = {("occ-0", "occ-1"), ("occ-1", "occ-2")}
    return graph


def test_linear_chain_needs_no_gateways():
    graph = linear_graph()
    before = set(graph.seq_flows)
    insert_gateways(graph)
    assert graph.gateways == {}
    assert graph.seq_flows == before


def test_two_successors_get_one_diverging_gateway():
    graph = linear_graph()
    graph.seq_flows = {("occ-0", "occ-1"), ("occ-0", "occ-2")}
    insert_gateways(graph)
    assert list(graph.gateways) == ["gw-div-occ-0"]
    assert graph.gateways["gw-div-occ-0"].direction == "diverging"
    assert graph.gateways["gw-div-occ-0"].type == UNSET
    assert graph.seq_flows == {
        ("occ-0", "gw-div-occ-0"),
        ("gw-div-occ-0", "occ-1"),
        ("gw-div-occ-0", "occ-2"),
    }


def test_two_predecessors_get_one_converging_gateway():
    graph = linear_graph()
    graph.seq_flows = {("occ-0", "occ-2"), ("occ-1", "occ-2")}
    insert_gateways(graph)
    assert list(graph.gateways) == ["gw-conv-occ-2"]
    assert graph.gateways["gw-conv-occ-2"].direction == "converging"


def test_ab_pipeline_yields_one_diverging_and_one_converging(ab_graph):
    directions = sorted(g.direction for g in ab_graph.gateways.values())
    assert directions == ["converging", "diverging"]


def test_gateway_insertion_preserves_reachability():
    rng = random.Random(11)
    for _ in range(30):
        graph = random_process_graph(rng, max_occurrences=12)
        nodes = sorted(graph.occurrences)
        before = reachability(graph.seq_flows, nodes)
        insert_gateways(graph)
        after = reachability(graph.seq_flows, nodes)
        assert before == after
        for node in graph.mediation_nodes():
            if node in graph.gateways:
                continue
            assert len(graph.successors(node)) <= 1
            assert len(graph.predecessors(node)) <= 1


# -------------------------------------------------------------------- events


def test_ab_events_wiring(ab_graph):
    assert ("task-b-place-order", START_EVENT) in ab_graph.msg_flows
    assert (START_EVENT, OCC_ORDER) in ab_graph.seq_flows
    assert ("gw-conv-ev-end", END_EVENT) in ab_graph.seq_flows
    assert (OCC_PRODUCTS, "gw-conv-ev-end") in ab_graph.seq_flows
    assert (OCC_INVOICE, "gw-conv-ev-end") in ab_graph.seq_flows
    # internally fed services are not initiators
    assert ("task-a-prepare-products-to-deliver", START_EVENT) not in ab_graph.msg_flows
    assert ("task-a-transfer-invoice", START_EVENT) not in ab_graph.msg_flows


def test_literal_start_rule_wires_every_unfed_service(deduced_kb):
    graph = assemble(deduced_kb)
    insert_gateways(graph)
    generate_events(graph, literal_start_rule=True)
    into_start = {s for (s, t) in graph.msg_flows if t == START_EVENT}
    assert into_start == {
        "task-b-place-order",
        "task-a-prepare-products-to-deliver",
        "task-a-transfer-invoice",
    }


def test_generate_events_is_idempotent(ab_graph):
    snapshot = (
        dict(ab_graph.gateways),
        dict(ab_graph.events),
        set(ab_graph.seq_flows),
        set(ab_graph.msg_flows),
    )
    generate_events(ab_graph)
    assert snapshot == (
        dict(ab_graph.gateways),
        dict(ab_graph.events),
        set(ab_graph.seq_flows),
        set(ab_graph.msg_flows),
    )


def test_every_terminal_connects_to_the_end_event():
    rng = random.Random(23)
    for _ in range(30):
        graph = random_process_graph(rng, max_occurrences=12)
        insert_gateways(graph)
        generate_events(graph)
        for node in graph.mediation_nodes():
            if node in graph.events:
                continue
            assert graph.successors(node), f"{node} has no outgoing flow"


def test_two_independent_initiators_feed_the_start_event():
    graph = ProcessGraph(name="two-starts")
    for index in (0, 1):
        oid = f"occ-{index}"
        graph.occurrences[oid] = Occurrence(
            id=oid, dependency=f"dep-{index}", coordinator="c",
            from_service=f"from{index}", to_service=f"to{index}", resource=f"r{index}",
        )
        tid = f"task-p{index}-from{index}"
        graph.tasks[tid] = Task(
            id=tid, service=f"from{index}", pool=f"p{index}", lane=f"p{index}",
            inputs=(), outputs=(f"r{index}",),
        )
        consumer = f"task-q{index}-to{index}"
        graph.tasks[consumer] = Task(
            id=consumer, service=f"to{index}", pool=f"q{index}", lane=f"q{index}",
            inputs=(f"r{index}",), outputs=(),
        )
        graph.msg_flows.update({(tid, oid), (oid, consumer)})
    graph.partner_pools = {"p0": ["p0"], "p1": ["p1"], "q0": ["q0"], "q1": ["q1"]}
    graph.mediation_lanes = ["c"]
    insert_gateways(graph)
    generate_events(graph)
    into_start = {s for (s, t) in graph.msg_flows if t == START_EVENT}
    assert into_start == {"task-p0-from0", "task-p1-from1"}
    assert (START_EVENT, "gw-div-ev-start") in graph.seq_flows


# ------------------------------------------------------------- typing/checks


def test_assign_gateway_types(ab_graph):
    gateway_id = sorted(ab_graph.gateways)[0]
    assign_gateway_type(ab_graph, gateway_id, "parallel")
    assert ab_graph.gateways[gateway_id].type == "parallel"
    assign_gateway_type(ab_graph, gateway_id, "data-based-inclusive")
    assert ab_graph.gateways[gateway_id].type == "data-based-inclusive"


def test_assign_complex_gateway_is_rejected(ab_graph):
    gateway_id = sorted(ab_graph.gateways)[0]
    with pytest.raises(UnsupportedType):
        assign_gateway_type(ab_graph, gateway_id, "complex")


def test_assign_unknown_gateway(ab_graph):
    with pytest.raises(UnknownGateway):
        assign_gateway_type(ab_graph, "gw-nope", "parallel")


def test_completeness_check_flags_untyped_gateways(ab_graph):
    diagnostics = completeness_check(ab_graph)
    assert len(diagnostics) == 2
    assert {d.code for d in diagnostics} == {"untyped-gateway"}
    for gid in ab_graph.gateways:
        assign_gateway_type(ab_graph, gid, "parallel")
    assert completeness_check(ab_graph) == []


def test_completeness_check_flags_one_unset(ab_graph):
    gateways = sorted(ab_graph.gateways)
    assign_gateway_type(ab_graph, gateways[0], "parallel")
    assert len(completeness_check(ab_graph)) == 1


def test_completeness_check_flags_disconnected_occurrence(ab_graph):
    for gid in ab_graph.gateways:
        assign_gateway_type(ab_graph, gid, "parallel")
    ab_graph.occurrences["occ-orphan"] = Occurrence(
        id="occ-orphan", dependency="dep-x", coordinator="manage flow of document",
        from_service="x", to_service="y", resource="z",
    )
    codes = {d.code for d in completeness_check(ab_graph)}
    assert "unreachable" in codes


def test_completeness_check_requires_events(deduced_kb):
    graph = assemble(deduced_kb)
    insert_gateways(graph)
    codes = {d.code for d in completeness_check(graph)}
    assert {"start-events", "end-events"} <= codes


# ------------------------------------------------------------- serialization


def test_graph_xml_round_trip(ab_graph):
    text = serialize_graph(ab_graph)
    assert parse_graph(text) == ab_graph
    assert serialize_graph(ab_graph) == text


def test_graph_xml_uses_the_mapped_vocabulary(ab_graph):
    text = serialize_graph(ab_graph)
    for element in ("participants", "CIS", "role", "performsBusinessService",
                    "CISservices", "gateways", "events", "flows"):
        assert f"<{element} " in text
    assert 'type="seqFlow"' in text and 'type="msgFlow"' in text
