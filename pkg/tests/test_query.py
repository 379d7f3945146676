import xml.etree.ElementTree as ET

import pytest

from collabflow.errors import MalformedQuery
from collabflow.kb import KnowledgeBase, Lit
from collabflow.query import (
    RESULTS_NS,
    ResultTable,
    canned_queries,
    parse_query,
    parse_results,
    run_query,
    serialize_results,
    serialize_results_json,
)

FIG12_TEXT = "SELECT ?name ?role WHERE { ?P name ?name . ?P playRole ?role . }"


def test_participants_roles_query(deduced_kb):
    table = run_query(deduced_kb, FIG12_TEXT)
    assert table.variables == ("name", "role")
    assert table.rows == [(Lit("A"), "seller"), (Lit("B"), "buyer")]


def test_any_query_on_empty_kb_is_empty():
    table = run_query(KnowledgeBase(), FIG12_TEXT)
    assert table.rows == []


def test_goal_achievement_after_deduction(deduced_kb):
    table = run_query(
        deduced_kb, "SELECT ?service WHERE { ?goal achievesAService ?service . }"
    )
    assert [row[0] for row in table.rows] == ["buy", "buy in a store", "buy over internet"]


def test_canned_queries_cover_the_extraction_list(deduced_kb):
    queries = canned_queries()
    assert len(queries) == 8
    assert set(queries) == {
        "common-goals",
        "relationships",
        "topologies",
        "participants-roles",
        "abstract-services",
        "business-services",
        "dependencies",
        "mis-services",
    }
    for query in queries.values():
        assert run_query(deduced_kb, query) is not None  # all well-formed


def test_canned_participants_roles_matches_the_text_form(deduced_kb):
    canned = run_query(deduced_kb, canned_queries()["participants-roles"])
    literal = run_query(deduced_kb, FIG12_TEXT)
    assert canned == literal


def test_canned_extraction_results(deduced_kb):
    queries = canned_queries()
    topo = run_query(deduced_kb, queries["topologies"])
    assert topo.rows == [("ab-collab-topology", "P2P")]
    deps = run_query(deduced_kb, queries["dependencies"])
    assert len(deps.rows) == 3
    mis = run_query(deduced_kb, queries["mis-services"])
    assert mis.rows == [
        ("AB-collab", "manage flow of document"),
        ("AB-collab", "manage flow of material"),
    ]


def test_type_patterns_and_bracketed_ids(deduced_kb):
    table = run_query(
        deduced_kb,
        "SELECT ?p WHERE { ?p a Participant . ?p provideBusinessService <obtain order> . }",
    )
    assert table.rows == [("A",)]


def test_result_is_insertion_order_invariant(seed_kb):
    from collabflow.network import ingest_network, parse_network
    from conftest import AB_XML
    from collabflow.seed import load_seed

    forward = ingest_network(load_seed("ph-mini"), parse_network(AB_XML))
    assert run_query(forward, FIG12_TEXT) == run_query(
        ingest_network(seed_kb, parse_network(AB_XML)), FIG12_TEXT
    )


def test_queries_are_monotone(deduced_kb):
    before = set(run_query(deduced_kb, FIG12_TEXT).rows)
    deduced_kb.add_instance("C", "C", ("Participant",))
    deduced_kb.add_fact("C", "name", Lit("C"))
    deduced_kb.add_fact("C", "playRole", "buyer")
    after = set(run_query(deduced_kb, FIG12_TEXT).rows)
    assert before <= after


# ------------------------------------------------------------- serialization


def test_empty_table_serialization():
    text = serialize_results(ResultTable(("name", "role"), []))
    root = ET.fromstring(text)
    assert root.tag == f"{{{RESULTS_NS}}}sparql"
    variables = root.findall(f"{{{RESULTS_NS}}}head/{{{RESULTS_NS}}}variable")
    assert [v.get("name") for v in variables] == ["name", "role"]
    results = root.find(f"{{{RESULTS_NS}}}results")
    assert results is not None
    assert results.get("ordered") == "false"
    assert results.get("distinct") == "false"
    assert list(results) == []


def test_ab_table_serialization_structure(deduced_kb):
    table = run_query(deduced_kb, FIG12_TEXT)
    text = serialize_results(table)
    root = ET.fromstring(text)
    results = root.findall(f"{{{RESULTS_NS}}}results/{{{RESULTS_NS}}}result")
    assert len(results) == 2
    first = results[0]
    bindings = first.findall(f"{{{RESULTS_NS}}}binding")
    assert [b.get("name") for b in bindings] == ["name", "role"]
    literal = bindings[0].find(f"{{{RESULTS_NS}}}literal")
    assert literal is not None
    assert literal.get("{http://www.w3.org/XML/1998/namespace}lang") == "en"
    assert literal.text == "A"
    uri = bindings[1].find(f"{{{RESULTS_NS}}}uri")
    assert uri is not None and uri.text.endswith("#seller")


def test_serialize_parse_round_trip(deduced_kb):
    table = run_query(deduced_kb, FIG12_TEXT)
    assert parse_results(serialize_results(table)) == table


def test_round_trip_with_spacey_ids(deduced_kb):
    table = run_query(
        deduced_kb, "SELECT ?p ?s WHERE { ?p provideBusinessService ?s . }"
    )
    assert parse_results(serialize_results(table)) == table


def test_serialization_is_deterministic(deduced_kb):
    table = run_query(deduced_kb, FIG12_TEXT)
    assert serialize_results(table) == serialize_results(table)


def test_json_mirror_shape(deduced_kb):
    table = run_query(deduced_kb, FIG12_TEXT)
    payload = table.to_dict()
    assert payload["head"] == {"vars": ["name", "role"]}
    assert payload["results"]["bindings"][0]["name"] == {"type": "literal", "value": "A"}
    assert payload["results"]["bindings"][0]["role"] == {"type": "uri", "value": "seller"}
    assert serialize_results_json(table).endswith("\n")


# ------------------------------------------------------------------- parsing


def test_malformed_queries_are_rejected():
    for text in (
        "WHERE { ?a name ?b . }",
        "SELECT WHERE { ?a name ?b . }",
        "SELECT ?a",
        "SELECT ?a WHERE { ?a name }",
        "SELECT ?a WHERE { ?a name ?b .",
        "SELECT ?missing WHERE { ?a name ?b . }",
        'SELECT ?a WHERE { ?a nonsense ?b . }',
        'SELECT ?a WHERE { "literal" name ?a . }',
    ):
        with pytest.raises(MalformedQuery):
            parse_query(text)
