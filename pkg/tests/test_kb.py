import pytest
from hypothesis import given, strategies as st

from collabflow.errors import (
    DomainRangeViolation,
    DuplicateInstance,
    ParseError,
    UnknownConcept,
    UnknownInstance,
    UnknownPredicate,
)
from collabflow.kb import (
    ASSERTED,
    Fact,
    KnowledgeBase,
    Lit,
    derived_by,
    load_triples,
)
from collabflow.vocab import ENUM_INDIVIDUALS, PARTICIPANT, ROLE, RESOURCE


def small_kb():
    kb = KnowledgeBase()
    kb.add_instance("A", "A", (PARTICIPANT,))
    kb.add_instance("B", "B", (PARTICIPANT,))
    kb.add_instance("seller", "seller", (ROLE,))
    kb.add_instance("buyer", "buyer", (ROLE,))
    kb.add_instance("purchase order", "purchase order", (RESOURCE,))
    return kb


def test_assert_twice_is_idempotent():
    kb = small_kb()
    assert kb.add_fact("A", "playRole", "seller") is True
    assert kb.add_fact("A", "playRole", "seller") is False
    assert len(kb.match(None, "playRole", None)) == 1


def test_range_violation_rejected():
    kb = small_kb()
    with pytest.raises(DomainRangeViolation):
        kb.add_fact("A", "playRole", "purchase order")


def test_domain_violation_rejected():
    kb = small_kb()
    with pytest.raises(DomainRangeViolation):
        kb.add_fact("seller", "playRole", "buyer")


def test_fact_count_matches_linear_scan():
    kb = small_kb()
    kb.add_fact("A", "playRole", "seller")
    scan = [f for f in kb.facts() if f.predicate == "playRole"]
    assert len(scan) == 1
    assert kb.match(None, "playRole", None) == scan


def test_unknown_subject_and_object():
    kb = small_kb()
    with pytest.raises(UnknownInstance):
        kb.add_fact("nobody", "playRole", "seller")
    with pytest.raises(UnknownInstance):
        kb.add_fact("A", "playRole", "sheller")
    with pytest.raises(UnknownPredicate):
        kb.add_fact("A", "playsRole", "seller")


def test_literal_range_enforced():
    kb = small_kb()
    kb.add_fact("A", "name", Lit("A"))
    with pytest.raises(DomainRangeViolation):
        kb.add_fact("A", "name", "seller")
    with pytest.raises(DomainRangeViolation):
        kb.add_fact("A", "playRole", Lit("seller"))


def test_match_pattern_positions():
    kb = small_kb()
    kb.add_fact("A", "playRole", "seller")
    kb.add_fact("B", "playRole", "buyer")
    assert [f.spo() for f in kb.match(None, "playRole", None)] == [
        ("A", "playRole", "seller"),
        ("B", "playRole", "buyer"),
    ]
    assert kb.match("A", None, None)[0].object == "seller"
    assert kb.match(None, None, "buyer")[0].subject == "B"


def test_match_on_empty_kb_is_empty():
    kb = KnowledgeBase()
    assert kb.match(None, None, None) == []
    assert kb.match("A", "playRole", None) == []


def test_full_wildcard_returns_every_fact_once():
    kb = small_kb()
    kb.add_fact("A", "playRole", "seller")
    kb.add_fact("B", "playRole", "buyer")
    kb.add_fact("A", "name", Lit("A"))
    everything = kb.match(None, None, None)
    assert len(everything) == kb.fact_count()
    assert len({f.spo() for f in everything}) == len(everything)


def test_snapshot_is_frozen_and_equal():
    empty = KnowledgeBase()
    assert empty.snapshot() == empty

    kb = small_kb()
    kb.add_fact("A", "playRole", "seller")
    snap = kb.snapshot()
    assert snap == kb
    kb.add_fact("B", "playRole", "buyer")
    assert snap != kb
    assert len(snap.match(None, "playRole", None)) == 1
    with pytest.raises(TypeError):
        snap.add_fact("B", "playRole", "buyer")
    # recount oracle: stored count equals an independent walk of the fact list
    assert snap.fact_count() == len(list(snap.facts())) == 1


def test_multi_typing_accumulates():
    kb = small_kb()
    kb.add_typing("seller", PARTICIPANT)
    assert kb.instance("seller").concepts == frozenset({ROLE, PARTICIPANT})


def test_instance_errors():
    kb = KnowledgeBase()
    with pytest.raises(UnknownConcept):
        kb.add_instance("x", "x", ("NoSuchConcept",))
    with pytest.raises(UnknownConcept):
        kb.add_instance("x", "x", ())
    kb.add_instance("x", "x", (PARTICIPANT,))
    with pytest.raises(DuplicateInstance):
        kb.add_instance("x", "different label", (PARTICIPANT,))


def test_enum_ids_are_reserved():
    kb = KnowledgeBase()
    assert "central" in ENUM_INDIVIDUALS and "group-of-interest" in ENUM_INDIVIDUALS
    assert len(ENUM_INDIVIDUALS) == 11
    with pytest.raises(DuplicateInstance):
        kb.add_instance("star", "star", (PARTICIPANT,))


def test_asserted_wins_over_derived():
    kb = small_kb()
    kb.add_fact("A", "playRole", "seller", derived_by("GR1b"))
    kb.add_fact("A", "playRole", "seller", ASSERTED)
    assert kb.match("A", "playRole", "seller")[0].provenance == ASSERTED
    kb.drop_derived()
    assert kb.has_fact("A", "playRole", "seller")


def test_drop_derived_restores_asserted_state():
    kb = small_kb()
    kb.add_fact("A", "playRole", "seller")
    before = kb.snapshot()
    kb.add_fact("B", "playRole", "buyer", derived_by("GR1b"))
    kb.add_typing("seller", PARTICIPANT, derived_by("GR3a"))
    kb.add_instance("minted", "minted", (PARTICIPANT,), derived_by("GR3a"))
    kb.drop_derived()
    assert kb == before.thaw()


@given(st.permutations(range(4)))
def test_fact_set_equality_ignores_insertion_order(order):
    facts = [
        ("A", "playRole", "seller"),
        ("B", "playRole", "buyer"),
        ("A", "name", Lit("A")),
        ("B", "name", Lit("B")),
    ]
    reference = small_kb()
    shuffled = small_kb()
    for s, p, o in facts:
        reference.add_fact(s, p, o)
    for index in order:
        shuffled.add_fact(*facts[index])
    assert reference == shuffled
    assert reference.facts() == shuffled.facts()


def test_triples_round_trip_preserves_everything():
    kb = small_kb()
    kb.add_fact("A", "playRole", "seller")
    kb.add_fact("A", "name", Lit("A"))
    kb.add_fact("B", "playRole", "buyer", derived_by("GR1b"))
    kb.add_typing("seller", PARTICIPANT, derived_by("GR3a"))
    text = kb.dump_triples()
    loaded = load_triples(text)
    assert loaded == kb
    assert loaded.dump_triples() == text


def test_triples_import_is_order_insensitive():
    kb = small_kb()
    kb.add_fact("A", "playRole", "seller")
    lines = kb.dump_triples().splitlines()
    reordered = "\n".join(reversed(lines)) + "\n"
    assert load_triples(reordered) == kb


def test_triples_parse_errors():
    with pytest.raises(ParseError):
        load_triples("garbage line\n")
    with pytest.raises(ParseError):
        load_triples("instance\tx\tx\tNoSuchConcept\n")
    with pytest.raises(ParseError):
        load_triples("fact\tA\tplayRole\tseller\tasserted\n")  # unknown instance


def test_fact_to_dict_shapes():
    fact = Fact("A", "name", Lit("A"))
    assert fact.to_dict()["object"] == {"kind": "literal", "value": "A"}
    fact = Fact("A", "playRole", "seller")
    assert fact.to_dict()["object"] == {"kind": "id", "value": "seller"}
