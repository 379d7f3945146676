"""Conjunctive deduction rules with string built-ins, evaluated to fixpoint.

A rule body is a conjunction of concept atoms, property atoms and built-in
atoms; the head is a conjunction of concept and property atoms. Head
variables that no body atom binds must be covered by a skolem template, which
mints an instance id deterministically from the binding (so the result of
deduction never depends on evaluation order).

Derived concept memberships travel as pseudo-facts with the reserved
predicate ``a``, which keeps one uniform shape for everything a rule emits.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator

from .errors import EmptyNeedle, EmptySeparator, IterationCap, MalformedRule
from .kb import Fact, KnowledgeBase, Lit, derived_by
from .vocab import (
    ABSTRACT_SERVICE,
    BUSINESS_DEPENDENCY,
    COLLABORATIVE_NETWORK,
    COMMON_GOAL,
    CONCEPTS,
    COORDINATION_SERVICE,
    MIS_DEPENDENCY,
    MIS_SERVICE,
    PARTICIPANT,
    PREDICATES,
    TOPOLOGY,
    TYPE_PREDICATE,
    slug,
)

SUBSTRING_BEFORE = "substring-before"
CONTAINS_IGNORE_CASE = "contains-ignore-case"
_BUILTIN_ARITY = {SUBSTRING_BEFORE: 3, CONTAINS_IGNORE_CASE: 2}


def builtin_substring_before(text: str, separator: str) -> str:
    """Prefix of ``text`` before the first ``separator``.

    When the separator does not occur the whole string is returned (the
    first and only token), not the empty string.
    """
    if separator == "":
        raise EmptySeparator("separator must be non-empty")
    head, found, _ = text.partition(separator)
    return head if found else text


def builtin_contains_ignore_case(haystack: str, needle: str) -> bool:
    """Case-folded containment test; rejects an empty needle."""
    if needle == "":
        raise EmptyNeedle("needle must be non-empty")
    return needle.casefold() in haystack.casefold()


# --------------------------------------------------------------------- atoms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class ConceptAtom:
    concept: str
    term: "Var | str"


@dataclass(frozen=True)
class PropertyAtom:
    predicate: "Var | str"
    subject: "Var | str"
    object: "Var | str | Lit"


@dataclass(frozen=True)
class BuiltinAtom:
    builtin: str
    args: tuple


@dataclass(frozen=True)
class SkolemSpec:
    """Mints ``slug(prefix, *parts)`` for a head-only variable."""

    var: str
    prefix: str
    parts: tuple[str, ...]


@dataclass(frozen=True)
class Rule:
    id: str
    body: tuple
    head: tuple
    skolems: tuple[SkolemSpec, ...] = ()


def validate_rule(rule: Rule) -> None:
    """Reject rules whose head could not be instantiated from the body."""
    if not rule.body:
        raise MalformedRule(f"{rule.id}: body must be non-empty")
    bound: set[str] = set()
    for atom in rule.body:
        if isinstance(atom, ConceptAtom):
            if atom.concept not in CONCEPTS:
                raise MalformedRule(f"{rule.id}: unknown concept {atom.concept!r}")
            if isinstance(atom.term, Var):
                bound.add(atom.term.name)
        elif isinstance(atom, PropertyAtom):
            if not isinstance(atom.predicate, Var) and atom.predicate not in PREDICATES:
                raise MalformedRule(f"{rule.id}: unknown predicate {atom.predicate!r}")
            for term in (atom.predicate, atom.subject, atom.object):
                if isinstance(term, Var):
                    bound.add(term.name)
        elif isinstance(atom, BuiltinAtom):
            arity = _BUILTIN_ARITY.get(atom.builtin)
            if arity is None:
                raise MalformedRule(f"{rule.id}: unknown builtin {atom.builtin!r}")
            if len(atom.args) != arity:
                raise MalformedRule(
                    f"{rule.id}: {atom.builtin} expects {arity} arguments"
                )
            inputs = atom.args[1:] if atom.builtin == SUBSTRING_BEFORE else atom.args
            for term in inputs:
                if isinstance(term, Var) and term.name not in bound:
                    raise MalformedRule(
                        f"{rule.id}: builtin input ?{term.name} unbound at its position"
                    )
            if atom.builtin == SUBSTRING_BEFORE and isinstance(atom.args[0], Var):
                bound.add(atom.args[0].name)
        else:
            raise MalformedRule(f"{rule.id}: unknown atom kind {atom!r}")
    skolem_vars = set()
    for skolem in rule.skolems:
        for part in skolem.parts:
            if part not in bound:
                raise MalformedRule(
                    f"{rule.id}: skolem part ?{part} is not bound by the body"
                )
        skolem_vars.add(skolem.var)
    if not rule.head:
        raise MalformedRule(f"{rule.id}: head must be non-empty")
    for atom in rule.head:
        if isinstance(atom, ConceptAtom):
            terms = (atom.term,)
            if atom.concept not in CONCEPTS:
                raise MalformedRule(f"{rule.id}: unknown concept {atom.concept!r}")
        elif isinstance(atom, PropertyAtom):
            if atom.predicate not in PREDICATES:
                raise MalformedRule(f"{rule.id}: unknown predicate {atom.predicate!r}")
            terms = (atom.subject, atom.object)
        else:
            raise MalformedRule(f"{rule.id}: head atom must be concept or property")
        for term in terms:
            if isinstance(term, Var) and term.name not in bound | skolem_vars:
                raise MalformedRule(
                    f"{rule.id}: head variable ?{term.name} is neither body-bound "
                    f"nor skolemized"
                )


# ------------------------------------------------------------------ matching


def _resolve(term, binding: dict):
    if isinstance(term, Var):
        return binding.get(term.name)
    return term


def _as_text(value) -> str:
    return value.value if isinstance(value, Lit) else value


def _match_concept(kb: KnowledgeBase, atom: ConceptAtom, binding, restrict):
    bound = _resolve(atom.term, binding)
    if bound is not None and not isinstance(bound, str):
        return  # a literal can never be a concept member
    for fact in kb.match(bound, TYPE_PREDICATE, atom.concept):
        if restrict is not None and ("t", fact.subject, fact.object) not in restrict:
            continue
        if isinstance(atom.term, Var) and bound is None:
            extended = dict(binding)
            extended[atom.term.name] = fact.subject
            yield extended
        else:
            yield binding


def _match_property(kb: KnowledgeBase, atom: PropertyAtom, binding, restrict):
    subject = _resolve(atom.subject, binding)
    predicate = _resolve(atom.predicate, binding)
    obj = _resolve(atom.object, binding)
    for fact in kb.match(
        subject if isinstance(subject, str) else None,
        predicate if isinstance(predicate, str) else None,
        obj,
    ):
        if restrict is not None and ("f",) + fact.spo() not in restrict:
            continue
        extended = binding
        consistent = True
        for term, value in (
            (atom.subject, fact.subject),
            (atom.predicate, fact.predicate),
            (atom.object, fact.object),
        ):
            if not isinstance(term, Var):
                continue
            if term.name in extended:
                if extended[term.name] != value:  # repeated variable in the atom
                    consistent = False
                    break
            else:
                if extended is binding:
                    extended = dict(binding)
                extended[term.name] = value
        if consistent:
            yield extended


def _match_builtin(atom: BuiltinAtom, binding):
    args = [_resolve(a, binding) for a in atom.args]
    if atom.builtin == SUBSTRING_BEFORE:
        out, text, sep = args
        if text is None or sep is None:
            return
        result = Lit(builtin_substring_before(_as_text(text), _as_text(sep)))
        if out is None:
            extended = dict(binding)
            extended[atom.args[0].name] = result
            yield extended
        elif out == result or _as_text(out) == result.value:
            yield binding
        return
    haystack, needle = args
    if haystack is None or needle is None:
        return
    try:
        hit = builtin_contains_ignore_case(_as_text(haystack), _as_text(needle))
    except EmptyNeedle:
        hit = False
    if hit:
        yield binding


def match_atoms(
    kb: KnowledgeBase,
    atoms,
    binding: dict | None = None,
    restrict_index: int | None = None,
    restrict: set | None = None,
) -> Iterator[dict]:
    """All bindings satisfying the conjunction, depth-first and deterministic.

    When ``restrict_index`` names an atom, that atom only matches facts whose
    key is in ``restrict`` (the semi-naive delta pass).
    """
    bindings = [dict(binding or {})]
    for index, atom in enumerate(atoms):
        limited = restrict if index == restrict_index else None
        next_bindings = []
        for current in bindings:
            if isinstance(atom, ConceptAtom):
                next_bindings.extend(_match_concept(kb, atom, current, limited))
            elif isinstance(atom, PropertyAtom):
                next_bindings.extend(_match_property(kb, atom, current, limited))
            else:
                next_bindings.extend(_match_builtin(atom, current))
        bindings = next_bindings
        if not bindings:
            return iter(())
    return iter(bindings)


# ---------------------------------------------------------------- evaluation


def _head_facts(rule: Rule, binding: dict) -> list[Fact]:
    full = dict(binding)
    for skolem in rule.skolems:
        parts = [_as_text(full[p]) for p in skolem.parts]
        full[skolem.var] = slug(skolem.prefix, *parts)
    provenance = derived_by(rule.id)
    out = []
    for atom in rule.head:
        if isinstance(atom, ConceptAtom):
            out.append(Fact(_resolve(atom.term, full), TYPE_PREDICATE, atom.concept, provenance))
        else:
            out.append(
                Fact(
                    _resolve(atom.subject, full),
                    atom.predicate,
                    _resolve(atom.object, full),
                    provenance,
                )
            )
    return out


def _evaluate(kb: KnowledgeBase, rule: Rule, delta: set | None) -> list[Fact]:
    facts: dict[tuple, Fact] = {}
    if delta is None:
        passes = [(None, None)]
    else:
        passes = [
            (i, delta)
            for i, atom in enumerate(rule.body)
            if not isinstance(atom, BuiltinAtom)
        ]
    for index, restrict in passes:
        for binding in match_atoms(kb, rule.body, None, index, restrict):
            for fact in _head_facts(rule, binding):
                facts.setdefault(fact.spo(), fact)
    return sorted(facts.values(), key=Fact.sort_key)


def evaluate_rule(kb: KnowledgeBase, rule: Rule) -> set[Fact]:
    """All head instantiations of one rule over the full knowledge base.

    Pure: the knowledge base is not modified, and facts already present are
    included. Concept memberships appear as ``a`` pseudo-facts.
    """
    validate_rule(rule)
    return set(_evaluate(kb, rule, None))


@dataclass
class DeductionReport:
    """What a fixpoint run added: new facts grouped by rule, new instances."""

    iterations: int = 0
    facts_by_rule: dict = field(default_factory=dict)
    created_instances: list = field(default_factory=list)

    def derived_facts(self) -> list[Fact]:
        out = [f for facts in self.facts_by_rule.values() for f in facts]
        return sorted(out, key=Fact.sort_key)

    def derived_count(self) -> int:
        return sum(len(facts) for facts in self.facts_by_rule.values())

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "createdInstances": list(self.created_instances),
            "factsByRule": {
                rule_id: [f.to_dict() for f in facts]
                for rule_id, facts in sorted(self.facts_by_rule.items())
            },
        }


def _is_present(kb: KnowledgeBase, fact: Fact) -> bool:
    if fact.predicate == TYPE_PREDICATE:
        return bool(kb.match(fact.subject, TYPE_PREDICATE, fact.object))
    return kb.has_fact(fact.subject, fact.predicate, fact.object)


def _apply(kb: KnowledgeBase, fact: Fact, created: list) -> tuple:
    """Apply one derived fact; returns its delta key."""
    if fact.predicate == TYPE_PREDICATE:
        if not kb.has_instance(fact.subject):
            kb.add_instance(fact.subject, fact.subject, (fact.object,), fact.provenance)
            created.append(fact.subject)
        else:
            kb.add_typing(fact.subject, fact.object, fact.provenance)
        return ("t", fact.subject, fact.object)
    kb.add_fact(fact.subject, fact.predicate, fact.object, fact.provenance)
    return ("f",) + fact.spo()


def run_to_fixpoint(
    kb: KnowledgeBase, rules=None, iteration_cap: int = 10_000
) -> DeductionReport:
    """Apply the rules until none can derive a new fact.

    Semi-naive: after the first sweep, each rule is re-joined only through
    the facts added by the previous sweep. The result is independent of rule
    order; the cap only guards against a defective rule set.
    """
    rules = list(builtin_ruleset() if rules is None else rules)
    for rule in rules:
        validate_rule(rule)
    report = DeductionReport()
    by_rule: dict[str, dict] = defaultdict(dict)
    delta: set | None = None
    while True:
        report.iterations += 1
        if report.iterations > iteration_cap:
            raise IterationCap(f"no fixpoint after {iteration_cap} iterations")
        new_delta: set = set()
        for rule in rules:
            fresh = [f for f in _evaluate(kb, rule, delta) if not _is_present(kb, f)]
            # concept memberships first so skolem instances exist and are
            # typed before facts about them are validated
            fresh.sort(key=lambda f: (f.predicate != TYPE_PREDICATE,) + f.sort_key())
            for fact in fresh:
                new_delta.add(_apply(kb, fact, report.created_instances))
                by_rule[rule.id].setdefault(fact.spo(), fact)
        if not new_delta:
            break
        delta = new_delta
    report.facts_by_rule = {
        rule_id: sorted(facts.values(), key=Fact.sort_key)
        for rule_id, facts in by_rule.items()
        if facts
    }
    report.created_instances = sorted(set(report.created_instances))
    return report


# ------------------------------------------------------------------ rule set


def _v(name: str) -> Var:
    return Var(name)


def builtin_ruleset() -> list[Rule]:
    """The ten compiled-in deduction rules, in stable id order."""
    x, y, z, a, b, c, d, e, f, p = (
        _v("x"), _v("y"), _v("z"), _v("a"), _v("b"),
        _v("c"), _v("d"), _v("e"), _v("f"), _v("p"),
    )
    e1, e2, b2, s = _v("e1"), _v("e2"), _v("b2"), _v("s")
    dependency_head = (
        ConceptAtom(BUSINESS_DEPENDENCY, e),
        PropertyAtom("fromBusinessService", e, c),
        PropertyAtom("toBusinessService", e, b),
        PropertyAtom("containResource", e, d),
        PropertyAtom("isCoordinatedBy", e, f),
        PropertyAtom("hasMISservice", a, f),
        ConceptAtom(MIS_SERVICE, f),
    )
    dependency_skolem = (SkolemSpec("e", "dep", ("c", "b", "d")),)

    def dependency_body(out_end: str, in_end: str) -> tuple:
        return (
            ConceptAtom(COLLABORATIVE_NETWORK, a),
            PropertyAtom("hasRelationship", a, z),
            PropertyAtom(out_end, z, y),
            PropertyAtom("provideBusinessService", y, c),
            PropertyAtom("hasOutput", c, d),
            PropertyAtom(in_end, z, x),
            PropertyAtom("provideBusinessService", x, b),
            PropertyAtom("hasInput", b, d),
            ConceptAtom(COORDINATION_SERVICE, f),
            PropertyAtom("manipulateResource", f, d),
        )

    return [
        Rule(
            id="GR1a",
            body=(
                ConceptAtom(PARTICIPANT, x),
                PropertyAtom("playRole", x, y),
                PropertyAtom("performAService", y, z),
            ),
            head=(PropertyAtom("provideAService", x, z),),
        ),
        Rule(
            id="GR1b",
            body=(
                ConceptAtom(PARTICIPANT, x),
                PropertyAtom("provideAService", x, z),
                PropertyAtom("performAService", y, z),
            ),
            head=(PropertyAtom("playRole", x, y),),
        ),
        Rule(
            id="GR2",
            body=(
                ConceptAtom(PARTICIPANT, x),
                PropertyAtom("provideAService", x, y),
                PropertyAtom("hasBusinessService", y, a),
            ),
            head=(PropertyAtom("provideBusinessService", x, a),),
        ),
        Rule(
            id="GR3a",
            body=dependency_body("P1", "P2"),
            head=dependency_head,
            skolems=dependency_skolem,
        ),
        Rule(
            id="GR3b",
            body=dependency_body("P2", "P1"),
            head=dependency_head,
            skolems=dependency_skolem,
        ),
        Rule(
            id="GR3seq",
            body=(
                ConceptAtom(BUSINESS_DEPENDENCY, e1),
                PropertyAtom("toBusinessService", e1, b),
                PropertyAtom("provideBusinessService", p, b),
                ConceptAtom(BUSINESS_DEPENDENCY, e2),
                PropertyAtom("fromBusinessService", e2, b2),
                PropertyAtom("provideBusinessService", p, b2),
                PropertyAtom("hasOutput", b, d),
                PropertyAtom("hasInput", b2, d),
            ),
            head=(
                ConceptAtom(MIS_DEPENDENCY, s),
                PropertyAtom("fromBusinessService", s, b),
                PropertyAtom("toBusinessService", s, b2),
                PropertyAtom("containResource", s, d),
            ),
            skolems=(SkolemSpec("s", "seq", ("b", "b2", "d")),),
        ),
        Rule(
            id="GR4",
            body=(
                ConceptAtom(COMMON_GOAL, x),
                PropertyAtom("description", x, a),
                BuiltinAtom(SUBSTRING_BEFORE, (y, a, Lit(" "))),
                ConceptAtom(ABSTRACT_SERVICE, b),
                PropertyAtom("name", b, c),
                BuiltinAtom(CONTAINS_IGNORE_CASE, (c, y)),
            ),
            head=(PropertyAtom("achievesAService", x, b),),
        ),
        Rule(
            id="GR5a",
            body=(
                ConceptAtom(TOPOLOGY, x),
                PropertyAtom("hasPower", x, "central"),
                PropertyAtom("hasDuration", x, "continuous"),
            ),
            head=(PropertyAtom("hasType", x, "star"),),
        ),
        Rule(
            id="GR5b",
            body=(
                ConceptAtom(TOPOLOGY, x),
                PropertyAtom("hasPower", x, "equal"),
                PropertyAtom("hasDuration", x, "discontinuous"),
            ),
            head=(PropertyAtom("hasType", x, "P2P"),),
        ),
        Rule(
            id="GR5c",
            body=(
                ConceptAtom(TOPOLOGY, x),
                PropertyAtom("hasPower", x, "hierarchical"),
                PropertyAtom("hasDuration", x, "continuous"),
            ),
            head=(PropertyAtom("hasType", x, "chain"),),
        ),
    ]


def _atom_text(atom) -> str:
    def term(t):
        if isinstance(t, Var):
            return f"?{t.name}"
        if isinstance(t, Lit):
            return f'"{t.value}"'
        return str(t)

    if isinstance(atom, ConceptAtom):
        return f"{atom.concept}({term(atom.term)})"
    if isinstance(atom, PropertyAtom):
        return f"{atom.predicate}({term(atom.subject)}, {term(atom.object)})"
    args = ", ".join(term(t) for t in atom.args)
    return f"{atom.builtin}({args})"


def dump_rules(rules=None) -> str:
    """Human-readable rule listing, one atom per clause, ``body => head``."""
    rules = builtin_ruleset() if rules is None else rules
    blocks = []
    for rule in rules:
        lines = [f"{rule.id}:"]
        lines += [f"  {_atom_text(atom)}" for atom in rule.body]
        lines.append("  =>")
        lines += [f"  {_atom_text(atom)}" for atom in rule.head]
        for skolem in rule.skolems:
            parts = ", ".join(f"?{p}" for p in skolem.parts)
            lines.append(f"  # ?{skolem.var} minted as {skolem.prefix}({parts})")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
