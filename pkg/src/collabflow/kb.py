"""In-memory knowledge base: typed instances plus subject/predicate/object facts.

Facts carry provenance (asserted by a loader/user, or derived by a named
deduction rule). Set semantics throughout: duplicate (s, p, o) triples are
impossible, and an asserted fact never loses its asserted status to a rule
that re-derives it.

Concept membership is stored alongside facts with the same provenance
machinery, so dropping everything derived restores exactly the asserted
knowledge, including instances minted by rules.

Writers need exclusive access; :meth:`KnowledgeBase.snapshot` returns a
frozen copy that is safe to share across threads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    DomainRangeViolation,
    DuplicateInstance,
    ParseError,
    UnknownConcept,
    UnknownInstance,
    UnknownPredicate,
    ValidationError,
)
from .vocab import CONCEPTS, ENUM_INDIVIDUALS, PREDICATES, TYPE_PREDICATE

ASSERTED = "asserted"
_DERIVED_PREFIX = "derived:"


def derived_by(rule_id: str) -> str:
    return _DERIVED_PREFIX + rule_id


def is_derived(provenance: str) -> bool:
    return provenance.startswith(_DERIVED_PREFIX)


def rule_of(provenance: str) -> str | None:
    if is_derived(provenance):
        return provenance[len(_DERIVED_PREFIX) :]
    return None


@dataclass(frozen=True)
class Lit:
    """A literal string object; distinguishes text values from instance ids."""

    value: str


def term_key(term) -> tuple:
    """Sort key placing instance ids before literals, each lexicographic."""
    if isinstance(term, Lit):
        return (1, term.value)
    return (0, term)


@dataclass(frozen=True)
class Fact:
    subject: str
    predicate: str
    object: "str | Lit"
    provenance: str = ASSERTED

    def spo(self) -> tuple:
        return (self.subject, self.predicate, self.object)

    def sort_key(self) -> tuple:
        return (self.subject, self.predicate) + term_key(self.object)

    def to_dict(self) -> dict:
        obj = (
            {"kind": "literal", "value": self.object.value}
            if isinstance(self.object, Lit)
            else {"kind": "id", "value": self.object}
        )
        return {
            "subject": self.subject,
            "predicate": self.predicate,
            "object": obj,
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class Instance:
    """Read-only view of one named individual."""

    id: str
    label: str
    concepts: frozenset[str]


class KnowledgeBase:
    """Mutable store of instances, concept memberships and facts."""

    def __init__(self) -> None:
        self._labels: dict[str, str] = {}
        self._typings: dict[tuple[str, str], str] = {}
        self._facts: dict[tuple, str] = {}
        self._frozen = False

    # ------------------------------------------------------------------ state

    def _check_writable(self) -> None:
        if self._frozen:
            raise TypeError("snapshot knowledge bases are read-only")

    def _copy(self) -> "KnowledgeBase":
        copy = KnowledgeBase()
        copy._labels = dict(self._labels)
        copy._typings = dict(self._typings)
        copy._facts = dict(self._facts)
        return copy

    def snapshot(self) -> "KnowledgeBase":
        """Immutable copy with an equal instance and fact set."""
        copy = self._copy()
        copy._frozen = True
        return copy

    def thaw(self) -> "KnowledgeBase":
        """Writable copy of this knowledge base."""
        return self._copy()

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (
            self._labels == other._labels
            and self._typings == other._typings
            and self._facts == other._facts
        )

    # -------------------------------------------------------------- instances

    def _declare(self, instance_id: str, label: str) -> None:
        if not instance_id or not label:
            raise ValidationError("instance id and label must be non-empty")
        if any(ch in instance_id or ch in label for ch in "\t\n\r"):
            raise ValidationError(f"control characters in instance {instance_id!r}")
        if instance_id in ENUM_INDIVIDUALS:
            raise DuplicateInstance(f"{instance_id!r} is a reserved enum individual")
        existing = self._labels.get(instance_id)
        if existing is not None and existing != label:
            raise DuplicateInstance(
                f"instance {instance_id!r} already declared with label {existing!r}"
            )
        self._labels[instance_id] = label

    def add_instance(
        self,
        instance_id: str,
        label: str | None = None,
        concepts: Iterable[str] = (),
        provenance: str = ASSERTED,
    ) -> "KnowledgeBase":
        """Declare an instance; re-declaration must agree on the label.

        Concepts accumulate across declarations (multi-typing), so retyping
        an existing individual is an ordinary call with one more concept.
        """
        self._check_writable()
        concepts = tuple(concepts)
        if not concepts and instance_id not in self._labels:
            raise UnknownConcept(f"instance {instance_id!r} needs at least one concept")
        for concept in concepts:
            if concept not in CONCEPTS:
                raise UnknownConcept(f"unknown concept {concept!r}")
        self._declare(instance_id, label if label is not None else instance_id)
        for concept in concepts:
            self._add_typing(instance_id, concept, provenance)
        return self

    def _add_typing(self, instance_id: str, concept: str, provenance: str) -> bool:
        key = (instance_id, concept)
        current = self._typings.get(key)
        if current is None:
            self._typings[key] = provenance
            return True
        if provenance == ASSERTED and current != ASSERTED:
            self._typings[key] = ASSERTED
        return False

    def add_typing(self, instance_id: str, concept: str, provenance: str = ASSERTED) -> bool:
        """Add a concept membership; returns True when it is new."""
        self._check_writable()
        if instance_id not in self._labels:
            raise UnknownInstance(f"unknown instance {instance_id!r}")
        if concept not in CONCEPTS:
            raise UnknownConcept(f"unknown concept {concept!r}")
        return self._add_typing(instance_id, concept, provenance)

    def has_instance(self, instance_id: str) -> bool:
        return instance_id in self._labels

    def label(self, instance_id: str) -> str:
        if instance_id in ENUM_INDIVIDUALS:
            return instance_id
        if instance_id not in self._labels:
            raise UnknownInstance(f"unknown instance {instance_id!r}")
        return self._labels[instance_id]

    def instance(self, instance_id: str) -> Instance:
        if instance_id not in self._labels:
            raise UnknownInstance(f"unknown instance {instance_id!r}")
        concepts = frozenset(c for (i, c) in self._typings if i == instance_id)
        return Instance(id=instance_id, label=self._labels[instance_id], concepts=concepts)

    def instances(self) -> list[Instance]:
        return [self.instance(i) for i in sorted(self._labels)]

    def instance_count(self) -> int:
        return len(self._labels)

    def instances_of(self, concept: str) -> list[str]:
        """Sorted ids of instances carrying the given concept."""
        if concept not in CONCEPTS:
            raise UnknownConcept(f"unknown concept {concept!r}")
        return sorted(i for (i, c) in self._typings if c == concept)

    def typings(self) -> list[tuple[str, str, str]]:
        """Sorted (instance, concept, provenance) triples."""
        return sorted((i, c, p) for (i, c), p in self._typings.items())

    # ------------------------------------------------------------------ facts

    def _object_exists(self, object_id: str) -> bool:
        return object_id in self._labels or object_id in ENUM_INDIVIDUALS

    def _validate_fact(self, subject: str, predicate: str, obj) -> None:
        spec = PREDICATES.get(predicate)
        if spec is None:
            raise UnknownPredicate(f"unknown predicate {predicate!r}")
        if subject not in self._labels:
            raise UnknownInstance(f"unknown subject {subject!r}")
        if spec.domains is not None:
            subject_concepts = {c for (i, c) in self._typings if i == subject}
            if not subject_concepts & spec.domains:
                raise DomainRangeViolation(
                    f"{subject!r} is not in the domain of {predicate!r}"
                )
        if spec.literal_range:
            if not isinstance(obj, Lit):
                raise DomainRangeViolation(f"{predicate!r} expects a literal object")
            return
        if isinstance(obj, Lit):
            raise DomainRangeViolation(f"{predicate!r} does not take a literal object")
        if spec.range_enum is not None:
            if obj not in spec.range_enum:
                raise DomainRangeViolation(
                    f"{obj!r} is not an allowed value of {predicate!r}"
                )
            return
        if not self._object_exists(obj):
            raise UnknownInstance(f"unknown object {obj!r}")
        object_concepts = {c for (i, c) in self._typings if i == obj}
        if spec.range_concepts and not object_concepts & spec.range_concepts:
            raise DomainRangeViolation(f"{obj!r} is not in the range of {predicate!r}")

    def add_fact(
        self, subject: str, predicate: str, obj, provenance: str = ASSERTED
    ) -> bool:
        """Add one validated fact; returns True when it is new.

        Idempotent on duplicates; an asserted fact is never downgraded to
        derived when a rule re-derives it.
        """
        self._check_writable()
        self._validate_fact(subject, predicate, obj)
        key = (subject, predicate, obj)
        current = self._facts.get(key)
        if current is None:
            self._facts[key] = provenance
            return True
        if provenance == ASSERTED and current != ASSERTED:
            self._facts[key] = ASSERTED
        return False

    def assert_fact(self, fact: Fact) -> "KnowledgeBase":
        self.add_fact(fact.subject, fact.predicate, fact.object, fact.provenance)
        return self

    def has_fact(self, subject: str, predicate: str, obj) -> bool:
        return (subject, predicate, obj) in self._facts

    def match(
        self,
        subject: str | None = None,
        predicate: str | None = None,
        obj=None,
    ) -> list[Fact]:
        """Facts unifying with the pattern, in stable lexicographic order.

        A ``predicate`` of :data:`~collabflow.vocab.TYPE_PREDICATE` matches
        concept memberships instead, reported as pseudo-facts; wildcard
        predicates cover regular facts only.
        """
        if predicate == TYPE_PREDICATE:
            out = [
                Fact(i, TYPE_PREDICATE, c, p)
                for (i, c), p in self._typings.items()
                if (subject is None or i == subject) and (obj is None or c == obj)
            ]
            return sorted(out, key=Fact.sort_key)
        out = []
        for (s, p, o), prov in self._facts.items():
            if subject is not None and s != subject:
                continue
            if predicate is not None and p != predicate:
                continue
            if obj is not None and o != obj:
                continue
            out.append(Fact(s, p, o, prov))
        return sorted(out, key=Fact.sort_key)

    def facts(self) -> list[Fact]:
        return sorted(
            (Fact(s, p, o, prov) for (s, p, o), prov in self._facts.items()),
            key=Fact.sort_key,
        )

    def fact_count(self) -> int:
        return len(self._facts)

    def objects(self, subject: str, predicate: str) -> list:
        """Sorted objects of all (subject, predicate, ?) facts."""
        return [f.object for f in self.match(subject, predicate, None)]

    # -------------------------------------------------------------- retraction

    def drop_derived(self) -> "KnowledgeBase":
        """Remove all derived facts, memberships and rule-minted instances."""
        self._check_writable()
        self._facts = {k: p for k, p in self._facts.items() if not is_derived(p)}
        self._typings = {k: p for k, p in self._typings.items() if not is_derived(p)}
        alive = {i for (i, _c) in self._typings}
        self._labels = {i: lb for i, lb in self._labels.items() if i in alive}
        return self

    # --------------------------------------------------------------- file form

    def dump_triples(self) -> str:
        """Canonical line-oriented text form: sorted, tab-separated.

        Concept memberships derived by a rule are marked ``Concept@rule`` so
        a dump/load round trip preserves provenance.
        """
        lines = []
        typed: dict[str, list[str]] = {}
        for (i, c), prov in self._typings.items():
            mark = c if prov == ASSERTED else f"{c}@{rule_of(prov)}"
            typed.setdefault(i, []).append(mark)
        for instance_id in sorted(self._labels):
            concepts = ",".join(sorted(typed.get(instance_id, [])))
            lines.append(
                f"instance\t{instance_id}\t{self._labels[instance_id]}\t{concepts}"
            )
        for fact in self.facts():
            obj = (
                json.dumps(fact.object.value, ensure_ascii=False)
                if isinstance(fact.object, Lit)
                else fact.object
            )
            lines.append(
                f"fact\t{fact.subject}\t{fact.predicate}\t{obj}\t{fact.provenance}"
            )
        return "\n".join(lines) + ("\n" if lines else "")


def load_triples(text: str) -> KnowledgeBase:
    """Parse the line-oriented triples form; import order does not matter."""
    kb = KnowledgeBase()
    instance_lines = []
    fact_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if fields[0] == "instance" and len(fields) == 4:
            instance_lines.append((lineno, fields))
        elif fields[0] == "fact" and len(fields) == 5:
            fact_lines.append((lineno, fields))
        else:
            raise ParseError(f"line {lineno}: unrecognized triples line {line!r}")
    for lineno, (_tag, instance_id, label, concepts) in instance_lines:
        try:
            kb._declare(instance_id, label)
            marks = [m for m in concepts.split(",") if m]
            if not marks:
                raise UnknownConcept(f"instance {instance_id!r} has no concepts")
            for mark in marks:
                concept, _, rule = mark.partition("@")
                provenance = derived_by(rule) if rule else ASSERTED
                if concept not in CONCEPTS:
                    raise UnknownConcept(f"unknown concept {concept!r}")
                kb._add_typing(instance_id, concept, provenance)
        except (UnknownConcept, DuplicateInstance, ValidationError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    for lineno, (_tag, subject, predicate, obj, provenance) in fact_lines:
        try:
            value = Lit(json.loads(obj)) if obj.startswith('"') else obj
            kb.add_fact(subject, predicate, value, provenance)
        except (UnknownInstance, UnknownPredicate, DomainRangeViolation) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: bad literal {obj!r}") from exc
    return kb


def save_kb(kb: KnowledgeBase, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(kb.dump_triples())


def load_kb(path) -> KnowledgeBase:
    with open(path, encoding="utf-8") as handle:
        return load_triples(handle.read())
