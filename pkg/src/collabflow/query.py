"""Conjunctive pattern queries over the knowledge base.

The language is a strict conjunctive subset: ``SELECT ?v ... WHERE {
pattern. ... }`` where each pattern is a subject/predicate/object triple of
variables and constants. ``a`` in predicate position matches concept
membership. Constants are bare tokens, ``<multi word id>`` for ids with
spaces, or ``"quoted text"`` for literals.

Results serialize to the conventional SPARQL result vocabulary in XML
(head/variable, results/result/binding with uri or literal cells) and to a
one-to-one JSON mirror.
"""
from __future__ import annotations

import json
import re
import urllib.parse
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .errors import MalformedQuery, ParseError
from .kb import KnowledgeBase, Lit, term_key
from .rules import PropertyAtom, Var, match_atoms
from .vocab import PREDICATES, TYPE_PREDICATE

RESULTS_NS = "http://www.w3.org/2005/sparql-results#"
XML_NS = "http://www.w3.org/XML/1998/namespace"
DEFAULT_BASE = "urn:collabflow:kb"


@dataclass(frozen=True)
class Query:
    select: tuple[str, ...]
    where: tuple[PropertyAtom, ...]


@dataclass
class ResultTable:
    """Bindings of the selected variables; one row per solution, sorted."""

    variables: tuple[str, ...]
    rows: list[tuple]

    def to_dict(self) -> dict:
        bindings = []
        for row in self.rows:
            entry = {}
            for var, cell in zip(self.variables, row):
                if isinstance(cell, Lit):
                    entry[var] = {"type": "literal", "value": cell.value}
                else:
                    entry[var] = {"type": "uri", "value": cell}
            bindings.append(entry)
        return {"head": {"vars": list(self.variables)}, "results": {"bindings": bindings}}


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
      | (?P<literal>"(?:[^"\\]|\\.)*")
      | (?P<bracket><[^<>]*>)
      | (?P<punct>[{}.])
      | (?P<word>[^\s{}.?"<>]+)
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            if text[pos:].strip():
                raise MalformedQuery(f"cannot tokenize query near {text[pos:pos+20]!r}")
            break
        tokens.append(match.group(0).strip())
        pos = match.end()
    return tokens


def _term(token: str):
    if token.startswith("?"):
        return Var(token[1:])
    if token.startswith('"'):
        return Lit(json.loads(token))
    if token.startswith("<") and token.endswith(">"):
        return token[1:-1].strip()
    return token


def parse_query(text: str) -> Query:
    tokens = _tokenize(text)
    if not tokens or tokens[0].upper() != "SELECT":
        raise MalformedQuery("query must start with SELECT")
    index = 1
    select: list[str] = []
    while index < len(tokens) and tokens[index].startswith("?"):
        select.append(tokens[index][1:])
        index += 1
    if not select:
        raise MalformedQuery("SELECT needs at least one variable")
    if index >= len(tokens) or tokens[index].upper() != "WHERE":
        raise MalformedQuery("expected WHERE after the selected variables")
    index += 1
    if index >= len(tokens) or tokens[index] != "{":
        raise MalformedQuery("expected '{' after WHERE")
    index += 1
    clauses: list[PropertyAtom] = []
    triple: list = []
    while index < len(tokens) and tokens[index] != "}":
        token = tokens[index]
        if token == ".":
            if triple:
                raise MalformedQuery("incomplete triple before '.'")
        else:
            triple.append(_term(token))
            if len(triple) == 3:
                clauses.append(PropertyAtom(triple[1], triple[0], triple[2]))
                triple = []
        index += 1
    if index >= len(tokens):
        raise MalformedQuery("missing closing '}'")
    if triple:
        raise MalformedQuery("incomplete triple at end of WHERE block")
    return validate_query(Query(tuple(select), tuple(clauses)))


def validate_query(query: Query) -> Query:
    if not query.select:
        raise MalformedQuery("no variables selected")
    if not query.where:
        raise MalformedQuery("WHERE block must contain at least one pattern")
    clause_vars: set[str] = set()
    for clause in query.where:
        if isinstance(clause.predicate, str) and clause.predicate != TYPE_PREDICATE:
            if clause.predicate not in PREDICATES:
                raise MalformedQuery(f"unknown predicate {clause.predicate!r}")
        if isinstance(clause.subject, Lit):
            raise MalformedQuery("a literal cannot be a subject")
        for term in (clause.subject, clause.predicate, clause.object):
            if isinstance(term, Var):
                clause_vars.add(term.name)
    missing = [v for v in query.select if v not in clause_vars]
    if missing:
        raise MalformedQuery(f"selected variables not used in WHERE: {missing}")
    return query


def run_query(kb: KnowledgeBase, query: "Query | str") -> ResultTable:
    """Evaluate a query; rows are deduplicated and lexicographically sorted."""
    if isinstance(query, str):
        query = parse_query(query)
    else:
        validate_query(query)
    rows = {
        tuple(binding[var] for var in query.select)
        for binding in match_atoms(kb, query.where)
    }
    ordered = sorted(rows, key=lambda row: tuple(term_key(cell) for cell in row))
    return ResultTable(tuple(query.select), ordered)


def canned_queries() -> dict[str, Query]:
    """The eight named extraction queries over a deduced knowledge base."""
    texts = {
        "common-goals": "SELECT ?goal ?description WHERE { ?goal a CommonGoal . ?goal description ?description . }",
        "relationships": "SELECT ?relationship ?type ?p1 ?p2 WHERE { ?relationship a Relationship . ?relationship hasType ?type . ?relationship P1 ?p1 . ?relationship P2 ?p2 . }",
        "topologies": "SELECT ?topology ?type WHERE { ?topology a Topology . ?topology hasType ?type . }",
        "participants-roles": "SELECT ?name ?role WHERE { ?P name ?name . ?P playRole ?role . }",
        "abstract-services": "SELECT ?participant ?service WHERE { ?participant provideAService ?service . }",
        "business-services": "SELECT ?participant ?service WHERE { ?participant provideBusinessService ?service . }",
        "dependencies": "SELECT ?dependency ?from ?to ?resource WHERE { ?dependency a DependencyBetweenBusinessServices . ?dependency fromBusinessService ?from . ?dependency toBusinessService ?to . ?dependency containResource ?resource . }",
        "mis-services": "SELECT ?network ?service WHERE { ?network hasMISservice ?service . }",
    }
    return {name: parse_query(text) for name, text in texts.items()}


# ------------------------------------------------------------- serialization


def _uri(base: str, instance_id: str) -> str:
    return f"{base}#{urllib.parse.quote(instance_id)}"


def serialize_results(table: ResultTable, base: str = DEFAULT_BASE) -> str:
    """XML form of a result table (deterministic bytes for equal tables)."""
    ET.register_namespace("", RESULTS_NS)
    root = ET.Element(f"{{{RESULTS_NS}}}sparql")
    head = ET.SubElement(root, f"{{{RESULTS_NS}}}head")
    for var in table.variables:
        ET.SubElement(head, f"{{{RESULTS_NS}}}variable", {"name": var})
    results = ET.SubElement(
        root, f"{{{RESULTS_NS}}}results", {"ordered": "false", "distinct": "false"}
    )
    for row in table.rows:
        result = ET.SubElement(results, f"{{{RESULTS_NS}}}result")
        for var, cell in zip(table.variables, row):
            binding = ET.SubElement(result, f"{{{RESULTS_NS}}}binding", {"name": var})
            if isinstance(cell, Lit):
                literal = ET.SubElement(binding, f"{{{RESULTS_NS}}}literal")
                literal.set(f"{{{XML_NS}}}lang", "en")
                literal.text = cell.value
            else:
                ET.SubElement(binding, f"{{{RESULTS_NS}}}uri").text = _uri(base, cell)
    ET.indent(root)
    return '<?xml version="1.0"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def parse_results(text: str, base: str = DEFAULT_BASE) -> ResultTable:
    """Inverse of :func:`serialize_results` (modulo the instance-id base)."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"result XML does not parse: {exc}") from exc
    ns = {"sr": RESULTS_NS}
    variables = tuple(
        v.get("name") or "" for v in root.findall("sr:head/sr:variable", ns)
    )
    rows = []
    for result in root.findall("sr:results/sr:result", ns):
        cells: dict[str, object] = {}
        for binding in result.findall("sr:binding", ns):
            name = binding.get("name") or ""
            uri = binding.find("sr:uri", ns)
            if uri is not None:
                value = uri.text or ""
                if value.startswith(base + "#"):
                    value = value[len(base) + 1 :]
                cells[name] = urllib.parse.unquote(value)
            else:
                literal = binding.find("sr:literal", ns)
                cells[name] = Lit(literal.text or "" if literal is not None else "")
        rows.append(tuple(cells.get(var, Lit("")) for var in variables))
    return ResultTable(variables, rows)


def serialize_results_json(table: ResultTable) -> str:
    return json.dumps(table.to_dict(), indent=2, sort_keys=True) + "\n"
