"""Seed repository of reusable process knowledge and its loader.

The repository file is sectioned UTF-8 text (``[roles]``,
``[abstract-services]``, ``[business-services]``, ``[resources]``,
``[coordination-services]``) with one record per line:

    name | key: value, value | key: value

Loading builds a knowledge base where every entry is an instance with a
``name`` fact, linked by the structural predicates (role performs abstract
services, abstract services decompose into business services with input and
output resources, coordination services manipulate resources).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .errors import BrokenReference, ParseError
from .kb import KnowledgeBase, Lit
from .vocab import (
    ABSTRACT_SERVICE,
    BUSINESS_SERVICE,
    COORDINATION_SERVICE,
    RESOURCE,
    ROLE,
)

BUNDLED_SEEDS = {"ph-mini": "ph-mini.seed"}

_SECTIONS = (
    "roles",
    "abstract-services",
    "business-services",
    "resources",
    "coordination-services",
)


@dataclass
class SeedRepository:
    """Parsed repository content, before knowledge-base construction."""

    roles: dict[str, list[str]] = field(default_factory=dict)
    abstract_services: dict[str, list[str]] = field(default_factory=dict)
    business_services: dict[str, tuple[list[str], list[str]]] = field(default_factory=dict)
    resources: list[str] = field(default_factory=list)
    coordination_services: dict[str, list[str]] = field(default_factory=dict)

    def record_count(self) -> int:
        return (
            len(self.roles)
            + len(self.abstract_services)
            + len(self.business_services)
            + len(self.resources)
            + len(self.coordination_services)
        )


def _parse_record(line: str, lineno: int) -> tuple[str, dict[str, list[str]]]:
    parts = [p.strip() for p in line.split("|")]
    name = parts[0]
    if not name:
        raise ParseError(f"line {lineno}: record has no name")
    fields: dict[str, list[str]] = {}
    for part in parts[1:]:
        if not part:
            continue
        key, sep, values = part.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected 'key: values' in {part!r}")
        fields[key.strip()] = [v.strip() for v in values.split(",") if v.strip()]
    return name, fields


def parse_seed(text: str) -> SeedRepository:
    repo = SeedRepository()
    section: str | None = None
    seen: dict[str, set] = {s: set() for s in _SECTIONS}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ParseError(f"line {lineno}: unknown section {section!r}")
            continue
        if section is None:
            raise ParseError(f"line {lineno}: record before any section header")
        name, fields = _parse_record(line, lineno)
        if name in seen[section]:
            raise ParseError(f"line {lineno}: duplicate {section} entry {name!r}")
        seen[section].add(name)
        if section == "roles":
            repo.roles[name] = fields.get("performs", [])
        elif section == "abstract-services":
            repo.abstract_services[name] = fields.get("business", [])
        elif section == "business-services":
            repo.business_services[name] = (fields.get("in", []), fields.get("out", []))
        elif section == "resources":
            repo.resources.append(name)
        else:
            repo.coordination_services[name] = fields.get("manipulates", [])
    _check_references(repo)
    return repo


def _check_references(repo: SeedRepository) -> None:
    def require(name: str, pool, kind: str, owner: str) -> None:
        if name not in pool:
            raise BrokenReference(f"{owner!r} references unknown {kind} {name!r}")

    for role, services in repo.roles.items():
        for service in services:
            require(service, repo.abstract_services, "abstract service", role)
    for abstract, children in repo.abstract_services.items():
        for child in children:
            require(child, repo.business_services, "business service", abstract)
    for business, (inputs, outputs) in repo.business_services.items():
        for resource in inputs + outputs:
            require(resource, repo.resources, "resource", business)
    for coordination, resources_ in repo.coordination_services.items():
        for resource in resources_:
            require(resource, repo.resources, "resource", coordination)


def build_kb(repo: SeedRepository) -> KnowledgeBase:
    kb = KnowledgeBase()
    groups = (
        (repo.roles, ROLE),
        (repo.abstract_services, ABSTRACT_SERVICE),
        (repo.business_services, BUSINESS_SERVICE),
        ({name: None for name in repo.resources}, RESOURCE),
        (repo.coordination_services, COORDINATION_SERVICE),
    )
    for entries, concept in groups:
        for name in entries:
            kb.add_instance(name, name, (concept,))
            kb.add_fact(name, "name", Lit(name))
    for role, services in repo.roles.items():
        for service in services:
            kb.add_fact(role, "performAService", service)
    for abstract, children in repo.abstract_services.items():
        for child in children:
            kb.add_fact(abstract, "hasBusinessService", child)
    for business, (inputs, outputs) in repo.business_services.items():
        for resource in inputs:
            kb.add_fact(business, "hasInput", resource)
        for resource in outputs:
            kb.add_fact(business, "hasOutput", resource)
    for coordination, resources_ in repo.coordination_services.items():
        for resource in resources_:
            kb.add_fact(coordination, "manipulateResource", resource)
    return kb


def resolve_seed_path(name_or_path: str):
    """Map a bundled seed name to its file, or pass a filesystem path through."""
    if name_or_path in BUNDLED_SEEDS:
        return resources.files("collabflow") / "data" / BUNDLED_SEEDS[name_or_path]
    return name_or_path


def load_seed(path) -> KnowledgeBase:
    """Read a seed repository file into a fresh knowledge base."""
    path = resolve_seed_path(str(path))
    if hasattr(path, "read_text"):
        text = path.read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    return build_kb(parse_seed(text))
