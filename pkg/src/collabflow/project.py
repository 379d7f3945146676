"""Project lifecycle: one directory per project, inspectable artifacts.

A project moves monotonically along draft -> deduced -> assembled ->
complete -> exported. Every stage persists its artifact next to the others
(network document, knowledge-base triples, deduction report, process graph,
BPMN export), so a project directory can be diffed, versioned and reloaded
byte-stably.

All mutation goes through a per-project lock; reads work on parsed copies.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from . import assembler
from .bpmn import export_bpmn, serialize_bpmn
from .errors import ProjectStateError, UnknownProject, ValidationError
from .kb import KnowledgeBase, is_derived, load_kb, rule_of, save_kb
from .network import (
    CollaborativeNetworkDoc,
    doc_to_xml,
    ingest_network,
    parse_network,
    validate_network,
)
from .rules import DeductionReport, run_to_fixpoint
from .seed import load_seed
from .vocab import slug

STATUSES = ("draft", "deduced", "assembled", "complete", "exported")

PROJECT_FILE = "project.json"
NETWORK_FILE = "network.xml"
KB_FILE = "kb.triples"
REPORT_FILE = "report.json"
PROCESS_FILE = "process.xml"
EXPORT_FILE = "export.bpmn"


@dataclass
class Project:
    id: str
    name: str
    status: str = "draft"
    seed: str = "ph-mini"

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "status": self.status, "seed": self.seed}


def _at_least(status: str, stage: str) -> bool:
    return STATUSES.index(status) >= STATUSES.index(stage)


class ProjectStore:
    """Filesystem-backed project registry with per-project write locks."""

    def __init__(self, root: "Path | str", seed: str = "ph-mini"):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.seed = seed
        self._locks: dict[str, threading.RLock] = {}
        self._registry_lock = threading.Lock()

    def _lock(self, project_id: str) -> threading.RLock:
        with self._registry_lock:
            return self._locks.setdefault(project_id, threading.RLock())

    def _dir(self, project_id: str) -> Path:
        return self.root / project_id

    def _save(self, project: Project) -> None:
        payload = json.dumps(project.to_dict(), indent=2, sort_keys=True) + "\n"
        (self._dir(project.id) / PROJECT_FILE).write_text(payload, encoding="utf-8")

    # ------------------------------------------------------------------ crud

    def create(self, name: str, seed: str | None = None) -> Project:
        name = name.strip()
        if not name:
            raise ValidationError("project name must be non-empty")
        base = slug(name) or "project"
        with self._registry_lock:
            project_id = base
            counter = 2
            while (self.root / project_id).exists():
                project_id = f"{base}-{counter}"
                counter += 1
            (self.root / project_id).mkdir(parents=True)
        project = Project(id=project_id, name=name, seed=seed or self.seed)
        self._save(project)
        return project

    def get(self, project_id: str) -> Project:
        path = self._dir(project_id) / PROJECT_FILE
        if not path.exists():
            raise UnknownProject(f"unknown project {project_id!r}")
        data = json.loads(path.read_text(encoding="utf-8"))
        return Project(
            id=data["id"], name=data["name"], status=data["status"], seed=data["seed"]
        )

    def list(self) -> list[Project]:
        out = []
        for child in sorted(self.root.iterdir()):
            if (child / PROJECT_FILE).exists():
                out.append(self.get(child.name))
        return out

    # ---------------------------------------------------------------- stages

    def seed_kb(self, project: Project) -> KnowledgeBase:
        return load_seed(project.seed)

    def set_network(self, project_id: str, text: str) -> CollaborativeNetworkDoc:
        """Store the network document; only allowed while drafting."""
        with self._lock(project_id):
            project = self.get(project_id)
            if project.status != "draft":
                raise ProjectStateError(
                    f"network can only change in draft status, not {project.status!r}"
                )
            doc = parse_network(text)
            diagnostics = validate_network(doc, self.seed_kb(project))
            errors = [d for d in diagnostics if d.severity == "error"]
            if errors:
                raise ValidationError(
                    "; ".join(d.message for d in errors), diagnostics=diagnostics
                )
            (self._dir(project_id) / NETWORK_FILE).write_text(
                doc_to_xml(doc), encoding="utf-8"
            )
            return doc

    def network(self, project_id: str) -> CollaborativeNetworkDoc:
        path = self._dir(self.get(project_id).id) / NETWORK_FILE
        if not path.exists():
            raise ProjectStateError("no network document uploaded yet")
        return parse_network(path.read_text(encoding="utf-8"))

    def deduce(self, project_id: str) -> DeductionReport:
        """Run the rules to fixpoint; re-running is a no-op on the fact set."""
        with self._lock(project_id):
            project = self.get(project_id)
            if project.status not in ("draft", "deduced"):
                raise ProjectStateError(f"cannot deduce in status {project.status!r}")
            doc = self.network(project_id)
            kb = self.seed_kb(project)
            ingest_network(kb, doc)
            report = run_to_fixpoint(kb)
            save_kb(kb, self._dir(project_id) / KB_FILE)
            (self._dir(project_id) / REPORT_FILE).write_text(
                json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            project.status = "deduced"
            self._save(project)
            return report

    def kb(self, project_id: str) -> KnowledgeBase:
        project = self.get(project_id)
        if not _at_least(project.status, "deduced"):
            raise ProjectStateError("deduction has not run yet")
        return load_kb(self._dir(project_id) / KB_FILE)

    def report(self, project_id: str) -> dict:
        project = self.get(project_id)
        if not _at_least(project.status, "deduced"):
            raise ProjectStateError("deduction has not run yet")
        return json.loads(
            (self._dir(project_id) / REPORT_FILE).read_text(encoding="utf-8")
        )

    def facts(
        self,
        project_id: str,
        provenance: str | None = None,
        rule: str | None = None,
    ) -> list[dict]:
        """Facts of the deduced knowledge base, optionally filtered."""
        kb = self.kb(project_id)
        out = []
        for fact in kb.facts():
            if provenance == "asserted" and is_derived(fact.provenance):
                continue
            if provenance == "derived" and not is_derived(fact.provenance):
                continue
            if rule is not None and rule_of(fact.provenance) != rule:
                continue
            out.append(fact.to_dict())
        return out

    def assemble(self, project_id: str, literal_start_rule: bool = False) -> assembler.ProcessGraph:
        with self._lock(project_id):
            project = self.get(project_id)
            if project.status != "deduced":
                raise ProjectStateError(f"cannot assemble in status {project.status!r}")
            kb = self.kb(project_id)
            graph = assembler.assemble(kb)
            assembler.insert_gateways(graph)
            assembler.generate_events(graph, literal_start_rule=literal_start_rule)
            self._write_graph(project_id, graph)
            project.status = "assembled"
            self._save(project)
            return graph

    def _write_graph(self, project_id: str, graph: assembler.ProcessGraph) -> None:
        (self._dir(project_id) / PROCESS_FILE).write_text(
            assembler.serialize_graph(graph), encoding="utf-8"
        )

    def graph(self, project_id: str) -> assembler.ProcessGraph:
        project = self.get(project_id)
        if not _at_least(project.status, "assembled"):
            raise ProjectStateError("process graph has not been assembled yet")
        return assembler.parse_graph(
            (self._dir(project_id) / PROCESS_FILE).read_text(encoding="utf-8")
        )

    def assign_gateway(self, project_id: str, gateway_id: str, gateway_type: str) -> dict:
        """Record a gateway type; flips the project to complete when the
        completeness check comes back clean."""
        with self._lock(project_id):
            project = self.get(project_id)
            if project.status not in ("assembled", "complete"):
                raise ProjectStateError(
                    f"cannot assign gateway types in status {project.status!r}"
                )
            graph = self.graph(project_id)
            assembler.assign_gateway_type(graph, gateway_id, gateway_type)
            self._write_graph(project_id, graph)
            diagnostics = assembler.completeness_check(graph)
            project.status = "complete" if not diagnostics else "assembled"
            self._save(project)
            return {
                "gateway": gateway_id,
                "type": gateway_type,
                "status": project.status,
                "diagnostics": [d.to_dict() for d in diagnostics],
            }

    def diagnostics(self, project_id: str) -> list[dict]:
        return [d.to_dict() for d in assembler.completeness_check(self.graph(project_id))]

    def export(self, project_id: str, pretty: bool = True) -> bytes:
        with self._lock(project_id):
            project = self.get(project_id)
            if project.status not in ("complete", "exported"):
                raise ProjectStateError(
                    f"cannot export in status {project.status!r}; "
                    f"assign all gateway types first"
                )
            graph = self.graph(project_id)
            data = serialize_bpmn(export_bpmn(graph), pretty=pretty)
            (self._dir(project_id) / EXPORT_FILE).write_bytes(data)
            project.status = "exported"
            self._save(project)
            return data

    def exported_bytes(self, project_id: str) -> bytes:
        project = self.get(project_id)
        if project.status != "exported":
            raise ProjectStateError("project has not been exported yet")
        return (self._dir(project_id) / EXPORT_FILE).read_bytes()
