"""Command-line pipeline: validate, deduce, assemble, export, query, serve.

Exit codes are stable per error kind (see errors module); diagnostics go to
stderr. The seed repository is chosen with --seed (a bundled name like
``ph-mini`` or a file path) or the COLLABFLOW_SEED environment variable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import assembler
from .bpmn import export_bpmn, serialize_bpmn
from .errors import CollabflowError, MalformedQuery, ValidationError
from .kb import KnowledgeBase, load_kb, save_kb
from .network import ingest_network, parse_network, validate_network
from .query import canned_queries, run_query, serialize_results, serialize_results_json
from .rules import dump_rules, run_to_fixpoint
from .seed import load_seed

DEFAULT_SEED_ENV = "COLLABFLOW_SEED"


def _default_seed() -> str:
    return os.environ.get(DEFAULT_SEED_ENV, "ph-mini")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collabflow",
        description="Deduce a collaborative business process model from a "
        "described collaboration network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network document")
    p.add_argument("--network", required=True, help="network document (XML or JSON)")
    p.add_argument("--seed", default=_default_seed(), help="seed repository name or path")

    p = sub.add_parser("deduce", help="run the deduction rules to fixpoint")
    p.add_argument("--seed", default=_default_seed())
    p.add_argument("--network", help="network document (XML or JSON)")
    p.add_argument("--out", help="write the deduced knowledge base (triples form)")
    p.add_argument("--report", help="write the deduction report (JSON)")
    p.add_argument("--dump-rules", action="store_true", help="print the rule set and exit")

    p = sub.add_parser("assemble", help="build the process graph with gateways and events")
    p.add_argument("--seed", default=_default_seed())
    p.add_argument("--network", required=True)
    p.add_argument("--out", required=True, help="write the process graph (XML)")
    p.add_argument(
        "--literal-start-rule",
        action="store_true",
        help="wire every service without an incoming message flow to the "
        "start event, not just true initiators",
    )
    p.add_argument(
        "--default-gateway-type",
        choices=assembler.GATEWAY_TYPES,
        help="pre-assign this type to every gateway",
    )

    p = sub.add_parser("export", help="export a complete process graph as BPMN")
    p.add_argument("--graph", required=True, help="process graph XML from assemble")
    p.add_argument("--out", required=True, help="output .bpmn path")
    p.add_argument(
        "--assign",
        action="append",
        default=[],
        metavar="GATEWAY=TYPE",
        help="assign one gateway type (repeatable)",
    )
    p.add_argument("--default-gateway-type", choices=assembler.GATEWAY_TYPES)
    p.add_argument(
        "--compact",
        action="store_true",
        help="canonical single-line output instead of pretty-printed",
    )

    p = sub.add_parser("query", help="run a query and print the result table")
    p.add_argument("--kb", help="knowledge base triples file (e.g. from deduce --out)")
    p.add_argument("--seed", default=_default_seed())
    p.add_argument("--network")
    p.add_argument("--name", help="canned query name")
    p.add_argument("--text", help="query text (SELECT ... WHERE { ... })")
    p.add_argument("--format", choices=("xml", "json"), default="xml")
    p.add_argument("--out", help="write results here instead of stdout")
    p.add_argument("--list", action="store_true", help="list canned query names")

    p = sub.add_parser("serve", help="run the HTTP API (and UI when built)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--projects", default="projects", help="projects directory")
    p.add_argument("--seed", default=_default_seed())
    p.add_argument("--frontend", help="directory with built UI assets")

    return parser


def _echo_diagnostics(diagnostics) -> None:
    for d in diagnostics:
        where = f" ({d.subject})" if d.subject else ""
        print(f"{d.severity}[{d.code}]: {d.message}{where}", file=sys.stderr)


def _load_pipeline_kb(seed: str, network: str | None) -> KnowledgeBase:
    kb = load_seed(seed)
    if network:
        doc = parse_network(Path(network).read_text(encoding="utf-8"))
        ingest_network(kb, doc)
    return kb


def _cmd_validate(args) -> int:
    doc = parse_network(Path(args.network).read_text(encoding="utf-8"))
    diagnostics = validate_network(doc, load_seed(args.seed))
    _echo_diagnostics(diagnostics)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        return ValidationError.exit_code
    print(f"ok: {args.network} is ingestable")
    return 0


def _cmd_deduce(args) -> int:
    if args.dump_rules:
        print(dump_rules(), end="")
        return 0
    kb = _load_pipeline_kb(args.seed, args.network)
    report = run_to_fixpoint(kb)
    if args.out:
        save_kb(kb, args.out)
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    print(
        f"deduced {report.derived_count()} facts in {report.iterations} iterations "
        f"({len(report.created_instances)} new instances)"
    )
    for rule_id in sorted(report.facts_by_rule):
        print(f"  {rule_id}: {len(report.facts_by_rule[rule_id])}")
    return 0


def _assembled_graph(args) -> assembler.ProcessGraph:
    kb = _load_pipeline_kb(args.seed, args.network)
    run_to_fixpoint(kb)
    graph = assembler.assemble(kb)
    assembler.insert_gateways(graph)
    assembler.generate_events(graph, literal_start_rule=args.literal_start_rule)
    return graph


def _cmd_assemble(args) -> int:
    graph = _assembled_graph(args)
    if args.default_gateway_type:
        for gid in sorted(graph.gateways):
            assembler.assign_gateway_type(graph, gid, args.default_gateway_type)
    Path(args.out).write_text(assembler.serialize_graph(graph), encoding="utf-8")
    untyped = sum(1 for g in graph.gateways.values() if g.type == assembler.UNSET)
    print(
        f"assembled {len(graph.occurrences)} mediation tasks, "
        f"{len(graph.gateways)} gateways ({untyped} untyped), "
        f"{len(graph.events)} events -> {args.out}"
    )
    return 0


def _cmd_export(args) -> int:
    graph = assembler.parse_graph(Path(args.graph).read_text(encoding="utf-8"))
    if args.default_gateway_type:
        for gid in sorted(graph.gateways):
            if graph.gateways[gid].type == assembler.UNSET:
                assembler.assign_gateway_type(graph, gid, args.default_gateway_type)
    for assignment in args.assign:
        gateway_id, sep, gateway_type = assignment.partition("=")
        if not sep:
            raise ValidationError(f"--assign expects GATEWAY=TYPE, got {assignment!r}")
        assembler.assign_gateway_type(graph, gateway_id, gateway_type)
    data = serialize_bpmn(export_bpmn(graph), pretty=not args.compact)
    Path(args.out).write_bytes(data)
    print(f"exported {args.out} ({len(data)} bytes)")
    return 0


def _cmd_query(args) -> int:
    queries = canned_queries()
    if args.list:
        for name in sorted(queries):
            print(name)
        return 0
    if args.kb:
        kb = load_kb(args.kb)
    else:
        kb = _load_pipeline_kb(args.seed, args.network)
        run_to_fixpoint(kb)
    if args.name:
        if args.name not in queries:
            raise MalformedQuery(
                f"unknown canned query {args.name!r}; try --list"
            )
        table = run_query(kb, queries[args.name])
    elif args.text:
        table = run_query(kb, args.text)
    else:
        raise MalformedQuery("provide --name or --text")
    payload = (
        serialize_results(table) if args.format == "xml" else serialize_results_json(table)
    )
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        print(payload, end="")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    from .project import ProjectStore

    frontend = args.frontend
    if frontend is None:
        repo_root = Path(__file__).resolve().parent.parent.parent
        bundled = repo_root / "frontend" / "dist"
        frontend = str(bundled) if bundled.is_dir() else None
    app = create_app(ProjectStore(args.projects, seed=args.seed), frontend_dir=frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "deduce": _cmd_deduce,
    "assemble": _cmd_assemble,
    "export": _cmd_export,
    "query": _cmd_query,
    "serve": _cmd_serve,
}


def cli_run(argv=None) -> int:
    """Parse arguments and run one subcommand; returns the exit status."""
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CollabflowError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        _echo_diagnostics(getattr(exc, "diagnostics", []) or [])
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error[missing-file]: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
