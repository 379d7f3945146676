"""collabflow: from a described collaboration network to a BPMN process model.

Pipeline: load a seed repository of process knowledge, ingest the network
document, run the deduction rules to fixpoint, assemble the process graph,
insert gateways and events, have a human type the gateways, export BPMN.
"""

from .kb import Fact, Instance, KnowledgeBase, Lit
from .rules import DeductionReport, builtin_ruleset, evaluate_rule, run_to_fixpoint
from .seed import load_seed
from .network import CollaborativeNetworkDoc, ingest_network, parse_network, validate_network
from .query import ResultTable, canned_queries, run_query, serialize_results
from .assembler import (
    GATEWAY_TYPES,
    ProcessGraph,
    assemble,
    assign_gateway_type,
    completeness_check,
    generate_events,
    insert_gateways,
)
from .bpmn import BpmnDocument, export_bpmn, serialize_bpmn, validate_bpmn

__version__ = "0.1.0"

__all__ = [
    "BpmnDocument",
    "CollaborativeNetworkDoc",
    "DeductionReport",
    "Fact",
    "GATEWAY_TYPES",
    "Instance",
    "KnowledgeBase",
    "Lit",
    "ProcessGraph",
    "ResultTable",
    "assemble",
    "assign_gateway_type",
    "builtin_ruleset",
    "canned_queries",
    "completeness_check",
    "evaluate_rule",
    "export_bpmn",
    "generate_events",
    "ingest_network",
    "insert_gateways",
    "load_seed",
    "parse_network",
    "run_query",
    "run_to_fixpoint",
    "serialize_bpmn",
    "serialize_results",
    "validate_bpmn",
    "validate_network",
]
