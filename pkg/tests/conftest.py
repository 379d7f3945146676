import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from collabflow.assembler import assemble, generate_events, insert_gateways
from collabflow.network import ingest_network, parse_network
from collabflow.rules import run_to_fixpoint
from collabflow.seed import load_seed

AB_XML = (resources.files("collabflow") / "data" / "ab-network.xml").read_text(
    encoding="utf-8"
)

# Frozen ids of the three dependencies deduced from the A/B fixture.
DEP_ORDER = "dep-place-order-obtain-order-purchase-order"
DEP_PRODUCTS = "dep-prepare-products-to-deliver-receive-products-products"
DEP_INVOICE = "dep-transfer-invoice-pay-invoice-invoice"
OCC_ORDER = f"occ-{DEP_ORDER}"
OCC_PRODUCTS = f"occ-{DEP_PRODUCTS}"
OCC_INVOICE = f"occ-{DEP_INVOICE}"


@pytest.fixture
def seed_kb():
    return load_seed("ph-mini")


@pytest.fixture
def ab_doc():
    return parse_network(AB_XML)


@pytest.fixture
def ab_kb(seed_kb, ab_doc):
    """Seed plus the ingested A/B network, before deduction."""
    return ingest_network(seed_kb, ab_doc)


@pytest.fixture
def deduced_kb(ab_kb):
    run_to_fixpoint(ab_kb)
    return ab_kb


@pytest.fixture
def ab_graph(deduced_kb):
    """Fully assembled A/B process graph with gateways and events."""
    graph = assemble(deduced_kb)
    insert_gateways(graph)
    generate_events(graph)
    return graph
