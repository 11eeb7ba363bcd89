import json
from pathlib import Path

import pytest

import ontoconvo as oc

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def cefr_spec():
    return oc.parse_ontology(oc.bundled("cefr_ontology.json"))


@pytest.fixture(scope="session")
def polarity_spec():
    return oc.parse_ontology(oc.bundled("polarity_ontology.json"))


@pytest.fixture(scope="session")
def cefr_replies():
    return json.loads((FIXTURES / "mock_replies_cefr.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def polarity_replies():
    return json.loads((FIXTURES / "mock_replies_polarity.json").read_text("utf-8"))
