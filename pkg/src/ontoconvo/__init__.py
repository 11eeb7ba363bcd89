"""Ontology-driven conversational control.

Annotates utterances with descriptor-derived classes, steers the next agent
utterance through a declarative strategy, constrains an external LLM with
bracketed control codes, and scores compliance like a classification task.
"""

from importlib import resources

from .textmetrics import FeatureVector, TokenizedText, features, segment
from .ontology import (
    OntologySpec,
    Rule,
    Interval,
    Equals,
    parse_ontology,
    load_ontology,
    classify,
    check_consistency,
)
from .induction import (
    LabeledSample,
    TreeConfig,
    DecisionTree,
    fit_tree,
    extract_rules,
    rules_to_ontology,
)
from .strategy import (
    StrategySpec,
    StrategyState,
    next_target,
    default_polarity_table,
    load_strategy,
    initial_state,
)
from .annotators import (
    ClassifierVerdict,
    LexiconPolarityBackend,
    LexiconLoadBackend,
    RemoteClassifierBackend,
    annotate_cefr,
    annotate_polarity_profile,
)
from .dataset import UtteranceRecord, wrap, strip, balance, build_corpus
from .gateway import (
    Message,
    PromptBundle,
    Generation,
    EndpointConfig,
    GatewayClient,
    MockGateway,
    build_control_prompt,
)
from .engine import Session, Turn, run_turn, replay_targets
from .evaluation import (
    LabelPair,
    EvalReport,
    zero_shot_eval,
    accuracy,
    f1_macro,
    f1_weighted,
    per_class_f1,
    mae_ordinal,
    mcc_multiclass,
    br_score,
    unigram_f1,
)

__version__ = "0.1.0"


def bundled(name: str) -> str:
    """Text of a bundled data resource (ontologies, strategies, lexicons)."""
    return resources.files("ontoconvo.data").joinpath(name).read_text("utf-8")
