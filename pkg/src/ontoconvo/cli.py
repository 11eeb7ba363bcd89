"""Command-line interface.

Every subcommand accepts ``--json`` for machine-readable output. Usage errors
exit 2 (click's default); runtime failures exit 1 with a diagnostic.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bundled
from .annotators import (
    LexiconLoadBackend,
    LexiconPolarityBackend,
    annotate_cefr,
    annotate_polarity_profile,
)
from .dataset import build_corpus, load_records
from .engine import Session, run_turn
from .errors import OntoConvoError
from .evaluation import zero_shot_eval
from .gateway import EndpointConfig, GatewayClient, MockGateway
from .induction import (
    TreeConfig,
    fit_tree,
    load_training_csv,
    rules_to_ontology,
    tree_from_json,
    tree_to_json,
)
from .ontology import (
    check_consistency,
    load_ontology,
    ontology_to_json,
)
from .strategy import load_strategy
from .textmetrics import features


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _make_annotator(spec):
    """Text -> class for the given ontology: readability descriptors when the
    spec is numeric, lexicon load/polarity backends when categorical."""
    if spec.categorical_descriptors:
        load_backend = LexiconLoadBackend()
        pol_backend = LexiconPolarityBackend()
        return lambda text: annotate_polarity_profile(
            text, load_backend, pol_backend, spec
        )
    return lambda text: annotate_cefr(text, spec)


def _make_gateway(endpoint: str):
    if endpoint.startswith("mock:"):
        return MockGateway.from_fixture(endpoint[len("mock:") :])
    if endpoint:
        return GatewayClient(EndpointConfig(url=endpoint))
    return GatewayClient(EndpointConfig.from_env())


def _load_spec(path: str):
    if path.startswith("bundled:"):
        from .ontology import parse_ontology

        return parse_ontology(bundled(path[len("bundled:") :]))
    return load_ontology(path)


@click.group()
def main():
    """Ontology-driven conversational control toolkit."""


@main.command("features")
@click.argument("file", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def features_cmd(file, as_json):
    """Print the six linguistic descriptors of FILE's text."""
    try:
        vec = features(Path(file).read_text("utf-8"))
    except OntoConvoError as e:
        _fail(str(e))
    if as_json:
        click.echo(json.dumps(vec.as_dict()))
    else:
        for name, value in vec.as_dict().items():
            click.echo(f"{name:16s} {value:.4f}")


@main.command("fit")
@click.argument("train_csv", type=click.Path(exists=True))
@click.option("--max-depth", default=5, show_default=True)
@click.option("--min-leaf", default=1, show_default=True)
@click.option("-o", "--output", type=click.Path(), required=True)
def fit_cmd(train_csv, max_depth, min_leaf, output):
    """Fit a CART tree on a labeled feature CSV and write it as JSON."""
    try:
        samples = load_training_csv(train_csv)
        labels = tuple(dict.fromkeys(s.label for s in samples))
        cfg = TreeConfig(label_set=labels, max_depth=max_depth, min_leaf=min_leaf)
        tree = fit_tree(samples, cfg)
    except OntoConvoError as e:
        _fail(str(e))
    Path(output).write_text(tree_to_json(tree) + "\n", "utf-8")
    click.echo(f"fitted tree with depth {tree.depth()} over {len(samples)} samples")


@main.command("rules")
@click.argument("tree_file", type=click.Path(exists=True))
@click.option("--concept", default="CEFR", show_default=True)
@click.option("--ordinal/--no-ordinal", default=True, show_default=True)
@click.option("-o", "--output", type=click.Path(), required=True)
def rules_cmd(tree_file, concept, ordinal, output):
    """Extract leaf-path rules from a fitted tree into an ontology document."""
    try:
        tree = tree_from_json(Path(tree_file).read_text("utf-8"))
        spec = rules_to_ontology(tree, concept=concept, ordinal=ordinal)
    except OntoConvoError as e:
        _fail(str(e))
    Path(output).write_text(ontology_to_json(spec) + "\n", "utf-8")
    click.echo(f"wrote {len(spec.rules)} rules for concept {concept}")


@main.command("check")
@click.argument("ontology", type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def check_cmd(ontology, as_json):
    """Audit an ontology for overlapping or missing rules."""
    try:
        spec = _load_spec(ontology)
    except OntoConvoError as e:
        _fail(str(e))
    report = check_consistency(spec)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "consistent": report.consistent,
                    "violations": [
                        {"kind": v.kind, "labels": list(v.labels), "witness": v.witness}
                        for v in report.violations
                    ],
                },
                ensure_ascii=False,
            )
        )
    elif report.consistent:
        click.echo("consistent")
    else:
        for v in report.violations:
            click.echo(str(v))
    sys.exit(0 if report.consistent else 1)


@main.command("annotate")
@click.argument("ontology", type=click.Path())
@click.argument("corpus", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def annotate_cmd(ontology, corpus, as_json):
    """Annotate every corpus record with its ontology class."""
    try:
        spec = _load_spec(ontology)
        annotator = _make_annotator(spec)
        records = load_records(corpus)
        out = [(r.id, annotator(r.text)) for r in records]
    except OntoConvoError as e:
        _fail(str(e))
    if as_json:
        click.echo(json.dumps({rid: cls for rid, cls in out}, ensure_ascii=False))
    else:
        for rid, cls in out:
            click.echo(f"{rid}\t{cls}")


@main.command("build-corpus")
@click.argument("ontology", type=click.Path())
@click.argument("corpus", type=click.Path(exists=True))
@click.option("-o", "--output-dir", type=click.Path(), required=True)
@click.option("--balance", "do_balance", is_flag=True)
@click.option("--split", default="0.8,0.2", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def build_corpus_cmd(ontology, corpus, output_dir, do_balance, split, seed, as_json):
    """Annotate, wrap, and split a corpus into fine-tuning files."""
    try:
        spec = _load_spec(ontology)
        ratios = tuple(float(x) for x in split.split(","))
        if len(ratios) != 2:
            raise ValueError("--split needs two comma-separated ratios")
        manifest = build_corpus(
            corpus,
            output_dir,
            annotator=_make_annotator(spec),
            concept=spec.concept,
            split=ratios,
            seed=seed,
            do_balance=do_balance,
        )
    except (OntoConvoError, ValueError) as e:
        _fail(str(e))
    if as_json:
        click.echo(json.dumps(manifest, ensure_ascii=False))
    else:
        click.echo(
            f"wrote {manifest['train']} train / {manifest['val']} val samples "
            f"to {output_dir}"
        )


@main.command("converse")
@click.argument("ontology", type=click.Path())
@click.argument("strategy", type=click.Path())
@click.option("--endpoint", default="", help="LLM URL, mock:<fixture.json>, or env")
@click.option("--template", default="zero-shot", show_default=True)
@click.option("--store-dir", type=click.Path(), default=None)
@click.option("--max-retries-on-noncompliance", default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def converse_cmd(
    ontology, strategy, endpoint, template, store_dir, max_retries_on_noncompliance, as_json
):
    """Interactive stdin loop printing detected/target classes per turn."""
    try:
        spec = _load_spec(ontology)
        if strategy.startswith("bundled:"):
            from .strategy import parse_strategy

            strat = parse_strategy(bundled(strategy[len("bundled:") :]), spec)
        else:
            strat = load_strategy(strategy, spec)
    except OntoConvoError as e:
        _fail(str(e))
    annotator = _make_annotator(spec)
    gateway = _make_gateway(endpoint)
    session = Session(strategy=strat, store_dir=store_dir)
    for line in sys.stdin:
        text = line.strip()
        if not text:
            continue
        try:
            agent = run_turn(
                session,
                text,
                annotator,
                gateway,
                template_id=template,
                max_retries_on_noncompliance=max_retries_on_noncompliance,
            )
        except OntoConvoError as e:
            click.echo(f"error: {e}", err=True)
            continue
        user = session.turns[-2]
        if as_json:
            click.echo(json.dumps(user.as_dict(), ensure_ascii=False))
            click.echo(json.dumps(agent.as_dict(), ensure_ascii=False))
        else:
            click.echo(f"[user detected {user.detected}]")
            click.echo(
                f"[agent target {agent.target}, detected {agent.detected}, "
                f"compliant {agent.compliant}]"
            )
            click.echo(agent.text)


@main.command("eval")
@click.argument("ontology", type=click.Path())
@click.argument("questions", type=click.Path(exists=True))
@click.option("--endpoint", default="", help="LLM URL, mock:<fixture.json>, or env")
@click.option("--template", default="zero-shot", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def eval_cmd(ontology, questions, endpoint, template, as_json):
    """Zero-shot generation evaluation over a question file (one per line)."""
    try:
        spec = _load_spec(ontology)
        question_list = [
            line.strip()
            for line in Path(questions).read_text("utf-8").splitlines()
            if line.strip()
        ]
        report = zero_shot_eval(
            question_list,
            spec,
            _make_annotator(spec),
            _make_gateway(endpoint),
            template_id=template,
            endpoint_id=endpoint or "env",
            question_set_id=str(questions),
        )
    except OntoConvoError as e:
        _fail(str(e))
    if as_json:
        click.echo(json.dumps(report.as_dict(), ensure_ascii=False))
    else:
        click.echo(f"accuracy    {report.accuracy:.4f}")
        click.echo(f"f1 weighted {report.f1_weighted:.4f}")
        click.echo(f"f1 macro    {report.f1_macro:.4f}")
        click.echo(f"f1 range    {report.f1_min:.4f}-{report.f1_max:.4f}")
        if report.mae is not None:
            click.echo(f"mae         {report.mae:.4f}")
        click.echo(f"mcc         {report.mcc:.4f}")
        click.echo(f"failures    {report.failures}")


@main.command("serve")
@click.option("--listen", default=None, help="host:port (default ONTO_LISTEN or 127.0.0.1:8000)")
@click.option("--store-dir", type=click.Path(), default="sessions")
@click.option("--endpoint", default="", help="LLM URL, mock:<fixture.json>, or env")
@click.option("--cors", multiple=True, help="allowed origin for the web client")
def serve_cmd(listen, store_dir, endpoint, cors):
    """Run the HTTP service backing the chat UI."""
    import os

    import uvicorn

    from .service import create_app

    listen = listen or os.environ.get("ONTO_LISTEN", "127.0.0.1:8000")
    host, _, port = listen.partition(":")
    app = create_app(
        store_dir=store_dir,
        gateway=_make_gateway(endpoint),
        cors_origins=list(cors) or None,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


if __name__ == "__main__":
    main()
