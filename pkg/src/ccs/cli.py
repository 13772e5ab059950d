"""Command-line interface.

Exit codes: 0 success, 1 user error (bad input, unknown names), 2
environment error (network, missing files, unreachable scorer).
"""

from __future__ import annotations

import functools
import json
import sys

import click

from . import errors
from .datasets import load_ebm_nlp, load_evidence_inference
from .evalrun import EvalConfig, run_eval
from .pio import BaselinePioTagger, PioLabel, train_tagger, TAGGER_DEFAULTS
from .pipeline import Pipeline, RunOptions
from .query import Term, build_query
from .relevance import BaselineRelevanceScorer, TrainConfig, train_baseline
from .settings import Settings
from .termlists import load_term_list


def _pipeline() -> Pipeline:
    return Pipeline(Settings.resolve())

def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except errors.UserInputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except (ValueError, click.UsageError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except errors.EnvironmentFailure as exc:
            click.echo(f"environment error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
def main():
    """Explore clinical cohort studies end to end."""


@main.group()
def query():
    """Build and inspect saved queries."""


def _parse_terms(raw: tuple[str, ...]) -> list[Term]:
    terms = []
    for item in raw:
        if item.endswith(" [MeSH]"):
            terms.append(Term(item[: -len(" [MeSH]")], is_mesh=True))
        else:
            terms.append(Term(item))
    return terms


@query.command("build")
@click.option("--disease", required=True)
@click.option("--name", default=None, help="Key to save under (defaults to a disease slug).")
@click.option("--synonym", "synonyms", multiple=True)
@click.option("--intervention", "interventions", multiple=True, help='Term text; append " [MeSH]" to tag.')
@click.option("--outcome", "outcomes", multiple=True)
@click.option("--disease-mesh", default=None)
@click.option("--cancer-defaults", is_flag=True, help="Apply the stock cancer synonyms and MeSH heading.")
@click.option("--default-terms", is_flag=True, help="Fill empty groups from the bundled term lists.")
@click.option("--intervention-file", type=click.Path(), default=None)
@click.option("--outcome-file", type=click.Path(), default=None)
@click.option("--save", is_flag=True, help="Persist the query in the store.")
@click.option("--json", "as_json", is_flag=True)
@handle_errors
def query_build(disease, name, synonyms, interventions, outcomes, disease_mesh,
                cancer_defaults, default_terms, intervention_file, outcome_file,
                save, as_json):
    interventions = _parse_terms(interventions)
    outcomes = _parse_terms(outcomes)
    if intervention_file:
        interventions = load_term_list(intervention_file)
    if outcome_file:
        outcomes = load_term_list(outcome_file)
    spec = build_query(
        disease,
        interventions=interventions,
        outcomes=outcomes,
        synonyms=list(synonyms),
        name=name,
        disease_mesh=disease_mesh,
        cancer=cancer_defaults,
        use_default_terms=cancer_defaults or default_terms,
    )
    if save:
        _pipeline().store.save_query(spec)
    if as_json:
        click.echo(json.dumps(spec.to_dict(), indent=2))
    else:
        click.echo(spec.rendered)


@query.command("list")
@click.option("--json", "as_json", is_flag=True)
@handle_errors
def query_list(as_json):
    specs = _pipeline().store.list_queries()
    if as_json:
        click.echo(json.dumps([s.to_dict() for s in specs], indent=2))
    else:
        for s in specs:
            click.echo(f"{s.name}\t{s.created_at}\t{s.rendered}")


@main.command()
@click.option("--query", "query_name", required=True)
@click.option("--cap", default=100, show_default=True)
@click.option("--offline", is_flag=True, help="Serve from cache; never dial out.")
@click.option("--json", "as_json", is_flag=True)
@handle_errors
def search(query_name, cap, offline, as_json):
    """Resolve a saved query to PMIDs."""
    pipe = _pipeline()
    spec = pipe.store.get_query(query_name)
    result = pipe.client(offline).search(spec, cap=cap)
    if as_json:
        click.echo(json.dumps({"pmids": result.pmids, "total_count": result.total_count}))
    else:
        click.echo(f"{result.total_count} hits; showing {len(result.pmids)}")
        for pmid in result.pmids:
            click.echo(pmid)


@main.command()
@click.option("--query", "query_name", required=True)
@click.option("--k", default=4, show_default=True)
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--scorer", default="baseline", type=click.Choice(["baseline", "bridge"]))
@click.option("--cap", default=100, show_default=True)
@click.option("--offline", is_flag=True)
@click.option("--sort", default="score", type=click.Choice(["score", "pmid"]))
@click.option("--workers", default=4, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@handle_errors
def run(query_name, k, threshold, scorer, cap, offline, sort, workers, as_json):
    """Execute the full pipeline for a saved query."""
    record, bundle = _pipeline().run(
        query_name,
        RunOptions(k=k, threshold=threshold, scorer=scorer, cap=cap,
                   offline=offline, sort=sort, workers=workers),
    )
    if as_json:
        click.echo(json.dumps({"record": record.to_dict(), "bundle": bundle}, indent=2))
    else:
        click.echo(record.run_id)
        click.echo(
            f"{record.pmid_count} PMIDs; wall {record.wall_time_seconds:.2f}s; "
            + "; ".join(f"{k_} {v:.2f}s" for k_, v in record.stage_seconds.items())
        )


@main.command("eval")
@click.option("--task", required=True, type=click.Choice(["relevance", "pio"]))
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--scorer", default="baseline", type=click.Choice(["baseline", "bridge"]))
@click.option("--split", default=None, help="relevance: train|test; pio: crowd_train|crowd_val|expert_test.")
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--model", "model_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
@handle_errors
def eval_cmd(task, dataset_path, scorer, split, threshold, model_path, out_dir, as_json):
    """Evaluate a scorer on a public dataset and write a report."""
    pipe = _pipeline()
    if task == "relevance":
        corpus = load_evidence_inference(dataset_path)
        dataset = {"train": corpus.train, "test": corpus.test}[split or "test"]
        if scorer == "bridge":
            engine = pipe.relevance_scorer("bridge")
        elif model_path:
            engine = BaselineRelevanceScorer.load(model_path)
        else:
            engine = pipe.relevance_scorer("baseline")
    else:
        corpus = load_ebm_nlp(dataset_path)
        dataset = {
            "crowd_train": corpus.crowd_train,
            "crowd_val": corpus.crowd_val,
            "expert_test": corpus.expert_test,
        }[split or "expert_test"]
        if scorer == "bridge":
            engine = pipe.pio_tagger("bridge")
        elif model_path:
            engine = BaselinePioTagger.load(model_path)
        else:
            engine = pipe.pio_tagger("baseline")

    out = out_dir or pipe.store.reports_dir
    report, path = run_eval(task, engine, dataset, EvalConfig(threshold=threshold, out_dir=out))
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        for key, value in report.metrics.items():
            click.echo(f"{key}: {value}")
        if report.per_entity:
            for entity, vals in report.per_entity.items():
                click.echo(f"{entity}: " + ", ".join(f"{k}={v:.3f}" for k, v in vals.items()))
        click.echo(f"report: {path}")


@main.command("train-baseline")
@click.option("--task", required=True, type=click.Choice(["relevance", "pio"]))
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--split", default=None)
@click.option("--lr", default=None, type=float)
@click.option("--batch-size", default=None, type=int)
@click.option("--epochs", default=None, type=int)
@click.option("--seed", default=42, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@handle_errors
def train_baseline_cmd(task, dataset_path, split, lr, batch_size, epochs, seed, out_path):
    """Train the native baseline scorer/tagger on a dataset."""
    pipe = _pipeline()
    if task == "relevance":
        corpus = load_evidence_inference(dataset_path)
        dataset = {"train": corpus.train, "test": corpus.test}[split or "train"]
        cfg = TrainConfig(seed=seed)
        if lr:
            cfg.learning_rate = lr
        if batch_size:
            cfg.batch_size = batch_size
        if epochs:
            cfg.epochs = epochs
        pairs = [
            (s, int(l))
            for article in dataset.articles
            for s, l in zip(article.sentences, article.labels)
        ]
        result = train_baseline(pairs, cfg)
        target = out_path or pipe.store.model_path("relevance-baseline")
        BaselineRelevanceScorer(result.params).save(target)
    else:
        corpus = load_ebm_nlp(dataset_path, seed=seed)
        dataset = {
            "crowd_train": corpus.crowd_train,
            "crowd_val": corpus.crowd_val,
            "expert_test": corpus.expert_test,
        }[split or "crowd_train"]
        cfg = TrainConfig(
            learning_rate=lr or TAGGER_DEFAULTS.learning_rate,
            batch_size=batch_size or TAGGER_DEFAULTS.batch_size,
            epochs=epochs or TAGGER_DEFAULTS.epochs,
            seed=seed,
            optimizer="adamw",
            weight_decay=TAGGER_DEFAULTS.weight_decay,
        )
        token_sentences = [(a.tokens, a.labels) for a in dataset.abstracts]
        result = train_tagger(token_sentences, cfg)
        target = out_path or pipe.store.model_path("pio-baseline")
        BaselinePioTagger(result.params).save(target)
    click.echo(f"model: {target}")
    click.echo("loss trace: " + " ".join(f"{l:.4f}" for l in result.epoch_losses))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@handle_errors
def serve(host, port):
    """Serve the HTTP API (and the UI when built)."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(_pipeline()), host=host, port=port)


if __name__ == "__main__":
    main()
