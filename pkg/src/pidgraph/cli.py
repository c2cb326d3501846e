"""Command-line interface.

    pidgraph parse FILE          parse a P&ID XML document and summarize it
    pidgraph graph FILE          build the property graph and serialize it
    pidgraph condense FILE       run the condensation pipeline
    pidgraph export FILE         convert between GraphML and JSON graphs
    pidgraph tokens FILE         estimate the token cost of a file
    pidgraph chat FILE           interactive graph-grounded chat REPL
    pidgraph eval FILE           run the benchmark questions and score them
    pidgraph serve               run the HTTP service
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Dict, Optional

import click

from . import chain, evaluation, providers
from .condense import CondensationPolicy, condense
from .graph import PropertyGraph, build_graph
from .graphio import (
    GraphMLImportError,
    estimate_tokens,
    export_graphml,
    export_json,
    load_graph,
)
from .model import Severity, model_to_dict
from .parser import DexpiParseError, parse_dexpi

logger = logging.getLogger(__name__)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_policy(path: Optional[str]) -> Optional[CondensationPolicy]:
    if not path:
        return None
    return CondensationPolicy.from_json(_read(path))


def _graph_from_file(path: str) -> PropertyGraph:
    """Load a graph file, or parse-and-build when given a P&ID document."""
    text = _read(path)
    try:
        return load_graph(text)
    except (GraphMLImportError, ValueError, KeyError):
        pass
    try:
        return build_graph(parse_dexpi(text))
    except DexpiParseError as exc:
        raise click.ClickException(f"{path}: not a graph file and not parseable P&ID XML ({exc})")


def _graph_levels(path: str, policy: Optional[CondensationPolicy]) -> Dict[str, PropertyGraph]:
    complete = _graph_from_file(path)
    condensed, _ = condense(complete, policy)
    return {"complete": complete, "high": condensed}


def _write_or_echo(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=not text.endswith("\n"))


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool) -> None:
    """Turn P&ID XML into knowledge graphs and chat with them."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--strict", is_flag=True, help="Fail on recoverable document errors.")
@click.option("--json", "as_json", is_flag=True, help="Emit the full model as JSON.")
def parse(source: str, strict: bool, as_json: bool) -> None:
    """Parse SOURCE and report what it contains."""
    try:
        model = parse_dexpi(_read(source), strict=strict)
    except DexpiParseError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(json.dumps(model_to_dict(model), indent=2, sort_keys=True))
        return
    click.echo(f"items: {len(model.items)}")
    for package, count in sorted(model.package_counts().items()):
        click.echo(f"  {package}: {count}")
    click.echo(f"piping connections: {len(model.piping_connections)}")
    click.echo(f"signal connections: {len(model.signal_connections)}")
    errors = 0
    for diag in model.parse_diagnostics:
        click.echo(str(diag), err=True)
        if diag.severity == Severity.ERROR:
            errors += 1
    if errors:
        raise click.ClickException(f"{errors} document error(s)")


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["graphml", "json"]), default="graphml")
@click.option("--out", type=click.Path(dir_okay=False), help="Write to a file instead of stdout.")
def graph(source: str, fmt: str, out: Optional[str]) -> None:
    """Build the complete property graph for SOURCE."""
    g = _graph_from_file(source)
    text = export_graphml(g) if fmt == "graphml" else export_json(g, indent=2)
    _write_or_echo(text, out)


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", type=click.Path(exists=True, dir_okay=False), help="Policy JSON file.")
@click.option("--format", "fmt", type=click.Choice(["graphml", "json"]), default="graphml")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the condensed graph here.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Write the reduction report here.")
def condense_cmd(source: str, policy: Optional[str], fmt: str, out: Optional[str], report_path: Optional[str]) -> None:
    """Condense SOURCE (a graph file or P&ID document)."""
    g = _graph_from_file(source)
    condensed, report = condense(g, _load_policy(policy))
    text = export_graphml(condensed) if fmt == "graphml" else export_json(condensed, indent=2)
    _write_or_echo(text, out)
    summary = report.to_dict()
    if report_path:
        Path(report_path).write_text(json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8")
        click.echo(f"wrote {report_path}")
    click.echo(
        f"nodes {report.nodes_before} -> {report.nodes_after}, "
        f"edges {report.edges_before} -> {report.edges_after}, "
        f"tokens ~{report.tokens_before} -> ~{report.tokens_after}",
        err=True,
    )


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["graphml", "json"]), required=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write to a file instead of stdout.")
def export(source: str, fmt: str, out: Optional[str]) -> None:
    """Convert a graph file between GraphML and JSON."""
    g = _graph_from_file(source)
    text = export_graphml(g) if fmt == "graphml" else export_json(g, indent=2)
    _write_or_echo(text, out)


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--tokenizer", help="Registered tokenizer name (default: character heuristic).")
def tokens(source: str, tokenizer: Optional[str]) -> None:
    """Estimate the token cost of SOURCE."""
    estimate = estimate_tokens(_read(source), tokenizer=tokenizer)
    click.echo(f"characters: {estimate.char_count}")
    click.echo(f"tokens:     {estimate.token_count} ({estimate.method})")


def _provider_spec(
    provider: str, model: str, endpoint: str, credential_env: Optional[str]
) -> providers.ProviderSpec:
    if credential_env is None and provider not in ("local", "scripted"):
        credential_env = providers.default_credential_env(provider)
    return providers.ProviderSpec(
        provider_name=provider,
        model_id=model,
        endpoint=endpoint,
        credential_env=credential_env or "",
    )


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--level", type=click.Choice(["complete", "high"]), default="high")
@click.option("--provider", required=True, help="openai | anthropic | local | scripted")
@click.option("--model", default="", help="Model identifier for the provider.")
@click.option("--endpoint", default="", help="Provider base URL, or script path for scripted.")
@click.option("--credential-env", default=None, help="Environment variable holding the API key.")
@click.option("--budget", type=int, default=chain.DEFAULT_TOKEN_BUDGET, help="Prompt token budget.")
@click.option("--policy", type=click.Path(exists=True, dir_okay=False), help="Condensation policy JSON.")
def chat(
    source: str,
    level: str,
    provider: str,
    model: str,
    endpoint: str,
    credential_env: Optional[str],
    budget: int,
    policy: Optional[str],
) -> None:
    """Chat with the graph built from SOURCE. Ctrl-D or 'exit' quits."""
    graphs = _graph_levels(source, _load_policy(policy))
    spec = _provider_spec(provider, model, endpoint, credential_env)
    client = providers.create_provider(spec)
    try:
        session = chain.new_session(graphs[level], token_budget=budget)
    except chain.BudgetError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"chatting on the {level} graph ({graphs[level].node_count()} nodes); 'exit' to quit")
    while True:
        try:
            question = click.prompt("you", prompt_suffix="> ")
        except (click.Abort, EOFError):
            click.echo()
            return
        if question.strip().lower() in ("exit", "quit"):
            return
        try:
            for chunk in chain.ask(session, question, client):
                click.echo(chunk, nl=False)
            click.echo()
        except providers.ProviderError as exc:
            click.echo(f"\n[provider error: {exc}]", err=True)
        except chain.BudgetError as exc:
            click.echo(f"\n[budget error: {exc}]", err=True)


@main.command(name="eval")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--cases", type=click.Path(exists=True, dir_okay=False), required=True, help="Benchmark cases JSON.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the CSV report here.")
@click.option("--inlet", required=True, help="Tag or id of the flow inlet for ground truth.")
@click.option("--provider", default=None, help="Default provider when cases omit one.")
@click.option("--model", default="", help="Default model identifier.")
@click.option("--endpoint", default="", help="Default provider endpoint / script path.")
@click.option("--credential-env", default=None, help="Environment variable holding the API key.")
@click.option("--policy", type=click.Path(exists=True, dir_okay=False), help="Condensation policy JSON.")
def eval_cmd(
    source: str,
    cases: str,
    out: Optional[str],
    inlet: str,
    provider: Optional[str],
    model: str,
    endpoint: str,
    credential_env: Optional[str],
    policy: Optional[str],
) -> None:
    """Run benchmark CASES against the graphs built from SOURCE."""
    graphs = _graph_levels(source, _load_policy(policy))
    high = graphs["high"]
    inlet_id = inlet
    if inlet_id not in high.nodes:
        by_tag = {
            str(node.properties.get("tagName", "")): nid for nid, node in high.nodes.items()
        }
        inlet_id = by_tag.get(inlet, "")
    if inlet_id not in high.nodes:
        raise click.ClickException(f"inlet {inlet!r} not found in the condensed graph")
    try:
        truth = evaluation.ground_truth_from_graph(high, inlet_id)
    except evaluation.TraceError as exc:
        raise click.ClickException(str(exc))
    case_list = evaluation.load_cases(cases)
    default_spec = (
        _provider_spec(provider, model, endpoint, credential_env) if provider else None
    )
    results = evaluation.run_benchmark(case_list, graphs, truth, default_provider=default_spec)
    click.echo(evaluation.results_table(results))
    if out:
        Path(out).write_text(evaluation.results_to_csv(results), encoding="utf-8")
        click.echo(f"wrote {out}")
    if any(r.status != "ok" for r in results):
        sys.exit(1)


@main.command()
@click.option("--addr", default="127.0.0.1:8000", help="host:port to bind.")
@click.option("--store", "store_dir", default="./pidgraph-store", help="Model store directory.")
@click.option("--token", default=None, help="Require this bearer token on API calls.")
@click.option("--static", "static_dir", default=None, type=click.Path(file_okay=False), help="Static UI directory.")
def serve(addr: str, store_dir: str, token: Optional[str], static_dir: Optional[str]) -> None:
    """Run the HTTP service."""
    from .service import serve as run_service

    run_service(addr, store_dir, auth_token=token, static_dir=static_dir)


main.add_command(condense_cmd, name="condense")

if __name__ == "__main__":
    main()
