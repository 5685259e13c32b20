"""Command-line interface for the matching pipeline.

Exit codes: 0 success, 2 validation/parse error, 3 provider transport error.
Flags mirror MatchConfig fields; a config file (JSON or TOML) overrides the
defaults and explicit flags override the file.
"""

from __future__ import annotations

import json
import sys
import uuid
from pathlib import Path

import click

from . import run as runmod
from .errors import ContractViolation, MatchError, ParseError, TransportError, ValidationError
from .evaluation import BenchmarkProblem, benchmark_run, config_digest
from .representation import RepresentationStore
from .run import RunInputs


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if p.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python 3.10
            import tomli as tomllib

        with open(p, "rb") as fh:
            return tomllib.load(fh)
    return json.loads(p.read_text(encoding="utf-8"))


def _parse_provider(spec: str) -> dict:
    kind, _, rest = spec.partition(":")
    if kind == "hash":
        return {"kind": "hash", "dimension": int(rest) if rest else 256}
    if kind == "fixture":
        if not rest:
            raise ValidationError("fixture provider needs a path: --provider fixture:PATH")
        return {"kind": "fixture", "path": rest}
    if kind == "remote":
        return {"kind": "remote", **({"url": rest} if rest else {})}
    raise ValidationError(f"unknown provider {spec!r}; use hash[:DIM], fixture:PATH or remote[:URL]")


def _merge_config(config_file: str | None, flags: dict) -> dict:
    doc = _load_config_file(config_file)
    sampling = doc.setdefault("sampling", {})
    for key, value in flags.items():
        if value is None or (key == "matcher" and not value):
            continue
        if key in ("strategy", "sample_n", "seed"):
            sampling[{"strategy": "strategy", "sample_n": "n", "seed": "seed"}[key]] = value
        elif key == "n":
            doc["n"] = None if value == "unlimited" else int(value)
        elif key == "matcher":
            doc["attr_matchers"] = list(value)
        else:
            doc[key] = value
    if not sampling:
        doc.pop("sampling")
    return doc


def _instance_map(pairs: tuple[str, ...]) -> dict[str, str]:
    mapping = {}
    for pair in pairs:
        table, _, path = pair.partition("=")
        if not path:
            raise ValidationError(f"instance mapping must look like TABLE=CSV, got {pair!r}")
        mapping[table] = path
    return mapping


_config_options = [
    click.option("--config", "config_file", type=click.Path(exists=True), default=None,
                 help="JSON or TOML config file; flags override it."),
    click.option("--t", type=float, default=None, help="Schema-similarity threshold."),
    click.option("--n", type=str, default=None, help="Top-n cutoff, or 'unlimited'."),
    click.option("--t-a", "t_a", type=float, default=None, help="Attribute-similarity threshold."),
    click.option("--col-ratio", "col_ratio", type=float, default=None,
                 help="Required fraction of matching attributes."),
    click.option("--attr-threshold", "attr_threshold", type=float, default=None,
                 help="Attribute-selection threshold."),
    click.option("--sampling", "strategy", default=None,
                 type=click.Choice(["none", "distinct", "n_random", "n_most_common", "adaptive_most_common"]),
                 help="Instance sampling strategy."),
    click.option("--sample-n", "sample_n", type=int, default=None, help="Sample size n."),
    click.option("--seed", type=int, default=None, help="Seed for randomized sampling."),
    click.option("--selection", "selection_mode", default=None,
                 type=click.Choice(["threshold", "top_k", "one_to_one"]),
                 help="Correspondence selection mode."),
    click.option("--strategy", "table_strategy", default=None,
                 type=click.Choice(["schema", "instance", "combined"]),
                 help="Table-matching strategy."),
    click.option("--matcher", multiple=True,
                 type=click.Choice(["name_based", "comment_based", "instance_based"]),
                 help="Attribute matcher(s); repeatable."),
    click.option("--provider", default="hash", show_default=True,
                 help="hash[:DIM], fixture:PATH or remote[:URL]."),
]


def _with_config_options(fn):
    for option in reversed(_config_options):
        fn = option(fn)
    return fn


def _build_config(config_file, **flags):
    provider = flags.pop("provider", "hash")
    doc = _merge_config(config_file, flags)
    return runmod.config_from_dict(doc), _parse_provider(provider)


@click.group()
def main():
    """Schema matching via embedding similarity: table pass, review, attribute pass."""


@main.command("match-tables")
@click.argument("source", type=click.Path(exists=True))
@click.argument("target", type=click.Path(exists=True))
@click.option("--source-instances", multiple=True, help="TABLE=CSV, repeatable.")
@click.option("--target-instances", multiple=True, help="TABLE=CSV, repeatable.")
@click.option("--runs-root", default="runs", show_default=True)
@click.option("--run-id", default=None, help="Defaults to a fresh random id.")
@_with_config_options
def match_tables(source, target, source_instances, target_instances, runs_root, run_id,
                 config_file, **flags):
    """Run step 1 (table matching) and persist the run for review."""
    config, provider_spec = _build_config(config_file, **flags)
    run = runmod.new_run(
        run_id or uuid.uuid4().hex[:12],
        config,
        RunInputs(
            source_schema=source,
            target_schema=target,
            source_instances=_instance_map(source_instances),
            target_instances=_instance_map(target_instances),
            provider=provider_spec,
        ),
    )
    runmod.run_table_phase(run, runmod.build_provider(provider_spec))
    directory = runmod.persist_run(run, runs_root)
    click.echo(f"run {run.run_id}: {len(run.candidates)} table candidates -> {directory}")
    for candidate, cid in zip(run.candidates, run.candidate_ids):
        click.echo(
            f"  {cid}  {candidate.source_table} -> {candidate.target_table}"
            f"  score={candidate.score:.4f}  [{candidate.provenance}]"
        )


@main.command()
@click.argument("run_id")
@click.option("--runs-root", default="runs", show_default=True)
def review(run_id, runs_root):
    """Interactively confirm or reject proposed table candidates."""
    run = runmod.load_run(runs_root, run_id)
    pending = [
        (cid, c) for cid, c in zip(run.candidate_ids, run.candidates) if c.status == "proposed"
    ]
    if not pending:
        click.echo("nothing to review")
        return
    for cid, candidate in pending:
        click.echo(
            f"{cid}: {candidate.source_table} -> {candidate.target_table} "
            f"score={candidate.score:.4f} [{candidate.provenance}]"
        )
        for src_attr, tgt_attr, score in candidate.evidence:
            click.echo(f"    {src_attr} ~ {tgt_attr} ({score:.4f})")
        choice = click.prompt(
            "confirm/reject/skip", type=click.Choice(["c", "r", "s"]), default="s"
        )
        if choice == "c":
            runmod.apply_decision(run, cid, "confirm")
        elif choice == "r":
            runmod.apply_decision(run, cid, "reject")
    runmod.persist_run(run, runs_root)
    click.echo(f"run {run.run_id}: {len(run.decisions_log)} decisions recorded")


@main.command("match-attributes")
@click.argument("run_id")
@click.option("--runs-root", default="runs", show_default=True)
def match_attributes(run_id, runs_root):
    """Run step 2 (attribute matching) on a persisted run."""
    run = runmod.load_run(runs_root, run_id)
    provider = runmod.build_provider(run.inputs.provider)
    runmod.run_attribute_phase(run, provider)
    directory = runmod.persist_run(run, runs_root)
    click.echo(
        f"run {run.run_id}: {len(run.correspondences)} correspondences -> "
        f"{directory / 'correspondences.jsonl'}"
    )


@main.command()
@click.argument("source", type=click.Path(exists=True))
@click.argument("target", type=click.Path(exists=True))
@click.option("--source-instances", multiple=True, help="TABLE=CSV, repeatable.")
@click.option("--target-instances", multiple=True, help="TABLE=CSV, repeatable.")
@click.option("--gold", type=click.Path(exists=True), default=None,
              help="Gold alignment file for scoring.")
@click.option("--runs-root", default="runs", show_default=True)
@click.option("--run-id", default=None)
@_with_config_options
def e2e(source, target, source_instances, target_instances, gold, runs_root, run_id,
        config_file, **flags):
    """Full pipeline without review: tables, attributes, report."""
    config, provider_spec = _build_config(config_file, **flags)
    run = runmod.new_run(
        run_id or uuid.uuid4().hex[:12],
        config,
        RunInputs(
            source_schema=source,
            target_schema=target,
            source_instances=_instance_map(source_instances),
            target_instances=_instance_map(target_instances),
            alignment=gold,
            provider=provider_spec,
        ),
    )
    provider = runmod.build_provider(provider_spec)
    runmod.run_table_phase(run, provider)
    runmod.run_attribute_phase(run, provider)
    runmod.report(run)
    directory = runmod.persist_run(run, runs_root)
    click.echo(f"run {run.run_id}: {len(run.correspondences)} correspondences -> {directory}")
    for level, rep in (("tables", run.table_report), ("attributes", run.attribute_report)):
        if rep is not None:
            click.echo(
                f"  {level}: P={rep.precision:.3f} R={rep.recall:.3f} F1={rep.f1:.3f} "
                f"avg/target={rep.avg_candidates_per_target:.2f}"
            )


@main.command("eval")
@click.argument("manifest", type=click.Path(exists=True))
@click.option("--results", type=click.Path(), default="results.json", show_default=True)
@click.option("--no-durations", is_flag=True, help="Zero wall-clock fields for byte-stable output.")
@_with_config_options
def eval_cmd(manifest, results, no_durations, config_file, **flags):
    """Score a suite of matching problems listed in a JSON manifest.

    The manifest is {"problems": [{"id", "source_schema", "target_schema",
    "alignment", "source_instances"?, "target_instances"?}, ...]}; relative
    paths resolve against the manifest's directory.
    """
    config, provider_spec = _build_config(config_file, **flags)
    doc = json.loads(Path(manifest).read_text(encoding="utf-8"))
    base = Path(manifest).parent

    def resolve(p):
        return str(base / p)

    problems = [
        BenchmarkProblem(
            problem_id=entry["id"],
            source_schema=resolve(entry["source_schema"]),
            target_schema=resolve(entry["target_schema"]),
            alignment=resolve(entry["alignment"]),
            source_instances={t: resolve(p) for t, p in entry.get("source_instances", {}).items()},
            target_instances={t: resolve(p) for t, p in entry.get("target_instances", {}).items()},
        )
        for entry in doc.get("problems", [])
    ]
    outcome = benchmark_run(
        problems,
        config,
        provider_factory=lambda: runmod.build_provider(provider_spec),
        results_path=results,
        record_durations=not no_durations,
    )
    click.echo(f"config {outcome['config_digest']}: {len(problems)} problems -> {results}")
    for level in ("table_level", "attribute_level"):
        macro = outcome["macro"][level]
        click.echo(
            f"  {level}: P={macro['precision']:.3f} R={macro['recall']:.3f} F1={macro['f1']:.3f}"
        )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--runs-root", default="runs", show_default=True)
def serve(host, port, runs_root):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(runs_root), host=host, port=port)


@main.command("embed-cache")
@click.argument("schema_file", type=click.Path(exists=True))
@click.option("--instances", multiple=True, help="TABLE=CSV, repeatable.")
@click.option("--out", type=click.Path(), default="representations.jsonl", show_default=True)
@_with_config_options
def embed_cache(schema_file, instances, out, config_file, **flags):
    """Precompute column representations for a schema and write the cache file."""
    from .model import load_instances, load_schema

    config, provider_spec = _build_config(config_file, **flags)
    provider = runmod.build_provider(provider_spec)
    schema = load_schema(schema_file)
    if instances:
        schema = load_instances(schema, _instance_map(instances))
    store = RepresentationStore()
    for table in schema.tables:
        for attribute in table.attributes:
            store.get_or_build(provider, schema.name, table, attribute, config.sampling)
    store.dump(out)
    click.echo(f"{len(store)} column representations -> {out} (config {config_digest(config)})")


def run_main() -> int:
    try:
        main.main(standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.Abort:
        return 1
    except TransportError as exc:
        click.echo(f"transport error: {exc}", err=True)
        return 3
    except (ValidationError, ParseError, ContractViolation) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except MatchError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(run_main())
