"""Operator toolchain: ingest, index, validate, stats, sweep, serve.

Every command is a thin delegate to the library modules. Exit codes:
0 success, 1 validation failure, 2 I/O or configuration error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .collation import TailoringRuleSet, parse_tailoring
from .config import load_config
from .errors import RasterDictError
from .prefix import (
    build_prefix_tree,
    leaf_buckets,
    load_wordlist,
    prefix_stats,
    split_oversized,
)
from .sparse import parse_sparse_tsv, validate_sorted
from .store import DictionaryManifest, DictionaryStore, Language

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2

STATS_HEADER = ("Size", "Count", "Min", "1st Q", "Med", "Mean", "3rd Q", "Max")


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text("utf-8")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {path}: {exc}")


def _open_store(ctx) -> DictionaryStore:
    data_dir = Path(ctx.obj["data_dir"])
    if not data_dir.exists():
        _fail(EXIT_IO, f"data directory {data_dir} does not exist")
    return DictionaryStore(data_dir)


def _load_rules(path: str | None) -> TailoringRuleSet:
    if not path:
        return TailoringRuleSet.empty()
    return parse_tailoring(_read_text(path))


@click.group()
@click.option("--data-dir", default="data", show_default=True, help="Store root directory.")
@click.option("--config", "config_path", default=None, help="Service configuration file.")
@click.pass_context
def main(ctx, data_dir, config_path):
    """Make scanned raster dictionaries searchable."""
    ctx.ensure_object(dict)
    ctx.obj["data_dir"] = data_dir
    source = ctx.get_parameter_source("data_dir")
    ctx.obj["data_dir_explicit"] = source is not None and source.name == "COMMANDLINE"
    ctx.obj["config_path"] = config_path


@main.command()
@click.argument("manifest_path")
@click.pass_context
def ingest(ctx, manifest_path):
    """Register a language or dictionary from a manifest document."""
    text = _read_text(manifest_path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(EXIT_IO, f"bad manifest JSON: {exc}")
    data_dir = Path(ctx.obj["data_dir"])
    data_dir.mkdir(parents=True, exist_ok=True)
    store = DictionaryStore(data_dir)
    try:
        if "code" in doc and "id" not in doc:
            language = store.register_language(Language.from_doc(doc))
            click.echo(f"language\t{language.code}")
        else:
            manifest = store.register_dictionary(DictionaryManifest.from_doc(doc))
            click.echo(f"dictionary\t{manifest.id}\t{manifest.index_state}")
    except (RasterDictError, ValueError) as exc:
        _fail(EXIT_VALIDATION, str(exc))


@main.command()
@click.argument("dictionary")
@click.argument("file", type=click.Path())
@click.option("--kind", type=click.Choice(["sparse", "full"]), required=True)
@click.option("--strict", is_flag=True, help="Exit non-zero on any violation.")
@click.pass_context
def index(ctx, dictionary, file, kind, strict):
    """Load a sparse or full index file into a dictionary."""
    store = _open_store(ctx)
    text = _read_text(file)
    try:
        report = store.ingest_index(dictionary, text, kind)
    except RasterDictError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    click.echo(f"entries\t{report.entries}")
    for position in report.violations:
        click.echo(f"violation\t{position}")
    if report.violations:
        click.echo("index not installed; fix the ordering and re-run", err=True)
        if strict:
            sys.exit(EXIT_VALIDATION)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("dictionary")
@click.pass_context
def validate(ctx, dictionary):
    """Check a dictionary's stored sparse index for order violations."""
    store = _open_store(ctx)
    try:
        store.manifest(dictionary)
    except RasterDictError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    path = Path(ctx.obj["data_dir"]) / dictionary / "sparse.tsv"
    if not path.is_file():
        _fail(EXIT_IO, f"no sparse index stored for {dictionary}")
    entries = parse_sparse_tsv(path.read_text("utf-8"))
    rules = store.rules_for_dictionary(dictionary)
    positions = validate_sorted(sorted(entries, key=lambda e: e.page), rules)
    for position in positions:
        click.echo(f"violation\t{position}")
    click.echo(f"checked\t{len(entries)}")
    sys.exit(EXIT_VALIDATION if positions else EXIT_OK)


def _stats_row(stats) -> str:
    return "\t".join(
        str(v) for v in (
            stats.prefix_size, stats.count, stats.min, stats.q1,
            stats.median, stats.mean, stats.q3, stats.max,
        )
    )


@main.command("prefix-stats")
@click.argument("wordlist", type=click.Path())
@click.option("--size", "sizes", type=int, multiple=True, default=(1, 2, 3, 4, 5, 6),
              show_default=True, help="Prefix size(s) to analyze.")
@click.option("--tailoring", default=None, help="Tailoring rule file for collation units.")
def prefix_stats_cmd(wordlist, sizes, tailoring):
    """Bucket-size distribution of a wordlist at the given prefix sizes."""
    words = load_wordlist(_read_text(wordlist))
    if not words:
        _fail(EXIT_VALIDATION, "wordlist is empty")
    rules = _load_rules(tailoring)
    click.echo("\t".join(STATS_HEADER))
    for size in sizes:
        click.echo(_stats_row(prefix_stats(words, size, rules)))


@main.command()
@click.argument("wordlist", type=click.Path())
@click.option("--tolerance", type=int, required=True, help="Maximum words per bucket.")
@click.option("--depth", type=int, default=3, show_default=True)
@click.option("--tailoring", default=None, help="Tailoring rule file for collation units.")
def split(wordlist, tolerance, depth, tailoring):
    """Split oversized prefix buckets and list the resulting leaves."""
    words = load_wordlist(_read_text(wordlist))
    if not words:
        _fail(EXIT_VALIDATION, "wordlist is empty")
    rules = _load_rules(tailoring)
    tree = split_oversized(build_prefix_tree(words, rules, depth=depth), tolerance, rules)
    for leaf in leaf_buckets(tree):
        click.echo(f"{leaf.prefix}\t{leaf.word_count}")


@main.command()
@click.option("--dictionary", default=None, help="Sweep one dictionary only.")
@click.pass_context
def sweep(ctx, dictionary):
    """Promote crowd-confirmed words into full indexes."""
    store = _open_store(ctx)
    try:
        applied = store.sweep_promotions(dictionary)
    except RasterDictError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    for dict_id, promotions in applied.items():
        for word, page in promotions:
            click.echo(f"promoted\t{dict_id}\t{word}\t{page}")
    total = sum(len(p) for p in applied.values())
    click.echo(f"promotions\t{total}")


@main.command()
@click.option("--port", type=int, default=None, help="Override the configured port.")
@click.option("--static-dir", default=None,
              help="Serve a built browser UI from this directory at /.")
@click.pass_context
def serve(ctx, port, static_dir):
    """Run the lookup service over HTTP."""
    config = load_config(ctx.obj["config_path"])
    if ctx.obj["data_dir_explicit"]:
        config.data_dir = ctx.obj["data_dir"]
    if port is not None:
        config.port = port
    if not Path(config.data_dir).exists():
        _fail(EXIT_IO, f"data directory {config.data_dir} does not exist")
    if static_dir and not Path(static_dir).is_dir():
        _fail(EXIT_IO, f"static directory {static_dir} does not exist")
    import uvicorn

    from .api import create_app
    from .service import SearchService

    store = DictionaryStore(config.data_dir)
    service = SearchService(store, deadline_ms=config.search_deadline_ms)
    uvicorn.run(
        create_app(store, service, static_dir=static_dir),
        host="0.0.0.0", port=config.port,
    )


@main.command()
@click.argument("dictionary")
@click.argument("state")
@click.pass_context
def advance(ctx, dictionary, state):
    """Advance a dictionary along the indexing pipeline."""
    store = _open_store(ctx)
    try:
        manifest = store.advance_state(dictionary, state)
    except RasterDictError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    click.echo(f"dictionary\t{manifest.id}\t{manifest.index_state}")


if __name__ == "__main__":
    main()
