"""Command-line entry point orchestrating the pipeline.

Exit codes: 0 success, 1 validation/content error, 2 I/O or environment
error.  Data goes to files or stdout; logs and progress go to stderr.
Partial outputs are never left in place (temp file + rename).
"""

from __future__ import annotations

import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import click

from . import __version__, conllu, corpora, detex, extract, graph as graphmod, linker, review, site, titles
from .errors import GlossforgeError

logger = logging.getLogger("glossforge")

CONFIG_ENV_VAR = "GLOSSFORGE_CONFIG"


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=path.name + ".", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except Exception:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _read_text(path: Path, what: str) -> str:
    if not path.exists():
        _fail(f"{what} not found: {path}", 2)
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(f"cannot read {what} {path}: {exc}", 2)
    raise AssertionError("unreachable")


def _load_config(config_path: str | None) -> tuple[dict, Path]:
    path = config_path or os.environ.get(CONFIG_ENV_VAR)
    if not path:
        _fail(f"no build config: pass --config or set {CONFIG_ENV_VAR}", 2)
    p = Path(path)
    text = _read_text(p, "build config")
    try:
        return json.loads(text), p.parent
    except json.JSONDecodeError as exc:
        _fail(f"build config {p} is not valid JSON: {exc}", 1)
    raise AssertionError("unreachable")


@click.group()
@click.version_option(version=__version__, prog_name="glossforge")
def main():
    """Build a linked glossary of mathematics concepts: index, link, merge,
    and emit a static site, with a curation service for the leftovers."""
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@main.group()
def index():
    """Title-to-QID index commands."""


@index.command("build")
@click.option("--titles", "titles_path", required=True, type=click.Path(), help="TSV of title, qid, flags.")
@click.option("--redirects", "redirects_path", required=True, type=click.Path(), help="TSV of from_title, to_title.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output .qidx index file.")
def index_build(titles_path, redirects_path, out_path):
    """Build the immutable title index from TSV interchange files."""
    titles_text = _read_text(Path(titles_path), "titles TSV")
    redirects_text = _read_text(Path(redirects_path), "redirects TSV")
    try:
        idx = titles.build_index(titles_text, redirects_text)
    except GlossforgeError as exc:
        _fail(str(exc), 1)
        return
    _atomic_write_text(Path(out_path), titles.dump_index(idx))
    for warning in idx.build_meta["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    click.echo(
        f"indexed {idx.build_meta['entry_count']} titles, {idx.build_meta['redirect_count']} redirects -> {out_path}",
        err=True,
    )


@main.command("detex")
@click.option("--in", "in_path", required=True, type=click.Path(), help="Input text file or directory (.txt/.md/.tex).")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory for .conllu skeletons.")
@click.option("--lenient", is_flag=True, help="Tolerate unbalanced math delimiters (warn instead of fail).")
def detex_cmd(in_path, out_dir, lenient):
    """Tokenize mathematical English into CoNLL-U skeletons."""
    src = Path(in_path)
    if not src.exists():
        _fail(f"input not found: {src}", 2)
    files = sorted(p for p in src.glob("*") if p.suffix in (".txt", ".md", ".tex")) if src.is_dir() else [src]
    if not files:
        _fail(f"no .txt/.md/.tex files under {src}", 2)
    mode = "lenient" if lenient else "strict"
    for path in files:
        text = _read_text(path, "input file")
        try:
            result = detex.tokenize(text, mode=mode)
        except GlossforgeError as exc:
            _fail(f"{path}: {exc}", 1)
            return
        for warning in result.warnings:
            click.echo(f"warning: {path}: {warning}", err=True)
        doc = detex.emit_skeleton(path.stem, result)
        out_file = Path(out_dir) / f"{path.stem}.conllu"
        _atomic_write_text(out_file, conllu.serialize_conllu(doc))
        click.echo(f"{path} -> {out_file} ({len(doc.sentences)} sentences)", err=True)


@main.command("extract")
@click.option("--in", "in_dir", required=True, type=click.Path(), help="Directory of annotated .conllu files.")
@click.option("--min-count", default=2, show_default=True, type=int, help="Minimum candidate frequency.")
@click.option("--max-terms", default=500, show_default=True, type=int, help="Maximum number of terms emitted.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output term list TSV.")
def extract_cmd(in_dir, min_count, max_terms, out_path):
    """Extract frequent candidate terms from annotated CoNLL-U files."""
    src = Path(in_dir)
    if not src.is_dir():
        _fail(f"input directory not found: {src}", 2)
    paths = sorted(src.glob("*.conllu"))
    if not paths:
        _fail(f"no .conllu files under {src}", 2)
    try:
        docs = [conllu.read_conllu_file(p) for p in paths]
        table = extract.accumulate(docs)
        if min_count < 1:
            _fail("--min-count must be >= 1", 1)
        lines = []
        for lemmas, kind, count in table.rows():
            if count < min_count:
                continue
            if len(lines) >= max_terms:
                break
            lines.append(f"{' '.join(lemmas)}\t{kind}\t{count}")
    except GlossforgeError as exc:
        _fail(str(exc), 1)
        return
    _atomic_write_text(Path(out_path), "\n".join(lines) + "\n" if lines else "")
    if table.propn:
        click.echo(f"note: {sum(table.propn.values())} PROPN tokens logged separately (not candidates)", err=True)
    click.echo(f"{len(lines)} terms from {table.total_sentences} sentences -> {out_path}", err=True)


def _parse_terms_file(text: str, default_corpus: str) -> list[tuple[str, str]]:
    """Accept three shapes: ``corpus \\t term``, extract TSV
    (``lemmas \\t kind \\t count``), or one bare term per line."""
    pairs: list[tuple[str, str]] = []
    for line in text.split("\n"):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) == 2:
            pairs.append((cols[0].strip(), cols[1].strip()))
        elif len(cols) == 3:
            pairs.append((default_corpus, cols[0].strip()))
        else:
            pairs.append((default_corpus, line.strip()))
    return pairs


@main.command("link")
@click.option("--terms", "terms_path", required=True, type=click.Path(), help="Terms file (corpus+term TSV, extract TSV, or one term per line).")
@click.option("--corpus", "corpus_name", default="custom", show_default=True, help="Corpus id for term files without a corpus column.")
@click.option("--index", "index_path", required=True, type=click.Path(), help="Title index (.qidx).")
@click.option("--overrides", "overrides_path", type=click.Path(), help="Manual overrides TSV.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output mappings JSON-lines.")
def link_cmd(terms_path, corpus_name, index_path, overrides_path, out_path):
    """Map terms to QIDs via the parenthetical disambiguation strategy."""
    idx_file = Path(index_path)
    if not idx_file.exists():
        _fail(f"index file not found: {idx_file}", 2)
    try:
        idx = titles.load_index(idx_file)
        overrides = None
        if overrides_path:
            overrides = linker.OverrideTable.parse_tsv(_read_text(Path(overrides_path), "overrides TSV"))
        pairs = _parse_terms_file(_read_text(Path(terms_path), "terms file"), corpus_name)
        records, stats = linker.link_corpus(pairs, idx, overrides)
    except GlossforgeError as exc:
        _fail(str(exc), 1)
        return
    _atomic_write_text(Path(out_path), linker.dump_mappings(records))
    for warning in stats.warnings:
        click.echo(f"warning: {warning}", err=True)
    by_strategy = ", ".join(f"{k}={v}" for k, v in sorted(stats.by_strategy.items()))
    click.echo(f"{stats.summary()} [{by_strategy}] -> {out_path}", err=True)


@main.group("graph")
def graph_group():
    """Knowledge-graph commands."""


def _ingest_configured(config: dict, base: Path) -> list:
    sources = config.get("corpora", {})
    entries = []
    if "chicago" in sources:
        entries.extend(corpora.ingest_chicago(base / sources["chicago"]))
    if "french_lean" in sources:
        entries.extend(corpora.ingest_french_lean(_read_text(base / sources["french_lean"], "french_lean TSV")))
    if "mulima" in sources:
        entries.extend(corpora.ingest_mulima(_read_text(base / sources["mulima"], "mulima TSV")))
    if "nlab" in sources:
        entries.extend(corpora.ingest_nlab(_read_text(base / sources["nlab"], "nlab title list")))
    return entries


@graph_group.command("build")
@click.option("--config", "config_path", type=click.Path(), help=f"Build config JSON (default ${CONFIG_ENV_VAR}).")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output graph.json.")
@click.option("--mappings-out", "mappings_out", type=click.Path(), help="Also write the MappingRecord JSON-lines.")
def graph_build(config_path, out_path, mappings_out):
    """Ingest all configured corpora, link, assemble, and filter."""
    config, base = _load_config(config_path)
    index_rel = config.get("index")
    if not index_rel:
        _fail("build config is missing the 'index' key", 1)
    idx_file = base / index_rel
    if not idx_file.exists():
        _fail(f"index file not found: {idx_file}", 2)
    try:
        idx = titles.load_index(idx_file)
        overrides = None
        if config.get("overrides"):
            overrides = linker.OverrideTable.parse_tsv(_read_text(base / config["overrides"], "overrides TSV"))
        entries = _ingest_configured(config, base)
        pairs = [(e.corpus, e.term) for e in entries]
        records, stats = linker.link_corpus(pairs, idx, overrides)
        assembled = graphmod.assemble(entries, records)
        filtered = graphmod.filter_nlab(assembled)
    except GlossforgeError as exc:
        _fail(str(exc), 1)
        return
    _atomic_write_text(Path(out_path), graphmod.dump_graph(filtered))
    if mappings_out:
        _atomic_write_text(Path(mappings_out), linker.dump_mappings(records))
    for warning in stats.warnings:
        click.echo(f"warning: {warning}", err=True)
    gs = filtered.stats
    for corpus_name in sorted(gs.get("entries", {})):
        total = gs["entries"][corpus_name]
        mapped = gs.get("mapped", {}).get(corpus_name, 0)
        click.echo(f"{corpus_name}: {total} terms, {mapped} with Wikidata counterparts", err=True)
    click.echo(
        f"{stats.summary()}; {gs['concepts']} concepts after filtering "
        f"({gs.get('nlab_filtered', 0)} nLab-only removed) -> {out_path}",
        err=True,
    )


@main.group("site")
def site_group():
    """Static-site commands."""


@site_group.command("emit")
@click.option("--graph", "graph_path", required=True, type=click.Path(), help="Input graph.json.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output site directory.")
@click.option("--config", "config_path", type=click.Path(), help=f"Build config JSON for site options (default ${CONFIG_ENV_VAR}).")
def site_emit(graph_path, out_dir, config_path):
    """Emit the static site (table, definition pages, assets, manifest)."""
    gpath = Path(graph_path)
    if not gpath.exists():
        _fail(f"graph file not found: {gpath}", 2)
    site_config = site.SiteConfig()
    if config_path or os.environ.get(CONFIG_ENV_VAR):
        config, _ = _load_config(config_path)
        site_config = site.SiteConfig.from_config(config)
    try:
        g = graphmod.load_graph(gpath)
        manifest = site.emit_site(g, out_dir, site_config)
    except GlossforgeError as exc:
        _fail(str(exc), 1)
        return
    click.echo(f"{manifest['row_count']} rows, {len(manifest['files'])} files -> {out_dir}", err=True)


@main.group("review")
def review_group():
    """Curation service commands."""


@review_group.command("serve")
@click.option("--graph", "graph_path", required=True, type=click.Path(), help="Input graph.json.")
@click.option("--mappings", "mappings_path", required=True, type=click.Path(), help="MappingRecord JSON-lines from the build.")
@click.option("--index", "index_path", type=click.Path(), help="Title index for candidate QIDs.")
@click.option("--decisions", "decisions_path", default="decisions.jsonl", show_default=True, type=click.Path(), help="Append-only decision log.")
@click.option("--ui", "ui_dir", type=click.Path(), help="Static curation UI bundle directory.")
@click.option("--cache", "cache_path", default="wikidata_cache.json", show_default=True, type=click.Path(), help="Enrichment cache file.")
@click.option("--port", default=7117, show_default=True, type=int, help="HTTP port.")
@click.option("--offline", is_flag=True, help="Serve enrichment from cache only; never hit the network.")
def review_serve(graph_path, mappings_path, index_path, decisions_path, ui_dir, cache_path, port, offline):
    """Serve the curation queue over HTTP."""
    import uvicorn

    from .wikidata_client import WikidataClient

    gpath, mpath = Path(graph_path), Path(mappings_path)
    if not gpath.exists():
        _fail(f"graph file not found: {gpath}", 2)
    if not mpath.exists():
        _fail(f"mappings file not found: {mpath}", 2)
    try:
        g = graphmod.load_graph(gpath)
        mappings = linker.load_mappings(mpath.read_text(encoding="utf-8"))
        idx = titles.load_index(index_path) if index_path else None
        items = review.build_items(mappings, g, idx)
        state = review.ReviewState(items, log_path=decisions_path)
    except GlossforgeError as exc:
        _fail(str(exc), 1)
        return
    enricher = WikidataClient(cache_path, offline=offline)
    app = review.create_app(state, ui_dir=ui_dir, enricher=enricher)
    click.echo(f"review queue: {state.stats()['queued']} items on port {port}", err=True)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


@main.command("stats")
@click.option("--graph", "graph_path", required=True, type=click.Path(), help="Input graph.json.")
def stats_cmd(graph_path):
    """Print machine-readable graph stats as JSON to stdout."""
    gpath = Path(graph_path)
    if not gpath.exists():
        _fail(f"graph file not found: {gpath}", 2)
    try:
        g = graphmod.load_graph(gpath)
    except GlossforgeError as exc:
        _fail(str(exc), 1)
        return
    click.echo(json.dumps(g.stats, ensure_ascii=False, indent=2, sort_keys=True))


def entrypoint():
    try:
        main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(130)
    except click.UsageError as exc:
        exc.show()
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except GlossforgeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    entrypoint()
