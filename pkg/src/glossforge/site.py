"""Deterministic static-site emission: the main concept table and rendered
definition pages with resolved cross-links.

Rendering supports a small auditable Markdown subset (ATX headings,
emphasis, inline code, lists, links); anything else passes through as text.
``$...$`` spans are preserved verbatim inside a ``span.math`` element so a
client-side math renderer can be attached later.  Output is byte-identical
for identical graphs: no timestamps, sorted orders, LF endings, and the
whole site is written to a temporary directory and swapped into place.
"""

from __future__ import annotations

import hashlib
import html
import json
import re
import shutil
import tempfile
import urllib.parse
from dataclasses import dataclass
from pathlib import Path

from .corpora import CHICAGO, FRENCH_LEAN, MULIMA, NLAB, DefinitionPage, ProverLink, Translations, WikiPage
from .graph import Concept, KnowledgeGraph, sort_rows

_MATH_RE = re.compile(r"\$\$.+?\$\$|\$[^$]+\$", re.DOTALL)
_CODE_RE = re.compile(r"`([^`]+)`")
_LINK_RE = re.compile(r"\[([^\]]*)\]\(([^)\s]+)\)")
_BOLD_RE = re.compile(r"\*\*([^*]+)\*\*")
_ITALIC_RE = re.compile(r"\*([^*]+)\*")
_HEADING_RE = re.compile(r"^(#{1,6})\s+(.*?)\s*$")
_ULIST_RE = re.compile(r"^[-*]\s+(.*)$")
_OLIST_RE = re.compile(r"^\d+\.\s+(.*)$")


@dataclass(frozen=True)
class SiteConfig:
    base_url: str = ""
    wikidata_url_template: str = "https://www.wikidata.org/wiki/{qid}"
    nlab_url_template: str = "https://ncatlab.org/nlab/show/{title}"
    mulima_url_template: str = "https://thosgood.com/maths-dictionary/#{term}"

    @staticmethod
    def from_config(obj: dict) -> "SiteConfig":
        site = obj.get("site", {})
        external = site.get("external", {})
        defaults = SiteConfig()
        return SiteConfig(
            base_url=site.get("base_url", defaults.base_url),
            wikidata_url_template=external.get("wikidata_url_template", defaults.wikidata_url_template),
            nlab_url_template=external.get("nlab_url_template", defaults.nlab_url_template),
            mulima_url_template=external.get("mulima_url_template", defaults.mulima_url_template),
        )


def render_inline(text: str, resolve_slug) -> str:
    """Render one line of the Markdown subset to HTML.

    ``resolve_slug(slug)`` returns an href for an existing local target or
    None for a dangling link (rendered as a visibly marked span, not an
    anchor, so link integrity holds).
    """
    protected: list[str] = []

    def protect(fragment: str) -> str:
        protected.append(fragment)
        return f"\x00{len(protected) - 1}\x01"

    def protect_math(m: re.Match) -> str:
        return protect(f'<span class="math">{html.escape(m.group(0), quote=False)}</span>')

    def protect_code(m: re.Match) -> str:
        return protect(f"<code>{html.escape(m.group(1), quote=False)}</code>")

    text = _MATH_RE.sub(protect_math, text)
    text = _CODE_RE.sub(protect_code, text)

    def protect_link(m: re.Match) -> str:
        label, target = m.group(1), m.group(2)
        label_html = html.escape(label, quote=False)
        if "://" in target:
            return protect(f'<a href="{html.escape(target)}">{label_html}</a>')
        bare = target.split("#", 1)[0]
        if bare.endswith(".md"):
            slug = bare[: -len(".md")].lower()
            if slug.startswith("./"):
                slug = slug[2:]
            href = resolve_slug(slug)
            if href is None:
                return protect(
                    f'<span class="dangling" title="unresolved: {html.escape(slug)}">{label_html}</span>'
                )
            return protect(f'<a href="{html.escape(href)}">{label_html}</a>')
        return protect(f'<a href="{html.escape(target)}">{label_html}</a>')

    text = _LINK_RE.sub(protect_link, text)
    text = html.escape(text, quote=False)
    text = _BOLD_RE.sub(lambda m: f"<strong>{m.group(1)}</strong>", text)
    text = _ITALIC_RE.sub(lambda m: f"<em>{m.group(1)}</em>", text)
    text = re.sub(r"\x00(\d+)\x01", lambda m: protected[int(m.group(1))], text)
    return text


def render_markdown(body: str, resolve_slug) -> str:
    """Block-level pass over the subset: headings, lists, paragraphs."""
    out: list[str] = []
    paragraph: list[str] = []
    list_tag: str | None = None

    def close_paragraph() -> None:
        if paragraph:
            out.append(f"<p>{' '.join(paragraph)}</p>")
            paragraph.clear()

    def close_list() -> None:
        nonlocal list_tag
        if list_tag:
            out.append(f"</{list_tag}>")
            list_tag = None

    for raw in body.split("\n"):
        line = raw.rstrip()
        if not line.strip():
            close_paragraph()
            close_list()
            continue
        heading = _HEADING_RE.match(line)
        if heading:
            close_paragraph()
            close_list()
            level = len(heading.group(1))
            out.append(f"<h{level}>{render_inline(heading.group(2), resolve_slug)}</h{level}>")
            continue
        item = _ULIST_RE.match(line)
        tag = "ul"
        if not item:
            item = _OLIST_RE.match(line)
            tag = "ol"
        if item:
            close_paragraph()
            if list_tag != tag:
                close_list()
                out.append(f"<{tag}>")
                list_tag = tag
            out.append(f"<li>{render_inline(item.group(1), resolve_slug)}</li>")
            continue
        close_list()
        paragraph.append(render_inline(line, resolve_slug))
    close_paragraph()
    close_list()
    return "\n".join(out)


_PAGE_TEMPLATE = """<!doctype html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>{title}</title>
<link rel="stylesheet" href="{css}">
</head>
<body>
<header><a href="{home}">&larr; all concepts</a></header>
<main>
{content}
</main>
</body>
</html>
"""

FILTER_JS = """'use strict';
(function () {
  var box = document.getElementById('filter-box');
  var rows = document.querySelectorAll('table.concepts tbody tr');
  var count = document.getElementById('filter-count');
  function apply() {
    var needle = box.value.toLowerCase();
    var shown = 0;
    rows.forEach(function (row) {
      var hit = row.textContent.toLowerCase().indexOf(needle) !== -1;
      row.style.display = hit ? '' : 'none';
      if (hit) shown += 1;
    });
    if (count) count.textContent = shown + ' / ' + rows.length;
  }
  if (box) {
    box.addEventListener('input', apply);
    apply();
  }
})();
"""

STYLE_CSS = """body { font-family: Georgia, serif; margin: 2rem auto; max-width: 60rem; padding: 0 1rem; color: #222; }
table.concepts { border-collapse: collapse; width: 100%; }
table.concepts th, table.concepts td { border: 1px solid #ccc; padding: 0.35rem 0.6rem; text-align: left; vertical-align: top; }
table.concepts th { background: #f2f2f2; }
#filter-box { margin: 1rem 0; padding: 0.4rem; width: 20rem; font-size: 1rem; }
.math { font-family: "Latin Modern Math", "STIX Two Math", serif; white-space: pre-wrap; }
.dangling { color: #a00; border-bottom: 1px dotted #a00; cursor: help; }
header { margin-bottom: 1.5rem; }
main article { line-height: 1.5; }
"""


def _cell_chicago(concept: Concept) -> str:
    parts = []
    for entry in concept.by_corpus(CHICAGO):
        assert isinstance(entry.payload, DefinitionPage)
        parts.append(f'<a href="defs/{html.escape(entry.payload.slug)}.html">{html.escape(entry.term, quote=False)}</a>')
    return ", ".join(parts)


def _cell_french(concept: Concept) -> str:
    parts = []
    for entry in concept.by_corpus(FRENCH_LEAN):
        assert isinstance(entry.payload, ProverLink)
        if entry.payload.url:
            parts.append(f'<a href="{html.escape(entry.payload.url)}">{html.escape(entry.term, quote=False)}</a>')
        else:
            parts.append(html.escape(entry.term, quote=False))
    return ", ".join(parts)


def _cell_mulima(concept: Concept, config: SiteConfig) -> str:
    parts = []
    for entry in concept.by_corpus(MULIMA):
        assert isinstance(entry.payload, Translations)
        url = config.mulima_url_template.format(term=urllib.parse.quote(entry.term))
        parts.append(f'<a href="{html.escape(url)}">{html.escape(entry.term, quote=False)}</a>')
    return ", ".join(parts)


def _cell_nlab(concept: Concept, config: SiteConfig) -> str:
    parts = []
    for entry in concept.by_corpus(NLAB):
        assert isinstance(entry.payload, WikiPage)
        url = config.nlab_url_template.format(title=urllib.parse.quote(entry.payload.title))
        parts.append(f'<a href="{html.escape(url)}">{html.escape(entry.payload.title, quote=False)}</a>')
    return ", ".join(parts)


def render_table_page(rows: list[Concept], config: SiteConfig) -> str:
    body: list[str] = []
    body.append("<h1>Concept table</h1>")
    body.append('<input id="filter-box" type="search" placeholder="filter concepts&hellip;" autocomplete="off">')
    body.append('<span id="filter-count"></span>')
    body.append('<table class="concepts">')
    body.append("<thead><tr><th>Wikidata</th><th>Chicago</th><th>French (Lean 4)</th><th>MuLiMa</th><th>nLab</th></tr></thead>")
    body.append("<tbody>")
    for concept in rows:
        if concept.qid:
            url = config.wikidata_url_template.format(qid=concept.qid)
            wikidata = f'<a href="{html.escape(url)}">{concept.qid}</a>'
        else:
            wikidata = ""
        cells = (
            wikidata,
            _cell_chicago(concept),
            _cell_french(concept),
            _cell_mulima(concept, config),
            _cell_nlab(concept, config),
        )
        body.append("<tr>" + "".join(f"<td>{cell}</td>" for cell in cells) + "</tr>")
    body.append("</tbody>")
    body.append("</table>")
    body.append('<script src="assets/filter.js"></script>')
    return _PAGE_TEMPLATE.format(
        title="Concept table",
        css="assets/style.css",
        home="database.html",
        content="\n".join(body),
    )


def render_definition_page(term: str, page: DefinitionPage, resolve_slug) -> str:
    content = f"<article>\n{render_markdown(page.body, resolve_slug)}\n</article>"
    return _PAGE_TEMPLATE.format(
        title=html.escape(term, quote=False),
        css="../assets/style.css",
        home="../database.html",
        content=content,
    )


def _table_files(rows: list[Concept], config: SiteConfig) -> dict[str, str]:
    return {
        "database.html": render_table_page(rows, config),
        "assets/filter.js": FILTER_JS,
        "assets/style.css": STYLE_CSS,
    }


def _definition_files(graph: KnowledgeGraph) -> dict[str, str]:
    known_slugs = {
        e.payload.slug
        for c in graph.concepts.values()
        for e in c.by_corpus(CHICAGO)
        if isinstance(e.payload, DefinitionPage)
    }

    def resolve_slug(slug: str) -> str | None:
        return f"{slug}.html" if slug in known_slugs else None

    files: dict[str, str] = {}
    for concept in sort_rows(graph):
        for entry in concept.by_corpus(CHICAGO):
            assert isinstance(entry.payload, DefinitionPage)
            files[f"defs/{entry.payload.slug}.html"] = render_definition_page(
                entry.term, entry.payload, resolve_slug
            )
    return files


def _manifest_for(files: dict[str, str], row_count: int | None = None) -> dict:
    manifest: dict = {
        "files": [
            {"path": path, "sha256": hashlib.sha256(files[path].encode("utf-8")).hexdigest()}
            for path in sorted(files)
        ]
    }
    if row_count is not None:
        manifest["row_count"] = row_count
    return manifest


def _write_files(out_dir, files: dict[str, str]) -> None:
    out = Path(out_dir)
    for path, content in files.items():
        target = out / path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8", newline="\n")


def emit_table(rows: list[Concept], out_dir, config: SiteConfig | None = None) -> dict:
    """Write database.html plus the filter/style assets into out_dir and
    return the file manifest for just those files."""
    files = _table_files(rows, config or SiteConfig())
    _write_files(out_dir, files)
    return _manifest_for(files, row_count=len(rows))


def emit_definition_pages(graph: KnowledgeGraph, out_dir) -> dict:
    """Write one defs/<slug>.html per DefinitionPage payload into out_dir
    and return the file manifest for just those pages."""
    files = _definition_files(graph)
    _write_files(out_dir, files)
    return _manifest_for(files)


def emit_site(graph: KnowledgeGraph, out_dir, config: SiteConfig | None = None) -> dict:
    """Write the full site (table, definition pages, assets, manifest).

    Returns the manifest object.  The site lands atomically: it is built in
    a temporary sibling directory and swapped in, so partial output is never
    left in place.
    """
    config = config or SiteConfig()
    out = Path(out_dir)
    rows = sort_rows(graph)

    files = _table_files(rows, config)
    files.update(_definition_files(graph))
    manifest = _manifest_for(files, row_count=len(rows))

    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=out.name + ".tmp-", dir=out.parent))
    try:
        _write_files(tmp, files)
        (tmp / "manifest.json").write_text(
            json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8", newline="\n"
        )
        if out.exists():
            shutil.rmtree(out)
        tmp.rename(out)
    except Exception:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return manifest
