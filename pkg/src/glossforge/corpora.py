"""Adapters that ingest the four corpus shapes into a uniform entry stream.

chicago: a directory of Markdown definition files, one per concept, linking
each other by relative ``.md`` links.  french_lean: a TSV of terms with
optional theorem-prover URLs.  mulima: a TSV of terms with per-language
translations.  nlab: a plain list of wiki page titles.  Nothing is fetched
over the network; converter recipes for the real upstream sources are
documented in the README.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import GlossforgeError

CHICAGO = "chicago"
FRENCH_LEAN = "french_lean"
MULIMA = "mulima"
NLAB = "nlab"

_LANG_RE = re.compile(r"^[a-z]{2}$")
# Relative markdown links only: [text](slug.md) or [text](slug.md#anchor).
_MD_LINK_RE = re.compile(r"\[[^\]]*\]\(([^)\s]+)\)")
_HEADING_RE = re.compile(r"^#\s+(.+?)\s*$")


class CorpusError(GlossforgeError):
    pass


class UnreadableFile(CorpusError):
    pass


class DuplicateSlug(CorpusError):
    pass


class MalformedRow(CorpusError):
    pass


class BadLanguageCode(CorpusError):
    pass


@dataclass(frozen=True)
class DefinitionPage:
    slug: str
    body: str
    outgoing_slugs: tuple[str, ...]


@dataclass(frozen=True)
class ProverLink:
    url: str | None


@dataclass(frozen=True)
class Translations:
    by_language: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.by_language)


@dataclass(frozen=True)
class WikiPage:
    title: str


Payload = DefinitionPage | ProverLink | Translations | WikiPage


@dataclass(frozen=True)
class CorpusEntry:
    corpus: str
    term: str
    payload: Payload


def slugify(term: str) -> str:
    """Stable local key derivation: lowercase, apostrophes dropped,
    whitespace runs to single underscores, other punctuation to nothing."""
    cleaned = term.lower().replace("'", "").replace("’", "")
    cleaned = re.sub(r"\s+", "_", cleaned.strip())
    cleaned = re.sub(r"[^a-z0-9_\-]", "", cleaned)
    return cleaned or "_"


def _outgoing_slugs(body: str) -> tuple[str, ...]:
    slugs: list[str] = []
    for target in _MD_LINK_RE.findall(body):
        if "://" in target or target.startswith(("/", "#", "mailto:")):
            continue
        target = target.split("#", 1)[0]
        if not target.endswith(".md"):
            continue
        slug = target[: -len(".md")]
        if slug.startswith("./"):
            slug = slug[2:]
        if slug:
            slugs.append(slug.lower())
    return tuple(slugs)


def ingest_chicago(directory) -> list[CorpusEntry]:
    """One DefinitionPage entry per ``<slug>.md`` file, in lexicographic
    filename order.  The term is the slug with underscores as spaces,
    lowercased, unless a first-line ``# title`` heading overrides it."""
    root = Path(directory)
    entries: list[CorpusEntry] = []
    seen: set[str] = set()
    for path in sorted(root.glob("*.md"), key=lambda p: p.name):
        slug = path.stem.lower()
        if slug in seen:
            raise DuplicateSlug(f"duplicate chicago slug {slug!r} ({path.name})")
        seen.add(slug)
        try:
            body = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise UnreadableFile(f"cannot read {path}: {exc}") from None
        term = slug.replace("_", " ")
        first_line = body.split("\n", 1)[0]
        heading = _HEADING_RE.match(first_line)
        if heading:
            term = heading.group(1)
        entries.append(
            CorpusEntry(
                corpus=CHICAGO,
                term=term,
                payload=DefinitionPage(slug=slug, body=body, outgoing_slugs=_outgoing_slugs(body)),
            )
        )
    return entries


def ingest_french_lean(text: str) -> list[CorpusEntry]:
    """Rows ``term \\t lean_url``; an empty URL means no prover counterpart."""
    entries: list[CorpusEntry] = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise MalformedRow(f"french_lean line {line_no}: expected 2 columns, got {len(cols)}")
        term, url = cols
        if not term.strip():
            raise MalformedRow(f"french_lean line {line_no}: empty term")
        entries.append(
            CorpusEntry(corpus=FRENCH_LEAN, term=term.strip(), payload=ProverLink(url=url.strip() or None))
        )
    return entries


def ingest_mulima(text: str) -> list[CorpusEntry]:
    """Rows ``term \\t lang=word;lang=word;...`` with 2-letter language codes.
    The English term is always present in the map (defaulted when missing)."""
    entries: list[CorpusEntry] = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise MalformedRow(f"mulima line {line_no}: expected 2 columns, got {len(cols)}")
        term, rest = cols[0].strip(), cols[1].strip()
        if not term:
            raise MalformedRow(f"mulima line {line_no}: empty term")
        pairs: list[tuple[str, str]] = []
        langs: set[str] = set()
        if rest:
            for chunk in rest.split(";"):
                chunk = chunk.strip()
                if not chunk:
                    continue
                if "=" not in chunk:
                    raise MalformedRow(f"mulima line {line_no}: bad translation {chunk!r}")
                lang, word = chunk.split("=", 1)
                if not _LANG_RE.match(lang):
                    raise BadLanguageCode(f"mulima line {line_no}: bad language code {lang!r}")
                if lang in langs:
                    raise MalformedRow(f"mulima line {line_no}: duplicate language {lang!r}")
                langs.add(lang)
                pairs.append((lang, word.strip()))
        if "en" not in langs:
            pairs.insert(0, ("en", term))
        entries.append(CorpusEntry(corpus=MULIMA, term=term, payload=Translations(by_language=tuple(pairs))))
    return entries


def ingest_nlab(text: str) -> list[CorpusEntry]:
    """One WikiPage entry per non-blank line; no filtering here."""
    entries: list[CorpusEntry] = []
    for line in text.split("\n"):
        title = line.strip()
        if not title:
            continue
        entries.append(CorpusEntry(corpus=NLAB, term=title, payload=WikiPage(title=title)))
    return entries


def corpus_counts(entries: list[CorpusEntry]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for e in entries:
        counts[e.corpus] = counts.get(e.corpus, 0) + 1
    return counts
