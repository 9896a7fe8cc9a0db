"""Immutable index from normalized Wikipedia page titles to Wikidata QIDs.

Built offline from two TSV files (titles and redirects), queried with
redirect resolution and a disambiguation flag per entry.  The on-disk
``.qidx`` format is a versioned, sorted, LF-only text layout so that builds
are byte-identical across runs and platforms.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field

from .errors import GlossforgeError

QID_RE = re.compile(r"^Q[0-9]+$")
MAX_REDIRECT_HOPS = 8
MAGIC = "GLOSSQIDX"
FORMAT_VERSION = 1


class TitleError(GlossforgeError):
    pass


class EmptyTitle(TitleError):
    pass


class BadQid(TitleError):
    pass


class RedirectCycle(TitleError):
    pass


class MalformedRow(TitleError):
    pass


class BadIndexFile(TitleError):
    pass


@dataclass(frozen=True)
class Qid:
    value: str

    def __post_init__(self):
        if not QID_RE.match(self.value):
            raise BadQid(f"not a QID: {self.value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class IndexEntry:
    title: str
    qid: Qid
    is_disambiguation: bool = False


def normalize_title(raw: str) -> str:
    """MediaWiki-style normalization: trim, collapse internal whitespace,
    spaces to underscores, uppercase the first character only."""
    collapsed = " ".join(raw.split())
    if not collapsed:
        raise EmptyTitle("title is empty after trimming")
    underscored = collapsed.replace(" ", "_")
    return underscored[0].upper() + underscored[1:]


@dataclass
class TitleIndex:
    entries: dict[str, IndexEntry] = field(default_factory=dict)
    redirects: dict[str, str] = field(default_factory=dict)
    build_meta: dict = field(default_factory=dict)

    def lookup(self, title: str) -> IndexEntry | None:
        """Normalize, follow redirects to a terminal entry, return it (with
        its disambiguation flag) or None.  Absence is a value, not an error."""
        try:
            current = normalize_title(title)
        except EmptyTitle:
            return None
        hops = 0
        while current in self.redirects:
            current = self.redirects[current]
            hops += 1
            assert hops <= MAX_REDIRECT_HOPS, "redirect chain exceeds the bound enforced at build"
        return self.entries.get(current)


def lookup(index: TitleIndex, title: str) -> IndexEntry | None:
    return index.lookup(title)


def _validate_redirects(entries: dict[str, IndexEntry], redirects: dict[str, str], warnings: list[str]) -> dict[str, str]:
    kept: dict[str, str] = {}
    for source in sorted(redirects):
        chain = [source]
        current = source
        hops = 0
        while True:
            target = redirects.get(current)
            if target is None:
                # Terminal: an entry, or dangling.
                if current in entries:
                    if hops <= MAX_REDIRECT_HOPS:
                        kept[source] = redirects[source]
                    else:
                        warnings.append(f"redirect {source!r} dropped: chain exceeds {MAX_REDIRECT_HOPS} hops")
                else:
                    warnings.append(f"redirect {source!r} dropped: dangling target {current!r}")
                break
            if target in chain:
                raise RedirectCycle(f"redirect cycle: {' -> '.join(chain + [target])}")
            chain.append(target)
            current = target
            hops += 1
            if hops > MAX_REDIRECT_HOPS + len(redirects):
                raise RedirectCycle(f"redirect chain from {source!r} does not terminate")
    return kept


def build_index(titles_tsv: str, redirects_tsv: str) -> TitleIndex:
    """Build from ``title \\t qid \\t flags`` and ``from \\t to`` TSV text.

    Titles may be un-normalized; duplicate titles keep the last row with a
    warning.  Redirect chains are validated for cycles and the hop bound.
    Warnings and source digests land in build_meta.
    """
    warnings: list[str] = []
    entries: dict[str, IndexEntry] = {}
    for line_no, line in enumerate(titles_tsv.split("\n"), start=1):
        if line == "":
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise MalformedRow(f"titles line {line_no}: expected 3 columns, got {len(cols)}")
        raw_title, raw_qid, flags = cols
        if flags not in ("", "D"):
            raise MalformedRow(f"titles line {line_no}: unknown flags {flags!r}")
        try:
            title = normalize_title(raw_title)
        except EmptyTitle:
            raise MalformedRow(f"titles line {line_no}: empty title") from None
        if not QID_RE.match(raw_qid):
            raise BadQid(f"titles line {line_no}: not a QID: {raw_qid!r}")
        if title in entries:
            warnings.append(f"duplicate title {title!r} at line {line_no}: last row wins")
        entries[title] = IndexEntry(title=title, qid=Qid(raw_qid), is_disambiguation=flags == "D")

    redirects: dict[str, str] = {}
    for line_no, line in enumerate(redirects_tsv.split("\n"), start=1):
        if line == "":
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise MalformedRow(f"redirects line {line_no}: expected 2 columns, got {len(cols)}")
        try:
            source = normalize_title(cols[0])
            target = normalize_title(cols[1])
        except EmptyTitle:
            raise MalformedRow(f"redirects line {line_no}: empty title") from None
        if source in entries:
            warnings.append(f"redirect source {source!r} is also an entry: redirect dropped")
            continue
        if source in redirects:
            warnings.append(f"duplicate redirect source {source!r} at line {line_no}: last row wins")
        redirects[source] = target

    kept = _validate_redirects(entries, redirects, warnings)
    meta = {
        "format_version": FORMAT_VERSION,
        "titles_sha256": hashlib.sha256(titles_tsv.encode("utf-8")).hexdigest(),
        "redirects_sha256": hashlib.sha256(redirects_tsv.encode("utf-8")).hexdigest(),
        "entry_count": len(entries),
        "redirect_count": len(kept),
        "warnings": warnings,
    }
    return TitleIndex(entries=entries, redirects=kept, build_meta=meta)


def dump_index(index: TitleIndex) -> str:
    """Serialize to the versioned .qidx text layout (sorted, LF, UTF-8)."""
    lines = [f"{MAGIC}\t{FORMAT_VERSION}"]
    lines.append("M\t" + json.dumps(index.build_meta, sort_keys=True, ensure_ascii=False))
    for title in sorted(index.entries):
        e = index.entries[title]
        lines.append(f"E\t{title}\t{e.qid}\t{'D' if e.is_disambiguation else ''}")
    for source in sorted(index.redirects):
        lines.append(f"R\t{source}\t{index.redirects[source]}")
    return "\n".join(lines) + "\n"


def load_index_text(text: str) -> TitleIndex:
    lines = text.split("\n")
    if not lines or not lines[0].startswith(MAGIC + "\t"):
        raise BadIndexFile("missing GLOSSQIDX magic header")
    version = lines[0].split("\t", 1)[1]
    if version != str(FORMAT_VERSION):
        raise BadIndexFile(f"unsupported index format version {version!r}")
    index = TitleIndex()
    for line_no, line in enumerate(lines[1:], start=2):
        if line == "":
            continue
        kind, _, rest = line.partition("\t")
        if kind == "M":
            index.build_meta = json.loads(rest)
        elif kind == "E":
            cols = rest.split("\t")
            if len(cols) != 3:
                raise BadIndexFile(f"line {line_no}: bad entry row")
            index.entries[cols[0]] = IndexEntry(
                title=cols[0], qid=Qid(cols[1]), is_disambiguation=cols[2] == "D"
            )
        elif kind == "R":
            cols = rest.split("\t")
            if len(cols) != 2:
                raise BadIndexFile(f"line {line_no}: bad redirect row")
            index.redirects[cols[0]] = cols[1]
        else:
            raise BadIndexFile(f"line {line_no}: unknown row kind {kind!r}")
    return index


def save_index(index: TitleIndex, path) -> None:
    from pathlib import Path

    Path(path).write_text(dump_index(index), encoding="utf-8", newline="\n")


def load_index(path) -> TitleIndex:
    from pathlib import Path

    return load_index_text(Path(path).read_text(encoding="utf-8"))
