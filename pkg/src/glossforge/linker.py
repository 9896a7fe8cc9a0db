"""Term-to-QID linking with parenthetical disambiguation.

Bare title lookups for overloaded words ("group", "ring", "field") land on
disambiguation hub pages, so subject-qualified titles are tried first:
"group (mathematics)" resolves to the article where "group" resolves to the
hub.  Manual overrides take precedence over everything, and each mapping
records the full trail of titles attempted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import GlossforgeError
from .titles import QID_RE, EmptyTitle, TitleIndex, normalize_title

# Subject qualifiers appended to terms, tried in this order; "mathematics"
# first (the generic Wikipedia convention), then the remaining subjects.
PARENTHETICAL_SUBJECTS = (
    "mathematics",
    "linear algebra",
    "algebraic geometry",
    "calculus",
    "category theory",
    "commutative algebra",
    "field theory",
    "game theory",
    "topology",
    "differential geometry",
    "graph theory",
    "invariant theory",
    "group theory",
    "module theory",
    "order theory",
    "probability",
    "statistics",
    "ring theory",
    "representation theory",
    "set theory",
    "string theory",
    "symplectic geometry",
    "tensor theory",
)

STRATEGY_OVERRIDE = "override"
STRATEGY_BARE = "bare"
STRATEGY_UNMAPPED = "unmapped"
STRATEGY_REJECTED = "disambiguation_rejected"

FORCE_UNMAPPED = "NONE"


class EmptyTerm(GlossforgeError):
    pass


class MalformedOverrideRow(GlossforgeError):
    pass


def parenthetical_strategy(subject: str) -> str:
    return f"parenthetical({subject})"


@dataclass(frozen=True)
class MappingRecord:
    corpus: str
    term: str
    qid: str | None
    strategy: str
    tried: tuple[str, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "corpus": self.corpus,
                "term": self.term,
                "qid": self.qid,
                "strategy": self.strategy,
                "tried": list(self.tried),
            },
            ensure_ascii=False,
        )

    @staticmethod
    def from_json(line: str) -> "MappingRecord":
        obj = json.loads(line)
        return MappingRecord(
            corpus=obj["corpus"],
            term=obj["term"],
            qid=obj.get("qid"),
            strategy=obj["strategy"],
            tried=tuple(obj.get("tried", ())),
        )


@dataclass
class OverrideTable:
    """(corpus-or-"*", term) -> QID string or FORCE_UNMAPPED, plus a note.

    Corpus-specific rows shadow "*" rows.  Terms are matched on their
    trimmed string, case-sensitively.
    """

    rows: dict[tuple[str, str], tuple[str, str]] = field(default_factory=dict)

    def set(self, corpus: str, term: str, qid_or_none: str, note: str = "") -> None:
        if qid_or_none != FORCE_UNMAPPED and not QID_RE.match(qid_or_none):
            raise MalformedOverrideRow(f"override for {term!r}: bad qid {qid_or_none!r}")
        self.rows[(corpus, term.strip())] = (qid_or_none, note)

    def get(self, corpus: str, term: str) -> str | None:
        term = term.strip()
        hit = self.rows.get((corpus, term))
        if hit is None:
            hit = self.rows.get(("*", term))
        return hit[0] if hit else None

    @staticmethod
    def parse_tsv(text: str) -> "OverrideTable":
        """Rows: corpus ("*" allowed) \\t term \\t qid-or-NONE \\t note."""
        table = OverrideTable()
        for line_no, line in enumerate(text.split("\n"), start=1):
            if line == "" or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise MalformedOverrideRow(f"overrides line {line_no}: expected 4 columns, got {len(cols)}")
            corpus, term, qid, note = cols
            if not term.strip():
                raise MalformedOverrideRow(f"overrides line {line_no}: empty term")
            try:
                table.set(corpus, term, qid, note)
            except MalformedOverrideRow:
                raise MalformedOverrideRow(f"overrides line {line_no}: bad qid {qid!r}") from None
        return table

    def to_tsv(self) -> str:
        lines = []
        for (corpus, term) in sorted(self.rows):
            qid, note = self.rows[(corpus, term)]
            lines.append(f"{corpus}\t{term}\t{qid}\t{note}")
        return "\n".join(lines) + "\n" if lines else ""


def link_term(term: str, index: TitleIndex, overrides: OverrideTable | None, corpus: str) -> MappingRecord:
    """Resolve one term.

    Order: override row; then each parenthetical subject; then the bare
    title.  The first non-disambiguation hit wins.  If only disambiguation
    pages were hit the term is rejected; otherwise it is unmapped.  ``tried``
    records every normalized title attempted, in order.
    """
    if not term.strip():
        raise EmptyTerm("term is empty after trimming")
    if overrides is not None:
        forced = overrides.get(corpus, term)
        if forced is not None:
            if forced == FORCE_UNMAPPED:
                return MappingRecord(corpus=corpus, term=term, qid=None, strategy=STRATEGY_UNMAPPED, tried=())
            return MappingRecord(corpus=corpus, term=term, qid=forced, strategy=STRATEGY_OVERRIDE, tried=())

    tried: list[str] = []
    saw_disambiguation = False

    def attempt(title: str) -> str | None:
        nonlocal saw_disambiguation
        try:
            normalized = normalize_title(title)
        except EmptyTitle:
            return None
        tried.append(normalized)
        entry = index.lookup(normalized)
        if entry is None:
            return None
        if entry.is_disambiguation:
            saw_disambiguation = True
            return None
        return str(entry.qid)

    for subject in PARENTHETICAL_SUBJECTS:
        qid = attempt(f"{term} ({subject})")
        if qid is not None:
            return MappingRecord(
                corpus=corpus, term=term, qid=qid,
                strategy=parenthetical_strategy(subject), tried=tuple(tried),
            )
    qid = attempt(term)
    if qid is not None:
        return MappingRecord(corpus=corpus, term=term, qid=qid, strategy=STRATEGY_BARE, tried=tuple(tried))
    strategy = STRATEGY_REJECTED if saw_disambiguation else STRATEGY_UNMAPPED
    return MappingRecord(corpus=corpus, term=term, qid=None, strategy=strategy, tried=tuple(tried))


@dataclass
class LinkStats:
    total: int = 0
    mapped: int = 0
    by_strategy: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def mapped_ratio(self) -> float | None:
        """Mapped fraction; None when the batch was empty (0/0)."""
        return self.mapped / self.total if self.total else None

    def summary(self) -> str:
        ratio = "undefined" if self.mapped_ratio is None else f"{self.mapped_ratio:.3f}"
        return f"{self.mapped} of {self.total} terms mapped (ratio {ratio})"


def strategy_family(strategy: str) -> str:
    return "parenthetical" if strategy.startswith("parenthetical(") else strategy


def link_corpus(
    terms: list[tuple[str, str]],
    index: TitleIndex,
    overrides: OverrideTable | None = None,
) -> tuple[list[MappingRecord], LinkStats]:
    """Link a batch of (corpus, term) pairs, preserving input order.

    Empty terms are recorded as unmapped with a warning; the batch never
    aborts.
    """
    records: list[MappingRecord] = []
    stats = LinkStats()
    for corpus, term in terms:
        try:
            record = link_term(term, index, overrides, corpus)
        except EmptyTerm:
            stats.warnings.append(f"empty term in corpus {corpus!r} recorded as unmapped")
            record = MappingRecord(corpus=corpus, term=term, qid=None, strategy=STRATEGY_UNMAPPED, tried=())
        records.append(record)
        stats.total += 1
        if record.qid is not None:
            stats.mapped += 1
        family = strategy_family(record.strategy)
        stats.by_strategy[family] = stats.by_strategy.get(family, 0) + 1
    return records, stats


def dump_mappings(records: list[MappingRecord]) -> str:
    """JSON-lines serialization, one object per record, byte-deterministic."""
    return "".join(record.to_json() + "\n" for record in records)


def load_mappings(text: str) -> list[MappingRecord]:
    return [MappingRecord.from_json(line) for line in text.splitlines() if line.strip()]
