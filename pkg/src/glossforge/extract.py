"""Candidate term extraction from dependency-annotated sentences.

The heuristic: every NOUN token is a candidate; contiguous ``compound``
chains ending at a NOUN head form compound candidates; a maximal run of
``amod`` adjectives immediately before a noun or compound candidate forms an
adjective-noun candidate.  Math-span tokens and stop lemmas never enter a
candidate.  PROPN tokens are counted in a side table rather than treated as
nouns.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

from .conllu import ABSENT, Document, Sentence, Token
from .errors import GlossforgeError

KINDS = ("noun", "compound", "adj_noun")


class MissingAnnotation(GlossforgeError):
    """A non-punctuation token lacks UPOS or HEAD annotation."""


def load_stop_lemmas() -> frozenset[str]:
    text = resources.files("glossforge").joinpath("data/stop_lemmas.txt").read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip() and not line.startswith("#"))


@dataclass(frozen=True)
class TermCandidate:
    lemmas: tuple[str, ...]
    kind: str
    surface: str

    def __post_init__(self):
        if not self.lemmas:
            raise ValueError("candidate must have at least one lemma")
        if self.kind not in KINDS:
            raise ValueError(f"unknown candidate kind {self.kind!r}")
        if self.kind == "noun" and len(self.lemmas) != 1:
            raise ValueError("noun candidates carry exactly one lemma")
        if self.kind != "noun" and len(self.lemmas) < 2:
            raise ValueError(f"{self.kind} candidates carry at least two lemmas")

    @property
    def term(self) -> str:
        return " ".join(self.lemmas)


def _is_math(tok: Token) -> bool:
    return tok.misc_map().get("MathSpan") == "Yes" or "$" in tok.lemma or "$" in tok.form


def _excluded(tok: Token, stop: frozenset[str]) -> bool:
    return _is_math(tok) or tok.lemma.lower() in stop


def _check_annotated(sentence: Sentence) -> None:
    for tok in sentence.tokens:
        if tok.upos == ABSENT:
            raise MissingAnnotation(f"token {tok.id} ({tok.form!r}) has no UPOS")
        if tok.upos != "PUNCT" and tok.head is None:
            raise MissingAnnotation(f"token {tok.id} ({tok.form!r}) has no HEAD")


def _compound_chain(sentence: Sentence, head: Token, stop: frozenset[str]) -> list[Token]:
    """Maximal contiguous run of compound-chain tokens immediately before
    ``head``.  Chain membership: deprel == compound and the head path through
    compound tokens reaches ``head``."""
    chain_ids: set[int] = set()
    for tok in sentence.tokens:
        if tok.deprel != "compound" or tok.id >= head.id:
            continue
        cur = tok
        seen: set[int] = set()
        while cur.deprel == "compound" and cur.head is not None and cur.head not in seen:
            seen.add(cur.id)
            if cur.head == head.id:
                chain_ids.add(tok.id)
                break
            nxt = cur.head
            if not 1 <= nxt <= len(sentence.tokens):
                break
            cur = sentence.tokens[nxt - 1]
    run: list[Token] = []
    pos = head.id - 1
    while pos >= 1 and pos in chain_ids:
        tok = sentence.tokens[pos - 1]
        if _excluded(tok, stop):
            break
        run.append(tok)
        pos -= 1
    run.reverse()
    return run


def _amod_run(sentence: Sentence, head: Token, before_id: int, stop: frozenset[str]) -> list[Token]:
    """Maximal run of ADJ/amod dependents of ``head`` ending just before
    position ``before_id``.  Non-contiguous amod dependents are ignored."""
    run: list[Token] = []
    pos = before_id - 1
    while pos >= 1:
        tok = sentence.tokens[pos - 1]
        if tok.upos != "ADJ" or tok.deprel != "amod" or tok.head != head.id or _excluded(tok, stop):
            break
        run.append(tok)
        pos -= 1
    run.reverse()
    return run


def candidates(sentence: Sentence, stop_lemmas: frozenset[str] | None = None) -> list[TermCandidate]:
    """Extract term candidates from one annotated sentence, in token order:
    for each eligible NOUN head, its noun candidate, then its compound
    candidate, then its adjective-noun candidate."""
    stop = load_stop_lemmas() if stop_lemmas is None else stop_lemmas
    _check_annotated(sentence)
    out: list[TermCandidate] = []
    for tok in sentence.tokens:
        if tok.upos != "NOUN" or _excluded(tok, stop):
            continue
        lemma = tok.lemma.lower()
        out.append(TermCandidate(lemmas=(lemma,), kind="noun", surface=tok.form))
        chain = _compound_chain(sentence, tok, stop)
        base_tokens = chain + [tok]
        base_lemmas = tuple(t.lemma.lower() for t in base_tokens)
        if chain:
            out.append(
                TermCandidate(
                    lemmas=base_lemmas,
                    kind="compound",
                    surface=" ".join(t.form for t in base_tokens),
                )
            )
        adjs = _amod_run(sentence, tok, base_tokens[0].id, stop)
        if adjs:
            out.append(
                TermCandidate(
                    lemmas=tuple(t.lemma.lower() for t in adjs) + base_lemmas,
                    kind="adj_noun",
                    surface=" ".join(t.form for t in adjs + base_tokens),
                )
            )
    return out


def propn_lemmas(sentence: Sentence) -> list[str]:
    """Proper-noun lemmas, tracked separately (not term candidates)."""
    return [t.lemma.lower() for t in sentence.tokens if t.upos == "PROPN" and not _is_math(t)]


@dataclass
class FrequencyTable:
    """Candidate counts keyed by (lemmas, kind), with deterministic iteration
    order: descending count, then lexicographic term, then kind."""

    counts: Counter = field(default_factory=Counter)
    surfaces: dict = field(default_factory=dict)
    propn: Counter = field(default_factory=Counter)
    total_sentences: int = 0

    def add(self, cand: TermCandidate) -> None:
        key = (cand.lemmas, cand.kind)
        self.counts[key] += 1
        prev = self.surfaces.get(key)
        # Lexicographic min keeps the representative surface independent of
        # document order.
        if prev is None or cand.surface < prev:
            self.surfaces[key] = cand.surface

    def rows(self) -> list[tuple[tuple[str, ...], str, int]]:
        ordered = sorted(
            self.counts.items(),
            key=lambda kv: (-kv[1], " ".join(kv[0][0]), kv[0][1]),
        )
        return [(lemmas, kind, count) for (lemmas, kind), count in ordered]

    def to_tsv(self) -> str:
        lines = [f"{' '.join(lemmas)}\t{kind}\t{count}" for lemmas, kind, count in self.rows()]
        return "\n".join(lines) + "\n" if lines else ""


def accumulate(docs: list[Document], stop_lemmas: frozenset[str] | None = None) -> FrequencyTable:
    """Count every candidate occurrence across all sentences of all documents."""
    stop = load_stop_lemmas() if stop_lemmas is None else stop_lemmas
    table = FrequencyTable()
    for doc in docs:
        for sent in doc.sentences:
            try:
                for cand in candidates(sent, stop):
                    table.add(cand)
            except MissingAnnotation as exc:
                raise MissingAnnotation(
                    f"document {doc.doc_id!r}, sentence {sent.sent_id!r}: {exc}"
                ) from None
            for lemma in propn_lemmas(sent):
                table.propn[lemma] += 1
            table.total_sentences += 1
    return table


def select_terms(table: FrequencyTable, min_count: int = 2, max_terms: int = 500) -> list[TermCandidate]:
    """Entries with count >= min_count, ordered by descending count then
    lexicographic term, truncated to max_terms."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    picked = []
    for lemmas, kind, count in table.rows():
        if count < min_count:
            continue
        picked.append(TermCandidate(lemmas=lemmas, kind=kind, surface=table.surfaces[(lemmas, kind)]))
        if len(picked) >= max_terms:
            break
    return picked[:max_terms]
