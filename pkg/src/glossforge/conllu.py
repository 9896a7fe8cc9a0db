"""Data model, parser, and serializer for the CoNLL-U interchange format.

Token lines are the usual 10 tab-separated columns; comment lines carry
``sent_id``, ``text`` and ``length`` metadata in ``# key = value`` form.
Only plain integer token ids are supported: multiword range lines ("1-2")
and empty nodes ("1.1") are rejected, since nothing in this pipeline emits
them and supporting them would complicate the head-index invariants.

All types are immutable after construction and safe to share across
threads; parsing distinct documents may proceed fully in parallel.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import GlossforgeError

ABSENT = "_"

KNOWN_COMMENT_KEYS = ("sent_id", "text", "length")

_COMMENT_RE = re.compile(r"^#\s*([^=]+?)\s*=\s*(.*?)\s*$")
_PLAIN_ID_RE = re.compile(r"^[0-9]+$")
_RANGE_ID_RE = re.compile(r"^[0-9]+-[0-9]+$")
_EMPTY_ID_RE = re.compile(r"^[0-9]+\.[0-9]+$")


class ConlluError(GlossforgeError):
    """Base class for CoNLL-U parse and serialization errors."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class MalformedLine(ConlluError):
    """Token line with the wrong column count or an unparseable field."""


class BadHead(ConlluError):
    """HEAD out of range, self-referential, or more than one root."""


class NonConsecutiveIds(ConlluError):
    """Token ids within a sentence are not 1, 2, 3, ..."""


class RangeTokenUnsupported(ConlluError):
    """Multiword range ids ("1-2") and empty-node ids ("1.1") are out of scope."""


class DuplicateSentId(ConlluError):
    """Two sentences in one document share a sent_id."""


class InvariantViolation(ConlluError):
    """A Document handed to the serializer violates a structural invariant."""


@dataclass(frozen=True)
class Token:
    """One token line.  ``head`` is None when the HEAD column is "_"."""

    id: int
    form: str
    lemma: str = ABSENT
    upos: str = ABSENT
    xpos: str = ABSENT
    feats: str = ABSENT
    head: int | None = None
    deprel: str = ABSENT
    deps: str = ABSENT
    misc: str = ABSENT

    def misc_map(self) -> dict[str, str]:
        """MISC column as a key->value map (empty for "_")."""
        if self.misc == ABSENT:
            return {}
        out: dict[str, str] = {}
        for part in self.misc.split("|"):
            if "=" in part:
                k, v = part.split("=", 1)
                out[k] = v
        return out


@dataclass(frozen=True)
class Sentence:
    """A dependency-annotated sentence plus its comment metadata.

    ``extra_comments`` preserves unknown comment lines verbatim, in source
    order; the three known keys are re-emitted in fixed order on serialize.
    """

    sent_id: str
    text: str
    tokens: tuple[Token, ...]
    extra_comments: tuple[str, ...] = ()

    @property
    def length(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: tuple[Sentence, ...] = ()


def _parse_token_line(line: str, line_no: int) -> Token:
    cols = line.split("\t")
    if len(cols) != 10:
        raise MalformedLine(f"expected 10 tab-separated columns, got {len(cols)}", line_no)
    raw_id = cols[0]
    if _RANGE_ID_RE.match(raw_id) or _EMPTY_ID_RE.match(raw_id):
        raise RangeTokenUnsupported(f"unsupported token id {raw_id!r}", line_no)
    if not _PLAIN_ID_RE.match(raw_id):
        raise MalformedLine(f"bad token id {raw_id!r}", line_no)
    tok_id = int(raw_id)
    if tok_id < 1:
        raise MalformedLine(f"token id must be >= 1, got {tok_id}", line_no)
    raw_head = cols[6]
    if raw_head == ABSENT:
        head: int | None = None
    elif _PLAIN_ID_RE.match(raw_head):
        head = int(raw_head)
    else:
        raise MalformedLine(f"bad HEAD value {raw_head!r}", line_no)
    return Token(
        id=tok_id,
        form=cols[1],
        lemma=cols[2],
        upos=cols[3],
        xpos=cols[4],
        feats=cols[5],
        head=head,
        deprel=cols[7],
        deps=cols[8],
        misc=cols[9],
    )


def _check_sentence(tokens: list[Token], first_line: int) -> None:
    for pos, tok in enumerate(tokens, start=1):
        if tok.id != pos:
            raise NonConsecutiveIds(
                f"token ids must be consecutive from 1; position {pos} has id {tok.id}",
                first_line,
            )
    n = len(tokens)
    roots = 0
    for tok in tokens:
        if tok.head is None:
            continue
        if tok.head > n:
            raise BadHead(f"head {tok.head} of token {tok.id} exceeds sentence length {n}", first_line)
        if tok.head == tok.id:
            raise BadHead(f"token {tok.id} is its own head", first_line)
        if tok.head == 0:
            roots += 1
    if roots > 1:
        raise BadHead(f"sentence has {roots} root tokens (head = 0); at most one allowed", first_line)


def _finish_sentence(
    comments: list[tuple[str, str] | str],
    token_rows: list[tuple[str, int]],
    first_line: int,
) -> Sentence:
    if not token_rows:
        raise MalformedLine("sentence block has no token lines", first_line)
    sent_id = ""
    text = ""
    extras: list[str] = []
    for item in comments:
        if isinstance(item, str):
            extras.append(item)
        else:
            key, value = item
            if key == "sent_id":
                sent_id = value
            elif key == "text":
                text = value
            # "length" is informational; it is recomputed on serialize.
    tokens = [_parse_token_line(line, line_no) for line, line_no in token_rows]
    _check_sentence(tokens, first_line)
    return Sentence(sent_id=sent_id, text=text, tokens=tuple(tokens), extra_comments=tuple(extras))


def parse_conllu(text: str, doc_id: str = "") -> Document:
    """Parse CoNLL-U text into a Document.

    Accepts LF and CRLF line endings.  Raises a ConlluError subclass on any
    structural problem; never raises anything else on str input.
    """
    sentences: list[Sentence] = []
    seen_ids: set[str] = set()
    comments: list[tuple[str, str] | str] = []
    token_rows: list[tuple[str, int]] = []
    first_line = 1
    in_block = False

    def close_block() -> None:
        nonlocal in_block
        sent = _finish_sentence(comments, token_rows, first_line)
        if sent.sent_id in seen_ids:
            raise DuplicateSentId(f"duplicate sent_id {sent.sent_id!r}", first_line)
        seen_ids.add(sent.sent_id)
        sentences.append(sent)
        comments.clear()
        token_rows.clear()
        in_block = False

    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if line == "":
            if in_block:
                close_block()
            continue
        if not in_block:
            first_line = line_no
            in_block = True
        if line.startswith("#"):
            m = _COMMENT_RE.match(line)
            if m and m.group(1) in KNOWN_COMMENT_KEYS:
                comments.append((m.group(1), m.group(2)))
            else:
                comments.append(line)
        else:
            token_rows.append((line, line_no))
    if in_block:
        close_block()
    return Document(doc_id=doc_id, sentences=tuple(sentences))


def parse_conllu_bytes(data: bytes, doc_id: str = "") -> Document:
    """Parse raw bytes, mapping decode failures to MalformedLine."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedLine(f"input is not valid UTF-8: {exc}") from None
    return parse_conllu(text, doc_id=doc_id)


def _check_field(value: str, what: str, sent_id: str) -> str:
    if value == "":
        raise InvariantViolation(f"empty {what} in sentence {sent_id!r}")
    if "\t" in value or "\n" in value or "\r" in value:
        raise InvariantViolation(f"{what} contains tab or newline in sentence {sent_id!r}")
    return value


def serialize_conllu(doc: Document) -> str:
    """Serialize a Document to byte-deterministic CoNLL-U text.

    Comments are emitted in fixed order (sent_id, text, length, then any
    preserved unknown comments); every sentence is followed by exactly one
    blank line; line endings are LF.
    """
    seen_ids: set[str] = set()
    out: list[str] = []
    for sent in doc.sentences:
        if sent.sent_id in seen_ids:
            raise InvariantViolation(f"duplicate sent_id {sent.sent_id!r}")
        seen_ids.add(sent.sent_id)
        if not sent.tokens:
            raise InvariantViolation(f"sentence {sent.sent_id!r} has no tokens")
        try:
            _check_sentence(list(sent.tokens), 0)
        except ConlluError as exc:
            raise InvariantViolation(f"sentence {sent.sent_id!r}: {exc}") from None
        for meta in ("sent_id", "text"):
            value = getattr(sent, meta)
            if "\n" in value or "\r" in value:
                raise InvariantViolation(f"{meta} contains a newline in sentence {sent.sent_id!r}")
        out.append(f"# sent_id = {sent.sent_id}")
        out.append(f"# text = {sent.text}")
        out.append(f"# length = {len(sent.tokens)}")
        for extra in sent.extra_comments:
            if "\n" in extra or "\r" in extra or not extra.startswith("#"):
                raise InvariantViolation(f"bad preserved comment in sentence {sent.sent_id!r}")
            out.append(extra)
        for tok in sent.tokens:
            cols = (
                str(tok.id),
                _check_field(tok.form, "FORM", sent.sent_id),
                _check_field(tok.lemma, "LEMMA", sent.sent_id),
                _check_field(tok.upos, "UPOS", sent.sent_id),
                _check_field(tok.xpos, "XPOS", sent.sent_id),
                _check_field(tok.feats, "FEATS", sent.sent_id),
                ABSENT if tok.head is None else str(tok.head),
                _check_field(tok.deprel, "DEPREL", sent.sent_id),
                _check_field(tok.deps, "DEPS", sent.sent_id),
                _check_field(tok.misc, "MISC", sent.sent_id),
            )
            out.append("\t".join(cols))
        out.append("")
    if not out:
        return ""
    return "\n".join(out) + "\n"


def read_conllu_file(path, doc_id: str | None = None) -> Document:
    """Read and parse one .conllu file; doc_id defaults to the file stem."""
    from pathlib import Path

    p = Path(path)
    return parse_conllu_bytes(p.read_bytes(), doc_id=doc_id if doc_id is not None else p.stem)


def write_conllu_file(path, doc: Document) -> None:
    from pathlib import Path

    Path(path).write_text(serialize_conllu(doc), encoding="utf-8", newline="\n")
