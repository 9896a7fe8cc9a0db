"""LaTeX-aware sentencization and tokenization of mathematical English.

The central rule: everything between two dollar signs is one token, so a
formula like ``$ x = y $`` survives as a single unit instead of being
shredded into punctuation.  Inputs are expected to have dollar signs and
hyphens padded with spaces (``pad_delimiters`` does this and is idempotent).
Output is a CoNLL-U skeleton: FORM filled in, every annotation column "_",
math tokens tagged ``MathSpan=Yes`` in MISC.

No LaTeX macro expansion or environment parsing happens here; ``\\[ \\]`` and
``\\( \\)`` delimiters are left as literal text and flagged in the warnings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .conllu import ABSENT, Document, Sentence, Token
from .errors import GlossforgeError

TERMINATORS = (".", "!", "?")


class UnbalancedMath(GlossforgeError):
    """Strict mode rejected input whose math delimiters cannot be matched."""


def load_abbreviations() -> frozenset[str]:
    """Sentence-boundary abbreviation list shipped with the package."""
    text = resources.files("glossforge").joinpath("data/abbreviations.txt").read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip() and not line.startswith("#"))


def _is_word(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def pad_delimiters(text: str) -> str:
    """Surround every ``$`` (and ``$$`` pair) and every hyphen between word
    characters with single spaces, unless already whitespace-adjacent.
    Idempotent."""
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "$":
            unit = "$$" if i + 1 < n and text[i + 1] == "$" else "$"
            if out and not out[-1].isspace():
                out.append(" ")
            out.append(unit)
            j = i + len(unit)
            if j < n and not text[j].isspace():
                out.append(" ")
            i = j
            continue
        if ch == "-" and 0 < i < n - 1 and _is_word(text[i - 1]) and _is_word(text[i + 1]):
            if out and not out[-1].isspace():
                out.append(" ")
            out.append("-")
            out.append(" ")
            i += 1
            continue
        out.append(ch)
        i += 1
    return "".join(out)


@dataclass(frozen=True)
class SentenceTokens:
    """One sentence: its detokenized text and the token/math-flag pairs."""

    tokens: tuple[str, ...]
    is_math: tuple[bool, ...]

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass
class TokenizeResult:
    sentences: list[SentenceTokens]
    warnings: list[str] = field(default_factory=list)


def _group_math_spans(units: list[str], strict: bool, warnings: list[str]) -> list[tuple[str, bool]]:
    """Collapse delimiter-bounded runs of whitespace-split units into single
    math tokens.  A span opened by ``$`` closes at the next ``$`` unit; a span
    opened by ``$$`` closes at the next ``$$`` unit."""
    grouped: list[tuple[str, bool]] = []
    i = 0
    while i < len(units):
        unit = units[i]
        if unit in ("$", "$$"):
            closer = unit
            j = i + 1
            while j < len(units) and units[j] != closer:
                j += 1
            if j < len(units):
                grouped.append((" ".join(units[i : j + 1]), True))
                i = j + 1
                continue
            # Unclosed span.
            if strict:
                raise UnbalancedMath(f"unmatched {closer!r} delimiter")
            warnings.append(f"unmatched {closer!r} treated as a literal token")
            grouped.append((unit, False))
            i += 1
            continue
        grouped.append((unit, False))
        i += 1
    return grouped


def tokenize(text: str, mode: str = "strict", abbreviations: frozenset[str] | None = None) -> TokenizeResult:
    """Split padded text into sentences of tokens.

    Tokens are whitespace-split units except that each math span is one
    token.  A sentence boundary is placed after a non-math token ending in
    ``.`` ``!`` or ``?`` when the token is not a known abbreviation and the
    next unit starts with an uppercase letter, a digit, or ``$``.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"mode must be 'strict' or 'lenient', got {mode!r}")
    if abbreviations is None:
        abbreviations = load_abbreviations()
    warnings: list[str] = []
    for delim in ("\\[", "\\]", "\\(", "\\)"):
        if delim in text:
            warnings.append(f"LaTeX delimiter {delim!r} is not interpreted; left as literal text")
    if mode == "strict" and text.count("$") % 2 != 0:
        raise UnbalancedMath("odd number of '$' characters in strict mode")

    units = pad_delimiters(text).split()
    grouped = _group_math_spans(units, mode == "strict", warnings)

    sentences: list[SentenceTokens] = []
    current: list[tuple[str, bool]] = []

    def flush() -> None:
        if current:
            sentences.append(
                SentenceTokens(
                    tokens=tuple(tok for tok, _ in current),
                    is_math=tuple(m for _, m in current),
                )
            )
            current.clear()

    for idx, (tok, is_math) in enumerate(grouped):
        current.append((tok, is_math))
        if is_math or not tok.endswith(TERMINATORS):
            continue
        if tok.lower() in abbreviations:
            continue
        if idx + 1 == len(grouped):
            flush()
        else:
            nxt = grouped[idx + 1][0]
            if nxt[0].isupper() or nxt[0].isdigit() or nxt[0] == "$":
                flush()
    flush()
    return TokenizeResult(sentences=sentences, warnings=warnings)


def emit_skeleton(doc_id: str, result: TokenizeResult) -> Document:
    """Build a CoNLL-U skeleton Document from tokenize output.

    sent_ids are ``<doc_id>-<n>`` with n counting from 1; the text comment is
    the detokenized sentence and math tokens carry ``MathSpan=Yes`` in MISC.
    """
    sentences = []
    for n, sent in enumerate(result.sentences, start=1):
        tokens = tuple(
            Token(
                id=i,
                form=form,
                misc="MathSpan=Yes" if is_math else ABSENT,
            )
            for i, (form, is_math) in enumerate(zip(sent.tokens, sent.is_math), start=1)
        )
        sentences.append(Sentence(sent_id=f"{doc_id}-{n}", text=sent.text, tokens=tokens))
    return Document(doc_id=doc_id, sentences=tuple(sentences))
