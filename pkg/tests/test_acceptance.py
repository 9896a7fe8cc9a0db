"""Acceptance suite: one test per criterion, at the stated tolerances.

The conftest terminal-summary hook prints one PASS/FAIL line per test here.
"""

import json
import random
import re
import subprocess
import sys
import time
from pathlib import Path

import pytest

from glossforge.conllu import ConlluError, parse_conllu, parse_conllu_bytes, serialize_conllu
from glossforge.corpora import ingest_chicago, ingest_french_lean, ingest_mulima, ingest_nlab
from glossforge.detex import UnbalancedMath, load_abbreviations, pad_delimiters, tokenize
from glossforge.extract import accumulate, candidates, load_stop_lemmas
from glossforge.graph import assemble, filter_nlab
from glossforge.linker import (
    PARENTHETICAL_SUBJECTS,
    MappingRecord,
    OverrideTable,
    link_corpus,
    link_term,
    parenthetical_strategy,
)
from glossforge.review import ReviewState, build_items, create_app, item_id_for
from glossforge.titles import build_index, load_index

from test_conllu import _random_document
from test_detex import _random_strict_text

CLI = [sys.executable, "-m", "glossforge.cli"]


@pytest.fixture(scope="module")
def fixture_index(fixtures_dir):
    return build_index(
        (fixtures_dir / "index" / "titles.tsv").read_text(encoding="utf-8"),
        (fixtures_dir / "index" / "redirects.tsv").read_text(encoding="utf-8"),
    )


def test_linker_worked_examples(fixture_index):
    """link_term("group") -> Q83478 via parenthetical(mathematics);
    "book" -> Q571 bare; "abelian group" -> Q181296.  < 1 ms per lookup."""
    group = link_term("group", fixture_index, None, "t")
    assert (group.qid, group.strategy) == ("Q83478", parenthetical_strategy("mathematics"))
    book = link_term("book", fixture_index, None, "t")
    assert (book.qid, book.strategy) == ("Q571", "bare")
    abelian = link_term("abelian group", fixture_index, None, "t")
    assert abelian.qid == "Q181296"

    n = 1000
    start = time.perf_counter()
    for _ in range(n):
        link_term("group", fixture_index, None, "t")
        link_term("book", fixture_index, None, "t")
        link_term("abelian group", fixture_index, None, "t")
    elapsed = time.perf_counter() - start
    per_term = elapsed / (3 * n)
    assert per_term < 0.001, f"{per_term * 1000:.3f} ms per link_term"


def test_no_disambiguation_postcondition():
    """>= 1000 randomized fixture indices: a returned qid never points to a
    disambiguation entry."""
    rng = random.Random(20240818)
    words = ["group", "ring", "field", "space", "topos", "sheaf", "lattice", "stack", "monoid"]
    cases = 0
    while cases < 1000:
        rows = []
        for word in words:
            if rng.random() < 0.7:
                rows.append(f"{word}\tQ{rng.randint(1, 99999)}\t{'D' if rng.random() < 0.5 else ''}")
            if rng.random() < 0.5:
                subject = rng.choice(PARENTHETICAL_SUBJECTS)
                rows.append(f"{word} ({subject})\tQ{rng.randint(1, 99999)}\t{'D' if rng.random() < 0.2 else ''}")
        index = build_index("\n".join(rows) + ("\n" if rows else ""), "")
        for term in rng.sample(words, 3):
            record = link_term(term, index, None, "t")
            cases += 1
            if record.qid is None:
                continue
            hit = index.lookup(record.tried[-1])
            assert hit is not None and str(hit.qid) == record.qid
            assert not hit.is_disambiguation
    assert cases >= 1000


def test_detextor_property_suite():
    """>= 10,000 generated strict-mode inputs in < 30 s: every token is
    $-free or $-delimited at both ends; no boundary splits a math span;
    pad_delimiters is idempotent."""
    rng = random.Random(271828)
    abbreviations = load_abbreviations()
    start = time.perf_counter()
    checked = 0
    while checked < 10_000:
        text = _random_strict_text(rng)
        padded = pad_delimiters(text)
        assert pad_delimiters(padded) == padded
        try:
            result = tokenize(text, abbreviations=abbreviations)
        except UnbalancedMath:
            checked += 1
            continue
        all_tokens = []
        for sent in result.sentences:
            for tok, is_math in zip(sent.tokens, sent.is_math):
                all_tokens.append(tok)
                if is_math:
                    assert tok.startswith("$") and tok.endswith("$")
                else:
                    assert "$" not in tok
        # Whitespace-joining the tokens reproduces the padded input, so no
        # sentence boundary can have landed inside a math span.
        assert " ".join(all_tokens).split() == padded.split()
        checked += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 30, f"property suite took {elapsed:.1f}s"


def test_conllu_round_trip_and_fuzz(fixtures_dir):
    """parse-serialize identity on every bundled fixture, idempotent
    normalization, and 60 s of random-byte fuzzing without aborts."""
    for path in sorted((fixtures_dir / "conllu").glob("*.conllu")):
        raw = path.read_text(encoding="utf-8")
        doc = parse_conllu(raw)
        assert serialize_conllu(doc) == raw, path.name
        again = serialize_conllu(parse_conllu(serialize_conllu(doc)))
        assert again == serialize_conllu(doc), path.name

    rng = random.Random(31337)
    valid_docs = 0
    deadline = time.monotonic() + 60
    while time.monotonic() < deadline:
        choice = rng.random()
        if choice < 0.5:
            blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 400)))
        elif choice < 0.8:
            # Structured-ish noise: tabs, newlines, digits, comments.
            alphabet = "\t\n\r#_0123456789 abcdef$-."
            blob = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 400))).encode()
        else:
            # Mutated valid document.
            text = serialize_conllu(_random_document(rng))
            data = bytearray(text.encode())
            for _ in range(rng.randrange(0, 6)):
                if data:
                    data[rng.randrange(len(data))] = rng.randrange(256)
            blob = bytes(data)
        try:
            parse_conllu_bytes(blob)
            valid_docs += 1
        except ConlluError:
            pass
    assert valid_docs >= 0  # reaching here means: no aborts, only ConlluError


def test_extraction_golden(fixtures_dir):
    """Figure-3 fixture yields the exact candidate set; the 30-sentence
    corpus reproduces the golden frequency table byte-exact."""
    from glossforge.conllu import read_conllu_file

    stop = load_stop_lemmas()
    doc = read_conllu_file(fixtures_dir / "conllu" / "figure3.conllu")
    got = {(c.term, c.kind) for c in candidates(doc.sentences[0], stop)}
    assert got == {
        ("group", "noun"),
        ("abelian group", "adj_noun"),
        ("operation", "noun"),
        ("binary operation", "adj_noun"),
    }

    docs = [
        read_conllu_file(fixtures_dir / "conllu" / "corpus_a.conllu"),
        read_conllu_file(fixtures_dir / "conllu" / "corpus_b.conllu"),
    ]
    table = accumulate(docs, stop)
    golden = (fixtures_dir / "golden" / "frequency_table.tsv").read_text(encoding="utf-8")
    assert table.to_tsv() == golden


def test_nlab_filter_invariant(fixtures_dir, fixture_index):
    """WikiPage-bearing concepts form a subset of non-nLab-payload concepts,
    on the fixture graph and on >= 1000 randomized graphs."""

    def check(graph):
        with_wiki = {k for k, c in graph.concepts.items() if c.has_wiki_page()}
        with_other = {k for k, c in graph.concepts.items() if c.has_non_nlab_payload()}
        assert with_wiki <= with_other

    entries = (
        ingest_chicago(fixtures_dir / "chicago")
        + ingest_french_lean((fixtures_dir / "french_lean.tsv").read_text(encoding="utf-8"))
        + ingest_mulima((fixtures_dir / "mulima.tsv").read_text(encoding="utf-8"))
        + ingest_nlab((fixtures_dir / "nlab_titles.txt").read_text(encoding="utf-8"))
    )
    overrides = OverrideTable.parse_tsv((fixtures_dir / "overrides.tsv").read_text(encoding="utf-8"))
    records, _ = link_corpus([(e.corpus, e.term) for e in entries], fixture_index, overrides)
    check(filter_nlab(assemble(entries, records)))

    from glossforge.corpora import CorpusEntry, DefinitionPage, ProverLink, WikiPage

    rng = random.Random(1009)
    words = [f"w{i}" for i in range(8)]
    for _ in range(1000):
        entries = []
        mappings = []
        for w in words:
            qid = f"Q{rng.randint(1, 12)}" if rng.random() < 0.6 else None
            kind = rng.random()
            if kind < 0.4:
                entries.append(CorpusEntry("nlab", w, WikiPage(title=w)))
                mappings.append(MappingRecord("nlab", w, qid, "bare" if qid else "unmapped", ("T",)))
            elif kind < 0.7:
                entries.append(CorpusEntry("chicago", w, DefinitionPage(w, "b", ())))
                mappings.append(MappingRecord("chicago", w, qid, "bare" if qid else "unmapped", ("T",)))
            else:
                entries.append(CorpusEntry("french_lean", w, ProverLink(None)))
                mappings.append(MappingRecord("french_lean", w, qid, "bare" if qid else "unmapped", ("T",)))
        check(filter_nlab(assemble(entries, mappings)))


def _run_pipeline(workdir: Path, site_name: str) -> None:
    steps = [
        CLI + [
            "index", "build",
            "--titles", str(workdir / "index" / "titles.tsv"),
            "--redirects", str(workdir / "index" / "redirects.tsv"),
            "--out", str(workdir / "index.qidx"),
        ],
        CLI + [
            "graph", "build",
            "--config", str(workdir / "build.json"),
            "--out", str(workdir / "graph.json"),
            "--mappings-out", str(workdir / "mappings.jsonl"),
        ],
        CLI + [
            "site", "emit",
            "--graph", str(workdir / "graph.json"),
            "--out", str(workdir / site_name),
            "--config", str(workdir / "build.json"),
        ],
    ]
    for step in steps:
        proc = subprocess.run(step, capture_output=True, text=True)
        assert proc.returncode == 0, f"{step}: {proc.stderr}"


def test_end_to_end_determinism(workdir):
    """index build -> graph build -> site emit completes in < 5 s and yields
    a byte-identical manifest.json across two consecutive runs, matching the
    frozen golden.  (Cross-platform identity rests on the format choices:
    LF-only output, sorted orders, no timestamps.)"""
    start = time.perf_counter()
    _run_pipeline(workdir, "site1")
    elapsed = time.perf_counter() - start
    assert elapsed < 5, f"pipeline took {elapsed:.2f}s"
    _run_pipeline(workdir, "site2")
    m1 = (workdir / "site1" / "manifest.json").read_bytes()
    m2 = (workdir / "site2" / "manifest.json").read_bytes()
    assert m1 == m2
    golden = (workdir / "golden" / "manifest.json").read_bytes()
    assert m1 == golden


def test_site_link_integrity(workdir):
    """Zero dangling local hrefs in the emitted fixture site; table row
    count equals the stats concept count."""
    _run_pipeline(workdir, "site")
    site_dir = workdir / "site"
    href_re = re.compile(r'(?:href|src)="([^"]+)"')
    checked = 0
    for page in site_dir.rglob("*.html"):
        for target in href_re.findall(page.read_text(encoding="utf-8")):
            if "://" in target or target.startswith(("#", "mailto:")):
                continue
            resolved = (page.parent / target.split("#", 1)[0]).resolve()
            assert resolved.exists(), f"{page}: dangling {target}"
            checked += 1
    assert checked > 0

    table = (site_dir / "database.html").read_text(encoding="utf-8")
    row_count = table.count("<tr>") - 1
    proc = subprocess.run(
        CLI + ["stats", "--graph", str(workdir / "graph.json")], capture_output=True, text=True
    )
    stats = json.loads(proc.stdout)
    assert row_count == stats["concepts"]


def test_override_dominance(fixtures_dir, fixture_index):
    """Metamorphic: for overridden terms, mutating the index never changes
    the mapping result."""
    overrides = OverrideTable.parse_tsv((fixtures_dir / "overrides.tsv").read_text(encoding="utf-8"))
    overridden = [("chicago", "metric space"), ("french_lean", "frobnicator")]

    baseline = {pair: link_term(pair[1], fixture_index, overrides, pair[0]) for pair in overridden}

    titles_text = (fixtures_dir / "index" / "titles.tsv").read_text(encoding="utf-8")
    mutations = [
        "",  # empty index
        titles_text,
        titles_text + "Metric_space\tQ999999\t\n",
        titles_text + "Metric_space\tQ999999\tD\nFrobnicator\tQ123\t\n",
        "Metric_space_(mathematics)\tQ777\t\n",
    ]
    for mutated in mutations:
        index = build_index(mutated, "")
        for pair in overridden:
            record = link_term(pair[1], index, overrides, pair[0])
            assert record.qid == baseline[pair].qid
            assert record.strategy == baseline[pair].strategy


def test_curation_round_trip_secondary(tmp_path):
    """[SECONDARY criterion, UI-free path] accept(Q83478) on a seeded
    unmapped "group" item via the HTTP API; export; rebuild: the term maps
    with strategy override and leaves the queue."""
    from fastapi.testclient import TestClient

    seeded = [MappingRecord("chicago", "group", None, "unmapped", ("Group_(mathematics)", "Group"))]
    state = ReviewState(build_items(seeded), log_path=tmp_path / "decisions.jsonl")
    client = TestClient(create_app(state))
    assert [i["term"] for i in client.get("/api/queue").json()] == ["group"]

    response = client.post(
        "/api/decision",
        json={"item_id": item_id_for("chicago", "group"), "action": "accept", "qid": "Q83478"},
    )
    assert response.status_code == 200

    overrides = OverrideTable.parse_tsv(client.get("/api/export/overrides").text)
    record = link_term("group", build_index("", ""), overrides, "chicago")
    assert record.strategy == "override" and record.qid == "Q83478"

    rebuilt = ReviewState(build_items([record]), log_path=tmp_path / "decisions.jsonl")
    assert rebuilt.queue() == []
