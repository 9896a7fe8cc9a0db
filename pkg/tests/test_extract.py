import random

import pytest

from glossforge.conllu import Document, Sentence, Token, read_conllu_file
from glossforge.extract import (
    FrequencyTable,
    MissingAnnotation,
    TermCandidate,
    accumulate,
    candidates,
    load_stop_lemmas,
    select_terms,
)

STOP = load_stop_lemmas()


def _sent(rows, sent_id="t-1"):
    tokens = tuple(
        Token(id=i, form=form, lemma=lemma, upos=upos, head=head, deprel=deprel, misc=misc)
        for i, (form, lemma, upos, head, deprel, misc) in enumerate(rows, start=1)
    )
    return Sentence(sent_id=sent_id, text=" ".join(t.form for t in tokens), tokens=tokens)


def test_figure3_candidate_set(fixtures_dir):
    doc = read_conllu_file(fixtures_dir / "conllu" / "figure3.conllu")
    cands = candidates(doc.sentences[0], STOP)
    as_set = {(c.term, c.kind) for c in cands}
    assert as_set == {
        ("group", "noun"),
        ("abelian group", "adj_noun"),
        ("operation", "noun"),
        ("binary operation", "adj_noun"),
    }
    assert sum(1 for c in cands if c.term == "group" and c.kind == "noun") == 2


def test_compound_candidate():
    sent = _sent([
        ("the", "the", "DET", 3, "det", "_"),
        ("vector", "vector", "NOUN", 3, "compound", "_"),
        ("space", "space", "NOUN", 0, "root", "_"),
    ])
    terms = {(c.term, c.kind) for c in candidates(sent, STOP)}
    assert ("vector space", "compound") in terms


def test_no_candidates_without_nouns():
    sent = _sent([
        ("it", "it", "PRON", 2, "nsubj", "_"),
        ("works", "work", "VERB", 0, "root", "_"),
        (".", ".", "PUNCT", 2, "punct", "_"),
    ])
    assert candidates(sent, STOP) == []


def test_math_tokens_excluded():
    sent = _sent([
        ("$ G $", "$ G $", "NOUN", 2, "nsubj", "MathSpan=Yes"),
        ("acts", "act", "VERB", 0, "root", "_"),
    ])
    assert candidates(sent, STOP) == []
    assert all("$" not in c.term for c in candidates(sent, STOP))


def test_stop_lemma_blocks_noun_and_adj_noun():
    sent = _sent([
        ("an", "a", "DET", 3, "det", "_"),
        ("important", "important", "ADJ", 3, "amod", "_"),
        ("example", "example", "NOUN", 0, "root", "_"),
    ])
    assert candidates(sent, STOP) == []


def test_adjective_run_is_maximal_only():
    sent = _sent([
        ("finite", "finite", "ADJ", 3, "amod", "_"),
        ("abelian", "abelian", "ADJ", 3, "amod", "_"),
        ("group", "group", "NOUN", 0, "root", "_"),
    ])
    kinds = [(c.term, c.kind) for c in candidates(sent, STOP)]
    assert ("finite abelian group", "adj_noun") in kinds
    assert ("abelian group", "adj_noun") not in kinds


def test_non_contiguous_amod_ignored():
    sent = _sent([
        ("red", "red", "ADJ", 4, "amod", "_"),
        ("very", "very", "ADV", 4, "advmod", "_"),
        ("big", "big", "ADJ", 4, "amod", "_"),
        ("ball", "ball", "NOUN", 0, "root", "_"),
    ])
    terms = {(c.term, c.kind) for c in candidates(sent, STOP)}
    assert terms == {("ball", "noun"), ("big ball", "adj_noun")}


def test_missing_annotation_raises():
    sent = _sent([("group", "group", "_", 0, "root", "_")])
    with pytest.raises(MissingAnnotation):
        candidates(sent, STOP)
    sent = _sent([("group", "group", "NOUN", None, "_", "_")])
    with pytest.raises(MissingAnnotation):
        candidates(sent, STOP)


def test_punctuation_may_lack_head():
    sent = _sent([
        ("group", "group", "NOUN", 0, "root", "_"),
        (".", ".", "PUNCT", None, "_", "_"),
    ])
    assert [c.term for c in candidates(sent, STOP)] == ["group"]


def test_adj_noun_suffix_is_existing_candidate_property():
    rng = random.Random(11)
    upos_pool = ["NOUN", "ADJ", "VERB", "DET"]
    for _ in range(300):
        n = rng.randint(1, 7)
        rows = []
        root = rng.randint(1, n)
        for i in range(1, n + 1):
            upos = rng.choice(upos_pool)
            head = 0 if i == root else rng.choice([h for h in range(1, n + 1) if h != i])
            deprel = "root" if i == root else rng.choice(["amod", "compound", "det", "nsubj"])
            rows.append((f"w{i}", f"w{i}", upos, head, deprel, "_"))
        sent = _sent(rows)
        cands = candidates(sent, STOP)
        bases = {c.lemmas for c in cands if c.kind in ("noun", "compound")}
        for c in cands:
            if c.kind != "adj_noun":
                continue
            assert any(c.lemmas[-len(b):] == b for b in bases)


def test_accumulate_additive_across_documents(fixtures_dir):
    doc = read_conllu_file(fixtures_dir / "conllu" / "figure3.conllu")
    table = accumulate([doc, Document(doc_id="copy", sentences=doc.sentences)], STOP)
    assert table.counts[(("abelian", "group"), "adj_noun")] == 2
    assert table.total_sentences == 2


def test_accumulate_empty():
    table = accumulate([], STOP)
    assert table.counts == {} and table.total_sentences == 0


def test_accumulate_order_invariant(fixtures_dir):
    a = read_conllu_file(fixtures_dir / "conllu" / "corpus_a.conllu")
    b = read_conllu_file(fixtures_dir / "conllu" / "corpus_b.conllu")
    t1 = accumulate([a, b], STOP)
    t2 = accumulate([b, a], STOP)
    assert t1.counts == t2.counts
    assert t1.surfaces == t2.surfaces
    assert t1.to_tsv() == t2.to_tsv()


def test_golden_frequency_table(fixtures_dir):
    docs = [
        read_conllu_file(fixtures_dir / "conllu" / "corpus_a.conllu"),
        read_conllu_file(fixtures_dir / "conllu" / "corpus_b.conllu"),
    ]
    table = accumulate(docs, STOP)
    golden = (fixtures_dir / "golden" / "frequency_table.tsv").read_text(encoding="utf-8")
    assert table.to_tsv() == golden
    assert table.total_sentences == 30


def test_propn_logged_separately(fixtures_dir):
    docs = [
        read_conllu_file(fixtures_dir / "conllu" / "corpus_a.conllu"),
        read_conllu_file(fixtures_dir / "conllu" / "corpus_b.conllu"),
    ]
    table = accumulate(docs, STOP)
    assert table.propn["noether"] == 2
    assert table.propn["lean"] == 1
    assert (("noether",), "noun") not in table.counts


def test_select_terms_tie_break_and_cutoff():
    table = FrequencyTable()
    for term, count in (("b",), 3), (("a",), 3), (("c",), 1):
        for _ in range(count):
            table.add(TermCandidate(lemmas=term, kind="noun", surface=term[0]))
    picked = select_terms(table, min_count=2, max_terms=10)
    assert [c.term for c in picked] == ["a", "b"]
    assert select_terms(table, min_count=1, max_terms=0) == []


def test_select_terms_deterministic(fixtures_dir):
    docs = [read_conllu_file(fixtures_dir / "conllu" / "corpus_a.conllu")]
    t = accumulate(docs, STOP)
    first = [(c.term, c.kind) for c in select_terms(t, 1, 100)]
    second = [(c.term, c.kind) for c in select_terms(t, 1, 100)]
    assert first == second


def test_golden_selection(fixtures_dir):
    docs = [
        read_conllu_file(fixtures_dir / "conllu" / "corpus_a.conllu"),
        read_conllu_file(fixtures_dir / "conllu" / "corpus_b.conllu"),
    ]
    table = accumulate(docs, STOP)
    golden_rows = [
        line.split("\t")
        for line in (fixtures_dir / "golden" / "frequency_table.tsv").read_text(encoding="utf-8").splitlines()
    ]
    expected = [(term, kind) for term, kind, count in golden_rows if int(count) >= 2]
    got = [(c.term, c.kind) for c in select_terms(table, min_count=2, max_terms=500)]
    assert got == expected
