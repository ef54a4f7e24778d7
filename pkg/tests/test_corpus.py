from __future__ import annotations

from collections import Counter

from threewise.audit import h_param
from threewise.corpus import (
    CORPUS_SEED,
    CORPUS_SIZE,
    build_corpus,
    check_entry,
    corpus_from_jsonl,
    corpus_to_jsonl,
    load_corpus,
)
from threewise.families import is_r_wise_t_intersecting


def test_shipped_corpus_shape():
    entries = load_corpus()
    assert len(entries) == CORPUS_SIZE
    assert all(fam.n <= 10 for _, fam in entries)
    keys = {(t, fam.n, fam.table.tobytes()) for t, fam in entries}
    assert len(keys) == CORPUS_SIZE
    hs = Counter(h_param(fam, t).h for t, fam in entries)
    assert hs[1] > 0 and hs[2] > 0


def test_shipped_corpus_entries_are_valid():
    for t, fam in load_corpus():
        assert check_entry(t, fam)
        assert is_r_wise_t_intersecting(fam, 3, t)


def test_generator_reproduces_shipped_prefix():
    fresh = build_corpus(count=3, seed=CORPUS_SEED)
    shipped = load_corpus()[:3]
    assert [(t, f) for t, f in fresh] == [(t, f) for t, f in shipped]


def test_jsonl_round_trip():
    entries = load_corpus()[:10]
    assert corpus_from_jsonl(corpus_to_jsonl(entries)) == entries
