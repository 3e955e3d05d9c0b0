from collections import Counter

from ompadvisor.corpus import deduplicate, parse_directive
from ompadvisor.representation import represent
from ompadvisor.synthetic import SynthConfig, generate_corpus


def test_size_balance_and_unique():
    recs = generate_corpus(SynthConfig(n=300, seed=1))
    assert len(recs) == 300
    assert Counter(r.label for r in recs) == {0: 150, 1: 150}
    assert len(deduplicate(recs)) == 300


def test_deterministic():
    a = generate_corpus(SynthConfig(n=100, seed=4))
    b = generate_corpus(SynthConfig(n=100, seed=4))
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    assert [r.id for r in a] != [r.id for r in generate_corpus(SynthConfig(n=100, seed=5))]


def test_positives_carry_parallel_for():
    for r in generate_corpus(SynthConfig(n=60)):
        if r.label:
            assert parse_directive(r.pragma_raw).is_parallel_for


def test_io_marks_only_negatives():
    io = {"printf", "fprintf", "scanf"}
    for r in generate_corpus(SynthConfig(n=400, seed=2)):
        if io & set(represent(r, "text")):
            assert r.label == 0


def test_ambiguous_pairs_share_bags():
    recs = generate_corpus(SynthConfig(n=200, ambiguous_rate=1.0, io_rate=0.0, seed=3))
    pos_bags = {frozenset(Counter(represent(r, "r_text")).items()) for r in recs if r.label}
    neg_bags = {frozenset(Counter(represent(r, "r_text")).items()) for r in recs if not r.label}
    assert pos_bags & neg_bags


def test_naming_signal_only_in_positives():
    signal = {"vec", "arr", "A", "B", "C", "result"}
    recs = generate_corpus(SynthConfig(n=200, naming_signal=1.0, seed=6))
    hits = Counter(r.label for r in recs if signal & set(represent(r, "text")))
    assert hits[0] == 0 and hits[1] == 100
    for r in recs:
        assert not signal & set(represent(r, "r_text"))
