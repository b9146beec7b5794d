import itertools
import math
import random

import pytest

from curriculearn.criteria import tokenize
from curriculearn.metrics import chrf_pp, corpus_bleu, ngram_counts, rouge_n

from oracles import bleu_oracle, chrf_oracle, rouge_oracle


def random_tokens(rng, max_len=8, alphabet=("a", "b", "c", "dd", "ee")):
    return [rng.choice(alphabet) for _ in range(rng.randint(0, max_len))]


class TestRouge:
    def test_identity_is_one(self):
        report = rouge_n(["x", "y", "z"], ["x", "y", "z"], 1)
        assert report.f == 1.0

    def test_disjoint_is_zero(self):
        assert rouge_n(["a", "b"], ["x", "y"], 1).f == 0.0

    def test_hand_counted_case(self):
        report = rouge_n("the cat sat".split(), "the cat".split(), 1)
        assert report.precision == pytest.approx(2 / 3)
        assert report.recall == pytest.approx(1.0)
        assert report.f == pytest.approx(0.8)

    def test_both_empty_is_one(self):
        assert rouge_n([], [], 2).f == 1.0

    def test_one_empty_is_zero(self):
        assert rouge_n([], ["a"], 1).f == 0.0
        assert rouge_n(["a"], [], 1).f == 0.0

    def test_f1_symmetric_under_swap(self):
        rng = random.Random(2)
        for _ in range(100):
            cand, ref = random_tokens(rng), random_tokens(rng)
            for n in (1, 2):
                forward = rouge_n(cand, ref, n)
                backward = rouge_n(ref, cand, n)
                assert forward.f == pytest.approx(backward.f)
                assert forward.precision == pytest.approx(backward.recall)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            rouge_n(["a"], ["a"], 0)

    def test_matches_oracle_random(self):
        rng = random.Random(3)
        for _ in range(300):
            cand, ref = random_tokens(rng), random_tokens(rng)
            for n in (1, 2, 3):
                report = rouge_n(cand, ref, n)
                precision, recall, f1 = rouge_oracle(cand, ref, n)
                assert report.f == pytest.approx(f1, abs=1e-12)
                assert report.precision == pytest.approx(precision, abs=1e-12)
                assert report.recall == pytest.approx(recall, abs=1e-12)


class TestBleu:
    def test_identity_is_hundred(self):
        hyps = [["the", "cat", "sat", "down"], ["a", "b", "c", "d", "e"]]
        assert corpus_bleu(hyps, hyps).f == pytest.approx(100.0)

    def test_brevity_penalty_applied(self):
        # Perfect precisions, hypothesis 4 tokens vs reference 5.
        report = corpus_bleu([["a", "b", "c", "d"]], [["a", "b", "c", "d", "e"]])
        assert report.f == pytest.approx(100.0 * math.exp(1 - 5 / 4))
        assert report.details["brevity_penalty"] == pytest.approx(math.exp(1 - 5 / 4))

    def test_clipping_caps_repeated_tokens(self):
        short = corpus_bleu([["a", "a"]], [["a", "b"]])
        longer = corpus_bleu([["a", "a", "a", "a"]], [["a", "b"]])
        # Extra copies of "a" never raise the clipped match count.
        assert longer.details["precisions"][0] <= short.details["precisions"][0]

    def test_epsilon_floors_zero_matches(self):
        report = corpus_bleu([["q", "w"]], [["x", "y"]], epsilon=0.1)
        assert report.details["precisions"][0] == pytest.approx(0.1 / 2)
        assert report.f > 0.0
        assert corpus_bleu([["q", "w"]], [["x", "y"]], epsilon=0.0).f == 0.0

    def test_errors(self):
        with pytest.raises(ValueError, match="mismatch"):
            corpus_bleu([["a"]], [])
        with pytest.raises(ValueError, match="empty"):
            corpus_bleu([], [])

    def test_matches_oracle_on_toy_corpora(self):
        rng = random.Random(5)
        for _ in range(200):
            size = rng.randint(1, 4)
            hyps = [random_tokens(rng) for _ in range(size)]
            refs = [random_tokens(rng) for _ in range(size)]
            assert corpus_bleu(hyps, refs).f == pytest.approx(
                bleu_oracle(hyps, refs), abs=1e-9
            )

    def test_score_bounded(self):
        rng = random.Random(6)
        for _ in range(100):
            hyps = [random_tokens(rng) or ["a"]]
            refs = [random_tokens(rng) or ["b"]]
            assert 0.0 <= corpus_bleu(hyps, refs).f <= 100.0


class TestChrf:
    def test_identity_is_hundred(self):
        assert chrf_pp(["hello there world"], ["hello there world"]).f == pytest.approx(100.0)

    def test_disjoint_is_zero(self):
        assert chrf_pp(["aaa bbb"], ["zzz qqq"]).f == 0.0

    def test_whitespace_removed_for_char_ngrams(self):
        # Same characters, different spacing: char orders match fully, so only
        # the word-order slots can disagree.
        report = chrf_pp(["ab cd"], ["abcd"])
        assert report.f > 50.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            chrf_pp(["a"], [])

    def test_matches_oracle_random(self):
        rng = random.Random(7)
        for _ in range(200):
            hyps = [" ".join(random_tokens(rng))]
            refs = [" ".join(random_tokens(rng))]
            assert chrf_pp(hyps, refs).f == pytest.approx(
                chrf_oracle(hyps, refs, tokenize), abs=1e-9
            )

    def test_corpus_level_aggregation_matches_oracle(self):
        rng = random.Random(8)
        for _ in range(50):
            size = rng.randint(2, 4)
            hyps = [" ".join(random_tokens(rng)) for _ in range(size)]
            refs = [" ".join(random_tokens(rng)) for _ in range(size)]
            assert chrf_pp(hyps, refs).f == pytest.approx(
                chrf_oracle(hyps, refs, tokenize), abs=1e-9
            )

    def test_score_bounded(self):
        rng = random.Random(9)
        for _ in range(100):
            hyp = " ".join(random_tokens(rng))
            ref = " ".join(random_tokens(rng))
            assert 0.0 <= chrf_pp([hyp], [ref]).f <= 100.0


class TestExhaustiveSmall:
    def test_all_metrics_match_oracles_on_short_pairs(self):
        # Exhaustive over both sides of length <= 3 on a 3-symbol alphabet;
        # the acceptance suite runs the bigger sweep.
        seqs = [
            list(seq)
            for length in range(0, 4)
            for seq in itertools.product("abc", repeat=length)
        ]
        for cand in seqs:
            for ref in seqs:
                for n in (1, 2):
                    assert rouge_n(cand, ref, n).f == pytest.approx(
                        rouge_oracle(cand, ref, n)[2], abs=1e-9
                    )
                assert corpus_bleu([cand], [ref]).f == pytest.approx(
                    bleu_oracle([cand], [ref]), abs=1e-9
                )
                hyp_text, ref_text = " ".join(cand), " ".join(ref)
                assert chrf_pp([hyp_text], [ref_text]).f == pytest.approx(
                    chrf_oracle([hyp_text], [ref_text], tokenize), abs=1e-9
                )


def test_ngram_counts_window():
    counts = ngram_counts(["a", "b", "a", "b"], 2)
    assert counts[("a", "b")] == 2
    assert counts[("b", "a")] == 1
    assert sum(counts.values()) == 3
