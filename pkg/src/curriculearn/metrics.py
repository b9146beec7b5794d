"""Self-contained ROUGE-N, corpus BLEU, and chrF++ scorers.

These back both the round-trip-translation filter and the `eval` CLI. They
implement the documented formulas below exactly and are tested against
independent brute-force oracles; no numerical compatibility with any
third-party scorer is promised beyond that.

ROUGE-N: clipped n-gram overlap o between candidate and reference;
precision o/|cand n-grams|, recall o/|ref n-grams|, F1 their harmonic mean.
If either side has no n-grams the corresponding components are 0 and F1 is
0, except that two empty sides count as perfect agreement (F1 = 1).

Corpus BLEU: clipped precisions for orders 1..4 accumulated over the corpus,
geometric mean over orders that have any candidate n-grams, times brevity
penalty exp(1 - r/c) when c < r (else 1). Orders with zero matches use
``epsilon`` pseudo-matches so short corpora do not collapse to 0. Reported
on the 0-100 scale.

chrF++: character n-grams of order 1..6 (whitespace removed) plus word
n-grams of order 1..2 (shared pipeline tokenizer), per-order precision and
recall averaged uniformly over every order present on either side, combined
with F-beta, beta=2. Reported on the 0-100 scale.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .criteria import tokenize

BLEU_MAX_ORDER = 4
BLEU_EPSILON = 0.1
CHRF_CHAR_ORDER = 6
CHRF_WORD_ORDER = 2
CHRF_BETA = 2.0

_WHITESPACE = re.compile(r"\s+")


@dataclass(frozen=True)
class MetricReport:
    name: str
    f: float
    precision: float | None = None
    recall: float | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        report = {"name": self.name, "f": self.f}
        if self.precision is not None:
            report["precision"] = self.precision
        if self.recall is not None:
            report["recall"] = self.recall
        if self.details:
            report["details"] = dict(self.details)
        return report


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    """Multiset of order-n token n-grams."""
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def char_ngram_counts(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def clipped_overlap(candidate: Counter, reference: Counter) -> int:
    """Sum of per-n-gram matches, clipped at the reference count."""
    return sum(min(count, reference.get(gram, 0)) for gram, count in candidate.items())


def rouge_n(
    candidate: Sequence[str], reference: Sequence[str], n: int = 1
) -> MetricReport:
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    cand_counts = ngram_counts(candidate, n)
    ref_counts = ngram_counts(reference, n)
    cand_total = sum(cand_counts.values())
    ref_total = sum(ref_counts.values())
    if cand_total == 0 and ref_total == 0:
        return MetricReport(name=f"rouge{n}", f=1.0, precision=1.0, recall=1.0)
    overlap = clipped_overlap(cand_counts, ref_counts)
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricReport(
        name=f"rouge{n}",
        f=f1,
        precision=precision,
        recall=recall,
        details={"overlap": overlap, "candidate_ngrams": cand_total, "reference_ngrams": ref_total},
    )


def corpus_bleu(
    hypotheses: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
    epsilon: float = BLEU_EPSILON,
) -> MetricReport:
    if len(hypotheses) != len(references):
        raise ValueError(
            f"hypothesis/reference length mismatch: {len(hypotheses)} vs {len(references)}"
        )
    if not hypotheses:
        raise ValueError("empty corpus")

    correct = [0] * BLEU_MAX_ORDER
    total = [0] * BLEU_MAX_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for order in range(1, BLEU_MAX_ORDER + 1):
            hyp_counts = ngram_counts(hyp, order)
            if not hyp_counts:
                break
            correct[order - 1] += clipped_overlap(hyp_counts, ngram_counts(ref, order))
            total[order - 1] += sum(hyp_counts.values())

    precisions: list[float | None] = [None] * BLEU_MAX_ORDER
    log_sum = 0.0
    effective = 0
    degenerate = False
    for order in range(BLEU_MAX_ORDER):
        if total[order] == 0:
            continue
        matches = correct[order] if correct[order] > 0 else epsilon
        precisions[order] = matches / total[order]
        effective += 1
        if precisions[order] == 0.0:
            degenerate = True
        else:
            log_sum += math.log(precisions[order])

    if hyp_len == 0 or effective == 0 or degenerate:
        score = 0.0
        geo_mean = 0.0
        brevity = 0.0 if hyp_len == 0 else 1.0
    else:
        geo_mean = math.exp(log_sum / effective)
        brevity = math.exp(1 - ref_len / hyp_len) if hyp_len < ref_len else 1.0
        score = 100.0 * brevity * geo_mean
    return MetricReport(
        name="bleu",
        f=score,
        precision=geo_mean,
        details={
            "precisions": precisions,
            "brevity_penalty": brevity,
            "hyp_len": hyp_len,
            "ref_len": ref_len,
            "epsilon": epsilon,
        },
    )


def _chrf_order_stats(hyp: str, ref: str) -> list[tuple[int, int, int]]:
    """(match, hyp_total, ref_total) per order slot: chars 1..6 then words 1..2."""
    hyp_chars = _WHITESPACE.sub("", hyp)
    ref_chars = _WHITESPACE.sub("", ref)
    stats = []
    for order in range(1, CHRF_CHAR_ORDER + 1):
        hyp_counts = char_ngram_counts(hyp_chars, order)
        ref_counts = char_ngram_counts(ref_chars, order)
        stats.append(
            (
                clipped_overlap(hyp_counts, ref_counts),
                sum(hyp_counts.values()),
                sum(ref_counts.values()),
            )
        )
    hyp_words = tokenize(hyp)
    ref_words = tokenize(ref)
    for order in range(1, CHRF_WORD_ORDER + 1):
        hyp_counts = ngram_counts(hyp_words, order)
        ref_counts = ngram_counts(ref_words, order)
        stats.append(
            (
                clipped_overlap(hyp_counts, ref_counts),
                sum(hyp_counts.values()),
                sum(ref_counts.values()),
            )
        )
    return stats


def chrf_pp(hypotheses: Sequence[str], references: Sequence[str]) -> MetricReport:
    if len(hypotheses) != len(references):
        raise ValueError(
            f"hypothesis/reference length mismatch: {len(hypotheses)} vs {len(references)}"
        )
    slots = CHRF_CHAR_ORDER + CHRF_WORD_ORDER
    totals = [[0, 0, 0] for _ in range(slots)]
    for hyp, ref in zip(hypotheses, references):
        for index, stat in enumerate(_chrf_order_stats(hyp, ref)):
            totals[index][0] += stat[0]
            totals[index][1] += stat[1]
            totals[index][2] += stat[2]

    precision_sum = 0.0
    recall_sum = 0.0
    contributing = 0
    for match, hyp_total, ref_total in totals:
        if hyp_total == 0 and ref_total == 0:
            continue
        contributing += 1
        precision_sum += match / hyp_total if hyp_total else 0.0
        recall_sum += match / ref_total if ref_total else 0.0

    if contributing == 0:
        # Nothing on either side at any order: degenerate perfect agreement.
        return MetricReport(name="chrf++", f=100.0, precision=1.0, recall=1.0)
    precision = precision_sum / contributing
    recall = recall_sum / contributing
    beta_sq = CHRF_BETA**2
    if precision + recall == 0.0:
        f_beta = 0.0
    else:
        f_beta = (1 + beta_sq) * precision * recall / (beta_sq * precision + recall)
    return MetricReport(
        name="chrf++",
        f=100.0 * f_beta,
        precision=precision,
        recall=recall,
        details={"orders": contributing, "beta": CHRF_BETA},
    )
