"""Per-sample ordering criteria: length, unigram rarity, and alignment.

Length and rarity are classic difficulty proxies computed from one side
of the pair (the reference text by default). Alignment is a quality score
in [0, 1]; it normally comes from an external annotator via
:func:`alignment_from_file`, with :func:`heuristic_alignment` as a crude
built-in stand-in so pipelines run end to end offline.

Rarity of a token sequence is the negative log-likelihood under a unigram
model: ``-sum(log p(w))`` with natural log. Any log base would only rescale
the ordering.
"""

from __future__ import annotations

import json
import math
import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .corpus import Sample, SampleSet

CRITERIA = ("length", "rarity", "alignment")
SIDES = ("text", "input")

_DIGIT_RUN = re.compile(r"\d+")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Split on Unicode whitespace, peeling edge punctuation into own tokens.

    ``"a, b."`` -> ``["a", ",", "b", "."]``. Interior punctuation (hyphens,
    apostrophes) stays attached. Empty text gives an empty list.
    """
    tokens: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        while chunk and _is_punct(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail: list[str] = []
        while chunk and _is_punct(chunk[-1]):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


class UnigramModel:
    """Token frequency model with optional add-one smoothing.

    With smoothing, one extra bucket is reserved for unseen tokens so every
    query has positive probability:

        p(w)      = (count(w) + 1) / (total + vocab_size + 1)
        p(unseen) = 1 / (total + vocab_size + 1)

    which sums to exactly 1 over (vocab + unseen bucket). Without smoothing,
    probabilities are raw relative frequencies and unseen tokens are an error.
    """

    def __init__(self, counts: dict[str, int], smoothing: bool = True):
        if not counts:
            raise ValueError("unigram model needs at least one token")
        self.counts = dict(counts)
        self.total = sum(self.counts.values())
        self.vocab_size = len(self.counts)
        self.smoothing = smoothing

    def prob(self, token: str) -> float:
        count = self.counts.get(token)
        if self.smoothing:
            denom = self.total + self.vocab_size + 1
            return ((count or 0) + 1) / denom if count is not None else 1.0 / denom
        if count is None:
            raise ValueError(f"token {token!r} unseen and smoothing is off")
        return count / self.total

    def logprob(self, token: str) -> float:
        return math.log(self.prob(token))

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", encoding="utf-8") as handle:
            header = {
                "total": self.total,
                "vocab_size": self.vocab_size,
                "smoothing": self.smoothing,
            }
            handle.write(json.dumps(header) + "\n")
            for token in sorted(self.counts):
                record = {"token": token, "count": self.counts[token]}
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "UnigramModel":
        path = Path(path)
        with path.open(encoding="utf-8") as handle:
            header = json.loads(handle.readline())
            counts = {}
            for line in handle:
                if not line.strip():
                    continue
                record = json.loads(line)
                counts[record["token"]] = int(record["count"])
        model = cls(counts, smoothing=bool(header.get("smoothing", True)))
        if model.total != header.get("total") or model.vocab_size != header.get(
            "vocab_size"
        ):
            raise ValueError(f"{path}: header totals disagree with token records")
        return model


def _side_text(sample: Sample, side: str) -> str:
    if side == "text":
        return sample.text
    if side == "input":
        return sample.input_text()
    raise ValueError(f"unknown side {side!r}")


def build_unigram(
    samples: Iterable[Sample], side: str = "text", smoothing: bool = True
) -> UnigramModel:
    """Aggregate token counts over one side of every sample."""
    counts: dict[str, int] = {}
    empty = True
    for sample in samples:
        empty = False
        for token in tokenize(_side_text(sample, side)):
            counts[token] = counts.get(token, 0) + 1
    if empty:
        raise ValueError("cannot build a unigram model from an empty corpus")
    return UnigramModel(counts, smoothing=smoothing)


def score_length(tokens: Sequence[str]) -> float:
    if not tokens:
        raise ValueError("unscoreable: empty token sequence")
    return float(len(tokens))


def score_rarity(tokens: Sequence[str], model: UnigramModel) -> float:
    if not tokens:
        raise ValueError("unscoreable: empty token sequence")
    return -sum(model.logprob(token) for token in tokens)


@dataclass(frozen=True)
class ScoredSample:
    """A sample id paired with one criterion value used for ordering."""

    id: str
    criterion: str
    value: float

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if not math.isfinite(self.value):
            raise ValueError(f"score for {self.id!r} is not finite")
        if self.criterion in ("length", "rarity") and self.value < 0:
            raise ValueError(f"{self.criterion} score for {self.id!r} is negative")
        if self.criterion == "alignment" and not 0.0 <= self.value <= 1.0:
            raise ValueError(
                f"alignment score for {self.id!r} outside [0, 1]: {self.value}"
            )


def _normalize_token(token: str) -> str:
    # Case-fold and canonicalize digit runs ("007" == "7") so surface-form
    # quirks do not break slot matching.
    return _DIGIT_RUN.sub(lambda m: str(int(m.group())), token.casefold())


def _normalize_tokens(text: str) -> list[str]:
    return [_normalize_token(token) for token in tokenize(text)]


def _contains_subsequence(haystack: list[str], needle: list[str]) -> bool:
    if not needle:
        return False
    n = len(needle)
    return any(haystack[i : i + n] == needle for i in range(len(haystack) - n + 1))


def heuristic_alignment(sample: Sample) -> float:
    """Fraction of input slots whose value literally occurs in the text.

    A slot is each fact head/tail (relations excluded) or each cell value.
    Matching is on normalized contiguous token subsequences, so it is
    insensitive to case and digit formatting but demands literal mention;
    treat it as a weak proxy for real alignment annotation.
    """
    if sample.facts is not None:
        slots = [slot for fact in sample.facts for slot in (fact.head, fact.tail)]
    else:
        assert sample.table is not None
        slots = [cell.value for cell in sample.table.cells]
    if not slots:
        raise ValueError(f"sample {sample.id!r} has no slots to match")
    text_tokens = _normalize_tokens(sample.text)
    matched = sum(
        1 for slot in slots if _contains_subsequence(text_tokens, _normalize_tokens(slot))
    )
    return matched / len(slots)


def alignment_from_file(path: str | Path) -> list[ScoredSample]:
    """Read externally produced alignment scores ({"id", "score"} JSONL)."""
    path = Path(path)
    scores: list[ScoredSample] = []
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                sample_id = str(record["id"])
                value = float(record["score"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}: line {line_no}: bad record ({exc})") from exc
            if not 0.0 <= value <= 1.0:
                raise ValueError(
                    f"alignment score for id {sample_id!r} outside [0, 1]: {value}"
                )
            scores.append(ScoredSample(id=sample_id, criterion="alignment", value=value))
    return scores


def validate_scores(
    scores: Sequence[ScoredSample],
    samples: SampleSet,
    require_full_coverage: bool = False,
) -> None:
    """Join-time check that score ids exist (once) in the sample set."""
    known = set(samples.by_id())
    seen: set[str] = set()
    for score in scores:
        if score.id not in known:
            raise ValueError(f"scored id {score.id!r} not present in the sample set")
        if score.id in seen:
            raise ValueError(f"id {score.id!r} scored more than once")
        seen.add(score.id)
    if require_full_coverage and seen != known:
        missing = sorted(known - seen)[:5]
        raise ValueError(f"samples without scores, e.g. {missing}")


def save_scores(scores: Sequence[ScoredSample], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for score in scores:
            record = {"id": score.id, "criterion": score.criterion, "value": score.value}
            handle.write(json.dumps(record) + "\n")
    return path


def load_scores(path: str | Path) -> list[ScoredSample]:
    path = Path(path)
    scores = []
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                scores.append(
                    ScoredSample(
                        id=str(record["id"]),
                        criterion=str(record["criterion"]),
                        value=float(record["value"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}: line {line_no}: {exc}") from exc
    return scores


class LengthScorer(BaseEstimator, TransformerMixin):
    """Stateless transformer: samples -> length ScoredSamples."""

    def __init__(self, side: str = "text"):
        self.side = side

    def fit(self, X, y=None):
        return self

    def transform(self, X: Iterable[Sample]) -> list[ScoredSample]:
        return [
            ScoredSample(
                id=sample.id,
                criterion="length",
                value=score_length(tokenize(_side_text(sample, self.side))),
            )
            for sample in X
        ]


class RarityScorer(BaseEstimator, TransformerMixin):
    """Fits unigram statistics on a corpus, then scores rarity.

    Multilingual corpora mix scripts and vocabularies, so one model per
    language is the default; ``per_language=False`` pools everything.
    """

    def __init__(self, side: str = "text", smoothing: bool = True, per_language: bool = True):
        self.side = side
        self.smoothing = smoothing
        self.per_language = per_language

    def fit(self, X: Iterable[Sample], y=None):
        samples = list(X)
        if not samples:
            raise ValueError("cannot fit RarityScorer on an empty corpus")
        if self.per_language:
            groups: dict[str, list[Sample]] = {}
            for sample in samples:
                groups.setdefault(sample.lang, []).append(sample)
            self.models_ = {
                lang: build_unigram(group, side=self.side, smoothing=self.smoothing)
                for lang, group in groups.items()
            }
        else:
            self.models_ = {
                None: build_unigram(samples, side=self.side, smoothing=self.smoothing)
            }
        return self

    def _model_for(self, sample: Sample) -> UnigramModel:
        if not hasattr(self, "models_"):
            raise NotFittedError("RarityScorer is not fitted; call fit first")
        key = sample.lang if self.per_language else None
        model = self.models_.get(key)
        if model is None:
            raise ValueError(f"no unigram model fitted for language {sample.lang!r}")
        return model

    def transform(self, X: Iterable[Sample]) -> list[ScoredSample]:
        return [
            ScoredSample(
                id=sample.id,
                criterion="rarity",
                value=score_rarity(
                    tokenize(_side_text(sample, self.side)), self._model_for(sample)
                ),
            )
            for sample in X
        ]


class AlignmentScorer(BaseEstimator, TransformerMixin):
    """Stateless transformer wrapping :func:`heuristic_alignment`."""

    def fit(self, X, y=None):
        return self

    def transform(self, X: Iterable[Sample]) -> list[ScoredSample]:
        return [
            ScoredSample(
                id=sample.id, criterion="alignment", value=heuristic_alignment(sample)
            )
            for sample in X
        ]


def score_samples(
    samples: SampleSet,
    criterion: str,
    side: str = "text",
    smoothing: bool = True,
    per_language: bool = True,
) -> list[ScoredSample]:
    """Score every sample under one criterion (heuristic for alignment)."""
    if criterion == "length":
        return LengthScorer(side=side).transform(samples)
    if criterion == "rarity":
        return RarityScorer(
            side=side, smoothing=smoothing, per_language=per_language
        ).fit(samples).transform(samples)
    if criterion == "alignment":
        return AlignmentScorer().transform(samples)
    raise ValueError(f"unknown criterion {criterion!r}")
