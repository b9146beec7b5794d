"""Cross-lingual corpus construction by round-trip translation filtering.

Each (data, text) pair is translated into the target language and back.
Agreement between the original text and its back-translation gauges how
much the translation legs distorted meaning; pairs are kept only when both
ROUGE-1 and ROUGE-2 F1 strictly exceed their thresholds (defaults 0.70 /
0.35). Kept pairs carry the forward translation as their new reference
text, producing a corpus in the target language.

Translation itself is pluggable: an HTTP service, an offline TSV lookup,
an identity backend, and a token-noising backend for controlled testing.
"""

from __future__ import annotations

import csv
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import requests

from .corpus import Sample, SampleSet
from .criteria import tokenize
from .metrics import rouge_n
from .prng import SplitMix64, derive_seed

DEFAULT_R1 = 0.70
DEFAULT_R2 = 0.35


class TranslationError(RuntimeError):
    """A translation backend could not produce output."""


@dataclass(frozen=True)
class FilterConfig:
    r1: float = DEFAULT_R1
    r2: float = DEFAULT_R2

    def __post_init__(self):
        for name, value in (("r1", self.r1), ("r2", self.r2)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"threshold {name} outside [0, 1]: {value}")
        if self.r2 > self.r1:
            warnings.warn(
                f"bigram threshold r2={self.r2} exceeds unigram threshold r1={self.r1}",
                stacklevel=2,
            )


@dataclass(frozen=True)
class RoundTripPair:
    """One sample with both translation legs populated."""

    id: str
    sample: Sample  # carries the source data and the original text
    t_target: str  # text translated into `lang`
    t_hat: str  # back-translation into the source language
    lang: str


@dataclass
class RoundTripResult:
    pairs: list[RoundTripPair]
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def failed_count(self) -> int:
        return len(self.failures)


@dataclass
class FilterReport:
    total: int
    kept: int
    rejected_rouge1: int
    rejected_rouge2: int
    r1: float
    r2: float

    @property
    def rejected(self) -> int:
        return self.total - self.kept

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "kept": self.kept,
            "rejected": self.rejected,
            "rejected_rouge1": self.rejected_rouge1,
            "rejected_rouge2": self.rejected_rouge2,
            "thresholds": {"r1": self.r1, "r2": self.r2},
        }


class Translator(Protocol):
    def translate_batch(
        self,
        texts: Sequence[str],
        src: str,
        tgt: str,
        ids: Sequence[str] | None = None,
    ) -> list[str]: ...


class IdentityTranslator:
    """Returns inputs unchanged; the no-op baseline for tests and dry runs."""

    def translate_batch(self, texts, src, tgt, ids=None):
        if not texts:
            raise TranslationError("empty batch")
        return list(texts)


class TsvTranslator:
    """Offline lookup over a TSV of (id, direction, text, translation) rows.

    Direction is "src-tgt" (e.g. "en-hi"). Lookup is by (direction, text);
    a miss is an error naming the offending id.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._table: dict[tuple[str, str], str] = {}
        with self.path.open(encoding="utf-8", newline="") as handle:
            for row_no, row in enumerate(csv.reader(handle, delimiter="\t"), start=1):
                if not row or all(not col.strip() for col in row):
                    continue
                if len(row) != 4:
                    raise ValueError(
                        f"{self.path}: row {row_no}: expected 4 TSV columns, got {len(row)}"
                    )
                _row_id, direction, text, translation = row
                self._table[(direction, text)] = translation

    def translate_batch(self, texts, src, tgt, ids=None):
        if not texts:
            raise TranslationError("empty batch")
        direction = f"{src}-{tgt}"
        out = []
        for index, text in enumerate(texts):
            try:
                out.append(self._table[(direction, text)])
            except KeyError:
                ident = ids[index] if ids is not None else f"batch item {index}"
                raise TranslationError(
                    f"no {direction} translation in {self.path} for id {ident!r}"
                ) from None
        return out


class HttpTranslator:
    """POSTs {"texts", "src", "tgt"} to <base_url>/translate with retries."""

    def __init__(
        self,
        base_url: str,
        timeout: float = 30.0,
        retries: int = 3,
        backoff: float = 0.5,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._session = session or requests.Session()

    def translate_batch(self, texts, src, tgt, ids=None):
        if not texts:
            raise TranslationError("empty batch")
        payload = {"texts": list(texts), "src": src, "tgt": tgt}
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = self._session.post(
                    f"{self.base_url}/translate", json=payload, timeout=self.timeout
                )
                if response.status_code // 100 != 2:
                    raise TranslationError(
                        f"translator returned HTTP {response.status_code}"
                    )
                translations = response.json().get("translations")
                if not isinstance(translations, list) or len(translations) != len(texts):
                    raise TranslationError(
                        f"translator returned {0 if translations is None else len(translations)}"
                        f" items for {len(texts)} inputs"
                    )
                return [str(item) for item in translations]
            except (requests.RequestException, TranslationError) as exc:
                last_error = exc
        raise TranslationError(f"translation failed after {self.retries} retries: {last_error}")


class NoisingTranslator:
    """Replaces a fixed fraction of tokens with junk; for controlled tests.

    Positions come from a seeded permutation keyed by (seed, direction,
    running text index), and a higher fraction always replaces a superset
    of a lower fraction's positions, so downstream retention is exactly
    monotone in the noise level for a fixed seed.
    """

    def __init__(self, fraction: float, seed: int = 0):
        if not 0.0 <= fraction <= 1.0:
            raise ValueError(f"noise fraction outside [0, 1]: {fraction}")
        self.fraction = fraction
        self.seed = seed
        self._positions_seen: dict[str, int] = {}

    def translate_batch(self, texts, src, tgt, ids=None):
        if not texts:
            raise TranslationError("empty batch")
        direction = f"{src}-{tgt}"
        start = self._positions_seen.get(direction, 0)
        out = []
        for offset, text in enumerate(texts):
            rng = SplitMix64(derive_seed(self.seed, f"{direction}#{start + offset}"))
            tokens = text.split()
            positions = list(range(len(tokens)))
            rng.shuffle(positions)
            for junk_index, position in enumerate(
                positions[: math.ceil(self.fraction * len(tokens))]
            ):
                tokens[position] = f"xxnoise{junk_index}"
            out.append(" ".join(tokens))
        self._positions_seen[direction] = start + len(texts)
        return out


def _batches(items: list, size: int):
    for start in range(0, len(items), size):
        yield items[start : start + size]


def _translate_with_fallback(
    translator: Translator,
    texts: list[str],
    ids: list[str],
    src: str,
    tgt: str,
) -> tuple[dict[str, str], list[tuple[str, str]]]:
    """Translate a batch, falling back to per-item calls to isolate failures."""
    try:
        translated = translator.translate_batch(texts, src, tgt, ids=ids)
        return dict(zip(ids, translated)), []
    except TranslationError:
        done: dict[str, str] = {}
        failures: list[tuple[str, str]] = []
        for text, ident in zip(texts, ids):
            try:
                done[ident] = translator.translate_batch([text], src, tgt, ids=[ident])[0]
            except TranslationError as exc:
                failures.append((ident, str(exc)))
        return done, failures


def _run_leg(
    translator: Translator,
    batches: list[tuple[list[str], list[str]]],
    src: str,
    tgt: str,
    jobs: int,
) -> tuple[dict[str, str], list[tuple[str, str]]]:
    """Run one translation direction over all batches, optionally in parallel.

    Results merge in batch order either way, so output order never depends
    on scheduling; the translator must be thread-safe when jobs > 1.
    """
    if jobs > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(
                    lambda batch: _translate_with_fallback(translator, batch[0], batch[1], src, tgt),
                    batches,
                )
            )
    else:
        results = [
            _translate_with_fallback(translator, texts, ids, src, tgt)
            for texts, ids in batches
        ]
    done: dict[str, str] = {}
    failures: list[tuple[str, str]] = []
    for batch_done, batch_failures in results:
        done.update(batch_done)
        failures.extend(batch_failures)
    return done, failures


def round_trip(
    samples: SampleSet | Sequence[Sample],
    translator: Translator,
    lang: str,
    batch_size: int = 32,
    jobs: int = 1,
) -> RoundTripResult:
    """Translate every sample's text into `lang` and back again.

    Per-sample translation failures are excluded and reported; it is an
    error for every sample to fail (or for the input to be non-empty with
    a target language equal to the source). With jobs > 1 batches are
    translated concurrently (same outputs, in the same order); stateful
    test translators like NoisingTranslator need jobs = 1.
    """
    samples = list(samples)
    result = RoundTripResult(pairs=[])
    if not samples:
        return result
    for sample in samples:
        if sample.lang == lang:
            raise ValueError(
                f"sample {sample.id!r} is already in target language {lang!r}"
            )

    src = samples[0].lang
    forward_batches = [
        ([sample.text for sample in batch], [sample.id for sample in batch])
        for batch in _batches(samples, batch_size)
    ]
    forward, failures = _run_leg(translator, forward_batches, src, lang, jobs)
    result.failures.extend(failures)

    survivors = [sample for sample in samples if sample.id in forward]
    backward_batches = [
        ([forward[sample.id] for sample in batch], [sample.id for sample in batch])
        for batch in _batches(survivors, batch_size)
    ]
    backward, failures = _run_leg(translator, backward_batches, lang, src, jobs)
    result.failures.extend(failures)

    for sample in survivors:
        if sample.id not in backward:
            continue
        t_target = forward[sample.id]
        t_hat = backward[sample.id]
        if not t_target.strip() or not t_hat.strip():
            result.failures.append((sample.id, "translator returned empty text"))
            continue
        result.pairs.append(
            RoundTripPair(
                id=sample.id,
                sample=sample,
                t_target=t_target,
                t_hat=t_hat,
                lang=lang,
            )
        )
    if samples and not result.pairs and result.failures:
        raise TranslationError(
            f"all {len(samples)} samples failed translation; first error: "
            f"{result.failures[0][1]}"
        )
    return result


def _casefold_tokens(text: str) -> list[str]:
    return tokenize(text.casefold())


def filter_pairs(
    pairs: Sequence[RoundTripPair], cfg: FilterConfig | None = None
) -> tuple[SampleSet, FilterReport]:
    """Keep pairs whose round trip preserved the text; repackage the rest.

    Keeps a pair iff ROUGE-1 F1 > r1 AND ROUGE-2 F1 > r2 (strict), computed
    on case-folded tokens of the original text vs its back-translation.
    Kept samples pair the original data with the forward translation.
    """
    cfg = cfg or FilterConfig()
    kept: list[Sample] = []
    rejected_r1 = 0
    rejected_r2 = 0
    for pair in pairs:
        original = _casefold_tokens(pair.sample.text)
        back = _casefold_tokens(pair.t_hat)
        score1 = rouge_n(back, original, 1).f
        score2 = rouge_n(back, original, 2).f
        ok1 = score1 > cfg.r1
        ok2 = score2 > cfg.r2
        if not ok1:
            rejected_r1 += 1
        if not ok2:
            rejected_r2 += 1
        if ok1 and ok2:
            kept.append(pair.sample.with_text(pair.t_target, pair.lang))
    report = FilterReport(
        total=len(pairs),
        kept=len(kept),
        rejected_rouge1=rejected_r1,
        rejected_rouge2=rejected_r2,
        r1=cfg.r1,
        r2=cfg.r2,
    )
    return SampleSet(samples=tuple(kept)), report
