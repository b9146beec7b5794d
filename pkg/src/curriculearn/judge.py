"""LLM-backed quality judging: prompt rendering, response parsing, aggregation.

Prompts live as plain text files under ``templates/`` so any wording change
is visible in diffs. Two tasks are covered: annotating a data-text pair as
PARTIAL or COMPLETE alignment, and grading a generated output for fluency,
faithfulness, and coverage.

Graded responses use three-level answers which map onto numbers as
fluent/faithful -> 1.0, mostly -> 0.5, not -> 0.0; coverage is a fact
count. A response missing a section is marked unparseable rather than
failing the batch. Backends are pluggable; the mock backend replays
fixture responses keyed by sample id so everything runs offline.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import requests

from .corpus import LANGUAGE_NAMES, Sample

GRADE_VALUES = {"": 1.0, "mostly": 0.5, "not": 0.0}

_SECTION_RE = re.compile(r"\b(FLUENCY|FAITHFULNESS|COVERAGE)\b", re.IGNORECASE)
_LIST_ITEM_RE = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s*(.+?)\s*$", re.MULTILINE)
_INT_RE = re.compile(r"\d+")


class BackendError(RuntimeError):
    """A judge backend could not produce a response."""


def _load_template(name: str) -> str:
    return (resources.files("curriculearn") / "templates" / name).read_text(
        encoding="utf-8"
    )


def language_name(code: str) -> str:
    return LANGUAGE_NAMES.get(code, code)


def render_alignment_prompt(sample: Sample, dataset_name: str = "XAlign") -> str:
    """Fill the alignment-annotation template for one sample."""
    template = _load_template("alignment_annotation.txt")
    return (
        template.replace("{dataset}", dataset_name)
        .replace("#lang#", language_name(sample.lang))
        .replace("{data}", sample.input_text())
        .replace("{text}", sample.text)
    )


def render_eval_prompt(sample: Sample, generated: str) -> str:
    """Fill the quality-evaluation template for one (sample, output) pair."""
    if not generated or not generated.strip():
        raise ValueError(f"sample {sample.id!r}: generated text is empty")
    template = _load_template("quality_evaluation.txt")
    return template.replace("{data}", sample.input_text()).replace(
        "{output}", generated
    )


@dataclass
class Judgement:
    fluency: float | None = None
    faithfulness: float | None = None
    coverage: int | None = None
    unsupported_phrases: list[str] = field(default_factory=list)
    parseable: bool = True

    def to_dict(self) -> dict:
        return {
            "fluency": self.fluency,
            "faithfulness": self.faithfulness,
            "coverage": self.coverage,
            "unsupported_phrases": list(self.unsupported_phrases),
            "parseable": self.parseable,
        }


def _split_sections(response: str) -> dict[str, str]:
    matches = list(_SECTION_RE.finditer(response))
    sections: dict[str, str] = {}
    for index, match in enumerate(matches):
        key = match.group(1).upper()
        end = matches[index + 1].start() if index + 1 < len(matches) else len(response)
        # Last occurrence wins: graded answers echo the rubric headers first.
        sections[key] = response[match.end() : end]
    return sections


def _grade(section: str, adjective: str) -> float | None:
    lowered = section.lower()
    for qualifier in ("not", "mostly", ""):
        needle = f"{qualifier} {adjective}".strip()
        if re.search(rf"\b{needle}\b", lowered):
            return GRADE_VALUES[qualifier]
    return None


def parse_judgement(response: str) -> Judgement:
    """Extract grades from a judge response; unparseable records are flagged."""
    sections = _split_sections(response)
    result = Judgement()
    fluency_section = sections.get("FLUENCY")
    faithfulness_section = sections.get("FAITHFULNESS")
    coverage_section = sections.get("COVERAGE")
    if fluency_section is not None:
        result.fluency = _grade(fluency_section, "fluent")
    if faithfulness_section is not None:
        result.faithfulness = _grade(faithfulness_section, "faithful")
        result.unsupported_phrases = [
            item.strip("\"'") for item in _LIST_ITEM_RE.findall(faithfulness_section)
        ]
    if coverage_section is not None:
        int_match = _INT_RE.search(coverage_section)
        if int_match:
            result.coverage = int(int_match.group())
    if result.fluency is None or result.faithfulness is None or result.coverage is None:
        result.parseable = False
    return result


class JudgeBackend(Protocol):
    def complete(self, prompt: str, sample_id: str | None = None) -> str: ...


class MockJudgeBackend:
    """Replays canned responses keyed by sample id (JSONL {"id", "response"})."""

    def __init__(self, fixtures: str | Path | Mapping[str, str]):
        if isinstance(fixtures, Mapping):
            self._responses = dict(fixtures)
        else:
            self._responses = {}
            with Path(fixtures).open(encoding="utf-8") as handle:
                for line in handle:
                    if not line.strip():
                        continue
                    record = json.loads(line)
                    self._responses[str(record["id"])] = str(record["response"])

    def complete(self, prompt: str, sample_id: str | None = None) -> str:
        if sample_id is None or sample_id not in self._responses:
            raise BackendError(f"no fixture response for id {sample_id!r}")
        return self._responses[sample_id]


class HttpJudgeBackend:
    """POSTs {"prompt"} to <base_url>/complete and expects {"text"} back."""

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

    def complete(self, prompt: str, sample_id: str | None = None) -> str:
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = self._session.post(
                    f"{self.base_url}/complete",
                    json={"prompt": prompt},
                    timeout=self.timeout,
                )
                if response.status_code // 100 != 2:
                    raise BackendError(f"judge returned HTTP {response.status_code}")
                text = response.json().get("text")
                if not isinstance(text, str):
                    raise BackendError("judge response has no 'text' field")
                return text
            except (requests.RequestException, BackendError) as exc:
                last_error = exc
        raise BackendError(f"judge failed after {self.retries} retries: {last_error}")


@dataclass
class LanguageStats:
    count: int = 0
    parseable: int = 0
    unparseable: int = 0
    failed: int = 0
    fluency_sum: float = 0.0
    faithfulness_sum: float = 0.0
    coverage_sum: float = 0.0
    coverage_warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        means = {}
        if self.parseable:
            means = {
                "fluency": self.fluency_sum / self.parseable,
                "faithfulness": self.faithfulness_sum / self.parseable,
                "coverage": self.coverage_sum / self.parseable,
            }
        return {
            "count": self.count,
            "parseable": self.parseable,
            "unparseable": self.unparseable,
            "failed": self.failed,
            "means": means,
            "coverage_warnings": list(self.coverage_warnings),
        }


def _slot_count(sample: Sample) -> int:
    if sample.facts is not None:
        return len(sample.facts)
    assert sample.table is not None
    return len(sample.table.cells)


def judge_batch(
    samples: Sequence[Sample],
    outputs: Sequence[str],
    backend: JudgeBackend,
) -> dict:
    """Grade generated outputs and aggregate per-language means.

    Returns a JSON-ready report keyed by language code. Coverage counts
    exceeding the number of input facts/cells are kept (the judge may err)
    but recorded under coverage_warnings.
    """
    if len(samples) != len(outputs):
        raise ValueError(
            f"samples/outputs length mismatch: {len(samples)} vs {len(outputs)}"
        )
    if not samples:
        raise ValueError("empty judging batch")
    stats: dict[str, LanguageStats] = {}
    for sample, output in zip(samples, outputs):
        entry = stats.setdefault(sample.lang, LanguageStats())
        entry.count += 1
        prompt = render_eval_prompt(sample, output)
        try:
            response = backend.complete(prompt, sample_id=sample.id)
        except BackendError:
            entry.failed += 1
            continue
        judgement = parse_judgement(response)
        if not judgement.parseable:
            entry.unparseable += 1
            continue
        entry.parseable += 1
        entry.fluency_sum += judgement.fluency
        entry.faithfulness_sum += judgement.faithfulness
        entry.coverage_sum += judgement.coverage
        if judgement.coverage > _slot_count(sample):
            entry.coverage_warnings.append(sample.id)
    return {lang: entry.to_dict() for lang, entry in sorted(stats.items())}
