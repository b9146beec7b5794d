"""Data model and JSONL I/O for data-to-text training pairs.

A sample pairs structured input (RDF-style fact triples, or a table slice
of cells with page/section context) with a reference text in some language.
Structured input is linearized into a flat, tag-delimited string before it
is fed to a model: facts use ``<H>``/``<R>``/``<T>`` markers, tables use
``<page>``/``<section>``/``<cell>``/``<col>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterator, Mapping, Sequence

FACT_TAGS = ("<H>", "<R>", "<T>")
TABLE_TAGS = ("<page>", "<section>", "<cell>", "<col>")

# ISO-639-1 codes of the corpora this tooling was built around. The set is
# informational: other codes are accepted as long as they look like codes.
KNOWN_LANGS = frozenset(
    {"as", "bn", "en", "gu", "hi", "kn", "ml", "mr", "or", "pa", "ta", "te"}
)

LANGUAGE_NAMES = {
    "as": "Assamese",
    "bn": "Bangla",
    "en": "English",
    "gu": "Gujarati",
    "hi": "Hindi",
    "kn": "Kannada",
    "ml": "Malayalam",
    "mr": "Marathi",
    "or": "Odia",
    "pa": "Punjabi",
    "ta": "Tamil",
    "te": "Telugu",
}


class CorpusError(ValueError):
    """Raised for malformed sample files or records."""


@dataclass(frozen=True)
class FactTriple:
    """One (head, relation, tail) fact. Fields are whitespace-trimmed."""

    head: str
    relation: str
    tail: str

    def __post_init__(self):
        for name in ("head", "relation", "tail"):
            value = getattr(self, name).strip()
            if not value:
                raise CorpusError(f"fact triple field {name!r} is empty")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class TableCell:
    """One table cell; the column header may legitimately be empty."""

    column_header: str
    value: str

    def __post_init__(self):
        object.__setattr__(self, "column_header", self.column_header.strip())
        value = self.value.strip()
        if not value:
            raise CorpusError("table cell value is empty")
        object.__setattr__(self, "value", value)


@dataclass(frozen=True)
class Table:
    page_title: str
    section_title: str
    cells: tuple[TableCell, ...]

    def __post_init__(self):
        object.__setattr__(self, "page_title", self.page_title.strip())
        object.__setattr__(self, "section_title", self.section_title.strip())
        object.__setattr__(self, "cells", tuple(self.cells))


def _looks_like_lang(code: str) -> bool:
    return 2 <= len(code) <= 3 and code.isascii() and code.isalpha() and code.islower()


@dataclass(frozen=True)
class Sample:
    """One data-text training pair.

    Exactly one of ``facts`` / ``table`` is set. ``meta`` carries free-form
    provenance (never interpreted by the pipeline).
    """

    id: str
    lang: str
    text: str
    facts: tuple[FactTriple, ...] | None = None
    table: Table | None = None
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise CorpusError("sample id is empty")
        if not _looks_like_lang(self.lang):
            raise CorpusError(f"sample {self.id!r}: bad language code {self.lang!r}")
        object.__setattr__(self, "text", self.text.strip())
        if not self.text:
            raise CorpusError(f"sample {self.id!r}: reference text is empty")
        if (self.facts is None) == (self.table is None):
            raise CorpusError(
                f"sample {self.id!r}: exactly one of facts/table must be set"
            )
        if self.facts is not None:
            object.__setattr__(self, "facts", tuple(self.facts))

    def input_text(self) -> str:
        """Linearized model-input string for this sample."""
        if self.facts is not None:
            return linearize_facts(self.facts)
        assert self.table is not None
        return linearize_table(
            self.table.page_title, self.table.section_title, self.table.cells
        )

    def with_text(self, text: str, lang: str) -> "Sample":
        return replace(self, text=text, lang=lang)


@dataclass(frozen=True)
class SampleSet:
    """Immutable, ordered collection of samples with unique ids."""

    samples: tuple[Sample, ...]
    source_path: str = ""

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        seen: set[str] = set()
        for sample in self.samples:
            if sample.id in seen:
                raise CorpusError(f"duplicate sample id {sample.id!r}")
            seen.add(sample.id)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    def __getitem__(self, key: str) -> Sample:
        for sample in self.samples:
            if sample.id == key:
                return sample
        raise KeyError(key)

    def ids(self) -> list[str]:
        return [sample.id for sample in self.samples]

    def by_id(self) -> dict[str, Sample]:
        return {sample.id: sample for sample in self.samples}


def linearize_facts(facts: Sequence[FactTriple]) -> str:
    """Flatten fact triples to ``<H> h <R> r <T> t`` segments, in input order."""
    if not facts:
        raise CorpusError("no facts")
    parts = []
    for fact in facts:
        parts.extend(("<H>", fact.head, "<R>", fact.relation, "<T>", fact.tail))
    return " ".join(parts)


def linearize_table(
    page_title: str, section_title: str, cells: Sequence[TableCell]
) -> str:
    """Flatten a table slice to ``<page> P <section> S`` plus per-cell segments."""
    if not cells:
        raise CorpusError("no cells")
    parts = ["<page>", page_title, "<section>", section_title]
    for cell in cells:
        parts.extend(("<cell>", cell.value, "<col>", cell.column_header))
    # An empty field contributes no token, so its tag abuts the next marker.
    return " ".join(part for part in parts if part != "")


def _sample_from_record(record: dict, fmt: str, line_no: int) -> Sample:
    sample_id = str(record.get("id", f"line-{line_no}"))
    lang = record.get("lang")
    text = record.get("text")
    if not isinstance(lang, str) or not isinstance(text, str):
        raise CorpusError(f"line {line_no}: record needs string 'lang' and 'text'")
    meta = record.get("meta", {})
    if not isinstance(meta, dict):
        raise CorpusError(f"line {line_no}: 'meta' must be an object")
    raw = record.get("facts") if fmt == "facts" else record.get("cells")
    if not isinstance(raw, list):
        raise CorpusError(f"line {line_no}: missing {fmt!r} record fields")
    try:
        if fmt == "facts":
            facts = tuple(
                FactTriple(f["head"], f["relation"], f["tail"]) for f in raw
            )
            return Sample(id=sample_id, lang=lang, text=text, facts=facts, meta=meta)
        table = Table(
            page_title=str(record.get("page_title", "")),
            section_title=str(record.get("section_title", "")),
            cells=tuple(TableCell(c.get("column_header", ""), c["value"]) for c in raw),
        )
        return Sample(id=sample_id, lang=lang, text=text, table=table, meta=meta)
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"line {line_no}: bad record field ({exc})") from exc
    except CorpusError as exc:
        raise CorpusError(f"line {line_no}: {exc}") from exc


def load_samples(path: str | Path, fmt: str = "facts") -> SampleSet:
    """Load a JSONL sample file.

    One JSON object per line; records missing an ``id`` get ``line-<n>``
    (1-based). Malformed lines and duplicate ids are hard errors.
    """
    if fmt not in ("facts", "table"):
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(path)
    samples: list[Sample] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: malformed JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"line {line_no}: record is not a JSON object")
            sample = _sample_from_record(record, fmt, line_no)
            if sample.id in seen:
                raise CorpusError(f"line {line_no}: duplicate sample id {sample.id!r}")
            seen.add(sample.id)
            samples.append(sample)
    return SampleSet(samples=tuple(samples), source_path=str(path))


def sample_to_record(sample: Sample) -> dict:
    record: dict[str, Any] = {"id": sample.id, "lang": sample.lang}
    if sample.facts is not None:
        record["facts"] = [
            {"head": f.head, "relation": f.relation, "tail": f.tail}
            for f in sample.facts
        ]
    else:
        assert sample.table is not None
        record["page_title"] = sample.table.page_title
        record["section_title"] = sample.table.section_title
        record["cells"] = [
            {"column_header": c.column_header, "value": c.value}
            for c in sample.table.cells
        ]
    record["text"] = sample.text
    if sample.meta:
        record["meta"] = dict(sample.meta)
    return record


def save_samples(samples: SampleSet | Sequence[Sample], path: str | Path) -> Path:
    """Write samples back to JSONL, one record per line, in order."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for sample in samples:
            handle.write(json.dumps(sample_to_record(sample), ensure_ascii=False))
            handle.write("\n")
    return path
