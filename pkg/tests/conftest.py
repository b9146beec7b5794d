import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from curriculearn.corpus import FactTriple, Sample, SampleSet


def make_fact_sample(
    sample_id: str,
    text: str,
    facts: list[tuple[str, str, str]] | None = None,
    lang: str = "en",
) -> Sample:
    facts = facts or [("alpha", "rel", "beta")]
    return Sample(
        id=sample_id,
        lang=lang,
        text=text,
        facts=tuple(FactTriple(h, r, t) for h, r, t in facts),
    )


@pytest.fixture
def tiny_corpus() -> SampleSet:
    samples = (
        make_fact_sample("s1", "alpha met beta in town", [("alpha", "knows", "beta")]),
        make_fact_sample("s2", "gamma lives alone", [("gamma", "lives", "delta")]),
        make_fact_sample("s3", "alpha alpha again", [("alpha", "twin", "alpha")]),
    )
    return SampleSet(samples=samples)


def write_jsonl(path: Path, records: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


def fact_record(sample_id: str, text: str, facts=None, lang: str = "en") -> dict:
    facts = facts or [("alpha", "rel", "beta")]
    return {
        "id": sample_id,
        "lang": lang,
        "facts": [{"head": h, "relation": r, "tail": t} for h, r, t in facts],
        "text": text,
    }
