"""Shard partitioning, phase schedules, and deterministic sampling manifests.

Scored samples are sorted by (value, id) and cut into K near-equal
contiguous shards; shard 1 holds the lowest criterion values. A schedule
then names which shards are active per training phase:

* expanding: start from shard 1 alone and add one shard per phase;
* annealing: start from all shards and drop the lowest shard per phase.

Within a phase the active shards' ids are shuffled together with a seeded
SplitMix64 Fisher-Yates shuffle, so a (sharding, mode, phase, seed) tuple
always produces a byte-identical manifest file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .criteria import ScoredSample
from .prng import SplitMix64, derive_seed

MODES = ("expanding", "annealing")
DIRECTIONS = ("ascending", "descending")
DEFAULT_SHARDS = 8


@dataclass(frozen=True)
class Sharding:
    """Partition of sample ids into K criterion-ordered shards."""

    criterion: str
    direction: str
    shards: tuple[tuple[str, ...], ...]

    @property
    def k(self) -> int:
        return len(self.shards)

    def sizes(self) -> list[int]:
        return [len(shard) for shard in self.shards]

    def all_ids(self) -> list[str]:
        return [sample_id for shard in self.shards for sample_id in shard]

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "direction": self.direction,
            "K": self.k,
            "shards": [list(shard) for shard in self.shards],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Sharding":
        return cls(
            criterion=str(data["criterion"]),
            direction=str(data["direction"]),
            shards=tuple(tuple(str(i) for i in shard) for shard in data["shards"]),
        )


@dataclass(frozen=True)
class Schedule:
    """Ordered phases; each phase is a tuple of active 1-based shard indices."""

    mode: str
    k: int
    phases: tuple[tuple[int, ...], ...]

    def active_shards(self, phase: int) -> tuple[int, ...]:
        if not 1 <= phase <= len(self.phases):
            raise ValueError(f"phase {phase} out of range 1..{len(self.phases)}")
        return self.phases[phase - 1]


@dataclass(frozen=True)
class PhaseManifest:
    """Deterministic sample-id ordering for one training phase."""

    phase: int
    seed: int
    mode: str
    criterion: str
    k: int
    active_shards: tuple[int, ...]
    order: tuple[str, ...]

    def header(self) -> dict:
        return {
            "phase": self.phase,
            "seed": self.seed,
            "mode": self.mode,
            "criterion": self.criterion,
            "K": self.k,
            "active_shards": list(self.active_shards),
            "count": len(self.order),
        }


def make_shards(
    scores: Sequence[ScoredSample], k: int = DEFAULT_SHARDS, direction: str = "ascending"
) -> Sharding:
    """Sort ids by (value, id) and split into K near-equal contiguous blocks.

    Descending direction negates the value (ties still break by id). With
    N = q*K + r, the first r shards get q+1 ids so sizes differ by at most 1.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    if k < 1:
        raise ValueError("shard count must be >= 1")
    if k > len(scores):
        raise ValueError(f"cannot split {len(scores)} samples into {k} shards")
    seen: set[str] = set()
    for score in scores:
        if score.id in seen:
            raise ValueError(f"id {score.id!r} scored more than once")
        seen.add(score.id)
    criterion = scores[0].criterion
    if any(score.criterion != criterion for score in scores):
        raise ValueError("scores mix criteria; shard on exactly one")

    sign = 1.0 if direction == "ascending" else -1.0
    ordered = sorted(scores, key=lambda s: (sign * s.value, s.id))

    n = len(ordered)
    base, remainder = divmod(n, k)
    shards: list[tuple[str, ...]] = []
    start = 0
    for index in range(k):
        size = base + (1 if index < remainder else 0)
        shards.append(tuple(score.id for score in ordered[start : start + size]))
        start += size
    return Sharding(criterion=criterion, direction=direction, shards=tuple(shards))


def make_schedule(k: int, mode: str) -> Schedule:
    """K-phase staircase: expanding adds shard p at phase p, annealing drops it."""
    if k < 1:
        raise ValueError("shard count must be >= 1")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "expanding":
        phases = tuple(tuple(range(1, p + 1)) for p in range(1, k + 1))
    else:
        phases = tuple(tuple(range(p, k + 1)) for p in range(1, k + 1))
    return Schedule(mode=mode, k=k, phases=phases)


def sample_phase(
    sharding: Sharding, schedule: Schedule, phase: int, seed: int
) -> PhaseManifest:
    """Shuffle the union of active shards into one deterministic phase order."""
    if schedule.k != sharding.k:
        raise ValueError(
            f"schedule is for K={schedule.k} but sharding has K={sharding.k}"
        )
    active = schedule.active_shards(phase)
    order = [
        sample_id for shard_index in active for sample_id in sharding.shards[shard_index - 1]
    ]
    rng = SplitMix64(derive_seed(seed, f"phase-{phase}"))
    rng.shuffle(order)
    return PhaseManifest(
        phase=phase,
        seed=seed,
        mode=schedule.mode,
        criterion=sharding.criterion,
        k=sharding.k,
        active_shards=active,
        order=tuple(order),
    )


def write_manifest(manifest: PhaseManifest, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(manifest.header()) + "\n")
        for sample_id in manifest.order:
            handle.write(json.dumps({"id": sample_id}, ensure_ascii=False) + "\n")
    return path


def read_manifest(path: str | Path) -> PhaseManifest:
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        header = json.loads(handle.readline())
        order = tuple(str(json.loads(line)["id"]) for line in handle if line.strip())
    if header["count"] != len(order):
        raise ValueError(
            f"{path}: header count {header['count']} != {len(order)} body ids"
        )
    return PhaseManifest(
        phase=int(header["phase"]),
        seed=int(header["seed"]),
        mode=str(header["mode"]),
        criterion=str(header["criterion"]),
        k=int(header["K"]),
        active_shards=tuple(int(i) for i in header["active_shards"]),
        order=order,
    )


def emit_manifests(
    sharding: Sharding, schedule: Schedule, seed: int, out_dir: str | Path
) -> list[Path]:
    """Write phase-1.jsonl .. phase-K.jsonl into out_dir."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for phase in range(1, schedule.k + 1):
            manifest = sample_phase(sharding, schedule, phase, seed)
            paths.append(write_manifest(manifest, out_dir / f"phase-{phase}.jsonl"))
    except OSError as exc:
        raise OSError(f"cannot write manifests under {out_dir}: {exc}") from exc
    return paths


class CurriculumPlanner(BaseEstimator):
    """Estimator-style front door: fit on scores, then emit phase manifests.

    Parameters mirror the CLI flags (shards K, mode, direction, seed); the
    fitted state is the sharding plus its schedule.
    """

    def __init__(
        self,
        shards: int = DEFAULT_SHARDS,
        mode: str = "annealing",
        direction: str = "ascending",
        seed: int = 0,
    ):
        self.shards = shards
        self.mode = mode
        self.direction = direction
        self.seed = seed

    def fit(self, X: Sequence[ScoredSample], y=None):
        self.sharding_ = make_shards(X, k=self.shards, direction=self.direction)
        self.schedule_ = make_schedule(self.shards, self.mode)
        return self

    def _check_fitted(self):
        if not hasattr(self, "sharding_"):
            raise NotFittedError("CurriculumPlanner is not fitted; call fit first")

    def phase_manifest(self, phase: int) -> PhaseManifest:
        self._check_fitted()
        return sample_phase(self.sharding_, self.schedule_, phase, self.seed)

    def manifests(self) -> list[PhaseManifest]:
        self._check_fitted()
        return [self.phase_manifest(p) for p in range(1, self.shards + 1)]

    def emit(self, out_dir: str | Path) -> list[Path]:
        self._check_fitted()
        return emit_manifests(self.sharding_, self.schedule_, self.seed, out_dir)
