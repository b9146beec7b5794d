"""Desk-scale synthetic harness for curriculum schedules under label noise.

Real seq2seq training is far too heavy to rerun on every change, so this
lab swaps in the smallest learner whose sequential training is still
order-sensitive: multinomial logistic regression trained one gradient step
per presented sample. Training pairs get an observable quality score in
[0, 1]; labels are flipped with probability proportional to (1 - quality),
so low-quality samples are noisy exactly the way misaligned references are.

Running the same data through a uniform baseline, an expanding schedule,
and an annealing schedule (all driven by the scheduler module with quality
as the criterion) measures how much each schedule buys on a clean test set.
A loss-truncation mode reuses the streaming quantile filter as a fourth
arm. Everything is deterministic per (config, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .criteria import ScoredSample
from .loss_trunc import LossTruncation
from .prng import SplitMix64, derive_seed
from .scheduler import CurriculumPlanner

MODES = ("baseline", "expanding", "annealing", "loss-truncation")
_MODE_ALIASES = {"baseline-uniform": "baseline", "loss_truncation": "loss-truncation"}


@dataclass(frozen=True)
class SynthSample:
    features: tuple[float, ...]
    label: int
    quality: float
    corrupted: bool


@dataclass(frozen=True)
class ExperimentConfig:
    n_train: int = 6000
    n_test: int = 2000
    dim: int = 8
    classes: int = 4
    noise_rate: float = 0.3
    shards: int = 8
    modes: tuple[str, ...] = ("baseline", "expanding", "annealing")
    seeds: tuple[int, ...] = tuple(range(10))
    step_size: float = 0.15
    epochs_per_phase: int = 1
    feature_noise: float = 0.35
    lt_drop_frac: float = 0.3

    def __post_init__(self):
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError(f"noise_rate must be in [0, 1): {self.noise_rate}")
        if self.shards < 1:
            raise ValueError("shards must be >= 1")
        if self.classes < 2 or self.dim < self.classes:
            raise ValueError("need >= 2 classes and dim >= classes")
        if self.n_train < self.shards or self.n_test < 1:
            raise ValueError("dataset sizes too small")
        if not self.seeds:
            raise ValueError("need at least one seed")
        modes = tuple(_MODE_ALIASES.get(mode, mode) for mode in self.modes)
        unknown = [mode for mode in modes if mode not in MODES]
        if unknown:
            raise ValueError(f"unknown modes {unknown}; choose from {MODES}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))


@dataclass
class SynthDataset:
    """Columnar storage; `view` materializes the per-sample record."""

    features: np.ndarray  # (n, dim)
    labels: np.ndarray  # (n,) presented labels (possibly flipped)
    quality: np.ndarray  # (n,) observable quality in [0, 1]
    corrupted: np.ndarray  # (n,) hidden ground truth of the flips

    def __len__(self) -> int:
        return len(self.labels)

    def view(self, index: int) -> SynthSample:
        return SynthSample(
            features=tuple(self.features[index].tolist()),
            label=int(self.labels[index]),
            quality=float(self.quality[index]),
            corrupted=bool(self.corrupted[index]),
        )

    @property
    def corrupted_fraction(self) -> float:
        return float(self.corrupted.mean())


def _class_means(classes: int, dim: int) -> np.ndarray:
    # Scaled one-hot corners: every pair of class means is distance 1 apart.
    means = np.zeros((classes, dim))
    means[np.arange(classes), np.arange(classes)] = 1.0 / math.sqrt(2.0)
    return means


def gen_dataset(
    config: ExperimentConfig, seed: int
) -> tuple[SynthDataset, SynthDataset]:
    """Class-conditional Gaussians; train labels flipped by quality-coupled noise.

    Flip probability is clip(2 * noise_rate * (1 - quality), 0, 1), whose
    expectation over quality ~ Uniform[0,1] is exactly noise_rate. The test
    split is noise-free with quality pinned to 1.
    """
    means = _class_means(config.classes, config.dim)

    def _draw(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        labels = rng.integers(0, config.classes, size=n)
        features = means[labels] + config.feature_noise * rng.standard_normal(
            (n, config.dim)
        )
        return features, labels

    train_rng = np.random.default_rng(derive_seed(seed, "simlab-train"))
    features, clean_labels = _draw(config.n_train, train_rng)
    quality = train_rng.uniform(0.0, 1.0, size=config.n_train)
    flip_prob = np.clip(2.0 * config.noise_rate * (1.0 - quality), 0.0, 1.0)
    flips = train_rng.uniform(size=config.n_train) < flip_prob
    labels = clean_labels.copy()
    if flips.any():
        # Uniform over the wrong classes.
        offsets = train_rng.integers(1, config.classes, size=int(flips.sum()))
        labels[flips] = (clean_labels[flips] + offsets) % config.classes
    train = SynthDataset(
        features=features, labels=labels, quality=quality, corrupted=flips
    )

    test_rng = np.random.default_rng(derive_seed(seed, "simlab-test"))
    test_features, test_labels = _draw(config.n_test, test_rng)
    test = SynthDataset(
        features=test_features,
        labels=test_labels,
        quality=np.ones(config.n_test),
        corrupted=np.zeros(config.n_test, dtype=bool),
    )
    return train, test


class SequentialSoftmaxRegression:
    """Multinomial logistic regression trained by per-sample gradient steps."""

    def __init__(self, dim: int, classes: int, step_size: float):
        self.step_size = step_size
        self.weights = np.zeros((dim + 1, classes))

    @staticmethod
    def _augment(features: np.ndarray) -> np.ndarray:
        return np.hstack([features, np.ones((len(features), 1))])

    def _probs(self, x_aug: np.ndarray) -> np.ndarray:
        logits = x_aug @ self.weights
        logits -= logits.max()
        exp = np.exp(logits)
        return exp / exp.sum()

    def loss(self, x_aug: np.ndarray, label: int) -> float:
        return -math.log(max(self._probs(x_aug)[label], 1e-300))

    def step(self, x_aug: np.ndarray, label: int) -> None:
        grad_logits = self._probs(x_aug)
        grad_logits[label] -= 1.0
        self.weights -= self.step_size * np.outer(x_aug, grad_logits)

    def accuracy(self, features: np.ndarray, labels: np.ndarray) -> float:
        logits = self._augment(features) @ self.weights
        return float((logits.argmax(axis=1) == labels).mean())


def _phase_orders(
    config: ExperimentConfig, train: SynthDataset, mode: str, seed: int
) -> list[np.ndarray]:
    """Per-phase presentation orders (row indices), one list entry per phase."""
    n = len(train)
    if mode in ("baseline", "loss-truncation"):
        orders = []
        for phase in range(1, config.shards + 1):
            order = list(range(n))
            SplitMix64(derive_seed(seed, f"uniform-phase-{phase}")).shuffle(order)
            orders.append(np.asarray(order))
        return orders

    scores = [
        ScoredSample(id=f"t{i:06d}", criterion="alignment", value=float(train.quality[i]))
        for i in range(n)
    ]
    planner = CurriculumPlanner(
        shards=config.shards, mode=mode, direction="ascending", seed=seed
    ).fit(scores)
    return [
        np.asarray([int(sample_id[1:]) for sample_id in manifest.order])
        for manifest in planner.manifests()
    ]


def train_learner(
    config: ExperimentConfig,
    train: SynthDataset,
    orders: Sequence[np.ndarray],
    use_loss_truncation: bool = False,
) -> SequentialSoftmaxRegression:
    """One gradient step per presented sample, phases in order."""
    model = SequentialSoftmaxRegression(config.dim, config.classes, config.step_size)
    x_aug = SequentialSoftmaxRegression._augment(train.features)
    truncation = (
        LossTruncation(drop_frac=config.lt_drop_frac) if use_loss_truncation else None
    )
    for order in orders:
        for _ in range(config.epochs_per_phase):
            for index in order:
                x = x_aug[index]
                label = int(train.labels[index])
                if truncation is not None:
                    loss = model.loss(x, label)
                    drop = truncation.steps_seen > 0 and truncation.should_drop(loss)
                    truncation.observe(loss)
                    if drop:
                        continue
                model.step(x, label)
    return model


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    accuracies: dict[str, dict[int, float]]
    corrupted_fractions: dict[int, float] = field(default_factory=dict)

    def mode_mean(self, mode: str) -> float:
        values = list(self.accuracies[mode].values())
        return sum(values) / len(values)

    def mode_std(self, mode: str) -> float:
        values = list(self.accuracies[mode].values())
        mean = sum(values) / len(values)
        return math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))

    def delta(self, mode_a: str, mode_b: str) -> float:
        return self.mode_mean(mode_a) - self.mode_mean(mode_b)

    def to_dict(self) -> dict:
        modes = list(self.accuracies)
        return {
            "config": {
                "n_train": self.config.n_train,
                "n_test": self.config.n_test,
                "dim": self.config.dim,
                "classes": self.config.classes,
                "noise_rate": self.config.noise_rate,
                "shards": self.config.shards,
                "modes": list(self.config.modes),
                "seeds": list(self.config.seeds),
                "step_size": self.config.step_size,
                "epochs_per_phase": self.config.epochs_per_phase,
                "feature_noise": self.config.feature_noise,
                "lt_drop_frac": self.config.lt_drop_frac,
            },
            "accuracies": {
                mode: {str(seed): acc for seed, acc in runs.items()}
                for mode, runs in self.accuracies.items()
            },
            "means": {mode: self.mode_mean(mode) for mode in modes},
            "stds": {mode: self.mode_std(mode) for mode in modes},
            "deltas": {
                f"{a}-{b}": self.delta(a, b)
                for i, a in enumerate(modes)
                for b in modes[i + 1 :]
            },
            "corrupted_fraction_mean": (
                sum(self.corrupted_fractions.values()) / len(self.corrupted_fractions)
                if self.corrupted_fractions
                else 0.0
            ),
        }

    def summary_table(self) -> str:
        lines = [f"{'mode':<16} {'mean acc':>9} {'std':>7} {'runs':>5}"]
        for mode in self.accuracies:
            lines.append(
                f"{mode:<16} {self.mode_mean(mode):>9.4f} "
                f"{self.mode_std(mode):>7.4f} {len(self.accuracies[mode]):>5}"
            )
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def run_mode(config: ExperimentConfig, mode: str, seed: int) -> float:
    """Train one (mode, seed) arm and return clean-test accuracy."""
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    train, test = gen_dataset(config, seed)
    orders = _phase_orders(config, train, mode, seed)
    model = train_learner(
        config, train, orders, use_loss_truncation=(mode == "loss-truncation")
    )
    return model.accuracy(test.features, test.labels)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Full grid: every configured mode crossed with every seed."""
    report = ExperimentReport(config=config, accuracies={})
    for seed in config.seeds:
        train, _ = gen_dataset(config, seed)
        report.corrupted_fractions[seed] = train.corrupted_fraction
    for mode in config.modes:
        report.accuracies[mode] = {
            seed: run_mode(config, mode, seed) for seed in config.seeds
        }
    return report


def with_noise(config: ExperimentConfig, noise_rate: float) -> ExperimentConfig:
    return replace(config, noise_rate=noise_rate)
