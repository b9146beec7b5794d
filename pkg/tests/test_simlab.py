from dataclasses import replace

import numpy as np
import pytest

from curriculearn.simlab import (
    ExperimentConfig,
    SequentialSoftmaxRegression,
    gen_dataset,
    run_experiment,
    run_mode,
    train_learner,
    _phase_orders,
)

FAST = ExperimentConfig(
    n_train=600,
    n_test=400,
    shards=4,
    seeds=(0, 1),
    modes=("baseline", "annealing"),
)


class TestGenDataset:
    def test_zero_noise_has_no_corruption(self):
        train, _ = gen_dataset(replace(FAST, noise_rate=0.0), seed=0)
        assert not train.corrupted.any()

    def test_corruption_rate_concentrates(self):
        config = replace(FAST, n_train=10_000, noise_rate=0.3)
        train, _ = gen_dataset(config, seed=1)
        assert train.corrupted_fraction == pytest.approx(0.30, abs=0.02)

    def test_same_seed_identical(self):
        first_train, first_test = gen_dataset(FAST, seed=5)
        second_train, second_test = gen_dataset(FAST, seed=5)
        assert np.array_equal(first_train.features, second_train.features)
        assert np.array_equal(first_train.labels, second_train.labels)
        assert np.array_equal(first_test.features, second_test.features)

    def test_test_split_is_clean(self):
        train, test = gen_dataset(FAST, seed=2)
        assert not test.corrupted.any()
        assert (test.quality == 1.0).all()

    def test_corruption_only_on_low_quality_end(self):
        train, _ = gen_dataset(replace(FAST, n_train=5000), seed=3)
        corrupted_quality = train.quality[train.corrupted].mean()
        clean_quality = train.quality[~train.corrupted].mean()
        assert corrupted_quality < clean_quality

    def test_sample_view(self):
        train, _ = gen_dataset(FAST, seed=0)
        view = train.view(0)
        assert len(view.features) == FAST.dim
        assert 0.0 <= view.quality <= 1.0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(noise_rate=1.0)
        with pytest.raises(ValueError):
            ExperimentConfig(modes=("time-travel",))
        with pytest.raises(ValueError):
            ExperimentConfig(seeds=())
        with pytest.raises(ValueError):
            ExperimentConfig(classes=5, dim=3)

    def test_mode_aliases(self):
        config = ExperimentConfig(modes=("baseline-uniform",))
        assert config.modes == ("baseline",)


class TestLearner:
    def test_separable_data_reaches_high_accuracy(self):
        config = replace(FAST, feature_noise=0.1, noise_rate=0.0, n_train=1200)
        train, test = gen_dataset(config, seed=0)
        orders = _phase_orders(config, train, "baseline", seed=0)
        model = train_learner(config, train, orders)
        assert model.accuracy(test.features, test.labels) > 0.95

    def test_zero_epochs_is_chance_level(self):
        config = replace(FAST, epochs_per_phase=0)
        train, test = gen_dataset(config, seed=0)
        model = train_learner(config, train, _phase_orders(config, train, "baseline", 0))
        accuracy = model.accuracy(test.features, test.labels)
        assert accuracy == pytest.approx(1.0 / config.classes, abs=0.08)

    def test_deterministic_weights(self):
        train, test = gen_dataset(FAST, seed=4)
        orders = _phase_orders(FAST, train, "annealing", seed=4)
        first = train_learner(FAST, train, orders)
        second = train_learner(FAST, train, orders)
        assert np.array_equal(first.weights, second.weights)

    def test_loss_is_positive(self):
        model = SequentialSoftmaxRegression(dim=4, classes=3, step_size=0.1)
        x = np.array([1.0, 0.0, 0.0, 0.0, 1.0])
        assert model.loss(x, 1) > 0.0


class TestPhaseOrders:
    def test_annealing_final_phase_is_top_quality_shard(self):
        train, _ = gen_dataset(FAST, seed=7)
        orders = _phase_orders(FAST, train, "annealing", seed=7)
        final = orders[-1]
        shard_size = len(final)
        assert shard_size == len(train) // FAST.shards
        # every sample in the final phase outranks every excluded sample
        cutoff = np.sort(train.quality)[len(train) - shard_size]
        assert (train.quality[final] >= cutoff).all()

    def test_expanding_first_phase_is_lowest_quality_shard(self):
        train, _ = gen_dataset(FAST, seed=7)
        orders = _phase_orders(FAST, train, "expanding", seed=7)
        first = orders[0]
        cutoff = np.sort(train.quality)[len(first) - 1]
        assert (train.quality[first] <= cutoff).all()

    def test_baseline_phases_cover_everything(self):
        train, _ = gen_dataset(FAST, seed=7)
        orders = _phase_orders(FAST, train, "baseline", seed=7)
        assert len(orders) == FAST.shards
        for order in orders:
            assert sorted(order.tolist()) == list(range(len(train)))


class TestRunExperiment:
    def test_report_structure_and_bounds(self):
        report = run_experiment(FAST)
        assert set(report.accuracies) == {"baseline", "annealing"}
        for runs in report.accuracies.values():
            assert set(runs) == {0, 1}
            assert all(0.0 <= acc <= 1.0 for acc in runs.values())
        payload = report.to_dict()
        assert "means" in payload and "deltas" in payload
        assert "baseline-annealing" in payload["deltas"]
        assert report.summary_table().count("\n") == len(report.accuracies)

    def test_bit_identical_reports(self):
        first = run_experiment(FAST)
        second = run_experiment(FAST)
        assert first.to_dict() == second.to_dict()

    def test_all_modes_above_chance(self):
        config = replace(FAST, modes=("baseline", "expanding", "annealing", "loss-truncation"))
        report = run_experiment(config)
        for mode in config.modes:
            assert report.mode_mean(mode) > 1.0 / config.classes

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="unknown mode"):
            run_mode(FAST, "sideways", 0)
