"""Channel scoring, band ranking, and their exact hand examples."""

import math

import numpy as np
import pytest

from onechan.filterbank import BandGrid, BandSpec, decompose
from onechan.selection import (
    BandScore,
    ChannelScore,
    fisher_ratio_scores,
    log_variance,
    pearson_ratio_scores,
    pooled_ratio,
    rank_and_group_bands,
    select_channel,
    trial_channel_feature,
)

from conftest import make_epochs, sinusoid


def oracle_pooled_ratio(features: np.ndarray, row: int) -> float:
    """Independent two-pass recomputation of the pooled ratio."""
    mu_i = np.mean(features[row])
    var_i = np.var(features[row])
    mu_all = np.mean(features)
    var_all = np.var(features)
    denom = var_i + var_all
    if denom == 0.0:
        return 0.0
    return (mu_i - mu_all) ** 2 / denom


class TestLogVariance:
    def test_white_noise_near_zero(self, rng):
        value = log_variance(rng.standard_normal(500))
        assert abs(value) <= 0.2

    def test_all_zero_hits_floor(self):
        assert log_variance(np.zeros(100)) == math.log(1e-12)

    def test_scaling_by_two_adds_log4(self, rng):
        x = rng.standard_normal(400)
        delta = log_variance(2.0 * x) - log_variance(x)
        assert abs(delta - math.log(4.0)) <= 1e-9


class TestFisherScores:
    def test_hand_example_exact(self):
        features = np.array(
            [[2.0] * 4, [0.0] * 4, [0.0] * 4]
        )
        assert pooled_ratio(features, 0)[4] == 2.0
        assert pooled_ratio(features, 1)[4] == 0.5
        assert pooled_ratio(features, 2)[4] == 0.5

    def test_hand_example_moments(self):
        features = np.array([[2.0] * 4, [0.0] * 4, [0.0] * 4])
        mu_i, sigma_i, mu_all, sigma_all, fr = pooled_ratio(features, 0)
        assert mu_i == 2.0
        assert sigma_i == 0.0
        assert mu_all == pytest.approx(2.0 / 3.0, abs=0)
        assert sigma_all**2 == pytest.approx(8.0 / 9.0, rel=1e-15)
        assert fr == 2.0

    def test_single_candidate_fr_zero(self, rng):
        epochs = make_epochs(
            rng.standard_normal((4, 2, 100)),
            ["a", "b", "a", "b"],
            channel_names=["C3", "Cz"],
        )
        scores = fisher_ratio_scores(epochs, candidates=["C3"])
        assert len(scores) == 1
        assert scores[0].fr == 0.0
        assert scores[0].mu_i == scores[0].mu_all

    def test_identical_channels_all_zero_c3_selected(self, rng):
        one = rng.standard_normal((4, 1, 100))
        data = np.concatenate([one, one, one], axis=1)
        epochs = make_epochs(
            data, ["a", "b", "a", "b"], channel_names=["C3", "Cz", "C4"]
        )
        scores = fisher_ratio_scores(epochs)
        assert all(s.fr == 0.0 for s in scores)
        assert select_channel(scores) == "C3"

    def test_matches_oracle_small_instances(self, rng):
        for _ in range(20):
            n_trials = int(rng.integers(2, 9))
            features = rng.standard_normal((3, n_trials))
            for row in range(3):
                got = pooled_ratio(features, row)[4]
                assert got == pytest.approx(
                    oracle_pooled_ratio(features, row), abs=1e-9
                )

    def test_full_pipeline_matches_oracle(self, rng):
        epochs = make_epochs(
            rng.standard_normal((6, 3, 120)),
            ["a", "b"] * 3,
            channel_names=["C3", "Cz", "C4"],
        )
        scores = fisher_ratio_scores(epochs)
        features = np.array(
            [
                [trial_channel_feature(epochs, t, c) for t in range(6)]
                for c in ["C3", "Cz", "C4"]
            ]
        )
        for i, score in enumerate(scores):
            assert score.fr == pytest.approx(
                oracle_pooled_ratio(features, i), abs=1e-9
            )

    def test_class_aware_requires_two_classes(self, rng):
        epochs = make_epochs(
            rng.standard_normal((3, 2, 100)),
            ["a", "b", "c"],
            channel_names=["C3", "Cz"],
        )
        with pytest.raises(ValueError, match="2 classes"):
            fisher_ratio_scores(epochs, class_aware=True)

    def test_class_aware_separates_shifted_channel(self, rng):
        data = rng.standard_normal((20, 2, 200))
        labels = ["a", "b"] * 10
        for t, label in enumerate(labels):
            if label == "a":
                data[t, 0] *= 4.0
        epochs = make_epochs(data, labels, channel_names=["C3", "Cz"])
        scores = fisher_ratio_scores(epochs, class_aware=True)
        by_name = {s.channel: s.fr for s in scores}
        assert by_name["C3"] > by_name["Cz"]


class TestSelectChannel:
    def _scores(self, frs: dict) -> list:
        return [
            ChannelScore(name, 0.0, 0.0, 0.0, 0.0, fr)
            for name, fr in frs.items()
        ]

    def test_argmax(self):
        assert select_channel(self._scores({"C3": 0.1, "Cz": 0.3, "C4": 0.2})) == "Cz"

    def test_tie_break_priority(self):
        assert select_channel(self._scores({"Cz": 0.5, "C4": 0.5, "C3": 0.5})) == "C3"
        assert select_channel(self._scores({"Cz": 0.5, "C4": 0.5})) == "C4"
        assert select_channel(self._scores({"Cz": 0.5, "P3": 0.5, "F3": 0.5})) == "Cz"
        assert select_channel(self._scores({"P3": 0.5, "F3": 0.5})) == "F3"

    def test_single_entry(self):
        assert select_channel(self._scores({"Cz": 0.0})) == "Cz"

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            select_channel([])


class TestPearsonScores:
    def test_hand_example_exact(self):
        features = np.array([[1.0, 1.0], [3.0, 3.0]])
        mu_i, sigma_i, mu_all, sigma_all, pr = pooled_ratio(features, 0)
        assert mu_all == 2.0
        assert sigma_i == 0.0
        assert sigma_all**2 == 1.0
        assert pr == 1.0

    def test_boosted_band_ranks_top(self, rng):
        fs, n = 250.0, 750
        data = rng.standard_normal((8, 3, n))
        for t in range(8):
            data[t, 0] += 6.0 * sinusoid(10.0, fs, n, phase=float(t))
        epochs = make_epochs(
            data, ["a", "b"] * 4, channel_names=["C3", "Cz", "C4"]
        )
        dec = decompose(epochs)
        scores = pearson_ratio_scores(dec, "C3")
        best = max(scores, key=lambda s: s.pr)
        assert (best.band.lo_hz, best.band.hi_hz) == (8.0, 12.0)

    def test_matches_oracle(self, rng):
        epochs = make_epochs(
            rng.standard_normal((5, 3, 500)),
            ["a", "b", "a", "b", "a"],
            channel_names=["C3", "Cz", "C4"],
        )
        dec = decompose(epochs)
        scores = pearson_ratio_scores(dec, "Cz")
        for j, score in enumerate(scores):
            features = np.array(
                [
                    [log_variance(dec.values[t, c, j]) for t in range(5)]
                    for c in range(3)
                ]
            )
            assert score.pr == pytest.approx(
                oracle_pooled_ratio(features, 1), abs=1e-9
            )

    def test_selected_must_be_candidate(self, rng):
        epochs = make_epochs(
            rng.standard_normal((2, 3, 500)),
            ["a", "b"],
            channel_names=["C3", "Cz", "C4"],
        )
        dec = decompose(epochs)
        with pytest.raises(ValueError, match="candidates"):
            pearson_ratio_scores(dec, "C3", candidates=["Cz", "C4"])


class TestRankAndGroup:
    def _scores(self, prs: list[float]) -> list[BandScore]:
        return [
            BandScore(band, 0.0, 0.0, 0.0, 0.0, pr)
            for band, pr in zip(BandGrid.default(), prs)
        ]

    def test_example_ordering(self):
        prs = [0.1, 0.9, 0.3, 0.2, 0.5, 0.4, 0.8, 0.7]
        ranked, groups = rank_and_group_bands(self._scores(prs))
        assert (ranked[0].lo_hz, ranked[0].hi_hz) == (12.0, 16.0)
        assert groups[2] == ranked[:2]
        assert [b.lo_hz for b in ranked] == [12.0, 32.0, 36.0, 24.0, 28.0, 16.0, 20.0, 8.0]

    def test_all_equal_prefers_low_frequency(self):
        _, groups = rank_and_group_bands(self._scores([0.5] * 8))
        assert [b.lo_hz for b in groups[3]] == [8.0, 12.0, 16.0]

    def test_group_keys_one_to_six(self):
        _, groups = rank_and_group_bands(self._scores([0.0] * 8), n_max=6)
        assert sorted(groups) == [1, 2, 3, 4, 5, 6]

    def test_too_few_bands_rejected(self):
        with pytest.raises(ValueError):
            rank_and_group_bands(self._scores([0.0] * 8)[:4], n_max=6)


class TestInvariances:
    def _setup(self, rng):
        data = rng.standard_normal((10, 3, 600))
        data[:, 1] *= 1.7  # make scores non-degenerate
        for t in range(0, 10, 2):
            data[t, 0] += 4.0 * sinusoid(10.0, 250.0, 600, phase=float(t))
        return make_epochs(
            data, ["a", "b"] * 5, channel_names=["C3", "Cz", "C4"]
        )

    def test_common_scaling_preserves_ordering(self, rng):
        epochs = self._setup(rng)
        scaled = make_epochs(
            epochs.data * 3.0,
            list(epochs.labels),
            channel_names=list(epochs.channel_names),
        )
        base_scores = fisher_ratio_scores(epochs)
        scaled_scores = fisher_ratio_scores(scaled)
        assert select_channel(base_scores) == select_channel(scaled_scores)

        base_rank = [
            s.band.label
            for s in sorted(
                pearson_ratio_scores(decompose(epochs), "C3"),
                key=lambda s: (-s.pr, s.band.lo_hz),
            )
        ]
        scaled_rank = [
            s.band.label
            for s in sorted(
                pearson_ratio_scores(decompose(scaled), "C3"),
                key=lambda s: (-s.pr, s.band.lo_hz),
            )
        ]
        assert base_rank == scaled_rank

    def test_trial_permutation_invariant(self, rng):
        epochs = self._setup(rng)
        perm = rng.permutation(epochs.n_trials)
        shuffled = make_epochs(
            epochs.data[perm],
            [epochs.labels[i] for i in perm],
            channel_names=list(epochs.channel_names),
        )
        for base, other in zip(
            fisher_ratio_scores(epochs), fisher_ratio_scores(shuffled)
        ):
            assert base.fr == pytest.approx(other.fr, abs=1e-12)
        for base, other in zip(
            pearson_ratio_scores(decompose(epochs), "C3"),
            pearson_ratio_scores(decompose(shuffled), "C3"),
        ):
            assert base.pr == pytest.approx(other.pr, abs=1e-12)
