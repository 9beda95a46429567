"""Channel selection and band ranking.

Channels are scored with Fisher's ratio over per-trial log-variance
features; the winning channel's sub-bands are then scored with the same
ratio form (Pearson's ratio) against band-matched statistics pooled over
all candidate channels, ranked, and grouped into top-n sets. Labels are
never consulted by the default scoring path.

All statistics use population (1/N) variance. Means, variances, and mean
differences are computed in sum form with one final rounding each, so
integer-valued features produce exactly representable scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .epochs import EpochSet
from .filterbank import BandDecomposition, BandSpec

LOG_FLOOR = 1e-12

# Tie-break priority for channel selection; channels outside the motor
# triple fall back to lexicographic order after it.
_CHANNEL_PRIORITY = {"C3": 0, "C4": 1, "Cz": 2}


@dataclass(frozen=True)
class ChannelScore:
    """Fisher-ratio score of one candidate channel.

    Attributes:
        channel: Channel name.
        mu_i: Mean of the channel's per-trial features.
        sigma_i: Population standard deviation of the same.
        mu_all: Mean of the features pooled over all candidates.
        sigma_all: Population standard deviation of the pooled features.
        fr: The ratio (mu_i - mu_all)^2 / (sigma_i^2 + sigma_all^2),
            0 when the denominator vanishes.
    """

    channel: str
    mu_i: float
    sigma_i: float
    mu_all: float
    sigma_all: float
    fr: float


@dataclass(frozen=True)
class BandScore:
    """Pearson-ratio score of one band on the selected channel.

    Attributes:
        band: The scored band.
        mu_xij: Mean of the selected channel's per-trial band features.
        sigma_xij: Population standard deviation of the same.
        mu_xallj: Mean over the same band's features pooled across all
            candidate channels.
        sigma_xallj: Population standard deviation of the pooled features.
        pr: The ratio (mu_xij - mu_xallj)^2 / (sigma_xij^2 + sigma_xallj^2),
            0 when the denominator vanishes.
    """

    band: BandSpec
    mu_xij: float
    sigma_xij: float
    mu_xallj: float
    sigma_xallj: float
    pr: float


@dataclass
class SelectionResult:
    """Outcome of channel selection and band ranking.

    Attributes:
        channel_scores: Per-candidate Fisher scores.
        selected_channel: Argmax-fr channel (deterministic tie-break).
        band_scores: Per-band Pearson scores on the selected channel.
        ranked_bands: Bands in descending pr order.
        groups: Top-n band lists for n = 1..n_max.
    """

    channel_scores: list[ChannelScore]
    selected_channel: str
    band_scores: list[BandScore]
    ranked_bands: list[BandSpec]
    groups: dict[int, list[BandSpec]]


def log_variance(signal: np.ndarray) -> float:
    """Log of the population variance, floored at 1e-12.

    The floor makes constant signals produce log(1e-12) instead of -inf.
    """
    x = np.asarray(signal, dtype=np.float64)
    mean = float(np.sum(x)) / x.size
    var = float(np.sum(x * x)) / x.size - mean * mean
    return math.log(max(var, LOG_FLOOR))


def trial_channel_feature(epochs: EpochSet, trial: int, channel: int | str) -> float:
    """Per-trial channel feature: log variance of the windowed signal.

    Args:
        epochs: Windowed input set.
        trial: Trial index.
        channel: Channel index or name.

    Returns:
        log of the population variance, floored at 1e-12.
    """
    idx = epochs.channel_index(channel) if isinstance(channel, str) else int(channel)
    return log_variance(epochs.data[trial, idx, :])


def _sum_stats(values: np.ndarray) -> tuple[float, float, int]:
    """(sum, sum of squares, count) of a 1-D feature vector."""
    v = np.asarray(values, dtype=np.float64)
    return float(np.sum(v)), float(np.sum(v * v)), v.size


def _ratio(
    s_i: float, q_i: float, n_i: int, s_all: float, q_all: float, n_all: int
) -> tuple[float, float, float, float, float]:
    """Fisher-form ratio from sums, plus the four moment fields.

    Returns:
        (mu_i, sigma_i, mu_all, sigma_all, ratio).
    """
    mu_i = s_i / n_i
    mu_all = s_all / n_all
    var_i = max(q_i / n_i - mu_i * mu_i, 0.0)
    var_all = max(q_all / n_all - mu_all * mu_all, 0.0)
    # Difference of means in one rounding: (s_i*n_all - s_all*n_i)/(n_i*n_all).
    diff = (s_i * n_all - s_all * n_i) / (n_i * n_all)
    denom = var_i + var_all
    ratio = 0.0 if denom == 0.0 else diff * diff / denom
    return mu_i, math.sqrt(var_i), mu_all, math.sqrt(var_all), ratio


def pooled_ratio(
    features: np.ndarray, row: int
) -> tuple[float, float, float, float, float]:
    """Score one feature row against the pooled statistics of all rows.

    The primitive behind both channel and band scoring: compare row
    `row`'s mean/deviation with the mean/deviation pooled over the whole
    (rows, trials) matrix, and form the squared-difference ratio.

    Args:
        features: 2-D matrix, one row per group member, one column per
            trial.
        row: Row to score.

    Returns:
        (mu_i, sigma_i, mu_all, sigma_all, ratio).
    """
    values = np.asarray(features, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"features must be 2-D, got shape {values.shape}")
    s_all, q_all, n_all = _sum_stats(values.ravel())
    s_i, q_i, n_i = _sum_stats(values[row])
    return _ratio(s_i, q_i, n_i, s_all, q_all, n_all)


def fisher_ratio_scores(
    epochs: EpochSet,
    candidates: list[str] | tuple[str, ...] | None = None,
    class_aware: bool = False,
) -> list[ChannelScore]:
    """Score each candidate channel's discriminability.

    Default scoring is label-free: per channel, the mean and deviation of
    its per-trial log-variance features are compared against the same
    statistics pooled over every candidate channel. With class_aware=True
    (a sensitivity variant, requires exactly 2 classes) the two per-class
    statistics of the channel's own features are compared instead, and the
    ChannelScore fields hold class-1 stats in (mu_i, sigma_i) and class-2
    stats in (mu_all, sigma_all).

    Args:
        epochs: Windowed input set with >= 2 trials.
        candidates: Channels to score; all channels when omitted.
        class_aware: Use the labeled two-class variant.

    Returns:
        One ChannelScore per candidate, in candidate order.
    """
    if candidates is None:
        candidates = list(epochs.channel_names)
    if not candidates:
        raise ValueError("at least one candidate channel is required")
    if epochs.n_trials < 2:
        raise ValueError(f"need >= 2 trials, got {epochs.n_trials}")

    features = np.empty((len(candidates), epochs.n_trials))
    for i, name in enumerate(candidates):
        idx = epochs.channel_index(name)
        for t in range(epochs.n_trials):
            features[i, t] = log_variance(epochs.data[t, idx, :])

    scores: list[ChannelScore] = []
    if class_aware:
        classes = sorted(set(epochs.labels))
        if len(classes) != 2:
            raise ValueError(
                f"class_aware scoring requires exactly 2 classes, got {classes}"
            )
        mask = np.asarray([l == classes[0] for l in epochs.labels])
        for i, name in enumerate(candidates):
            s1, q1, n1 = _sum_stats(features[i, mask])
            s2, q2, n2 = _sum_stats(features[i, ~mask])
            mu1, sd1, mu2, sd2, fr = _ratio(s1, q1, n1, s2, q2, n2)
            scores.append(ChannelScore(name, mu1, sd1, mu2, sd2, fr))
        return scores

    for i, name in enumerate(candidates):
        mu_i, sd_i, mu_all, sd_all, fr = pooled_ratio(features, i)
        scores.append(ChannelScore(name, mu_i, sd_i, mu_all, sd_all, fr))
    return scores


def _channel_order_key(name: str) -> tuple[int, str]:
    return _CHANNEL_PRIORITY.get(name, len(_CHANNEL_PRIORITY)), name


def select_channel(scores: list[ChannelScore]) -> str:
    """The channel with the highest fr.

    Ties are broken in C3, C4, Cz order, then lexicographically.

    Raises:
        ValueError: Empty score list.
    """
    if not scores:
        raise ValueError("no channel scores to select from")
    # max() keeps the first of equal-fr entries, so sorting by the
    # tie-break key first makes ties resolve in priority order.
    ordered = sorted(scores, key=lambda s: _channel_order_key(s.channel))
    best = max(ordered, key=lambda s: s.fr)
    return best.channel


def pearson_ratio_scores(
    dec: BandDecomposition,
    selected: str,
    candidates: list[str] | tuple[str, ...] | None = None,
) -> list[BandScore]:
    """Score each band of the selected channel against pooled statistics.

    The feature is the per-trial log variance of the band signal. For
    band j, the selected channel's feature statistics are compared with
    the statistics of the same band's features pooled across all
    candidate channels.

    Args:
        dec: Band decomposition covering every candidate channel.
        selected: Channel whose bands are scored.
        candidates: Pooling channels; all decomposed channels if omitted.

    Returns:
        One BandScore per band, in grid order.
    """
    if candidates is None:
        candidates = list(dec.channel_names)
    sel_idx = dec.channel_index(selected)
    cand_idx = [dec.channel_index(c) for c in candidates]
    if sel_idx not in cand_idx:
        raise ValueError(f"selected channel {selected!r} not among candidates")

    n_trials, n_bands = dec.n_trials, dec.n_bands
    features = np.empty((len(cand_idx), n_bands, n_trials))
    for ci, c in enumerate(cand_idx):
        for j in range(n_bands):
            for t in range(n_trials):
                features[ci, j, t] = log_variance(dec.values[t, c, j])

    sel_pos = cand_idx.index(sel_idx)
    scores: list[BandScore] = []
    for j, band in enumerate(dec.bands):
        mu_i, sd_i, mu_all, sd_all, pr = pooled_ratio(features[:, j], sel_pos)
        scores.append(BandScore(band, mu_i, sd_i, mu_all, sd_all, pr))
    return scores


def rank_and_group_bands(
    scores: list[BandScore], n_max: int = 6
) -> tuple[list[BandSpec], dict[int, list[BandSpec]]]:
    """Rank bands by descending pr and build the top-n groups.

    Ties rank the lower-frequency band first.

    Args:
        scores: Band scores to rank.
        n_max: Largest group size; groups are built for n = 1..n_max.

    Returns:
        (ranked bands, {n: top-n band list}).

    Raises:
        ValueError: Fewer scored bands than n_max.
    """
    if len(scores) < n_max:
        raise ValueError(f"need >= {n_max} scored bands, got {len(scores)}")
    ranked = sorted(scores, key=lambda s: (-s.pr, s.band.lo_hz))
    ranked_bands = [s.band for s in ranked]
    groups = {n: ranked_bands[:n] for n in range(1, n_max + 1)}
    return ranked_bands, groups


def compute_selection(
    epochs: EpochSet,
    dec: BandDecomposition,
    candidates: list[str] | tuple[str, ...] | None = None,
    n_max: int = 6,
    class_aware: bool = False,
) -> SelectionResult:
    """Full selection pass: score channels, pick one, rank its bands.

    Args:
        epochs: Windowed input set (raw signals, for channel scoring).
        dec: Band decomposition of the same set (for band scoring).
        candidates: Channels in play; all channels when omitted.
        n_max: Largest band-group size.
        class_aware: Use the labeled channel-scoring variant.

    Returns:
        SelectionResult with scores, the winner, and the band groups.
    """
    channel_scores = fisher_ratio_scores(epochs, candidates, class_aware=class_aware)
    selected = select_channel(channel_scores)
    band_scores = pearson_ratio_scores(dec, selected, candidates)
    ranked_bands, groups = rank_and_group_bands(band_scores, n_max=n_max)
    return SelectionResult(
        channel_scores=channel_scores,
        selected_channel=selected,
        band_scores=band_scores,
        ranked_bands=ranked_bands,
        groups=groups,
    )
