"""Per-trial feature extraction.

Two feature families: the band-group features fed to the classifier
(per ranked band: log variance, Hjorth mobility, Welch log band power),
and the ERD percent-change features used by the baseline comparison.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import butter, sosfiltfilt, welch

from .epochs import EpochSet
from .filterbank import BandDecomposition, BandSpec
from .preprocess import window_samples
from .selection import LOG_FLOOR, log_variance


@dataclass
class FeatureMatrix:
    """Trials-by-features matrix with provenance names and labels.

    Attributes:
        values: float64 matrix of shape (n_trials, n_features).
        feature_names: Unique column names encoding (band, feature kind).
        labels: Per-trial class names.
    """

    values: np.ndarray
    feature_names: list[str]
    labels: list[str]

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {self.values.shape}")
        if self.values.shape[1] != len(self.feature_names):
            raise ValueError(
                f"{len(self.feature_names)} names for "
                f"{self.values.shape[1]} columns"
            )
        if self.values.shape[0] != len(self.labels):
            raise ValueError(
                f"{len(self.labels)} labels for {self.values.shape[0]} rows"
            )
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")

    @property
    def n_trials(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def to_csv(self, path: str | Path) -> None:
        """Write the matrix as CSV: feature columns plus a final label column."""
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow([*self.feature_names, "label"])
            for row, label in zip(self.values, self.labels):
                writer.writerow([repr(float(v)) for v in row] + [label])


def hjorth_mobility(signal: np.ndarray) -> float:
    """sqrt(var(first difference) / var(signal)), 0 for constant input."""
    x = np.asarray(signal, dtype=np.float64)
    var = float(np.var(x))
    var_diff = float(np.var(np.diff(x)))
    if var <= 0.0:
        return 0.0
    return math.sqrt(var_diff / var)


def welch_log_band_power(signal: np.ndarray, fs_hz: float, band: BandSpec) -> float:
    """Log of Welch band power integrated over the band limits.

    Welch settings: 1 s Hann segments with 50% overlap; signals shorter
    than one segment fall back to a single full-length segment.
    """
    x = np.asarray(signal, dtype=np.float64)
    nperseg = min(x.size, int(round(fs_hz)))
    freqs, psd = welch(
        x, fs=fs_hz, window="hann", nperseg=nperseg, noverlap=nperseg // 2
    )
    in_band = (freqs >= band.lo_hz) & (freqs <= band.hi_hz)
    if int(np.count_nonzero(in_band)) >= 2:
        power = float(np.trapezoid(psd[in_band], freqs[in_band]))
    else:
        # Degenerate frequency resolution: fall back to the nearest bin
        # scaled by the band width.
        nearest = int(np.argmin(np.abs(freqs - band.center_hz)))
        power = float(psd[nearest]) * band.width_hz
    return math.log(max(power, LOG_FLOOR))


def extract_band_features(
    dec: BandDecomposition,
    selected: int | str,
    group: list[BandSpec],
    labels: list[str] | None = None,
) -> FeatureMatrix:
    """Features of the selected channel over a ranked band group.

    Per trial and per band, in group order: log variance of the band
    signal, Hjorth mobility of the band signal, and Welch log band power
    of the band signal integrated over the band limits. Column count is
    3 * len(group).

    Args:
        dec: Band decomposition holding the selected channel.
        selected: Channel index or name.
        group: Ranked bands to extract; each must be in dec.bands.
        labels: Per-trial class names to attach; empty strings if omitted.

    Returns:
        FeatureMatrix with one row per trial.

    Raises:
        ValueError: Empty group or band missing from the decomposition.
    """
    if not group:
        raise ValueError("band group is empty")
    ch = dec.channel_index(selected)
    band_idx = []
    for band in group:
        try:
            band_idx.append(dec.bands.index(band))
        except ValueError:
            raise ValueError(
                f"band {band.label} not in decomposition grid"
            ) from None

    names: list[str] = []
    for band in group:
        names.extend(
            [f"{band.label}_logvar", f"{band.label}_mobility", f"{band.label}_logbp"]
        )
    values = np.empty((dec.n_trials, 3 * len(group)))
    for t in range(dec.n_trials):
        col = 0
        for band, j in zip(group, band_idx):
            x = dec.values[t, ch, j]
            values[t, col] = log_variance(x)
            values[t, col + 1] = hjorth_mobility(x)
            values[t, col + 2] = welch_log_band_power(x, dec.fs_hz, band)
            col += 3
    if labels is None:
        labels = [""] * dec.n_trials
    return FeatureMatrix(values=values, feature_names=names, labels=list(labels))


@dataclass
class ErdsConfig:
    """Settings for ERD percent-change features.

    Attributes:
        reference_window: (start, end) seconds relative to the cue;
            negative values are pre-cue.
        action_window: (start, end) seconds relative to the cue.
        bands: Bands whose power change is measured.
    """

    reference_window: tuple[float, float] = (-2.0, -0.5)
    action_window: tuple[float, float] = (0.5, 2.5)
    bands: tuple[BandSpec, ...] = field(
        default_factory=lambda: (BandSpec(8.0, 12.0), BandSpec(16.0, 24.0))
    )

    def __post_init__(self) -> None:
        r0, r1 = self.reference_window
        a0, a1 = self.action_window
        if not (r1 > r0 and a1 > a0):
            raise ValueError("windows must have positive length")
        if max(r0, a0) < min(r1, a1):
            raise ValueError(
                f"reference {self.reference_window} and action "
                f"{self.action_window} windows overlap"
            )


def erds_percent(
    epochs: EpochSet, cfg: ErdsConfig, channel: int | str, band: BandSpec
) -> np.ndarray:
    """Per-trial ERD%: 100 * (A - R) / R for one channel and band.

    A and R are band powers (variance of the 4th-order zero-phase
    Butterworth band-passed signal) in the action and reference windows;
    R is floored at 1e-12.

    Args:
        epochs: Input set retaining both windows around the cue.
        cfg: Window definitions.
        channel: Channel index or name.
        band: Band to measure.

    Returns:
        float64 array of length n_trials.

    Raises:
        ValueError: Either window falls outside the trial.
    """
    idx = epochs.channel_index(channel) if isinstance(channel, str) else int(channel)
    fs = epochs.fs_hz
    r_lo, r_hi = window_samples(epochs.cue_sample, fs, *cfg.reference_window)
    a_lo, a_hi = window_samples(epochs.cue_sample, fs, *cfg.action_window)
    for name, (lo, hi) in (("reference", (r_lo, r_hi)), ("action", (a_lo, a_hi))):
        if lo < 0 or hi > epochs.n_samples:
            raise ValueError(
                f"{name} window maps to samples [{lo}, {hi}) outside trial "
                f"of {epochs.n_samples} samples (cue at {epochs.cue_sample})"
            )
    sos = butter(4, [band.lo_hz, band.hi_hz], btype="bandpass", fs=fs, output="sos")
    filtered = sosfiltfilt(
        sos, np.asarray(epochs.data[:, idx, :], dtype=np.float64), axis=-1
    )
    action = np.var(filtered[:, a_lo:a_hi], axis=-1)
    reference = np.var(filtered[:, r_lo:r_hi], axis=-1)
    # Floor only the denominator so A == R gives exactly 0.
    return 100.0 * (action - reference) / np.maximum(reference, 1e-12)


def extract_erds_features(
    epochs: EpochSet, cfg: ErdsConfig, channels: list[str] | tuple[str, ...]
) -> FeatureMatrix:
    """ERD% features: one column per (channel, band).

    Args:
        epochs: Input set retaining both windows around the cue.
        cfg: Window and band definitions.
        channels: Channels to include, in column order.

    Returns:
        FeatureMatrix with n_channels * n_bands columns and the set's
        labels attached.
    """
    columns: list[np.ndarray] = []
    names: list[str] = []
    for ch in channels:
        for band in cfg.bands:
            columns.append(erds_percent(epochs, cfg, ch, band))
            names.append(f"{ch}_{band.label}_erds")
    return FeatureMatrix(
        values=np.column_stack(columns),
        feature_names=names,
        labels=list(epochs.labels),
    )
