"""Synthetic epoched EEG with planted class-dependent band structure.

Trials are 1/f-shaped Gaussian background noise, independent per channel,
with optional planted effects: for trials of a given class, band-limited
power on a given channel is raised (or lowered) by a multiplier relative
to the background's band power. Effects start at the cue, so pre/post
contrasts (ERD-style) are present by construction.

Every random draw comes from a counter-based Philox stream keyed by
(seed, purpose, trial, channel), so generation is bit-reproducible and
trivially parallelizable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import butter, sosfiltfilt, sosfreqz

from .epochs import EpochSet
from .filterbank import BandGrid, BandSpec
from .preprocess import round_half_away

# Background components below this frequency are omitted: they mimic a
# hardware high-pass and keep broadband variance estimates stable.
BACKGROUND_FLOOR_HZ = 1.0

_PURPOSE_BACKGROUND = 0
_PURPOSE_EFFECT = 1


@dataclass(frozen=True)
class PlantedEffect:
    """One class-conditional band-power manipulation.

    Attributes:
        class_name: Trials of this class receive the effect.
        channel: Channel the effect lands on.
        band: Frequency band manipulated.
        multiplier: Target band-power ratio versus background; values
            above 1 add band-limited noise, values below 1 attenuate the
            in-band component.
    """

    class_name: str
    channel: str
    band: BandSpec
    multiplier: float


@dataclass
class SynthSpec:
    """Recipe for one synthetic EpochSet.

    Attributes:
        fs_hz: Sampling rate.
        n_trials_per_class: Trials generated for each class.
        trial_s: Trial length in seconds.
        cue_s: Cue onset within the trial, in seconds; planted effects
            start here.
        classes: Class names; at least two.
        channels: Channel names.
        background_exponent: 1/f^exponent spectral slope of the noise.
        background_amplitude: RMS of the background noise.
        effects: Planted effects.
        seed: Master seed for all streams.
    """

    fs_hz: float = 250.0
    n_trials_per_class: int = 100
    trial_s: float = 7.0
    cue_s: float = 3.0
    classes: tuple[str, ...] = ("left", "right")
    channels: tuple[str, ...] = ("C3", "Cz", "C4")
    background_exponent: float = 1.0
    background_amplitude: float = 1.0
    effects: tuple[PlantedEffect, ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.classes) < 2:
            raise ValueError(f"need >= 2 classes, got {self.classes}")
        if not 0 <= self.cue_s < self.trial_s:
            raise ValueError(
                f"cue_s {self.cue_s} outside trial of {self.trial_s} s"
            )
        grid_bands = set(BandGrid.default().bands)
        for effect in self.effects:
            if effect.multiplier <= 0:
                raise ValueError(
                    f"multiplier must be positive, got {effect.multiplier}"
                )
            if effect.band not in grid_bands:
                raise ValueError(
                    f"band {effect.band.label} is not in the default grid"
                )
            if effect.class_name not in self.classes:
                raise ValueError(f"unknown effect class {effect.class_name!r}")
            if effect.channel not in self.channels:
                raise ValueError(f"unknown effect channel {effect.channel!r}")

    @property
    def n_samples(self) -> int:
        return round_half_away(self.trial_s * self.fs_hz)

    @property
    def cue_sample(self) -> int:
        return round_half_away(self.cue_s * self.fs_hz)


def _stream(seed: int, purpose: int, trial: int, channel: int) -> np.random.Generator:
    """Independent Philox stream for one (purpose, trial, channel)."""
    key = (purpose << 56) | (trial << 24) | channel
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, key]))


def _background_profile(spec: SynthSpec, n: int) -> np.ndarray:
    """rfft amplitude profile of the background, normalized so the
    expected per-sample variance equals background_amplitude^2."""
    freqs = np.fft.rfftfreq(n, d=1.0 / spec.fs_hz)
    profile = np.zeros_like(freqs)
    active = freqs >= BACKGROUND_FLOOR_HZ
    profile[active] = freqs[active] ** (-spec.background_exponent / 2.0)
    profile *= spec.background_amplitude / math.sqrt(_expected_variance(profile, n))
    return profile


def _expected_variance(profile: np.ndarray, n: int) -> float:
    """Expected variance of irfft(rfft(white) * profile) for unit white noise."""
    weights = np.full(profile.size, 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    return float(np.sum(weights * profile**2) / n)


def _band_sos(band: BandSpec, fs_hz: float) -> np.ndarray:
    return butter(4, [band.lo_hz, band.hi_hz], btype="bandpass", fs=fs_hz, output="sos")


def _band_gain(band: BandSpec, fs_hz: float, n: int) -> np.ndarray:
    """Amplitude gain of the zero-phase band filter on an n-point rfft grid."""
    freqs = np.fft.rfftfreq(n, d=1.0 / fs_hz)
    _, response = sosfreqz(_band_sos(band, fs_hz), worN=freqs, fs=fs_hz)
    # Forward-backward application squares the magnitude response.
    return np.abs(response) ** 2


def band_power_series(
    epochs: EpochSet, channel: int | str, band: BandSpec
) -> np.ndarray:
    """Per-trial band power over the post-cue segment.

    Band power is the variance of the 4th-order zero-phase Butterworth
    band-passed signal, measured from the cue to the end of the trial
    (the region where planted effects live).
    """
    idx = epochs.channel_index(channel) if isinstance(channel, str) else int(channel)
    segment = np.asarray(
        epochs.data[:, idx, epochs.cue_sample :], dtype=np.float64
    )
    sos = _band_sos(band, epochs.fs_hz)
    filtered = sosfiltfilt(sos, segment, axis=-1, padtype="even")
    return np.var(filtered, axis=-1)


def generate(spec: SynthSpec) -> EpochSet:
    """Generate one synthetic EpochSet from a spec.

    Background: spectrally shaped Gaussian noise per channel
    (1/f^exponent above 1 Hz). For each planted effect matching a
    trial's class, the post-cue segment is modified on the effect's
    channel: multipliers above 1 add noise filtered through the band
    filter, scaled so the measured band power rises by the multiplier;
    multipliers below 1 scale the in-band spectral content by
    sqrt(multiplier). Deterministic for a given seed.

    Args:
        spec: Validated recipe.

    Returns:
        EpochSet with class-blocked labels and cue_sample at the cue.
    """
    n = spec.n_samples
    cue = spec.cue_sample
    post = n - cue
    n_channels = len(spec.channels)
    labels = [c for c in spec.classes for _ in range(spec.n_trials_per_class)]
    n_trials = len(labels)

    profile = _background_profile(spec, n)
    white = np.empty((n_trials, n_channels, n), dtype=np.float64)
    for t in range(n_trials):
        for c in range(n_channels):
            white[t, c] = _stream(
                spec.seed, _PURPOSE_BACKGROUND, t, c
            ).standard_normal(n)
    data = np.fft.irfft(np.fft.rfft(white, axis=-1) * profile, n=n, axis=-1)

    # Expected background band power on the post-cue grid, per band, as a
    # calibration target for planted noise.
    post_profile = _background_profile(spec, post)
    post_freqs = np.fft.rfftfreq(post, d=1.0 / spec.fs_hz)
    for e_idx, effect in enumerate(spec.effects):
        ch = spec.channels.index(effect.channel)
        gain = _band_gain(effect.band, spec.fs_hz, post)
        background_band_power = _expected_variance(post_profile * gain, post)
        m = effect.multiplier
        if m >= 1.0:
            added_power_unit = _expected_variance(gain * gain, post)
            scale = math.sqrt(
                (m - 1.0) * background_band_power / added_power_unit
            )
            sos = _band_sos(effect.band, spec.fs_hz)
            for t in range(n_trials):
                if labels[t] != effect.class_name:
                    continue
                noise = _stream(
                    spec.seed, _PURPOSE_EFFECT + e_idx, t, ch
                ).standard_normal(post)
                data[t, ch, cue:] += scale * sosfiltfilt(sos, noise, padtype="even")
        else:
            in_band = (post_freqs >= effect.band.lo_hz) & (
                post_freqs <= effect.band.hi_hz
            )
            factor = np.where(in_band, math.sqrt(m), 1.0)
            for t in range(n_trials):
                if labels[t] != effect.class_name:
                    continue
                segment = np.fft.rfft(data[t, ch, cue:])
                data[t, ch, cue:] = np.fft.irfft(segment * factor, n=post)

    return EpochSet(
        subject_id=f"synth-{spec.seed}",
        fs_hz=spec.fs_hz,
        channel_names=list(spec.channels),
        labels=labels,
        cue_sample=cue,
        data=data,
    )


def measured_band_power_ratio(
    epochs: EpochSet,
    channel: int | str,
    band: BandSpec,
    class_a: str,
    class_b: str,
) -> float:
    """Ratio of mean per-trial post-cue band power between two classes.

    Used to verify planting calibration: a planted multiplier m on
    (class_a, channel, band) should put this ratio near m when class_b
    carries no effect.

    Args:
        epochs: Generated set.
        channel: Channel to measure.
        band: Band to measure.
        class_a: Numerator class.
        class_b: Denominator class.

    Returns:
        mean(band power | class_a) / mean(band power | class_b); exactly
        1.0 when the classes are the same.

    Raises:
        ValueError: Either class has no trials.
    """
    powers = band_power_series(epochs, channel, band)
    labels = np.asarray(epochs.labels, dtype=object)
    means = {}
    for cls in (class_a, class_b):
        mask = labels == cls
        if not np.any(mask):
            raise ValueError(f"class {cls!r} has no trials")
        means[cls] = float(np.mean(powers[mask]))
    return means[class_a] / means[class_b]
