"""Preprocessing: notch filtering, ICA artifact attenuation, windowing.

Operations are pure: each returns a new EpochSet and leaves its input
untouched. The only stochastic step is the ICA decomposition, which takes
an explicit seed, so per-subject runs can be parallelized safely.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import filtfilt, iirnotch

from .epochs import EpochSet

logger = logging.getLogger(__name__)

DEFAULT_CHANNELS = ("C3", "Cz", "C4")

# Notch frequencies at or above this fraction of fs are skipped: the
# filter is undefined near Nyquist (e.g. a 100 Hz notch at fs=125).
NOTCH_SKIP_FRACTION = 0.45


class ConvergenceError(RuntimeError):
    """ICA failed to converge within the iteration budget.

    Attributes:
        iterations: Number of iterations performed before giving up.
    """

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


@dataclass
class PreprocessConfig:
    """Settings for the preprocessing stage.

    Attributes:
        notch_hz: Power-line notch center frequencies in Hz.
        notch_q: Quality factor of each notch.
        ica_enabled: Whether to run ICA artifact attenuation.
        ica_components: Component count, or "all" for one per channel.
        ica_reject_kurtosis: Components with excess kurtosis above this
            threshold are zeroed before reconstruction.
        analysis_window: (start, end) in seconds after the cue.
        channel_subset: Channels kept by carve_window, in output order.
    """

    notch_hz: tuple[float, ...] = (50.0, 100.0)
    notch_q: float = 30.0
    ica_enabled: bool = False
    ica_components: int | str = "all"
    ica_reject_kurtosis: float = 5.0
    analysis_window: tuple[float, float] = (0.5, 2.5)
    channel_subset: tuple[str, ...] = DEFAULT_CHANNELS

    def __post_init__(self) -> None:
        t_start, t_end = self.analysis_window
        if not (t_end > t_start >= 0):
            raise ValueError(
                f"analysis_window must satisfy end > start >= 0, got "
                f"({t_start}, {t_end})"
            )
        if not self.notch_q > 0:
            raise ValueError(f"notch_q must be positive, got {self.notch_q}")
        for f0 in self.notch_hz:
            if not f0 > 0:
                raise ValueError(f"notch frequency must be positive, got {f0}")


def round_half_away(x: float) -> int:
    """Round to the nearest integer, halves away from zero.

    Used wherever seconds are converted to sample counts, so the window
    arithmetic is identical on every platform.
    """
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def window_samples(
    cue_sample: int, fs_hz: float, t_start: float, t_end: float
) -> tuple[int, int]:
    """Convert a cue-relative time window to absolute sample bounds.

    Args:
        cue_sample: Cue onset index within the trial.
        fs_hz: Sampling rate in Hz.
        t_start: Window start in seconds relative to the cue (may be
            negative for pre-cue windows).
        t_end: Window end in seconds relative to the cue.

    Returns:
        Half-open (lo, hi) sample indices.
    """
    lo = cue_sample + round_half_away(t_start * fs_hz)
    hi = cue_sample + round_half_away(t_end * fs_hz)
    return lo, hi


def notch_filter(epochs: EpochSet, cfg: PreprocessConfig) -> EpochSet:
    """Apply zero-phase second-order notch filters at each configured frequency.

    Each notch is a biquad designed from (center frequency, Q), applied
    forward-backward along time. Frequencies at or above 0.45*fs are
    skipped with a logged notice. Dimensions are unchanged.

    Args:
        epochs: Input set; samples must be finite.
        cfg: Provides notch_hz and notch_q.

    Returns:
        New EpochSet with filtered samples.
    """
    fs = epochs.fs_hz
    out = np.asarray(epochs.data, dtype=np.float64)
    # Two seconds of odd-reflection padding lets the filter's startup
    # transient settle outside the retained window.
    padlen = min(epochs.n_samples - 1, int(round(2.0 * fs)))
    for f0 in cfg.notch_hz:
        if f0 >= NOTCH_SKIP_FRACTION * fs:
            logger.info(
                "skipping notch at %g Hz: at or above %.2f*fs for fs=%g Hz",
                f0,
                NOTCH_SKIP_FRACTION,
                fs,
            )
            continue
        b, a = iirnotch(f0, cfg.notch_q, fs=fs)
        out = filtfilt(b, a, out, axis=-1, padtype="odd", padlen=padlen)
    return replace(epochs, data=out)


def _sym_decorrelation(w: np.ndarray) -> np.ndarray:
    """Orthonormalize the rows of an unmixing matrix symmetrically."""
    s, u = np.linalg.eigh(w @ w.T)
    if s[0] <= 0:
        raise np.linalg.LinAlgError("unmixing matrix is rank deficient")
    return (u * (1.0 / np.sqrt(s))) @ u.T @ w


def _fastica_parallel(
    xw: np.ndarray, w_init: np.ndarray, max_iter: int, tol: float
) -> tuple[np.ndarray, int]:
    """Fixed-point ICA on whitened data with the logcosh contrast.

    Args:
        xw: Whitened observations, shape (k, n_obs).
        w_init: Initial unmixing matrix, shape (k, k).
        max_iter: Iteration budget.
        tol: Convergence tolerance on the unmixing-matrix update.

    Returns:
        (unmixing matrix, iterations used).

    Raises:
        ConvergenceError: Tolerance not reached within max_iter.
    """
    n_obs = xw.shape[1]
    w = _sym_decorrelation(w_init)
    for iteration in range(1, max_iter + 1):
        g = np.tanh(w @ xw)
        g_prime_mean = np.mean(1.0 - g**2, axis=1)
        w_new = (g @ xw.T) / n_obs - g_prime_mean[:, np.newaxis] * w
        w_new = _sym_decorrelation(w_new)
        shift = np.max(np.abs(np.abs(np.einsum("ij,ij->i", w_new, w)) - 1.0))
        w = w_new
        if shift < tol:
            return w, iteration
    raise ConvergenceError(
        f"ICA did not converge within {max_iter} iterations "
        f"(last update {shift:.3e}, tolerance {tol:g})",
        iterations=max_iter,
    )


def _excess_kurtosis(sources: np.ndarray) -> np.ndarray:
    """Per-row excess kurtosis (0 for a Gaussian)."""
    m2 = np.mean(sources**2, axis=1)
    m4 = np.mean(sources**4, axis=1)
    return m4 / np.maximum(m2**2, 1e-300) - 3.0


def ica_clean(epochs: EpochSet, cfg: PreprocessConfig, seed: int) -> EpochSet:
    """Attenuate artifacts by zeroing high-kurtosis independent components.

    Trials are concatenated along time, decomposed with FastICA (whitening
    via eigendecomposition, symmetric decorrelation, logcosh contrast,
    at most 500 iterations, tolerance 1e-6), components whose excess
    kurtosis exceeds cfg.ica_reject_kurtosis are zeroed, and the signal is
    reconstructed and re-epoched. Deterministic for a given seed.

    Args:
        epochs: Input set with at least 2 channels.
        cfg: Provides ica_enabled, ica_components, ica_reject_kurtosis.
        seed: Seed for the random initial unmixing matrix.

    Returns:
        The input unchanged when ica_enabled is false, otherwise a new
        EpochSet with rejected components removed.

    Raises:
        ConvergenceError: Iteration budget exhausted.
        numpy.linalg.LinAlgError: Rank-deficient channel covariance.
    """
    if not cfg.ica_enabled:
        return epochs
    if epochs.n_channels < 2:
        raise ValueError("ICA requires at least 2 channels")

    n_channels = epochs.n_channels
    x = (
        np.asarray(epochs.data, dtype=np.float64)
        .transpose(1, 0, 2)
        .reshape(n_channels, -1)
    )
    mean = x.mean(axis=1, keepdims=True)
    xc = x - mean
    n_obs = xc.shape[1]

    cov = (xc @ xc.T) / n_obs
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    k = n_channels if cfg.ica_components == "all" else int(cfg.ica_components)
    if not 1 <= k <= n_channels:
        raise ValueError(
            f"ica_components must be in [1, {n_channels}], got {cfg.ica_components}"
        )
    if eigvals[k - 1] <= 1e-12 * max(eigvals[0], 1e-300):
        raise np.linalg.LinAlgError(
            "channel covariance is rank deficient; cannot whiten"
        )
    scale = np.sqrt(eigvals[:k])
    whiten = eigvecs[:, :k].T / scale[:, np.newaxis]
    dewhiten = eigvecs[:, :k] * scale[np.newaxis, :]
    xw = whiten @ xc

    rng = np.random.default_rng(seed)
    w_init = rng.standard_normal((k, k))
    w, _ = _fastica_parallel(xw, w_init, max_iter=500, tol=1e-6)

    sources = w @ xw
    kurt = _excess_kurtosis(sources)
    rejected = kurt > cfg.ica_reject_kurtosis
    if np.any(rejected):
        logger.info(
            "ICA rejecting %d/%d components (excess kurtosis above %g)",
            int(rejected.sum()),
            k,
            cfg.ica_reject_kurtosis,
        )
        sources = sources.copy()
        sources[rejected] = 0.0
    cleaned = dewhiten @ (w.T @ sources) + mean
    data = cleaned.reshape(n_channels, epochs.n_trials, epochs.n_samples)
    data = data.transpose(1, 0, 2)
    return replace(epochs, data=data)


def subset_channels(epochs: EpochSet, names: tuple[str, ...] | list[str]) -> EpochSet:
    """Keep only the named channels, in the given order.

    Raises:
        KeyError: If any requested channel is absent.
    """
    idx = [epochs.channel_index(n) for n in names]
    return replace(epochs, data=epochs.data[:, idx, :], channel_names=list(names))


def carve_window(epochs: EpochSet, cfg: PreprocessConfig) -> EpochSet:
    """Extract the analysis window and channel subset from each trial.

    Keeps samples in [cue + round(t_start*fs), cue + round(t_end*fs)) with
    halves rounded away from zero, restricted to cfg.channel_subset in the
    configured order. The output's cue_sample is 0.

    Args:
        epochs: Input set whose trials contain the full window.
        cfg: Provides analysis_window and channel_subset.

    Returns:
        New windowed EpochSet.

    Raises:
        ValueError: Window exceeds trial bounds.
        KeyError: A requested channel is absent.
    """
    t_start, t_end = cfg.analysis_window
    lo, hi = window_samples(epochs.cue_sample, epochs.fs_hz, t_start, t_end)
    if lo < 0 or hi > epochs.n_samples:
        raise ValueError(
            f"window ({t_start}, {t_end}) s maps to samples [{lo}, {hi}) "
            f"outside trial of {epochs.n_samples} samples "
            f"(cue at {epochs.cue_sample})"
        )
    idx = [epochs.channel_index(n) for n in cfg.channel_subset]
    return replace(
        epochs,
        data=epochs.data[:, idx, lo:hi],
        channel_names=list(cfg.channel_subset),
        cue_sample=0,
    )
