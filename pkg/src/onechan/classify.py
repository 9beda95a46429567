"""Discrete AdaBoost over decision stumps, plus the CV harness.

The stump search is exhaustive over every feature and every midpoint of
consecutive sorted distinct feature values, for both polarities, with a
deterministic tie-break (feature index, then threshold, then polarity +1
first). Cross-validation is repeated stratified k-fold with all shuffles
derived up front from one seed, so results are reproducible regardless
of evaluation order.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .epochs import EpochSet
from .features import FeatureMatrix, extract_band_features
from .filterbank import BandGrid, decompose
from .selection import SelectionResult

logger = logging.getLogger(__name__)

EPS_CLAMP = 1e-10
DEFAULT_ROUNDS = 100


class TrainingError(RuntimeError):
    """Boosting could not produce a usable ensemble."""


@dataclass
class Stump:
    """Depth-1 threshold classifier on one feature.

    Predicts +polarity where the feature exceeds the threshold and
    -polarity otherwise.

    Attributes:
        feature_index: Column the stump splits on.
        threshold: Split point (midpoint of two training values).
        polarity: +1 or -1.
        alpha: Vote weight in the ensemble.
    """

    feature_index: int
    threshold: float
    polarity: int
    alpha: float

    def __post_init__(self) -> None:
        if self.polarity not in (-1, 1):
            raise ValueError(f"polarity must be +1 or -1, got {self.polarity}")
        if not np.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha}")

    def decide(self, values: np.ndarray) -> np.ndarray:
        """Signed votes (+1/-1) for each row of a feature matrix."""
        above = values[:, self.feature_index] > self.threshold
        return np.where(above, self.polarity, -self.polarity).astype(np.float64)


@dataclass
class StumpEnsemble:
    """Weighted stump committee for a 2-class problem.

    Attributes:
        stumps: Accepted stumps in training order; never empty.
        classes: The two class names mapped to (-1, +1) in sorted order.
        n_features: Feature count the ensemble was trained on.
        round_errors: Weighted training error of each accepted round.
    """

    stumps: list[Stump]
    classes: tuple[str, str]
    n_features: int
    round_errors: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.stumps:
            raise ValueError("ensemble must contain at least one stump")
        if len(self.classes) != 2:
            raise ValueError(f"exactly 2 classes required, got {self.classes}")

    def decision_values(self, values: np.ndarray) -> np.ndarray:
        """Sum of weighted stump votes per row."""
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != self.n_features:
            raise ValueError(
                f"expected (n, {self.n_features}) feature matrix, "
                f"got shape {values.shape}"
            )
        total = np.zeros(values.shape[0])
        for stump in self.stumps:
            total += stump.alpha * stump.decide(values)
        return total

    def predict_signs(self, values: np.ndarray) -> np.ndarray:
        """Signed predictions; a zero vote sum maps to +1."""
        return np.where(self.decision_values(values) >= 0.0, 1, -1)


def _signed_labels(labels: list[str]) -> tuple[np.ndarray, tuple[str, str]]:
    classes = sorted(set(labels))
    if len(classes) != 2:
        raise ValueError(f"exactly 2 classes required, got {classes}")
    y = np.asarray([1 if l == classes[1] else -1 for l in labels], dtype=np.float64)
    return y, (classes[0], classes[1])


def _best_stump(
    values: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    order: np.ndarray,
    sorted_values: np.ndarray,
    boundary: np.ndarray,
) -> tuple[int, float, int, float]:
    """Exhaustive weighted stump search.

    Evaluates every candidate (feature, midpoint threshold, polarity) and
    returns the minimum-weighted-error stump, breaking exact ties by
    feature index, then ascending threshold, then polarity +1 first.

    Args:
        values: (n, f) feature matrix.
        y: Signed labels, +1/-1.
        weights: Sample weights summing to 1.
        order: (n, f) per-feature argsort of values (precomputed).
        sorted_values: (n, f) values sorted per feature (precomputed).
        boundary: (n-1, f) mask of cuts between distinct values.

    Returns:
        (feature_index, threshold, polarity, weighted_error).
    """
    n = values.shape[0]
    w_sorted = weights[order]
    y_sorted = y[order]
    w_pos = np.where(y_sorted > 0, w_sorted, 0.0)
    total = float(np.sum(weights))
    # A +1-polarity stump at cut k misclassifies positives at or below the
    # cut and negatives above it: cum_pos[k] + (total_neg - cum_neg[k]).
    cum_pos = np.cumsum(w_pos, axis=0)[:-1]
    cum_all = np.cumsum(w_sorted, axis=0)[:-1]
    total_neg = np.sum(w_sorted - w_pos, axis=0)
    err_pos = cum_pos + (total_neg - (cum_all - cum_pos))
    err_neg = total - err_pos

    # Stack as (feature, cut, polarity) so the row-major argmin implements
    # the tie-break order exactly.
    stacked = np.stack([err_pos.T, err_neg.T], axis=-1)
    stacked = np.where(boundary.T[:, :, np.newaxis], stacked, np.inf)
    flat = int(np.argmin(stacked))
    f_idx, rem = divmod(flat, stacked.shape[1] * 2)
    cut, pol_idx = divmod(rem, 2)
    if not np.isfinite(stacked[f_idx, cut, pol_idx]):
        raise TrainingError("no candidate threshold: fewer than 2 distinct rows")
    threshold = float(
        (sorted_values[cut, f_idx] + sorted_values[cut + 1, f_idx]) / 2.0
    )
    polarity = 1 if pol_idx == 0 else -1
    return f_idx, threshold, polarity, float(stacked[f_idx, cut, pol_idx])


def train_adaboost(matrix: FeatureMatrix, rounds: int = DEFAULT_ROUNDS) -> StumpEnsemble:
    """Train a discrete AdaBoost stump ensemble.

    Weights start uniform. Each round runs the exhaustive stump search;
    the round is discarded and training stops when the weighted error
    reaches 0.5, and a zero-error stump is kept and stops training. The
    vote weight is 0.5*ln((1-e)/e) with e clamped to [1e-10, 1-1e-10];
    weights are then updated multiplicatively and renormalized.

    Args:
        matrix: Training features with exactly 2 classes and >= 4 trials.
        rounds: Maximum boosting rounds.

    Returns:
        Trained ensemble with per-round errors recorded.

    Raises:
        ValueError: Class or size preconditions violated.
        TrainingError: No round produced a below-chance stump.
    """
    values = np.asarray(matrix.values, dtype=np.float64)
    y, classes = _signed_labels(matrix.labels)
    n = values.shape[0]
    if n < 4:
        raise ValueError(f"need >= 4 trials to train, got {n}")
    if np.unique(values, axis=0).shape[0] < 2:
        raise ValueError("need >= 2 distinct feature rows")

    order = np.argsort(values, axis=0, kind="stable")
    sorted_values = np.take_along_axis(values, order, axis=0)
    boundary = sorted_values[:-1] < sorted_values[1:]
    if not np.any(boundary):
        raise ValueError("need >= 2 distinct feature rows")

    weights = np.full(n, 1.0 / n)
    stumps: list[Stump] = []
    round_errors: list[float] = []
    for _ in range(rounds):
        f_idx, threshold, polarity, error = _best_stump(
            values, y, weights, order, sorted_values, boundary
        )
        if error >= 0.5:
            break
        eps = min(max(error, EPS_CLAMP), 1.0 - EPS_CLAMP)
        alpha = 0.5 * np.log((1.0 - eps) / eps)
        stump = Stump(f_idx, threshold, polarity, float(alpha))
        stumps.append(stump)
        round_errors.append(error)
        if error == 0.0:
            break
        weights = weights * np.exp(-alpha * y * stump.decide(values))
        weights = weights / np.sum(weights)
    if not stumps:
        raise TrainingError(
            "no stump achieved weighted error below 0.5; ensemble would be empty"
        )
    return StumpEnsemble(
        stumps=stumps,
        classes=classes,
        n_features=values.shape[1],
        round_errors=round_errors,
    )


def predict(model: StumpEnsemble, values: np.ndarray | FeatureMatrix) -> list[str]:
    """Class names predicted by the ensemble for each row.

    Args:
        model: Trained ensemble.
        values: Feature matrix or raw (n, n_features) array.

    Returns:
        Predicted class names, one per row.

    Raises:
        ValueError: Feature count differs from training.
    """
    if isinstance(values, FeatureMatrix):
        values = values.values
    signs = model.predict_signs(np.asarray(values, dtype=np.float64))
    return [model.classes[1] if s > 0 else model.classes[0] for s in signs]


def _stratified_fold_ids(
    labels: list[str], folds: int, rng: np.random.Generator
) -> np.ndarray:
    """Fold assignment per trial: shuffle within class, deal round-robin."""
    labels_arr = np.asarray(labels, dtype=object)
    fold_of = np.empty(len(labels), dtype=np.int64)
    for cls in sorted(set(labels)):
        idx = np.flatnonzero(labels_arr == cls)
        idx = idx[rng.permutation(idx.size)]
        for fold in range(folds):
            fold_of[idx[fold::folds]] = fold
    return fold_of


@dataclass
class CvResult:
    """Accuracies from one repeated stratified cross-validation.

    Attributes:
        accuracies_pct: (repeats, folds) per-fold accuracies in percent.
        folds_used: Fold count actually used (reduced when the smallest
            class has fewer trials than requested folds).
        requested_folds: Fold count asked for.
    """

    accuracies_pct: np.ndarray
    folds_used: int
    requested_folds: int


def repeated_stratified_cv(
    matrix: FeatureMatrix,
    repeats: int = 10,
    folds: int = 10,
    seed: int = 0,
    rounds: int = DEFAULT_ROUNDS,
    trainer=None,
) -> CvResult:
    """Repeated stratified k-fold cross-validation.

    Per repeat: a seeded within-class shuffle assigns trials to folds
    round-robin (class proportions per fold within one trial); each fold
    is then held out once. All shuffles derive from SeedSequence(seed),
    so identical seeds give identical accuracies.

    Args:
        matrix: Features with labels covering exactly 2 classes unless a
            custom trainer handles more.
        repeats: Number of independent repetitions.
        folds: Folds per repetition; reduced to the smallest class count
            when that count is lower (the reduction is logged).
        seed: Master seed for all shuffles.
        rounds: Boosting rounds for the default trainer.
        trainer: Callable (FeatureMatrix) -> model with a
            predict-compatible interface; defaults to AdaBoost training.

    Returns:
        CvResult with a (repeats, folds_used) accuracy array in percent.

    Raises:
        ValueError: A class has fewer than 2 trials.
    """
    counts = {c: matrix.labels.count(c) for c in set(matrix.labels)}
    min_count = min(counts.values())
    if min_count < 2:
        raise ValueError(f"every class needs >= 2 trials, got counts {counts}")
    folds_used = folds
    if min_count < folds:
        folds_used = min_count
        logger.info(
            "reducing folds from %d to %d (smallest class has %d trials)",
            folds,
            folds_used,
            min_count,
        )
    if trainer is None:
        trainer = lambda m: train_adaboost(m, rounds=rounds)

    children = np.random.SeedSequence(seed).spawn(repeats)
    accuracies = np.empty((repeats, folds_used))
    values = matrix.values
    labels_arr = np.asarray(matrix.labels, dtype=object)
    for r in range(repeats):
        rng = np.random.default_rng(children[r])
        fold_of = _stratified_fold_ids(matrix.labels, folds_used, rng)
        for k in range(folds_used):
            test = fold_of == k
            train = ~test
            model = trainer(
                FeatureMatrix(
                    values=values[train],
                    feature_names=list(matrix.feature_names),
                    labels=[str(l) for l in labels_arr[train]],
                )
            )
            predicted = predict(model, values[test])
            truth = labels_arr[test]
            accuracies[r, k] = 100.0 * float(
                np.mean([p == t for p, t in zip(predicted, truth)])
            )
    return CvResult(
        accuracies_pct=accuracies, folds_used=folds_used, requested_folds=folds
    )


@dataclass
class CvReport:
    """Cross-validation summary over the band-group sweep.

    Attributes:
        subject_id: Subject the report belongs to.
        selected_channel: Channel chosen by selection.
        seed: CV master seed.
        repeats: CV repetitions.
        folds: Requested folds per repetition.
        per_n: For each group size n (as string key in JSON form):
            mean_pct, std_pct (population), and the per-fold accuracies.
        best_n: Group size with the highest mean accuracy (ties take the
            smaller n).
        caveat: Reporting caveat embedded in every serialized report.
    """

    subject_id: str
    selected_channel: str
    seed: int
    repeats: int
    folds: int
    per_n: dict[int, dict]
    best_n: int
    caveat: str = (
        "best_n is chosen on the same cross-validation used for reporting; "
        "its accuracy is optimistically biased"
    )

    @property
    def best_mean_pct(self) -> float:
        return self.per_n[self.best_n]["mean_pct"]

    def to_json(self) -> str:
        """Deterministic JSON form (sorted keys, full float precision)."""
        payload = {
            "subject_id": self.subject_id,
            "selected_channel": self.selected_channel,
            "seed": self.seed,
            "repeats": self.repeats,
            "folds": self.folds,
            "per_n": {str(n): self.per_n[n] for n in sorted(self.per_n)},
            "best_n": self.best_n,
            "caveat": self.caveat,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "CvReport":
        raw = json.loads(text)
        return CvReport(
            subject_id=raw["subject_id"],
            selected_channel=raw["selected_channel"],
            seed=raw["seed"],
            repeats=raw["repeats"],
            folds=raw["folds"],
            per_n={int(n): v for n, v in raw["per_n"].items()},
            best_n=raw["best_n"],
            caveat=raw["caveat"],
        )


def sweep_n(
    epochs: EpochSet,
    selection: SelectionResult,
    grid: BandGrid | None = None,
    backend: str = "morlet",
    n_range: range | None = None,
    repeats: int = 10,
    folds: int = 10,
    seed: int = 0,
    rounds: int = DEFAULT_ROUNDS,
) -> CvReport:
    """Cross-validate every top-n band group and pick the best n.

    Args:
        epochs: Windowed set the selection was computed on.
        selection: Channel choice and band groups.
        grid: Band grid for decomposition; default grid when omitted.
        backend: Filterbank backend.
        n_range: Group sizes to sweep; defaults to 1..max group size.
        repeats: CV repetitions.
        folds: CV folds.
        seed: CV master seed.
        rounds: Boosting rounds.

    Returns:
        CvReport covering each n with per-fold detail.
    """
    dec = decompose(epochs, grid=grid, backend=backend)
    if n_range is None:
        n_range = range(1, max(selection.groups) + 1)
    per_n: dict[int, dict] = {}
    for n in n_range:
        matrix = extract_band_features(
            dec, selection.selected_channel, selection.groups[n], labels=epochs.labels
        )
        result = repeated_stratified_cv(
            matrix, repeats=repeats, folds=folds, seed=seed, rounds=rounds
        )
        flat = result.accuracies_pct.ravel()
        per_n[n] = {
            "mean_pct": float(np.mean(flat)),
            "std_pct": float(np.std(flat)),
            "fold_pct": [float(v) for v in flat],
            "folds_used": result.folds_used,
        }
    best_n = min(per_n, key=lambda n: (-per_n[n]["mean_pct"], n))
    return CvReport(
        subject_id=epochs.subject_id,
        selected_channel=selection.selected_channel,
        seed=seed,
        repeats=repeats,
        folds=folds,
        per_n=per_n,
        best_n=best_n,
    )
