"""Batch orchestration: per-subject runs, pair sweeps, ERD baseline.

Every subject's randomness derives from (master seed, subject id), so
subjects can run in any order or in parallel without changing results.
Per-subject failures are isolated: one bad recording never blocks or
alters another subject's report.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .classify import CvReport, repeated_stratified_cv, sweep_n
from .epochs import EpochSet, read_epochset
from .features import ErdsConfig, extract_erds_features
from .filterbank import BandSpec, decompose
from .preprocess import PreprocessConfig, carve_window, ica_clean, notch_filter, subset_channels
from .selection import compute_selection

logger = logging.getLogger(__name__)

# Canonical ordering for motor-imagery class names in pair sweeps;
# unknown names sort after these, alphabetically.
_MI_CLASS_ORDER = ("left", "right", "feet", "tongue")


@dataclass
class RunConfig:
    """Everything a batch run needs.

    Attributes:
        manifests: EpochSet manifest paths, one per subject/session.
        out_dir: Output directory for reports.
        seed: Master seed; all per-subject seeds derive from it.
        repeats: CV repetitions.
        folds: CV folds.
        rounds: Boosting rounds.
        n_max: Largest band-group size to sweep.
        backend: Filterbank backend.
        class_pair: Two class names to evaluate, or None for data that
            is already 2-class.
        class_aware: Use the labeled channel-scoring variant.
        jobs: Worker processes for per-subject parallelism.
        preprocess: Notch/ICA/window settings.
        erds: Baseline feature settings.
    """

    manifests: list[str] = field(default_factory=list)
    out_dir: str = "runs/out"
    seed: int = 0
    repeats: int = 10
    folds: int = 10
    rounds: int = 100
    n_max: int = 6
    backend: str = "morlet"
    class_pair: list[str] | None = None
    class_aware: bool = False
    jobs: int = 1
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    erds: ErdsConfig = field(default_factory=ErdsConfig)

    @staticmethod
    def from_dict(raw: dict) -> "RunConfig":
        raw = dict(raw)
        pre = raw.pop("preprocess", {})
        if isinstance(pre, dict):
            pre = dict(pre)
            if "notch_hz" in pre:
                pre["notch_hz"] = tuple(pre["notch_hz"])
            if "analysis_window" in pre:
                pre["analysis_window"] = tuple(pre["analysis_window"])
            if "channel_subset" in pre:
                pre["channel_subset"] = tuple(pre["channel_subset"])
            pre = PreprocessConfig(**pre)
        erds = raw.pop("erds", {})
        if isinstance(erds, dict):
            erds = dict(erds)
            if "reference_window" in erds:
                erds["reference_window"] = tuple(erds["reference_window"])
            if "action_window" in erds:
                erds["action_window"] = tuple(erds["action_window"])
            if "bands" in erds:
                erds["bands"] = tuple(BandSpec(lo, hi) for lo, hi in erds["bands"])
            erds = ErdsConfig(**erds)
        return RunConfig(preprocess=pre, erds=erds, **raw)

    def to_dict(self) -> dict:
        raw = asdict(self)
        raw["preprocess"] = asdict(self.preprocess)
        raw["erds"] = {
            "reference_window": list(self.erds.reference_window),
            "action_window": list(self.erds.action_window),
            "bands": [[b.lo_hz, b.hi_hz] for b in self.erds.bands],
        }
        return raw

    def config_hash(self) -> str:
        """Short stable hash of the analysis parameters.

        Input and output paths and the worker count are excluded so the
        same analysis hashes the same regardless of where the data lives,
        where results land, or how the work is scheduled.
        """
        params = self.to_dict()
        params.pop("manifests", None)
        params.pop("out_dir", None)
        params.pop("jobs", None)
        canonical = json.dumps(params, sort_keys=True, default=list)
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def derive_seed(master_seed: int, tag: str) -> int:
    """Deterministic 63-bit seed for one (master seed, tag) pair."""
    digest = hashlib.sha256(f"{master_seed}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "little") & 0x7FFFFFFFFFFFFFFF


def _filter_pair(epochs: EpochSet, pair: list[str] | None) -> EpochSet:
    if pair is None:
        return epochs
    if len(pair) != 2:
        raise ValueError(f"class_pair must name exactly 2 classes, got {pair}")
    present = set(epochs.labels)
    missing = [c for c in pair if c not in present]
    if missing:
        raise ValueError(
            f"classes {missing} not present in subject {epochs.subject_id} "
            f"(has {sorted(present)})"
        )
    keep = [i for i, l in enumerate(epochs.labels) if l in pair]
    return replace(
        epochs,
        data=epochs.data[keep],
        labels=[epochs.labels[i] for i in keep],
    )


def process_subject(
    manifest: str, cfg: RunConfig, pair: list[str] | None = None
) -> CvReport:
    """Full pipeline for one subject: preprocess, select, sweep, report.

    Args:
        manifest: Path to the subject's EpochSet manifest.
        cfg: Run settings.
        pair: Class pair to keep; overrides cfg.class_pair when given.

    Returns:
        CvReport for the subject.
    """
    epochs = read_epochset(manifest)
    epochs = _filter_pair(epochs, pair if pair is not None else cfg.class_pair)
    if len(set(epochs.labels)) != 2:
        raise ValueError(
            f"subject {epochs.subject_id} has classes "
            f"{sorted(set(epochs.labels))}; select a pair to evaluate"
        )
    epochs = notch_filter(epochs, cfg.preprocess)
    if cfg.preprocess.ica_enabled:
        epochs = ica_clean(
            epochs, cfg.preprocess, derive_seed(cfg.seed, f"{epochs.subject_id}:ica")
        )
    windowed = carve_window(epochs, cfg.preprocess)
    dec = decompose(windowed, backend=cfg.backend)
    selection = compute_selection(
        windowed,
        dec,
        candidates=list(cfg.preprocess.channel_subset),
        n_max=cfg.n_max,
        class_aware=cfg.class_aware,
    )
    return sweep_n(
        windowed,
        selection,
        backend=cfg.backend,
        n_range=range(1, cfg.n_max + 1),
        repeats=cfg.repeats,
        folds=cfg.folds,
        seed=derive_seed(cfg.seed, f"{epochs.subject_id}:cv"),
        rounds=cfg.rounds,
    )


def _provenance(cfg: RunConfig) -> dict:
    return {
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "version": __version__,
    }


def _write_subject_report(
    out_dir: Path, cfg: RunConfig, report: CvReport
) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = dict(_provenance(cfg))
    payload["report"] = json.loads(report.to_json())
    path = out_dir / f"{report.subject_id}.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


def _worker_run_subject(args: tuple[str, dict, list[str] | None]):
    manifest, cfg_dict, pair = args
    cfg = RunConfig.from_dict(cfg_dict)
    return process_subject(manifest, cfg, pair)


def _map_subjects(
    cfg: RunConfig, tasks: list[tuple[str, list[str] | None]]
) -> list[CvReport | Exception]:
    """Run per-subject pipelines, isolating failures per task."""
    results: list[CvReport | Exception] = []
    if cfg.jobs > 1:
        payload = [(m, cfg.to_dict(), pair) for m, pair in tasks]
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(_worker_run_subject, p) for p in payload]
            for future in futures:
                try:
                    results.append(future.result())
                except Exception as exc:
                    results.append(exc)
    else:
        for manifest, pair in tasks:
            try:
                results.append(process_subject(manifest, cfg, pair))
            except Exception as exc:
                results.append(exc)
    return results


def run(cfg: RunConfig) -> tuple[list[CvReport], list[str]]:
    """Run the pipeline for every configured subject and write reports.

    Returns:
        (successful reports, failure messages). Callers should exit
        nonzero when any failure message is present.
    """
    from .reports import write_run_outputs

    missing = [m for m in cfg.manifests if not Path(m).exists()]
    if missing:
        raise FileNotFoundError(f"missing manifests: {missing}")
    out = Path(cfg.out_dir)
    results = _map_subjects(cfg, [(m, None) for m in cfg.manifests])
    reports: list[CvReport] = []
    failures: list[str] = []
    for manifest, result in zip(cfg.manifests, results):
        if isinstance(result, Exception):
            failures.append(f"{manifest}: {result}")
            logger.error("subject failed: %s: %s", manifest, result)
        else:
            reports.append(result)
            _write_subject_report(out / "subjects", cfg, result)
    write_run_outputs(out, cfg, reports, failures)
    return reports, failures


def _ordered_classes(classes: set[str]) -> list[str]:
    known = [c for c in _MI_CLASS_ORDER if c in classes]
    unknown = sorted(c for c in classes if c not in _MI_CLASS_ORDER)
    return known + unknown


def pairs(cfg: RunConfig) -> tuple[dict[str, list[CvReport]], list[str]]:
    """Evaluate every unordered class pair for every subject.

    Returns:
        ({pair name: reports}, failure messages).

    Raises:
        ValueError: Data has fewer than 3 classes (use run instead).
    """
    from .reports import write_pairs_outputs

    missing = [m for m in cfg.manifests if not Path(m).exists()]
    if missing:
        raise FileNotFoundError(f"missing manifests: {missing}")
    all_classes: set[str] = set()
    for manifest in cfg.manifests:
        all_classes.update(read_epochset(manifest).labels)
    if len(all_classes) < 3:
        raise ValueError(
            f"pair sweep needs >= 3 classes, got {sorted(all_classes)}; "
            "use the run command for 2-class data"
        )
    ordered = _ordered_classes(all_classes)
    # Canonical column order; the final motor-imagery pair reads
    # tongue-feet rather than feet-tongue.
    pair_list = [
        ("tongue", "feet") if pair == ("feet", "tongue") else pair
        for pair in combinations(ordered, 2)
    ]

    out = Path(cfg.out_dir)
    by_pair: dict[str, list[CvReport]] = {}
    failures: list[str] = []
    for pair in pair_list:
        name = f"{pair[0]}-{pair[1]}"
        tasks = [(m, list(pair)) for m in cfg.manifests]
        results = _map_subjects(cfg, tasks)
        kept: list[CvReport] = []
        for manifest, result in zip(cfg.manifests, results):
            if isinstance(result, Exception):
                failures.append(f"{name}: {manifest}: {result}")
                logger.error("pair %s failed for %s: %s", name, manifest, result)
            else:
                kept.append(result)
                _write_subject_report(out / "pairs" / name / "subjects", cfg, result)
        by_pair[name] = kept
    write_pairs_outputs(out, cfg, by_pair, failures)
    return by_pair, failures


def baseline_erds(cfg: RunConfig) -> tuple[list[dict], list[str]]:
    """ERD-feature baseline: same CV protocol on ERD% features.

    Returns:
        (per-subject result dicts, failure messages).
    """
    from .reports import write_baseline_outputs

    out = Path(cfg.out_dir)
    results: list[dict] = []
    failures: list[str] = []
    for manifest in cfg.manifests:
        try:
            results.append(_baseline_one(manifest, cfg))
        except Exception as exc:
            failures.append(f"{manifest}: {exc}")
            logger.error("baseline failed: %s: %s", manifest, exc)
    for entry in results:
        payload = dict(_provenance(cfg))
        payload["result"] = entry
        subj_dir = out / "baseline" / "subjects"
        subj_dir.mkdir(parents=True, exist_ok=True)
        (subj_dir / f"{entry['subject_id']}.json").write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n"
        )
    write_baseline_outputs(out, cfg, results, failures)
    return results, failures


def _baseline_one(manifest: str, cfg: RunConfig) -> dict:
    epochs = read_epochset(manifest)
    epochs = _filter_pair(epochs, cfg.class_pair)
    if len(set(epochs.labels)) != 2:
        raise ValueError(
            f"subject {epochs.subject_id} has classes "
            f"{sorted(set(epochs.labels))}; select a pair to evaluate"
        )
    epochs = notch_filter(epochs, cfg.preprocess)
    epochs = subset_channels(epochs, cfg.preprocess.channel_subset)
    matrix = extract_erds_features(epochs, cfg.erds, cfg.preprocess.channel_subset)
    result = repeated_stratified_cv(
        matrix,
        repeats=cfg.repeats,
        folds=cfg.folds,
        seed=derive_seed(cfg.seed, f"{epochs.subject_id}:erds"),
        rounds=cfg.rounds,
    )
    flat = result.accuracies_pct.ravel()
    return {
        "subject_id": epochs.subject_id,
        "mean_pct": float(np.mean(flat)),
        "std_pct": float(np.std(flat)),
        "fold_pct": [float(v) for v in flat],
        "folds_used": result.folds_used,
    }
