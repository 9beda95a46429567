"""EpochSet: in-memory and on-disk epoched EEG recordings.

An EpochSet holds one subject/session of cue-aligned, epoched, labeled
multichannel EEG. On disk it is a directory containing ``manifest.json``
plus a raw ``data.f32`` tensor of 32-bit little-endian floats in
trial-major layout ``[trial][channel][sample]``. The manifest carries the
dimensions, channel names, per-trial labels, cue sample index, and a
sha256 checksum of the data file, so readers can verify integrity before
touching the samples.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1
DTYPE_TAG = "float32-le"
LAYOUT_TAG = "trial-major"
MANIFEST_NAME = "manifest.json"
DATA_NAME = "data.f32"


class ValidationError(ValueError):
    """An EpochSet or its on-disk form violates one or more invariants.

    Attributes:
        violations: Human-readable description of each violated invariant.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass
class EpochSet:
    """One subject/session of epoched, labeled EEG.

    Attributes:
        subject_id: Identifier of the subject/session the trials came from.
        fs_hz: Sampling rate in Hz.
        channel_names: Ordered channel names, e.g. ["C3", "Cz", "C4"].
        labels: Per-trial class names, one entry per trial.
        cue_sample: Sample index of the cue onset within each trial.
        data: float32 tensor of shape (n_trials, n_channels, n_samples),
            in microvolts.
    """

    subject_id: str
    fs_hz: float
    channel_names: list[str]
    labels: list[str]
    cue_sample: int
    data: np.ndarray

    def __post_init__(self) -> None:
        self.channel_names = [str(c) for c in self.channel_names]
        self.labels = [str(l) for l in self.labels]
        self.cue_sample = int(self.cue_sample)
        self.fs_hz = float(self.fs_hz)
        # float32 is the storage dtype; coercing here makes write/read
        # round trips bit-identical for every in-memory instance.
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 3:
            raise ValueError(
                f"data must be 3-D (trial, channel, sample), got shape {arr.shape}"
            )
        self.data = arr

    @property
    def n_trials(self) -> int:
        return self.data.shape[0]

    @property
    def n_channels(self) -> int:
        return self.data.shape[1]

    @property
    def n_samples(self) -> int:
        return self.data.shape[2]

    @property
    def classes(self) -> list[str]:
        """Distinct class names in label order of first appearance."""
        seen: dict[str, None] = {}
        for l in self.labels:
            seen.setdefault(l, None)
        return list(seen)

    def channel_index(self, name: str) -> int:
        """Index of a channel by name.

        Raises:
            KeyError: If the channel is not present.
        """
        try:
            return self.channel_names.index(name)
        except ValueError:
            raise KeyError(
                f"channel {name!r} not in {self.channel_names}"
            ) from None

    def trial_labels_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=object)


def validate_epochset(epochs: EpochSet) -> list[str]:
    """Check every EpochSet invariant, returning all violations found.

    Args:
        epochs: Candidate set; may be arbitrarily malformed.

    Returns:
        One message per violated invariant, with location detail where
        applicable. An empty list means the set is valid.
    """
    violations: list[str] = []
    if not epochs.fs_hz > 0:
        violations.append(f"fs_hz must be positive, got {epochs.fs_hz}")
    seen: set[str] = set()
    for name in epochs.channel_names:
        if name in seen:
            violations.append(f"duplicate channel name {name!r}")
        seen.add(name)
    if len(epochs.channel_names) != epochs.n_channels:
        violations.append(
            f"{len(epochs.channel_names)} channel names for "
            f"{epochs.n_channels} data channels"
        )
    if len(epochs.labels) != epochs.n_trials:
        violations.append(
            f"{len(epochs.labels)} labels for {epochs.n_trials} trials"
        )
    if len(set(epochs.labels)) < 2:
        violations.append(
            f"labels must cover at least 2 classes, got {sorted(set(epochs.labels))}"
        )
    if not 0 <= epochs.cue_sample < epochs.n_samples:
        violations.append(
            f"cue_sample {epochs.cue_sample} outside [0, {epochs.n_samples})"
        )
    if not np.all(np.isfinite(epochs.data)):
        bad = np.argwhere(~np.isfinite(epochs.data))
        t, c, s = (int(v) for v in bad[0])
        violations.append(
            f"non-finite sample at trial {t}, channel {c}, sample {s} "
            f"({bad.shape[0]} total)"
        )
    return violations


def _manifest_dict(epochs: EpochSet, checksum: str) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "subject_id": epochs.subject_id,
        "fs_hz": epochs.fs_hz,
        "channel_names": epochs.channel_names,
        "labels": epochs.labels,
        "cue_sample": epochs.cue_sample,
        "n_trials": epochs.n_trials,
        "n_channels": epochs.n_channels,
        "n_samples": epochs.n_samples,
        "dtype": DTYPE_TAG,
        "layout": LAYOUT_TAG,
        "data_file": DATA_NAME,
        "checksum": checksum,
    }


def write_epochset(epochs: EpochSet, out_dir: str | Path) -> Path:
    """Write an EpochSet to a directory as manifest.json + data.f32.

    Args:
        epochs: Valid set to persist.
        out_dir: Target directory, created if missing.

    Returns:
        Path of the written manifest file.

    Raises:
        ValidationError: If the set violates any invariant.
    """
    violations = validate_epochset(epochs)
    if violations:
        raise ValidationError(violations)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    raw = np.ascontiguousarray(epochs.data, dtype="<f4").tobytes()
    checksum = hashlib.sha256(raw).hexdigest()
    (out / DATA_NAME).write_bytes(raw)
    manifest_path = out / MANIFEST_NAME
    manifest_path.write_text(
        json.dumps(_manifest_dict(epochs, checksum), indent=2) + "\n"
    )
    return manifest_path


def read_epochset(path: str | Path) -> EpochSet:
    """Read an EpochSet from a manifest file or its containing directory.

    Args:
        path: Path of manifest.json, or of the directory holding it.

    Returns:
        The stored EpochSet, bit-identical to what was written.

    Raises:
        FileNotFoundError: Manifest or data file missing.
        ValidationError: Unknown format version, wrong dtype/layout tag,
            byte-length or checksum mismatch, or any EpochSet invariant
            violated by the stored contents.
    """
    manifest_path = Path(path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / MANIFEST_NAME
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no manifest at {manifest_path}")
    manifest = json.loads(manifest_path.read_text())

    problems: list[str] = []
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise ValidationError(
            [f"unknown format_version {version!r}, expected {FORMAT_VERSION}"]
        )
    if manifest.get("dtype") != DTYPE_TAG:
        problems.append(f"unknown dtype tag {manifest.get('dtype')!r}")
    if manifest.get("layout") != LAYOUT_TAG:
        problems.append(f"unknown layout tag {manifest.get('layout')!r}")
    if problems:
        raise ValidationError(problems)

    data_path = manifest_path.parent / manifest["data_file"]
    if not data_path.is_file():
        raise FileNotFoundError(f"data file missing: {data_path}")
    raw = data_path.read_bytes()
    n_trials = int(manifest["n_trials"])
    n_channels = int(manifest["n_channels"])
    n_samples = int(manifest["n_samples"])
    expected = n_trials * n_channels * n_samples * 4
    if len(raw) != expected:
        raise ValidationError(
            [
                f"data file is {len(raw)} bytes but manifest dimensions "
                f"{n_trials}x{n_channels}x{n_samples} require {expected}"
            ]
        )
    checksum = manifest.get("checksum")
    if checksum:
        actual = hashlib.sha256(raw).hexdigest()
        if actual != checksum:
            raise ValidationError(
                [f"checksum mismatch: manifest {checksum}, data file {actual}"]
            )

    data = np.frombuffer(raw, dtype="<f4").reshape(n_trials, n_channels, n_samples)
    epochs = EpochSet(
        subject_id=str(manifest["subject_id"]),
        fs_hz=float(manifest["fs_hz"]),
        channel_names=list(manifest["channel_names"]),
        labels=list(manifest["labels"]),
        cue_sample=int(manifest["cue_sample"]),
        data=data,
    )
    violations = validate_epochset(epochs)
    if violations:
        raise ValidationError(violations)
    return epochs
