"""Storage format: round trips, validation, corruption detection."""

import hashlib
import json

import numpy as np
import pytest

from onechan.epochs import (
    EpochSet,
    ValidationError,
    read_epochset,
    validate_epochset,
    write_epochset,
)

from conftest import make_epochs


def small_set() -> EpochSet:
    rng = np.random.default_rng(0)
    return make_epochs(
        rng.standard_normal((4, 3, 10)),
        labels=["left", "right", "left", "right"],
        channel_names=["C3", "Cz", "C4"],
        cue_sample=2,
    )


def test_zero_set_data_file_size(tmp_path):
    epochs = make_epochs(
        np.zeros((2, 3, 4)), labels=["a", "b"], channel_names=["x", "y", "z"]
    )
    write_epochset(epochs, tmp_path)
    assert (tmp_path / "data.f32").stat().st_size == 2 * 3 * 4 * 4


def test_round_trip_bit_exact(tmp_path):
    epochs = small_set()
    write_epochset(epochs, tmp_path)
    loaded = read_epochset(tmp_path)
    assert loaded.data.tobytes() == epochs.data.tobytes()
    assert loaded.labels == epochs.labels
    assert loaded.channel_names == epochs.channel_names
    assert loaded.fs_hz == epochs.fs_hz
    assert loaded.cue_sample == epochs.cue_sample
    assert loaded.subject_id == epochs.subject_id


def test_read_accepts_manifest_path(tmp_path):
    epochs = small_set()
    write_epochset(epochs, tmp_path)
    loaded = read_epochset(tmp_path / "manifest.json")
    assert loaded.n_trials == epochs.n_trials


def test_float64_input_coerced_to_float32(tmp_path):
    data = np.random.default_rng(1).standard_normal((2, 2, 5))
    epochs = make_epochs(data, labels=["a", "b"])
    assert epochs.data.dtype == np.float32
    write_epochset(epochs, tmp_path)
    loaded = read_epochset(tmp_path)
    assert np.array_equal(loaded.data, data.astype(np.float32))


def test_truncated_data_file_rejected(tmp_path):
    write_epochset(small_set(), tmp_path)
    raw = (tmp_path / "data.f32").read_bytes()
    (tmp_path / "data.f32").write_bytes(raw[:-4])
    with pytest.raises(ValidationError, match="byte"):
        read_epochset(tmp_path)


def test_checksum_mismatch_rejected(tmp_path):
    write_epochset(small_set(), tmp_path)
    raw = bytearray((tmp_path / "data.f32").read_bytes())
    raw[0] ^= 0xFF
    (tmp_path / "data.f32").write_bytes(bytes(raw))
    with pytest.raises(ValidationError, match="checksum"):
        read_epochset(tmp_path)


def test_manifest_size_mismatch_rejected(tmp_path):
    write_epochset(small_set(), tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    manifest["n_trials"] = 10
    (tmp_path / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ValidationError, match="byte"):
        read_epochset(tmp_path)


def test_unknown_format_version_rejected(tmp_path):
    write_epochset(small_set(), tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    manifest["format_version"] = 99
    (tmp_path / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ValidationError, match="format_version"):
        read_epochset(tmp_path)


def test_missing_manifest_raises_file_not_found(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_epochset(tmp_path / "nope")


def test_missing_data_file_raises_file_not_found(tmp_path):
    write_epochset(small_set(), tmp_path)
    (tmp_path / "data.f32").unlink()
    with pytest.raises(FileNotFoundError):
        read_epochset(tmp_path)


def test_nan_sample_rejected_on_write(tmp_path):
    epochs = small_set()
    epochs.data[1, 2, 3] = np.nan
    with pytest.raises(ValidationError, match="finite"):
        write_epochset(epochs, tmp_path)


def test_nan_sample_rejected_on_read(tmp_path):
    epochs = small_set()
    write_epochset(epochs, tmp_path)
    raw = np.frombuffer((tmp_path / "data.f32").read_bytes(), dtype="<f4").copy()
    raw[5] = np.nan
    payload = raw.tobytes()
    (tmp_path / "data.f32").write_bytes(payload)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    manifest["checksum"] = hashlib.sha256(payload).hexdigest()
    (tmp_path / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ValidationError, match="finite"):
        read_epochset(tmp_path)


def test_validate_valid_set_is_empty():
    assert validate_epochset(small_set()) == []


def test_validate_duplicate_channel_named():
    epochs = make_epochs(
        np.zeros((2, 2, 4)), labels=["a", "b"], channel_names=["C3", "C3"]
    )
    violations = validate_epochset(epochs)
    assert len(violations) == 1
    assert "C3" in violations[0]


def test_validate_label_length_reports_both_lengths():
    epochs = make_epochs(np.zeros((3, 2, 4)), labels=["a", "b", "a"])
    epochs.labels = ["a", "b"]
    violations = validate_epochset(epochs)
    assert any("2" in v and "3" in v for v in violations)


def test_validate_single_class_rejected():
    epochs = make_epochs(np.zeros((2, 2, 4)), labels=["a", "a"])
    assert any("class" in v for v in validate_epochset(epochs))


def test_validate_cue_out_of_range():
    epochs = make_epochs(np.zeros((2, 2, 4)), labels=["a", "b"], cue_sample=4)
    assert any("cue" in v for v in validate_epochset(epochs))


def test_validate_nonfinite_reports_location():
    epochs = make_epochs(np.zeros((2, 2, 4)), labels=["a", "b"])
    epochs.data[1, 0, 2] = np.inf
    violations = validate_epochset(epochs)
    assert any("trial 1" in v for v in violations)


def test_classes_first_appearance_order():
    epochs = make_epochs(
        np.zeros((3, 1, 4)), labels=["right", "left", "right"]
    )
    assert epochs.classes == ["right", "left"]


def test_channel_index_lookup():
    epochs = small_set()
    assert epochs.channel_index("Cz") == 1
    with pytest.raises(KeyError):
        epochs.channel_index("F3")
