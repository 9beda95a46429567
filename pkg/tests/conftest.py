import numpy as np
import pytest

from onechan.epochs import EpochSet


def make_epochs(
    data: np.ndarray,
    labels: list[str],
    fs_hz: float = 250.0,
    channel_names: list[str] | None = None,
    cue_sample: int = 0,
    subject_id: str = "test",
) -> EpochSet:
    data = np.asarray(data, dtype=np.float32)
    if channel_names is None:
        channel_names = [f"ch{i}" for i in range(data.shape[1])]
    return EpochSet(
        subject_id=subject_id,
        fs_hz=fs_hz,
        channel_names=channel_names,
        labels=labels,
        cue_sample=cue_sample,
        data=data,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sinusoid(freq_hz: float, fs_hz: float, n: int, phase: float = 0.0) -> np.ndarray:
    t = np.arange(n) / fs_hz
    return np.sin(2.0 * np.pi * freq_hz * t + phase)
