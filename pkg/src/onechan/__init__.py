"""Single-channel EEG motor-imagery classification.

Pipeline: band-passed epochs are scored per channel with a Fisher
discriminability ratio, the winning channel's sub-bands are ranked by a
Pearson-style ratio, and boosted decision stumps classify compact
temporal/spectral features under repeated stratified cross-validation.
"""

__version__ = "0.1.0"

from .classify import CvReport, CvResult, StumpEnsemble, repeated_stratified_cv, sweep_n
from .epochs import EpochSet, ValidationError, read_epochset, validate_epochset, write_epochset
from .features import ErdsConfig, FeatureMatrix, extract_band_features, extract_erds_features
from .filterbank import BandDecomposition, BandGrid, BandSpec, decompose
from .pipeline import RunConfig, baseline_erds, pairs, process_subject, run
from .preprocess import ConvergenceError, PreprocessConfig, carve_window, ica_clean, notch_filter
from .selection import (
    SelectionResult,
    compute_selection,
    fisher_ratio_scores,
    pearson_ratio_scores,
    pooled_ratio,
    select_channel,
)
from .synth import PlantedEffect, SynthSpec, generate, measured_band_power_ratio

__all__ = [
    "BandDecomposition",
    "BandGrid",
    "BandSpec",
    "ConvergenceError",
    "CvReport",
    "CvResult",
    "EpochSet",
    "ErdsConfig",
    "FeatureMatrix",
    "PlantedEffect",
    "PreprocessConfig",
    "RunConfig",
    "SelectionResult",
    "StumpEnsemble",
    "SynthSpec",
    "ValidationError",
    "baseline_erds",
    "carve_window",
    "compute_selection",
    "decompose",
    "extract_band_features",
    "extract_erds_features",
    "fisher_ratio_scores",
    "generate",
    "ica_clean",
    "measured_band_power_ratio",
    "notch_filter",
    "pairs",
    "pearson_ratio_scores",
    "pooled_ratio",
    "process_subject",
    "select_channel",
    "read_epochset",
    "repeated_stratified_cv",
    "run",
    "sweep_n",
    "validate_epochset",
    "write_epochset",
]
