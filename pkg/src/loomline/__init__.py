"""Deterministic digital twin of an autonomous textile sorting line."""

from .domain import (
    ClassifierProfile,
    Garment,
    MaterialClass,
    ScenarioConfig,
    ScenarioError,
    SpectralCube,
    generate_garments,
    synth_spectral_cube,
    validate_scenario,
)
from .classify import (
    ClassificationResult,
    OracleClassifier,
    StochasticClassifier,
    classify_oracle,
    classify_stochastic,
    default_profiles,
)
from .kernel import EventQueue, SimEvent, derive_stream, run_to_completion
from .stations import (
    RunReport,
    StationParams,
    inject_error,
    process_pipeline,
    run_scenario,
    service_time,
)
from .metrics import ConfusionCounts, MetricSet, compute_metrics, confusion_matrix, roc_auc
from .store import RunRecord, RunStore

__version__ = "0.1.0"
