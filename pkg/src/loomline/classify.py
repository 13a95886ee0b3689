"""Pluggable classifiers: confusion-driven stochastic model and a noiseless-signature oracle."""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domain import (
    NUM_CLASSES,
    ClassifierProfile,
    Garment,
    MaterialClass,
    base_signature,
)


@dataclass(frozen=True)
class ClassificationResult:
    predicted: MaterialClass
    scores: tuple[float, ...]  # distribution over the 5 classes

    def __post_init__(self):
        if len(self.scores) != NUM_CLASSES:
            raise ValueError("scores must have 5 entries")
        if abs(sum(self.scores) - 1.0) > 1e-9:
            raise ValueError("scores must sum to 1")
        # first index of the maximum = lowest label on ties
        if self.scores.index(max(self.scores)) != int(self.predicted):
            raise ValueError("predicted must be the argmax of scores (lowest label on ties)")


@lru_cache(maxsize=64)
def _row_cdf(profile: ClassifierProfile, row_index: int) -> tuple[tuple[float, ...], list[float]]:
    row = profile.confusion_probabilities[row_index]
    total = sum(row)
    return row, list(itertools.accumulate(x / total for x in row))


def classify_stochastic(
    true_class: MaterialClass, profile: ClassifierProfile, rng: np.random.Generator
) -> ClassificationResult:
    """Sample a prediction from the profile's confusion row for the true class.

    The sampled class is given score 0.5 + 0.5*u, u uniform; the remaining mass
    is spread over the other classes proportionally to their confusion-row
    entries (uniform if the row is one-hot on the sampled class).
    """
    row, cdf = _row_cdf(profile, int(true_class))
    draw = rng.random()
    predicted = min(bisect.bisect_right(cdf, draw), NUM_CLASSES - 1)
    u = rng.random()
    top = 0.5 + 0.5 * max(u, 1e-9)  # u=0 could tie against a one-hot remainder
    rest = list(row)
    rest[predicted] = 0.0
    rest_sum = sum(rest)
    if rest_sum <= 0.0:
        rest = [1.0] * NUM_CLASSES
        rest[predicted] = 0.0
        rest_sum = NUM_CLASSES - 1
    scale = (1.0 - top) / rest_sum
    scores = [x * scale for x in rest]
    scores[predicted] = top
    total = sum(scores)
    return ClassificationResult(
        MaterialClass(predicted), tuple(s / total for s in scores)
    )


def classify_oracle(garment: Garment) -> ClassificationResult:
    """Nearest-signature classifier over the garment's spectral cube."""
    if garment.cube_ref is None:
        raise ValueError(
            f"garment {garment.id}: no spectral cube attached; sensing path misconfigured"
        )
    means = garment.cube_ref.band_means
    distances = np.array(
        [np.mean((means - base_signature(MaterialClass(c))) ** 2) for c in range(NUM_CLASSES)]
    )
    # Sharp temperature so a noiseless match dominates the score vector.
    logits = -distances / 0.01
    logits -= logits.max()
    scores = np.exp(logits)
    scores /= scores.sum()
    predicted = MaterialClass(int(np.argmax(scores)))
    return ClassificationResult(predicted, tuple(scores.tolist()))


class StochasticClassifier:
    """Classifier fulfilling the pipeline contract, backed by a confusion profile."""

    def __init__(self, profile: ClassifierProfile):
        self.profile = profile

    def classify(self, garment: Garment, rng: np.random.Generator) -> ClassificationResult:
        return classify_stochastic(garment.true_class, self.profile, rng)


class OracleClassifier:
    """Perfect-sensing classifier; requires garments with spectral cubes."""

    profile = None

    def classify(self, garment: Garment, rng: np.random.Generator) -> ClassificationResult:
        return classify_oracle(garment)


def _uniform_offdiag_matrix(accuracy: float) -> tuple[tuple[float, ...], ...]:
    off = (1.0 - accuracy) / (NUM_CLASSES - 1)
    return tuple(
        tuple(accuracy if i == j else off for j in range(NUM_CLASSES)) for i in range(NUM_CLASSES)
    )


def default_profiles() -> list[ClassifierProfile]:
    """The four built-in classifier profiles with their published-style accuracies."""
    specs = [
        ("EfficientNet-B6", 600, 41_000_000, 0.242),
        ("ResNest-101", 600, 46_000_000, 0.586),
        ("MediumCustom", 22, 1_500_000, 0.393),
        ("SimpleCustom", 10, 1_500_000, 0.363),
    ]
    return [
        ClassifierProfile(name, layers, params, _uniform_offdiag_matrix(acc))
        for name, layers, params, acc in specs
    ]


def profile_by_name(name: str) -> ClassifierProfile:
    for p in default_profiles():
        if p.name == name:
            return p
    raise KeyError(f"unknown classifier profile {name!r}")
