import numpy as np
import pytest

from loomline.classify import (
    ClassificationResult,
    classify_oracle,
    classify_stochastic,
    default_profiles,
    profile_by_name,
)
from loomline.domain import (
    ClassifierProfile,
    Garment,
    MaterialClass,
    synth_spectral_cube,
)
from loomline.kernel import derive_stream

IDENTITY = tuple(tuple(1.0 if i == j else 0.0 for j in range(5)) for i in range(5))
UNIFORM = tuple((0.2,) * 5 for _ in range(5))


class TestClassificationResult:
    def test_argmax_consistency_enforced(self):
        with pytest.raises(ValueError, match="argmax"):
            ClassificationResult(MaterialClass.SILK, (0.6, 0.1, 0.1, 0.1, 0.1))

    def test_scores_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum"):
            ClassificationResult(MaterialClass.COTTON, (0.5, 0.1, 0.1, 0.1, 0.1))


class TestClassifyStochastic:
    def test_identity_matrix_always_correct(self):
        profile = ClassifierProfile("perfect", 1, 1, IDENTITY)
        rng = derive_stream(0, "c")
        for m in MaterialClass:
            for _ in range(20):
                assert classify_stochastic(m, profile, rng).predicted is m

    def test_uniform_row_long_run_accuracy(self):
        profile = ClassifierProfile("coin", 1, 1, UNIFORM)
        rng = derive_stream(1, "c")
        hits = sum(
            classify_stochastic(MaterialClass.WOOL, profile, rng).predicted
            is MaterialClass.WOOL
            for _ in range(20000)
        )
        assert abs(hits / 20000 - 0.2) < 0.01

    def test_resnest_calibration(self):
        profile = profile_by_name("ResNest-101")
        rng = derive_stream(2, "cal")
        n = 100000
        classes = rng.integers(0, 5, size=n)
        hits = sum(
            classify_stochastic(MaterialClass(int(c)), profile, rng).predicted == c
            for c in classes
        )
        assert abs(hits / n - 0.586) < 0.02

    def test_marginal_frequencies_match_confusion_row(self):
        profile = profile_by_name("ResNest-101")
        rng = derive_stream(3, "row")
        n = 100000
        counts = np.zeros(5)
        for _ in range(n):
            counts[int(classify_stochastic(MaterialClass.COTTON, profile, rng).predicted)] += 1
        expected = np.array(profile.confusion_probabilities[0]) * n
        chi2 = np.sum((counts - expected) ** 2 / expected)
        assert chi2 < 20  # 4 dof, generous bound

    def test_scores_are_valid_distribution_with_sampled_argmax(self):
        profile = profile_by_name("SimpleCustom")
        rng = derive_stream(4, "s")
        for _ in range(200):
            result = classify_stochastic(MaterialClass.VISCOSE, profile, rng)
            assert abs(sum(result.scores) - 1.0) < 1e-9
            assert int(np.argmax(result.scores)) == int(result.predicted)
            assert result.scores[int(result.predicted)] >= 0.5


class TestClassifyOracle:
    def test_noiseless_exact_for_all_classes(self):
        for m in MaterialClass:
            g = Garment(0, m, cube_ref=synth_spectral_cube(m, 0.0))
            result = classify_oracle(g)
            assert result.predicted is m
            assert result.scores[int(m)] > 0.5

    def test_low_noise_high_accuracy(self):
        rng = derive_stream(5, "oracle")
        hits = 0
        n = 1000
        for i in range(n):
            m = MaterialClass(i % 5)
            cube = synth_spectral_cube(m, 0.05, height=4, width=4, rng=rng)
            hits += classify_oracle(Garment(i, m, cube_ref=cube)).predicted is m
        assert hits / n >= 0.99

    def test_missing_cube_raises(self):
        with pytest.raises(ValueError, match="no spectral cube"):
            classify_oracle(Garment(0, MaterialClass.COTTON))


class TestDefaultProfiles:
    def test_four_profiles_with_calibrated_diagonals(self):
        profiles = {p.name: p for p in default_profiles()}
        targets = {
            "EfficientNet-B6": 0.242,
            "ResNest-101": 0.586,
            "MediumCustom": 0.393,
            "SimpleCustom": 0.363,
        }
        assert set(profiles) == set(targets)
        for name, acc in targets.items():
            diag = [profiles[name].confusion_probabilities[i][i] for i in range(5)]
            assert np.mean(diag) == pytest.approx(acc, abs=1e-9)

    def test_all_rows_stochastic(self):
        for p in default_profiles():
            for row in p.confusion_probabilities:
                assert abs(sum(row) - 1.0) < 1e-9
                assert all(0 <= x <= 1 for x in row)

    def test_profile_json_round_trip(self):
        p = profile_by_name("ResNest-101")
        assert ClassifierProfile.from_dict(p.to_dict()) == p
