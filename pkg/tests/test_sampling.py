import numpy as np
import pytest
from scipy.stats import qmc

from elagp.errors import DimensionUnsupported
from elagp.sampling import (
    BOOTSTRAP_FRACTION,
    BOOTSTRAP_REPS,
    DOMAIN_HIGH,
    DOMAIN_LOW,
    SAMPLES_PER_DIM,
    DoeDesign,
    make_bootstraps,
    sobol_design,
)


class TestSobol:
    def test_domain_and_shape(self):
        X = sobol_design(3, 450, seed=0)
        assert X.shape == (450, 3)
        assert np.all(X >= DOMAIN_LOW) and np.all(X <= DOMAIN_HIGH)

    def test_determinism(self):
        np.testing.assert_array_equal(sobol_design(2, 100, 7), sobol_design(2, 100, 7))
        assert not np.array_equal(sobol_design(2, 100, 7), sobol_design(2, 100, 8))

    def test_unscrambled_starts_at_lower_corner(self):
        X = sobol_design(2, 4, seed=0, scramble=False)
        np.testing.assert_array_equal(X[0], [DOMAIN_LOW, DOMAIN_LOW])

    def test_low_discrepancy_beats_uniform(self):
        """Sobol' should have clearly lower star discrepancy than iid uniform."""
        n, d = 256, 2
        unit_sobol = (sobol_design(d, n, 0) - DOMAIN_LOW) / (DOMAIN_HIGH - DOMAIN_LOW)
        unit_unif = np.random.default_rng(0).uniform(size=(n, d))
        disc_s = qmc.discrepancy(unit_sobol)
        disc_u = qmc.discrepancy(unit_unif)
        assert disc_s < disc_u / 2

    def test_invalid_arguments(self):
        with pytest.raises(DimensionUnsupported):
            sobol_design(0, 10, 0)
        with pytest.raises(ValueError):
            sobol_design(2, 0, 0)


class TestBootstraps:
    def test_sizes_and_uniqueness(self):
        sets = make_bootstraps(300, seed=0)
        assert len(sets) == BOOTSTRAP_REPS
        for idx in sets:
            assert len(idx) == round(BOOTSTRAP_FRACTION * 300)
            assert len(np.unique(idx)) == len(idx)  # without replacement
            assert np.all(np.diff(idx) > 0)  # sorted
            assert idx.min() >= 0 and idx.max() < 300

    def test_replicates_differ(self):
        sets = make_bootstraps(300, seed=0)
        assert not np.array_equal(sets[0], sets[1])

    def test_determinism(self):
        a = make_bootstraps(100, seed=5)
        b = make_bootstraps(100, seed=5)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_full_fraction(self):
        (idx,) = make_bootstraps(10, fraction=1.0, reps=1)
        np.testing.assert_array_equal(idx, np.arange(10))

    def test_validation(self):
        with pytest.raises(ValueError):
            make_bootstraps(10, fraction=0.0)
        with pytest.raises(ValueError):
            make_bootstraps(10, reps=0)


class TestDoeDesign:
    def test_defaults(self):
        design = DoeDesign(2, 0)
        assert design.n == SAMPLES_PER_DIM * 2
        assert design.points.shape == (300, 2)
        assert len(design.bootstrap_sets) == BOOTSTRAP_REPS
        assert design.y is None

    def test_evaluated_copy(self):
        design = DoeDesign(2, 0)
        done = design.evaluated(lambda X: np.sum(X * X, axis=1))
        assert done.y.shape == (design.n,)
        np.testing.assert_array_equal(done.points, design.points)
        assert design.y is None  # original untouched

    def test_evaluated_validates_shape(self):
        design = DoeDesign(2, 0)
        with pytest.raises(ValueError):
            design.evaluated(lambda X: np.zeros(5))

    def test_seed_changes_points(self):
        assert not np.array_equal(DoeDesign(2, 0).points, DoeDesign(2, 1).points)
