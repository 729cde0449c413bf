import numpy as np
import pytest

from elagp.bbob import FUNCTION_NAMES, _ROTATED, BbobInstance, make_instance
from elagp.errors import UnknownFunction

ALL_FIDS = list(range(1, 25))


def test_function_table():
    assert sorted(FUNCTION_NAMES) == ALL_FIDS
    assert FUNCTION_NAMES[1] == "sphere"
    assert FUNCTION_NAMES[20] == "schwefel"


@pytest.mark.parametrize("fid", ALL_FIDS)
def test_optimum_value(fid):
    """evaluate(x_opt) == f_opt for every function."""
    for iid in (1, 3):
        inst = make_instance(fid, iid, 2)
        assert inst.evaluate(inst.x_opt) == pytest.approx(inst.f_opt, abs=1e-9)


@pytest.mark.parametrize("fid", ALL_FIDS)
def test_no_value_below_optimum(fid):
    rng = np.random.default_rng(fid)
    inst = make_instance(fid, 1, 2)
    X = rng.uniform(-5, 5, size=(2000, 2))
    y = inst.evaluate_batch(X)
    assert np.all(np.isfinite(y))
    assert np.min(y) >= inst.f_opt - 1e-9


@pytest.mark.parametrize("fid", ALL_FIDS)
def test_determinism(fid):
    a = make_instance(fid, 2, 2)
    b = make_instance(fid, 2, 2)
    np.testing.assert_array_equal(a.x_opt, b.x_opt)
    assert a.f_opt == b.f_opt
    X = np.random.default_rng(0).uniform(-5, 5, size=(50, 2))
    np.testing.assert_array_equal(a.evaluate_batch(X), b.evaluate_batch(X))


def test_instances_differ():
    a = make_instance(1, 1, 2)
    b = make_instance(1, 2, 2)
    assert not np.allclose(a.x_opt, b.x_opt)
    assert a.f_opt != b.f_opt


def test_shift_and_offset_ranges():
    for fid in ALL_FIDS:
        for iid in (1, 5):
            inst = make_instance(fid, iid, 3)
            assert np.all(np.abs(inst.x_opt) <= 4.0)
            assert abs(inst.f_opt) <= 100.0


@pytest.mark.parametrize("fid", sorted(_ROTATED))
def test_rotation_is_orthogonal(fid):
    inst = make_instance(fid, 1, 4)
    R = inst.rotation
    np.testing.assert_allclose(R @ R.T, np.eye(4), atol=1e-12)
    assert abs(abs(np.linalg.det(R)) - 1.0) < 1e-12


def test_unrotated_functions_have_no_rotation():
    for fid in set(ALL_FIDS) - _ROTATED:
        assert make_instance(fid, 1, 3).rotation is None


class TestLinearSlope:
    def test_optimum_on_boundary(self):
        inst = make_instance(5, 1, 2)
        assert np.all(np.abs(inst.x_opt) == 4.0)

    def test_flat_beyond_optimum(self):
        inst = make_instance(5, 1, 2)
        signs = inst.extras["signs"]
        # moving past the optimum in the improving direction changes nothing
        beyond = inst.x_opt + 0.5 * signs
        assert inst.evaluate(np.clip(beyond, -5, 5)) == pytest.approx(inst.f_opt)

    def test_constant_gradient_inside(self):
        """Finite differences: slope is constant where the clamp is inactive."""
        inst = make_instance(5, 1, 2)
        signs = inst.extras["signs"]
        x = -2.0 * signs  # well inside the sloped region
        h = 1e-5
        grads = []
        for shift in (0.0, 1.0):
            base = x - shift * signs
            g = np.empty(2)
            for i in range(2):
                e = np.zeros(2)
                e[i] = h
                g[i] = (inst.evaluate(base + e) - inst.evaluate(base - e)) / (2 * h)
            grads.append(g)
        np.testing.assert_allclose(grads[0], grads[1], rtol=1e-4)
        assert np.all(np.sign(grads[0]) == np.sign(grads[1]))


def test_step_ellipsoidal_is_plateaued():
    inst = make_instance(7, 1, 2)
    x = inst.x_opt + 1.0
    base = inst.evaluate(x)
    assert inst.evaluate(x + 1e-6) == pytest.approx(base, rel=1e-6)


def test_gallagher_peak_structure():
    for fid in (21, 22):
        inst = make_instance(fid, 1, 2)
        n_peaks = 101 if fid == 21 else 21
        assert inst.extras["centers"].shape == (n_peaks, 2)
        np.testing.assert_array_equal(inst.extras["centers"][0], inst.x_opt)
        assert inst.extras["weights"][0] == 10.0
        assert np.all(inst.extras["weights"][1:] < 10.0)


def test_evaluate_batch_validates_shape():
    inst = make_instance(1, 1, 2)
    with pytest.raises(ValueError):
        inst.evaluate_batch(np.zeros((5, 3)))


def test_in_domain():
    inst = make_instance(1, 1, 2)
    assert inst.in_domain([4.9, -4.9])
    assert not inst.in_domain([5.1, 0.0])


def test_invalid_arguments():
    with pytest.raises(UnknownFunction):
        make_instance(25, 1, 2)
    with pytest.raises(ValueError):
        make_instance(1, 0, 2)
    with pytest.raises(ValueError):
        make_instance(1, 1, 1)


def test_instance_is_frozen():
    inst = make_instance(1, 1, 2)
    assert isinstance(inst, BbobInstance)
    with pytest.raises(AttributeError):
        inst.fid = 2
