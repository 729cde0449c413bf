import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elagp.errors import ResamplingExhausted
from elagp.generator import (
    GeneratorConfig,
    draw_symbol,
    generate_baseline_set,
    grow_subtree,
    is_valid_objective,
    sample_tree,
    sample_valid_function,
)
from elagp.ops import OPERANDS, OPERATORS
from elagp.tree import ExprTree, iter_nodes


def test_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(dim=0)
    with pytest.raises(ValueError):
        GeneratorConfig(dim=2, depth_min=5, depth_max=3)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_depth_within_bounds(seed):
    config = GeneratorConfig(dim=2)
    tree = sample_tree(config, np.random.default_rng(seed))
    assert config.depth_min <= tree.depth <= config.depth_max


def test_shallow_config_respected():
    config = GeneratorConfig(dim=2, depth_min=1, depth_max=2)
    for seed in range(50):
        tree = sample_tree(config, np.random.default_rng(seed))
        assert tree.depth <= 2


def test_constant_ranges():
    """a-constants land in [1,10], rand-constants in [1,1.1]."""
    config = GeneratorConfig(dim=2)
    values = []
    for seed in range(300):
        tree = sample_tree(config, np.random.default_rng(seed))
        for node, _, _ in iter_nodes(tree.root):
            if node.symbol == "const":
                values.append(node.value)
    values = np.asarray(values)
    assert len(values) > 100
    assert np.all((values >= 1.0) & (values <= 10.0))
    small = values[values <= 1.1]
    assert len(small) > 0  # rand leaves occur


def test_draw_symbol_restriction():
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert draw_symbol(rng, OPERANDS).arity == 0
        assert draw_symbol(rng, OPERATORS).arity >= 1


def test_grow_without_min_depth_can_be_leaf():
    config = GeneratorConfig(dim=2)
    leaves = sum(
        1
        for seed in range(200)
        if grow_subtree(np.random.default_rng(seed), config, level=5,
                        force_min_depth=False).is_leaf()
    )
    assert leaves > 0


def test_determinism():
    config = GeneratorConfig(dim=3)
    t1 = sample_tree(config, np.random.default_rng(7))
    t2 = sample_tree(config, np.random.default_rng(7))
    assert t1.serialize() == t2.serialize()


class TestValidity:
    def test_rejects_nonfinite(self):
        assert not is_valid_objective([1.0, np.inf])
        assert not is_valid_objective([1.0, np.nan])

    def test_rejects_constant(self):
        assert not is_valid_objective(np.ones(10))

    def test_accepts_varying_finite(self):
        assert is_valid_objective([0.0, 1.0, 2.0])


def test_sample_valid_function(rng):
    config = GeneratorConfig(dim=2)
    X = rng.uniform(-5, 5, size=(50, 2))
    tree, y, rejected = sample_valid_function(config, X, np.random.default_rng(3))
    assert isinstance(tree, ExprTree)
    assert is_valid_objective(y)
    assert rejected >= 0
    np.testing.assert_array_equal(y, tree.evaluate_batch(X))


def test_sample_valid_function_dim_mismatch(rng):
    X = rng.uniform(-5, 5, size=(10, 3))
    with pytest.raises(ValueError):
        sample_valid_function(GeneratorConfig(dim=2), X, np.random.default_rng(0))


def test_resampling_exhausted(rng):
    # a pool of only constant leaves can never produce a varying objective
    from elagp.ops import OpSpec

    operands = (OpSpec("a", 0, 1.0),)
    operators = (OpSpec("add", 2, 1.0),)
    config = GeneratorConfig(dim=2, depth_min=1, depth_max=2, operands=operands,
                             operators=operators, max_resample_attempts=20)
    X = rng.uniform(-5, 5, size=(10, 2))
    with pytest.raises(ResamplingExhausted):
        sample_valid_function(config, X, np.random.default_rng(0))


def test_baseline_set_substreams_are_stable(rng):
    """Each index uses its own RNG substream, so prefixes agree across counts."""
    config = GeneratorConfig(dim=2, seed=11)
    X = rng.uniform(-5, 5, size=(60, 2))
    small = generate_baseline_set(config, 3, X)
    large = generate_baseline_set(config, 6, X)
    for (t1, _), (t2, _) in zip(small.functions, large.functions):
        assert t1.serialize() == t2.serialize()


def test_baseline_set_count_validation(rng):
    X = rng.uniform(-5, 5, size=(10, 2))
    with pytest.raises(ValueError):
        generate_baseline_set(GeneratorConfig(dim=2), 0, X)
