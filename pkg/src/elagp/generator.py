"""Random function generator: probability-driven tree growth with resampling.

Trees are grown recursively. While the minimum depth is not yet reachable the
draw is restricted to operators, at the maximum depth it is restricted to
operands, and in between the full symbol pool is admissible; in every case the
probability column is renormalized over the admissible subset. Structural
validity is therefore guaranteed by construction and resampling only handles
semantic invalidity (non-finite or constant objective values on the design).
"""

from dataclasses import dataclass, field

import numpy as np

from elagp.errors import ResamplingExhausted
from elagp.ops import ALL_SYMBOLS, OPERANDS, OPERATORS, validate_probabilities
from elagp.tree import ExprTree, Node

_OPERAND_P = np.array([s.init_probability for s in OPERANDS])
_OPERATOR_P = np.array([s.init_probability for s in OPERATORS])
_ALL_P = np.array([s.init_probability for s in ALL_SYMBOLS]) / sum(
    s.init_probability for s in ALL_SYMBOLS
)


@dataclass
class GeneratorConfig:
    dim: int
    depth_min: int = 3
    depth_max: int = 12
    seed: int = 0
    max_resample_attempts: int = 1000
    operands: tuple = OPERANDS
    operators: tuple = OPERATORS

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not 1 <= self.depth_min <= self.depth_max:
            raise ValueError("need 1 <= depth_min <= depth_max")
        validate_probabilities(self.operands, self.operators)


def _probs(specs):
    p = np.array([s.init_probability for s in specs], dtype=float)
    return p / p.sum()


def draw_symbol(rng, specs, probs=None):
    """Draw one OpSpec from ``specs`` using (renormalized) selection probabilities."""
    if probs is None:
        probs = _probs(specs)
    return specs[rng.choice(len(specs), p=probs)]


def _make_leaf(spec, rng):
    if spec.symbol == "x":
        return Node.var()
    if spec.symbol == "a":
        return Node.const(rng.uniform(1.0, 10.0))
    # rand: realized once at creation so the tree stays deterministic
    return Node.const(rng.uniform(1.0, 1.1))


def grow_subtree(rng, config, level=1, force_min_depth=True):
    """Grow one node at the given level (root is level 1)."""
    operands, operators = config.operands, config.operators
    if force_min_depth and level < config.depth_min:
        spec = draw_symbol(rng, operators, _probs(operators))
    elif level >= config.depth_max:
        spec = draw_symbol(rng, operands, _probs(operands))
    else:
        pool = operands + operators
        spec = draw_symbol(rng, pool, _probs(pool))
    if spec.arity == 0:
        return _make_leaf(spec, rng)
    children = [
        grow_subtree(rng, config, level + 1, force_min_depth) for _ in range(spec.arity)
    ]
    return Node(spec.symbol, children)


def sample_tree(config, rng):
    """Sample one structurally valid tree with depth in [depth_min, depth_max]."""
    return ExprTree(grow_subtree(rng, config, level=1))


def is_valid_objective(y):
    """Semantic validity of an objective vector: finite everywhere, not constant."""
    y = np.asarray(y)
    if not np.all(np.isfinite(y)):
        return False
    return np.min(y) < np.max(y)


def sample_valid_function(config, design_points, rng):
    """Resample trees until one yields a finite non-constant objective vector.

    Returns (tree, y, n_rejected). Raises ResamplingExhausted after
    ``config.max_resample_attempts`` consecutive invalid draws.
    """
    X = np.asarray(design_points, dtype=float)
    if X.shape[1] != config.dim:
        raise ValueError(f"design has d={X.shape[1]}, config has d={config.dim}")
    rejected = 0
    for _ in range(config.max_resample_attempts):
        tree = sample_tree(config, rng)
        y = tree.evaluate_batch(X)
        if is_valid_objective(y):
            return tree, y, rejected
        rejected += 1
    raise ResamplingExhausted(
        f"no valid tree after {config.max_resample_attempts} attempts"
    )


@dataclass
class BaselineSet:
    functions: list = field(default_factory=list)  # (ExprTree, y) pairs
    rejected: int = 0


def generate_baseline_set(config, count, design_points):
    """Generate ``count`` valid functions with independent per-index RNG substreams."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = BaselineSet()
    for index in range(count):
        rng = np.random.default_rng([config.seed, index])
        tree, y, rejected = sample_valid_function(config, design_points, rng)
        out.functions.append((tree, y))
        out.rejected += rejected
    return out
