"""Sobol' designs on [-5,5]^d and bootstrap index sets for feature replication."""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from elagp.errors import DimensionUnsupported

DOMAIN_LOW = -5.0
DOMAIN_HIGH = 5.0
SAMPLES_PER_DIM = 150
BOOTSTRAP_FRACTION = 0.8
BOOTSTRAP_REPS = 5


def sobol_design(dim, n, seed, scramble=True):
    """First n points of a (scrambled) Sobol' sequence, mapped to [-5,5]^d.

    ``scramble=False`` gives the unscrambled sequence (first point at the
    lower corner) for cross-validation against reference implementations.
    """
    if dim < 1:
        raise DimensionUnsupported("dim must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    try:
        sampler = qmc.Sobol(d=dim, scramble=scramble, seed=seed)
    except ValueError as exc:
        raise DimensionUnsupported(str(exc)) from exc
    with warnings.catch_warnings():
        # n = 150d is intentionally not a power of two
        warnings.simplefilter("ignore", UserWarning)
        unit = sampler.random(n)
    return DOMAIN_LOW + (DOMAIN_HIGH - DOMAIN_LOW) * unit


def make_bootstraps(n, fraction=BOOTSTRAP_FRACTION, reps=BOOTSTRAP_REPS, seed=0):
    """reps index lists of round(fraction * n) distinct indices (no replacement)."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    size = int(round(fraction * n))
    sets = []
    for rep in range(reps):
        rng = np.random.default_rng([seed, rep])
        sets.append(np.sort(rng.permutation(n)[:size]))
    return sets


@dataclass
class DoeDesign:
    """Evaluated Sobol' design plus its bootstrap index sets."""

    dim: int
    seed: int
    points: np.ndarray = None
    y: np.ndarray = None
    bootstrap_sets: list = field(default_factory=list)

    def __post_init__(self):
        if self.points is None:
            n = SAMPLES_PER_DIM * self.dim
            self.points = sobol_design(self.dim, n, self.seed)
        if not self.bootstrap_sets:
            self.bootstrap_sets = make_bootstraps(len(self.points), seed=self.seed)

    @property
    def n(self):
        return len(self.points)

    def evaluated(self, evaluator):
        """Return a copy of the design with y = evaluator(points)."""
        y = np.asarray(evaluator(self.points), dtype=float)
        if y.shape != (self.n,):
            raise ValueError("evaluator must return one value per design point")
        return DoeDesign(self.dim, self.seed, self.points, y, self.bootstrap_sets)
