"""sklearn-style wrappers so the pipeline composes with the wider ecosystem.

``FunctionEvolver`` is the fit/predict face of the GP engine: ``fit`` runs the
evolution toward the configured target, ``predict`` evaluates the best evolved
expression on points. ``ReferenceNormalizer`` is the fit/transform face of the
reference-based feature normalization with correlation filtering.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from elagp.featurespace import build_reference, filter_correlated, make_target_profile
from elagp.gp import GpConfig, run_gp
from elagp.sampling import DoeDesign
from elagp.tree import parse_expression


class ReferenceNormalizer(TransformerMixin, BaseEstimator):
    """Min-max normalization over a feature corpus with correlation filtering.

    Fitting records per-feature min/max and a retained-feature mask (features
    with |Spearman rho| above ``threshold`` to an already retained feature are
    dropped). ``transform`` scales rows and keeps only retained columns;
    out-of-range values are intentionally not clipped.
    """

    def __init__(self, threshold=0.95):
        self.threshold = threshold

    def fit(self, X, y=None):
        X = check_array(X, ensure_all_finite="allow-nan")
        self.n_features_in_ = X.shape[1]
        names = tuple(f"f{i}" for i in range(X.shape[1]))
        self.retained_ = filter_correlated(X, names, self.threshold)
        with np.errstate(all="ignore"):
            self.mins_ = np.nanmin(X, axis=0)
            self.maxs_ = np.nanmax(X, axis=0)
        degenerate = ~(np.isfinite(self.mins_) & (self.maxs_ > self.mins_))
        self.retained_ = self.retained_ & ~degenerate
        return self

    def transform(self, X):
        check_is_fitted(self, "retained_")
        X = check_array(X, ensure_all_finite="allow-nan")
        if X.shape[1] != self.n_features_in_:
            raise ValueError("feature count mismatch with fit data")
        span = np.where(self.maxs_ > self.mins_, self.maxs_ - self.mins_, 1.0)
        return ((X - self.mins_) / span)[:, self.retained_]


class FunctionEvolver(BaseEstimator):
    """Evolve a closed-form expression whose landscape resembles a benchmark target.

    Parameters mirror the GP configuration. ``fit`` ignores X/y (the training
    signal is the target's feature profile); afterwards ``best_expression_``
    holds the evolved expression and ``predict(X)`` evaluates it row-wise.
    A prebuilt reference set can be passed to ``fit`` to avoid the expensive
    reference build.
    """

    def __init__(self, target_fid=1, dim=2, seed=0, design_seed=0,
                 population_size=50, max_generations=50, tournament_size=5,
                 crossover_prob=0.5, mutation_prob=0.1, elitism=False,
                 pooling="pooled"):
        self.target_fid = target_fid
        self.dim = dim
        self.seed = seed
        self.design_seed = design_seed
        self.population_size = population_size
        self.max_generations = max_generations
        self.tournament_size = tournament_size
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.elitism = elitism
        self.pooling = pooling

    def _config(self):
        return GpConfig(
            target_fid=self.target_fid, dim=self.dim, seed=self.seed,
            design_seed=self.design_seed, population_size=self.population_size,
            max_generations=self.max_generations,
            tournament_size=self.tournament_size,
            crossover_prob=self.crossover_prob, mutation_prob=self.mutation_prob,
            elitism=self.elitism, pooling=self.pooling,
        )

    def fit(self, X=None, y=None, reference=None):
        config = self._config()
        design = DoeDesign(self.dim, self.design_seed)
        ref = reference if reference is not None else build_reference(
            self.dim, self.design_seed
        )
        target = make_target_profile(ref, self.target_fid)
        self.run_log_ = run_gp(config, design=design, ref=ref, target=target)
        self.best_expression_ = self.run_log_.best_expression
        self.best_fitness_ = self.run_log_.best_fitness
        self.best_tree_ = parse_expression(self.best_expression_)
        return self

    def predict(self, X):
        check_is_fitted(self, "best_tree_")
        X = check_array(X)
        if X.shape[1] != self.dim:
            raise ValueError(f"expected d={self.dim} columns")
        return self.best_tree_.evaluate_batch(X)
