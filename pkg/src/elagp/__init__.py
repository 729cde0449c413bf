"""Function evolution guided by landscape-analysis features.

Core pieces:

* :mod:`elagp.tree` -- expression-tree genotype and evaluation semantics
* :mod:`elagp.generator` -- random function generator (baseline sampler)
* :mod:`elagp.bbob` -- the 24 benchmark targets with an instance mechanism
* :mod:`elagp.sampling` -- Sobol' designs and bootstrap index sets
* :mod:`elagp.ela` -- landscape feature computation
* :mod:`elagp.featurespace` -- normalization, distances, fitness, analyses
* :mod:`elagp.gp` -- the genetic-programming engine
* :mod:`elagp.estimators` -- sklearn-style wrappers
"""

from elagp.tree import ExprTree, parse_expression
from elagp.generator import GeneratorConfig, sample_tree, sample_valid_function
from elagp.bbob import BbobInstance, make_instance
from elagp.sampling import DoeDesign, sobol_design, make_bootstraps
from elagp.ela import compute_features, compute_ela_sample, normalize_objective
from elagp.featurespace import (
    ReferenceSet,
    TargetProfile,
    build_reference,
    fitness,
    wasserstein_1d,
)
from elagp.gp import GpConfig, run_gp

__version__ = "0.1.0"

__all__ = [
    "ExprTree",
    "parse_expression",
    "GeneratorConfig",
    "sample_tree",
    "sample_valid_function",
    "BbobInstance",
    "make_instance",
    "DoeDesign",
    "sobol_design",
    "make_bootstraps",
    "compute_features",
    "compute_ela_sample",
    "normalize_objective",
    "ReferenceSet",
    "TargetProfile",
    "build_reference",
    "fitness",
    "wasserstein_1d",
    "GpConfig",
    "run_gp",
]
