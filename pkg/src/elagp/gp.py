"""Canonical generational GP evolving expression trees toward a target profile.

Selection is tournament (size 5) with replacement, variation is pairwise
subtree crossover (p = 0.5) followed by per-offspring subtree mutation
(p = 0.1), replacement is generational. Offspring whose expression is
unchanged inherit the cached fitness without a new evaluation record, so with
the default rates about 45% of selected individuals pass through unevaluated.

Invalid individuals (one of the four failure classes) carry the penalty
fitness exactly; mid-run invalid offspring are penalized rather than
resampled, resampling applies only to initialization.
"""

from dataclasses import dataclass, field

import numpy as np

from elagp.errors import (
    ElaComputationFailed,
    ExpressionParseError,
    InvalidDistance,
)
from elagp.ela import compute_ela_sample
from elagp.featurespace import build_reference, fitness, make_target_profile
from elagp.generator import (
    GeneratorConfig,
    grow_subtree,
    is_valid_objective,
    sample_valid_function,
)
from elagp.sampling import DoeDesign
from elagp.tree import ExprTree, parse_expression

VALID = "valid"
INVALID_EXPRESSION = "invalid_expression"
INVALID_OBJECTIVE = "invalid_objective"
INVALID_ELA = "invalid_ela"
INVALID_DISTANCE = "invalid_distance"


@dataclass
class GpConfig:
    target_fid: int
    dim: int
    seed: int = 0
    design_seed: int = 0
    population_size: int = 50
    max_generations: int = 50
    tournament_size: int = 5
    crossover_prob: float = 0.5
    mutation_prob: float = 0.1
    penalty: float = 10000.0
    depth_min: int = 3
    depth_max: int = 12
    depth_limit: int = 17
    elitism: bool = False
    pooling: str = "pooled"

    def __post_init__(self):
        if not 0 <= self.crossover_prob <= 1 or not 0 <= self.mutation_prob <= 1:
            raise ValueError("variation probabilities must be in [0, 1]")
        if self.population_size < self.tournament_size:
            raise ValueError("population_size must be >= tournament_size")

    def generator_config(self):
        return GeneratorConfig(
            dim=self.dim,
            depth_min=self.depth_min,
            depth_max=self.depth_max,
            seed=self.seed,
        )


@dataclass
class Individual:
    tree: ExprTree
    fitness: float = np.nan
    validity: str = VALID
    evaluated: bool = False
    generation_born: int = 0

    @property
    def expression(self):
        return self.tree.serialize()


@dataclass
class GpRunLog:
    config: GpConfig
    records: list = field(default_factory=list)  # one dict per actual evaluation
    generations: list = field(default_factory=list)
    final_population: list = field(default_factory=list)
    best_expression: str = ""
    best_fitness: float = np.inf
    init_resamples: int = 0
    depth_rejections: int = 0
    features: dict = field(default_factory=dict)

    def n_invalid(self):
        return sum(1 for r in self.records if r["validity"] != VALID)


class FitnessPipeline:
    """Shared evaluation pipeline with an expression-keyed cache."""

    def __init__(self, config, design, target, ref, collect_features=False):
        self.config = config
        self.design = design
        self.target = target
        self.ref = ref
        self.cache = {}
        self.collect_features = collect_features
        self.feature_store = {}  # expression -> (5, n_retained) normalized matrix

    def evaluate(self, tree_or_text):
        """Full pipeline; failures become (penalty, invalidity class)."""
        if isinstance(tree_or_text, str):
            try:
                tree = parse_expression(tree_or_text)
            except ExpressionParseError:
                return self.config.penalty, INVALID_EXPRESSION
        else:
            tree = tree_or_text
        try:
            y = tree.evaluate_batch(self.design.points)
        except Exception:
            return self.config.penalty, INVALID_EXPRESSION
        if not is_valid_objective(y):
            return self.config.penalty, INVALID_OBJECTIVE
        evaluated = DoeDesign(
            self.design.dim, self.design.seed, self.design.points, y,
            self.design.bootstrap_sets,
        )
        try:
            sample = compute_ela_sample(evaluated, seed=self.design.seed)
        except ElaComputationFailed:
            return self.config.penalty, INVALID_ELA
        try:
            value = fitness(sample, self.target, self.ref, pooling=self.config.pooling)
        except InvalidDistance:
            return self.config.penalty, INVALID_DISTANCE
        if self.collect_features:
            normalized = self.ref.normalize(sample.matrix())[:, self.ref.retained]
            self.feature_store[tree.serialize()] = normalized
        return value, VALID

    def evaluate_cached(self, tree):
        """Returns (fitness, validity, fresh) where fresh means a new evaluation."""
        key = tree.serialize()
        hit = self.cache.get(key)
        if hit is not None:
            return hit[0], hit[1], False
        value, validity = self.evaluate(tree)
        self.cache[key] = (value, validity)
        return value, validity, True


def _tournament(population, rng, size):
    idx = rng.integers(0, len(population), size=size)
    best = min(idx, key=lambda i: population[i].fitness)
    return population[best]


def _node_entries(root):
    """Uniform node selection support: (node, parent, child_index, level)."""
    entries = []
    stack = [(root, None, 0, 1)]
    while stack:
        node, parent, idx, level = stack.pop()
        entries.append((node, parent, idx, level))
        for i, c in enumerate(node.children):
            stack.append((c, node, i, level + 1))
    return entries


def _replace(tree, parent, idx, subtree):
    if parent is None:
        tree.root = subtree
    else:
        parent.children[idx] = subtree


def _crossover(t1, t2, rng):
    e1 = _node_entries(t1.root)
    e2 = _node_entries(t2.root)
    n1, p1, i1, _ = e1[rng.integers(len(e1))]
    n2, p2, i2, _ = e2[rng.integers(len(e2))]
    s1, s2 = n1, n2
    _replace(t1, p1, i1, s2)
    _replace(t2, p2, i2, s1)


def _mutate(tree, rng, gen_config):
    entries = _node_entries(tree.root)
    node, parent, idx, level = entries[rng.integers(len(entries))]
    fresh = grow_subtree(rng, gen_config, level=min(level, gen_config.depth_max),
                         force_min_depth=False)
    _replace(tree, parent, idx, fresh)


def initialize_population(config, pipeline, rng_seed_base):
    """Population of semantically valid trees, fully evaluated through the pipeline."""
    gen_config = config.generator_config()
    population = []
    resamples = 0
    for i in range(config.population_size):
        rng = np.random.default_rng([rng_seed_base, 0, i])
        tree, _, rejected = sample_valid_function(gen_config, pipeline.design.points, rng)
        resamples += rejected
        population.append(Individual(tree=tree, generation_born=0))
    return population, resamples


def _evaluate_population(population, pipeline, log, generation):
    for ind in population:
        value, validity, fresh = pipeline.evaluate_cached(ind.tree)
        ind.fitness, ind.validity, ind.evaluated = value, validity, fresh
        if fresh:
            log.records.append(
                {
                    "eval_index": len(log.records),
                    "generation": generation,
                    "expression": ind.expression,
                    "fitness": value,
                    "validity": validity,
                }
            )


def step_generation(population, config, pipeline, rng, log, generation):
    """One generational step: selection, variation, evaluation, replacement."""
    gen_config = config.generator_config()
    n = config.population_size
    parents = [_tournament(population, rng, config.tournament_size) for _ in range(n)]
    offspring = []
    for i in range(0, n, 2):
        pair = parents[i:i + 2]
        children = [Individual(tree=p.tree.copy(), fitness=p.fitness,
                               validity=p.validity, generation_born=generation)
                    for p in pair]
        if len(children) == 2 and rng.random() < config.crossover_prob:
            _crossover(children[0].tree, children[1].tree, rng)
        for child, parent in zip(children, pair):
            if rng.random() < config.mutation_prob:
                _mutate(child.tree, rng, gen_config)
            if child.tree.depth > config.depth_limit:
                # bloat control: reject and retain the parent
                child.tree = parent.tree.copy()
                child.fitness, child.validity = parent.fitness, parent.validity
                log.depth_rejections += 1
        offspring.extend(children)
    _evaluate_population(offspring, pipeline, log, generation)
    if config.elitism:
        best_parent = min(population, key=lambda ind: ind.fitness)
        worst = max(range(n), key=lambda i: offspring[i].fitness)
        if best_parent.fitness < offspring[worst].fitness:
            offspring[worst] = Individual(
                tree=best_parent.tree.copy(), fitness=best_parent.fitness,
                validity=best_parent.validity, generation_born=generation,
            )
    return offspring


def _summarize(population, log, generation):
    fits = np.array([ind.fitness for ind in population])
    valid = np.array([ind.validity == VALID for ind in population])
    log.generations.append(
        {
            "generation": generation,
            "best_fitness": float(np.min(fits)),
            "mean_valid_fitness": float(np.mean(fits[valid])) if np.any(valid) else np.nan,
            "n_valid": int(np.sum(valid)),
            "n_evaluations": len(log.records),
        }
    )


def run_gp(config, design=None, ref=None, target=None, collect_features=False):
    """Run the full GP loop; returns the complete run log."""
    if design is None:
        design = DoeDesign(config.dim, config.design_seed)
    if ref is None:
        ref = build_reference(config.dim, config.design_seed)
    if target is None:
        target = make_target_profile(ref, config.target_fid)
    pipeline = FitnessPipeline(config, design, target, ref,
                               collect_features=collect_features)
    log = GpRunLog(config=config)
    rng = np.random.default_rng(config.seed)

    population, log.init_resamples = initialize_population(config, pipeline, config.seed)
    _evaluate_population(population, pipeline, log, generation=0)
    _summarize(population, log, 0)

    for generation in range(1, config.max_generations + 1):
        population = step_generation(population, config, pipeline, rng, log, generation)
        _summarize(population, log, generation)

    best = min(
        (r for r in log.records), key=lambda r: (r["fitness"], r["eval_index"])
    )
    log.best_expression = best["expression"]
    log.best_fitness = best["fitness"]
    log.final_population = [
        (ind.expression, ind.fitness, ind.validity) for ind in population
    ]
    log.features = pipeline.feature_store if collect_features else {}
    return log
