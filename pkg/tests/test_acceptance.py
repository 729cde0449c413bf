"""Acceptance battery. One test per criterion; each prints a PASS/FAIL line.

The expensive evolution runs are shared between criteria via module-scoped
fixtures. Set ELAGP_FULL=1 to run the full 24-target battery instead of the
6-target smoke subset.
"""

import os
import time

import numpy as np
import pytest
from scipy.optimize import linprog

from elagp.ela import compute_ela_sample
from elagp.errors import DegenerateObjective, ElaComputationFailed
from elagp.featurespace import (
    ALL_METRICS,
    fitness,
    inner_outer_analysis,
    inner_outer_auc,
    kendall_tau_matrix,
    make_target_profile,
    pairwise_instance_distances,
    wasserstein_1d,
)
from elagp.generator import GeneratorConfig, generate_baseline_set, sample_tree
from elagp.gp import GpConfig, run_gp
from elagp.ops import OPERANDS, OPERATORS
from elagp.sampling import DoeDesign

FULL = os.environ.get("ELAGP_FULL") == "1"
SMOKE_TARGETS = (1, 5, 12, 2, 8, 20)
TARGETS = tuple(range(1, 25)) if FULL else SMOKE_TARGETS
RFG_COUNT = 1000


def report(name, ok, detail):
    print(f"\n[{name}] {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def gp_runs(ref2, design2):
    """One seed-fixed evolution run per target (pop 50, 50 generations)."""
    runs = {}
    for fid in TARGETS:
        config = GpConfig(target_fid=fid, dim=2, seed=100 + fid, design_seed=0)
        target = make_target_profile(ref2, fid)
        runs[fid] = run_gp(config, design=design2, ref=ref2, target=target)
    return runs


@pytest.fixture(scope="module")
def rfg_min_fitness(ref2, design2):
    """Minimum fitness of the 1000-function baseline set, per target."""
    config = GeneratorConfig(dim=2, seed=777)
    baseline = generate_baseline_set(config, RFG_COUNT, design2.points)
    samples = []
    for tree, y in baseline.functions:
        evaluated = DoeDesign(design2.dim, design2.seed, design2.points, y,
                              design2.bootstrap_sets)
        try:
            samples.append(compute_ela_sample(evaluated, seed=design2.seed))
        except ElaComputationFailed:
            continue
    mins = {}
    for fid in TARGETS:
        target = make_target_profile(ref2, fid)
        values = []
        for sample in samples:
            try:
                values.append(fitness(sample, target, ref2))
            except Exception:
                continue
        mins[fid] = min(values)
    return mins


def test_a1_probability_table_integrity():
    start = time.time()
    s_operands = sum(s.init_probability for s in OPERANDS)
    s_operators = sum(s.init_probability for s in OPERATORS)
    sums_ok = abs(s_operands - 1.0) <= 1e-9 and abs(s_operators - 1.0) <= 1e-9

    rng = np.random.default_rng(0)
    worst = 0.0
    for group in (OPERANDS, OPERATORS):
        p = np.array([s.init_probability for s in group])
        draws = rng.choice(len(group), size=10**6, p=p)
        freq = np.bincount(draws, minlength=len(group)) / 10**6
        worst = max(worst, float(np.max(np.abs(freq - p))))
    elapsed = time.time() - start
    report(
        "A1", sums_ok and worst <= 0.002 and elapsed < 10,
        f"sums ({s_operands:.10f}, {s_operators:.10f}), max freq error "
        f"{worst:.5f} at 1e6 draws, {elapsed:.1f}s",
    )


def test_a2_protection_totality():
    start = time.time()
    config = GeneratorConfig(dim=2)
    rng = np.random.default_rng(0)
    X = rng.uniform(-5, 5, size=(100, 2))
    faults = 0
    for _ in range(10**5):
        tree = sample_tree(config, rng)
        try:
            tree.evaluate_batch(X)
        except Exception:
            faults += 1

    from elagp.tree import parse_expression

    exact = all(
        parse_expression(expr).evaluate([arg]) == 1.0
        for expr in ("div(5, x)", "rec(x)", "log(x)")
        for arg in (0.0, 1e-21, -1e-21)
    )
    elapsed = time.time() - start
    report(
        "A2", faults == 0 and exact and elapsed < 120,
        f"{faults} faults over 1e5 trees x 100 points, protected branches "
        f"exact: {exact}, {elapsed:.1f}s",
    )


def _lp_wasserstein(a, b):
    """Brute-force optimal-transport LP between two empirical distributions."""
    m, n = len(a), len(b)
    cost = np.abs(a[:, None] - b[None, :]).ravel()
    A_eq = np.zeros((m + n, m * n))
    for i in range(m):
        A_eq[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        A_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([np.full(m, 1.0 / m), np.full(n, 1.0 / n)])
    res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res.fun


def test_a3_wasserstein_oracle():
    start = time.time()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        a = rng.normal(scale=rng.uniform(0.1, 10), size=rng.integers(1, 7))
        b = rng.normal(scale=rng.uniform(0.1, 10), size=rng.integers(1, 7))
        worst = max(worst, abs(wasserstein_1d(a, b) - _lp_wasserstein(a, b)))
    elapsed = time.time() - start
    report("A3", worst <= 1e-9 and elapsed < 30,
           f"max |W1 - LP| = {worst:.2e} over 1000 pairs, {elapsed:.1f}s")


def test_a4_ela_oracles(design2):
    start = time.time()
    linear = design2.evaluated(lambda X: 2.0 * X[:, 0] - 3.0 * X[:, 1] + 1.0)
    lin_sample = compute_ela_sample(linear, seed=0)
    names = list(lin_sample.feature_names)
    lin_r2 = lin_sample.matrix()[:, names.index("ela_meta.lin_simple.adj_r2")]
    sphere = design2.evaluated(lambda X: np.sum(X * X, axis=1))
    conds = compute_ela_sample(sphere, seed=0).matrix()[
        :, names.index("ela_meta.quad_simple.cond")]

    constant = DoeDesign(design2.dim, design2.seed, design2.points,
                         np.ones(design2.n), design2.bootstrap_sets)
    try:
        compute_ela_sample(constant, seed=0)
        degenerate_ok = False
    except (ElaComputationFailed, DegenerateObjective):
        degenerate_ok = True

    lin_ok = np.all(np.abs(lin_r2 - 1.0) <= 1e-6)
    cond_ok = np.all(np.abs(conds - 1.0) <= 0.05)
    elapsed = time.time() - start
    report(
        "A4", lin_ok and cond_ok and degenerate_ok and elapsed < 30,
        f"linear adj_r2 in [{lin_r2.min():.8f}, {lin_r2.max():.8f}], sphere cond "
        f"in [{conds.min():.4f}, {conds.max():.4f}], constant rejected: "
        f"{degenerate_ok}, {elapsed:.1f}s",
    )


def test_a5_gp_improvement(gp_runs):
    improved = {}
    for fid in (1, 5, 12):
        log = gp_runs[fid]
        initial = min(r["fitness"] for r in log.records if r["generation"] == 0)
        improved[fid] = log.best_fitness < initial
    detail = ", ".join(
        f"F{fid}: {min(r['fitness'] for r in gp_runs[fid].records if r['generation'] == 0):.4f}"
        f" -> {gp_runs[fid].best_fitness:.4f}" for fid in (1, 5, 12)
    )
    report("A5", sum(improved.values()) == 3, f"{sum(improved.values())}/3 improved ({detail})")


def test_a6_gp_vs_rfg_lower_tail(gp_runs, rfg_min_fitness):
    wins = {
        fid: gp_runs[fid].best_fitness <= rfg_min_fitness[fid] for fid in TARGETS
    }
    needed = 18 if FULL else 5
    detail = ", ".join(
        f"F{fid}: gp {gp_runs[fid].best_fitness:.4f} vs rfg "
        f"{rfg_min_fitness[fid]:.4f}" for fid in TARGETS
    )
    report("A6", sum(wins.values()) >= needed,
           f"{sum(wins.values())}/{len(TARGETS)} targets (need {needed}): {detail}")


def test_a7_infeasibility_rate(gp_runs):
    log = gp_runs[1]
    rate = log.n_invalid() / len(log.records)
    report("A7", rate < 0.10,
           f"{log.n_invalid()}/{len(log.records)} invalid evaluations "
           f"({100 * rate:.1f}%)")


def test_a8_distance_separation(ref2):
    split = inner_outer_analysis(ref2)
    auc = {
        metric: inner_outer_auc(split[metric]["inner"], split[metric]["outer"])
        for metric in ALL_METRICS
    }
    ok = (auc["cosine"] > auc["wasserstein"]
          and auc["correlation"] > auc["wasserstein"])
    detail = ", ".join(f"{m}: {auc[m]:.4f}" for m in ALL_METRICS)
    report("A8", ok, f"cosine and correlation must both exceed wasserstein ({detail})")


def test_a9_kendall_tau_sanity(ref2):
    _, dists = pairwise_instance_distances(ref2)
    metrics, M = kendall_tau_matrix({m: list(dists[m]) for m in ALL_METRICS})
    off = M[~np.eye(len(metrics), dtype=bool)]
    ok = (np.all(np.diag(M) == 1.0) and np.all(off > 0.0) and np.all(off < 1.0))
    report("A9", ok,
           f"off-diagonal range [{off.min():.4f}, {off.max():.4f}], diagonal all 1")


def test_a10_determinism(tmp_path):
    from elagp.cli import _run_reference_build, replay_manifest

    base = tmp_path / "ref1"
    _run_reference_build(2, 0, base, 0.95, threads=1)
    replay_manifest(base / "manifest.json", out=tmp_path / "ref1b", threads=1)
    replay_manifest(base / "manifest.json", out=tmp_path / "ref8", threads=8)

    identical = all(
        (base / name).read_bytes()
        == (tmp_path / "ref1b" / name).read_bytes()
        == (tmp_path / "ref8" / name).read_bytes()
        for name in ("corpus.csv", "bounds.json")
    )
    report("A10", identical,
           "reference corpus byte-identical across replays with threads 1 and 8")
