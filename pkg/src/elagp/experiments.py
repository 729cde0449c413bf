"""Experiment-level operations: baseline comparison and figure-data exports."""

import numpy as np
import pandas as pd

from elagp.bbob import make_instance
from elagp.ela import compute_ela_sample
from elagp.errors import DimensionUnsupported, InvalidDistance
from elagp.featurespace import fitness, make_target_profile, vector_distance
from elagp.sampling import DOMAIN_HIGH, DOMAIN_LOW, DoeDesign
from elagp.tree import parse_expression

SUMMARY_QUANTILES = (0.0, 0.05, 0.25, 0.50)


def rfg_ela_samples(ref, trees, design=None):
    """One ElaSample per baseline tree on the shared design; None where ELA fails."""
    if design is None:
        design = DoeDesign(ref.dim, ref.design_seed)
    samples = []
    for tree in trees:
        evaluated = design.evaluated(tree.evaluate_batch)
        try:
            samples.append(compute_ela_sample(evaluated, seed=design.seed))
        except Exception:
            samples.append(None)
    return samples


def compare_gp_vs_rfg(ref, targets, gp_fitness_by_fid, rfg_samples, pooling="pooled"):
    """Fitness distributions of GP-run and baseline functions per target.

    ``gp_fitness_by_fid`` maps fid to the fitness values logged during the GP
    run with that target (valid evaluations only). Baseline samples are reused
    across targets. Returns (long DataFrame, summary DataFrame).
    """
    rows = []
    for fid in targets:
        target = make_target_profile(ref, fid)
        for s in rfg_samples:
            if s is None:
                continue
            try:
                value = fitness(s, target, ref, pooling=pooling)
            except InvalidDistance:
                continue
            rows.append({"fid": fid, "source": "rfg", "fitness": value})
        for value in gp_fitness_by_fid.get(fid, []):
            rows.append({"fid": fid, "source": "gp", "fitness": value})
    long = pd.DataFrame(rows)
    summary_rows = []
    for (fid, source), group in long.groupby(["fid", "source"]):
        entry = {"fid": fid, "source": source, "count": len(group)}
        for q in SUMMARY_QUANTILES:
            entry[f"q{int(q * 100):02d}"] = float(group["fitness"].quantile(q))
        summary_rows.append(entry)
    summary = pd.DataFrame(summary_rows)
    return long, summary


def select_linear_ranks(n_ranked, n_select):
    """Ranks used for the landscape grid: linear spacing from best to worst."""
    if n_ranked <= n_select:
        return np.arange(n_ranked)
    return np.round(np.linspace(0, n_ranked - 1, n_select)).astype(int)


def export_landscape_grid(ref, fid, expressions, fitnesses, resolution=101,
                          n_select=45):
    """2-d mesh values for the 5 target instances plus rank-selected functions.

    ``expressions``/``fitnesses`` are the valid evaluations of the GP run with
    this target. Returns a long DataFrame: source, rank, fitness, x0, x1, value.
    """
    if ref.dim != 2:
        raise DimensionUnsupported("landscape grids are 2-d only")
    axis = np.linspace(DOMAIN_LOW, DOMAIN_HIGH, resolution)
    g0, g1 = np.meshgrid(axis, axis, indexing="ij")
    mesh = np.column_stack([g0.ravel(), g1.ravel()])

    order = np.argsort(fitnesses, kind="stable")
    picks = [order[r] for r in select_linear_ranks(len(order), n_select)]

    frames = []
    for iid in range(1, 6):
        inst = make_instance(fid, iid, 2)
        frames.append(pd.DataFrame({
            "source": f"target_i{iid}",
            "rank": -1,
            "fitness": np.nan,
            "x0": mesh[:, 0],
            "x1": mesh[:, 1],
            "value": inst.evaluate_batch(mesh),
        }))
    for rank, idx in enumerate(picks):
        tree = parse_expression(expressions[idx])
        frames.append(pd.DataFrame({
            "source": expressions[idx],
            "rank": rank,
            "fitness": fitnesses[idx],
            "x0": mesh[:, 0],
            "x1": mesh[:, 1],
            "value": tree.evaluate_batch(mesh),
        }))
    return pd.concat(frames, ignore_index=True)


def export_parallel_coordinates(ref, fid, gp_features, gp_fitness, highlight=None):
    """One row per (source, replicate) of normalized retained features.

    Target instance rows are labeled ``target``; the highlighted candidate
    (default: lowest fitness) is labeled ``highlight``, the rest ``candidate``.
    """
    names = ref.retained_names()
    normalized = ref.normalized_corpus()[:, ref.retained]
    rows = []
    mask = ref.corpus_fids == fid
    for row, iid, rep in zip(normalized[mask], ref.corpus_iids[mask],
                             ref.corpus_reps[mask]):
        rows.append(["target", f"F{fid}_i{iid}", rep, np.nan] + list(row))
    if highlight is None and gp_fitness:
        highlight = min(gp_fitness, key=gp_fitness.get)
    for expr, matrix in gp_features.items():
        label = "highlight" if expr == highlight else "candidate"
        for rep, row in enumerate(matrix):
            rows.append([label, expr, rep, gp_fitness.get(expr, np.nan)] + list(row))
    return pd.DataFrame(rows, columns=["label", "source", "replicate", "fitness"] + names)


def export_umap_inputs(ref, fid, gp_features):
    """Reference rows (map fit data) and candidate rows (transform data).

    Candidates are replicate means with their cityblock distance to the mean
    target vector precomputed, so the projection component does no statistics.
    """
    names = ref.retained_names()
    normalized = ref.normalized_corpus()[:, ref.retained]
    reference = pd.DataFrame(normalized, columns=names)
    reference.insert(0, "rep", ref.corpus_reps)
    reference.insert(0, "iid", ref.corpus_iids)
    reference.insert(0, "fid", ref.corpus_fids)

    target_mean = np.nanmean(normalized[ref.corpus_fids == fid], axis=0)
    rows = []
    for expr, matrix in gp_features.items():
        mean = np.mean(matrix, axis=0)
        dist = vector_distance("cityblock", mean, target_mean)
        rows.append([expr, dist] + list(mean))
    candidates = pd.DataFrame(rows, columns=["expression", "cityblock_to_target"] + names)
    return reference, candidates
