"""Feature-space machinery: reference normalization, distances, fitness, analyses.

The reference corpus is the 24 x 5 benchmark instance grid at a fixed
dimensionality, with 5 bootstrap replicates each (600 feature rows). It
provides per-feature min-max bounds for normalization and drives the
correlation-based feature filter. Fitness of a candidate is the mean, over
retained features, of the 1-Wasserstein distance between the candidate's 5
normalized replicate values and the target's 25 pooled normalized values.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import (
    canberra as _canberra,
    cityblock as _cityblock,
    euclidean as _euclidean,
)
from scipy.stats import kendalltau, rankdata

from elagp.bbob import make_instance
from elagp.ela import FEATURE_NAMES, compute_ela_sample
from elagp.errors import EmptySample, InvalidDistance, UndefinedDistance
from elagp.sampling import DoeDesign

N_FUNCTIONS = 24
N_INSTANCES = 5

VECTOR_METRICS = ("canberra", "cosine", "correlation", "euclidean", "cityblock")
ALL_METRICS = VECTOR_METRICS + ("wasserstein",)

SPEARMAN_THRESHOLD = 0.95


def wasserstein_1d(sample_a, sample_b):
    """1-Wasserstein distance between two empirical distributions.

    Computed as the area between the empirical CDFs on the merged support;
    for equal sizes this equals the mean absolute difference of the sorted
    samples.
    """
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise EmptySample("both samples must be non-empty")
    support = np.sort(np.concatenate([a, b]))
    deltas = np.diff(support)
    cdf_a = np.searchsorted(a, support[:-1], side="right") / len(a)
    cdf_b = np.searchsorted(b, support[:-1], side="right") / len(b)
    return float(np.sum(np.abs(cdf_a - cdf_b) * deltas))


def vector_distance(metric, u, v):
    """Standard vector distance between equal-length feature vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError("vectors must have equal length")
    if metric == "canberra":
        return float(_canberra(u, v))
    if metric == "cityblock":
        return float(_cityblock(u, v))
    if metric == "euclidean":
        return float(_euclidean(u, v))
    if metric == "cosine":
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu == 0 or nv == 0:
            raise UndefinedDistance("zero-norm input for cosine distance")
        return float(1.0 - np.dot(u, v) / (nu * nv))
    if metric == "correlation":
        uc, vc = u - np.mean(u), v - np.mean(v)
        nu, nv = np.linalg.norm(uc), np.linalg.norm(vc)
        if nu == 0 or nv == 0:
            raise UndefinedDistance("zero-norm centered input for correlation distance")
        return float(1.0 - np.dot(uc, vc) / (nu * nv))
    raise ValueError(f"unknown metric {metric!r}")


def _spearman_abs(corpus):
    """Pairwise |Spearman rho| over columns, NaN rows handled pairwise."""
    n_feat = corpus.shape[1]
    rho = np.zeros((n_feat, n_feat))
    ranks = np.full_like(corpus, np.nan)
    for j in range(n_feat):
        ok = np.isfinite(corpus[:, j])
        ranks[ok, j] = rankdata(corpus[ok, j])
    for i in range(n_feat):
        for j in range(i + 1, n_feat):
            ok = np.isfinite(corpus[:, i]) & np.isfinite(corpus[:, j])
            if np.sum(ok) < 3:
                continue
            ri = rankdata(corpus[ok, i])
            rj = rankdata(corpus[ok, j])
            si, sj = np.std(ri), np.std(rj)
            if si == 0 or sj == 0:
                continue
            r = np.corrcoef(ri, rj)[0, 1]
            rho[i, j] = rho[j, i] = abs(r)
    return rho


def filter_correlated(corpus, feature_names=FEATURE_NAMES, threshold=SPEARMAN_THRESHOLD):
    """Greedy elimination of highly rank-correlated features.

    Pairs with |rho| > threshold are visited in descending |rho|; from each
    still-retained pair, the feature with the higher mean |rho| to all other
    features is dropped (ties broken by feature-name order, later name drops).
    Returns a boolean retain mask aligned with ``feature_names``.
    """
    corpus = np.asarray(corpus, dtype=float)
    n_feat = corpus.shape[1]
    rho = _spearman_abs(corpus)
    mean_rho = rho.sum(axis=0) / max(n_feat - 1, 1)
    retained = np.ones(n_feat, dtype=bool)
    pairs = [
        (rho[i, j], i, j)
        for i in range(n_feat)
        for j in range(i + 1, n_feat)
        if rho[i, j] > threshold
    ]
    pairs.sort(key=lambda t: (-t[0], feature_names[t[1]], feature_names[t[2]]))
    for _, i, j in pairs:
        if not (retained[i] and retained[j]):
            continue
        if mean_rho[i] > mean_rho[j]:
            drop = i
        elif mean_rho[j] > mean_rho[i]:
            drop = j
        else:
            drop = max(i, j, key=lambda k: feature_names[k])
        retained[drop] = False
    return retained


@dataclass
class ReferenceSet:
    """Normalization bounds and retained-feature mask from the instance grid."""

    dim: int
    design_seed: int
    feature_names: tuple
    mins: np.ndarray
    maxs: np.ndarray
    retained: np.ndarray  # boolean mask over feature_names
    corpus: np.ndarray  # (600, n_features) raw feature values
    corpus_fids: np.ndarray
    corpus_iids: np.ndarray
    corpus_reps: np.ndarray

    def retained_names(self):
        return [n for n, keep in zip(self.feature_names, self.retained) if keep]

    def normalize(self, vector):
        """Min-max normalize a raw feature vector; out-of-range values kept."""
        v = np.asarray(vector, dtype=float)
        span = np.where(self.maxs > self.mins, self.maxs - self.mins, 1.0)
        return (v - self.mins) / span

    def normalized_corpus(self):
        return self.normalize(self.corpus)


def _instance_rows(args):
    fid, iid, dim, design, seed = args
    inst = make_instance(fid, iid, dim)
    evaluated = design.evaluated(inst.evaluate_batch)
    sample = compute_ela_sample(evaluated, source_id=f"F{fid}_i{iid}", seed=seed)
    return fid, iid, sample.matrix()


def build_reference(dim, design_seed, threshold=SPEARMAN_THRESHOLD, threads=1):
    """Compute the full reference corpus and derive bounds + retained mask."""
    design = DoeDesign(dim, design_seed)
    jobs = [
        (fid, iid, dim, design, design_seed)
        for fid in range(1, N_FUNCTIONS + 1)
        for iid in range(1, N_INSTANCES + 1)
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_instance_rows, jobs))
    else:
        results = [_instance_rows(j) for j in jobs]

    rows, fids, iids, reps = [], [], [], []
    for fid, iid, matrix in sorted(results, key=lambda r: (r[0], r[1])):
        for rep, row in enumerate(matrix):
            rows.append(row)
            fids.append(fid)
            iids.append(iid)
            reps.append(rep)
    corpus = np.asarray(rows)

    with np.errstate(all="ignore"):
        mins = np.nanmin(corpus, axis=0)
        maxs = np.nanmax(corpus, axis=0)
    finite = np.isfinite(mins) & np.isfinite(maxs) & (maxs > mins)
    no_missing = ~np.any(np.isnan(corpus), axis=0)
    corr_mask = filter_correlated(corpus, FEATURE_NAMES, threshold)
    return ReferenceSet(
        dim=dim,
        design_seed=design_seed,
        feature_names=FEATURE_NAMES,
        mins=mins,
        maxs=maxs,
        retained=finite & no_missing & corr_mask,
        corpus=corpus,
        corpus_fids=np.asarray(fids),
        corpus_iids=np.asarray(iids),
        corpus_reps=np.asarray(reps),
    )


@dataclass
class TargetProfile:
    """Pooled normalized replicate values of one target function."""

    fid: int
    dim: int
    feature_names: list
    values: np.ndarray  # (25, n_retained) normalized values
    n_missing: int = 0


def make_target_profile(ref, fid):
    rows = ref.corpus_fids == fid
    if not np.any(rows):
        raise ValueError(f"fid {fid} not in reference corpus")
    normalized = ref.normalized_corpus()[rows][:, ref.retained]
    return TargetProfile(
        fid=fid,
        dim=ref.dim,
        feature_names=ref.retained_names(),
        values=normalized,
        n_missing=int(np.sum(np.isnan(normalized))),
    )


def fitness(candidate, target, ref, pooling="pooled"):
    """Mean per-feature Wasserstein distance of a candidate to the target.

    ``candidate`` is an ElaSample (5 raw replicates); its replicates are
    normalized with the reference bounds. ``pooling='pooled'`` compares the
    candidate's 5 values against the target's pooled 25 values per feature;
    ``pooling='per-instance'`` averages the distance over the 5 instances.
    Raises InvalidDistance when a retained candidate feature is NaN.
    """
    cand = ref.normalize(candidate.matrix())[:, ref.retained]
    if np.any(np.isnan(cand)):
        raise InvalidDistance("candidate has missing retained feature values")
    tgt = target.values
    total = 0.0
    n_feat = cand.shape[1]
    for j in range(n_feat):
        t_col = tgt[:, j]
        t_col = t_col[np.isfinite(t_col)]
        if len(t_col) == 0:
            raise InvalidDistance(f"target feature {target.feature_names[j]} all missing")
        if pooling == "pooled":
            total += wasserstein_1d(cand[:, j], t_col)
        elif pooling == "per-instance":
            per_inst = [
                wasserstein_1d(cand[:, j], t_col[k * 5:(k + 1) * 5])
                for k in range(len(t_col) // 5)
            ]
            total += float(np.mean(per_inst))
        else:
            raise ValueError(f"unknown pooling {pooling!r}")
    return total / n_feat


def kendall_tau_matrix(distances):
    """Symmetric Kendall-tau matrix over per-metric pairwise-distance lists."""
    metrics = list(distances)
    k = len(metrics)
    M = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            tau, _ = kendalltau(distances[metrics[i]], distances[metrics[j]])
            M[i, j] = M[j, i] = tau
    return metrics, M


def _instance_mean_vectors(ref):
    """Per-(fid, iid) mean of normalized retained replicates, plus replicate stacks."""
    normalized = ref.normalized_corpus()[:, ref.retained]
    keys, means, stacks = [], [], []
    for fid in range(1, N_FUNCTIONS + 1):
        for iid in range(1, N_INSTANCES + 1):
            rows = (ref.corpus_fids == fid) & (ref.corpus_iids == iid)
            keys.append((fid, iid))
            means.append(np.nanmean(normalized[rows], axis=0))
            stacks.append(normalized[rows])
    return keys, np.asarray(means), stacks


def _replicate_wasserstein(stack_a, stack_b):
    vals = []
    for j in range(stack_a.shape[1]):
        a = stack_a[:, j][np.isfinite(stack_a[:, j])]
        b = stack_b[:, j][np.isfinite(stack_b[:, j])]
        if len(a) and len(b):
            vals.append(wasserstein_1d(a, b))
    return float(np.mean(vals))


def pairwise_instance_distances(ref):
    """All C(120,2) pairwise distances per metric over the instance grid.

    Vector metrics operate on per-instance means of normalized replicates;
    the Wasserstein metric on the replicate distributions themselves.
    Returns (pair_keys, {metric: distances}).
    """
    keys, means, stacks = _instance_mean_vectors(ref)
    pair_idx = list(itertools.combinations(range(len(keys)), 2))
    out = {m: np.empty(len(pair_idx)) for m in ALL_METRICS}
    for p, (i, j) in enumerate(pair_idx):
        for m in VECTOR_METRICS:
            out[m][p] = vector_distance(m, means[i], means[j])
        out["wasserstein"][p] = _replicate_wasserstein(stacks[i], stacks[j])
    pair_keys = [(keys[i], keys[j]) for i, j in pair_idx]
    return pair_keys, out


def inner_outer_analysis(ref):
    """Split normalized pairwise distances into same-fid (inner) and cross-fid (outer)."""
    pair_keys, dists = pairwise_instance_distances(ref)
    same = np.array([a[0] == b[0] for a, b in pair_keys])
    result = {}
    for metric, vals in dists.items():
        top = np.max(vals)
        norm = vals / top if top > 0 else vals
        result[metric] = {"inner": norm[same], "outer": norm[~same]}
    return result


def inner_outer_auc(inner, outer, rng=None):
    """Probability that a random inner distance is below a random outer one."""
    inner = np.asarray(inner)
    outer = np.asarray(outer)
    less = np.sum(inner[:, None] < outer[None, :])
    ties = np.sum(inner[:, None] == outer[None, :])
    return (less + 0.5 * ties) / (len(inner) * len(outer))


def _relative_std(values, axis=0):
    mean = np.nanmean(values, axis=axis)
    std = np.nanstd(values, axis=axis, ddof=1)
    with np.errstate(all="ignore"):
        return np.where(np.abs(mean) > 0, std / np.abs(mean), 0.0)


def feature_deviation_tables(ref, gp_rows_by_fid):
    """Per-(fid, feature) relative std tables.

    Returns (A, B): A holds the relative standard deviation of each retained
    feature across the reference rows of each fid; B holds |A - relative std
    across the GP-sampled normalized rows for that target| (NaN where no GP
    rows exist for a fid).
    """
    normalized = ref.normalized_corpus()[:, ref.retained]
    n_feat = normalized.shape[1]
    A = np.empty((N_FUNCTIONS, n_feat))
    B = np.full((N_FUNCTIONS, n_feat), np.nan)
    for fid in range(1, N_FUNCTIONS + 1):
        rows = normalized[ref.corpus_fids == fid]
        A[fid - 1] = _relative_std(rows)
        gp_rows = gp_rows_by_fid.get(fid)
        if gp_rows is not None and len(gp_rows) > 1:
            B[fid - 1] = np.abs(A[fid - 1] - _relative_std(np.asarray(gp_rows)))
    return A, B


def per_feature_inner_outer(ref):
    """Per-feature |difference| of normalized values, same-fid vs cross-fid pairs."""
    keys, means, _ = _instance_mean_vectors(ref)
    fids = np.array([k[0] for k in keys])
    pair_idx = list(itertools.combinations(range(len(keys)), 2))
    same = np.array([fids[i] == fids[j] for i, j in pair_idx])
    diffs = np.array([np.abs(means[i] - means[j]) for i, j in pair_idx])
    result = {}
    for j, name in enumerate(ref.retained_names()):
        result[name] = {"inner": diffs[same, j], "outer": diffs[~same, j]}
    return result
