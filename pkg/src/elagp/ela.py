"""Landscape feature computation on an evaluated design.

All features are cheap (no additional sampling): objective-value distribution,
meta-model fits, level-set classification, nearest-better statistics,
dispersion ratios and information content of a nearest-neighbor walk.

Objective values must be min-max normalized (``normalize_objective``) before
feature computation; this makes the whole pipeline invariant to positive
affine transformations of the objective.

Features that cannot be computed carry NaN; only a fully-failed vector raises.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform
from scipy.stats import gaussian_kde, kurtosis, skew

from elagp.errors import DegenerateObjective, ElaComputationFailed

LEVEL_QUANTILES = (10, 25, 50)
DISP_QUANTILES = (2, 5, 10, 25)

FEATURE_NAMES = (
    "ela_distr.skewness",
    "ela_distr.kurtosis",
    "ela_distr.number_of_peaks",
    "ela_meta.lin_simple.adj_r2",
    "ela_meta.lin_simple.intercept",
    "ela_meta.lin_simple.coef.min",
    "ela_meta.lin_simple.coef.max",
    "ela_meta.lin_simple.coef.max_by_min",
    "ela_meta.lin_w_interact.adj_r2",
    "ela_meta.quad_simple.adj_r2",
    "ela_meta.quad_simple.cond",
    "ela_meta.quad_w_interact.adj_r2",
) + tuple(
    f"ela_level.{stat}_{q:02d}"
    for q in LEVEL_QUANTILES
    for stat in ("mmce_lda", "mmce_qda", "lda_qda")
) + (
    "nbc.nn_nb.sd_ratio",
    "nbc.nn_nb.mean_ratio",
    "nbc.nn_nb.cor",
    "nbc.dist_ratio.coeff_var",
    "nbc.nb_fitness.cor",
) + tuple(
    f"disp.ratio_{stat}_{q:02d}" for q in DISP_QUANTILES for stat in ("mean", "median")
) + (
    "ic.h_max",
    "ic.eps_s",
    "ic.eps_max",
    "ic.eps_ratio",
    "ic.m0",
)

_COND_CAP = 1e12
_PEAK_TOL = 1e-3  # relative valley depth below which two modes merge


def normalize_objective(y):
    """Min-max scale to [0,1]; raises DegenerateObjective on a constant vector."""
    y = np.asarray(y, dtype=float)
    lo, hi = np.min(y), np.max(y)
    if not np.isfinite(lo) or not np.isfinite(hi):
        raise DegenerateObjective("objective contains non-finite values")
    if hi == lo:
        raise DegenerateObjective("objective is constant")
    return (y - lo) / (hi - lo)


def _adj_r2(y, residuals_ss, n_params):
    n = len(y)
    ss_tot = np.sum((y - np.mean(y)) ** 2)
    r2 = 1.0 - residuals_ss / ss_tot
    return 1.0 - (1.0 - r2) * (n - 1) / (n - n_params - 1)


def _ols(A, y):
    coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return coef, float(np.sum(resid * resid))


def _interactions(X):
    d = X.shape[1]
    cols = [X[:, i] * X[:, j] for i in range(d) for j in range(i + 1, d)]
    return np.column_stack(cols) if cols else np.empty((len(X), 0))


def _meta_features(X, y, out):
    n, d = X.shape
    ones = np.ones((n, 1))

    A_lin = np.hstack([ones, X])
    coef, ss = _ols(A_lin, y)
    out["ela_meta.lin_simple.adj_r2"] = _adj_r2(y, ss, d)
    out["ela_meta.lin_simple.intercept"] = coef[0]
    abs_coef = np.abs(coef[1:])
    cmin, cmax = np.min(abs_coef), np.max(abs_coef)
    out["ela_meta.lin_simple.coef.min"] = cmin
    out["ela_meta.lin_simple.coef.max"] = cmax
    out["ela_meta.lin_simple.coef.max_by_min"] = cmax / cmin if cmin > 0 else np.nan

    inter = _interactions(X)
    A_li = np.hstack([ones, X, inter])
    _, ss = _ols(A_li, y)
    out["ela_meta.lin_w_interact.adj_r2"] = _adj_r2(y, ss, A_li.shape[1] - 1)

    A_quad = np.hstack([ones, X, X * X])
    coef, ss = _ols(A_quad, y)
    out["ela_meta.quad_simple.adj_r2"] = _adj_r2(y, ss, A_quad.shape[1] - 1)
    qcoef = np.abs(coef[1 + d:])
    qmin = np.min(qcoef)
    if qmin < 1e-12:
        out["ela_meta.quad_simple.cond"] = _COND_CAP
    else:
        out["ela_meta.quad_simple.cond"] = min(np.max(qcoef) / qmin, _COND_CAP)

    A_qi = np.hstack([ones, X, X * X, inter])
    _, ss = _ols(A_qi, y)
    out["ela_meta.quad_w_interact.adj_r2"] = _adj_r2(y, ss, A_qi.shape[1] - 1)


def _distr_features(y, out):
    out["ela_distr.skewness"] = skew(y)
    out["ela_distr.kurtosis"] = kurtosis(y)
    out["ela_distr.number_of_peaks"] = _count_peaks(y)


def _count_peaks(y, grid_size=512):
    if np.std(y) == 0:
        return 1
    kde = gaussian_kde(y, bw_method="silverman")
    span = np.max(y) - np.min(y)
    grid = np.linspace(np.min(y) - 0.1 * span, np.max(y) + 0.1 * span, grid_size)
    dens = kde(grid)
    # local maxima, then merge modes separated by a shallow valley
    peaks = [
        i
        for i in range(1, grid_size - 1)
        if dens[i] >= dens[i - 1] and dens[i] > dens[i + 1]
    ]
    if not peaks:
        return 1
    top = np.max(dens)
    merged = [peaks[0]]
    for p in peaks[1:]:
        valley = np.min(dens[merged[-1]:p + 1])
        if (min(dens[merged[-1]], dens[p]) - valley) / top < _PEAK_TOL:
            if dens[p] > dens[merged[-1]]:
                merged[-1] = p
        else:
            merged.append(p)
    return len(merged)


def _lda_predict(Xtr, ltr, Xte, reg=1e-8):
    m0 = Xtr[ltr == 0].mean(axis=0)
    m1 = Xtr[ltr == 1].mean(axis=0)
    n0, n1 = np.sum(ltr == 0), np.sum(ltr == 1)
    c0 = np.cov(Xtr[ltr == 0].T, bias=False) if n0 > 1 else np.zeros((Xtr.shape[1],) * 2)
    c1 = np.cov(Xtr[ltr == 1].T, bias=False) if n1 > 1 else np.zeros((Xtr.shape[1],) * 2)
    S = ((n0 - 1) * c0 + (n1 - 1) * c1) / max(n0 + n1 - 2, 1)
    S = np.atleast_2d(S) + reg * np.eye(Xtr.shape[1])
    Si = np.linalg.inv(S)
    pri0, pri1 = np.log(n0 / len(ltr)), np.log(n1 / len(ltr))
    d0 = Xte @ Si @ m0 - 0.5 * m0 @ Si @ m0 + pri0
    d1 = Xte @ Si @ m1 - 0.5 * m1 @ Si @ m1 + pri1
    return (d1 > d0).astype(int)


def _qda_predict(Xtr, ltr, Xte, reg=1e-8):
    scores = []
    for cls in (0, 1):
        Xc = Xtr[ltr == cls]
        m = Xc.mean(axis=0)
        S = np.atleast_2d(np.cov(Xc.T, bias=False)) + reg * np.eye(Xtr.shape[1])
        sign, logdet = np.linalg.slogdet(S)
        if sign <= 0:
            raise np.linalg.LinAlgError("non-PD class covariance")
        Si = np.linalg.inv(S)
        diff = Xte - m
        maha = np.einsum("ni,ij,nj->n", diff, Si, diff)
        scores.append(-0.5 * logdet - 0.5 * maha + np.log(len(Xc) / len(ltr)))
    return (scores[1] > scores[0]).astype(int)


def _stratified_folds(labels, n_folds, rng):
    folds = np.empty(len(labels), dtype=int)
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        folds[idx] = np.arange(len(idx)) % n_folds
    return folds


def _cv_mmce(X, labels, predictor, rng, n_folds=5):
    folds = _stratified_folds(labels, n_folds, rng)
    errors = total = 0
    for f in range(n_folds):
        te = folds == f
        tr = ~te
        if len(np.unique(labels[tr])) < 2 or not np.any(te):
            continue
        pred = predictor(X[tr], labels[tr], X[te])
        errors += int(np.sum(pred != labels[te]))
        total += int(np.sum(te))
    if total == 0:
        return np.nan
    return errors / total


def _level_features(X, y, out, seed):
    for q in LEVEL_QUANTILES:
        labels = (y <= np.quantile(y, q / 100.0)).astype(int)
        if len(np.unique(labels)) < 2:
            continue  # leaves NaN markers in place
        try:
            rng = np.random.default_rng([seed, q, 0])
            mmce_lda = _cv_mmce(X, labels, _lda_predict, rng)
            rng = np.random.default_rng([seed, q, 1])
            mmce_qda = _cv_mmce(X, labels, _qda_predict, rng)
        except np.linalg.LinAlgError:
            continue
        out[f"ela_level.mmce_lda_{q:02d}"] = mmce_lda
        out[f"ela_level.mmce_qda_{q:02d}"] = mmce_qda
        if mmce_qda > 0:
            out[f"ela_level.lda_qda_{q:02d}"] = mmce_lda / mmce_qda


def _safe_cor(a, b):
    if np.std(a) == 0 or np.std(b) == 0:
        return np.nan
    return float(np.corrcoef(a, b)[0, 1])


def _nbc_features(D, y, out):
    m = len(y)
    Doff = D + np.diag(np.full(m, np.inf))
    nn = np.min(Doff, axis=1)
    better = y[None, :] < y[:, None]  # better[i, j]: j strictly better than i
    masked = np.where(better, Doff, np.inf)
    nb = np.min(masked, axis=1)
    no_better = ~np.isfinite(nb)
    if np.any(no_better):
        # best point(s): fall back to the farthest distance, keeping vectors full
        nb[no_better] = np.max(D[no_better], axis=1)
    out["nbc.nn_nb.sd_ratio"] = np.std(nn, ddof=1) / np.std(nb, ddof=1) if np.std(nb, ddof=1) > 0 else np.nan
    out["nbc.nn_nb.mean_ratio"] = np.mean(nn) / np.mean(nb) if np.mean(nb) > 0 else np.nan
    out["nbc.nn_nb.cor"] = _safe_cor(nn, nb)
    ratio = nn / np.where(nb == 0, np.nan, nb)
    mu = np.nanmean(ratio)
    out["nbc.dist_ratio.coeff_var"] = np.nanstd(ratio, ddof=1) / mu if mu > 0 else np.nan
    out["nbc.nb_fitness.cor"] = _safe_cor(nb, y)


def _disp_features(D, y, out):
    m = len(y)
    iu = np.triu_indices(m, k=1)
    all_d = D[iu]
    mean_all, median_all = np.mean(all_d), np.median(all_d)
    order = np.argsort(y, kind="stable")
    for q in DISP_QUANTILES:
        k = max(2, int(np.ceil(q / 100.0 * m)))
        sub = np.sort(order[:k])
        Dsub = D[np.ix_(sub, sub)]
        sub_d = Dsub[np.triu_indices(k, k=1)]
        out[f"disp.ratio_mean_{q:02d}"] = np.mean(sub_d) / mean_all
        out[f"disp.ratio_median_{q:02d}"] = np.median(sub_d) / median_all


def _nn_tour(D):
    m = len(D)
    visited = np.zeros(m, dtype=bool)
    tour = [0]
    visited[0] = True
    for _ in range(m - 1):
        row = np.where(visited, np.inf, D[tour[-1]])
        nxt = int(np.argmin(row))
        tour.append(nxt)
        visited[nxt] = True
    return np.asarray(tour)


def _partial_information(symbols):
    s = symbols[symbols != 0]
    if len(s) == 0:
        return 0.0
    changes = 1 + int(np.sum(s[1:] != s[:-1]))
    return changes / len(symbols)


def _entropy(symbols):
    pairs = symbols[:-1] * 10 + symbols[1:]
    neq = symbols[:-1] != symbols[1:]
    if not np.any(neq):
        return 0.0
    vals, counts = np.unique(pairs[neq], return_counts=True)
    p = counts / len(pairs)
    return float(-np.sum(p * np.log(p) / np.log(6.0)))


def _ic_features(D, y, out):
    tour = _nn_tour(D)
    yt = y[tour]
    dx = D[tour[:-1], tour[1:]]
    dy = np.diff(yt)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(dx > 0, dy / np.where(dx == 0, 1.0, dx), 0.0)

    eps_pos = 10.0 ** np.linspace(-5.0, 15.0, 201)
    h_vals = np.empty(len(eps_pos))
    m_vals = np.empty(len(eps_pos))
    for i, eps in enumerate(eps_pos):
        s = (np.sign(r) * (np.abs(r) > eps)).astype(int)
        h_vals[i] = _entropy(s)
        m_vals[i] = _partial_information(s)
    s0 = np.sign(r).astype(int)
    h0 = _entropy(s0)
    m0 = _partial_information(s0)

    out["ic.h_max"] = max(h0, float(np.max(h_vals)))
    out["ic.m0"] = m0
    settled = np.flatnonzero(h_vals < 0.05)
    out["ic.eps_s"] = np.log10(eps_pos[settled[0]]) if len(settled) else np.nan
    out["ic.eps_max"] = np.log10(eps_pos[int(np.argmax(h_vals))])
    if m0 > 0:
        dropped = np.flatnonzero(m_vals < 0.5 * m0)
        out["ic.eps_ratio"] = np.log10(eps_pos[dropped[0]]) if len(dropped) else np.nan


def compute_features(points, y, seed=0):
    """All landscape features of one (normalized) sample; failures become NaN."""
    X = np.asarray(points, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    if n <= d + 2:
        raise ValueError("need more sample points than d + 2")
    out = {name: np.nan for name in FEATURE_NAMES}

    families = []
    with np.errstate(all="ignore"):
        D = squareform(pdist(X))
        for fam in (
            lambda: _distr_features(y, out),
            lambda: _meta_features(X, y, out),
            lambda: _level_features(X, y, out, seed),
            lambda: _nbc_features(D, y, out),
            lambda: _disp_features(D, y, out),
            lambda: _ic_features(D, y, out),
        ):
            try:
                fam()
            except Exception as exc:  # single-family failure keeps NaN markers
                families.append(str(exc))
    values = np.array([out[name] for name in FEATURE_NAMES], dtype=float)
    if np.all(np.isnan(values)):
        raise ElaComputationFailed(f"every feature failed: {families}")
    return {name: float(out[name]) for name in FEATURE_NAMES}


@dataclass
class ElaSample:
    """Bootstrapped feature replicates for one function."""

    source_id: str
    replicates: list = field(default_factory=list)  # list of {name: value}

    @property
    def feature_names(self):
        return FEATURE_NAMES

    def matrix(self):
        """(n_replicates, n_features) array in canonical feature order."""
        return np.array(
            [[rep[name] for name in FEATURE_NAMES] for rep in self.replicates]
        )


def compute_ela_sample(design, source_id="", seed=0):
    """Feature replicates over the design's bootstrap index sets.

    The design must be evaluated. Each replicate restricts (points, y) to one
    bootstrap set, normalizes the objective and computes all features.
    Raises ElaComputationFailed when any replicate fails entirely.
    """
    if design.y is None:
        raise ValueError("design must be evaluated before feature computation")
    replicates = []
    for rep, idx in enumerate(design.bootstrap_sets):
        Xs = design.points[idx]
        try:
            ys = normalize_objective(design.y[idx])
            replicates.append(compute_features(Xs, ys, seed=seed * 31 + rep))
        except DegenerateObjective as exc:
            raise ElaComputationFailed(f"replicate {rep}: {exc}") from exc
    return ElaSample(source_id=source_id, replicates=replicates)
