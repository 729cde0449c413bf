"""The 24 benchmark target functions with a seeded instance mechanism.

Instances are reduced-fidelity stand-ins for the canonical suite: each
instance composes the canonical function formula with an identifier-seeded
shift (optimum drawn in [-4,4]^d), objective offset (drawn in [-100,100]) and,
where the canonical definition is rotated, an orthogonal rotation from a
seeded QR factorization. Construction is fully deterministic in
(fid, iid, dim); exact bit-compatibility with external implementations is a
non-goal.

Every base formula satisfies g(0) = 0 with its minimizer at 0, so
evaluate(x_opt) == f_opt exactly. The linear slope (F5) places its optimum on
the [-4,4]^d boundary and is clamped flat beyond it, keeping a constant
gradient sign pattern over the rest of the domain.
"""

from dataclasses import dataclass, field

import numpy as np

from elagp.errors import UnknownFunction

FUNCTION_NAMES = {
    1: "sphere",
    2: "ellipsoidal",
    3: "rastrigin",
    4: "bueche_rastrigin",
    5: "linear_slope",
    6: "attractive_sector",
    7: "step_ellipsoidal",
    8: "rosenbrock",
    9: "rosenbrock_rotated",
    10: "ellipsoidal_rotated",
    11: "discus",
    12: "bent_cigar",
    13: "sharp_ridge",
    14: "different_powers",
    15: "rastrigin_rotated",
    16: "weierstrass",
    17: "schaffers_f7",
    18: "schaffers_f7_ill",
    19: "griewank_rosenbrock",
    20: "schwefel",
    21: "gallagher_101",
    22: "gallagher_21",
    23: "katsuura",
    24: "lunacek_bi_rastrigin",
}

_ROTATED = frozenset({6, 7, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 23, 24})

_SCHWEFEL_SHIFT = 420.9687462275036


def _random_rotation(rng, d):
    """Orthogonal matrix via QR of a Gaussian matrix, sign-fixed for determinism."""
    M = rng.standard_normal((d, d))
    Q, R = np.linalg.qr(M)
    return Q * np.sign(np.diag(R))


def _scaling(alpha, d, exponent_scale=1.0):
    i = np.arange(d) / (d - 1)
    return alpha ** (exponent_scale * i)


@dataclass(frozen=True)
class BbobInstance:
    fid: int
    iid: int
    dim: int
    x_opt: np.ndarray
    f_opt: float
    rotation: np.ndarray | None
    extras: dict = field(default_factory=dict)

    @property
    def name(self):
        return FUNCTION_NAMES[self.fid]

    def in_domain(self, x):
        x = np.asarray(x)
        return bool(np.all(np.abs(x) <= 5.0))

    def evaluate(self, point):
        X = np.asarray(point, dtype=float).reshape(1, -1)
        return float(self.evaluate_batch(X)[0])

    def evaluate_batch(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ValueError(f"expected n x {self.dim} matrix")
        return _RAW[self.fid](self, X) + self.f_opt


def make_instance(fid, iid, dim):
    """Construct the deterministic instance for (fid, iid, dim)."""
    if not 1 <= fid <= 24:
        raise UnknownFunction(f"fid must be in 1..24, got {fid}")
    if iid < 1:
        raise ValueError("iid must be >= 1")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    rng = np.random.default_rng([11, fid, iid, dim])
    x_opt = rng.uniform(-4.0, 4.0, size=dim)
    f_opt = float(rng.uniform(-100.0, 100.0))
    rotation = _random_rotation(rng, dim) if fid in _ROTATED else None
    extras = {}
    if fid == 5:
        signs = np.where(rng.random(dim) < 0.5, -1.0, 1.0)
        extras["signs"] = signs
        x_opt = 4.0 * signs
    elif fid in (21, 22):
        n_peaks = 101 if fid == 21 else 21
        centers = rng.uniform(-4.9, 4.9, size=(n_peaks, dim))
        centers[0] = x_opt
        weights = np.empty(n_peaks)
        weights[0] = 10.0
        weights[1:] = 1.1 + 8.0 * np.arange(n_peaks - 1) / (n_peaks - 2)
        alphas = 10.0 ** rng.uniform(0.0, 3.0, size=n_peaks)
        alphas[0] = 1000.0
        scales = np.empty((n_peaks, dim))
        for k in range(n_peaks):
            s = _scaling(alphas[k], dim) / alphas[k] ** 0.25
            scales[k] = rng.permutation(s)
        extras.update(centers=centers, weights=weights, scales=scales)
    return BbobInstance(fid, iid, dim, x_opt, f_opt, rotation, extras)


def _z(inst, X):
    Z = X - inst.x_opt
    if inst.rotation is not None:
        Z = Z @ inst.rotation.T
    return Z


def _sphere(inst, X):
    Z = _z(inst, X)
    return np.sum(Z * Z, axis=1)


def _ellipsoidal(inst, X):
    Z = _z(inst, X)
    return np.sum(_scaling(1e6, inst.dim) * Z * Z, axis=1)


def _rastrigin_term(Z):
    d = Z.shape[1]
    return 10.0 * (d - np.sum(np.cos(2.0 * np.pi * Z), axis=1)) + np.sum(Z * Z, axis=1)


def _rastrigin(inst, X):
    return _rastrigin_term(_z(inst, X))


def _bueche_rastrigin(inst, X):
    Y = _z(inst, X) * _scaling(10.0, inst.dim, 0.5)
    return _rastrigin_term(Y)


def _linear_slope(inst, X):
    signs = inst.extras["signs"]
    slopes = _scaling(10.0, inst.dim)
    gap = signs * (inst.x_opt - X)
    return np.sum(slopes * np.maximum(gap, 0.0), axis=1)


def _attractive_sector(inst, X):
    Z = _z(inst, X)
    S = np.where(Z > 0, 100.0, 1.0)
    return np.sum((S * Z) ** 2, axis=1) ** 0.9


def _step_ellipsoidal(inst, X):
    Z = _z(inst, X)
    Zh = np.floor(0.5 + Z)
    val = np.sum(_scaling(100.0, inst.dim) ** 2 * Zh * Zh, axis=1)
    return 0.1 * np.maximum(np.abs(Z[:, 0]) / 1e4, val)


def _rosenbrock_term(Y):
    return np.sum(
        100.0 * (Y[:, :-1] ** 2 - Y[:, 1:]) ** 2 + (Y[:, :-1] - 1.0) ** 2, axis=1
    )


def _rosenbrock(inst, X):
    Y = max(1.0, np.sqrt(inst.dim) / 8.0) * _z(inst, X) + 1.0
    return _rosenbrock_term(Y)


def _discus(inst, X):
    Z = _z(inst, X)
    return 1e6 * Z[:, 0] ** 2 + np.sum(Z[:, 1:] ** 2, axis=1)


def _bent_cigar(inst, X):
    Z = _z(inst, X)
    return Z[:, 0] ** 2 + 1e6 * np.sum(Z[:, 1:] ** 2, axis=1)


def _sharp_ridge(inst, X):
    Z = _z(inst, X)
    return Z[:, 0] ** 2 + 100.0 * np.sqrt(np.sum(Z[:, 1:] ** 2, axis=1))


def _different_powers(inst, X):
    Z = _z(inst, X)
    exponents = 2.0 + 4.0 * np.arange(inst.dim) / (inst.dim - 1)
    return np.sqrt(np.sum(np.abs(Z) ** exponents, axis=1))


def _weierstrass(inst, X):
    Z = _z(inst, X)
    k = np.arange(12)
    ak = 0.5 ** k
    bk = 3.0 ** k
    f0 = np.sum(ak * np.cos(np.pi * bk))
    inner = np.sum(ak * np.cos(2.0 * np.pi * bk * (Z[..., None] + 0.5)), axis=2)
    return 10.0 * (np.mean(inner, axis=1) - f0) ** 3


def _schaffers(inst, X, condition):
    Y = _z(inst, X) * _scaling(condition, inst.dim, 0.5)
    s = np.sqrt(Y[:, :-1] ** 2 + Y[:, 1:] ** 2)
    term = np.sqrt(s) + np.sqrt(s) * np.sin(50.0 * s ** 0.2) ** 2
    return np.mean(term, axis=1) ** 2


def _schaffers_f7(inst, X):
    return _schaffers(inst, X, 10.0)


def _schaffers_f7_ill(inst, X):
    return _schaffers(inst, X, 1000.0)


def _griewank_rosenbrock(inst, X):
    Y = max(1.0, np.sqrt(inst.dim) / 8.0) * _z(inst, X) + 1.0
    r = 100.0 * (Y[:, :-1] ** 2 - Y[:, 1:]) ** 2 + (Y[:, :-1] - 1.0) ** 2
    return 10.0 / (inst.dim - 1) * np.sum(r / 4000.0 - np.cos(r), axis=1) + 10.0


def _schwefel(inst, X):
    Y = (X - inst.x_opt) + _SCHWEFEL_SHIFT
    c = _SCHWEFEL_SHIFT * np.sin(np.sqrt(_SCHWEFEL_SHIFT))
    return np.sum(c - Y * np.sin(np.sqrt(np.abs(Y))), axis=1)


def _gallagher(inst, X):
    centers = inst.extras["centers"]
    weights = inst.extras["weights"]
    scales = inst.extras["scales"]
    # (n, K): quadratic form per point/peak
    diff = X[:, None, :] - centers[None, :, :]
    q = np.einsum("nkd,kd,nkd->nk", diff, scales, diff)
    vals = weights[None, :] * np.exp(-q / (2.0 * inst.dim))
    return (10.0 - np.max(vals, axis=1)) ** 2


def _katsuura(inst, X):
    Z = _z(inst, X)
    j = np.arange(1, 33)
    p2 = 2.0 ** j
    t = p2 * Z[..., None]
    frac = np.sum(np.abs(t - np.round(t)) / p2, axis=2)
    i = np.arange(1, inst.dim + 1)
    prod = np.prod((1.0 + i * frac) ** (10.0 / inst.dim ** 1.2), axis=1)
    return 10.0 / inst.dim ** 2 * (prod - 1.0)


def _lunacek(inst, X):
    Z = _z(inst, X)
    d = inst.dim
    mu0 = 2.5
    s = 1.0 - 1.0 / (2.0 * np.sqrt(d + 20.0) - 8.2)
    mu1 = -np.sqrt((mu0 ** 2 - 1.0) / s)
    Y = Z + mu0
    sphere0 = np.sum((Y - mu0) ** 2, axis=1)
    sphere1 = float(d) + s * np.sum((Y - mu1) ** 2, axis=1)
    ras = 10.0 * (d - np.sum(np.cos(2.0 * np.pi * (Y - mu0)), axis=1))
    return np.minimum(sphere0, sphere1) + ras


_RAW = {
    1: _sphere,
    2: _ellipsoidal,
    3: _rastrigin,
    4: _bueche_rastrigin,
    5: _linear_slope,
    6: _attractive_sector,
    7: _step_ellipsoidal,
    8: _rosenbrock,
    9: _rosenbrock,
    10: _ellipsoidal,
    11: _discus,
    12: _bent_cigar,
    13: _sharp_ridge,
    14: _different_powers,
    15: _rastrigin,
    16: _weierstrass,
    17: _schaffers_f7,
    18: _schaffers_f7_ill,
    19: _griewank_rosenbrock,
    20: _schwefel,
    21: _gallagher,
    22: _gallagher,
    23: _katsuura,
    24: _lunacek,
}
