"""Frozen 2-d embedding: fit on the reference rows only, then transform.

Uses umap-learn when installed. Otherwise a seeded PCA embedding stands in:
it shares the properties the figure depends on (deterministic, fit exclusively
on the reference rows, candidates projected through the frozen map) even
though the layout is only qualitatively comparable. The method and its
settings are recorded in a metadata JSON next to the embedding.
"""

import numpy as np

try:  # pragma: no cover - exercised only where umap-learn is installed
    from umap import UMAP

    _HAVE_UMAP = True
except ImportError:
    from sklearn.decomposition import PCA

    _HAVE_UMAP = False

N_REFERENCE_ROWS = 600
RANDOM_STATE = 42


class FrozenMap:
    """2-d map fitted once on reference feature rows, then frozen."""

    def __init__(self, random_state=RANDOM_STATE):
        self.random_state = random_state
        if _HAVE_UMAP:
            self.method = "umap"
            self._model = UMAP(n_components=2, random_state=random_state)
        else:
            self.method = "pca"
            self._model = PCA(n_components=2, random_state=random_state)

    def fit(self, reference_rows):
        reference_rows = np.asarray(reference_rows, dtype=float)
        if reference_rows.shape[0] != N_REFERENCE_ROWS:
            raise ValueError(
                f"the map must be fitted on exactly {N_REFERENCE_ROWS} "
                f"reference rows, got {reference_rows.shape[0]}"
            )
        self._model.fit(reference_rows)
        self.n_fit_rows_ = reference_rows.shape[0]
        return self

    def transform(self, rows):
        rows = np.asarray(rows, dtype=float)
        if rows.size == 0:
            return np.empty((0, 2))
        out = self._model.transform(rows)
        assert out.shape[1] == 2
        return out

    def metadata(self):
        return {
            "method": self.method,
            "random_state": self.random_state,
            "n_components": 2,
            "n_fit_rows": getattr(self, "n_fit_rows_", None),
            "settings": "library defaults",
        }
