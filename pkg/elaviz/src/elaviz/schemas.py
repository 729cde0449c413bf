"""Input CSV schema validation.

Every figure consumes documented CSV exports; validation failures name the
offending file and column so broken pipelines surface immediately instead of
as cryptic plotting errors.
"""

from pathlib import Path

import pandas as pd


class SchemaError(ValueError):
    """An input CSV is missing or lacks a required column."""


# Required columns per input file. Feature columns (variable names) are
# everything beyond the fixed prefix and are validated by count only.
FIXED_COLUMNS = {
    "generations.csv": ["generation", "best_fitness", "mean_valid_fitness",
                        "n_valid", "n_evaluations"],
    "evaluations.csv": ["eval_index", "generation", "expression", "fitness",
                        "validity"],
    "fitness_distributions.csv": ["fid", "source", "fitness"],
    "landscape_grid.csv": ["source", "rank", "fitness", "x0", "x1", "value"],
    "parallel_coordinates.csv": ["label", "source", "replicate", "fitness"],
    "umap_reference.csv": ["fid", "iid", "rep"],
    "umap_candidates.csv": ["expression", "cityblock_to_target"],
    "kendall_tau.csv": ["metric"],
    "inner_outer.csv": ["metric", "kind", "distance"],
    "per_feature_inner_outer.csv": ["feature", "kind", "difference"],
    "deviation_reference.csv": ["fid"],
    "deviation_gp_diff.csv": ["fid"],
}


def load_csv(indir, name, min_feature_columns=0):
    """Read one documented CSV, checking presence and required columns."""
    path = Path(indir) / name
    if not path.exists():
        raise SchemaError(f"missing input file: {path}")
    df = pd.read_csv(path, float_precision="round_trip")
    required = FIXED_COLUMNS.get(name, [])
    for column in required:
        if column not in df.columns:
            raise SchemaError(f"{path}: missing required column {column!r}")
    extra = [c for c in df.columns if c not in required]
    if len(extra) < min_feature_columns:
        raise SchemaError(
            f"{path}: expected at least {min_feature_columns} feature columns, "
            f"found {len(extra)}"
        )
    return df


def feature_columns(df, name):
    return [c for c in df.columns if c not in FIXED_COLUMNS.get(name, [])]
