"""File formats: manifests, reference sets, CSV export helpers.

All CSV output is UTF-8 with LF line endings and RFC-4180 quoting. Every
output directory carries a ``manifest.json`` that fully determines the run
(command, parameters, seeds, tool and schema version), so any manifest can be
replayed byte-identically. Each CSV's schema version travels in the manifest.
"""

import json
from pathlib import Path

import numpy as np
import pandas as pd

from elagp import __version__
from elagp.featurespace import ReferenceSet

SCHEMA_VERSION = 1


def write_csv(df, path):
    df.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")


def write_json(obj, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_manifest(outdir, kind, params):
    manifest = {
        "kind": kind,
        "params": params,
        "tool_version": __version__,
        "schema_version": SCHEMA_VERSION,
    }
    write_json(manifest, Path(outdir) / "manifest.json")
    return manifest


def save_reference(ref, outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    bounds = {
        "dim": ref.dim,
        "design_seed": ref.design_seed,
        "feature_names": list(ref.feature_names),
        "mins": ref.mins.tolist(),
        "maxs": ref.maxs.tolist(),
        "retained": ref.retained.astype(int).tolist(),
        "schema_version": SCHEMA_VERSION,
    }
    write_json(bounds, outdir / "bounds.json")
    corpus = pd.DataFrame(ref.corpus, columns=list(ref.feature_names))
    corpus.insert(0, "rep", ref.corpus_reps)
    corpus.insert(0, "iid", ref.corpus_iids)
    corpus.insert(0, "fid", ref.corpus_fids)
    write_csv(corpus, outdir / "corpus.csv")


def load_reference(refdir):
    refdir = Path(refdir)
    bounds = read_json(refdir / "bounds.json")
    corpus = pd.read_csv(refdir / "corpus.csv", float_precision="round_trip")
    names = tuple(bounds["feature_names"])
    return ReferenceSet(
        dim=bounds["dim"],
        design_seed=bounds["design_seed"],
        feature_names=names,
        mins=np.asarray(bounds["mins"], dtype=float),
        maxs=np.asarray(bounds["maxs"], dtype=float),
        retained=np.asarray(bounds["retained"], dtype=bool),
        corpus=corpus[list(names)].to_numpy(dtype=float),
        corpus_fids=corpus["fid"].to_numpy(),
        corpus_iids=corpus["iid"].to_numpy(),
        corpus_reps=corpus["rep"].to_numpy(),
    )


def save_gp_run(log, outdir, retained_names=None):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    evals = pd.DataFrame(log.records)
    write_csv(evals, outdir / "evaluations.csv")
    write_csv(pd.DataFrame(log.generations), outdir / "generations.csv")
    final = pd.DataFrame(log.final_population,
                         columns=["expression", "fitness", "validity"])
    write_csv(final, outdir / "final_population.csv")
    with open(outdir / "best_expression.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(log.best_expression + "\n")
    config = {k: getattr(log.config, k) for k in vars(log.config)}
    config.update(
        init_resamples=log.init_resamples,
        depth_rejections=log.depth_rejections,
        best_fitness=log.best_fitness,
        n_evaluations=len(log.records),
        n_invalid=log.n_invalid(),
        schema_version=SCHEMA_VERSION,
    )
    write_json(config, outdir / "config.json")
    if log.features:
        rows = []
        for expr, matrix in log.features.items():
            for rep, row in enumerate(matrix):
                rows.append([expr, rep] + list(row))
        df = pd.DataFrame(rows)
        n_feat = df.shape[1] - 2
        if retained_names is None:
            retained_names = [f"feat_{i}" for i in range(n_feat)]
        df.columns = ["expression", "replicate"] + list(retained_names)
        write_csv(df, outdir / "features.csv")


def load_gp_features(rundir):
    """features.csv back into {expression: (5, n_retained) matrix} plus names."""
    df = pd.read_csv(Path(rundir) / "features.csv", float_precision="round_trip")
    cols = [c for c in df.columns if c not in ("expression", "replicate")]
    out = {}
    for expr, group in df.groupby("expression", sort=False):
        out[expr] = group.sort_values("replicate")[cols].to_numpy(dtype=float)
    return out, cols
