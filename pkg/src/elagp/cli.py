"""Command-line interface orchestrating experiments and figure-data exports.

Every command writes a ``manifest.json`` next to its outputs; ``replay``
re-runs any manifest and reproduces the outputs byte-identically.
"""

import json
from pathlib import Path

import click
import numpy as np
import pandas as pd

from elagp import experiments
from elagp.bbob import make_instance
from elagp.ela import FEATURE_NAMES, compute_ela_sample
from elagp.featurespace import (
    ALL_METRICS,
    build_reference,
    feature_deviation_tables,
    inner_outer_analysis,
    kendall_tau_matrix,
    pairwise_instance_distances,
    per_feature_inner_outer,
)
from elagp.generator import GeneratorConfig, generate_baseline_set
from elagp.gp import GpConfig, run_gp
from elagp.io import (
    load_gp_features,
    load_reference,
    read_json,
    save_gp_run,
    save_reference,
    write_csv,
    write_json,
    write_manifest,
)
from elagp.sampling import DoeDesign, sobol_design
from elagp.tree import parse_expression


def _load_config_file(ctx, param, value):
    """key=value (or JSON) config file; explicit flags override its entries."""
    if not value:
        return value
    text = Path(value).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        data = json.loads(text)
    else:
        data = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            data[key.strip().replace("-", "_")] = val.strip()
    ctx.default_map = {**(ctx.default_map or {}), **data}
    return value


def _config_option():
    return click.option(
        "--config", type=click.Path(exists=True), callback=_load_config_file,
        is_eager=True, expose_value=False,
        help="Key=value config file; explicit flags override it.",
    )


@click.group()
def main():
    """Function evolution guided by landscape-analysis features."""


# ---------------------------------------------------------------- rfg-sample

def _run_rfg_sample(dim, count, seed, out):
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    config = GeneratorConfig(dim=dim, seed=seed)
    design = DoeDesign(dim, seed)
    baseline = generate_baseline_set(config, count, design.points)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for tree, _ in baseline.functions:
            fh.write(tree.serialize() + "\n")
    write_json(
        {"dim": dim, "count": count, "seed": seed,
         "rejected_draws": baseline.rejected},
        out.with_suffix(out.suffix + ".stats.json"),
    )
    write_manifest(out.parent, "rfg-sample",
                   {"dim": dim, "count": count, "seed": seed, "out": str(out)})


@main.command("rfg-sample")
@_config_option()
@click.option("--dim", type=int, required=True)
@click.option("--count", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), required=True)
def rfg_sample(dim, count, seed, out):
    """Sample valid baseline functions, one expression per line."""
    _run_rfg_sample(dim, count, seed, out)


# ------------------------------------------------------------------ bbob-eval

def _run_bbob_eval(fid, iid, dim, points, out):
    X = pd.read_csv(points).to_numpy(dtype=float)
    inst = make_instance(fid, iid, dim)
    values = inst.evaluate_batch(X)
    df = pd.DataFrame(X, columns=[f"x{i}" for i in range(dim)])
    df["value"] = values
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(df, out)
    write_manifest(out.parent, "bbob-eval",
                   {"fid": fid, "iid": iid, "dim": dim,
                    "points": str(points), "out": str(out)})


@main.command("bbob-eval")
@_config_option()
@click.option("--fid", type=int, required=True)
@click.option("--iid", type=int, default=1)
@click.option("--dim", type=int, required=True)
@click.option("--points", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def bbob_eval(fid, iid, dim, points, out):
    """Evaluate one benchmark instance on a CSV of points."""
    _run_bbob_eval(fid, iid, dim, points, out)


# ----------------------------------------------------------------- doe-export

def _run_doe_export(dim, seed, out):
    design = DoeDesign(dim, seed)
    df = pd.DataFrame(design.points, columns=[f"x{i}" for i in range(dim)])
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(df, out)
    write_manifest(out.parent, "doe-export",
                   {"dim": dim, "seed": seed, "out": str(out)})


@main.command("doe-export")
@_config_option()
@click.option("--dim", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), required=True)
def doe_export(dim, seed, out):
    """Export the Sobol' design, one point per row."""
    _run_doe_export(dim, seed, out)


# ------------------------------------------------------------------------ ela

def _run_ela(expr, fid, iid, dim, seed, out):
    design = DoeDesign(dim, seed)
    sources = []
    if expr:
        for line in Path(expr).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line:
                tree = parse_expression(line)
                sources.append((line, tree.evaluate_batch))
    else:
        inst = make_instance(fid, iid, dim)
        sources.append((f"F{fid}_i{iid}", inst.evaluate_batch))
    rows = []
    for source_id, evaluator in sources:
        sample = compute_ela_sample(design.evaluated(evaluator),
                                    source_id=source_id, seed=seed)
        for rep, matrix_row in enumerate(sample.matrix()):
            rows.append([source_id, rep] + list(matrix_row))
    df = pd.DataFrame(rows, columns=["source", "replicate"] + list(FEATURE_NAMES))
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(df, out)
    write_manifest(out.parent, "ela",
                   {"expr": str(expr) if expr else None, "fid": fid, "iid": iid,
                    "dim": dim, "seed": seed, "out": str(out)})


@main.command("ela")
@_config_option()
@click.option("--expr", type=click.Path(exists=True), default=None,
              help="File with one expression per line (alternative to --fid).")
@click.option("--fid", type=int, default=None)
@click.option("--iid", type=int, default=1)
@click.option("--dim", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), required=True)
def ela_cmd(expr, fid, iid, dim, seed, out):
    """Landscape features per (source, bootstrap replicate)."""
    if expr is None and fid is None:
        raise click.UsageError("provide --expr or --fid")
    _run_ela(expr, fid, iid, dim, seed, out)


# ------------------------------------------------------------ reference-build

def _run_reference_build(dim, seed, out, threshold, threads):
    ref = build_reference(dim, seed, threshold=threshold, threads=threads)
    outdir = Path(out)
    save_reference(ref, outdir)
    write_manifest(outdir, "reference-build",
                   {"dim": dim, "seed": seed, "out": str(out),
                    "threshold": threshold})
    return ref


@main.command("reference-build")
@_config_option()
@click.option("--dim", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--threshold", type=float, default=0.95,
              help="Spearman |rho| threshold for the feature filter.")
@click.option("--threads", type=int, default=1)
@click.option("--out", type=click.Path(), required=True)
def reference_build(dim, seed, threshold, threads, out):
    """Build the 24x5 instance reference corpus and normalization bounds."""
    _run_reference_build(dim, seed, out, threshold, threads)


# --------------------------------------------------------------------- gp-run

def _run_gp_run(fid, dim, seed, design_seed, generations, population, out,
                ref_dir=None, elitism=False, pooling="pooled"):
    config = GpConfig(target_fid=fid, dim=dim, seed=seed, design_seed=design_seed,
                      max_generations=generations, population_size=population,
                      elitism=elitism, pooling=pooling)
    ref = load_reference(ref_dir) if ref_dir else build_reference(dim, design_seed)
    log = run_gp(config, ref=ref, collect_features=True)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    save_gp_run(log, outdir, retained_names=ref.retained_names())
    write_manifest(outdir, "gp-run",
                   {"fid": fid, "dim": dim, "seed": seed,
                    "design_seed": design_seed, "generations": generations,
                    "population": population, "out": str(out),
                    "ref_dir": str(ref_dir) if ref_dir else None,
                    "elitism": elitism, "pooling": pooling})
    return log


@main.command("gp-run")
@_config_option()
@click.option("--fid", type=int, required=True)
@click.option("--dim", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--design-seed", type=int, default=0)
@click.option("--generations", type=int, default=50)
@click.option("--population", type=int, default=50)
@click.option("--ref", "ref_dir", type=click.Path(exists=True), default=None,
              help="Prebuilt reference directory (built on the fly otherwise).")
@click.option("--elitism/--no-elitism", default=False)
@click.option("--pooling", type=click.Choice(["pooled", "per-instance"]),
              default="pooled")
@click.option("--out", type=click.Path(), required=True)
def gp_run(fid, dim, seed, design_seed, generations, population, ref_dir,
           elitism, pooling, out):
    """Evolve functions toward one benchmark target and log every evaluation."""
    _run_gp_run(fid, dim, seed, design_seed, generations, population, out,
                ref_dir, elitism, pooling)


# ----------------------------------------------------------- distance-analysis

def _run_distance_analysis(ref_dir, out, gp_dirs=()):
    ref = load_reference(ref_dir)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)

    _, dists = pairwise_instance_distances(ref)
    metrics, M = kendall_tau_matrix(dists)
    kt = pd.DataFrame(M, columns=metrics)
    kt.insert(0, "metric", metrics)
    write_csv(kt, outdir / "kendall_tau.csv")

    split = inner_outer_analysis(ref)
    rows = [
        {"metric": metric, "kind": kind, "distance": float(v)}
        for metric in ALL_METRICS
        for kind in ("inner", "outer")
        for v in split[metric][kind]
    ]
    write_csv(pd.DataFrame(rows), outdir / "inner_outer.csv")

    per_feat = per_feature_inner_outer(ref)
    rows = [
        {"feature": feat, "kind": kind, "difference": float(v)}
        for feat in per_feat
        for kind in ("inner", "outer")
        for v in per_feat[feat][kind]
    ]
    write_csv(pd.DataFrame(rows), outdir / "per_feature_inner_outer.csv")

    gp_rows_by_fid = {}
    for rundir in gp_dirs:
        manifest = read_json(Path(rundir) / "manifest.json")
        features, _ = load_gp_features(rundir)
        if features:
            gp_rows_by_fid[manifest["params"]["fid"]] = np.vstack(
                [np.mean(m, axis=0) for m in features.values()]
            )
    A, B = feature_deviation_tables(ref, gp_rows_by_fid)
    names = ref.retained_names()
    dev_a = pd.DataFrame(A, columns=names)
    dev_a.insert(0, "fid", np.arange(1, 25))
    write_csv(dev_a, outdir / "deviation_reference.csv")
    dev_b = pd.DataFrame(B, columns=names)
    dev_b.insert(0, "fid", np.arange(1, 25))
    write_csv(dev_b, outdir / "deviation_gp_diff.csv")

    write_manifest(outdir, "distance-analysis",
                   {"ref_dir": str(ref_dir), "out": str(out),
                    "gp_dirs": [str(g) for g in gp_dirs]})


@main.command("distance-analysis")
@_config_option()
@click.option("--corpus", "ref_dir", type=click.Path(exists=True), required=True)
@click.option("--gp-dir", "gp_dirs", type=click.Path(exists=True), multiple=True,
              help="GP run directories feeding the deviation-difference table.")
@click.option("--out", type=click.Path(), required=True)
def distance_analysis(ref_dir, gp_dirs, out):
    """Kendall-tau matrix, inner/outer splits and deviation tables."""
    _run_distance_analysis(ref_dir, out, gp_dirs)


# -------------------------------------------------------------------- compare

def _run_compare(ref_dir, rfg_file, gp_dirs, out):
    ref = load_reference(ref_dir)
    trees = [
        parse_expression(line)
        for line in Path(rfg_file).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    samples = experiments.rfg_ela_samples(ref, trees)
    gp_fitness_by_fid = {}
    targets = []
    for rundir in gp_dirs:
        manifest = read_json(Path(rundir) / "manifest.json")
        fid = manifest["params"]["fid"]
        evals = pd.read_csv(Path(rundir) / "evaluations.csv")
        gp_fitness_by_fid[fid] = evals.loc[
            evals["validity"] == "valid", "fitness"
        ].tolist()
        targets.append(fid)
    long, summary = experiments.compare_gp_vs_rfg(
        ref, targets, gp_fitness_by_fid, samples
    )
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_csv(long, outdir / "fitness_distributions.csv")
    write_csv(summary, outdir / "fitness_summary.csv")
    write_manifest(outdir, "compare",
                   {"ref_dir": str(ref_dir), "rfg_file": str(rfg_file),
                    "gp_dirs": [str(g) for g in gp_dirs], "out": str(out)})


@main.command("compare")
@_config_option()
@click.option("--ref", "ref_dir", type=click.Path(exists=True), required=True)
@click.option("--rfg", "rfg_file", type=click.Path(exists=True), required=True)
@click.option("--gp-dir", "gp_dirs", type=click.Path(exists=True), multiple=True,
              required=True)
@click.option("--out", type=click.Path(), required=True)
def compare(ref_dir, rfg_file, gp_dirs, out):
    """Fitness distributions of GP runs vs the baseline generator."""
    _run_compare(ref_dir, rfg_file, gp_dirs, out)


# ---------------------------------------------------------------- export-grid

def _run_export_grid(ref_dir, gp_dir, out, resolution):
    ref = load_reference(ref_dir)
    manifest = read_json(Path(gp_dir) / "manifest.json")
    fid = manifest["params"]["fid"]
    evals = pd.read_csv(Path(gp_dir) / "evaluations.csv")
    valid = evals[evals["validity"] == "valid"]
    grid = experiments.export_landscape_grid(
        ref, fid, valid["expression"].tolist(),
        valid["fitness"].to_numpy(dtype=float), resolution=resolution,
    )
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_csv(grid, outdir / "landscape_grid.csv")
    write_manifest(outdir, "export-grid",
                   {"ref_dir": str(ref_dir), "gp_dir": str(gp_dir),
                    "out": str(out), "resolution": resolution})


@main.command("export-grid")
@_config_option()
@click.option("--ref", "ref_dir", type=click.Path(exists=True), required=True)
@click.option("--gp-dir", type=click.Path(exists=True), required=True)
@click.option("--resolution", type=int, default=101)
@click.option("--out", type=click.Path(), required=True)
def export_grid(ref_dir, gp_dir, resolution, out):
    """2-d landscape mesh for the target instances and rank-selected functions."""
    _run_export_grid(ref_dir, gp_dir, out, resolution)


# ------------------------------------------------------------ export-parallel

def _run_export_parallel(ref_dir, gp_dir, out, highlight=None):
    ref = load_reference(ref_dir)
    manifest = read_json(Path(gp_dir) / "manifest.json")
    fid = manifest["params"]["fid"]
    features, _ = load_gp_features(gp_dir)
    evals = pd.read_csv(Path(gp_dir) / "evaluations.csv")
    valid = evals[evals["validity"] == "valid"]
    gp_fitness = dict(zip(valid["expression"], valid["fitness"]))
    df = experiments.export_parallel_coordinates(ref, fid, features, gp_fitness,
                                                 highlight=highlight)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_csv(df, outdir / "parallel_coordinates.csv")
    write_manifest(outdir, "export-parallel",
                   {"ref_dir": str(ref_dir), "gp_dir": str(gp_dir),
                    "out": str(out), "highlight": highlight})


@main.command("export-parallel")
@_config_option()
@click.option("--ref", "ref_dir", type=click.Path(exists=True), required=True)
@click.option("--gp-dir", type=click.Path(exists=True), required=True)
@click.option("--highlight", type=str, default=None,
              help="Expression to highlight (default: best fitness).")
@click.option("--out", type=click.Path(), required=True)
def export_parallel(ref_dir, gp_dir, highlight, out):
    """Normalized feature rows for a parallel-coordinates figure."""
    _run_export_parallel(ref_dir, gp_dir, out, highlight)


# --------------------------------------------------------- export-umap-inputs

def _run_export_umap_inputs(ref_dir, gp_dir, out):
    ref = load_reference(ref_dir)
    manifest = read_json(Path(gp_dir) / "manifest.json")
    fid = manifest["params"]["fid"]
    features, _ = load_gp_features(gp_dir)
    reference, candidates = experiments.export_umap_inputs(ref, fid, features)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_csv(reference, outdir / "umap_reference.csv")
    write_csv(candidates, outdir / "umap_candidates.csv")
    write_manifest(outdir, "export-umap-inputs",
                   {"ref_dir": str(ref_dir), "gp_dir": str(gp_dir),
                    "out": str(out), "fid": fid})


@main.command("export-umap-inputs")
@_config_option()
@click.option("--ref", "ref_dir", type=click.Path(exists=True), required=True)
@click.option("--gp-dir", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def export_umap_inputs(ref_dir, gp_dir, out):
    """Fit/transform CSV pair for the downstream projection component."""
    _run_export_umap_inputs(ref_dir, gp_dir, out)


# --------------------------------------------------------------------- replay

_REPLAYERS = {
    "rfg-sample": lambda p: _run_rfg_sample(p["dim"], p["count"], p["seed"], p["out"]),
    "bbob-eval": lambda p: _run_bbob_eval(p["fid"], p["iid"], p["dim"],
                                          p["points"], p["out"]),
    "doe-export": lambda p: _run_doe_export(p["dim"], p["seed"], p["out"]),
    "ela": lambda p: _run_ela(p["expr"], p["fid"], p["iid"], p["dim"], p["seed"],
                              p["out"]),
    "reference-build": lambda p: _run_reference_build(
        p["dim"], p["seed"], p["out"], p["threshold"], p.get("threads", 1)),
    "gp-run": lambda p: _run_gp_run(
        p["fid"], p["dim"], p["seed"], p["design_seed"], p["generations"],
        p["population"], p["out"], p.get("ref_dir"), p.get("elitism", False),
        p.get("pooling", "pooled")),
    "distance-analysis": lambda p: _run_distance_analysis(
        p["ref_dir"], p["out"], p.get("gp_dirs", ())),
    "compare": lambda p: _run_compare(p["ref_dir"], p["rfg_file"],
                                      p["gp_dirs"], p["out"]),
    "export-grid": lambda p: _run_export_grid(p["ref_dir"], p["gp_dir"],
                                              p["out"], p["resolution"]),
    "export-parallel": lambda p: _run_export_parallel(
        p["ref_dir"], p["gp_dir"], p["out"], p.get("highlight")),
    "export-umap-inputs": lambda p: _run_export_umap_inputs(
        p["ref_dir"], p["gp_dir"], p["out"]),
}


def replay_manifest(manifest_path, out=None, threads=None):
    """Re-run the command recorded in a manifest; outputs are byte-identical."""
    manifest = read_json(manifest_path)
    params = dict(manifest["params"])
    if out is not None:
        params["out"] = str(out)
    if threads is not None and manifest["kind"] == "reference-build":
        params["threads"] = threads
    _REPLAYERS[manifest["kind"]](params)
    return params["out"]


@main.command("replay")
@click.option("--manifest", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), default=None,
              help="Redirect outputs to a different location.")
@click.option("--threads", type=int, default=None)
def replay(manifest, out, threads):
    """Replay a recorded manifest."""
    replay_manifest(manifest, out, threads)


if __name__ == "__main__":
    main()
