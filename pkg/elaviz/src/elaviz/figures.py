"""The eight figure kinds, each a pure rendering of precomputed CSV exports.

No statistics are computed here beyond plotting transforms (pivoting,
running minima for display, the frozen 2-d projection): every plotted number
exists in an input CSV.
"""

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from elaviz.projection import FrozenMap
from elaviz.schemas import SchemaError, feature_columns, load_csv


def _save(fig, outdir, name):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / name
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _read_optional_json(path):
    path = Path(path)
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    return {}


def render_convergence(indir, outdir):
    """Fitness of every valid evaluation over time, initial population marked."""
    evals = load_csv(indir, "evaluations.csv")
    gens = load_csv(indir, "generations.csv")
    config = _read_optional_json(Path(indir) / "config.json")
    population = int(config.get("population_size", 50))

    valid = evals[evals["validity"] == "valid"]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.scatter(valid["eval_index"], valid["fitness"], s=6, alpha=0.35,
               color="tab:blue", label="valid evaluation")
    running = valid.sort_values("eval_index")
    ax.plot(running["eval_index"], running["fitness"].cummin(),
            color="tab:red", lw=1.5, label="best so far")
    ax.axvline(population, color="black", ls="--", lw=1,
               label=f"initial population ({population} evaluations)")
    ax.set_xlabel("evaluation")
    ax.set_ylabel("fitness")
    ax.set_yscale("log")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title(f"Convergence ({len(gens) - 1} generations)")
    return _save(fig, outdir, "convergence.png")


def render_violins(indir, outdir):
    """Fitness distributions per target, evolved runs vs the baseline generator."""
    df = load_csv(indir, "fitness_distributions.csv")
    fids = sorted(df["fid"].unique())
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(fids) * 2), 4.5))
    positions, labels = [], []
    for k, fid in enumerate(fids):
        for off, (source, color) in enumerate(
            [("rfg", "tab:gray"), ("gp", "tab:blue")]
        ):
            values = df[(df["fid"] == fid) & (df["source"] == source)]["fitness"]
            if len(values) == 0:
                continue
            pos = k * 2.0 + off * 0.8
            parts = ax.violinplot([values.to_numpy()], positions=[pos],
                                  widths=0.7, showmedians=True)
            for body in parts["bodies"]:
                body.set_facecolor(color)
                body.set_alpha(0.6)
        positions.append(k * 2.0 + 0.4)
        labels.append(f"F{fid}")
    ax.set_xticks(positions)
    ax.set_xticklabels(labels)
    ax.set_ylabel("fitness")
    ax.set_yscale("log")
    ax.set_title("Fitness distributions: baseline (gray) vs evolved (blue)")
    return _save(fig, outdir, "violins.png")


def render_grid(indir, outdir, per_row=10):
    """Landscape mesh grid: target instances in the first row, then candidates."""
    df = load_csv(indir, "landscape_grid.csv")
    targets = [s for s in df["source"].unique() if str(s).startswith("target_")]
    cands = (df[df["rank"] >= 0].drop_duplicates("source")
             .sort_values("rank")["source"].tolist())
    n_rows = 1 + int(np.ceil(len(cands) / per_row)) if cands else 1
    fig, axes = plt.subplots(n_rows, per_row,
                             figsize=(per_row * 1.4, n_rows * 1.4))
    axes = np.atleast_2d(axes)
    for ax in axes.ravel():
        ax.set_axis_off()

    def draw(ax, source):
        sub = df[df["source"] == source]
        pivot = sub.pivot_table(index="x1", columns="x0", values="value")
        ax.pcolormesh(pivot.columns, pivot.index, pivot.to_numpy(),
                      cmap="viridis", shading="auto")
        ax.set_axis_on()
        ax.set_xticks([])
        ax.set_yticks([])

    for j, source in enumerate(targets[:per_row]):
        draw(axes[0, j], source)
        axes[0, j].set_title(source.replace("target_", ""), fontsize=6)
    for k, source in enumerate(cands):
        r, c = 1 + k // per_row, k % per_row
        draw(axes[r, c], source)
        fit = df[df["source"] == source]["fitness"].iloc[0]
        axes[r, c].set_title(f"{fit:.3f}", fontsize=6)
    fig.suptitle("Target instances (top row) and rank-selected candidates")
    return _save(fig, outdir, "landscape_grid.png")


def render_parallel(indir, outdir):
    """Parallel coordinates of normalized features, one line per replicate row."""
    name = "parallel_coordinates.csv"
    df = load_csv(indir, name, min_feature_columns=1)
    features = feature_columns(df, name)
    x = np.arange(len(features))
    fig, ax = plt.subplots(figsize=(max(8, 0.45 * len(features)), 4.5))
    styles = {
        "candidate": dict(color="lightgray", alpha=0.4, lw=0.7, zorder=1),
        "target": dict(color="tab:blue", alpha=0.8, lw=1.2, zorder=2),
        "highlight": dict(color="tab:red", alpha=0.9, lw=1.8, zorder=3),
    }
    for label, style in styles.items():
        for _, row in df[df["label"] == label].iterrows():
            ax.plot(x, row[features].to_numpy(dtype=float), **style)
    ax.set_xticks(x)
    ax.set_xticklabels(features, rotation=90, fontsize=6)
    ax.set_ylabel("normalized feature value")
    handles = [plt.Line2D([], [], color=s["color"], lw=2) for s in styles.values()]
    ax.legend(handles, list(styles), fontsize=8)
    return _save(fig, outdir, "parallel_coordinates.png")


def render_projection(indir, outdir):
    """2-d embedding: fit on the reference rows only, candidates transformed."""
    ref_name, cand_name = "umap_reference.csv", "umap_candidates.csv"
    reference = load_csv(indir, ref_name, min_feature_columns=1)
    candidates = load_csv(indir, cand_name)
    ref_features = feature_columns(reference, ref_name)
    cand_features = feature_columns(candidates, cand_name)
    if ref_features != cand_features:
        raise SchemaError(
            f"feature columns differ between {ref_name} and {cand_name}"
        )
    target_fid = _read_optional_json(Path(indir) / "manifest.json").get(
        "params", {}).get("fid")

    frozen = FrozenMap()
    frozen.fit(reference[ref_features].to_numpy(dtype=float))
    ref_xy = frozen.transform(reference[ref_features].to_numpy(dtype=float))
    cand_xy = frozen.transform(candidates[cand_features].to_numpy(dtype=float))

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    emb = pd.DataFrame({
        "kind": ["reference"] * len(ref_xy) + ["candidate"] * len(cand_xy),
        "label": reference["fid"].astype(str).tolist()
        + candidates["expression"].astype(str).tolist(),
        "e0": np.concatenate([ref_xy[:, 0], cand_xy[:, 0]]),
        "e1": np.concatenate([ref_xy[:, 1], cand_xy[:, 1]]),
    })
    emb.to_csv(outdir / "embedding.csv", index=False, lineterminator="\n")
    (outdir / "projection_metadata.json").write_text(
        json.dumps(frozen.metadata(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    fig, ax = plt.subplots(figsize=(7, 6))
    ax.scatter(ref_xy[:, 0], ref_xy[:, 1], c=reference["fid"], cmap="tab20",
               s=12, alpha=0.6, label="reference instances")
    if len(cand_xy):
        sc = ax.scatter(cand_xy[:, 0], cand_xy[:, 1],
                        c=candidates["cityblock_to_target"], cmap="magma",
                        s=18, marker="^", label="candidates")
        fig.colorbar(sc, ax=ax, label="cityblock distance to target")
    if target_fid is not None:
        mask = reference["fid"] == target_fid
        ax.scatter(ref_xy[mask, 0], ref_xy[mask, 1], facecolors="none",
                   edgecolors="red", s=60, lw=1.2,
                   label=f"target F{target_fid}")
        ax.scatter([ref_xy[mask, 0].mean()], [ref_xy[mask, 1].mean()],
                   color="red", marker="x", s=80, label="target mean")
    ax.legend(fontsize=8)
    ax.set_title(f"Feature-space projection ({frozen.method})")
    return _save(fig, outdir, "projection.png")


def render_kendall(indir, outdir):
    """Heatmap of the rank correlation between the six distance measures."""
    df = load_csv(indir, "kendall_tau.csv")
    metrics = df["metric"].tolist()
    M = df[metrics].to_numpy(dtype=float)
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(M, vmin=0, vmax=1, cmap="viridis")
    ax.set_xticks(range(len(metrics)), metrics, rotation=45, ha="right")
    ax.set_yticks(range(len(metrics)), metrics)
    for i in range(len(metrics)):
        for j in range(len(metrics)):
            ax.text(j, i, f"{M[i, j]:.2f}", ha="center", va="center",
                    color="white" if M[i, j] < 0.6 else "black", fontsize=8)
    fig.colorbar(im, ax=ax, label="Kendall tau")
    ax.set_title("Rank agreement between distance measures")
    return _save(fig, outdir, "kendall_tau.png")


def render_inner_outer(indir, outdir):
    """Normalized distance distributions, same-target vs cross-target pairs."""
    df = load_csv(indir, "inner_outer.csv")
    metrics = df["metric"].unique().tolist()
    fig, ax = plt.subplots(figsize=(max(6, 1.4 * len(metrics)), 4.5))
    positions, labels = [], []
    for k, metric in enumerate(metrics):
        for off, (kind, color) in enumerate(
            [("inner", "tab:green"), ("outer", "tab:orange")]
        ):
            values = df[(df["metric"] == metric) & (df["kind"] == kind)]
            parts = ax.violinplot([values["distance"].to_numpy()],
                                  positions=[k * 2.0 + off * 0.8], widths=0.7,
                                  showmedians=True)
            for body in parts["bodies"]:
                body.set_facecolor(color)
                body.set_alpha(0.6)
        positions.append(k * 2.0 + 0.4)
        labels.append(metric)
    ax.set_xticks(positions)
    ax.set_xticklabels(labels, rotation=20)
    ax.set_ylabel("normalized distance")
    ax.set_title("Inner (green) vs outer (orange) distances per metric")
    return _save(fig, outdir, "inner_outer.png")


def render_deviation(indir, outdir):
    """Relative-deviation heatmaps: reference corpus and GP-run difference."""
    ref_name, diff_name = "deviation_reference.csv", "deviation_gp_diff.csv"
    ref = load_csv(indir, ref_name, min_feature_columns=1)
    diff = load_csv(indir, diff_name, min_feature_columns=1)
    features = feature_columns(ref, ref_name)
    fig, axes = plt.subplots(1, 2, figsize=(max(10, 0.45 * len(features) * 2), 6),
                             sharey=True)
    for ax, frame, title in (
        (axes[0], ref, "reference relative deviation"),
        (axes[1], diff, "|reference - evolved| deviation"),
    ):
        M = frame[features].to_numpy(dtype=float)
        im = ax.imshow(M, aspect="auto", cmap="magma")
        ax.set_xticks(range(len(features)), features, rotation=90, fontsize=6)
        ax.set_yticks(range(len(frame)), [f"F{f}" for f in frame["fid"]],
                      fontsize=6)
        ax.set_title(title, fontsize=9)
        fig.colorbar(im, ax=ax, shrink=0.8)
    return _save(fig, outdir, "deviation.png")


RENDERERS = {
    "convergence": render_convergence,
    "violins": render_violins,
    "grid": render_grid,
    "parallel": render_parallel,
    "projection": render_projection,
    "kendall": render_kendall,
    "inner-outer": render_inner_outer,
    "deviation": render_deviation,
}
