"""Command-line front end.

Subcommands: ``spectra``, ``gram``, ``classify``, ``baseline``, ``simulate``
and ``density``. Each writes delimited data files plus rendered figures into
the output directory. Options resolve with the precedence flags > config
file > defaults, where the config file holds simple ``key=value`` lines.

Exit codes: 0 success, 2 usage error, 1 runtime failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import evaluation, io, plots, randgraphs
from .graphs import WEIGHTINGS, apply_weighting, group_average, normalized_laplacian
from .kernels import KERNELS, gram_for_kernel
from .spectral import DEFAULT_SIGMA, density_curve, spectrum_of

_FLOAT = "%.17g"

DEFAULTS = {
    "weighting": "original",
    "kernel": "emd",
    "c-grid": "0.1,1,10,50",
    "repetitions": 100,
    "seed": evaluation.DEFAULT_BASE_SEED,
    "workers": max(os.cpu_count() or 1, 1),
    "sigma": DEFAULT_SIGMA,
    "ws-rewire": randgraphs.DEFAULT_WS_REWIRE,
    "gamma": 1.0,
    "grid": "-0.1:2.1:0.002",
    "models": "er,ba,ws",
    "best-c": "per-repetition",
    "clip-psd": False,
    "nested-cv": False,
    "group-average": False,
}

_CASTS = {
    "weighting": str,
    "kernel": str,
    "c-grid": str,
    "repetitions": int,
    "seed": int,
    "workers": int,
    "sigma": float,
    "ws-rewire": float,
    "gamma": float,
    "grid": str,
    "models": str,
    "best-c": str,
    "manifest": str,
    "coords": str,
    "reference": str,
    "out": str,
}

_BOOL_KEYS = ("clip-psd", "nested-cv", "group-average")


class UsageError(Exception):
    """Bad options or option combinations; reported through the parser (exit 2)."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"cannot interpret {text!r} as a boolean")


def read_config(path) -> dict:
    """Parse ``key=value`` lines; '#' starts a comment, blank lines are skipped."""
    config = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}: line {line_no}: expected key=value, got {line!r}")
        key, value = stripped.split("=", 1)
        config[key.strip()] = value.strip()
    return config


class Options:
    """Resolved option values with flag > config > default precedence."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        config_path = self._args.get("config")
        self._config = read_config(config_path) if config_path else {}

    def get(self, key: str):
        attr = key.replace("-", "_")
        if self._args.get(attr) is not None:
            return self._args[attr]
        if key in self._config:
            raw = self._config[key]
            if key in _BOOL_KEYS:
                return _parse_bool(raw)
            cast = _CASTS.get(key, str)
            try:
                return cast(raw)
            except ValueError:
                raise UsageError(f"config value for {key!r} is not a valid {cast.__name__}: {raw!r}") from None
        if key in DEFAULTS:
            return DEFAULTS[key]
        return None

    def require(self, key: str):
        value = self.get(key)
        if value is None:
            raise UsageError(f"--{key} is required for this subcommand")
        return value


def _parse_c_grid(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise UsageError(f"cannot parse C grid {text!r}") from None
    if not values or any(c <= 0 for c in values):
        raise UsageError(f"C grid must list positive values, got {text!r}")
    return values


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"grid must be numeric start:stop:step, got {text!r}") from None
    if step <= 0 or stop <= start:
        raise UsageError(f"grid must have stop > start and step > 0, got {text!r}")
    return np.arange(start, stop + step / 2, step)


def _parse_models(text: str) -> list[str]:
    models = [tok.strip().lower() for tok in text.split(",") if tok.strip()]
    for model in models:
        if model not in ("er", "ba", "ws"):
            raise UsageError(f"unknown model {model!r}; choose from er, ba, ws")
    if not models:
        raise UsageError("no models requested")
    return models


def _checked_choice(opts: Options, key: str, allowed) -> str:
    value = opts.get(key)
    if value not in allowed:
        raise UsageError(f"--{key} must be one of {', '.join(allowed)}; got {value!r}")
    return value


def _checked_sigma(opts: Options) -> float:
    sigma = opts.get("sigma")
    if sigma <= 0:
        raise UsageError(f"--sigma must be positive, got {sigma}")
    return sigma


def _outdir(opts: Options) -> Path:
    out = Path(opts.require("out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_weighted_graphs(opts: Options):
    """Load the manifest's graphs and apply the requested weighting scheme."""
    weighting = _checked_choice(opts, "weighting", WEIGHTINGS)
    manifest = io.load_manifest(opts.require("manifest"))
    coords = opts.get("coords")
    if weighting != "original" and coords is None:
        raise UsageError(f"--coords is required for {weighting!r} weighting")
    graphs, labels = io.load_dataset(manifest, coords)
    weighted = [apply_weighting(g, weighting) for g in graphs]
    return manifest, weighted, labels


def _write_rows(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and np.isnan(value):
        return ""
    if isinstance(value, float):
        return _FLOAT % value
    return str(value)


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectra(opts: Options) -> None:
    out = _outdir(opts)
    sigma = _checked_sigma(opts)
    manifest, graphs, _ = _load_weighted_graphs(opts)
    rows = []
    curves = []
    for entry, g in zip(manifest.entries, graphs):
        spectrum = spectrum_of(g)
        io.save_spectrum(spectrum, out / f"spectrum_{entry.subject_id}.csv")
        lap_trace = float(np.trace(normalized_laplacian(g)))
        rows.append([
            entry.subject_id,
            str(g.n),
            _fmt(float(spectrum.values[0])),
            _fmt(float(spectrum.values[-1])),
            _fmt(float(spectrum.values.sum())),
            _fmt(lap_trace),
        ])
        curves.append((entry.subject_id, density_curve(spectrum, sigma)))
    _write_rows(
        out / "spectra_summary.csv",
        "subject_id,n_nodes,min_eigenvalue,max_eigenvalue,eigenvalue_sum,laplacian_trace",
        rows,
    )
    plots.save_density_figure(curves, out / "spectra.png", title="Subject eigenvalue densities")
    print(f"wrote {len(rows)} spectra to {out}")


def _heatmap_order(labels: np.ndarray) -> np.ndarray:
    """Subjects ordered class-0-then-class-1, stable within class."""
    return np.concatenate([np.flatnonzero(labels == 0), np.flatnonzero(labels == 1)])


def _write_gram_outputs(gram, manifest_ids, labels, out: Path, kernel: str) -> None:
    io.save_gram(gram, out / "gram.txt")
    order = _heatmap_order(np.asarray(labels))
    reordered = gram.values[np.ix_(order, order)]
    with open(out / "gram_heatmap.csv", "w") as fh:
        for row in reordered:
            fh.write(",".join(_FLOAT % x for x in row) + "\n")
    _write_rows(
        out / "gram_heatmap_order.csv",
        "subject_id,label",
        [[manifest_ids[i], str(int(np.asarray(labels)[i]))] for i in order],
    )
    boundary = int(np.count_nonzero(np.asarray(labels) == 0))
    plots.save_gram_figure(
        reordered, boundary, out / "gram_matrix.png",
        title=f"{kernel} kernel Gram matrix",
    )


def cmd_gram(opts: Options) -> None:
    out = _outdir(opts)
    kernel = _checked_choice(opts, "kernel", KERNELS)
    manifest, graphs, labels = _load_weighted_graphs(opts)
    prepared = evaluation.prepare_graphs(graphs, "original", scale=True)
    gram = gram_for_kernel(prepared, kernel, gamma=opts.get("gamma"), clip=bool(opts.get("clip-psd")))
    _write_gram_outputs(gram, manifest.subject_ids, labels, out, kernel)
    with open(out / "gram_diagnostics.txt", "w") as fh:
        fh.write(f"kernel: {kernel}\n")
        fh.write(f"subjects: {gram.n}\n")
        fh.write(f"min_eigenvalue: {_FLOAT % gram.min_eigenvalue}\n")
    print(f"wrote Gram matrix ({gram.n} subjects, min eigenvalue {gram.min_eigenvalue:.3e}) to {out}")


def _report_rows(report: evaluation.CvReport):
    per_c = []
    best = []
    for index, rep in enumerate(report.repetitions):
        if not report.config.nested:
            for res in rep.per_c:
                per_c.append([
                    str(index), str(rep.seed), _fmt(res.c),
                    _fmt(res.roc_auc), _fmt(res.precision), _fmt(res.recall),
                ])
        best_c = "nested" if report.config.nested else _fmt(rep.best.c)
        best.append([
            str(index), str(rep.seed), best_c,
            _fmt(rep.best.roc_auc), _fmt(rep.best.precision), _fmt(rep.best.recall),
        ])
    return per_c, best


def _write_classification_outputs(report: evaluation.CvReport, out: Path) -> None:
    per_c_rows, best_rows = _report_rows(report)
    if per_c_rows:
        _write_rows(out / "report_per_c.csv", "repetition,seed,c,roc_auc,precision,recall", per_c_rows)
    _write_rows(out / "report_best.csv", "repetition,seed,best_c,roc_auc,precision,recall", best_rows)
    if report.config.nested:
        _write_rows(
            out / "nested_c_choices.csv",
            "repetition,fold,c",
            [
                [str(r), str(f), _fmt(c)]
                for r, rep in enumerate(report.repetitions)
                for f, c in enumerate(rep.chosen_c_per_fold or [])
            ],
        )

    score_rows = []
    for index, rep in enumerate(report.repetitions):
        for sid, label, score in zip(report.subject_ids, report.labels, rep.best.scores):
            score_rows.append([str(index), sid, str(int(label)), _fmt(float(score))])
    _write_rows(out / "pooled_scores.csv", "repetition,subject_id,label,score", score_rows)

    curve = evaluation.mean_roc_curve(report)
    _write_rows(
        out / "mean_roc_curve.csv",
        "fpr,tpr",
        [[_fmt(float(x)), _fmt(float(y))] for x, y in zip(curve.fpr, curve.tpr)],
    )
    plots.save_roc_figure(curve, out / "roc_curve.png")

    auc, precision, recall = report.best_metric_arrays()
    plots.save_precision_recall_figure(precision, recall, out / "precision_recall.png")
    plots.save_auc_boxplot([(report.config.kernel, auc)], out / "auc_distribution.png")

    if report.gram is not None:
        _write_gram_outputs(report.gram, report.subject_ids, report.labels, out, report.config.kernel)

    summary = report.summary()
    lines = [
        f"kernel: {report.config.kernel}",
        f"weighting: {report.config.weighting}",
        f"C grid: {', '.join(str(c) for c in report.config.c_grid)}",
        f"repetitions: {report.config.repetitions}",
        f"folds: {report.config.folds}",
        f"base seed: {report.config.base_seed}",
        f"gamma: {report.config.gamma}",
        f"nested CV: {'on' if report.config.nested else 'off'}",
        f"subjects: {report.labels.size} "
        f"({int(np.count_nonzero(report.labels == 1))} positive, "
        f"{int(np.count_nonzero(report.labels == 0))} negative)",
    ]
    if report.gram is not None:
        lines.append(f"gram min eigenvalue: {report.gram.min_eigenvalue:.6e}")
    lines += [
        "",
        f"mean ROC AUC: {summary['mean_roc_auc']:.3f} (sd {summary['sd_roc_auc']:.3f})",
        f"mean precision: {summary['mean_precision']:.3f} (sd {summary['sd_precision']:.3f})",
        f"mean recall: {summary['mean_recall']:.3f} (sd {summary['sd_recall']:.3f})",
        f"area under mean ROC curve: {curve.auc:.3f}",
    ]
    if not report.config.nested:
        global_c, global_results = evaluation.select_best_global(report)
        global_auc = float(np.mean([r.roc_auc for r in global_results]))
        lines.append(f"best single C across repetitions: {global_c} (mean ROC AUC {global_auc:.3f})")
    with open(out / "summary.txt", "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _classification_report(opts: Options, kernel: str) -> evaluation.CvReport:
    weighting = _checked_choice(opts, "weighting", WEIGHTINGS)
    coords = opts.get("coords")
    if weighting != "original" and coords is None:
        raise UsageError(f"--coords is required for {weighting!r} weighting")
    repetitions = opts.get("repetitions")
    if repetitions < 1:
        raise UsageError(f"--repetitions must be at least 1, got {repetitions}")
    workers = opts.get("workers")
    if workers < 1:
        raise UsageError(f"--workers must be at least 1, got {workers}")
    return evaluation.run_experiment(
        opts.require("manifest"),
        coords,
        weighting=weighting,
        kernel=kernel,
        c_grid=_parse_c_grid(opts.get("c-grid")),
        repetitions=repetitions,
        base_seed=opts.get("seed"),
        nested=bool(opts.get("nested-cv")),
        workers=workers,
        gamma=opts.get("gamma"),
        clip_psd=bool(opts.get("clip-psd")),
    )


def cmd_classify(opts: Options) -> None:
    out = _outdir(opts)
    kernel = _checked_choice(opts, "kernel", KERNELS)
    _checked_choice(opts, "best-c", ("per-repetition", "global"))
    report = _classification_report(opts, kernel)
    _write_classification_outputs(report, out)
    summary = report.summary()
    if opts.get("best-c") == "global" and not report.config.nested:
        global_c, global_results = evaluation.select_best_global(report)
        aucs = [r.roc_auc for r in global_results]
        print(
            f"{kernel}: mean ROC AUC {float(np.mean(aucs)):.3f} at fixed C={global_c} "
            f"over {report.config.repetitions} repetitions -> {out}"
        )
    else:
        print(
            f"{kernel}: mean ROC AUC {summary['mean_roc_auc']:.3f} "
            f"(sd {summary['sd_roc_auc']:.3f}) over {report.config.repetitions} repetitions -> {out}"
        )


def cmd_baseline(opts: Options) -> None:
    out = _outdir(opts)
    comparison = []
    boxplot_groups = []
    for kernel in ("linear-spectra", "linear-edges"):
        sub = out / kernel
        sub.mkdir(parents=True, exist_ok=True)
        report = _classification_report(opts, kernel)
        _write_classification_outputs(report, sub)
        auc, _, _ = report.best_metric_arrays()
        boxplot_groups.append((kernel, auc))
        for index, value in enumerate(auc):
            comparison.append([kernel, str(index), _fmt(float(value))])
        summary = report.summary()
        print(f"{kernel}: mean ROC AUC {summary['mean_roc_auc']:.3f} (sd {summary['sd_roc_auc']:.3f})")
    _write_rows(out / "baseline_comparison.csv", "kernel,repetition,roc_auc", comparison)
    plots.save_auc_boxplot(boxplot_groups, out / "auc_boxplot.png", title="Baseline ROC AUC")


def cmd_density(opts: Options) -> None:
    out = _outdir(opts)
    sigma = _checked_sigma(opts)
    grid = _parse_grid(opts.get("grid"))
    manifest, graphs, _ = _load_weighted_graphs(opts)
    curves = []
    for entry, g in zip(manifest.entries, graphs):
        curve = density_curve(spectrum_of(g), sigma, grid)
        io.save_density(curve, out / f"density_{entry.subject_id}.csv")
        curves.append((entry.subject_id, curve))
    if opts.get("group-average"):
        curve = density_curve(spectrum_of(group_average(graphs)), sigma, grid)
        io.save_density(curve, out / "density_group_average.csv")
        curves.append(("group average", curve))
    plots.save_density_figure(curves, out / "densities.png")
    print(f"wrote {len(curves)} density curves (sigma={sigma}) to {out}")


_MODEL_SEED_OFFSET = {"er": 0, "ba": 1, "ws": 2}


def cmd_simulate(opts: Options) -> None:
    out = _outdir(opts)
    sigma = _checked_sigma(opts)
    grid = _parse_grid(opts.get("grid"))
    models = _parse_models(opts.get("models"))
    ws_rewire = opts.get("ws-rewire")
    if not 0 <= ws_rewire <= 1:
        raise UsageError(f"--ws-rewire must be in [0, 1], got {ws_rewire}")
    seed = opts.get("seed")

    reference_path = opts.get("reference")
    if reference_path is not None:
        reference = io.load_matrix(reference_path, subject_id="reference")
    elif opts.get("manifest") is not None:
        _, graphs, _ = _load_weighted_graphs(opts)
        reference = group_average(graphs)
    else:
        raise UsageError("simulate needs --reference or --manifest to match node/edge counts")

    n, m = reference.n, reference.edge_count()
    curves = [("reference", density_curve(spectrum_of(reference), sigma, grid))]
    io.save_density(curves[0][1], out / "density_reference.csv")
    rows = [["reference", str(n), str(m)]]
    for model in models:
        g = randgraphs.generate(model, n, m, seed + _MODEL_SEED_OFFSET[model], ws_rewire=ws_rewire)
        io.save_matrix(g, out / f"{model}.txt")
        curve = density_curve(spectrum_of(g), sigma, grid)
        io.save_density(curve, out / f"density_{model}.csv")
        curves.append((model, curve))
        rows.append([model, str(g.n), str(g.edge_count())])
    _write_rows(out / "simulate_summary.csv", "graph,n_nodes,n_edges", rows)
    plots.save_density_figure(curves, out / "densities.png", title="Matched random-graph densities")
    print(f"matched n={n}, m={m}; wrote {len(models)} graphs to {out}")


# ---------------------------------------------------------------------------
# parser


def _add_common(sub: argparse.ArgumentParser, *names: str) -> None:
    flags = {
        "manifest": dict(help="dataset manifest CSV (path,label,subject_id)"),
        "coords": dict(help="node coordinates CSV (x,y,z per node)"),
        "weighting": dict(choices=WEIGHTINGS, help="edge weighting scheme"),
        "kernel": dict(choices=KERNELS, help="kernel for the Gram matrix"),
        "c-grid": dict(help="comma-separated SVM regularization grid (default 0.1,1,10,50)"),
        "repetitions": dict(type=int, help="number of cross-validation repetitions"),
        "seed": dict(type=int, help="base random seed"),
        "out": dict(help="output directory"),
        "workers": dict(type=int, help="worker threads for repetitions"),
        "sigma": dict(type=float, help="Gaussian bandwidth for density curves"),
        "ws-rewire": dict(type=float, help="rewiring probability for the WS model"),
        "gamma": dict(type=float, help="kernel bandwidth in exp(-gamma * distance)"),
        "grid": dict(help="density grid as start:stop:step"),
        "models": dict(help="comma-separated random-graph models (er,ba,ws)"),
        "reference": dict(help="reference matrix file for node/edge matching"),
        "best-c": dict(choices=("per-repetition", "global"), help="how the best C is selected"),
        "config": dict(help="config file with key=value lines (flags take precedence)"),
    }
    stores = {
        "clip-psd": "repair an indefinite Gram matrix by eigenvalue clipping",
        "nested-cv": "select C inside the training folds instead of on test AUC",
        "group-average": "also emit the entrywise group-average curve",
    }
    for name in names:
        if name in stores:
            sub.add_argument(f"--{name}", action="store_true", default=None, help=stores[name])
        else:
            sub.add_argument(f"--{name}", default=None, **flags[name])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectremd",
        description=(
            "Graph-spectral classification toolkit: normalized-Laplacian spectra, "
            "earth mover's distance kernels and precomputed-kernel SVM evaluation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectra", help="export per-subject eigenvalue spectra")
    _add_common(p, "manifest", "coords", "weighting", "sigma", "out", "config")
    p.set_defaults(handler=cmd_spectra)

    p = sub.add_parser("gram", help="build and export a kernel Gram matrix")
    _add_common(p, "manifest", "coords", "weighting", "kernel", "gamma", "clip-psd", "out", "config")
    p.set_defaults(handler=cmd_gram)

    p = sub.add_parser("classify", help="run the repeated cross-validation experiment")
    _add_common(
        p, "manifest", "coords", "weighting", "kernel", "c-grid", "repetitions",
        "seed", "workers", "gamma", "clip-psd", "nested-cv", "best-c", "out", "config",
    )
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("baseline", help="run both linear baselines for comparison")
    _add_common(
        p, "manifest", "coords", "weighting", "c-grid", "repetitions",
        "seed", "workers", "nested-cv", "best-c", "out", "config",
    )
    p.set_defaults(handler=cmd_baseline)

    p = sub.add_parser("simulate", help="generate matched ER/BA/WS graphs and their densities")
    _add_common(
        p, "reference", "manifest", "coords", "weighting", "models",
        "ws-rewire", "seed", "sigma", "grid", "out", "config",
    )
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("density", help="export Gaussian density curves of subject spectra")
    _add_common(
        p, "manifest", "coords", "weighting", "sigma", "grid", "group-average", "out", "config",
    )
    p.set_defaults(handler=cmd_density)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.handler(Options(args))
    except UsageError as exc:
        parser.error(str(exc))
    except Exception as exc:  # runtime failure: report and exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
