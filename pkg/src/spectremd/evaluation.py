"""Repeated stratified cross-validation with pooled test-fold predictions.

One experiment runs R repetitions of stratified 10-fold cross-validation
over a precomputed Gram matrix. Within a repetition, every fold's test
decision values are pooled so each subject is scored exactly once, then
ROC AUC, precision and recall are computed per regularization value; the
best value of C is selected per repetition by pooled AUC (an optional
nested mode selects C inside the training folds instead).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import graphs as graphs_mod
from . import io as io_mod
from .kernels import GramMatrix, gram_for_kernel
from .svm import svm_decisions, svm_train

DEFAULT_C_GRID = (0.1, 1.0, 10.0, 50.0)
DEFAULT_REPETITIONS = 100
DEFAULT_FOLDS = 10
DEFAULT_BASE_SEED = 20160101


def kfold_splits(labels, k: int = DEFAULT_FOLDS, seed: int = 0):
    """Stratified k-fold partition; every index lands in exactly one test fold.

    Indices of each class are shuffled and dealt round-robin, continuing the
    fold cursor across classes so total fold sizes stay within one of each
    other and per-fold class counts stay within one of the global ratio.
    """
    y = np.asarray(labels)
    n = y.size
    if k < 2:
        raise ValueError(f"need at least 2 folds, got k={k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of samples ({n})")
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("labels contain a single class; stratification is impossible")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    for value in classes:
        idx = np.flatnonzero(y == value)
        rng.shuffle(idx)
        for index in idx:
            folds[cursor % k].append(int(index))
            cursor += 1
    splits = []
    everything = np.arange(n)
    for fold in folds:
        test = np.array(sorted(fold), dtype=int)
        train = np.setdiff1d(everything, test)
        splits.append((train, test))
    return splits


def _positive_mask(labels) -> np.ndarray:
    y = np.asarray(labels)
    pos = y > 0
    if not pos.any() or pos.all():
        raise ValueError("labels must contain both classes")
    return pos


def roc_auc(scores, labels) -> float:
    """Rank statistic: fraction of (positive, negative) pairs ordered correctly.

    Ties count one half. Computed from integer win/tie counts so the result
    matches exhaustive pair enumeration bit for bit.
    """
    s = np.asarray(scores, dtype=float)
    pos = _positive_mask(labels)
    n_pos = int(pos.sum())
    n_neg = int(s.size - n_pos)
    order = np.argsort(s, kind="mergesort")
    wins = 0
    ties = 0
    neg_below = 0
    i = 0
    while i < s.size:
        j = i
        group_pos = 0
        group_neg = 0
        while j < s.size and s[order[j]] == s[order[i]]:
            if pos[order[j]]:
                group_pos += 1
            else:
                group_neg += 1
            j += 1
        wins += group_pos * neg_below
        ties += group_pos * group_neg
        neg_below += group_neg
        i = j
    return (wins + 0.5 * ties) / (n_pos * n_neg)


def precision_recall(predictions, labels) -> tuple[float | None, float]:
    """Precision and recall with the positive class taken as +1.

    Precision is ``None`` (reported as missing) when nothing was predicted
    positive.
    """
    pred_pos = np.asarray(predictions) > 0
    actual_pos = _positive_mask(labels)
    tp = int(np.count_nonzero(pred_pos & actual_pos))
    fp = int(np.count_nonzero(pred_pos & ~actual_pos))
    fn = int(np.count_nonzero(~pred_pos & actual_pos))
    precision = tp / (tp + fp) if (tp + fp) > 0 else None
    recall = tp / (tp + fn)
    return precision, recall


@dataclass
class CResult:
    """Pooled metrics for one regularization value within one repetition."""

    c: float
    roc_auc: float
    precision: float | None
    recall: float
    scores: np.ndarray


@dataclass
class RepetitionResult:
    """One repetition: per-C results plus the best-C selection."""

    seed: int
    per_c: list[CResult]
    best: CResult
    chosen_c_per_fold: list[float] | None = None


@dataclass
class ExperimentConfig:
    kernel: str = "emd"
    weighting: str = "original"
    c_grid: tuple = DEFAULT_C_GRID
    repetitions: int = DEFAULT_REPETITIONS
    base_seed: int = DEFAULT_BASE_SEED
    folds: int = DEFAULT_FOLDS
    nested: bool = False
    gamma: float = 1.0
    clip_psd: bool = False
    svm_tol: float = 1e-3


@dataclass
class CvReport:
    """Full record of a repeated cross-validation experiment."""

    config: ExperimentConfig
    repetitions: list[RepetitionResult]
    labels: np.ndarray
    subject_ids: list[str] = field(default_factory=list)
    gram: GramMatrix | None = None

    def best_metric_arrays(self):
        """Per-repetition best-C metrics as (auc, precision, recall) arrays; missing precision is NaN."""
        auc = np.array([r.best.roc_auc for r in self.repetitions])
        precision = np.array(
            [np.nan if r.best.precision is None else r.best.precision for r in self.repetitions]
        )
        recall = np.array([r.best.recall for r in self.repetitions])
        return auc, precision, recall

    def summary(self) -> dict:
        """Mean and standard deviation of the per-repetition best-C metrics."""
        auc, precision, recall = self.best_metric_arrays()
        return {
            "repetitions": len(self.repetitions),
            "mean_roc_auc": float(auc.mean()),
            "sd_roc_auc": float(auc.std(ddof=1)) if auc.size > 1 else 0.0,
            "mean_precision": float(np.nanmean(precision)) if not np.all(np.isnan(precision)) else float("nan"),
            "sd_precision": float(np.nanstd(precision, ddof=1)) if np.count_nonzero(~np.isnan(precision)) > 1 else 0.0,
            "mean_recall": float(recall.mean()),
            "sd_recall": float(recall.std(ddof=1)) if recall.size > 1 else 0.0,
        }


def _pooled_scores(K, y, splits, c, svm_tol) -> np.ndarray:
    scores = np.empty(y.size)
    for train, test in splits:
        model = svm_train(K[np.ix_(train, train)], y[train], c, tol=svm_tol)
        scores[test] = svm_decisions(model, K[np.ix_(test, train)])
    return scores


def _metrics(scores, y, c) -> CResult:
    predictions = np.where(scores >= 0, 1.0, -1.0)
    precision, recall = precision_recall(predictions, y)
    return CResult(
        c=c,
        roc_auc=roc_auc(scores, y),
        precision=precision,
        recall=recall,
        scores=scores,
    )


def _run_repetition(K, y, c_grid, seed, k, nested, svm_tol) -> RepetitionResult:
    splits = kfold_splits(y, k=k, seed=seed)
    if not nested:
        per_c = [_metrics(_pooled_scores(K, y, splits, c, svm_tol), y, c) for c in c_grid]
        best = per_c[0]
        for result in per_c[1:]:
            if result.roc_auc > best.roc_auc:
                best = result
        return RepetitionResult(seed=seed, per_c=per_c, best=best)

    scores = np.empty(y.size)
    chosen = []
    for fold_index, (train, test) in enumerate(splits):
        K_train = K[np.ix_(train, train)]
        y_train = y[train]
        inner_k = min(k, int(min(np.count_nonzero(y_train > 0), np.count_nonzero(y_train < 0))))
        inner_k = max(inner_k, 2)
        inner_splits = kfold_splits(y_train, k=inner_k, seed=seed * 1000 + fold_index)
        best_c, best_auc = c_grid[0], -np.inf
        for c in c_grid:
            inner_scores = _pooled_scores(K_train, y_train, inner_splits, c, svm_tol)
            auc = roc_auc(inner_scores, y_train)
            if auc > best_auc:
                best_c, best_auc = c, auc
        chosen.append(best_c)
        model = svm_train(K_train, y_train, best_c, tol=svm_tol)
        scores[test] = svm_decisions(model, K[np.ix_(test, train)])
    result = _metrics(scores, y, float("nan"))
    return RepetitionResult(seed=seed, per_c=[result], best=result, chosen_c_per_fold=chosen)


def cross_validate(
    gram,
    labels,
    c_grid=DEFAULT_C_GRID,
    repetitions: int = DEFAULT_REPETITIONS,
    base_seed: int = DEFAULT_BASE_SEED,
    k: int = DEFAULT_FOLDS,
    nested: bool = False,
    workers: int | None = 1,
    svm_tol: float = 1e-3,
) -> list[RepetitionResult]:
    """Repeated stratified k-fold CV over a fixed Gram matrix.

    Repetition r splits with seed ``base_seed + r``. Repetitions are
    independent jobs; ``workers`` sizes the thread pool that executes them.
    Results are assembled in repetition order regardless of worker count.
    """
    K = gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=float)
    y = np.where(np.asarray(labels) > 0, 1.0, -1.0)
    _positive_mask(y)
    seeds = [base_seed + r for r in range(repetitions)]
    if workers is None or workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_repetition, K, y, tuple(c_grid), seed, k, nested, svm_tol)
                for seed in seeds
            ]
            return [f.result() for f in futures]
    return [_run_repetition(K, y, tuple(c_grid), seed, k, nested, svm_tol) for seed in seeds]


def prepare_graphs(graphs, weighting: str = "original", coordinates=None, scale: bool = True):
    """Apply an edge weighting scheme and total-weight scaling to every graph."""
    out = []
    for g in graphs:
        g = graphs_mod.apply_weighting(g, weighting, coordinates)
        if scale:
            g = graphs_mod.scale_by_total_weight(g)
        out.append(g)
    return out


def run_pipeline(
    graphs,
    labels,
    *,
    weighting: str = "original",
    coordinates=None,
    kernel: str = "emd",
    c_grid=DEFAULT_C_GRID,
    repetitions: int = DEFAULT_REPETITIONS,
    base_seed: int = DEFAULT_BASE_SEED,
    folds: int = DEFAULT_FOLDS,
    nested: bool = False,
    workers: int | None = 1,
    gamma: float = 1.0,
    clip_psd: bool = False,
    scale: bool = True,
    subject_ids=None,
    svm_tol: float = 1e-3,
) -> CvReport:
    """Full classification pipeline over in-memory graphs."""
    y01 = np.asarray(labels)
    prepared = prepare_graphs(graphs, weighting, coordinates, scale=scale)
    gram = gram_for_kernel(prepared, kernel, gamma=gamma, clip=clip_psd)
    reps = cross_validate(
        gram,
        y01,
        c_grid=c_grid,
        repetitions=repetitions,
        base_seed=base_seed,
        k=folds,
        nested=nested,
        workers=workers,
        svm_tol=svm_tol,
    )
    config = ExperimentConfig(
        kernel=kernel,
        weighting=weighting,
        c_grid=tuple(c_grid),
        repetitions=repetitions,
        base_seed=base_seed,
        folds=folds,
        nested=nested,
        gamma=gamma,
        clip_psd=clip_psd,
        svm_tol=svm_tol,
    )
    ids = list(subject_ids) if subject_ids is not None else [
        g.subject_id or f"subject{i}" for i, g in enumerate(graphs)
    ]
    return CvReport(config=config, repetitions=reps, labels=y01, subject_ids=ids, gram=gram)


def run_experiment(manifest, coordinates_path=None, **kwargs) -> CvReport:
    """Load a manifest (path or object) and run the classification pipeline."""
    if not isinstance(manifest, io_mod.DatasetManifest):
        manifest = io_mod.load_manifest(manifest)
    graphs, labels = io_mod.load_dataset(manifest, coordinates_path)
    kwargs.setdefault("subject_ids", [e.subject_id for e in manifest.entries])
    return run_pipeline(graphs, labels, **kwargs)


@dataclass
class MeanRocCurve:
    """Vertically averaged ROC curve on a common false-positive-rate grid."""

    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


def roc_points(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    """Upper-envelope ROC vertices (ties produce diagonal segments)."""
    s = np.asarray(scores, dtype=float)
    pos = _positive_mask(labels)
    n_pos = int(pos.sum())
    n_neg = int(s.size - n_pos)
    order = np.argsort(-s, kind="mergesort")
    sorted_scores = s[order]
    sorted_pos = pos[order]
    # Group ties: cumulative counts at the end of each distinct-score block.
    boundaries = np.flatnonzero(np.diff(sorted_scores) != 0)
    block_ends = np.append(boundaries, s.size - 1)
    cum_tp = np.cumsum(sorted_pos)[block_ends]
    cum_fp = (block_ends + 1) - cum_tp
    fpr = np.concatenate(([0.0], cum_fp / n_neg))
    tpr = np.concatenate(([0.0], cum_tp / n_pos))
    # Keep the top of each vertical segment so interpolation sees the envelope.
    keep = np.append(np.diff(fpr) != 0, True)
    keep[-1] = True
    return fpr[keep], tpr[keep]


def mean_roc_curve(report: CvReport, grid_step: float = 0.01) -> MeanRocCurve:
    """Average per-repetition ROC curves on a common FPR grid; AUC by trapezoid."""
    if not report.repetitions:
        raise ValueError("report has no repetitions")
    y = np.where(report.labels > 0, 1.0, -1.0)
    grid = np.round(np.arange(0.0, 1.0 + grid_step / 2, grid_step), 10)
    curves = []
    for rep in report.repetitions:
        fpr, tpr = roc_points(rep.best.scores, y)
        curves.append(np.interp(grid, fpr, tpr))
    mean_tpr = np.mean(curves, axis=0)
    auc = float(np.trapezoid(mean_tpr, grid))
    return MeanRocCurve(fpr=grid, tpr=mean_tpr, auc=auc)


def select_best_global(report: CvReport) -> tuple[float, list[CResult]]:
    """Alternative selection: one C maximizing mean pooled AUC across repetitions."""
    if report.config.nested:
        raise ValueError("global selection is undefined for nested reports")
    c_grid = report.config.c_grid
    means = []
    for idx, c in enumerate(c_grid):
        means.append(np.mean([rep.per_c[idx].roc_auc for rep in report.repetitions]))
    best_idx = int(np.argmax(means))
    return c_grid[best_idx], [rep.per_c[best_idx] for rep in report.repetitions]
