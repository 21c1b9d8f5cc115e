"""Scoring and multi-seed experiment sweeps."""
from __future__ import annotations

import csv
import io
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .datagen import STRUCTURES, RickerParams, ScmSpec, gen_ricker, gen_structure
from .graph import SummaryGraph
from .hybrid import METHODS, DiscoveryConfig, _prepare, discover
from .restcb import rest_pcmci_plus
from .stats import Dataset

log = logging.getLogger(__name__)

BASELINE = "skeleton-random"
ALL_METHODS = tuple(METHODS) + (BASELINE,)
REPORT_HEADER = ("method", "structure", "noise", "n", "mean_f1", "sd_f1", "seconds")


@dataclass(frozen=True)
class F1Report:
    tp: int
    fp: int
    fn: int
    f1: float


def f1_scg(pred: SummaryGraph, truth: SummaryGraph) -> F1Report:
    """F1 over directed cross edges; self loops are ignored and a
    bidirected pair counts as two directed edges."""
    if list(pred.names) != list(truth.names):
        raise ValueError(f"variable sets differ: {list(pred.names)} vs {list(truth.names)}")
    P, T = set(pred.edges), set(truth.edges)
    tp, fp, fn = len(P & T), len(P - T), len(T - P)
    if not P and not T:
        return F1Report(0, 0, 0, 1.0)
    denom = 2 * tp + fp + fn
    return F1Report(tp, fp, fn, 2 * tp / denom if denom else 0.0)


@dataclass
class ExperimentReport:
    method: str
    structure: str
    noise: str
    n_datasets: int
    mean_f1: float
    sd_f1: float
    wall_time: float
    scores: list[float] = field(default_factory=list, repr=False)
    failures: list[str] = field(default_factory=list, repr=False)

    def row(self) -> tuple:
        return (self.method, self.structure, self.noise, self.n_datasets,
                f"{self.mean_f1:.4f}", f"{self.sd_f1:.4f}", f"{self.wall_time:.2f}")


def skeleton_random(data: Dataset, cfg: DiscoveryConfig, seed: int = 0) -> SummaryGraph:
    """Baseline: unordered restricted PCMCI+ skeleton with every unoriented
    instantaneous edge given a coin-flip direction."""
    data = _prepare(data, cfg)
    g = rest_pcmci_plus(data, cfg.gamma, cfg.alpha)
    rng = np.random.default_rng(seed)
    inst = {(a, b) if rng.random() < 0.5 else (b, a) for a, b in sorted(g.unoriented)}
    # random directions may form instantaneous cycles, so collapse directly
    edges = {(s, t) for s, _, t in g.lagged if s != t} | inst
    loops = {s for s, _, t in g.lagged if s == t}
    return SummaryGraph(g.names, edges, loops)


def make_dataset(structure: str, noise: str, seed: int, T: int, species: int = 5):
    """``(data, truth SCG)`` for a benchmark structure id (``ricker`` included)."""
    if structure == "ricker":
        return gen_ricker(RickerParams(S=species, T=T, seed=seed))
    data, _, scg = gen_structure(ScmSpec(structure, noise=noise, T=T, seed=seed))
    return data, scg


def run_one(method: str, structure: str, noise: str, seed: int, T: int,
            cfg: DiscoveryConfig, species: int = 5) -> tuple[float, str | None]:
    try:
        data, truth = make_dataset(structure, noise, seed, T, species)
        if method == BASELINE:
            pred = skeleton_random(data, cfg, seed)
        else:
            pred = discover(method, data, cfg).scg
        return f1_scg(pred, truth).f1, None
    except Exception as exc:  # a failed run scores 0 but never stops the sweep
        log.warning("%s/%s seed %d failed: %s", method, structure, seed, exc)
        return 0.0, f"seed {seed}: {type(exc).__name__}: {exc}"


def _run_star(args):
    return run_one(*args)


def run_benchmark(methods, structures, noise: str = "uniform", n_seeds: int = 20,
                  T: int = 1000, cfg: DiscoveryConfig | None = None,
                  workers: int = 1, species: int = 5) -> list[ExperimentReport]:
    cfg = cfg or DiscoveryConfig()
    for m in methods:
        if m not in ALL_METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {list(ALL_METHODS)}")
    for s in structures:
        if s not in STRUCTURES and s != "ricker":
            raise ValueError(f"unknown structure {s!r}")
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    reports = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for s in structures:
            for m in methods:
                t0 = time.perf_counter()
                jobs = [(m, s, noise, seed, T, cfg, species) for seed in range(n_seeds)]
                out = list(pool.map(_run_star, jobs)) if pool else [_run_star(j) for j in jobs]
                scores = [f for f, _ in out]
                label = "-" if s == "ricker" else noise   # ricker noise is fixed
                reports.append(ExperimentReport(
                    m, s, label, n_seeds, statistics.fmean(scores),
                    statistics.pstdev(scores) if n_seeds > 1 else 0.0,
                    time.perf_counter() - t0, scores, [e for _, e in out if e]))
    finally:
        if pool:
            pool.shutdown()
    return reports


def report_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def report_table(reports) -> str:
    rows = [REPORT_HEADER] + [tuple(str(c) for c in r.row()) for r in reports]
    widths = [max(len(r[i]) for r in rows) for i in range(len(REPORT_HEADER))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
