"""Conditional independence tests over lagged nodes.

A test is any callable ``ci(x, y, cond, pvalue=True) -> TestResult`` where the
arguments are :class:`~hybridcd.graph.LaggedNode`s.  Two implementations ship:
:class:`ParCorrCI` on data, and :class:`DSepCI`, a population oracle that
answers from d-separation in a known window graph.
"""
from __future__ import annotations

from typing import Protocol, Sequence

import numpy as np

from .graph import LaggedNode, WindowGraph, d_separated_sets, unroll, topological_order, CausalOrder
from .stats import Dataset, TestResult, fisher_z, partial_corr_from_cov, pca_first_component


class CITest(Protocol):
    def __call__(self, x: LaggedNode, y: LaggedNode, cond: Sequence[LaggedNode],
                 pvalue: bool = True) -> TestResult: ...


def _key(x, y, cond):
    return (frozenset((x, y)), frozenset(cond))


class ParCorrCI:
    """Partial-correlation / Fisher-z test on lagged copies of a dataset.

    All tests share the rows ``max_lag..T-1`` so the sample size is constant.
    Past-block nodes (``LaggedNode.past(v)``) are the first principal
    component of lags ``1..block_lags`` of variable ``v``.  The covariance of
    every available column is computed once; each test inverts a small
    submatrix.  Results are cached per (pair, conditioning set).
    """

    def __init__(self, data: Dataset, max_lag: int, block_lags: int | None = None):
        v = data.values
        T, d = v.shape
        if T - max_lag < 5:
            raise ValueError(f"T={T} too short for max lag {max_lag}")
        self.n = T - max_lag
        self.index: dict[LaggedNode, int] = {}
        cols = []
        for lag in range(max_lag + 1):
            for var in range(d):
                self.index[LaggedNode(var, lag)] = len(cols)
                cols.append(v[max_lag - lag:T - lag, var])
        if block_lags:
            for var in range(d):
                block = np.column_stack([v[max_lag - l:T - l, var] for l in range(1, block_lags + 1)])
                self.index[LaggedNode.past(var)] = len(cols)
                cols.append(pca_first_component(block))
        M = np.column_stack(cols)
        M = M - M.mean(axis=0)
        self.cov = M.T @ M / self.n
        self.cache: dict = {}
        self.n_tests = 0

    def __call__(self, x, y, cond=(), pvalue=True) -> TestResult:
        key = _key(x, y, cond)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        self.n_tests += 1
        idx = self.index
        try:
            rho = partial_corr_from_cov(self.cov, idx[x], idx[y], [idx[c] for c in cond])
        except KeyError as exc:
            raise ValueError(f"node {exc.args[0]} not available in this test") from None
        res = fisher_z(rho, self.n, len(cond))
        self.cache[key] = res
        return res


class DSepCI:
    """Population CI oracle: p = 1 when d-separated in ``truth``, else 0.

    Past-block nodes expand to lags ``1..gamma`` of their variable.  The
    window graph is unrolled well beyond the deepest node any query can
    reach so that truncating the infinite past does not hide dependencies.
    """

    def __init__(self, truth: WindowGraph, gamma: int, horizon: int | None = None):
        self.truth = truth
        self.gamma = gamma
        if horizon is None:
            horizon = 2 * gamma + 2 * max(gamma, truth.gamma) + 2
        self.parents = unroll(truth, horizon)
        self.cache: dict = {}
        self.n_tests = 0

    def _expand(self, node: LaggedNode) -> set[LaggedNode]:
        if node.is_block:
            return {LaggedNode(node.var, l) for l in range(1, self.gamma + 1)}
        return {node}

    def __call__(self, x, y, cond=(), pvalue=True) -> TestResult:
        key = _key(x, y, cond)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        self.n_tests += 1
        xs, ys = self._expand(x), self._expand(y)
        zs = set().union(*(self._expand(c) for c in cond)) if cond else set()
        zs -= xs | ys
        sep = d_separated_sets(self.parents, xs, ys, zs)
        res = TestResult(0.0, 1.0, 0.0) if sep else TestResult(1.0, 0.0, 1.0)
        self.cache[key] = res
        return res


class TrueOrder:
    """Population ordering oracle: topological order of the true
    instantaneous DAG restricted to the requested variables."""

    def __init__(self, truth: WindowGraph):
        self.order = topological_order(truth.d, truth.inst)

    def __call__(self, variables, past=()) -> CausalOrder:
        want = set(variables)
        return CausalOrder([v for v in self.order if v in want])
