"""Restricted constraint-based skeleton search (no orientation rules).

``rest_pcmci_plus`` builds a window graph, ``rest_pcgce`` an extended summary
graph.  With a causal order both start from the fully connected graph whose
instantaneous edges follow the order and condition on parents only; without
one the instantaneous edges stay unoriented and adjacencies are used.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

from .citest import CITest, ParCorrCI
from .graph import (CausalOrder, ExtendedGraph, LaggedNode, PartialExtendedGraph,
                    PartialWindowGraph, WindowGraph, all_lagged_nodes)
from .stats import Dataset

log = logging.getLogger(__name__)


@dataclass
class PruneState:
    """Lagged candidate parents per target and the running minimum of the
    absolute test statistic per (candidate, target) pair."""

    B_hat: dict[int, list[LaggedNode]] = field(default_factory=dict)
    I_min: dict[tuple[LaggedNode, LaggedNode], float] = field(default_factory=dict)

    def update(self, x: LaggedNode, y: LaggedNode, stat: float) -> None:
        key = (x, y)
        self.I_min[key] = min(abs(stat), self.I_min.get(key, math.inf))

    def strength(self, x: LaggedNode, y: LaggedNode) -> float:
        return self.I_min.get((x, y), math.inf)


def _check(gamma, alpha):
    if gamma < 1:
        raise ValueError("gamma must be >= 1")
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")


class _Instantaneous:
    """Mutable instantaneous edge set, oriented by an order or undirected."""

    def __init__(self, d: int, order: CausalOrder | None):
        self.order = order
        if order is not None:
            pos = order.position()
            if set(pos) != set(range(d)):
                raise ValueError("causal order must cover every variable")
            self.edges = {(a, b) for a in range(d) for b in range(d) if a != b and pos[a] < pos[b]}
        else:
            self.edges = {(a, b) for a in range(d) for b in range(a + 1, d)}

    def _key(self, x: int, y: int):
        if self.order is not None:
            return (x, y)
        return (min(x, y), max(x, y))

    def has(self, x: int, y: int) -> bool:
        """Is there an edge usable as ``x -> y`` (or ``x - y``)?"""
        return self._key(x, y) in self.edges

    def remove(self, x: int, y: int) -> None:
        self.edges.discard(self._key(x, y))

    def get(self, y: int, d: int) -> list[int]:
        """Parents of ``y`` (order given) or its adjacencies."""
        return [x for x in range(d) if x != y and self.has(x, y)]


def rest_pcmci_plus(data: Dataset, gamma: int, alpha: float,
                    order: CausalOrder | None = None, ci: CITest | None = None,
                    state: PruneState | None = None) -> WindowGraph:
    """Restricted PCMCI+: lagged PC1 phase, then MCI-style pruning of all
    remaining lagged and instantaneous edges.

    Returns a :class:`WindowGraph` when ``order`` is given and a
    :class:`PartialWindowGraph` otherwise.
    """
    _check(gamma, alpha)
    d = data.d
    if ci is None:
        ci = ParCorrCI(data, max_lag=2 * gamma)
    state = state if state is not None else PruneState()
    lagged_all = all_lagged_nodes(d, gamma)

    # lagged phase: superset of lagged parents per target
    for y in range(d):
        Y = LaggedNode(y, 0)
        cand = list(lagged_all)
        n = 0
        while len(cand) - 1 >= n:
            marked = set()
            for x in cand:
                S = [z for z in cand if z != x][:n]
                r = ci(x, Y, S)
                state.update(x, Y, r.statistic)
                if r.p_value > alpha:
                    marked.add(x)
            cand = [x for x in cand if x not in marked]
            cand.sort(key=lambda x: -state.strength(x, Y))
            n += 1
        state.B_hat[y] = cand

    B = state.B_hat
    lagged = {y: list(B[y]) for y in range(d)}
    inst = _Instantaneous(d, order)
    mci = PruneState()

    def conditioning(x: LaggedNode, y: int, S) -> list[LaggedNode]:
        out = list(S)
        seen = set(out) | {x, LaggedNode(y, 0)}
        for z in itertools.chain(B[y], (b.shifted(x.lag) for b in B[x.var])):
            if z not in seen:
                seen.add(z)
                out.append(z)
        return out

    n = 0
    while True:
        tested_any = False
        removals: list[tuple[LaggedNode, int]] = []
        removed_pairs = set()
        for y in range(d):
            Y = LaggedNode(y, 0)
            get = [LaggedNode(v, 0) for v in inst.get(y, d)]
            get.sort(key=lambda z: -mci.strength(z, Y))
            incoming = list(lagged[y]) + [LaggedNode(v, 0) for v in inst.get(y, d)]
            for x in incoming:
                if x.lag == 0 and frozenset((x.var, y)) in removed_pairs:
                    continue
                pool = [z for z in get if z != x]
                if len(pool) < n:
                    continue
                tested_any = True
                for S in itertools.combinations(pool, n):
                    r = ci(x, Y, conditioning(x, y, S))
                    mci.update(x, Y, r.statistic)
                    if r.p_value > alpha:
                        removals.append((x, y))
                        if x.lag == 0:
                            removed_pairs.add(frozenset((x.var, y)))
                        break
        for x, y in removals:
            if x.lag == 0:
                inst.remove(x.var, y)
            elif x in lagged[y]:
                lagged[y].remove(x)
        if not tested_any:
            break
        n += 1

    lagged_edges = {(x.var, x.lag, y) for y in range(d) for x in lagged[y]}
    if order is not None:
        return WindowGraph(gamma, data.names, lagged_edges, inst.edges)
    return PartialWindowGraph(gamma, data.names, lagged_edges, frozenset(), inst.edges)


def rest_pcgce(data: Dataset, gamma: int, alpha: float,
               order: CausalOrder | None = None, ci: CITest | None = None) -> ExtendedGraph:
    """Restricted PCGCE over present nodes and one past-block node per variable.

    For each conditioning-set size all statistics are computed first, then
    the candidate tests are run from the weakest statistic upwards; a cached
    entry is skipped once its edge is gone or its conditioning set is no
    longer contained in the target's current parents/adjacencies.
    """
    _check(gamma, alpha)
    d = data.d
    if ci is None:
        ci = ParCorrCI(data, max_lag=gamma, block_lags=gamma)
    lagged = {(x, y) for x in range(d) for y in range(d)}
    inst = _Instantaneous(d, order)

    def has_edge(x: LaggedNode, y: int) -> bool:
        if x.is_block:
            return (x.var, y) in lagged
        return inst.has(x.var, y)

    def get(y: int) -> list[LaggedNode]:
        return ([LaggedNode.past(x) for x in range(d) if (x, y) in lagged]
                + [LaggedNode(x, 0) for x in inst.get(y, d)])

    n = 0
    while True:
        entries = []
        for y in range(d):
            Y = LaggedNode(y, 0)
            adj = get(y)
            for x in adj:
                pool = [z for z in adj if z != x]
                if len(pool) < n:
                    continue
                for S in itertools.combinations(pool, n):
                    h = ci(x, Y, S, pvalue=False).statistic
                    entries.append((abs(h), len(entries), x, y, S))
        if not entries:
            break
        entries.sort(key=lambda e: (e[0], e[1]))
        for _, _, x, y, S in entries:
            if not has_edge(x, y):
                continue
            current = set(get(y))
            if not set(S) <= current:
                continue
            if ci(x, LaggedNode(y, 0), S).p_value > alpha:
                if x.is_block:
                    lagged.discard((x.var, y))
                else:
                    inst.remove(x.var, y)
        n += 1

    if order is not None:
        return ExtendedGraph(data.names, lagged, inst.edges)
    return PartialExtendedGraph(data.names, lagged, frozenset(), inst.edges)
