"""Restricted VAR-LiNGAM: causal order of a subset of present-slice nodes."""
from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from .graph import CausalOrder, LaggedNode
from .stats import Dataset, independence_measure, residualize_on_past

Measure = Callable[[np.ndarray, np.ndarray], float]


def _expand_past(past: Iterable[LaggedNode], gamma: int) -> list[tuple[int, int]]:
    out = set()
    for p in past:
        if p.is_block:
            out |= {(p.var, l) for l in range(1, gamma + 1)}
        elif p.lag < 1:
            raise ValueError(f"past node {p} is not lagged")
        else:
            out.add((p.var, p.lag))
    return sorted(out)


def _regress_out(target: np.ndarray, on: np.ndarray) -> np.ndarray:
    c = np.cov(target, on, bias=True)[0, 1]
    return target - c / np.var(on) * on


def rest_vlingam(data: Dataset, gamma: int, alpha: float, I_t: Iterable[int],
                 P: Iterable[LaggedNode] = (), measure: Measure = independence_measure
                 ) -> CausalOrder:
    """Causal order of the variables ``I_t`` at time t.

    Each variable is first residualized on the lagged nodes ``P`` (past-block
    nodes expand to lags ``1..gamma``).  Then, repeatedly, the candidate whose
    residual is most independent of what remains of the others after a
    simple regression on it is appended to the order and regressed out.
    Ties go to the smallest variable index.  ``alpha`` is unused: no
    hypothesis test is performed here.
    """
    nodes = sorted(set(I_t))
    if not nodes:
        raise ValueError("rest_vlingam: empty set of variables")
    if len(nodes) == 1:
        return CausalOrder(nodes)
    past = _expand_past(P, gamma)
    xi = {v: residualize_on_past(data, v, past, gamma) for v in nodes}
    remaining = list(nodes)
    order = []
    while len(remaining) > 1:
        scores = []
        for x in remaining:
            h = 0.0
            for y in remaining:
                if y != x:
                    h += measure(xi[x], _regress_out(xi[y], xi[x]))
            scores.append(h)
        best = remaining[int(np.argmin(scores))]
        order.append(best)
        remaining.remove(best)
        for y in remaining:
            xi[y] = _regress_out(xi[y], xi[best])
    order.append(remaining[0])
    return CausalOrder(order)
