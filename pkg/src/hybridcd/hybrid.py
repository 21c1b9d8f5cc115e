"""NBCB (order first, then prune) and CBNB (prune first, then order each
undirected cycle group), each in a window (-w) and an extended (-e) variant."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .citest import CITest, ParCorrCI
from .graph import (CausalOrder, ExtendedGraph, LaggedNode, SummaryGraph, WindowGraph,
                    all_lagged_nodes, find_ucgs, orient_group, scg_from, to_json,
                    with_instantaneous)
from .restcb import rest_pcgce, rest_pcmci_plus
from .restnb import rest_vlingam
from .stats import Dataset, DegenerateSeriesError

log = logging.getLogger(__name__)

Orderer = Callable[[Iterable[int], Iterable[LaggedNode]], CausalOrder]

VARIANTS = ("window", "extended")
METHODS = {
    "nbcb-w": ("nbcb", "window"),
    "nbcb-e": ("nbcb", "extended"),
    "cbnb-w": ("cbnb", "window"),
    "cbnb-e": ("cbnb", "extended"),
}


@dataclass(frozen=True)
class DiscoveryConfig:
    gamma: int = 5
    alpha: float = 0.05
    variant: str = "window"
    ci_test: str = "parcorr"
    order_tiebreak: str = "index"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.ci_test != "parcorr":
            raise ValueError(f"unknown CI test {self.ci_test!r}")
        if self.order_tiebreak != "index":
            raise ValueError(f"unknown tie-break policy {self.order_tiebreak!r}")
        if self.gamma < 1 or not 0 < self.alpha < 1:
            raise ValueError("need gamma >= 1 and 0 < alpha < 1")


@dataclass
class DiscoveryResult:
    scg: SummaryGraph
    detail: WindowGraph | ExtendedGraph
    order_log: list[CausalOrder] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        names = self.detail.names
        return {
            "scg": to_json(self.scg),
            "detail": to_json(self.detail),
            "orders": [[names[v] for v in o] for o in self.order_log],
            "diagnostics": self.diagnostics,
        }


def _prepare(data: Dataset, cfg: DiscoveryConfig) -> Dataset:
    data.warn_if_short(cfg.gamma)
    return data.standardized()


def _default_ci(data: Dataset, cfg: DiscoveryConfig) -> CITest:
    if cfg.variant == "window":
        return ParCorrCI(data, max_lag=2 * cfg.gamma)
    return ParCorrCI(data, max_lag=cfg.gamma, block_lags=cfg.gamma)


def _default_orderer(data: Dataset, cfg: DiscoveryConfig) -> Orderer:
    def order(variables, past):
        return rest_vlingam(data, cfg.gamma, cfg.alpha, variables, past)
    return order


def _rest_cb(data, cfg, order, ci):
    if cfg.variant == "window":
        return rest_pcmci_plus(data, cfg.gamma, cfg.alpha, order, ci=ci)
    return rest_pcgce(data, cfg.gamma, cfg.alpha, order, ci=ci)


def nbcb(data: Dataset, cfg: DiscoveryConfig = DiscoveryConfig(),
         ci: CITest | None = None, orderer: Orderer | None = None) -> DiscoveryResult:
    """Order all present nodes with the restricted noise-based step, then
    prune the order-oriented complete graph with the constraint-based step.

    ``ci`` and ``orderer`` replace the data-driven test and ordering (used to
    plug in population oracles).
    """
    t0 = time.perf_counter()
    data = _prepare(data, cfg)
    ci = ci or _default_ci(data, cfg)
    orderer = orderer or _default_orderer(data, cfg)
    order = orderer(range(data.d), all_lagged_nodes(data.d, cfg.gamma))
    detail = _rest_cb(data, cfg, order, ci)
    return DiscoveryResult(
        scg_from(detail), detail, [order],
        {"n_tests": getattr(ci, "n_tests", None), "seconds": time.perf_counter() - t0,
         "unoriented": 0},
    )


def lagged_parents(g, nodes: Iterable[LaggedNode]) -> list[LaggedNode]:
    want = {n.var for n in nodes}
    if isinstance(g, WindowGraph):
        return sorted({LaggedNode(s, l) for s, l, t in g.lagged if t in want})
    return sorted({LaggedNode.past(s) for s, t in g.lagged if t in want})


def cbnb(data: Dataset, cfg: DiscoveryConfig = DiscoveryConfig(),
         ci: CITest | None = None, orderer: Orderer | None = None) -> DiscoveryResult:
    """Prune first (no order), then orient each undirected cycle group with
    an order found among the group's nodes given their lagged parents.

    A group whose ordering fails keeps its edges unoriented; the failure is
    recorded in ``diagnostics['failed_groups']``.
    """
    t0 = time.perf_counter()
    data = _prepare(data, cfg)
    ci = ci or _default_ci(data, cfg)
    orderer = orderer or _default_orderer(data, cfg)
    partial = _rest_cb(data, cfg, None, ci)
    groups = find_ucgs(partial)
    orders = []
    failed = []
    g = partial
    for c in groups:
        past = lagged_parents(partial, c.nodes)
        try:
            o = orderer(c.variables, past)
        except (DegenerateSeriesError, ValueError) as exc:
            log.warning("ordering failed for group %s: %s", c.variables, exc)
            failed.append({"variables": [data.names[v] for v in c.variables], "error": str(exc)})
            continue
        orders.append(o)
        g = orient_group(g, c, o)
    g = with_instantaneous(g, g.inst, g.unoriented)
    return DiscoveryResult(
        scg_from(g), g, orders,
        {"n_tests": getattr(ci, "n_tests", None), "seconds": time.perf_counter() - t0,
         "n_groups": len(groups), "failed_groups": failed,
         "unoriented": len(g.unoriented)},
    )


def discover(method: str, data: Dataset, cfg: DiscoveryConfig | None = None,
             **kw) -> DiscoveryResult:
    """Run one of ``nbcb-w``, ``nbcb-e``, ``cbnb-w``, ``cbnb-e``."""
    try:
        algo, variant = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}") from None
    cfg = cfg or DiscoveryConfig()
    cfg = DiscoveryConfig(cfg.gamma, cfg.alpha, variant, cfg.ci_test, cfg.order_tiebreak)
    return (nbcb if algo == "nbcb" else cbnb)(data, cfg, **kw)
