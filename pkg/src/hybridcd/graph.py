"""Causal graph abstractions for multivariate time series.

Variables are referred to by their integer index into ``names``.  Edges that
repeat through time are stored once:

* window graph (WCG): lagged edges ``(src, lag, dst)`` meaning
  ``src_{t-lag} -> dst_t`` and instantaneous edges ``(src, dst)``;
* extended summary graph (ECG): lagged edges ``(src, dst)`` meaning
  ``src_{t-} -> dst_t`` plus instantaneous edges;
* summary graph (SCG): directed edges between variables, self loops kept apart.

The ``Partial*`` variants carry unoriented instantaneous edges as sorted
pairs ``(a, b)`` with ``a < b``.
"""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

PAST = -1  # lag marker of an ECG past-block node X_{t-}


class GraphError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class LaggedNode:
    """Node ``var_{t-lag}``; ``lag == PAST`` stands for the whole past block."""

    var: int
    lag: int = 0

    @classmethod
    def past(cls, var: int) -> "LaggedNode":
        return cls(var, PAST)

    @property
    def is_block(self) -> bool:
        return self.lag == PAST

    @property
    def is_present(self) -> bool:
        return self.lag == 0

    def shifted(self, by: int) -> "LaggedNode":
        if self.is_block:
            raise GraphError("cannot shift a past-block node")
        return LaggedNode(self.var, self.lag + by)

    def label(self, names: Sequence[str]) -> str:
        name = names[self.var]
        if self.lag == 0:
            return f"{name}_t"
        if self.is_block:
            return f"{name}_t-"
        return f"{name}_t-{self.lag}"


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _is_acyclic(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    indeg = [0] * n
    out = defaultdict(list)
    for a, b in edges:
        out[a].append(b)
        indeg[b] += 1
    queue = deque(i for i in range(n) if indeg[i] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for v in out[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return seen == n


def topological_order(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Kahn's algorithm, ties broken by smallest index."""
    import heapq

    indeg = [0] * n
    out = defaultdict(list)
    for a, b in edges:
        out[a].append(b)
        indeg[b] += 1
    heap = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in out[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    if len(order) != n:
        raise GraphError("instantaneous subgraph has a cycle")
    return order


def _check_names(names: Sequence[str]) -> None:
    if len(set(names)) != len(names):
        raise GraphError(f"variable names must be unique: {list(names)}")


def _check_inst(d: int, inst, unoriented, *, partial: bool) -> None:
    for a, b in inst:
        if a == b:
            raise GraphError("instantaneous self edge")
        if not (0 <= a < d and 0 <= b < d):
            raise GraphError(f"edge ({a}, {b}) outside variable range")
    if len({_pair(a, b) for a, b in inst}) != len(inst):
        raise GraphError("both orientations of an instantaneous edge present")
    for a, b in unoriented:
        if not a < b or b >= d or a < 0:
            raise GraphError(f"unoriented edge ({a}, {b}) must be a sorted in-range pair")
    if {_pair(a, b) for a, b in inst} & set(unoriented):
        raise GraphError("edge is both oriented and unoriented")
    if not _is_acyclic(d, inst):
        raise GraphError("instantaneous subgraph has a cycle")


@dataclass(frozen=True)
class WindowGraph:
    gamma: int
    names: tuple[str, ...]
    lagged: frozenset[tuple[int, int, int]] = frozenset()
    inst: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "lagged", frozenset(self.lagged))
        object.__setattr__(self, "inst", frozenset(self.inst))
        if self.gamma < 1:
            raise GraphError("gamma must be >= 1")
        _check_names(self.names)
        d = len(self.names)
        for src, lag, dst in self.lagged:
            if not 1 <= lag <= self.gamma:
                raise GraphError(f"lag {lag} outside 1..{self.gamma}")
            if not (0 <= src < d and 0 <= dst < d):
                raise GraphError("lagged edge outside variable range")
        _check_inst(d, self.inst, self.unoriented, partial=self.is_partial)

    unoriented = frozenset()

    @property
    def d(self) -> int:
        return len(self.names)

    @property
    def is_partial(self) -> bool:
        return False

    def parents(self, node: LaggedNode) -> set[LaggedNode]:
        """Parents of a present-slice node (lagged and instantaneous)."""
        if node.lag != 0:
            raise GraphError("parents() is defined for present-slice nodes")
        out = {LaggedNode(s, l) for s, l, t in self.lagged if t == node.var}
        out |= {LaggedNode(s, 0) for s, t in self.inst if t == node.var}
        return out


@dataclass(frozen=True)
class PartialWindowGraph(WindowGraph):
    unoriented: frozenset[tuple[int, int]] = field(default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "unoriented", frozenset(_pair(a, b) for a, b in self.unoriented))
        super().__post_init__()

    @property
    def is_partial(self) -> bool:
        return True


@dataclass(frozen=True)
class ExtendedGraph:
    names: tuple[str, ...]
    lagged: frozenset[tuple[int, int]] = frozenset()
    inst: frozenset[tuple[int, int]] = frozenset()

    unoriented = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "lagged", frozenset(self.lagged))
        object.__setattr__(self, "inst", frozenset(self.inst))
        _check_names(self.names)
        d = len(self.names)
        for src, dst in self.lagged:
            if not (0 <= src < d and 0 <= dst < d):
                raise GraphError("lagged edge outside variable range")
        _check_inst(d, self.inst, self.unoriented, partial=self.is_partial)

    @property
    def d(self) -> int:
        return len(self.names)

    @property
    def is_partial(self) -> bool:
        return False

    def parents(self, node: LaggedNode) -> set[LaggedNode]:
        if node.lag != 0:
            raise GraphError("parents() is defined for present-slice nodes")
        out = {LaggedNode.past(s) for s, t in self.lagged if t == node.var}
        out |= {LaggedNode(s, 0) for s, t in self.inst if t == node.var}
        return out


@dataclass(frozen=True)
class PartialExtendedGraph(ExtendedGraph):
    unoriented: frozenset[tuple[int, int]] = field(default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "unoriented", frozenset(_pair(a, b) for a, b in self.unoriented))
        super().__post_init__()

    @property
    def is_partial(self) -> bool:
        return True


@dataclass(frozen=True)
class SummaryGraph:
    names: tuple[str, ...]
    edges: frozenset[tuple[int, int]] = frozenset()
    self_loops: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "edges", frozenset(self.edges))
        object.__setattr__(self, "self_loops", frozenset(self.self_loops))
        _check_names(self.names)
        d = len(self.names)
        for a, b in self.edges:
            if a == b:
                raise GraphError("self loops belong in self_loops")
            if not (0 <= a < d and 0 <= b < d):
                raise GraphError("edge outside variable range")

    @property
    def d(self) -> int:
        return len(self.names)

    def bidirected(self) -> set[tuple[int, int]]:
        return {(a, b) for a, b in self.edges if a < b and (b, a) in self.edges}

    def __str__(self) -> str:
        n = self.names
        parts = []
        for a, b in sorted(self.edges):
            if (b, a) in self.edges:
                if a < b:
                    parts.append(f"{n[a]}<->{n[b]}")
            else:
                parts.append(f"{n[a]}->{n[b]}")
        parts += [f"{n[v]}->{n[v]}" for v in sorted(self.self_loops)]
        return ", ".join(parts)


@dataclass(frozen=True)
class UndirectedCycleGroup:
    nodes: frozenset[LaggedNode]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        vars_ = {n.var for n in self.nodes}
        for a, b in self.edges:
            if a not in vars_ or b not in vars_:
                raise GraphError("group edge endpoint outside group nodes")

    @property
    def variables(self) -> list[int]:
        return sorted(n.var for n in self.nodes)


@dataclass(frozen=True)
class CausalOrder:
    nodes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if len(set(self.nodes)) != len(self.nodes):
            raise GraphError("causal order has duplicates")

    def position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


# ---------------------------------------------------------------- deductions

def ecg_from_wcg(g: WindowGraph) -> ExtendedGraph:
    lagged = {(s, t) for s, _, t in g.lagged}
    if g.is_partial:
        return PartialExtendedGraph(g.names, lagged, g.inst, g.unoriented)
    return ExtendedGraph(g.names, lagged, g.inst)


def _collapse(names, lagged_pairs, inst, unoriented) -> SummaryGraph:
    edges = set()
    loops = set()
    for s, t in lagged_pairs:
        if s == t:
            loops.add(s)
        else:
            edges.add((s, t))
    edges |= set(inst)
    for a, b in unoriented:
        # an unoriented instantaneous edge could point either way
        edges |= {(a, b), (b, a)}
    return SummaryGraph(names, edges, loops)


def scg_from_wcg(g: WindowGraph) -> SummaryGraph:
    return _collapse(g.names, {(s, t) for s, _, t in g.lagged}, g.inst, g.unoriented)


def scg_from_ecg(g: ExtendedGraph) -> SummaryGraph:
    return _collapse(g.names, g.lagged, g.inst, g.unoriented)


def scg_from(g: WindowGraph | ExtendedGraph) -> SummaryGraph:
    if isinstance(g, WindowGraph):
        return scg_from_wcg(g)
    return scg_from_ecg(g)


def pcpo_of(g: WindowGraph | ExtendedGraph):
    """Forget the orientation of every instantaneous edge."""
    unoriented = {_pair(a, b) for a, b in g.inst}
    if isinstance(g, WindowGraph):
        return PartialWindowGraph(g.gamma, g.names, g.lagged, frozenset(), unoriented)
    return PartialExtendedGraph(g.names, g.lagged, frozenset(), unoriented)


def with_instantaneous(g, inst, unoriented):
    """Copy of ``g`` with replaced instantaneous edges; drops to the full type
    when nothing is left unoriented."""
    if isinstance(g, WindowGraph):
        if unoriented:
            return PartialWindowGraph(g.gamma, g.names, g.lagged, inst, unoriented)
        return WindowGraph(g.gamma, g.names, g.lagged, inst)
    if unoriented:
        return PartialExtendedGraph(g.names, g.lagged, inst, unoriented)
    return ExtendedGraph(g.names, g.lagged, inst)


# ------------------------------------------------------------ cycle groups

def paton_cycle_basis(adj: dict[int, set[int]]) -> list[list[int]]:
    """Fundamental cycle basis of an undirected simple graph (Paton 1969).

    Grows a spanning tree from each unvisited root; every non-tree edge met
    while scanning closes exactly one fundamental cycle.  Cycles are returned
    as node lists without repeating the first node.
    """
    cycles = []
    unvisited = set(adj)
    while unvisited:
        root = min(unvisited)
        stack = [root]
        pred = {root: root}
        used = {root: set()}
        while stack:
            z = stack.pop()
            unvisited.discard(z)
            for nbr in sorted(adj[z]):
                if nbr not in used:
                    pred[nbr] = z
                    stack.append(nbr)
                    used[nbr] = {z}
                elif nbr == z:
                    cycles.append([z])
                elif nbr not in used[z]:
                    # nbr already in the tree: walk from z up to the nbr's branch point
                    pn = used[nbr]
                    cycle = [nbr, z]
                    p = pred[z]
                    while p not in pn:
                        cycle.append(p)
                        p = pred[p]
                    cycle.append(p)
                    cycles.append(cycle)
                    used[nbr].add(z)
        unvisited -= set(pred)
    return cycles


def _cycle_edges(cycle: Sequence[int]) -> set[tuple[int, int]]:
    return {_pair(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))}


def _components(edges: Iterable[tuple[int, int]]) -> list[set[tuple[int, int]]]:
    adj = defaultdict(set)
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    comp_of = {}
    for start in sorted(adj):
        if start in comp_of:
            continue
        comp_of[start] = start
        queue = [start]
        while queue:
            u = queue.pop()
            for v in adj[u]:
                if v not in comp_of:
                    comp_of[v] = start
                    queue.append(v)
    groups = defaultdict(set)
    for a, b in edges:
        groups[comp_of[a]].add((a, b))
    return [groups[k] for k in sorted(groups)]


def _merge_edge_sets(sets: list[set[tuple[int, int]]]) -> list[set[tuple[int, int]]]:
    """Transitive closure of 'shares at least one edge'."""
    parent = list(range(len(sets)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner = {}
    for i, s in enumerate(sets):
        for e in s:
            if e in owner:
                parent[find(i)] = find(owner[e])
            else:
                owner[e] = i
    merged = defaultdict(set)
    for i, s in enumerate(sets):
        merged[find(i)] |= s
    return list(merged.values())


def group_unoriented_edges(unoriented: Iterable[tuple[int, int]],
                           cycles: list[list[int]]) -> list[set[tuple[int, int]]]:
    """Merge cycles sharing an edge, then put the remaining (cycle-free)
    edges into one group per connected component."""
    unoriented = {_pair(a, b) for a, b in unoriented}
    groups = _merge_edge_sets([_cycle_edges(c) for c in cycles if len(c) >= 3])
    covered = set().union(*groups) if groups else set()
    groups += _components(unoriented - covered)
    return sorted(groups, key=lambda s: sorted(s))


def find_ucgs(g: PartialWindowGraph | PartialExtendedGraph) -> list[UndirectedCycleGroup]:
    """Undirected cycle groups of the unoriented instantaneous subgraph.

    Edges lying on a common undirected cycle (transitively, through shared
    edges) form one group; unoriented edges that lie on no cycle are grouped
    by connected component.  The groups partition the unoriented edges.
    """
    if not g.unoriented:
        return []
    adj = defaultdict(set)
    for a, b in g.unoriented:
        adj[a].add(b)
        adj[b].add(a)
    cycles = paton_cycle_basis(dict(adj))
    out = []
    for edges in group_unoriented_edges(g.unoriented, cycles):
        nodes = frozenset(LaggedNode(v, 0) for e in edges for v in e)
        out.append(UndirectedCycleGroup(nodes, frozenset(edges)))
    return out


def orient_group(g, c: UndirectedCycleGroup, order: CausalOrder):
    """Orient every unoriented edge of ``c`` from earlier to later in ``order``."""
    pos = order.position()
    missing = [n.var for n in c.nodes if n.var not in pos]
    if missing:
        raise GraphError(f"incomplete order: variables {sorted(missing)} not ordered")
    inst = set(g.inst)
    unoriented = set(g.unoriented)
    for a, b in c.edges:
        if (a, b) not in unoriented:
            continue
        unoriented.discard((a, b))
        inst.add((a, b) if pos[a] < pos[b] else (b, a))
    return with_instantaneous(g, inst, unoriented)


# ------------------------------------------------------------ d-separation

def unroll(g: WindowGraph, horizon: int | None = None) -> dict[LaggedNode, set[LaggedNode]]:
    """Parent map of the window graph repeated over lags ``0..horizon``."""
    if horizon is None:
        horizon = 2 * g.gamma
    parents: dict[LaggedNode, set[LaggedNode]] = {
        LaggedNode(v, k): set() for v in range(g.d) for k in range(horizon + 1)
    }
    for k in range(horizon + 1):
        for s, lag, t in g.lagged:
            if k + lag <= horizon:
                parents[LaggedNode(t, k)].add(LaggedNode(s, k + lag))
        for s, t in g.inst:
            parents[LaggedNode(t, k)].add(LaggedNode(s, k))
    return parents


def d_separated_sets(parents: dict[LaggedNode, set[LaggedNode]],
                     xs: Iterable[LaggedNode], ys: Iterable[LaggedNode],
                     cond: Iterable[LaggedNode]) -> bool:
    """Reachability ('Bayes ball') test on a DAG given as a parent map."""
    xs, ys, cond = set(xs), set(ys), set(cond)
    for n in xs | ys | cond:
        if n not in parents:
            raise GraphError(f"node {n} outside the unrolled graph")
    children = defaultdict(set)
    for child, ps in parents.items():
        for p in ps:
            children[p].add(child)
    # ancestors of the conditioning set (collider activation)
    anc = set()
    stack = list(cond)
    while stack:
        u = stack.pop()
        if u in anc:
            continue
        anc.add(u)
        stack.extend(parents[u])
    # states: (node, arrived_from_child) ; True = travelling up
    visited = set()
    stack = [(x, True) for x in xs]
    while stack:
        node, up = stack.pop()
        if (node, up) in visited:
            continue
        visited.add((node, up))
        if node in ys and node not in cond:
            return False
        if up and node not in cond:
            stack.extend((p, True) for p in parents[node])
            stack.extend((c, False) for c in children[node])
        elif not up:
            if node not in cond:
                stack.extend((c, False) for c in children[node])
            if node in anc:
                stack.extend((p, True) for p in parents[node])
    return True


def d_separated(g: WindowGraph, x: LaggedNode, y: LaggedNode,
                S: Iterable[LaggedNode] = (), horizon: int | None = None) -> bool:
    """d-separation of ``x`` and ``y`` given ``S`` in the unrolled window graph."""
    S = set(S)
    if x in S or y in S:
        raise GraphError("x and y must not be in the conditioning set")
    return d_separated_sets(unroll(g, horizon), {x}, {y}, S)


# ------------------------------------------------------------ serialization

def _graph_kind(g) -> str:
    if isinstance(g, SummaryGraph):
        return "scg"
    if isinstance(g, WindowGraph):
        return "pcpo-wcg" if g.is_partial else "wcg"
    if isinstance(g, ExtendedGraph):
        return "pcpo-ecg" if g.is_partial else "ecg"
    raise TypeError(f"not a graph: {type(g).__name__}")


def to_json(g) -> dict:
    """Plain-dict form of any graph type; edges sorted by (src, dst, lag)."""
    n = g.names
    kind = _graph_kind(g)
    edges = []
    loops = []
    if kind == "scg":
        edges = [(a, b, None, True) for a, b in g.edges]
        loops = sorted(n[v] for v in g.self_loops)
    else:
        if isinstance(g, WindowGraph):
            edges += [(s, t, lag, True) for s, lag, t in g.lagged]
        else:
            edges += [(s, t, None, True) for s, t in g.lagged]
        edges += [(a, b, 0, True) for a, b in g.inst]
        edges += [(a, b, 0, False) for a, b in g.unoriented]
    edges.sort(key=lambda e: (n[e[0]], n[e[1]], -1 if e[2] is None else e[2]))
    return {
        "type": kind,
        "gamma": g.gamma if isinstance(g, WindowGraph) else None,
        "vars": list(n),
        "edges": [{"src": n[a], "dst": n[b], "lag": lag, "oriented": o} for a, b, lag, o in edges],
        "self_loops": loops,
    }


def from_json(obj: dict):
    names = list(obj["vars"])
    idx = {v: i for i, v in enumerate(names)}
    kind = obj["type"]
    try:
        edges = [(idx[e["src"]], idx[e["dst"]], e.get("lag"), e.get("oriented", True))
                 for e in obj["edges"]]
        loops = {idx[v] for v in obj.get("self_loops", [])}
    except KeyError as exc:
        raise GraphError(f"unknown variable {exc.args[0]!r} in graph edges") from None
    if kind == "scg":
        return SummaryGraph(names, {(a, b) for a, b, _, _ in edges}, loops)
    inst = {(a, b) for a, b, lag, o in edges if lag == 0 and o}
    unor = {_pair(a, b) for a, b, lag, o in edges if lag == 0 and not o}
    if kind in ("wcg", "pcpo-wcg"):
        lagged = {(a, lag, b) for a, b, lag, _ in edges if lag}
        if kind == "wcg":
            return WindowGraph(obj["gamma"], names, lagged, inst)
        return PartialWindowGraph(obj["gamma"], names, lagged, inst, unor)
    if kind in ("ecg", "pcpo-ecg"):
        lagged = {(a, b) for a, b, lag, _ in edges if lag is None}
        if kind == "ecg":
            return ExtendedGraph(names, lagged, inst)
        return PartialExtendedGraph(names, lagged, inst, unor)
    raise GraphError(f"unknown graph type {kind!r}")


def all_lagged_nodes(d: int, gamma: int) -> list[LaggedNode]:
    return [LaggedNode(v, lag) for lag in range(1, gamma + 1) for v in range(d)]


def present_nodes(d: int) -> list[LaggedNode]:
    return [LaggedNode(v, 0) for v in range(d)]


def subsets(items: Sequence, n: int):
    return itertools.combinations(items, n)
