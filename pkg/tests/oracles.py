"""Slow, obviously-correct reference implementations used by the tests."""
import itertools
from collections import defaultdict


def simple_cycles_undirected(edges):
    """Every simple cycle (>= 3 nodes) of an undirected graph, as edge sets."""
    adj = defaultdict(set)
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    found = set()

    def dfs(start, node, path, seen):
        for nxt in adj[node]:
            if nxt == start and len(path) >= 3:
                cyc = frozenset(frozenset(e) for e in zip(path, path[1:] + [start]))
                found.add(cyc)
            elif nxt not in seen and nxt > start:
                seen.add(nxt)
                path.append(nxt)
                dfs(start, nxt, path, seen)
                path.pop()
                seen.discard(nxt)

    for s in sorted(adj):
        dfs(s, s, [s], {s})
    return [{tuple(sorted(e)) for e in c} for c in found]


def merge_sharing(sets):
    groups = [set(s) for s in sets]
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(groups)), 2):
            if groups[i] & groups[j]:
                groups[i] |= groups.pop(j)
                changed = True
                break
    return groups


def components(edges):
    groups = [{e} for e in edges]
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(groups)), 2):
            vi = {v for e in groups[i] for v in e}
            vj = {v for e in groups[j] for v in e}
            if vi & vj:
                groups[i] |= groups.pop(j)
                changed = True
                break
    return groups


def brute_groups(edges):
    edges = {tuple(sorted(e)) for e in edges}
    cyc = merge_sharing(simple_cycles_undirected(edges))
    covered = set().union(*cyc) if cyc else set()
    return sorted((frozenset(g) for g in cyc + components(edges - covered)), key=sorted)


def descendants(parents, node):
    children = defaultdict(set)
    for c, ps in parents.items():
        for p in ps:
            children[p].add(c)
    out, stack = set(), [node]
    while stack:
        u = stack.pop()
        for c in children[u]:
            if c not in out:
                out.add(c)
                stack.append(c)
    return out


def d_separated_paths(parents, x, y, cond):
    """d-separation by enumerating every simple path of the skeleton."""
    adj = defaultdict(set)
    for c, ps in parents.items():
        for p in ps:
            adj[c].add(p)
            adj[p].add(c)
    cond = set(cond)

    def active(path):
        for i in range(1, len(path) - 1):
            a, b, c = path[i - 1], path[i], path[i + 1]
            collider = a in parents[b] and c in parents[b]
            if collider:
                if b not in cond and not (descendants(parents, b) & cond):
                    return False
            elif b in cond:
                return False
        return True

    def walk(path):
        u = path[-1]
        if u == y:
            return active(path)
        return any(walk(path + [v]) for v in adj[u] if v not in path)

    return not walk([x])
