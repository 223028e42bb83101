"""Undirected forest of partially saturated edges and flow re-distribution.

Shared by the candidate search for loose edges and by the acyclic sparse
maximum flow.  Edges are only ever compared against the flow they had when
inserted, so callers decide whether to rewrite flows.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .graph import FlowNetwork, VitalCutError


class CycleError(VitalCutError):
    pass


class _DisjointSets:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


class FlowCycleForest:
    """Undirected forest over vertices; edges carry original edge ids.

    Union-find answers "same tree?" in near-constant time and a breadth-first
    walk extracts the tree path when an insertion closes a cycle.
    """

    def __init__(self, net: FlowNetwork):
        self.net = net
        self.adj: list[dict[int, int]] = [dict() for _ in range(net.n)]
        self.edge_ids: set[int] = set()
        self._sets = _DisjointSets(net.n)

    def __len__(self) -> int:
        return len(self.edge_ids)

    def __contains__(self, e: int) -> bool:
        return e in self.edge_ids

    def _path(self, a: int, b: int) -> list[int]:
        """Edge ids on the tree path from a to b."""
        prev = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            if x == b:
                break
            for e, y in self.adj[x].items():
                if y not in prev:
                    prev[y] = (x, e)
                    queue.append(y)
        if b not in prev:
            raise CycleError("forest path requested across components")
        out = []
        x = b
        while prev[x] is not None:
            x, e = prev[x]
            out.append(e)
        out.reverse()
        return out

    def insert(self, e: int) -> list[int] | None:
        """Add edge e.  If it closes a cycle, return the cycle (e first) and add nothing."""
        u, v = self.net.tails[e], self.net.heads[e]
        if self._sets.find(u) == self._sets.find(v):
            return [e] + self._path(v, u)
        self._link(e)
        self._sets.union(u, v)
        return None

    def _link(self, e: int) -> None:
        u, v = self.net.tails[e], self.net.heads[e]
        self.adj[u][e] = v
        self.adj[v][e] = u
        self.edge_ids.add(e)

    def add_closing(self, e: int) -> None:
        """Link e after the caller evicted another edge of its cycle."""
        self._link(e)

    def remove(self, e: int, *, keeps_connectivity: bool = False) -> None:
        u, v = self.net.tails[e], self.net.heads[e]
        del self.adj[u][e]
        del self.adj[v][e]
        self.edge_ids.discard(e)
        if not keeps_connectivity:
            self.rebuild_sets()

    def rebuild_sets(self) -> None:
        self._sets = _DisjointSets(self.net.n)
        for e in self.edge_ids:
            self._sets.union(self.net.tails[e], self.net.heads[e])


def cycle_signs(net: FlowNetwork, cycle: Sequence[int]) -> dict[int, int]:
    """Orientation of each edge along one traversal of an undirected cycle.

    +1 means the traversal follows the edge from tail to head.
    """
    if len(cycle) < 2 or len(set(cycle)) != len(cycle):
        raise CycleError("not a cycle")
    incident: dict[int, list[int]] = {}
    for e in cycle:
        for x in (net.tails[e], net.heads[e]):
            incident.setdefault(x, []).append(e)
    if any(len(es) != 2 for es in incident.values()):
        raise CycleError("not a simple cycle")
    signs: dict[int, int] = {}
    e = cycle[0]
    x = net.heads[e]
    signs[e] = 1
    start = net.tails[e]
    while x != start:
        a, b = incident[x]
        nxt = b if a == e else a
        if nxt in signs:
            raise CycleError("not a simple cycle")
        if net.tails[nxt] == x:
            signs[nxt] = 1
            x = net.heads[nxt]
        else:
            signs[nxt] = -1
            x = net.tails[nxt]
        e = nxt
    if len(signs) != len(cycle):
        raise CycleError("edges do not form one cycle")
    return signs


def pick_non_loose(flows: Sequence[int], caps: Sequence[int], cycle: Sequence[int]):
    """Edge of a partial cycle that a circulation can zero or saturate.

    Returns (edge, zeroing).  Ties between the two minima prefer zeroing;
    ties inside a minimum go to the smallest edge id.
    """
    by_id = sorted(cycle)
    f_min_edge = min(by_id, key=lambda e: flows[e])
    c_min_edge = min(by_id, key=lambda e: caps[e] - flows[e])
    if flows[f_min_edge] <= caps[c_min_edge] - flows[c_min_edge]:
        return f_min_edge, True
    return c_min_edge, False


def redistribute(net: FlowNetwork, flows: Sequence[int], cycle: Sequence[int]):
    """Push a circulation around a partial cycle; returns (target edge, new flows)."""
    caps = net.eff_caps
    for e in cycle:
        if not 0 < flows[e] < caps[e]:
            raise CycleError(f"edge {e} is not partially saturated")
    signs = cycle_signs(net, cycle)
    target, zeroing = pick_non_loose(flows, caps, cycle)
    if zeroing:
        delta = -signs[target] * flows[target]
    else:
        delta = signs[target] * (caps[target] - flows[target])
    new = list(flows)
    for e, sign in signs.items():
        new[e] += sign * delta
    return target, new
