"""DAG of all minimum (s,t)-cuts built from a maximum-flow residual graph.

Orientation: a DAG edge ``a -> b`` is a residual arc, so a cut that keeps
``a`` on the source side must keep ``b`` there too.  Edges therefore point
toward the source node.  The sink node has no incoming edge and comes first
in the topological order; the source node has no outgoing edge and comes
last.  A cut is stored by the DAG iff its node image is closed under
successors.

Node ids are normalized to topological positions, so two DAGs over the same
vertex set are equal exactly when ``node_of`` and ``edges`` agree.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .graph import FlowNetwork, VitalCutError
from .maxflow import max_flow, residual_reach_from, residual_reach_to


class PQError(VitalCutError):
    pass


@dataclass(frozen=True)
class TopoRecord:
    """Node map plus a sink-first order of the node ids."""

    num_nodes: int
    node_of: tuple
    topo: tuple
    origin: str = ""

    def to_json(self) -> dict:
        return {
            "num_nodes": self.num_nodes,
            "node_of": list(self.node_of),
            "topo": list(self.topo),
            "origin": self.origin,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TopoRecord":
        return cls(data["num_nodes"], tuple(data["node_of"]), tuple(data["topo"]), data.get("origin", ""))


@dataclass(frozen=True)
class PQDag:
    n: int
    s: int
    t: int
    node_of: tuple
    edges: tuple  # sorted (from_node, to_node, edge_id)
    origin: str = ""

    @property
    def num_nodes(self) -> int:
        return max(self.node_of) + 1

    @property
    def sink_node(self) -> int:
        return self.node_of[self.t]

    @property
    def source_node(self) -> int:
        return self.node_of[self.s]

    @property
    def topo(self) -> list[int]:
        return list(range(self.num_nodes))

    def nodes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for v, a in enumerate(self.node_of):
            out[a].append(v)
        return out

    def canonical(self) -> tuple:
        return (self.node_of, self.edges)

    def same_as(self, other: "PQDag") -> bool:
        return self.canonical() == other.canonical()

    def successors(self) -> list[set[int]]:
        out: list[set[int]] = [set() for _ in range(self.num_nodes)]
        for a, b, _ in self.edges:
            out[a].add(b)
        return out

    def predecessors(self) -> list[set[int]]:
        out: list[set[int]] = [set() for _ in range(self.num_nodes)]
        for a, b, _ in self.edges:
            out[b].add(a)
        return out

    def record(self) -> TopoRecord:
        return TopoRecord(self.num_nodes, self.node_of, tuple(range(self.num_nodes)), self.origin)

    def suffix_cut(self, k: int) -> frozenset:
        """Source side formed by the nodes at topological positions >= k."""
        if not 1 <= k < self.num_nodes:
            raise PQError("suffix must drop the sink node and keep the source node")
        return frozenset(v for v, a in enumerate(self.node_of) if a >= k)

    def to_json(self) -> dict:
        return {
            "nodes": self.nodes(),
            "edges": [list(x) for x in self.edges],
            "topo": self.topo,
            "s": self.s,
            "t": self.t,
            "origin": self.origin,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PQDag":
        nodes = data["nodes"]
        n = sum(len(x) for x in nodes)
        node_of = [0] * n
        for a, vs in enumerate(nodes):
            for v in vs:
                node_of[v] = a
        edges = [tuple(x) for x in data["edges"]]
        return _normalize(n, data["s"], data["t"], node_of, edges, data.get("origin", ""))


def _normalize(n: int, s: int, t: int, node_of: Sequence[int], edges: Iterable[tuple], origin: str) -> PQDag:
    """Relabel nodes by sink-first topological position (ties: smallest vertex)."""
    labels = sorted(set(node_of))
    index = {a: i for i, a in enumerate(labels)}
    node_of = [index[a] for a in node_of]
    k = len(labels)
    s_node, t_node = node_of[s], node_of[t]
    if s_node == t_node:
        raise PQError("source and sink share a node")
    least = [n] * k
    for v, a in enumerate(node_of):
        least[a] = min(least[a], v)
    succ: list[list[int]] = [[] for _ in range(k)]
    indeg = [0] * k
    arcs = []
    for a, b, e in edges:
        a, b = index[a], index[b]
        if a == b:
            continue
        arcs.append((a, b, e))
        succ[a].append(b)
        indeg[b] += 1

    def key(a: int) -> tuple:
        return (0 if a == t_node else 2 if a == s_node else 1, least[a], a)

    heap = [key(a) for a in range(k) if indeg[a] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, _, a = heapq.heappop(heap)
        order.append(a)
        for b in succ[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, key(b))
    if len(order) != k:
        raise PQError("node graph has a cycle")
    if order[0] != t_node or order[-1] != s_node:
        raise PQError("sink node must come first and source node last")
    pos = [0] * k
    for i, a in enumerate(order):
        pos[a] = i
    final_edges = tuple(sorted((pos[a], pos[b], e) for a, b, e in arcs))
    return PQDag(n, s, t, tuple(pos[a] for a in node_of), final_edges, origin)


def _residual_components(net: FlowNetwork, flows: Sequence[int], skip: set[int]) -> dict[int, int]:
    """Strongly connected components of the residual graph outside ``skip``."""
    caps = net.eff_caps
    adj: list[list[int]] = [[] for _ in range(net.n)]
    for e in range(net.m):
        if caps[e] == 0:
            continue
        u, v = net.tails[e], net.heads[e]
        if u in skip or v in skip:
            continue
        if flows[e] < caps[e]:
            adj[u].append(v)
        if flows[e] > 0:
            adj[v].append(u)
    comp: dict[int, int] = {}
    index = {}
    low = {}
    on_stack = set()
    stack: list[int] = []
    counter = 0
    label = 0
    for root in range(net.n):
        if root in skip or root in index:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            x, i = work[-1]
            if i < len(adj[x]):
                work[-1] = (x, i + 1)
                y = adj[x][i]
                if y not in index:
                    index[y] = low[y] = counter
                    counter += 1
                    stack.append(y)
                    on_stack.add(y)
                    work.append((y, 0))
                elif y in on_stack:
                    low[x] = min(low[x], index[y])
            else:
                work.pop()
                if work:
                    p = work[-1][0]
                    low[p] = min(low[p], low[x])
                if low[x] == index[x]:
                    while True:
                        y = stack.pop()
                        on_stack.discard(y)
                        comp[y] = label
                        if y == x:
                            break
                    label += 1
    return comp


def pq_from_flow(net: FlowNetwork, flows: Sequence[int], origin: str = "") -> PQDag:
    """DAG of a maximum flow's residual graph, source and sink sides contracted."""
    near = residual_reach_from(net, flows, [net.s])
    if net.t in near:
        raise PQError("flow is not maximum")
    far = residual_reach_to(net, flows, [net.t])
    comp = _residual_components(net, flows, near | far)
    offset = 2
    node_of = []
    for v in range(net.n):
        if v in near:
            node_of.append(0)
        elif v in far:
            node_of.append(1)
        else:
            node_of.append(offset + comp[v])
    caps = net.eff_caps
    edges = []
    for e in range(net.m):
        if caps[e] == 0:
            continue
        a, b = node_of[net.tails[e]], node_of[net.heads[e]]
        if a == b:
            continue
        if flows[e] == 0:
            edges.append((a, b, e))
        elif flows[e] == caps[e]:
            edges.append((b, a, e))
        else:
            raise PQError("partially saturated edge between distinct components")
    return _normalize(net.n, net.s, net.t, node_of, edges, origin)


def build_pq(net: FlowNetwork, origin: str = "G") -> PQDag:
    return pq_from_flow(net, max_flow(net).flows, origin)


def stores_cut(dag: PQDag, side: Iterable[int]) -> bool:
    """True iff the cut respects the node partition and is closed."""
    side = set(side)
    inside = {}
    for v, a in enumerate(dag.node_of):
        here = v in side
        if inside.setdefault(a, here) != here:
            return False
    if not inside[dag.source_node] or inside[dag.sink_node]:
        return False
    return all(not (inside[a] and not inside[b]) for a, b, _ in dag.edges)


def is_one_transversal(dag: PQDag, cut) -> bool:
    """Closedness test for a cut that respects the node partition."""
    side = set(cut.source_side if hasattr(cut, "source_side") else cut)
    if dag.s not in side or dag.t in side:
        raise PQError("not an (s,t)-cut")
    for a in range(dag.num_nodes):
        members = [v in side for v in range(dag.n) if dag.node_of[v] == a]
        if any(members) and not all(members):
            raise PQError("not representable: the cut subdivides a node")
    return stores_cut(dag, side)


def stored_cuts(dag: PQDag, limit: int = 24) -> Iterator[frozenset]:
    """Every cut the DAG stores (exponential; small DAGs only)."""
    middle = [a for a in range(dag.num_nodes) if a not in (dag.sink_node, dag.source_node)]
    if len(middle) > limit:
        raise PQError("too many nodes to enumerate")
    members = dag.nodes()
    succ = dag.successors()
    for bits in range(1 << len(middle)):
        chosen = {dag.source_node}
        chosen.update(middle[j] for j in range(len(middle)) if bits >> j & 1)
        if all(b in chosen for a in chosen for b in succ[a]):
            yield frozenset(v for a in chosen for v in members[a])


def construct_dpq_from_order(net: FlowNetwork, rec: TopoRecord) -> PQDag:
    """Rebuild a DAG from the original edges and a node order alone."""
    if len(rec.node_of) != net.n:
        raise PQError("record does not match the vertex count")
    if sorted(rec.topo) != list(range(rec.num_nodes)) or set(rec.node_of) - set(rec.topo):
        raise PQError("record order is not a permutation of its nodes")
    pos = {a: i for i, a in enumerate(rec.topo)}
    if pos[rec.node_of[net.t]] != 0 or pos[rec.node_of[net.s]] != rec.num_nodes - 1:
        raise PQError("record order must start at the sink node and end at the source node")
    node_of = [pos[a] for a in rec.node_of]
    caps = net.eff_caps
    edges = []
    for e in range(net.m):
        if caps[e] == 0:
            continue
        a, b = node_of[net.tails[e]], node_of[net.heads[e]]
        if a < b:
            edges.append((a, b, e))
        elif a > b:
            edges.append((b, a, e))
    return _normalize(net.n, net.s, net.t, node_of, edges, rec.origin)


def _reach(adj: list[set[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return seen


def restrict_pq(dag: PQDag, x: int, y: int, origin: str | None = None) -> PQDag:
    """Keep only the stored cuts with x on the source side and y on the sink side."""
    ax, ay = dag.node_of[x], dag.node_of[y]
    if ax == ay or ax == dag.sink_node or ay == dag.source_node:
        raise PQError("pair not separated")
    below = _reach(dag.successors(), ax)
    above = _reach(dag.predecessors(), ay)
    if below & above:
        raise PQError("pair not separated")
    below.add(dag.source_node)
    above.add(dag.sink_node)
    src, snk = dag.source_node, dag.sink_node
    node_of = [src if a in below else snk if a in above else a for a in dag.node_of]
    remap = {a: (src if a in below else snk if a in above else a) for a in range(dag.num_nodes)}
    edges = [(remap[a], remap[b], e) for a, b, e in dag.edges]
    return _normalize(dag.n, dag.s, dag.t, node_of, edges, dag.origin if origin is None else origin)


def merge_dags(dags: Sequence[PQDag], net: FlowNetwork, origin: str = "merged") -> PQDag:
    """DAG whose stored cuts are the union of the inputs' stored cuts.

    Vertices kept together by every input stay together; each edge takes its
    orientation from any input that separates its endpoints, and all such
    inputs must agree.  With one input this re-expresses it over ``net``,
    which may differ from the input's network in capacities or extra edges.
    """
    dags = [d for d in dags if d is not None]
    if not dags:
        raise PQError("nothing to merge")
    keys: dict[tuple, int] = {}
    node_of = []
    for v in range(net.n):
        key = tuple(d.node_of[v] for d in dags)
        node_of.append(keys.setdefault(key, len(keys)))
    by_edge = []
    for d in dags:
        table = {}
        for a, b, e in d.edges:
            table[e] = (a, b)
        by_edge.append(table)
    caps = net.eff_caps
    edges = []
    for e in range(net.m):
        if caps[e] == 0:
            continue
        u, v = net.tails[e], net.heads[e]
        if node_of[u] == node_of[v]:
            continue
        forward = None
        for d, table in zip(dags, by_edge):
            if d.node_of[u] == d.node_of[v]:
                continue
            if e not in table:
                raise PQError(f"edge {e} missing from an input DAG")
            here = table[e][0] == d.node_of[u]
            if forward is None:
                forward = here
            elif forward != here:
                raise PQError(f"orientation conflict on edge {e}")
        a, b = node_of[u], node_of[v]
        edges.append((a, b, e) if forward else (b, a, e))
    return _normalize(net.n, net.s, net.t, node_of, edges, origin)


def merge_pair_dags(first: PQDag, second: PQDag | None, net: FlowNetwork) -> PQDag:
    return merge_dags([first, second], net)
