"""Partial-characterization DAG over the mincuts of vital edges, and the
farthest-mincut tree with subset queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import FlowNetwork, STCut, VitalCutError
from .maxflow import max_flow, min_cut_with, residual_reach_to
from .pqdag import PQDag, pq_from_flow
from .tvit import TvitTree, grow_cut_tree
from .vital import VitalAnalysis, all_vital_edges

CONTRIBUTES_ONLY = "contributes"
INCOMING_ONLY = "incoming"
GAMMA = "gamma"
NEITHER = "neither"

KEPT = "kept"
REVERSED = "reversed0"
DELETED = "deleted-gamma"


def vital_edge_dags(net: FlowNetwork, analysis: VitalAnalysis, edges: Iterable[int] | None = None) -> dict[int, PQDag]:
    """DAG of all mincuts for each vital edge, from the flows already computed."""
    out = {}
    chosen = analysis.vital_edges if edges is None else set(edges)
    for e in sorted(chosen):
        if e not in analysis.vital_edges:
            raise VitalCutError(f"edge {e} is not vital")
        u, v = net.tails[e], net.heads[e]
        out[e] = pq_from_flow(net.forced({u}, {v}), analysis.forced_cuts[e].flows, origin=f"edge:{e}")
    return out


def edge_roles(
    net: FlowNetwork,
    analysis: VitalAnalysis | None = None,
    vital_subset: Iterable[int] | None = None,
    dags: dict[int, PQDag] | None = None,
) -> list[str]:
    """Role of each edge toward the mincuts of the chosen vital edges."""
    if analysis is None:
        analysis = all_vital_edges(net)
    if dags is None:
        dags = vital_edge_dags(net, analysis, vital_subset)
    contributes = [False] * net.m
    incoming = [False] * net.m
    for dag in dags.values():
        for x in range(net.m):
            if net.eff_caps[x] == 0:
                continue
            a, b = dag.node_of[net.tails[x]], dag.node_of[net.heads[x]]
            if a > b:
                contributes[x] = True
            elif a < b:
                incoming[x] = True
    roles = []
    for c, i in zip(contributes, incoming):
        roles.append(GAMMA if c and i else CONTRIBUTES_ONLY if c else INCOMING_ONLY if i else NEITHER)
    return roles


@dataclass(frozen=True)
class DvitEdge:
    tail: int  # quotient node
    head: int
    edge: int
    tag: str
    cap: int


@dataclass
class DvitDag:
    net: FlowNetwork
    node_of: tuple
    edges: list  # DvitEdge, deleted ones included with tag DELETED
    roles: list

    @property
    def num_nodes(self) -> int:
        return max(self.node_of) + 1

    @property
    def source_node(self) -> int:
        return self.node_of[self.net.s]

    @property
    def sink_node(self) -> int:
        return self.node_of[self.net.t]

    @property
    def live_edges(self) -> list[DvitEdge]:
        return [x for x in self.edges if x.tag != DELETED]

    def is_acyclic(self) -> bool:
        k = self.num_nodes
        indeg = [0] * k
        succ: list[list[int]] = [[] for _ in range(k)]
        for x in self.live_edges:
            succ[x.tail].append(x.head)
            indeg[x.head] += 1
        ready = [a for a in range(k) if indeg[a] == 0]
        seen = 0
        while ready:
            a = ready.pop()
            seen += 1
            for b in succ[a]:
                indeg[b] -= 1
                if indeg[b] == 0:
                    ready.append(b)
        return seen == k

    def network(self) -> FlowNetwork:
        """Quotient as a flow network; reversed edges keep capacity 0."""
        triples = [(x.tail, x.head, x.cap) for x in self.live_edges]
        return FlowNetwork(self.num_nodes, self.source_node, self.sink_node, triples, allow_zero=True)

    def edge_index(self) -> dict[int, int]:
        """Original edge id -> id in :meth:`network`."""
        return {x.edge: i for i, x in enumerate(self.live_edges)}

    def node_side(self, side: Iterable[int]) -> set[int]:
        side = set(side)
        nodes = {self.node_of[v] for v in side}
        for v, a in enumerate(self.node_of):
            if a in nodes and v not in side:
                raise VitalCutError("cut subdivides a quotient node")
        return nodes

    def is_one_transversal(self, side: Iterable[int]) -> bool:
        nodes = self.node_side(side)
        return all(not (x.head in nodes and x.tail not in nodes) for x in self.live_edges)

    def cut_capacity(self, side: Iterable[int]) -> int:
        nodes = self.node_side(side)
        return sum(x.cap for x in self.live_edges if x.tail in nodes and x.head not in nodes)

    def to_json(self) -> dict:
        nodes: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for v, a in enumerate(self.node_of):
            nodes[a].append(v)
        return {
            "nodes": nodes,
            "edges": [[x.tail, x.head, x.edge, x.tag, x.cap] for x in self.edges],
        }


def _quotient(net: FlowNetwork, dags: Sequence[PQDag]) -> tuple:
    keys: dict[tuple, int] = {}
    raw = []
    for v in range(net.n):
        key = tuple(d.node_of[v] for d in dags)
        raw.append(keys.setdefault(key, len(keys)))
    return tuple(raw)


def build_dvit(
    net: FlowNetwork,
    analysis: VitalAnalysis | None = None,
    vital_subset: Iterable[int] | None = None,
) -> DvitDag:
    if analysis is None:
        analysis = all_vital_edges(net)
    dags = vital_edge_dags(net, analysis, vital_subset)
    if not dags:
        raise VitalCutError("no vital edges to characterize")
    roles = edge_roles(net, analysis, dags=dags)
    node_of = _quotient(net, list(dags.values()))
    edges = []
    for x in range(net.m):
        cap = net.eff_caps[x]
        if cap == 0:
            continue
        a, b = node_of[net.tails[x]], node_of[net.heads[x]]
        if a == b:
            continue
        role = roles[x]
        if role == CONTRIBUTES_ONLY:
            edges.append(DvitEdge(a, b, x, KEPT, cap))
        elif role == INCOMING_ONLY:
            edges.append(DvitEdge(b, a, x, REVERSED, 0))
        elif role == GAMMA:
            edges.append(DvitEdge(a, b, x, DELETED, cap))
        else:
            raise VitalCutError(f"edge {x} crosses quotient nodes but meets no mincut")
    return DvitDag(net, node_of, edges, roles)


def build_qprime(net: FlowNetwork, analysis: VitalAnalysis | None = None) -> DvitDag:
    """Quotient with only-incoming edges flipped and everything else kept."""
    if analysis is None:
        analysis = all_vital_edges(net)
    dags = vital_edge_dags(net, analysis)
    roles = edge_roles(net, analysis, dags=dags)
    node_of = _quotient(net, list(dags.values()))
    edges = []
    for x in range(net.m):
        cap = net.eff_caps[x]
        a, b = node_of[net.tails[x]], node_of[net.heads[x]]
        if cap == 0 or a == b:
            continue
        if roles[x] == INCOMING_ONLY:
            edges.append(DvitEdge(b, a, x, REVERSED, cap))
        else:
            edges.append(DvitEdge(a, b, x, KEPT, cap))
    return DvitDag(net, node_of, edges, roles)


def path_crossings(net: FlowNetwork, path: Sequence[int], side: Iterable[int]) -> int:
    """How many consecutive vertex pairs of the path lie on different sides."""
    side = set(side)
    for a, b in zip(path, path[1:]):
        if not any(net.heads[e] == b for e in net.out_edges[a]):
            raise VitalCutError(f"no edge from {a} to {b}")
    return sum(1 for a, b in zip(path, path[1:]) if (a in side) != (b in side))


def farthest_mincut(net: FlowNetwork, e: int, analysis: VitalAnalysis | None = None) -> STCut:
    """The mincut for e with inclusion-maximal source side."""
    u, v = net.tails[e], net.heads[e]
    if analysis is not None:
        if e not in analysis.vital_edges:
            raise VitalCutError("edge is not vital")
        flows = analysis.forced_cuts[e].flows
    else:
        cut = min_cut_with(net, {u}, {v})
        if cut.raw - net.eff_caps[e] >= max_flow(net).value:
            raise VitalCutError("edge is not vital")
        flows = cut.flows
    forced = net.forced({u}, {v})
    far = residual_reach_to(forced, flows, [net.t])
    return net.cut(set(range(net.n)) - far)


@dataclass
class FvitTree:
    tree: TvitTree
    fstar: int

    def lca_cut(self, e: int) -> STCut:
        net = self.tree.net
        return self.tree.cut[self.tree.lca_node(net.tails[e], net.heads[e])]

    @property
    def cover(self) -> list[STCut]:
        return self.tree.cover

    def query_ifsubcut(self, subset: Iterable[int], e: int) -> bool:
        return query_ifsubcut(self, subset, e)


def build_fvit(net: FlowNetwork, analysis: VitalAnalysis | None = None) -> FvitTree:
    """Cover tree holding the farthest mincut of every vital edge."""
    if analysis is None:
        analysis = all_vital_edges(net)
    items = []
    for c in analysis.classes:
        if c.vital:
            cut = farthest_mincut(net, c.edge, analysis)
            items.append((c.lam_raw, -len(cut.source_side), c.edge, cut))
    items.sort(key=lambda x: x[:3])
    tree = grow_cut_tree(net, analysis.fstar, ((e, lam, cut) for lam, _, e, cut in items))
    return FvitTree(tree, analysis.fstar)


def query_ifsubcut(fvit: FvitTree, subset: Iterable[int], e: int) -> bool:
    """Is there a mincut for e whose source side contains the subset?"""
    tree = fvit.tree
    net = tree.net
    if not 0 <= e < net.m:
        raise VitalCutError(f"unknown edge {e}")
    lam = tree.lam_raw(net.tails[e], net.heads[e])
    if lam is None or lam - net.eff_caps[e] >= fvit.fstar:
        raise VitalCutError("edge is not vital")
    side = tree.cut[tree.lca_node(net.tails[e], net.heads[e])].source_side
    return all(v in side for v in subset)
