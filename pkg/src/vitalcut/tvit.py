"""Mincut cover tree with constant-time capacity queries, edge insertion
answers and a heavy-path vertex labeling.

Capacities are raw (INF counts as ``net.big``); public answers are plain ints
because every answer is at most f*, which is finite.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .graph import FlowNetwork, STCut, VitalCutError
from .maxflow import ForcedCut, FlowAssignment, max_flow, min_cut_with, residual_reach_from, residual_reach_to
from .pqdag import TopoRecord, pq_from_flow
from .vital import VitalAnalysis, all_vital_edges


class SparseTableLCA:
    """Euler tour plus sparse table of minima over depths."""

    def __init__(self, children: list[tuple], root: int = 0):
        size = len(children)
        self.depth = [0] * size
        self.first = [0] * size
        tour: list[int] = []
        stack = [(root, 0)]
        while stack:
            x, i = stack.pop()
            if i == 0:
                self.first[x] = len(tour)
            tour.append(x)
            kids = children[x]
            if i < len(kids):
                stack.append((x, i + 1))
                self.depth[kids[i]] = self.depth[x] + 1
                stack.append((kids[i], 0))
        self.tour = tour
        table = [tour]
        span = 1
        while 2 * span <= len(tour):
            prev = table[-1]
            depth = self.depth
            row = []
            for i in range(len(tour) - 2 * span + 1):
                a, b = prev[i], prev[i + span]
                row.append(a if depth[a] <= depth[b] else b)
            table.append(row)
            span *= 2
        self.table = table

    def lca(self, a: int, b: int) -> int:
        i, j = self.first[a], self.first[b]
        if i > j:
            i, j = j, i
        k = (j - i + 1).bit_length() - 1
        row = self.table[k]
        x, y = row[i], row[j - (1 << k) + 1]
        return x if self.depth[x] <= self.depth[y] else y


@dataclass
class TvitTree:
    """Full binary tree; leaves partition V, internal nodes carry cuts."""

    net: FlowNetwork
    fstar: int
    left: list
    right: list
    cap: list  # raw capacity at internal nodes, None at leaves
    cut: list  # STCut at internal nodes
    edge: list  # vital edge that created each internal node
    members: list  # vertex list at leaves
    leaf_of: list
    ord_of: list  # in-order leaf index per vertex
    insert_oracle: "InsertOracle | None" = None
    _lca: SparseTableLCA | None = field(default=None, repr=False)

    @property
    def internal_nodes(self) -> list[int]:
        return [x for x in range(len(self.cap)) if self.cap[x] is not None]

    @property
    def cover(self) -> list[STCut]:
        return [self.cut[x] for x in self.internal_nodes]

    def children(self) -> list[tuple]:
        return [() if self.left[x] is None else (self.left[x], self.right[x]) for x in range(len(self.cap))]

    def lca_node(self, x: int, y: int) -> int:
        return self._lca.lca(self.leaf_of[x], self.leaf_of[y])

    def lam_raw(self, x: int, y: int) -> int | None:
        """Capacity at the lca when x sits left of y, else None."""
        if self.ord_of[x] >= self.ord_of[y]:
            return None
        return self.cap[self.lca_node(x, y)]

    def query_cap(self, x: int, y: int, w: int, delta: int) -> int:
        """New f* after changing the capacity of an edge (x,y) of capacity w by delta."""
        if delta < -w:
            raise VitalCutError("delta below -w(e)")
        if delta > 0:
            if x == self.net.t or y == self.net.s:
                return self.fstar
            if self.insert_oracle is None:
                raise VitalCutError("capacity increase needs an insertion oracle")
            return self.insert_oracle.query_insert(x, y, delta)[0]
        lam = self.lam_raw(x, y)
        if lam is not None and lam + delta < self.fstar:
            return lam + delta
        return self.fstar

    def query_edge(self, e: int, delta: int) -> int:
        net = self.net
        if not 0 <= e < net.m:
            raise VitalCutError(f"unknown edge {e}")
        return self.query_cap(net.tails[e], net.heads[e], net.eff_caps[e], delta)

    def query_fail(self, e: int) -> int:
        return self.query_edge(e, -self.net.eff_caps[e])

    def query_cut(self, e: int, delta: int) -> STCut:
        """A cut achieving :meth:`query_edge`; its capacity is the changed one."""
        net = self.net
        if not 0 <= e < net.m:
            raise VitalCutError(f"unknown edge {e}")
        x, y, w = net.tails[e], net.heads[e], net.eff_caps[e]
        if delta < -w:
            raise VitalCutError("delta below -w(e)")
        if delta > 0:
            if self.insert_oracle is None:
                raise VitalCutError("capacity increase needs an insertion oracle")
            if x == net.t or y == net.s:
                return self.insert_oracle.mincut
            return self.insert_oracle.query_insert(x, y, delta)[1]
        lam = self.lam_raw(x, y)
        if lam is not None and lam + delta < self.fstar:
            return dataclasses.replace(self.cut[self.lca_node(x, y)], capacity=lam + delta)
        return self._global_mincut()

    def _global_mincut(self) -> STCut:
        if self.insert_oracle is not None:
            return self.insert_oracle.mincut
        if not hasattr(self, "_mincut_cache"):
            flow = max_flow(self.net)
            self._mincut_cache = self.net.cut(residual_reach_from(self.net, flow.flows, [self.net.s]))
        return self._mincut_cache

    def to_json(self) -> dict:
        return {
            "fstar": self.fstar,
            "left": self.left,
            "right": self.right,
            "cap": self.cap,
            "edge": self.edge,
            "cut": [sorted(c.source_side) if c else None for c in self.cut],
            "members": self.members,
        }

    @classmethod
    def from_json(cls, net: FlowNetwork, data: dict) -> "TvitTree":
        cuts = [net.cut(c) if c is not None else None for c in data["cut"]]
        return _finish(net, data["fstar"], data["left"], data["right"], data["cap"], cuts, data["edge"], data["members"])


def _finish(net, fstar, left, right, cap, cuts, edges, members) -> TvitTree:
    leaf_of = [0] * net.n
    ord_of = [0] * net.n
    size = len(cap)
    children = [() if left[x] is None else (left[x], right[x]) for x in range(size)]
    counter = 0
    stack = [0]
    while stack:
        x = stack.pop()
        if left[x] is None:
            for v in members[x]:
                leaf_of[v] = x
                ord_of[v] = counter
            counter += 1
        else:
            stack.append(right[x])
            stack.append(left[x])
    tree = TvitTree(net, fstar, left, right, cap, cuts, edges, members, leaf_of, ord_of)
    tree._lca = SparseTableLCA(children)
    return tree


def grow_cut_tree(net: FlowNetwork, fstar: int, items: Iterable[tuple[int, int, STCut]]) -> TvitTree:
    """Split leaves by the given (edge, raw capacity, cut) triples in order."""
    left: list = [None]
    right: list = [None]
    cap: list = [None]
    cuts: list = [None]
    edges: list = [None]
    members: list = [list(range(net.n))]
    leaf_of = [0] * net.n
    for e, lam, cut in items:
        u, v = net.tails[e], net.heads[e]
        node = leaf_of[u]
        if leaf_of[v] != node:
            continue
        side = cut.source_side
        if u not in side or v in side:
            raise VitalCutError(f"witness cut of edge {e} does not separate its endpoints")
        inside = [x for x in members[node] if x in side]
        outside = [x for x in members[node] if x not in side]
        a, b = len(cap), len(cap) + 1
        for _ in range(2):
            left.append(None)
            right.append(None)
            cap.append(None)
            cuts.append(None)
            edges.append(None)
        members.append(inside)
        members.append(outside)
        members[node] = []
        left[node], right[node] = a, b
        cap[node], cuts[node], edges[node] = lam, cut, e
        for x in inside:
            leaf_of[x] = a
        for x in outside:
            leaf_of[x] = b
    return _finish(net, fstar, left, right, cap, cuts, edges, members)


def build_tvit(
    net: FlowNetwork,
    analysis: VitalAnalysis | None = None,
    *,
    insert_oracle: "InsertOracle | bool" = False,
) -> TvitTree:
    """Cover tree over vital edges sorted by (mincut capacity, edge id)."""
    if analysis is None:
        analysis = all_vital_edges(net)
    vital = [c for c in analysis.classes if c.vital]
    for c in vital:
        if c.witness is None or c.lam_raw is None:
            raise VitalCutError(f"class table entry for edge {c.edge} lacks a witness")
    vital.sort(key=lambda c: (c.lam_raw, c.edge))
    tree = grow_cut_tree(net, analysis.fstar, ((c.edge, c.lam_raw, c.witness) for c in vital))
    if insert_oracle is True:
        tree.insert_oracle = build_insert_oracle(net, analysis.flow)
    elif insert_oracle:
        tree.insert_oracle = insert_oracle
    return tree


@dataclass
class InsertOracle:
    """Answers f* after inserting one edge (u,v) with positive capacity.

    ``near`` holds vertices on the source side of every mincut and ``far``
    those on the sink side of every mincut.  ``to_sink[u]`` is the least cut
    with u on the sink side, ``to_source[v]`` the least cut with v on the
    source side.
    """

    net: FlowNetwork
    flow: FlowAssignment
    near: frozenset
    far: frozenset
    to_sink: dict  # u -> ForcedCut
    to_source: dict  # v -> ForcedCut
    mincut: STCut
    farthest: STCut
    records_sink: dict = field(default_factory=dict)  # u -> TopoRecord of G + (u,t,INF)
    records_source: dict = field(default_factory=dict)  # v -> TopoRecord of G + (s,v,INF)

    @property
    def fstar(self) -> int:
        return self.flow.value

    def sink_value(self, u: int) -> int:
        return self.to_sink[u].raw

    def source_value(self, v: int) -> int:
        return self.to_source[v].raw

    def query_insert(self, u: int, v: int, delta: int) -> tuple[int, STCut]:
        net = self.net
        if delta <= 0:
            raise VitalCutError("inserted capacity must be positive")
        if u == v or u == net.t or v == net.s:
            raise VitalCutError("degenerate endpoints for an inserted edge")
        if not (0 <= u < net.n and 0 <= v < net.n):
            raise VitalCutError("vertex out of range")
        fstar = self.fstar
        if u not in self.near:
            return fstar, self.mincut
        if v not in self.far:
            return fstar, self.farthest
        best = fstar + delta
        answer = dataclasses.replace(self.mincut, capacity=best)
        # the source cannot move to the sink side, nor the sink to the source side
        via_u = self.to_sink.get(u)
        if via_u is not None and via_u.raw < best:
            best = via_u.raw
            answer = net.cut(via_u.source_side)
        via_v = self.to_source.get(v)
        if via_v is not None and via_v.raw < best:
            best = via_v.raw
            answer = net.cut(via_v.source_side)
        return best, answer

    def to_json(self) -> dict:
        return {
            "near": sorted(self.near),
            "far": sorted(self.far),
            "flow": list(self.flow.flows),
            "to_sink": {str(u): [c.raw, sorted(c.source_side)] for u, c in self.to_sink.items()},
            "to_source": {str(v): [c.raw, sorted(c.source_side)] for v, c in self.to_source.items()},
        }

    @classmethod
    def from_json(cls, net: FlowNetwork, data: dict) -> "InsertOracle":
        flows = tuple(data["flow"])
        flow = FlowAssignment(flows, sum(flows[e] for e in net.out_edges[net.s]) - sum(flows[e] for e in net.in_edges[net.s]))
        near = frozenset(data["near"])
        far = frozenset(data["far"])
        to_sink = {int(u): ForcedCut(raw, frozenset(side), ()) for u, (raw, side) in data["to_sink"].items()}
        to_source = {int(v): ForcedCut(raw, frozenset(side), ()) for v, (raw, side) in data["to_source"].items()}
        return cls(net, flow, near, far, to_sink, to_source, net.cut(near), net.cut(set(range(net.n)) - far))


def build_insert_oracle(net: FlowNetwork, flow: FlowAssignment | None = None, *, with_records: bool = False) -> InsertOracle:
    """One forced maximum flow per vertex of the near and far sets.

    With ``with_records`` every vertex gets both forced flows and the
    topological records of the two forced DAGs.
    """
    if flow is None:
        flow = max_flow(net)
    near = frozenset(residual_reach_from(net, flow.flows, [net.s]))
    far = frozenset(residual_reach_to(net, flow.flows, [net.t]))
    to_sink: dict[int, ForcedCut] = {}
    to_source: dict[int, ForcedCut] = {}
    records_sink: dict[int, TopoRecord] = {}
    records_source: dict[int, TopoRecord] = {}
    sink_targets = range(net.n) if with_records else sorted(near)
    source_targets = range(net.n) if with_records else sorted(far)
    for u in sink_targets:
        if u == net.s:
            continue
        if u == net.t:
            cut = ForcedCut(flow.value, near, flow.flows)
        else:
            cut = min_cut_with(net, (), {u}, warm=flow.flows)
        to_sink[u] = cut
        if with_records and u != net.t:
            forced = net.forced((), {u})
            records_sink[u] = pq_from_flow(forced, cut.flows).record()
    for v in source_targets:
        if v == net.t:
            continue
        if v == net.s:
            cut = ForcedCut(flow.value, near, flow.flows)
        else:
            cut = min_cut_with(net, {v}, (), warm=flow.flows)
        to_source[v] = cut
        if with_records and v != net.s:
            forced = net.forced({v}, ())
            records_source[v] = pq_from_flow(forced, cut.flows).record()
    return InsertOracle(
        net,
        flow,
        near,
        far,
        to_sink,
        to_source,
        net.cut(near),
        net.cut(set(range(net.n)) - far),
        records_sink,
        records_source,
    )


def query_insert(oracle: InsertOracle, u: int, v: int, delta: int) -> tuple[int, STCut]:
    return oracle.query_insert(u, v, delta)


# Labels


@dataclass(frozen=True)
class VertexLabel:
    """Root path of a leaf as heavy-path exits: (path id, position, capacity)."""

    entries: tuple
    ord: int
    fstar: int
    pid_bits: int
    pos_bits: int

    def bit_size(self) -> int:
        bits = self.ord.bit_length() + self.fstar.bit_length()
        for _, _, cap in self.entries:
            bits += self.pid_bits + self.pos_bits + (cap.bit_length() if cap is not None else 1)
        return bits

    def to_json(self) -> dict:
        return {
            "entries": [list(x) for x in self.entries],
            "ord": self.ord,
            "fstar": self.fstar,
            "pid_bits": self.pid_bits,
            "pos_bits": self.pos_bits,
        }

    @classmethod
    def from_json(cls, data) -> "VertexLabel":
        try:
            entries = tuple(tuple(x) for x in data["entries"])
            label = cls(entries, data["ord"], data["fstar"], data["pid_bits"], data["pos_bits"])
        except (KeyError, TypeError, ValueError):
            raise VitalCutError("corrupt label") from None
        label.validate()
        return label

    def validate(self) -> None:
        ints = (self.ord, self.fstar, self.pid_bits, self.pos_bits)
        if not all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in ints):
            raise VitalCutError("corrupt label")
        if not self.entries:
            raise VitalCutError("corrupt label")
        for i, entry in enumerate(self.entries):
            if len(entry) != 3:
                raise VitalCutError("corrupt label")
            pid, pos, cap = entry
            if not (isinstance(pid, int) and isinstance(pos, int) and pid >= 0 and pos >= 0):
                raise VitalCutError("corrupt label")
            last = i == len(self.entries) - 1
            if last != (cap is None) or (cap is not None and not isinstance(cap, int)):
                raise VitalCutError("corrupt label")


def build_labels(tree: TvitTree) -> dict[int, VertexLabel]:
    size = len(tree.cap)
    children = tree.children()
    leaves = [0] * size
    order = []
    stack = [0]
    while stack:
        x = stack.pop()
        order.append(x)
        stack.extend(children[x])
    for x in reversed(order):
        leaves[x] = 1 if not children[x] else sum(leaves[c] for c in children[x])
    path_of = [0] * size
    pos_of = [0] * size
    paths = 1
    for x in order:
        kids = children[x]
        if not kids:
            continue
        heavy = kids[0] if leaves[kids[0]] >= leaves[kids[1]] else kids[1]
        for c in kids:
            if c == heavy:
                path_of[c], pos_of[c] = path_of[x], pos_of[x] + 1
            else:
                path_of[c], pos_of[c] = paths, 0
                paths += 1
    parent = [None] * size
    for x in range(size):
        for c in children[x]:
            parent[c] = x
    pid_bits = max(1, (paths - 1).bit_length())
    pos_bits = max(1, max(pos_of).bit_length())
    leaf_label: dict[int, VertexLabel] = {}
    for x in range(size):
        if children[x]:
            continue
        entries = [(path_of[x], pos_of[x], None)]
        y = x
        while y is not None:
            head = y
            while parent[head] is not None and path_of[parent[head]] == path_of[y]:
                head = parent[head]
            exit_node = parent[head]
            if exit_node is None:
                break
            entries.append((path_of[exit_node], pos_of[exit_node], tree.cap[exit_node]))
            y = exit_node
        entries.reverse()
        leaf_label[x] = VertexLabel(tuple(entries), 0, tree.fstar, pid_bits, pos_bits)
    out = {}
    for v in range(tree.net.n):
        base = leaf_label[tree.leaf_of[v]]
        out[v] = dataclasses.replace(base, ord=tree.ord_of[v])
    return out


def lca_cap_from_labels(lx: VertexLabel, ly: VertexLabel):
    for i, (ex, ey) in enumerate(zip(lx.entries, ly.entries)):
        if ex == ey:
            continue
        if ex[0] == ey[0]:
            return ex[2] if ex[1] < ey[1] else ey[2]
        if i == 0:
            raise VitalCutError("corrupt label")
        return lx.entries[i - 1][2]
    raise VitalCutError("labels describe the same leaf")


def query_cap_labels(lx: VertexLabel, ly: VertexLabel, w: int, delta: int) -> int:
    """Same answer as :meth:`TvitTree.query_cap` for delta <= 0, from labels only."""
    lx.validate()
    ly.validate()
    if lx.fstar != ly.fstar:
        raise VitalCutError("labels come from different trees")
    if delta < -w:
        raise VitalCutError("delta below -w(e)")
    if delta > 0:
        raise VitalCutError("labels answer only capacity decreases")
    if lx.ord >= ly.ord:
        return lx.fstar
    cap = lca_cap_from_labels(lx, ly)
    if cap + delta < lx.fstar:
        return cap + delta
    return lx.fstar
