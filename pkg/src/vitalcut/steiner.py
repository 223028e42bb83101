"""Steiner mincut structures, the separation hierarchy, and the compact store
of mincut DAGs for every vital edge with its queries.

All capacities are raw (INF counts as ``net.big``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .graph import INF, Capacity, FlowNetwork, GraphDelta, VitalCutError, parse_network, serialize_network
from .maxflow import FlowAssignment, max_flow, min_cut_with
from .pqdag import (
    PQDag,
    PQError,
    TopoRecord,
    construct_dpq_from_order,
    merge_dags,
    pq_from_flow,
    restrict_pq,
    stored_cuts,
)
from .tvit import InsertOracle, SparseTableLCA, TvitTree, build_insert_oracle, build_tvit
from .vital import VitalAnalysis, all_vital_edges


class SteinerError(VitalCutError):
    pass


class PairCosts:
    """Memoized forced cuts between single vertices, warm-started from one flow."""

    def __init__(self, net: FlowNetwork, flow: FlowAssignment | None = None):
        self.net = net
        self.flow = flow if flow is not None else max_flow(net)
        self._oriented: dict[tuple[int, int], int | None] = {}

    def oriented(self, a: int, b: int) -> int | None:
        """Least cut with a on the source side and b on the sink side (None if impossible)."""
        key = (a, b)
        if key not in self._oriented:
            net = self.net
            if a == net.t or b == net.s or a == b:
                self._oriented[key] = None
            else:
                self._oriented[key] = min_cut_with(net, {a}, {b}, warm=self.flow.flows).raw
        return self._oriented[key]

    def separation(self, a: int, b: int) -> int | None:
        if a == b:
            raise VitalCutError("separation needs two distinct vertices")
        options = [x for x in (self.oriented(a, b), self.oriented(b, a)) if x is not None]
        return min(options) if options else None

    def finite(self, raw: int | None) -> bool:
        return raw is not None and raw < self.net.big


def _as_capacity(net: FlowNetwork, raw: int | None) -> Capacity:
    return INF if raw is None or raw >= net.big else raw


def separation_cost(net: FlowNetwork, u: int, v: int) -> Capacity:
    if u == v:
        raise VitalCutError("separation needs two distinct vertices")
    return _as_capacity(net, PairCosts(net).separation(u, v))


def _classes(costs: PairCosts, members: Sequence[int], lam: int) -> list[list[int]]:
    """Components of "separation > lam"; each must be a clique."""
    members = sorted(members)
    parent = {x: x for x in members}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    above = set()
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            sep = costs.separation(a, b)
            if sep is None or sep > lam:
                above.add((a, b))
                parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for x in members:
        groups.setdefault(find(x), []).append(x)
    out = sorted(groups.values())
    for group in out:
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                if (a, b) not in above:
                    raise SteinerError("separation classes are not transitive")
    return out


@dataclass
class SteinerDag:
    kind: str  # "s": pivot on the source side, "t": pivot on the sink side, "single"
    cls: int  # index of the non-pivot class
    force_s: tuple
    force_t: tuple
    dag: PQDag


@dataclass
class SteinerStructure:
    steiner: tuple
    lam_raw: int
    classes: list  # list of sorted vertex lists
    pivot: int | None
    dags: list  # SteinerDag
    node_of: tuple  # node map of the quotient graph

    def find_dag(self, kind: str, cls: int) -> SteinerDag | None:
        for d in self.dags:
            if d.kind == kind and d.cls == cls:
                return d
        return None

    def class_of(self, v: int) -> int:
        for i, c in enumerate(self.classes):
            if v in c:
                return i
        raise SteinerError(f"vertex {v} is not a Steiner vertex")

    def stored_family(self) -> set[frozenset]:
        out: set[frozenset] = set()
        for d in self.dags:
            out.update(stored_cuts(d.dag))
        return out

    def lam(self, net: FlowNetwork) -> Capacity:
        return _as_capacity(net, self.lam_raw)


def build_steiner_structure(
    net: FlowNetwork,
    steiner,
    costs: PairCosts | None = None,
    classes: list | None = None,
) -> SteinerStructure:
    steiner = tuple(sorted(set(steiner)))
    if len(steiner) < 2:
        raise SteinerError("Steiner set needs at least two vertices")
    if costs is None:
        costs = PairCosts(net)
    seps = [costs.separation(a, b) for i, a in enumerate(steiner) for b in steiner[i + 1:]]
    seps = [x for x in seps if x is not None]
    if not seps or min(seps) >= net.big:
        raise SteinerError("no finite Steiner cut")
    lam = min(seps)
    if classes is None:
        classes = _classes(costs, steiner, lam)
    else:
        classes = [sorted(c) for c in classes]

    def always_source(c: list[int]) -> bool:
        a = c[0]
        return all(
            (x := costs.oriented(b, a)) is None or x > lam for b in steiner if b not in c
        )

    def always_sink(c: list[int]) -> bool:
        a = c[0]
        return all(
            (x := costs.oriented(a, b)) is None or x > lam for b in steiner if b not in c
        )

    free = [i for i, c in enumerate(classes) if not always_source(c) and not always_sink(c)]
    dags: list[SteinerDag] = []

    def add(kind: str, cls: int, force_s, force_t) -> None:
        try:
            cut = min_cut_with(net, force_s, force_t, warm=costs.flow.flows)
        except VitalCutError:
            return
        if cut.raw != lam:
            return
        forced = net.forced(force_s, force_t)
        dag = pq_from_flow(forced, cut.flows, origin=f"steiner:{kind}:{cls}")
        dags.append(SteinerDag(kind, cls, tuple(sorted(force_s)), tuple(sorted(force_t)), dag))

    pivot = free[0] if free else None
    if pivot is None:
        if len(classes) != 2:
            raise SteinerError("no pivot class and more than two classes")
        src = 0 if always_source(classes[0]) else 1
        add("single", 1 - src, classes[src], classes[1 - src])
    else:
        for i, c in enumerate(classes):
            if i == pivot:
                continue
            add("s", i, classes[pivot], c)
            add("t", i, c, classes[pivot])
    keys: dict[tuple, int] = {}
    node_of = []
    for v in range(net.n):
        key = tuple(d.dag.node_of[v] for d in dags)
        node_of.append(keys.setdefault(key, len(keys)))
    return SteinerStructure(steiner, lam, classes, pivot, dags, tuple(node_of))


@dataclass
class HierarchyTree:
    net: FlowNetwork
    members: list  # vertex list per node
    cap: list  # raw capacity per internal node (None for leaves); INF caps stored as None-free big values
    children: list
    leaf_of: list
    structures: dict = field(default_factory=dict)  # node -> SteinerStructure
    _lca: SparseTableLCA | None = field(default=None, repr=False)

    def lca(self, u: int, v: int) -> int:
        return self._lca.lca(self.leaf_of[u], self.leaf_of[v])

    def lca_cap(self, u: int, v: int) -> Capacity:
        return _as_capacity(self.net, self.cap[self.lca(u, v)])

    def child_containing(self, node: int, v: int) -> int:
        for i, c in enumerate(self.children[node]):
            if v in self.members[c]:
                return i
        raise SteinerError(f"vertex {v} is not below node {node}")

    @property
    def internal_nodes(self) -> list[int]:
        return [x for x in range(len(self.cap)) if self.children[x]]


def build_hierarchy(net: FlowNetwork, costs: PairCosts | None = None, *, augment: bool = False) -> HierarchyTree:
    """Recursive split by least pairwise separation cost."""
    if costs is None:
        costs = PairCosts(net)
    members: list[list[int]] = [list(range(net.n))]
    cap: list = [None]
    children: list[list[int]] = [[]]
    leaf_of = [0] * net.n
    stack = [0]
    while stack:
        node = stack.pop()
        group = members[node]
        if len(group) == 1:
            leaf_of[group[0]] = node
            continue
        seps = [costs.separation(a, b) for i, a in enumerate(group) for b in group[i + 1:]]
        finite = [x for x in seps if x is not None]
        lam = min(finite) if finite else None
        if lam is None or lam >= net.big:
            parts = [[x] for x in group]
            cap[node] = net.big if lam is None else lam
        else:
            parts = _classes(costs, group, lam)
            cap[node] = lam
        for part in parts:
            child = len(members)
            members.append(part)
            cap.append(None)
            children.append([])
            children[node].append(child)
            stack.append(child)
    tree = HierarchyTree(net, members, cap, children, leaf_of)
    tree._lca = SparseTableLCA([tuple(c) for c in children])
    if augment:
        for node in tree.internal_nodes:
            if cap[node] >= net.big:
                continue
            groups = [members[c] for c in children[node]]
            tree.structures[node] = build_steiner_structure(net, members[node], costs, groups)
    return tree


# Compact store


@dataclass(frozen=True)
class StoredRecord:
    """A topological record plus how to rebuild the network it came from."""

    force_s: tuple
    force_t: tuple
    without: int | None
    record: TopoRecord

    def network(self, net: FlowNetwork) -> FlowNetwork:
        base = net if self.without is None else net.without(self.without)
        return base.forced(self.force_s, self.force_t)

    def rebuild(self, net: FlowNetwork) -> PQDag:
        return construct_dpq_from_order(self.network(net), self.record)

    def to_json(self) -> dict:
        return {
            "force_s": list(self.force_s),
            "force_t": list(self.force_t),
            "without": self.without,
            "record": self.record.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "StoredRecord":
        return cls(tuple(data["force_s"]), tuple(data["force_t"]), data["without"], TopoRecord.from_json(data["record"]))


def _store(net: FlowNetwork, dag: PQDag, force_s=(), force_t=(), without=None) -> StoredRecord:
    return StoredRecord(tuple(sorted(force_s)), tuple(sorted(force_t)), without, dag.record())


@dataclass
class XvitStore:
    net: FlowNetwork
    flow: FlowAssignment
    records: dict  # key -> StoredRecord
    edge_records: dict  # vital edge -> list of keys
    loose: set
    vital: set
    lam_raw: dict  # vital edge -> raw mincut capacity
    ties: dict = field(default_factory=dict)  # nonvital edge -> key of D_PQ(G without e)
    sink_records: dict = field(default_factory=dict)  # u -> key of D_PQ(G + (u,t,INF))
    source_records: dict = field(default_factory=dict)  # v -> key of D_PQ(G + (s,v,INF))
    insert: InsertOracle | None = None

    @property
    def fstar(self) -> int:
        return self.flow.value

    @property
    def svit_keys(self) -> list[str]:
        keys = set()
        for ks in self.edge_records.values():
            keys.update(ks)
        return sorted(keys)

    def rebuild(self, key: str) -> PQDag:
        return self.records[key].rebuild(self.net)

    def base_dag(self) -> PQDag:
        return self.rebuild("base")

    def save(self, path) -> None:
        root = Path(path)
        (root / "records").mkdir(parents=True, exist_ok=True)
        names = {}
        for i, (key, rec) in enumerate(sorted(self.records.items())):
            name = f"records/{i:05d}.json"
            names[key] = name
            (root / name).write_text(json.dumps(rec.to_json(), sort_keys=True))
        manifest = {
            "schema": "vitalcut/1",
            "network": serialize_network(self.net),
            "flow": list(self.flow.flows),
            "fstar": self.flow.value,
            "records": names,
            "edge_records": {str(e): ks for e, ks in sorted(self.edge_records.items())},
            "loose": sorted(self.loose),
            "vital": sorted(self.vital),
            "lam_raw": {str(e): x for e, x in sorted(self.lam_raw.items())},
            "ties": {str(e): k for e, k in sorted(self.ties.items())},
            "sink_records": {str(u): k for u, k in sorted(self.sink_records.items())},
            "source_records": {str(v): k for v, k in sorted(self.source_records.items())},
            "insert": self.insert.to_json() if self.insert else None,
        }
        (root / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1))

    @classmethod
    def load(cls, path) -> "XvitStore":
        root = Path(path)
        manifest = json.loads((root / "manifest.json").read_text())
        net = parse_network(manifest["network"])
        flow = FlowAssignment(tuple(manifest["flow"]), manifest["fstar"])
        records = {
            key: StoredRecord.from_json(json.loads((root / name).read_text()))
            for key, name in manifest["records"].items()
        }
        insert = InsertOracle.from_json(net, manifest["insert"]) if manifest["insert"] else None
        return cls(
            net,
            flow,
            records,
            {int(e): ks for e, ks in manifest["edge_records"].items()},
            set(manifest["loose"]),
            set(manifest["vital"]),
            {int(e): x for e, x in manifest["lam_raw"].items()},
            {int(e): k for e, k in manifest["ties"].items()},
            {int(u): k for u, k in manifest["sink_records"].items()},
            {int(v): k for v, k in manifest["source_records"].items()},
            insert,
        )


def _tight_keys(hier: HierarchyTree, net: FlowNetwork, e: int, lam: int) -> list[tuple]:
    """(node, kind, cls) triples of the hierarchy DAGs holding the mincuts of e."""
    u, v = net.tails[e], net.heads[e]
    node = hier.lca(u, v)
    if hier.cap[node] != lam:
        raise SteinerError(f"hierarchy capacity differs from the mincut capacity of edge {e}")
    struct = hier.structures[node]
    alpha = hier.child_containing(node, u)
    beta = hier.child_containing(node, v)
    out = []
    if struct.pivot is None:
        out.append((node, "single", beta))
    else:
        if struct.pivot != beta:
            out.append((node, "s", beta))
        if struct.pivot != alpha:
            out.append((node, "t", alpha))
    return out


def build_svit(
    net: FlowNetwork,
    analysis: VitalAnalysis | None = None,
    *,
    hierarchy: HierarchyTree | None = None,
    with_insert: bool = True,
    with_ties: bool = True,
) -> XvitStore:
    if analysis is None:
        analysis = all_vital_edges(net)
    flow = analysis.flow
    records: dict[str, StoredRecord] = {"base": _store(net, pq_from_flow(net, flow.flows))}
    edge_records: dict[int, list[str]] = {}
    lam_raw = {}
    for c in analysis.classes:
        if c.vital:
            lam_raw[c.edge] = c.lam_raw
    for e in sorted(analysis.loose):
        u, v = net.tails[e], net.heads[e]
        cut = analysis.forced_cuts[e]
        dag = pq_from_flow(net.forced({u}, {v}), cut.flows, origin=f"loose:{e}")
        key = f"loose:{e}"
        records[key] = _store(net, dag, {u}, {v})
        edge_records[e] = [key]
    tight = sorted(analysis.tight)
    if tight:
        costs = PairCosts(net, flow)
        hier = hierarchy if hierarchy is not None else build_hierarchy(net, costs, augment=True)
        for node, struct in hier.structures.items():
            for d in struct.dags:
                key = f"steiner:{node}:{d.kind}:{d.cls}"
                records[key] = StoredRecord(d.force_s, d.force_t, None, d.dag.record())
        for e in tight:
            keys = []
            for node, kind, cls in _tight_keys(hier, net, e, lam_raw[e]):
                key = f"steiner:{node}:{kind}:{cls}"
                if key in records:
                    keys.append(key)
            if not keys:
                raise SteinerError(f"no stored DAG for tight edge {e}")
            edge_records[e] = keys
    ties = {}
    if with_ties:
        for e, cut in analysis.forced_cuts.items():
            if e in lam_raw:
                continue
            if cut.raw - net.eff_caps[e] == flow.value:
                reduced = net.without(e)
                key = f"tie:{e}"
                records[key] = _store(net, pq_from_flow(reduced, max_flow(reduced).flows), without=e)
                ties[e] = key
    store = XvitStore(net, flow, records, edge_records, set(analysis.loose), set(lam_raw), lam_raw, ties)
    if with_insert:
        oracle = build_insert_oracle(net, flow, with_records=True)
        for u, rec in oracle.records_sink.items():
            key = f"sink:{u}"
            records[key] = StoredRecord((), (u,), None, rec)
            store.sink_records[u] = key
        for v, rec in oracle.records_source.items():
            key = f"source:{v}"
            records[key] = StoredRecord((v,), (), None, rec)
            store.source_records[v] = key
        store.insert = oracle
    return store


def query_allcuts(store: XvitStore, e: int) -> PQDag:
    """DAG of all mincuts for the vital edge e, rebuilt without any maximum flow."""
    net = store.net
    if e not in store.vital:
        raise VitalCutError("no mincut family: edge is not vital")
    u, v = net.tails[e], net.heads[e]
    parts = []
    for key in store.edge_records[e]:
        dag = store.rebuild(key)
        try:
            parts.append(restrict_pq(dag, u, v))
        except PQError:
            continue
    if not parts:
        raise SteinerError(f"stored DAGs hold no mincut for edge {e}")
    return merge_dags(parts, net, origin=f"allcuts:{e}")


@dataclass
class RebuiltDag:
    key: str
    cap_raw: int
    dag: PQDag


def query_allcuts_all_edges(store: XvitStore) -> list[RebuiltDag]:
    """Every DAG of the vital-edge part of the store."""
    out = []
    for key in store.svit_keys:
        dag = store.rebuild(key)
        rec = store.records[key]
        cap = store.net.forced(rec.force_s, rec.force_t).raw_cut_capacity(dag.suffix_cut(dag.num_nodes - 1))
        out.append(RebuiltDag(key, cap, dag))
    return out


def query_allmincut(tree: TvitTree, store: XvitStore, e: int, delta: int) -> PQDag:
    """DAG of all (s,t)-mincuts after changing the capacity of edge e by delta.

    Decided from the tree's capacities and the stored records only.
    """
    net = store.net
    change = GraphDelta(e, delta)
    changed = change.apply(net)
    u, v, w = net.tails[e], net.heads[e], net.eff_caps[e]
    fstar = store.fstar
    origin = f"allmincut:{e}:{delta}"
    if delta == 0 or changed is net:
        return store.base_dag()
    if delta < 0:
        lam = tree.lam_raw(u, v)
        if lam is not None and lam - w < fstar:
            new = lam + delta
            if new < fstar:
                return merge_dags([query_allcuts(store, e)], changed, origin)
            if new == fstar:
                return merge_dags([store.base_dag(), query_allcuts(store, e)], changed, origin)
            return merge_dags([store.base_dag()], changed, origin)
        if delta > -w:
            return merge_dags([store.base_dag()], changed, origin)
        if store.flow.flows[e] == 0:
            return pq_from_flow(changed, store.flow.flows, origin)
        if e in store.ties:
            return merge_dags([store.rebuild(store.ties[e])], changed, origin)
        return merge_dags([store.base_dag()], changed, origin)
    if u == net.t or v == net.s:
        return merge_dags([store.base_dag()], changed, origin)
    oracle = store.insert
    if oracle is None:
        raise VitalCutError("capacity increase needs the insertion records")

    def sink_dag(x: int) -> PQDag:
        return store.base_dag() if x == net.t else store.rebuild(store.sink_records[x])

    def source_dag(x: int) -> PQDag:
        return store.base_dag() if x == net.s else store.rebuild(store.source_records[x])

    parts = []
    if u in oracle.near and v in oracle.far:
        via_u = oracle.to_sink.get(u)
        via_v = oracle.to_source.get(v)
        best = min(x.raw for x in (via_u, via_v) if x is not None) if (via_u or via_v) else None
        best = fstar + delta if best is None else min(best, fstar + delta)
        if fstar + delta == best:
            parts.append(store.base_dag())
        if via_u is not None and via_u.raw == best:
            parts.append(sink_dag(u))
        if via_v is not None and via_v.raw == best:
            parts.append(source_dag(v))
    else:
        if u not in oracle.near:
            parts.append(sink_dag(u))
        if v not in oracle.far:
            parts.append(source_dag(v))
    return merge_dags(parts, changed, origin)
