"""Vital edges: tight/loose classification, vitality and mincut witnesses.

Every capacity here is in raw units of the network (INF counts as
``net.big``), which keeps comparisons exact when INF edges are present.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Sequence

from .forest import FlowCycleForest, pick_non_loose, redistribute
from .graph import INF, Capacity, FlowNetwork, STCut, VitalCutError
from .maxflow import (
    FlowAssignment,
    ForcedCut,
    check_feasible,
    count_maxflows,
    max_flow,
    max_flow_along_edge,
    min_cut_with,
)

NONVITAL = "nonvital"
TIGHT = "tight"
LOOSE = "loose"


@dataclass(frozen=True)
class EdgeClass:
    edge: int
    kind: str
    vitality: int
    lam_raw: int | None = None
    witness: STCut | None = None

    @property
    def vital(self) -> bool:
        return self.kind != NONVITAL

    def lam(self, net: FlowNetwork) -> Capacity | None:
        if self.lam_raw is None:
            return None
        return INF if self.lam_raw >= net.big else self.lam_raw

    def to_json(self, net: FlowNetwork) -> dict:
        lam = self.lam(net)
        return {
            "edge": self.edge,
            "class": self.kind,
            "vitality": self.vitality,
            "lambda": "inf" if lam is INF else lam,
            "witness_cut": sorted(self.witness.source_side) if self.witness else None,
        }


@dataclass
class VitalAnalysis:
    net: FlowNetwork
    flow: FlowAssignment
    classes: list[EdgeClass]
    loose_candidates: set[int]
    loose_pipeline_calls: int
    tight_pipeline_calls: int
    forced_cuts: dict = field(default_factory=dict)  # edge -> ForcedCut of H_e
    alphas: dict = field(default_factory=dict)

    @property
    def fstar(self) -> int:
        return self.flow.value

    @property
    def vital_edges(self) -> set[int]:
        return {c.edge for c in self.classes if c.vital}

    @property
    def tight(self) -> set[int]:
        return {c.edge for c in self.classes if c.kind == TIGHT}

    @property
    def loose(self) -> set[int]:
        return {c.edge for c in self.classes if c.kind == LOOSE}

    @property
    def vitalities(self) -> list[int]:
        return [c.vitality for c in self.classes]

    def __getitem__(self, e: int) -> EdgeClass:
        return self.classes[e]

    def to_json(self) -> list[dict]:
        return [c.to_json(self.net) for c in self.classes]


class _Analyzer:
    """Memoized per-edge forced cuts and flow-along-edge values."""

    def __init__(self, net: FlowNetwork, flow: FlowAssignment | None = None):
        self.net = net
        self.flow = flow if flow is not None else max_flow(net)
        self.cuts: dict[int, ForcedCut] = {}
        self.alphas: dict[int, int] = {}

    def testable(self, e: int) -> bool:
        """Only edges carrying flow can be vital; edges out of t or into s never contribute."""
        net = self.net
        return self.flow.flows[e] > 0 and net.tails[e] != net.t and net.heads[e] != net.s

    def forced_cut(self, e: int) -> ForcedCut:
        if e not in self.cuts:
            net = self.net
            self.cuts[e] = min_cut_with(net, {net.tails[e]}, {net.heads[e]}, warm=self.flow.flows)
        return self.cuts[e]

    def is_vital(self, e: int) -> bool:
        return self.forced_cut(e).raw - self.net.eff_caps[e] < self.flow.value

    def alpha(self, e: int) -> int:
        if e not in self.alphas:
            if self.flow.flows[e] == self.net.eff_caps[e]:
                self.alphas[e] = self.flow.flows[e]
            else:
                self.alphas[e] = max_flow_along_edge(self.net, e, self.flow)[0]
        return self.alphas[e]

    def classify(self, e: int, kind: str) -> EdgeClass:
        cut = self.forced_cut(e)
        vitality = self.flow.value - (cut.raw - self.net.eff_caps[e])
        return EdgeClass(e, kind, vitality, cut.raw, self.net.cut(cut.source_side))


def mincut_for_edge(net: FlowNetwork, e: int, flow: FlowAssignment | None = None) -> tuple[int, STCut]:
    """Least cut with e contributing, vital or not: (raw capacity, cut)."""
    if not 0 <= e < net.m:
        raise VitalCutError(f"unknown edge {e}")
    u, v = net.tails[e], net.heads[e]
    if u == net.t or v == net.s:
        raise VitalCutError("edge never contributes to an (s,t)-cut")
    cut = min_cut_with(net, {u}, {v}, warm=flow.flows if flow is not None else None)
    return cut.raw, net.cut(cut.source_side)


def loose_candidates(net: FlowNetwork, flow: FlowAssignment | Sequence[int]) -> set[int]:
    """At most n-1 partially saturated edges containing every loose edge."""
    flows = list(flow.flows if isinstance(flow, FlowAssignment) else flow)
    check_feasible(net, flows)
    caps = net.eff_caps
    forest = FlowCycleForest(net)
    for e in range(net.m):
        if not 0 < flows[e] < caps[e]:
            continue
        cycle = forest.insert(e)
        if cycle is None:
            continue
        evict, _ = pick_non_loose(flows, caps, cycle)
        if evict != e:
            forest.remove(evict, keeps_connectivity=True)
            forest.add_closing(e)
    return set(forest.edge_ids)


def redistribute_cycle(net: FlowNetwork, flow: FlowAssignment, cycle: Sequence[int]):
    """Circulate flow around a partial cycle until one edge is zero or saturated."""
    target, flows = redistribute(net, flow.flows, cycle)
    return target, FlowAssignment(tuple(flows), flow.value)


def _tight_from(an: _Analyzer) -> dict[int, EdgeClass]:
    out = {}
    for e in range(an.net.m):
        if not an.testable(e) or not an.is_vital(e):
            continue
        if an.alpha(e) == an.net.eff_caps[e]:
            out[e] = an.classify(e, TIGHT)
    return out


def _loose_from(an: _Analyzer, candidates: set[int]) -> dict[int, EdgeClass]:
    out = {}
    for e in sorted(candidates):
        if not an.testable(e) or not an.is_vital(e):
            continue
        if an.alpha(e) < an.net.eff_caps[e]:
            out[e] = an.classify(e, LOOSE)
    return out


def tight_edges(net: FlowNetwork) -> dict[int, EdgeClass]:
    return _tight_from(_Analyzer(net))


def loose_edges(net: FlowNetwork) -> dict[int, EdgeClass]:
    an = _Analyzer(net)
    return _loose_from(an, loose_candidates(net, an.flow))


def all_vital_edges(net: FlowNetwork) -> VitalAnalysis:
    with count_maxflows() as loose_count:
        an = _Analyzer(net)
        candidates = loose_candidates(net, an.flow)
        loose = _loose_from(an, candidates)
    with count_maxflows() as tight_count:
        tight = _tight_from(an)
    if set(loose) & set(tight):
        raise VitalCutError("an edge was classified both tight and loose")
    classes = []
    for e in range(net.m):
        if e in loose:
            classes.append(loose[e])
        elif e in tight:
            classes.append(tight[e])
        else:
            classes.append(EdgeClass(e, NONVITAL, 0))
    return VitalAnalysis(
        net,
        an.flow,
        classes,
        candidates,
        loose_count.calls,
        tight_count.calls,
        dict(an.cuts),
        dict(an.alphas),
    )


def verify_genflowcut(net: FlowNetwork, e: int, cut, vitality: int | None = None) -> bool:
    """Is ``cut`` a mincut for the vital edge e?

    Lower w(e) to its vitality and take one maximum flow: the cut is a mincut
    for e iff that flow saturates its contributing edges and leaves its
    incoming edges empty.
    """
    side = frozenset(cut.source_side if isinstance(cut, STCut) else cut)
    if not (net.tails[e] in side and net.heads[e] not in side):
        raise VitalCutError("edge does not contribute to the cut")
    base = max_flow(net)
    if vitality is None:
        vitality = base.value - max_flow(net.without(e)).value
    if vitality <= 0:
        raise VitalCutError("edge is not vital")
    lowered = net.with_capacity(e, vitality)
    flow = max_flow(lowered)
    if flow.value != base.value:
        return False
    caps = lowered.eff_caps
    for x in range(net.m):
        a, b = net.tails[x] in side, net.heads[x] in side
        if a and not b and flow.flows[x] != caps[x]:
            return False
        if b and not a and flow.flows[x] != 0:
            return False
    return True


def kth_most_vital(source, k: int) -> int:
    """Edge with the k-th largest vitality, ties broken by smaller edge id."""
    analysis = source if isinstance(source, VitalAnalysis) else all_vital_edges(source)
    m = len(analysis.classes)
    if not 1 <= k <= m:
        raise VitalCutError(f"k must lie in 1..{m}")
    best = heapq.nsmallest(k, ((-c.vitality, c.edge) for c in analysis.classes))
    return best[-1][1]
