"""Exact maximum flows (Dinic), residual services and flow post-processing."""

from __future__ import annotations

import contextlib
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .forest import FlowCycleForest, redistribute
from .graph import INF, Capacity, FlowNetwork, UnboundedFlowError, VitalCutError


class FlowError(VitalCutError):
    pass


@dataclass(frozen=True)
class FlowAssignment:
    flows: tuple
    value: int

    def __getitem__(self, e: int) -> int:
        return self.flows[e]

    def to_json(self) -> dict:
        out = {str(e): f for e, f in enumerate(self.flows)}
        out["value"] = self.value
        return out


class MaxflowCounter:
    """Counts solver invocations made while it is active."""

    def __init__(self):
        self.calls = 0


_active_counters: list[MaxflowCounter] = []


@contextlib.contextmanager
def count_maxflows():
    counter = MaxflowCounter()
    _active_counters.append(counter)
    try:
        yield counter
    finally:
        _active_counters.remove(counter)


def _dinic(n, s, t, tails, heads, caps, init=None):
    """Dinic on arc arrays; returns (value, flows).  ``init`` warm-starts."""
    for counter in _active_counters:
        counter.calls += 1
    m = len(tails)
    res = [0] * (2 * m)
    to = [0] * (2 * m)
    adj: list[list[int]] = [[] for _ in range(n)]
    value = 0
    for i in range(m):
        u, v = tails[i], heads[i]
        f = init[i] if init is not None else 0
        res[2 * i] = caps[i] - f
        res[2 * i + 1] = f
        to[2 * i] = v
        to[2 * i + 1] = u
        adj[u].append(2 * i)
        adj[v].append(2 * i + 1)
        if u == s:
            value += f
        if v == s:
            value -= f
    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for a in adj[x]:
                y = to[a]
                if res[a] > 0 and level[y] < 0:
                    level[y] = level[x] + 1
                    queue.append(y)
        if level[t] < 0:
            break
        pos = [0] * n
        stack = [s]
        path: list[int] = []
        while stack:
            x = stack[-1]
            if x == t:
                push = min(res[a] for a in path)
                value += push
                cut_at = None
                for k, a in enumerate(path):
                    res[a] -= push
                    res[a ^ 1] += push
                    if res[a] == 0 and cut_at is None:
                        cut_at = k
                del path[cut_at:]
                del stack[cut_at + 1:]
                continue
            arcs = adj[x]
            i = pos[x]
            while i < len(arcs):
                a = arcs[i]
                y = to[a]
                if res[a] > 0 and level[y] == level[x] + 1:
                    break
                i += 1
            pos[x] = i
            if i == len(arcs):
                level[x] = -1
                stack.pop()
                if path:
                    path.pop()
                    pos[stack[-1]] += 1
            else:
                path.append(arcs[i])
                stack.append(to[arcs[i]])
    flows = [res[2 * i + 1] for i in range(m)]
    return value, flows


def solve(net: FlowNetwork, init: Sequence[int] | None = None) -> tuple[int, list[int]]:
    """Raw maximum flow on effective capacities (INF realized as ``net.big``)."""
    if init is not None:
        check_feasible(net, init)
    return _dinic(net.n, net.s, net.t, net.tails, net.heads, net.eff_caps, init)


def max_flow(net: FlowNetwork, init: Sequence[int] | None = None) -> FlowAssignment:
    value, flows = solve(net, init)
    if value >= net.big:
        raise UnboundedFlowError("an infinite-capacity s-t path exists")
    return FlowAssignment(tuple(flows), value)


def flow_value(net: FlowNetwork, flows: Sequence[int]) -> int:
    s = net.s
    return sum(f for e, f in enumerate(flows) if net.tails[e] == s) - sum(
        f for e, f in enumerate(flows) if net.heads[e] == s
    )


def check_feasible(net: FlowNetwork, flows: Sequence[int]) -> int:
    """Validate capacity and conservation constraints; returns the value."""
    if len(flows) != net.m:
        raise FlowError("flow has the wrong number of edges")
    caps = net.eff_caps
    excess = [0] * net.n
    for e, f in enumerate(flows):
        if not 0 <= f <= caps[e]:
            raise FlowError(f"edge {e}: flow {f} outside [0, {caps[e]}]")
        excess[net.tails[e]] -= f
        excess[net.heads[e]] += f
    for v in range(net.n):
        if v not in (net.s, net.t) and excess[v] != 0:
            raise FlowError(f"vertex {v}: flow not conserved")
    return -excess[net.s]


def residual_reach_from(net: FlowNetwork, flows: Sequence[int], sources: Iterable[int]) -> set[int]:
    """Vertices reachable from ``sources`` in the residual graph."""
    caps = net.eff_caps
    seen = set(sources)
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for e in net.out_edges[x]:
            y = net.heads[e]
            if flows[e] < caps[e] and y not in seen:
                seen.add(y)
                queue.append(y)
        for e in net.in_edges[x]:
            y = net.tails[e]
            if flows[e] > 0 and y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def residual_reach_to(net: FlowNetwork, flows: Sequence[int], targets: Iterable[int]) -> set[int]:
    """Vertices that reach ``targets`` in the residual graph."""
    caps = net.eff_caps
    seen = set(targets)
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for e in net.in_edges[x]:
            y = net.tails[e]
            if flows[e] < caps[e] and y not in seen:
                seen.add(y)
                queue.append(y)
        for e in net.out_edges[x]:
            y = net.heads[e]
            if flows[e] > 0 and y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def is_maximum(net: FlowNetwork, flows: Sequence[int]) -> bool:
    return net.t not in residual_reach_from(net, flows, [net.s])


def _check_forcing(net: FlowNetwork, force_s, force_t) -> tuple[set, set]:
    force_s, force_t = set(force_s), set(force_t)
    for x in force_s | force_t:
        if not 0 <= x < net.n:
            raise VitalCutError(f"vertex {x} out of range")
    if force_s & force_t:
        raise VitalCutError("forced sets overlap")
    if net.t in force_s:
        raise VitalCutError("sink cannot be forced to the source side")
    if net.s in force_t:
        raise VitalCutError("source cannot be forced to the sink side")
    return force_s, force_t


@dataclass(frozen=True)
class ForcedCut:
    """Least (s,t)-cut subject to forcing, in raw units of the base network."""

    raw: int
    source_side: frozenset
    flows: tuple  # maximum flow of the forced network (base edges first)

    def capacity(self, net: FlowNetwork) -> Capacity:
        return INF if self.raw >= net.big else self.raw


def min_cut_with(
    net: FlowNetwork,
    force_s: Iterable[int] = (),
    force_t: Iterable[int] = (),
    warm: Sequence[int] | None = None,
) -> ForcedCut:
    """Maximum flow on ``net`` plus INF forcing edges; nearest least cut.

    ``warm`` is a feasible flow of ``net`` used as the starting point.
    """
    force_s, force_t = _check_forcing(net, force_s, force_t)
    forced = net.forced(force_s, force_t)
    init = None
    if warm is not None:
        init = list(warm) + [0] * (forced.m - net.m)
    value, flows = solve(forced, init)
    side = frozenset(residual_reach_from(forced, flows, [net.s]))
    return ForcedCut(value, side, tuple(flows))


def mincut_capacity_with(net: FlowNetwork, force_s: Iterable[int] = (), force_t: Iterable[int] = ()) -> Capacity:
    return min_cut_with(net, force_s, force_t).capacity(net)


def max_flow_along_edge(net: FlowNetwork, e: int, base: FlowAssignment | None = None):
    """Largest flow ``e`` can carry in a maximum flow, with such a flow.

    Auxiliary network: new terminals s', t'; s'->s and t->t' of capacity f*;
    e replaced by u->t' and s'->v of capacity w(e).  Warm-started from a
    maximum flow of ``net``.
    """
    if not 0 <= e < net.m:
        raise VitalCutError(f"unknown edge {e}")
    if base is None:
        base = max_flow(net)
    fstar = base.value
    n = net.n
    s2, t2 = n, n + 1
    u, v, w = net.tails[e], net.heads[e], net.eff_caps[e]
    tails = list(net.tails) + [s2, net.t, u, s2]
    heads = list(net.heads) + [net.s, t2, t2, v]
    caps = list(net.eff_caps) + [fstar, fstar, w, w]
    caps[e] = 0
    init = list(base.flows) + [fstar, fstar, base.flows[e], base.flows[e]]
    init[e] = 0
    _, flows = _dinic(n + 2, s2, t2, tails, heads, caps, init)
    alpha = flows[net.m + 3]
    if flows[net.m + 2] != alpha or flows[net.m] != fstar or flows[net.m + 1] != fstar:
        raise FlowError("auxiliary flow lost terminal saturation")
    out = flows[: net.m]
    out[e] = alpha
    return alpha, FlowAssignment(tuple(out), fstar)


def min_flow_along_edge(net: FlowNetwork, e: int, base: FlowAssignment | None = None) -> int:
    """Drop in f* when e is removed."""
    if not 0 <= e < net.m:
        raise VitalCutError(f"unknown edge {e}")
    if base is None:
        base = max_flow(net)
    return base.value - max_flow(net.without(e)).value


def cancel_flow_cycles(net: FlowNetwork, flows: Sequence[int]) -> list[int]:
    """Remove every directed cycle of flow-carrying edges."""
    flows = list(flows)
    while True:
        cycle = _find_flow_cycle(net, flows)
        if cycle is None:
            return flows
        push = min(flows[e] for e in cycle)
        for e in cycle:
            flows[e] -= push


def _find_flow_cycle(net: FlowNetwork, flows: Sequence[int]) -> list[int] | None:
    state = [0] * net.n  # 0 new, 1 on stack, 2 done
    for root in range(net.n):
        if state[root]:
            continue
        state[root] = 1
        stack = [(root, iter(net.out_edges[root]))]
        via: list[int] = []
        while stack:
            x, it = stack[-1]
            advanced = False
            for e in it:
                if flows[e] <= 0:
                    continue
                y = net.heads[e]
                if state[y] == 1:
                    cycle = [e]
                    k = len(stack) - 1
                    while stack[k][0] != y:
                        cycle.append(via[k - 1])
                        k -= 1
                    return cycle
                if state[y] == 0:
                    state[y] = 1
                    stack.append((y, iter(net.out_edges[y])))
                    via.append(e)
                    advanced = True
                    break
            if not advanced:
                state[x] = 2
                stack.pop()
                if via:
                    via.pop()
    return None


def partial_edges(net: FlowNetwork, flows: Sequence[int]) -> list[int]:
    caps = net.eff_caps
    return [e for e in range(net.m) if 0 < flows[e] < caps[e]]


def acyclic_sparse_max_flow(net: FlowNetwork, flow: FlowAssignment | Sequence[int]) -> FlowAssignment:
    """Maximum flow with no flow cycle and a forest of partial edges."""
    flows = list(flow.flows if isinstance(flow, FlowAssignment) else flow)
    value = check_feasible(net, flows)
    if not is_maximum(net, flows):
        raise FlowError("flow is not maximum")
    flows = cancel_flow_cycles(net, flows)
    caps = net.eff_caps
    forest = FlowCycleForest(net)
    for e in partial_edges(net, flows):
        cycle = forest.insert(e)
        if cycle is None:
            continue
        _, flows = redistribute(net, flows, cycle)
        forest.add_closing(e)
        for c in cycle:
            if not 0 < flows[c] < caps[c]:
                forest.remove(c, keeps_connectivity=True)
        forest.rebuild_sets()
    return FlowAssignment(tuple(flows), value)
