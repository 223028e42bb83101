import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vitalcut import generators
from vitalcut.graph import INF, FlowNetwork, UnboundedFlowError, VitalCutError
from vitalcut.maxflow import (
    FlowError,
    acyclic_sparse_max_flow,
    cancel_flow_cycles,
    check_feasible,
    count_maxflows,
    is_maximum,
    max_flow,
    max_flow_along_edge,
    min_cut_with,
    min_flow_along_edge,
    mincut_capacity_with,
    partial_edges,
    residual_reach_from,
)
from vitalcut.oracle import oracle_max_alpha, oracle_max_flow_raw


def networkx_value(net: FlowNetwork) -> int:
    g = nx.DiGraph()
    g.add_nodes_from(range(net.n))
    for u, v, c in zip(net.tails, net.heads, net.eff_caps):
        if g.has_edge(u, v):
            g[u][v]["capacity"] += c
        else:
            g.add_edge(u, v, capacity=c)
    return nx.maximum_flow_value(g, net.s, net.t)


def test_gm_value():
    assert max_flow(generators.gen_gm([[1, 2], [3, 4]])).value == 10


def test_unbounded_flow_raises():
    net = FlowNetwork(3, 0, 2, [(0, 1, INF), (1, 2, INF)])
    with pytest.raises(UnboundedFlowError):
        max_flow(net)


def test_matches_oracle_and_networkx(suite):
    for i in range(0, len(suite), 4):
        net = suite.nets[i]
        flow = max_flow(net)
        assert flow.value == oracle_max_flow_raw(net) == networkx_value(net)
        assert check_feasible(net, flow.flows) == flow.value
        assert is_maximum(net, flow.flows)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 30), st.integers(0, 90))
def test_dinic_property(seed, n, m):
    net = generators.random_network(seed, n, m)
    flow = max_flow(net)
    assert flow.value == networkx_value(net)
    side = residual_reach_from(net, flow.flows, [net.s])
    assert net.raw_cut_capacity(side) == flow.value


def test_warm_start_keeps_value():
    net = generators.random_network(11, 10, 30)
    base = max_flow(net)
    assert max_flow(net, init=base.flows).flows == base.flows
    with pytest.raises(FlowError):
        max_flow(net, init=[10**6] * net.m)


def test_counter_nests():
    net = generators.gen_p4()
    with count_maxflows() as outer:
        max_flow(net)
        with count_maxflows() as inner:
            max_flow(net)
    assert (outer.calls, inner.calls) == (2, 1)


def test_forced_cut_appendixE():
    net = generators.gen_appendixE(3, 2)
    u1, v2 = generators.left(1), generators.right(3, 2)
    assert mincut_capacity_with(net, {v2}, {u1}) == 18


def test_forced_cut_matches_oracle(suite):
    for i in range(0, len(suite), 5):
        net, cat = suite.nets[i], suite.catalog(i)
        base = max_flow(net)
        for e in range(net.m):
            u, v = net.tails[e], net.heads[e]
            if u == net.t or v == net.s:
                continue
            cut = min_cut_with(net, {u}, {v}, warm=base.flows)
            assert cut.raw == cat.lam_raw[e]
            assert u in cut.source_side and v not in cut.source_side
            assert net.raw_cut_capacity(cut.source_side) == cut.raw


def test_forcing_rejects_terminals():
    net = generators.gen_p4()
    with pytest.raises(VitalCutError):
        min_cut_with(net, {net.t}, set())
    with pytest.raises(VitalCutError):
        min_cut_with(net, {1}, {1})


def test_flow_along_edge_appendixE():
    net = generators.gen_appendixE(3, 2)
    e = next(x for x in range(net.m) if net.tails[x] == 1 and net.heads[x] == generators.right(3, 1))
    alpha, flow = max_flow_along_edge(net, e)
    assert alpha == 3
    assert flow.flows[e] == 3 and is_maximum(net, flow.flows)


def test_flow_along_edge_matches_oracle(suite):
    checked = 0
    for i in range(0, 60, 3):
        net = suite.nets[i]
        if net.n > 10:
            continue
        for e in range(0, net.m, 3):
            alpha, flow = max_flow_along_edge(net, e)
            assert alpha == oracle_max_alpha(net, e)
            assert check_feasible(net, flow.flows) == max_flow(net).value
            checked += 1
    assert checked > 20


def test_min_flow_along_edge():
    gm = generators.gen_gm([[1, 2], [3, 4]])
    assert [min_flow_along_edge(gm, e) for e in range(4, 8)] == [1, 2, 3, 4]
    # an edge entering a mincut for a vital edge never has to carry flow
    net = generators.gen_appendixD()
    assert min_flow_along_edge(net, 1) == 0


def test_min_flow_below_max_flow(suite):
    for i in range(0, len(suite), 10):
        net = suite.nets[i]
        base = max_flow(net)
        for e in range(net.m):
            assert min_flow_along_edge(net, e, base) <= max_flow_along_edge(net, e, base)[0]


def test_cancel_cycles():
    net = FlowNetwork(4, 0, 3, [(0, 1, 5), (1, 2, 5), (2, 1, 5), (1, 3, 5)])
    flows = cancel_flow_cycles(net, [2, 3, 3, 2])
    assert flows == [2, 0, 0, 2]


def test_acyclic_sparse_appendixE():
    net = generators.gen_appendixE(3, 2)
    start = generators.appendixE_flow(net)
    middle = {e for e in range(net.m) if net.tails[e] != net.s and net.heads[e] != net.t}
    assert middle <= set(partial_edges(net, start)) and len(middle) == 9
    out = acyclic_sparse_max_flow(net, start)
    assert out.value == 9 and is_maximum(net, out.flows)
    assert len(partial_edges(net, out.flows)) <= net.n - 1


def test_acyclic_sparse_rejects_nonmaximum():
    net = generators.gen_p4()
    with pytest.raises(FlowError):
        acyclic_sparse_max_flow(net, [1, 1, 1])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.integers(3, 14), st.integers(3, 45))
def test_acyclic_sparse_property(seed, n, m):
    net = generators.random_network(seed, n, m, max_cap=12)
    base = max_flow(net)
    out = acyclic_sparse_max_flow(net, base)
    assert out.value == base.value and is_maximum(net, out.flows)
    assert len(partial_edges(net, out.flows)) <= n - 1
    # no directed cycle among flow-carrying edges
    g = nx.DiGraph((net.tails[e], net.heads[e]) for e in range(net.m) if out.flows[e] > 0)
    assert nx.is_directed_acyclic_graph(g)

