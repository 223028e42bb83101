"""Fixture graphs and seeded random networks.

Vertex layout shared by the bipartite fixtures: ``s`` is 0, the left
vertices ``u_1..u_n`` are ``1..n``, the right vertices ``v_1..v_n`` are
``n+1..2n`` and ``t`` is ``2n+1``.  :func:`left` and :func:`right` map the
1-based fixture indices to vertex ids.
"""

from __future__ import annotations

import random
from typing import Sequence

from .graph import INF, FlowNetwork, VitalCutError


class GeneratorError(VitalCutError):
    pass


def left(i: int) -> int:
    return i


def right(n: int, j: int) -> int:
    return n + j


def _bipartite_names(n: int) -> list[str]:
    return ["s"] + [f"u{i}" for i in range(1, n + 1)] + [f"v{j}" for j in range(1, n + 1)] + ["t"]


def gen_path(caps: Sequence[int]) -> FlowNetwork:
    """Path s -> x_1 -> ... -> t with the given capacities."""
    if not caps:
        raise GeneratorError("path needs at least one edge")
    n = len(caps) + 1
    return FlowNetwork(n, 0, n - 1, [(i, i + 1, c) for i, c in enumerate(caps)])


def gen_p4() -> FlowNetwork:
    """s -> a -> b -> t with capacities 5, 3, 7."""
    return FlowNetwork(4, 0, 3, [(0, 1, 5), (1, 2, 3), (2, 3, 7)], ["s", "a", "b", "t"])


def gen_gsq(n: int, weights: Sequence[Sequence[int]] | Sequence[int]) -> FlowNetwork:
    """Unit edges s->u_i and v_j->t, middle edge u_i->v_j of weight w_ij >= n^2."""
    flat = _flatten(weights, n)
    if len(set(flat)) != len(flat):
        raise GeneratorError("weights must be pairwise distinct")
    if any(w < n * n for w in flat):
        raise GeneratorError("every weight must be at least n^2")
    edges = [(0, left(i), 1) for i in range(1, n + 1)]
    edges += [(right(n, j), 2 * n + 1, 1) for j in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            edges.append((left(i), right(n, j), flat[(i - 1) * n + (j - 1)]))
    return FlowNetwork(2 * n + 2, 0, 2 * n + 1, edges, _bipartite_names(n))


def gen_gm(matrix: Sequence[Sequence[int]]) -> FlowNetwork:
    """INF edges s->u_i and v_j->t, middle edge u_i->v_j of capacity M[i][j]."""
    n = len(matrix)
    flat = _flatten(matrix, n)
    if any(x < 1 for x in flat):
        raise GeneratorError("matrix entries must be positive")
    edges = [(0, left(i), INF) for i in range(1, n + 1)]
    edges += [(right(n, j), 2 * n + 1, INF) for j in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            edges.append((left(i), right(n, j), flat[(i - 1) * n + (j - 1)]))
    return FlowNetwork(2 * n + 2, 0, 2 * n + 1, edges, _bipartite_names(n))


def gen_appendixE(n: int, c: int = 2) -> FlowNetwork:
    """s->u_i of n^2, v_j->t of n, every u_i->v_j of n^c."""
    if n < 2 or c < 2:
        raise GeneratorError("need n >= 2 and c >= 2")
    edges = [(0, left(i), n * n) for i in range(1, n + 1)]
    edges += [(right(n, j), 2 * n + 1, n) for j in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            edges.append((left(i), right(n, j), n**c))
    return FlowNetwork(2 * n + 2, 0, 2 * n + 1, edges, _bipartite_names(n))


def appendixE_flow(net: FlowNetwork) -> list[int]:
    """The maximum flow sending one unit along every middle edge."""
    n = (net.n - 2) // 2
    flows = []
    for u, v, _ in net.triples():
        if u == net.s or v == net.t:
            flows.append(n)
        else:
            flows.append(1)
    return flows


def gen_appendixF(n: int) -> FlowNetwork:
    """Zigzag graph on 2n+2 vertices with the u_i -> u_{i+1} chain."""
    if n < 2:
        raise GeneratorError("need n >= 2")
    t = 2 * n + 1
    edges = [(0, left(i), n) for i in range(1, n + 1)]
    edges += [(right(n, i), t, n + 1) for i in range(1, n + 1)]
    edges += [(left(i), right(n, i), n + 1) for i in range(1, n + 1)]
    edges += [(left(i), left(i + 1), n - i) for i in range(1, n)]
    edges += [(right(n, i + 1), left(i), i) for i in range(1, n)]
    return FlowNetwork(2 * n + 2, 0, t, edges, _bipartite_names(n))


def undirected(pairs) -> list[tuple]:
    """Each undirected edge becomes u->v (even id) and v->u (odd id)."""
    out = []
    for u, v, c in pairs:
        out += [(u, v, c), (v, u, c)]
    return out


def gen_appendixD() -> FlowNetwork:
    """Undirected six-vertex graph s,a,b,c,d,t with parallel unit edges into t.

    Edge 2k is the forward copy of the k-th listed edge: (s,a)=0, (s,b)=2,
    (a,b)=4, (a,c)=6, (b,d)=8.
    """
    s, a, b, c, d, t = range(6)
    pairs = [(s, a, 5), (s, b, 3), (a, b, 2), (a, c, 7), (b, d, 2)]
    pairs += [(c, t, 1)] * 7 + [(d, t, 1)] * 3
    return FlowNetwork(6, s, t, undirected(pairs), ["s", "a", "b", "c", "d", "t"])


def gen_db(bip: Sequence[Sequence[int]]) -> FlowNetwork:
    """Unit-capacity DAG built from an n x n bipartite 0/1 adjacency."""
    n = len(bip)
    if any(len(row) != n for row in bip):
        raise GeneratorError("bipartite adjacency must be square")
    t = 2 * n + 1
    edges = []
    for i in range(1, n + 1):
        edges += [(0, left(i), 1)] * sum(1 for x in bip[i - 1] if x)
    for j in range(1, n + 1):
        edges += [(right(n, j), t, 1)] * sum(1 for i in range(n) if bip[i][j - 1])
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if bip[i - 1][j - 1]:
                edges.append((left(i), right(n, j), 1))
    for v in range(1, 2 * n + 1):
        edges += [(0, v, 1), (v, t, 1)]
    return FlowNetwork(2 * n + 2, 0, t, edges, _bipartite_names(n))


def random_network(
    seed: int,
    n: int,
    m: int,
    max_cap: int = 50,
    *,
    min_cap: int = 1,
) -> FlowNetwork:
    """Seeded Erdos-Renyi style multigraph with s = 0 and t = n - 1."""
    if n < 2:
        raise GeneratorError("need n >= 2")
    rng = random.Random(seed)
    edges = []
    for _ in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n - 1)
        if v >= u:
            v += 1
        edges.append((u, v, rng.randint(min_cap, max_cap)))
    return FlowNetwork(n, 0, n - 1, edges)


def random_suite(count: int = 200, seed: int = 0, max_n: int = 12, max_m: int = 40, max_cap: int = 50):
    """Seeded list of small random networks used by the oracle tests."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = rng.randint(3, max_n)
        m = rng.randint(n, max_m)
        out.append(random_network(rng.randrange(2**32), n, m, max_cap))
    return out


def _flatten(rows, n: int) -> list[int]:
    if rows and isinstance(rows[0], (list, tuple)):
        flat = [x for row in rows for x in row]
    else:
        flat = list(rows)
    if n < 1 or len(flat) != n * n:
        raise GeneratorError("expected an n x n matrix")
    return flat
