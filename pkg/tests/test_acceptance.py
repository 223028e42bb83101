"""The thirteen acceptance criteria, one test each.

Every test records a "CRITERION k: PASS|FAIL detail" line that the terminal
summary prints in order.
"""

import math
import random
import statistics
import time

from conftest import ACCEPTANCE_LINES

from vitalcut import generators
from vitalcut.dvit import build_dvit, build_fvit, build_qprime, query_ifsubcut
from vitalcut.graph import FlowNetwork, GraphDelta
from vitalcut.maxflow import count_maxflows, max_flow
from vitalcut.oracle import enumerate_cuts, mask_to_set, oracle_steiner_mincuts
from vitalcut.pqdag import PQError, build_pq, construct_dpq_from_order, is_one_transversal, stored_cuts
from vitalcut.steiner import build_steiner_structure, build_svit, query_allcuts, query_allmincut
from vitalcut.tvit import build_labels, build_tvit, query_cap_labels
from vitalcut.vital import all_vital_edges, mincut_for_edge, verify_genflowcut


def report(k: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def all_sides(net):
    inner = [v for v in range(net.n) if v not in (net.s, net.t)]
    for bits in range(1 << len(inner)):
        yield frozenset([net.s] + [inner[j] for j in range(len(inner)) if bits >> j & 1])


def every_network(suite, fixtures):
    for lazy in (suite, fixtures):
        for i in lazy:
            yield lazy, i


def test_criterion_01_vital_edges_match_oracle(suite, fixtures):
    start = time.perf_counter()
    graphs = mismatches = 0
    for lazy, i in every_network(suite, fixtures):
        net = lazy.nets[i]
        an = all_vital_edges(net)
        cat = enumerate_cuts(net)
        graphs += 1
        if an.vital_edges != cat.vital_edges or an.vitalities != list(cat.vitality):
            mismatches += 1
    elapsed = time.perf_counter() - start
    report(1, mismatches == 0 and elapsed < 60, f"{graphs} graphs, {mismatches} mismatches, {elapsed:.1f}s")


def test_criterion_02_mincut_values(suite, fixtures):
    tight = bad = 0
    for lazy, i in every_network(suite, fixtures):
        an, cat = lazy.analysis(i), lazy.catalog(i)
        for e in an.tight:
            tight += 1
            bad += an[e].lam_raw != cat.lam_raw[e]
    middle = 0
    for n in (2, 3, 4):
        weights = random.Random(n).sample(range(n * n, n * n + 200), n * n)
        net = generators.gen_gsq(n, weights)
        for e in range(2 * n, net.m):
            middle += 1
            bad += mincut_for_edge(net, e)[0] != net.eff_caps[e] + 2 * n - 2
    report(2, bad == 0, f"{tight} tight edges and {middle} gsq middle edges, {bad} wrong")


def test_criterion_03_loose_bound(suite, fixtures):
    worst = 0
    ok = True
    for lazy, i in every_network(suite, fixtures):
        net, an = lazy.nets[i], lazy.analysis(i)
        ok &= len(an.loose) <= max(net.n - 2, 0)
        worst = max(worst, len(an.loose) - (net.n - 2))
    for k in range(3, 12):
        caps = random.Random(k).sample(range(1, 1000), k)
        net = generators.gen_path(caps)
        ok &= len(all_vital_edges(net).loose) == net.n - 2
    report(3, ok, f"max |Loose| - (n-2) = {worst}; distinct-capacity paths give n-2")


def test_criterion_04_cover(suite, fixtures):
    ok = True
    checked = 0
    for lazy, i in every_network(suite, fixtures):
        net, an, cat = lazy.nets[i], lazy.analysis(i), lazy.catalog(i)
        tree = build_tvit(net, an)
        ok &= len(tree.internal_nodes) <= max(net.n - 1, 0)
        for e in an.vital_edges:
            side = tree.cut[tree.lca_node(net.tails[e], net.heads[e])].source_side
            ok &= side in cat.mincut_sets_for(e)
            checked += 1
    for k in range(2, 10):
        net = generators.gen_path(list(range(10, 10 + k)))
        ok &= len(build_tvit(net).internal_nodes) == net.n - 1
    report(4, ok, f"{checked} lca cuts verified; paths hit n-1")


def timing_network(n: int, seed: int) -> FlowNetwork:
    """Sparse random graph; s has three low-capacity edges so the build stays quick."""
    rng = random.Random(seed)
    edges = [(0, rng.randrange(1, n - 1), rng.randint(1, 3)) for _ in range(3)]
    for _ in range(3 * n):
        u, v = rng.randrange(1, n), rng.randrange(1, n)
        if u != v:
            edges.append((u, v, rng.randint(1, 50)))
    return FlowNetwork(n, 0, n - 1, edges)


def per_query_seconds(n: int) -> float:
    net = timing_network(n, n)
    tree = build_tvit(net)
    rng = random.Random(1)
    probes = [(net.tails[e], net.heads[e], net.eff_caps[e]) for e in (rng.randrange(net.m) for _ in range(20000))]
    runs = []
    for _ in range(5):
        start = time.perf_counter()
        for x, y, w in probes:
            tree.query_cap(x, y, w, -1)
        runs.append((time.perf_counter() - start) / len(probes))
    return min(runs)


def test_criterion_05_sensitivity_queries(suite):
    wrong = queries = 0
    for i in suite:
        net, an = suite.nets[i], suite.analysis(i)
        tree = build_tvit(net, an, insert_oracle=True)
        for e in range(net.m):
            w = net.eff_caps[e]
            for delta in sorted({-w, -1, 0, 1, 7}):
                if delta < -w:
                    continue
                queries += 1
                wrong += tree.query_edge(e, delta) != max_flow(GraphDelta(e, delta).apply(net)).value
        rng = random.Random(i)
        for _ in range(5):
            u, v = rng.sample(range(net.n), 2)
            if u == net.t or v == net.s:
                continue
            for cap in (1, 7):
                queries += 1
                got = tree.insert_oracle.query_insert(u, v, cap)[0]
                wrong += got != max_flow(net.plus_edges([(u, v, cap)])).value
    times = {n: per_query_seconds(n) for n in (100, 1000, 10000)}
    ratio = max(times.values()) / min(times.values())
    detail = ", ".join(f"n={n}: {t * 1e6:.2f}us" for n, t in times.items())
    report(5, wrong == 0 and ratio < 3, f"{queries} queries, {wrong} wrong; {detail}; ratio {ratio:.2f}")


def test_criterion_06_genflowcut(suite):
    rng = random.Random(6)
    accepted = rejected = bad = 0
    pool = []
    for i in suite:
        net, cat = suite.nets[i], suite.catalog(i)
        for e in cat.vital_edges:
            mincuts = cat.mincut_sets_for(e)
            for side in mincuts:
                accepted += 1
                bad += not verify_genflowcut(net, e, side, cat.vitality[e])
            for m in cat.relevant_masks(e):
                side = mask_to_set(m)
                if side not in mincuts:
                    pool.append((i, e, side))
    for i, e, side in rng.sample(pool, 1000):
        rejected += 1
        bad += verify_genflowcut(suite.nets[i], e, side, suite.catalog(i).vitality[e])
    report(6, bad == 0, f"{accepted} mincuts accepted, {rejected} non-mincuts probed, {bad} wrong")


def test_criterion_07_pq_characterization(suite):
    bad = checked = 0
    for i in suite:
        net, cat = suite.nets[i], suite.catalog(i)
        dag = build_pq(net)
        mincuts = cat.mincut_sets()
        for side in all_sides(net):
            try:
                stored = is_one_transversal(dag, side)
            except PQError:
                stored = False
            checked += 1
            bad += stored != (side in mincuts)
    rng = random.Random(7)
    db_ok = True
    for _ in range(20):
        n = rng.randint(2, 4)
        B = [[rng.randint(0, 1) for _ in range(n)] for _ in range(n)]
        net = generators.gen_db(B)
        dag = build_pq(net)
        got = sorted((dag.nodes()[a][0], dag.nodes()[b][0], e) for a, b, e in dag.edges)
        db_ok &= dag.num_nodes == net.n
        db_ok &= got == sorted((net.heads[e], net.tails[e], e) for e in range(net.m))
        db_ok &= construct_dpq_from_order(net, dag.record()).same_as(dag)
        fstar = max_flow(net).value
        triples = net.triples()
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                a = max(x for x, (u, v, _) in enumerate(triples) if u == 0 and v == generators.left(i))
                b = max(x for x, (u, v, _) in enumerate(triples) if (u, v) == (generators.right(n, j), net.t))
                kept = [tr for x, tr in enumerate(triples) if x not in (a, b)]
                drop = fstar - max_flow(FlowNetwork(net.n, 0, net.t, kept)).value
                db_ok &= drop == (1 if B[i - 1][j - 1] else 2)
    report(7, bad == 0 and db_ok, f"{checked} cuts compared, {bad} wrong; gen_db identity and dual failures {'hold' if db_ok else 'broken'}")


def test_criterion_08_svit_completeness(suite):
    bad = edges = 0
    most_dags = 0
    for i in suite:
        net, cat = suite.nets[i], suite.catalog(i)
        store = build_svit(net, suite.analysis(i), with_insert=False, with_ties=False)
        for e in cat.vital_edges:
            edges += 1
            most_dags = max(most_dags, len(store.edge_records[e]))
            bad += set(stored_cuts(query_allcuts(store, e))) != cat.mincut_sets_for(e)
    net = generators.gen_appendixD()
    store = build_svit(net)
    family = set(stored_cuts(query_allcuts(store, 8)))
    tree = build_tvit(net)
    covered = tree.cut[tree.lca_node(net.tails[8], net.heads[8])].source_side
    missed = family - {covered}
    ok = bad == 0 and most_dags <= 2 and family == enumerate_cuts(net).mincut_sets_for(8) and len(missed) == 2
    report(8, ok, f"{edges} vital edges, {bad} wrong, at most {most_dags} DAGs per edge; (b,d) recovers {len(missed)} cuts beyond the cover")


def test_criterion_09_allmincut(suite):
    bad = queries = calls = 0
    seconds = 0.0
    for i in suite:
        net, an = suite.nets[i], suite.analysis(i)
        store = build_svit(net, an)
        tree = build_tvit(net, an)
        for e in range(net.m):
            w = net.eff_caps[e]
            for delta in sorted({-w, -1, 0, 1, 7}):
                if delta < -w:
                    continue
                with count_maxflows() as counter:
                    start = time.perf_counter()
                    got = query_allmincut(tree, store, e, delta)
                    seconds += time.perf_counter() - start
                calls += counter.calls
                queries += 1
                expected = build_pq(GraphDelta(e, delta).apply(net))
                bad += set(stored_cuts(got)) != set(stored_cuts(expected))
    report(9, bad == 0 and calls == 0, f"{queries} queries, {bad} wrong, {calls} maxflow calls, {seconds:.2f}s total query time")


def max_crossings(dag, side) -> int:
    nodes = dag.node_side(side)
    succ = {}
    for x in dag.live_edges:
        succ.setdefault(x.tail, []).append(x.head)
    best = 0

    def walk(a, seen, count):
        nonlocal best
        if a == dag.sink_node:
            best = max(best, count)
            return
        for b in succ.get(a, []):
            if b not in seen:
                walk(b, seen | {b}, count + ((a in nodes) != (b in nodes)))

    walk(dag.source_node, {dag.source_node}, 0)
    return best


def test_criterion_10_dvit(suite, fixtures):
    suite_ok = True
    graphs = 0
    for lazy, i in every_network(suite, fixtures):
        net, an, cat = lazy.nets[i], lazy.analysis(i), lazy.catalog(i)
        if not an.vital_edges:
            continue
        graphs += 1
        dvit = build_dvit(net, an)
        q_cat = enumerate_cuts(dvit.network())
        index = dvit.edge_index()
        suite_ok &= dvit.is_acyclic() and q_cat.fstar_raw == an.fstar
        for e in an.vital_edges:
            suite_ok &= index[e] in q_cat.vital_edges
            for side in cat.mincut_sets_for(e):
                nodes = dvit.node_side(side)
                suite_ok &= dvit.is_one_transversal(side)
                suite_ok &= dvit.node_of[net.tails[e]] in nodes and dvit.node_of[net.heads[e]] not in nodes
    transversality = {}
    after_ok = True
    for n in (3, 4, 5):
        net = generators.gen_appendixF(n)
        an = all_vital_edges(net)
        C = {0} | {generators.left(i) for i in range(1, n + 1)}
        transversality[n] = max_crossings(build_qprime(net, an), C)
        after_ok &= build_dvit(net, an).is_one_transversal(C)
    qprime_ok = all(transversality[n] >= 2 * n - 1 for n in transversality)
    detail = (
        f"{graphs} graphs {'hold' if suite_ok else 'break'} the D_vit invariants; "
        f"zigzag cut is 1-transversal after the transform: {after_ok}; "
        f"Q' transversality {transversality} vs required 2n-1 {({n: 2 * n - 1 for n in transversality})}"
    )
    report(10, suite_ok and after_ok and qprime_ok, detail)


def test_criterion_11_steiner(suite):
    rng = random.Random(11)
    pairs = bad = 0
    while pairs < 50:
        net = suite.nets[rng.randrange(len(suite))]
        S = rng.sample(range(net.n), rng.randint(2, min(5, net.n)))
        lam, cuts = oracle_steiner_mincuts(net, S)
        if not cuts:
            continue
        struct = build_steiner_structure(net, S)
        pairs += 1
        bad += struct.stored_family() != {c.source_side for c in cuts}
        bad += len(struct.dags) > 2 * len(S) - 2
    report(11, bad == 0, f"{pairs} (graph, S) pairs, {bad} wrong")


def test_criterion_12_farthest(suite):
    rng = random.Random(12)
    unique_ok = True
    probes = bad = 0
    edges = []
    for i in suite:
        net, cat, an = suite.nets[i], suite.catalog(i), suite.analysis(i)
        if not an.vital_edges:
            continue
        fvit = build_fvit(net, an)
        for e in an.vital_edges:
            cuts = cat.mincut_sets_for(e)
            maximal = [c for c in cuts if not any(c < d for d in cuts)]
            unique_ok &= len(maximal) == 1 and fvit.lca_cut(e).source_side == maximal[0]
            edges.append((net, fvit, cuts, e))
    for net, fvit, cuts, e in (rng.choice(edges) for _ in range(1000)):
        A = set(rng.sample(range(net.n), rng.randint(1, 3)))
        probes += 1
        bad += query_ifsubcut(fvit, A, e) != any(A <= side for side in cuts)
    report(12, unique_ok and bad == 0, f"unique farthest mincut on every instance: {unique_ok}; {probes} probes, {bad} wrong")


def test_criterion_13_labels(suite):
    bad = probes = 0
    for i in range(0, len(suite), 4):
        net = suite.nets[i]
        tree = build_tvit(net, suite.analysis(i))
        labels = build_labels(tree)
        for x in range(net.n):
            for y in range(net.n):
                if x != y:
                    for w, delta in ((5, -1), (5, -5), (0, 0)):
                        probes += 1
                        bad += query_cap_labels(labels[x], labels[y], w, delta) != tree.query_cap(x, y, w, delta)
    constants = {}
    rng = random.Random(13)
    for n in (16, 64, 256):
        net = generators.random_network(rng.randrange(2**32), n, 3 * n, max_cap=2**16)
        tree = build_tvit(net)
        labels = build_labels(tree)
        for e in range(net.m):
            x, y, w = net.tails[e], net.heads[e], net.eff_caps[e]
            probes += 1
            bad += query_cap_labels(labels[x], labels[y], w, -1) != tree.query_cap(x, y, w, -1)
        bits = max(label.bit_size() for label in labels.values())
        constants[n] = bits / (math.log2(n) ** 2 + math.log2(n) * 16)
    c = max(constants.values())
    detail = ", ".join(f"n={n}: c={v:.2f}" for n, v in constants.items())
    report(13, bad == 0 and c <= 64, f"{probes} probes, {bad} wrong; {detail}; c = {c:.2f}; median {statistics.median(constants.values()):.2f}")
