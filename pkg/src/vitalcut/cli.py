"""Command-line front end.

Vertices are 1-based on the command line and in every report, matching the
DIMACS input. Edge ids are 0-based positions in the input arc list.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import generators
from .dvit import build_dvit, farthest_mincut
from .graph import FlowNetwork, ParseError, STCut, VitalCutError, cap_json, parse_network, serialize_network
from .maxflow import max_flow, residual_reach_from
from .oracle import ENUMERATION_LIMIT, enumerate_cuts, mask_to_set
from .pqdag import PQDag, build_pq, stored_cuts
from .steiner import build_steiner_structure, build_svit, query_allcuts, query_allmincut
from .tvit import InsertOracle, TvitTree, build_insert_oracle, build_tvit
from .vital import all_vital_edges

SCHEMA = "vitalcut/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _side(side) -> list[int]:
    return sorted(v + 1 for v in side)


def _cut_json(net: FlowNetwork, cut: STCut) -> dict:
    return {"source_side": _side(cut.source_side), "capacity": cap_json(cut.capacity)}


def _dag_json(dag: PQDag) -> dict:
    nodes: list[list[int]] = [[] for _ in range(dag.num_nodes)]
    for v, a in enumerate(dag.node_of):
        nodes[a].append(v + 1)
    return {
        "nodes": nodes,
        "sink_node": dag.sink_node,
        "source_node": dag.source_node,
        "edges": [list(x) for x in dag.edges],
    }


def _read_network(path: str, max_n: int | None) -> FlowNetwork:
    text = sys.stdin.read() if path == "-" else _read_text(path)
    net = parse_network(text)
    if max_n is not None and net.n > max_n:
        raise VitalCutError(f"graph has {net.n} vertices, limit is {max_n}")
    return net


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise VitalCutError(f"cannot read {path}: {exc.strerror}") from None


def _edge_arg(net: FlowNetwork, e: int | None) -> int:
    if e is None:
        raise UsageError("--edge is required")
    if not 0 <= e < net.m:
        raise VitalCutError(f"edge {e} out of range 0..{net.m - 1}")
    return e


def _vertex_arg(net: FlowNetwork, v: int) -> int:
    if not 1 <= v <= net.n:
        raise VitalCutError(f"vertex {v} out of range 1..{net.n}")
    return v - 1


def _emit(args, payload: dict, text: str) -> str:
    if args.json:
        return json.dumps({"schema": SCHEMA, **payload}, sort_keys=True, indent=1)
    return text


def cmd_analyze(args) -> str:
    net = _read_network(args.input, args.max_n)
    an = all_vital_edges(net)
    mincut = net.cut(residual_reach_from(net, an.flow.flows, [net.s]))
    payload = {
        "n": net.n,
        "m": net.m,
        "fstar": an.fstar,
        "mincut": _cut_json(net, mincut),
        "vital": sorted(an.vital_edges),
        "tight": sorted(an.tight),
        "loose": sorted(an.loose),
        "maxflow_calls": {"loose": an.loose_pipeline_calls, "tight": an.tight_pipeline_calls},
    }
    text = "\n".join(
        [
            f"f* = {an.fstar}",
            f"vertices {net.n}, edges {net.m}",
            f"mincut source side: {_side(mincut.source_side)}",
            f"vital edges: {len(an.vital_edges)} (tight {len(an.tight)}, loose {len(an.loose)})",
        ]
    )
    return _emit(args, payload, text)


def cmd_vital(args) -> str:
    net = _read_network(args.input, args.max_n)
    an = all_vital_edges(net)
    rows = []
    for c in an.classes:
        row = c.to_json(net)
        if row["witness_cut"] is not None:
            row["witness_cut"] = _side(row["witness_cut"])
        rows.append(row)
    if args.edge is not None:
        rows = [rows[_edge_arg(net, args.edge)]]
    lines = [f"f* = {an.fstar}", "edge  tail  head  class     vitality  lambda"]
    for row in rows:
        e = row["edge"]
        lines.append(
            f"{e:<5} {net.tails[e] + 1:<5} {net.heads[e] + 1:<5} {row['class']:<9} {row['vitality']:<9} "
            f"{'-' if row['lambda'] is None else row['lambda']}"
        )
    return _emit(args, {"fstar": an.fstar, "edges": rows}, "\n".join(lines))


def cmd_cover(args) -> str:
    net = _read_network(args.input, args.max_n)
    tree = build_tvit(net)
    cover = tree.cover
    payload = {"fstar": tree.fstar, "cover": [_cut_json(net, c) for c in cover]}
    lines = [f"f* = {tree.fstar}", f"cover size {len(cover)}"]
    lines += [f"  {_side(c.source_side)}  capacity {c.capacity}" for c in cover]
    return _emit(args, payload, "\n".join(lines))


def cmd_dvit(args) -> str:
    net = _read_network(args.input, args.max_n)
    dag = build_dvit(net)
    data = dag.to_json()
    data["nodes"] = [[v + 1 for v in node] for node in data["nodes"]]
    tags: dict[str, int] = {}
    for x in dag.edges:
        tags[x.tag] = tags.get(x.tag, 0) + 1
    text = f"quotient nodes {dag.num_nodes}, edges " + ", ".join(f"{k} {v}" for k, v in sorted(tags.items()))
    return _emit(args, {"dvit": data, "acyclic": dag.is_acyclic()}, text)


def cmd_oracle_build(args) -> str:
    net = _read_network(args.input, args.max_n)
    an = all_vital_edges(net)
    tree = build_tvit(net, an, insert_oracle=build_insert_oracle(net, an.flow))
    data = {
        "schema": SCHEMA,
        "network": serialize_network(net),
        "tree": tree.to_json(),
        "insert": tree.insert_oracle.to_json(),
    }
    body = json.dumps(data, sort_keys=True)
    if args.output:
        Path(args.output).write_text(body)
        return _emit(args, {"written": args.output, "fstar": tree.fstar}, f"oracle written to {args.output}")
    return body


def _load_oracle(path: str) -> TvitTree:
    try:
        data = json.loads(sys.stdin.read() if path == "-" else _read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"oracle file is not JSON: {exc.msg}") from None
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise ParseError("oracle file has an unknown schema")
    net = parse_network(data["network"])
    tree = TvitTree.from_json(net, data["tree"])
    tree.insert_oracle = InsertOracle.from_json(net, data["insert"])
    return tree


def cmd_oracle_query(args) -> str:
    tree = _load_oracle(args.input)
    net = tree.net
    if args.insert is not None:
        if args.edge is not None:
            raise UsageError("--insert and --edge are exclusive")
        u, v, cap = args.insert
        if cap <= 0:
            raise VitalCutError("inserted capacity must be positive")
        x, y = _vertex_arg(net, u), _vertex_arg(net, v)
        value = tree.query_cap(x, y, 0, cap)
        payload = {"insert": [u, v, cap], "fstar": value}
    else:
        e = _edge_arg(net, args.edge)
        value = tree.query_edge(e, args.delta)
        cut = tree.query_cut(e, args.delta)
        payload = {"edge": e, "delta": args.delta, "fstar": value, "cut": _side(cut.source_side)}
    return _emit(args, payload, str(value))


def cmd_steiner(args) -> str:
    net = _read_network(args.input, args.max_n)
    if not args.steiner:
        raise UsageError("--steiner is required")
    try:
        vertices = [_vertex_arg(net, int(x)) for x in args.steiner.split(",")]
    except ValueError:
        raise UsageError("--steiner takes comma-separated vertex ids") from None
    struct = build_steiner_structure(net, vertices)
    payload = {
        "steiner": _side(struct.steiner),
        "lambda": cap_json(struct.lam(net)),
        "classes": [_side(c) for c in struct.classes],
        "dags": [
            {"kind": d.kind, "class": d.cls, "dag": _dag_json(d.dag)} for d in struct.dags
        ],
    }
    text = "\n".join(
        [
            f"Steiner mincut capacity {struct.lam(net)}",
            f"classes {[_side(c) for c in struct.classes]}",
            f"stored DAGs {len(struct.dags)}",
        ]
    )
    return _emit(args, payload, text)


def cmd_allcuts(args) -> str:
    net = _read_network(args.input, args.max_n)
    e = _edge_arg(net, args.edge)
    an = all_vital_edges(net)
    if args.delta == 0:
        store = build_svit(net, an, with_insert=False, with_ties=False)
        dag = query_allcuts(store, e)
        what = f"mincuts for edge {e}"
    else:
        store = build_svit(net, an, with_insert=args.delta > 0)
        tree = build_tvit(net, an, insert_oracle=store.insert or False)
        dag = query_allmincut(tree, store, e, args.delta)
        what = f"(s,t)-mincuts after changing edge {e} by {args.delta}"
    lines = [f"{what}: DAG with {dag.num_nodes} nodes and {len(dag.edges)} edges"]
    for a, node in enumerate(_dag_json(dag)["nodes"]):
        lines.append(f"  node {a}: {node}")
    return _emit(args, {"edge": e, "delta": args.delta, "dag": _dag_json(dag)}, "\n".join(lines))


def _square(values: list[int]) -> list[list[int]]:
    k = math.isqrt(len(values))
    if k * k != len(values) or k == 0:
        raise UsageError("--matrix needs a nonempty square number of entries")
    return [values[i * k:(i + 1) * k] for i in range(k)]


def _ints(text: str | None, flag: str) -> list[int]:
    if not text:
        raise UsageError(f"{flag} is required for this generator")
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} takes comma-separated integers") from None


def cmd_gen(args) -> str:
    kind = args.kind
    if kind == "path":
        net = generators.gen_path(_ints(args.caps, "--caps"))
    elif kind == "p4":
        net = generators.gen_p4()
    elif kind == "gm":
        net = generators.gen_gm(_square(_ints(args.matrix, "--matrix")))
    elif kind == "gsq":
        values = _ints(args.matrix, "--matrix")
        net = generators.gen_gsq(math.isqrt(len(values)), _square(values))
    elif kind == "db":
        net = generators.gen_db(_square(_ints(args.matrix, "--matrix")))
    elif kind == "appendix-d":
        net = generators.gen_appendixD()
    elif kind == "appendix-e":
        net = generators.gen_appendixE(args.n, args.c)
    elif kind == "appendix-f":
        net = generators.gen_appendixF(args.n)
    else:
        net = generators.random_network(args.seed, args.n, args.m, args.max_cap)
    text = serialize_network(net)
    if args.output:
        Path(args.output).write_text(text)
        return ""
    return text.rstrip("\n")


def _selftest_networks(seed: int, max_n: int, count: int) -> list[tuple[str, FlowNetwork]]:
    nets = [
        ("p4", generators.gen_p4()),
        ("path", generators.gen_path([3, 1, 4, 1, 5])),
        ("gm", generators.gen_gm([[1, 2], [3, 4]])),
        ("appendix-d", generators.gen_appendixD()),
        ("appendix-e", generators.gen_appendixE(3, 2)),
        ("appendix-f", generators.gen_appendixF(3)),
    ]
    for i, net in enumerate(generators.random_suite(count, seed=seed, max_n=max_n)):
        nets.append((f"random-{i}", net))
    return nets


def _selftest_one(net: FlowNetwork) -> list[str]:
    """Names of the failed checks for one network."""
    failed = []
    cat = enumerate_cuts(net)
    if cat.fstar_raw >= net.big:
        return failed
    an = all_vital_edges(net)
    if an.fstar != cat.fstar_raw:
        failed.append("maxflow")
    if [an[e].vitality for e in range(net.m)] != list(cat.vitality):
        failed.append("vitality")
    if set(stored_cuts(build_pq(net))) != cat.mincut_sets():
        failed.append("pq-dag")
    tree = build_tvit(net, an, insert_oracle=True)
    for e in range(net.m):
        if tree.query_fail(e) != max_flow(net.without(e)).value:
            failed.append("tvit")
            break
    if an.vital_edges:
        dag = build_dvit(net, an)
        ok = dag.is_acyclic() and all(
            dag.is_one_transversal(side) for e in an.vital_edges for side in cat.mincut_sets_for(e)
        )
        if not ok:
            failed.append("dvit")
        if any(
            set(farthest_mincut(net, e, an).source_side) != set(mask_to_set(cat.farthest[e]))
            for e in an.vital_edges
        ):
            failed.append("farthest")
    return failed


def cmd_selftest(args) -> str:
    max_n = min(args.max_n or 10, ENUMERATION_LIMIT)
    lines = []
    failures = 0
    for name, net in _selftest_networks(args.seed, max_n, args.count):
        failed = _selftest_one(net)
        failures += bool(failed)
        lines.append(f"{'FAIL' if failed else 'PASS'} {name}" + (f": {', '.join(failed)}" if failed else ""))
    lines.append(f"{len(lines) - failures} passed, {failures} failed")
    out = _emit(args, {"results": lines, "failures": failures}, "\n".join(lines))
    if failures:
        raise VitalCutError(f"selftest: {failures} networks failed\n{out}")
    return out


COMMANDS = {
    "analyze": cmd_analyze,
    "vital": cmd_vital,
    "cover": cmd_cover,
    "dvit": cmd_dvit,
    "oracle-build": cmd_oracle_build,
    "oracle-query": cmd_oracle_query,
    "steiner": cmd_steiner,
    "allcuts": cmd_allcuts,
    "gen": cmd_gen,
    "selftest": cmd_selftest,
}

GENERATORS = ["path", "p4", "gm", "gsq", "db", "appendix-d", "appendix-e", "appendix-f", "random"]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-n", type=int, default=None, help="refuse graphs with more vertices")
    common.add_argument("-o", "--output", default=None)

    parser = _Parser(prog="vitalcut", description="Vital edges of minimum (s,t)-cuts.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("analyze", "vital", "cover", "dvit", "oracle-build", "steiner", "allcuts"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("input", help="DIMACS file or - for stdin")
        if name in ("vital", "allcuts"):
            p.add_argument("--edge", type=int)
        if name == "allcuts":
            p.add_argument("--delta", type=int, default=0)
        if name == "steiner":
            p.add_argument("--steiner")
    p = sub.add_parser("oracle-query", parents=[common])
    p.add_argument("input", help="oracle file from oracle-build, or -")
    p.add_argument("--edge", type=int)
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--insert", type=int, nargs=3, metavar=("U", "V", "CAP"))
    p = sub.add_parser("gen", parents=[common])
    p.add_argument("kind", choices=GENERATORS)
    p.add_argument("--matrix")
    p.add_argument("--caps")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=12)
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--max-cap", type=int, default=50)
    p = sub.add_parser("selftest", parents=[common])
    p.add_argument("--count", type=int, default=30)
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        out = COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=stderr)
        return 1
    except VitalCutError as exc:
        print(f"vitalcut: {exc}", file=stderr)
        return 2
    if out:
        print(out, file=stdout)
    return 0


def main() -> None:
    sys.exit(run())
