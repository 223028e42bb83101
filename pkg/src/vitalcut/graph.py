"""Flow network model, exact capacities, cuts and DIMACS I/O."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union


class VitalCutError(Exception):
    """Base class for domain errors raised by this package."""


class ParseError(VitalCutError):
    pass


class UnboundedFlowError(VitalCutError):
    pass


class _Infinite:
    """Capacity larger than every finite capacity."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinite, ())

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("vitalcut.INF")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True


INF = _Infinite()

Capacity = Union[int, _Infinite]


def is_finite(c: Capacity) -> bool:
    return c is not INF


def cap_str(c: Capacity) -> str:
    return "inf" if c is INF else str(c)


def cap_json(c: Capacity):
    return "inf" if c is INF else c


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    cap: Capacity


@dataclass(frozen=True)
class STCut:
    """An (s,t)-cut given by its source side."""

    source_side: frozenset
    capacity: Capacity
    contributing: tuple
    incoming: tuple

    def __contains__(self, v: int) -> bool:
        return v in self.source_side

    def to_json(self) -> dict:
        return {
            "source_side": sorted(self.source_side),
            "capacity": cap_json(self.capacity),
            "contributing": list(self.contributing),
            "incoming": list(self.incoming),
        }


@dataclass(frozen=True)
class GraphDelta:
    """A capacity change of one edge; ``failure`` means the edge is removed."""

    edge: int
    delta: int
    failure: bool = False

    @classmethod
    def fail(cls, net: "FlowNetwork", e: int) -> "GraphDelta":
        return cls(e, -net.eff_caps[e], True)

    def check(self, net: "FlowNetwork") -> None:
        if not 0 <= self.edge < net.m:
            raise VitalCutError(f"unknown edge {self.edge}")
        if self.delta < -net.eff_caps[self.edge]:
            raise VitalCutError("delta below -w(e)")

    def apply(self, net: "FlowNetwork") -> "FlowNetwork":
        """The changed network; an INF edge stays INF unless it fails."""
        self.check(net)
        new = net.eff_caps[self.edge] + self.delta
        if net.caps[self.edge] is INF and new > 0:
            return net
        return net.with_capacity(self.edge, new)


class FlowNetwork:
    """Directed multigraph with integer capacities, a source and a sink.

    Capacities are positive ints or ``INF``.  Derived networks built by
    :meth:`with_capacity` may carry zero-capacity edges, which stand for an
    edge that has been removed while keeping edge ids stable.
    """

    def __init__(
        self,
        n: int,
        s: int,
        t: int,
        edges: Iterable[tuple[int, int, Capacity]],
        names: Sequence[str] | None = None,
        *,
        allow_zero: bool = False,
    ):
        if n < 2:
            raise VitalCutError("need at least two vertices")
        if not (0 <= s < n and 0 <= t < n):
            raise VitalCutError("source or sink out of range")
        if s == t:
            raise VitalCutError("source equals sink")
        tails, heads, caps = [], [], []
        for i, (u, v, c) in enumerate(edges):
            if not (0 <= u < n and 0 <= v < n):
                raise VitalCutError(f"edge {i}: endpoint out of range")
            if u == v:
                raise VitalCutError(f"edge {i}: self-loop")
            if c is not INF:
                if not isinstance(c, int) or isinstance(c, bool):
                    raise VitalCutError(f"edge {i}: capacity must be an integer")
                if c < 0 or (c == 0 and not allow_zero):
                    raise VitalCutError(f"edge {i}: nonpositive capacity")
            tails.append(u)
            heads.append(v)
            caps.append(c)
        self.n = n
        self.s = s
        self.t = t
        self.tails = tuple(tails)
        self.heads = tuple(heads)
        self.caps = tuple(caps)
        self.names = tuple(names) if names is not None else None

    @property
    def m(self) -> int:
        return len(self.tails)

    def edge(self, e: int) -> Edge:
        return Edge(e, self.tails[e], self.heads[e], self.caps[e])

    @property
    def edges(self) -> list[Edge]:
        return [self.edge(e) for e in range(self.m)]

    def name(self, v: int) -> str:
        return self.names[v] if self.names else str(v)

    def _key(self):
        return (self.n, self.s, self.t, self.tails, self.heads, self.caps)

    def __eq__(self, other) -> bool:
        return isinstance(other, FlowNetwork) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"FlowNetwork(n={self.n}, m={self.m}, s={self.s}, t={self.t})"

    @cached_property
    def big(self) -> int:
        """Stand-in value for INF: exceeds the capacity of every finite cut."""
        return 1 + sum(c for c in self.caps if c is not INF)

    @cached_property
    def eff_caps(self) -> tuple:
        big = self.big
        return tuple(big if c is INF else c for c in self.caps)

    @cached_property
    def has_inf(self) -> bool:
        return any(c is INF for c in self.caps)

    @cached_property
    def out_edges(self) -> list[list[int]]:
        out = [[] for _ in range(self.n)]
        for e, u in enumerate(self.tails):
            out[u].append(e)
        return out

    @cached_property
    def in_edges(self) -> list[list[int]]:
        inc = [[] for _ in range(self.n)]
        for e, v in enumerate(self.heads):
            inc[v].append(e)
        return inc

    def triples(self) -> list[tuple[int, int, Capacity]]:
        return list(zip(self.tails, self.heads, self.caps))

    def with_capacity(self, e: int, cap: Capacity) -> "FlowNetwork":
        """Copy with edge ``e`` at capacity ``cap`` (0 removes it)."""
        if not 0 <= e < self.m:
            raise VitalCutError(f"unknown edge {e}")
        caps = list(self.caps)
        caps[e] = cap
        return FlowNetwork(
            self.n, self.s, self.t, zip(self.tails, self.heads, caps), self.names, allow_zero=True
        )

    def without(self, e: int) -> "FlowNetwork":
        return self.with_capacity(e, 0)

    def plus_edges(self, extra: Iterable[tuple[int, int, Capacity]]) -> "FlowNetwork":
        """Copy with extra edges appended; original ids are unchanged."""
        triples = self.triples() + list(extra)
        return FlowNetwork(self.n, self.s, self.t, triples, self.names, allow_zero=True)

    def forced(self, force_s: Iterable[int] = (), force_t: Iterable[int] = ()) -> "FlowNetwork":
        """Add INF edges s->x for x in force_s and y->t for y in force_t."""
        extra = [(self.s, x, INF) for x in sorted(set(force_s)) if x != self.s]
        extra += [(y, self.t, INF) for y in sorted(set(force_t)) if y != self.t]
        return self.plus_edges(extra)

    def cut(self, side: Iterable[int]) -> STCut:
        side = frozenset(side)
        if self.s not in side or self.t in side:
            raise VitalCutError("not an (s,t)-cut")
        contrib, incoming = [], []
        cap: Capacity = 0
        for e in range(self.m):
            a, b = self.tails[e] in side, self.heads[e] in side
            if a and not b:
                contrib.append(e)
                cap = cap + self.caps[e]
            elif b and not a:
                incoming.append(e)
        return STCut(side, cap, tuple(contrib), tuple(incoming))

    def cut_capacity(self, side: Iterable[int]) -> Capacity:
        return self.cut(side).capacity

    def raw_cut_capacity(self, side) -> int:
        side = set(side)
        caps = self.eff_caps
        return sum(
            caps[e]
            for e in range(self.m)
            if self.tails[e] in side and self.heads[e] not in side
        )


def parse_network(text: bytes | str) -> FlowNetwork:
    """Parse the extended DIMACS max-flow format (1-based vertex ids)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    n = m = None
    s = t = None
    edges: list[tuple[int, int, Capacity]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        kind = parts[0]
        try:
            if kind == "p":
                if n is not None:
                    raise ParseError(f"line {lineno}: duplicate problem line")
                if len(parts) != 4 or parts[1] != "max":
                    raise ParseError(f"line {lineno}: malformed problem line")
                n, m = int(parts[2]), int(parts[3])
                if n < 2 or m < 0:
                    raise ParseError(f"line {lineno}: bad problem size")
            elif kind == "n":
                if n is None:
                    raise ParseError(f"line {lineno}: node line before problem line")
                if len(parts) != 3 or parts[2] not in ("s", "t"):
                    raise ParseError(f"line {lineno}: malformed node line")
                v = _vertex(parts[1], n, lineno)
                if parts[2] == "s":
                    if s is not None:
                        raise ParseError(f"line {lineno}: duplicate source")
                    s = v
                else:
                    if t is not None:
                        raise ParseError(f"line {lineno}: duplicate sink")
                    t = v
            elif kind == "a":
                if n is None:
                    raise ParseError(f"line {lineno}: arc line before problem line")
                if len(parts) != 4:
                    raise ParseError(f"line {lineno}: malformed arc line")
                u, v = _vertex(parts[1], n, lineno), _vertex(parts[2], n, lineno)
                if u == v:
                    raise ParseError(f"line {lineno}: self-loop")
                if parts[3] == "inf":
                    cap: Capacity = INF
                else:
                    cap = int(parts[3])
                    if cap <= 0:
                        raise ParseError(f"line {lineno}: nonpositive capacity")
                edges.append((u, v, cap))
            else:
                raise ParseError(f"line {lineno}: malformed line")
        except ValueError:
            raise ParseError(f"line {lineno}: malformed line") from None
    if n is None:
        raise ParseError("missing problem line")
    if s is None or t is None:
        raise ParseError("missing source or sink")
    if s == t:
        raise ParseError("source equals sink")
    if len(edges) != m:
        raise ParseError(f"problem line declares {m} arcs, found {len(edges)}")
    return FlowNetwork(n, s, t, edges)


def _vertex(tok: str, n: int, lineno: int) -> int:
    v = int(tok)
    if not 1 <= v <= n:
        raise ParseError(f"line {lineno}: vertex {v} out of range")
    return v - 1


def serialize_network(net: FlowNetwork) -> str:
    """Inverse of :func:`parse_network`; zero-capacity edges are rejected."""
    lines = [f"p max {net.n} {net.m}", f"n {net.s + 1} s", f"n {net.t + 1} t"]
    for u, v, c in net.triples():
        if c == 0:
            raise VitalCutError("cannot serialize a removed edge")
        lines.append(f"a {u + 1} {v + 1} {cap_str(c)}")
    return "\n".join(lines) + "\n"
