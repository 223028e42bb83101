"""Brute-force ground truth by enumerating every (s,t)-cut.

Cuts are source-side bitmasks (bit v set means v is on the source side).
Capacities are kept in raw units of the network: INF counts as ``net.big``,
so a raw value at or above ``net.big`` means an infinite cut.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import INF, Capacity, FlowNetwork, STCut, VitalCutError

ENUMERATION_LIMIT = 20
COVER_LIMIT = 14
STEINER_LIMIT = 16


class OracleLimitError(VitalCutError):
    pass


def mask_to_set(mask: int) -> frozenset:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


def set_to_mask(side) -> int:
    mask = 0
    for v in side:
        mask |= 1 << v
    return mask


class _CutTable:
    """All 2^(n-2) cuts of a network as numpy columns."""

    def __init__(self, net: FlowNetwork, limit: int):
        if net.n > limit:
            raise OracleLimitError(f"n = {net.n} exceeds the oracle limit {limit}")
        self.net = net
        others = [v for v in range(net.n) if v not in (net.s, net.t)]
        count = 1 << len(others)
        idx = np.arange(count, dtype=np.int64)
        member = np.zeros((net.n, count), dtype=bool)
        member[net.s] = True
        for j, v in enumerate(others):
            member[v] = ((idx >> j) & 1).astype(bool)
        self.member = member
        masks = np.full(count, 1 << net.s, dtype=np.int64)
        for j, v in enumerate(others):
            masks |= ((idx >> j) & 1) << v
        self.masks = masks
        big = net.big
        n_inf = sum(1 for c in net.caps if c is INF)
        dtype = np.int64 if big * (n_inf + 1) < 2**62 else object
        raw = np.zeros(count, dtype=dtype)
        for e in range(net.m):
            raw = raw + self.contrib(e).astype(dtype) * net.eff_caps[e]
        self.raw = raw

    def contrib(self, e: int) -> np.ndarray:
        return self.member[self.net.tails[e]] & ~self.member[self.net.heads[e]]


@dataclass
class CutCatalog:
    net: FlowNetwork
    masks: np.ndarray
    raw: np.ndarray
    fstar_raw: int
    lam_raw: list  # per edge; None when the edge never contributes
    vitality: list  # per edge, raw units
    mincuts: list  # per edge: sorted masks of its mincuts (vital edges only)
    farthest: list  # per edge: mask or None
    farthest_unique: list
    mincut_masks: list = field(default_factory=list)

    @property
    def fstar(self) -> Capacity:
        return INF if self.fstar_raw >= self.net.big else self.fstar_raw

    @property
    def vital(self) -> list[bool]:
        return [x > 0 for x in self.vitality]

    @property
    def vital_edges(self) -> set[int]:
        return {e for e, x in enumerate(self.vitality) if x > 0}

    def lam(self, e: int) -> Capacity:
        raw = self.lam_raw[e]
        if raw is None or raw >= self.net.big:
            return INF
        return raw

    def cut(self, mask: int) -> STCut:
        return self.net.cut(mask_to_set(mask))

    def mincut_sets(self) -> set[frozenset]:
        return {mask_to_set(m) for m in self.mincut_masks}

    def mincut_sets_for(self, e: int) -> set[frozenset]:
        return {mask_to_set(m) for m in self.mincuts[e]}

    def relevant_masks(self, e: int) -> list[int]:
        """Cuts with e contributing and c(C) - w(e) < f*."""
        w = self.net.eff_caps[e]
        tail, head = self.net.tails[e], self.net.heads[e]
        out = []
        for mask, raw in zip(self.masks.tolist(), self.raw.tolist()):
            if mask >> tail & 1 and not mask >> head & 1 and raw - w < self.fstar_raw:
                out.append(mask)
        return out


def enumerate_cuts(net: FlowNetwork, limit: int = ENUMERATION_LIMIT) -> CutCatalog:
    table = _CutTable(net, min(limit, ENUMERATION_LIMIT))
    raw = table.raw
    masks = table.masks
    fstar_raw = int(raw.min())
    lam_raw, vitality, mincuts, farthest, unique = [], [], [], [], []
    for e in range(net.m):
        contrib = table.contrib(e)
        w = net.eff_caps[e]
        without = raw - contrib.astype(raw.dtype) * w
        vit = fstar_raw - int(without.min())
        vitality.append(vit)
        if not contrib.any():
            lam_raw.append(None)
            mincuts.append([])
            farthest.append(None)
            unique.append(True)
            continue
        lam = int(raw[contrib].min())
        lam_raw.append(lam)
        if vit > 0:
            chosen = sorted(int(x) for x in masks[contrib & (raw == lam)])
            union = 0
            for x in chosen:
                union |= x
            mincuts.append(chosen)
            farthest.append(union)
            unique.append(union in chosen)
        else:
            mincuts.append([])
            farthest.append(None)
            unique.append(True)
    global_min = sorted(int(x) for x in masks[raw == fstar_raw])
    return CutCatalog(net, masks, raw, fstar_raw, lam_raw, vitality, mincuts, farthest, unique, global_min)


def oracle_max_flow_raw(net: FlowNetwork, limit: int = ENUMERATION_LIMIT) -> int:
    return int(_CutTable(net, limit).raw.min())


def oracle_flow_with_edge_value(net: FlowNetwork, e: int, amount: int, fstar_raw: int | None = None) -> bool:
    """Does some maximum flow put exactly ``amount`` on edge e?

    Lower-bound reduction: e is replaced by a demand of ``amount`` units
    leaving u and entering v; super terminals feed f* into s and drain it
    from t.  Feasible iff the super network has a cut of value f* + amount
    as its minimum, decided by enumeration.
    """
    if fstar_raw is None:
        fstar_raw = oracle_max_flow_raw(net)
    w = net.eff_caps[e]
    if not 0 <= amount <= w:
        return False
    n = net.n
    s2, t2 = n, n + 1
    triples = [(a, b, c) for i, (a, b, c) in enumerate(zip(net.tails, net.heads, net.eff_caps)) if i != e]
    triples = [(a, b, c) for a, b, c in triples if c > 0]
    extra = [(s2, net.s, fstar_raw), (net.t, t2, fstar_raw)]
    if amount > 0:
        extra += [(net.tails[e], t2, amount), (s2, net.heads[e], amount)]
    aux = FlowNetwork(n + 2, s2, t2, triples + extra)
    return oracle_max_flow_raw(aux) == fstar_raw + amount


def oracle_max_alpha(net: FlowNetwork, e: int) -> int:
    fstar_raw = oracle_max_flow_raw(net)
    best = -1
    for a in range(net.eff_caps[e] + 1):
        if oracle_flow_with_edge_value(net, e, a, fstar_raw):
            best = a
    return best


def oracle_mincut_cover(net: FlowNetwork, catalog: CutCatalog | None = None) -> list[STCut]:
    """Minimum number of cuts holding a mincut for every vital edge."""
    if net.n > COVER_LIMIT:
        raise OracleLimitError(f"n = {net.n} exceeds the cover limit {COVER_LIMIT}")
    if catalog is None:
        catalog = enumerate_cuts(net)
    vital = sorted(catalog.vital_edges)
    if not vital:
        return [catalog.cut(catalog.mincut_masks[0])] if catalog.mincut_masks else []
    bit = {e: 1 << i for i, e in enumerate(vital)}
    coverage: dict[int, int] = {}
    for e in vital:
        for mask in catalog.mincuts[e]:
            coverage[mask] = coverage.get(mask, 0) | bit[e]
    by_cover: dict[int, int] = {}
    for mask, cov in sorted(coverage.items()):
        by_cover.setdefault(cov, mask)
    sets = sorted(by_cover.items(), key=lambda kv: -bin(kv[0]).count("1"))
    sets = [(cov, mask) for cov, mask in sets if not any(cov != o and cov & o == cov for o, _ in sets)]
    full = (1 << len(vital)) - 1
    largest = max(bin(c).count("1") for c, _ in sets)
    best: list = [None]

    def search(covered: int, chosen: list[int]) -> None:
        if covered == full:
            if best[0] is None or len(chosen) < len(best[0]):
                best[0] = list(chosen)
            return
        remaining = bin(full & ~covered).count("1")
        bound = len(chosen) + -(-remaining // largest)
        if best[0] is not None and bound >= len(best[0]):
            return
        low = (full & ~covered) & -(full & ~covered)
        for cov, mask in sets:
            if cov & low:
                chosen.append(mask)
                search(covered | cov, chosen)
                chosen.pop()

    search(0, [])
    return [catalog.cut(mask) for mask in best[0]]


def oracle_steiner_mincuts(net: FlowNetwork, steiner) -> tuple[Capacity, list[STCut]]:
    """All least-capacity (s,t)-cuts that split the Steiner set."""
    steiner = set(steiner)
    if len(steiner) < 2:
        raise VitalCutError("Steiner set needs at least two vertices")
    table = _CutTable(net, STEINER_LIMIT)
    smask = set_to_mask(steiner)
    hit = table.masks & smask
    splits = (hit != 0) & (hit != smask)
    if not splits.any():
        raise VitalCutError("no cut splits the Steiner set")
    raw = table.raw[splits]
    best = int(raw.min())
    masks = sorted(int(x) for x in table.masks[splits][raw == best])
    lam: Capacity = INF if best >= net.big else best
    return lam, [net.cut(mask_to_set(m)) for m in masks]
