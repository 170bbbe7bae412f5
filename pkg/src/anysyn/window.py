"""Reconvergence-driven cuts, windows and divisor collection."""

from __future__ import annotations

from dataclasses import dataclass, field

from .tt import MAX_VARS, TruthTable, simulate_raw
from .xag import AND, Network, Signal

DEFAULT_MAX_LEAVES = 8
DEFAULT_MAX_DIVISORS = 150
# Nodes with more fanouts than this are not scanned for side nodes.
MAX_FANOUT_SCAN = 64


@dataclass
class Cut:
    root: int
    leaves: list[int]  # sorted by id

    def __len__(self):
        return len(self.leaves)


@dataclass
class Window:
    cut: Cut
    members: list[int]  # topological: cone members (root last among them), then side nodes
    mffc: set[int]
    divisors: list[int]  # node ids, increasing
    tables: dict[int, int]  # raw truth tables over the leaves, per window node
    num_vars: int
    side: list[int] = field(default_factory=list)

    @property
    def root(self) -> int:
        return self.cut.root

    @property
    def target(self) -> TruthTable:
        return TruthTable(self.num_vars, self.tables[self.cut.root])

    @property
    def divisor_signals(self) -> list[Signal]:
        return [Signal(d, False) for d in self.divisors]

    @property
    def divisor_tts(self) -> dict[Signal, TruthTable]:
        return {Signal(d, False): TruthTable(self.num_vars, self.tables[d]) for d in self.divisors}


def reconv_cut(net: Network, root: int, max_leaves: int = DEFAULT_MAX_LEAVES) -> Cut:
    """Grow a cut from the fanins of ``root`` by expanding the cheapest leaf.

    The cost of expanding a leaf is the number of its fanins not yet visited,
    minus one.  Ties go to the smallest node id; PIs are never expanded.
    """
    kinds, f0, f1 = net._kind, net._fanin0, net._fanin1
    if kinds[root] < AND or net._dead[root]:
        raise ValueError(f"node {root} is not a live gate")
    if max_leaves > MAX_VARS:
        raise ValueError(f"max_leaves must be at most {MAX_VARS}")
    a, b = f0[root] >> 1, f1[root] >> 1
    leaves = [a, b] if a < b else [b, a]
    visited = {root, a, b}
    while True:
        best = None
        best_cost = 3
        for leaf in leaves:
            if kinds[leaf] < AND:
                continue
            cost = (f0[leaf] >> 1 not in visited) + (f1[leaf] >> 1 not in visited) - 1
            if cost < best_cost:  # leaves are sorted, so the first minimum has the smallest id
                best, best_cost = leaf, cost
        if best is None or len(leaves) + best_cost > max_leaves:
            break
        leaves.remove(best)
        for u in (f0[best] >> 1, f1[best] >> 1):
            if u not in visited:
                visited.add(u)
                leaves.append(u)
        leaves.sort()
    return Cut(root, leaves)


def _cone(net: Network, root: int, leaves) -> list[int]:
    """Nodes strictly between the leaves and ``root`` (inclusive), in postorder."""
    f0, f1 = net._fanin0, net._fanin1
    seen = set(leaves)
    order = []
    stack = [(root, 0)]
    while stack:
        v, state = stack.pop()
        if state:
            order.append(v)
            continue
        if v in seen:
            continue
        seen.add(v)
        stack.append((v, 1))
        for u in (f1[v] >> 1, f0[v] >> 1):
            if u not in seen:
                stack.append((u, 0))
    return order


def build_window(net: Network, cut: Cut, max_divisors: int = DEFAULT_MAX_DIVISORS) -> Window:
    """Collect the cone, side nodes, MFFC and divisors of a cut and simulate them."""
    root, leaves = cut.root, cut.leaves
    f0, f1, fanouts, dead = net._fanin0, net._fanin1, net._fanouts, net._dead
    cone = _cone(net, root, leaves)
    inside = set(leaves)
    inside.update(cone)

    mffc = set(net._deref_rec(root, inside.intersection(leaves)))
    net._ref_rec(list(mffc))

    # side nodes: outside the cone, both fanins already in the window, not the root
    n_div = len(leaves) + len(cone) - len(mffc)
    side = []
    if n_div < max_divisors:
        frontier = [v for v in leaves] + [v for v in cone if v != root]
        k = 0
        while k < len(frontier) and n_div < max_divisors:
            v = frontier[k]
            k += 1
            fo = fanouts[v]
            if len(fo) > MAX_FANOUT_SCAN:
                continue
            for g in fo:
                if g in inside or dead[g]:
                    continue
                a, b = f0[g] >> 1, f1[g] >> 1
                if a in inside and b in inside and a != root and b != root:
                    inside.add(g)
                    side.append(g)
                    frontier.append(g)
                    n_div += 1
                    if n_div >= max_divisors:
                        break

    members = cone + side
    tables = simulate_raw(net, leaves, members, len(leaves))
    divs = [v for v in leaves]
    divs.extend(v for v in cone if v not in mffc)
    divs.extend(side)
    divs.sort()
    if len(divs) > max_divisors:
        # keep every leaf, then the smallest remaining ids
        leaf_set = set(leaves)
        rest = [v for v in divs if v not in leaf_set][: max(0, max_divisors - len(leaves))]
        divs = sorted(leaves + rest)
    return Window(cut, members, mffc, divs, tables, len(leaves), side)
