"""Bit-parallel truth tables.

A table over ``n`` variables is a Python int holding ``2**n`` bits.  Bit ``r``
is the function value on input row ``r``; variable ``i`` is bit ``i`` of the
row index, so variable 0 toggles fastest (LSB-first row order).

The optimizer works on raw ints for speed.  :class:`TruthTable` wraps an int
together with its width for the public API and for golden files.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .xag import AND, XOR, Network

MAX_VARS = 16

NOT = "NOT"


@lru_cache(maxsize=None)
def full_mask(num_vars: int) -> int:
    return (1 << (1 << num_vars)) - 1


@lru_cache(maxsize=None)
def var_mask(num_vars: int, i: int) -> int:
    """Projection function x_i over ``num_vars`` variables as a raw int."""
    period = 1 << i
    block = ((1 << period) - 1) << period  # 0...01...1 pattern of length 2*period
    width = 1 << num_vars
    reps = width // (2 * period)
    if reps <= 0:
        raise ValueError("variable out of range")
    # replicate block reps times by doubling
    out = block
    length = 2 * period
    while length < width:
        out |= out << length
        length *= 2
    return out & full_mask(num_vars)


def var_masks(num_vars: int) -> list[int]:
    return [var_mask(num_vars, i) for i in range(num_vars)]


def _check_width(num_vars: int) -> None:
    if not 0 <= num_vars <= MAX_VARS:
        raise ValueError(f"num_vars must be in [0, {MAX_VARS}], got {num_vars}")


@dataclass(frozen=True)
class TruthTable:
    num_vars: int
    bits: int

    def __post_init__(self):
        _check_width(self.num_vars)
        if self.bits < 0 or self.bits > full_mask(self.num_vars):
            raise ValueError("bits exceed table width")

    def __len__(self):
        return 1 << self.num_vars

    def __getitem__(self, row: int) -> bool:
        return bool(self.bits >> row & 1)

    def _same(self, other: TruthTable) -> None:
        if not isinstance(other, TruthTable):
            raise TypeError("expected TruthTable")
        if other.num_vars != self.num_vars:
            raise ValueError("truth table width mismatch")

    def __and__(self, other):
        self._same(other)
        return TruthTable(self.num_vars, self.bits & other.bits)

    def __or__(self, other):
        self._same(other)
        return TruthTable(self.num_vars, self.bits | other.bits)

    def __xor__(self, other):
        self._same(other)
        return TruthTable(self.num_vars, self.bits ^ other.bits)

    def __invert__(self):
        return TruthTable(self.num_vars, self.bits ^ full_mask(self.num_vars))

    def is_const0(self) -> bool:
        return self.bits == 0

    def is_const1(self) -> bool:
        return self.bits == full_mask(self.num_vars)

    def count_ones(self) -> int:
        return bin(self.bits).count("1")

    def to_binary(self) -> str:
        """Row 0 first, e.g. ``'0001'`` for AND over two variables."""
        return "".join("1" if self[r] else "0" for r in range(len(self)))

    def to_hex(self) -> str:
        """Hex rendering, row 0 in the least significant bit of the last digit."""
        digits = max(1, (1 << self.num_vars) // 4)
        return format(self.bits, f"0{digits}x")

    @classmethod
    def from_hex(cls, num_vars: int, text: str) -> TruthTable:
        return cls(num_vars, int(text, 16))

    @classmethod
    def from_binary(cls, text: str) -> TruthTable:
        n = len(text)
        num_vars = n.bit_length() - 1
        if 1 << num_vars != n:
            raise ValueError("binary table length must be a power of two")
        bits = 0
        for r, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << r
            elif ch != "0":
                raise ValueError(f"bad digit {ch!r}")
        return cls(num_vars, bits)

    def __repr__(self):
        if self.num_vars <= 4:
            return f"TruthTable({self.to_binary()})"
        return f"TruthTable({self.num_vars}, 0x{self.to_hex()})"


def tt_const(num_vars: int, value: bool) -> TruthTable:
    _check_width(num_vars)
    return TruthTable(num_vars, full_mask(num_vars) if value else 0)


def tt_var(num_vars: int, i: int) -> TruthTable:
    _check_width(num_vars)
    if not 0 <= i < num_vars:
        raise ValueError(f"variable {i} out of range for {num_vars} variables")
    return TruthTable(num_vars, var_mask(num_vars, i))


def tt_apply(kind, a: TruthTable, b: TruthTable | None = None) -> TruthTable:
    if kind == NOT:
        if b is not None:
            raise ValueError("NOT takes one operand")
        return ~a
    if b is None:
        raise ValueError(f"{kind} takes two operands")
    if kind == AND:
        return a & b
    if kind == XOR:
        return a ^ b
    raise ValueError(f"unknown operation {kind!r}")


def implies(a: TruthTable, b: TruthTable) -> bool:
    a._same(b)
    return a.bits & ~b.bits == 0


def simulate_raw(net: Network, leaves, members, num_vars: int | None = None) -> dict[int, int]:
    """Simulate ``members`` over ``leaves``, returning raw int tables per node.

    ``members`` must be topologically sorted and closed over ``leaves``.
    """
    if num_vars is None:
        num_vars = len(leaves)
    if num_vars > MAX_VARS:
        raise ValueError(f"window has {num_vars} leaves, cap is {MAX_VARS}")
    mask = full_mask(num_vars)
    tabs = {0: 0}
    for i, leaf in enumerate(leaves):
        tabs[leaf] = var_mask(num_vars, i)
    kinds, f0s, f1s = net._kind, net._fanin0, net._fanin1
    for n in members:
        a, b = f0s[n], f1s[n]
        try:
            ta, tb = tabs[a >> 1], tabs[b >> 1]
        except KeyError:
            raise ValueError(f"node {n} has a fanin outside the window") from None
        if a & 1:
            ta ^= mask
        if b & 1:
            tb ^= mask
        tabs[n] = ta & tb if kinds[n] == AND else ta ^ tb
    return tabs


def simulate_window(net: Network, leaves, members) -> dict[int, TruthTable]:
    n = len(leaves)
    raw = simulate_raw(net, leaves, members, n)
    return {node: TruthTable(n, bits) for node, bits in raw.items()}


def simulate_patterns(net: Network, pi_values: list[int], mask: int) -> list[int]:
    """Simulate every live node on packed input patterns.

    ``pi_values[i]`` holds the bits of PI ``i`` across ``mask.bit_length()``
    patterns.  Returns the packed values of the POs.
    """
    vals = [0] * net.size
    for i, pi in enumerate(net.pis):
        vals[pi] = pi_values[i]
    kinds, f0s, f1s = net._kind, net._fanin0, net._fanin1
    for n in net.topo_order():
        k = kinds[n]
        if k < AND:
            continue
        a, b = f0s[n], f1s[n]
        ta = vals[a >> 1] ^ mask if a & 1 else vals[a >> 1]
        tb = vals[b >> 1] ^ mask if b & 1 else vals[b >> 1]
        vals[n] = ta & tb if k == AND else ta ^ tb
    return [vals[lit >> 1] ^ mask if lit & 1 else vals[lit >> 1] for lit in net._pos]


def simulate(net: Network) -> list[TruthTable]:
    """Exhaustive PO truth tables of a network with at most 16 PIs."""
    n = net.num_pis
    _check_width(n)
    outs = simulate_patterns(net, var_masks(n), full_mask(n))
    return [TruthTable(n, v) for v in outs]
