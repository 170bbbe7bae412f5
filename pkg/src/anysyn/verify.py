"""Equivalence checking by simulation and a brute-force resynthesis oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .tt import full_mask, simulate_patterns, var_mask
from .xag import Network

EXHAUSTIVE_CAP = 24
_CHUNK_VARS = 16


def _check_interfaces(a: Network, b: Network) -> None:
    if a.num_pis != b.num_pis:
        raise ValueError(f"PI count differs: {a.num_pis} vs {b.num_pis}")
    if a.num_pos != b.num_pos:
        raise ValueError(f"PO count differs: {a.num_pos} vs {b.num_pos}")


def _first_diff(outs_a, outs_b, pi_values, n_pi):
    for oa, ob in zip(outs_a, outs_b):
        diff = oa ^ ob
        if diff:
            bit = (diff & -diff).bit_length() - 1
            return [(pi_values[i] >> bit) & 1 for i in range(n_pi)]
    return None


def cec_exhaustive(a: Network, b: Network, return_cex: bool = False):
    """Compare all 2^n input patterns, 2^16 at a time.

    Returns a bool, or ``(bool, counterexample)`` with ``return_cex``.
    """
    _check_interfaces(a, b)
    n = a.num_pis
    if n > EXHAUSTIVE_CAP:
        raise ValueError(f"exhaustive check is capped at {EXHAUSTIVE_CAP} PIs, got {n}")
    low = min(n, _CHUNK_VARS)
    mask = full_mask(low)
    base = [var_mask(low, i) for i in range(low)]
    for chunk in range(1 << (n - low)):
        vals = base + [mask if chunk >> (i - low) & 1 else 0 for i in range(low, n)]
        oa = simulate_patterns(a, vals, mask)
        ob = simulate_patterns(b, vals, mask)
        if oa != ob:
            if return_cex:
                return False, _first_diff(oa, ob, vals, n)
            return False
    return (True, None) if return_cex else True


@dataclass
class CecResult:
    consistent: bool
    counterexample: list[int] | None = None
    vectors: int = 0

    def __bool__(self):
        return self.consistent


def random_patterns(num_pis: int, count: int, seed: int) -> list[int]:
    """Packed random values per PI, as used by :func:`cec_random`."""
    rng = random.Random(seed)
    return [rng.getrandbits(count) if count else 0 for _ in range(num_pis)]


def cec_random(a: Network, b: Network, vectors: int = 10000, seed: int = 0) -> CecResult:
    """Simulate ``vectors`` seeded random patterns.  Zero vectors is vacuously consistent."""
    _check_interfaces(a, b)
    n = a.num_pis
    done = 0
    block = 4096
    k = 0
    while done < vectors:
        cnt = min(block, vectors - done)
        vals = random_patterns(n, cnt, seed * 1000003 + k)
        mask = (1 << cnt) - 1
        oa = simulate_patterns(a, vals, mask)
        ob = simulate_patterns(b, vals, mask)
        if oa != ob:
            return CecResult(False, _first_diff(oa, ob, vals, n), done + cnt)
        done += cnt
        k += 1
    return CecResult(True, None, done)


def equivalent(a: Network, b: Network, vectors: int = 4096, seed: int = 0) -> bool:
    if a.num_pis <= EXHAUSTIVE_CAP:
        return cec_exhaustive(a, b)
    return cec_random(a, b, vectors, seed).consistent


# ----------------------------------------------------------------------
# brute-force resynthesis oracle


def _lit_name(i: int, c: int) -> str:
    return ("!" if c else "") + f"d{i}"


def brute_resyn_oracle(p) -> set[str]:
    """Every circuit of at most two gates over the divisors that equals the target.

    No pruning: all divisor pairs, all input and output polarities.  Gates
    obey the validity rule (not constant, an AND differs from both inputs,
    inputs are distinct nodes).  Returns canonical encodings matching
    :meth:`SolutionForest.encode`.
    """
    d = len(p.tables)
    if d > 8:
        raise ValueError("oracle is limited to 8 divisors")
    if p.max_gates > 2:
        raise ValueError("oracle is limited to 2 gates")
    mask = full_mask(p.num_vars)
    f = p.target
    found: set[str] = set()
    if f == 0:
        return {"0"}
    if f == mask:
        return {"!0"}

    pol = []  # (value, encoding without polarity prefix, complemented, node)
    for i, t in enumerate(p.tables):
        pol.append((t, _lit_name(i, 0), 0, ("d", i)))
        pol.append((t ^ mask, _lit_name(i, 1), 1, ("d", i)))

    def out(value, body, comp):
        # body: encoding of the node; comp: complement on the output edge
        for o in (0, 1):
            if value ^ (mask if o else 0) == f:
                found.add(("!" if comp ^ o else "") + body)

    for v, name, c, _node in pol:
        if v == f:
            found.add(name)

    if p.max_gates < 1:
        return found

    def gates_over(inputs):
        """Valid gates over polarized inputs (value, enc, comp, node) pairs."""
        res = []
        for x in range(len(inputs)):
            for y in range(len(inputs)):
                va, ea, ca, na = inputs[x]
                vb, eb, cb, nb = inputs[y]
                if na == nb:
                    continue
                # AND: ordered pairs cover every polarity combination twice; the set dedups
                g = va & vb
                if g != 0 and g != mask and g != va and g != vb:
                    lo, hi = sorted((ea, eb))
                    res.append((g, f"A({lo},{hi})", 0, ("A", lo, hi)))
                g = va ^ vb
                if g != 0 and g != mask:
                    sa, sb = ea.lstrip("!"), eb.lstrip("!")
                    lo, hi = sorted((sa, sb))
                    par = ca ^ cb
                    res.append((g, f"X({lo},{hi})", par, ("X", lo, hi)))
        return res

    level1 = gates_over(pol)
    for g, body, par, _node in level1:
        # value g already includes the parity; the uncomplemented node computes g ^ par
        node_val = g ^ (mask if par else 0)
        out(node_val, body, 0)

    if p.max_gates < 2:
        return found

    seen = set()
    for g, body, par, node in level1:
        node_val = g ^ (mask if par else 0)
        if (body, node_val) in seen:
            continue
        seen.add((body, node_val))
        for gc in (0, 1):
            gin = (node_val ^ (mask if gc else 0), ("!" if gc else "") + body, gc, node)
            for z in pol:
                for g2, body2, par2, _n2 in gates_over([gin, z]):
                    out(g2 ^ (mask if par2 else 0), body2, 0)
    return found
