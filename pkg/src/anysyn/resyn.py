"""Cost-generic resynthesis: dependency-circuit enumeration into a solution forest.

Given a target table and divisor tables over the same leaves, enumerate every
tree-shaped circuit of up to three AND/XOR gates over the divisors that
computes the target, plus SOP and ESOP decompositions over the leaves.  All
candidates are merged into one hash-consed :class:`SolutionForest`.

Two prunes keep the search small:

* implication: ``AND(x, y) = f`` needs ``f => x``, so inputs failing that are
  dropped before the partner is enumerated; ``XOR(x, y) = f`` needs
  ``y = f ^ x``, found by a table lookup;
* structure: a forest gate that matches an existing divisor of the network is
  replaced by that divisor (so the candidate collapses onto a smaller one).

Every enumerated gate obeys the same validity rule, shared with the brute
force oracle in :mod:`anysyn.verify`: it is not constant, an AND differs from
both of its (polarized) inputs, and its two inputs are different nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable

from .tt import MAX_VARS, TruthTable, full_mask, implies, var_mask
from .xag import AND, XOR, Network

DEFAULT_MAX_GATES = 3
DEFAULT_MAX_GATES_DECOMP = 32
# full-care single-gate searches over at most this many divisors use a precomputed index
FULL_INDEX_MAX = 32


@dataclass
class ResynProblem:
    num_vars: int
    target: int
    tables: list[int]
    max_gates: int = DEFAULT_MAX_GATES
    contexts: list | None = None
    cost: Any = None  # CostFunction, for contexts and input ordering
    limit: int = 0  # first id handed to candidate gates when computing contexts
    # Technique 2: hit(kind, lit_a, lit_b) -> divisor literal or None, over divisor literals
    structural_hit: Callable[[int, int, int], int | None] | None = None
    # literal (2 * divisor + complement) of each leaf variable, for SOP/ESOP
    leaf_lits: list[int] | None = None
    use_sop: bool = True
    use_esop: bool = True
    max_gates_decomp: int = DEFAULT_MAX_GATES_DECOMP
    # a candidate with a ANDs and x XORs is kept only if a*lb_and + x*lb_xor < budget
    budget: float = math.inf
    lb_and: float = 0.0
    lb_xor: float = 0.0
    # divisor caps for the two- and three-gate shapes
    max_div_2: int = 64
    max_div_3: int = 20
    max_outputs: int = 0  # 0 = unlimited
    # only the first gate_inputs divisors may feed a gate (None = all of them)
    gate_inputs: int | None = None
    # per gate depth below the output (1, 2, 3): only that many leading divisors
    # may feed a gate at that depth (None = no limit)
    depth_inputs: tuple[int, int, int] | None = None

    def __post_init__(self):
        if self.num_vars > MAX_VARS:
            raise ValueError(f"at most {MAX_VARS} variables")


def dedup_divisors(tables: list[int], num_vars: int, keys=None) -> tuple[list[int], dict[int, int]]:
    """Keep one divisor per function-or-complement class, dropping constants.

    ``keys[i]`` ranks divisor ``i`` (smaller wins, ties to the earlier index).
    Returns the kept indices in input order and a map from every non-constant
    input index to the literal ``2 * position + complement`` of its
    representative among the kept ones.
    """
    mask = full_mask(num_vars)
    best: dict[int, int] = {}
    for i, t in enumerate(tables):
        if t == 0 or t == mask:
            continue
        norm = t ^ mask if t & 1 else t
        j = best.get(norm)
        if j is None or (keys is not None and keys[i] < keys[j]):
            best[norm] = i
    kept = sorted(best.values())
    pos = {i: p for p, i in enumerate(kept)}
    rep = {}
    for i, t in enumerate(tables):
        if t == 0 or t == mask:
            continue
        norm = t ^ mask if t & 1 else t
        j = best[norm]
        rep[i] = 2 * pos[j] + ((t ^ tables[j]) & 1)
    return kept, rep


def prune_and(f: TruthTable, x: TruthTable) -> bool:
    """True when ``x`` cannot be an AND input of ``f``: no ``y`` gives ``x & y == f``."""
    return not implies(f, x)


class XorLookup:
    """The set ``{f ^ y}`` over the divisors; ``x`` can feed an XOR for ``f`` iff it is in it."""

    def __init__(self, f: TruthTable, divisors):
        self.f = f
        self._partner: dict[int, int] = {}
        for i, y in enumerate(divisors):
            self._partner.setdefault((f ^ y).bits, i)

    def feasible(self, x: TruthTable) -> bool:
        return x.bits in self._partner

    def partner(self, x: TruthTable) -> int | None:
        """Index of a divisor ``y`` with ``x ^ y == f``, if any."""
        return self._partner.get(x.bits)


def prune_xor(f: TruthTable, divisors) -> XorLookup:
    return XorLookup(f, divisors)


class SolutionForest:
    """Hash-consed mini network: node 0 is constant, divisors are nodes 1..d."""

    def __init__(self, num_vars: int, tables: list[int], contexts=None, cost=None, limit: int = 0,
                 structural_hit=None):
        self.num_vars = num_vars
        self.mask = full_mask(num_vars)
        self.num_divisors = len(tables)
        self.kinds = [0] + [1] * len(tables)
        self.fanin0 = [0] * (len(tables) + 1)
        self.fanin1 = [0] * (len(tables) + 1)
        self.tables = [0] + list(tables)
        self.cost = cost
        if cost is not None:
            cx = contexts if contexts is not None else [None] * len(tables)
            self.contexts = [cost.const_context] + list(cx)
        else:
            self.contexts = [None] * (len(tables) + 1)
        self.limit = limit
        self._hit = structural_hit
        self._strash: dict[tuple, int] = {}
        self._memo: dict[tuple, int] = {}  # raw (kind, a, b) -> literal
        self.outputs: list[int] = []
        self._out_set: set[int] = set()
        self._enc: dict[int, str] = {}
        self._cones: dict[int, list[int]] = {}

    @property
    def size(self):
        return len(self.kinds)

    @property
    def num_gates(self):
        return len(self.kinds) - 1 - self.num_divisors

    def is_gate(self, node: int) -> bool:
        return node > self.num_divisors

    def div_lit(self, lit: int) -> int:
        """Forest literal of divisor literal ``2 * index + c``."""
        return lit + 2

    def gate(self, kind: int, a: int, b: int) -> int:
        raw = (kind, a, b)
        got = self._memo.get(raw)
        if got is None:
            got = self._memo[raw] = self._gate(kind, a, b)
        return got

    def _gate(self, kind: int, a: int, b: int) -> int:
        r, pair = Network._normalize(kind, a, b)
        if pair is None:
            return r
        a, b = pair
        if self._hit is not None and a >> 1 <= self.num_divisors and b >> 1 <= self.num_divisors:
            hit = self._hit(kind, a - 2, b - 2)
            if hit is not None:
                return (hit + 2) ^ r
        key = (kind, a, b)
        n = self._strash.get(key)
        if n is not None:
            return 2 * n ^ r
        n = len(self.kinds)
        self.kinds.append(kind)
        self.fanin0.append(a)
        self.fanin1.append(b)
        ta = self.tables[a >> 1] ^ (self.mask if a & 1 else 0)
        tb = self.tables[b >> 1] ^ (self.mask if b & 1 else 0)
        self.tables.append(ta & tb if kind == AND else ta ^ tb)
        if self.cost is not None:
            ctx = self.cost.propagate(kind, self.contexts[a >> 1], self.contexts[b >> 1], self.limit + n, 1)
        else:
            ctx = None
        self.contexts.append(ctx)
        self._strash[key] = n
        return 2 * n ^ r

    def value(self, lit: int) -> int:
        return self.tables[lit >> 1] ^ (self.mask if lit & 1 else 0)

    def add_output(self, lit: int) -> bool:
        if lit in self._out_set:
            return False
        self._out_set.add(lit)
        self.outputs.append(lit)
        return True

    def cone(self, lit: int) -> list[int]:
        """Gate nodes feeding ``lit``, topologically ordered."""
        n = lit >> 1
        got = self._cones.get(n)
        if got is not None:
            return got
        nd = self.num_divisors
        if n <= nd:
            out = []
        else:
            seen = set()
            out = []
            stack = [(n, False)]
            while stack:
                v, done = stack.pop()
                if done:
                    out.append(v)
                    continue
                if v in seen:
                    continue
                seen.add(v)
                stack.append((v, True))
                for u in (self.fanin1[v] >> 1, self.fanin0[v] >> 1):
                    if u > nd and u not in seen:
                        stack.append((u, False))
        self._cones[n] = out
        return out

    def encode(self, lit: int) -> str:
        """Canonical structure string, e.g. ``!A(d0,!d2)`` or ``X(d1,A(d0,d3))``."""
        n = lit >> 1
        s = self._enc.get(n)
        if s is None:
            if n == 0:
                s = "0"
            elif n <= self.num_divisors:
                s = f"d{n - 1}"
            else:
                ea = self.encode(self.fanin0[n])
                eb = self.encode(self.fanin1[n])
                if ea > eb:
                    ea, eb = eb, ea
                s = f"{'A' if self.kinds[n] == AND else 'X'}({ea},{eb})"
            self._enc[n] = s
        return "!" + s if lit & 1 else s

    def check(self, target: int) -> None:
        for lit in self.outputs:
            assert self.value(lit) == target, f"output {self.encode(lit)} is not the target"


# ----------------------------------------------------------------------
# enumeration


class _Enumerator:
    """Finds circuits equal to a target on a care set.

    Results are tuples ``(value, struct, n_and, n_xor)``.  A struct is an int
    (divisor literal) or ``(kind, struct_a, struct_b, out_complement)``.
    """

    def __init__(self, tables: list[int], mask: int):
        self.tables = tables
        self.mask = mask
        self.d = len(tables)
        full = {}
        xd: dict[int, list] = {}
        for i, t in enumerate(tables):
            full[t] = 2 * i
            full[t ^ mask] = 2 * i + 1
            xd.setdefault(t, []).append((i, 0))
            xd.setdefault(t ^ mask, []).append((i, 1))
        self.full = full
        self.xdict_full = xd
        self.pol = [(2 * i + c, t ^ mask if c else t) for i, t in enumerate(tables) for c in (0, 1)]
        self._g1: dict[int, list] = {}
        self._g1_index: dict[int, dict] = {}

    def implied(self, tc: int, d: int):
        """Polarized divisors p (among the first d) with tc => p."""
        return [(l, v) for l, v in self.pol[: 2 * d] if tc & v == tc]

    def s0(self, t: int, care: int, d: int):
        mask = self.mask
        if care == mask:
            lit = self.full.get(t)
            if lit is None or lit >> 1 >= d:
                return []
            return [(t, lit, 0, 0)]
        tc = t & care
        out = []
        for i in range(d):
            v = self.tables[i]
            if v & care == tc:
                out.append((v, 2 * i, 0, 0))
            elif (v ^ mask) & care == tc:
                out.append((v ^ mask, 2 * i + 1, 0, 0))
        return out

    def s1(self, t: int, care: int, d: int, amax: int):
        mask = self.mask
        tabs = self.tables
        res = []
        if amax >= 1:
            for o in (0, 1):
                tt = t ^ mask if o else t
                tc = tt & care
                P = self.implied(tc, d)
                np_ = len(P)
                om = mask if o else 0
                for i in range(np_):
                    li, vi = P[i]
                    for j in range(i + 1, np_):
                        lj, vj = P[j]
                        if li >> 1 == lj >> 1:
                            continue
                        g = vi & vj
                        if g & care != tc or g == 0 or g == vi or g == vj:
                            continue
                        res.append((g ^ om, (AND, li, lj, o), 1, 0))
        if care == mask:
            xd = self.xdict_full
        else:
            xd = {}
            for j in range(d):
                v = tabs[j]
                xd.setdefault(v & care, []).append((j, 0))
                xd.setdefault((v ^ mask) & care, []).append((j, 1))
        for i in range(d):
            u = tabs[i]
            hits = xd.get((t ^ u) & care)
            if not hits:
                continue
            for j, c in hits:
                if j <= i or j >= d:
                    continue
                g = u ^ tabs[j]
                res.append((g ^ mask if c else g, (XOR, 2 * i, 2 * j, c), 0, 1))
        return res

    def s2(self, t: int, care: int, d: int, amax: int, d_in: int | None = None):
        """Two-gate chains; the inner gate sees only the first ``d_in`` divisors."""
        d_in = d if d_in is None else d_in
        mask = self.mask
        tabs = self.tables
        res = []
        if amax >= 1:
            for o in (0, 1):
                tt = t ^ mask if o else t
                tc = tt & care
                om = mask if o else 0
                for lz, vz in self.implied(tc, d):
                    for vb, sb, na, nx in self.s1(tt, care & vz, d_in, amax - 1):
                        g = vz & vb
                        if g == 0 or g == vz or g == vb:
                            continue
                        res.append((g ^ om, (AND, lz, sb, o), na + 1, nx))
        s1 = self.s1_full if care == mask and d_in <= FULL_INDEX_MAX else None
        for i in range(d):
            u = tabs[i]
            inner = s1(t ^ u, d_in, amax) if s1 is not None else self.s1(t ^ u, care, d_in, amax)
            for vb, sb, na, nx in inner:
                g = u ^ vb
                if g == 0 or g == mask:
                    continue
                res.append((g, (XOR, 2 * i, sb, 0), na, nx + 1))
        return res

    def gates1(self, d: int):
        """Every valid single gate over the first d divisors (full care)."""
        got = self._g1.get(d)
        if got is not None:
            return got
        mask = self.mask
        tabs = self.tables
        out = []
        for i in range(d):
            ti = tabs[i]
            ni = ti ^ mask
            for j in range(i + 1, d):
                tj = tabs[j]
                nj = tj ^ mask
                for pi_, ci in ((ti, 0), (ni, 1)):
                    for pj, cj in ((tj, 0), (nj, 1)):
                        g = pi_ & pj
                        if g == 0 or g == pi_ or g == pj:
                            continue
                        out.append((g, (AND, 2 * i + ci, 2 * j + cj, 0), 1, 0))
                out.append((ti ^ tj, (XOR, 2 * i, 2 * j, 0), 0, 1))
        self._g1[d] = out
        return out

    def s1_full(self, t: int, d: int, amax: int):
        """Same results as ``s1`` with full care, by lookup in the single-gate index."""
        index = self._g1_index.get(d)
        if index is None:
            index = {}
            for e in self.gates1(d):
                index.setdefault(e[0], []).append(e)
            self._g1_index[d] = index
        mask = self.mask
        res = []
        for o in (0, 1):
            for v, s, na, nx in index.get(t ^ mask if o else t, ()):
                if na > amax:
                    continue
                res.append((v ^ mask if o else v, (s[0], s[1], s[2], o), na, nx))
        return res

    def s3(self, t: int, d: int, amax: int, d2: int | None = None, d3: int | None = None):
        """Three-gate trees with full care: chains and the balanced tree.

        ``d``, ``d2`` and ``d3`` limit the divisors feeding gates at depth 1, 2 and 3.
        """
        d2 = d if d2 is None else d2
        d3 = d2 if d3 is None else d3
        mask = self.mask
        tabs = self.tables
        res = []
        # chains: top(z, two-gate circuit)
        if amax >= 1:
            for o in (0, 1):
                tt = t ^ mask if o else t
                om = mask if o else 0
                for lz, vz in self.implied(tt, d):
                    for vb, sb, na, nx in self.s2(tt, vz, d2, amax - 1, d3):
                        g = vz & vb
                        if g == 0 or g == vz or g == vb:
                            continue
                        res.append((g ^ om, (AND, lz, sb, o), na + 1, nx))
        for i in range(d):
            u = tabs[i]
            for vb, sb, na, nx in self.s2(t ^ u, mask, d2, amax, d3):
                g = u ^ vb
                if g == 0 or g == mask:
                    continue
                res.append((g, (XOR, 2 * i, sb, 0), na, nx + 1))
        # trees: top(gate, gate)
        G = self.gates1(d2)
        if not G:
            return res
        index: dict[int, list[int]] = {}
        for k, (v, _s, _a, _x) in enumerate(G):
            index.setdefault(v if not v & 1 else v ^ mask, []).append(k)
        for k, (va, sa, na, nx) in enumerate(G):
            w = t ^ va
            for m in index.get(w if not w & 1 else w ^ mask, ()):
                if m <= k:
                    continue
                vb, sb, nb, xb = G[m]
                if na + nb > amax:
                    continue
                g = va ^ vb
                if g == 0 or g == mask:
                    continue
                c = 1 if g != t else 0
                res.append((g ^ mask if c else g, (XOR, sa, sb, c), na + nb, nx + xb + 1))
        if amax >= 1:
            for o in (0, 1):
                tt = t ^ mask if o else t
                om = mask if o else 0
                L = []
                for v, s, na, nx in G:
                    if tt & ~v == 0:
                        L.append((v, s, na, nx, 0))
                    if tt & v == 0:
                        L.append((v ^ mask, s, na, nx, 1))
                for k in range(len(L)):
                    va, sa, na, nxa, ca = L[k]
                    for m in range(k + 1, len(L)):
                        vb, sb, nb, nxb, cb = L[m]
                        if sa is sb or na + nb + 1 > amax:
                            continue
                        g = va & vb
                        if g != tt or g == va or g == vb:
                            continue
                        pa = sa if not ca else (sa[0], sa[1], sa[2], sa[3] ^ 1)
                        pb = sb if not cb else (sb[0], sb[1], sb[2], sb[3] ^ 1)
                        res.append((g ^ om, (AND, pa, pb, o), na + nb + 1, nxa + nxb))
        return res


def _build(forest: SolutionForest, s, memo: dict) -> int:
    # memo is keyed by object id; structures are shared between results, and
    # the caller keeps them alive while building
    if s.__class__ is int:
        return s + 2
    lit = memo.get(id(s))
    if lit is None:
        kind, a, b, o = s
        la = a + 2 if a.__class__ is int else _build(forest, a, memo)
        lb = b + 2 if b.__class__ is int else _build(forest, b, memo)
        lit = forest.gate(kind, la, lb) ^ o
        memo[id(s)] = lit
    return lit


# ----------------------------------------------------------------------
# SOP / ESOP


@lru_cache(maxsize=4096)
def isop(on: int, upper: int, num_vars: int) -> tuple[tuple[tuple[int, int], ...], int]:
    """Minato-Morreale irredundant SOP of an interval ``on <= f <= upper``.

    Returns cubes as ``(positive_vars_mask, negative_vars_mask)`` and the
    cover's truth table.
    """
    mask = full_mask(num_vars)
    cache: dict[tuple[int, int], tuple[list, int]] = {}

    def rec(L, U, top):
        if L == 0:
            return [], 0
        if U == mask:
            return [(0, 0)], mask
        key = (L, U)
        hit = cache.get(key)
        if hit is not None:
            return hit
        i = top - 1
        while i >= 0:
            m = var_mask(num_vars, i)
            sh = 1 << i
            if ((L & m) >> sh) != (L & ~m & mask) or ((U & m) >> sh) != (U & ~m & mask):
                break
            i -= 1
        if i < 0:
            # L and U constant over remaining vars; L nonzero and U not full cannot both hold
            return [(0, 0)], mask
        m = var_mask(num_vars, i)
        nm = mask ^ m
        sh = 1 << i
        L0 = L & nm
        L0 |= L0 << sh
        L1 = L & m
        L1 |= L1 >> sh
        U0 = U & nm
        U0 |= U0 << sh
        U1 = U & m
        U1 |= U1 >> sh
        c0, r0 = rec(L0 & ~U1 & mask, U0, i)
        c1, r1 = rec(L1 & ~U0 & mask, U1, i)
        Ln = (L0 & ~r0 & mask) | (L1 & ~r1 & mask)
        c2, r2 = rec(Ln, U0 & U1, i)
        bit = 1 << i
        cubes = [(p, n | bit) for p, n in c0] + [(p | bit, n) for p, n in c1] + c2
        res = (r0 & nm) | (r1 & m) | r2
        out = (cubes, res)
        cache[key] = out
        return out

    cubes, cover = rec(on, upper, num_vars)
    return tuple(cubes), cover


@lru_cache(maxsize=4096)
def esop_pprm(table: int, num_vars: int) -> tuple[int, ...]:
    """Positive-polarity Reed-Muller monomials (variable masks) of a table."""
    mask = full_mask(num_vars)
    t = table
    for i in range(num_vars):
        # the coefficient of a row with x_i set absorbs the row without it
        t ^= (t & (mask ^ var_mask(num_vars, i))) << (1 << i)
    out = []
    while t:
        low = t & -t
        out.append(low.bit_length() - 1)
        t ^= low
    return tuple(out)


def support_size(table: int, num_vars: int) -> int:
    """Number of variables the table depends on."""
    mask = full_mask(num_vars)
    n = 0
    for i in range(num_vars):
        m = var_mask(num_vars, i)
        if (table & m) >> (1 << i) != table & (mask ^ m):
            n += 1
    return n


def _balanced(forest: SolutionForest, kind: int, lits: list[int]) -> int:
    while len(lits) > 1:
        nxt = [forest.gate(kind, lits[k], lits[k + 1]) for k in range(0, len(lits) - 1, 2)]
        if len(lits) % 2:
            nxt.append(lits[-1])
        lits = nxt
    return lits[0]


def _sorted_lits(forest: SolutionForest, lits: list[int]) -> list[int]:
    cf = forest.cost
    if cf is not None and cf.order is not None:
        ctx = forest.contexts
        return sorted(lits, key=lambda l: (cf.order(ctx[l >> 1]), l >> 1, l & 1))
    return sorted(lits, key=lambda l: (l >> 1, l & 1))


def _cube_lits(p: ResynProblem, pos: int, neg: int) -> list[int]:
    out = []
    for i in range(p.num_vars):
        if pos >> i & 1:
            out.append(p.leaf_lits[i] + 2)
        elif neg >> i & 1:
            out.append((p.leaf_lits[i] ^ 1) + 2)
    return out


def _sop_gates(cubes) -> int:
    n = sum(max(0, bin(pp | nn).count("1") - 1) for pp, nn in cubes)
    return n + max(0, len(cubes) - 1)


def decompose_sop(p: ResynProblem, forest: SolutionForest, target: int | None = None) -> list[int]:
    """SOP candidates (for the target and its complement); returns forest literals."""
    mask = full_mask(p.num_vars)
    target = p.target if target is None else target
    out = []
    if p.leaf_lits is None:
        return out
    # k support variables need at least k - 1 ANDs
    if (support_size(target, p.num_vars) - 1) * p.lb_and >= p.budget:
        return out
    for comp in (0, 1):
        t = target ^ mask if comp else target
        if t == 0 or t == mask:
            continue
        cubes, cover = isop(t, t, p.num_vars)
        assert cover == t
        n_gates = _sop_gates(cubes)
        n_and = n_gates
        if n_gates > p.max_gates_decomp or n_and * p.lb_and >= p.budget:
            continue
        terms = [_balanced(forest, AND, _sorted_lits(forest, _cube_lits(p, pp, nn))) for pp, nn in cubes]
        terms = _sorted_lits(forest, [x ^ 1 for x in terms])
        lit = _balanced(forest, AND, terms) ^ 1 ^ comp
        out.append(lit)
    return out


def decompose_esop(p: ResynProblem, forest: SolutionForest, target: int | None = None) -> list[int]:
    """Positive-polarity Reed-Muller candidate; returns forest literals."""
    target = p.target if target is None else target
    if p.leaf_lits is None:
        return []
    if (support_size(target, p.num_vars) - 1) * min(p.lb_and, p.lb_xor) >= p.budget:
        return []
    monos = esop_pprm(target, p.num_vars)
    comp = 0
    if monos and monos[0] == 0:
        comp = 1
        monos = monos[1:]
    if not monos:
        return []
    n_and = sum(bin(m).count("1") - 1 for m in monos)
    n_xor = len(monos) - 1
    if n_and + n_xor > p.max_gates_decomp or n_and * p.lb_and + n_xor * p.lb_xor >= p.budget:
        return []
    terms = [_balanced(forest, AND, _sorted_lits(forest, _cube_lits(p, m, 0))) for m in monos]
    return [_balanced(forest, XOR, _sorted_lits(forest, terms)) ^ comp]


# ----------------------------------------------------------------------


def resynthesize(p: ResynProblem, on_level: Callable[[SolutionForest, int], float | None] | None = None) -> SolutionForest:
    """Collect all candidates for ``p.target`` into a solution forest.

    ``on_level(forest, k)`` is called after the k-gate shapes are added and
    may return a tighter budget for the remaining search.  It may also lower
    ``p.max_gates`` to skip the larger shapes.
    """
    mask = full_mask(p.num_vars)
    forest = SolutionForest(p.num_vars, p.tables, p.contexts, p.cost, p.limit, p.structural_hit)
    t = p.target
    cap = p.max_outputs
    budget = p.budget

    def allowed(na, nx):
        return na * p.lb_and + nx * p.lb_xor < budget

    def amax_for(k):
        if p.lb_and <= 0 or budget == math.inf:
            return k
        return min(k, max(0, math.ceil(budget / p.lb_and) - 1))

    def level_ok(k):
        return k * min(p.lb_and, p.lb_xor) < budget

    def emit(results):
        memo: dict = {}
        for v, s, na, nx in results:
            if cap and len(forest.outputs) >= cap:
                return
            if not allowed(na, nx):
                continue
            forest.add_output(_build(forest, s, memo))

    if t == 0 or t == mask:
        forest.add_output(1 if t else 0)
        return forest

    en = _Enumerator(p.tables, mask)
    d = len(p.tables)
    emit(en.s0(t, mask, d))
    dg = d if p.gate_inputs is None else min(d, p.gate_inputs)
    d1 = d2 = d3 = dg
    if p.depth_inputs is not None:
        d1, d2, d3 = (min(dg, x) for x in p.depth_inputs)
    m2, m3 = p.max_div_2, p.max_div_3
    steps = [
        (1, lambda a: en.s1(t, mask, d1, a)),
        (2, lambda a: en.s2(t, mask, min(d1, m2), a, min(d2, m2))),
        (3, lambda a: en.s3(t, min(d1, m3), a, min(d2, m3), min(d3, m3))),
    ]
    if on_level is not None:
        nb = on_level(forest, 0)
        if nb is not None:
            budget = min(budget, nb)
    for k, fn in steps:
        if k > p.max_gates or not level_ok(k):
            break
        emit(fn(amax_for(k)))
        if on_level is not None:
            nb = on_level(forest, k)
            if nb is not None:
                budget = min(budget, nb)
    pb = p.budget
    p.budget = budget
    try:
        if p.use_sop:
            for lit in decompose_sop(p, forest):
                forest.add_output(lit)
        if p.use_esop:
            for lit in decompose_esop(p, forest):
                forest.add_output(lit)
    finally:
        p.budget = pb
    return forest


def problem_from_tables(target: TruthTable, divisors: list[TruthTable], max_gates: int = DEFAULT_MAX_GATES,
                        leaves_are_first: bool = False, **kw) -> tuple[ResynProblem, list[int]]:
    """Convenience constructor: dedups divisors and returns (problem, kept indices)."""
    n = target.num_vars
    kept, rep = dedup_divisors([d.bits for d in divisors], n)
    tables = [divisors[i].bits for i in kept]
    leaf_lits = None
    if leaves_are_first:
        leaf_lits = []
        for i in range(n):
            v = var_mask(n, i)
            if divisors[i].bits != v:
                raise ValueError("leaf divisors must be the projections x0..x{n-1}")
            leaf_lits.append(rep[i])
    return ResynProblem(n, target.bits, tables, max_gates, leaf_lits=leaf_lits, **kw), kept
