"""XOR-AND-Inverter graphs.

Nodes live in parallel lists indexed by node id.  Edges are *literals*:
``2 * node + complemented``.  Node 0 is constant false, so literal 0 is false
and literal 1 is true.  :class:`Signal` is the public view of a literal.

Gates are hash-consed: creating a gate that already exists returns the
existing node.  AND fanins are stored sorted by literal; XOR fanins are stored
uncomplemented with the parity moved to the output literal.  Gates rewired by
:meth:`Network.substitute` may keep complemented XOR fanins; the hash table is
keyed on the normalized pair and maps to the literal that computes it, so
lookups stay exact.

Substituted nodes are tombstoned and ids are never reused within a pass.
Rewiring can make a gate refer to a fanin with a larger id, so creation order
is only guaranteed to be topological right after :meth:`Network.cleanup`;
:meth:`Network.topo_order` always returns a valid order.
"""

from __future__ import annotations

from typing import NamedTuple

CONST, PI, AND, XOR = 0, 1, 2, 3
KIND_NAMES = {CONST: "CONST", PI: "PI", AND: "AND", XOR: "XOR"}


class CycleError(ValueError):
    """Raised when a substitution would create a combinational loop."""


class Signal(NamedTuple):
    node: int
    complemented: bool = False

    @property
    def lit(self) -> int:
        return 2 * self.node + (1 if self.complemented else 0)

    @classmethod
    def from_lit(cls, lit: int) -> Signal:
        return cls(lit >> 1, bool(lit & 1))

    def __invert__(self) -> Signal:
        return Signal(self.node, not self.complemented)

    def __repr__(self):
        return f"Signal({'~' if self.complemented else ''}{self.node})"


CONST0 = Signal(0, False)
CONST1 = Signal(0, True)


def _key(kind: int, a: int, b: int) -> int:
    # a <= b are literals, normalized for XOR
    return ((a << 32 | b) << 1) | (kind == XOR)


def _lit(sig) -> int:
    return sig if isinstance(sig, int) else sig.lit


class Network:
    def __init__(self):
        self._kind = [CONST]
        self._fanin0 = [0]
        self._fanin1 = [0]
        self._nref = [0]
        self._level = [0]
        self._fanouts: list[list[int]] = [[]]
        self._dead = bytearray(1)
        self._strash: dict[int, int] = {}
        self._pos: list[int] = []
        self._po_of: dict[int, list[int]] = {}
        self.pis: list[int] = []
        self.pi_names: list[str] = []
        self.po_names: list[str] = []
        self.num_dead = 0

    # ------------------------------------------------------------------
    # size and queries

    @property
    def size(self) -> int:
        """Number of allocated node ids (live and dead)."""
        return len(self._kind)

    @property
    def num_pis(self) -> int:
        return len(self.pis)

    @property
    def num_pos(self) -> int:
        return len(self._pos)

    @property
    def num_gates(self) -> int:
        return len(self._kind) - 1 - len(self.pis) - self.num_dead

    @property
    def pos(self) -> list[Signal]:
        return [Signal.from_lit(l) for l in self._pos]

    def po(self, i: int) -> Signal:
        return Signal.from_lit(self._pos[i])

    def kind(self, n: int) -> int:
        return self._kind[n]

    def is_pi(self, n: int) -> bool:
        return self._kind[n] == PI

    def is_gate(self, n: int) -> bool:
        return self._kind[n] >= AND

    def is_and(self, n: int) -> bool:
        return self._kind[n] == AND

    def is_xor(self, n: int) -> bool:
        return self._kind[n] == XOR

    def is_dead(self, n: int) -> bool:
        return bool(self._dead[n])

    def fanins(self, n: int) -> tuple[Signal, ...]:
        if self._kind[n] < AND:
            return ()
        return (Signal.from_lit(self._fanin0[n]), Signal.from_lit(self._fanin1[n]))

    def fanout_count(self, n: int) -> int:
        return self._nref[n]

    def fanouts(self, n: int) -> list[int]:
        """Gate fanouts of ``n`` (PO references are counted but not listed)."""
        return list(self._fanouts[n])

    def level(self, n: int) -> int:
        return self._level[n]

    def gates(self) -> list[int]:
        return [n for n in range(1, len(self._kind)) if self._kind[n] >= AND and not self._dead[n]]

    def live_nodes(self) -> list[int]:
        return [n for n in range(len(self._kind)) if not self._dead[n]]

    def pi_index(self, n: int) -> int:
        return self.pis.index(n)

    def strash_lookup(self, kind: int, a, b) -> Signal | None:
        """Existing signal computing ``kind(a, b)`` without creating it."""
        lit = self._lookup(kind, _lit(a), _lit(b))
        return None if lit is None else Signal.from_lit(lit)

    # ------------------------------------------------------------------
    # construction

    def create_pi(self, name: str | None = None) -> Signal:
        n = self._append(PI, 0, 0, 0)
        self.pis.append(n)
        self.pi_names.append(name if name is not None else f"x{len(self.pis) - 1}")
        return Signal(n, False)

    def create_po(self, sig, name: str | None = None) -> int:
        lit = _lit(sig)
        self._check_live(lit >> 1)
        idx = len(self._pos)
        self._pos.append(lit)
        self._nref[lit >> 1] += 1
        self._po_of.setdefault(lit >> 1, []).append(idx)
        self.po_names.append(name if name is not None else f"y{idx}")
        return idx

    def create_and(self, a, b) -> Signal:
        return Signal.from_lit(self.gate_lit(AND, _lit(a), _lit(b)))

    def create_xor(self, a, b) -> Signal:
        return Signal.from_lit(self.gate_lit(XOR, _lit(a), _lit(b)))

    def create_or(self, a, b) -> Signal:
        return Signal.from_lit(self.gate_lit(AND, _lit(a) ^ 1, _lit(b) ^ 1) ^ 1)

    def create_gate(self, kind: int, a, b) -> Signal:
        if kind not in (AND, XOR):
            raise ValueError(f"unsupported gate kind {kind!r}")
        la, lb = _lit(a), _lit(b)
        self._check_live(la >> 1)
        self._check_live(lb >> 1)
        return Signal.from_lit(self.gate_lit(kind, la, lb))

    def _check_live(self, n: int) -> None:
        if not 0 <= n < len(self._kind) or self._dead[n]:
            raise ValueError(f"node {n} is not a live node")

    def _append(self, kind: int, a: int, b: int, level: int) -> int:
        n = len(self._kind)
        self._kind.append(kind)
        self._fanin0.append(a)
        self._fanin1.append(b)
        self._nref.append(0)
        self._level.append(level)
        self._fanouts.append([])
        self._dead.append(0)
        return n

    @staticmethod
    def _normalize(kind: int, a: int, b: int):
        """Trivial simplification.

        Returns ``(lit, None)`` when the gate reduces to an existing literal,
        otherwise ``(parity, key_pair)`` with the canonical fanin pair.
        """
        if kind == AND:
            if a > b:
                a, b = b, a
            if a < 2:
                return (0 if a == 0 else b), None
            if a == b:
                return a, None
            if a ^ b == 1:
                return 0, None
            return 0, (a, b)
        c = (a ^ b) & 1
        a &= -2
        b &= -2
        if a > b:
            a, b = b, a
        if a == 0:
            return b ^ c, None
        if a == b:
            return c, None
        return c, (a, b)

    def _lookup(self, kind: int, a: int, b: int):
        r, pair = self._normalize(kind, a, b)
        if pair is None:
            return r
        hit = self._strash.get(_key(kind, pair[0], pair[1]))
        return None if hit is None else hit ^ r

    def gate_lit(self, kind: int, a: int, b: int) -> int:
        """Create (or find) ``kind(a, b)`` over literals and return its literal."""
        r, pair = self._normalize(kind, a, b)
        if pair is None:
            return r
        a, b = pair
        key = _key(kind, a, b)
        hit = self._strash.get(key)
        if hit is not None:
            return hit ^ r
        na, nb = a >> 1, b >> 1
        la, lb = self._level[na], self._level[nb]
        n = self._append(kind, a, b, (la if la > lb else lb) + 1)
        self._nref[na] += 1
        self._nref[nb] += 1
        self._fanouts[na].append(n)
        self._fanouts[nb].append(n)
        self._strash[key] = 2 * n
        return 2 * n ^ r

    # ------------------------------------------------------------------
    # traversal

    def topo_order(self) -> list[int]:
        """Live node ids, every gate after its fanins.

        Equals increasing id order whenever ids are topological (for example
        right after construction or :meth:`cleanup`).
        """
        kinds, f0, f1, dead = self._kind, self._fanin0, self._fanin1, self._dead
        n = len(kinds)
        mark = bytearray(n)
        order = []
        for root in range(n):
            if mark[root] or dead[root]:
                continue
            if kinds[root] < AND or (mark[f0[root] >> 1] and mark[f1[root] >> 1]):
                mark[root] = 1
                order.append(root)
                continue
            stack = [root]
            while stack:
                v = stack[-1]
                if mark[v]:
                    stack.pop()
                    continue
                if kinds[v] >= AND:
                    a, b = f0[v] >> 1, f1[v] >> 1
                    if not mark[a]:
                        stack.append(a)
                        continue
                    if not mark[b]:
                        stack.append(b)
                        continue
                mark[v] = 1
                order.append(v)
                stack.pop()
        return order

    def tfi_contains(self, start: int, target: int) -> bool:
        """True if ``target`` is ``start`` or lies in its transitive fanin."""
        kinds, f0, f1 = self._kind, self._fanin0, self._fanin1
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            if v == target:
                return True
            if kinds[v] >= AND:
                for u in (f0[v] >> 1, f1[v] >> 1):
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
        return False

    # ------------------------------------------------------------------
    # reference counting

    def _deref_rec(self, root: int, stop=None) -> list[int]:
        """Dereference the cone of ``root``; returns the nodes whose count hit zero."""
        kinds, f0, f1, nref = self._kind, self._fanin0, self._fanin1, self._nref
        out = [root]
        stack = [root]
        while stack:
            v = stack.pop()
            for u in (f0[v] >> 1, f1[v] >> 1):
                nref[u] -= 1
                if nref[u] == 0 and kinds[u] >= AND and (stop is None or u not in stop):
                    out.append(u)
                    stack.append(u)
        return out

    def _ref_rec(self, nodes: list[int]) -> None:
        f0, f1, nref = self._fanin0, self._fanin1, self._nref
        for v in nodes:
            nref[f0[v] >> 1] += 1
            nref[f1[v] >> 1] += 1

    def mffc(self, root: int, stop=None) -> set[int]:
        """Maximum fanout-free cone of a live gate by deref/ref counting.

        ``stop`` optionally bounds the cone (e.g. at cut leaves).
        """
        if self._kind[root] < AND or self._dead[root]:
            raise ValueError(f"node {root} is not a live gate")
        nodes = self._deref_rec(root, stop)
        self._ref_rec(nodes)
        return set(nodes)

    # ------------------------------------------------------------------
    # substitution

    def substitute(self, old_root: int, new_sig) -> None:
        """Replace every reference to ``old_root`` with ``new_sig``.

        The fanout-free cone of ``old_root`` is removed.  Gates that become
        trivial or structurally identical to an existing gate are merged
        transitively.
        """
        new = _lit(new_sig)
        if self._kind[old_root] < AND or self._dead[old_root]:
            raise ValueError(f"node {old_root} is not a live gate")
        self._check_live(new >> 1)
        if self.tfi_contains(new >> 1, old_root):
            raise CycleError(f"node {new >> 1} lies in the transitive fanout of {old_root}")
        self._substitute(old_root, new)

    def _unhash(self, g: int) -> None:
        r, pair = self._normalize(self._kind[g], self._fanin0[g], self._fanin1[g])
        if pair is not None:
            key = _key(self._kind[g], pair[0], pair[1])
            hit = self._strash.get(key)
            if hit is not None and hit >> 1 == g:
                del self._strash[key]

    def _substitute(self, old: int, new: int) -> None:
        kinds, f0s, f1s = self._kind, self._fanin0, self._fanin1
        nref, fanouts, strash = self._nref, self._fanouts, self._strash
        repl: dict[int, int] = {old: new}
        order = [old]
        self._unhash(old)

        def resolve(lit):
            while (lit >> 1) in repl:
                lit = repl[lit >> 1] ^ (lit & 1)
            return lit

        stack = [old]
        while stack:
            o = stack.pop()
            tgt = resolve(repl[o])
            tn = tgt >> 1
            po_idx = self._po_of.pop(o, None)
            if po_idx:
                for i in po_idx:
                    lit = tgt ^ (self._pos[i] & 1)
                    self._pos[i] = lit
                    self._po_of.setdefault(tn, []).append(i)
                nref[tn] += len(po_idx)
                nref[o] -= len(po_idx)
            fo = fanouts[o]
            fanouts[o] = []
            for g in fo:
                pending = g in repl
                if not pending:
                    self._unhash(g)
                a, b = f0s[g], f1s[g]
                if a >> 1 == o:
                    a = tgt ^ (a & 1)
                if b >> 1 == o:
                    b = tgt ^ (b & 1)
                nref[o] -= 1
                nref[tn] += 1
                fanouts[tn].append(g)
                if pending:
                    f0s[g], f1s[g] = a, b
                    continue
                r, pair = self._normalize(kinds[g], a, b)
                hit = None
                if pair is not None:
                    key = _key(kinds[g], pair[0], pair[1])
                    hit = strash.get(key)
                    if hit is not None:
                        r ^= hit
                if pair is None or hit is not None:
                    # g merges into an existing literal
                    f0s[g], f1s[g] = a, b
                    repl[g] = r
                    order.append(g)
                    stack.append(g)
                    continue
                if kinds[g] == AND:
                    f0s[g], f1s[g] = pair
                else:
                    if a > b:
                        a, b = b, a
                    f0s[g], f1s[g] = a, b
                strash[key] = 2 * g ^ r
                la, lb = self._level[a >> 1], self._level[b >> 1]
                self._level[g] = (la if la > lb else lb) + 1
        for o in order:
            if not self._dead[o] and nref[o] == 0:
                self._take_out(o)

    def _take_out(self, root: int) -> None:
        kinds, f0s, f1s, nref, fanouts = self._kind, self._fanin0, self._fanin1, self._nref, self._fanouts
        stack = [root]
        while stack:
            v = stack.pop()
            if self._dead[v]:
                continue
            self._unhash(v)
            self._dead[v] = 1
            self.num_dead += 1
            for u in (f0s[v] >> 1, f1s[v] >> 1):
                nref[u] -= 1
                lst = fanouts[u]
                try:
                    lst.remove(v)
                except ValueError:
                    pass
                if nref[u] == 0 and kinds[u] >= AND and not self._dead[u]:
                    stack.append(u)
            fanouts[v] = []

    # ------------------------------------------------------------------
    # copying and compaction

    def clone(self) -> Network:
        other = Network.__new__(Network)
        other._kind = self._kind[:]
        other._fanin0 = self._fanin0[:]
        other._fanin1 = self._fanin1[:]
        other._nref = self._nref[:]
        other._level = self._level[:]
        other._fanouts = [l[:] for l in self._fanouts]
        other._dead = bytearray(self._dead)
        other._strash = dict(self._strash)
        other._pos = self._pos[:]
        other._po_of = {k: v[:] for k, v in self._po_of.items()}
        other.pis = self.pis[:]
        other.pi_names = self.pi_names[:]
        other.po_names = self.po_names[:]
        other.num_dead = self.num_dead
        return other

    def rebuilt(self) -> tuple[Network, list[int]]:
        """Dense, normalized copy in topological id order.

        Returns the copy and the old-literal map (indexed by old node id,
        giving the new literal of that node).
        """
        out = Network()
        lit_of = [0] * len(self._kind)
        for pi, name in zip(self.pis, self.pi_names):
            lit_of[pi] = out.create_pi(name).lit
        kinds, f0s, f1s = self._kind, self._fanin0, self._fanin1
        for n in self.topo_order():
            if kinds[n] >= AND:
                a, b = f0s[n], f1s[n]
                lit_of[n] = out.gate_lit(kinds[n], lit_of[a >> 1] ^ (a & 1), lit_of[b >> 1] ^ (b & 1))
        for lit, name in zip(self._pos, self.po_names):
            out.create_po(lit_of[lit >> 1] ^ (lit & 1), name)
        return out, lit_of

    def cleanup(self) -> list[int]:
        """Compact ids in place (drops tombstones, renumbers topologically)."""
        out, lit_of = self.rebuilt()
        self.__dict__.update(out.__dict__)
        return lit_of

    def restore(self, snapshot: Network) -> None:
        self.__dict__.update(snapshot.clone().__dict__)

    # ------------------------------------------------------------------

    def check(self) -> None:
        """Assert the structural invariants (for tests and debugging)."""
        kinds, f0s, f1s = self._kind, self._fanin0, self._fanin1
        refs = [0] * len(kinds)
        seen = {}
        for n in range(1, len(kinds)):
            if self._dead[n] or kinds[n] < AND:
                continue
            a, b = f0s[n], f1s[n]
            assert not self._dead[a >> 1] and not self._dead[b >> 1], f"gate {n} has a dead fanin"
            refs[a >> 1] += 1
            refs[b >> 1] += 1
            r, pair = self._normalize(kinds[n], a, b)
            assert pair is not None, f"gate {n} is trivially reducible"
            key = _key(kinds[n], *pair)
            assert key not in seen, f"gates {seen[key]} and {n} are structurally equal"
            seen[key] = n
            assert self._strash.get(key) == 2 * n ^ r, f"gate {n} missing from strash"
            assert sorted(self._fanouts[a >> 1]).count(n) >= 1
        for lit in self._pos:
            assert not self._dead[lit >> 1], "PO references a dead node"
            refs[lit >> 1] += 1
        for n in range(len(kinds)):
            if not self._dead[n]:
                assert refs[n] == self._nref[n], f"node {n}: refcount {self._nref[n]} != {refs[n]}"
        assert len(seen) == len(self._strash), "strash holds stale entries"
        assert set(self.topo_order()) == set(self.live_nodes())

    def __repr__(self):
        return f"<Network pis={self.num_pis} pos={self.num_pos} gates={self.num_gates}>"
