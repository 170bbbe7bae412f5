"""Greedy cost-driven resynthesis passes over a whole network."""

from __future__ import annotations

import gc
import math
from bisect import bisect_right
from dataclasses import asdict, dataclass, field
from time import perf_counter

from .cost import CostFunction, compare_candidates, evaluate, get_cost
from .resyn import DEFAULT_MAX_GATES_DECOMP, ResynProblem, dedup_divisors, resynthesize
from .tt import MAX_VARS, full_mask
from .window import DEFAULT_MAX_DIVISORS, DEFAULT_MAX_LEAVES, build_window, reconv_cut
from .xag import AND, XOR, Network

PHASES = ("traversal", "windowing", "resynthesis", "evaluation")


class VerificationError(RuntimeError):
    pass


@dataclass
class PassConfig:
    cost_name: str = "xag_size"
    max_leaves: int = DEFAULT_MAX_LEAVES
    max_divisors: int = DEFAULT_MAX_DIVISORS
    max_gates: int = 3
    iterations: int = 1
    seed: int = 0
    verify_each: bool = False
    max_gates_decomp: int = DEFAULT_MAX_GATES_DECOMP
    use_sop: bool = True
    use_esop: bool = True
    max_outputs: int = 0
    # divisor caps for the two- and three-gate shapes inside the optimizer
    max_div_2: int = 24
    max_div_3: int = 10

    def __post_init__(self):
        if not 2 <= self.max_leaves <= MAX_VARS:
            raise ValueError(f"max_leaves must be in [2, {MAX_VARS}]")
        if self.max_divisors < 1:
            raise ValueError("max_divisors must be positive")
        if not 0 <= self.max_gates <= 3:
            raise ValueError("max_gates must be in [0, 3]")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")


@dataclass
class PassReport:
    cost_name: str
    initial_cost: float
    final_cost: float
    attempted: int = 0
    accepted: int = 0
    passes: int = 0
    rolled_back: int = 0
    cpu: dict = field(default_factory=lambda: {p: 0.0 for p in PHASES})

    @property
    def cpu_ms(self) -> dict:
        return {p: round(v * 1000.0, 3) for p, v in self.cpu.items()}

    @property
    def total_ms(self) -> float:
        return round(sum(self.cpu.values()) * 1000.0, 3)

    def to_json(self) -> dict:
        return {
            "cost_name": self.cost_name,
            "initial_cost": self.initial_cost,
            "final_cost": self.final_cost,
            "accepted": self.accepted,
            "attempted": self.attempted,
            "passes": self.passes,
            "rolled_back": self.rolled_back,
            "cpu_ms": dict(self.cpu_ms, total=self.total_ms),
        }

    def merge(self, other: PassReport) -> None:
        self.final_cost = other.final_cost
        self.attempted += other.attempted
        self.accepted += other.accepted
        self.passes += other.passes
        self.rolled_back += other.rolled_back
        for p in PHASES:
            self.cpu[p] += other.cpu[p]


def _contribution(cf: CostFunction, ctx, kind):
    return cf.contribute(cf.neutral, ctx, kind) - cf.neutral


class _Pass:
    def __init__(self, net: Network, cfg: PassConfig, cf: CostFunction, observer=None):
        self.net = net
        self.cfg = cfg
        self.cf = cf
        self.report = None
        # observer(root, new_lit, removed, created) after each accepted substitution;
        # removed holds (node, context, kind) of the nodes taken out
        self.observer = observer

    def run(self) -> PassReport:
        net, cf = self.net, self.cf
        cpu = {p: 0.0 for p in PHASES}
        t0 = perf_counter()
        initial, ctxs = evaluate(net, cf)
        cpu["evaluation"] += perf_counter() - t0
        rep = PassReport(cf.name, initial, initial, passes=1, cpu=cpu)
        snapshot = net.clone()
        self.ctxs = ctxs
        t0 = perf_counter()
        order = net.topo_order()
        cpu["traversal"] += perf_counter() - t0
        kinds, dead = net._kind, net._dead
        for root in order:
            if dead[root] or kinds[root] < AND:
                continue
            self._visit(root, rep, snapshot)
        t0 = perf_counter()
        net.cleanup()
        final, _ = evaluate(net, cf)
        if final > initial:
            net.restore(snapshot)
            net.cleanup()
            final, _ = evaluate(net, cf)
            rep.rolled_back = 1
            rep.accepted = 0
        cpu["evaluation"] += perf_counter() - t0
        rep.final_cost = final
        return rep

    # ------------------------------------------------------------------

    def _visit(self, root: int, rep: PassReport, snapshot: Network) -> None:
        net, cfg, cf, ctxs = self.net, self.cfg, self.cf, self.ctxs
        cpu = rep.cpu
        kinds, f0s, f1s, nref = net._kind, net._fanin0, net._fanin1, net._nref
        propagate, contribute = cf.propagate, cf.contribute

        t0 = perf_counter()
        cut = reconv_cut(net, root, cfg.max_leaves)
        win = build_window(net, cut, cfg.max_divisors)
        t1 = perf_counter()
        cpu["windowing"] += t1 - t0

        # refresh contexts: leaves one level deep, then the window in order
        for v in cut.leaves:
            if kinds[v] >= AND:
                ctxs[v] = propagate(kinds[v], ctxs[f0s[v] >> 1], ctxs[f1s[v] >> 1], v, nref[v])
        for v in win.members:
            ctxs[v] = propagate(kinds[v], ctxs[f0s[v] >> 1], ctxs[f1s[v] >> 1], v, nref[v])
        mffc = win.mffc
        mffc_fold = cf.neutral
        for v in mffc:
            mffc_fold = contribute(mffc_fold, ctxs[v], kinds[v])

        base = cf.neutral  # lowest possible fold of boundary nodes after the swap
        old_total = mffc_fold
        boundary = None
        if cf.uses_fanout:
            boundary = {}
            for v in mffc:
                for u in (f0s[v] >> 1, f1s[v] >> 1):
                    if u not in mffc:
                        boundary[u] = boundary.get(u, 0) + 1
            for u, k in boundary.items():
                if kinds[u] >= AND:
                    old_total = contribute(old_total, ctxs[u], kinds[u])
                    c = propagate(kinds[u], ctxs[f0s[u] >> 1], ctxs[f1s[u] >> 1], u, nref[u] - k)
                    base = contribute(base, c, kinds[u])
        t2 = perf_counter()
        cpu["traversal"] += t2 - t1
        if old_total == cf.neutral and not cf.uses_fanout:
            return
        rep.attempted += 1

        n = win.num_vars
        mask = full_mask(n)
        target = win.tables[root]
        root_ctx = ctxs[root]
        limit = net.size

        if target == 0 or target == mask:
            adj_new, adj_old = self._boundary_fold(boundary, {}, None, 0, nref[root], base_total=cf.neutral,
                                                   old_total=mffc_fold)
            if adj_new < adj_old and cf.replaceable(cf.const_context, root_ctx, limit):
                self._commit(root, 1 if target else 0, [], rep, snapshot)
            cpu["evaluation"] += perf_counter() - t2
            return

        divs = win.divisors
        if cf.order_bounded:
            rk = cf.order(root_ctx)
            divs = [v for v in divs if cf.order(ctxs[v]) <= rk]
        if cf.guard_hereditary:
            divs = [v for v in divs if cf.replaceable(ctxs[v], root_ctx, limit)]
        tabs = win.tables
        dtabs = [tabs[v] for v in divs]
        keys = None
        if cf.order is not None:
            order = cf.order
            keys = [(order(ctxs[v]), v) for v in divs]
        kept, rep_lit = dedup_divisors(dtabs, n, keys)
        if keys is not None:
            # cheapest contexts first, so the capped searches see them
            perm = sorted(range(len(kept)), key=lambda p: keys[kept[p]])
            new_pos = [0] * len(perm)
            for q, p in enumerate(perm):
                new_pos[p] = q
            kept = [kept[p] for p in perm]
            rep_lit = {i: 2 * new_pos[l >> 1] + (l & 1) for i, l in rep_lit.items()}
        div_nodes = [divs[i] for i in kept]
        node_rep = {divs[i]: l for i, l in rep_lit.items()}
        leaf_lits = []
        for leaf in cut.leaves:
            l = node_rep.get(leaf)
            if l is None:
                leaf_lits = None
                break
            leaf_lits.append(l)
        gate_inputs = None
        if cf.monotone:
            # gates never sit below their fanins, so once the cheapest gate over a
            # divisor reaches the MFFC fold, neither it nor any later divisor can feed one
            gate_inputs = 0
            cc, neutral = cf.const_context, cf.neutral
            for v in div_nodes:
                c = ctxs[v]
                if not any(contribute(neutral, propagate(k, c, cc, limit, 1), k) < old_total for k in (AND, XOR)):
                    break
                gate_inputs += 1

        depth_inputs = None
        if cf.order_step > 0 and keys is not None:
            # keys are sorted, so the divisors allowed at each gate depth form a prefix
            rk = cf.order(root_ctx)
            sorted_keys = [keys[i][0] for i in kept]
            depth_inputs = tuple(bisect_right(sorted_keys, rk - j * cf.order_step) for j in (1, 2, 3))

        lookup = net._lookup

        def structural_hit(kind, la, lb):
            hit = lookup(kind, 2 * div_nodes[la >> 1] ^ (la & 1), 2 * div_nodes[lb >> 1] ^ (lb & 1))
            if hit is None:
                return None
            r = node_rep.get(hit >> 1)
            return None if r is None else r ^ (hit & 1)

        lb_and = cf.gate_bound.get(AND, 0) if cf.additive else 0
        lb_xor = cf.gate_bound.get(XOR, 0) if cf.additive else 0
        budget = math.inf
        if cf.additive:
            budget = old_total - base
        problem = ResynProblem(
            n, target, [tabs[v] for v in div_nodes], cfg.max_gates,
            contexts=[ctxs[v] for v in div_nodes], cost=cf, limit=limit,
            structural_hit=structural_hit, leaf_lits=leaf_lits,
            use_sop=cfg.use_sop, use_esop=cfg.use_esop, max_gates_decomp=cfg.max_gates_decomp,
            budget=budget, lb_and=lb_and, lb_xor=lb_xor, max_outputs=cfg.max_outputs,
            max_div_2=cfg.max_div_2, max_div_3=cfg.max_div_3, gate_inputs=gate_inputs,
            depth_inputs=depth_inputs,
        )

        root_refs = nref[root] if cf.uses_fanout else None

        max_new = len(mffc) if cf.cone_sensitive else None
        state = {"best": None, "seen": 0, "time": 0.0}

        def consider(forest):
            t = perf_counter()
            adj = None if not cf.uses_fanout else (
                lambda o, g, tot: self._fanout_fold(forest, o, g, boundary, div_nodes, root_refs, mffc_fold, limit))
            ch = compare_candidates(forest, cf, old_total if adj is None else mffc_fold, root_ctx, limit,
                                    adj, start=state["seen"], max_new=max_new)
            state["seen"] = len(forest.outputs)
            b = state["best"]
            if ch is not None and (b is None or (ch.fold, len(ch.gates), ch.encoding) < (b.fold, len(b.gates), b.encoding)):
                state["best"] = ch
            state["time"] += perf_counter() - t
            return state["best"]

        def on_level(forest, k):
            best = consider(forest)
            if best is None:
                return None
            if cf.additive:
                return best.fold - base
            if k >= 2:
                # max-folds give no budget; three-gate shapes only run when nothing smaller was accepted
                problem.max_gates = min(problem.max_gates, k)
            return None

        t3 = perf_counter()
        forest = resynthesize(problem, on_level)
        best = consider(forest)
        t4 = perf_counter()
        cpu["resynthesis"] += t4 - t3 - state["time"]
        cpu["evaluation"] += state["time"]
        if best is None:
            return
        # materialize
        m = [0] + [2 * v for v in div_nodes]
        before = net.size
        gate_lit = net.gate_lit
        fk, fa, fb = forest.kinds, forest.fanin0, forest.fanin1
        for g in best.gates:
            a, b = fa[g], fb[g]
            while len(m) <= g:
                m.append(None)
            m[g] = gate_lit(fk[g], m[a >> 1] ^ (a & 1), m[b >> 1] ^ (b & 1))
        out = best.output
        new_lit = m[out >> 1] ^ (out & 1)
        created = list(range(before, net.size))
        if len(created) < len(best.gates) and cf.guard is not None and new_lit >> 1 != root:
            # some gates already existed outside the window: recheck the guard on real contexts
            local = {}

            def ctx_of(v):
                return local[v] if v >= before else ctxs[v]

            for g in best.gates:
                v = m[g] >> 1
                if v >= before:
                    local[v] = propagate(kinds[v], ctx_of(f0s[v] >> 1), ctx_of(f1s[v] >> 1), v, 1)
            if not cf.replaceable(ctx_of(new_lit >> 1), root_ctx, before):
                for v in reversed(created):
                    if not net._dead[v] and net._nref[v] == 0:
                        net._take_out(v)
                cpu["traversal"] += perf_counter() - t4
                return
        self._commit(root, new_lit, created, rep, snapshot)
        cpu["traversal"] += perf_counter() - t4

    def _boundary_fold(self, boundary, cand_refs, out_node, out_lit, root_refs, base_total, old_total):
        """Fold of fanout-affected boundary nodes, (new side, old side)."""
        if not boundary and not cand_refs:
            return base_total, old_total
        net, cf, ctxs = self.net, self.cf, self.ctxs
        kinds, f0s, f1s, nref = net._kind, net._fanin0, net._fanin1, net._nref
        delta = {u: -k for u, k in boundary.items()} if boundary else {}
        for u, k in cand_refs.items():
            delta[u] = delta.get(u, 0) + k
        if out_node is not None:
            delta[out_node] = delta.get(out_node, 0) + root_refs
        new, old = base_total, old_total
        for u, dk in delta.items():
            if dk == 0 or kinds[u] < AND:
                continue
            old = cf.contribute(old, ctxs[u], kinds[u])
            c = cf.propagate(kinds[u], ctxs[f0s[u] >> 1], ctxs[f1s[u] >> 1], u, nref[u] + dk)
            new = cf.contribute(new, c, kinds[u])
        return new, old

    def _fanout_fold(self, forest, out, gates, boundary, div_nodes, root_refs, mffc_fold, limit):
        cf = self.cf
        nd = forest.num_divisors
        refs: dict[int, int] = {}
        cand_refs: dict[int, int] = {}
        fk, fa, fb, fctx = forest.kinds, forest.fanin0, forest.fanin1, forest.contexts
        for g in gates:
            for x in (fa[g] >> 1, fb[g] >> 1):
                if x > nd:
                    refs[x] = refs.get(x, 0) + 1
                elif x > 0:
                    node = div_nodes[x - 1]
                    cand_refs[node] = cand_refs.get(node, 0) + 1
        total = cf.neutral
        on = out >> 1
        local = {}
        for g in gates:
            fo = refs.get(g, 0) + (root_refs if g == on else 0)
            a, b = fa[g] >> 1, fb[g] >> 1
            c = cf.propagate(fk[g], local.get(a, fctx[a]), local.get(b, fctx[b]), limit + g, fo)
            local[g] = c
            total = cf.contribute(total, c, fk[g])
        out_node = div_nodes[on - 1] if 0 < on <= nd else None
        return self._boundary_fold(boundary, cand_refs, out_node, out, root_refs, total, mffc_fold)

    def _commit(self, root: int, new_lit: int, created: list[int], rep: PassReport, snapshot: Network) -> None:
        net, cf, ctxs = self.net, self.cf, self.ctxs
        if new_lit >> 1 == root:
            for v in reversed(created):
                if not net._dead[v] and net._nref[v] == 0:
                    net._take_out(v)
            return
        watch = None
        if self.observer is not None:
            dead = net._dead
            watch = [v for v in range(net.size) if not dead[v] and net._kind[v] >= AND]
        net._substitute(root, new_lit)
        kinds, f0s, f1s, nref, dead = net._kind, net._fanin0, net._fanin1, net._nref, net._dead
        if len(ctxs) < net.size:
            ctxs.extend([None] * (net.size - len(ctxs)))
        for v in created:
            if dead[v]:
                continue
            if nref[v] == 0:
                net._take_out(v)
                continue
            ctxs[v] = cf.propagate(kinds[v], ctxs[f0s[v] >> 1], ctxs[f1s[v] >> 1], v, nref[v])
        rep.accepted += 1
        if watch is not None:
            removed = [(v, ctxs[v], kinds[v]) for v in watch if dead[v]]
            self.observer(root, new_lit, removed, [v for v in created if not dead[v]])
        if self.cfg.verify_each:
            from .verify import cec_random, equivalent

            ok = equivalent(snapshot, net) if net.num_pis <= 16 else cec_random(snapshot, net, 2048, 1).consistent
            if not ok:
                raise VerificationError(f"substitution at node {root} changed the network function")


def optimize_pass(net: Network, cfg: PassConfig, cf: CostFunction | None = None, observer=None) -> PassReport:
    """One traversal in topological order; rolls back if the cost went up.

    ``observer(root, new_lit, removed, created)`` is called after every
    accepted substitution (slow: it scans the network, meant for tests).
    """
    if cf is None:
        cf = get_cost(cfg.cost_name)
    enabled = gc.isenabled()
    gc.disable()
    try:
        return _Pass(net, cfg, cf, observer).run()
    finally:
        if enabled:
            gc.enable()


def optimize(net: Network, cfg: PassConfig, cf: CostFunction | None = None) -> PassReport:
    """Up to ``cfg.iterations`` passes, stopping early once a pass changes nothing."""
    if cf is None:
        cf = get_cost(cfg.cost_name)
    if cfg.iterations == 0:
        g, _ = evaluate(net, cf)
        return PassReport(cf.name, g, g)
    total = None
    for _ in range(cfg.iterations):
        r = optimize_pass(net, cfg, cf)
        if total is None:
            total = r
        else:
            total.merge(r)
        if r.accepted == 0:
            break
    return total


def report_dict(report: PassReport) -> dict:
    return asdict(report)
