"""Cost functions defined by context propagation and node contribution.

A cost function has two user-supplied parts:

* ``propagate(kind, ctx0, ctx1, node, fanout)`` computes the context of a gate
  from the contexts of its two fanins.  ``node`` is the node id (candidate
  gates get fresh ids at or above the network size) and ``fanout`` its
  reference count, POs included.
* ``contribute(total, ctx, kind)`` folds one node into the running cost.

PIs get ``pi_context(index, node)`` and the constant node ``const_context``.
Every live node is visited exactly once, in topological order.

Writing a new cost takes a few lines::

    def _propagate(kind, c0, c1, node, fanout):
        return max(c0, c1) + (kind == AND)

    and_depth = CostFunction("and_depth", _propagate, lambda t, c, k: max(t, c),
                             pi_context=lambda i, n: 0, const_context=0,
                             order=lambda c: c, guard=lambda new, old, lim: new <= old,
                             monotone=True)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .xag import AND, PI, XOR, Network

Context = Any


class UnknownCostError(ValueError):
    pass


@dataclass(frozen=True)
class CostFunction:
    name: str
    propagate: Callable[[int, Context, Context, int, int], Context]
    contribute: Callable[[Any, Context, int], Any]
    neutral: Any = 0
    pi_context: Callable[[int, int], Context] = lambda index, node: None
    const_context: Context = None
    # total preorder on contexts, used to sort decomposition inputs
    order: Callable[[Context], Any] | None = None
    # guard(new_ctx, old_ctx, limit): may the root be replaced by a node with
    # context new_ctx without hurting nodes downstream?  ``limit`` is the
    # first id handed out to candidate gates.
    guard: Callable[[Context, Context, int], bool] | None = None
    # gate contexts never fall below their fanins' under ``order`` and the fold is a max
    monotone: bool = False
    # the fold is a plain sum of per-node contributions
    additive: bool = False
    # lower bound on the contribution of one gate of each kind (additive costs);
    # used to cut the search, so a loose value only costs quality, never correctness
    gate_bound: dict[int, float] = field(default_factory=dict)
    # propagate reads the fanout argument
    uses_fanout: bool = False
    # contexts carry the node's fanin cone, so a replacement with more gates than
    # the cone it removes raises the contribution of nodes downstream
    cone_sensitive: bool = False
    # the guard keeps order(new) <= order(old) and order never drops from a fanin to
    # its gate, so divisors ordered above the root cannot appear in a replacement
    order_bounded: bool = False
    # a gate fails the guard whenever one of its fanins does
    guard_hereditary: bool = False
    # with order_bounded: a gate's order exceeds each fanin's by at least this much
    order_step: int = 0
    description: str = ""

    def replaceable(self, new_ctx, old_ctx, limit: int) -> bool:
        return True if self.guard is None else self.guard(new_ctx, old_ctx, limit)

    def key(self, ctx):
        return None if self.order is None else self.order(ctx)


def evaluate(net: Network, cf: CostFunction, on_visit: Callable[[int], None] | None = None):
    """Global cost and per-node contexts (a list indexed by node id, None for dead nodes)."""
    kinds, f0s, f1s, nref = net._kind, net._fanin0, net._fanin1, net._nref
    ctxs: list = [None] * net.size
    propagate, contribute = cf.propagate, cf.contribute
    pi_index = {pi: i for i, pi in enumerate(net.pis)}
    total = cf.neutral
    for n in net.topo_order():
        k = kinds[n]
        if k >= AND:
            c = propagate(k, ctxs[f0s[n] >> 1], ctxs[f1s[n] >> 1], n, nref[n])
        elif k == PI:
            c = cf.pi_context(pi_index[n], n)
        else:
            ctxs[n] = cf.const_context
            if on_visit is not None:
                on_visit(n)
            continue
        ctxs[n] = c
        total = contribute(total, c, k)
        if on_visit is not None:
            on_visit(n)
    return total, ctxs


def local_fold(items, cf: CostFunction):
    """Fold ``contribute`` over ``(node, ctx, kind)`` triples, starting from neutral."""
    total = cf.neutral
    contribute = cf.contribute
    for _node, ctx, kind in items:
        total = contribute(total, ctx, kind)
    return total


def gate_lower_bound(cf: CostFunction, kind: int) -> float:
    return cf.gate_bound.get(kind, 0) if cf.additive else 0


# ----------------------------------------------------------------------
# built-ins


def _count(per_and, per_xor):
    def contribute(total, ctx, kind):
        if kind == AND:
            return total + per_and
        if kind == XOR:
            return total + per_xor
        return total

    return contribute


def _none(kind, c0, c1, node, fanout):
    return None


def _max_fold(total, ctx, kind):
    return ctx if kind >= AND and ctx > total else total


def _le(new, old, limit):
    return new <= old


def _level_prop(and_step, xor_step):
    def propagate(kind, c0, c1, node, fanout):
        return (c0 if c0 > c1 else c1) + (and_step if kind == AND else xor_step)

    return propagate


def _skew_prop(kind, c0, c1, node, fanout):
    l0, l1 = c0[0], c1[0]
    if l0 > l1:
        return (l0 + 1, l0 - l1)
    return (l1 + 1, l1 - l0)


def _skew_sum(total, ctx, kind):
    return total + ctx[1] if kind >= AND else total


def _skew_max(total, ctx, kind):
    return ctx[1] if kind >= AND and ctx[1] > total else total


def _same_level(new, old, limit):
    return new[0] == old[0]


def _reconv_prop(kind, c0, c1, node, fanout):
    a, b = c0[0], c1[0]
    return (a | b | (1 << node), (a & b).bit_count())


def _reconv_sum(total, ctx, kind):
    return total + ctx[1] if kind >= AND else total


def _reconv_guard(new, old, limit):
    # the replacement may not pull existing nodes outside the old TFI into the cone
    extra = new[0] & ~old[0]
    return extra >> limit << limit == extra


def _fflc_prop(kind, c0, c1, node, fanout):
    # FFLC = |O| + 2|G| - |M|: a shared gate costs one literal less
    return 1 if fanout > 1 else 2


def _fflc_sum(total, ctx, kind):
    return total + ctx if kind >= AND else total


def _chain_prop(kind, c0, c1, node, fanout):
    if kind != AND:
        return 0
    return (c0 if c0 > c1 else c1) + 1


def _support_prop(kind, c0, c1, node, fanout):
    return c0 | c1


def _support_sum(total, ctx, kind):
    return total + ctx.bit_count() if kind >= AND else total


def _subset(new, old, limit):
    return new & ~old == 0


def _popcount(ctx):
    return ctx.bit_count()


def _skew_key(ctx):
    return ctx[0]


def _reconv_key(ctx):
    return ctx[0].bit_count()


def _ident(ctx):
    return ctx


xag_size = CostFunction(
    "xag_size", _none, _count(1, 1), additive=True, gate_bound={AND: 1, XOR: 1},
    description="number of AND and XOR gates",
)
mc = CostFunction(
    "mc", _none, _count(1, 0), additive=True, gate_bound={AND: 1, XOR: 0},
    description="multiplicative complexity (AND count)",
)
xag_depth = CostFunction(
    "xag_depth", _level_prop(1, 1), _max_fold, pi_context=lambda i, n: 0, const_context=0,
    order=_ident, guard=_le, monotone=True, order_bounded=True, order_step=1, guard_hereditary=True,
    description="logic depth, AND and XOR one level each",
)
t_depth = CostFunction(
    "t_depth", _level_prop(1, 0), _max_fold, pi_context=lambda i, n: 0, const_context=0,
    order=_ident, guard=_le, monotone=True, order_bounded=True, guard_hereditary=True,
    description="AND depth, XORs free",
)
total_skew = CostFunction(
    "total_skew", _skew_prop, _skew_sum, pi_context=lambda i, n: (0, 0), const_context=(0, 0),
    order=_skew_key, guard=_same_level, additive=True, order_bounded=True, order_step=1,
    description="sum over gates of the fanin level difference",
)
max_skew = CostFunction(
    "max_skew", _skew_prop, _skew_max, pi_context=lambda i, n: (0, 0), const_context=(0, 0),
    order=_skew_key, guard=_same_level, order_bounded=True, order_step=1,
    description="largest fanin level difference",
)
reconv = CostFunction(
    "reconv", _reconv_prop, _reconv_sum, pi_context=lambda i, n: (1 << n, 0), const_context=(0, 0),
    order=_reconv_key, guard=_reconv_guard, additive=True, cone_sensitive=True,
    guard_hereditary=True,
    description="number of reconvergent node pairs",
)
fflc = CostFunction(
    "fflc", _fflc_prop, _fflc_sum, pi_context=lambda i, n: 0, const_context=0,
    additive=True, gate_bound={AND: 1, XOR: 1}, uses_fanout=True,
    description="factored-form literal cost without the PO term",
)
and_chain = CostFunction(
    "and_chain", _chain_prop, _max_fold, pi_context=lambda i, n: 0, const_context=0,
    order=_ident, guard=_le,
    description="longest chain of consecutive ANDs",
)
support_sum = CostFunction(
    "support_sum", _support_prop, _support_sum, pi_context=lambda i, n: 1 << i, const_context=0,
    order=_popcount, guard=_subset, additive=True, gate_bound={AND: 1, XOR: 1},
    order_bounded=True, guard_hereditary=True,
    description="sum over gates of the structural PI support size",
)

# AIG-style baselines: an XOR counts as three ANDs and two levels
aig_size = CostFunction(
    "aig_size", _none, _count(1, 3), additive=True, gate_bound={AND: 1, XOR: 3},
    description="AIG size, XOR counted as three ANDs",
)
aig_depth = CostFunction(
    "aig_depth", _level_prop(1, 2), _max_fold, pi_context=lambda i, n: 0, const_context=0,
    order=_ident, guard=_le, monotone=True, order_bounded=True, order_step=1, guard_hereditary=True,
    description="AIG depth, XOR counted as two levels",
)

BUILTINS = [xag_size, mc, xag_depth, t_depth, total_skew, max_skew, reconv, fflc, and_chain, support_sum]
BASELINES = [aig_size, aig_depth]

_REGISTRY: dict[str, CostFunction] = {cf.name: cf for cf in BUILTINS + BASELINES}


def register(cf: CostFunction) -> None:
    _REGISTRY[cf.name] = cf


def cost_names() -> list[str]:
    return list(_REGISTRY)


def get_cost(name: str) -> CostFunction:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownCostError(f"unknown cost {name!r}; registered: {', '.join(_REGISTRY)}") from None


# ----------------------------------------------------------------------
# candidate comparison


@dataclass
class Choice:
    output: int  # forest literal
    fold: Any
    gates: list[int]  # forest gate nodes, topological
    encoding: str


def compare_candidates(forest, cf: CostFunction, mffc_fold, root_ctx, limit: int, adjust=None,
                       start: int = 0, max_new: int | None = None) -> Choice | None:
    """Cheapest forest output whose fold is strictly below ``mffc_fold``.

    ``adjust(output, gates, fold) -> (new_fold, old_fold)`` optionally
    replaces both sides (fanout-dependent costs).  Ties go to fewer gates,
    then the smaller encoding.  Only outputs from index ``start`` on are
    considered, and only those with at most ``max_new`` gates when given.
    """
    best = None
    best_key = None
    contribute = cf.contribute
    outputs = forest.outputs
    for idx in range(start, len(outputs)):
        out = outputs[idx]
        gates = forest.cone(out)
        if max_new is not None and len(gates) > max_new:
            continue
        total = cf.neutral
        ctxs = forest.contexts
        kinds = forest.kinds
        for g in gates:
            total = contribute(total, ctxs[g], kinds[g])
        old = mffc_fold
        if adjust is not None:
            total, old = adjust(out, gates, total)
        if not total < old:
            continue
        if not cf.replaceable(forest.contexts[out >> 1], root_ctx, limit):
            continue
        key = (total, len(gates))
        if best is not None:
            if key > best_key:
                continue
            if key == best_key:
                enc = forest.encode(out)
                if enc >= best.encoding:
                    continue
                best = Choice(out, total, gates, enc)
                continue
        best = Choice(out, total, gates, forest.encode(out))
        best_key = key
    return best
