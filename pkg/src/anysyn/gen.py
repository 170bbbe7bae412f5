"""Random and structured XAG generators for tests and benchmarks."""

from __future__ import annotations

import random

from .xag import AND, XOR, Network


def random_xag(
    num_pis: int,
    num_gates: int,
    seed: int = 0,
    xor_ratio: float = 0.3,
    locality: int | None = None,
    num_pos: int | None = None,
) -> Network:
    """Random XAG with ``num_gates`` distinct gates.

    With ``locality`` set, fanins are mostly drawn from the most recent
    ``locality`` signals, which gives deep nets with reconvergence similar to
    synthesized logic.  Gates left without fanout become POs.
    """
    rng = random.Random(seed)
    net = Network()
    sigs = [net.create_pi().lit for _ in range(num_pis)]
    made = 0
    attempts = 0
    while made < num_gates and attempts < 20 * num_gates + 100:
        attempts += 1
        if locality and len(sigs) > locality and rng.random() < 0.9:
            lo = len(sigs) - locality
            a = sigs[rng.randrange(lo, len(sigs))]
            b = sigs[rng.randrange(lo, len(sigs))]
        else:
            a = sigs[rng.randrange(len(sigs))]
            b = sigs[rng.randrange(len(sigs))]
        if a >> 1 == b >> 1:
            continue
        a ^= rng.getrandbits(1)
        b ^= rng.getrandbits(1)
        kind = XOR if rng.random() < xor_ratio else AND
        before = net.size
        lit = net.gate_lit(kind, a, b)
        if net.size == before:
            continue
        sigs.append(lit & -2)
        made += 1
    dangling = [n for n in range(net.num_pis + 1, net.size) if net._nref[n] == 0]
    outs = dangling
    if num_pos is not None and num_pos > len(dangling):
        seen = set(dangling)
        extra = [s >> 1 for s in sigs[num_pis:] if s >> 1 not in seen]
        rng.shuffle(extra)
        outs = dangling + extra[: num_pos - len(dangling)]
    if not outs and net.size > 1:
        outs = [sigs[-1] >> 1]
    for n in sorted(outs):
        net.create_po(2 * n ^ rng.getrandbits(1))
    return net


def _full_adder(net, a, b, c):
    s = net.gate_lit(XOR, net.gate_lit(XOR, a, b), c)
    # carry = ab | c(a ^ b)
    ab = net.gate_lit(AND, a, b)
    cx = net.gate_lit(AND, c, net.gate_lit(XOR, a, b))
    carry = net.gate_lit(AND, ab ^ 1, cx ^ 1) ^ 1
    return s, carry


def _aig_full_adder(net, a, b, c):
    """Full adder with XOR spelled out in ANDs (XOR-extractable, redundant)."""

    def xor(x, y):
        return net.gate_lit(AND, net.gate_lit(AND, x, y ^ 1) ^ 1, net.gate_lit(AND, x ^ 1, y) ^ 1) ^ 1

    def maj(x, y, z):
        xy = net.gate_lit(AND, x, y)
        xz = net.gate_lit(AND, x, z)
        yz = net.gate_lit(AND, y, z)
        t = net.gate_lit(AND, xy ^ 1, xz ^ 1)
        return net.gate_lit(AND, t, yz ^ 1) ^ 1

    return xor(xor(a, b), c), maj(a, b, c)


def ripple_adder(bits: int, aig_style: bool = False) -> Network:
    net = Network()
    xs = [net.create_pi(f"a{i}").lit for i in range(bits)]
    ys = [net.create_pi(f"b{i}").lit for i in range(bits)]
    carry = net.create_pi("cin").lit
    fa = _aig_full_adder if aig_style else _full_adder
    for i in range(bits):
        s, carry = fa(net, xs[i], ys[i], carry)
        net.create_po(s, f"s{i}")
    net.create_po(carry, "cout")
    return net


def array_multiplier(bits: int, aig_style: bool = False) -> Network:
    net = Network()
    xs = [net.create_pi(f"a{i}").lit for i in range(bits)]
    ys = [net.create_pi(f"b{i}").lit for i in range(bits)]
    fa = _aig_full_adder if aig_style else _full_adder
    rows = [[net.gate_lit(AND, xs[i], ys[j]) for i in range(bits)] for j in range(bits)]
    acc = rows[0] + [0]
    outs = []
    for j in range(1, bits):
        outs.append(acc[0])
        carry = 0
        nxt = []
        for i in range(bits):
            s, carry = fa(net, acc[i + 1], rows[j][i], carry)
            nxt.append(s)
        acc = nxt + [carry]
    outs.extend(acc)
    for k, o in enumerate(outs):
        net.create_po(o, f"p{k}")
    return net


def parity_tree(bits: int, seed: int = 0) -> Network:
    """Parity written as a sum of products over random chunks (very redundant)."""
    rng = random.Random(seed)
    net = Network()
    xs = [net.create_pi().lit for _ in range(bits)]
    terms = []
    for i in range(0, bits, 2):
        if i + 1 < bits:
            a, b = xs[i], xs[i + 1]
            t = net.gate_lit(AND, net.gate_lit(AND, a, b ^ 1) ^ 1, net.gate_lit(AND, a ^ 1, b) ^ 1) ^ 1
            terms.append(t)
        else:
            terms.append(xs[i])
    while len(terms) > 1:
        rng.shuffle(terms)
        a, b = terms.pop(), terms.pop()
        terms.append(net.gate_lit(XOR, a, b))
    net.create_po(terms[0], "parity")
    return net


def mux_tree(select_bits: int) -> Network:
    net = Network()
    sel = [net.create_pi(f"s{i}").lit for i in range(select_bits)]
    data = [net.create_pi(f"d{i}").lit for i in range(1 << select_bits)]
    level = data
    for s in sel:
        nxt = []
        for k in range(0, len(level), 2):
            lo, hi = level[k], level[k + 1]
            t = net.gate_lit(AND, net.gate_lit(AND, s ^ 1, lo) ^ 1, net.gate_lit(AND, s, hi) ^ 1) ^ 1
            nxt.append(t)
        level = nxt
    net.create_po(level[0], "y")
    return net


def motivating_networks() -> dict[str, Network]:
    """The three equivalent networks of the motivating example.

    Each has PIs a, b, c and POs f = b(a | c), g = abc.  N_A and N_B use four
    ANDs; N_C uses three ANDs and two XORs.
    """
    nets = {}

    net = Network()
    a, b, c = (net.create_pi(n).lit for n in "abc")
    n1 = net.gate_lit(AND, a, b)
    n2 = net.gate_lit(AND, b, c)
    n3 = net.gate_lit(AND, n1 ^ 1, n2 ^ 1) ^ 1
    n4 = net.gate_lit(AND, n1, n2)
    net.create_po(n3, "f")
    net.create_po(n4, "g")
    nets["A"] = net

    net = Network()
    a, b, c = (net.create_pi(n).lit for n in "abc")
    n2 = net.gate_lit(AND, b, c)
    n5 = net.gate_lit(AND, a ^ 1, c ^ 1) ^ 1
    n6 = net.gate_lit(AND, b, n5)
    n7 = net.gate_lit(AND, a, n2)
    net.create_po(n6, "f")
    net.create_po(n7, "g")
    nets["B"] = net

    net = Network()
    a, b, c = (net.create_pi(n).lit for n in "abc")
    n1 = net.gate_lit(AND, a, b)
    n2 = net.gate_lit(AND, b, c)
    n8 = net.gate_lit(AND, n1, n2)
    n9 = net.gate_lit(XOR, n1, n2)
    n10 = net.gate_lit(XOR, n9, n8)
    net.create_po(n10, "f")
    net.create_po(n8, "g")
    nets["C"] = net
    return nets
