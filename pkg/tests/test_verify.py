import random

import pytest
from hypothesis import given, settings, strategies as st

from anysyn.gen import array_multiplier, random_xag, ripple_adder
from anysyn.opt import PassConfig, optimize
from anysyn.resyn import ResynProblem, resynthesize
from anysyn.tt import full_mask, simulate, var_mask
from anysyn.verify import (EXHAUSTIVE_CAP, brute_resyn_oracle, cec_exhaustive, cec_random, equivalent,
                           random_patterns)
from anysyn.xag import Network

# vector 1234 of seed 7 over 30 PIs (taken from random_patterns while writing the test)
MINTERM_30 = "000011000110000000011001110010"
MINTERM_SEED = 7


def parity(n, flip_minterm=None):
    """XOR of ``n`` PIs, optionally complemented on the single input pattern ``flip_minterm``."""
    net = Network()
    pis = [net.create_pi() for _ in range(n)]
    acc = pis[0]
    for p in pis[1:]:
        acc = net.create_xor(acc, p)
    if flip_minterm is not None:
        cube = pis[0] if flip_minterm[0] else ~pis[0]
        for p, bit in zip(pis[1:], flip_minterm[1:]):
            cube = net.create_and(cube, p if bit else ~p)
        acc = net.create_xor(acc, cube)
    net.create_po(acc)
    return net


def test_self_equivalent():
    net = array_multiplier(3)
    assert cec_exhaustive(net, net.clone())
    assert cec_random(net, net.clone(), 10000, 0).consistent


def test_complemented_po_refuted():
    net = ripple_adder(3)
    bad = net.clone()
    bad._pos[1] ^= 1
    ok, cex = cec_exhaustive(net, bad, return_cex=True)
    assert not ok and len(cex) == net.num_pis
    r = cec_random(net, bad, 64, 0)
    assert not r.consistent and r.counterexample is not None


def test_counterexample_is_a_witness():
    rng = random.Random(3)
    for i in range(30):
        a = random_xag(6, 40, seed=i)
        b = a.clone()
        b._pos[0] ^= 1 if rng.random() < 0.5 else 0
        ok, cex = cec_exhaustive(a, b, return_cex=True)
        if ok:
            continue
        row = sum(v << k for k, v in enumerate(cex))
        ta, tb = simulate(a), simulate(b)
        assert any(x[row] != y[row] for x, y in zip(ta, tb))


def test_single_minterm_of_30_found_with_known_seed():
    bits = [int(c) for c in MINTERM_30]
    assert [(v >> 1234) & 1 for v in random_patterns(30, 4096, MINTERM_SEED * 1000003)] == bits
    a = parity(30)
    b = parity(30, bits)
    r = cec_random(a, b, 10000, MINTERM_SEED)
    assert not r.consistent
    assert r.counterexample == bits
    # another seed misses it: the difference is one pattern in 2^30
    assert cec_random(a, b, 10000, 0).consistent


def test_zero_vectors_vacuous():
    a = parity(4)
    b = a.clone()
    b._pos[0] ^= 1
    r = cec_random(a, b, 0, 0)
    assert r.consistent and r.vectors == 0


def test_interface_mismatch():
    with pytest.raises(ValueError):
        cec_exhaustive(parity(3), parity(4))
    with pytest.raises(ValueError):
        cec_random(parity(3), parity(4))


def test_exhaustive_cap():
    big = parity(EXHAUSTIVE_CAP + 1)
    with pytest.raises(ValueError, match="capped"):
        cec_exhaustive(big, big.clone())
    # above the cap, equivalent() falls back to simulation
    assert equivalent(big, big.clone(), vectors=256)


def test_exhaustive_chunks_over_16_pis():
    a = parity(18)
    b = parity(18, [1] * 18)
    ok, cex = cec_exhaustive(a, b, return_cex=True)
    assert not ok and cex == [1] * 18


def test_optimized_pairs_equivalent():
    for i in range(20):
        net = random_xag(8, 80, seed=i, xor_ratio=0.3)
        opt = net.clone()
        optimize(opt, PassConfig("xag_size"))
        assert cec_exhaustive(net, opt)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 10), st.booleans())
def test_random_refutation_implies_exhaustive_refutation(seed, npi, flip):
    a = random_xag(npi, 30, seed=seed)
    b = a.clone()
    if flip:
        b._pos[0] ^= 1
    r = cec_random(a, b, 200, seed)
    if not r.consistent:
        assert not cec_exhaustive(a, b)


# ----------------------------------------------------------------------
# resynthesis oracle


def _problem(target, tables, n, max_gates=2):
    return ResynProblem(n, target, tables, max_gates)


def test_oracle_zero_gate():
    n = 3
    x = [var_mask(n, i) for i in range(n)]
    assert brute_resyn_oracle(_problem(x[1], x, n, 0)) == {"d1"}
    assert brute_resyn_oracle(_problem(x[1] ^ full_mask(n), x, n, 0)) == {"!d1"}
    # with gates allowed the 0-gate candidate is still found by both routes
    p = _problem(x[1], x, n)
    forest = resynthesize(_problem(x[1], x, n))
    assert "d1" in brute_resyn_oracle(p)
    assert "d1" in {forest.encode(o) for o in forest.outputs}


def test_oracle_no_solution():
    n = 4
    x = [var_mask(n, i) for i in range(n)]
    par = x[0] ^ x[1] ^ x[2] ^ x[3]
    p = _problem(par, x[:3], n, 2)
    assert brute_resyn_oracle(p) == set()
    assert resynthesize(_problem(par, x[:3], n, 2)).outputs == []


def test_oracle_caps():
    n = 4
    x = [var_mask(n, i) for i in range(n)]
    with pytest.raises(ValueError):
        brute_resyn_oracle(_problem(x[0], x * 3, n))
    with pytest.raises(ValueError):
        brute_resyn_oracle(_problem(x[0], x, n, 3))
