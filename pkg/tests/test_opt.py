
import pytest

import anysyn.opt as opt_mod
from anysyn.cost import BUILTINS, evaluate, get_cost
from anysyn.gen import motivating_networks, random_xag
from anysyn.io import write_xag
from anysyn.opt import PassConfig, VerificationError, optimize, optimize_pass
from anysyn.verify import cec_exhaustive

from conftest import random_corpus


def test_motivating_mc_reaches_three():
    net = motivating_networks()["A"]
    ref = net.clone()
    rep = optimize(net, PassConfig("mc"))
    assert rep.initial_cost == 4
    assert rep.final_cost == 3 == evaluate(net, get_cost("mc"))[0]
    assert cec_exhaustive(net, ref)


def test_iterations_zero_is_identity():
    net = random_xag(8, 100, seed=2)
    text = write_xag(net)
    rep = optimize(net, PassConfig("xag_size", iterations=0))
    assert rep.accepted == 0 and rep.final_cost == rep.initial_cost
    assert write_xag(net) == text


def test_fixpoint_is_stable():
    net = random_xag(10, 200, seed=4, locality=10)
    optimize(net, PassConfig("xag_size", iterations=20))
    text = write_xag(net)
    rep = optimize_pass(net, PassConfig("xag_size"))
    assert rep.accepted == 0
    assert rep.final_cost == rep.initial_cost
    assert write_xag(net) == text


def test_two_iterations_equal_two_passes():
    a = random_xag(10, 250, seed=8, locality=12)
    b = a.clone()
    optimize(a, PassConfig("mc", iterations=2))
    r1 = optimize_pass(b, PassConfig("mc"))
    if r1.accepted:
        optimize_pass(b, PassConfig("mc"))
    assert write_xag(a) == write_xag(b)


def test_deterministic_output():
    base = random_xag(10, 200, seed=12, locality=10)
    outs = set()
    for _ in range(2):
        net = base.clone()
        optimize(net, PassConfig("total_skew", iterations=2))
        outs.add(write_xag(net))
    assert len(outs) == 1


@pytest.mark.parametrize("cf", BUILTINS, ids=lambda c: c.name)
def test_equivalence_and_monotonicity(cf):
    for net in random_corpus(20, 31, max_gates=200):
        ref = net.clone()
        rep = optimize(net, PassConfig(cf.name))
        net.check()
        assert rep.final_cost <= rep.initial_cost
        assert rep.final_cost == evaluate(net, cf)[0]
        assert cec_exhaustive(net, ref)


def test_rollback_restores_snapshot(monkeypatch):
    net = random_xag(10, 200, seed=3, locality=10)
    net.cleanup()
    text = write_xag(net)
    real = opt_mod.evaluate
    calls = []

    def worse_after_pass(n, cf, on_visit=None):
        g, ctxs = real(n, cf, on_visit)
        calls.append(g)
        # the second evaluation is the end-of-pass check
        return (g + 1000 if len(calls) == 2 else g), ctxs

    monkeypatch.setattr(opt_mod, "evaluate", worse_after_pass)
    rep = optimize_pass(net, PassConfig("xag_size"))
    assert rep.rolled_back == 1 and rep.accepted == 0
    assert rep.final_cost == rep.initial_cost
    assert write_xag(net) == text


def test_verify_each_passes_on_sound_engine():
    net = random_xag(8, 120, seed=5, locality=8)
    ref = net.clone()
    optimize(net, PassConfig("xag_size", verify_each=True))
    assert cec_exhaustive(net, ref)


def test_verify_each_catches_bad_commit(monkeypatch):
    net = random_xag(8, 120, seed=5, locality=8)
    real = opt_mod._Pass._commit

    def broken(self, root, new_lit, created, rep, snapshot):
        return real(self, root, new_lit ^ 1, created, rep, snapshot)

    monkeypatch.setattr(opt_mod._Pass, "_commit", broken)
    with pytest.raises(VerificationError):
        optimize_pass(net, PassConfig("xag_size", verify_each=True))


def test_config_validation():
    with pytest.raises(ValueError):
        PassConfig(max_leaves=17)
    with pytest.raises(ValueError):
        PassConfig(max_gates=4)
    with pytest.raises(ValueError):
        PassConfig(iterations=-1)
    with pytest.raises(ValueError):
        PassConfig(max_divisors=0)


def test_report_json_schema():
    net = random_xag(6, 50, seed=1)
    rep = optimize(net, PassConfig("fflc"))
    js = rep.to_json()
    assert set(js) == {"cost_name", "initial_cost", "final_cost", "accepted", "attempted", "passes",
                       "rolled_back", "cpu_ms"}
    assert set(js["cpu_ms"]) == {"traversal", "windowing", "resynthesis", "evaluation", "total"}


def _step_deltas(cf, nets):
    """(before, after, removed, created) per accepted substitution, Global recomputed from scratch."""
    out = []
    for net in nets:
        state = [evaluate(net, cf)[0]]

        def observe(root, new_lit, removed, created, net=net):
            g = evaluate(net, cf)[0]
            out.append((state[0], g, removed, [(v, net.kind(v)) for v in created]))
            state[0] = g

        optimize_pass(net, PassConfig(cf.name), cf, observer=observe)
    return out


@pytest.mark.parametrize("name", ["xag_size", "mc"])
def test_sum_fold_delta_consistency(name):
    cf = get_cost(name)
    steps = _step_deltas(cf, random_corpus(40, 77, max_gates=150))
    assert len(steps) >= 250
    for before, after, removed, created in steps:
        delta = sum(cf.contribute(0, None, k) for _, k in created)
        delta -= sum(cf.contribute(0, c, k) for _, c, k in removed)
        assert after == before + delta
        assert after < before


@pytest.mark.parametrize("name", ["total_skew", "reconv", "fflc", "support_sum"])
def test_sum_fold_never_increases_per_step(name):
    cf = get_cost(name)
    steps = _step_deltas(cf, random_corpus(25, 78, max_gates=150))
    assert steps
    for before, after, _removed, _created in steps:
        assert after <= before
