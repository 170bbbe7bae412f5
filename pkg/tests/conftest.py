import functools
import random

import pytest

from anysyn.gen import motivating_networks, random_xag
from anysyn.resyn import ResynProblem, dedup_divisors
from anysyn.tt import full_mask, simulate, var_mask


def random_corpus(count, seed, max_pis=12, max_gates=300, min_pis=3, min_gates=5):
    """Seeded stream of random XAGs of mixed shape."""
    rng = random.Random(seed)
    for i in range(count):
        npi = rng.randint(min_pis, max_pis)
        ng = rng.randint(min_gates, max_gates)
        yield random_xag(npi, ng, seed=seed * 100003 + i, xor_ratio=rng.random() * 0.5,
                         locality=rng.choice([None, 8, 20]))


def random_problem(rng, max_gates):
    n = rng.randint(2, 5)
    mask = full_mask(n)
    tabs = [rng.getrandbits(1 << n) for _ in range(rng.randint(1, 8))]
    kept, _ = dedup_divisors(tabs, n)
    tabs = [tabs[i] for i in kept] or [var_mask(n, 0)]
    if rng.random() < 0.8 and len(tabs) >= 2:
        a, b, c = (rng.choice(tabs) ^ (mask if rng.random() < 0.5 else 0) for _ in range(3))
        t = rng.choice([a & b, a ^ b, (a & b) ^ c, (a ^ b) & c, a])
    else:
        t = rng.getrandbits(1 << n)
    return ResynProblem(n, t, tabs, max_gates, use_sop=False, use_esop=False)


def reconv_by_paths(net):
    """Count (u, n) pairs where two paths from u enter gate n through different fanins."""
    paths_into = {}
    for n in net.topo_order():
        if not net.is_gate(n):
            continue
        sides = []
        for f in net.fanins(n):
            # every node with a path to the fanin, the fanin included
            found = set()
            stack = [[f.node]]
            while stack:
                path = stack.pop()
                found.add(path[-1])
                for g in net.fanins(path[-1]):
                    if g.node != 0:
                        stack.append(path + [g.node])
            sides.append(found)
        paths_into[n] = len(sides[0] & sides[1])
    return sum(paths_into.values())


def po_tables(net):
    return [t.bits for t in simulate(net)]


@pytest.fixture
def nets():
    return motivating_networks()


# ----------------------------------------------------------------------
# acceptance reporting: one PASS/FAIL line per criterion, repeated in the summary

_CRITERIA: dict[int, str] = {}


def record_criterion(number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    _CRITERIA[number] = line
    print(line)


def criterion(number):
    """Decorate a test returning ``(ok, detail)``; records the line and asserts ``ok``."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                ok, detail = fn(*args, **kwargs)
            except Exception as e:
                record_criterion(number, False, f"error: {e!r}")
                raise
            record_criterion(number, ok, detail)
            assert ok, detail

        return wrapper

    return deco


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
