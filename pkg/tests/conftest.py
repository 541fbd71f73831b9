"""Shared helpers: the fixed seed matrix and generic function checkers."""

import numpy as np
import pytest

from thresholdwindow import FamilySpec, LabelAssignment, flip_time, make_family
from thresholdwindow import rng as trng
from thresholdwindow.errors import NoFlipError

SEED_MATRIX = (1013, 2027, 3041, 4057, 5077)


def zoo_specs():
    """Desk-size representatives of every zoo family."""
    return [
        FamilySpec("majority", n=101),
        FamilySpec("majority", n=100, p_bias=0.3),
        FamilySpec("tribes", n=512),
        FamilySpec("circular-tribes", n=256),
        FamilySpec("iterated-majority", m=3, height=5),
        FamilySpec("iterated-majority", m=5, height=3),
        FamilySpec("triangle", vertices=24),
        FamilySpec("connectivity", vertices=24),
        FamilySpec("clique", vertices=14, p=0.5),
        FamilySpec("dictator", n=64),
        FamilySpec("or", n=64),
        FamilySpec("and-majority-dictator", n=101),
    ]


def spec_id(spec):
    parts = [spec.family]
    if spec.family == "iterated-majority":
        parts.append(f"m{spec.m}h{spec.height}")
    elif spec.vertices is not None:
        parts.append(f"v{spec.vertices}")
    elif spec.n is not None:
        parts.append(f"n{spec.n}")
    return "-".join(parts)


@pytest.fixture(params=zoo_specs(), ids=spec_id)
def zoo_function(request):
    return make_family(request.param)


def check_dominating_pairs(f, num_pairs, seed):
    """Monotonicity spot check: f(bits) <= f(bits | extra) on random pairs."""
    gen = trng.generator(seed)
    for _ in range(num_pairs):
        p = gen.random()
        low = gen.random(f.n) <= p
        high = low | (gen.random(f.n) <= gen.random())
        assert f.evaluate(low) <= f.evaluate(high)


def check_incremental_against_full(f, num_orders, seed, direct_prefixes=3):
    """Incremental insertion equals full evaluation after every prefix.

    The incremental output flips 0 -> 1 exactly once along an insertion order,
    and prefix configurations are nested, so full evaluation is monotone along
    the order too; checking full evaluation just before and at the flip index
    certifies equality at every prefix.  A few random prefixes are also
    compared directly.
    """
    gen = trng.generator(seed)
    n = f.n
    for _ in range(num_orders):
        order = gen.permutation(n)
        state = f.incremental_state()
        assert state is not None
        outputs = np.empty(n + 1, dtype=np.int64)
        outputs[0] = state.output
        for step, j in enumerate(order):
            outputs[step + 1] = state.insert(int(j))
        assert np.all(np.diff(outputs) >= 0), "incremental output not monotone"
        flip = int(np.argmax(outputs)) if outputs[-1] == 1 else None
        bits = np.zeros(n, dtype=bool)
        if flip is None:
            bits[:] = True
            assert f.evaluate(bits) == 0
        else:
            bits[order[:flip]] = True
            if flip > 0:
                pre = bits.copy()
                pre[order[flip - 1]] = False
                assert f.evaluate(pre) == 0
            assert f.evaluate(bits) == (1 if flip > 0 else outputs[0])
            if flip == 0:
                assert outputs[0] == f.evaluate(np.zeros(n, dtype=bool))
        for _ in range(direct_prefixes):
            cut = int(gen.integers(0, n + 1))
            bits = np.zeros(n, dtype=bool)
            bits[order[:cut]] = True
            assert f.evaluate(bits) == outputs[cut]


def brute_force_flip_time(f, labels):
    """min over label values v of {f(configuration at v) = 1}, by full
    evaluation at every label."""
    arr = np.asarray(labels, dtype=float)
    if f.evaluate(np.zeros(f.n, dtype=bool)) == 1:
        return 0.0
    best = None
    for v in np.sort(arr):
        if f.evaluate(arr <= v) == 1:
            best = float(v)
            break
    if best is None:
        raise NoFlipError("constant zero")
    return best


def flip_value(f, seed):
    labels = LabelAssignment(f.n, trng.generator(seed).random(f.n), seed)
    return flip_time(f, labels), labels
