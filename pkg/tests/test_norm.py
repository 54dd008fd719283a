import numpy as np
import pytest

from strategem.linalg import trace_norm
from strategem.norm import distinguish_bias, norm_vs_trace_distance_check, strategy_distance, strategy_norm
from strategem.registers import RoundShape
from strategem.strategies import (IncompatibleError, random_pure_strategy,
                                  state_strategy, strategy_choi, unitary_channel_strategy,
                                  validate_costrategy)

TWO = RoundShape((2, 2), (2, 2))


def test_identity_vs_bitflip_is_perfectly_distinguishable():
    i = unitary_channel_strategy(np.eye(2))
    x = unitary_channel_strategy(np.array([[0, 1], [1, 0]]))
    r = strategy_distance(i, x)
    assert abs(r.value - 2) < 1e-5
    assert abs(distinguish_bias(i, x) - 1) < 1e-5


def test_pure_state_trace_distance():
    s, t = np.array([1, 0]), np.array([1, 1]) / np.sqrt(2)
    r = strategy_distance(state_strategy(s), state_strategy(t))
    assert abs(r.value - 2 * np.sqrt(1 - 0.5)) < 1e-6


def test_no_input_reduces_to_trace_norm(rng):
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    h = g + g.conj().T
    assert abs(strategy_norm(h, RoundShape((1,), (3,))).value - trace_norm(h)) < 1e-6


def test_zero_and_identical():
    a = random_pure_strategy(TWO, seed=1)
    assert abs(strategy_distance(a, a).value) < 1e-7
    assert abs(strategy_norm(np.zeros((16, 16)), TWO).value) < 1e-7


def test_measurement_is_a_costrategy_split():
    a, b = random_pure_strategy(TWO, seed=2), random_pure_strategy(TWO, seed=3)
    r = strategy_distance(a, b)
    assert 0 <= r.value <= 2 + 1e-6
    assert validate_costrategy(r.B0 + r.B1, TWO).valid
    assert np.linalg.eigvalsh(r.B0).min() > -1e-7 and np.linalg.eigvalsh(r.B1).min() > -1e-7
    h = strategy_choi(a).matrix - strategy_choi(b).matrix
    assert abs(np.trace((r.B0 - r.B1) @ h).real - r.value) < 1e-6
    assert abs(r.bias - (0.5 + 0.25 * r.value)) < 1e-12


def test_sampled_trace_distances_below_norm():
    a, b = random_pure_strategy(TWO, seed=4), random_pure_strategy(TWO, seed=5)
    value, worst, dists = norm_vs_trace_distance_check(a, b, samples=30)
    assert worst <= value + 1e-6 and len(dists) == 30


def test_norm_is_a_norm():
    rng = np.random.default_rng(6)
    shape = RoundShape((2,), (2,))
    ss = [strategy_choi(random_pure_strategy(shape, seed=rng)).matrix for _ in range(3)]
    h1, h2 = ss[0] - ss[1], ss[1] - ss[2]
    n1, n2 = strategy_norm(h1, shape).value, strategy_norm(h2, shape).value
    assert strategy_norm(h1 + h2, shape).value <= n1 + n2 + 1e-6
    assert abs(strategy_norm(-2.5 * h1, shape).value - 2.5 * n1) < 1e-6


def test_shape_mismatch():
    with pytest.raises(IncompatibleError):
        strategy_norm(np.eye(3), TWO)
