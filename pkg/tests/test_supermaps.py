import numpy as np
import pytest

from strategem.linalg import partial_trace
from strategem.registers import RoundShape
from strategem.strategies import (IncompatibleError, random_pure_strategy, strategy_choi,
                                  unitary_channel_strategy, validate_costrategy)
from strategem.supermaps import (Channel, InvalidChannelError, certify_strategy_preserving,
                                 from_channel_composition, identity_supermap,
                                 monotonicity_check_fidelity, monotonicity_check_norm,
                                 random_composition_supermap, random_costrategy_choi, round_merging,
                                 round_padding)

from conftest import rand_complex

QUBIT = RoundShape((2,), (2,))
TWO = RoundShape((2, 2), (2, 2))


def haar_unitary(rng, d):
    q, r = np.linalg.qr(rand_complex(rng, d, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_identity_composition_is_identity(rng):
    u = from_channel_composition([None, None], [None, None], TWO)
    s = strategy_choi(random_pure_strategy(TWO, seed=rng)).matrix
    assert np.abs(u.apply(s) - s).max() < 1e-12
    b = random_costrategy_choi(TWO, rng)
    assert np.abs(u.apply_adjoint(b) - b).max() < 1e-12


def test_composition_matches_direct_channel(rng):
    # one round: post . S . pre with unitary channels, computed on the Choi operator directly
    u1, u2, v = haar_unitary(rng, 2), haar_unitary(rng, 2), haar_unitary(rng, 2)
    sup = from_channel_composition([Channel.unitary(v)], [Channel.unitary(u2)], QUBIT)
    s = unitary_channel_strategy(u1)
    direct = strategy_choi(unitary_channel_strategy(u2 @ u1 @ v)).matrix
    assert np.abs(sup.apply(strategy_choi(s).matrix) - direct).max() < 1e-12


def test_depolarizing_post_channel(rng):
    sup = from_channel_composition([None], [Channel.depolarizing(2)], QUBIT)
    s = strategy_choi(random_pure_strategy(QUBIT, seed=rng)).matrix
    out = sup.apply(s)
    # constant output: Choi = I/2 (x) I
    assert np.abs(out - np.kron(np.eye(2) / 2, np.eye(2))).max() < 1e-12
    assert np.abs(partial_trace(out, [2, 2], [0]) - np.eye(2)).max() < 1e-12


def test_channel_from_choi_roundtrip(rng):
    ch = Channel.random(2, 3, 2, rng)
    back = Channel.from_choi(ch.choi(), 2, 3)
    rho = np.diag([0.3, 0.7]).astype(complex)
    assert np.abs(back.apply(rho) - ch.apply(rho)).max() < 1e-10
    with pytest.raises(InvalidChannelError):
        Channel.from_choi(np.eye(4), 2, 2)
    with pytest.raises(InvalidChannelError):
        Channel((np.eye(2) * 0.5,))


def test_adjoint_identity(rng):
    for shape in (QUBIT, TWO):
        u = random_composition_supermap(shape, seed=rng)
        x = rand_complex(rng, shape.choi_dim, shape.choi_dim)
        y = rand_complex(rng, u.out_shape.choi_dim, u.out_shape.choi_dim)
        lhs = np.trace(u.adjoint()(y).conj().T @ x)
        rhs = np.trace(y.conj().T @ u(x))
        assert abs(lhs - rhs) < 1e-10


def test_adjoint_images_are_costrategies(rng):
    for shape in (QUBIT, TWO, RoundShape((1, 2), (2, 2))):
        u = random_composition_supermap(shape, seed=rng)
        for _ in range(3):
            b = random_costrategy_choi(u.out_shape, rng)
            assert validate_costrategy(u.apply_adjoint(b), shape).valid


def test_images_are_strategies_and_purified(rng):
    u = random_composition_supermap(TWO, seed=rng)
    rep = certify_strategy_preserving(u, trials=4, seed=rng)
    assert rep.ok
    a = random_pure_strategy(TWO, seed=rng)
    p = u.image_purification(a)
    assert np.abs(p.choi() - u.apply(strategy_choi(a).matrix)).max() < 1e-10
    raw = u.image_purification(a, compress=False)
    assert raw.memory == 8 * len(u.kraus_factors)


def test_padding_and_merging(rng):
    for u in (round_padding(QUBIT), round_padding(TWO, 0), round_merging(TWO, 0)):
        assert certify_strategy_preserving(u, trials=3, seed=rng).ok
    m = round_merging(TWO, 0)
    assert m.out_shape == RoundShape((4,), (4,))
    with pytest.raises(ValueError):
        round_merging(QUBIT, 0)


def test_identity_monotonicity_is_equality(rng):
    a, b = random_pure_strategy(TWO, seed=rng), random_pure_strategy(TWO, seed=rng)
    rep = monotonicity_check_fidelity(identity_supermap(TWO), a, b)
    assert abs(rep.margin) < 1e-6
    h = strategy_choi(a).matrix - strategy_choi(b).matrix
    rep = monotonicity_check_norm(identity_supermap(TWO), h)
    assert abs(rep.margin) < 1e-6
    assert monotonicity_check_norm(identity_supermap(TWO), np.zeros((16, 16))).after < 1e-7


def test_depolarizing_everything_gives_fidelity_one(rng):
    u = from_channel_composition([None, None], [Channel.depolarizing(2), Channel.depolarizing(2)], TWO)
    a, b = random_pure_strategy(TWO, seed=rng), random_pure_strategy(TWO, seed=rng)
    rep = monotonicity_check_fidelity(u, a, b)
    assert abs(rep.after - 1) < 1e-6


@pytest.mark.parametrize("seed", range(4))
def test_random_monotonicity(seed):
    rng = np.random.default_rng(seed)
    shape = QUBIT if seed % 2 else TWO
    u = random_composition_supermap(shape, seed=rng)
    a, b = random_pure_strategy(shape, seed=rng), random_pure_strategy(shape, seed=rng)
    assert monotonicity_check_fidelity(u, a, b).holds
    h = strategy_choi(a).matrix - strategy_choi(b).matrix
    assert monotonicity_check_norm(u, h).holds


def test_shape_errors(rng):
    u = identity_supermap(QUBIT)
    with pytest.raises(IncompatibleError):
        monotonicity_check_fidelity(u, random_pure_strategy(TWO, seed=0), random_pure_strategy(TWO, seed=1))
    with pytest.raises(IncompatibleError):
        from_channel_composition([Channel.identity(3)], [None], QUBIT)
