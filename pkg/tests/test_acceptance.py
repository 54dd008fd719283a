"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed at the end of the pytest run (see conftest.py) and when
this file is executed directly.
"""

import time

import numpy as np
import pytest

from strategem.crypto import cheat_demo, tradeoff_constant
from strategem.fidelity import (bilinear_overlap, simulated_overlap, strategy_fidelity,
                                strategy_fidelity_oracle)
from strategem.linalg import state_fidelity, trace_norm
from strategem.norm import strategy_distance, strategy_norm
from strategem.registers import RoundShape
from strategem.strategies import (costrategy_choi, density_strategy, haar_isometry, purification,
                                  random_pure_costrategy, random_pure_strategy, reduced_final_state,
                                  state_strategy, strategy_choi, unitary_channel_strategy,
                                  validate_costrategy)
from strategem.supermaps import (monotonicity_check_fidelity, monotonicity_check_norm,
                                 random_composition_supermap, random_costrategy_choi)

RESULTS = []
GAP_TOL, FEAS_TOL = 1e-8, 1e-7


def record(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def certified(res) -> bool:
    return res.gap <= GAP_TOL and res.primal_residual <= FEAS_TOL and res.dual_residual <= FEAS_TOL


def random_density(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_small_shape(rng) -> RoundShape:
    r = int(rng.integers(1, 3))
    return RoundShape(tuple(int(v) for v in rng.integers(1, 3, r)),
                      tuple(int(v) for v in rng.integers(1, 3, r)))


@pytest.fixture(scope="module")
def fvdg_pairs():
    """Criterion 3 data, reused by criterion 6."""
    rng = np.random.default_rng(3)
    t0 = time.time()
    rows = []
    for _ in range(100):
        shape = random_small_shape(rng)
        a, b = random_pure_strategy(shape, seed=rng), random_pure_strategy(shape, seed=rng)
        f = strategy_fidelity(a, b)
        n = strategy_distance(a, b)
        rows.append((shape, f, n))
    return rows, time.time() - t0


def test_criterion_1_state_fidelity_reduction():
    rng = np.random.default_rng(1)
    t0 = time.time()
    worst = 0.0
    for _ in range(50):
        p, q = random_density(rng, 2), random_density(rng, 2)
        f = strategy_fidelity(density_strategy(p), density_strategy(q)).value
        worst = max(worst, abs(f - state_fidelity(p, q)))
    elapsed = time.time() - t0
    ok = worst <= 1e-5 and elapsed < 60
    assert record(1, ok, f"50 density pairs, max |F - state fidelity| = {worst:.2e}, {elapsed:.1f} s")


def test_criterion_2_extremal_values():
    worst_same = 0.0
    for seed, shape in enumerate([RoundShape((2,), (2,)), RoundShape((2, 2), (2, 2)),
                                  RoundShape((1, 2), (2, 2)), RoundShape((2, 1), (1, 2))]):
        a = random_pure_strategy(shape, seed=seed)
        worst_same = max(worst_same, abs(strategy_fidelity(a, a).value - 1))
    ident = unitary_channel_strategy(np.eye(2))
    flip = unitary_channel_strategy(np.array([[0, 1], [1, 0]]))
    f = strategy_fidelity(ident, flip).value
    n = strategy_distance(ident, flip).value
    # Bell-input discrimination: half of a maximally entangled pair through each channel
    bell = np.eye(2).reshape(-1) / np.sqrt(2)
    out_i = np.kron(np.eye(2), np.eye(2)) @ bell
    out_x = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2)) @ bell
    bell_dist = trace_norm(np.outer(out_i, out_i.conj()) - np.outer(out_x, out_x.conj()))
    ok = worst_same <= 1e-6 and abs(f) <= 1e-5 and abs(n - 2) <= 1e-5 and abs(bell_dist - 2) <= 1e-10
    assert record(2, ok, f"|F(S,S) - 1| <= {worst_same:.1e}, F(id, X) = {f:.1e}, "
                         f"||id - X|| = {n:.6f}, Bell-input distance = {bell_dist:.6f}")


def test_criterion_3_fuchs_van_de_graaf(fvdg_pairs):
    rows, elapsed = fvdg_pairs
    worst = 0.0
    for _, f, n in rows:
        lo, hi = 1 - n.value / 2, np.sqrt(max(0.0, 1 - n.value ** 2 / 4))
        worst = max(worst, lo - f.value, f.value - hi)
    ok = worst <= 1e-6 and elapsed < 600
    assert record(3, ok, f"100 pairs r in {{1,2}}, worst bound violation {worst:.2e}, {elapsed:.1f} s")


def test_criterion_4_bilinear_identity():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(200):
        shape = random_small_shape(rng)
        s, t = random_pure_strategy(shape, seed=rng), random_pure_strategy(shape, seed=rng)
        b = random_pure_costrategy(shape, seed=rng)
        z = max(purification(s).memory, purification(t).memory)
        k = rng.standard_normal((z, z)) + 1j * rng.standard_normal((z, z))
        k /= max(1.0, np.linalg.norm(k, 2))
        worst = max(worst, abs(simulated_overlap(s, t, k, b) - bilinear_overlap(s, t, k, costrategy_choi(b))))
    assert record(4, worst <= 1e-10, f"200 tuples, max |simulated - bilinear| = {worst:.2e}")


def test_criterion_5_monotonicity():
    rng = np.random.default_rng(5)
    worst_f, worst_n, worst_adj = -np.inf, -np.inf, 0.0
    for _ in range(50):
        shape = random_small_shape(rng)
        u = random_composition_supermap(shape, seed=rng)
        a, b = random_pure_strategy(shape, seed=rng), random_pure_strategy(shape, seed=rng)
        rf = monotonicity_check_fidelity(u, a, b, slack=np.inf)
        h = strategy_choi(a).matrix - strategy_choi(b).matrix
        rn = monotonicity_check_norm(u, h, slack=np.inf)
        worst_f = max(worst_f, rf.before - rf.after)
        worst_n = max(worst_n, rn.after - rn.before)
        for _ in range(2):
            bb = random_costrategy_choi(u.out_shape, rng)
            worst_adj = max(worst_adj, validate_costrategy(u.apply_adjoint(bb), shape).worst())
    ok = worst_f <= 1e-5 and worst_n <= 1e-5 and worst_adj <= 1e-7
    assert record(5, ok, f"50 supermaps, max fidelity drop {worst_f:.2e}, max norm growth {worst_n:.2e}, "
                         f"adjoint residual {worst_adj:.2e}")


def test_criterion_6_crypto_tradeoff(fvdg_pairs):
    rows, _ = fvdg_pairs
    worst = np.inf
    for _, f, n in rows:
        a = f.value ** 2
        b = 0.5 + 0.25 * n.value
        worst = min(worst, np.sqrt(max(a, 0.0)) + 2 * b)
    p = tradeoff_constant()
    root_err = abs(np.sqrt(p) + 2 * p - 2)
    ok = worst >= 2 - 1e-6 and abs(p - (9 - np.sqrt(17)) / 8) < 1e-15 and root_err <= 1e-12 \
        and abs(p - 0.61) < 0.01
    assert record(6, ok, f"min sqrt(A) + 2B = {worst:.8f} over 100 pairs, constant {p:.6f} "
                         f"(root error {root_err:.1e})")


def test_criterion_7_cheat_demo():
    zero, plus = state_strategy(np.array([1, 0])), state_strategy(np.array([1, 1]) / np.sqrt(2))
    rng = np.random.default_rng(7)
    overlaps = [cheat_demo(zero, plus, random_pure_costrategy(zero.shape, seed=rng), slack=np.inf)
                for _ in range(20)]
    worst = min(overlaps)
    assert record(7, worst >= 0.5 - 1e-5, f"20 co-strategies, min overlap {worst:.8f} (F^2 = 0.5)")


def test_criterion_8_certification():
    rng = np.random.default_rng(8)
    all_ok, worst_diff, n_solves = True, 0.0, 0
    worst_gap, worst_res = 0.0, 0.0
    for _ in range(10):
        shape = random_small_shape(rng)
        a, b = random_pure_strategy(shape, seed=rng), random_pure_strategy(shape, seed=rng)
        pa, pb = purification(a), purification(b)
        pa2 = pa.apply_memory_isometry(haar_isometry(pa.memory + 2, pa.memory, rng))
        pb2 = pb.apply_memory_isometry(haar_isometry(pb.memory + 1, pb.memory, rng))
        r1, r2 = strategy_fidelity(pa, pb), strategy_fidelity(pa2, pb2)
        rn = strategy_norm(strategy_choi(a).matrix - strategy_choi(b).matrix, shape)
        for res in (r1.solver, r2.solver, rn.solver):
            n_solves += 1
            all_ok &= certified(res) and res.optimal
            worst_gap = max(worst_gap, res.gap)
            worst_res = max(worst_res, res.primal_residual, res.dual_residual)
        worst_diff = max(worst_diff, abs(r1.value - r2.value))
    ok = all_ok and worst_diff <= 1e-6
    assert record(8, ok, f"{n_solves} solves, max gap {worst_gap:.1e}, max residual {worst_res:.1e}, "
                         f"purification spread {worst_diff:.1e}")


def test_criterion_9_oracle_bracketing():
    rng = np.random.default_rng(9)
    shape = RoundShape((2,), (2,))
    worst_width, contained, worst_sample = 0.0, True, np.inf
    for _ in range(20):
        a, b = random_pure_strategy(shape, seed=rng), random_pure_strategy(shape, seed=rng)
        f = strategy_fidelity(a, b).value
        br = strategy_fidelity_oracle(a, b, samples=32, seed=rng)
        contained &= br.contains(f, 1e-6)
        worst_width = max(worst_width, br.width)
        for _ in range(10):
            bb = random_pure_costrategy(shape, seed=rng)
            worst_sample = min(worst_sample,
                               state_fidelity(reduced_final_state(a, bb), reduced_final_state(b, bb)) - f)
    ok = contained and worst_width <= 1e-2 and worst_sample >= -1e-6
    assert record(9, ok, f"20 instances, all contained: {contained}, max width {worst_width:.1e}, "
                         f"min sampled fidelity - F = {worst_sample:.2e}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
