"""Strategy norm (the distinguishability norm on differences of strategies)."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constraints import costrategy_chain
from .linalg import hermitian_part, trace_norm
from .registers import RoundShape
from .sdp import ProblemBuilder, SolverResult
from .strategies import (IncompatibleError, StrategyChoi, as_purification, random_pure_costrategy,
                         reduced_final_state, strategy_choi)


@dataclass
class NormResult:
    value: float
    B0: np.ndarray
    B1: np.ndarray
    solver: SolverResult

    @property
    def bias(self) -> float:
        return 0.5 + 0.25 * self.value


def _choi(s, shape: Optional[RoundShape] = None) -> np.ndarray:
    if isinstance(s, StrategyChoi):
        return s.matrix
    if isinstance(s, np.ndarray):
        return s
    return strategy_choi(as_purification(s)).matrix


def strategy_norm(h, shape: RoundShape, **solve_kw) -> NormResult:
    """``max Re <B0 - B1, H>`` over ``B0, B1 >= 0`` with ``B0 + B1`` a co-strategy.

    ``h`` is a Hermitian operator on the canonical space of ``shape``.
    """
    h = np.asarray(h, dtype=complex)
    d = shape.choi_dim
    if h.shape != (d, d):
        raise IncompatibleError(f"operator of shape {h.shape} does not match {shape} (dim {d})")
    h = hermitian_part(h)
    pb = ProblemBuilder()
    b, _ = costrategy_chain(pb, shape, psd=False)
    b0 = pb.hermitian(d)
    pb.add_psd(b0)
    b1 = b - b0
    pb.add_psd(b1)
    pb.maximize(((b0 - b1) @ h).trace().hermitian_part())
    _, res = pb.solve(**solve_kw)
    return NormResult(res.primal_value, hermitian_part(b0.value(res.x)),
                      hermitian_part(b1.value(res.x)), res)


def strategy_distance(s, t, **solve_kw) -> NormResult:
    """``||S - T||`` for two compatible strategies."""
    ss, tt = as_purification(s), as_purification(t)
    if ss.shape != tt.shape:
        raise IncompatibleError(f"strategies have different shapes: {ss.shape} vs {tt.shape}")
    return strategy_norm(_choi(ss) - _choi(tt), ss.shape, **solve_kw)


def distinguish_bias(s0, s1, **solve_kw) -> float:
    """Optimal probability of telling ``s0`` from ``s1`` with equal priors."""
    return 0.5 + 0.25 * strategy_distance(s0, s1, **solve_kw).value


def norm_vs_trace_distance_check(s, t, samples: int = 50, seed: int = 0, **solve_kw):
    """Sample co-strategies and compare ``||rho_S(B) - rho_T(B)||_1`` with ``||S - T||``.

    Returns ``(value, best_sample, samples_list)``; raises ``AssertionError`` if
    any sample exceeds the SDP value by more than ``1e-6``.
    """
    ss, tt = as_purification(s), as_purification(t)
    value = strategy_distance(ss, tt, **solve_kw).value
    rng = np.random.default_rng(seed)
    dists = []
    for _ in range(samples):
        b = random_pure_costrategy(ss.shape, seed=rng)
        rs = reduced_final_state(ss, b)
        rt = reduced_final_state(tt, b)
        dists.append(trace_norm(rs - rt))
    worst = max(dists)
    if worst > value + 1e-6:
        raise AssertionError(f"sampled trace distance {worst:.8f} exceeds strategy norm {value:.8f}")
    return value, worst, dists
