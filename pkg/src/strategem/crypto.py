"""Cheating bounds for bit commitment and oblivious transfer from Alice's honest strategies."""

from dataclasses import asdict, dataclass

import numpy as np

from .fidelity import _pair, strategy_fidelity, uhlmann_channel, uhlmann_overlap
from .norm import strategy_distance
from .strategies import PureCoStrategy

TASKS = ("bc", "ot")


def tradeoff_constant() -> float:
    """``(9 - sqrt(17)) / 8``, the root of ``sqrt(p) + 2 p = 2``."""
    return float((9 - np.sqrt(17)) / 8)


@dataclass
class CheatReport:
    task: str
    fidelity: float
    alice_lower_bound: float
    norm: float
    bob_cheat: float
    tradeoff_lhs: float
    max_cheater: float
    constant_bound: float
    tradeoff_holds: bool
    constant_holds: bool

    def to_dict(self) -> dict:
        return asdict(self)


def cheat_bounds(a0, a1, task: str = "bc", slack: float = 1e-6, **solve_kw) -> CheatReport:
    """Lower bounds on cheating probabilities given Alice's two honest strategies.

    A dishonest Alice succeeds with probability at least ``F(A0, A1)^2``; a
    dishonest Bob guesses her bit (or her other string for OT) with probability
    ``1/2 + ||A0 - A1|| / 4``. The same quantities serve both tasks.
    """
    task = task.lower()
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}; choose from {TASKS}")
    ps, pt = _pair(a0, a1)
    f = strategy_fidelity(ps, pt, **solve_kw).value
    n = strategy_distance(ps, pt, **solve_kw).value
    f = float(np.clip(f, 0.0, 1.0))
    a = f * f
    b = 0.5 + 0.25 * n
    lhs = np.sqrt(a) + 2 * b
    c = tradeoff_constant()
    return CheatReport(task=task, fidelity=f, alice_lower_bound=a, norm=n, bob_cheat=b,
                       tradeoff_lhs=float(lhs), max_cheater=max(a, b), constant_bound=c,
                       tradeoff_holds=bool(lhs >= 2 - slack),
                       constant_holds=bool(max(a, b) >= c - slack))


def cheat_demo(a_honest, a_target, b: PureCoStrategy, slack: float = 1e-5, **solve_kw) -> float:
    """Alice plays ``a_honest`` against ``b``, then applies the fidelity-achieving channel
    to her memory. Returns the overlap of the result with the final state of ``a_target``.

    Raises ``AssertionError`` if the overlap falls below ``F^2 - slack``.
    """
    ps, pt = _pair(a_target, a_honest)
    res = strategy_fidelity(ps, pt, **solve_kw)
    overlap = uhlmann_overlap(uhlmann_channel(res), ps, pt, b)
    if overlap < res.value ** 2 - slack:
        raise AssertionError(f"cheat overlap {overlap:.8f} below F^2 = {res.value ** 2:.8f}")
    return overlap
