"""Co-strategy polytope as SDP constraints, shared by the fidelity and norm programs."""

from math import prod

import numpy as np

from .registers import RoundShape
from .sdp import Affine, ProblemBuilder


def scaled_identity(t: Affine, n: int) -> Affine:
    """``t * I_n`` for a scalar expression ``t``."""
    return Affine(np.einsum("ij,k->ijk", np.eye(n), t.coef[0, 0]), np.eye(n) * t.const[0, 0])


def costrategy_chain(pb: ProblemBuilder, shape: RoundShape, psd: bool = True):
    """Add variables ``Q_1..Q_r`` with ``tr Q_1 = 1`` and ``Tr_{X_i} Q_i = Q_{i-1} (x) I_{Y_{i-1}}``.

    ``Q_i`` acts on ``Y1..Y_{i-1} X1..X_i``. Returns ``(B, qs)`` where
    ``B = Q_r (x) I_{Y_r}`` is an expression on the canonical space. With
    ``psd`` set, ``Q_r >= 0`` is imposed; positivity of the lower ``Q_i``
    follows from the partial-trace chain.
    """
    r = shape.rounds
    qs = []
    for i in range(1, r + 1):
        dims = shape.dims_of(shape.canonical_labels(i - 1, i))
        qs.append((pb.hermitian(prod(dims)), dims))
    q1, _ = qs[0]
    pb.add_eq(q1.trace() - 1.0)
    for i in range(2, r + 1):
        q, dims = qs[i - 1]
        q_prev, dims_prev = qs[i - 2]
        lhs = q.partial_trace(dims, [len(dims) - 1])  # X_i is the last factor
        pb.add_eq(lhs - q_prev.embed_identity(dims_prev, i - 2, shape.y_dims[i - 2]))
    q_r, dims_r = qs[-1]
    if psd:
        pb.add_psd(q_r)
    b = q_r.embed_identity(dims_r, r - 1, shape.y_dims[-1])
    return b, [q for q, _ in qs]


def strategy_dual_chain(pb: ProblemBuilder, shape: RoundShape, top: Affine):
    """Dual chain: ``t I <= Tr_{Y1} R_1``, ``R_j (x) I <= Tr_{Y_{j+1}} R_{j+1}``, ``R_r <= top``.

    ``R_j`` acts on ``Y1..Yj X1..Xj``. Returns ``(t, rs)``; maximizing ``t``
    gives the minimum of ``<top, B>`` over co-strategies ``B``.
    """
    r = shape.rounds
    t = pb.scalar()
    rs = []
    for j in range(1, r + 1):
        dims = shape.dims_of(shape.canonical_labels(j, j))
        rs.append((pb.hermitian(prod(dims)), dims))
    r1, d1 = rs[0]
    pb.add_psd(r1.partial_trace(d1, [0]) - scaled_identity(t, shape.x_dims[0]))
    for j in range(1, r):
        rj, dj = rs[j - 1]
        rn, dn = rs[j]
        pb.add_psd(rn.partial_trace(dn, [j]) - rj.embed_identity(dj, len(dj), shape.x_dims[j]))
    pb.add_psd(top - rs[-1][0])
    return t, [x for x, _ in rs]
