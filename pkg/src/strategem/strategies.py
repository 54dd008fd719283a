"""Pure strategies, co-strategies, their interaction and Choi representations.

Layout conventions:

* ``A_i`` maps ``X_i (x) Z_{i-1}`` to ``Y_i (x) Z_i`` and is stored as a
  ``(y_i z_i, x_i z_{i-1})`` matrix, output memory as the less significant index.
* ``B_i`` maps ``Y_i (x) W_{i-1}`` to ``X_{i+1} (x) W_i`` with ``X_{r+1}`` trivial.
* Choi operators live on ``Y1..Yr X1..Xr`` in that order.
* A :class:`Purification` stores ``vec`` of the composed isometry
  ``X1..Xr -> Y1..Yr (x) Z_r`` as an array indexed ``[y, z, x]``.

The strategy-side constraint chain checked by :func:`validate_strategy` is the
mirror image of the co-strategy chain and follows the standard linear
characterization of strategies; it is not derived here.
"""

from dataclasses import dataclass, field
from math import ceil
from typing import List, Optional, Sequence

import numpy as np

from .linalg import DimensionError, dagger, hermitian_part, min_eigenvalue, operator_norm, partial_trace
from .registers import RoundShape, embed_identity

TOL_ISOMETRY = 1e-9
TOL_FEAS = 1e-7
MEMORY_CAP = 8


class IncompatibleError(ValueError):
    """Raised when a strategy and co-strategy do not interlock."""


def _check_isometry(m: np.ndarray, name: str, tol: float = TOL_ISOMETRY) -> None:
    err = operator_norm(dagger(m) @ m - np.eye(m.shape[1]))
    if err > tol:
        raise ValueError(f"{name} is not an isometry (||A*A - I|| = {err:.2e})")


@dataclass(frozen=True)
class PureStrategy:
    shape: RoundShape
    memory_dims: tuple
    isometries: tuple

    def __post_init__(self):
        object.__setattr__(self, "memory_dims", tuple(int(z) for z in self.memory_dims))
        object.__setattr__(self, "isometries", tuple(np.asarray(a, dtype=complex) for a in self.isometries))
        r = self.shape.rounds
        if len(self.memory_dims) != r or len(self.isometries) != r:
            raise DimensionError("need one memory dimension and one isometry per round")
        z_prev = 1
        for i, a in enumerate(self.isometries):
            want = (self.shape.y_dims[i] * self.memory_dims[i], self.shape.x_dims[i] * z_prev)
            if a.shape != want:
                raise DimensionError(f"A_{i + 1} has shape {a.shape}, expected {want}")
            _check_isometry(a, f"A_{i + 1}")
            z_prev = self.memory_dims[i]

    @property
    def final_memory(self) -> int:
        return self.memory_dims[-1]


@dataclass(frozen=True)
class PureCoStrategy:
    shape: RoundShape
    memory_dims: tuple  # W_0 .. W_r
    initial_state: np.ndarray
    isometries: tuple

    def __post_init__(self):
        object.__setattr__(self, "memory_dims", tuple(int(w) for w in self.memory_dims))
        object.__setattr__(self, "initial_state", np.asarray(self.initial_state, dtype=complex).reshape(-1))
        object.__setattr__(self, "isometries", tuple(np.asarray(b, dtype=complex) for b in self.isometries))
        r = self.shape.rounds
        w = self.memory_dims
        if len(w) != r + 1 or len(self.isometries) != r:
            raise DimensionError("need r + 1 memory dimensions and r isometries")
        if self.initial_state.size != self.shape.x_dims[0] * w[0]:
            raise DimensionError("initial state must live on X1 (x) W0")
        norm = np.linalg.norm(self.initial_state)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"initial state has norm {norm}")
        xs = self.shape.x_dims + (1,)
        for i, b in enumerate(self.isometries):
            want = (xs[i + 1] * w[i + 1], self.shape.y_dims[i] * w[i])
            if b.shape != want:
                raise DimensionError(f"B_{i + 1} has shape {b.shape}, expected {want}")
            _check_isometry(b, f"B_{i + 1}")

    @property
    def final_memory(self) -> int:
        return self.memory_dims[-1]


@dataclass(frozen=True)
class Purification:
    """``vec`` of a purifying isometry, indexed ``[y, z, x]`` over grouped spaces."""

    shape: RoundShape
    tensor: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.tensor, dtype=complex)
        if t.ndim != 3 or t.shape[0] != self.shape.total_out or t.shape[2] != self.shape.total_in:
            raise DimensionError(f"purification tensor shape {t.shape} does not fit {self.shape}")
        object.__setattr__(self, "tensor", t)

    @property
    def memory(self) -> int:
        return self.tensor.shape[1]

    def vector(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def isometry(self) -> np.ndarray:
        """The purifying isometry as a ``(Y Z, X)`` matrix."""
        return self.tensor.reshape(-1, self.shape.total_in)

    def choi(self) -> np.ndarray:
        t = self.tensor
        d = self.shape.choi_dim
        return np.einsum("azb,czd->abcd", t, t.conj()).reshape(d, d)

    def padded(self, z: int) -> "Purification":
        """Embed the memory space into dimension ``z`` (extra levels unused)."""
        if z < self.memory:
            raise DimensionError("cannot shrink the memory space")
        t = np.zeros((self.tensor.shape[0], z, self.tensor.shape[2]), dtype=complex)
        t[:, : self.memory, :] = self.tensor
        return Purification(self.shape, t)

    def apply_memory_isometry(self, v: np.ndarray) -> "Purification":
        """Apply an isometry ``v : Z -> Z'`` to the final memory."""
        v = np.asarray(v)
        return Purification(self.shape, np.einsum("wz,yzx->ywx", v, self.tensor))

    def compressed(self, rtol: float = 1e-12) -> "Purification":
        """Same Choi operator on the smallest memory, via an SVD over ``Z``."""
        t = self.tensor.transpose(0, 2, 1).reshape(-1, self.memory)
        u, sv, _ = np.linalg.svd(t, full_matrices=False)
        keep = max(1, int(np.sum(sv > rtol * max(sv[0], 1e-300))))
        m = (u[:, :keep] * sv[:keep]).reshape(self.tensor.shape[0], self.tensor.shape[2], keep)
        return Purification(self.shape, m.transpose(0, 2, 1))


def as_purification(s) -> Purification:
    if isinstance(s, Purification):
        return s
    if isinstance(s, PureStrategy):
        return purification(s)
    raise TypeError(f"cannot interpret {type(s).__name__} as a purification")


def purification_from_choi(s: np.ndarray, shape: RoundShape, rtol: float = 1e-12) -> Purification:
    """Minimal purification of a strategy given by its Choi operator."""
    w, v = np.linalg.eigh(hermitian_part(np.asarray(s, dtype=complex)))
    keep = w > rtol * max(w.max(), 1e-300)
    cols = v[:, keep] * np.sqrt(w[keep])
    t = cols.reshape(shape.total_out, shape.total_in, -1).transpose(0, 2, 1)
    return Purification(shape, t)


def equalize_memory(s: Purification, t: Purification):
    z = max(s.memory, t.memory)
    return s.padded(z), t.padded(z)


@dataclass
class StrategyChoi:
    shape: RoundShape
    matrix: np.ndarray


@dataclass
class CoStrategyChoi:
    shape: RoundShape
    matrix: np.ndarray
    witnesses: Optional[list] = None


@dataclass
class ValidationReport:
    kind: str
    valid: bool
    residuals: dict
    tol: float
    witnesses: list = field(default_factory=list)

    def worst(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    def lines(self) -> List[str]:
        out = [f"{self.kind}: {'valid' if self.valid else 'INVALID'} (tol {self.tol:g})"]
        for name, val in self.residuals.items():
            flag = "ok" if val <= self.tol else "FAIL"
            out.append(f"  {name:<28s} {val:.3e}  {flag}")
        return out


def compose_strategy_isometry(a: PureStrategy) -> np.ndarray:
    """Single isometry ``X1..Xr -> Y1..Yr (x) Z_r`` equivalent to the tuple ``a``."""
    return purification(a).isometry()


def purification(a: PureStrategy) -> Purification:
    t = np.ones((1, 1, 1), dtype=complex)  # [Y-group, z, X-group]
    z_prev = 1
    for i, A in enumerate(a.isometries):
        x, y, z = a.shape.x_dims[i], a.shape.y_dims[i], a.memory_dims[i]
        A4 = A.reshape(y, z, x, z_prev)
        t = np.einsum("abcd,edf->eabfc", A4, t)
        t = t.reshape(t.shape[0] * y, z, t.shape[3] * x)
        z_prev = z
    return Purification(a.shape, t)


def costrategy_tensor(b: PureCoStrategy) -> np.ndarray:
    """The composed co-strategy isometry ``Y1..Yr -> X1..Xr (x) W_r`` indexed ``[x, w, y]``."""
    x1 = b.shape.x_dims[0]
    u = b.initial_state.reshape(x1, b.memory_dims[0], 1)
    xs = b.shape.x_dims + (1,)
    for i, B in enumerate(b.isometries):
        y, w_prev, w, xn = b.shape.y_dims[i], b.memory_dims[i], b.memory_dims[i + 1], xs[i + 1]
        B4 = B.reshape(xn, w, y, w_prev)
        u = np.einsum("abcd,edf->eabfc", B4, u)
        u = u.reshape(u.shape[0] * xn, w, u.shape[3] * y)
    return u


def interact(a: PureStrategy, b: PureCoStrategy) -> np.ndarray:
    """Final state in ``Z_r (x) W_r`` obtained by alternating the isometries round by round."""
    if a.shape != b.shape:
        raise IncompatibleError(f"strategy shape {a.shape} does not match co-strategy shape {b.shape}")
    xs = a.shape.x_dims + (1,)
    state = b.initial_state.reshape(1, a.shape.x_dims[0], b.memory_dims[0])  # [z, message, w]
    for i in range(a.shape.rounds):
        x, y = a.shape.x_dims[i], a.shape.y_dims[i]
        z_prev = 1 if i == 0 else a.memory_dims[i - 1]
        z, w_prev, w = a.memory_dims[i], b.memory_dims[i], b.memory_dims[i + 1]
        A = a.isometries[i].reshape(y, z, x, z_prev)
        state = np.einsum("yzxp,pxw->zyw", A, state)
        B = b.isometries[i].reshape(xs[i + 1], w, y, w_prev)
        state = np.einsum("xvyw,zyw->zxv", B, state)
    return state.reshape(-1)


def final_state(s, b: PureCoStrategy) -> np.ndarray:
    """Final state from the composed isometries, valid for any purification ``s``."""
    p = as_purification(s)
    if p.shape != b.shape:
        raise IncompatibleError(f"strategy shape {p.shape} does not match co-strategy shape {b.shape}")
    u = costrategy_tensor(b)
    return np.einsum("yzx,xwy->zw", p.tensor, u).reshape(-1)


def reduced_final_state(a, b: PureCoStrategy) -> np.ndarray:
    """Reduced state on ``W_r`` after the interaction (Alice's memory traced out)."""
    if isinstance(a, PureStrategy):
        psi = interact(a, b)
        z = a.final_memory
    else:
        p = as_purification(a)
        psi = final_state(p, b)
        z = p.memory
    psi = psi.reshape(z, b.final_memory)
    return psi.T @ psi.conj()


def strategy_choi(a) -> StrategyChoi:
    p = as_purification(a)
    return StrategyChoi(p.shape, hermitian_part(p.choi()))


def costrategy_choi(b: PureCoStrategy) -> CoStrategyChoi:
    u = costrategy_tensor(b)
    d = b.shape.choi_dim
    m = np.einsum("xwy,awb->yxba", u.conj(), u).reshape(d, d)
    m = hermitian_part(m)
    return CoStrategyChoi(b.shape, m, validate_costrategy(m, b.shape).witnesses)


def _resid(m: np.ndarray) -> float:
    return operator_norm(m)


def validate_strategy(s: np.ndarray, shape: RoundShape, tol: float = TOL_FEAS) -> ValidationReport:
    """Check ``s`` against the strategy chain ``Tr_{Y_k} P_k = P_{k-1} (x) I_{X_k}``, ``Tr_{Y_1} P_1 = I``."""
    s = np.asarray(s, dtype=complex)
    r = shape.rounds
    if s.shape != (shape.choi_dim, shape.choi_dim):
        raise DimensionError(f"operator of shape {s.shape} does not match {shape}")
    res = {"hermitian": _resid(s - dagger(s)), "psd": max(0.0, -min_eigenvalue(s))}
    p = hermitian_part(s)
    witnesses = [p]
    for k in range(r, 0, -1):
        labels = shape.canonical_labels(k, k)
        dims = shape.dims_of(labels)
        t = partial_trace(p, dims, [k - 1])  # Y_k
        tdims = dims[: k - 1] + dims[k:]
        if k > 1:
            xk = shape.x_dims[k - 1]
            p = partial_trace(t, tdims, [len(tdims) - 1]) / xk
            lhs = embed_identity(p, tdims[:-1], len(tdims) - 1, xk)
            res[f"round {k}: Tr_Y{k} P{k}"] = _resid(t - lhs)
            witnesses.append(p)
        else:
            res["round 1: Tr_Y1 P1 = I"] = _resid(t - np.eye(t.shape[0]))
    valid = all(v <= tol for v in res.values())
    return ValidationReport("strategy", valid, res, tol, witnesses[::-1])


def validate_costrategy(b: np.ndarray, shape: RoundShape, tol: float = TOL_FEAS) -> ValidationReport:
    """Check ``b = Q_r (x) I_{Y_r}``, ``Tr_{X_i} Q_i = Q_{i-1} (x) I_{Y_{i-1}}``, ``tr Q_1 = 1``."""
    b = np.asarray(b, dtype=complex)
    r = shape.rounds
    if b.shape != (shape.choi_dim, shape.choi_dim):
        raise DimensionError(f"operator of shape {b.shape} does not match {shape}")
    res = {"hermitian": _resid(b - dagger(b)), "psd": max(0.0, -min_eigenvalue(b))}
    bh = hermitian_part(b)
    dims = shape.dims_of(shape.canonical_labels())
    yr = shape.y_dims[-1]
    q = partial_trace(bh, dims, [r - 1]) / yr
    qdims = dims[: r - 1] + dims[r:]  # Y1..Y_{r-1} X1..X_r
    res[f"round {r}: B = Q{r} (x) I_Y{r}"] = _resid(bh - embed_identity(q, qdims, r - 1, yr))
    qs = [q]
    for i in range(r, 1, -1):
        # q lives on Y1..Y_{i-1} X1..X_i
        t = partial_trace(q, qdims, [len(qdims) - 1])
        tdims = qdims[:-1]
        y_prev = shape.y_dims[i - 2]
        q = partial_trace(t, tdims, [i - 2]) / y_prev
        qdims = tdims[: i - 2] + tdims[i - 1:]
        res[f"round {i}: Tr_X{i} Q{i}"] = _resid(t - embed_identity(q, qdims, i - 2, y_prev))
        qs.append(q)
    res["round 1: tr Q1 = 1"] = abs(np.trace(q) - 1.0)
    valid = all(v <= tol for v in res.values())
    return ValidationReport("co-strategy", valid, res, tol, qs[::-1])


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry ``C^cols -> C^rows`` via QR of a complex Gaussian matrix."""
    if rows < cols:
        raise ValueError(f"no isometry from dimension {cols} into {rows}")
    g = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    return haar_isometry(dim, 1, rng).reshape(-1)


def default_strategy_memory(shape: RoundShape, cap: int = MEMORY_CAP) -> tuple:
    zs, z_prev, p = [], 1, 1
    for x, y in zip(shape.x_dims, shape.y_dims):
        p *= x * y
        z = max(min(p, cap), ceil(x * z_prev / y))
        zs.append(z)
        z_prev = z
    return tuple(zs)


def default_costrategy_memory(shape: RoundShape, cap: int = MEMORY_CAP) -> tuple:
    xs = shape.x_dims + (1,)
    ws = [min(xs[0], cap)]
    p = xs[0]
    for i, y in enumerate(shape.y_dims):
        p *= y * xs[i + 1]
        ws.append(max(min(p, cap), ceil(y * ws[-1] / xs[i + 1])))
    return tuple(ws)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_pure_strategy(shape: RoundShape, memory_dims: Sequence[int] = None, seed=None) -> PureStrategy:
    rng = _rng(seed)
    zs = tuple(memory_dims) if memory_dims is not None else default_strategy_memory(shape)
    isos, z_prev = [], 1
    for x, y, z in zip(shape.x_dims, shape.y_dims, zs):
        isos.append(haar_isometry(y * z, x * z_prev, rng))
        z_prev = z
    return PureStrategy(shape, zs, tuple(isos))


def random_pure_costrategy(shape: RoundShape, memory_dims: Sequence[int] = None, seed=None) -> PureCoStrategy:
    rng = _rng(seed)
    ws = tuple(memory_dims) if memory_dims is not None else default_costrategy_memory(shape)
    xs = shape.x_dims + (1,)
    beta = haar_state(xs[0] * ws[0], rng)
    isos = [haar_isometry(xs[i + 1] * ws[i + 1], y * ws[i], rng) for i, y in enumerate(shape.y_dims)]
    return PureCoStrategy(shape, ws, beta, tuple(isos))


def unitary_channel_strategy(u: np.ndarray) -> PureStrategy:
    """One-round strategy applying the unitary (or isometry) ``u`` with trivial memory."""
    u = np.asarray(u, dtype=complex)
    return PureStrategy(RoundShape((u.shape[1],), (u.shape[0],)), (1,), (u,))


def state_strategy(psi: np.ndarray, memory: int = 1) -> PureStrategy:
    """One-round strategy with no input that outputs the (purified) state ``psi``.

    ``psi`` is a vector on ``Y1 (x) Z1`` with ``Z1`` of dimension ``memory``.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    y = psi.size // memory
    return PureStrategy(RoundShape((1,), (y,)), (memory,), (psi.reshape(-1, 1),))


def density_strategy(rho: np.ndarray) -> PureStrategy:
    """One-round no-input strategy preparing the density operator ``rho``."""
    w, v = np.linalg.eigh(hermitian_part(np.asarray(rho, dtype=complex)))
    w = np.clip(w, 0, None)
    w = w / w.sum()
    psi = (v * np.sqrt(w)).reshape(-1)  # index [y, k]
    return state_strategy(psi / np.linalg.norm(psi), memory=w.size)


def pure_costrategy_from_kraus_input(shape: RoundShape, beta: np.ndarray, ref_dim: int) -> PureCoStrategy:
    """One-round co-strategy sending half of ``beta`` (on ``X1 (x) W0``) and keeping the reply."""
    if shape.rounds != 1:
        raise ValueError("only one-round co-strategies are built this way")
    y = shape.y_dims[0]
    beta = np.asarray(beta, dtype=complex).reshape(-1)
    return PureCoStrategy(shape, (ref_dim, y * ref_dim), beta / np.linalg.norm(beta),
                          (np.eye(y * ref_dim),))
