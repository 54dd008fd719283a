"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays. Vectorization is row-major, so that
``vec(sum a[j, i] |j><i|) = sum a[j, i] |j>|i>`` with the output index first.
"""

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

TOL_HERM = 1e-10
TOL_PSD = 1e-9


class NotPSDError(ValueError):
    """Raised when an operator has an eigenvalue below ``-TOL_PSD``."""


class DimensionError(ValueError):
    """Raised when tensor-factor dimensions do not match a matrix."""


def kron(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of factors, leftmost most significant."""
    if not factors:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, factors)


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_hermitian(m: np.ndarray, tol: float = TOL_HERM) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, dagger(m), rtol=0, atol=tol)


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


def partial_trace(m: np.ndarray, dims: Sequence[int], traced: Iterable[int]) -> np.ndarray:
    """Trace out the tensor factors with (0-based) indices in ``traced``.

    Args:
        m: square matrix on the space ``dims[0] x dims[1] x ...``.
        dims: factor dimensions, leftmost most significant.
        traced: indices of the factors to remove.

    Returns:
        The reduced operator on the remaining factors, in their original order.
    """
    m = np.asarray(m)
    dims = [int(d) for d in dims]
    n = int(np.prod(dims)) if dims else 1
    if m.ndim != 2 or m.shape != (n, n):
        raise DimensionError(f"matrix of shape {m.shape} does not match factor dims {dims}")
    traced = sorted(set(traced))
    if any(k < 0 or k >= len(dims) for k in traced):
        raise DimensionError(f"traced factors {traced} out of range for {len(dims)} factors")
    nf = len(dims)
    keep = [k for k in range(nf) if k not in traced]
    t = m.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    row = [letters[k] for k in range(nf)]
    col = [letters[nf + k] if k in keep else letters[k] for k in range(nf)]
    out = [row[k] for k in keep] + [col[k] for k in keep]
    res = np.einsum("".join(row) + "".join(col) + "->" + "".join(out), t)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return res.reshape(d, d)


def vectorize(a: np.ndarray) -> np.ndarray:
    """Row-major vectorization: entry ``a[j, i]`` lands at ``j * cols + i``."""
    return np.asarray(a).reshape(-1)


def devectorize(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    v = np.asarray(v).reshape(-1)
    if v.size != rows * cols:
        raise DimensionError(f"vector of length {v.size} cannot be reshaped to {rows}x{cols}")
    return v.reshape(rows, cols)


def _check_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def psd_eig(p: np.ndarray, tol: float = TOL_PSD):
    """Eigen-decomposition of a PSD operator with small negative eigenvalues clamped."""
    p = hermitian_part(_check_square(p))
    w, v = np.linalg.eigh(p)
    if w.size and w[0] < -tol:
        raise NotPSDError(f"minimum eigenvalue {w[0]:.3e} below -{tol:g}")
    return np.clip(w, 0.0, None), v


def sqrt_psd(p: np.ndarray, tol: float = TOL_PSD) -> np.ndarray:
    w, v = psd_eig(p, tol)
    return (v * np.sqrt(w)) @ dagger(v)


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    m = _check_square(m)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def operator_norm(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def state_fidelity(p: np.ndarray, q: np.ndarray) -> float:
    """Fidelity ``||sqrt(p) sqrt(q)||_1`` of two PSD operators (not squared)."""
    return trace_norm(sqrt_psd(p) @ sqrt_psd(q))


def min_eigenvalue(h: np.ndarray) -> float:
    h = hermitian_part(_check_square(h))
    return float(np.linalg.eigvalsh(h)[0]) if h.size else 0.0


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi).reshape(-1)
    return np.outer(psi, psi.conj())
