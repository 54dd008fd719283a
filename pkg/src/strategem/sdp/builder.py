"""Assembly of complex matrix-valued programs into a real :class:`ConicProblem`.

An :class:`Affine` is a matrix-valued affine function ``x -> const + coef @ x``
of the real decision vector. Hermitian PSD constraints are embedded with
:func:`herm_to_real`; since ``<herm_to_real(G), X> = 2 Re tr(G H)`` the dual
block of such a constraint corresponds to the Hermitian multiplier
``2 * real_to_herm(Y)``.
"""

from math import prod
from typing import List, Sequence

import numpy as np
import scipy.sparse as sp

from .problem import ConicProblem, SQRT2, herm_to_real, real_to_herm, smat, svec
from .solver import SolverError, solve

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVW"


class Affine:
    """Complex ``rows x cols`` matrix depending affinely on real variables."""

    __array_ufunc__ = None  # let ndarray @ Affine dispatch to __rmatmul__

    def __init__(self, coef: np.ndarray, const: np.ndarray):
        self.coef = np.asarray(coef, dtype=complex)
        self.const = np.asarray(const, dtype=complex)

    @classmethod
    def constant(cls, m, nvars: int = 0) -> "Affine":
        m = np.atleast_2d(np.asarray(m, dtype=complex))
        return cls(np.zeros(m.shape + (nvars,), dtype=complex), m)

    @property
    def shape(self):
        return self.const.shape

    @property
    def nvars(self) -> int:
        return self.coef.shape[2]

    def padded(self, n: int) -> "Affine":
        if n == self.nvars:
            return self
        extra = np.zeros(self.shape + (n - self.nvars,), dtype=complex)
        return Affine(np.concatenate([self.coef, extra], axis=2), self.const)

    def _align(self, other):
        if not isinstance(other, Affine):
            other = Affine.constant(other)
        n = max(self.nvars, other.nvars)
        return self.padded(n), other.padded(n)

    def __add__(self, other):
        a, b = self._align(other)
        return Affine(a.coef + b.coef, a.const + b.const)

    __radd__ = __add__

    def __neg__(self):
        return Affine(-self.coef, -self.const)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Affine) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        return Affine(self.coef * scalar, self.const * scalar)

    __rmul__ = __mul__

    def __matmul__(self, m):
        if isinstance(m, Affine):
            if self.nvars and np.any(self.coef):
                raise ValueError("product of two non-constant expressions")
            return m.__rmatmul__(self.const)
        m = np.asarray(m)
        return Affine(np.einsum("ijn,jk->ikn", self.coef, m), self.const @ m)

    def __rmatmul__(self, m):
        m = np.asarray(m)
        return Affine(np.einsum("ij,jkn->ikn", m, self.coef), m @ self.const)

    @property
    def H(self) -> "Affine":
        return Affine(np.conj(self.coef.transpose(1, 0, 2)), self.const.conj().T)

    def hermitian_part(self) -> "Affine":
        return 0.5 * (self + self.H)

    def trace(self) -> "Affine":
        return Affine(np.einsum("iin->n", self.coef)[None, None, :], np.trace(self.const)[None, None])

    def __getitem__(self, idx):
        r, c = idx
        return Affine(self.coef[r, c, :], self.const[r, c])

    def _map(self, fn):
        """Apply a linear matrix map to the constant and every coefficient slice."""
        const = fn(self.const)
        coef = np.stack([fn(self.coef[:, :, k]) for k in range(self.nvars)], axis=2) \
            if self.nvars else np.zeros(const.shape + (0,), dtype=complex)
        return Affine(coef, const)

    def partial_trace(self, dims: Sequence[int], traced: Sequence[int]) -> "Affine":
        dims = [int(d) for d in dims]
        nf = len(dims)
        traced = sorted(set(traced))
        keep = [k for k in range(nf) if k not in traced]
        row = [_LETTERS[k] for k in range(nf)]
        col = [_LETTERS[nf + k] if k in keep else _LETTERS[k] for k in range(nf)]
        out = [row[k] for k in keep] + [col[k] for k in keep]
        d = prod(dims[k] for k in keep) if keep else 1
        spec = "".join(row) + "".join(col) + "z->" + "".join(out) + "z"
        coef = np.einsum(spec, self.coef.reshape(dims + dims + [self.nvars])).reshape(d, d, self.nvars)
        const = np.einsum(spec.replace("z", ""), self.const.reshape(dims + dims)).reshape(d, d)
        return Affine(coef, const)

    def embed_identity(self, dims: Sequence[int], at: int, id_dim: int) -> "Affine":
        dims = [int(d) for d in dims]
        left, right = prod(dims[:at]), prod(dims[at:])
        n = left * right
        N = n * id_dim
        eye = np.eye(id_dim)
        coef = np.einsum("abcdz,ef->aebcfdz", self.coef.reshape(left, right, left, right, self.nvars), eye)
        const = np.einsum("abcd,ef->aebcfd", self.const.reshape(left, right, left, right), eye)
        return Affine(coef.reshape(N, N, self.nvars), const.reshape(N, N))

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        return self.const + self.coef @ x[: self.nvars]


class PSDHandle:
    def __init__(self, index: int, order: int, complex_: bool):
        self.index = index
        self.order = order
        self.complex = complex_


class ProblemBuilder:
    """Collects variables and constraints, then emits a :class:`ConicProblem`."""

    def __init__(self):
        self.nvars = 0
        self._eq: List[tuple] = []
        self._nonneg: List[Affine] = []
        self._psd: List[tuple] = []
        self._objective = None
        self._sense = "min"

    def _new(self, k: int) -> np.ndarray:
        idx = np.arange(self.nvars, self.nvars + k)
        self.nvars += k
        return idx

    def scalar(self) -> Affine:
        (i,) = self._new(1)
        coef = np.zeros((1, 1, self.nvars), dtype=complex)
        coef[0, 0, i] = 1.0
        return Affine(coef, np.zeros((1, 1)))

    def hermitian(self, n: int) -> Affine:
        """Free Hermitian ``n x n`` variable, parametrized by ``n**2`` reals."""
        idx = self._new(n * n)
        coef = np.zeros((n, n, self.nvars), dtype=complex)
        k = 0
        for i in range(n):
            coef[i, i, idx[k]] = 1.0
            k += 1
        for i in range(n):
            for j in range(i + 1, n):
                coef[i, j, idx[k]] = 1.0
                coef[j, i, idx[k]] = 1.0
                coef[i, j, idx[k + 1]] = 1.0j
                coef[j, i, idx[k + 1]] = -1.0j
                k += 2
        return Affine(coef, np.zeros((n, n)))

    def complex_matrix(self, rows: int, cols: int) -> Affine:
        idx = self._new(2 * rows * cols)
        coef = np.zeros((rows, cols, self.nvars), dtype=complex)
        k = 0
        for i in range(rows):
            for j in range(cols):
                coef[i, j, idx[k]] = 1.0
                coef[i, j, idx[k + 1]] = 1.0j
                k += 2
        return Affine(coef, np.zeros((rows, cols)))

    def add_eq(self, expr: Affine, hermitian: bool = True) -> None:
        """Constrain ``expr == 0``; Hermitian expressions use ``n**2`` real rows."""
        self._eq.append((expr, hermitian))

    def add_nonneg(self, expr: Affine) -> None:
        self._nonneg.append(expr)

    def add_psd(self, expr: Affine) -> PSDHandle:
        """Constrain the Hermitian ``expr`` to be PSD."""
        is_complex = bool(np.any(np.abs(expr.coef.imag) > 0) or np.any(np.abs(expr.const.imag) > 0))
        handle = PSDHandle(len(self._psd), expr.shape[0], is_complex)
        self._psd.append((expr, handle))
        return handle

    def minimize(self, expr: Affine) -> None:
        self._objective, self._sense = expr, "min"

    def maximize(self, expr: Affine) -> None:
        self._objective, self._sense = expr, "max"

    @staticmethod
    def _herm_rows(e: Affine):
        n = e.shape[0]
        iu = np.triu_indices(n, 1)
        d = np.arange(n)

        def rows(m):
            # m has shape (n, n, ...) ; returns (n*n, ...)
            return np.concatenate([m[d, d].real, SQRT2 * m[iu].real, SQRT2 * m[iu].imag], axis=0)

        return rows(e.coef), rows(e.const)

    @staticmethod
    def _full_rows(e: Affine):
        c = e.coef.reshape(-1, e.nvars)
        k = e.const.reshape(-1)
        return np.concatenate([c.real, c.imag]), np.concatenate([k.real, k.imag])

    def _psd_rows(self, e: Affine, is_complex: bool):
        if is_complex:
            coef = np.stack([svec(herm_to_real(e.coef[:, :, k])) for k in range(e.nvars)], axis=1)
            const = svec(herm_to_real(e.const))
        else:
            coef = np.stack([svec(e.coef[:, :, k].real) for k in range(e.nvars)], axis=1)
            const = svec(e.const.real)
        return coef, const

    def build(self) -> ConicProblem:
        n = self.nvars
        blocks, rhs = [], []
        nzero = 0
        for expr, herm in self._eq:
            e = expr.padded(n)
            coef, const = self._herm_rows(e) if herm else self._full_rows(e)
            keep = np.any(coef != 0, axis=1) | (const != 0)
            blocks.append(-coef[keep])
            rhs.append(const[keep])
            nzero += int(keep.sum())
        nnon = 0
        for expr in self._nonneg:
            e = expr.padded(n)
            blocks.append(-e.coef.reshape(1, n).real)
            rhs.append(e.const.reshape(1).real)
            nnon += 1
        orders = []
        for expr, handle in self._psd:
            e = expr.padded(n)
            coef, const = self._psd_rows(e, handle.complex)
            blocks.append(-coef)
            rhs.append(const)
            orders.append(2 * handle.order if handle.complex else handle.order)
        A = sp.csc_matrix(np.vstack(blocks)) if blocks else sp.csc_matrix((0, n))
        b = np.concatenate(rhs) if rhs else np.zeros(0)
        obj = self._objective.padded(n) if self._objective is not None else Affine.constant(0.0, n)
        c = obj.coef.reshape(n).real
        self._layout = (nzero, nnon, orders)
        return ConicProblem(c=c, A=A, b=b, zero=nzero, nonneg=nnon, psd=orders,
                            sense=self._sense, offset=float(obj.const.real.reshape(-1)[0]))

    def solve(self, require_optimal: bool = True, **kwargs):
        problem = self.build()
        result = solve(problem, **kwargs)
        if require_optimal and not result.optimal:
            raise SolverError(result)
        return problem, result

    def psd_dual(self, problem: ConicProblem, result, handle: PSDHandle) -> np.ndarray:
        """Hermitian multiplier of a PSD constraint, scaled so that the Lagrangian term is
        ``Re tr(dual @ expr)``."""
        sl = problem.psd_slices()[handle.index]
        y = smat(result.y[sl])
        if handle.complex:
            return 2.0 * real_to_herm(y)
        return y.astype(complex)
