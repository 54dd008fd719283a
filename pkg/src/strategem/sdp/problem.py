"""Standard-form conic programs and their certification.

A :class:`ConicProblem` is

    minimize (or maximize)  c @ x + offset
    subject to              A @ x + s = b,   s in K

where ``K`` is the product, in row order, of a zero cone (equality rows), a
nonnegative orthant and real PSD cones. Every PSD block of order ``n``
occupies ``n (n + 1) / 2`` rows in scaled ``svec`` form: the upper triangle in
column-major order with off-diagonal entries multiplied by ``sqrt(2)``, so that
``svec(X) @ svec(Y) == trace(X @ Y)``. All variables ``x`` are free.

The dual is ``maximize -b @ y`` subject to ``A.T @ y + c = 0``, ``y in K*``
(for a minimization; signs flip for ``sense="max"``).
"""

from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np
import scipy.sparse as sp

SQRT2 = np.sqrt(2.0)
GAP_TOL = 1e-8
FEAS_TOL = 1e-7


def svec_len(n: int) -> int:
    return n * (n + 1) // 2


def _triu_colmajor(n: int):
    # rows i <= j, enumerated column by column
    cols, rows = np.triu_indices(n)[::-1]
    order = np.lexsort((rows, cols))
    return rows[order], cols[order]


def svec(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    n = m.shape[0]
    i, j = _triu_colmajor(n)
    scale = np.where(i == j, 1.0, SQRT2)
    return m[i, j] * scale


def smat(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    n = int(round((np.sqrt(8 * v.size + 1) - 1) / 2))
    if svec_len(n) != v.size:
        raise ValueError(f"length {v.size} is not a triangular number")
    i, j = _triu_colmajor(n)
    vals = np.where(i == j, v, v / SQRT2)
    out = np.zeros((n, n), dtype=v.dtype)
    out[i, j] = vals
    out[j, i] = vals
    return out


def herm_to_real(h: np.ndarray) -> np.ndarray:
    """Embed a complex Hermitian ``n x n`` matrix as the real symmetric ``[[Re, -Im], [Im, Re]]``."""
    h = np.asarray(h)
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def real_to_herm(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`herm_to_real`, averaging the redundant blocks.

    For a general real symmetric ``x`` this is the Hermitian ``H`` with
    ``trace(G @ H) = trace(herm_to_real(G) @ x) / 2`` for all Hermitian ``G``;
    it is PSD whenever ``x`` is.
    """
    x = np.asarray(x)
    n = x.shape[0] // 2
    a, b = x[:n, :n], x[:n, n:]
    c, d = x[n:, :n], x[n:, n:]
    return 0.5 * (a + d) + 0.5j * (c - b)


@dataclass
class ConicProblem:
    c: np.ndarray
    A: sp.csc_matrix
    b: np.ndarray
    zero: int = 0
    nonneg: int = 0
    psd: Sequence[int] = ()
    sense: str = "min"
    offset: float = 0.0

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.A = sp.csc_matrix(self.A, dtype=float)
        self.psd = tuple(int(n) for n in self.psd)
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        m, n = self.A.shape
        if m != self.b.size:
            raise ValueError(f"A has {m} rows but b has length {self.b.size}")
        if n != self.c.size:
            raise ValueError(f"A has {n} columns but c has length {self.c.size}")
        if self.zero + self.nonneg + sum(svec_len(k) for k in self.psd) != m:
            raise ValueError("cone dimensions do not add up to the number of rows of A")

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def num_rows(self) -> int:
        return self.b.size

    def psd_slices(self):
        start = self.zero + self.nonneg
        out = []
        for n in self.psd:
            out.append(slice(start, start + svec_len(n)))
            start += svec_len(n)
        return out

    def min_form_c(self) -> np.ndarray:
        return self.c if self.sense == "min" else -self.c


@dataclass
class SolverResult:
    status: str
    primal_value: float
    dual_value: float
    x: np.ndarray
    y: np.ndarray
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    backend: str = ""
    raw_status: str = ""
    notes: list = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def value(self) -> float:
        return self.primal_value


def cone_violation(v: np.ndarray, problem: ConicProblem, dual: bool = False) -> float:
    """Distance-like violation of ``v`` from ``K`` (or from ``K*`` when ``dual``)."""
    worst = 0.0
    z, l = problem.zero, problem.nonneg
    if z and not dual:
        worst = max(worst, float(np.max(np.abs(v[:z]))))
    if l:
        worst = max(worst, float(max(0.0, -np.min(v[z:z + l]))))
    for sl in problem.psd_slices():
        mat = smat(v[sl])
        worst = max(worst, float(max(0.0, -np.linalg.eigvalsh(mat)[0])))
    return worst


def certify(problem: ConicProblem, x: np.ndarray, y: np.ndarray):
    """Recompute objective values, duality gap and KKT residuals from scratch.

    Returns ``(primal_value, dual_value, gap, primal_residual, dual_residual)``
    with values reported in the problem's own sense.
    """
    c = problem.min_form_c()
    slack = problem.b - problem.A @ x
    pres = cone_violation(slack, problem)
    stationarity = problem.A.T @ y + c
    dres = max(float(np.max(np.abs(stationarity))) if stationarity.size else 0.0,
               cone_violation(y, problem, dual=True))
    pval = float(c @ x)
    dval = float(-problem.b @ y)
    # complementarity is implied by the gap: c.x - (-b.y) = s.y when A'y + c = 0
    gap = abs(pval - dval)
    if problem.sense == "max":
        pval, dval = -pval, -dval
    return pval + problem.offset, dval + problem.offset, gap, pres, dres


def dump_problem(problem: ConicProblem, fh: TextIO) -> None:
    """Write a problem in the plain-text exchange format described in the README."""
    A = sp.coo_matrix(problem.A)
    fh.write("# strategem conic problem v1\n")
    fh.write(f"sense {problem.sense}\n")
    fh.write(f"offset {problem.offset!r}\n")
    fh.write(f"vars {problem.num_vars}\n")
    fh.write(f"rows {problem.num_rows}\n")
    fh.write(f"zero {problem.zero}\n")
    fh.write(f"nonneg {problem.nonneg}\n")
    fh.write("psd " + " ".join(str(n) for n in problem.psd) + "\n")
    fh.write("c\n")
    for k, v in enumerate(problem.c):
        if v != 0.0:
            fh.write(f"{k} {float(v)!r}\n")
    fh.write("b\n")
    for k, v in enumerate(problem.b):
        if v != 0.0:
            fh.write(f"{k} {float(v)!r}\n")
    fh.write(f"A {A.nnz}\n")
    for i, j, v in zip(A.row, A.col, A.data):
        fh.write(f"{i} {j} {float(v)!r}\n")
    fh.write("end\n")


def load_problem(fh: TextIO) -> ConicProblem:
    lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    it = iter(lines)
    head = {}
    for _ in range(7):
        key, *rest = next(it).split()
        head[key] = rest
    n, m = int(head["vars"][0]), int(head["rows"][0])
    c = np.zeros(n)
    b = np.zeros(m)
    section = next(it)
    if section != "c":
        raise ValueError(f"expected the 'c' section, found {section!r}")
    line = next(it)
    while line != "b":
        k, v = line.split()
        c[int(k)] = float(v)
        line = next(it)
    line = next(it)
    while not line.startswith("A "):
        k, v = line.split()
        b[int(k)] = float(v)
        line = next(it)
    nnz = int(line.split()[1])
    rows, cols, vals = [], [], []
    for _ in range(nnz):
        i, j, v = next(it).split()
        rows.append(int(i))
        cols.append(int(j))
        vals.append(float(v))
    A = sp.csc_matrix((vals, (rows, cols)), shape=(m, n))
    return ConicProblem(c=c, A=A, b=b, zero=int(head["zero"][0]), nonneg=int(head["nonneg"][0]),
                        psd=tuple(int(v) for v in head["psd"]), sense=head["sense"][0],
                        offset=float(head["offset"][0]))
