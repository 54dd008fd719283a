"""Solver adapters. Each maps a :class:`ConicProblem` onto an external interior-point
code and returns the raw primal ``x`` and dual ``y`` in this package's convention."""

import numpy as np
import scipy.sparse as sp

from .problem import ConicProblem, svec, svec_len


def solve_clarabel(problem: ConicProblem, gap_tol: float, max_iter: int, level: int = 0):
    import clarabel

    n = problem.num_vars
    P = sp.csc_matrix((n, n))
    cones = []
    if problem.zero:
        cones.append(clarabel.ZeroConeT(problem.zero))
    if problem.nonneg:
        cones.append(clarabel.NonnegativeConeT(problem.nonneg))
    for k in problem.psd:
        cones.append(clarabel.PSDTriangleConeT(k))
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.max_iter = int(min(max_iter, 400))
    # solve well past the certification tolerance; the gap is re-checked independently
    # level 1 keeps the defaults, which sometimes avoid an early stall
    if level == 0:
        settings.tol_gap_abs = gap_tol * 1e-3
        settings.tol_gap_rel = gap_tol * 1e-3
        settings.tol_feas = 1e-10
        settings.tol_ktratio = 1e-9
    solver = clarabel.DefaultSolver(P, problem.min_form_c(), problem.A, problem.b, cones, settings)
    sol = solver.solve()
    status = str(sol.status)
    if "." in status:
        status = status.split(".")[-1]
    x = np.asarray(sol.x, dtype=float)
    y = np.asarray(sol.z, dtype=float)
    if status in ("Solved", "AlmostSolved"):
        kind = "solved"
    elif "Infeasible" in status:
        kind = "infeasible"
    elif status == "MaxIterations":
        kind = "max_iter"
    else:
        kind = "inaccurate"
    return kind, status, x, y, int(sol.iterations)


def _svec_to_full(n: int) -> sp.csr_matrix:
    """Matrix mapping svec(X) to the column-major entries of X."""
    rows, cols, vals = [], [], []
    k = 0
    for j in range(n):
        for i in range(j + 1):
            if i == j:
                rows.append(i + j * n)
                cols.append(k)
                vals.append(1.0)
            else:
                for (a, b) in ((i, j), (j, i)):
                    rows.append(a + b * n)
                    cols.append(k)
                    vals.append(1.0 / np.sqrt(2.0))
            k += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(n * n, svec_len(n)))


def solve_cvxopt(problem: ConicProblem, gap_tol: float, max_iter: int, level: int = 0):
    import cvxopt
    from cvxopt import solvers

    A = sp.csr_matrix(problem.A)
    z, l = problem.zero, problem.nonneg
    blocks = [sp.csr_matrix(A[z:z + l])]
    hs = [problem.b[z:z + l]]
    for sl, k in zip(problem.psd_slices(), problem.psd):
        T = _svec_to_full(k)
        blocks.append(T @ A[sl])
        hs.append(T @ problem.b[sl])
    G = sp.vstack(blocks).tocoo() if blocks else None
    h = np.concatenate(hs)

    def spm(m):
        m = sp.coo_matrix(m)
        return cvxopt.spmatrix(m.data.tolist(), m.row.tolist(), m.col.tolist(), size=m.shape)

    scale = 1e-2 if level == 0 else 1e-1
    opts = {"show_progress": False, "maxiters": int(min(max_iter, 400)),
            "abstol": gap_tol * scale, "reltol": gap_tol * scale,
            "feastol": 1e-10 if level == 0 else 1e-9}
    args = [cvxopt.matrix(problem.min_form_c()), spm(G), cvxopt.matrix(h),
            {"l": l, "q": [], "s": list(problem.psd)}]
    if z:
        args += [spm(A[:z]), cvxopt.matrix(problem.b[:z])]
    try:
        sol = solvers.conelp(*args, options=opts)
    except (ZeroDivisionError, ArithmeticError, ValueError) as exc:
        # cvxopt raises when a scaling step degenerates near the optimum
        return "inaccurate", f"error: {exc}", np.zeros(problem.num_vars), np.zeros(problem.b.size), 0
    status = sol["status"]
    x = np.array(sol["x"]).reshape(-1) if sol["x"] is not None else np.zeros(problem.num_vars)
    zz = np.array(sol["z"]).reshape(-1) if sol["z"] is not None else np.zeros(h.size)
    yeq = np.array(sol["y"]).reshape(-1) if (z and sol["y"] is not None) else np.zeros(z)
    parts = [yeq, zz[:l]]
    off = l
    for k in problem.psd:
        parts.append(svec(zz[off:off + k * k].reshape(k, k, order="F")))
        off += k * k
    y = np.concatenate(parts)
    if status == "optimal":
        kind = "solved"
    elif "infeasible" in status:
        kind = "infeasible"
    else:
        kind = "inaccurate"
    return kind, status, x, y, int(sol.get("iterations", 0))


BACKENDS = {"clarabel": solve_clarabel, "cvxopt": solve_cvxopt}
