import os

import numpy as np

from .backends import BACKENDS
from .problem import FEAS_TOL, GAP_TOL, ConicProblem, SolverResult, certify

DEFAULT_BACKEND = "clarabel"


def backend_name(name: str = None) -> str:
    name = (name or os.environ.get("STRATEGEM_SOLVER") or DEFAULT_BACKEND).lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown solver backend {name!r}; choose from {sorted(BACKENDS)}")
    return name


def solve(problem: ConicProblem, gap_tol: float = GAP_TOL, max_iter: int = 50000,
          feas_tol: float = FEAS_TOL, backend: str = None, fallback: bool = True) -> SolverResult:
    """Solve ``problem`` and certify the answer.

    The status is ``"optimal"`` only if the recomputed duality gap is at most
    ``gap_tol`` and both feasibility residuals are at most ``feas_tol``.
    Otherwise it is ``"infeasible"``, ``"max_iter"`` or ``"inaccurate"``.
    The backend defaults to ``$STRATEGEM_SOLVER`` or clarabel. An uncertified
    answer is retried with the backend's default tolerances and then, with
    ``fallback``, with the other backend; the result records which one succeeded.
    """
    name = backend_name(backend)
    attempts = [(name, 0), (name, 1)]
    if fallback:
        attempts += [(other, level) for other in sorted(BACKENDS) if other != name for level in (0, 1)]
    tried, best, best_score = [], None, np.inf
    for bname, level in attempts:
        res = _attempt(problem, bname, level, gap_tol, max_iter, feas_tol)
        tried.append(f"{bname}[{level}]: {res.status} ({res.raw_status})")
        if res.status == "optimal":
            best = res
            break
        if res.status == "infeasible" and best is None:
            # a certificate of infeasibility is not retried
            best = res
            break
        score = max(res.gap / gap_tol, res.primal_residual / feas_tol, res.dual_residual / feas_tol)
        if res.status == "inaccurate" and score < best_score:
            best, best_score = res, score
        elif best is None:
            best = res
    if len(tried) > 1:
        best.notes.append("attempts: " + "; ".join(tried))
    return best


def _attempt(problem, name, level, gap_tol, max_iter, feas_tol) -> SolverResult:
    kind, raw, x, y, iters = BACKENDS[name](problem, gap_tol, max_iter, level)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        x = np.nan_to_num(x)
        y = np.nan_to_num(y)
        kind = "inaccurate" if kind == "solved" else kind
    pval, dval, gap, pres, dres = certify(problem, x, y)
    if kind == "solved":
        ok = gap <= gap_tol and pres <= feas_tol and dres <= feas_tol
        status = "optimal" if ok else "inaccurate"
    else:
        status = kind
    notes = []
    if status == "inaccurate":
        notes.append(f"gap={gap:.2e} pres={pres:.2e} dres={dres:.2e}")
    return SolverResult(status=status, primal_value=pval, dual_value=dval, x=x, y=y, gap=gap,
                        primal_residual=pres, dual_residual=dres, iterations=iters,
                        backend=name, raw_status=raw, notes=notes)


class SolverError(RuntimeError):
    def __init__(self, result: SolverResult):
        super().__init__(f"solver returned status {result.status!r} ({result.backend}: "
                         f"{result.raw_status}; {'; '.join(result.notes)})")
        self.result = result
