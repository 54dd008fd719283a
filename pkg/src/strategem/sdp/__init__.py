"""Conic programming layer: problem format, certified solving, complex assembly."""

from .builder import Affine, ProblemBuilder
from .problem import (FEAS_TOL, GAP_TOL, ConicProblem, SolverResult, certify, dump_problem,
                      herm_to_real, load_problem, real_to_herm, smat, svec)
from .solver import SolverError, backend_name, solve

__all__ = [
    "Affine", "ProblemBuilder", "ConicProblem", "SolverResult", "SolverError", "solve",
    "certify", "dump_problem", "load_problem", "herm_to_real", "real_to_herm", "svec", "smat",
    "backend_name", "GAP_TOL", "FEAS_TOL",
]
