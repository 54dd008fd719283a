"""Strategy fidelity: the SDP, the bilinear overlap, the inner minimization over
co-strategies, an independent bracketing oracle and the fidelity-achieving channel.

The SDP optimum ``t`` equals the strategy fidelity itself (the fidelity is the
unsquared ``||sqrt(P) sqrt(Q)||_1``); e.g. for one-round states ``|0>`` and
``|+>`` it is ``1/sqrt(2)``.
"""

import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .constraints import costrategy_chain, strategy_dual_chain
from .linalg import dagger, hermitian_part, operator_norm, sqrt_psd, state_fidelity
from .registers import RoundShape
from .sdp import FEAS_TOL, Affine, ProblemBuilder, SolverResult
from .strategies import (CoStrategyChoi, IncompatibleError, PureCoStrategy, Purification,
                         as_purification, costrategy_choi, equalize_memory, final_state,
                         pure_costrategy_from_kraus_input, random_pure_costrategy,
                         reduced_final_state)


@dataclass
class FidelityResult:
    value: float
    sdp_optimum: float
    optimal_K: np.ndarray
    witnesses: list
    solver: SolverResult
    s: Purification = None
    t: Purification = None

    @property
    def k_norm(self) -> float:
        return operator_norm(self.optimal_K)


@dataclass
class InnerMinResult:
    phi: float
    alpha: Optional[float]
    optimal_B: np.ndarray
    solver: SolverResult
    dual_solver: Optional[SolverResult] = None


def _pair(s, t):
    ps, pt = as_purification(s), as_purification(t)
    if ps.shape != pt.shape:
        raise IncompatibleError(f"strategies have different shapes: {ps.shape} vs {pt.shape}")
    return equalize_memory(ps, pt)


def overlap_tensor(s: Purification, t: Purification) -> np.ndarray:
    """``G[z, w] = Tr_Z[(|z><w| (x) I) |T>><<S|]`` on the Choi space, shape ``(z, z, d, d)``."""
    d = s.shape.choi_dim
    g = np.einsum("ywx,vzu->zwyxvu", t.tensor, s.tensor.conj())
    z = s.memory
    return g.reshape(z, z, d, d)


def c_matrix(s, t, k: np.ndarray) -> np.ndarray:
    """The Hermitian operator ``C(K)`` with ``Re <<S|(K (x) B)|T>> = <C(K), B>``."""
    ps, pt = _pair(s, t)
    g = overlap_tensor(ps, pt)
    m = np.einsum("zw,zwab->ab", np.asarray(k), g)
    return hermitian_part(m)


def _c_affine(g: np.ndarray, k: Affine) -> Affine:
    coef = np.einsum("zwn,zwab->abn", k.coef, g)
    const = np.einsum("zw,zwab->ab", k.const, g)
    return Affine(coef, const).hermitian_part()


def bilinear_overlap(s, t, k: np.ndarray, b) -> complex:
    """``<<S|(K (x) B)|T>>`` for a co-strategy Choi operator ``b``."""
    ps, pt = _pair(s, t)
    bm = b.matrix if isinstance(b, CoStrategyChoi) else np.asarray(b)
    Y, X = ps.shape.total_out, ps.shape.total_in
    if bm.shape != (Y * X, Y * X):
        raise IncompatibleError(f"co-strategy of shape {bm.shape} does not fit {ps.shape}")
    return complex(np.einsum("yzx,zw,yxab,awb->", ps.tensor.conj(), np.asarray(k),
                             bm.reshape(Y, X, Y, X), pt.tensor))


def simulated_overlap(s, t, k: np.ndarray, b: PureCoStrategy) -> complex:
    """``<psi(S,B)|(K (x) I_W)|psi(T,B)>`` from the simulated final states."""
    ps, pt = _pair(s, t)
    z = ps.memory
    psi_s = final_state(ps, b).reshape(z, -1)
    psi_t = final_state(pt, b).reshape(z, -1)
    return complex(np.vdot(psi_s, np.asarray(k) @ psi_t))


def inner_min_over_B(s, t, k: np.ndarray, check_duality: bool = True, **solve_kw) -> InnerMinResult:
    """``phi(K) = min_B Re <<S|(K (x) B)|T>>`` over co-strategies, with the dual value ``alpha(K)``.

    The primal is solved over the co-strategy chain; with ``check_duality`` the
    dual program (the fixed-``K`` fidelity SDP) is solved separately and the two
    optimal values are required to agree within the sum of the certified gaps.
    """
    ps, pt = _pair(s, t)
    k = np.asarray(k, dtype=complex)
    if operator_norm(k) > 1 + 1e-7:
        raise ValueError(f"||K|| = {operator_norm(k):.6f} exceeds 1")
    c = c_matrix(ps, pt, k)
    shape = ps.shape

    pb = ProblemBuilder()
    b, _ = costrategy_chain(pb, shape)
    pb.minimize((Affine.constant(c) @ b).trace().hermitian_part())
    _, res = pb.solve(**solve_kw)
    phi = res.primal_value
    b_opt = hermitian_part(b.value(res.x))

    alpha, dual_res = None, None
    if check_duality:
        db = ProblemBuilder()
        tvar, _ = strategy_dual_chain(db, shape, Affine.constant(c))
        db.maximize(tvar)
        _, dual_res = db.solve(**solve_kw)
        alpha = dual_res.primal_value
        # each value is off from the true optimum by its gap plus residual noise
        slack = max(FEAS_TOL, res.gap + dual_res.gap)
        if abs(alpha - phi) > slack:
            raise AssertionError(f"strong duality violated: phi={phi:.10f} alpha={alpha:.10f}")
    return InnerMinResult(phi, alpha, b_opt, res, dual_res)


def strategy_fidelity(s, t, **solve_kw) -> FidelityResult:
    """Strategy fidelity of two strategies given by (any) purifications.

    Maximizes ``t`` subject to ``t I <= Tr_{Y1} R_1``,
    ``R_j (x) I <= Tr_{Y_{j+1}} R_{j+1}``, ``R_r <= C(K)`` and
    ``[[I, K], [K*, I]] >= 0``.
    """
    ps, pt = _pair(s, t)
    z = ps.memory
    g = overlap_tensor(ps, pt)

    pb = ProblemBuilder()
    m = pb.hermitian(2 * z)
    pb.add_psd(m)
    eye = np.eye(z)
    pb.add_eq(m[:z, :z] - eye)
    pb.add_eq(m[z:, z:] - eye)
    k = m[:z, z:]
    tvar, rs = strategy_dual_chain(pb, ps.shape, _c_affine(g, k))
    pb.maximize(tvar)
    _, res = pb.solve(**solve_kw)
    kval = k.value(res.x)
    witnesses = [hermitian_part(r.value(res.x)) for r in rs]
    return FidelityResult(value=res.primal_value, sdp_optimum=res.primal_value, optimal_K=kval,
                          witnesses=witnesses, solver=res, s=ps, t=pt)


# --- fidelity-achieving channel -------------------------------------------------------


@dataclass
class UhlmannChannel:
    kraus: List[np.ndarray]
    clamped: bool = False
    warnings: list = field(default_factory=list)

    def completeness_error(self) -> float:
        total = sum(dagger(e) @ e for e in self.kraus)
        return operator_norm(total - np.eye(total.shape[0]))

    def apply_to_memory(self, psi: np.ndarray, w: int) -> np.ndarray:
        """``(Xi (x) id_W)(|psi><psi|)`` for ``psi`` on ``Z (x) W``."""
        m = np.asarray(psi).reshape(-1, w)
        out = 0
        for e in self.kraus:
            v = (e @ m).reshape(-1)
            out = out + np.outer(v, v.conj())
        return out


def uhlmann_channel(res, tol: float = 1e-7) -> UhlmannChannel:
    """Channel with Kraus pair ``{K, sqrt(I - K*K)}`` built from the optimal ``K``."""
    k = np.asarray(res.optimal_K if isinstance(res, FidelityResult) else res, dtype=complex)
    notes = []
    clamped = False
    nk = operator_norm(k)
    if nk > 1:
        if nk > 1 + tol:
            notes.append(f"||K|| = {nk:.3e} exceeds 1 beyond tolerance; rescaled")
            warnings.warn(notes[-1])
        k = k / nk
        clamped = True
    kbar = sqrt_psd(np.eye(k.shape[0]) - dagger(k) @ k)
    return UhlmannChannel([k, kbar], clamped, notes)


def uhlmann_overlap(channel: UhlmannChannel, s, t, b: PureCoStrategy) -> float:
    """``<psi(S,B)| (Xi (x) id)(|psi(T,B)><psi(T,B)|) |psi(S,B)>``."""
    ps, pt = _pair(s, t)
    psi_s = final_state(ps, b)
    psi_t = final_state(pt, b)
    sigma = channel.apply_to_memory(psi_t, b.final_memory)
    return float(np.real(np.vdot(psi_s, sigma @ psi_s)))


# --- independent bracketing oracle -----------------------------------------------------


@dataclass
class Bracket:
    lower: float
    upper: float
    evaluations: int
    samples: int
    best_K: np.ndarray = None

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack


def _input_state_costrategy(shape: RoundShape, params: np.ndarray) -> PureCoStrategy:
    x = shape.x_dims[0]
    v = params[: x * x] + 1j * params[x * x:]
    return pure_costrategy_from_kraus_input(shape, v / np.linalg.norm(v), x)


def _output_fidelity(ps: Purification, pt: Purification, b: PureCoStrategy) -> float:
    return state_fidelity(reduced_final_state(ps, b), reduced_final_state(pt, b))


def sampled_upper_bound(s, t, samples: int = 64, seed=0, refine: bool = True):
    """Minimum output-state fidelity over sampled co-strategies (an upper bound on the fidelity).

    Returns ``(value, best co-strategy, all sampled values)``. For one round
    the sample includes entangled pure inputs refined by local search.
    """
    ps, pt = _pair(s, t)
    rng = np.random.default_rng(seed)
    shape = ps.shape
    vals, best, best_b = [], np.inf, None

    def consider(b):
        nonlocal best, best_b
        f = _output_fidelity(ps, pt, b)
        vals.append(f)
        if f < best:
            best, best_b = f, b

    for _ in range(samples):
        consider(random_pure_costrategy(shape, seed=rng))
    if shape.rounds == 1:
        x = shape.x_dims[0]
        phi = np.eye(x).reshape(-1)
        consider(_input_state_costrategy(shape, np.concatenate([phi.real, phi.imag])))
        if refine:
            def obj(p):
                if np.linalg.norm(p) < 1e-12:
                    return 1.0
                return _output_fidelity(ps, pt, _input_state_costrategy(shape, p))

            starts = [rng.standard_normal(2 * x * x) for _ in range(4)]
            for p0 in starts:
                opt = minimize(obj, p0, method="Nelder-Mead",
                               options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 4000})
                consider(_input_state_costrategy(shape, opt.x))
    return best, best_b, vals


def _support_split(psi_s: np.ndarray, psi_t: np.ndarray, z: int, rtol: float = 1e-6) -> np.ndarray:
    """Uhlmann partial isometry ``P`` for one co-strategy (zero on the kernels)."""
    a = psi_s.reshape(z, -1)
    b = psi_t.reshape(z, -1)
    u, sv, vh = np.linalg.svd(b @ dagger(a))
    rank = int(np.sum(sv > rtol * max(sv[0], 1e-300)))
    return dagger(vh[:rank]) @ dagger(u[:, :rank])


def _cut(g: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``L`` with ``Re <<S|(K (x) B)|T>> = Re sum(K * L)``."""
    return np.einsum("zwab,ba->zw", g, b)


def _master(cuts: Sequence[np.ndarray], z: int, **solve_kw):
    """``max_{||K|| <= 1} min_i Re sum(K * L_i)``: the cutting-plane model of ``phi``."""
    pb = ProblemBuilder()
    m = pb.hermitian(2 * z)
    pb.add_psd(m)
    eye = np.eye(z)
    pb.add_eq(m[:z, :z] - eye)
    pb.add_eq(m[z:, z:] - eye)
    k = m[:z, z:]
    tvar = pb.scalar()
    for cut in cuts:
        pb.add_nonneg((k @ cut.T).trace().hermitian_part() - tvar)
    pb.maximize(tvar)
    _, res = pb.solve(**solve_kw)
    return k.value(res.x), res


def strategy_fidelity_oracle(s, t, budget: int = 100, seed: int = 0, samples: int = 64,
                             tol: float = 1e-7) -> Bracket:
    """Bracket the strategy fidelity without the joint SDP.

    ``phi(K)`` is concave, and each inner minimization returns a co-strategy
    whose linear function of ``K`` touches ``phi`` from above. Kelley's
    cutting-plane method maximizes the pointwise minimum of the cuts collected
    so far, evaluates ``phi`` at the maximizer and adds the new cut. It starts
    from the Uhlmann partial isometry of the best sampled co-strategy. Each
    ``phi(K)`` is a lower bound. The upper end is the smaller of the best
    sampled output fidelity and the cutting-plane model value, which
    over-estimates ``phi`` everywhere. ``budget`` caps the number of
    ``phi`` evaluations.
    """
    ps, pt = _pair(s, t)
    z = ps.memory
    g = overlap_tensor(ps, pt)
    rng = np.random.default_rng(seed)
    upper, best_b, _ = sampled_upper_bound(ps, pt, samples=samples, seed=rng)

    evals, cuts = 0, [_cut(g, costrategy_choi(best_b).matrix)]
    best_val, best_k = -np.inf, None

    def phi(k):
        nonlocal evals, best_val, best_k
        evals += 1
        res = inner_min_over_B(ps, pt, k, check_duality=False)
        cuts.append(_cut(g, res.optimal_B))
        if res.phi > best_val:
            best_val, best_k = res.phi, k

    phi(_support_split(final_state(ps, best_b), final_state(pt, best_b), z))
    while evals < budget and upper - best_val > tol:
        k, res = _master(cuts, z)
        upper = min(upper, res.primal_value + res.gap)
        if upper - best_val <= tol:
            break
        phi(k)
    lower = max(best_val, 0.0)
    return Bracket(lower=lower, upper=upper, evaluations=evals, samples=samples, best_K=best_k)


# --- property checks -------------------------------------------------------------------


def mixture_purification(strategies: Sequence, weights: Sequence[float]) -> Purification:
    """Purification of ``sum_i w_i S_i``: the branches are stacked on an enlarged memory."""
    ps = [as_purification(s) for s in strategies]
    w = np.asarray(weights, dtype=float)
    if len(ps) != len(w) or np.any(w < 0) or abs(w.sum() - 1) > 1e-10:
        raise ValueError("weights must be a probability vector matching the strategies")
    shape = ps[0].shape
    if any(p.shape != shape for p in ps):
        raise IncompatibleError("mixture of strategies with different shapes")
    z = max(p.memory for p in ps)
    parts = [np.sqrt(wi) * p.padded(z).tensor for wi, p in zip(w, ps)]
    tensor = np.stack(parts, axis=2)  # [y, z, i, x]
    Y, X = shape.total_out, shape.total_in
    return Purification(shape, tensor.reshape(Y, z * len(ps), X))


def fvdg_check(s, t, slack: float = 1e-6, **solve_kw):
    """Check ``1 - N/2 <= F <= sqrt(1 - N^2/4)`` with ``N = ||S - T||``.

    Returns ``(F, N, lower, upper)``; raises ``AssertionError`` on violation.
    """
    from .norm import strategy_distance

    f = strategy_fidelity(s, t, **solve_kw).value
    n = strategy_distance(s, t, **solve_kw).value
    lo = 1 - n / 2
    hi = np.sqrt(max(0.0, 1 - n * n / 4))
    if not (lo - slack <= f <= hi + slack):
        raise AssertionError(f"Fuchs-van de Graaf violated: {lo:.8f} <= {f:.8f} <= {hi:.8f}")
    return f, n, lo, hi


def joint_concavity_check(pairs: Sequence, weights: Sequence[float], slack: float = 1e-6, **solve_kw):
    """Check ``F(sum w_i S_i, sum w_i T_i) >= sum w_i F(S_i, T_i)``.

    ``pairs`` is a sequence of ``(S_i, T_i)``. Returns ``(lhs, rhs)``.
    """
    lhs = strategy_fidelity(mixture_purification([p[0] for p in pairs], weights),
                            mixture_purification([p[1] for p in pairs], weights), **solve_kw).value
    rhs = float(sum(w * strategy_fidelity(a, b, **solve_kw).value for w, (a, b) in zip(weights, pairs)))
    if lhs < rhs - slack:
        raise AssertionError(f"joint concavity violated: {lhs:.8f} < {rhs:.8f}")
    return lhs, rhs
