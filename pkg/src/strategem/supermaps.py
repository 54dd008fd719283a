"""Strategy supermaps in Kraus form, their adjoints and monotonicity checks.

A supermap acts on Choi operators as ``S -> sum_k M_k S M_k*``. The shipped
constructors are per-round channel composition, round padding and round
merging; all of them map strategies to strategies.
"""

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .fidelity import strategy_fidelity
from .linalg import dagger, hermitian_part, kron, operator_norm, partial_trace
from .norm import strategy_norm
from .registers import RoundShape
from .strategies import (IncompatibleError, Purification, as_purification, costrategy_choi,
                         haar_isometry, random_pure_costrategy, random_pure_strategy, strategy_choi,
                         validate_costrategy, validate_strategy)


class InvalidChannelError(ValueError):
    pass


@dataclass(frozen=True)
class Channel:
    """A quantum channel given by Kraus operators of shape ``(out, in)``."""

    kraus: tuple

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise InvalidChannelError("a channel needs at least one Kraus operator")
        if any(k.shape != ks[0].shape for k in ks):
            raise InvalidChannelError("Kraus operators of different shapes")
        err = operator_norm(sum(dagger(k) @ k for k in ks) - np.eye(ks[0].shape[1]))
        if err > 1e-9:
            raise InvalidChannelError(f"not trace preserving (completeness error {err:.2e})")
        object.__setattr__(self, "kraus", ks)

    @property
    def in_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]

    def choi(self) -> np.ndarray:
        """Choi operator on ``out (x) in``, the same layout as a one-round strategy."""
        vs = [k.reshape(-1) for k in self.kraus]
        return sum(np.outer(v, v.conj()) for v in vs)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ dagger(k) for k in self.kraus)

    @classmethod
    def identity(cls, d: int) -> "Channel":
        return cls((np.eye(d),))

    @classmethod
    def unitary(cls, u: np.ndarray) -> "Channel":
        return cls((np.asarray(u),))

    @classmethod
    def depolarizing(cls, d_in: int, d_out: Optional[int] = None) -> "Channel":
        """Completely depolarizing channel: every input goes to the maximally mixed state."""
        d_out = d_in if d_out is None else d_out
        ks = []
        for i in range(d_out):
            for j in range(d_in):
                k = np.zeros((d_out, d_in))
                k[i, j] = 1 / np.sqrt(d_out)
                ks.append(k)
        return cls(tuple(ks))

    @classmethod
    def from_choi(cls, choi: np.ndarray, in_dim: int, out_dim: int, tol: float = 1e-9) -> "Channel":
        choi = np.asarray(choi, dtype=complex)
        if choi.shape != (in_dim * out_dim,) * 2:
            raise InvalidChannelError(f"Choi matrix of shape {choi.shape} for {in_dim} -> {out_dim}")
        if operator_norm(choi - dagger(choi)) > tol:
            raise InvalidChannelError("Choi matrix is not Hermitian")
        w, v = np.linalg.eigh(hermitian_part(choi))
        if w.min() < -tol:
            raise InvalidChannelError(f"Choi matrix is not PSD (min eigenvalue {w.min():.2e})")
        tp = partial_trace(choi, [out_dim, in_dim], [0])
        if operator_norm(tp - np.eye(in_dim)) > tol:
            raise InvalidChannelError("Choi matrix is not trace preserving")
        keep = w > tol
        ks = [(v[:, i] * np.sqrt(w[i])).reshape(out_dim, in_dim) for i in np.flatnonzero(keep)]
        return cls(tuple(ks))

    @classmethod
    def random(cls, d_in: int, d_out: int, n_kraus: int = 2, seed=None) -> "Channel":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        n_kraus = max(n_kraus, -(-d_in // d_out))  # enough Kraus operators for an isometry
        v = haar_isometry(d_out * n_kraus, d_in, rng).reshape(n_kraus, d_out, d_in)
        return cls(tuple(v))


def _as_channel(ch, d: int) -> Channel:
    if ch is None:
        return Channel.identity(d)
    if isinstance(ch, Channel):
        return ch
    if isinstance(ch, (list, tuple)):
        return Channel(tuple(ch))
    raise InvalidChannelError(f"cannot interpret {type(ch).__name__} as a channel")


@dataclass(frozen=True)
class Supermap:
    kraus_factors: tuple
    in_shape: RoundShape
    out_shape: RoundShape

    def __post_init__(self):
        ms = tuple(np.asarray(m, dtype=complex) for m in self.kraus_factors)
        want = (self.out_shape.choi_dim, self.in_shape.choi_dim)
        for m in ms:
            if m.shape != want:
                raise IncompatibleError(f"Kraus factor of shape {m.shape}, expected {want}")
        object.__setattr__(self, "kraus_factors", ms)

    def apply(self, s: np.ndarray) -> np.ndarray:
        """``sum_k M_k S M_k*`` on a Choi operator on the input space."""
        s = np.asarray(s, dtype=complex)
        return sum(m @ s @ dagger(m) for m in self.kraus_factors)

    __call__ = apply

    def apply_adjoint(self, b: np.ndarray) -> np.ndarray:
        """``sum_k M_k* B M_k`` on an operator on the output space."""
        b = np.asarray(b, dtype=complex)
        return sum(dagger(m) @ b @ m for m in self.kraus_factors)

    def image_purification(self, s, compress: bool = True) -> Purification:
        """Purification of the image: ``sum_k (M_k (x) I_Z) vec(S) (x) |k>``, memory ``Z (x) K``."""
        p = as_purification(s)
        if p.shape != self.in_shape:
            raise IncompatibleError(f"strategy of shape {p.shape} given to a supermap on {self.in_shape}")
        Y, X = self.in_shape.total_out, self.in_shape.total_in
        Yo, Xo = self.out_shape.total_out, self.out_shape.total_in
        parts = []
        for m in self.kraus_factors:
            m4 = m.reshape(Yo, Xo, Y, X)
            parts.append(np.einsum("abyx,yzx->azb", m4, p.tensor))
        t = np.stack(parts, axis=2).reshape(Yo, p.memory * len(parts), Xo)
        out = Purification(self.out_shape, t)
        return out.compressed() if compress else out

    def then(self, other: "Supermap") -> "Supermap":
        """The composite ``other . self``."""
        if other.in_shape != self.out_shape:
            raise IncompatibleError("supermap shapes do not chain")
        ms = tuple(b @ a for a, b in product(self.kraus_factors, other.kraus_factors))
        return Supermap(ms, self.in_shape, other.out_shape)

    def adjoint(self) -> "AdjointSupermap":
        return AdjointSupermap(self)


@dataclass(frozen=True)
class AdjointSupermap:
    """``B' -> sum_k M_k* B' M_k``; maps co-strategies for the output shape to co-strategies."""

    base: Supermap

    @property
    def in_shape(self) -> RoundShape:
        return self.base.out_shape

    @property
    def out_shape(self) -> RoundShape:
        return self.base.in_shape

    def apply(self, b: np.ndarray) -> np.ndarray:
        return self.base.apply_adjoint(b)

    __call__ = apply


def identity_supermap(shape: RoundShape) -> Supermap:
    return Supermap((np.eye(shape.choi_dim),), shape, shape)


def from_channel_composition(pre: Sequence, post: Sequence, shape: RoundShape = None,
                             certify: int = 3, seed: int = 0) -> Supermap:
    """Supermap ``S -> Choi(post . S . pre)`` with one pre- and one post-channel per round.

    ``pre[i]`` maps the new input ``X'_i`` to ``X_i`` and ``post[i]`` maps
    ``Y_i`` to ``Y'_i``; ``None`` means the identity (then ``shape`` is
    needed to know the dimension). Each Kraus factor is
    ``G_1 (x) .. (x) G_r (x) D_1^T (x) .. (x) D_r^T``. The result is
    checked on ``certify`` random strategies.
    """
    if len(pre) != len(post):
        raise ValueError("pre and post need one entry per round")
    r = len(pre)
    if shape is None:
        if any(c is None for c in list(pre) + list(post)):
            raise ValueError("shape is required when some channels are omitted")
        shape = RoundShape(tuple(_as_channel(c, 0).out_dim for c in pre),
                           tuple(_as_channel(c, 0).in_dim for c in post))
    if shape.rounds != r:
        raise IncompatibleError(f"{r} channel pairs for a {shape.rounds}-round shape")
    pres = [_as_channel(c, shape.x_dims[i]) for i, c in enumerate(pre)]
    posts = [_as_channel(c, shape.y_dims[i]) for i, c in enumerate(post)]
    for i in range(r):
        if pres[i].out_dim != shape.x_dims[i] or posts[i].in_dim != shape.y_dims[i]:
            raise IncompatibleError(f"round {i + 1}: channel dimensions do not fit {shape}")
    out = RoundShape(tuple(c.in_dim for c in pres), tuple(c.out_dim for c in posts))
    factors = []
    for ks in product(*[c.kraus for c in posts], *[c.kraus for c in pres]):
        gs, ds = ks[:r], ks[r:]
        factors.append(kron(*gs, *[d.T for d in ds]))
    u = Supermap(tuple(factors), shape, out)
    if certify:
        certify_strategy_preserving(u, trials=certify, seed=seed)
    return u


def round_padding(shape: RoundShape, position: int = None) -> Supermap:
    """Insert a trivial round (one-dimensional input and output) at ``position`` (default: last)."""
    position = shape.rounds if position is None else position
    xs, ys = list(shape.x_dims), list(shape.y_dims)
    xs.insert(position, 1)
    ys.insert(position, 1)
    return Supermap((np.eye(shape.choi_dim),), shape, RoundShape(tuple(xs), tuple(ys)))


def round_merging(shape: RoundShape, first: int) -> Supermap:
    """Merge rounds ``first`` and ``first + 1`` (0-based) into a single round.

    The canonical ordering already groups ``Y_i Y_{i+1}`` and ``X_i X_{i+1}``,
    so the Choi operator is unchanged; only the causal structure is forgotten.
    """
    if not 0 <= first < shape.rounds - 1:
        raise ValueError(f"cannot merge round {first} of a {shape.rounds}-round shape")
    xs, ys = list(shape.x_dims), list(shape.y_dims)
    xs[first:first + 2] = [xs[first] * xs[first + 1]]
    ys[first:first + 2] = [ys[first] * ys[first + 1]]
    return Supermap((np.eye(shape.choi_dim),), shape, RoundShape(tuple(xs), tuple(ys)))


def random_composition_supermap(shape: RoundShape, seed=None, max_dim: int = 2,
                                max_kraus: int = 2) -> Supermap:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pre, post = [], []
    for x, y in zip(shape.x_dims, shape.y_dims):
        xn = int(rng.integers(1, max_dim + 1))
        yn = int(rng.integers(1, max_dim + 1))
        pre.append(Channel.random(xn, x, int(rng.integers(1, max_kraus + 1)), rng))
        post.append(Channel.random(y, yn, int(rng.integers(1, max_kraus + 1)), rng))
    return from_channel_composition(pre, post, shape, certify=0)


# --- certification and monotonicity ----------------------------------------------------


@dataclass
class PreservationReport:
    trials: int
    worst_strategy_residual: float
    worst_costrategy_residual: float
    ok: bool


def certify_strategy_preserving(u: Supermap, trials: int = 5, seed=0, tol: float = 1e-7) -> PreservationReport:
    """Batch check: images of random strategies are strategies and adjoint images of
    random co-strategies are co-strategies."""
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    ws, wb = 0.0, 0.0
    for _ in range(trials):
        s = strategy_choi(random_pure_strategy(u.in_shape, seed=rng)).matrix
        ws = max(ws, validate_strategy(u.apply(s), u.out_shape, tol).worst())
        b = random_costrategy_choi(u.out_shape, rng)
        wb = max(wb, validate_costrategy(u.apply_adjoint(b), u.in_shape, tol).worst())
    report = PreservationReport(trials, float(ws), float(wb), bool(ws <= tol and wb <= tol))
    if not report.ok:
        raise AssertionError(f"supermap failed certification: strategy residual {ws:.2e}, "
                             f"co-strategy residual {wb:.2e}")
    return report


def random_costrategy_choi(shape: RoundShape, seed=None) -> np.ndarray:
    return costrategy_choi(random_pure_costrategy(shape, seed=seed)).matrix


@dataclass
class MonotonicityReport:
    before: float
    after: float
    holds: bool
    slack: float

    @property
    def margin(self) -> float:
        return self.after - self.before


def monotonicity_check_fidelity(u: Supermap, s, t, slack: float = 1e-5, **solve_kw) -> MonotonicityReport:
    """``F(U(S), U(T)) >= F(S, T)``, with the images purified through the Kraus factors."""
    ps, pt = as_purification(s), as_purification(t)
    if ps.shape != u.in_shape or pt.shape != u.in_shape:
        raise IncompatibleError("strategies do not match the supermap input shape")
    before = strategy_fidelity(ps, pt, **solve_kw).value
    after = strategy_fidelity(u.image_purification(ps), u.image_purification(pt), **solve_kw).value
    rep = MonotonicityReport(before, after, after >= before - slack, slack)
    if not rep.holds:
        raise AssertionError(f"fidelity decreased under a supermap: {before:.8f} -> {after:.8f}")
    return rep


def monotonicity_check_norm(u: Supermap, h: np.ndarray, slack: float = 1e-5, **solve_kw) -> MonotonicityReport:
    """``||U(H)|| <= ||H||`` for a Hermitian ``h`` on the input space."""
    h = np.asarray(h, dtype=complex)
    before = strategy_norm(h, u.in_shape, **solve_kw).value
    after = strategy_norm(u.apply(h), u.out_shape, **solve_kw).value
    # the report's "holds" means the norm did not grow
    rep = MonotonicityReport(before, after, after <= before + slack, slack)
    if not rep.holds:
        raise AssertionError(f"norm increased under a supermap: {before:.8f} -> {after:.8f}")
    return rep
