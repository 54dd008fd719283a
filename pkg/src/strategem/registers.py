"""Tensor-factor bookkeeping for r-round interactions.

Factors carry string labels ``"Y1" .. "Yr"``, ``"X1" .. "Xr"`` plus optional
memory labels such as ``"Z"`` or ``"W"``. The canonical order of every Choi
operator is ``Y1 .. Yr X1 .. Xr``.
"""

from dataclasses import dataclass
from math import prod
from typing import Mapping, Sequence, Tuple

import numpy as np

from .linalg import DimensionError


class LabelError(ValueError):
    """Raised when two factor orders do not carry the same labels."""


@dataclass(frozen=True)
class RoundShape:
    """Message dimensions of an r-round interaction.

    ``x_dims[i]`` is the dimension of the message Alice receives in round
    ``i + 1`` and ``y_dims[i]`` the dimension of the message she sends back.
    """

    x_dims: Tuple[int, ...]
    y_dims: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "x_dims", tuple(int(d) for d in self.x_dims))
        object.__setattr__(self, "y_dims", tuple(int(d) for d in self.y_dims))
        if len(self.x_dims) != len(self.y_dims) or not self.x_dims:
            raise ValueError("x_dims and y_dims must be non-empty and of equal length")
        if min(self.x_dims + self.y_dims) < 1:
            raise ValueError("all message dimensions must be >= 1")

    @property
    def rounds(self) -> int:
        return len(self.x_dims)

    @property
    def total_in(self) -> int:
        return prod(self.x_dims)

    @property
    def total_out(self) -> int:
        return prod(self.y_dims)

    @property
    def choi_dim(self) -> int:
        return self.total_in * self.total_out

    def label_dims(self) -> dict:
        dims = {f"Y{i + 1}": d for i, d in enumerate(self.y_dims)}
        dims.update({f"X{i + 1}": d for i, d in enumerate(self.x_dims)})
        return dims

    def canonical_labels(self, ys: int = None, xs: int = None) -> list:
        """Labels ``Y1..Y_ys X1..X_xs`` (defaults to all rounds)."""
        ys = self.rounds if ys is None else ys
        xs = self.rounds if xs is None else xs
        return [f"Y{i + 1}" for i in range(ys)] + [f"X{i + 1}" for i in range(xs)]

    def dims_of(self, labels: Sequence[str]) -> list:
        table = self.label_dims()
        return [table[lab] for lab in labels]

    def to_dict(self) -> dict:
        return {"rounds": self.rounds, "x_dims": list(self.x_dims), "y_dims": list(self.y_dims)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "RoundShape":
        shape = cls(tuple(d["x_dims"]), tuple(d["y_dims"]))
        if "rounds" in d and int(d["rounds"]) != shape.rounds:
            raise ValueError("rounds does not match the dimension lists")
        return shape


def _check_order(labels: Sequence[str], dims: Mapping[str, int]) -> list:
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise LabelError(f"duplicate labels in {labels}")
    missing = [lab for lab in labels if lab not in dims]
    if missing:
        raise LabelError(f"no dimension known for labels {missing}")
    return [int(dims[lab]) for lab in labels]


def permute_factors(m: np.ndarray, src: Sequence[str], dst: Sequence[str],
                    dims: Mapping[str, int]) -> np.ndarray:
    """Reorder the tensor factors of a square operator ``m`` from ``src`` to ``dst``."""
    if sorted(src) != sorted(dst):
        raise LabelError(f"label sets differ: {list(src)} vs {list(dst)}")
    sdims = _check_order(src, dims)
    n = prod(sdims)
    m = np.asarray(m)
    if m.shape != (n, n):
        raise DimensionError(f"matrix of shape {m.shape} does not match dims {sdims}")
    perm = [list(src).index(lab) for lab in dst]
    k = len(perm)
    t = m.reshape(sdims + sdims).transpose(perm + [p + k for p in perm])
    return t.reshape(n, n)


def permute_vector(v: np.ndarray, src: Sequence[str], dst: Sequence[str],
                   dims: Mapping[str, int]) -> np.ndarray:
    if sorted(src) != sorted(dst):
        raise LabelError(f"label sets differ: {list(src)} vs {list(dst)}")
    sdims = _check_order(src, dims)
    perm = [list(src).index(lab) for lab in dst]
    return np.asarray(v).reshape(sdims).transpose(perm).reshape(-1)


def embed_identity(m: np.ndarray, dims: Sequence[int], at: int, id_dim: int) -> np.ndarray:
    """Insert an identity factor of dimension ``id_dim`` at factor position ``at``.

    ``at = 0`` prepends, ``at = len(dims)`` appends (equal to ``kron(m, I)``).
    """
    dims = [int(d) for d in dims]
    if not 0 <= at <= len(dims):
        raise DimensionError(f"position {at} invalid for {len(dims)} factors")
    n = prod(dims)
    m = np.asarray(m)
    if m.shape != (n, n):
        raise DimensionError(f"matrix of shape {m.shape} does not match dims {dims}")
    left, right = prod(dims[:at]), prod(dims[at:])
    t = m.reshape(left, right, left, right)
    eye = np.eye(id_dim)
    out = np.einsum("abcd,ef->aebcfd", t, eye)
    N = n * id_dim
    return out.reshape(N, N)
