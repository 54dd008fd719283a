import numpy as np
import pytest

from strategem.registers import (LabelError, RoundShape, embed_identity, permute_factors,
                                 permute_vector)

from conftest import rand_complex


def relabel_oracle(m, src, dst, dims):
    # explicit index-relabel permutation matrix
    sd = [dims[l] for l in src]
    dd = [dims[l] for l in dst]
    n = int(np.prod(sd))
    p = np.zeros((n, n))
    for idx in np.ndindex(*sd):
        lab = dict(zip(src, idx))
        p[np.ravel_multi_index([lab[l] for l in dst], dd), np.ravel_multi_index(idx, sd)] = 1
    return p @ m @ p.T


def test_round_shape_basics():
    s = RoundShape((2, 3), (4, 1))
    assert s.rounds == 2 and s.total_in == 6 and s.total_out == 4 and s.choi_dim == 24
    assert s.canonical_labels() == ["Y1", "Y2", "X1", "X2"]
    assert s.canonical_labels(1, 2) == ["Y1", "X1", "X2"]
    assert RoundShape.from_dict(s.to_dict()) == s
    with pytest.raises(ValueError):
        RoundShape((2,), (2, 2))
    with pytest.raises(ValueError):
        RoundShape((0,), (2,))


def test_permute_matches_relabel_oracle(rng):
    dims = {"A": 2, "B": 3, "C": 2}
    m = rand_complex(rng, 12, 12)
    for dst in (["B", "A", "C"], ["C", "B", "A"], ["A", "C", "B"]):
        out = permute_factors(m, ["A", "B", "C"], dst, dims)
        assert np.abs(out - relabel_oracle(m, ["A", "B", "C"], dst, dims)).max() < 1e-12


def test_permute_inverse_is_identity(rng):
    dims = {"Y1": 2, "Y2": 3, "X1": 2, "X2": 1}
    src, dst = ["Y1", "Y2", "X1", "X2"], ["X2", "Y1", "X1", "Y2"]
    m = rand_complex(rng, 12, 12)
    back = permute_factors(permute_factors(m, src, dst, dims), dst, src, dims)
    assert np.abs(back - m).max() < 1e-12


def test_permute_kron_swap(rng):
    a, b = rand_complex(rng, 2, 2), rand_complex(rng, 3, 3)
    out = permute_factors(np.kron(a, b), ["A", "B"], ["B", "A"], {"A": 2, "B": 3})
    assert np.abs(out - np.kron(b, a)).max() < 1e-12
    v, w = rand_complex(rng, 2), rand_complex(rng, 3)
    pv = permute_vector(np.kron(v, w), ["A", "B"], ["B", "A"], {"A": 2, "B": 3})
    assert np.abs(pv - np.kron(w, v)).max() < 1e-12


def test_permute_label_errors(rng):
    m = np.eye(4)
    with pytest.raises(LabelError):
        permute_factors(m, ["A", "B"], ["A", "C"], {"A": 2, "B": 2, "C": 2})
    with pytest.raises(LabelError):
        permute_factors(m, ["A", "A"], ["A", "A"], {"A": 2})
    with pytest.raises(LabelError):
        permute_factors(m, ["A", "B"], ["B", "A"], {"A": 2})


def test_embed_identity(rng):
    a, b = rand_complex(rng, 2, 2), rand_complex(rng, 3, 3)
    m = np.kron(a, b)
    assert np.abs(embed_identity(m, [2, 3], 2, 2) - np.kron(m, np.eye(2))).max() < 1e-12
    assert np.abs(embed_identity(m, [2, 3], 0, 2) - np.kron(np.eye(2), m)).max() < 1e-12
    assert np.abs(embed_identity(m, [2, 3], 1, 4) - np.kron(np.kron(a, np.eye(4)), b)).max() < 1e-12
