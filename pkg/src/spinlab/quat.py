"""Quaternion arithmetic on (..., 4) arrays ordered (1, i, j, k)."""

from __future__ import annotations

import numpy as np

ONE = np.array([1, 0, 0, 0])
I = np.array([0, 1, 0, 0])
J = np.array([0, 0, 1, 0])
K = np.array([0, 0, 0, 1])
UNITS = {"1": ONE, "i": I, "j": J, "k": K}


def qmul(p, q):
    p, q = np.asarray(p), np.asarray(q)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qconj(q):
    q = np.asarray(q)
    return q * np.array([1, -1, -1, -1])


def qnorm(q):
    return np.linalg.norm(np.asarray(q, dtype=float), axis=-1)


def right_mult_matrix(q, n: int = 1) -> np.ndarray:
    """Real (4n x 4n) matrix of x ↦ x·q on ℍⁿ with coordinates (e_l, e_l i, e_l j, e_l k)."""
    q = np.asarray(q)
    block = np.stack([qmul(u, q) for u in (ONE, I, J, K)], axis=1)
    return np.kron(np.eye(n, dtype=block.dtype), block)


def left_mult_matrix(q) -> np.ndarray:
    q = np.asarray(q)
    return np.stack([qmul(q, u) for u in (ONE, I, J, K)], axis=1)


def random_unit(rng: np.random.Generator, size=None) -> np.ndarray:
    shape = (4,) if size is None else (*np.atleast_1d(size), 4)
    q = rng.standard_normal(shape)
    return q / qnorm(q)[..., None]


def quaternionic_gram_schmidt(vectors: np.ndarray) -> np.ndarray:
    """Orthonormalize rows of an (n, n, 4) array in ℍⁿ as a right ℍ-module.

    Inner product ⟨u, v⟩ = Σ ū_l v_l; projection v − u⟨u, v⟩.
    """
    basis = []
    for v in np.asarray(vectors, dtype=float):
        w = v.copy()
        for u in basis:
            coeff = qmul(qconj(u), w).sum(axis=0)
            w = w - qmul(u, coeff)
        basis.append(w / np.sqrt((w**2).sum()))
    return np.array(basis)


def random_sp_basis(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random orthonormal quaternionic basis of ℍⁿ, shape (n, n, 4)."""
    if n == 1:
        return random_unit(rng)[None, None, :]
    return quaternionic_gram_schmidt(rng.standard_normal((n, n, 4)))


def rotation_matrix(q) -> np.ndarray:
    """SO(3) image of a unit quaternion: v ↦ q v q̄ on Im ℍ with basis (i, j, k)."""
    q = np.asarray(q, dtype=float)
    cols = [qmul(qmul(q, u), qconj(q))[1:] for u in (I, J, K)]
    return np.stack(cols, axis=1)
