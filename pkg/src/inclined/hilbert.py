"""Complex inner-product arithmetic, rank-one projections and random bases.

Convention used everywhere in this package: the inner product is linear in
the FIRST argument and conjugate-linear in the second,

    inner(x, y) = sum_k x_k * conj(y_k).

All vectors are 1-D complex128 numpy arrays. Values are treated as immutable
after construction, so everything here is pure and safe to share across
threads.
"""

from __future__ import annotations

import numpy as np

# Dense operators exist only as test oracles; above this size they are refused.
DENSE_ORACLE_CAP = 4096


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 1-D complex128 array, optionally checking its length."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a nonempty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    if dim is not None and v.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.size}")
    return v


def inner(x, y) -> complex:
    """Inner product, linear in the first slot: sum_k x_k * conj(y_k)."""
    xv = as_vector(x)
    yv = as_vector(y, dim=xv.size)
    # np.vdot conjugates its first argument, so the slots are swapped here.
    return complex(np.vdot(yv, xv))


def norm(x) -> float:
    return float(np.linalg.norm(as_vector(x)))


def rank_one_apply(v, x) -> np.ndarray:
    """Apply the orthogonal projection onto the line spanned by ``v``.

    Returns (inner(x, v) / inner(v, v)) * v.  Idempotent and self-adjoint.
    """
    vv = as_vector(v)
    xv = as_vector(x, dim=vv.size)
    vnorm2 = np.vdot(vv, vv).real
    if vnorm2 == 0.0:
        raise ValueError("cannot project onto the zero vector")
    coeff = np.vdot(vv, xv) / vnorm2  # inner(x, v) / inner(v, v)
    return coeff * vv


def dense_rank_one(v) -> np.ndarray:
    """Dense matrix v v* / ||v||^2 of rank_one_apply; oracle use only."""
    vv = as_vector(v)
    vnorm2 = np.vdot(vv, vv).real
    if vnorm2 == 0.0:
        raise ValueError("cannot project onto the zero vector")
    return np.outer(vv, vv.conj()) / vnorm2


def normalized(v) -> np.ndarray:
    vv = as_vector(v)
    n = np.linalg.norm(vv)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return vv / n


def random_unit_vector(dim: int, seed: int) -> np.ndarray:
    """Uniformly random unit vector (normalized complex Gaussian).

    Deterministic given ``seed``; the distribution is invariant under any
    unitary change of basis.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_orthonormal_basis(n: int, seed: int) -> list[np.ndarray]:
    """Haar-random orthonormal basis of C^n as a list of n vectors.

    QR factorization of a complex Gaussian matrix with the R-diagonal phases
    absorbed into Q, which makes the distribution unitarily invariant.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = np.where(diag == 0, 1.0, diag / np.abs(diag))
    q = q * phases.conj()
    return [np.ascontiguousarray(q[:, j]) for j in range(n)]
