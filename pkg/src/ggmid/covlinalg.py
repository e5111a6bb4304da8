"""Dense symmetric linear algebra on 1-based node labels.

Matrices are plain ``numpy`` arrays. Index sets are sorted tuples of labels in
``1..p``; every function here translates them to 0-based positions internally.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np
import scipy.linalg

from .errors import (
    InvalidConditioningSet,
    InvalidIndex,
    NotPositiveDefinite,
    SingularConditioningSet,
)

#: Condition number above which a conditioning block counts as singular.
SINGULARITY_THRESHOLD = 1e12

#: Relative scale of the exact-zero tolerance, multiplied by ``max_i A_ii``.
ZERO_TOLERANCE_SCALE = 1e-8

IndexSet = tuple[int, ...]


def index_set(members: Iterable[int], p: int | None = None) -> IndexSet:
    """Normalize ``members`` into a sorted, duplicate-free tuple of labels.

    If ``p`` is given, every label must lie in ``1..p``.
    """
    out = tuple(sorted({int(m) for m in members}))
    if p is not None and out and (out[0] < 1 or out[-1] > p):
        raise InvalidIndex(f"index set {out} not within 1..{p}")
    return out


def complement(members: Iterable[int], p: int) -> IndexSet:
    """Labels of ``1..p`` not in ``members``."""
    drop = set(members)
    return tuple(i for i in range(1, p + 1) if i not in drop)


def _positions(labels: Iterable[int], dim: int) -> list[int]:
    pos = []
    for i in labels:
        if not 1 <= i <= dim:
            raise InvalidIndex(f"label {i} outside 1..{dim}")
        pos.append(i - 1)
    return pos


def as_sym_matrix(A, *, atol: float = 0.0) -> np.ndarray:
    """Return ``A`` as a float array after checking it is square and symmetric.

    With the default ``atol=0`` symmetry must hold exactly; the result is
    symmetrized either way so downstream code can rely on exact symmetry.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=atol):
        raise ValueError("matrix is not symmetric")
    return (A + A.T) / 2.0


def submatrix(A: np.ndarray, rows: Iterable[int], cols: Iterable[int]) -> np.ndarray:
    """The block ``A[rows, cols]`` for 1-based, sorted ``rows`` and ``cols``."""
    A = np.asarray(A)
    r = _positions(index_set(rows), A.shape[0])
    c = _positions(index_set(cols), A.shape[1])
    return A[np.ix_(r, c)]


def check_conditioning(block: np.ndarray) -> None:
    """Raise :class:`SingularConditioningSet` if ``block`` is numerically singular."""
    if block.size == 0:
        return
    if block.shape == (1, 1):
        if not block[0, 0] > 0.0 or not np.isfinite(block[0, 0]):
            raise SingularConditioningSet("conditioning variance is not positive")
        return
    cond = np.linalg.cond(block)
    if not np.isfinite(cond) or cond > SINGULARITY_THRESHOLD:
        raise SingularConditioningSet(
            f"conditioning block has condition number {cond:.3g}"
        )


def schur_complement(A: np.ndarray, I: Iterable[int]) -> np.ndarray:
    """Schur complement of ``A_I`` in ``A``, indexed by the sorted complement of I.

    ``A_{I^c} - A_{I^c I} A_I^{-1} A_{I I^c}``. An empty ``I`` returns a copy of
    ``A``.
    """
    A = np.asarray(A, dtype=float)
    p = A.shape[0]
    I = index_set(I, p)
    Ic = complement(I, p)
    rest = submatrix(A, Ic, Ic)
    if not I:
        return rest.copy()
    A_I = submatrix(A, I, I)
    check_conditioning(A_I)
    cross = submatrix(A, I, Ic)
    out = rest - cross.T @ np.linalg.solve(A_I, cross)
    return (out + out.T) / 2.0


def _validate_pair(u: int, v: int, S: IndexSet, p: int) -> None:
    if u == v:
        raise InvalidConditioningSet(f"query nodes must differ, got {u} twice")
    for w in (u, v):
        if not 1 <= w <= p:
            raise InvalidIndex(f"label {w} outside 1..{p}")
    if u in S or v in S:
        raise InvalidConditioningSet(f"query nodes ({u}, {v}) overlap S={S}")


def cond_cov(sigma: np.ndarray, u: int, v: int, S: Iterable[int] = ()) -> float:
    """Conditional covariance of ``X_u`` and ``X_v`` given ``X_S``.

    ``sigma_uv - sigma_uS sigma_S^{-1} sigma_Sv``; the correction vanishes for
    empty ``S``.
    """
    sigma = np.asarray(sigma, dtype=float)
    p = sigma.shape[0]
    S = index_set(S, p)
    _validate_pair(u, v, S, p)
    value = sigma[u - 1, v - 1]
    if not S:
        return float(value)
    s = [i - 1 for i in S]
    block = sigma[np.ix_(s, s)]
    check_conditioning(block)
    coef = np.linalg.solve(block, sigma[s, v - 1])
    return float(value - sigma[u - 1, s] @ coef)


def invert_pd(A: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky.

    Raises
    ------
    NotPositiveDefinite
        If the Cholesky factorization breaks down.
    """
    A = np.asarray(A, dtype=float)
    try:
        factor = scipy.linalg.cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    inv = scipy.linalg.cho_solve(factor, np.eye(A.shape[0]))
    return (inv + inv.T) / 2.0


def default_zero_tolerance(sigma: np.ndarray) -> float:
    """``1e-8 * max_i sigma_ii``: the exact oracle's default zero threshold."""
    return ZERO_TOLERANCE_SCALE * float(np.max(np.diag(sigma)))


def spectral_extremes(sigma: np.ndarray) -> tuple[float, float]:
    """``(lambda_max, lambda_min)`` of a symmetric matrix."""
    eig = np.linalg.eigvalsh(np.asarray(sigma, dtype=float))
    return float(eig[-1]), float(eig[0])
