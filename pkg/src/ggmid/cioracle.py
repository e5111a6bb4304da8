"""Conditional-independence oracles.

Every oracle answers ``query(u, v, S)``: is ``X_u`` independent of ``X_v`` given
``X_S``? The exact oracle reads conditional covariances off the true
covariance matrix; the empirical oracle thresholds sample conditional
covariances computed from a scatter matrix. ``cached`` wraps either one in a
thread-safe memo.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from .covlinalg import (
    IndexSet,
    _validate_pair,
    check_conditioning,
    cond_cov,
    default_zero_tolerance,
    index_set,
)
from .errors import InsufficientSamples

Threshold = Union[float, Callable[[int], float]]


@dataclass(frozen=True)
class CiDecision:
    independent: bool
    statistic: float
    threshold_used: float


@dataclass(frozen=True)
class ScatterData:
    """Scatter matrix ``sum_i x_i x_i^T`` of ``n`` zero-mean samples."""

    s_mat: np.ndarray
    n: int

    def __post_init__(self):
        s = np.asarray(self.s_mat, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError(f"scatter matrix must be square, got {s.shape}")
        if int(self.n) < 1:
            raise ValueError("sample count must be at least 1")
        s = (s + s.T) / 2.0
        s.setflags(write=False)
        object.__setattr__(self, "s_mat", s)
        object.__setattr__(self, "n", int(self.n))

    @property
    def p(self) -> int:
        return self.s_mat.shape[0]

    @classmethod
    def from_samples(cls, x, center: bool = False) -> "ScatterData":
        """Build from an ``(n, p)`` sample array; ``center`` subtracts column means."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 2:
            raise ValueError("samples must be a 2-d array of shape (n, p)")
        if center:
            x = x - x.mean(axis=0)
        return cls(x.T @ x, x.shape[0])

    def sample_covariance(self) -> np.ndarray:
        return self.s_mat / self.n


def sample_cond_cov(data: ScatterData, u: int, v: int, S: Iterable[int] = ()) -> float:
    """Sample conditional covariance ``(S_uv - S_uS S_S^{-1} S_Sv) / (n - |S|)``."""
    s_mat = data.s_mat
    S = index_set(S, data.p)
    _validate_pair(u, v, S, data.p)
    if len(S) >= data.n:
        raise InsufficientSamples(f"|S| = {len(S)} needs more than n = {data.n} samples")
    value = s_mat[u - 1, v - 1]
    if S:
        s = [i - 1 for i in S]
        block = s_mat[np.ix_(s, s)]
        check_conditioning(block)
        value = value - s_mat[u - 1, s] @ np.linalg.solve(block, s_mat[s, v - 1])
    return float(value) / (data.n - len(S))


def default_alpha(p: int, n: int, s: int, delta: float = 0.05, C: float = 1.0) -> float:
    """Data-only threshold ``C * sqrt(((s + 2) log p + log(1/delta)) / n)``.

    A heuristic for when the dependence margin is unknown; its constant is not
    calibrated against any guarantee.
    """
    if n <= 0 or p < 2 or s < 0 or not 0 < delta < 1 or C <= 0:
        raise ValueError("default_alpha needs n > 0, p >= 2, s >= 0, 0 < delta < 1, C > 0")
    return C * math.sqrt(((s + 2) * math.log(p) + math.log(1.0 / delta)) / n)


class CiOracle:
    """Base class: validation, key normalization and query counting.

    Subclasses implement :meth:`statistic` and :meth:`threshold`. Queries are
    evaluated with ``u < v`` so ``query(u, v, S)`` and ``query(v, u, S)`` are
    bit-identical.
    """

    kind = "abstract"

    def __init__(self, p: int, max_conditioning_size: int | None = None):
        self.p = p
        self.max_conditioning_size = max_conditioning_size
        self._count = 0
        self._count_lock = threading.Lock()

    @property
    def query_count(self) -> int:
        return self._count

    def statistic(self, u: int, v: int, S: IndexSet) -> float:
        raise NotImplementedError

    def threshold(self, size: int) -> float:
        raise NotImplementedError

    def query(self, u: int, v: int, S: Iterable[int] = ()) -> CiDecision:
        S = index_set(S, self.p)
        _validate_pair(u, v, S, self.p)
        if u > v:
            u, v = v, u
        with self._count_lock:
            self._count += 1
        stat = self.statistic(u, v, S)
        thr = self.threshold(len(S))
        return CiDecision(abs(stat) < thr, stat, thr)

    def independent(self, u: int, v: int, S: Iterable[int] = ()) -> bool:
        return self.query(u, v, S).independent

    def describe(self) -> dict:
        return {"kind": self.kind, "p": self.p}


class ExactOracle(CiOracle):
    """Decides independence from the true covariance matrix."""

    kind = "exact"

    def __init__(self, sigma, epsilon_zero: float | None = None):
        sigma = np.array(sigma, dtype=float)
        super().__init__(sigma.shape[0])
        sigma.setflags(write=False)
        self.sigma = sigma
        self.epsilon_zero = default_zero_tolerance(sigma) if epsilon_zero is None else float(epsilon_zero)
        if not self.epsilon_zero > 0:
            raise ValueError("epsilon_zero must be positive")

    def statistic(self, u, v, S):
        return cond_cov(self.sigma, u, v, S)

    def threshold(self, size):
        return self.epsilon_zero

    def describe(self):
        return {"kind": self.kind, "p": self.p, "epsilon_zero": self.epsilon_zero}


class EmpiricalOracle(CiOracle):
    """Thresholds sample conditional covariances.

    ``alpha`` is either a constant or a function of the conditioning-set size.
    """

    kind = "sample"

    def __init__(self, data: ScatterData, alpha: Threshold, *, alpha_rule: str = "explicit"):
        super().__init__(data.p, max_conditioning_size=data.n - 1)
        self.data = data
        if not callable(alpha) and not alpha > 0:
            raise ValueError("alpha must be positive")
        self.alpha = alpha
        self.alpha_rule = alpha_rule

    def statistic(self, u, v, S):
        return sample_cond_cov(self.data, u, v, S)

    def threshold(self, size):
        return float(self.alpha(size)) if callable(self.alpha) else float(self.alpha)

    def describe(self):
        out = {"kind": self.kind, "p": self.p, "n": self.data.n, "alpha_rule": self.alpha_rule}
        if not callable(self.alpha):
            out["alpha"] = float(self.alpha)
        return out


class CachedOracle(CiOracle):
    """Memoizes decisions of ``inner`` keyed on ``(min(u,v), max(u,v), S)``.

    The memo is guarded by a lock, so concurrent queries are safe; a key may be
    evaluated twice under a race but both evaluations agree.
    """

    def __init__(self, inner: CiOracle):
        super().__init__(inner.p, inner.max_conditioning_size)
        self.inner = inner
        self.kind = inner.kind
        self._memo: dict[tuple[int, int, IndexSet], CiDecision] = {}
        self._memo_lock = threading.Lock()
        self.hits = 0

    def query(self, u, v, S=()):
        S = index_set(S, self.p)
        key = (min(u, v), max(u, v), S)
        with self._count_lock:
            self._count += 1
        with self._memo_lock:
            hit = self._memo.get(key)
            if hit is not None:
                self.hits += 1
                return hit
        decision = self.inner.query(u, v, S)
        with self._memo_lock:
            return self._memo.setdefault(key, decision)

    def threshold(self, size):
        return self.inner.threshold(size)

    def describe(self):
        out = self.inner.describe()
        out["cached"] = True
        return out


def exact_oracle(sigma, epsilon_zero: float | None = None) -> ExactOracle:
    return ExactOracle(sigma, epsilon_zero)


def empirical_oracle(data: ScatterData, alpha: Threshold, **kwargs) -> EmpiricalOracle:
    return EmpiricalOracle(data, alpha, **kwargs)


def cached(oracle: CiOracle) -> CachedOracle:
    return CachedOracle(oracle)


def default_alpha_schedule(p: int, n: int, delta: float = 0.05, C: float = 1.0) -> Callable[[int], float]:
    """Size-dependent threshold built from :func:`default_alpha`."""
    return lambda size: default_alpha(p, n, size, delta, C)
