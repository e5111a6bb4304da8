"""Fixtures shared by several test modules."""

from __future__ import annotations

import numpy as np

from ggmid.graphcore import Graph

ACCEPTANCE_LINES: list[str] = []


def record(number: int, title: str, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {title} -- {detail}")


CHAIN_OMEGA = np.array([[1.0, 0.4, 0.0], [0.4, 1.0, 0.4], [0.0, 0.4, 1.0]])
UNFAITHFUL_OMEGA = np.array([[1.0, 0.3, 0.09], [0.3, 1.0, 0.3], [0.09, 0.3, 1.0]])


def chain_sigma() -> np.ndarray:
    return np.linalg.inv(CHAIN_OMEGA)


def adjugate_inverse_3x3(m: np.ndarray) -> np.ndarray:
    """Inverse by explicit cofactors; independent of any factorization."""
    a = m
    cof = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != i]
            cols = [c for c in range(3) if c != j]
            minor = a[rows[0], cols[0]] * a[rows[1], cols[1]] - a[rows[0], cols[1]] * a[rows[1], cols[0]]
            cof[i, j] = (-1) ** (i + j) * minor
    det = sum(a[0, j] * cof[0, j] for j in range(3))
    return cof.T / det


def unfaithful_sigma() -> np.ndarray:
    return adjugate_inverse_3x3(UNFAITHFUL_OMEGA)


def path_graph(p: int) -> Graph:
    return Graph(p, frozenset((i, i + 1) for i in range(1, p)))


def star_graph(p: int, center: int = 1) -> Graph:
    return Graph(p, frozenset((center, i) for i in range(1, p + 1) if i != center))


def cycle_graph(p: int) -> Graph:
    return Graph(p, frozenset({(i, i + 1) for i in range(1, p)} | {(1, p)}))


def complete_graph(p: int) -> Graph:
    return Graph(p, frozenset((i, j) for i in range(1, p + 1) for j in range(i + 1, p + 1)))


def example1_graph(p: int = 6) -> Graph:
    edges = {(1, 2)} | {(1, u) for u in range(3, p + 1)} | {(2, u) for u in range(3, p + 1)}
    return Graph(p, frozenset(edges))


def example2_graph() -> Graph:
    edges = {(1, 2), (2, 3), (3, 4), (4, 5)} | {(i, h) for h in (6, 7) for i in range(1, 6)}
    return Graph(7, frozenset(edges))


def random_pd(rng: np.random.Generator, p: int) -> np.ndarray:
    a = rng.standard_normal((p, p))
    return a @ a.T + 0.5 * np.eye(p)
