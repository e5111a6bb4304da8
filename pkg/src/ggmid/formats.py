"""Plain-text file formats.

Matrix file::

    # comment lines start with '#'
    p
    a11 a12 ... a1p
    ...
    ap1 ap2 ... app

Samples file: first line ``n p``, then ``n`` rows of ``p`` reals.
Edge list: one ``u v`` pair per line, 1-based, ``u < v``.

A model bundle is a directory holding ``edges.txt``, ``covariance.txt``,
``precision.txt`` and ``meta.json``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import GgmIdError
from .graphcore import Graph


class FormatError(GgmIdError, ValueError):
    pass


def _data_lines(path: Path) -> Iterator[tuple[int, list[str]]]:
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            yield lineno, stripped.split()


def _floats(path, lineno, tokens, expected):
    if len(tokens) != expected:
        raise FormatError(f"{path}: line {lineno}: expected {expected} values, got {len(tokens)}")
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise FormatError(f"{path}: line {lineno}: non-numeric value") from None


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    lines = _data_lines(path)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError(f"{path}: empty matrix file") from None
    if len(head) != 1 or not head[0].isdigit() or int(head[0]) < 1:
        raise FormatError(f"{path}: line {lineno}: expected the dimension p on its own")
    p = int(head[0])
    rows = []
    last = lineno
    for lineno, tokens in lines:
        if len(rows) == p:
            raise FormatError(f"{path}: line {lineno}: extra data after {p} matrix rows")
        rows.append(_floats(path, lineno, tokens, p))
        last = lineno
    if len(rows) < p:
        raise FormatError(
            f"{path}: line {last + 1}: expected matrix row {len(rows) + 1} of {p}, found end of file"
        )
    return np.array(rows)


def write_matrix(path, A) -> None:
    A = np.asarray(A, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{A.shape[0]}\n")
        for row in A:
            fh.write(" ".join(_fmt(x) for x in row) + "\n")


def read_samples(path) -> np.ndarray:
    path = Path(path)
    lines = _data_lines(path)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError(f"{path}: empty samples file") from None
    if len(head) != 2 or not all(t.isdigit() for t in head):
        raise FormatError(f"{path}: line {lineno}: expected header 'n p'")
    n, p = int(head[0]), int(head[1])
    rows = []
    last = lineno
    for lineno, tokens in lines:
        if len(rows) == n:
            raise FormatError(f"{path}: line {lineno}: extra data after {n} samples")
        rows.append(_floats(path, lineno, tokens, p))
        last = lineno
    if len(rows) < n:
        raise FormatError(f"{path}: line {last + 1}: expected sample {len(rows) + 1} of {n}, found end of file")
    return np.array(rows).reshape(n, p)


def write_samples(path, x) -> None:
    x = np.asarray(x, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{x.shape[0]} {x.shape[1]}\n")
        for row in x:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_edges(path, p: int) -> Graph:
    edges = []
    for lineno, tokens in _data_lines(Path(path)):
        if len(tokens) != 2 or not all(t.isdigit() for t in tokens):
            raise FormatError(f"{path}: line {lineno}: expected 'u v'")
        edges.append((int(tokens[0]), int(tokens[1])))
    try:
        return Graph.from_edges(p, edges)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_edges(path, graph: Graph) -> None:
    with open(path, "w") as fh:
        for u, v in graph.sorted_edges():
            fh.write(f"{u} {v}\n")


def write_bundle(directory, model) -> Path:
    """Write a :class:`~ggmid.synthmodel.GroundTruthModel` as a bundle directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_edges(directory / "edges.txt", model.graph)
    write_matrix(directory / "covariance.txt", model.sigma)
    write_matrix(directory / "precision.txt", model.omega)
    with open(directory / "meta.json", "w") as fh:
        json.dump(model.metadata(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return directory


def read_bundle(directory) -> dict:
    directory = Path(directory)
    sigma = read_matrix(directory / "covariance.txt")
    out = {"sigma": sigma, "graph": read_edges(directory / "edges.txt", sigma.shape[0])}
    if (directory / "precision.txt").exists():
        out["omega"] = read_matrix(directory / "precision.txt")
    if (directory / "meta.json").exists():
        out["meta"] = json.loads((directory / "meta.json").read_text())
    return out


def resolve_covariance(path) -> np.ndarray:
    """Covariance from a matrix file or from a bundle directory."""
    path = Path(path)
    return read_matrix(path / "covariance.txt" if path.is_dir() else path)
