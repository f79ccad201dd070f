"""On-disk formats: ASCII edge lists, +-1 label files, raw Z2 matrices.

Edge list: first line "n m", then m lines "u v" with 0-indexed u < v.
Label file: n lines, each "+1" or "-1".
Z2 matrix: 8-byte little-endian integer n, then n*n row-major float64 (LE).
"""

from __future__ import annotations

import struct

import numpy as np

from .model import Graph


def write_edgelist(graph: Graph, path):
    with open(path, "w") as fh:
        fh.write(f"{graph.n} {graph.m}\n")
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def read_edgelist(path) -> Graph:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected 'n m' header, got {header!r}")
        n, m = int(header[0]), int(header[1])
        edges = np.loadtxt(fh, dtype=np.int64, ndmin=2) if m else np.empty((0, 2), np.int64)
    if edges.shape[0] != m:
        raise ValueError(f"{path}: header promises {m} edges, found {edges.shape[0]}")
    if edges.size and np.any(edges[:, 0] >= edges[:, 1]):
        raise ValueError(f"{path}: edges must satisfy u < v")
    return Graph.from_edges(n, edges)


def write_labels(labels, path):
    with open(path, "w") as fh:
        for x in labels:
            fh.write("+1\n" if x > 0 else "-1\n")


def read_labels(path) -> np.ndarray:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line not in ("+1", "-1", "1"):
                raise ValueError(f"{path}: bad label line {line!r}")
            out.append(1 if line in ("+1", "1") else -1)
    return np.asarray(out, dtype=np.int64)


def write_z2_matrix(matrix, path):
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<q", a.shape[0]))
        fh.write(a.astype("<f8").tobytes(order="C"))


def read_z2_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read(8)
        if len(raw) != 8:
            raise ValueError(f"{path}: truncated header")
        (n,) = struct.unpack("<q", raw)
        body = fh.read()
    expect = 8 * n * n
    if len(body) != expect:
        raise ValueError(f"{path}: expected {expect} payload bytes, got {len(body)}")
    return np.frombuffer(body, dtype="<f8").reshape(n, n).astype(np.float64)
