"""Rotation-invariant distance between point configurations and the embedding loss."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import MatrixError, as_matrix

__all__ = ["AlignedPair", "similarity_distance", "embedding_loss"]


@dataclass(frozen=True)
class AlignedPair:
    """Result of aligning `b` onto `a` by an orthogonal map.

    ``distance = ||H A_pad - H B_pad @ rotation||_F``, minimal over O(l).
    """

    distance: float
    rotation: np.ndarray
    l: int


def _centered_padded(m: np.ndarray, width: int) -> np.ndarray:
    c = m - m.mean(axis=0, keepdims=True)
    if c.shape[1] < width:
        c = np.hstack([c, np.zeros((c.shape[0], width - c.shape[1]))])
    return c


def similarity_distance(a, b) -> AlignedPair:
    """Procrustes distance between configurations `a` (n x d) and `b` (n x r).

    Both inputs are row-centered and zero-padded to ``l = max(d, r)`` columns;
    the minimizing orthogonal matrix (rotations and reflections) is the polar
    factor of ``B^T A``.

    Raises
    ------
    MatrixError
        On a row-count mismatch or when ``n <= max(d, r)``.
    """
    a = _as_config(a, "a")
    b = _as_config(b, "b")
    n = a.shape[0]
    if b.shape[0] != n:
        raise MatrixError(f"row counts differ: {n} vs {b.shape[0]}")
    l = max(a.shape[1], b.shape[1])
    if n <= l:
        raise MatrixError(f"need more points than dimensions (n={n}, l={l})")
    if l == 0:
        return AlignedPair(distance=0.0, rotation=np.zeros((0, 0)), l=0)
    ha = _centered_padded(a, l)
    hb = _centered_padded(b, l)
    u, _, vt = np.linalg.svd(hb.T @ ha)
    rot = u @ vt
    dist = float(np.linalg.norm(ha - hb @ rot))
    return AlignedPair(distance=dist, rotation=rot, l=l)


def _as_config(m, name: str) -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    # zero-width embeddings (nothing retained) are legitimate here
    if arr.ndim == 2 and arr.shape[1] == 0:
        if arr.shape[0] < 1:
            raise MatrixError(f"{name} has no rows")
        return arr
    return as_matrix(arr, name)


def embedding_loss(xhat, x) -> float:
    """Squared similarity distance between an embedding and the true configuration."""
    return similarity_distance(xhat, x).distance ** 2
