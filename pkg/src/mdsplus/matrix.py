"""Dense matrix helpers: distances, centering, decompositions and CSV I/O.

Everything here is a thin, validated layer over numpy/LAPACK. Matrices are
plain 2-D ``float64`` arrays; the small dataclasses only bundle results.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MatrixError",
    "SpectralDecomposition",
    "as_matrix",
    "check_distance_matrix",
    "pairwise_sq_distances",
    "center_rows",
    "sym_eig",
    "svd",
    "read_csv_matrix",
    "write_csv_matrix",
]

SYMMETRY_RTOL = 1e-10


class MatrixError(ValueError):
    """Raised when a matrix violates a structural precondition."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs of a symmetric matrix, values in descending order.

    ``vectors[:, i]`` is the unit eigenvector belonging to ``values[i]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    def __len__(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return `m` as a finite 2-D float array or raise :class:`MatrixError`."""
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise MatrixError(f"{name} must be 2-D, got {a.ndim} dimensions")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise MatrixError(f"{name} must have at least one row and column")
    if not np.all(np.isfinite(a)):
        raise MatrixError(f"{name} contains non-finite entries")
    return a


def check_distance_matrix(delta, atol: float = 1e-9) -> np.ndarray:
    """Validate a squared-distance matrix and return it as an array.

    Symmetry and the zero diagonal are checked relative to the largest
    entry; tiny negative round-off is tolerated but larger negative
    entries are rejected.
    """
    d = as_matrix(delta, "distance matrix")
    n, m = d.shape
    if n != m:
        raise MatrixError(f"distance matrix must be square, got {n}x{m}")
    scale = max(float(np.max(np.abs(d))), 1.0)
    if np.max(np.abs(d - d.T)) > atol * scale:
        raise MatrixError("distance matrix is not symmetric")
    if np.max(np.abs(np.diag(d))) > atol * scale:
        raise MatrixError("distance matrix has a nonzero diagonal")
    if np.min(d) < -atol * scale:
        raise MatrixError("distance matrix has negative entries")
    return d


def pairwise_sq_distances(points) -> np.ndarray:
    """Squared Euclidean distances between the rows of `points`.

    Parameters
    ----------
    points : (n, p) array_like

    Returns
    -------
    delta : (n, n) ndarray
        ``delta[i, j] = ||points[i] - points[j]||^2``, exactly symmetric with
        a zero diagonal.
    """
    y = as_matrix(points, "points")
    # Centering first keeps the Gram-based expansion well conditioned.
    y = y - y.mean(axis=0)
    sq = np.einsum("ij,ij->i", y, y)
    delta = sq[:, None] + sq[None, :] - 2.0 * (y @ y.T)
    delta = 0.5 * (delta + delta.T)
    np.fill_diagonal(delta, 0.0)
    np.maximum(delta, 0.0, out=delta)
    return delta


def center_rows(m) -> np.ndarray:
    """Apply the centering projector ``H = I - 11^T/n`` from the left.

    Each column of the result has zero mean.
    """
    a = as_matrix(m)
    return a - a.mean(axis=0, keepdims=True)


def _descending(values: np.ndarray) -> np.ndarray:
    # stable sort keeps ties in ascending index order
    return np.argsort(-values, kind="stable")


def sym_eig(s) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix, largest eigenvalue first.

    Raises
    ------
    MatrixError
        If `s` is not square or not symmetric to 1e-10 relative.
    """
    a = as_matrix(s)
    if a.shape[0] != a.shape[1]:
        raise MatrixError(f"expected a square matrix, got {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if np.max(np.abs(a - a.T)) > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise MatrixError("matrix is not symmetric")
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    order = _descending(w)
    return SpectralDecomposition(values=w[order], vectors=v[:, order])


def svd(m):
    """Thin SVD ``m = U diag(s) V^T`` with `s` descending.

    Returns
    -------
    u : (rows, k) ndarray
    s : (k,) ndarray
    vt : (k, cols) ndarray
        with ``k = min(rows, cols)``.
    """
    a = as_matrix(m)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return u, s, vt


def read_csv_matrix(source) -> np.ndarray:
    """Read a comma separated matrix, skipping one leading '#' header line.

    `source` is a path or an open text stream.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines and lines[0].lstrip().startswith("#"):
        lines = lines[1:]
    if not lines:
        raise MatrixError("CSV input holds no rows")
    rows = []
    for k, line in enumerate(lines):
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise MatrixError(f"CSV row {k + 1}: {exc}") from None
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise MatrixError("CSV rows have unequal lengths")
    return as_matrix(np.array(rows), "CSV matrix")


def _format_row(row) -> str:
    return ",".join(format(float(v), ".17g") for v in row)


def write_csv_matrix(target, m, header: str | None = None) -> None:
    """Write `m` as CSV with 17 significant digits.

    A matrix with zero columns is written as `n` empty lines so the row count
    survives a round trip through this file.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    buf = io.StringIO()
    if header is not None:
        buf.write("# " + header.lstrip("# ") + "\n")
    for row in a:
        buf.write(_format_row(row) + "\n")
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        target.write(buf.getvalue())
