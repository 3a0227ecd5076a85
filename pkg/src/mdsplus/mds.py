"""Classical MDS and its shrinkage variants.

Every estimator shares the same first two steps: form the similarity matrix
``S = -1/2 H Delta H`` and diagonalize it. They differ only in how the
singular values ``sqrt(d_i)`` are mapped to axis lengths:

* classical / TSVD  keep the top ``r`` unchanged,
* SVHT              keep those above a hard threshold,
* shrinkage         apply a nondecreasing map ``eta``,
* MDS+              apply the optimal shrinker with the bulk edge as cutoff.

Each retained axis is ``value * u_i`` with the sign of ``u_i`` fixed so that
its largest-magnitude entry is positive.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import noise, spike
from .matrix import SpectralDecomposition, check_distance_matrix, sym_eig

__all__ = [
    "Embedding",
    "similarity_from_distances",
    "similarity_spectrum",
    "classical_mds",
    "svht_embed",
    "shrinkage_embed",
    "mds_plus",
    "embed_from_spectrum",
    "mds_plus_from_spectrum",
]

ShrinkerFn = Callable[[float], float]

# relative (per dimension) round-off floor on the eigenvalues of S
RANK_RTOL = 64 * np.finfo(float).eps


@dataclass
class Embedding:
    """An n x r configuration produced by one of the estimators.

    Attributes
    ----------
    coords : (n, r) ndarray
        Column ``i`` has Euclidean norm ``axis_values[i]``.
    axis_values : (r,) ndarray
        Retained (possibly shrunken) singular values, descending.
    method : str
        One of ``classical``, ``tsvd``, ``svht``, ``shrinker``, ``mds_plus``.
    clipped_count : int
        Negative eigenvalues of S set to zero before taking square roots.
    """

    coords: np.ndarray
    axis_values: np.ndarray
    method: str
    clipped_count: int = 0
    requested_r: Optional[int] = None
    sigma_used: Optional[float] = None
    beta: Optional[float] = None
    threshold: Optional[float] = None
    warnings: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def r(self) -> int:
        return self.coords.shape[1]

    def sidecar(self) -> dict:
        """JSON-ready metadata describing this embedding."""
        return {
            "method": self.method,
            "r": self.r,
            "axis_values": [float(v) for v in self.axis_values],
            "clipped_count": int(self.clipped_count),
            "sigma_used": None if self.sigma_used is None else float(self.sigma_used),
            "beta": None if self.beta is None else float(self.beta),
        }


def similarity_from_distances(delta) -> np.ndarray:
    """Double-centered similarity matrix ``-1/2 H Delta H`` (exactly symmetric)."""
    d = check_distance_matrix(delta)
    row = d.mean(axis=1, keepdims=True)
    col = d.mean(axis=0, keepdims=True)
    s = -0.5 * (d - row - col + d.mean())
    return 0.5 * (s + s.T)


def similarity_spectrum(delta) -> SpectralDecomposition:
    """Eigendecomposition of the similarity matrix of `delta`, signs fixed."""
    dec = sym_eig(similarity_from_distances(delta))
    vecs = dec.vectors
    if vecs.size:
        idx = np.argmax(np.abs(vecs), axis=0)
        signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
        signs[signs == 0] = 1.0
        vecs = vecs * signs
    return SpectralDecomposition(values=dec.values, vectors=vecs)


def rank_tolerance(values: np.ndarray) -> float:
    """Eigenvalues of S within this of zero are round-off, not structure."""
    if values.size == 0:
        return 0.0
    return RANK_RTOL * values.size * float(np.max(np.abs(values)))


def _singular_values(dec: SpectralDecomposition) -> tuple[np.ndarray, int]:
    vals = dec.values
    tol = rank_tolerance(vals)
    clipped = int(np.count_nonzero(vals < -tol))
    vals = np.where(vals > tol, vals, 0.0)
    return np.sqrt(vals), clipped


def embed_from_spectrum(dec: SpectralDecomposition, axis_values, keep, method: str,
                        **meta) -> Embedding:
    """Assemble an :class:`Embedding` from kept axis indices and their lengths."""
    _, clipped = _singular_values(dec)
    keep = np.asarray(keep, dtype=int)
    values = np.asarray(axis_values, dtype=float)[keep]
    coords = dec.vectors[:, keep] * values
    return Embedding(coords=coords, axis_values=values, method=method,
                     clipped_count=clipped, **meta)


def _as_spectrum(delta_or_spectrum) -> SpectralDecomposition:
    if isinstance(delta_or_spectrum, SpectralDecomposition):
        return delta_or_spectrum
    return similarity_spectrum(delta_or_spectrum)


def classical_mds(delta, r: int, method: str = "classical") -> Embedding:
    """Classical (Torgerson) MDS into `r` dimensions.

    Only axes with a strictly positive eigenvalue are used, so the result may
    have fewer than `r` columns; ``requested_r`` keeps the original request.
    `delta` may also be a precomputed :class:`SpectralDecomposition`.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    dec = _as_spectrum(delta)
    sv, _ = _singular_values(dec)
    keep = [i for i in range(min(r, sv.size)) if sv[i] > 0]
    emb = embed_from_spectrum(dec, sv, keep, method, requested_r=r)
    if emb.r < r:
        emb.warnings.append(f"only {emb.r} positive eigenvalues; r reduced from {r}")
    return emb


def svht_embed(delta, lam: float) -> Embedding:
    """Keep every axis whose singular value ``sqrt(d_i)`` exceeds `lam`, unshrunk."""
    if not lam > 0:
        raise ValueError("threshold must be positive")
    dec = _as_spectrum(delta)
    sv, _ = _singular_values(dec)
    keep = np.flatnonzero(sv > lam)
    return embed_from_spectrum(dec, sv, keep, "svht", threshold=float(lam))


def shrinkage_embed(delta, eta: ShrinkerFn, method: str = "shrinker", **meta) -> Embedding:
    """Replace each ``sqrt(d_i)`` by ``eta(sqrt(d_i))``; axes mapped to 0 are dropped."""
    dec = _as_spectrum(delta)
    sv, _ = _singular_values(dec)
    shrunk = np.array([float(eta(float(v))) for v in sv])
    if np.any(shrunk < 0):
        raise ValueError("shrinker returned a negative value")
    keep = np.flatnonzero(shrunk > 0)
    return embed_from_spectrum(dec, shrunk, keep, method, **meta)


def mds_plus_from_spectrum(dec: SpectralDecomposition, n: int, p: int,
                           sigma: Union[float, str] = "auto", warn: bool = True) -> Embedding:
    """MDS+ on a precomputed similarity spectrum; see :func:`mds_plus`.

    With ``warn=False`` an empty result is only recorded in ``Embedding.warnings``.
    """
    if p < 1:
        raise ValueError("ambient dimension must be positive")
    beta = (n - 1) / p
    if isinstance(sigma, str):
        if sigma != "auto":
            raise ValueError(f"sigma must be a positive number or 'auto', got {sigma!r}")
        if n < noise.MIN_SAMPLES:
            raise ValueError("too few samples to estimate noise")
        sigma = noise.estimate_sigma(dec.values, n, p)
    sigma = float(sigma)
    params = spike.SpikeParams(beta=beta, sigma=sigma)
    edge = spike.bulk_edge(params)
    emb = shrinkage_embed(dec, lambda y: spike.optimal_shrinker(y, params),
                          method="mds_plus", sigma_used=sigma, beta=beta, threshold=edge)
    if emb.r == 0:
        msg = (f"no singular value exceeds the bulk edge {edge:.6g}; "
               "MDS+ returned an empty embedding")
        emb.warnings.append(msg)
        if warn:
            warnings.warn(msg, RuntimeWarning, stacklevel=3)
    return emb


def mds_plus(delta, p: int, sigma: Union[float, str] = "auto") -> Embedding:
    """MDS+ : classical MDS with optimally shrunken axis lengths.

    Parameters
    ----------
    delta : (n, n) array_like
        Squared Euclidean distances.
    p : int
        Ambient dimension of the measured points; ``beta = (n - 1) / p``.
    sigma : float or "auto"
        Noise level. ``"auto"`` estimates it from the spectrum of S and
        needs at least 8 points.

    Returns
    -------
    Embedding
        Axes with ``sqrt(d_i) > sigma (1 + sqrt(beta))``, each scaled to
        ``eta*(sqrt(d_i))``. If nothing survives, the embedding is empty and a
        :class:`RuntimeWarning` is issued.
    """
    dec = _as_spectrum(delta)
    return mds_plus_from_spectrum(dec, dec.vectors.shape[0], p, sigma)
