"""Closed-form asymptotics of MDS under the spiked white-noise model.

Signal singular values ``x`` of the centered configuration map to observed
singular values ``y(x)`` of ``H @ Y`` and to cosines ``c(x)`` between the
signal and observed left singular vectors. Everything else here (the optimal
hard threshold, the optimal shrinker, asymptotic losses and regret) is built
from those two maps.

Noise convention: entries of the noise matrix have variance ``sigma**2 / p``
and ``beta = (n - 1) / p``. All formulas accept ``beta > 1`` unchanged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "SpikeParams",
    "DomainError",
    "bulk_edge",
    "breakdown_point",
    "y_of_x",
    "c_of_x",
    "x_of_y",
    "optimal_shrinker",
    "threshold_cubic",
    "threshold_cubic_root",
    "optimal_hard_threshold",
    "optimal_embedding_dim",
    "detectable_count",
    "mds_asymptotic_loss",
    "mdsplus_asymptotic_loss",
    "regret",
]


class DomainError(ValueError):
    """An argument lies outside the domain of a closed-form map."""


@dataclass(frozen=True)
class SpikeParams:
    """Aspect ratio ``beta = (n-1)/p`` and noise level ``sigma``."""

    beta: float
    sigma: float = 1.0

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError(f"beta must be positive and finite, got {self.beta}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma}")

    @classmethod
    def from_shape(cls, n: int, p: int, sigma: float = 1.0) -> "SpikeParams":
        return cls(beta=(n - 1) / p, sigma=sigma)


def _check_spectrum(x: Sequence[float]) -> np.ndarray:
    xs = np.asarray(x, dtype=float).ravel()
    if np.any(~np.isfinite(xs)) or np.any(xs <= 0):
        raise DomainError("signal singular values must be positive and finite")
    if np.any(np.diff(xs) >= 0):
        raise DomainError("signal singular values must be strictly descending")
    return xs


def bulk_edge(params: SpikeParams) -> float:
    """Upper edge ``sigma * (1 + sqrt(beta))`` of the noise singular values."""
    return params.sigma * (1.0 + math.sqrt(params.beta))


def breakdown_point(params: SpikeParams) -> float:
    """Signal level ``sigma * beta**(1/4)`` below which a spike is invisible."""
    return params.sigma * params.beta ** 0.25


def y_of_x(x: float, params: SpikeParams) -> float:
    """Limiting observed singular value for a signal singular value `x`.

    Raises :class:`DomainError` when ``x <= sigma * beta**(1/4)``.
    """
    if x <= breakdown_point(params):
        raise DomainError(f"x={x} is at or below the breakdown point")
    u = x / params.sigma
    b = params.beta
    return params.sigma * math.sqrt((u + 1.0 / u) * (u + b / u))


def c_of_x(x: float, params: SpikeParams) -> float:
    """Limiting |cosine| between signal and observed left singular vectors."""
    if x <= breakdown_point(params):
        raise DomainError(f"x={x} is at or below the breakdown point")
    u2 = (x / params.sigma) ** 2
    b = params.beta
    return math.sqrt((u2 * u2 - b) / (u2 * u2 + b * u2))


def x_of_y(y: float, params: SpikeParams) -> float:
    """Invert :func:`y_of_x`; the bulk edge maps to the breakdown point."""
    s, b = params.sigma, params.beta
    edge = bulk_edge(params)
    if y < edge:
        raise DomainError(f"y={y} is below the bulk edge {edge}")
    t = (y / s) ** 2 - 1.0 - b
    disc = max(t * t - 4.0 * b, 0.0)
    return s / math.sqrt(2.0) * math.sqrt(t + math.sqrt(disc))


def optimal_shrinker(y: float, params: SpikeParams) -> float:
    """Optimal shrinkage of an observed singular value `y` (zero up to the bulk edge).

    For ``y`` above the edge this is ``x * c(x)`` with ``x = x_of_y(y)``,
    written as ``sigma * sqrt((z**2 - beta) / (z + beta))``, ``z = (x/sigma)**2``.
    """
    if y < 0:
        raise DomainError(f"y must be nonnegative, got {y}")
    if y <= bulk_edge(params):
        return 0.0
    b = params.beta
    z = (x_of_y(y, params) / params.sigma) ** 2
    return params.sigma * math.sqrt(max(z * z - b, 0.0) / (z + b))


def threshold_cubic(z: float, beta: float) -> float:
    """The cubic whose positive root fixes the optimal hard threshold."""
    return -3.0 * z ** 3 + (2.0 * beta + 1.0) * z ** 2 + (beta ** 2 + 6.0 * beta) * z + beta ** 2


def threshold_cubic_root(beta: float, rtol: float = 1e-13) -> float:
    """Unique positive root of :func:`threshold_cubic` by bisection.

    The root exceeds ``sqrt(beta)`` where the cubic is positive, so the
    bracket starts there and its upper end doubles until the sign flips.
    """
    lo = math.sqrt(beta)
    if threshold_cubic(lo, beta) <= 0:
        raise DomainError(f"cubic is not positive at sqrt(beta) for beta={beta}")
    step = 1.0
    hi = lo + step
    while threshold_cubic(hi, beta) >= 0:
        step *= 2.0
        hi = lo + step
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if threshold_cubic(mid, beta) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimal_hard_threshold(params: SpikeParams) -> float:
    """Optimal hard threshold on the singular values of ``H @ Y``.

    Equals ``y`` evaluated at the signal level ``sigma * sqrt(a)``, ``a`` the
    positive root of the threshold cubic. Always above the bulk edge.
    """
    b = params.beta
    ra = math.sqrt(threshold_cubic_root(b))
    return params.sigma * math.sqrt((ra + 1.0 / ra) * (ra + b / ra))


def optimal_embedding_dim(eigenvalues: Sequence[float], params: SpikeParams) -> int:
    """Number of eigenvalues ``d_i`` of S with ``sqrt(d_i)`` above the optimal threshold."""
    d = np.asarray(eigenvalues, dtype=float).ravel()
    lam = optimal_hard_threshold(params)
    return int(np.count_nonzero(np.sqrt(np.clip(d, 0.0, None)) > lam))


def detectable_count(x: Sequence[float], params: SpikeParams) -> int:
    """``t``: how many signal values lie strictly above the breakdown point."""
    xs = np.asarray(x, dtype=float).ravel()
    return int(np.count_nonzero(xs > breakdown_point(params)))


def _kept_spike_loss(x: float, params: SpikeParams) -> float:
    s2 = params.sigma ** 2
    b = params.beta
    return (
        (math.sqrt(x * x + s2) - math.sqrt((x ** 4 - b * s2 * s2) / (x * x))) ** 2
        + 2.0 * b * s2 * s2 / (x * x)
        + b * s2
    )


def mds_asymptotic_loss(x: Sequence[float], r: int, params: SpikeParams) -> float:
    """Asymptotic loss of classical MDS embedding into `r` dimensions.

    Parameters
    ----------
    x : sequence of float
        Signal singular values, strictly descending and positive.
    r : int
        Embedding dimension, ``r >= 0``.
    params : SpikeParams
    """
    xs = _check_spectrum(x)
    if r < 0:
        raise DomainError("r must be nonnegative")
    t = detectable_count(xs, params)
    k = min(t, r)
    loss = sum(_kept_spike_loss(float(xi), params) for xi in xs[:k])
    loss += float(np.sum(xs[k:] ** 2))
    loss += max(r - t, 0) * bulk_edge(params) ** 2
    return float(loss)


def mdsplus_asymptotic_loss(x: Sequence[float], params: SpikeParams) -> float:
    """Asymptotic loss of optimal shrinkage (MDS+).

    Each detectable spike contributes ``beta*sigma**2 * ((1-beta)/(u**2+beta) + 1)``
    with ``u = x/sigma``; the rest contribute ``x**2``.
    """
    xs = _check_spectrum(x)
    s2, b = params.sigma ** 2, params.beta
    t = detectable_count(xs, params)
    u2 = (xs[:t] / params.sigma) ** 2
    loss = b * s2 * (float(np.sum((1.0 - b) / (u2 + b))) + t)
    return float(loss + np.sum(xs[t:] ** 2))


def regret(x: Sequence[float], r: int, params: SpikeParams) -> float:
    """Excess asymptotic loss of rank-`r` classical MDS over MDS+, spike by spike.

    Evaluated from the three per-spike cases directly (not as a difference of
    the two losses) so the two routes can be checked against each other.
    """
    xs = _check_spectrum(x)
    if r < 0:
        raise DomainError("r must be nonnegative")
    s2, b = params.sigma ** 2, params.beta
    t = detectable_count(xs, params)
    total = 0.0
    for i, xi in enumerate(xs[:t], start=1):
        u2 = (xi / params.sigma) ** 2
        if i <= r:
            gap = math.sqrt(xi * xi + s2) - math.sqrt((xi ** 4 - b * s2 * s2) / (xi * xi))
            total += gap * gap + b * s2 * (u2 * (1.0 + b) + 2.0 * b) / (u2 * u2 + b * u2)
        else:
            total += s2 * (u2 * u2 - b) / (u2 + b)
    total += max(r - t, 0) * bulk_edge(params) ** 2
    return float(total)
