"""Marcenko-Pastur / quarter-circle numerics and the median noise estimator.

The MP law here is the limiting eigenvalue distribution of ``W W^T`` for a
``m x p`` matrix ``W`` with iid entries of variance ``1/p`` and ``m/p -> beta``,
supported on ``[(1 - sqrt(beta))**2, (1 + sqrt(beta))**2]``.
"""
from __future__ import annotations

import math
import threading
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

__all__ = [
    "mp_support",
    "mp_density",
    "mp_cdf",
    "mp_median",
    "quarter_circle_density",
    "estimate_sigma",
    "MIN_SAMPLES",
]

MIN_SAMPLES = 8


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (0.0 < beta <= 1.0):
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    return beta


def mp_support(beta: float) -> tuple[float, float]:
    rb = math.sqrt(_check_beta(beta))
    return (1.0 - rb) ** 2, (1.0 + rb) ** 2


def mp_density(s, beta: float):
    """Marcenko-Pastur density at `s` (scalar or array), zero off the support."""
    lo, hi = mp_support(beta)
    s_arr = np.asarray(s, dtype=float)
    inside = (s_arr > lo) & (s_arr < hi)
    safe = np.where(inside, s_arr, 1.0)
    val = np.sqrt(np.clip((hi - safe) * (safe - lo), 0.0, None)) / (2.0 * math.pi * beta * safe)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def quarter_circle_density(y, beta: float, sigma: float = 1.0):
    """Density of noise singular values on ``[sigma(1-sqrt(beta)), sigma(1+sqrt(beta))]``."""
    beta = _check_beta(beta)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    rb = math.sqrt(beta)
    lo, hi = sigma * (1.0 - rb), sigma * (1.0 + rb)
    y_arr = np.asarray(y, dtype=float)
    inside = (y_arr > lo) & (y_arr < hi)
    safe = np.where(inside, y_arr, 1.0)
    s2 = sigma * sigma
    num = 4.0 * beta * s2 * s2 - (safe * safe - s2 - beta * s2) ** 2
    val = np.sqrt(np.clip(num, 0.0, None)) / (math.pi * s2 * beta * safe)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _angle_integrand(theta: float, beta: float) -> float:
    # s = 1 + beta + 2 sqrt(beta) sin(theta) turns the MP mass element into a
    # smooth function of theta on [-pi/2, pi/2], including the beta = 1 edge.
    rb = math.sqrt(beta)
    sn = math.sin(theta)
    if beta == 1.0:
        return (1.0 - sn) / math.pi
    return 2.0 * math.cos(theta) ** 2 / (math.pi * (1.0 + beta + 2.0 * rb * sn))


def mp_cdf(s: float, beta: float) -> float:
    """Marcenko-Pastur CDF by adaptive quadrature in the angle variable."""
    lo, hi = mp_support(beta)
    if s <= lo:
        return 0.0
    if s >= hi:
        return 1.0
    rb = math.sqrt(beta)
    arg = (s - 1.0 - beta) / (2.0 * rb)
    theta = math.asin(min(1.0, max(-1.0, arg)))
    val, _ = integrate.quad(_angle_integrand, -math.pi / 2, theta, args=(beta,),
                            epsabs=1e-13, epsrel=1e-12, limit=200)
    return min(1.0, max(0.0, val))


_median_lock = threading.Lock()


@lru_cache(maxsize=256)
def _mp_median_cached(beta_key: float) -> float:
    lo, hi = mp_support(beta_key)
    return optimize.brentq(lambda s: mp_cdf(s, beta_key) - 0.5, lo, hi,
                           xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def mp_median(beta: float) -> float:
    """Median of the Marcenko-Pastur law with shape `beta` (memoized)."""
    key = round(_check_beta(beta), 12)
    with _median_lock:
        return _mp_median_cached(key)


def _median(values: np.ndarray) -> float:
    # np.median averages the two central order statistics for even lengths
    return float(np.median(values))


def estimate_sigma(eigenvalues, n: int, p: int) -> float:
    """Median-based estimate of the noise level from eigenvalues of S.

    Parameters
    ----------
    eigenvalues : sequence of float
        Eigenvalues of the similarity matrix, descending. At least
        ``min(n - 1, p)`` values are required; only that many leading values
        are used, since centering leaves S with a structural zero eigenvalue.
    n, p : int
        Sample count and ambient dimension; ``beta = (n - 1) / p``.

    Returns
    -------
    float
        ``sqrt(s_med / mu_beta)`` for ``beta <= 1`` and
        ``sqrt(s_med / (beta * mu_{1/beta}))`` for ``beta > 1``.
    """
    if n < MIN_SAMPLES:
        raise ValueError("too few samples to estimate noise")
    if p < 1:
        raise ValueError("ambient dimension must be positive")
    vals = np.sort(np.asarray(eigenvalues, dtype=float).ravel())[::-1]
    m = min(n - 1, p)
    if vals.size < m:
        raise ValueError(f"need at least min(n-1, p) = {m} eigenvalues, got {vals.size}")
    s_med = _median(np.clip(vals[:m], 0.0, None))
    beta = (n - 1) / p
    if beta <= 1.0:
        return math.sqrt(s_med / mp_median(beta))
    return math.sqrt(s_med / (beta * mp_median(1.0 / beta)))
