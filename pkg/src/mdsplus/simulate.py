"""Synthetic data and the Monte-Carlo runner comparing empirical and asymptotic losses.

Data follow ``Y = [X, 0] R + Z``: a centered ``n x d`` configuration with
prescribed singular values, carried into ``R^p`` by a Haar-random rotation,
plus iid Gaussian noise of variance ``sigma**2 / p``. Only the first ``d``
rows of ``R`` are ever drawn.

Randomness is derived per trial from ``SeedSequence(seed, spawn_key=(trial,))``
so a report depends only on ``(config, trials)``, not on thread count or
scheduling.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import noise, spike
from .matrix import SpectralDecomposition, pairwise_sq_distances, sym_eig
from .mds import (
    Embedding,
    classical_mds,
    mds_plus_from_spectrum,
    shrinkage_embed,
    similarity_spectrum,
    svht_embed,
)
from .procrustes import embedding_loss

__all__ = [
    "SpikedConfig",
    "ExperimentReport",
    "METHODS",
    "trial_rng",
    "haar_frame",
    "spiked_configuration",
    "generate_spiked_dataset",
    "generate_helix",
    "spike_diagnostics",
    "run_trial",
    "run_experiment",
    "aggregate",
    "theory_block",
]

METHODS = ("classical", "svht", "mds_plus")
_LOSS_KEYS = {
    "classical": "empirical_loss_mds",
    "svht": "empirical_loss_svht",
    "mds_plus": "empirical_loss_mdsplus",
}


@dataclass(frozen=True)
class SpikedConfig:
    n: int
    p: int
    spectrum: tuple = ()
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "spectrum", tuple(float(v) for v in self.spectrum))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if len(self.spectrum) >= self.n:
            raise ValueError(f"signal rank {len(self.spectrum)} must be below n={self.n}")
        if len(self.spectrum) > self.p:
            raise ValueError(f"signal rank {len(self.spectrum)} exceeds p={self.p}")
        xs = np.asarray(self.spectrum)
        if np.any(xs <= 0) or np.any(np.diff(xs) >= 0):
            raise ValueError("spectrum must be positive and strictly descending")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be a nonnegative finite number")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def d(self) -> int:
        return len(self.spectrum)

    @property
    def beta(self) -> float:
        return (self.n - 1) / self.p


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial of a seeded experiment."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(trial),)))


def haar_frame(rng: np.random.Generator, p: int, k: int) -> np.ndarray:
    """``p x k`` matrix whose columns are the first `k` columns of a Haar orthogonal matrix."""
    g = rng.standard_normal((p, k))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def spiked_configuration(rng: np.random.Generator, n: int, spectrum: Sequence[float]) -> np.ndarray:
    """Centered ``n x d`` matrix with singular values exactly `spectrum`."""
    xs = np.asarray(spectrum, dtype=float)
    d = xs.size
    if d == 0:
        return np.zeros((n, 0))
    if d >= n:
        raise ValueError("signal rank must be below n")
    g = rng.standard_normal((n, d))
    g -= g.mean(axis=0)
    left, _ = np.linalg.qr(g)
    right = haar_frame(rng, d, d)
    x = (left * xs) @ right.T
    x -= x.mean(axis=0)
    # re-impose the exact singular values after re-centering
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    return (u * xs) @ vt


def generate_spiked_dataset(config: SpikedConfig, rng: Optional[np.random.Generator] = None):
    """Draw ``(X, Y)`` from the spiked model described by `config`.

    Returns
    -------
    x : (n, d) ndarray
        Centered signal configuration with singular values ``config.spectrum``.
    y : (n, p) ndarray
        ``X`` rotated into ``R^p`` plus noise of variance ``sigma**2 / p``.
    """
    if rng is None:
        rng = trial_rng(config.seed, 0)
    n, p = config.n, config.p
    x = spiked_configuration(rng, n, config.spectrum)
    if config.d:
        y = x @ haar_frame(rng, p, config.d).T
    else:
        y = np.zeros((n, p))
    if config.sigma > 0:
        y += rng.normal(0.0, config.sigma / math.sqrt(p), size=(n, p))
    return x, y


def generate_helix(n: int, p: int, radius: float = 1.0, pitch: float = 0.2, turns: float = 3.0,
                   sigma: float = 0.0, seed: int = 0, rotate: bool = True):
    """Centered helix in ``R^3`` and its noisy image in ``R^p``.

    Points sit at ``n`` equispaced parameters over ``[0, 2 pi turns]``. With
    ``rotate=False`` the helix occupies the first three coordinates.
    """
    if p < 3:
        raise ValueError("helix needs p >= 3")
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 2.0 * math.pi * turns, n)
    x = np.column_stack([radius * np.cos(t), radius * np.sin(t), pitch * t])
    x -= x.mean(axis=0)
    if rotate:
        y = x @ haar_frame(rng, p, 3).T
    else:
        y = np.hstack([x, np.zeros((n, p - 3))])
    if sigma > 0:
        y = y + rng.normal(0.0, sigma / math.sqrt(p), size=(n, p))
    return x, y


def spike_diagnostics(x: np.ndarray, y: np.ndarray, k: int = 1):
    """Top `k` singular values of ``H Y`` and cosines ``|<u_i, v_i>|``.

    ``u_i`` are left singular vectors of ``H Y`` and ``v_i`` those of `x`.
    """
    hy = y - y.mean(axis=0)
    dec = sym_eig(hy @ hy.T)
    sv = np.sqrt(np.clip(dec.values[:k], 0.0, None))
    vx, _, _ = np.linalg.svd(x - x.mean(axis=0), full_matrices=False)
    m = min(k, vx.shape[1])
    cos = np.abs(np.einsum("ij,ij->j", dec.vectors[:, :m], vx[:, :m]))
    return sv, cos


def _noise_free_shrink(dec: SpectralDecomposition, method: str) -> Embedding:
    # sigma -> 0 limit: threshold and shrinker both reduce to the identity
    return shrinkage_embed(dec, lambda v: v, method=method, sigma_used=0.0)


def run_trial(config: SpikedConfig, trial: int, methods: Iterable[str] = METHODS,
              r_for_mds: Optional[int] = None, estimate_noise: bool = False) -> dict:
    """One Monte-Carlo draw; returns the per-trial record."""
    methods = tuple(methods)
    r = config.d if r_for_mds is None else int(r_for_mds)
    rng = trial_rng(config.seed, trial)
    x, y = generate_spiked_dataset(config, rng)
    dec = similarity_spectrum(pairwise_sq_distances(y))
    n, p = config.n, config.p

    sigma_hat = noise.estimate_sigma(dec.values, n, p) if estimate_noise else None
    sigma = sigma_hat if estimate_noise else config.sigma

    record = {"trial": trial}
    for key in _LOSS_KEYS.values():
        record[key] = None
    rhat = {}
    for method in methods:
        if method == "classical":
            emb = classical_mds(dec, r)
        elif method == "svht":
            if sigma > 0:
                lam = spike.optimal_hard_threshold(spike.SpikeParams.from_shape(n, p, sigma))
                emb = svht_embed(dec, lam)
            else:
                emb = _noise_free_shrink(dec, "svht")
            rhat["svht"] = emb.r
        elif method == "mds_plus":
            if sigma > 0:
                emb = mds_plus_from_spectrum(dec, n, p, sigma, warn=False)
            else:
                emb = _noise_free_shrink(dec, "mds_plus")
            rhat["mds_plus"] = emb.r
        else:
            raise ValueError(f"unknown method {method!r}")
        record[_LOSS_KEYS[method]] = embedding_loss(emb.coords, x)
    record["rhat"] = rhat
    record["sigma_hat"] = sigma_hat
    k = min(config.d + 3, dec.values.size)
    record["top_singular_values"] = [float(v) for v in np.sqrt(np.clip(dec.values[:k], 0.0, None))]
    return record



@dataclass
class ExperimentReport:
    """Per-trial records plus aggregates and the matching asymptotic values."""

    config: dict
    trials: list
    aggregates: dict
    theory: Optional[dict]
    methods: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        # repr-based float formatting keeps 17 significant digits
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False)

    def trials_table(self) -> tuple[list, list]:
        """Flat ``(header, rows)`` view of the per-trial records for CSV output."""
        header = ["trial", "empirical_loss_mds", "empirical_loss_svht", "empirical_loss_mdsplus",
                  "rhat_svht", "rhat_mds_plus", "sigma_hat", "top_singular_value"]
        rows = []
        for rec in self.trials:
            top = rec["top_singular_values"]
            rows.append([rec["trial"], rec["empirical_loss_mds"], rec["empirical_loss_svht"],
                         rec["empirical_loss_mdsplus"], rec["rhat"].get("svht"),
                         rec["rhat"].get("mds_plus"), rec["sigma_hat"], top[0] if top else None])
        return header, rows


def aggregate(trials: Sequence[dict], methods: Iterable[str]) -> dict:
    """Mean, sample standard deviation and standard error of each method's loss."""
    out = {}
    for method in methods:
        vals = np.array([rec[_LOSS_KEYS[method]] for rec in trials], dtype=float)
        k = vals.size
        std = float(np.std(vals, ddof=1)) if k > 1 else 0.0
        out[method] = {"mean": float(np.mean(vals)), "std": std, "se": std / math.sqrt(k)}
    return out


def theory_block(config: SpikedConfig, r: int) -> Optional[dict]:
    """Asymptotic predictions at ``beta = (n-1)/p``; ``None`` when sigma is zero."""
    if config.sigma <= 0:
        return None
    params = spike.SpikeParams.from_shape(config.n, config.p, config.sigma)
    return {
        "mds_asymptotic_loss": spike.mds_asymptotic_loss(config.spectrum, r, params),
        "mdsplus_asymptotic_loss": spike.mdsplus_asymptotic_loss(config.spectrum, params),
        "regret": spike.regret(config.spectrum, r, params),
        "lambda_star": spike.optimal_hard_threshold(params),
        "bulk_edge": spike.bulk_edge(params),
        "beta": params.beta,
    }


def run_experiment(config: SpikedConfig, trials: int, methods: Iterable[str] = METHODS,
                   r_for_mds: Optional[int] = None, estimate_noise: bool = False,
                   threads: int = 1) -> ExperimentReport:
    """Run `trials` independent draws and score every requested method.

    Parameters
    ----------
    config : SpikedConfig
    trials : int
        Number of Monte-Carlo repetitions (at least 1).
    methods : iterable of str
        Subset of ``("classical", "svht", "mds_plus")``.
    r_for_mds : int, optional
        Embedding dimension for classical MDS; defaults to the signal rank.
    estimate_noise : bool
        Use the median estimate of sigma (recorded per trial) instead of the
        true value for SVHT and MDS+.
    threads : int
        Worker threads. The report is identical for any value.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    requested = set(methods)
    methods = [m for m in METHODS if m in requested]
    if not methods or requested - set(METHODS):
        raise ValueError("methods must be a nonempty subset of " + ", ".join(METHODS))
    r = config.d if r_for_mds is None else int(r_for_mds)
    if r < 0:
        raise ValueError("r must be nonnegative")

    def one(t):
        return run_trial(config, t, methods, r, estimate_noise)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(one, range(trials)))
    else:
        records = [one(t) for t in range(trials)]

    cfg = asdict(config)
    cfg.update({"spectrum": list(config.spectrum), "d": config.d, "trials": trials,
                "r_for_mds": r, "estimate_noise": estimate_noise})
    return ExperimentReport(config=cfg, trials=records, aggregates=aggregate(records, methods),
                            theory=theory_block(config, r), methods=methods)
