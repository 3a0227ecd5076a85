"""Acceptance gate: every criterion at its stated tolerance and time budget.

Run under pytest (a PASS/FAIL line per criterion appears in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
from scipy import integrate

sys.path.insert(0, str(Path(__file__).resolve().parent))

from mdsplus import noise, spike  # noqa: E402
from mdsplus.matrix import center_rows, pairwise_sq_distances  # noqa: E402
from mdsplus.mds import classical_mds, similarity_from_distances, similarity_spectrum  # noqa: E402
from mdsplus.procrustes import embedding_loss, similarity_distance  # noqa: E402
from mdsplus.simulate import (SpikedConfig, generate_spiked_dataset, run_experiment,  # noqa: E402
                              spike_diagnostics, trial_rng)
from reference_values import TABULATED_THRESHOLDS  # noqa: E402

# fixed before any acceptance run; shared by every Monte-Carlo criterion
SEED = 20261017


def _timed(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


def criterion_1():
    worst = max(abs(spike.optimal_hard_threshold(spike.SpikeParams(b, 1.0)) - v)
                for b, v in TABULATED_THRESHOLDS.items())
    return worst <= 1e-3, f"max |lambda* - table| = {worst:.2e} over {len(TABULATED_THRESHOLDS)} values"


def criterion_2():
    cfg = SpikedConfig(n=50, p=100, spectrum=(5.0, 3.0, 1.0), sigma=0.0, seed=SEED)
    x, y = generate_spiked_dataset(cfg)
    loss = embedding_loss(classical_mds(pairwise_sq_distances(y), 3).coords, x)
    return loss < 1e-10, f"loss = {loss:.2e}"


def criterion_3():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(50):
        n, p = int(rng.integers(2, 41)), int(rng.integers(1, 61))
        y = rng.normal(size=(n, p)) * rng.uniform(0.1, 10) + rng.normal(size=p) * 5
        s = similarity_from_distances(pairwise_sq_distances(y))
        hy = center_rows(y)
        worst = max(worst, np.linalg.norm(s - hy @ hy.T) / np.linalg.norm(s))
    return worst <= 1e-10, f"max relative residual = {worst:.2e} over 50 matrices"


def _spike_stats(x_signal, trials=5, n=2000, p=2000):
    cfg = SpikedConfig(n=n, p=p, spectrum=(x_signal,), sigma=1.0, seed=SEED)
    tops, coss = [], []
    for t in range(trials):
        x, y = generate_spiked_dataset(cfg, trial_rng(cfg.seed, t))
        sv, cos = spike_diagnostics(x, y, k=1)
        tops.append(sv[0])
        coss.append(cos[0])
    return np.array(tops), np.array(coss)


def criterion_4():
    tops, coss = _spike_stats(2.0)
    sv_err = abs(tops.mean() / 2.5 - 1)
    cos_err = abs(coss.mean() / math.sqrt(0.75) - 1)
    _, low = _spike_stats(0.8)
    ok = sv_err < 0.02 and cos_err < 0.03 and low.max() < 0.1
    return ok, (f"x=2: mean top sv {tops.mean():.4f} ({sv_err:.2%} off 2.5), mean cos "
                f"{coss.mean():.4f} ({cos_err:.2%} off 0.86603); x=0.8: max cos {low.max():.4f}")


def criterion_5():
    worst = 0.0
    for n, p in [(500, 1000), (1000, 500)]:
        for sigma in (1.0, 3.0):
            cfg = SpikedConfig(n=n, p=p, sigma=sigma, seed=SEED)
            for t in range(5):
                _, y = generate_spiked_dataset(cfg, trial_rng(cfg.seed, t))
                vals = similarity_spectrum(pairwise_sq_distances(y)).values
                worst = max(worst, abs(noise.estimate_sigma(vals, n, p) / sigma - 1))
    return worst < 0.02, f"max |sigma_hat/sigma - 1| = {worst:.3%} over 20 datasets"


def criterion_6():
    unit = spike.SpikeParams(1.0, 1.0)
    ok, parts = True, []
    for xv in (1.2, 2.0, 3.0):
        cfg = SpikedConfig(n=1000, p=1000, spectrum=(xv,), sigma=1.0, seed=SEED)
        rep = run_experiment(cfg, 20, methods=["classical", "mds_plus"], r_for_mds=1)
        targets = {"classical": spike.mds_asymptotic_loss([xv], 1, unit),
                   "mds_plus": spike.mdsplus_asymptotic_loss([xv], unit)}
        for method, target in targets.items():
            agg = rep.aggregates[method]
            z = (agg["mean"] - target) / agg["se"]
            ok &= abs(z) <= 3
            parts.append(f"x={xv} {method} {agg['mean']:.4f} vs {target:.4f} (z={z:+.2f})")
    return ok, "; ".join(parts)


def criterion_7():
    grid_min = min(spike.regret([x], r, spike.SpikeParams(b, 1.0))
                   for x in (0.5, 1.0, 1.5, 2.0, 3.0) for b in (0.25, 0.5, 1.0) for r in (0, 1, 2))
    ok, parts = grid_min >= 0, [f"min analytic regret {grid_min:.4f}"]
    for xv in (0.5, 2.0):
        cfg = SpikedConfig(n=1000, p=1000, spectrum=(xv,), sigma=1.0, seed=SEED)
        for r in (0, 1, 2):
            agg = run_experiment(cfg, 10, methods=["classical", "mds_plus"], r_for_mds=r).aggregates
            mds, plus = agg["classical"], agg["mds_plus"]
            bound = mds["mean"] + 3 * math.hypot(mds["se"], plus["se"])
            ok &= plus["mean"] <= bound
            parts.append(f"x={xv} r={r} MDS+ {plus['mean']:.3f} vs MDS {mds['mean']:.3f} + 3SE = {bound:.3f}")
    return ok, "; ".join(parts)


def criterion_8():
    rng = np.random.default_rng(SEED)
    failures, cases = [], 0

    def check(cond, label):
        nonlocal cases
        cases += 1
        if not cond:
            failures.append(label)

    for i in range(200):  # pseudo-metric axioms, d = r
        n, d = int(rng.integers(4, 20)), int(rng.integers(1, 4))
        a, b, c = (rng.normal(size=(n, d)) * rng.uniform(0.1, 5) for _ in range(3))
        dab, dba = similarity_distance(a, b).distance, similarity_distance(b, a).distance
        check(similarity_distance(a, a).distance <= 1e-9 and abs(dab - dba) <= 1e-10
              and similarity_distance(a, c).distance <= dab + similarity_distance(b, c).distance + 1e-9,
              f"metric {i}")
    for i in range(200):  # rotation, translation and constant-column padding invariance
        n, d, r = int(rng.integers(5, 20)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
        a, b = rng.normal(size=(n, d)), rng.normal(size=(n, r))
        base = similarity_distance(a, b).distance
        q, _ = np.linalg.qr(rng.normal(size=(r, r)))
        moved = [similarity_distance(a, b @ q), similarity_distance(a + rng.normal(size=d), b - rng.normal(size=r)),
                 similarity_distance(np.hstack([a, np.full((n, 1), rng.normal())]), b),
                 similarity_distance(a, np.hstack([b, np.full((n, 1), rng.normal())]))]
        check(all(abs(m.distance - base) <= 1e-9 for m in moved), f"invariance {i}")
    for i in range(200):  # shrinker: continuity at the edge, monotone, below identity
        p = spike.SpikeParams(float(rng.uniform(0.05, 4)), float(rng.uniform(0.2, 5)))
        edge = spike.bulk_edge(p)
        y1, y2 = np.sort(rng.uniform(0, 3 * edge, 2))
        e1, e2 = spike.optimal_shrinker(y1, p), spike.optimal_shrinker(y2, p)
        near = spike.optimal_shrinker(edge * (1 + 1e-12), p)
        check(spike.optimal_shrinker(edge, p) == 0.0 and near < 1e-2 * edge and 0 <= e1 <= e2 + 1e-12
              and e1 <= y1 and e2 <= y2, f"shrinker {i}")
    for i in range(200):  # inverse map
        p = spike.SpikeParams(float(rng.uniform(0.05, 4)), float(rng.uniform(0.2, 5)))
        x = float(rng.uniform(1.01, 20)) * spike.breakdown_point(p)
        check(abs(spike.x_of_y(spike.y_of_x(x, p), p) / x - 1) <= 1e-10, f"inverse {i}")
    betas = [round(0.05 * k, 2) for k in range(1, 21)] + [2.0, 4.0]
    for i in range(200):  # threshold above the bulk edge
        p = spike.SpikeParams(betas[i % len(betas)], float(rng.uniform(0.2, 5)))
        check(spike.optimal_hard_threshold(p) > spike.bulk_edge(p), f"threshold {i}")
    return not failures and cases == 1000, f"{cases} cases, {len(failures)} failures {failures[:5]}"


def brute_force_mp_median_beta1(grid=1_000_000):
    """CDF inversion of the beta = 1 law by a fixed-grid trapezoid rule and bisection.

    With ``s = u^2`` the density ``sqrt(4 - s) / (2 pi sqrt(s))`` becomes the
    bounded integrand ``sqrt(4 - u^2) / pi`` on ``[0, sqrt(s)]``.
    """
    def cdf(s):
        u = np.linspace(0.0, math.sqrt(s), grid)
        return np.trapezoid(np.sqrt(4.0 - u * u) / math.pi, u)

    lo, hi = 0.0, 4.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if cdf(mid) < 0.5 else (lo, mid)
    return 0.5 * (lo + hi)


def criterion_9():
    oracle = brute_force_mp_median_beta1()
    med_err = abs(noise.mp_median(1.0) - oracle)
    worst = 0.0
    for beta in (0.1, 0.5, 1.0):
        lo, hi = noise.mp_support(beta)
        mp, _ = integrate.quad(lambda u: noise.mp_density(lo + u * u, beta) * 2 * u, 0.0,
                               math.sqrt(hi - lo), epsabs=1e-12, epsrel=1e-12, limit=400)
        qc, _ = integrate.quad(noise.quarter_circle_density, 1 - math.sqrt(beta), 1 + math.sqrt(beta),
                               args=(beta, 1.0), epsabs=1e-12, epsrel=1e-12, limit=400)
        worst = max(worst, abs(mp - 1), abs(qc - 1))
    return med_err <= 1e-6 and worst <= 1e-8, (f"|median - oracle| = {med_err:.2e} (oracle {oracle:.12f}); "
                                               f"max normalization error {worst:.2e}")


CRITERIA = [
    (1, "tabulated thresholds", criterion_1, 1.0),
    (2, "noiseless exact recovery", criterion_2, 1.0),
    (3, "Gram identity", criterion_3, 5.0),
    (4, "spike limits", criterion_4, 120.0),
    (5, "sigma_hat consistency", criterion_5, 120.0),
    (6, "loss curves at desk scale", criterion_6, 600.0),
    (7, "dominance of MDS+", criterion_7, 600.0),
    (8, "property suites", criterion_8, 60.0),
    (9, "MP median oracle", criterion_9, 30.0),
]


def evaluate(num):
    _, title, fn, budget = CRITERIA[num - 1]
    ok, detail, secs = _timed(fn)
    in_time = secs < budget
    return ok and in_time, title, f"{detail} [{secs:.1f}s of {budget:.0f}s]"


def _run(num):
    from conftest import ACCEPTANCE_RESULTS

    ok, title, detail = evaluate(num)
    ACCEPTANCE_RESULTS.append((num, title, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'} [{num}] {title}: {detail}")
    assert ok, detail


def test_criterion_1_tabulated_thresholds():
    _run(1)


def test_criterion_2_noiseless_exact_recovery():
    _run(2)


def test_criterion_3_gram_identity():
    _run(3)


def test_criterion_4_spike_limits():
    _run(4)


def test_criterion_5_sigma_hat_consistency():
    _run(5)


def test_criterion_6_loss_curves():
    _run(6)


def test_criterion_7_dominance():
    _run(7)


def test_criterion_8_property_suites():
    _run(8)


def test_criterion_9_mp_median_oracle():
    _run(9)


if __name__ == "__main__":
    all_ok = True
    for num, *_ in CRITERIA:
        ok, title, detail = evaluate(num)
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'} [{num}] {title}: {detail}", flush=True)
    sys.exit(0 if all_ok else 1)
