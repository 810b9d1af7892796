"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected in ``SUMMARY`` and repeated in the terminal summary
(see ``conftest.py``), so they are visible without ``-s``.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy import stats

from riesz_lab import dens, hwv, jack, linalg, specfun, verify
from riesz_lab.params import BetaRieszParams, KotzRieszParams, RieszParams, TRieszParams

from conftest import random_pd, random_upper

SUMMARY: list[str] = []


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    SUMMARY.append(line)
    print(line)
    return ok


def close_log(x, y, tol):
    return abs(x - y) <= tol * max(1.0, abs(y))


# ---------------------------------------------------------------------------
# 1. highest weight vector identities
# ---------------------------------------------------------------------------

def test_q_kappa_identities():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    fails = {k: 0 for k in ("inverse", "constant", "additive", "shift", "congruence",
                            "inverse congruence")}
    worst = 0.0
    n_inst = 200
    for i in range(n_inst):
        m = 1 + i % 5
        beta = 1 + (i // 5) % 2
        a = random_pd(rng, m, beta)
        b = random_upper(rng, m, beta)
        c = linalg.adjoint(b) @ b
        k = np.sort(rng.uniform(-3, 3, m))[::-1]
        t = np.sort(rng.uniform(-3, 3, m))[::-1]
        p = rng.uniform(-2, 2)
        ld = float(linalg.logdet_pd(a, beta))
        q = lambda x, w: float(hwv.log_q_kappa(x, w, beta))
        bi = np.linalg.inv(b)
        pairs = {
            "inverse": (float(hwv.log_q_kappa_inv(a, k, beta)), q(np.linalg.inv(a), k)),
            "constant": (q(a, np.full(m, p)), p * ld),
            "additive": (q(a, k + t), q(a, k) + q(a, t)),
            "shift": (q(a, k + p), p * ld + q(a, k)),
            "congruence": (q(linalg.hermitize(linalg.adjoint(b) @ a @ b), k), q(c, k) + q(a, k)),
            "inverse congruence": (q(linalg.hermitize(linalg.adjoint(bi) @ a @ bi), k),
                                   -q(c, k) + q(a, k)),
        }
        for key, (x, y) in pairs.items():
            err = abs(x - y) / max(1.0, abs(y))
            worst = max(worst, err)
            fails[key] += err > 1e-10
    elapsed = time.perf_counter() - t0
    ok = not any(fails.values()) and elapsed < 10
    assert report(1, "q_kappa identities", ok,
                  f"6 identities x {n_inst} instances, m 1..5, beta 1,2; worst log error "
                  f"{worst:.2e} <= 1e-10; failures {sum(fails.values())}; {elapsed:.1f} s < 10 s")


# ---------------------------------------------------------------------------
# 2. gamma factorization
# ---------------------------------------------------------------------------

def integer_weights(m, top=4):
    def rec(prefix, cap):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for v in range(cap, -1, -1):
            yield from rec(prefix + [v], v)
    return list(rec([], top))


def test_gamma_factorization():
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for beta in (1, 2, 4):
        for m in range(1, 5):
            for a in range(2, 9):
                if not a > (m - 1) * beta / 2:
                    continue
                lg = specfun.lgamma_m(a, beta, m)
                for k in integer_weights(m):
                    # Pochhammer evaluated as an explicit product of rising factorials
                    s, lp = specfun.signed_gen_pochhammer(a, k, beta)
                    lhs = specfun.lgamma_m_weighted(a, k, beta, m)
                    err = abs(lhs - (lp + lg)) / max(1.0, abs(lhs))
                    worst = max(worst, err if s == 1 else math.inf)
                    count += 1
    mc = verify.check_gamma_integral(3.0, [1, 0], 1, 2, np.random.default_rng(202), N=1_000_000)
    mc_err = abs(mc.statistic - 1.0)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and mc_err <= 0.01 and elapsed < 120
    assert report(2, "gamma factorization", ok,
                  f"{count} grid points, worst log error {worst:.2e} <= 1e-12; Monte Carlo "
                  f"integral at m=2 off by {100 * mc_err:.3f}% <= 1% (N=1e6); {elapsed:.1f} s")


# ---------------------------------------------------------------------------
# 3. classical reductions
# ---------------------------------------------------------------------------

def test_classical_reductions():
    rng = np.random.default_rng(303)
    x = np.linspace(0.1, 10, 20)
    errs = {}
    # scalar Riesz is a gamma law
    g = dens.riesz_logpdf(x[:, None, None], RieszParams(2.5, [0.75], np.array([[1.6]])))
    errs["gamma"] = np.max(np.abs(g - stats.gamma.logpdf(x, 3.25, scale=1.6))
                           / np.maximum(1, np.abs(g)))
    # zero weight Riesz with Xi = 2 Sigma is Wishart
    sigma = random_pd(rng, 3, 1)
    p = RieszParams(3.5, [0, 0, 0], 2 * sigma)
    v = np.stack([random_pd(rng, 3, 1) for _ in range(20)])
    w = dens.riesz_logpdf(v, p)
    ref = np.array([stats.wishart.logpdf(vi, df=7, scale=sigma) for vi in v])
    errs["wishart"] = np.max(np.abs(w - ref) / np.maximum(1, np.abs(ref)))
    # scalar T-Riesz with rho = 1/nu is Student t
    t = np.linspace(-5, 5, 20)
    for nu in (1.0, 3.0, 7.5):
        lt = dens.triesz_logpdf(t[:, None, None], TRieszParams(1, nu, 0.0, [0], rho=1 / nu))
        errs[f"t{nu:g}"] = np.max(np.abs(lt - stats.t.logpdf(t, nu))
                                  / np.maximum(1, np.abs(lt)))
    # m = 1 singular value density is the folded t
    s = dens.sv_triesz_logpdf(x[:, None], TRieszParams(1, 3.0, 0.0, [0], rho=1 / 3))
    folded = math.log(2) + stats.t.logpdf(x, 3)
    errs["folded"] = np.max(np.abs(s - folded) / np.maximum(1, np.abs(folded)))
    tol = {"gamma": 1e-12, "wishart": 1e-10, "folded": 1e-10}
    ok = all(e <= tol.get(k, 1e-12) for k, e in errs.items())
    assert report(3, "classical reductions", ok,
                  ", ".join(f"{k} {e:.1e}" for k, e in errs.items())
                  + "; tolerances gamma/t 1e-12, Wishart/folded 1e-10")


# ---------------------------------------------------------------------------
# 4. normalization
# ---------------------------------------------------------------------------

def normalization_cases():
    xi1 = np.array([[1.2, 0.4], [0.4, 0.9]])
    xi2 = np.array([[1.2, 0.4 + 0.3j], [0.4 - 0.3j, 0.9]])
    return [
        ("riesz", RieszParams(2.0, [0.5])),
        ("riesz", RieszParams(2.0, [-0.5], variant="II", beta=4)),
        ("riesz", RieszParams(2.3, [1, 0], xi1)),
        ("riesz", RieszParams(2.3, [0, -1], xi1, variant="II")),
        ("riesz", RieszParams(2.3, [1, 0], xi2, beta=2)),
        ("riesz", RieszParams(2.6, [0, -1], xi2, beta=2, variant="II")),
        ("kotzriesz", KotzRieszParams(1, [0.5])),
        ("kotzriesz", KotzRieszParams(3, [1.0], Theta=random_pd(np.random.default_rng(4), 3, 1))),
        ("kotzriesz", KotzRieszParams(2, [1, 0], Sigma=xi1)),
        ("kotzriesz", KotzRieszParams(2, [0, -1], Sigma=xi1, variant="II")),
        ("kotzriesz", KotzRieszParams(2, [1.0], beta=2)),
        ("kotzriesz", KotzRieszParams(1, [-0.5], beta=4, variant="II")),
        ("triesz", TRieszParams(1, 3, 0, [0], rho=1 / 3)),
        ("triesz", TRieszParams(2, 3, 0.5, [0.5], variant="II")),
        ("triesz", TRieszParams(2, 3, 0.5, [1, 0], Sigma=xi1)),
        ("triesz", TRieszParams(2, 5, 0.5, [0, -1], Sigma=xi1, variant="II")),
        ("triesz", TRieszParams(2, 4, 0.0, [1.0], beta=2, mu=np.array([[1j], [0.5]]))),
        ("beta-riesz", BetaRieszParams(3, 3, 0.5, [1.0])),
        ("beta-riesz", BetaRieszParams(4, 3, 0.5, [1, 0], rho=0.8, Sigma=xi1)),
        ("beta-riesz", BetaRieszParams(4, 3, 0.5, [0, -1], rho=0.8, Sigma=xi1, variant="II")),
        ("beta-riesz", BetaRieszParams(3, 4, 0.5, [1, 0], beta=2, Sigma=xi2)),
        ("beta-riesz", BetaRieszParams(3, 6, 0.5, [0, -1], beta=2, variant="II")),
        ("sv", TRieszParams(2, 4, 0, [1], beta=2)),
        ("sv", TRieszParams(3, 4, 0, [1, 0])),
        ("sv", TRieszParams(4, 4, 0.5, [1, 0], variant="II")),
        ("sv", TRieszParams(3, 5, 0, [2, 1], beta=8)),
        ("eig", TRieszParams(3, 4, 0, [1])),
        ("eig", TRieszParams(3, 4, 0, [1, 0])),
        ("eig", TRieszParams(4, 4, 0.5, [1, 0], beta=2)),
        ("eig", TRieszParams(4, 6, 0.5, [1, 1], beta=4, variant="II")),
    ]


def test_normalization():
    t0 = time.perf_counter()
    reports = [verify.check_normalization(k, p) for k, p in normalization_cases()]
    elapsed = time.perf_counter() - t0
    bad = [r.name for r in reports if not r.passed]
    worst = max(abs(r.statistic - 1) for r in reports)
    ok = not bad and elapsed < 300
    for r in reports:
        print(f"  {r.name}: {r.statistic:.10f} (tol {r.tolerance:g})")
    assert report(4, "normalization", ok,
                  f"{len(reports)} densities, worst |integral - 1| {worst:.2e}, "
                  f"failed {bad or 'none'}; {elapsed:.0f} s < 300 s")


# ---------------------------------------------------------------------------
# 5. sampler / density agreement
# ---------------------------------------------------------------------------

def sampler_cases():
    cases = []
    for beta in (1, 2):
        xi = random_pd(np.random.default_rng(50 + beta), 2, beta)
        cases += [
            ("riesz", RieszParams(3.0, [1, 0], xi, beta=beta)),
            ("riesz", RieszParams(3.0, [0.5, -1], xi, beta=beta, variant="II")),
            ("kotzriesz", KotzRieszParams(3, [1, 0], beta=beta, Sigma=xi)),
            ("kotzriesz", KotzRieszParams(3, [0.5, -0.5], beta=beta, Sigma=xi, variant="II")),
            ("triesz", TRieszParams(3, 5.0, 0.5, [1, 0], beta=beta, Sigma=xi)),
            ("triesz", TRieszParams(4, 6.0, 0.5, [0, -1], beta=beta, Sigma=xi, variant="II")),
            ("beta-riesz", BetaRieszParams(3, 5.0, 0.5, [1, 0], beta=beta, Sigma=xi)),
            ("beta-riesz", BetaRieszParams(4, 6.0, 0.5, [0, -1], beta=beta, Sigma=xi,
                                           variant="II")),
        ]
    return cases


def test_sampler_agreement():
    t0 = time.perf_counter()
    reports = []
    for i, (kind, p) in enumerate(sampler_cases()):
        reports.append(verify.check_sampler_density(kind, p, np.random.default_rng(500 + i)))
    for i, p in enumerate([TRieszParams(3, 4.0, 0.0, [1, 0]),
                           TRieszParams(4, 6.0, 0.5, [1, 0], variant="II"),
                           TRieszParams(3, 4.0, 0.5, [2, 1], beta=2)]):
        reports.append(verify.check_eigen_pipeline(p, np.random.default_rng(550 + i)))
    elapsed = time.perf_counter() - t0
    for r in reports:
        print(f"  {r.name}: min p {r.statistic:.4g} ({r.detail})")
    bad = [r.name for r in reports if not r.passed]
    worst = min(r.statistic for r in reports)
    assert report(5, "sampler/density agreement", not bad,
                  f"{len(reports) - 3} sampler checks (8 laws x beta 1,2) and 3 eigenvalue "
                  f"pipelines at N=1e5; smallest p {worst:.3g} > 0.001; failed {bad or 'none'}; "
                  f"{elapsed:.0f} s")


# ---------------------------------------------------------------------------
# 6. Jacobians
# ---------------------------------------------------------------------------

def test_jacobians():
    rng = np.random.default_rng(606)
    reports = []
    for beta in (1, 2):
        for i in range(50):
            n, m = 1 + i % 4, 1 + (i // 4) % 3
            a = linalg.gaussian_matrix(rng, n, n, beta)
            b = linalg.gaussian_matrix(rng, m, m, beta)
            c = linalg.gaussian_matrix(rng, n, m, beta)
            reports.append(verify.check_jacobian_linear(a, b, beta, C=c))
            reports.append(verify.check_jacobian_symmetric(
                linalg.gaussian_matrix(rng, m + 1, m + 1, beta), beta))
    worst = max(abs(r.statistic - 1) for r in reports)
    sphere = max(abs(specfun.log_stiefel_volume(n, 1, beta) - specfun.log_sphere_area(n * beta))
                 for n in range(1, 6) for beta in (1, 2, 4, 8))
    ok = all(r.passed for r in reports) and sphere <= 1e-12
    assert report(6, "Jacobians", ok,
                  f"{len(reports)} transforms (50 linear + 50 congruence per beta 1,2), worst "
                  f"relative error {worst:.1e} <= 1e-9; Stiefel vs sphere {sphere:.1e} <= 1e-12")


# ---------------------------------------------------------------------------
# 7. zonal polynomials
# ---------------------------------------------------------------------------

def test_zonal_layer():
    rng = np.random.default_rng(707)
    t0 = time.perf_counter()
    worst_sum = 0.0
    for beta in (1, 2, 4):
        for m in range(1, 6):
            x = rng.uniform(0.1, 2.0, (20, m))
            for k in range(1, 6):
                total = sum(jack.jack_C(tau, x, beta) for tau in jack.partitions(k)
                            if len(tau) <= m)
                worst_sum = max(worst_sum, np.max(np.abs(total / x.sum(-1) ** k - 1)))
    reports = []
    for beta in (1, 2):
        for m in (1, 2, 3):
            ev = np.sort(rng.uniform(0.2, 2.0, m))[::-1]
            g = linalg.gaussian_matrix(rng, m, m, beta)
            q, _ = np.linalg.qr(g)
            L = linalg.hermitize(q @ np.diag(np.repeat(ev, linalg.block_size(beta))) @
                                 linalg.adjoint(q))
            for k in range(1, 5):
                for tau in jack.partitions(k):
                    if len(tau) <= m:
                        reports.append(verify.check_spherical_identity(tau, L, beta, rng))
    bad = [r.name for r in reports if not r.passed]
    for r in reports:
        print(f"  {r.name}: {r.detail}")
    ok = worst_sum <= 1e-9 and not bad
    assert report(7, "zonal layer", ok,
                  f"sum rule worst {worst_sum:.1e} <= 1e-9 (k <= 5, m <= 5, beta 1,2,4); "
                  f"{len(reports)} spherical identities within 3 s.e. at N=1e5, failed "
                  f"{bad or 'none'}; {time.perf_counter() - t0:.0f} s")


# ---------------------------------------------------------------------------
# 8. reproducibility
# ---------------------------------------------------------------------------

def cli_sample(tmp_path, tag, threads, dist):
    out = tmp_path / f"{tag}.csv"
    env = dict(os.environ, RIESZ_LAB_THREADS=str(threads))
    subprocess.run([sys.executable, "-m", "riesz_lab.cli", "sample", "--dist", dist,
                    "--n", "30000", "--seed", "2024", "--stream", "7", "--output", str(out)],
                   check=True, env=env)
    return out.read_bytes()


def test_reproducibility(tmp_path):
    results = []
    for dist in ("riesz-I", "kotzriesz-II", "triesz-I", "beta-riesz-II"):
        a = cli_sample(tmp_path, dist + "a", 1, dist)
        b = cli_sample(tmp_path, dist + "b", 4, dist)
        results.append(a == b and len(a) > 0)
    assert report(8, "reproducibility", all(results),
                  f"{sum(results)}/{len(results)} laws give bitwise-identical CLI output in two "
                  "runs with the same seed (1 and 4 threads, 30000 rows)")
