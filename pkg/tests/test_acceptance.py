"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The iterative-decoding column runs density evolution for all nine rows and
then re-checks each threshold on a refined grid; expect about an hour on one
core. Set LDPCBOUND_THREADS to run rows in parallel.
"""

import math

import numpy as np
import pytest
from scipy.stats import norm

from ldpcbound.channels import ChannelModel, ParallelAssignment, g_moments
from ldpcbound.degree_distributions import EnsembleSpec
from ldpcbound.complexity_bounds import (
    complexity_lower_bound_at,
    ip_complexity_bound,
    parallel_complexity_bound,
    rp_complexity_bound,
)
from ldpcbound.density_evolution import DEConfig, bec_recursion, bec_threshold, de_bec_threshold, run_de
from ldpcbound.puncturing import (
    PuncturingPattern,
    average_puncturing_rate,
    ip_decomposition,
    punctured_design_rate,
)
from ldpcbound.rate_bounds import bec_rate_bound, ip_rate_bound, parallel_rate_bound
from ldpcbound.thresholds import sigma_from_eb_n0, table1

RNG_SEED = 20260


def report(capsys, name, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def it_rows(t1_ensemble, t1_patterns):
    return table1(t1_ensemble, t1_patterns, include_it=True)


def test_capacity_limit_column(capsys, ml_table, t1_reference):
    got = [r.capacity_db.eb_n0_db for r in ml_table]
    err = np.abs(np.array(got) - t1_reference["capacity_limit_db"])
    report(capsys, "capacity-limit column", bool(np.all(err <= 0.01)),
           f"max |diff| = {err.max():.4f} dB over 9 rows (tol 0.01); values {np.round(got, 3).tolist()}")


def test_ml_lower_bound_column(capsys, ml_table, t1_reference):
    got = [r.ml_db.eb_n0_db for r in ml_table]
    err = np.abs(np.array(got) - t1_reference["ml_lower_bound_db"])
    report(capsys, "ML lower-bound column", bool(np.all(err <= 0.02)),
           f"max |diff| = {err.max():.4f} dB over 9 rows (tol 0.02); values {np.round(got, 3).tolist()}")


def test_design_rate_column(capsys, t1_ensemble, t1_patterns, t1_reference):
    got = [punctured_design_rate(t1_ensemble, p) for p in t1_patterns]
    err = np.abs(np.array(got) - t1_reference["design_rate"])
    report(capsys, "design-rate column", bool(np.all(err <= 0.002)),
           f"max |diff| = {err.max():.5f} over 9 rows (tol 0.002); values {np.round(got, 4).tolist()}")


def test_iterative_column(capsys, it_rows, t1_reference):
    got = [r.it_db.eb_n0_db for r in it_rows]
    err = np.abs(np.array(got) - t1_reference["iterative_db"])
    report(capsys, "IT (density evolution) column", bool(np.all(err <= 0.05)),
           f"max |diff| = {err.max():.4f} dB over 9 rows (tol 0.05); values {np.round(got, 3).tolist()}")


def test_iterative_grid_refinement(capsys, it_rows, t1_ensemble):
    # the refined-grid threshold lies within +-0.01 dB of the default one iff
    # refined DE fails 0.01 dB below and succeeds 0.01 dB above it
    cfg = DEConfig().refined()
    bad = []
    for i, r in enumerate(it_rows):
        rate = r.design_rate
        t = r.it_db.eb_n0_db
        lo = run_de(t1_ensemble, ChannelModel.biawgn(sigma_from_eb_n0(t - 0.01, rate)), r.pattern, cfg)
        hi = run_de(t1_ensemble, ChannelModel.biawgn(sigma_from_eb_n0(t + 0.01, rate)), r.pattern, cfg)
        if lo.converged or not hi.converged:
            bad.append((i + 1, lo.status, hi.status))
    report(capsys, "IT grid-refinement stability", not bad,
           f"L=60, step=2^-6: threshold within +-0.01 dB for {9 - len(bad)}/9 rows" + (f"; off: {bad}" if bad else ""))


def test_fractional_gap_column(capsys, it_rows, t1_reference):
    gaps = np.array([r.fractional_gap for r in it_rows])
    err = np.abs(100 * gaps - t1_reference["fractional_gap_pct"])
    ordered = all(r.capacity_db.eb_n0_db <= r.ml_db.eb_n0_db <= r.it_db.eb_n0_db for r in it_rows)
    ok = bool(np.all(err <= 1.5) and np.all(gaps > 1 / 3) and ordered)
    report(capsys, "fractional-gap column", ok,
           f"max |diff| = {err.max():.2f} pp (tol 1.5), min gap = {gaps.min():.4f} (> 1/3), "
           f"capacity <= ML <= IT on all rows: {ordered}; values % {np.round(100 * gaps, 1).tolist()}")


def test_closed_form_equivalences(capsys, t1_ensemble, t1_patterns):
    rng = np.random.default_rng(RNG_SEED)
    worst_bec = 0.0
    for _ in range(100):
        J = int(rng.integers(1, 5))
        p = rng.uniform(0.05, 1, J)
        q = rng.uniform(0.05, 1, J)
        eps = rng.uniform(0.0, 0.9, J)
        dc = int(rng.choice([4, 6, 8, 12]))
        e = EnsembleSpec.from_terms([(3, 1.0)], [(dc, 1.0)])
        a = ParallelAssignment(tuple((pi / p.sum(), qi / q.sum(), ChannelModel.bec(x)) for pi, qi, x in zip(p, q, eps)))
        worst_bec = max(worst_bec, abs(bec_rate_bound(a, e.gamma).value - parallel_rate_bound(a, e.gamma).value))
    worst_ip = 0.0
    for pattern in t1_patterns:
        for sigma in (0.6, 0.9):
            ch = ChannelModel.biawgn(sigma)
            p0 = average_puncturing_rate(pattern, t1_ensemble.lam_node)
            ip = ip_rate_bound(t1_ensemble, ch, pattern).value
            gen = parallel_rate_bound(ip_decomposition(t1_ensemble, ch, pattern), t1_ensemble.gamma).value
            worst_ip = max(worst_ip, abs((1 - p0) * ip - gen))
    ok = worst_bec <= 1e-10 and worst_ip <= 1e-9
    report(capsys, "closed-form / generic equivalence", ok,
           f"BEC: max diff {worst_bec:.2e} on 100 assignments (tol 1e-10); "
           f"IP: max diff {worst_ip:.2e} on 9 patterns x 2 channels (tol 1e-9)")


def test_g_moment_oracles(capsys):
    msgs = []
    ok = True
    # BEC: g_p = 1 - eps for every p
    for eps in (0.0, 0.2, 0.5, 0.9):
        g, _ = g_moments(ChannelModel.bec(eps), 50)
        ok &= bool(np.all(g == 1 - eps))
    msgs.append(f"BEC exact: {ok}")
    # BSC: two point masses at +-ln((1-d)/d)
    worst = 0.0
    for d in (0.01, 0.05, 0.11, 0.25, 0.4):
        m = math.log((1 - d) / d)
        g, _ = g_moments(ChannelModel.bsc(d), 50)
        brute = np.array([(1 - d) * (1 + math.exp(-m)) * math.tanh(m / 2) ** (2 * p) for p in range(1, 51)])
        worst = max(worst, float(np.max(np.abs(g - brute))))
    ok &= worst <= 1e-14
    msgs.append(f"BSC max diff {worst:.1e} (tol 1e-14)")
    # BIAWGN vs a midpoint Riemann sum over l >= 0 with 10^6 cells
    worst = 0.0
    for sigma in (0.5, 0.8, 1.0, 1.5, 2.5):
        mu, s = 2 / sigma**2, 2 / sigma
        hi = mu + 40 * s
        n = 10**6
        l = (np.arange(n) + 0.5) * (hi / n)
        w = (norm.pdf(l, mu, s) + norm.pdf(-l, mu, s)) * (hi / n)
        t2 = np.tanh(l / 2) ** 2
        g, _ = g_moments(ChannelModel.biawgn(sigma), 10)
        ref = np.array([w @ t2**p for p in range(1, 11)])
        worst = max(worst, float(np.max(np.abs(g - ref))))
    ok &= worst <= 1e-9
    msgs.append(f"BIAWGN vs Riemann max diff {worst:.1e} (tol 1e-9)")
    # monotone in p for random channels
    rng = np.random.default_rng(RNG_SEED)
    mono = 0
    for _ in range(20):
        kind = rng.choice(["bec", "bsc", "biawgn"])
        u = rng.uniform(0.01, 0.99)
        param = {"bec": 0.99 * u, "bsc": 0.49 * u, "biawgn": 0.2 + 3 * u}[kind]
        g, _ = g_moments(ChannelModel(str(kind), param, rng.uniform(0, 0.5)), 50)
        mono += bool(np.all(np.diff(g) <= 0))
    ok &= mono == 20
    msgs.append(f"nonincreasing in p for {mono}/20 random channels")
    report(capsys, "g_p oracle suite", bool(ok), "; ".join(msgs))


def test_complexity_properties(capsys, t1_ensemble):
    rng = np.random.default_rng(RNG_SEED)
    pos = 0
    efold = 0.0
    for _ in range(100):
        J = int(rng.integers(1, 5))
        p = rng.uniform(0.05, 1, J)
        q = rng.uniform(0.05, 1, J)
        chans = []
        for _ in range(J):
            kind = rng.choice(["bec", "bsc", "biawgn"])
            chans.append({"bec": lambda: ChannelModel.bec(rng.uniform(0.02, 0.95)),
                          "bsc": lambda: ChannelModel.bsc(rng.uniform(0.005, 0.45)),
                          "biawgn": lambda: ChannelModel.biawgn(rng.uniform(0.3, 3.0))}[str(kind)]())
        a = ParallelAssignment(tuple((pi / p.sum(), qi / q.sum(), c) for pi, qi, c in zip(p, q, chans)))
        b = parallel_complexity_bound(a)
        pos += b.k2 > 0
        eps = float(rng.uniform(1e-6, 1))
        step = complexity_lower_bound_at(b, eps / math.e) - complexity_lower_bound_at(b, eps)
        efold = max(efold, abs(step - b.k2) / b.k2)
    order = 0
    grid = np.linspace(0.05, 0.95, 19)
    for eps in grid:
        a = ParallelAssignment.single(ChannelModel.bec(float(eps)))
        order += parallel_complexity_bound(a).k1 > parallel_complexity_bound(a, bec_variant=False).k1
    ch = ChannelModel.biawgn(0.9)
    base = parallel_complexity_bound(ParallelAssignment.single(ch))
    collapsed = [rp_complexity_bound(t1_ensemble, ch, alpha, 0.0) for alpha in (0.3, 1.0)]
    collapsed.append(ip_complexity_bound(t1_ensemble, ch, PuncturingPattern.none()))
    collapse = max(max(abs(b.k1 - base.k1), abs(b.k2 - base.k2)) for b in collapsed)
    ok = pos == 100 and efold <= 1e-12 and order == len(grid) and collapse <= 1e-12
    report(capsys, "complexity-bound properties", ok,
           f"K2 > 0 on {pos}/100; e-fold identity rel err {efold:.1e}; "
           f"BEC-variant K1 > generic K1 on {order}/{len(grid)} BEC grid points; "
           f"RP/IP collapse max diff {collapse:.1e}")


def test_density_evolution_oracle(capsys, reg36):
    cfg = DEConfig(max_iters=200)
    worst = 0.0
    for eps in (0.2, 0.35, 0.42, 0.43, 0.45, 0.6):
        trace = []
        run_de(reg36, ChannelModel.bec(eps), cfg=cfg, callback=lambda t, d: trace.append(d.masses[d.K]))
        x = bec_recursion(reg36, eps, len(trace))
        worst = max(worst, float(np.max(np.abs(np.array(trace) - x[1:]))))
    scalar = bec_threshold(reg36)
    de = de_bec_threshold(reg36, DEConfig(), tol=2e-4)
    ok = worst <= 1e-9 and abs(de - scalar) <= 1e-3
    report(capsys, "DE oracle (BEC projection)", ok,
           f"per-iteration max diff {worst:.1e} (tol 1e-9); threshold DE {de:.5f} vs scalar {scalar:.5f} "
           f"(|diff| {abs(de - scalar):.1e}, tol 1e-3)")
