import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldpcbound.channels import ChannelModel
from ldpcbound.degree_distributions import DegreePolynomial
from ldpcbound.density_evolution import (
    CONVERGED,
    PLATEAU,
    DEConfig,
    QuantizedDensity,
    bec_recursion,
    bec_threshold,
    check_update,
    de_bec_threshold,
    de_threshold,
    error_probability,
    initial_density,
    run_de,
    variable_update,
)
from ldpcbound.errors import DomainError
from ldpcbound.puncturing import PuncturingPattern

SMALL = DEConfig(L=4.0, step=0.5)


def point(cfg, k, K=None):
    K = cfg.K
    m = np.zeros(2 * K + 1)
    m[K + k] = 1.0
    return QuantizedDensity(m, cfg.step)


def test_config_validation():
    assert DEConfig().K == 960
    assert DEConfig().refined().K == 3840
    with pytest.raises(DomainError):
        DEConfig(L=1.0, step=0.3)
    with pytest.raises(DomainError):
        DEConfig(step=-1.0)


def test_initial_density():
    cfg = DEConfig()
    assert initial_density(ChannelModel.biawgn(0.9), 1.0, cfg).masses[cfg.K] == 1.0
    d = initial_density(ChannelModel.biawgn(0.01), 0.0, cfg)
    assert d.masses[-1] == pytest.approx(1.0)
    for sigma, pi in ((0.9, 0.0), (1.2, 0.3), (0.7, 0.1)):
        d = initial_density(ChannelModel.biawgn(sigma), pi, cfg)
        assert d.total() == pytest.approx(1.0, abs=1e-12)
        assert d.mean() == pytest.approx((1 - pi) * 2 / sigma**2, abs=cfg.step)
        assert d.symmetry_defect() < 1e-2


def test_error_probability_tie_rule():
    cfg = SMALL
    m = np.zeros(2 * cfg.K + 1)
    m[cfg.K] = 0.4
    m[0] = 0.1
    m[-1] = 0.5
    assert error_probability(QuantizedDensity(m, cfg.step)) == pytest.approx(0.3)


def test_variable_update_trivial():
    cfg = SMALL
    lam = DegreePolynomial.from_terms([(2, 1.0)])
    ch = initial_density(ChannelModel.biawgn(0.9), 0.0, cfg)
    out = variable_update({2: ch}, point(cfg, 0), lam)
    assert np.allclose(out.masses, ch.masses, atol=1e-14)
    lam3 = DegreePolynomial.from_terms([(3, 1.0)])
    top = point(cfg, cfg.K)
    assert variable_update({3: top}, top, lam3).masses[-1] == pytest.approx(1.0)


def test_variable_update_two_mass_convolution():
    cfg = SMALL
    K = cfg.K
    a = np.zeros(2 * K + 1)
    a[K + 1], a[K - 1] = 0.7, 0.3
    b = np.zeros(2 * K + 1)
    b[K + 2], b[K] = 0.6, 0.4
    out = variable_update({2: QuantizedDensity(a, cfg.step)}, QuantizedDensity(b, cfg.step),
                          DegreePolynomial.from_terms([(2, 1.0)]))
    want = np.zeros(2 * K + 1)
    want[K + 3] += 0.42
    want[K + 1] += 0.28 + 0.18
    want[K - 1] += 0.12
    assert np.allclose(out.masses, want, atol=1e-14)


def test_check_update_trivial():
    cfg = DEConfig()
    rho = DegreePolynomial.from_terms([(6, 1.0)], side="check")
    top = point(cfg, cfg.K)
    assert check_update(top, rho).masses[-1] == pytest.approx(1.0)
    m = initial_density(ChannelModel.biawgn(0.8), 0.25, cfg)
    out = check_update(m, rho)
    assert out.masses[cfg.K] >= m.masses[cfg.K] - 1e-15
    assert out.total() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.0, 0.6), st.sampled_from([2, 3, 5, 8]))
def test_check_update_conserves_mass(sigma, pi, d):
    cfg = DEConfig(L=10.0, step=2.0**-3)
    rho = DegreePolynomial.from_terms([(d, 1.0)], side="check")
    out = check_update(initial_density(ChannelModel.biawgn(sigma), pi, cfg), rho)
    assert out.total() == pytest.approx(1.0, abs=1e-9)
    assert np.all(out.masses >= 0.0)


def test_check_update_matches_tanh_rule_on_two_masses():
    # two independent messages at +-x: the output sign is the product of signs
    cfg = DEConfig(L=8.0, step=2.0**-4)
    K = cfg.K
    m = np.zeros(2 * K + 1)
    k = 32  # LLR 2.0
    m[K + k], m[K - k] = 0.8, 0.2
    out = check_update(QuantizedDensity(m, cfg.step), DegreePolynomial.from_terms([(3, 1.0)], side="check"))
    l = 2 * math.atanh(math.tanh(1.0) ** 2)
    pos = out.masses[K + 1:]
    neg = out.masses[:K]
    assert pos.sum() == pytest.approx(0.68, abs=1e-12) and neg.sum() == pytest.approx(0.32, abs=1e-12)
    assert abs(out.grid[K + 1 + int(np.argmax(pos))] - l) <= cfg.step


@pytest.mark.parametrize("eps", [0.3, 0.42, 0.43, 0.5])
def test_bec_projection_matches_recursion(reg36, eps):
    trace = []
    run_de(reg36, ChannelModel.bec(eps), cfg=DEConfig(max_iters=60),
           callback=lambda t, d: trace.append(d.masses[d.K]))
    x = bec_recursion(reg36, eps, len(trace))
    assert np.max(np.abs(np.array(trace) - x[1:])) <= 1e-9


def test_bec_threshold_oracle(reg36):
    assert bec_threshold(reg36) == pytest.approx(0.4294, abs=1e-4)
    assert de_bec_threshold(reg36, SMALL, tol=1e-4) == pytest.approx(bec_threshold(reg36), abs=1e-3)


def test_run_de_statuses(reg36):
    cfg = DEConfig(L=15.0, step=2.0**-4)
    good = run_de(reg36, ChannelModel.biawgn(0.80), cfg=cfg)
    assert good.status == CONVERGED and good.final_error < 1e-9
    assert all(b <= a + 1e-15 for a, b in zip(good.trace, good.trace[1:]))
    bad = run_de(reg36, ChannelModel.biawgn(0.95), cfg=cfg)
    assert bad.status == PLATEAU and bad.final_error > 1e-3
    text = good.trace_csv()
    assert text.startswith("iteration,error_probability\n0,")
    assert text.count("\n") == len(good.trace) + 1


def test_de_threshold_coarse_regular(reg36):
    # (3,6) BIAWGN threshold sigma* ~ 0.8809 (1.11 dB); the coarse grid lands close
    res = de_threshold(reg36, cfg=DEConfig(L=15.0, step=2.0**-4), tol_db=0.01, bracket_db=(1.0, 1.3))
    assert res.eb_n0_db == pytest.approx(1.11, abs=0.05)
    assert res.tolerance_db <= 0.01


def test_puncturing_never_helps(reg36):
    cfg = DEConfig(L=15.0, step=2.0**-4)
    ch = ChannelModel.biawgn(0.84)
    base = run_de(reg36, ch, cfg=cfg)
    punct = run_de(reg36, ch, PuncturingPattern.from_terms([(3, 0.05)]), cfg)
    assert base.converged
    assert punct.iterations >= base.iterations or not punct.converged
