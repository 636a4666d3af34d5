import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.integrate import quad, simpson, trapezoid

from conftest import forward_slope, oracle_observables, taylor_at_zero
from qsl_boson import oracle
from qsl_boson.cf_dynamics import DampingClock, clock
from qsl_boson.coherent import (
    SMOOTHED_VARIANTS,
    CoherentScenario,
    avg_speed_vF,
    avg_speed_vtilde,
    avg_speed_vtilde_numeric,
    fidelity_exact,
    fidelity_smoothed,
    hs_distance_smoothed,
    purity_coherent,
    qslt_coherent,
    qslt_coherent_grid,
    speed_bound,
    vacuum_bundle,
    vacuum_sample,
)
from qsl_boson.qsl_core import PhysParams, hs_distance_from_fp, static_qsl_coherent


def scen(alpha=2.0, nb=0.0, ratio=10.0):
    return CoherentScenario(PhysParams.from_ratio(ratio, nb), alpha)


def analytic_clock(p, t):
    # the closed forms are analytic in t, so negative times are usable for central differences
    eta = math.exp(-p.gamma * t)
    return DampingClock(t, eta, p.nbar_R * (1 - eta), 1 - eta)


def test_fidelity_exact_examples():
    s = scen(2.0, 0.5)
    assert fidelity_exact(s, clock(s.params, 0.0)) == pytest.approx(1.0, abs=1e-15)
    v = scen(0.0, 0.5)
    c = clock(v.params, 0.8)
    assert fidelity_exact(v, c) == pytest.approx(1 / (1 + c.nbar_T))
    e = scen(math.sqrt(2.0), 0.0)
    c = clock(e.params, 0.5)
    assert fidelity_smoothed("minus", e, c) <= fidelity_exact(e, c) <= fidelity_smoothed("plus", e, c)


def test_smoothed_variants_collapse_without_amplitude():
    s = scen(0.0, 0.7)
    c = clock(s.params, 1.1)
    for v in SMOOTHED_VARIANTS:
        assert fidelity_smoothed(v, s, c) == pytest.approx(1 / (1 + c.nbar_T), rel=1e-14)
    with pytest.raises(ValueError):
        fidelity_smoothed("bogus", s, c)


def test_smoothed_strict_hierarchy():
    s = scen(math.sqrt(2.0), 0.0)
    c = clock(s.params, 1.0)
    f = {v: fidelity_smoothed(v, s, c) for v in SMOOTHED_VARIANTS}
    assert f["plus"] > f["arithmetic"] > f["period_avg"] > f["zero"] > f["minus"]


@pytest.mark.parametrize("variant", SMOOTHED_VARIANTS)
def test_smoothed_steady_state(variant):
    s = scen(1.5, 0.8)
    lim = math.exp(-1.5**2 / 1.8) / 1.8
    assert fidelity_smoothed(variant, s, clock(s.params, 60.0)) == pytest.approx(lim, rel=1e-10)


def test_period_average_matches_numeric_average():
    # F⁽ᵀ⁾ is the ωt average of the exact oscillating exponent at frozen η
    s = scen(1.2, 0.4)
    c = clock(s.params, 0.7)
    d = 1 + c.nbar_T
    rt = math.sqrt(c.eta)
    avg, _ = quad(lambda th: math.exp(-s.alpha_abs2 * (1 - 2 * rt * math.cos(th) + c.eta) / d) / d,
                  0, 2 * math.pi)
    assert fidelity_smoothed("period_avg", s, c) == pytest.approx(avg / (2 * math.pi), rel=1e-12)


def test_purity_examples():
    assert purity_coherent(clock(PhysParams(nbar_R=0.0), 3.0)) == 1.0
    assert purity_coherent(clock(PhysParams(nbar_R=1.0), math.log(2))) == pytest.approx(0.5)
    assert purity_coherent(clock(PhysParams(nbar_R=2.0), 60.0)) == pytest.approx(0.2)


def test_speed_bound_modes():
    v = scen(0.0, 0.6)
    c = clock(v.params, 0.9)
    ref = math.sqrt(2) * 0.6 * c.eta / (1 + 2 * c.nbar_T) ** 1.5
    assert speed_bound(v, c, "exact") == pytest.approx(ref, rel=1e-14)
    assert speed_bound(v, c, "low_freq") == pytest.approx(ref, rel=1e-14)
    d = scen(2.0, 0.0)
    c = clock(d.params, 0.9)
    assert speed_bound(d, c, "exact") == pytest.approx(speed_bound(d, c, "high_freq"), rel=1e-15)
    with pytest.raises(ValueError):
        speed_bound(d, c, "medium")


def test_speed_bound_against_oracle():
    s = scen(2.0, 0.5)
    _, _, obs = oracle_observables(oracle.Coherent(2.0), 0.5, (0.0, 0.5, 1.0))
    assert speed_bound(s, clock(s.params, 1.0), "exact") == pytest.approx(obs[-1].v_tilde, abs=1e-6)


def test_avg_speed_vF():
    s = scen(1.0, 1.0)
    p = s.params
    assert avg_speed_vF(s, clock(p, 0.0)) == static_qsl_coherent(p, 1.0)
    z = scen(2.0, 0.0)
    assert avg_speed_vF(z, clock(z.params, 2.5)) == pytest.approx(static_qsl_coherent(z.params, 2.0))
    ts = np.linspace(0, 2.0, 200001)
    sqrtP = np.sqrt([purity_coherent(clock(p, t)) for t in ts])
    ref = static_qsl_coherent(p, 1.0) * trapezoid(sqrtP, ts) / 2.0
    assert avg_speed_vF(s, clock(p, 2.0)) == pytest.approx(ref, rel=1e-8)


def test_avg_speed_vF_continuous_across_short_time_switch():
    s = scen(1.0, 1.3)
    p = s.params
    vF0 = static_qsl_coherent(p, 1.0)
    for t in (0.999e-6, 1.001e-6):
        ref = quad(lambda u: math.sqrt(purity_coherent(clock(p, u))), 0, t, epsabs=0, epsrel=1e-13)[0] / t
        assert avg_speed_vF(s, clock(p, t)) / vF0 == pytest.approx(ref, rel=1e-14)


def test_avg_speed_vtilde_closed_forms():
    d = scen(2.0, 0.0)
    p = d.params
    t = 1.3
    c = clock(p, t)
    ref = 2 * math.sqrt(2) * math.sqrt(1 + (p.gamma / (2 * p.omega)) ** 2) * p.omega * 2.0 * (1 - math.sqrt(c.eta)) / (p.gamma * t)
    assert avg_speed_vtilde(d, c, "dissipative_exact") == pytest.approx(ref, rel=1e-13)
    v = scen(0.0, 0.9)
    c = clock(v.params, t)
    assert avg_speed_vtilde(v, c, "low_freq") == pytest.approx(math.sqrt(2) / t * (1 - (1 + 2 * c.nbar_T) ** -0.5), rel=1e-13)
    with pytest.raises(ValueError):
        avg_speed_vtilde(scen(2.0, 0.5), c, "dissipative_exact")
    with pytest.raises(ValueError):
        avg_speed_vtilde(d, c, "other")


def test_avg_speed_vtilde_high_freq_against_trapezoid():
    s = scen(2.0, 0.5)
    ts = np.linspace(0, 1.0, 200001)
    v = [speed_bound(s, clock(s.params, t), "high_freq") for t in ts]
    assert avg_speed_vtilde(s, clock(s.params, 1.0), "high_freq") == pytest.approx(trapezoid(v, ts), rel=1e-8)


def test_avg_speed_vtilde_literal_log_form():
    # the displayed three-logarithm form, evaluated directly at moderate parameters
    s = scen(1.5, 0.7, ratio=5.0)
    p = s.params
    t = 0.9
    c = clock(p, t)
    A, B = 1 + 2 * p.nbar_R, 2 * p.nbar_R
    pre = math.sqrt(2) * math.sqrt((1 + (p.gamma / (2 * p.omega)) ** 2) / (A * B)) * p.omega * 1.5 / (p.gamma * t)
    brace = 2 * math.log(math.sqrt(A) + math.sqrt(B)) + 2 * math.log(math.sqrt(A) - math.sqrt(B * c.eta)) - math.log(1 + 2 * c.nbar_T)
    assert avg_speed_vtilde(s, c, "high_freq") == pytest.approx(pre * brace, rel=1e-12)


def test_avg_speed_vtilde_numeric_mode():
    s = scen(2.0, 0.5)
    c = clock(s.params, 1.0)
    ref, _ = quad(lambda t: speed_bound(s, clock(s.params, t), "exact"), 0, 1.0, epsabs=1e-13)
    assert avg_speed_vtilde_numeric(s, c) == pytest.approx(ref, rel=1e-10)
    numeric = qslt_coherent_grid(s, np.linspace(0, 1.0, 11), speed_mode="numeric")
    assert numeric[-1].vbar_tilde == pytest.approx(ref, rel=1e-10)


def test_short_time_series_of_fidelity_purity_speed():
    for a, nb in ((2.0, 0.0), (1.0, 0.5), (0.5, 2.0)):
        s = scen(a, nb)
        p = s.params
        h = 1e-4
        F = lambda t: fidelity_smoothed("plus", s, analytic_clock(p, t))
        P = lambda t: purity_coherent(analytic_clock(p, t))
        dF = (F(h) - F(-h)) / (2 * h)
        d2F = (F(h) - 2 * F(0) + F(-h)) / h**2
        assert dF == pytest.approx(-nb, rel=1e-6, abs=1e-7)
        assert d2F == pytest.approx(nb * (1 + 2 * nb) - 0.5 * a * a, rel=1e-5)
        dP = (P(h) - P(-h)) / (2 * h)
        d2P = (P(h) - 2 * P(0) + P(-h)) / h**2
        assert dP == pytest.approx(-2 * nb, rel=1e-6, abs=1e-7)
        assert d2P == pytest.approx(2 * nb * (1 + 4 * nb), rel=1e-5, abs=1e-6)
        vF0 = static_qsl_coherent(p, a)
        c0, c1, c2 = taylor_at_zero(lambda t: avg_speed_vF(s, clock(p, t)) / vF0)
        assert c0 == pytest.approx(1.0, abs=1e-10)
        assert c1 == pytest.approx(-0.5 * nb, rel=1e-6, abs=1e-10)
        assert c2 / 2 == pytest.approx(nb * (1 + 3 * nb) / 6, rel=1e-6, abs=1e-9)


def test_short_time_series_of_averaged_speeds():
    s = scen(2.0, 0.5)
    p = s.params
    pre = math.sqrt(2) * math.sqrt(1 + (p.gamma / (2 * p.omega)) ** 2) * p.omega * 2.0
    c0, c1, c2 = taylor_at_zero(lambda t: avg_speed_vtilde(s, clock(p, t), "high_freq") / pre)
    nb = p.nbar_R
    assert c0 == pytest.approx(1.0, abs=1e-10)
    assert c1 == pytest.approx(-0.25 * (1 + 4 * nb), rel=1e-6)
    assert c2 / 2 == pytest.approx((1 + 16 * nb + 32 * nb**2) / 24, rel=1e-6)
    v = scen(0.0, 0.5)
    c0, c1, c2 = taylor_at_zero(lambda t: avg_speed_vtilde(v, clock(p, t), "low_freq") / (math.sqrt(2) * nb))
    assert c1 == pytest.approx(-0.5 * (1 + 3 * nb), rel=1e-6)
    assert c2 / 2 == pytest.approx((1 + 9 * nb + 15 * nb**2) / 6, rel=1e-6)


def test_hs_slope_at_origin():
    for a, nb in ((2.0, 0.0), (1.0, 0.5), (0.0, 1.5)):
        s = scen(a, nb)
        slope = forward_slope(lambda t: hs_distance_smoothed(s, clock(s.params, t)))
        assert slope == pytest.approx(math.sqrt(2) * math.sqrt(nb**2 + 0.25 * a * a), rel=1e-6)


@pytest.mark.parametrize("a,nb", [(2.0, 0.5), (1.0, 2.0), (0.3, 0.1)])
def test_long_time_limits(a, nb):
    s = scen(a, nb)
    p = s.params
    t = 20.0
    c = clock(p, t)
    eta = c.eta
    A, B = 1 + 2 * nb, 2 * nb
    F_inf = math.exp(-a * a / (1 + nb)) / (1 + nb)
    assert fidelity_smoothed("plus", s, c) == pytest.approx(F_inf * (1 + 2 * a * a / (1 + nb) * math.sqrt(eta)), abs=1e-6)
    assert purity_coherent(c) == pytest.approx((1 + B / A * eta) / A, abs=1e-6)
    vF0 = static_qsl_coherent(p, a)
    vF_lt = vF0 / math.sqrt(A) * (1 + 2 / t * math.log(2 / (1 + A**-0.5)))
    assert avg_speed_vF(s, c) == pytest.approx(vF_lt, rel=1e-6)
    pre = math.sqrt(2) * math.sqrt((1 + (p.gamma / (2 * p.omega)) ** 2) / (A * B)) * p.omega * a / t
    btv1 = pre * (2 * math.log(math.sqrt(A) + math.sqrt(B)) - 2 * math.sqrt(B / A * eta))
    assert avg_speed_vtilde(s, c, "high_freq") == pytest.approx(btv1, rel=1e-6)
    btv2 = math.sqrt(2) / t * (1 - A**-0.5 * (1 + nb / A * eta))
    assert avg_speed_vtilde(s, c, "low_freq") == pytest.approx(btv2, rel=1e-6)


@settings(deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 4.0))
def test_steady_state_sign_rule(a, nb):
    rule = (1 + nb) * math.log(1 + nb / (1 + nb)) - a * a
    assume(abs(rule) > 1e-3)
    s = scen(a, nb)
    c = clock(s.params, 60.0)
    diff = fidelity_smoothed("plus", s, c) - purity_coherent(c)
    assert math.copysign(1, diff) == math.copysign(1, rule)


@given(st.floats(0.05, 3.0), st.floats(0.0, 4.0))
def test_interaction_fidelity_strictly_decreasing(a, nb):
    s = scen(a, nb)
    ts = np.linspace(0, 8, 161)
    F = [fidelity_smoothed("plus", s, clock(s.params, t)) for t in ts]
    assert np.all(np.diff(F) < 0)


@pytest.mark.parametrize("a,nb", [(math.sqrt(2), 0.0), (math.sqrt(2), 0.5), (1.0, 2.0)])
def test_envelope_property(a, nb):
    s = scen(a, nb)
    p = s.params
    k = np.arange(0, 401)
    for t in k * math.pi / (20 * p.omega):
        c = clock(p, t)
        lo, hi = fidelity_smoothed("minus", s, c), fidelity_smoothed("plus", s, c)
        f = fidelity_exact(s, c)
        assert lo - 1e-15 <= f <= hi + 1e-15
        # smoothed infidelity and HS distance never exceed the exact ones
        P = purity_coherent(c)
        assert 1 - hi <= 1 - f + 1e-15
        assert hs_distance_smoothed(s, c) <= hs_distance_from_fp(min(f, 1.0), P) + 1e-12
    for n in range(6):
        c = clock(p, n * math.pi / p.omega)
        f = fidelity_exact(s, c)
        ref = fidelity_smoothed("plus" if n % 2 == 0 else "minus", s, c)
        assert f == pytest.approx(ref, rel=1e-12)


def test_qslt_coherent_fig1_ordering():
    s = scen(2.0, 0.0)
    for t in np.linspace(0.05, 3.0, 60):
        r = qslt_coherent(s, clock(s.params, t))
        assert r.tau_tilde_G > r.tau_tilde_F > r.tau_F_min
        assert r.tau_tilde_G < t


def test_qslt_coherent_short_time():
    s = scen(2.0, 0.5)
    r = qslt_coherent(s, clock(s.params, 0.0))
    assert r.tau_F == r.tau_F_min == r.tau_tilde_F == r.tau_tilde_G == 0.0
    r = qslt_coherent(s, clock(s.params, 1e-7))
    assert r.tau_tilde_G == pytest.approx(
        1e-7 * math.sqrt(2) * math.sqrt(0.25 + 1.0) / avg_speed_vtilde(s, clock(s.params, 0.0), "high_freq"), rel=1e-4)


def test_qslt_coherent_ratio_profile_monotone():
    s = scen(2.0, 0.0)
    ts = np.linspace(0.01, 10, 200)
    r = [qslt_coherent(s, clock(s.params, t)).tau_tilde_G / t for t in ts]
    assert np.all(np.diff(r) < 0)


def test_qslt_coherent_modes():
    s = scen(2.0, 0.5)
    c = clock(s.params, 1.0)
    auto = qslt_coherent(s, c)
    high = qslt_coherent(s, c, "high_freq")
    assert auto.vbar_tilde == high.vbar_tilde
    numeric = qslt_coherent(s, c, "numeric")
    assert numeric.vbar_tilde > high.vbar_tilde
    assert numeric.tau_tilde_G <= 1.0 + 1e-9


def test_vacuum_bundle_examples():
    p = PhysParams(nbar_R=0.5)
    t = math.log(2)
    vb = vacuum_bundle(p, clock(p, t))
    assert vb.ttauG0 / t == pytest.approx((1 + math.sqrt(1.5)) / (2 * math.sqrt(1.25)), rel=1e-14)
    assert vb.ttauG0 / t == pytest.approx(0.99494, abs=1e-5)
    assert vb.G0 == pytest.approx(hs_distance_from_fp(vb.F0, vb.P0), abs=1e-14)
    q = PhysParams(nbar_R=10.0)
    far = vacuum_bundle(q, clock(q, 60.0))
    assert far.ttauG0 / 60.0 == pytest.approx((1 + math.sqrt(21)) / (2 * math.sqrt(11)), rel=1e-10)
    zero = vacuum_bundle(PhysParams(nbar_R=0.0), clock(PhysParams(), 1.0))
    assert zero.ttauG0 == zero.ttauF0 == 0.0


def test_vacuum_bundle_against_oracle_qslt():
    times = tuple(np.linspace(0, math.log(2), 201))
    params, grid, obs = oracle_observables(oracle.Coherent(0j), 0.5, times)
    vbar = simpson([o.v_tilde for o in obs], x=grid) / grid[-1]
    ttauG = obs[-1].G / vbar
    vb = vacuum_bundle(params, clock(params, grid[-1]))
    assert ttauG == pytest.approx(vb.ttauG0, rel=1e-6)


def test_vacuum_sample_consistent_with_bundle():
    p = PhysParams(nbar_R=2.0)
    c = clock(p, 0.7)
    vb, s = vacuum_bundle(p, c), vacuum_sample(p, c)
    assert s.tau_tilde_G == pytest.approx(vb.ttauG0, rel=1e-13)
    assert s.tau_tilde_F == pytest.approx(vb.ttauF0, rel=1e-13)
    assert s.tau_F_min == pytest.approx(vb.tauF0, rel=1e-13)
