import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bragg_feedback import (REFERENCE_PARAMS, FeedbackConfig, FilterState, IntegratorConfig,
                            ModeState, control_intensity, filter_derivative,
                            shot_noise_increment, simulate)
from bragg_feedback import _kernels
from bragg_feedback.control import stationary_filter

import oracles

P = REFERENCE_PARAMS


def test_config_validation_and_f():
    fb = FeedbackConfig(gain=6000, tau=0.02)
    assert fb.f == pytest.approx(120.0, rel=1e-15)
    assert not fb.shot_noise
    assert fb.with_(mode="shot-noise").shot_noise
    for bad in (dict(gain=-1, tau=1), dict(gain=1, tau=0), dict(gain=1, tau=1, s_initial=-1),
                dict(gain=1, tau=1, rng_seed=2**64), dict(gain=1, tau=1, mode="bogus")):
        with pytest.raises(ValueError):
            FeedbackConfig(**bad)


def test_filter_derivative_examples():
    fb = FeedbackConfig(gain=6000, tau=0.02)
    assert filter_derivative(FilterState(0.0), 0.0, P, fb) == 0
    c = 3.7e-4
    s_star = stationary_filter(c, P, fb)
    assert s_star == pytest.approx(fb.tau * P.kappa * c, rel=1e-15)
    assert filter_derivative(FilterState(s_star), c, P, fb) == pytest.approx(0, abs=1e-15)


def _filter_only(c, tau, t_end, dt, s0=0.0):
    # empty mode state: nothing moves except the filter, driven at rate kappa*c
    s = s0
    for _ in range(round(t_end / dt)):
        *_, s = _kernels.rk4_step(0j, 0j, 0j, s, P.u0, P.eta, P.kappa, 1.0, tau, 0.0, dt,
                                  True, P.kappa * c)
    return s


@pytest.mark.parametrize("tau", [0.013, 0.02, 0.1])
def test_constant_signal_against_quadrature(tau):
    c = 4e-4
    for t in (0.5 * tau, tau, 3 * tau):
        s = _filter_only(c, tau, t, 1e-4)
        quad = oracles.filter_by_quadrature(lambda _: c, t, P.kappa, tau)
        closed = tau * P.kappa * c * (1 - math.exp(-t / tau))
        assert quad == pytest.approx(closed, rel=1e-12)
        assert abs(s - quad) / quad < 1e-6


def test_filter_matches_quadrature_on_free_dynamics():
    # K = 0: the modes evolve on their own, so |alpha(t)|^2 can be computed
    # independently (high-order adaptive solver) and fed to the kernel integral
    from scipy.integrate import solve_ivp

    state = ModeState(99.0, 5.0 + 3.0j, 2.0 - 4.0j)
    p = P.__class__(kappa=P.kappa, u0=P.u0, eta=P.eta, n_atoms=state.total_occupation)
    tau, s0 = 0.05, 0.3
    fb = FeedbackConfig(gain=0.0, tau=tau, s_initial=s0)
    traj = simulate(state, p, fb, IntegratorConfig(dt=1e-4, t_end=1.0, record_stride=1000))

    def rhs(_, y):
        a0, aL, aR = y[0] + 1j * y[1], y[2] + 1j * y[3], y[4] + 1j * y[5]
        _, d0, dL, dR = _sym_free(a0, aL, aR)
        return [d0.real, d0.imag, dL.real, dL.imag, dR.real, dR.imag]

    y0 = [state.a0.real, state.a0.imag, state.aL.real, state.aL.imag,
          state.aR.real, state.aR.imag]
    sol = solve_ivp(rhs, (0, 1.0), y0, method="DOP853", rtol=1e-12, atol=1e-12,
                    dense_output=True)

    def signal(t):
        y = sol.sol(t)
        a0, aL, aR = y[0] + 1j * y[1], y[2] + 1j * y[3], y[4] + 1j * y[5]
        return abs(_sym_free(a0, aL, aR)[0]) ** 2

    for t, s in zip(traj.times[1:], traj.filter_s[1:]):
        want = oracles.filter_by_quadrature(signal, t, p.kappa, tau, s0)
        assert abs(s - want) / want < 1e-6


def _sym_free(a0, aL, aR):
    # plain-python three-mode equations with I = 0
    u0, eta, kappa = P.u0, P.eta, P.kappa
    al = -2j * u0 * eta * (aL.conjugate() * a0 + a0.conjugate() * aR) / kappa
    d0 = -1j * u0 * eta * (al.conjugate() * aR + al * aL)
    dL = -4j * aL - 1j * u0 * eta * al.conjugate() * a0
    dR = -4j * aR - 1j * u0 * eta * al * a0
    return al, d0, dL, dR


def test_control_intensity_examples():
    assert control_intensity(FilterState(0.02), 123.0,
                             FeedbackConfig(gain=6000, tau=0.02)) == pytest.approx(120, rel=1e-15)
    assert control_intensity(FilterState(0.0), 0.0,
                             FeedbackConfig(gain=6000, tau=0.02, gain_d=-50)) == 0
    pd = FeedbackConfig(gain=9000, tau=0.013, gain_d=-1000)
    assert control_intensity(FilterState(0.01), 0.05, pd) == pytest.approx(40.0, rel=1e-14)


@given(s=st.floats(0, 10), d1=st.floats(-1e3, 1e3), d2=st.floats(-1e3, 1e3),
       k=st.floats(0, 1e4))
def test_pd_reduces_to_p(s, d1, d2, k):
    fb = FeedbackConfig(gain=k, tau=0.1)
    assert control_intensity(FilterState(s), d1, fb) == control_intensity(FilterState(s), d2, fb)


def test_shot_noise_zero_rate():
    rng = np.random.default_rng(1)
    assert all(shot_noise_increment(0.0, 1e-3, rng, P) == 0 for _ in range(100))


def test_shot_noise_moments():
    dt = 1e-4
    intensity = 3.0 / (P.kappa * dt)
    rng = np.random.default_rng(2024)
    n = 10 ** 6
    x = np.fromiter((shot_noise_increment(intensity, dt, rng, P) for _ in range(n)),
                    dtype=np.int64, count=n)
    mu = 3.0
    mean, var = x.mean(), x.var(ddof=1)
    assert abs(mean - mu) <= 3 * math.sqrt(mu / n)
    # Var of the sample variance for Poisson: (mu + 2 mu^2 (n/(n-1))) / n
    assert abs(var - mu) <= 3 * math.sqrt((mu + 2 * mu * mu) / n)


def test_shot_noise_deterministic_given_seed():
    def draws(seed):
        rng = np.random.default_rng(seed)
        return [shot_noise_increment(2e-3, 1e-2, rng, P) for _ in range(500)]

    assert draws(7) == draws(7)
    assert draws(7) != draws(8)
