import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bragg_feedback import (REFERENCE_PARAMS, FeedbackConfig, IntegratorConfig, ModeState,
                            density_evolution, density_profile, simulate, uniform_state)
from bragg_feedback.field import PERIOD, lattice_grid

P = REFERENCE_PARAMS
amp = st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False)


def test_grid_defaults():
    x = lattice_grid()
    assert len(x) == 3 * 256 + 1
    assert x[0] == 0 and x[-1] == pytest.approx(1.5, rel=1e-15)


def test_uniform_profile():
    g = density_profile(uniform_state(P))
    assert np.allclose(g.rho, P.n_atoms / 1.5, rtol=1e-15)
    assert g.modulation_depth() == pytest.approx(0, abs=1e-15)


def test_symmetric_lattice_profile():
    n = P.n_atoms
    a0, a1 = np.sqrt(n / 2), np.sqrt(n / 4)
    x = lattice_grid(2, 512)
    g = density_profile(ModeState(a0, a1, a1), x)
    want = (a0 + 2 * a1 * np.cos(4 * np.pi * x)) ** 2 / (x[-1] - x[0])
    assert np.allclose(g.rho, want, rtol=1e-12, atol=1e-9)
    # the field changes sign, so minor maxima sit between the main ones
    top = (g.rho[1:-1] > g.rho[:-2]) & (g.rho[1:-1] > g.rho[2:]) & (g.rho[1:-1] > 0.5 * g.rho.max())
    peaks = x[np.flatnonzero(top) + 1]
    assert np.allclose(np.diff(peaks), PERIOD)


@settings(max_examples=200)
@given(a0=amp, aL=amp, aR=amp, periods=st.integers(1, 6))
def test_norm_positivity_periodicity(a0, aL, aR, periods):
    s = ModeState(a0, aL, aR)
    x = lattice_grid(periods, 128)
    g = density_profile(s, x)
    assert np.all(g.rho >= 0)
    assert g.integral() == pytest.approx(s.total_occupation, rel=1e-6, abs=1e-12)
    shift = 128
    assert np.max(np.abs(g.rho[shift:] - g.rho[:-shift])) <= 1e-10 * max(g.rho.max(), 1e-300)


def test_length_must_be_whole_periods():
    with pytest.raises(ValueError):
        density_profile(uniform_state(P), lattice_grid(), length_L=0.7)
    with pytest.raises(ValueError):
        density_profile(uniform_state(P), lattice_grid(), length_L=-1.0)
    g = density_profile(uniform_state(P), lattice_grid(), length_L=1.0)
    assert g.rho[0] == pytest.approx(P.n_atoms)


def test_evolution_subcritical_frames_uniform():
    # modulation is first order in the side-mode amplitude, so in the seed
    fb = FeedbackConfig(gain=100, tau=0.02, s_initial=1e-3)
    traj = simulate(uniform_state(P), P, fb, IntegratorConfig(t_end=5.0, record_stride=1000))
    frames = density_evolution(traj)
    assert len(frames) == len(traj)
    for fr in frames:
        mean = fr.rho.mean()
        assert np.max(np.abs(fr.rho - mean)) <= 1e-3 * mean
        assert fr.integral() == pytest.approx(P.n_atoms, rel=1e-6)


def test_evolution_lattice_forms():
    fb = FeedbackConfig(gain=6000, tau=0.02)
    traj = simulate(uniform_state(P), P, fb, IntegratorConfig(t_end=30.0, record_stride=1000))
    frames = density_evolution(traj)
    depth = [fr.modulation_depth() for fr in frames]
    assert depth[0] < 1e-12
    assert depth[-1] > 0.9
    for fr in frames:
        assert fr.integral() == pytest.approx(P.n_atoms, rel=1e-6)
    assert [fr.t for fr in frames] == list(traj.times)
