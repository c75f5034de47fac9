"""Compiled inner loops for the three-mode equations and the feedback filter.

Everything here works on plain scalars so numba can compile it in nopython
mode. The public modules wrap these with dataclasses.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def scattered(a0, aL, aR, u0, eta, kappa):
    return -2j * u0 * eta * (np.conj(aL) * a0 + np.conj(a0) * aR) / kappa


@njit(cache=True, nogil=True)
def mode_rhs(a0, aL, aR, intensity, u0, eta, kappa):
    al = scattered(a0, aL, aR, u0, eta, kappa)
    lattice = 0.5j * u0 * intensity
    d0 = -1j * u0 * eta * (np.conj(al) * aR + al * aL) + lattice * (aR + aL)
    dL = -4j * aL - 1j * u0 * eta * np.conj(al) * a0 + lattice * a0
    dR = -4j * aR - 1j * u0 * eta * al * a0 + lattice * a0
    return d0, dL, dR


@njit(cache=True, nogil=True)
def coupled_rhs(a0, aL, aR, s, u0, eta, kappa, gain, tau, gain_d, use_drive, drive):
    """Right-hand side of modes + filter; ``drive`` replaces kappa*|alpha|^2 when ``use_drive``."""
    if use_drive:
        rate = drive
    else:
        al = scattered(a0, aL, aR, u0, eta, kappa)
        rate = kappa * (al.real * al.real + al.imag * al.imag)
    ds = rate - s / tau
    intensity = gain * s + gain_d * ds
    d0, dL, dR = mode_rhs(a0, aL, aR, intensity, u0, eta, kappa)
    return d0, dL, dR, ds


@njit(cache=True, nogil=True)
def rk4_step(a0, aL, aR, s, u0, eta, kappa, gain, tau, gain_d, dt, use_drive, drive):
    h = 0.5 * dt
    k10, k1L, k1R, k1s = coupled_rhs(a0, aL, aR, s, u0, eta, kappa, gain, tau, gain_d,
                                     use_drive, drive)
    k20, k2L, k2R, k2s = coupled_rhs(a0 + h * k10, aL + h * k1L, aR + h * k1R, s + h * k1s,
                                     u0, eta, kappa, gain, tau, gain_d, use_drive, drive)
    k30, k3L, k3R, k3s = coupled_rhs(a0 + h * k20, aL + h * k2L, aR + h * k2R, s + h * k2s,
                                     u0, eta, kappa, gain, tau, gain_d, use_drive, drive)
    k40, k4L, k4R, k4s = coupled_rhs(a0 + dt * k30, aL + dt * k3L, aR + dt * k3R, s + dt * k3s,
                                     u0, eta, kappa, gain, tau, gain_d, use_drive, drive)
    w = dt / 6.0
    return (a0 + w * (k10 + 2.0 * k20 + 2.0 * k30 + k40),
            aL + w * (k1L + 2.0 * k2L + 2.0 * k3L + k4L),
            aR + w * (k1R + 2.0 * k2R + 2.0 * k3R + k4R),
            s + w * (k1s + 2.0 * k2s + 2.0 * k3s + k4s))


@njit(cache=True, nogil=True)
def _is_finite(a0, aL, aR, s):
    return (np.isfinite(a0.real) and np.isfinite(a0.imag) and np.isfinite(aL.real)
            and np.isfinite(aL.imag) and np.isfinite(aR.real) and np.isfinite(aR.imag)
            and np.isfinite(s))


@njit(cache=True, nogil=True)
def _control(a0, aL, aR, s, u0, eta, kappa, gain, tau, gain_d, use_drive, drive):
    if use_drive:
        rate = drive
    else:
        al = scattered(a0, aL, aR, u0, eta, kappa)
        rate = kappa * (al.real * al.real + al.imag * al.imag)
    return gain * s + gain_d * (rate - s / tau)


@njit(cache=True, nogil=True)
def integrate(a0, aL, aR, s, u0, eta, kappa, gain, tau, gain_d, dt, n_steps, stride,
              stochastic, rng):
    """Fixed-step RK4 from t=0 over ``n_steps``, sampling every ``stride`` steps.

    Returns (amplitudes, filter, control, counts, n_recorded, bad_step, final)
    where ``bad_step`` is -1 on success or the 1-based step that produced a
    non-finite state. In stochastic mode one Poisson count is drawn per step
    from the rate at the start of the step and held across the substages.
    """
    n_rec = n_steps // stride + 1
    amps = np.empty((n_rec, 3), dtype=np.complex128)
    filt = np.empty(n_rec)
    ctrl = np.empty(n_rec)
    counts = np.zeros(n_rec, dtype=np.int64)

    drive = 0.0
    amps[0, 0] = a0
    amps[0, 1] = aL
    amps[0, 2] = aR
    filt[0] = s
    ctrl[0] = _control(a0, aL, aR, s, u0, eta, kappa, gain, tau, gain_d, False, 0.0)
    k = 1
    window = 0
    for n in range(n_steps):
        if stochastic:
            al = scattered(a0, aL, aR, u0, eta, kappa)
            mean = kappa * (al.real * al.real + al.imag * al.imag) * dt
            c = rng.poisson(mean) if mean > 0.0 else 0
            window += c
            drive = c / dt
        a0, aL, aR, s = rk4_step(a0, aL, aR, s, u0, eta, kappa, gain, tau, gain_d, dt,
                                 stochastic, drive)
        if not _is_finite(a0, aL, aR, s):
            return amps, filt, ctrl, counts, k, n + 1, (a0, aL, aR, s)
        if (n + 1) % stride == 0:
            amps[k, 0] = a0
            amps[k, 1] = aL
            amps[k, 2] = aR
            filt[k] = s
            ctrl[k] = _control(a0, aL, aR, s, u0, eta, kappa, gain, tau, gain_d,
                               stochastic, drive)
            counts[k] = window
            window = 0
            k += 1
    return amps, filt, ctrl, counts, k, -1, (a0, aL, aR, s)
