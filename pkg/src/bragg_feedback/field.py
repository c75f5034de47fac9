"""Real-space density from the three mode amplitudes.

Positions are in units of the lattice wavelength, so k0 = 2 pi and the side
modes exp(+-2 i k0 x) have period 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrate import Trajectory
from .model import ModeState

PERIOD = 0.5
K0 = 2 * np.pi


@dataclass
class DensityGrid:
    x: np.ndarray
    rho: np.ndarray
    t: float | None = None

    def integral(self) -> float:
        return float(np.trapezoid(self.rho, self.x))

    def modulation_depth(self) -> float:
        hi, lo = self.rho.max(), self.rho.min()
        return float((hi - lo) / (hi + lo)) if hi + lo > 0 else 0.0


def lattice_grid(n_periods: int = 3, points_per_period: int = 256) -> np.ndarray:
    """Uniform grid over whole periods, both endpoints included."""
    return np.linspace(0.0, n_periods * PERIOD, n_periods * points_per_period + 1)


def _check_length(length_L: float) -> None:
    if not length_L > 0:
        raise ValueError("length_L must be positive")
    periods = length_L / PERIOD
    if abs(periods - round(periods)) > 1e-9 * max(1.0, periods):
        raise ValueError(f"length_L = {length_L} is not a whole number of lattice periods")


def _rho(amplitudes: np.ndarray, x: np.ndarray, length_L: float) -> np.ndarray:
    phase = np.exp(2j * K0 * x)
    a = amplitudes[..., None]
    field = a[..., 0, :] + a[..., 1, :] * phase + a[..., 2, :] * phase.conj()
    return np.abs(field) ** 2 / length_L


def density_profile(state: ModeState, x_grid=None, length_L: float | None = None) -> DensityGrid:
    """|a0 + aL e^{2ik0x} + aR e^{-2ik0x}|^2 / L on ``x_grid``.

    ``length_L`` defaults to the grid span, giving atoms per unit length.
    """
    x = lattice_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    length_L = float(x[-1] - x[0]) if length_L is None else length_L
    _check_length(length_L)
    amps = np.array([state.a0, state.aL, state.aR])
    return DensityGrid(x, _rho(amps, x, length_L))


def density_evolution(traj: Trajectory, x_grid=None,
                      length_L: float | None = None) -> list[DensityGrid]:
    x = lattice_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    length_L = float(x[-1] - x[0]) if length_L is None else length_L
    _check_length(length_L)
    rho = _rho(traj.amplitudes, x, length_L)
    return [DensityGrid(x, row, float(t)) for row, t in zip(rho, traj.times)]
