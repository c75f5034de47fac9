"""Physical parameters and the semiclassical three-mode equations of motion.

Units are dimensionless: time is measured in recoil periods and the probe
detuning is fixed at zero. The atom number is a real number because the mode
amplitudes are continuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels


@dataclass(frozen=True)
class SystemParams:
    kappa: float
    u0: float
    eta: float
    n_atoms: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.u0 > 0:
            raise ValueError(f"u0 must be > 0, got {self.u0}")
        if not self.eta >= 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if not self.n_atoms > 0:
            raise ValueError(f"n_atoms must be > 0, got {self.n_atoms}")


#: Parameters used for every figure of the reference study.
REFERENCE_PARAMS = SystemParams(kappa=2500.0, u0=0.01, eta=1.0, n_atoms=1e4)


@dataclass(frozen=True)
class ModeState:
    """Amplitudes of the zero-momentum, left-running and right-running modes."""

    a0: complex
    aL: complex
    aR: complex

    def __post_init__(self):
        for name in ("a0", "aL", "aR"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def occupations(self) -> tuple[float, float, float]:
        return abs(self.a0) ** 2, abs(self.aL) ** 2, abs(self.aR) ** 2

    @property
    def total_occupation(self) -> float:
        return sum(self.occupations)

    def rotated(self, phase: float) -> ModeState:
        z = complex(math.cos(phase), math.sin(phase))
        return ModeState(self.a0 * z, self.aL * z, self.aR * z)

    def check_total(self, n_atoms: float, rtol: float = 1e-9) -> ModeState:
        """Raise if the state does not hold ``n_atoms`` atoms; return self otherwise."""
        total = self.total_occupation
        if abs(total - n_atoms) > rtol * n_atoms:
            raise ValueError(f"state holds {total!r} atoms, expected {n_atoms!r}")
        return self


@dataclass(frozen=True)
class BraggGeometry:
    d: float
    lambda_probe: float
    theta: float

    def __post_init__(self):
        if not self.d > 0 or not self.lambda_probe > 0:
            raise ValueError("d and lambda_probe must be positive")
        if not 0 <= self.theta < math.pi / 2:
            raise ValueError(f"theta must lie in [0, pi/2), got {self.theta}")


def uniform_state(params: SystemParams) -> ModeState:
    """All atoms in the zero-momentum mode."""
    return ModeState(math.sqrt(params.n_atoms), 0.0, 0.0)


def scattered_field(state: ModeState, params: SystemParams) -> complex:
    """Adiabatically eliminated amplitude of the Bragg-scattered light."""
    return complex(_kernels.scattered(state.a0, state.aL, state.aR,
                                      params.u0, params.eta, params.kappa))


def scattered_intensity(state: ModeState, params: SystemParams) -> float:
    return abs(scattered_field(state, params)) ** 2


def eom_rhs(state: ModeState, intensity: float, params: SystemParams) -> ModeState:
    """Time derivative of the three amplitudes for lattice intensity ``intensity``.

    The returned :class:`ModeState` holds derivatives, not amplitudes.
    """
    d0, dL, dR = _kernels.mode_rhs(state.a0, state.aL, state.aR, float(intensity),
                                   params.u0, params.eta, params.kappa)
    return ModeState(d0, dL, dR)


def occupation_rates(state: ModeState, intensity: float,
                     params: SystemParams) -> tuple[float, float, float]:
    """d|a_j|^2/dt for each mode, i.e. 2 Re(conj(a_j) da_j/dt)."""
    d = eom_rhs(state, intensity, params)
    return tuple(2.0 * (a.conjugate() * da).real
                 for a, da in zip((state.a0, state.aL, state.aR), (d.a0, d.aL, d.aR)))


def bragg_angle(d: float, lambda_probe: float) -> float | None:
    """Probe angle satisfying 2 d cos(theta) = lambda, or None if lambda > 2d."""
    if d <= 0 or lambda_probe <= 0:
        raise ValueError("d and lambda_probe must be positive")
    c = lambda_probe / (2.0 * d)
    if c > 1.0:
        return None
    return math.acos(c)
