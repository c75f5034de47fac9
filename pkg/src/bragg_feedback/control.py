"""Measurement filter and feedback control laws.

The exponential kernel is carried as a single filter variable obeying
ds/dt = rate - s/tau, which is exact for that kernel. The derivative term of
the PD law uses this analytic ds/dt, never a finite difference.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .model import SystemParams


class FeedbackMode(str, Enum):
    DETERMINISTIC = "deterministic"
    SHOT_NOISE = "shot-noise"


# Feedback seed that reliably kicks the uniform condensate over the
# unstable low branch for all reference configurations (see scripts/seed_scan.py).
DEFAULT_S_INITIAL = 0.5


@dataclass(frozen=True)
class FeedbackConfig:
    gain: float
    tau: float
    gain_d: float = 0.0
    s_initial: float = DEFAULT_S_INITIAL
    mode: FeedbackMode = FeedbackMode.DETERMINISTIC
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", FeedbackMode(self.mode))
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if not self.gain >= 0:
            raise ValueError(f"gain must be >= 0, got {self.gain}")
        if not self.s_initial >= 0:
            raise ValueError(f"s_initial must be >= 0, got {self.s_initial}")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise ValueError("rng_seed must fit in an unsigned 64-bit integer")

    @property
    def f(self) -> float:
        """Combined feedback parameter F = K * tau."""
        return self.gain * self.tau

    @property
    def shot_noise(self) -> bool:
        return self.mode is FeedbackMode.SHOT_NOISE

    def with_(self, **changes) -> FeedbackConfig:
        return replace(self, **changes)


@dataclass(frozen=True)
class FilterState:
    s: float


def filter_derivative(filt: FilterState, scattered_intensity: float,
                      params: SystemParams, fb: FeedbackConfig) -> float:
    return params.kappa * scattered_intensity - filt.s / fb.tau


def control_intensity(filt: FilterState, ds_dt: float, fb: FeedbackConfig) -> float:
    """Lattice intensity I = K s + K_d ds/dt. Not clamped; may be negative."""
    return fb.gain * filt.s + fb.gain_d * ds_dt


def shot_noise_increment(scattered_intensity: float, dt: float,
                         rng: np.random.Generator, params: SystemParams) -> int:
    """Photon count in a step of length ``dt``, Poisson with mean kappa*|alpha|^2*dt.

    A full Poisson variate is drawn rather than a 0/1 click so that large
    rates do not force tiny steps.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    mean = params.kappa * scattered_intensity * dt
    if mean <= 0:
        return 0
    return int(rng.poisson(mean))


def stationary_filter(scattered_intensity: float, params: SystemParams,
                      fb: FeedbackConfig) -> float:
    return fb.tau * params.kappa * scattered_intensity
