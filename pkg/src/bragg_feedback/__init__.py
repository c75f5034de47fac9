"""Feedback-controlled Bragg self-organisation of a BEC in the three-mode approximation."""

from .analysis import (Branch, CriticalPoint, Stability, StabilityProbe, bifurcation_sweep,
                       branch_state, classify_state, classify_stability,
                       critical_feedback_parameter, sqrt_approximation, steady_state_branches)
from .control import (FeedbackConfig, FeedbackMode, FilterState, control_intensity,
                      filter_derivative, shot_noise_increment)
from .field import DensityGrid, density_evolution, density_profile
from .integrate import (ConservationViolation, IntegrationDiverged, IntegratorConfig, Trajectory,
                        settling_time, simulate, simulate_ensemble, step)
from .model import (REFERENCE_PARAMS, BraggGeometry, ModeState, SystemParams, bragg_angle,
                    eom_rhs, scattered_field, uniform_state)

__all__ = [
    "Branch", "BraggGeometry", "ConservationViolation", "CriticalPoint", "DensityGrid",
    "FeedbackConfig", "FeedbackMode", "FilterState", "IntegrationDiverged", "IntegratorConfig",
    "ModeState", "REFERENCE_PARAMS", "Stability", "StabilityProbe", "SystemParams", "Trajectory",
    "bifurcation_sweep", "bragg_angle", "branch_state", "classify_state", "classify_stability",
    "control_intensity", "critical_feedback_parameter", "density_evolution", "density_profile",
    "eom_rhs", "filter_derivative", "scattered_field", "settling_time", "shot_noise_increment",
    "simulate", "simulate_ensemble", "sqrt_approximation", "steady_state_branches", "step",
    "uniform_state",
]
