"""Critical point, steady-state branches and their stability.

Stationary solutions rotate as a_j(t) = a_j exp(i w t). Writing u = (w + 2)^2
turns the quartic eigenfrequency condition into a quadratic in u:

    2B u^2 - (P - 2) u + 4P = 0,   P = (U0 N F)^2,   B = kappa^2 / (4 U0^4 eta^4 N^2)

and each admissible u gives w = -2 +- sqrt(u). Occupations follow from
n0 = N/2 (4 + w)/(2 + w), nL = nR = N/4 w/(2 + w).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .control import FeedbackConfig, FilterState
from .integrate import (ConservationViolation, IntegrationDiverged, IntegratorConfig,
                        simulate)
from .model import ModeState, SystemParams, scattered_intensity

log = logging.getLogger(__name__)

# |disc| below this fraction of p^2 counts as a double root
DEGENERATE_RTOL = 1e-12


class Stability(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class CriticalPoint:
    f_c: float
    omega_c_plus: float
    omega_c_minus: float
    n0_c_plus: float
    nL_c_plus: float
    n0_c_minus: float
    nL_c_minus: float

    @property
    def omega_c(self) -> tuple[float, float]:
        return self.omega_c_plus, self.omega_c_minus

    @property
    def n0_c(self) -> tuple[float, float]:
        return self.n0_c_plus, self.n0_c_minus

    @property
    def nL_c(self) -> tuple[float, float]:
        return self.nL_c_plus, self.nL_c_minus


@dataclass(frozen=True)
class Branch:
    omega: float
    n0: float
    nL: float
    nR: float
    f: float
    stability: Stability = Stability.UNDETERMINED

    @property
    def occupations(self) -> tuple[float, float, float]:
        return self.n0, self.nL, self.nR


def _pb(params: SystemParams) -> tuple[float, float]:
    a = (params.u0 * params.n_atoms) ** 2
    b = params.kappa ** 2 / (4 * params.u0 ** 4 * params.eta ** 4 * params.n_atoms ** 2)
    return a, b


def occupations_for(omega: float, n_atoms: float) -> tuple[float, float, float]:
    """Stationary (n0, nL, nR) for eigenfrequency ``omega``; n0 + 2 nL = N by construction."""
    n0 = 0.5 * n_atoms * (4 + omega) / (2 + omega)
    nL = 0.25 * n_atoms * omega / (2 + omega)
    # rebuild the larger one from the smaller to keep both accurate
    if abs(n0) < abs(nL):
        nL = 0.5 * (n_atoms - n0)
    else:
        n0 = n_atoms - 2 * nL
    return n0, nL, nL


def quartic_lhs(omega, params: SystemParams, f: float):
    """Left-hand side of the eigenfrequency equation (vectorised over omega)."""
    omega = np.asarray(omega, dtype=float)
    u = (2 + omega) ** 2
    a, b = _pb(params)
    return (4 + omega) * omega - 2 * u / (a * f * f) * (1 + b * u)


def quartic_residual(omega: float, params: SystemParams, f: float) -> float:
    """|LHS| divided by the sum of the magnitudes of its two terms."""
    u = (2 + omega) ** 2
    a, b = _pb(params)
    lead = (4 + omega) * omega
    tail = 2 * u / (a * f * f) * (1 + b * u)
    scale = abs(lead) + abs(tail)
    return abs(lead - tail) / scale if scale else 0.0


def critical_feedback_parameter(params: SystemParams) -> CriticalPoint:
    k, u0, eta, n = params.kappa, params.u0, params.eta, params.n_atoms
    if eta == 0:
        raise ValueError("no feedback transition without probe light (eta = 0)")
    r = u0 ** 2 * eta ** 2 * n / k
    f_c = math.sqrt(2) * k / (u0 ** 3 * eta ** 2 * n ** 2) * (1 + math.sqrt(1 + r * r))
    root = r * math.sqrt((u0 * n * f_c) ** 2 - 2)
    w_plus, w_minus = -2 + root, -2 - root
    n0p, nLp, _ = occupations_for(w_plus, n)
    n0m, nLm, _ = occupations_for(w_minus, n)
    return CriticalPoint(f_c, w_plus, w_minus, n0p, nLp, n0m, nLm)


def _u_roots(params: SystemParams, f: float) -> tuple[list[float], bool]:
    """Real non-negative roots in u, and whether they form a double root."""
    a, b = _pb(params)
    big_p = a * f * f
    p = (big_p - 2) / (2 * b)
    q = 2 * big_p / b
    disc = p * p - 4 * q
    if p <= 0:
        return [], False
    if abs(disc) <= DEGENERATE_RTOL * p * p:
        return [0.5 * p, 0.5 * p], True
    if disc < 0:
        return [], False
    big = 0.5 * (p + math.sqrt(disc))
    return [big, q / big], False


def discriminant(params: SystemParams, f: float) -> float:
    """Discriminant of the quadratic in u, normalised by p^2."""
    a, b = _pb(params)
    big_p = a * f * f
    p = (big_p - 2) / (2 * b)
    q = 2 * big_p / b
    return (p * p - 4 * q) / (p * p)


def steady_state_branches(params: SystemParams, f: float,
                          return_discarded: bool = False):
    """Stationary branches at combined feedback F = f, sorted by n_L.

    Roots whose occupations fall outside [0, N] are dropped; pass
    ``return_discarded=True`` to also get how many.
    """
    if not f > 0:
        raise ValueError(f"f must be positive, got {f}")
    n = params.n_atoms
    roots, _ = _u_roots(params, f)
    branches = []
    discarded = 0
    for u in roots:
        for sign in (1.0, -1.0):
            w = -2.0 + sign * math.sqrt(u)
            if w == -2.0:
                discarded += 1
                continue
            n0, nL, nR = occupations_for(w, n)
            if not (0.0 <= n0 <= n and 0.0 <= nL <= n):
                discarded += 1
                continue
            branches.append(Branch(w, n0, nL, nR, f))
    if discarded:
        log.debug("F=%g: discarded %d inadmissible roots", f, discarded)
    branches.sort(key=lambda br: (br.nL, br.omega))
    return (branches, discarded) if return_discarded else branches


def sqrt_prefactor(params: SystemParams) -> float:
    """Coefficient c in |n_L - n_Lc| ~ c sqrt(F_c delta) near threshold.

    Derived from the leading-order expansion of the quadratic in u about its
    double root; n0 moves by -2x the change in n_L.
    """
    cp = critical_feedback_parameter(params)
    big_p = (params.u0 * params.n_atoms * cp.f_c) ** 2
    return params.u0 * params.n_atoms ** 2 * math.sqrt(big_p + 2) / (8 * big_p)


@dataclass(frozen=True)
class ApproxBranch:
    omega_c: float
    sign: int
    n0: float
    nL: float
    nR: float


def sqrt_approximation(params: SystemParams, f: float) -> list[ApproxBranch]:
    """Square-root approximation of the four branches just above threshold."""
    cp = critical_feedback_parameter(params)
    delta = f - cp.f_c
    if delta < 0:
        raise ValueError(f"sqrt approximation needs f >= F_c = {cp.f_c:.6g}, got {f}")
    dn = sqrt_prefactor(params) * math.sqrt(cp.f_c * delta)
    out = []
    for w_c, n0_c, nL_c in zip(cp.omega_c, cp.n0_c, cp.nL_c):
        for sign in (1, -1):
            out.append(ApproxBranch(w_c, sign, n0_c - 2 * sign * dn, nL_c + sign * dn,
                                    nL_c + sign * dn))
    out.sort(key=lambda a: a.nL)
    return out


def approximation_for(branch: Branch, params: SystemParams) -> ApproxBranch:
    """The square-root approximation that tracks ``branch`` (same family and side)."""
    cp = critical_feedback_parameter(params)
    plus_family = branch.omega > -2
    nL_c = cp.nL_c_plus if plus_family else cp.nL_c_minus
    sign = 1 if branch.nL >= nL_c else -1
    w_c = cp.omega_c_plus if plus_family else cp.omega_c_minus
    for a in sqrt_approximation(params, branch.f):
        if a.omega_c == w_c and a.sign == sign:
            return a
    raise AssertionError("unreachable")


def branch_state(branch: Branch, params: SystemParams,
                 tau: float) -> tuple[ModeState, FilterState, float]:
    """Amplitudes, stationary filter and lattice intensity realising ``branch``.

    Phases come from the rotating ansatz with a0 real and positive; then
    aR = conj(aL) and aL = U0 I a0 / (2 (w + 4 + i gamma)), gamma = 4 U0^2 eta^2 n0 / kappa.
    The filter sits at tau * kappa * |alpha|^2, so I = K s* holds with K = F / tau.
    """
    w = branch.omega
    a0 = math.sqrt(branch.n0)
    if branch.nL == 0:
        state = ModeState(a0, 0.0, 0.0)
        return state, FilterState(0.0), 0.0
    gamma = 4 * params.u0 ** 2 * params.eta ** 2 * branch.n0 / params.kappa
    d = complex(w + 4, gamma)
    intensity = math.sqrt(2 * w * abs(d) ** 2 / (w + 4)) / params.u0
    aL = params.u0 * intensity * a0 / (2 * d)
    state = ModeState(a0, aL, aL.conjugate())
    s_star = tau * params.kappa * scattered_intensity(state, params)
    return state, FilterState(s_star), intensity


def kick(state: ModeState, fraction: float) -> ModeState:
    """Move ``fraction`` of the zero-mode atoms equally into both side modes.

    Phases are kept; empty side modes are filled with real amplitudes.
    """
    n0, nL, nR = state.occupations
    moved = 0.5 * fraction * n0
    a0 = state.a0 * math.sqrt(1 - fraction)

    def grow(a, n):
        if n > 0:
            return a * math.sqrt((n + moved) / n)
        return complex(math.sqrt(moved))

    return ModeState(a0, grow(state.aL, nL), grow(state.aR, nR))


@dataclass(frozen=True)
class StabilityProbe:
    kick: float = 1e-3
    band: float = 0.05
    horizon: float = 5.0
    dt: float = 1e-4


def classify_state(state: ModeState, filt: FilterState, reference, params: SystemParams,
                   fb: FeedbackConfig, probe: StabilityProbe = StabilityProbe()) -> Stability:
    """Kick ``state`` and integrate; stable if occupations stay near ``reference``.

    Each non-empty reference occupation must stay within ``probe.band`` of its
    own value over the horizon. Empty modes are not checked on their own; any
    atoms they gain show up in the other modes through number conservation.
    """
    icfg = IntegratorConfig(dt=probe.dt, t_end=probe.horizon, record_stride=10)
    det = fb.with_(mode="deterministic")
    try:
        traj = simulate(kick(state, probe.kick), params, det, icfg, s_initial=filt.s)
    except (IntegrationDiverged, ConservationViolation):
        return Stability.UNSTABLE
    ref = np.asarray(reference, dtype=float)
    occupied = ref > 0
    occ = np.abs(traj.amplitudes[:, occupied]) ** 2
    worst = np.max(np.abs(occ - ref[occupied]) / ref[occupied])
    return Stability.STABLE if worst <= probe.band else Stability.UNSTABLE


def classify_stability(branch: Branch, params: SystemParams, fb: FeedbackConfig,
                       probe: StabilityProbe = StabilityProbe()) -> Stability:
    if not math.isclose(fb.f, branch.f, rel_tol=1e-9):
        raise ValueError(f"feedback has F = {fb.f:.10g} but branch was solved at F = {branch.f:.10g}")
    state, filt, _ = branch_state(branch, params, fb.tau)
    return classify_state(state, filt, branch.occupations, params, fb, probe)


def uniform_backaction_rate(params: SystemParams) -> float:
    """Linear growth rate of side-mode amplitudes around the uniform state.

    Feedback enters only at second order there, so the rate comes from the
    measurement back-action terms alone: 2 U0^2 eta^2 N / kappa, at any F.
    """
    return 2 * params.u0 ** 2 * params.eta ** 2 * params.n_atoms / params.kappa


def linear_spectrum(branch: Branch, params: SystemParams, fb: FeedbackConfig,
                    step: float = 1e-6) -> np.ndarray:
    """Eigenvalues of the linearised mode + filter flow about ``branch``.

    Taken in the frame rotating at the branch frequency, by central finite
    differences over the seven real coordinates. One zero eigenvalue always
    comes from the global phase.
    """
    from . import _kernels

    state, filt, _ = branch_state(branch, params, fb.tau)
    w = branch.omega
    x0 = np.array([state.a0.real, state.a0.imag, state.aL.real, state.aL.imag,
                   state.aR.real, state.aR.imag, filt.s])

    def flow(x):
        a0, aL, aR = complex(x[0], x[1]), complex(x[2], x[3]), complex(x[4], x[5])
        d0, dL, dR, ds = _kernels.coupled_rhs(a0, aL, aR, x[6], params.u0, params.eta,
                                              params.kappa, fb.gain, fb.tau, fb.gain_d,
                                              False, 0.0)
        d0, dL, dR = d0 - 1j * w * a0, dL - 1j * w * aL, dR - 1j * w * aR
        return np.array([d0.real, d0.imag, dL.real, dL.imag, dR.real, dR.imag, ds])

    jac = np.empty((7, 7))
    for i in range(7):
        h = step * max(1.0, abs(x0[i]))
        e = np.zeros(7)
        e[i] = h
        jac[:, i] = (flow(x0 + e) - flow(x0 - e)) / (2 * h)
    return np.linalg.eigvals(jac)


@dataclass(frozen=True)
class SweepRow:
    f: float
    branch: Branch


def bifurcation_sweep(params: SystemParams, f_min: float, f_max: float, n_points: int,
                      tau: float | None = None, probe: StabilityProbe | None = None,
                      jobs: int = 1) -> list[SweepRow]:
    """Branches on a uniform F grid, long format (one row per branch).

    With ``tau`` given, each branch is classified using K = F / tau.
    """
    if not f_min < f_max:
        raise ValueError("need f_min < f_max")
    if n_points < 2:
        raise ValueError("need at least two points")
    if f_min <= 0:
        raise ValueError("f_min must be positive")
    grid = np.linspace(f_min, f_max, n_points)

    def at(f):
        f = float(f)
        branches = steady_state_branches(params, f)
        if tau is not None:
            fb = FeedbackConfig(gain=f / tau, tau=tau)
            # a double root at exactly F_c stays undetermined
            if not _u_roots(params, f)[1]:
                branches = [replace(br, stability=classify_stability(
                    br, params, fb, probe or StabilityProbe())) for br in branches]
        return [SweepRow(f, br) for br in branches]

    if jobs <= 1:
        chunks = [at(f) for f in grid]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(at, grid))
    return [row for chunk in chunks for row in chunk]


def nearest_stable_branch(params: SystemParams, f: float, occupations,
                          tau: float | None = None) -> Branch | None:
    """Branch closest (in n_L) to ``occupations``; classified when ``tau`` is given.

    Only branches classified stable are considered when classification is
    requested.
    """
    branches = steady_state_branches(params, f)
    if tau is not None:
        fb = FeedbackConfig(gain=f / tau, tau=tau)
        branches = [replace(br, stability=classify_stability(br, params, fb)) for br in branches]
        branches = [br for br in branches if br.stability is Stability.STABLE]
    if not branches:
        return None
    nL = occupations[1]
    return min(branches, key=lambda br: abs(br.nL - nL))
