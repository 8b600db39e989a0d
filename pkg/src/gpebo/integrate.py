"""Fixed-step integration of the plant, observer copy, and estimator.

One classical fourth-order Runge-Kutta step advances the coupled state
(x, xi, Phi, theta_hat) on a uniform grid.  Delayed regression lookups are
served from the trajectory histories recorded at accepted grid nodes; when
an intermediate stage needs values beyond the last accepted node (possible
only for delays shorter than the step) the stage's own values are used.

Because x, xi, and the columns of Phi are advanced by exactly the same
linear recursion, the identity xi - x = Phi (xi(0) - x(0)) holds at the
grid nodes to rounding error regardless of step size, and so does the
regression identity built from interpolated history values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .drem import DremConfig, default_ext_delays, drem_update, extend_regressor, mix
from .history import TrajectoryHistory
from .model import NamedScenario, eval_system
from .observer import GainSpec, _regression_from_values, build_regression, gradient_update

STATE_NORM_LIMIT = 1e12


class DivergenceError(RuntimeError):
    """Raised when any integrated quantity exceeds the norm guard or leaves
    the finite floats."""

    def __init__(self, t: float, message: str):
        super().__init__(message)
        self.t = t


@dataclass
class CoupledState:
    """Plant state, observer copy, transition matrix, parameter estimate."""

    t: float
    x: np.ndarray
    xi: np.ndarray
    Phi: np.ndarray
    theta_hat: np.ndarray

    @classmethod
    def initial(cls, scenario: NamedScenario) -> "CoupledState":
        n = scenario.system.n
        return cls(
            t=0.0,
            x=scenario.system.x0.copy(),
            xi=scenario.xi0.copy(),
            Phi=np.eye(n),
            theta_hat=scenario.theta_hat0.copy(),
        )


@dataclass
class Histories:
    """Recorded trajectories a run needs for delayed lookups."""

    x: TrajectoryHistory
    xi: TrajectoryHistory
    Phi: TrajectoryHistory
    psi: Optional[TrajectoryHistory] = None
    y_reg: Optional[TrajectoryHistory] = None


class _RunContext:
    """Per-run constants derived from the scenario once, not per stage."""

    __slots__ = ("gain", "drem_cfg")

    def __init__(self, gain, drem_cfg):
        self.gain = gain
        self.drem_cfg = drem_cfg

    @classmethod
    def for_scenario(cls, scenario: NamedScenario) -> "_RunContext":
        gain = None
        drem_cfg = None
        if scenario.gamma > 0.0:
            n = scenario.system.n
            if scenario.estimator == "gradient":
                gain = GainSpec.scaled(scenario.gamma, n)
            else:
                if scenario.system.q != 1:
                    raise ValueError("drem estimation supports single-output plants")
                delays = scenario.drem_delays
                if delays is None:
                    delays = default_ext_delays(n)
                if len(delays) != n - 1:
                    raise ValueError(
                        f"drem needs {n - 1} extension delays, got {len(delays)}"
                    )
                drem_cfg = DremConfig(ext_delays=delays, gamma=scenario.gamma)
        return cls(gain, drem_cfg)


def _regression_at(t, state, scenario, hists):
    """Regression sample at stage time t, falling back to the stage's own
    values when phi(t) runs past the recorded history."""
    phi_t = scenario.delay(t)
    if phi_t <= hists.x.t_latest:
        x_d = hists.x.sample(phi_t)
        xi_d = hists.xi.sample(phi_t)
        Phi_d = hists.Phi.sample(phi_t)
    else:
        x_d, xi_d, Phi_d = state.x, state.xi, state.Phi
    C_d = np.asarray(scenario.system.C(phi_t), dtype=float)
    return _regression_from_values(t, C_d, x_d, xi_d, Phi_d)


def _estimator_rate(t, state, scenario, hists, ctx):
    if ctx.gain is None and ctx.drem_cfg is None:
        return np.zeros_like(state.theta_hat)
    sample = _regression_at(t, state, scenario, hists)
    if ctx.gain is not None:
        return gradient_update(sample, state.theta_hat, ctx.gain)
    M, Y = extend_regressor(
        t, ctx.drem_cfg, hists.psi, hists.y_reg, current=(sample.psi, sample.y_reg)
    )
    mixed = mix(M, Y, t)
    return drem_update(mixed, state.theta_hat, ctx.drem_cfg.gamma)


def _rhs(t, state, scenario, hists, ctx):
    sysm = scenario.system
    A = np.asarray(sysm.A(t), dtype=float)
    Bu = np.asarray(sysm.B(t), dtype=float) @ np.asarray(sysm.u(t), dtype=float)
    return CoupledState(
        t=t,
        x=A @ state.x + Bu,
        xi=A @ state.xi + Bu,
        Phi=A @ state.Phi,
        theta_hat=_estimator_rate(t, state, scenario, hists, ctx),
    )


def rhs(t: float, state: CoupledState, scenario: NamedScenario, hists: Histories) -> CoupledState:
    """Time derivative of the coupled state; fields hold the rates.

    The histories must cover the accepted nodes up to the current step;
    estimator lookups beyond the last node use the stage's own values.
    """
    return _rhs(t, state, scenario, hists, _RunContext.for_scenario(scenario))


def _offset(state, k, a, t_stage):
    return CoupledState(
        t=t_stage,
        x=state.x + a * k.x,
        xi=state.xi + a * k.xi,
        Phi=state.Phi + a * k.Phi,
        theta_hat=state.theta_hat + a * k.theta_hat,
    )


def _check_finite(state):
    worst = 0.0
    for v in (state.x, state.xi, state.Phi, state.theta_hat):
        m = float(np.abs(v).max())
        if not m <= STATE_NORM_LIMIT:
            raise DivergenceError(
                state.t, f"state norm {m!r} exceeds {STATE_NORM_LIMIT:g} at t={state.t}"
            )
        worst = max(worst, m)
    return worst


def _append_regression(t, scenario, hists):
    sample = build_regression(t, scenario, hists.x, hists.xi, hists.Phi)
    hists.psi.append(t, sample.psi)
    hists.y_reg.append(t, sample.y_reg)


def _rk4_step(t, state, h, scenario, hists, ctx):
    k1 = _rhs(t, state, scenario, hists, ctx)
    half = 0.5 * h
    k2 = _rhs(t + half, _offset(state, k1, half, t + half), scenario, hists, ctx)
    k3 = _rhs(t + half, _offset(state, k2, half, t + half), scenario, hists, ctx)
    t_new = t + h
    k4 = _rhs(t_new, _offset(state, k3, h, t_new), scenario, hists, ctx)
    c = h / 6.0
    new = CoupledState(
        t=t_new,
        x=state.x + c * (k1.x + 2.0 * (k2.x + k3.x) + k4.x),
        xi=state.xi + c * (k1.xi + 2.0 * (k2.xi + k3.xi) + k4.xi),
        Phi=state.Phi + c * (k1.Phi + 2.0 * (k2.Phi + k3.Phi) + k4.Phi),
        theta_hat=state.theta_hat
        + c * (k1.theta_hat + 2.0 * (k2.theta_hat + k3.theta_hat) + k4.theta_hat),
    )
    _check_finite(new)
    hists.x.append(t_new, new.x)
    hists.xi.append(t_new, new.xi)
    hists.Phi.append(t_new, new.Phi)
    if hists.psi is not None:
        _append_regression(t_new, scenario, hists)
    return new


def rk4_step(
    t: float, state: CoupledState, h: float, scenario: NamedScenario, hists: Histories
) -> CoupledState:
    """Advance the coupled state from t to t + h and record the new node."""
    return _rk4_step(t, state, h, scenario, hists, _RunContext.for_scenario(scenario))


@dataclass
class SimulationResult:
    """Grid trajectories from one run plus derived observer quantities.

    Arrays are indexed by grid node on axis 0.  ``theta`` is the true
    initial mismatch xi(0) - x(0) the estimator is converging to.
    """

    scenario: NamedScenario
    t: np.ndarray
    x: np.ndarray
    xi: np.ndarray
    Phi: np.ndarray
    theta_hat: np.ndarray
    theta: np.ndarray
    psi: Optional[np.ndarray] = None
    y_reg: Optional[np.ndarray] = None

    @property
    def xhat(self) -> np.ndarray:
        """State estimate xi - Phi theta_hat at every node."""
        return self.xi - np.einsum("kij,kj->ki", self.Phi, self.theta_hat)

    @property
    def estimation_error(self) -> np.ndarray:
        """x - xhat at every node."""
        return self.x - self.xhat

    @property
    def theta_error(self) -> np.ndarray:
        """theta_hat - theta at every node."""
        return self.theta_hat - self.theta

    def x_history(self) -> TrajectoryHistory:
        return TrajectoryHistory.from_grid(self.t, self.x)

    def xi_history(self) -> TrajectoryHistory:
        return TrajectoryHistory.from_grid(self.t, self.xi)

    def phi_history(self) -> TrajectoryHistory:
        return TrajectoryHistory.from_grid(self.t, self.Phi)


def simulate(scenario: NamedScenario) -> SimulationResult:
    """Run one scenario over its horizon and return the grid trajectories.

    The grid is {0, h, 2h, ...} with the horizon rounded to the nearest
    whole number of steps.  A zero scenario gain freezes theta_hat, which
    turns the run into an open-loop diagnostic of the observer copy.
    """
    sysm = scenario.system
    eval_system(sysm, 0.0)
    ctx = _RunContext.for_scenario(scenario)
    n = sysm.n
    h = scenario.step
    nsteps = max(1, int(round(scenario.horizon / h)))
    N = nsteps + 1

    state = CoupledState.initial(scenario)
    track_reg = ctx.drem_cfg is not None
    hists = Histories(
        x=TrajectoryHistory(),
        xi=TrajectoryHistory(),
        Phi=TrajectoryHistory(),
        psi=TrajectoryHistory() if track_reg else None,
        y_reg=TrajectoryHistory() if track_reg else None,
    )
    hists.x.append(0.0, state.x)
    hists.xi.append(0.0, state.xi)
    hists.Phi.append(0.0, state.Phi)
    if track_reg:
        _append_regression(0.0, scenario, hists)

    ts = np.empty(N)
    xs = np.empty((N, n))
    xis = np.empty((N, n))
    Phis = np.empty((N, n, n))
    ths = np.empty((N, n))
    ts[0] = 0.0
    xs[0] = state.x
    xis[0] = state.xi
    Phis[0] = state.Phi
    ths[0] = state.theta_hat

    for k in range(nsteps):
        state = _rk4_step(state.t, state, h, scenario, hists, ctx)
        j = k + 1
        ts[j] = state.t
        xs[j] = state.x
        xis[j] = state.xi
        Phis[j] = state.Phi
        ths[j] = state.theta_hat

    psi_arr = None
    y_arr = None
    if track_reg:
        _, psi_arr = hists.psi.as_arrays()
        _, y_arr = hists.y_reg.as_arrays()

    return SimulationResult(
        scenario=scenario,
        t=ts,
        x=xs,
        xi=xis,
        Phi=Phis,
        theta_hat=ths,
        theta=scenario.xi0 - sysm.x0,
        psi=psi_arr,
        y_reg=y_arr,
    )
