"""Estimation-based observer: regression construction and gradient update.

The observer integrates a copy of the plant,

    dxi/dt = A(t) xi + B(t) u(t),        dPhi/dt = A(t) Phi,   Phi(0) = I,

so the copy error xi - x equals Phi(t) theta with the constant vector
theta = xi(0) - x(0).  The delayed measurement then yields the linear
regression

    C(phi) xi(phi) - y(t) = C(phi) Phi(phi) theta,

whose unknown is theta.  A gradient law driven by this regression produces
theta_hat, and the state estimate is recovered algebraically as

    x_hat = xi - Phi theta_hat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .history import TrajectoryHistory
from .model import NamedScenario


@dataclass
class RegressionSample:
    """One regression data point: y_reg = psi . theta.

    For single-output plants ``psi`` has shape (n,) and ``y_reg`` is a
    scalar; for q outputs ``psi`` is (n, q) and ``y_reg`` is (q,).
    """

    t: float
    psi: np.ndarray
    y_reg: float | np.ndarray


@dataclass(frozen=True)
class GainSpec:
    """Symmetric positive definite adaptation gain matrix."""

    Gamma: np.ndarray

    def __post_init__(self):
        G = np.asarray(self.Gamma, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError("Gamma must be a square matrix")
        if not np.allclose(G, G.T, atol=1e-12):
            raise ValueError("Gamma must be symmetric")
        if np.linalg.eigvalsh(G).min() <= 0.0:
            raise ValueError("Gamma must be positive definite")
        object.__setattr__(self, "Gamma", G)

    @classmethod
    def scaled(cls, gamma: float, n: int) -> "GainSpec":
        """gamma * I with gamma > 0."""
        if not gamma > 0.0:
            raise ValueError("gamma must be positive")
        return cls(Gamma=float(gamma) * np.eye(n))


def _regression_from_values(t, C_d, x_d, xi_d, Phi_d) -> RegressionSample:
    cphi = C_d @ Phi_d
    y_reg = C_d @ (xi_d - x_d)
    if cphi.shape[0] == 1:
        return RegressionSample(t=t, psi=cphi[0], y_reg=float(y_reg[0]))
    return RegressionSample(t=t, psi=cphi.T.copy(), y_reg=y_reg)


def build_regression(
    t: float,
    scenario: NamedScenario,
    hist_x: TrajectoryHistory,
    hist_xi: TrajectoryHistory,
    hist_Phi: TrajectoryHistory,
) -> RegressionSample:
    """Regression sample at time ``t`` from recorded trajectories.

    Looks up x, xi, Phi at the measurement time phi(t) and forms the
    regressor psi = (C(phi) Phi(phi))^T together with the regressand
    y_reg = C(phi) xi(phi) - y(t).  The histories must cover phi(t).
    """
    phi_t = scenario.delay(t)
    x_d = hist_x.sample(phi_t)
    xi_d = hist_xi.sample(phi_t)
    Phi_d = hist_Phi.sample(phi_t)
    C_d = np.asarray(scenario.system.C(phi_t), dtype=float)
    return _regression_from_values(t, C_d, x_d, xi_d, Phi_d)


def gradient_update(sample: RegressionSample, theta_hat: np.ndarray, gain: GainSpec) -> np.ndarray:
    """Rate of change of theta_hat under the gradient law.

    d(theta_hat)/dt = Gamma psi (y_reg - psi . theta_hat); along this flow
    the weighted error (theta_hat - theta)^T Gamma^-1 (theta_hat - theta)
    never increases.
    """
    psi = sample.psi
    if psi.ndim == 1:
        resid = sample.y_reg - psi @ theta_hat
        return (gain.Gamma @ psi) * resid
    resid = sample.y_reg - psi.T @ theta_hat
    return gain.Gamma @ (psi @ resid)


def reconstruct(xi: np.ndarray, Phi: np.ndarray, theta_hat: np.ndarray) -> np.ndarray:
    """State estimate x_hat = xi - Phi theta_hat."""
    return xi - Phi @ theta_hat
