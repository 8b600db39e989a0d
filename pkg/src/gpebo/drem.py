"""Regressor extension and mixing for decoupled parameter estimation.

The vector regression y_reg = psi . theta is extended by stacking it at the
current time and at a set of fixed lags, giving M(t) theta = Y(t) with a
square M.  Multiplying by the adjugate of M decouples the unknowns:

    adj(M) Y = det(M) theta,

so each component of theta can be driven by its own scalar update with rate
gamma * Delta * (Y_mixed_i - Delta * theta_hat_i), Delta = det(M).  Each
|theta_hat_i - theta_i| is then nonincreasing regardless of the others.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .history import TrajectoryHistory


@dataclass(frozen=True)
class DremConfig:
    """Extension lags (strictly increasing, positive) and scalar gain."""

    ext_delays: tuple
    gamma: float

    def __post_init__(self):
        d = tuple(float(v) for v in self.ext_delays)
        if any(v <= 0.0 for v in d):
            raise ValueError("extension delays must be positive")
        if any(b <= a for a, b in zip(d, d[1:])):
            raise ValueError("extension delays must be strictly increasing")
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")
        object.__setattr__(self, "ext_delays", d)


def default_ext_delays(n: int, spacing: float = 0.5) -> tuple:
    """n - 1 equally spaced lags: (spacing, 2 spacing, ...)."""
    return tuple(spacing * i for i in range(1, n))


@dataclass
class MixedRegression:
    """Decoupled scalar regressions: Y_mixed = Delta * theta."""

    t: float
    Delta: float
    Y_mixed: np.ndarray


def extend_regressor(
    t: float,
    config: DremConfig,
    hist_psi: TrajectoryHistory,
    hist_y: TrajectoryHistory,
    current: Optional[tuple] = None,
):
    """Stack (psi, y_reg) at t and at each lag t - d.

    Rows whose lagged time predates the recorded history are zero-filled,
    which leaves the mixed determinant at zero until every lag is covered.
    ``current`` optionally supplies the live (psi, y_reg) pair for times
    beyond the last recorded node, as happens at intermediate integrator
    stages.  Returns the pair (M, Y_stack) with M of shape (k, n).
    """
    lags = (0.0,) + config.ext_delays
    k = len(lags)
    t0 = hist_psi.t0
    latest = hist_psi.t_latest
    rows = []
    ys = []
    for d in lags:
        s = t - d
        if s < t0:
            rows.append(None)
            ys.append(0.0)
        elif s > latest:
            if current is None:
                raise ValueError(
                    f"lagged time {s} beyond recorded history and no live sample given"
                )
            rows.append(np.asarray(current[0], dtype=float))
            ys.append(float(current[1]))
        else:
            rows.append(hist_psi.sample(s))
            ys.append(float(hist_y.sample(s)))
    n = next(r.shape[0] for r in rows if r is not None)
    M = np.zeros((k, n))
    for i, r in enumerate(rows):
        if r is not None:
            M[i] = r
    return M, np.array(ys)


def adjugate(M: np.ndarray) -> np.ndarray:
    """Adjugate (transposed cofactor matrix); satisfies adj(M) M = det(M) I.

    Sizes up to 3 use closed-form cofactors; larger well-conditioned
    matrices go through det(M) inv(M), with a minor-expansion fallback
    when M is singular.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("adjugate requires a square matrix")
    n = M.shape[0]
    if n == 1:
        return np.array([[1.0]])
    if n == 2:
        return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]])
    if n == 3:
        a, b, c = M[0]
        d, e, f = M[1]
        g, h, i = M[2]
        return np.array(
            [
                [e * i - f * h, c * h - b * i, b * f - c * e],
                [f * g - d * i, a * i - c * g, c * d - a * f],
                [d * h - e * g, b * g - a * h, a * e - b * d],
            ]
        )
    det = np.linalg.det(M)
    scale = np.abs(M).max()
    if scale > 0 and abs(det) > 1e-12 * scale**n:
        return det * np.linalg.inv(M)
    adj = np.empty((n, n))
    for r in range(n):
        rows = [rr for rr in range(n) if rr != r]
        for c in range(n):
            cols = [cc for cc in range(n) if cc != c]
            minor = M[np.ix_(rows, cols)]
            adj[c, r] = (-1.0) ** (r + c) * np.linalg.det(minor)
    return adj


def _det(M: np.ndarray) -> float:
    n = M.shape[0]
    if n == 1:
        return float(M[0, 0])
    if n == 2:
        return float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    if n == 3:
        a, b, c = M[0]
        d, e, f = M[1]
        g, h, i = M[2]
        return float(a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g))
    return float(np.linalg.det(M))


def mix(M: np.ndarray, Y_stack: np.ndarray, t: float = 0.0) -> MixedRegression:
    """Premultiply the stacked regression by adj(M) to decouple it."""
    M = np.asarray(M, dtype=float)
    Y_stack = np.asarray(Y_stack, dtype=float)
    if M.shape[0] != M.shape[1]:
        raise ValueError("mixing requires a square stacked regressor")
    if Y_stack.shape != (M.shape[0],):
        raise ValueError("Y_stack length must match the stacked regressor")
    return MixedRegression(t=t, Delta=_det(M), Y_mixed=adjugate(M) @ Y_stack)


def drem_update(mixed: MixedRegression, theta_hat: np.ndarray, gamma: float) -> np.ndarray:
    """Componentwise rate gamma * Delta * (Y_mixed - Delta * theta_hat)."""
    if not gamma > 0.0:
        raise ValueError("gamma must be positive")
    return gamma * mixed.Delta * (mixed.Y_mixed - mixed.Delta * theta_hat)
