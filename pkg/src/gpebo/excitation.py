"""Excitation level of the recorded output map along a trajectory.

Convergence of the parameter estimate requires the regressor to be
persistently exciting: the windowed Gramian

    integral over [t, t+T] of  C(s) Phi(s) Phi(s)^T C(s)^T  ds

must stay above a positive floor uniformly in t.  These checks evaluate
that integral (both the q x q output form above and its n x n companion
with the factors transposed), scan it over a grid of window starts, and
report the worst-case smallest eigenvalue.

For delayed measurements an equivalent condition integrates over the
measurement-time image of the window, weighting by the reciprocal of the
delay map's rate; :func:`delayed_pe_integral` evaluates that form.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .history import TrajectoryHistory
from .model import DelaySpec


class DelayRateError(ValueError):
    """The delay map's rate fell below the admissible floor on the window."""


@dataclass
class ExcitationReport:
    """Windowed excitation scan over one recorded trajectory.

    ``min_eig_output`` and ``min_eig_regressor`` hold the smallest
    eigenvalue of the q x q and n x n window Gramians for each start;
    the ``delta_*`` fields are their infima over the scan and the
    ``pe_*`` flags compare those against ``delta_floor``.
    """

    window: float
    delta_floor: float
    stride: float
    starts: np.ndarray
    min_eig_output: np.ndarray
    min_eig_regressor: np.ndarray
    delta_output: float
    delta_regressor: float
    pe_output: bool
    pe_regressor: bool


def _window_nodes(times, lo, hi):
    i0 = bisect_right(times, lo)
    i1 = bisect_left(times, hi)
    pts = [lo]
    pts.extend(times[i0:i1])
    pts.append(hi)
    return pts


def pe_integral(hist_Phi: TrajectoryHistory, C, t: float, T: float):
    """Windowed Gramians of the output map over [t, t+T].

    Returns the pair (q x q, n x n) of trapezoidal quadratures of
    C Phi Phi^T C^T and (C Phi)^T (C Phi) over the stored nodes, with the
    window endpoints interpolated.  The window must lie inside the
    recorded range up to a small relative slack.
    """
    if not T > 0.0:
        raise ValueError("window length T must be positive")
    t0 = hist_Phi.t0
    t_end = hist_Phi.t_latest
    tol = 1e-9 * max(1.0, abs(t_end))
    if t < t0 - tol or t + T > t_end + tol:
        raise ValueError(
            f"window [{t}, {t + T}] outside recorded range [{t0}, {t_end}]"
        )
    lo = max(t, t0)
    hi = min(t + T, t_end)
    pts = _window_nodes(hist_Phi.times, lo, hi)

    G_q = None
    G_n = None
    prev_q = prev_n = None
    prev_s = None
    for s in pts:
        Phi_s = hist_Phi.sample(s)
        C_s = np.asarray(C(s), dtype=float)
        cp = C_s @ Phi_s
        g_q = cp @ cp.T
        g_n = cp.T @ cp
        if G_q is None:
            G_q = np.zeros_like(g_q)
            G_n = np.zeros_like(g_n)
        else:
            w = 0.5 * (s - prev_s)
            G_q += w * (prev_q + g_q)
            G_n += w * (prev_n + g_n)
        prev_q, prev_n, prev_s = g_q, g_n, s
    return G_q, G_n


def delayed_pe_integral(
    hist_Phi: TrajectoryHistory,
    C,
    t: float,
    T: float,
    delay: DelaySpec,
    rate_step: float = 1e-3,
    rate_floor: float = 1e-6,
) -> np.ndarray:
    """Delay-domain excitation integral over [phi(t), phi(t+T)].

    Quadrature of (C Phi)^T (C Phi) / rate(s) with ``rate`` the delay
    map's derivative.  Raises :class:`DelayRateError` if the rate drops
    to ``rate_floor`` or below anywhere on the window, since the weight
    is then unbounded.
    """
    a = delay(t)
    b = delay(t + T)
    if b < a:
        raise ValueError("delay map must be nondecreasing over the window")
    n = hist_Phi.sample(hist_Phi.t0).shape[0]
    if b == a:
        return np.zeros((n, n))
    t0 = hist_Phi.t0
    t_end = hist_Phi.t_latest
    tol = 1e-9 * max(1.0, abs(t_end))
    if a < t0 - tol or b > t_end + tol:
        raise ValueError(
            f"window [{a}, {b}] outside recorded range [{t0}, {t_end}]"
        )
    lo = max(a, t0)
    hi = min(b, t_end)
    pts = _window_nodes(hist_Phi.times, lo, hi)

    G = None
    prev_g = None
    prev_s = None
    for s in pts:
        r = delay.rate(s, rate_step)
        if r <= rate_floor:
            raise DelayRateError(
                f"delay rate {r:g} at s={s} is at or below floor {rate_floor:g}"
            )
        Phi_s = hist_Phi.sample(s)
        cp = np.asarray(C(s), dtype=float) @ Phi_s
        g = (cp.T @ cp) / r
        if G is None:
            G = np.zeros_like(g)
        else:
            G += (0.5 * (s - prev_s)) * (prev_g + g)
        prev_g, prev_s = g, s
    return G


def pe_check(
    hist_Phi: TrajectoryHistory,
    C,
    T: float,
    delta_floor: float,
    stride: float = None,
) -> ExcitationReport:
    """Scan window starts across the trajectory and report excitation.

    Window starts run from the first node in steps of ``stride`` (default
    T / 10) as long as the full window fits.  The trajectory must be at
    least one window long.
    """
    if not T > 0.0:
        raise ValueError("window length T must be positive")
    if not delta_floor > 0.0:
        raise ValueError("delta_floor must be positive")
    if stride is None:
        stride = T / 10.0
    if not stride > 0.0:
        raise ValueError("stride must be positive")
    t0 = hist_Phi.t0
    t_end = hist_Phi.t_latest
    span = t_end - t0 - T
    if span < 0.0:
        raise ValueError(
            f"trajectory length {t_end - t0} is shorter than the window {T}"
        )
    count = int(np.floor(span / stride + 1e-9)) + 1
    starts = t0 + stride * np.arange(count)

    min_q = np.empty(count)
    min_n = np.empty(count)
    for i, start in enumerate(starts):
        G_q, G_n = pe_integral(hist_Phi, C, float(start), T)
        min_q[i] = np.linalg.eigvalsh(G_q).min()
        min_n[i] = np.linalg.eigvalsh(G_n).min()

    delta_q = float(min_q.min())
    delta_n = float(min_n.min())
    return ExcitationReport(
        window=T,
        delta_floor=delta_floor,
        stride=stride,
        starts=starts,
        min_eig_output=min_q,
        min_eig_regressor=min_n,
        delta_output=delta_q,
        delta_regressor=delta_n,
        pe_output=delta_q >= delta_floor,
        pe_regressor=delta_n >= delta_floor,
    )
