"""Delimited output and figure rendering for simulation sweeps.

A sweep holds one simulation per gain value.  The CSV emitter writes every
run in a single flat table (one block per gain, ascending), formatting
floats with 17 significant digits so values survive a parse round trip
bit for bit.  The figure emitter renders the state estimation error per
component as a standalone SVG document with exactly one polyline per gain
and no run-dependent metadata, so identical sweeps produce identical
bytes.  All writers go through a temporary file in the destination
directory and rename into place.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .excitation import ExcitationReport
from .integrate import SimulationResult

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)

SVG_MAX_POINTS = 2000


@dataclass
class RunResult:
    """One CLI invocation's worth of simulations, one per gain value."""

    scenario_id: str
    estimator: str
    gammas: list
    runs: list
    duration: float

    def __post_init__(self):
        if not self.runs or len(self.gammas) != len(self.runs):
            raise ValueError("need one simulation per gamma")

    def ordered(self):
        """(gamma, run) pairs sorted by ascending gamma."""
        return sorted(zip(self.gammas, self.runs), key=lambda p: p[0])


def _atomic_text(path: str, writer) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def csv_header(n: int) -> str:
    cols = ["t", "gamma"]
    for base in ("x", "xhat", "e", "theta", "thetahat"):
        cols.extend(f"{base}{i + 1}" for i in range(n))
    return ",".join(cols)


def emit_csv(result: RunResult, path: str) -> None:
    """Write the sweep as one flat CSV table, blocks ordered by gamma."""
    n = result.runs[0].x.shape[1]

    def writer(fh):
        fh.write(csv_header(n) + "\n")
        for gamma, run in result.ordered():
            N = len(run.t)
            table = np.column_stack(
                [
                    run.t,
                    np.full(N, gamma),
                    run.x,
                    run.xhat,
                    run.estimation_error,
                    np.tile(run.theta, (N, 1)),
                    run.theta_hat,
                ]
            )
            for row in table:
                fh.write(",".join(_fmt(v) for v in row) + "\n")

    _atomic_text(path, writer)


def _thin(N: int, limit: int = SVG_MAX_POINTS) -> np.ndarray:
    if N <= limit:
        return np.arange(N)
    stride = int(np.ceil(N / limit))
    idx = np.arange(0, N, stride)
    if idx[-1] != N - 1:
        idx = np.append(idx, N - 1)
    return idx


def _ticks(lo: float, hi: float, count: int):
    return np.linspace(lo, hi, count)


def emit_svg(result: RunResult, path: str) -> None:
    """Render per-component estimation error curves, one polyline per gamma.

    Long runs are thinned to at most ``SVG_MAX_POINTS`` vertices per curve
    (always keeping the final sample).  The document is self-contained and
    carries no timestamps or other nondeterministic content.
    """
    pairs = result.ordered()
    n = pairs[0][1].x.shape[1]
    t = pairs[0][1].t
    t_lo, t_hi = float(t[0]), float(t[-1])
    if t_hi <= t_lo:
        t_hi = t_lo + 1.0

    width = 960
    left, right, top, bottom = 70, 190, 48, 56
    panel_h, panel_gap = 240, 58
    plot_w = width - left - right
    height = top + n * panel_h + (n - 1) * panel_gap + bottom

    parts = []
    parts.append('<?xml version="1.0" encoding="UTF-8" standalone="no"?>')
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">'
    )
    parts.append(f'<rect width="{width}" height="{height}" fill="#ffffff"/>')
    title = f"{result.scenario_id} / {result.estimator}: state estimation error"
    parts.append(f'<text x="{left}" y="24" font-size="14">{title}</text>')

    for comp in range(n):
        py = top + comp * (panel_h + panel_gap)
        errs = [run.estimation_error[:, comp] for _, run in pairs]
        y_lo = min(float(e.min()) for e in errs)
        y_hi = max(float(e.max()) for e in errs)
        if y_hi - y_lo < 1e-300:
            pad = max(abs(y_lo), 1.0) * 0.1
            y_lo, y_hi = y_lo - pad, y_hi + pad
        else:
            pad = 0.04 * (y_hi - y_lo)
            y_lo, y_hi = y_lo - pad, y_hi + pad

        def sx(tv):
            return left + (tv - t_lo) / (t_hi - t_lo) * plot_w

        def sy(yv):
            return py + (y_hi - yv) / (y_hi - y_lo) * panel_h

        parts.append(f'<g id="panel-e{comp + 1}">')
        parts.append(
            f'<rect x="{left}" y="{py}" width="{plot_w}" height="{panel_h}" '
            'fill="none" stroke="#222222" stroke-width="1"/>'
        )
        for tv in _ticks(t_lo, t_hi, 6):
            x = sx(tv)
            parts.append(
                f'<line x1="{x:.2f}" y1="{py + panel_h}" x2="{x:.2f}" '
                f'y2="{py + panel_h + 5}" stroke="#222222" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{x:.2f}" y="{py + panel_h + 18}" '
                f'text-anchor="middle">{tv:g}</text>'
            )
        for yv in _ticks(y_lo, y_hi, 5):
            y = sy(yv)
            parts.append(
                f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" '
                'stroke="#222222" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{left - 8}" y="{y + 4:.2f}" '
                f'text-anchor="end">{yv:.3g}</text>'
            )
        parts.append(
            f'<text x="{left}" y="{py - 8}">x{comp + 1} - xhat{comp + 1}</text>'
        )
        if comp == n - 1:
            parts.append(
                f'<text x="{left + plot_w / 2:.2f}" y="{py + panel_h + 38}" '
                'text-anchor="middle">t</text>'
            )
        for ci, (gamma, run) in enumerate(pairs):
            color = _PALETTE[ci % len(_PALETTE)]
            idx = _thin(len(run.t))
            pts = " ".join(
                f"{sx(run.t[i]):.2f},{sy(run.estimation_error[i, comp]):.2f}"
                for i in idx
            )
            parts.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.2" '
                f'points="{pts}"/>'
            )
        parts.append("</g>")

    lx = left + plot_w + 16
    parts.append('<g id="legend">')
    for ci, (gamma, _) in enumerate(pairs):
        color = _PALETTE[ci % len(_PALETTE)]
        y = top + 14 + 18 * ci
        parts.append(
            f'<line x1="{lx}" y1="{y - 4}" x2="{lx + 22}" y2="{y - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{lx + 28}" y="{y}">gamma={gamma:g}</text>')
    parts.append("</g>")
    parts.append("</svg>")

    def writer(fh):
        fh.write("\n".join(parts) + "\n")

    _atomic_text(path, writer)


def format_pe_summary(report: ExcitationReport) -> str:
    """Single-line human summary of an excitation scan."""
    return (
        f"pe window={report.window:g} floor={report.delta_floor:g} "
        f"windows={len(report.starts)} "
        f"output: delta={report.delta_output:.6g} holds={report.pe_output} "
        f"regressor: delta={report.delta_regressor:.6g} holds={report.pe_regressor}"
    )


def write_pe_report(report: ExcitationReport, path: str) -> None:
    """Write the per-window minimum eigenvalues as a small CSV table."""

    def writer(fh):
        fh.write("window_start,min_eig_output,min_eig_regressor\n")
        for s, mq, mn in zip(
            report.starts, report.min_eig_output, report.min_eig_regressor
        ):
            fh.write(f"{_fmt(s)},{_fmt(mq)},{_fmt(mn)}\n")

    _atomic_text(path, writer)
