"""Append-only trajectory storage with linear interpolation.

Delayed measurement channels need past values of signals that are only
generated on the fly, so every integration run keeps its samples here and
looks them up by time.  Samples must arrive in strictly increasing time
order; queries between nodes are linearly interpolated and queries at a
stored node return the stored value unchanged.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np


class TrajectoryHistory:
    """Time-indexed record of array-valued samples of one fixed shape."""

    __slots__ = ("_times", "_values", "_shape")

    def __init__(self):
        self._times: list[float] = []
        self._values: list[np.ndarray] = []
        self._shape = None

    @classmethod
    def from_grid(cls, times, values) -> "TrajectoryHistory":
        """Bulk-build a history from aligned time and value arrays.

        ``values[k]`` is the sample at ``times[k]``; the leading axis of
        ``values`` must match ``len(times)``.
        """
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or len(times) != len(values):
            raise ValueError("times and values must align on the leading axis")
        hist = cls()
        for t, v in zip(times, values):
            hist.append(float(t), v)
        return hist

    def __len__(self) -> int:
        return len(self._times)

    @property
    def t0(self) -> float:
        if not self._times:
            raise ValueError("history is empty")
        return self._times[0]

    @property
    def t_latest(self) -> float:
        if not self._times:
            raise ValueError("history is empty")
        return self._times[-1]

    @property
    def times(self) -> list:
        """Recorded node times, ascending.  Treat as read-only."""
        return self._times

    def append(self, t: float, value) -> None:
        """Record ``value`` at time ``t``; ``t`` must exceed the latest node."""
        value = np.asarray(value, dtype=float)
        if self._shape is None:
            self._shape = value.shape
        elif value.shape != self._shape:
            raise ValueError(
                f"sample shape {value.shape} does not match history shape {self._shape}"
            )
        if self._times and t <= self._times[-1]:
            raise ValueError(
                f"append time {t} is not after latest node {self._times[-1]}"
            )
        self._times.append(float(t))
        self._values.append(value)

    def sample(self, t: float) -> np.ndarray:
        """Value at time ``t``, interpolating linearly between stored nodes."""
        times = self._times
        if not times:
            raise ValueError("history is empty")
        if t < times[0] or t > times[-1]:
            raise ValueError(
                f"query time {t} outside recorded range [{times[0]}, {times[-1]}]"
            )
        i = bisect_right(times, t)
        lo = times[i - 1]
        if lo == t:
            return self._values[i - 1]
        v0 = self._values[i - 1]
        v1 = self._values[i]
        w = (t - lo) / (times[i] - lo)
        return v0 + (v1 - v0) * w

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Stored nodes as ``(times, values)`` arrays; values stack on axis 0."""
        if not self._times:
            raise ValueError("history is empty")
        return np.array(self._times), np.stack(self._values)
