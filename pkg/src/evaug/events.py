"""Event data model: single events, columnar streams, and time windowing.

An event camera reports asynchronous per-pixel brightness changes. Each
change is one event ``(x, y, t, p)``: pixel column, pixel row, timestamp in
microseconds, and polarity (1 brighter, 0 darker). A recording is a stream
of events sorted by timestamp.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Event:
    """One sensor event."""

    x: int
    y: int
    t: int
    p: int


@dataclass(frozen=True)
class TimeWindow:
    """Half-open-ish time span in microseconds; ``t_start`` must precede ``t_end``."""

    t_start: int
    t_end: int

    def __post_init__(self):
        if self.t_start >= self.t_end:
            raise ConfigurationError(
                f"degenerate time window [{self.t_start}, {self.t_end})"
            )

    @property
    def span(self) -> int:
        return self.t_end - self.t_start


class EventStream:
    """Columnar batch of events for one sensor, sorted by timestamp.

    Arrays are stored read-only; streams are safe to share across threads.
    """

    __slots__ = ("x", "y", "t", "p", "width", "height")

    def __init__(self, x, y, t, p, width: int, height: int):
        x = np.ascontiguousarray(x, dtype=np.int32)
        y = np.ascontiguousarray(y, dtype=np.int32)
        t = np.ascontiguousarray(t, dtype=np.int64)
        p = np.ascontiguousarray(p, dtype=np.uint8)
        n = len(t)
        if not (len(x) == len(y) == len(p) == n):
            raise ConfigurationError("event columns have mismatched lengths")
        if width < 1 or height < 1:
            raise ConfigurationError(f"bad sensor dims {width}x{height}")
        if n:
            if np.any(np.diff(t) < 0):
                raise ConfigurationError("event timestamps must be non-decreasing")
            if (
                x.min() < 0
                or y.min() < 0
                or x.max() >= width
                or y.max() >= height
            ):
                raise ConfigurationError("event coordinates outside sensor bounds")
            if p.max() > 1:
                raise ConfigurationError("polarity must be 0 or 1")
        for arr in (x, y, t, p):
            arr.setflags(write=False)
        self.x, self.y, self.t, self.p = x, y, t, p
        self.width, self.height = int(width), int(height)

    @classmethod
    def from_events(cls, events: Iterable[Event], width: int, height: int) -> "EventStream":
        ev = list(events)
        return cls(
            [e.x for e in ev],
            [e.y for e in ev],
            [e.t for e in ev],
            [e.p for e in ev],
            width,
            height,
        )

    @classmethod
    def empty(cls, width: int, height: int) -> "EventStream":
        return cls([], [], [], [], width, height)

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, i: int) -> Event:
        return Event(int(self.x[i]), int(self.y[i]), int(self.t[i]), int(self.p[i]))

    def __iter__(self) -> Iterator[Event]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventStream):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.p, other.p)
        )

    def select(self, mask_or_slice) -> "EventStream":
        """Sub-stream with the same sensor dims."""
        return EventStream(
            self.x[mask_or_slice],
            self.y[mask_or_slice],
            self.t[mask_or_slice],
            self.p[mask_or_slice],
            self.width,
            self.height,
        )

    @property
    def time_span(self) -> TimeWindow | None:
        """Window covering the recording, or None for an empty stream.

        A single-timestamp stream yields a 1 microsecond window so that the
        covering window is never degenerate.
        """
        if not len(self):
            return None
        t0, t1 = int(self.t[0]), int(self.t[-1])
        return TimeWindow(t0, t1 if t1 > t0 else t0 + 1)


def slice_windows(
    stream: EventStream, window_us: int
) -> list[tuple[TimeWindow, EventStream]]:
    """Partition a stream into consecutive fixed-length windows.

    Windows of ``window_us`` microseconds cover [first event t, last event t];
    window k holds exactly the events with ``t_start <= t < t_end``. The last
    window may be partially filled. An empty stream yields an empty list.
    """
    window_us = int(window_us)
    if window_us <= 0:
        raise ConfigurationError(f"window_us must be positive, got {window_us}")
    if not len(stream):
        return []
    t0 = int(stream.t[0])
    n_windows = int((int(stream.t[-1]) - t0) // window_us) + 1
    # searchsorted on the sorted timestamp column gives each window boundary
    bounds = t0 + window_us * np.arange(n_windows + 1, dtype=np.int64)
    idx = np.searchsorted(stream.t, bounds, side="left")
    out = []
    for k in range(n_windows):
        win = TimeWindow(int(bounds[k]), int(bounds[k + 1]))
        out.append((win, stream.select(slice(int(idx[k]), int(idx[k + 1])))))
    return out


def concat_streams(parts: Sequence[EventStream]) -> EventStream:
    """Concatenate time-ordered sub-streams back into one stream."""
    if not parts:
        raise ConfigurationError("cannot concatenate zero streams")
    width, height = parts[0].width, parts[0].height
    for s in parts:
        if (s.width, s.height) != (width, height):
            raise ConfigurationError("sensor dims differ between streams")
    return EventStream(
        np.concatenate([s.x for s in parts]),
        np.concatenate([s.y for s in parts]),
        np.concatenate([s.t for s in parts]),
        np.concatenate([s.p for s in parts]),
        width,
        height,
    )
