import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evaug.errors import ConfigurationError
from evaug.events import Event, EventStream, TimeWindow, concat_streams, slice_windows

from conftest import random_stream


def test_event_stream_basics():
    s = EventStream([1, 2], [3, 4], [10, 20], [0, 1], 8, 8)
    assert len(s) == 2
    assert s[1] == Event(2, 4, 20, 1)
    assert list(s) == [Event(1, 3, 10, 0), Event(2, 4, 20, 1)]


def test_event_stream_rejects_unsorted():
    with pytest.raises(ConfigurationError):
        EventStream([0, 0], [0, 0], [20, 10], [0, 0], 4, 4)


def test_event_stream_rejects_out_of_bounds():
    with pytest.raises(ConfigurationError):
        EventStream([4], [0], [0], [0], 4, 4)
    with pytest.raises(ConfigurationError):
        EventStream([0], [0], [0], [2], 4, 4)


def test_event_stream_arrays_immutable():
    s = EventStream([1], [1], [1], [1], 4, 4)
    with pytest.raises(ValueError):
        s.x[0] = 2


def test_time_window_rejects_degenerate():
    with pytest.raises(ConfigurationError):
        TimeWindow(10, 10)
    with pytest.raises(ConfigurationError):
        TimeWindow(10, 5)


def test_slice_windows_documented_example():
    s = EventStream([0, 1, 2], [0, 0, 0], [0, 100, 200], [0, 0, 0], 4, 4)
    parts = slice_windows(s, 125)
    assert len(parts) == 2
    (w0, s0), (w1, s1) = parts
    assert (w0.t_start, w0.t_end) == (0, 125)
    assert (w1.t_start, w1.t_end) == (125, 250)
    assert list(s0.t) == [0, 100]
    assert list(s1.t) == [200]


def test_slice_windows_single_event():
    s = EventStream([0], [0], [42], [1], 4, 4)
    parts = slice_windows(s, 1000)
    assert len(parts) == 1
    assert len(parts[0][1]) == 1


def test_slice_windows_empty_stream():
    assert slice_windows(EventStream.empty(4, 4), 100) == []


def test_slice_windows_roundtrip_large(rng):
    # concatenating all window sub-streams reproduces the stream exactly
    s = random_stream(rng, 100_000, 64, 48, t_max=2_000_000)
    parts = slice_windows(s, 125_000)
    rebuilt = concat_streams([sub for _, sub in parts])
    assert rebuilt == s
    # windows tile the time axis without gaps
    for (w_prev, _), (w_next, _) in zip(parts, parts[1:]):
        assert w_prev.t_end == w_next.t_start


@settings(max_examples=50, deadline=None)
@given(
    ts=st.lists(st.integers(0, 10_000), min_size=1, max_size=200),
    window=st.integers(1, 3_000),
)
def test_slice_windows_partition_property(ts, window):
    ts = sorted(ts)
    n = len(ts)
    s = EventStream([0] * n, [0] * n, ts, [0] * n, 4, 4)
    parts = slice_windows(s, window)
    # every event lands in exactly one window
    assert sum(len(sub) for _, sub in parts) == n
    for w, sub in parts:
        assert all(w.t_start <= t < w.t_end for t in sub.t)
