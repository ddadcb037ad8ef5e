"""Dataset I/O: event files, volume tensors, detection labels, manifests.

File formats (all little-endian):

* Event file ``EVS1``: magic ``EVS1``, width u16, height u16, count u64,
  then ``count`` records of 13 bytes each: t u64 (microseconds), x u16,
  y u16, p u8.
* Volume file ``EVTH``: magic ``EVTH``, version u16, dims u32 x 4
  (T, 2, H, W), then T*2*H*W float32 values in C order.
* Event CSV: header line ``t,x,y,p``, one integer record per line.
* Label CSV: header line ``ts,x,y,w,h,class_id,track_id``.

All round trips are lossless and bit-exact; readers reject bad magic,
version, or truncated payloads with the offending byte offset.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, FormatError, ParseError
from .events import EventStream
from .validation import as_volume

logger = logging.getLogger(__name__)

EVENT_MAGIC = b"EVS1"
VOLUME_MAGIC = b"EVTH"
VOLUME_VERSION = 1

_EVENT_HEADER = struct.Struct("<4sHHQ")
_EVENT_RECORD_SIZE = 13  # t u64 + x u16 + y u16 + p u8
_VOLUME_HEADER = struct.Struct("<4sHIIII")

EVENT_FILE_SUFFIX = ".evs"
VOLUME_FILE_SUFFIX = ".evth"


# ---------------------------------------------------------------------------
# event files


def write_events(stream: EventStream, path: str | Path) -> None:
    """Write a stream as a binary EVS1 file."""
    n = len(stream)
    buf = bytearray(_EVENT_HEADER.size + n * _EVENT_RECORD_SIZE)
    _EVENT_HEADER.pack_into(buf, 0, EVENT_MAGIC, stream.width, stream.height, n)
    if n:
        rec = np.zeros(
            n,
            dtype=np.dtype(
                [("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "u1")], align=False
            ),
        )
        rec["t"] = stream.t
        rec["x"] = stream.x
        rec["y"] = stream.y
        rec["p"] = stream.p
        buf[_EVENT_HEADER.size :] = rec.tobytes()
    Path(path).write_bytes(bytes(buf))


def _read_events_binary(data: bytes, path: str) -> tuple[np.ndarray, int, int]:
    if len(data) < _EVENT_HEADER.size:
        raise ParseError(f"{path}: truncated header", offset=len(data))
    magic, width, height, count = _EVENT_HEADER.unpack_from(data, 0)
    if magic != EVENT_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {EVENT_MAGIC!r}")
    body = len(data) - _EVENT_HEADER.size
    expected = count * _EVENT_RECORD_SIZE
    if body != expected:
        # offset of the first incomplete/missing record
        full = min(body, expected) // _EVENT_RECORD_SIZE
        raise ParseError(
            f"{path}: expected {count} records ({expected} bytes), got {body} bytes",
            offset=_EVENT_HEADER.size + full * _EVENT_RECORD_SIZE,
        )
    rec = np.frombuffer(
        data,
        dtype=np.dtype([("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "u1")]),
        count=count,
        offset=_EVENT_HEADER.size,
    )
    cols = np.empty((4, count), dtype=np.int64)
    cols[0] = rec["t"]
    cols[1] = rec["x"]
    cols[2] = rec["y"]
    cols[3] = rec["p"]
    return cols, int(width), int(height)


def _read_events_csv(data: bytes, path: str) -> tuple[np.ndarray, int | None, int | None]:
    text = data.decode("utf-8", errors="strict")
    lines = text.splitlines(keepends=True)
    if not lines or lines[0].strip() != "t,x,y,p":
        raise ParseError(f"{path}: expected CSV header 't,x,y,p'", offset=0)
    rows = []
    offset = len(lines[0].encode())
    for line in lines[1:]:
        stripped = line.strip()
        if stripped:
            parts = stripped.split(",")
            if len(parts) != 4:
                raise ParseError(
                    f"{path}: expected 4 comma-separated fields, got {stripped!r}",
                    offset=offset,
                )
            try:
                rows.append([int(v) for v in parts])
            except ValueError:
                raise ParseError(
                    f"{path}: non-integer field in {stripped!r}", offset=offset
                ) from None
        offset += len(line.encode())
    if not rows:
        return np.empty((4, 0), dtype=np.int64), None, None
    arr = np.array(rows, dtype=np.int64).T
    return arr, None, None


def read_events(
    path: str | Path,
    format: str = "auto",
    width: int | None = None,
    height: int | None = None,
) -> EventStream:
    """Read an event file into a time-sorted, bounds-checked stream.

    ``format`` is ``"binary"``, ``"csv"``, or ``"auto"`` (sniff by suffix
    then magic). CSV files carry no sensor dims, so ``width``/``height``
    must be given (or default to the tightest bounds that fit the data).
    Out-of-order events are stably re-sorted; out-of-bounds events are
    dropped with a logged count. An empty file body is a valid empty stream.
    """
    path = Path(path)
    data = path.read_bytes()
    fmt = format.lower()
    if fmt == "auto":
        if path.suffix.lower() == ".csv" or data.startswith(b"t,x,y,p"):
            fmt = "csv"
        else:
            fmt = "binary"  # binary reader reports a precise bad-magic error
    if fmt in ("binary", "binaryv1", "evs1"):
        cols, w, h = _read_events_binary(data, str(path))
    elif fmt == "csv":
        cols, w, h = _read_events_csv(data, str(path))
    else:
        raise FormatError(f"unknown event format {format!r}")
    if width is not None:
        w = width
    if height is not None:
        h = height
    t, x, y, p = cols
    if w is None or h is None:
        w = int(x.max()) + 1 if len(x) else 1
        h = int(y.max()) + 1 if len(y) else 1
    inside = (x >= 0) & (x < w) & (y >= 0) & (y < h) & (p >= 0) & (p <= 1) & (t >= 0)
    dropped = int(len(t) - inside.sum())
    if dropped:
        logger.warning("%s: dropped %d out-of-bounds events", path, dropped)
        t, x, y, p = t[inside], x[inside], y[inside], p[inside]
    order = np.argsort(t, kind="stable")
    return EventStream(x[order], y[order], t[order], p[order], w, h)


# ---------------------------------------------------------------------------
# volume files


def write_volume(vol: np.ndarray, path: str | Path) -> None:
    """Write a (T, 2, H, W) volume as an EVTH file."""
    vol = as_volume(vol)
    T, P, H, W = vol.shape
    header = _VOLUME_HEADER.pack(VOLUME_MAGIC, VOLUME_VERSION, T, P, H, W)
    Path(path).write_bytes(header + vol.astype("<f4", copy=False).tobytes(order="C"))


def read_volume(path: str | Path) -> np.ndarray:
    """Read an EVTH file back into a float32 volume."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _VOLUME_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, T, P, H, W = _VOLUME_HEADER.unpack_from(data, 0)
    if magic != VOLUME_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {VOLUME_MAGIC!r}")
    if version != VOLUME_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if P != 2:
        raise FormatError(f"{path}: polarity axis must be 2, got {P}")
    expected = T * P * H * W * 4
    body = len(data) - _VOLUME_HEADER.size
    if body != expected:
        raise FormatError(
            f"{path}: payload is {body} bytes, header implies {expected}"
        )
    arr = np.frombuffer(data, dtype="<f4", count=T * P * H * W, offset=_VOLUME_HEADER.size)
    return arr.reshape(T, P, H, W).astype(np.float32, copy=True)


# ---------------------------------------------------------------------------
# detection labels


@dataclass(frozen=True)
class BBoxLabel:
    """One detection box at a timestamp (top-left corner plus extent)."""

    ts: int
    x: float
    y: float
    w: float
    h: float
    class_id: int
    track_id: int = 0

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ConfigurationError(
                f"box extent must be positive, got {self.w}x{self.h}"
            )


MIN_BOX_DIAGONAL = 30.0
MIN_BOX_SIDE = 10.0


def filter_boxes(labels: Iterable[BBoxLabel]) -> list[BBoxLabel]:
    """Drop tiny detection boxes.

    A box is removed when its diagonal is shorter than 30px or either side
    is shorter than 10px; boxes exactly at the thresholds are kept. Order is
    preserved and the filter is idempotent.
    """
    return [
        b
        for b in labels
        if math.hypot(b.w, b.h) >= MIN_BOX_DIAGONAL
        and b.w >= MIN_BOX_SIDE
        and b.h >= MIN_BOX_SIDE
    ]


_LABEL_HEADER = "ts,x,y,w,h,class_id,track_id"


def write_labels(labels: Sequence[BBoxLabel], path: str | Path) -> None:
    lines = [_LABEL_HEADER]
    for b in labels:
        lines.append(
            f"{b.ts},{b.x:g},{b.y:g},{b.w:g},{b.h:g},{b.class_id},{b.track_id}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_labels(path: str | Path) -> list[BBoxLabel]:
    path = Path(path)
    text = path.read_text()
    lines = text.splitlines(keepends=True)
    if not lines or lines[0].strip() != _LABEL_HEADER:
        raise ParseError(f"{path}: expected header {_LABEL_HEADER!r}", offset=0)
    out = []
    offset = len(lines[0].encode())
    for line in lines[1:]:
        stripped = line.strip()
        if stripped:
            parts = stripped.split(",")
            if len(parts) != 7:
                raise ParseError(
                    f"{path}: expected 7 fields, got {stripped!r}", offset=offset
                )
            try:
                out.append(
                    BBoxLabel(
                        ts=int(parts[0]),
                        x=float(parts[1]),
                        y=float(parts[2]),
                        w=float(parts[3]),
                        h=float(parts[4]),
                        class_id=int(parts[5]),
                        track_id=int(parts[6]),
                    )
                )
            except (ValueError, ConfigurationError):
                raise ParseError(
                    f"{path}: malformed record {stripped!r}", offset=offset
                ) from None
        offset += len(line.encode())
    return out


# ---------------------------------------------------------------------------
# manifests


def file_digest(path: str | Path) -> str:
    """Stable 64-bit content digest, hex-encoded."""
    return hashlib.blake2b(Path(path).read_bytes(), digest_size=8).hexdigest()


def write_manifest(manifest: dict, path: str | Path) -> None:
    """Serialize a manifest with deterministic bytes (sorted keys)."""
    Path(path).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def read_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
