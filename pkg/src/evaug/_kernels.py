"""Bilinear affine resampling backend.

One kernel serves resize, rotation, and zoom: for every output pixel center
(half-pixel convention, pixel i covers [i, i+1)) the source location is an
affine map of the destination location, and the value is bilinearly
interpolated from the four neighbouring source pixels. Border handling is
either edge clamp (resize) or zero fill (rotation/zoom).

The hot loop is numba-jitted when numba is importable; a vectorized numpy
fallback implements the same arithmetic.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the fallback tests
    njit = None
    HAVE_NUMBA = False


def _affine_bilinear_loop(src, m00, m01, m10, m11, tx, ty, out, clamp):
    C, Hs, Ws = src.shape
    _, Ho, Wo = out.shape
    for yo in range(Ho):
        for xo in range(Wo):
            xd = xo + 0.5
            yd = yo + 0.5
            u = m00 * xd + m01 * yd + tx - 0.5
            v = m10 * xd + m11 * yd + ty - 0.5
            i0 = int(np.floor(u))
            j0 = int(np.floor(v))
            fx = u - i0
            fy = v - j0
            i1 = i0 + 1
            j1 = j0 + 1
            if clamp:
                i0c = min(max(i0, 0), Ws - 1)
                i1c = min(max(i1, 0), Ws - 1)
                j0c = min(max(j0, 0), Hs - 1)
                j1c = min(max(j1, 0), Hs - 1)
                for c in range(C):
                    v00 = src[c, j0c, i0c]
                    v01 = src[c, j0c, i1c]
                    v10 = src[c, j1c, i0c]
                    v11 = src[c, j1c, i1c]
                    out[c, yo, xo] = (v00 * (1.0 - fx) + v01 * fx) * (1.0 - fy) + (
                        v10 * (1.0 - fx) + v11 * fx
                    ) * fy
            else:
                i0_in = 0 <= i0 < Ws
                i1_in = 0 <= i1 < Ws
                j0_in = 0 <= j0 < Hs
                j1_in = 0 <= j1 < Hs
                for c in range(C):
                    v00 = src[c, j0, i0] if (j0_in and i0_in) else 0.0
                    v01 = src[c, j0, i1] if (j0_in and i1_in) else 0.0
                    v10 = src[c, j1, i0] if (j1_in and i0_in) else 0.0
                    v11 = src[c, j1, i1] if (j1_in and i1_in) else 0.0
                    out[c, yo, xo] = (v00 * (1.0 - fx) + v01 * fx) * (1.0 - fy) + (
                        v10 * (1.0 - fx) + v11 * fx
                    ) * fy
    return out


if HAVE_NUMBA:
    _affine_bilinear_jit = njit(cache=True)(_affine_bilinear_loop)


def _affine_bilinear_numpy(src, m00, m01, m10, m11, tx, ty, out, clamp):
    C, Hs, Ws = src.shape
    _, Ho, Wo = out.shape
    xd = np.arange(Wo, dtype=np.float64) + 0.5
    yd = np.arange(Ho, dtype=np.float64) + 0.5
    u = m00 * xd[None, :] + m01 * yd[:, None] + (tx - 0.5)
    v = m10 * xd[None, :] + m11 * yd[:, None] + (ty - 0.5)
    i0 = np.floor(u).astype(np.int64)
    j0 = np.floor(v).astype(np.int64)
    fx = u - i0
    fy = v - j0
    i1 = i0 + 1
    j1 = j0 + 1
    w00 = (1.0 - fx) * (1.0 - fy)
    w01 = fx * (1.0 - fy)
    w10 = (1.0 - fx) * fy
    w11 = fx * fy
    if not clamp:
        w00 = np.where((i0 >= 0) & (i0 < Ws) & (j0 >= 0) & (j0 < Hs), w00, 0.0)
        w01 = np.where((i1 >= 0) & (i1 < Ws) & (j0 >= 0) & (j0 < Hs), w01, 0.0)
        w10 = np.where((i0 >= 0) & (i0 < Ws) & (j1 >= 0) & (j1 < Hs), w10, 0.0)
        w11 = np.where((i1 >= 0) & (i1 < Ws) & (j1 >= 0) & (j1 < Hs), w11, 0.0)
    i0 = np.clip(i0, 0, Ws - 1)
    i1 = np.clip(i1, 0, Ws - 1)
    j0 = np.clip(j0, 0, Hs - 1)
    j1 = np.clip(j1, 0, Hs - 1)
    flat = src.reshape(C, Hs * Ws)
    k00 = (j0 * Ws + i0).ravel()
    k01 = (j0 * Ws + i1).ravel()
    k10 = (j1 * Ws + i0).ravel()
    k11 = (j1 * Ws + i1).ravel()
    acc = flat[:, k00] * w00.ravel()
    acc += flat[:, k01] * w01.ravel()
    acc += flat[:, k10] * w10.ravel()
    acc += flat[:, k11] * w11.ravel()
    out[...] = acc.reshape(C, Ho, Wo).astype(np.float32)
    return out


def affine_bilinear(
    src: np.ndarray,
    matrix: tuple[float, float, float, float],
    offset: tuple[float, float],
    out_hw: tuple[int, int],
    clamp: bool,
) -> np.ndarray:
    """Resample (C, Hs, Ws) planes through ``src_xy = M @ dst_xy + offset``.

    ``matrix`` is (m00, m01, m10, m11) acting on continuous (x, y) pixel
    coordinates, ``out_hw`` the output plane size. ``clamp`` selects edge
    clamp (True) or zero fill (False) for out-of-range source samples.
    """
    src = np.ascontiguousarray(src, dtype=np.float32)
    Ho, Wo = int(out_hw[0]), int(out_hw[1])
    out = np.empty((src.shape[0], Ho, Wo), dtype=np.float32)
    m00, m01, m10, m11 = (float(m) for m in matrix)
    tx, ty = float(offset[0]), float(offset[1])
    if HAVE_NUMBA:
        return _affine_bilinear_jit(src, m00, m01, m10, m11, tx, ty, out, clamp)
    return _affine_bilinear_numpy(src, m00, m01, m10, m11, tx, ty, out, clamp)


def _occupancy_loop(kinds, xs, ys, ws, hs, mask):
    H, W = mask.shape
    for n in range(kinds.shape[0]):
        w2 = ws[n] / 2.0
        h2 = hs[n] / 2.0
        if w2 <= 0.0 or h2 <= 0.0:
            continue
        cx = xs[n]
        cy = ys[n]
        ix0 = max(0, int(np.floor(cx - w2 - 0.5)))
        ix1 = min(W - 1, int(np.ceil(cx + w2)))
        iy0 = max(0, int(np.floor(cy - h2 - 0.5)))
        iy1 = min(H - 1, int(np.ceil(cy + h2)))
        if kinds[n] == 1:  # axis-aligned rectangle
            for iy in range(iy0, iy1 + 1):
                if abs(iy + 0.5 - cy) <= h2:
                    for ix in range(ix0, ix1 + 1):
                        if abs(ix + 0.5 - cx) <= w2:
                            mask[iy, ix] = True
        else:  # circle / ellipse implicit inequality
            for iy in range(iy0, iy1 + 1):
                ny = (iy + 0.5 - cy) / h2
                ny2 = ny * ny
                if ny2 <= 1.0:
                    for ix in range(ix0, ix1 + 1):
                        nx = (ix + 0.5 - cx) / w2
                        if nx * nx + ny2 <= 1.0:
                            mask[iy, ix] = True
    return mask


if HAVE_NUMBA:
    _occupancy_jit = njit(cache=True)(_occupancy_loop)


def _occupancy_numpy(kinds, xs, ys, ws, hs, mask):
    H, W = mask.shape
    for n in range(kinds.shape[0]):
        w2, h2 = ws[n] / 2.0, hs[n] / 2.0
        if w2 <= 0.0 or h2 <= 0.0:
            continue
        cx, cy = xs[n], ys[n]
        ix0 = max(0, int(np.floor(cx - w2 - 0.5)))
        ix1 = min(W - 1, int(np.ceil(cx + w2)))
        iy0 = max(0, int(np.floor(cy - h2 - 0.5)))
        iy1 = min(H - 1, int(np.ceil(cy + h2)))
        if ix0 > ix1 or iy0 > iy1:
            continue
        px = np.arange(ix0, ix1 + 1, dtype=np.float64) + 0.5
        py = np.arange(iy0, iy1 + 1, dtype=np.float64) + 0.5
        if kinds[n] == 1:
            sub = (np.abs(py - cy) <= h2)[:, None] & (np.abs(px - cx) <= w2)[None, :]
        else:
            nx = (px - cx) / w2
            ny = (py - cy) / h2
            sub = (ny[:, None] ** 2 + nx[None, :] ** 2) <= 1.0
        mask[iy0 : iy1 + 1, ix0 : ix1 + 1] |= sub
    return mask


def fill_occupancy(kinds, xs, ys, ws, hs, mask):
    """OR pixel-center membership of each shape into a boolean (H, W) mask.

    ``kinds`` codes: 0 circle, 1 rectangle, 2 ellipse (circles are ellipses
    with equal extents).
    """
    if HAVE_NUMBA:
        return _occupancy_jit(kinds, xs, ys, ws, hs, mask)
    return _occupancy_numpy(kinds, xs, ys, ws, hs, mask)


def warmup() -> None:
    """Trigger JIT compilation once, before forking worker processes."""
    dummy = np.zeros((1, 2, 2), dtype=np.float32)
    affine_bilinear(dummy, (1.0, 0.0, 0.0, 1.0), (0.0, 0.0), (2, 2), True)
    affine_bilinear(dummy, (1.0, 0.0, 0.0, 1.0), (0.0, 0.0), (2, 2), False)
    fill_occupancy(
        np.zeros(1, dtype=np.int64),
        np.zeros(1),
        np.zeros(1),
        np.ones(1),
        np.ones(1),
        np.zeros((2, 2), dtype=np.bool_),
    )
