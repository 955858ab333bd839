"""Binary/gray image primitives and preprocessing transforms.

Conventions used everywhere in this package:

* images are 2-D ``numpy`` arrays indexed ``[row, col]``, row 0 at the top;
* a gray image is ``uint8`` luminance in ``[0, 255]``;
* a binary image is ``uint8`` with ink (black text) = 1, background = 0.

Dark-background scans are the caller's problem: invert before feeding the
pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InsufficientInkError, InvalidInputError

GrayImage = np.ndarray
BinaryImage = np.ndarray


@dataclass(frozen=True)
class SkewEstimate:
    """Rotation of the text's minimum-area bounding rectangle.

    ``angle`` is in degrees, counter-clockwise positive (visually, the
    right-hand edge of the text block raised), normalized to (-45, 45].
    ``confidence`` is the fraction of ink pixels inside the fitted
    rectangle.
    """

    angle: float
    confidence: float


def _require_nonempty(img: np.ndarray) -> None:
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise InvalidInputError(f"expected a non-empty 2-D image, got shape {img.shape!r}")


def gaussian_kernel(window: int, sigma: float) -> np.ndarray:
    """Normalized 2-D Gaussian weight window (sums to 1)."""
    half = window // 2
    ax = np.arange(-half, half + 1, dtype=np.float64)
    g1 = np.exp(-(ax**2) / (2.0 * sigma * sigma))
    k = np.outer(g1, g1)
    return k / k.sum()


def binarize(img: GrayImage, window: int = 25, offset: float = 10.0) -> BinaryImage:
    """Adaptive Gaussian thresholding.

    A pixel becomes ink iff its luminance is below the Gaussian-weighted
    mean of its ``window`` x ``window`` neighborhood minus ``offset``.
    Borders are handled by edge replication. The 2-D Gaussian window is
    separable, so the mean is computed with two 1-D passes.
    """
    _require_nonempty(img)
    if window < 3 or window % 2 == 0:
        raise InvalidInputError(f"window must be odd and >= 3, got {window}")
    sigma = window / 6.0
    half = window // 2
    ax = np.arange(-half, half + 1, dtype=np.float64)
    g1 = np.exp(-(ax**2) / (2.0 * sigma * sigma))
    g1 /= g1.sum()
    local_mean = ndimage.correlate1d(img.astype(np.float64), g1, axis=0, mode="nearest")
    local_mean = ndimage.correlate1d(local_mean, g1, axis=1, mode="nearest")
    return (img.astype(np.float64) < local_mean - offset).astype(np.uint8)


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain convex hull of (x, y) float points, CCW order.

    Handles collinear/degenerate inputs gracefully (returns the extreme
    points), which scipy's Qhull wrapper does not.
    """
    pts = np.unique(points, axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def estimate_skew(img: BinaryImage) -> SkewEstimate:
    """Skew angle from the minimum-area rectangle enclosing all ink.

    The rectangle orientation is folded into (-45, 45] so that text lines
    map to a near-zero angle regardless of which rectangle side is longer.
    """
    _require_nonempty(img)
    rows, cols = np.nonzero(img)
    if len(rows) < 3:
        raise InsufficientInkError(f"need >= 3 ink pixels to estimate skew, got {len(rows)}")

    # Work in (x, y) with y pointing up so "counter-clockwise positive"
    # matches the visual convention.
    pts = np.column_stack([cols.astype(np.float64), -rows.astype(np.float64)])
    hull = _convex_hull(pts)

    best_angle = 0.0
    best_area = math.inf
    n = len(hull)
    if n <= 2:
        # Collinear ink: the rectangle degenerates to the segment direction.
        d = hull[-1] - hull[0] if n == 2 else np.array([1.0, 0.0])
        best_angle = math.degrees(math.atan2(d[1], d[0]))
    else:
        for i in range(n):
            edge = hull[(i + 1) % n] - hull[i]
            norm = math.hypot(edge[0], edge[1])
            if norm == 0:
                continue
            ux, uy = edge[0] / norm, edge[1] / norm
            rot = np.array([[ux, uy], [-uy, ux]])
            proj = hull @ rot.T
            w = proj[:, 0].max() - proj[:, 0].min()
            h = proj[:, 1].max() - proj[:, 1].min()
            area = max(w, 1e-9) * max(h, 1e-9)
            if area < best_area - 1e-9:
                best_area = area
                best_angle = math.degrees(math.atan2(uy, ux))
        # Ragged margins can tilt the minimum rectangle by a degree or so
        # while saving almost no area; a real page skew shrinks it by
        # several percent. Keep the axis-aligned reading unless the tilted
        # rectangle wins decisively.
        axis_w = pts[:, 0].max() - pts[:, 0].min()
        axis_h = pts[:, 1].max() - pts[:, 1].min()
        if best_area > 0.985 * max(axis_w, 1e-9) * max(axis_h, 1e-9):
            best_angle = 0.0

    # Normalize to (-45, 45].
    angle = best_angle % 90.0
    if angle > 45.0:
        angle -= 90.0
    if angle == -45.0:
        angle = 45.0

    # All ink lies inside its own enclosing rectangle by construction.
    return SkewEstimate(angle=angle, confidence=1.0)


def rotate_binary(img: BinaryImage, angle_deg: float) -> BinaryImage:
    """Rotate about the geometric center, bilinear + re-threshold at 0.5.

    Positive angle rotates the content counter-clockwise (visually). The
    canvas grows to hold the rotated extents; padding is background.
    """
    _require_nonempty(img)
    if angle_deg == 0.0:
        return img.copy()
    h, w = img.shape
    theta = math.radians(angle_deg)
    c, s = math.cos(theta), math.sin(theta)
    new_w = int(math.ceil(abs(w * c) + abs(h * s)))
    new_h = int(math.ceil(abs(w * s) + abs(h * c)))
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ncy, ncx = (new_h - 1) / 2.0, (new_w - 1) / 2.0

    out_r, out_c = np.meshgrid(np.arange(new_h), np.arange(new_w), indexing="ij")
    dy = out_r - ncy
    dx = out_c - ncx
    # Inverse map; rows grow downward, hence the sign layout.
    src_c = c * dx - s * dy + cx
    src_r = s * dx + c * dy + cy

    r0 = np.floor(src_r).astype(np.int64)
    c0 = np.floor(src_c).astype(np.int64)
    fr = src_r - r0
    fc = src_c - c0

    def sample(rr, cc):
        valid = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
        vals = np.zeros(rr.shape, dtype=np.float64)
        vals[valid] = img[rr[valid], cc[valid]]
        return vals

    v = (
        sample(r0, c0) * (1 - fr) * (1 - fc)
        + sample(r0, c0 + 1) * (1 - fr) * fc
        + sample(r0 + 1, c0) * fr * (1 - fc)
        + sample(r0 + 1, c0 + 1) * fr * fc
    )
    return (v >= 0.5).astype(np.uint8)


def deskew(img: BinaryImage, est: SkewEstimate) -> BinaryImage:
    """Undo the estimated rotation (rotate by ``-est.angle``)."""
    if not abs(est.angle) < 45.0 and est.angle != 45.0:
        raise InvalidInputError(f"skew angle out of range: {est.angle}")
    return rotate_binary(img, -est.angle)


def blur(img: BinaryImage, radius: int = 2) -> GrayImage:
    """Box blur of the ink raster with ink treated as luminance 255.

    Borders are edge-replicated; output values are rounded to nearest.
    """
    _require_nonempty(img)
    if radius < 1:
        raise InvalidInputError(f"blur radius must be >= 1, got {radius}")
    side = 2 * radius + 1
    padded = np.pad(img.astype(np.float64) * 255.0, radius, mode="edge")
    # Sliding-window sums via a 2-D cumulative sum (exact integer-ish math).
    csum = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1))
    csum[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    h, w = img.shape
    sums = (
        csum[side : side + h, side : side + w]
        - csum[side : side + h, 0:w]
        - csum[0:h, side : side + w]
        + csum[0:h, 0:w]
    )
    return np.rint(sums / (side * side)).astype(np.uint8)


_ZS_NEIGHBOR_OFFSETS = [
    (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1),
]  # p2..p9 clockwise from north


def _zhang_suen_pass(img: np.ndarray, first_subiter: bool) -> np.ndarray:
    p = np.pad(img, 1)
    nb = [p[1 + dr : 1 + dr + img.shape[0], 1 + dc : 1 + dc + img.shape[1]]
          for dr, dc in _ZS_NEIGHBOR_OFFSETS]
    b = sum(n.astype(np.int32) for n in nb)
    ring = nb + [nb[0]]
    a = sum(((ring[i] == 0) & (ring[i + 1] == 1)).astype(np.int32) for i in range(8))
    p2, p4, p6, p8 = nb[0], nb[2], nb[4], nb[6]
    if first_subiter:
        cond = (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
    else:
        cond = (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
    remove = (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & cond
    out = img.copy()
    out[remove] = 0
    return out


def thin(img: BinaryImage) -> BinaryImage:
    """Zhang-Suen iterative thinning to a 1-pixel 8-connected skeleton.

    Idempotent on its own output; never adds ink.
    """
    _require_nonempty(img)
    cur = img.astype(np.uint8).copy()
    while True:
        nxt = _zhang_suen_pass(cur, first_subiter=True)
        nxt = _zhang_suen_pass(nxt, first_subiter=False)
        if np.array_equal(nxt, cur):
            return nxt
        cur = nxt
