"""Exact counting of integer points in R*sigma(C) + t, and the discrepancy."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import InvalidParameter
from .geometry import IDENTITY, ConvexBody, RigidMotion
from .parallel import ordered_map

_CHUNK = 1 << 18
_GRAZE = 1e-9


@dataclass(frozen=True)
class DiscrepancyRecord:
    body: str
    R: float
    motion: RigidMotion
    count: int
    area_term: float
    value: float


def _row_extent(body, rotation):
    """(down, up): support of the rotated body in directions -e2 and +e2."""
    return body.support(-math.pi / 2 - rotation), body.support(math.pi / 2 - rotation)


def _exact_inside(body, X, Y, R, rotation, tx, ty):
    """Membership of the world point (X, Y) with extended precision."""
    if rotation == 0.0 and body.kind in ("disc", "polygon"):
        # decimal reading of the float inputs, matching how they were written
        x = (Fraction(int(X)) - Fraction(repr(float(tx)))) / Fraction(repr(float(R)))
        y = (Fraction(int(Y)) - Fraction(repr(float(ty)))) / Fraction(repr(float(R)))
        return bool(body.contains_exact(x, y))
    with mpmath.workdps(50):
        c, s = mpmath.cos(rotation), mpmath.sin(rotation)
        wx = (mpmath.mpf(X) - mpmath.mpf(repr(float(tx)))) / mpmath.mpf(repr(float(R)))
        wy = (mpmath.mpf(Y) - mpmath.mpf(repr(float(ty)))) / mpmath.mpf(repr(float(R)))
        return bool(body.contains_exact(c * wx + s * wy, -s * wx + c * wy))


def _count_rows(body, R, rotation, tx, ty, rows):
    """Integer points on the given rows (1D arrays of equal length, per-row motion)."""
    c = np.cos(rotation)
    s = np.sin(rotation)
    ax = -tx
    ay = rows - ty
    p0 = np.column_stack([(c * ax + s * ay) / R, (-s * ax + c * ay) / R])
    d = np.column_stack([c, -s]) if np.ndim(rotation) else np.array([c, -s])
    lo, hi = body.line_interval(p0, d)
    xl = R * lo
    xh = R * hi
    empty = np.isnan(xl)
    with np.errstate(invalid="ignore"):
        left = np.ceil(xl)
        right = np.floor(xh)
    tol = _GRAZE * max(1.0, R)
    kl = np.rint(xl)
    kh = np.rint(xh)
    graze_l = ~empty & (np.abs(xl - kl) < tol)
    graze_h = ~empty & (np.abs(xh - kh) < tol)
    rot_arr = np.broadcast_to(rotation, rows.shape)
    tx_arr = np.broadcast_to(tx, rows.shape)
    ty_arr = np.broadcast_to(ty, rows.shape)
    for i in np.nonzero(graze_l)[0]:
        k = kl[i]
        inside = _exact_inside(body, k, rows[i], R, float(rot_arr[i]), float(tx_arr[i]), float(ty_arr[i]))
        left[i] = k if inside else k + 1
    for i in np.nonzero(graze_h)[0]:
        k = kh[i]
        inside = _exact_inside(body, k, rows[i], R, float(rot_arr[i]), float(tx_arr[i]), float(ty_arr[i]))
        right[i] = k if inside else k - 1
    n = np.where(empty, 0.0, np.maximum(right - left + 1, 0.0)).astype(np.int64)
    return n, empty


def count_batch(body: ConvexBody, R, translations, rotations=0.0, threads=None):
    """Integer point counts for many motions at once.

    ``translations`` is (k, 2); ``rotations`` a scalar or length-k array.
    Translations are used as given (no reduction mod 1).
    """
    R = float(R)
    if R < 1:
        raise InvalidParameter(f"R must be >= 1, got {R}")
    t = np.atleast_2d(np.asarray(translations, dtype=float))
    k = len(t)
    scalar_rot = np.ndim(rotations) == 0
    rot = np.full(k, float(rotations)) if scalar_rot else np.asarray(rotations, dtype=float)
    if scalar_rot:
        down, up = _row_extent(body, float(rotations))
        down = np.full(k, down)
        up = np.full(k, up)
    else:
        ext = np.array([_row_extent(body, r) for r in rot])
        down, up = ext[:, 0], ext[:, 1]
    ylo = t[:, 1] - R * down
    yhi = t[:, 1] + R * up
    first = np.ceil(ylo - _GRAZE * R)
    n_rows = int(np.max(np.floor(yhi + _GRAZE * R) - first)) + 1
    rows = first[:, None] + np.arange(n_rows)[None, :]
    valid = rows <= yhi[:, None] + _GRAZE * R
    idx_s, idx_r = np.nonzero(valid)
    flat_rows = rows[idx_s, idx_r]

    def work(span):
        a, b = span
        sel = idx_s[a:b]
        rr = rot[sel] if not scalar_rot else float(rotations)
        n, empty = _count_rows(body, R, rr, t[sel, 0], t[sel, 1], flat_rows[a:b])
        return n, empty

    spans = [(a, min(a + _CHUNK, len(idx_s))) for a in range(0, len(idx_s), _CHUNK)]
    parts = ordered_map(work, spans, threads)
    counts = np.zeros(k, dtype=np.int64)
    if parts:
        n_all = np.concatenate([p[0] for p in parts])
        empty_all = np.concatenate([p[1] for p in parts])
        np.add.at(counts, idx_s, n_all)
        # rows that only graze the body: the line test may miss a tangent lattice point
        near_edge = empty_all & ((np.abs(flat_rows - ylo[idx_s]) < _GRAZE * R) |
                                 (np.abs(flat_rows - yhi[idx_s]) < _GRAZE * R))
        for j in np.nonzero(near_edge)[0]:
            si = idx_s[j]
            counts[si] += _tangent_row(body, R, rot[si], t[si], flat_rows[j], ylo[si], yhi[si])
    return counts


def _tangent_row(body, R, rotation, t, row, ylo, yhi):
    theta = (math.pi / 2 if abs(row - yhi) < abs(row - ylo) else -math.pi / 2) - rotation
    sp = body.support_point(theta)
    c, s = math.cos(rotation), math.sin(rotation)
    xw = R * (c * sp[0] - s * sp[1]) + t[0]
    found = 0
    for kx in range(int(math.floor(xw)) - 1, int(math.ceil(xw)) + 2):
        if _exact_inside(body, kx, row, R, rotation, t[0], t[1]):
            found += 1
    return found


def count_integer_points(body: ConvexBody, R, motion: RigidMotion = IDENTITY) -> int:
    """Exact number of n in Z^2 with (n - t)/R in sigma(C), boundary included."""
    return int(count_batch(body, R, [motion.translation], motion.rotation)[0])


def robust_contains(body: ConvexBody, p, eps=1e-11):
    """Float membership, with an extended-precision re-check wherever a tiny nudge flips it."""
    p = np.asarray(p, dtype=float)
    flat = p.reshape(-1, 2)
    inside = body.contains(flat)
    unsure = np.zeros_like(inside)
    for dx, dy in ((eps, 0.0), (-eps, 0.0), (0.0, eps), (0.0, -eps)):
        unsure |= body.contains(flat + np.array([dx, dy])) != inside
    if np.any(unsure):
        with mpmath.workdps(50):
            for i in np.nonzero(unsure)[0]:
                inside[i] = bool(body.contains_exact(mpmath.mpf(float(flat[i, 0])),
                                                     mpmath.mpf(float(flat[i, 1]))))
    return inside.reshape(p.shape[:-1])


def brute_force_count(body: ConvexBody, R, motion: RigidMotion = IDENTITY) -> int:
    """O(R^2) membership scan over the bounding box; an independent oracle."""
    R = float(R)
    tx, ty = motion.translation
    rad = body.radius * R
    xs = np.arange(math.floor(tx - rad) - 1, math.ceil(tx + rad) + 2)
    ys = np.arange(math.floor(ty - rad) - 1, math.ceil(ty + rad) + 2)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    w = np.stack([X.ravel(), Y.ravel()], axis=-1).astype(float)
    p = motion.invert(w, R)
    inside = body.contains(p)
    # points whose float membership flips under a tiny nudge get an exact re-check
    eps = 1e-11
    unsure = np.zeros_like(inside)
    for dx, dy in ((eps, 0), (-eps, 0), (0, eps), (0, -eps)):
        unsure |= body.contains(p + np.array([dx, dy])) != inside
    for i in np.nonzero(unsure)[0]:
        inside[i] = _exact_inside(body, w[i, 0], w[i, 1], R, motion.rotation, tx, ty)
    return int(np.count_nonzero(inside))


def discrepancy(body: ConvexBody, R, motion: RigidMotion = IDENTITY) -> DiscrepancyRecord:
    count = count_integer_points(body, R, motion)
    area_term = float(R) ** 2 * body.area
    return DiscrepancyRecord(body.body_id, float(R), motion, count, area_term, count - area_term)


def discrepancy_values(body, R, translations, rotations=0.0, threads=None):
    """Vector of D = count - R^2|C| for many motions."""
    counts = count_batch(body, R, translations, rotations, threads)
    return counts - float(R) ** 2 * body.area


def discrepancy_profile(body: ConvexBody, R, n: int, rotation=0.0, threads=None):
    """D on the translation grid (i/n, j/n), i outer, j inner."""
    if n < 1:
        raise InvalidParameter("grid size must be >= 1")
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    t = np.column_stack([i.ravel() / n, j.ravel() / n])
    counts = count_batch(body, R, t, rotation, threads)
    area_term = float(R) ** 2 * body.area
    return [DiscrepancyRecord(body.body_id, float(R), RigidMotion(rotation, tuple(tt)), int(c),
                              area_term, int(c) - area_term)
            for tt, c in zip(t, counts)]
