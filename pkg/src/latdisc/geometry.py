"""Planar convex bodies: the unit disc, C_gamma bodies with one flat point,
and convex polygons.

All bodies are immutable.  Vectorised methods take arrays of points with a
trailing axis of length 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, optimize

from .errors import (ConstructionError, EmptyChord, InvalidParameter,
                     UnsupportedBody)

TWO_PI = 2.0 * math.pi
_BISECT_ITERS = 64


def unit(theta):
    return np.array([math.cos(theta), math.sin(theta)])


def rot(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class Direction:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @property
    def vec(self):
        return unit(self.theta)

    def opposite(self):
        return Direction(self.theta + math.pi)


def _theta(theta):
    return theta.theta if isinstance(theta, Direction) else float(theta)


@dataclass(frozen=True)
class RigidMotion:
    """Rotation by ``rotation`` radians followed by translation ``translation``.

    The translation is reduced to [-1/2, 1/2)^2; lattice counts are
    invariant under integer shifts so nothing is lost.
    """

    rotation: float = 0.0
    translation: tuple = (0.0, 0.0)

    def __post_init__(self):
        tx, ty = (float(v) for v in self.translation)
        tx -= math.floor(tx + 0.5)
        ty -= math.floor(ty + 0.5)
        object.__setattr__(self, "rotation", float(self.rotation))
        object.__setattr__(self, "translation", (tx, ty))

    def apply(self, p, R=1.0):
        return R * (np.asarray(p, dtype=float) @ rot(self.rotation).T) + np.asarray(self.translation)

    def invert(self, w, R=1.0):
        return ((np.asarray(w, dtype=float) - np.asarray(self.translation)) / R) @ rot(self.rotation)


IDENTITY = RigidMotion()


@dataclass(frozen=True)
class BodySample:
    s: float
    point: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    curvature: float


# ---------------------------------------------------------------------------
# boundary pieces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Arc:
    center: tuple
    radius: float
    a0: float
    a1: float

    @property
    def length(self):
        return self.radius * (self.a1 - self.a0)

    def sample(self, s):
        a = self.a0 + s / self.radius
        n = unit(a)
        p = np.asarray(self.center) + self.radius * n
        return p, np.array([-n[1], n[0]]), n, 1.0 / self.radius

    def nodes(self, u, w):
        """Points and outward normal weights (nu ds) for parameter nodes u."""
        c = np.cos(u)
        s = np.sin(u)
        pts = np.column_stack([self.center[0] + self.radius * c, self.center[1] + self.radius * s])
        wn = np.column_stack([c, s]) * (self.radius * w)[:, None]
        return pts, wn

    def break_points(self, n_panels):
        return np.linspace(self.a0, self.a1, n_panels + 1)


@dataclass(frozen=True)
class _FlatArc:
    """Graph y = |x|^gamma for x in [xa, xb], traversed left to right."""

    gamma: float
    xa: float
    xb: float

    def f(self, x):
        return np.abs(x) ** self.gamma

    def fp(self, x):
        return self.gamma * np.sign(x) * np.abs(x) ** (self.gamma - 1.0)

    def _speed(self, x):
        return math.sqrt(1.0 + (self.gamma * abs(x) ** (self.gamma - 1.0)) ** 2)

    def arclen(self, x):
        return integrate.quad(self._speed, self.xa, x, epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    @cached_property
    def length(self):
        return self.arclen(self.xb)

    def x_at(self, s):
        if s <= 0:
            return self.xa
        if s >= self.length:
            return self.xb
        return optimize.brentq(lambda x: self.arclen(x) - s, self.xa, self.xb, xtol=1e-15, rtol=1e-15)

    def sample(self, s):
        x = self.x_at(s)
        d = np.array([1.0, float(self.fp(x))])
        speed = np.hypot(*d)
        t = d / speed
        g = self.gamma
        ax = abs(x)
        k = g * (g - 1) * ax ** (g - 2) / (1 + g * g * ax ** (2 * g - 2)) ** 1.5
        return np.array([x, ax ** g]), t, np.array([t[1], -t[0]]), k

    def break_points(self, n_panels):
        # geometric grading towards x = 0, where |x|^gamma is not smooth
        lo, hi = self.xa, self.xb
        toward_zero_at_hi = abs(hi) < abs(lo)
        span = hi - lo
        fracs = [1.0]
        while fracs[-1] > 1e-7:
            fracs.append(fracs[-1] * 0.5)
        fracs = np.array(fracs[::-1])
        if toward_zero_at_hi:
            graded = hi - span * fracs
            graded = np.concatenate([[lo], graded])
        else:
            graded = lo + span * fracs
            graded = np.concatenate([[lo], graded])
        graded = np.unique(graded)
        uniform = np.linspace(lo, hi, n_panels + 1)
        return np.unique(np.concatenate([graded, uniform]))

    def nodes(self, u, w):
        fx = self.f(u)
        pts = np.column_stack([u, fx])
        wn = np.column_stack([self.fp(u), -np.ones_like(u)]) * w[:, None]
        return pts, wn


@dataclass(frozen=True)
class _Segment:
    a: tuple
    b: tuple

    @property
    def length(self):
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])

    def break_points(self, n_panels):
        return np.linspace(0.0, 1.0, n_panels + 1)

    def nodes(self, u, w):
        a = np.asarray(self.a)
        e = np.asarray(self.b) - a
        pts = a + u[:, None] * e
        wn = np.tile([e[1], -e[0]], (len(u), 1)) * w[:, None]
        return pts, wn


_GAUSS_CACHE = {}


def gauss_rule(order):
    if order not in _GAUSS_CACHE:
        _GAUSS_CACHE[order] = leggauss(order)
    return _GAUSS_CACHE[order]


def composite_gauss(breaks, order):
    """Nodes and weights of a composite Gauss-Legendre rule on the given breaks."""
    x, w = gauss_rule(order)
    a = np.asarray(breaks[:-1])[:, None]
    b = np.asarray(breaks[1:])[:, None]
    half = 0.5 * (b - a)
    u = (0.5 * (a + b) + half * x).ravel()
    ww = (half * w).ravel()
    return u, ww


# ---------------------------------------------------------------------------
# bodies
# ---------------------------------------------------------------------------

class ConvexBody:
    """Common interface.  Subclasses fill in the geometry."""

    kind = "abstract"
    smooth = True

    @property
    def spec(self):
        raise NotImplementedError

    @property
    def body_id(self):
        return self.kind

    def contains(self, p):
        raise NotImplementedError

    def contains_exact(self, x, y):
        """Membership with extended precision; x, y are mpmath numbers or Fractions."""
        raise NotImplementedError

    def support_point(self, theta):
        raise NotImplementedError

    def support(self, theta):
        th = _theta(theta)
        return float(self.support_point(th) @ unit(th))

    def width(self, theta):
        th = _theta(theta)
        return self.support(th) + self.support(th + math.pi)

    @property
    def radius(self):
        """Upper bound for |p| over the body."""
        raise NotImplementedError

    def line_interval(self, p0, d):
        """Parameter interval [lo, hi] of {p0 + lam d} inside the body (NaN if empty)."""
        raise NotImplementedError

    def pieces(self):
        raise NotImplementedError

    @property
    def perimeter(self):
        return sum(pc.length for pc in self.pieces())

    def quadrature_nodes(self, rho, nodes_per_wavelength=20, panel_order=10):
        """Boundary nodes and outward normal weights nu*ds, resolving frequency rho."""
        pts, wns = [], []
        for pc in self.pieces():
            n_panels = max(2, int(math.ceil(nodes_per_wavelength * max(rho, 1.0) * pc.length / panel_order)))
            u, w = composite_gauss(pc.break_points(n_panels), panel_order)
            p, wn = pc.nodes(u, w)
            pts.append(p)
            wns.append(wn)
        return np.concatenate(pts), np.concatenate(wns)

    def node_count(self, rho, nodes_per_wavelength=20, panel_order=10):
        return sum(
            panel_order * max(2, int(math.ceil(nodes_per_wavelength * max(rho, 1.0) * pc.length / panel_order)))
            for pc in self.pieces()
        )

    def boundary_param(self, s):
        pcs = self.pieces()
        total = sum(pc.length for pc in pcs)
        s = float(s) % total
        for pc in pcs:
            if s <= pc.length:
                p, t, n, k = pc.sample(s)
                return BodySample(s, p, t, n, k)
            s -= pc.length
        p, t, n, k = pcs[-1].sample(pcs[-1].length)
        return BodySample(total, p, t, n, k)

    def curvature_at_normal(self, theta):
        raise NotImplementedError

    def stationary_points(self, theta):
        th = _theta(theta)
        s1 = self.support_point(th)
        s2 = self.support_point(th + math.pi)
        return s1, s2, self.curvature_at_normal(th), self.curvature_at_normal(th + math.pi)


class Disc(ConvexBody):
    kind = "disc"

    @property
    def spec(self):
        return {"kind": "disc"}

    @property
    def area(self):
        return math.pi

    @property
    def radius(self):
        return 1.0

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        return p[..., 0] ** 2 + p[..., 1] ** 2 <= 1.0

    def contains_exact(self, x, y):
        return x * x + y * y <= 1

    def support_point(self, theta):
        return unit(_theta(theta))

    def support(self, theta):
        return 1.0

    def curvature_at_normal(self, theta):
        return 1.0

    def line_interval(self, p0, d):
        p0 = np.asarray(p0, dtype=float)
        d = np.broadcast_to(np.asarray(d, dtype=float), p0.shape)
        b = np.einsum("...i,...i->...", p0, d)
        c = np.einsum("...i,...i->...", p0, p0) - 1.0
        disc = b * b - c
        with np.errstate(invalid="ignore"):
            r = np.sqrt(disc)
        lo = np.where(disc >= 0, -b - r, np.nan)
        hi = np.where(disc >= 0, -b + r, np.nan)
        return lo, hi

    def pieces(self):
        return [_Arc((0.0, 0.0), 1.0, 0.0, TWO_PI)]


class ConvexPolygon(ConvexBody):
    kind = "polygon"
    smooth = False

    def __init__(self, vertices, name=None):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidParameter("polygon needs at least three 2D vertices")
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if not np.all(cross > 0):
            raise InvalidParameter("vertices must be strictly convex and counterclockwise")
        self.vertices = v
        self._edges = e
        # outward normals (unnormalised) and offsets: n.p <= b inside
        self._normals = np.column_stack([e[:, 1], -e[:, 0]])
        self._offsets = np.einsum("ij,ij->i", self._normals, v)
        self._name = name
        fr = [(Fraction(repr(float(a))), Fraction(repr(float(b)))) for a, b in v.tolist()]
        self._area = float(sum(fr[i][0] * fr[(i + 1) % len(fr)][1] - fr[(i + 1) % len(fr)][0] * fr[i][1]
                               for i in range(len(fr))) / 2)
        self._frac = fr

    @classmethod
    def square(cls, side=1.0, angle=0.0):
        h = side / 2.0
        v = np.array([[-h, -h], [h, -h], [h, h], [-h, h]])
        if angle:
            v = v @ rot(angle).T
        return cls(v, name="square")

    @classmethod
    def davenport_square(cls, slope="sqrt2", side=1.0):
        """Square whose sides have the given (irrational) slope."""
        value = {"sqrt2": math.sqrt(2.0), "sqrt3": math.sqrt(3.0),
                 "golden": (1 + math.sqrt(5.0)) / 2}.get(slope) if isinstance(slope, str) else float(slope)
        if value is None:
            raise InvalidParameter(f"unknown slope tag {slope!r}")
        sq = cls.square(side, math.atan(value))
        sq._slope_tag = slope
        return sq

    @property
    def spec(self):
        tag = getattr(self, "_slope_tag", None)
        if tag is not None:
            return {"kind": "square", "slope": tag, "side": float(self._side_len())}
        return {"kind": "polygon", "vertices": self.vertices.tolist()}

    def _side_len(self):
        return float(np.hypot(*self._edges[0]))

    @property
    def body_id(self):
        return self._name or "polygon"

    @property
    def area(self):
        return self._area

    @property
    def radius(self):
        return float(np.max(np.hypot(self.vertices[:, 0], self.vertices[:, 1])))

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        out = np.ones(p.shape[:-1], dtype=bool)
        for n, b in zip(self._normals, self._offsets):
            out &= p[..., 0] * n[0] + p[..., 1] * n[1] <= b
        return out

    def contains_exact(self, x, y):
        fr = self._frac
        k = len(fr)
        for i in range(k):
            ax, ay = fr[i]
            bx, by = fr[(i + 1) % k]
            if isinstance(x, Fraction):
                c = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
            else:
                bx, ax, by, ay = (mpmath.mpf(q.numerator) / q.denominator for q in (bx, ax, by, ay))
                c = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
            if c < 0:
                return False
        return True

    def support_point(self, theta):
        th = _theta(theta)
        return self.vertices[int(np.argmax(self.vertices @ unit(th)))]

    def curvature_at_normal(self, theta):
        raise UnsupportedBody("curvature is undefined on a polygon")

    def stationary_points(self, theta):
        raise UnsupportedBody("stationary points need a smooth boundary; got a polygon")

    def boundary_param(self, s):
        raise UnsupportedBody("curvature undefined on a polygon; use edge_samples()")

    def edge_samples(self):
        """Per-edge (start, end, unit tangent, outward unit normal, length)."""
        out = []
        for a, e, n in zip(self.vertices, self._edges, self._normals):
            L = float(np.hypot(*e))
            out.append((a, a + e, e / L, n / L, L))
        return out

    def line_interval(self, p0, d):
        p0 = np.asarray(p0, dtype=float)
        d = np.broadcast_to(np.asarray(d, dtype=float), p0.shape)
        lo = np.full(p0.shape[:-1], -np.inf)
        hi = np.full(p0.shape[:-1], np.inf)
        ok = np.ones(p0.shape[:-1], dtype=bool)
        with np.errstate(divide="ignore", invalid="ignore"):
            for n, b in zip(self._normals, self._offsets):
                nd = d[..., 0] * n[0] + d[..., 1] * n[1]
                slack = b - (p0[..., 0] * n[0] + p0[..., 1] * n[1])
                lam = slack / nd
                hi = np.where(nd > 0, np.minimum(hi, lam), hi)
                lo = np.where(nd < 0, np.maximum(lo, lam), lo)
                ok &= ~((nd == 0) & (slack < 0))
        ok &= lo <= hi
        return np.where(ok, lo, np.nan), np.where(ok, hi, np.nan)

    def pieces(self):
        return [_Segment(tuple(a), tuple(a + e)) for a, e in zip(self.vertices, self._edges)]

    def quadrature_nodes(self, rho, nodes_per_wavelength=20, panel_order=10):
        return ConvexBody.quadrature_nodes(self, rho, nodes_per_wavelength, panel_order)


class CGammaBody(ConvexBody):
    """Convex body whose boundary near the origin is the graph y = |x|^gamma.

    Construction: the flat arc on |x| <= x0 is continued, with matching
    tangent, by two circular arcs of radius ``r_side`` up to their
    horizontal-normal points; a circular cap of radius
    ``r_top = c_x + r_side`` centred on the y axis closes the body.
    Every junction is C^1.
    """

    kind = "cgamma"

    def __init__(self, gamma, x0=0.2, r_side=0.14):
        if not gamma > 2:
            raise InvalidParameter(f"gamma must exceed 2, got {gamma}")
        self.gamma = g = float(gamma)
        self.x0 = x0 = float(x0)
        self.r_side = rs = float(r_side)
        self.y0 = x0 ** g
        self.s0 = g * x0 ** (g - 1)          # slope at the junction
        self.phi0 = math.atan(self.s0)       # normal tilt at the junction
        nrm = math.hypot(1.0, self.s0)
        self.cx = x0 - rs * self.s0 / nrm
        self.cy = self.y0 + rs / nrm
        self.r_top = self.cx + rs
        top = self.cy + self.r_top
        if not (self.cx > 0 and top < 0.5 and self.r_top < 0.5):
            raise ConstructionError("C_gamma construction leaves the open unit square")
        # the cap disc must contain the flat arc for the two-constraint description
        if math.hypot(x0, self.cy - self.y0) >= self.r_top:
            raise ConstructionError("flat arc escapes the cap disc")
        self._pieces = [
            _FlatArc(g, 0.0, x0),
            _Arc((self.cx, self.cy), rs, -math.pi / 2 + self.phi0, 0.0),
            _Arc((0.0, self.cy), self.r_top, 0.0, math.pi),
            _Arc((-self.cx, self.cy), rs, math.pi, 1.5 * math.pi - self.phi0),
            _FlatArc(g, -x0, 0.0),
        ]
        self._area = self._compute_area()
        half = 0.5 * x0
        k_half = g * (g - 1) * half ** (g - 2) / (1 + (g * half ** (g - 1)) ** 2) ** 1.5
        self.curvature_floor = min(k_half, 1.0 / rs, 1.0 / self.r_top)

    def _compute_area(self):
        # Green: area = 1/2 * closed integral of (x dy - y dx), piece by piece
        g, x0 = self.gamma, self.x0
        total = 2.0 * (g - 1.0) * x0 ** (g + 1.0) / (g + 1.0)
        for pc in self._pieces:
            if isinstance(pc, _Arc):
                cx, cy = pc.center
                r = pc.radius
                da = pc.a1 - pc.a0
                total += r * r * da + r * (cx * (math.sin(pc.a1) - math.sin(pc.a0))
                                           - cy * (math.cos(pc.a1) - math.cos(pc.a0)))
        return 0.5 * total

    @property
    def spec(self):
        return {"kind": "cgamma", "gamma": self.gamma}

    @property
    def body_id(self):
        return f"cgamma{self.gamma:g}"

    @property
    def area(self):
        return self._area

    @property
    def radius(self):
        return self.cy + self.r_top

    @property
    def flat_normal(self):
        return -math.pi / 2

    def pieces(self):
        return self._pieces

    # lower boundary y = f(x) on |x| <= r_top; the body is
    # {|x| <= r_top, y >= f(x)} intersected with the cap disc
    def lower(self, x):
        ax = np.abs(x)
        flat = ax <= self.x0
        with np.errstate(invalid="ignore"):
            side = self.cy - np.sqrt(np.maximum(self.r_side ** 2 - (ax - self.cx) ** 2, 0.0))
            return np.where(flat, np.minimum(ax, self.x0) ** self.gamma, side)

    def _x_at_slope(self, beta):
        """x where f'(x) = beta."""
        ab = np.abs(beta)
        on_flat = ab <= self.s0
        with np.errstate(over="ignore", invalid="ignore"):
            xf = (np.minimum(ab, self.s0) / self.gamma) ** (1.0 / (self.gamma - 1.0))
            xs = self.cx + self.r_side * ab / np.sqrt(1.0 + ab * ab)
            xs = np.where(np.isfinite(xs), xs, self.cx + self.r_side)
        return np.sign(beta) * np.where(on_flat, xf, xs)

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        x, y = p[..., 0], p[..., 1]
        in_cap = x * x + (y - self.cy) ** 2 <= self.r_top ** 2
        ok = in_cap & (np.abs(x) <= self.r_top)
        return ok & (y >= self.lower(np.clip(x, -self.r_top, self.r_top)))

    def contains_exact(self, x, y):
        mp = mpmath.mpf
        g, cx, cy, rs, rt = mp(self.gamma), mp(self.cx), mp(self.cy), mp(self.r_side), mp(self.r_top)
        x, y = mp(x), mp(y)
        if x * x + (y - cy) ** 2 > rt * rt:
            return False
        ax = abs(x)
        if ax <= mp(self.x0):
            return y >= ax ** g
        d = rs * rs - (ax - cx) ** 2
        if d < 0:
            return y >= cy
        return y >= cy - mpmath.sqrt(d)

    def support_point(self, theta):
        th = _theta(theta) % TWO_PI
        psi = th - 1.5 * math.pi          # offset from the flat normal
        if abs(psi) <= self.phi0:
            t = math.tan(psi)
            x = math.copysign((abs(t) / self.gamma) ** (1.0 / (self.gamma - 1.0)), t)
            return np.array([x, abs(x) ** self.gamma])
        if th <= math.pi:
            return np.array([0.0, self.cy]) + self.r_top * unit(th)
        if th > 1.5 * math.pi:
            return np.array([self.cx, self.cy]) + self.r_side * unit(th)
        return np.array([-self.cx, self.cy]) + self.r_side * unit(th)

    def curvature_at_normal(self, theta):
        th = _theta(theta) % TWO_PI
        psi = th - 1.5 * math.pi
        if abs(psi) <= self.phi0:
            x = abs(self.support_point(th)[0])
            g = self.gamma
            return g * (g - 1) * x ** (g - 2) / (1 + (g * x ** (g - 1)) ** 2) ** 1.5
        if th <= math.pi:
            return 1.0 / self.r_top
        return 1.0 / self.r_side

    def line_interval(self, p0, d):
        p0 = np.asarray(p0, dtype=float)
        d = np.broadcast_to(np.asarray(d, dtype=float), p0.shape)
        shape = p0.shape[:-1]
        px, py = p0[..., 0], p0[..., 1]
        dx, dy = d[..., 0], d[..., 1]
        # cap disc
        qx, qy = px, py - self.cy
        b = qx * dx + qy * dy
        c = qx * qx + qy * qy - self.r_top ** 2
        disc = b * b - c
        hit = disc >= 0
        with np.errstate(invalid="ignore"):
            r = np.sqrt(np.where(hit, disc, 0.0))
        a_lo = -b - r
        a_hi = -b + r
        if np.all(dy == 0) and np.all(np.abs(dx) == 1):
            return self._horizontal(px, py, dx, a_lo, a_hi, hit)

        def phi(lam):
            x = np.clip(px + lam * dx, -self.r_top, self.r_top)
            return self.lower(x) - (py + lam * dy)

        vertical = dx == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            beta = np.where(vertical, 0.0, dy / np.where(vertical, 1.0, dx))
            xs = self._x_at_slope(beta)
            lam_star = np.where(vertical, a_lo, (xs - px) / np.where(vertical, 1.0, dx))
        lam_star = np.clip(lam_star, a_lo, a_hi)
        # a vertical line: phi is linear in lam and smallest at the upper end when dy > 0
        lam_star = np.where(vertical & (dy > 0), a_hi, lam_star)
        pmin = phi(lam_star)
        nonempty = hit & (pmin <= 0)
        lo = self._root(phi, a_lo, lam_star, nonempty, decreasing=True)
        hi = self._root(phi, lam_star, a_hi, nonempty, decreasing=False)
        lo = np.where(nonempty, lo, np.nan).reshape(shape)
        hi = np.where(nonempty, hi, np.nan).reshape(shape)
        return lo, hi

    @staticmethod
    def _root(phi, a, b, mask, decreasing):
        """Boundary of {phi <= 0} inside [a, b]; phi convex, phi(min end) <= 0."""
        a = np.where(mask, a, 0.0)
        b = np.where(mask, b, 0.0)
        if decreasing:
            # phi(b) <= 0; find leftmost point with phi <= 0
            inside_end = phi(a) <= 0
            lo, hi = a.copy(), b.copy()
            for _ in range(_BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                neg = phi(mid) <= 0
                hi = np.where(neg, mid, hi)
                lo = np.where(neg, lo, mid)
            return np.where(inside_end, a, hi)
        inside_end = phi(b) <= 0
        lo, hi = a.copy(), b.copy()
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            neg = phi(mid) <= 0
            lo = np.where(neg, mid, lo)
            hi = np.where(neg, hi, mid)
        return np.where(inside_end, b, lo)

    def _horizontal(self, px, py, dx, a_lo, a_hi, hit):
        y = py
        below = y < 0
        with np.errstate(invalid="ignore"):
            xf = np.where(y <= self.y0, np.maximum(y, 0.0) ** (1.0 / self.gamma),
                          self.cx + np.sqrt(np.maximum(self.r_side ** 2 - (self.cy - y) ** 2, 0.0)))
        xf = np.where(y >= self.cy, np.inf, xf)
        half = np.sqrt(np.maximum(self.r_top ** 2 - (y - self.cy) ** 2, 0.0))
        w = np.minimum(xf, half)
        ok = hit & ~below
        # x = px + lam*dx with dx = +-1
        lo = np.where(dx > 0, -w - px, px - w)
        hi = np.where(dx > 0, w - px, px + w)
        return np.where(ok, lo, np.nan), np.where(ok, hi, np.nan)

    def inradius_at(self, center, n=20000):
        s = np.linspace(0.0, self.perimeter, n, endpoint=False)
        pts = np.array([self.boundary_param(v).point for v in s[:: max(1, n // 4000)]])
        return float(np.min(np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])))

    def incenter(self):
        """Point on the symmetry axis maximising the distance to the boundary."""
        pts = self._dense_boundary()

        def neg_r(y):
            return -np.min(np.hypot(pts[:, 0], pts[:, 1] - y))

        res = optimize.minimize_scalar(neg_r, bounds=(0.0, self.cy + self.r_top), method="bounded",
                                       options={"xatol": 1e-10})
        return np.array([0.0, float(res.x)]), float(-res.fun)

    def _dense_boundary(self, per_piece=4000):
        out = []
        for pc in self._pieces:
            if isinstance(pc, _Arc):
                a = np.linspace(pc.a0, pc.a1, per_piece)
                out.append(np.column_stack([pc.center[0] + pc.radius * np.cos(a),
                                            pc.center[1] + pc.radius * np.sin(a)]))
            else:
                x = np.linspace(pc.xa, pc.xb, per_piece)
                out.append(np.column_stack([x, np.abs(x) ** pc.gamma]))
        return np.concatenate(out)


def build_cgamma(gamma, x0=0.2, r_side=0.14):
    return CGammaBody(gamma, x0=x0, r_side=r_side)


def support(body, theta):
    return body.support(theta)


def chord_length(body, delta, theta):
    """Length of the chord perpendicular to theta at depth delta below the support line."""
    th = _theta(theta)
    w = body.width(th)
    if not 0 < delta < w:
        raise EmptyChord(f"delta={delta} outside (0, {w})")
    n = unit(th)
    p0 = (body.support(th) - delta) * n
    d = np.array([-n[1], n[0]])
    lo, hi = body.line_interval(p0[None, :], d)
    if np.isnan(lo[0]):
        raise EmptyChord("line misses the body")
    return float(hi[0] - lo[0])


def boundary_param(body, s):
    return body.boundary_param(s)


def stationary_points(body, theta):
    return body.stationary_points(theta)


def body_from_spec(spec):
    """Build a body from its JSON description."""
    from .errors import ConfigError
    if isinstance(spec, str):
        import json
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"body spec is not valid JSON: {exc}") from None
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("body spec needs a 'kind' key")
    allowed = {"disc": {"kind"}, "cgamma": {"kind", "gamma", "x0", "r_side"},
               "polygon": {"kind", "vertices"}, "square": {"kind", "slope", "side", "angle"}}
    kind = spec["kind"]
    if kind not in allowed:
        raise ConfigError(f"unknown body kind {kind!r} (key 'kind')")
    extra = set(spec) - allowed[kind]
    if extra:
        raise ConfigError(f"unknown key(s) in body spec: {', '.join(sorted(extra))}")
    try:
        if kind == "disc":
            return Disc()
        if kind == "cgamma":
            if "gamma" not in spec:
                raise ConfigError("cgamma body needs key 'gamma'")
            return CGammaBody(float(spec["gamma"]), x0=float(spec.get("x0", 0.2)),
                              r_side=float(spec.get("r_side", 0.14)))
        if kind == "polygon":
            if "vertices" not in spec:
                raise ConfigError("polygon body needs key 'vertices'")
            return ConvexPolygon(spec["vertices"])
        side = float(spec.get("side", 1.0))
        if "slope" in spec:
            return ConvexPolygon.davenport_square(spec["slope"], side)
        return ConvexPolygon.square(side, float(spec.get("angle", 0.0)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad body parameter: {exc}") from None
