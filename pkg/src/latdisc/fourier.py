"""Fourier transforms of indicator functions of planar convex bodies.

Four independent routes are provided: the Bessel formula for the disc, the
closed form for polygons, boundary-integral quadrature for any body, and
the 1D transform of the parallel-section function.  The stationary phase
approximation and the chord bound sit on top.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, FlatDirection, InvalidParameter, UnsupportedBody
from .geometry import (ConvexBody, ConvexPolygon, Direction, Disc, _Arc, _FlatArc,
                       _Segment, _theta, chord_length, composite_gauss, gauss_rule, unit)

TWO_PI = 2.0 * math.pi
_BLOCK = 1 << 22          # complex entries per phase matrix block


@dataclass(frozen=True)
class QuadratureConfig:
    nodes_per_wavelength: int = 20
    panel_order: int = 10
    max_nodes: int = 4_000_000

    def __post_init__(self):
        if self.nodes_per_wavelength < 8:
            raise InvalidParameter("nodes_per_wavelength must be >= 8")
        if self.panel_order < 2 or self.max_nodes < 1:
            raise InvalidParameter("panel_order and max_nodes must be positive")


DEFAULT_QUAD = QuadratureConfig()
# cheaper rule for bulk spectral sums, where 1e-6 relative accuracy is plenty
BULK_QUAD = QuadratureConfig(nodes_per_wavelength=8, panel_order=12)


@dataclass(frozen=True)
class SpectralSample:
    rho: float
    theta: float
    value: complex
    m: tuple | None = None


# ---------------------------------------------------------------------------
# Bessel J1
# ---------------------------------------------------------------------------

_SERIES_TERMS = 60
_HANKEL_TERMS = 30


def _j1_series(x):
    # extended precision keeps the cancellation near |x| = 16 harmless
    h = np.asarray(x, dtype=np.longdouble) * 0.5
    h2 = h * h
    term = h.copy()
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = -term * h2 / (k * (k + 1))
        total += term
    return total.astype(float)


def _j1_hankel(x):
    x = np.asarray(x, dtype=float)
    mu = 4.0
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = np.ones_like(x)
    for k in range(1, _HANKEL_TERMS):
        a = a * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * a
        else:
            p += sign * a
    chi = x - 0.75 * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j1(x):
    """J1 to ~1e-10 relative accuracy: power series up to |x| = 16, Hankel expansion beyond."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    small = ax <= 16.0
    out = np.empty_like(ax)
    if np.any(small):
        out[small] = _j1_series(ax[small])
    if np.any(~small):
        out[~small] = _j1_hankel(ax[~small])
    out = np.sign(x) * out
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _as_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != 2:
        raise InvalidParameter("frequency vectors need a trailing axis of length 2")
    return xi


def ft_disc_radial(rho):
    rho = np.asarray(rho, dtype=float)
    safe = np.where(rho == 0, 1.0, rho)
    val = np.where(rho == 0, math.pi, bessel_j1(TWO_PI * safe) / safe)
    return val


def ft_disc(xi):
    """|xi|^{-1} J1(2 pi |xi|), with the area pi at xi = 0."""
    xi = _as_xi(xi)
    val = ft_disc_radial(np.hypot(xi[..., 0], xi[..., 1])).astype(complex)
    return complex(val) if val.ndim == 0 else val


def _polygon_moments(poly, xi, kmax):
    """Taylor series of the transform at small xi: sum_k (-2 pi i)^k/k! int (xi.x)^k dx."""
    # int g = (1/(k+2)) * closed integral of g (x.nu) ds for g homogeneous of degree k
    v = poly.vertices
    e = np.roll(v, -1, axis=0) - v
    xdotn = v[:, 0] * e[:, 1] - v[:, 1] * e[:, 0]      # x.nu ds is constant per edge
    u, w = gauss_rule(kmax // 2 + 2)
    t = 0.5 * (u + 1.0)
    w = 0.5 * w
    pts = v[:, None, :] + t[None, :, None] * e[:, None, :]        # (edges, nodes, 2)
    proj = np.einsum("...i,eni->...en", xi, pts)
    total = np.zeros(xi.shape[:-1], dtype=complex)
    for k in range(kmax + 1):
        mom = np.einsum("...en,n,e->...", proj ** k, w, xdotn) / (k + 2)
        total = total + (-2j * math.pi) ** k / math.factorial(k) * mom
    return total


def ft_polygon(poly: ConvexPolygon, xi):
    """Exact transform of a polygon's indicator, edge by edge."""
    xi = _as_xi(xi)
    v = poly.vertices
    e = np.roll(v, -1, axis=0) - v
    nu = np.column_stack([e[:, 1], -e[:, 0]])          # outward normal times edge length
    r2 = xi[..., 0] ** 2 + xi[..., 1] ** 2
    small = np.sqrt(r2) * poly.radius < 1e-3
    pa = np.einsum("...i,ei->...e", xi, v)
    pe = np.einsum("...i,ei->...e", xi, e)
    pn = np.einsum("...i,ei->...e", xi, nu)
    z = -TWO_PI * pe
    degenerate = np.abs(z) < 1e-12
    zs = np.where(degenerate, 1.0, z)
    edge_int = np.where(degenerate, 1.0 + 0.5j * z, (np.exp(1j * zs) - 1.0) / (1j * zs))
    s = np.sum(np.exp(-2j * math.pi * pa) * edge_int * pn, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = s / (-2j * math.pi * r2)
    if np.any(small):
        out = np.where(small, _polygon_moments(poly, xi, 8), out)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# boundary integral quadrature
# ---------------------------------------------------------------------------

def _phase_sum(pts, wn, xi):
    """sum_j (e^{-2 pi i xi.P_j} - 1)(xi.W_j) for a block of frequencies."""
    out = np.empty(len(xi), dtype=complex)
    step = max(1, _BLOCK // max(1, len(pts)))
    for a in range(0, len(xi), step):
        blk = xi[a:a + step]
        z = TWO_PI * (blk @ pts.T)
        # e^{-iz} - 1 written without cancellation for small z
        em1 = -2.0 * np.sin(0.5 * z) ** 2 - 1j * np.sin(z)
        out[a:a + step] = np.einsum("kj,kj->k", em1, blk @ wn.T)
    return out


def _nodes(body, rho, q):
    need = body.node_count(rho, q.nodes_per_wavelength, q.panel_order)
    if need > q.max_nodes:
        raise BudgetError(f"{need} boundary nodes needed at rho={rho:g}, cap is {q.max_nodes}",
                          required=need)
    return body.quadrature_nodes(rho, q.nodes_per_wavelength, q.panel_order)


def ft_boundary_integral(body: ConvexBody, rho, theta, q: QuadratureConfig = DEFAULT_QUAD):
    """Divergence-theorem transform at xi = rho * Theta, by composite Gauss panels."""
    rho = float(rho)
    if not rho > 0:
        raise InvalidParameter(f"rho must be positive, got {rho}")
    pts, wn = _nodes(body, rho, q)
    xi = rho * unit(_theta(theta))[None, :]
    return complex(_phase_sum(pts, wn, xi)[0] / (-2j * math.pi * rho * rho))


def ft_boundary_batch(body: ConvexBody, xi, q: QuadratureConfig = BULK_QUAD, threads=None):
    """Boundary-integral transform at many frequencies.

    Frequencies are bucketed by modulus (ratio 1.25) so each bucket uses the
    node set of its largest member.  xi = 0 returns the area.
    """
    from .parallel import ordered_map
    xi = np.atleast_2d(_as_xi(xi))
    r = np.hypot(xi[:, 0], xi[:, 1])
    out = np.empty(len(xi), dtype=complex)
    zero = r == 0
    out[zero] = body.area
    idx = np.nonzero(~zero)[0]
    if not len(idx):
        return out
    order = idx[np.argsort(r[idx], kind="stable")]
    rs = r[order]
    buckets = []
    a = 0
    while a < len(order):
        top = max(rs[a], 1.0) * 1.25
        b = int(np.searchsorted(rs, top, side="right"))
        b = max(b, a + 1)
        buckets.append((a, b))
        a = b
    _nodes(body, float(rs[-1]), q)   # budget check on the worst bucket up front

    def work(span):
        a, b = span
        sel = order[a:b]
        pts, wn = body.quadrature_nodes(float(rs[b - 1]), q.nodes_per_wavelength, q.panel_order)
        return _phase_sum(pts, wn, xi[sel]) / (-2j * math.pi * r[sel] ** 2)

    for (a, b), vals in zip(buckets, ordered_map(work, buckets, threads)):
        out[order[a:b]] = vals
    return out


def fourier_transform(body: ConvexBody, xi, threads=None):
    """Fastest available method per body kind, vectorised over xi."""
    xi = np.atleast_2d(_as_xi(xi))
    if isinstance(body, Disc):
        return ft_disc(xi)
    if isinstance(body, ConvexPolygon):
        return ft_polygon(body, xi)
    return ft_boundary_batch(body, xi, threads=threads)


# ---------------------------------------------------------------------------
# chord (parallel section) transform
# ---------------------------------------------------------------------------

def _piece_ends(body):
    pts = []
    for pc in body.pieces():
        if isinstance(pc, _Arc):
            pts.append(np.asarray(pc.center) + pc.radius * unit(pc.a0))
        elif isinstance(pc, _FlatArc):
            pts.append(np.array([pc.xa, abs(pc.xa) ** pc.gamma]))
            pts.append(np.array([0.0, 0.0]))
        elif isinstance(pc, _Segment):
            pts.append(np.asarray(pc.a, dtype=float))
    return np.array(pts)


def _graded(a, b, toward_b, n_levels=44):
    fr = 0.5 ** np.arange(n_levels)
    return b - (b - a) * fr if toward_b else a + (b - a) * fr


def section_function(body: ConvexBody, theta, x):
    """Length of the body's section by the line {y : y.Theta = x}."""
    n = unit(_theta(theta))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lo, hi = body.line_interval(x[:, None] * n[None, :], np.array([-n[1], n[0]]))
    return np.where(np.isnan(lo), 0.0, hi - lo)


def ft_chord_transform(body: ConvexBody, rho, theta, q: QuadratureConfig = DEFAULT_QUAD):
    """1D transform of the parallel-section function: an independent route to chi_hat(rho Theta)."""
    rho = float(rho)
    if rho < 0:
        raise InvalidParameter("rho must be nonnegative")
    th = _theta(theta)
    n = unit(th)
    a = -body.support(th + math.pi)
    b = body.support(th)
    proj = _piece_ends(body) @ n
    inner = np.sort(proj[(proj > a + 1e-12) & (proj < b - 1e-12)])
    breaks = np.concatenate([[a], inner, [b]])
    # uniform panels resolve the oscillation, graded panels the endpoint behaviour
    fine = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        k = max(2, int(math.ceil(q.nodes_per_wavelength * max(rho, 1.0) * (hi - lo) / q.panel_order)))
        fine.append(np.linspace(lo, hi, k + 1))
    end_a = _graded(a, breaks[1], toward_b=False)
    end_b = _graded(breaks[-2], b, toward_b=True)
    grid = np.unique(np.concatenate(fine + [end_a, end_b]))
    u, w = composite_gauss(grid, q.panel_order)
    h = section_function(body, th, u)
    if rho == 0:
        return complex(np.sum(w * h))
    return complex(np.sum(w * h * np.exp(-2j * math.pi * rho * u)))


# ---------------------------------------------------------------------------
# chord bound and stationary phase
# ---------------------------------------------------------------------------

def podkorytov_bound(body: ConvexBody, rho, theta, c1=2.0):
    """rho^{-1} (|chord(1/rho, theta)| + |chord(1/rho, theta + pi)|), constant omitted."""
    rho = float(rho)
    if not rho > c1:
        raise InvalidParameter(f"rho must exceed c1={c1}, got {rho}")
    th = _theta(theta)
    return (chord_length(body, 1.0 / rho, th) + chord_length(body, 1.0 / rho, th + math.pi)) / rho


def stationary_phase_approx(body: ConvexBody, rho, theta):
    """Two-point stationary phase term, O(rho^{-2}) accurate where both curvatures are positive."""
    if isinstance(body, ConvexPolygon):
        raise UnsupportedBody("stationary phase needs a smooth boundary")
    th = _theta(theta)
    s1, s2, k1, k2 = body.stationary_points(th)
    if not (k1 > 0 and k2 > 0):
        raise FlatDirection(f"zero curvature at a stationary point for theta={th:.6g}")
    rho = float(rho)
    n = unit(th)
    t1 = np.exp(-2j * math.pi * rho * (n @ s1) + 0.25j * math.pi) / math.sqrt(k1)
    t2 = np.exp(-2j * math.pi * rho * (n @ s2) - 0.25j * math.pi) / math.sqrt(k2)
    return complex(-(t1 - t2) * rho ** -1.5 / (2j * math.pi))


# ---------------------------------------------------------------------------
# model oscillatory integral near a flat point
# ---------------------------------------------------------------------------

def bump_c1(u):
    """C^1 cutoff supported on 1/2 <= |u| <= 1."""
    au = np.abs(u)
    return np.where((au >= 0.5) & (au <= 1.0), np.sin(math.pi * (2.0 * au - 1.0)) ** 2, 0.0)


def model_integral(a, b, gamma, order=16):
    """int e^{-2 pi i (a u + b |u|^gamma)} eps(u) du with eps = bump_c1."""
    rate = abs(a) + gamma * abs(b)
    n_panels = max(4, int(math.ceil(16 * (rate + 1.0) * 0.5 / order)))
    u, w = composite_gauss(np.linspace(0.5, 1.0, n_panels + 1), order)
    total = 0j
    for sgn in (1.0, -1.0):
        uu = sgn * u
        phase = a * uu + b * np.abs(uu) ** gamma
        total += np.sum(w * bump_c1(uu) * np.exp(-2j * math.pi * phase))
    return complex(total)


def spectral_sample(body, rho, theta, method="auto", q: QuadratureConfig = DEFAULT_QUAD):
    """Evaluate the transform at rho*Theta with a named method."""
    th = _theta(theta)
    xi = rho * unit(th)
    if method == "auto":
        method = {"disc": "analytic", "polygon": "polygon"}.get(body.kind, "boundary")
    if method == "analytic":
        if not isinstance(body, Disc):
            raise UnsupportedBody("analytic transform is only available for the disc")
        val = ft_disc(xi)
    elif method == "polygon":
        if not isinstance(body, ConvexPolygon):
            raise UnsupportedBody("closed-form polygon transform needs a polygon")
        val = ft_polygon(body, xi)
    elif method == "boundary":
        val = body.area if rho == 0 else ft_boundary_integral(body, rho, th, q)
    elif method == "chord":
        val = ft_chord_transform(body, rho, th, q)
    elif method == "phase":
        val = stationary_phase_approx(body, rho, th)
    else:
        raise InvalidParameter(f"unknown method {method!r}")
    return SpectralSample(float(rho), th, complex(val))


__all__ = [
    "QuadratureConfig", "SpectralSample", "DEFAULT_QUAD", "BULK_QUAD", "Direction",
    "bessel_j1", "ft_disc", "ft_disc_radial", "ft_polygon", "ft_boundary_integral",
    "ft_boundary_batch", "fourier_transform", "section_function", "ft_chord_transform",
    "podkorytov_bound", "stationary_phase_approx", "bump_c1", "model_integral", "spectral_sample",
]
