"""Pointwise and spherical-average decay of chi_hat for bodies with a flat point."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DegenerateFit, InvalidParameter, ResolutionError
from .fourier import (BULK_QUAD, DEFAULT_QUAD, QuadratureConfig, ft_boundary_batch, ft_disc,
                      ft_polygon)
from .geometry import ConvexPolygon, Disc, _theta, unit


class RegimeLabel(enum.Enum):
    FLAT = "flat"
    TRANSITION = "transition"
    GENERIC = "generic"


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    stderr: float
    r_squared: float
    n: int
    rho_min: float
    rho_max: float
    points: tuple = field(default=(), repr=False)

    def as_dict(self):
        return {"slope": self.slope, "intercept": self.intercept, "stderr": self.stderr,
                "r_squared": self.r_squared, "n": self.n,
                "rho_min": self.rho_min, "rho_max": self.rho_max}


def fit_exponent(samples) -> ExponentFit:
    """Least-squares slope of log(value) against log(rho)."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 4:
        raise DegenerateFit("need at least 4 (rho, value) samples")
    rho, val = arr[:, 0], arr[:, 1]
    if np.any(rho <= 0) or np.any(val <= 0):
        raise InvalidParameter("fit needs positive rho and values")
    lx, ly = np.log(rho), np.log(val)
    if np.ptp(lx) == 0:
        raise DegenerateFit("all samples share one rho")
    res = stats.linregress(lx, ly)
    return ExponentFit(float(res.slope), float(res.intercept), float(res.stderr),
                       float(res.rvalue ** 2), len(arr), float(rho.min()), float(rho.max()),
                       tuple(map(tuple, arr.tolist())))


def psi_from_flat(body, theta):
    """Angle between Theta and the line of the flat-point normal, in [0, pi/2]."""
    d = abs(_theta(theta) - _theta(body.flat_normal)) % math.pi
    return min(d, math.pi - d)


def regime_classify(gamma, rho, psi, c1=1.0, eps=0.1) -> RegimeLabel:
    """Regime of the direction psi (distance from the flat normal) at radius rho.

    psi and pi - psi describe the same line through the origin and since
    |chi_hat(-xi)| = |chi_hat(xi)| they get the same label.
    """
    if rho < 2:
        raise InvalidParameter(f"regimes are defined for rho >= 2, got {rho}")
    if not 0 <= psi <= math.pi:
        raise InvalidParameter(f"psi must lie in [0, pi], got {psi}")
    if c1 <= 0 or eps <= 0:
        raise InvalidParameter("thresholds must be positive")
    p = min(psi, math.pi - psi)
    if p <= c1 * rho ** (-1.0 + 1.0 / gamma):
        return RegimeLabel.FLAT
    if p < eps:
        return RegimeLabel.TRANSITION
    return RegimeLabel.GENERIC


def regime_bound(gamma, rho, psi, label):
    p = min(psi, math.pi - psi)
    if label is RegimeLabel.FLAT:
        return rho ** (-1.0 - 1.0 / gamma)
    if label is RegimeLabel.TRANSITION:
        return rho ** -1.5 * p ** ((2.0 - gamma) / (2.0 * gamma - 2.0))
    return rho ** -1.5


def transform_at(body, xi, q: QuadratureConfig = BULK_QUAD, threads=None):
    """chi_hat at an array of frequencies with the best method for the body."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if isinstance(body, Disc):
        return ft_disc(xi)
    if isinstance(body, ConvexPolygon):
        return ft_polygon(body, xi)
    return ft_boundary_batch(body, xi, q, threads)


def _check_dyadic(rho_grid):
    r = np.asarray(rho_grid, dtype=float)
    a = np.log2(r)
    if len(r) < 2 or np.any(np.abs(a - np.rint(a)) > 1e-9) or np.any(np.diff(a) <= 0):
        raise InvalidParameter("rho grid must be increasing powers of 2")
    if a[-1] - a[0] < 5:
        raise InvalidParameter("dyadic grid must span at least 5 octaves")
    return r


def dyadic_grid(a, b):
    return 2.0 ** np.arange(int(a), int(b) + 1)


def jitter_envelope(body, theta, rho_grid, window=5, seed=0, q=BULK_QUAD, threads=None):
    """max |chi_hat| over stratified jitters spanning one interference period above each rho."""
    th = _theta(theta)
    period = 1.0 / body.width(th)
    rng = np.random.default_rng(seed)
    rho_grid = np.asarray(rho_grid, dtype=float)
    off = (np.arange(window)[None, :] + rng.uniform(size=(len(rho_grid), window))) * (period / window)
    rr = rho_grid[:, None] + off
    vals = np.abs(transform_at(body, rr.reshape(-1, 1) * unit(th)[None, :], q, threads))
    return vals.reshape(rr.shape).max(axis=1)


def directional_decay_scan(body, theta, rho_grid, window=5, seed=0, q=BULK_QUAD,
                           threads=None) -> ExponentFit:
    """Fit of the jittered upper envelope of |chi_hat(rho Theta)| on a dyadic grid."""
    r = _check_dyadic(rho_grid)
    env = jitter_envelope(body, theta, r, window, seed, q, threads)
    if np.all(env < 1e-15):
        raise DegenerateFit("all samples vanish")
    return fit_exponent(np.column_stack([r, np.maximum(env, 1e-300)]))


# ---------------------------------------------------------------------------
# spherical averages
# ---------------------------------------------------------------------------

def _diameter(body):
    return 2.0 * body.radius


def theta_mesh(body, rho, density=4.0, n_theta=None):
    """Periodic theta nodes: uniform resolution of the oscillation plus a refined flat window."""
    need = max(720, int(math.ceil(density * rho * _diameter(body) * 2.0 * math.pi)))
    if n_theta is not None:
        if n_theta < need:
            raise ResolutionError(f"{n_theta} directions cannot resolve rho={rho:g}; need {need}")
        need = int(n_theta)
    nodes = [np.linspace(0.0, 2.0 * math.pi, need, endpoint=False)]
    gamma = getattr(body, "gamma", None)
    if gamma is not None:
        win = rho ** (-1.0 + 1.0 / gamma)
        h = win / density
        for centre in (body.flat_normal, body.flat_normal + math.pi):
            k = int(math.ceil(4.0 * win / h))
            nodes.append(centre + h * np.arange(-k, k + 1))
    th = np.unique(np.mod(np.concatenate(nodes), 2.0 * math.pi))
    return th


def _periodic_trapezoid_weights(th):
    nxt = np.roll(th, -1)
    nxt[-1] += 2.0 * math.pi
    gaps = nxt - th
    return 0.5 * (gaps + np.roll(gaps, 1))


def spherical_samples(body, rho, density=4.0, n_theta=None, q=BULK_QUAD, threads=None):
    """(theta nodes, trapezoid weights, |chi_hat(rho Theta)|); reusable for every p."""
    if rho < 2:
        raise InvalidParameter("spherical averages need rho >= 2")
    th = theta_mesh(body, rho, density, n_theta)
    xi = rho * np.column_stack([np.cos(th), np.sin(th)])
    return th, _periodic_trapezoid_weights(th), np.abs(transform_at(body, xi, q, threads))


def spherical_norm(weights, absvals, p):
    if p == math.inf:
        return float(np.max(absvals))
    if p < 1:
        raise InvalidParameter("p must be >= 1")
    m = float(np.max(absvals))
    if m == 0:
        return 0.0
    return m * float(np.sum(weights * (absvals / m) ** p)) ** (1.0 / p)


def spherical_average(body, rho, p, density=4.0, n_theta=None, q=BULK_QUAD, threads=None):
    """(int_0^{2 pi} |chi_hat(rho Theta)|^p dtheta)^{1/p}."""
    _, w, a = spherical_samples(body, rho, density, n_theta, q, threads)
    return spherical_norm(w, a, p)


def spherical_decay(body, ps, rho_grid, density=4.0, window=5, seed=0, q=BULK_QUAD,
                    threads=None):
    """Fits of the spherical L^p averages over rho, one per p.

    Each dyadic rho is replaced by the max over ``window`` stratified jitters
    spanning one interference period, as in the directional scans; the theta
    samples at each jittered radius are shared by every p.
    """
    r = np.asarray(rho_grid, dtype=float)
    th0 = getattr(body, "flat_normal", 0.0)
    period = 1.0 / body.width(th0)
    rng = np.random.default_rng(seed)
    env = {p: [] for p in ps}
    for rho in r:
        best = {p: 0.0 for p in ps}
        for k in range(window):
            rr = rho + (k + rng.uniform()) * period / window
            _, w, a = spherical_samples(body, rr, density, None, q, threads)
            for p in ps:
                best[p] = max(best[p], spherical_norm(w, a, p))
        for p in ps:
            env[p].append(best[p])
    return {p: fit_exponent(np.column_stack([r, env[p]])) for p in ps}


def critical_index(gamma):
    """p0 = (2 gamma - 2)/(gamma - 2), where the averaged decay changes regime."""
    return (2.0 * gamma - 2.0) / (gamma - 2.0)


def predicted_spherical_slope(gamma, p):
    p0 = critical_index(gamma)
    if p <= p0:
        return -1.5
    return -1.0 - 1.0 / p - 1.0 / gamma + 1.0 / (gamma * p)


# ---------------------------------------------------------------------------
# pointwise bound report
# ---------------------------------------------------------------------------

def verify_pointwise_bounds(body, rhos, psis, c1=1.0, eps=0.1, q=DEFAULT_QUAD, threads=None):
    """Per regime, sup of |chi_hat| / (regime bound with unit constant) over the grid."""
    gamma = body.gamma
    rhos = np.asarray(rhos, dtype=float)
    psis = np.asarray(psis, dtype=float)
    R, P = np.meshgrid(rhos, psis, indexing="ij")
    th = body.flat_normal + P.ravel()
    xi = R.ravel()[:, None] * np.column_stack([np.cos(th), np.sin(th)])
    vals = np.abs(transform_at(body, xi, q, threads))
    report = {lab.value: {"sup_ratio": 0.0, "count": 0, "argmax": None} for lab in RegimeLabel}
    for rho, psi, v in zip(R.ravel(), P.ravel(), vals):
        lab = regime_classify(gamma, rho, abs(psi), c1, eps)
        ratio = v / regime_bound(gamma, rho, abs(psi), lab)
        ent = report[lab.value]
        ent["count"] += 1
        if ratio > ent["sup_ratio"]:
            ent["sup_ratio"] = float(ratio)
            ent["argmax"] = (float(rho), float(psi))
    return report
