"""L^p norms of the discrepancy over translations and rotations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .decay import ExponentFit, fit_exponent, transform_at
from .errors import ConfigError, InvalidParameter
from .fourier import BULK_QUAD, composite_gauss
from .geometry import CGammaBody, Disc
from .lattice import count_batch, discrepancy_values


@dataclass(frozen=True)
class NormEstimate:
    p: float
    R: float
    method: str
    value: float
    stderr: float = 0.0
    samples: int = 0
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        d = {"p": self.p, "R": self.R, "method": self.method, "value": self.value,
             "stderr": self.stderr, "samples": self.samples}
        d.update(self.extra)
        return d


def _lp_from_values(d, p):
    """Empirical L^p norm and its delta-method standard error."""
    a = np.abs(np.asarray(d, dtype=float))
    n = len(a)
    if p == math.inf:
        return float(a.max()), 0.0
    if p < 1:
        raise InvalidParameter("p must be >= 1")
    scale = float(a.max()) or 1.0
    x = (a / scale) ** p
    m = float(x.mean())
    if m == 0:
        return 0.0, 0.0
    se_m = float(x.std(ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    val = scale * m ** (1.0 / p)
    return val, val * se_m / (p * m)


def _translations(n, rng):
    return rng.uniform(-0.5, 0.5, size=(n, 2))


def lp_translation_norm(body, R, p, n_samples=10_000, seed=0, rotation=0.0, threads=None):
    """Monte Carlo (int_{T^2} |D(R sigma(C) + t)|^p dt)^{1/p}; p = inf gives the sample max."""
    if n_samples < 1000:
        raise InvalidParameter("use at least 1000 samples")
    rng = np.random.default_rng(seed)
    t = _translations(n_samples, rng)
    d = discrepancy_values(body, R, t, rotation, threads)
    val, se = _lp_from_values(d, p)
    return NormEstimate(float(p), float(R), "monte-carlo", val, se, n_samples)


# ---------------------------------------------------------------------------
# Parseval
# ---------------------------------------------------------------------------

def half_lattice(M):
    """Nonzero m with |m| <= M, one of each pair {m, -m}."""
    k = np.arange(-M, M + 1)
    X, Y = np.meshgrid(k, k, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    keep = (X * X + Y * Y <= M * M) & ((Y > 0) | ((Y == 0) & (X > 0)))
    return np.column_stack([X[keep], Y[keep]]).astype(float)


def l2_translation_parseval(body, R, M=64, threads=None):
    """sqrt(R^4 sum_{0<|m|<=M} |chi_hat(Rm)|^2), with tail estimates.

    ``tail_estimate``: the outer dyadic shell M/2 < |m| <= M repeated as a
    geometric series, which is exact when shell sums scale like 1/M.
    ``tail_bound``: the |xi|^{-3/2} envelope with the worst constant seen
    in the outer shell.
    """
    if M < 8:
        raise InvalidParameter("cutoff must be >= 8")
    R = float(R)
    m = half_lattice(int(M))
    r = np.hypot(m[:, 0], m[:, 1])
    vals = np.abs(transform_at(body, R * m, BULK_QUAD, threads)) ** 2
    terms = 2.0 * R ** 4 * vals
    total = float(np.sum(terms))
    shell = r > M / 2
    tail_est = float(np.sum(terms[shell]))
    kappa2 = float(np.max(vals[shell] * (R * r[shell]) ** 3))
    tail_bound = 2.0 * math.pi * kappa2 * R / M
    value = math.sqrt(total)
    corrected = math.sqrt(total + tail_est)
    flag = (math.sqrt(total + tail_bound) - value) > 0.01 * value
    return NormEstimate(2.0, R, "parseval", value, 0.0, len(m) * 2,
                        {"M": int(M), "tail_estimate": tail_est, "tail_bound": tail_bound,
                         "corrected": corrected, "tail_warning": bool(flag)})


# ---------------------------------------------------------------------------
# rotations
# ---------------------------------------------------------------------------

def lp_rotation_translation_norm(body, R, p, n_rot=64, n_trans=64, seed=0, threads=None):
    """Monte Carlo over SO(2) x T^2; angles are stratified, translations uniform."""
    rng = np.random.default_rng(seed)
    ang = 2.0 * math.pi * (np.arange(n_rot) + rng.uniform(size=n_rot)) / n_rot
    rots = np.repeat(ang, n_trans)
    t = _translations(n_rot * n_trans, rng)
    d = count_batch(body, R, t, rots, threads) - float(R) ** 2 * body.area
    val, se = _lp_from_values(d, p)
    return NormEstimate(float(p), float(R), "monte-carlo-rotation", val, se, n_rot * n_trans,
                        {"certified_regime": bool(p < 4)})


def rotation_mean_abs(body, R, n_rot=256, seed=0, threads=None):
    """Mean over stratified rotations of |D(R sigma(C))| with t = 0."""
    rng = np.random.default_rng(seed)
    ang = 2.0 * math.pi * (np.arange(n_rot) + rng.uniform(size=n_rot)) / n_rot
    d = count_batch(body, R, np.zeros((n_rot, 2)), ang, threads) - float(R) ** 2 * body.area
    return float(np.mean(np.abs(d)))


# ---------------------------------------------------------------------------
# growth fits
# ---------------------------------------------------------------------------

def growth_fit_translation(body, p, R_grid, n_samples=10_000, seed=0, rotation=0.0,
                           threads=None) -> ExponentFit:
    """Slope of log ||D_R||_p against log R (p = inf: max over the samples)."""
    vals = [lp_translation_norm(body, R, p, n_samples, seed, rotation, threads).value
            for R in R_grid]
    return fit_exponent(np.column_stack([np.asarray(R_grid, dtype=float), vals]))


def growth_fit_rotation(body, p, R_grid, n_rot=64, n_trans=64, seed=0, threads=None):
    vals = [lp_rotation_translation_norm(body, R, p, n_rot, n_trans, seed, threads).value
            for R in R_grid]
    return fit_exponent(np.column_stack([np.asarray(R_grid, dtype=float), vals]))


_SLOPES = {"sqrt2": math.sqrt(2.0), "sqrt3": math.sqrt(3.0),
           "golden": (1.0 + math.sqrt(5.0)) / 2.0}


def flat_normal_rotation(slope):
    """Rotation taking the flat normal -e2 to a direction of the given slope."""
    s = _SLOPES.get(slope, slope) if isinstance(slope, str) else float(slope)
    if isinstance(s, str):
        raise InvalidParameter(f"unknown slope tag {slope!r}")
    # normal angle -pi/2 + phi has slope -cot(phi)
    return -math.atan(1.0 / s) if s != 0 else 0.0


def diophantine_rotation_l2(gamma, slope="sqrt2", R_grid=(16, 32, 64, 128, 256), n_samples=10_000,
                            seed=0, threads=None) -> ExponentFit:
    """L^2 translation growth of C_gamma rotated so its flat normal has an irrational slope."""
    body = CGammaBody(gamma)
    phi = flat_normal_rotation(slope)
    return growth_fit_translation(body, 2, R_grid, n_samples, seed, phi, threads)


# ---------------------------------------------------------------------------
# Hlawka mollifier
# ---------------------------------------------------------------------------

def _bump(r):
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(r < 1.0, np.exp(-1.0 / np.maximum(1.0 - r * r, 1e-300)), 0.0)


@dataclass(frozen=True)
class MollifierConfig:
    """Radial bump c*exp(-1/(1-|x/delta0|^2)), dilated by epsilon.

    ``k`` and ``table`` hold the transform of the unit-support profile,
    phi1_hat(k) with phi1_hat(0) = 1.
    """

    epsilon: float
    delta0: float = 1.0
    k_max: float = 80.0
    k: np.ndarray = field(default=None, repr=False, compare=False)
    table: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not (self.epsilon > 0 and self.delta0 > 0):
            raise InvalidParameter("epsilon and delta0 must be positive")
        if self.table is None:
            k, tab = _bump_table(self.k_max)
            object.__setattr__(self, "k", k)
            object.__setattr__(self, "table", tab)
        object.__setattr__(self, "_spline", CubicSpline(self.k, self.table))
        env = np.maximum.accumulate(np.abs(self.table)[::-1])[::-1]
        object.__setattr__(self, "_envelope", env)

    def phi_hat(self, xi_norm):
        """Transform of the eps-dilated mollifier at frequency modulus |xi|."""
        kk = self.epsilon * self.delta0 * np.asarray(xi_norm, dtype=float)
        if np.any(kk > self.k[-1]):
            raise ConfigError(f"mollifier table stops at k={self.k[-1]:g}; need {float(np.max(kk)):g}")
        return self._spline(kk)

    def envelope(self, k):
        """max_{k' >= k} |phi1_hat(k')| from the table."""
        idx = np.searchsorted(self.k, k)
        return float(self._envelope[min(idx, len(self.k) - 1)])

    def cutoff(self, tol):
        """Smallest M with |phi_hat(eps m)| < tol for all |m| > M."""
        above = np.nonzero(self._envelope >= tol)[0]
        if not len(above):
            return 0
        k_star = self.k[above[-1] + 1] if above[-1] + 1 < len(self.k) else None
        if k_star is None:
            raise ConfigError(f"mollifier table cannot reach tolerance {tol:g}")
        return int(math.ceil(k_star / (self.epsilon * self.delta0)))


def _bump_table(k_max, step=0.01, n_nodes=4000):
    """phi1_hat(k) = 2 pi int_0^1 phi(r) J0(2 pi k r) r dr, normalised to 1 at k = 0."""
    u, w = composite_gauss(np.linspace(0.0, 1.0, n_nodes // 20 + 1), 20)
    prof = _bump(u) * u * w
    k = np.arange(0.0, k_max + step, step)
    vals = np.empty_like(k)
    for a in range(0, len(k), 256):
        kk = k[a:a + 256]
        vals[a:a + 256] = special.j0(2.0 * math.pi * kk[:, None] * u[None, :]) @ prof
    return k, vals / vals[0]


def mollified_discrepancy(body, R, moll: MollifierConfig, t, M, center=(0.0, 0.0), threads=None):
    """D_{eps,R}(t) = R^2 sum_{0<|m|<=M} phi_hat(eps m) chi_hat_{C-c}(Rm) e^{-2 pi i m.t}.

    ``center`` recentres the body so that the mollifier support sits inside it.
    Returns values at each t (array of shape (k, 2)).
    """
    coef, m = _mollified_coefficients(body, R, moll, M, center, threads)
    return _evaluate_series(coef, m, t)


def hlawka_mollified_discrepancy(body, R, moll: MollifierConfig, t, M, center=(0.0, 0.0)) -> float:
    """D_{eps,R} at a single translation t."""
    return float(mollified_discrepancy(body, R, moll, np.asarray(t, dtype=float)[None, :], M, center)[0])


def _mollified_coefficients(body, R, moll, M, center, threads):
    R = float(R)
    m = half_lattice(int(M))
    r = np.hypot(m[:, 0], m[:, 1])
    xi = R * m
    chi = transform_at(body, xi, BULK_QUAD, threads) * np.exp(2j * math.pi * (xi @ np.asarray(center)))
    return R * R * moll.phi_hat(r) * chi, m


def _evaluate_series(coef, m, t):
    t = np.atleast_2d(np.asarray(t, dtype=float))
    out = np.empty(len(t))
    for a in range(0, len(t), 64):
        ph = np.exp(-2j * math.pi * (t[a:a + 64] @ m.T))
        # the pair {m, -m} contributes twice the real part
        out[a:a + 64] = 2.0 * np.real(ph @ coef)
    return out


def truncation_bound(body, R, moll: MollifierConfig, M):
    """Bound on the dropped terms, using |chi_hat(xi)| <= L/(2 pi |xi|) and the table envelope."""
    L = body.perimeter
    c = moll.epsilon * moll.delta0
    r = np.arange(M + 1, M + 1 + int(math.ceil(moll.k[-1] / c)) + 1, dtype=float)
    env = np.array([moll.envelope(c * x) for x in r])
    # lattice points in the shell [x, x+1) are at most 2 pi (x + 1) + 4
    return float(R * R * np.sum((2.0 * math.pi * (r + 1.0) + 4.0) * env * L / (2.0 * math.pi * R * r)))


def hlawka_sandwich(body, R, n_t=1000, seed=0, epsilon=None, tail_tol=None, threads=None):
    """Check |C|((R-e)^2-R^2) + D_{e,R-e}(t) <= D_R(t) <= |C|((R+e)^2-R^2) + D_{e,R+e}(t).

    The disc is mollified about its centre with support radius 1.  Other bodies
    are recentred at their incenter with delta0 just below the inradius, which
    keeps the mollifier support inside the body.  Violations are counted beyond
    the truncation bound of the dropped Fourier terms.
    """
    R = float(R)
    eps = R ** (-1.0 / 3.0) if epsilon is None else float(epsilon)
    if isinstance(body, Disc):
        center, delta0 = np.zeros(2), 1.0
        tol = 1e-10 if tail_tol is None else tail_tol
    else:
        center, rin = body.incenter()
        delta0 = 0.98 * rin
        tol = 1e-4 if tail_tol is None else tail_tol
    moll = MollifierConfig(eps, delta0)
    M = moll.cutoff(tol)
    rng = np.random.default_rng(seed)
    t = _translations(n_t, rng)
    # D for the recentred body at t equals D for the original body at t - R c
    d = discrepancy_values(body, R, t - R * center, 0.0, threads)
    area = body.area
    lower = area * ((R - eps) ** 2 - R * R) + mollified_discrepancy(body, R - eps, moll, t, M, center, threads)
    upper = area * ((R + eps) ** 2 - R * R) + mollified_discrepancy(body, R + eps, moll, t, M, center, threads)
    slack = max(truncation_bound(body, R - eps, moll, M), truncation_bound(body, R + eps, moll, M)) + 1e-9
    viol = int(np.sum((lower > d + slack) | (d > upper + slack)))
    return {"R": R, "epsilon": eps, "delta0": delta0, "M": M, "tail_tol": tol,
            "truncation_bound": slack, "n_t": n_t, "violations": viol,
            "min_gap_lower": float(np.min(d - lower)), "min_gap_upper": float(np.min(upper - d))}


def davenport_l2_ratio(R_grid, M=64):
    """||D_R||_2^2 / log R for the square whose sides have slope sqrt 2 (via Parseval)."""
    from .geometry import ConvexPolygon
    sq = ConvexPolygon.davenport_square()
    out = []
    for R in R_grid:
        est = l2_translation_parseval(sq, R, M)
        out.append((float(R), est.extra["corrected"] ** 2, est.extra["corrected"] ** 2 / math.log(R)))
    return out


__all__ = ["NormEstimate", "MollifierConfig", "lp_translation_norm", "l2_translation_parseval",
           "lp_rotation_translation_norm", "rotation_mean_abs", "growth_fit_translation",
           "growth_fit_rotation", "diophantine_rotation_l2", "flat_normal_rotation",
           "mollified_discrepancy", "hlawka_mollified_discrepancy", "truncation_bound", "hlawka_sandwich", "half_lattice",
           "davenport_l2_ratio"]
