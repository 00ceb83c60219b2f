"""Sums of two squares, the Hardy-Voronoi series, Fejer kernels, Cassels-type
exponential sum bounds and an irregularities-of-distribution experiment."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decay import transform_at
from .errors import AmbiguousTarget, InvalidParameter
from .fourier import DEFAULT_QUAD, bessel_j1, composite_gauss
from .geometry import CGammaBody
from .lattice import robust_contains


# ---------------------------------------------------------------------------
# r(k), A(R) and the Hardy-Voronoi series
# ---------------------------------------------------------------------------

def r2(k: int) -> int:
    """Number of (m1, m2) in Z^2 with m1^2 + m2^2 = k."""
    k = int(k)
    if k < 0:
        raise InvalidParameter("k must be nonnegative")
    count = 0
    top = math.isqrt(k)
    for m1 in range(-top, top + 1):
        rest = k - m1 * m1
        s = math.isqrt(rest)
        if s * s == rest:
            count += 1 if s == 0 else 2
    return count


def r2_table(K: int) -> np.ndarray:
    """r(k) for k = 0..K at once."""
    top = math.isqrt(K)
    m = np.arange(-top, top + 1)
    sq = (m[:, None] ** 2 + m[None, :] ** 2).ravel()
    return np.bincount(sq[sq <= K], minlength=K + 1)


def gauss_sum(R) -> int:
    """A(R) = sum_{0 <= k <= R^2} r(k)."""
    if R < 0:
        raise InvalidParameter("R must be nonnegative")
    n = math.floor(float(R) ** 2)
    top = math.isqrt(n)
    return sum(2 * math.isqrt(n - m * m) + 1 for m in range(-top, top + 1))


@dataclass(frozen=True)
class HardyVoronoi:
    R: float
    K: int
    partial: float
    cesaro: float
    target: float
    partial_sums: np.ndarray = field(repr=False, compare=False)


def hardy_voronoi_partial(R, K: int) -> HardyVoronoi:
    """R sum_{k<=K} r(k) k^{-1/2} J1(2 pi sqrt(k) R), its Cesaro mean and A(R) - pi R^2."""
    R = float(R)
    if not R > 0:
        raise InvalidParameter("R must be positive")
    if K < 0:
        raise InvalidParameter("K must be nonnegative")
    R2 = R * R
    if abs(R2 - round(R2)) <= 1e-12 * max(1.0, R2):
        raise AmbiguousTarget(f"R^2 = {R2:g} is an integer; the series converges to the "
                              "half-sum of the one-sided counts, which closed counting does not give")
    target = gauss_sum(R) - math.pi * R2
    if K == 0:
        return HardyVoronoi(R, 0, 0.0, 0.0, target, np.zeros(0))
    k = np.arange(1, K + 1, dtype=float)
    r = r2_table(K)[1:].astype(float)
    sk = np.sqrt(k)
    terms = np.where(r > 0, R * r / sk * bessel_j1(2.0 * math.pi * sk * R), 0.0)
    partial = np.cumsum(terms)
    return HardyVoronoi(R, K, float(partial[-1]), float(np.mean(partial)), target, partial)


# ---------------------------------------------------------------------------
# Fejer kernel, point sets, exponential sums
# ---------------------------------------------------------------------------

def fejer_kernel(M: int, x):
    """(1/(M+1)) (sin(pi (M+1) x) / sin(pi x))^2, equal to M+1 at integers."""
    if M < 0:
        raise InvalidParameter("M must be nonnegative")
    x = np.asarray(x, dtype=float)
    s = np.sin(math.pi * x)
    near = np.abs(s) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(math.pi * (M + 1) * x) ** 2 / ((M + 1) * s * s)
    if np.any(near):
        j = np.arange(-M, M + 1)
        xs = x[near] if x.ndim else x
        w = 1.0 - np.abs(j) / (M + 1)
        direct = np.cos(2.0 * math.pi * np.multiply.outer(xs, j)) @ w
        if x.ndim:
            out[near] = direct
        else:
            out = direct
    return float(out) if np.ndim(out) == 0 else out


_TAGS = ("grid", "jittered", "uniform", "custom")


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    tag: str = "custom"
    seed: int | None = None

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=float))
        if p.shape[-1] != 2 or len(p) < 1:
            raise InvalidParameter("a point set needs N >= 1 points in the plane")
        if np.any(p < -0.5) or np.any(p >= 0.5):
            raise InvalidParameter("points must lie in [-1/2, 1/2)^2")
        if self.tag not in _TAGS:
            raise InvalidParameter(f"unknown generator tag {self.tag!r}")
        object.__setattr__(self, "points", p)

    @property
    def N(self):
        return len(self.points)

    @classmethod
    def grid(cls, M):
        i = np.arange(M) / M - 0.5
        X, Y = np.meshgrid(i, i, indexing="ij")
        return cls(np.column_stack([X.ravel(), Y.ravel()]), "grid")

    @classmethod
    def jittered(cls, M, seed=0):
        rng = np.random.default_rng(seed)
        i = np.arange(M)
        X, Y = np.meshgrid(i, i, indexing="ij")
        p = (np.column_stack([X.ravel(), Y.ravel()]) + rng.uniform(size=(M * M, 2))) / M - 0.5
        return cls(np.minimum(p, np.nextafter(0.5, 0.0)), "jittered", seed)

    @classmethod
    def uniform(cls, N, seed=0):
        rng = np.random.default_rng(seed)
        return cls(rng.uniform(-0.5, 0.5, size=(N, 2)), "uniform", seed)

    @classmethod
    def make(cls, kind, N, seed=0):
        if kind == "uniform":
            return cls.uniform(N, seed)
        M = math.isqrt(N)
        if M * M != N:
            raise InvalidParameter(f"{kind} point sets need a square N, got {N}")
        return cls.grid(M) if kind == "grid" else cls.jittered(M, seed)


def exponential_sum(ps: PointSet, m):
    """sum_j e^{2 pi i m.u(j)}; m may be a single vector or an array of them."""
    m = np.asarray(m, dtype=float)
    single = m.ndim == 1
    m = np.atleast_2d(m)
    out = np.empty(len(m), dtype=complex)
    step = max(1, (1 << 22) // ps.N)
    for a in range(0, len(m), step):
        out[a:a + step] = np.exp(2j * math.pi * (m[a:a + step] @ ps.points.T)).sum(axis=1)
    return complex(out[0]) if single else out


# ---------------------------------------------------------------------------
# Cassels-type lower bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CasselsConfig:
    N: int
    L: int
    H: int

    def __post_init__(self):
        if min(self.N, self.L, self.H) < 1:
            raise InvalidParameter("N, L, H must be positive integers")
        if not self.H * self.H < self.L:
            raise InvalidParameter("need H < sqrt(L)")

    @property
    def K(self):
        """Half-side of the outer square, [sqrt(L N)]."""
        return math.isqrt(self.L * self.N)


def cassels_check(ps: PointSet, cfg: CasselsConfig):
    """lhs = sum over Q_K minus Q_H of |S(m)|^2 against rhs = (L - H^2) N^2.

    Q_K is the square |m1|, |m2| <= K with K = [sqrt(L N)].
    """
    K, H, N = cfg.K, cfg.H, ps.N
    if N != cfg.N:
        raise InvalidParameter(f"config is for N={cfg.N} but the point set has {N} points")
    k = np.arange(-K, K + 1)
    X, Y = np.meshgrid(k, k, indexing="ij")
    keep = (np.abs(X) > H) | (np.abs(Y) > H)
    m = np.column_stack([X[keep], Y[keep]])
    lhs = float(np.sum(np.abs(exponential_sum(ps, m)) ** 2))
    rhs = float((cfg.L - H * H) * N * N)
    return lhs, rhs, lhs >= rhs


# ---------------------------------------------------------------------------
# lower bound on the tau-average of |chi_hat|^2
# ---------------------------------------------------------------------------

def tau_average(body, xi, q=DEFAULT_QUAD, nodes_per_oscillation=64):
    """int_{1/2}^{1} |chi_hat(tau xi)|^2 d tau by composite Gauss."""
    xi = np.asarray(xi, dtype=float)
    rho = float(np.hypot(*xi))
    cycles = max(1, int(math.ceil(rho * 2.0 * body.radius * 0.5)))
    order = 16
    n_panels = max(1, int(math.ceil(nodes_per_oscillation * cycles / order)))
    tau, w = composite_gauss(np.linspace(0.5, 1.0, n_panels + 1), order)
    vals = transform_at(body, tau[:, None] * xi[None, :], q)
    return float(np.sum(w * np.abs(vals) ** 2))


def ft_lower_bound_check(body, xi_list, c1=8.0):
    """value * |xi|^3 for each xi; the infimum should stay away from 0."""
    rows = []
    for xi in xi_list:
        xi = np.asarray(xi, dtype=float)
        rho = float(np.hypot(*xi))
        if rho < c1:
            raise InvalidParameter(f"|xi| = {rho:g} is below c1 = {c1:g}")
        v = tau_average(body, xi)
        rows.append({"xi": xi.tolist(), "rho": rho, "value": v, "scaled": v * rho ** 3})
    return {"rows": rows, "inf_scaled": min(r["scaled"] for r in rows)}


# ---------------------------------------------------------------------------
# irregularities of distribution
# ---------------------------------------------------------------------------

def _wrap(p):
    return p - np.floor(p + 0.5)


def irregularities_integrand(body, ps: PointSet, tau, t, centered=True):
    """-N tau^2 |C| + sum_j chi_{tau C}(u(j) + t mod Z^2), for each t.

    With ``centered=False`` the constant is the literal -N|C|.
    """
    t = np.atleast_2d(np.asarray(t, dtype=float))
    out = np.empty(len(t))
    step = max(1, (1 << 20) // ps.N)
    for a in range(0, len(t), step):
        w = _wrap(ps.points[None, :, :] + t[a:a + step, None, :])
        out[a:a + step] = robust_contains(body, w / tau).sum(axis=1)
    area = body.area * (tau * tau if centered else 1.0)
    return out - ps.N * area


def irregularities_experiment(gamma, ps: PointSet, tau_nodes=32, t_grid=64, centered=True,
                              body=None):
    """(int_{1/2}^1 int_{T^2} |...|^2 dt dtau)^{1/2}: Gauss in tau, midpoint grid in t."""
    if tau_nodes < 32 or t_grid < 64:
        raise InvalidParameter("need at least 32 tau nodes and a 64x64 t grid")
    body = CGammaBody(gamma) if body is None else body
    tau, w = composite_gauss(np.array([0.5, 1.0]), tau_nodes)
    g = (np.arange(t_grid) + 0.5) / t_grid - 0.5
    X, Y = np.meshgrid(g, g, indexing="ij")
    t = np.column_stack([X.ravel(), Y.ravel()])
    total = 0.0
    for tk, wk in zip(tau, w):
        v = irregularities_integrand(body, ps, tk, t, centered)
        total += wk * float(np.mean(v * v))
    return math.sqrt(total)


def irregularities_n1_exact(body):
    """Closed form for one point: int_{1/2}^1 a(1 - a) d tau with a = tau^2 |C|."""
    c = body.area
    return math.sqrt(c * 7.0 / 24.0 - c * c * 31.0 / 160.0)


__all__ = ["r2", "r2_table", "gauss_sum", "HardyVoronoi", "hardy_voronoi_partial", "fejer_kernel",
           "PointSet", "exponential_sum", "CasselsConfig", "cassels_check", "tau_average",
           "ft_lower_bound_check", "irregularities_integrand", "irregularities_experiment",
           "irregularities_n1_exact"]
