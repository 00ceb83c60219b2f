import math

import numpy as np
import pytest

from latdisc.decay import fit_exponent
from latdisc.errors import ConfigError, InvalidParameter
from latdisc.geometry import ConvexPolygon, RigidMotion, build_cgamma
from latdisc.lattice import count_integer_points
from latdisc.norms import (MollifierConfig, davenport_l2_ratio, diophantine_rotation_l2,
                           flat_normal_rotation, growth_fit_translation, half_lattice,
                           hlawka_sandwich, l2_translation_parseval, lp_translation_norm,
                           mollified_discrepancy, rotation_mean_abs)

DYADIC = [2.0 ** k for k in range(4, 10)]


def test_half_lattice():
    m = half_lattice(10)
    full = {(a, b) for a in range(-10, 11) for b in range(-10, 11) if 0 < a * a + b * b <= 100}
    got = {tuple(map(int, v)) for v in m} | {tuple(-int(x) for x in v) for v in m}
    assert got == full and 2 * len(m) == len(full)


def test_mc_matches_parseval_disc(disc):
    mc = lp_translation_norm(disc, 50, 2, 100_000, seed=0)
    ps = l2_translation_parseval(disc, 50, 512)
    assert abs(mc.value - ps.extra["corrected"]) < 3 * mc.stderr


def test_kendall_slope(disc):
    vals = [[R, l2_translation_parseval(disc, R, 128).extra["corrected"]] for R in DYADIC]
    assert abs(fit_exponent(vals).slope - 0.5) < 0.1


def test_parseval_kappa_stable(disc):
    k = [l2_translation_parseval(disc, R, 64).value / math.sqrt(R) for R in (25, 50, 100)]
    assert max(k) / min(k) < 1.5


def test_parseval_cutoff_converged(disc):
    a = l2_translation_parseval(disc, 50, 64)
    b = l2_translation_parseval(disc, 50, 128)
    assert abs(a.value - b.value) < 0.01 * b.value
    assert not b.extra["tail_warning"]
    assert b.extra["tail_estimate"] <= b.extra["tail_bound"]


def test_parseval_cutoff_too_small(disc):
    with pytest.raises(InvalidParameter):
        l2_translation_parseval(disc, 10, 4)


def test_square_l2_vs_sup(square):
    Rs = [16, 32, 64, 128, 256]
    # integer side: every term of the Parseval sum vanishes and D = 0 for almost every t
    for R in Rs[:2]:
        assert l2_translation_parseval(square, R, 64).value < 1e-9
        assert lp_translation_norm(square, R, 2, 2000).value == 0.0
    # t = 0 puts whole rows on the edges: D = 2R + 1 for even R
    sup = [[R, count_integer_points(square, R) - R * R] for R in Rs]
    assert [v for _, v in sup] == [2 * R + 1 for R in Rs]
    # half-integer side: L^2 grows like R itself
    l2 = [[R + 0.5, lp_translation_norm(square, R + 0.5, 2, 4000).value] for R in Rs]
    assert fit_exponent(l2).slope == pytest.approx(1.0, abs=0.02)


def test_davenport_log_bound():
    rows = davenport_l2_ratio(DYADIC, 64)
    ratios = [r[2] for r in rows]
    assert max(ratios) < 2.0
    # no power growth of ||D||_2^2
    assert fit_exponent([[r[0], r[1]] for r in rows]).slope < 0.3


def test_triangle_rotation_mean():
    tri = ConvexPolygon([[-0.4, -0.3], [0.45, -0.1], [0.1, 0.4]])
    for R in (16, 64, 256, 1024):
        assert rotation_mean_abs(tri, R, 256) <= math.log(R) ** 2


def test_p_inf_is_sample_max(c3):
    est = lp_translation_norm(c3, 20, math.inf, 2000, seed=4)
    t = np.random.default_rng(4).uniform(-0.5, 0.5, (2000, 2))
    d = [count_integer_points(c3, 20, RigidMotion(0, tuple(v))) - 400 * c3.area for v in t]
    assert est.value == pytest.approx(max(abs(x) for x in d))


def test_mc_needs_samples(c3):
    with pytest.raises(InvalidParameter):
        lp_translation_norm(c3, 10, 2, 100)


def test_colin_high_p():
    f = growth_fit_translation(build_cgamma(2.5), 16, [16, 32, 64, 128, 256, 512], 10_000)
    assert f.slope <= (2 / 3) * (1 - 2 / (2.5 * 16)) + 0.05


def test_flat_normal_rotation():
    phi = flat_normal_rotation("sqrt2")
    n = np.array([math.sin(phi), -math.cos(phi)])
    assert n[1] / n[0] == pytest.approx(math.sqrt(2))
    with pytest.raises(InvalidParameter):
        flat_normal_rotation("pi")


def test_diophantine_contrast():
    rot = diophantine_rotation_l2(3, "sqrt2")
    assert rot.slope <= 0.6
    flat = growth_fit_translation(build_cgamma(3), 2, [2.0 ** k for k in range(4, 12)], 10_000)
    assert flat.slope > 0.6 > rot.slope


def test_mollifier_table():
    m = MollifierConfig(0.5)
    assert m.phi_hat(0.0) == pytest.approx(1.0)
    assert abs(m.phi_hat(2.0)) < abs(m.phi_hat(0.5))
    with pytest.raises(ConfigError):
        m.phi_hat(1000.0)
    with pytest.raises(InvalidParameter):
        MollifierConfig(0.0)


def test_mollified_vanishes_for_large_eps(disc):
    t = np.random.default_rng(0).uniform(-0.5, 0.5, (20, 2))
    vals = [np.max(np.abs(mollified_discrepancy(disc, 10, MollifierConfig(e), t, 8)))
            for e in (1.0, 3.0, 9.0)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-3


def test_hlawka_disc(disc):
    rep = hlawka_sandwich(disc, 30, n_t=300, seed=1)
    assert rep["violations"] == 0
    assert rep["epsilon"] == pytest.approx(30 ** (-1 / 3))


def test_sierpinski_envelope(disc):
    t = np.random.default_rng(0).uniform(-0.5, 0.5, (200, 2))
    ratio = []
    for R in (10, 20, 40):
        eps = R ** (-1 / 3)
        m = MollifierConfig(eps)
        up = math.pi * ((R + eps) ** 2 - R * R) + mollified_discrepancy(disc, R + eps, m, t, m.cutoff(1e-8))
        ratio.append(up.max() / R ** (2 / 3))
    assert max(ratio) / min(ratio) < 1.3


def test_certified_regime_flag(c3):
    from latdisc.norms import lp_rotation_translation_norm
    assert lp_rotation_translation_norm(c3, 16, 2, 8, 128).extra["certified_regime"]
    assert not lp_rotation_translation_norm(c3, 16, 6, 8, 128).extra["certified_regime"]


def test_single_t_mollified(disc):
    from latdisc.norms import hlawka_mollified_discrepancy
    m = MollifierConfig(0.5)
    t = np.array([0.1, -0.3])
    assert hlawka_mollified_discrepancy(disc, 10, m, t, 40) == \
        pytest.approx(mollified_discrepancy(disc, 10, m, t[None, :], 40)[0])
