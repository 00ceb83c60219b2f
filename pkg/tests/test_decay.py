import math

import numpy as np
import pytest

from latdisc.decay import (RegimeLabel, critical_index, directional_decay_scan, dyadic_grid,
                           fit_exponent, predicted_spherical_slope, psi_from_flat, regime_classify,
                           spherical_average, spherical_decay, theta_mesh, verify_pointwise_bounds)
from latdisc.errors import DegenerateFit, InvalidParameter, ResolutionError
from latdisc.fourier import ft_disc_radial
from latdisc.geometry import build_cgamma

RHO = 2.0 ** 9


def test_regimes():
    assert regime_classify(3, RHO, 0.0) is RegimeLabel.FLAT
    assert regime_classify(3, RHO, 0.5) is RegimeLabel.GENERIC
    assert regime_classify(3, RHO, 2 * RHO ** (-2 / 3)) is RegimeLabel.TRANSITION
    # psi near pi is the same line as psi near 0
    assert regime_classify(3, RHO, math.pi - 1e-4) is RegimeLabel.FLAT
    with pytest.raises(InvalidParameter):
        regime_classify(3, 1.5, 0.0)


def test_psi_from_flat(c3):
    assert psi_from_flat(c3, -math.pi / 2) == 0
    assert psi_from_flat(c3, math.pi / 2) == pytest.approx(0, abs=1e-15)
    assert psi_from_flat(c3, 0.0) == pytest.approx(math.pi / 2)


def test_fit_exact_power_law():
    r = 2.0 ** np.arange(4, 11)
    f = fit_exponent(np.column_stack([r, r ** -1.5]))
    assert f.slope == pytest.approx(-1.5, abs=1e-12) and f.stderr < 1e-12


def test_fit_noisy():
    rng = np.random.default_rng(0)
    r = 2.0 ** np.arange(4, 11)
    v = 3 * r ** -1.5 * (1 + 0.01 * rng.standard_normal(len(r)))
    assert abs(fit_exponent(np.column_stack([r, v])).slope + 1.5) < 0.02


def test_fit_errors():
    with pytest.raises(DegenerateFit):
        fit_exponent([[1, 1], [2, 2]])
    with pytest.raises(InvalidParameter):
        fit_exponent([[1, 1], [2, 0], [4, 1], [8, 1]])


def test_dyadic_grid_checked(c3):
    with pytest.raises(InvalidParameter):
        directional_decay_scan(c3, 0.0, [16, 32, 64])
    with pytest.raises(InvalidParameter):
        directional_decay_scan(c3, 0.0, [16, 33, 64, 128, 256, 512])


@pytest.mark.parametrize("gamma", [3, 4])
def test_flat_slope(gamma):
    body = build_cgamma(gamma)
    fit = directional_decay_scan(body, body.flat_normal, dyadic_grid(4, 10))
    assert abs(fit.slope + 1 + 1 / gamma) < 0.05


def test_disc_slope(disc):
    fit = directional_decay_scan(disc, 0.4, dyadic_grid(4, 12))
    assert abs(fit.slope + 1.5) < 0.05


def test_envelope_seed_stable(c3):
    a = directional_decay_scan(c3, 0.9, dyadic_grid(4, 10), seed=1).slope
    b = directional_decay_scan(c3, 0.9, dyadic_grid(4, 10), seed=2).slope
    assert abs(a - b) < 0.03


def test_all_zero_is_degenerate(monkeypatch, c3):
    import latdisc.decay as dec
    monkeypatch.setattr(dec, "jitter_envelope", lambda *a, **k: np.zeros(7))
    with pytest.raises(DegenerateFit):
        dec.directional_decay_scan(c3, 0.0, dyadic_grid(4, 10))


def test_theta_mesh_resolution(c3):
    with pytest.raises(ResolutionError):
        theta_mesh(c3, 500, n_theta=100)
    th = theta_mesh(c3, 64)
    assert np.all(np.diff(th) > 0) and th[0] >= 0 and th[-1] < 2 * math.pi


def test_spherical_disc_constant(disc):
    # |chi_hat| is radial, so the L^p average is (2 pi)^{1/p} |J1(2 pi rho)/rho|
    rho = 37.3
    for p in (1, 2, 10):
        v = spherical_average(disc, rho, p)
        assert v == pytest.approx((2 * math.pi) ** (1 / p) * abs(ft_disc_radial(rho)), rel=1e-12)


def test_spherical_disc_slope(disc):
    fit = spherical_decay(disc, [1], dyadic_grid(3, 9))[1]
    assert abs(fit.slope + 1.5) < 0.05


def test_spherical_density_converged(c3):
    a = spherical_average(c3, 100.0, 2, density=4)
    b = spherical_average(c3, 100.0, 2, density=8)
    assert abs(a - b) < 1e-5 * a


def test_critical_index():
    assert critical_index(3) == 4
    assert predicted_spherical_slope(3, 2) == -1.5
    assert predicted_spherical_slope(3, 10) == pytest.approx(-1.4)


def test_pointwise_bounds_finite(c3):
    rhos = 2.0 ** np.arange(3, 10)
    psis = np.concatenate([[0.0], np.geomspace(1e-3, 1.5, 24)])
    rep = verify_pointwise_bounds(c3, rhos, psis)
    for lab in ("flat", "transition", "generic"):
        assert rep[lab]["count"] > 0
        assert 0 < rep[lab]["sup_ratio"] < 10
