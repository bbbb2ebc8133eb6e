import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from spinprobe.atom import (
    ALPHA_CODATA,
    energy_level,
    g_factor_correction,
    make_orbital,
    normalization,
    phi_fourier,
    phi_fourier_closed,
    phi_volume_integral,
    phi_volume_integral_closed,
    small_component_weight,
    smearing_phi,
    smearing_phi_integral,
)
from spinprobe.detector import adiabatic_rate_closed, default_charge
from spinprobe.errors import DomainError, UnsupportedOrbitalError
from spinprobe.numerics import RadialFunction, integrate_semiline

Z1 = make_orbital(1)
BETA = Z1.params.beta
ME = Z1.params.me


# -- constants -------------------------------------------------------------------

def test_beta_hydrogen():
    assert BETA == pytest.approx(math.sqrt(1 - ALPHA_CODATA**2), rel=1e-15)
    assert BETA == pytest.approx(0.999973374, abs=1e-9)


@pytest.mark.parametrize("Z", [1, 2, 10, 20, 80])
def test_normalisation_constants(Z):
    p = make_orbital(Z).params
    assert p.k1 > 0 > p.k2
    assert p.k2 == pytest.approx(-p.k1 * math.sqrt((1 - p.beta) / (1 + p.beta)), rel=1e-14)
    expected = 2 ** (2 * p.beta) * Z ** (2 * p.beta + 1) * (1 + p.beta) / math.gamma(1 + 2 * p.beta)
    assert p.k1**2 == pytest.approx(expected, rel=1e-13)
    assert p.a0 == 1.0 and p.me == pytest.approx(1 / ALPHA_CODATA)


def test_orbital_domain_errors():
    with pytest.raises(UnsupportedOrbitalError):
        make_orbital(1, n0=2)
    with pytest.raises(DomainError):
        make_orbital(137)
    with pytest.raises(DomainError):
        make_orbital(2, alpha=0.5)
    with pytest.raises(DomainError):
        make_orbital(0)


def test_smearing_requires_beta_above_half():
    # Z alpha just above sqrt(3)/2 leaves beta < 1/2, where the gamma order turns negative
    assert make_orbital(118).params.beta > 0.5
    with pytest.raises(DomainError):
        make_orbital(119)


# -- radial functions ----------------------------------------------------------------

@pytest.mark.parametrize("Z", [1, 2, 10, 20])
def test_normalization(Z):
    assert normalization(make_orbital(Z)) == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("Z", [1, 2, 10, 20])
def test_small_component_weight(Z):
    p = make_orbital(Z)
    assert small_component_weight(p) == pytest.approx((1 - p.params.beta) / 2, rel=1e-8)


def test_small_component_ratio_is_order_alpha():
    r = np.geomspace(1e-3, 20, 40)
    ratio = np.abs(Z1.f(r) / Z1.g(r))
    assert np.all(ratio < ALPHA_CODATA)


# -- smearing function -----------------------------------------------------------------

@pytest.mark.parametrize("r", [1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 20.0])
def test_phi_closed_matches_integral(r):
    assert smearing_phi(Z1, r) == pytest.approx(smearing_phi_integral(Z1, r), rel=1e-8)


@pytest.mark.parametrize("Z", [2, 20])
def test_phi_closed_matches_integral_other_Z(Z):
    p = make_orbital(Z)
    for r in (0.01, 0.2, 1.0):
        assert smearing_phi(p, r) == pytest.approx(smearing_phi_integral(p, r), rel=1e-8)


@pytest.mark.parametrize("r", np.linspace(0.1, 10.0, 12))
def test_phi_derivative_is_fg(r):
    h = 1e-5 * min(r, 1.0)
    fd = (smearing_phi(Z1, r + h) - smearing_phi(Z1, r - h)) / (2 * h)
    fg = Z1.f(r) * Z1.g(r)
    assert abs(fd - fg) <= 1e-6 * abs(fg)


def test_phi_positive_decreasing_vanishing():
    r = np.geomspace(1e-4, 60, 200)
    phi = smearing_phi(Z1, r)
    assert np.all(phi > 0)
    assert np.all(np.diff(phi) < 0)
    assert smearing_phi(Z1, 60.0) < 1e-40


def test_phi_rejects_nonpositive_radius():
    with pytest.raises(DomainError):
        smearing_phi(Z1, 0.0)
    with pytest.raises(DomainError):
        smearing_phi_integral(Z1, -1.0)


@pytest.mark.parametrize("r", [0.05, 0.5, 1.0, 3.0])
def test_phi_central_potential_identity(r):
    # phi = (f^2 + g^2)/(4 me) - (1/me) int_r^inf f^2(r')/r' dr'
    tail = RadialFunction(lambda x: Z1.f(x) ** 2 / x, Z1.f.decay_scale)
    expected = (Z1.f(r) ** 2 + Z1.g(r) ** 2) / (4 * ME) - integrate_semiline(tail, lower=r) / ME
    assert smearing_phi(Z1, r) == pytest.approx(expected, rel=1e-7)


def test_region_swap_identity():
    def inner(r):
        f = RadialFunction(lambda x: Z1.f(x) ** 2 / x, Z1.f.decay_scale)
        return r * r * integrate_semiline(f, lower=r)

    lhs, _ = integrate.quad(inner, 0, 40, limit=200, epsrel=1e-11, points=[1e-3, 0.1, 1.0])
    assert lhs == pytest.approx(small_component_weight(Z1) / 3, rel=1e-8)


# -- volume integral and g-factor ----------------------------------------------------------

def test_volume_integral_hydrogen():
    expected = math.pi / ME * (1 - 2 / 3 * (1 - BETA))
    assert phi_volume_integral(Z1) == pytest.approx(expected, rel=1e-8)
    assert phi_volume_integral_closed(Z1) == pytest.approx(phi_volume_integral(Z1), rel=1e-8)


def test_volume_integral_nonrelativistic_limit():
    p = make_orbital(1, alpha=1e-7)
    assert phi_volume_integral(p) * p.params.me / math.pi == pytest.approx(1.0, rel=1e-10)


def test_g_factor_hydrogen():
    gf = g_factor_correction(Z1)
    assert gf == pytest.approx(1 - 2 / 3 * (1 - BETA), rel=1e-12)
    assert 1 - gf == pytest.approx(1.775e-5, rel=1e-3)


def test_g_factor_without_small_component():
    zero = RadialFunction(lambda r: 0.0 * r, Z1.f.decay_scale, Z1.f.endpoint_exponent)
    assert g_factor_correction(dataclasses.replace(Z1, f=zero)) == 1.0


def test_g_factor_scales_with_z_squared():
    p = make_orbital(20)
    deviation = 1 - g_factor_correction(p)
    assert deviation == pytest.approx(2 / 3 * (1 - p.params.beta), rel=1e-8)
    assert deviation == pytest.approx((20 * ALPHA_CODATA) ** 2 / 3, rel=0.05)


# -- energies ---------------------------------------------------------------------------

def test_ground_energy():
    assert energy_level(1, 1, 0.5) == pytest.approx(ME * BETA, rel=1e-15)


def test_fine_structure_ordering():
    assert energy_level(1, 2, 0.5) < energy_level(1, 2, 1.5)


@pytest.mark.parametrize("n,j", [(1, 0.5), (2, 0.5), (2, 1.5), (3, 2.5), (5, 1.5)])
def test_energy_nonrelativistic_limit(n, j):
    alpha = 1e-3
    e = energy_level(1, n, j, alpha=alpha) * alpha
    assert abs(e - (1 - alpha**2 / (2 * n * n))) < 1e-11


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 60), st.integers(1, 12), st.integers(0, 10))
def test_energy_bounds_and_monotone(Z, n, jj):
    j = jj + 0.5
    if j > n - 0.5:
        return
    me = 1 / ALPHA_CODATA
    e = energy_level(Z, n, j)
    assert 0 < e < me
    assert energy_level(Z, n + 1, j) > e


@pytest.mark.parametrize("n,j", [(0, 0.5), (1, 1.5), (2, 1.0), (2, -0.5)])
def test_energy_domain(n, j):
    with pytest.raises(DomainError):
        energy_level(1, n, j)


# -- Fourier transform of phi --------------------------------------------------------------

def test_fourier_at_zero_is_volume_integral():
    assert phi_fourier(Z1, 0.0) == pytest.approx(phi_volume_integral(Z1), rel=1e-8)
    assert phi_fourier(Z1, 0.0, "quadrature") == pytest.approx(phi_volume_integral(Z1), rel=1e-8)


@pytest.mark.parametrize("k", [1e-3, 0.05, 0.0999, 0.1001, 0.5, 1.0, 2.0, 4.0, 10.0])
def test_fourier_closed_matches_quadrature(k):
    assert phi_fourier(Z1, k) == pytest.approx(phi_fourier(Z1, k, "quadrature"), rel=1e-8)


@pytest.mark.parametrize("Z", [3, 40])
def test_fourier_closed_matches_quadrature_other_Z(Z):
    p = make_orbital(Z)
    for k in (0.3, 2.0 * Z, 7.0 * Z):
        assert phi_fourier(p, k) == pytest.approx(phi_fourier(p, k, "quadrature"), rel=1e-8)


def test_fourier_series_branch_is_continuous():
    p = Z1.params
    edge = 0.1  # x = k/2Z = 0.05
    below, above = phi_fourier_closed(p, edge * (1 - 1e-12)), phi_fourier_closed(p, edge * (1 + 1e-12))
    assert below == pytest.approx(above, rel=1e-11)


def test_fourier_positive_and_decaying():
    ks = np.linspace(0.05, 4.0, 40)
    vals = [phi_fourier(Z1, k) for k in ks]
    assert all(v > 0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert phi_fourier(Z1, 200.0) < 1e-6 * phi_fourier(Z1, 0.0)


@pytest.mark.parametrize("k", [1.0, 2.0])
def test_fourier_consistent_with_rate_formula(k):
    # invert the long-time rate q^2 k^3 phi~^2 / (6 pi^3) for phi~
    q = default_charge()
    rate = adiabatic_rate_closed(Z1.params, q, -k)
    implied = math.sqrt(6 * math.pi**3 * rate / (q * q * k**3))
    assert implied == pytest.approx(phi_fourier(Z1, k, "quadrature"), rel=1e-8)


def test_fourier_bad_method():
    with pytest.raises(ValueError):
        phi_fourier(Z1, 1.0, "fft")
    with pytest.raises(DomainError):
        phi_fourier(Z1, -1.0)
