"""Dirac hydrogen-like s-orbital data and the smearing function it induces.

Internal units: hbar = c = 1 and a0 = 1/(me * alpha) = 1, so the electron
mass is ``1/alpha`` and all lengths are in Bohr radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedOrbitalError
from .numerics import DEFAULT_TOL, RadialFunction, Tolerance, gamma_upper, integrate_semiline, spherical_fourier

__all__ = [
    "ALPHA_CODATA",
    "OrbitalParams",
    "OrbitalProfile",
    "make_orbital",
    "energy_level",
    "smearing_phi",
    "smearing_phi_integral",
    "normalization",
    "small_component_weight",
    "phi_volume_integral",
    "phi_volume_integral_closed",
    "g_factor_correction",
    "phi_fourier",
    "phi_fourier_closed",
]

ALPHA_CODATA = 7.2973525693e-3

# beyond this many Bohr radii (divided by Z) every ground-orbital quantity
# is below 1e-30 of its peak
_DECAY_BOHR = 40.0


@dataclass(frozen=True)
class OrbitalParams:
    Z: int
    n0: int
    alpha: float
    beta: float
    a0: float
    k1: float
    k2: float
    me: float

    @property
    def za(self) -> float:
        """``Z alpha``, which equals ``sqrt(1 - beta^2)`` without the cancellation."""
        return self.Z * self.alpha

    @property
    def gamma_order(self) -> float:
        """Order ``2*beta - 1`` of the incomplete gamma in the closed-form smearing."""
        return 2.0 * self.beta - 1.0


@dataclass(frozen=True)
class OrbitalProfile:
    params: OrbitalParams
    g: RadialFunction
    f: RadialFunction
    phi: RadialFunction


def _orbital_params(Z: int, n0: int, alpha: float) -> OrbitalParams:
    if Z < 1 or int(Z) != Z:
        raise DomainError(f"Z must be a positive integer, got {Z}")
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if n0 != 1:
        raise UnsupportedOrbitalError(
            f"closed-form radial functions are only available for n0 = 1 (got n0 = {n0})")
    za = Z * alpha
    if za >= 1.0:
        raise DomainError(f"Z*alpha = {za} >= 1: no bound ground state")
    beta = math.sqrt(1.0 - za * za)
    if beta <= 0.5:
        # the smearing function needs Gamma(2*beta - 1, .) with positive order
        raise DomainError(
            f"Z*alpha = {za:.6f} gives beta = {beta:.6f} <= 1/2; the ground-orbital "
            "smearing function is not defined (requires Z*alpha < sqrt(3)/2)")
    k1 = 2.0**beta * Z ** (beta + 0.5) * math.sqrt((1.0 + beta) / math.gamma(1.0 + 2.0 * beta))
    # sqrt((1 - beta)/(1 + beta)) = Z alpha / (1 + beta)
    k2 = -k1 * za / (1.0 + beta)
    return OrbitalParams(Z=int(Z), n0=n0, alpha=float(alpha), beta=beta, a0=1.0,
                         k1=k1, k2=k2, me=1.0 / alpha)


def _phi_closed(params: OrbitalParams, r: float) -> float:
    Z, beta = params.Z, params.beta
    pref = 2.0 * Z * Z * params.za / math.gamma(2.0 * beta + 1.0)
    return pref * gamma_upper(2.0 * beta - 1.0, 2.0 * Z * r)


# Taylor coefficients (in x = k / 2Z) of the regularised numerator of the
# transform, normalised so the constant term is one
def _phi_fourier_series(beta: float, x: float) -> float:
    b2 = beta * beta
    c = (
        1.0,
        -(2 * b2 + 3) / 5.0,
        (2 * b2**2 + 18 * b2 + 15) / 35.0,
        -(4 * b2**3 + 106 * b2**2 + 520 * b2 + 315) / 945.0,
        (2 * b2**4 + 116 * b2**3 + 1646 * b2**2 + 5796 * b2 + 2835) / 10395.0,
        -(4 * b2**5 + 430 * b2**4 + 13192 * b2**3 + 132570 * b2**2 + 373554 * b2 + 155925) / 675675.0,
    )
    x2 = x * x
    return sum(ci * x2**i for i, ci in enumerate(c))


def phi_fourier_closed(params: OrbitalParams, k: float) -> float:
    """Closed-form transform of the n0 = 1 smearing function.

    Integrating by parts against ``f g = k1 k2 r^(2 beta - 2) exp(-2 Z r)``
    gives ``4 pi Z sqrt(1 - beta^2) (Z sin w - beta k cos w) /
    (beta (2 beta - 1) k^3 (1 + k^2 / 4Z^2)^beta)`` with
    ``w = 2 beta arctan(k / 2Z)``. The numerator cancels to O(k^3), so small
    k uses the Taylor series instead.
    """
    Z, beta = params.Z, params.beta
    k = float(k)
    if k < 0:
        raise DomainError("wavenumber must be non-negative")
    x = k / (2.0 * Z)
    at_zero = math.pi * params.za * (2.0 * beta + 1.0) / (3.0 * Z)
    if x < 0.05:
        return at_zero * _phi_fourier_series(beta, x) / (1.0 + x * x) ** beta
    w = 2.0 * beta * math.atan(x)
    num = Z * math.sin(w) - beta * k * math.cos(w)
    return (4.0 * math.pi * Z * params.za * num
            / (beta * (2.0 * beta - 1.0) * k**3 * (1.0 + x * x) ** beta))


def make_orbital(Z: int = 1, n0: int = 1, alpha: float = ALPHA_CODATA) -> OrbitalProfile:
    """Ground s-orbital radial functions ``g``, ``f`` and smearing ``phi``."""
    p = _orbital_params(Z, n0, alpha)
    expo = p.beta - 1.0
    scale = _DECAY_BOHR / p.Z

    def g(r):
        return p.k1 * np.exp(-p.Z * r) * r**expo

    def f(r):
        return p.k2 * np.exp(-p.Z * r) * r**expo

    def phi(r):
        if np.ndim(r):
            return np.array([_phi_closed(p, float(x)) for x in np.ravel(r)]).reshape(np.shape(r))
        return _phi_closed(p, r)

    return OrbitalProfile(
        params=p,
        g=RadialFunction(g, scale, expo),
        f=RadialFunction(f, scale, expo),
        phi=RadialFunction(phi, scale, 0.0, fourier=lambda k: phi_fourier_closed(p, k)),
    )


def energy_level(Z: int, n: int, j: float, alpha: float = ALPHA_CODATA) -> float:
    """Bound-state energy ``E_nj`` (rest mass included), in units of 1/a0."""
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be a positive integer, got {n}")
    two_j = 2.0 * j
    if abs(two_j - round(two_j)) > 1e-12 or round(two_j) % 2 != 1:
        raise DomainError(f"j must be a positive half-odd integer, got {j}")
    if not 0.5 <= j <= n - 0.5:
        raise DomainError(f"j = {j} not allowed for n = {n}")
    za = Z * alpha
    if not 0 < za < j + 0.5:
        raise DomainError(f"Z*alpha = {za} must lie in (0, j + 1/2)")
    me = 1.0 / alpha
    root = math.sqrt((j + 0.5) ** 2 - za * za)
    return me / math.sqrt(1.0 + (za / (n - j - 0.5 + root)) ** 2)


def smearing_phi(profile: OrbitalProfile, r: float) -> float:
    """Closed-form smearing function ``phi(r)`` (positive, decreasing)."""
    if np.any(np.asarray(r) <= 0):
        raise DomainError("phi is only defined for r > 0")
    return profile.phi(r)


def smearing_phi_integral(profile: OrbitalProfile, r: float,
                          tol: Tolerance = DEFAULT_TOL) -> float:
    """``phi(r) = -int_r^inf f g dr'`` by direct quadrature (oracle for the closed form)."""
    if r <= 0:
        raise DomainError("phi is only defined for r > 0")
    fg = RadialFunction(lambda x: profile.f(x) * profile.g(x), profile.f.decay_scale)
    return -integrate_semiline(fg, tol, lower=r)


def normalization(profile: OrbitalProfile, tol: Tolerance = DEFAULT_TOL) -> float:
    """``int_0^inf r^2 (f^2 + g^2) dr``; one for a properly normalised orbital."""
    expo = 2.0 * profile.g.endpoint_exponent + 2.0
    dens = RadialFunction(lambda r: r * r * (profile.f(r) ** 2 + profile.g(r) ** 2),
                          profile.g.decay_scale, expo)
    return integrate_semiline(dens, tol)


def small_component_weight(profile: OrbitalProfile, tol: Tolerance = DEFAULT_TOL) -> float:
    """``int_0^inf r^2 f^2 dr``, equal to ``(1 - beta)/2`` for the ground orbital."""
    expo = 2.0 * profile.f.endpoint_exponent + 2.0
    dens = RadialFunction(lambda r: r * r * profile.f(r) ** 2, profile.f.decay_scale, expo)
    return integrate_semiline(dens, tol)


def phi_volume_integral(profile: OrbitalProfile, tol: Tolerance = DEFAULT_TOL) -> float:
    """``int d^3x phi(|x|)`` by direct radial quadrature."""
    dens = RadialFunction(lambda r: r * r * profile.phi(r), profile.phi.decay_scale, 2.0)
    return 4.0 * math.pi * integrate_semiline(dens, tol)


def phi_volume_integral_closed(profile: OrbitalProfile, tol: Tolerance = DEFAULT_TOL) -> float:
    """The same volume integral through ``(pi/me)(1 - (4/3) int r^2 f^2 dr)``."""
    me = profile.params.me
    return math.pi / me * (1.0 - 4.0 / 3.0 * small_component_weight(profile, tol))


def g_factor_correction(profile: OrbitalProfile, tol: Tolerance = DEFAULT_TOL) -> float:
    """Multiplicative correction ``1 - (4/3) int r^2 f^2 dr`` to the Zeeman coupling."""
    return 1.0 - 4.0 / 3.0 * small_component_weight(profile, tol)


def phi_fourier(profile: OrbitalProfile, k: float, method: str = "closed",
                tol: Tolerance = DEFAULT_TOL) -> float:
    """Spherical Fourier transform of the smearing function.

    ``method="closed"`` uses the attached analytic transform when the profile
    has one; ``method="quadrature"`` always integrates numerically.
    """
    if k < 0:
        raise DomainError("wavenumber must be non-negative")
    if method == "closed":
        return profile.phi.transform(k, tol)
    if method == "quadrature":
        return spherical_fourier(profile.phi, k, tol)
    raise ValueError(f"unknown method {method!r}")
