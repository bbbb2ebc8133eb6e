"""Special functions and integration primitives.

Everything here works in the internal unit system (hbar = c = a0 = 1), so
radial arguments are measured in Bohr radii and wavenumbers in inverse
Bohr radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import DomainError, IntegrationError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "RadialFunction",
    "gamma_upper",
    "integrate_semiline",
    "spherical_fourier",
    "autocorrelation",
    "richardson_extrapolate",
]


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-10
    abs: float = 1e-14
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.rel > 0:
            raise DomainError(f"relative tolerance must be positive, got {self.rel}")
        if self.abs < 0:
            raise DomainError(f"absolute tolerance must be non-negative, got {self.abs}")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")

    def met(self, error: float, value: float) -> bool:
        return error <= max(self.abs, self.rel * abs(value))


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """A real radial profile ``r -> evaluator(r)`` defined for r > 0.

    ``endpoint_exponent`` is the power p for which ``evaluator(r) / r**p``
    stays regular as r -> 0; quadrature uses an algebraic-weight rule on the
    first panel when it is non-zero. ``fourier`` optionally supplies the
    closed-form three-dimensional Fourier transform of the profile.
    """

    evaluator: Callable[[float], float]
    decay_scale: float
    endpoint_exponent: float = 0.0
    fourier: Optional[Callable[[float], float]] = None

    def __call__(self, r):
        return self.evaluator(r)

    def transform(self, k: float, tol: Tolerance = DEFAULT_TOL) -> float:
        """Spherical Fourier transform, closed form when one is attached."""
        if self.fourier is not None:
            return self.fourier(k)
        return spherical_fourier(self, k, tol)


# -- incomplete gamma ------------------------------------------------------

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 10_000
_TINY_R = 1e-30


def _gamma_lower_series(s: float, x: float) -> float:
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + s * math.log(x))
    raise IntegrationError(f"incomplete gamma series did not converge for s={s}, x={x}")


def _gamma_upper_cf(s: float, x: float) -> float:
    # modified Lentz evaluation of the Legendre continued fraction
    b = x + 1.0 - s
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + s * math.log(x)) * h
    raise IntegrationError(f"incomplete gamma continued fraction did not converge for s={s}, x={x}")


def gamma_upper(s: float, x: float) -> float:
    """Upper incomplete gamma function, unregularised.

    Uses the power series of the lower function for ``x <= s + 1`` and the
    continued fraction otherwise.
    """
    s = float(s)
    x = float(x)
    if not s > 0:
        raise DomainError(f"gamma_upper requires s > 0, got s={s}")
    if not x >= 0:
        raise DomainError(f"gamma_upper requires x >= 0, got x={x}")
    if x == 0.0:
        return math.gamma(s)
    if x <= s + 1.0:
        return math.gamma(s) - _gamma_lower_series(s, x)
    return _gamma_upper_cf(s, x)


# -- semi-infinite quadrature ---------------------------------------------

def _quad_checked(func, a, b, tol: Tolerance, epsabs: float, **kwargs) -> float:
    value, err, info = integrate.quad(
        func, a, b, epsabs=epsabs, epsrel=tol.rel,
        limit=tol.max_subdivisions, full_output=1, **kwargs)[:3]
    if not np.isfinite(value):
        raise IntegrationError(f"non-finite quadrature result on [{a}, {b}]")
    # ier = 1: subdivision budget spent; other codes are roundoff complaints,
    # which only matter if the error estimate also misses the target
    if err > 10 * max(epsabs, tol.rel * abs(value)):
        raise IntegrationError(
            f"quadrature on [{a}, {b}] missed tolerance: value={value!r}, "
            f"error estimate={err!r}, subdivisions={info.get('last')}")
    return value


def integrate_semiline(f: RadialFunction, tol: Tolerance = DEFAULT_TOL,
                       lower: float = 0.0) -> float:
    """Integral of ``f`` over ``[lower, inf)``.

    The range is split at geometrically spaced points up to the profile's
    decay scale; the remainder is mapped to a finite interval by QUADPACK.
    """
    if lower < 0:
        raise DomainError("lower limit must be non-negative")
    scale = max(float(f.decay_scale), 1e-300)
    edges = [lower]
    start = max(lower, scale / 256.0)
    if start > lower:
        edges.append(start)
    e = start
    while e * 2.0 < scale:
        e *= 2.0
        edges.append(e)
    if scale > edges[-1]:
        edges.append(scale)
    epsabs = tol.abs / (len(edges) + 1)

    total = 0.0
    p = f.endpoint_exponent
    for a, b in zip(edges[:-1], edges[1:]):
        if a == 0.0 and p != 0.0 and p > -1.0:
            def regular(r):
                r = max(r, _TINY_R)
                return f(r) / r**p
            total += _quad_checked(regular, a, b, tol, epsabs, weight="alg", wvar=(p, 0.0))
        else:
            total += _quad_checked(f, a, b, tol, epsabs)
    total += _quad_checked(f, edges[-1], np.inf, tol, epsabs)
    return total


# -- oscillatory radial transform -----------------------------------------

def _wynn_epsilon(partial_sums):
    """Last two diagonal estimates of Wynn's epsilon table."""
    n = len(partial_sums)
    eps_prev = np.zeros(n + 1)
    eps_cur = np.array(partial_sums, dtype=float)
    best = []
    for col in range(1, n):
        nxt = np.empty(len(eps_cur) - 1)
        for i in range(len(nxt)):
            diff = eps_cur[i + 1] - eps_cur[i]
            if diff == 0.0:
                return eps_cur[-1], eps_cur[-1]
            nxt[i] = eps_prev[i + 1] + 1.0 / diff
        eps_prev, eps_cur = eps_cur, nxt
        if col % 2 == 0 and len(eps_cur) >= 1:
            best.append(eps_cur[-1])
    if len(best) >= 2:
        return best[-1], best[-2]
    return partial_sums[-1], partial_sums[-2]


def spherical_fourier(f: RadialFunction, k: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Three-dimensional Fourier transform of a spherically symmetric profile.

    Evaluates ``(4 pi / k) * int_0^inf r sin(k r) f(r) dr`` panel by panel
    between consecutive zeros of ``sin(k r)``. Once the panels are past the
    decay scale the partial sums are either accepted outright (exponential
    tails) or accelerated with Wynn's epsilon algorithm (algebraic tails).
    Raises ``IntegrationError`` if neither settles within
    ``tol.max_subdivisions`` panels.
    """
    k = float(k)
    if k < 0:
        raise DomainError("wavenumber must be non-negative")
    if k == 0.0:
        r2f = RadialFunction(lambda r: r * r * f(r), f.decay_scale, f.endpoint_exponent + 2.0)
        return 4.0 * math.pi * integrate_semiline(r2f, tol)

    half = math.pi / k
    panel_tol = Tolerance(tol.rel * 0.1, tol.abs * 0.1, 200)

    def integrand(r):
        return r * math.sin(k * r) * f(r)

    partial = []
    total = 0.0
    quiet = 0
    previous_estimate = None
    for n in range(tol.max_subdivisions):
        a, b = n * half, (n + 1) * half
        piece = _quad_checked(integrand, a, b, panel_tol, panel_tol.abs)
        total += piece
        partial.append(total)
        if b < f.decay_scale:
            continue
        if abs(piece) <= max(tol.abs, tol.rel * abs(total)):
            quiet += 1
            if quiet >= 2:
                return 4.0 * math.pi / k * total
        else:
            quiet = 0
        if len(partial) >= 10:
            est, _ = _wynn_epsilon(partial[-12:])
            if previous_estimate is not None and abs(est - previous_estimate) <= max(
                    tol.abs, tol.rel * abs(est)):
                return 4.0 * math.pi / k * est
            previous_estimate = est
    raise IntegrationError(
        f"spherical transform at k={k} did not converge within "
        f"{tol.max_subdivisions} half-period panels (last partial sum {total!r})")


# -- switching autocorrelation --------------------------------------------

def autocorrelation(chi, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """``W(u) = int chi(t) chi(t - u) dt`` by direct quadrature.

    ``chi`` must be callable and expose ``support() -> (t_lo, t_hi)`` outside
    of which it vanishes (or is negligible).
    """
    lo, hi = chi.support()
    a = max(lo, lo + u)
    b = min(hi, hi + u)
    if b <= a:
        return 0.0
    points = [p for p in getattr(chi, "breakpoints", lambda: [])()]
    points += [p + u for p in points]
    points = sorted({p for p in points if a < p < b})
    value, err = integrate.quad(lambda t: chi(t) * chi(t - u), a, b,
                                epsabs=tol.abs, epsrel=tol.rel,
                                limit=tol.max_subdivisions, points=points or None)[:2]
    if err > 10 * max(tol.abs, tol.rel * abs(value)):
        raise IntegrationError(f"autocorrelation at u={u} missed tolerance (err={err})")
    return value


# -- extrapolation --------------------------------------------------------

def richardson_extrapolate(steps, values, order: int = 2):
    """Extrapolate ``values(h)`` to ``h -> 0`` assuming an expansion in ``h**order``.

    All points are used (Neville's scheme on ``x = h**order``). Returns the
    estimate together with its distance from the extrapolant that drops the
    coarsest point, as an error indicator.
    """
    h = np.asarray(steps, dtype=float)
    y = np.asarray(values, dtype=float)
    if h.shape != y.shape or h.size < 2:
        raise DomainError("need at least two (step, value) pairs of equal length")
    if np.any(h <= 0):
        raise DomainError("steps must be positive")
    order_idx = np.argsort(-h)
    x = h[order_idx] ** order
    tableau = list(y[order_idx])
    previous = tableau
    while len(tableau) > 1:
        width = x.size - len(tableau) + 1
        previous = tableau
        tableau = [(x[i + width] * tableau[i] - x[i] * tableau[i + 1]) / (x[i + width] - x[i])
                   for i in range(len(tableau) - 1)]
    return float(tableau[0]), float(abs(tableau[0] - previous[-1]))
