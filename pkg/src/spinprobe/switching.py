"""Switching functions: time profiles of the detector coupling.

Each variant provides its Fourier transform ``chi~(w) = int dt chi(t) e^{iwt}``,
the power ``|chi~(w)|^2``, the cross product ``conj(chi~(k - W)) chi~(k + W)``
and the autocorrelation ``int dt chi(t) chi(t - u)``, using closed forms
where they exist.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import special

from .errors import DomainError
from .numerics import DEFAULT_TOL, Tolerance, autocorrelation

__all__ = [
    "SwitchingFunction",
    "GaussianSwitching",
    "WindowSwitching",
    "SampledSwitching",
    "parse_switching",
]

# exp(-pi x^2 / 2) < 1e-50 beyond |x| = 8.6
_GAUSS_SUPPORT = 8.6
# k-window half-width (times 1/T) outside which exp(-T^2 dk^2 / pi) < e^-60
_GAUSS_KWIDTH = math.sqrt(60.0 * math.pi)


class SwitchingFunction:
    """Common interface; subclasses supply the transforms."""

    shift: float = 0.0

    def __call__(self, t):
        raise NotImplementedError

    def support(self) -> Tuple[float, float]:
        raise NotImplementedError

    def breakpoints(self):
        return []

    def shifted(self, t0: float) -> "SwitchingFunction":
        raise NotImplementedError

    def chi_fourier(self, omega: float) -> complex:
        raise NotImplementedError

    def power(self, omega: float) -> float:
        z = self.chi_fourier(omega)
        return z.real * z.real + z.imag * z.imag

    def cross(self, k: float, Omega: float) -> complex:
        """``conj(chi~(k - Omega)) * chi~(k + Omega)``; equals ``power(k)`` at Omega = 0."""
        if Omega == 0:
            return complex(self.power(k), 0.0)
        return self.chi_fourier(k - Omega).conjugate() * self.chi_fourier(k + Omega)

    def autocorrelation(self, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
        return autocorrelation(self, u, tol)

    def duration(self) -> float:
        lo, hi = self.support()
        return hi - lo

    def k_breakpoints(self, Omega: float):
        """Interior points that split the wavenumber integrals of the response functionals."""
        w = abs(Omega)
        return sorted({p for p in (w, w + 50.0) if p > 0})

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianSwitching(SwitchingFunction):
    """``chi(t) = exp(-pi (t - shift)^2 / (2 T^2))``."""

    T: float
    shift: float = 0.0

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise DomainError(f"Gaussian width T must be positive and finite, got {self.T}")

    def __call__(self, t):
        x = (np.asarray(t, dtype=float) - self.shift) / self.T
        out = np.exp(-0.5 * math.pi * x * x)
        return float(out) if out.ndim == 0 else out

    def support(self):
        half = _GAUSS_SUPPORT * self.T
        return (self.shift - half, self.shift + half)

    def breakpoints(self):
        return [self.shift]

    def shifted(self, t0: float) -> "GaussianSwitching":
        return GaussianSwitching(self.T, self.shift + t0)

    def chi_fourier(self, omega: float) -> complex:
        T = self.T
        mag = math.sqrt(2.0) * T * math.exp(-T * T * omega * omega / (2.0 * math.pi))
        if self.shift == 0:
            return complex(mag, 0.0)
        return mag * cmath.exp(1j * omega * self.shift)

    def power(self, omega: float) -> float:
        T = self.T
        return 2.0 * T * T * math.exp(-T * T * (omega * omega) / math.pi)

    def cross(self, k: float, Omega: float) -> complex:
        T = self.T
        mag = 2.0 * T * T * math.exp(-T * T * (k * k + Omega * Omega) / math.pi)
        if self.shift == 0 or Omega == 0:
            return complex(mag, 0.0)
        return mag * cmath.exp(2j * Omega * self.shift)

    def autocorrelation(self, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
        return self.T * math.exp(-math.pi * u * u / (4.0 * self.T * self.T))

    def q_kernel(self, k: float, Omega: float) -> complex:
        """``int du W(u) exp(i Omega |u| - i k u)`` in closed form.

        Each half-line gives a Gaussian plus a Dawson function term; the
        Dawson pieces cancel at Omega = 0.
        """
        if Omega == 0:
            return complex(self.power(k), 0.0)
        T = self.T
        # W(u) = T exp(-c u^2) with c = pi / (4 T^2); 1/(2 sqrt(c)) = T / sqrt(pi)
        scale = T / math.sqrt(math.pi)
        total = 0j
        for w in (Omega - k, Omega + k):
            x = w * scale
            total += complex(T * math.exp(-x * x), 2.0 * scale * float(special.dawsn(x)))
        return T * total

    def k_breakpoints(self, Omega: float):
        w = _GAUSS_KWIDTH / self.T
        c = abs(Omega)
        return sorted({p for p in (c - w, c, c + w) if p > 0})

    def describe(self) -> str:
        return f"gaussian:T={self.T!r}" + (f",shift={self.shift!r}" if self.shift else "")


@dataclass(frozen=True)
class WindowSwitching(SwitchingFunction):
    """Sharp switching: one on ``[t_start, t_end]``, zero elsewhere."""

    t_start: float
    t_end: float

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise DomainError(f"window needs t_end > t_start, got [{self.t_start}, {self.t_end}]")

    @property
    def shift(self) -> float:
        return self.t_start

    @property
    def width(self) -> float:
        return self.t_end - self.t_start

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = ((t >= self.t_start) & (t <= self.t_end)).astype(float)
        return float(out) if out.ndim == 0 else out

    def support(self):
        return (self.t_start, self.t_end)

    def breakpoints(self):
        return [self.t_start, self.t_end]

    def shifted(self, t0: float) -> "WindowSwitching":
        return WindowSwitching(self.t_start + t0, self.t_end + t0)

    def chi_fourier(self, omega: float) -> complex:
        T = self.width
        half = 0.5 * omega * T
        # int_a^b e^{iwt} dt = T sinc(wT/2) e^{iw(a+b)/2}
        mag = T if half == 0 else T * math.sin(half) / half
        return mag * cmath.exp(0.5j * omega * (self.t_start + self.t_end))

    def power(self, omega: float) -> float:
        T = self.width
        half = 0.5 * omega * T
        if half == 0:
            return T * T
        s = math.sin(half) / half
        return T * T * s * s

    def autocorrelation(self, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
        return max(self.width - abs(u), 0.0)

    def q_kernel(self, k: float, Omega: float) -> complex:
        if Omega == 0:
            return complex(self.power(k), 0.0)
        T = self.width
        coef = _self_overlap_coefficients(T, 1.0, 0.0)[None, :]
        one = np.ones(1)
        return _piecewise_q_kernel(np.zeros(1), T * one, one, 0.0 * one, coef, k, Omega)

    def describe(self) -> str:
        return f"window:{self.t_start!r},{self.t_end!r}"


_SERIES_TERMS = 30


def _power_moments(h, omega: float, nmax: int) -> np.ndarray:
    """``int_0^h x^n e^{i omega x} dx`` for ``n = 0..nmax``; ``h`` may be an array.

    Returns shape ``(nmax + 1,) + h.shape``. A power series covers
    ``|omega h| < 1``, where the upward recurrence would cancel.
    """
    h = np.asarray(h, dtype=float)
    z = 1j * omega * h
    small = np.abs(z) < 1.0
    out = np.empty((nmax + 1,) + h.shape, dtype=complex)
    # series: h^{n+1} sum_j z^j / (j! (n + j + 1))
    zs = np.where(small, z, 0.0)
    term = np.ones_like(zs)
    series = np.zeros((nmax + 1,) + h.shape, dtype=complex)
    for j in range(_SERIES_TERMS):
        if j:
            term = term * zs / j
        for n in range(nmax + 1):
            series[n] += term / (n + j + 1)
    if np.all(small):
        for n in range(nmax + 1):
            out[n] = h ** (n + 1) * series[n]
        return out
    iw = 1j * omega
    ez = np.exp(z)
    prev = (ez - 1.0) / iw
    rec = [prev]
    for n in range(1, nmax + 1):
        prev = (h**n * ez - n * prev) / iw
        rec.append(prev)
    for n in range(nmax + 1):
        out[n] = np.where(small, h ** (n + 1) * series[n], rec[n])
    return out


def _segment_moments(h: float, omega: float):
    """``int_0^h e^{iwx} dx`` and ``int_0^h x e^{iwx} dx``."""
    m = _power_moments(h, omega, 1)
    return complex(m[0]), complex(m[1])


def _self_overlap_coefficients(h: float, v0: float, slope: float) -> np.ndarray:
    """Cubic coefficients in ``u`` of ``int_0^{h-u} c(x) c(x+u) dx`` for ``c(x) = v0 + slope x``."""
    P = np.polynomial.Polynomial
    u = P([0.0, 1.0])
    rest = P([h, -1.0])
    poly = (v0 * (v0 + slope * u) * rest
            + (2.0 * v0 + slope * u) * slope * rest**2 / 2.0
            + slope * slope * rest**3 / 3.0)
    return np.pad(poly.coef, (0, 4 - poly.coef.size))


def _half_line_transform(starts, widths, v0, slopes, coef, w: float) -> complex:
    """``int_0^inf W(u) e^{iwu} du`` for a piecewise-linear profile.

    ``W(u) e^{iwu}`` integrated over ``u >= 0`` equals the double integral of
    ``c(t) c(t') e^{iw(t' - t)}`` over ``t' >= t``. Distinct segment pairs
    factorise into single-segment transforms; each segment paired with
    itself reduces to moments of a cubic.
    """
    m = _power_moments(widths, w, 3)
    fwd = np.exp(1j * w * starts) * (v0 * m[0] + slopes * m[1])
    back = np.conj(fwd)  # the w -> -w transform of a real profile
    earlier = np.concatenate([[0.0], np.cumsum(back)[:-1]])
    cross = np.sum(fwd * earlier)
    diag = np.sum(coef.T * m)
    return complex(cross + diag)


def _piecewise_q_kernel(starts, widths, v0, slopes, coef, k: float, Omega: float) -> complex:
    # 2 cos(ku) e^{i Omega u} splits into two single-frequency half-line transforms
    return (_half_line_transform(starts, widths, v0, slopes, coef, Omega + k)
            + _half_line_transform(starts, widths, v0, slopes, coef, Omega - k))


@dataclass(frozen=True, eq=False)
class SampledSwitching(SwitchingFunction):
    """Piecewise-linear interpolant of samples, zero outside the grid."""

    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    shift: float = 0.0

    def __post_init__(self):
        g = np.array(self.grid, dtype=float)
        v = np.array(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise DomainError("sampled switching needs matching 1-D grid and values of length >= 2")
        if np.any(np.diff(g) <= 0):
            raise DomainError("sample grid must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("sample values must be finite")
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        h = np.diff(g)
        slopes = np.diff(v) / h
        coef = np.array([_self_overlap_coefficients(hi, vi, si) for hi, vi, si in zip(h, v[:-1], slopes)])
        object.__setattr__(self, "_segments", (g[:-1], h, v[:-1], slopes, coef))

    def __call__(self, t):
        t = np.asarray(t, dtype=float) - self.shift
        out = np.interp(t, self.grid, self.values, left=0.0, right=0.0)
        return float(out) if out.ndim == 0 else out

    def support(self):
        return (self.grid[0] + self.shift, self.grid[-1] + self.shift)

    def breakpoints(self):
        return list(self.grid + self.shift)

    def shifted(self, t0: float) -> "SampledSwitching":
        return SampledSwitching(self.grid, self.values, self.shift + t0)

    def chi_fourier(self, omega: float) -> complex:
        total = 0j
        g, v = self.grid, self.values
        for i in range(g.size - 1):
            h = g[i + 1] - g[i]
            e0, e1 = _segment_moments(h, omega)
            slope = (v[i + 1] - v[i]) / h
            total += cmath.exp(1j * omega * g[i]) * (v[i] * e0 + slope * e1)
        if self.shift:
            total *= cmath.exp(1j * omega * self.shift)
        return total

    def autocorrelation(self, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
        # chi(t) chi(t + u) is quadratic between the merged knots, so Simpson is exact
        u = abs(float(u))
        g, v = self.grid, self.values
        lo, hi = g[0], g[-1] - u
        if hi <= lo:
            return 0.0
        knots = np.concatenate([g, g - u])
        knots = np.unique(knots[(knots >= lo) & (knots <= hi)])
        knots = np.union1d(knots, [lo, hi])
        a, b = knots[:-1], knots[1:]
        m = 0.5 * (a + b)

        def prod(x):
            return np.interp(x, g, v) * np.interp(x + u, g, v)

        return float(np.sum((b - a) / 6.0 * (prod(a) + 4.0 * prod(m) + prod(b))))

    def q_kernel(self, k: float, Omega: float) -> complex:
        if Omega == 0:
            return complex(self.power(k), 0.0)
        return _piecewise_q_kernel(*self._segments, k, Omega)

    def describe(self) -> str:
        return f"sampled:n={self.grid.size},shift={self.shift!r}"


def parse_switching(text: str) -> SwitchingFunction:
    """Parse ``gaussian:T=<v>`` or ``window:<a>,<b>``."""
    kind, _, rest = text.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "gaussian":
            params = dict(item.split("=", 1) for item in rest.split(",") if item)
            unknown = set(params) - {"T", "shift"}
            if unknown or "T" not in params:
                raise ValueError
            return GaussianSwitching(float(params["T"]), float(params.get("shift", 0.0)))
        if kind == "window":
            a, b = rest.split(",")
            return WindowSwitching(float(a), float(b))
    except ValueError:
        pass
    raise DomainError(f"cannot parse switching {text!r}; expected gaussian:T=<v> or window:<a>,<b>")
