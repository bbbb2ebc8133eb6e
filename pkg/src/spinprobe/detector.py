"""Response functionals, leading-order qubit maps, flip probabilities and rates.

Three couplings share one machinery. Each is characterised by a radial
smearing profile ``s(r)``, a spectral exponent ``gamma`` and a coupling
constant; the wavenumber integrals all have the form

    (2 pi)^-3 int_0^inf dk k^gamma |s~(k)|^2 X(k)

with ``X`` a switching-dependent kernel.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .atom import ALPHA_CODATA, OrbitalParams, OrbitalProfile, phi_fourier_closed
from .errors import DomainError, ExtrapolationError, ModelMismatchError, PerturbativeWarning
from .numerics import DEFAULT_TOL, RadialFunction, Tolerance, _quad_checked, richardson_extrapolate
from .switching import GaussianSwitching, SampledSwitching, SwitchingFunction, WindowSwitching

__all__ = [
    "ModelKind",
    "CouplingModel",
    "QubitState",
    "ResponseSet",
    "GaussianSwitching",
    "WindowSwitching",
    "SampledSwitching",
    "SwitchingFunction",
    "default_charge",
    "chi_fourier",
    "q_kernel",
    "q_kernel_direct",
    "response_L",
    "response_M",
    "response_K",
    "response_set",
    "evolve_leading_order",
    "flip_probability",
    "adiabatic_rate_closed",
    "adiabatic_rate_numeric",
]

PERTURBATIVE_LIMIT = 0.1
_TWO_PI_CUBED = (2.0 * math.pi) ** 3


def default_charge(alpha: float = ALPHA_CODATA) -> float:
    """Electron charge magnitude with ``q^2 = 4 pi alpha``."""
    return math.sqrt(4.0 * math.pi * alpha)


class ModelKind(enum.Enum):
    SPIN_MAGNETIC = "spin"
    UDW_AMPLITUDE = "udw-amplitude"
    UDW_DERIVATIVE = "udw-derivative"


@dataclass(frozen=True)
class CouplingModel:
    """A detector coupling: kind, coupling constant and smearing profile.

    ``coupling`` is the charge ``q`` for the spin model and ``lambda`` for
    the two Unruh-DeWitt variants.
    """

    kind: ModelKind
    coupling: float
    smearing: RadialFunction

    def __post_init__(self):
        if not isinstance(self.kind, ModelKind):
            raise DomainError(f"unknown model kind {self.kind!r}")
        if not math.isfinite(self.coupling):
            raise DomainError("coupling must be finite")

    @classmethod
    def spin_magnetic(cls, profile, q: Optional[float] = None) -> "CouplingModel":
        smearing = profile.phi if isinstance(profile, OrbitalProfile) else profile
        if q is None:
            alpha = profile.params.alpha if isinstance(profile, OrbitalProfile) else ALPHA_CODATA
            q = default_charge(alpha)
        return cls(ModelKind.SPIN_MAGNETIC, float(q), smearing)

    @classmethod
    def udw_amplitude(cls, smearing, lam: float) -> "CouplingModel":
        if isinstance(smearing, OrbitalProfile):
            smearing = smearing.phi
        return cls(ModelKind.UDW_AMPLITUDE, float(lam), smearing)

    @classmethod
    def udw_derivative(cls, smearing, lam: float) -> "CouplingModel":
        if isinstance(smearing, OrbitalProfile):
            smearing = smearing.phi
        return cls(ModelKind.UDW_DERIVATIVE, float(lam), smearing)

    @property
    def is_udw(self) -> bool:
        return self.kind is not ModelKind.SPIN_MAGNETIC

    @property
    def gamma(self) -> int:
        return 1 if self.kind is ModelKind.UDW_AMPLITUDE else 3

    @property
    def prefactor(self) -> float:
        """Coefficient multiplying the functionals in the density-matrix update."""
        c = self.coupling
        if self.kind is ModelKind.SPIN_MAGNETIC:
            return 4.0 * math.pi / 3.0 * (c / (2.0 * math.pi)) ** 2
        return math.pi * c * c

    def with_coupling(self, coupling: float) -> "CouplingModel":
        return CouplingModel(self.kind, float(coupling), self.smearing)


@dataclass(frozen=True)
class QubitState:
    """Qubit state as a Bloch vector ``a`` with ``rho = (1 + a . sigma) / 2``."""

    a: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in np.asarray(self.a, dtype=float).ravel())
        if len(a) != 3 or not all(math.isfinite(v) for v in a):
            raise DomainError("Bloch vector must have three finite components")
        if a[0] * a[0] + a[1] * a[1] + a[2] * a[2] > 1.0 + 1e-12:
            raise DomainError(f"Bloch vector norm {math.sqrt(sum(v * v for v in a))} exceeds 1")
        object.__setattr__(self, "a", a)

    @classmethod
    def _unchecked(cls, a) -> "QubitState":
        # leading-order outputs outside the perturbative regime may leave the ball
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", tuple(float(v) for v in a))
        return obj

    @classmethod
    def ground(cls) -> "QubitState":
        return cls((0.0, 0.0, 1.0))

    @classmethod
    def excited(cls) -> "QubitState":
        return cls((0.0, 0.0, -1.0))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.a)

    @property
    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.a))

    def density_matrix(self) -> np.ndarray:
        ax, ay, az = self.a
        r11 = 0.5 * (1.0 + az)
        r12 = complex(0.5 * ax, -0.5 * ay)
        return np.array([[r11, r12], [r12.conjugate(), 1.0 - r11]], dtype=complex)


@dataclass(frozen=True)
class ResponseSet:
    Omega: float
    L_plus: float
    L_minus: float
    L_zero: float
    M: complex
    K: Optional[complex] = None


# -- kernels -----------------------------------------------------------------

def chi_fourier(chi: SwitchingFunction, omega: float) -> complex:
    """``int dt chi(t) e^{i omega t}``."""
    return chi.chi_fourier(omega)


def q_kernel(chi: SwitchingFunction, k: float, Omega: float,
             tol: Tolerance = DEFAULT_TOL) -> complex:
    """``int dt dt' chi(t) chi(t') e^{i Omega |t - t'|} e^{-i k (t - t')}``.

    Reduced to ``2 int_0^inf du W(u) cos(k u) e^{i Omega u}`` through the
    autocorrelation ``W``; Gaussian switching has a closed form.
    """
    if k < 0:
        raise DomainError("wavenumber must be non-negative")
    if Omega == 0:
        return complex(chi.power(k), 0.0)
    closed = getattr(chi, "q_kernel", None)
    if closed is not None:
        return closed(k, Omega)
    U = chi.duration()
    W = lambda u: chi.autocorrelation(u, tol)  # noqa: E731

    def moment(weight, w):
        # int_0^U W(u) trig(w u) du with one frequency per call
        if w == 0:
            return _quad_checked(W, 0.0, U, tol, tol.abs) if weight == "cos" else 0.0
        sign = -1.0 if (weight == "sin" and w < 0) else 1.0
        return sign * _quad_checked(W, 0.0, U, tol, tol.abs, weight=weight, wvar=abs(w))

    # 2 cos(ku) e^{i Omega u} = cos((k+O)u) + cos((k-O)u) + i [sin((k+O)u) - sin((k-O)u)]
    re = moment("cos", k + Omega) + moment("cos", k - Omega)
    im = moment("sin", k + Omega) - moment("sin", k - Omega)
    return complex(re, im)


def q_kernel_direct(chi: SwitchingFunction, k: float, Omega: float,
                    tol: Tolerance = Tolerance(rel=1e-9, abs=1e-12)) -> complex:
    """The double-time form of :func:`q_kernel`, integrated in two dimensions.

    Slow; only used to cross-check the autocorrelation route.
    """
    lo, hi = chi.support()

    def part(trig):
        def f(tp, t):
            return chi(t) * chi(tp) * math.cos(k * (t - tp)) * trig(Omega * (t - tp))
        value, _ = integrate.dblquad(f, lo, hi, lambda t: lo, lambda t: t,
                                     epsabs=tol.abs, epsrel=tol.rel)
        return 2.0 * value

    return complex(part(math.cos), part(math.sin))


# -- response functionals ----------------------------------------------------

def _spectral_weight(model: CouplingModel, k: float, tol: Tolerance) -> float:
    s = model.smearing.transform(k, tol)
    return k**model.gamma * s * s / _TWO_PI_CUBED


def _k_integral(model: CouplingModel, chi: SwitchingFunction, Omega: float, kernel,
                tol: Tolerance, complex_valued: bool):
    edges = [0.0] + list(chi.k_breakpoints(Omega)) + [np.inf]
    n = len(edges) - 1
    epsabs = tol.abs / n

    def integrate_part(extract):
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            total += _quad_checked(lambda k: _spectral_weight(model, k, tol) * extract(kernel(k)),
                                   a, b, tol, epsabs)
        return total

    if not complex_valued:
        return integrate_part(lambda v: v)
    return complex(integrate_part(lambda v: v.real), integrate_part(lambda v: v.imag))


def response_L(model: CouplingModel, chi: SwitchingFunction, Omega: float,
               tol: Tolerance = DEFAULT_TOL) -> float:
    """``(2 pi)^-3 int dk k^gamma |s~(k)|^2 |chi~(k + Omega)|^2``."""
    return _k_integral(model, chi, Omega, lambda k: chi.power(k + Omega), tol, False)


def response_M(model: CouplingModel, chi: SwitchingFunction, Omega: float,
               tol: Tolerance = DEFAULT_TOL) -> complex:
    """``(2 pi)^-3 int dk k^gamma |s~(k)|^2 Q(k, Omega)``."""
    return _k_integral(model, chi, Omega, lambda k: q_kernel(chi, k, Omega, tol), tol, True)


def response_K(model: CouplingModel, chi: SwitchingFunction, Omega: float,
               tol: Tolerance = DEFAULT_TOL) -> complex:
    """``(2 pi)^-3 int dk k^gamma |s~(k)|^2 conj(chi~(k - Omega)) chi~(k + Omega)``.

    Only the Unruh-DeWitt couplings have this term.
    """
    if not model.is_udw:
        raise ModelMismatchError("the spin-magnetic coupling has no K functional")
    return _k_integral(model, chi, Omega, lambda k: chi.cross(k, Omega), tol, True)


def response_set(model: CouplingModel, chi: SwitchingFunction, Omega: float,
                 tol: Tolerance = DEFAULT_TOL) -> ResponseSet:
    L_zero = response_L(model, chi, 0.0, tol)
    if Omega == 0:
        L_plus = L_minus = L_zero
        M = complex(L_zero, 0.0)
        K = complex(L_zero, 0.0) if model.is_udw else None
    else:
        L_plus = response_L(model, chi, Omega, tol)
        L_minus = response_L(model, chi, -Omega, tol)
        M = response_M(model, chi, Omega, tol)
        K = response_K(model, chi, Omega, tol) if model.is_udw else None
    return ResponseSet(Omega=Omega, L_plus=L_plus, L_minus=L_minus, L_zero=L_zero, M=M, K=K)


# -- state maps ----------------------------------------------------------------

def _bloch_increment(model: CouplingModel, r: ResponseSet, a) -> np.ndarray:
    ax, ay, az = a
    c = model.prefactor
    # az (L+ + L-) - L+ + L-, grouped so that az = +-1 involves no cancellation
    dz = -2.0 * c * ((az - 1.0) * r.L_plus + (az + 1.0) * r.L_minus)
    if model.is_udw:
        M, K = r.M, r.K
        dx = -2.0 * c * (ax * (M.real - K.real) + ay * (M.imag + K.imag))
        dy = -2.0 * c * (ay * (M.real + K.real) - ax * (M.imag - K.imag))
    else:
        damp = r.L_zero + r.M.real
        dx = -2.0 * c * (ax * damp + ay * r.M.imag)
        dy = -2.0 * c * (ay * damp - ax * r.M.imag)
    return np.array([dx, dy, dz])


def evolve_leading_order(model: CouplingModel, chi: SwitchingFunction, Omega: float,
                         state: QubitState, tol: Tolerance = DEFAULT_TOL,
                         responses: Optional[ResponseSet] = None):
    """Second-order state update of a qubit coupled to the field vacuum.

    Returns the updated state and the functionals it was built from. Emits
    :class:`PerturbativeWarning` when the Bloch-vector change exceeds 0.1.
    """
    if not isinstance(state, QubitState):
        state = QubitState(state)
    if responses is None:
        responses = response_set(model, chi, Omega, tol)
    elif responses.Omega != Omega or (model.is_udw and responses.K is None):
        raise DomainError("supplied responses do not match the requested gap or model")
    delta = _bloch_increment(model, responses, state.a)
    size = float(np.linalg.norm(delta))
    if size > PERTURBATIVE_LIMIT:
        warnings.warn(f"Bloch-vector change {size:.3g} exceeds {PERTURBATIVE_LIMIT}; "
                      "leading-order result is unreliable", PerturbativeWarning, stacklevel=2)
    return QubitState._unchecked(np.array(state.a) + delta), responses


def flip_probability(model: CouplingModel, chi: SwitchingFunction, Omega: float,
                     initial: str = "ground", tol: Tolerance = DEFAULT_TOL) -> float:
    """Probability that the qubit leaves its initial ``sigma_z`` eigenstate.

    ``ground`` starts from ``a_z = +1`` and involves ``L(-Omega)``;
    ``excited`` starts from ``a_z = -1`` and involves ``L(Omega)``.
    """
    if initial == "ground":
        gap = -Omega
    elif initial == "excited":
        gap = Omega
    else:
        raise DomainError(f"initial must be 'ground' or 'excited', got {initial!r}")
    return 2.0 * model.prefactor * response_L(model, chi, gap, tol)


# -- adiabatic rate ------------------------------------------------------------

def adiabatic_rate_closed(params: OrbitalParams, q: Optional[float], Omega: float,
                          single_power: bool = False) -> float:
    """Long-time flip rate from the ``a_z = -1`` state under Gaussian switching.

    In the limit the switching power collapses onto ``k = -Omega``, leaving
    ``q^2 k^3 phi~(k)^2 / (6 pi^3)``, nonzero only for ``Omega < 0``.
    ``single_power=True`` reproduces a variant of the formula carrying the
    factor ``2 beta - 1`` to the first rather than second power in the
    denominator; the two differ by about 5e-5 at Z = 1.
    """
    if q is None:
        q = default_charge(params.alpha)
    if not Omega < 0:
        return 0.0
    k = -Omega
    phi = phi_fourier_closed(params, k)
    rate = q * q * k**3 * phi * phi / (6.0 * math.pi**3)
    if single_power:
        rate *= 2.0 * params.beta - 1.0
    return rate


def adiabatic_rate_numeric(model: CouplingModel, Omega: float, T_list: Sequence[float],
                           tol: Tolerance = DEFAULT_TOL, initial: str = "excited",
                           return_sequence: bool = False):
    """``lim_{T -> inf} P_flip / T`` from Gaussian switchings of widths ``T_list``.

    The finite-T corrections are even in ``1/T``, so the sequence is
    extrapolated in ``1/T^2``. Raises :class:`ExtrapolationError` if the
    sequence is not monotone.
    """
    Ts = [float(T) for T in T_list]
    if len(Ts) < 3:
        raise DomainError("need at least three switching widths")
    if any(b <= a for a, b in zip(Ts, Ts[1:])) or Ts[0] <= 0:
        raise DomainError("switching widths must be positive and strictly increasing")
    seq = [flip_probability(model, GaussianSwitching(T), Omega, initial, tol) / T for T in Ts]
    diffs = np.diff(seq)
    scale = max(abs(v) for v in seq)
    noise = 1e-9 * scale
    if np.any(diffs > noise) and np.any(diffs < -noise):
        raise ExtrapolationError(f"P_flip/T is not monotone in T: {seq}", sequence=seq)
    estimate, _ = richardson_extrapolate([1.0 / T for T in Ts], seq, order=2)
    if return_sequence:
        return estimate, seq
    return estimate
