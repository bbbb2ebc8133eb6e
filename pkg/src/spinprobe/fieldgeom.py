"""Photon polarization frame and the angular Pauli-matrix integrals.

The angular integrals are evaluated two ways: by brute-force quadrature over
the unit sphere, and by their closed forms. The quadrature route only exists
to check the closed forms; the detector module never calls it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "PAULI",
    "IDENTITY",
    "TERMS",
    "PolarizationFrame",
    "polarization_frame",
    "sigma_interaction",
    "bloch_density",
    "angular_moment",
    "angular_pauli_integral",
    "angular_pauli_closed",
    "combined_R_matrix",
    "combined_R_quadrature",
    "heaviside",
]

IDENTITY = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
TERMS = ("U2rho", "rhoU2", "U1rhoU1")

_POLE_EPS = 1e-12


@dataclass(frozen=True)
class PolarizationFrame:
    khat: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    eps1: np.ndarray
    eps2: np.ndarray

    def eps(self, s: int) -> np.ndarray:
        if s == 1:
            return self.eps1
        if s == 2:
            return self.eps2
        raise DomainError(f"polarization index must be 1 or 2, got {s}")


def polarization_frame(theta: float, phi: float) -> PolarizationFrame:
    """Transverse frame for propagation direction ``(theta, phi)``.

    ``E1`` is the polar unit vector, ``E2`` the azimuthal one; the magnetic
    polarizations are ``khat x E1 = E2`` and ``khat x E2 = -E1``.
    """
    if not (_POLE_EPS < theta < math.pi - _POLE_EPS):
        raise DomainError(f"theta = {theta} is at or beyond a pole; the frame is singular there")
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    khat = np.array([st * cp, st * sp, ct])
    E1 = np.array([ct * cp, ct * sp, -st])
    E2 = np.array([-sp, cp, 0.0])
    return PolarizationFrame(khat=khat, E1=E1, E2=E2,
                             eps1=np.cross(khat, E1), eps2=np.cross(khat, E2))


def heaviside(x: float) -> float:
    """Step function with the symmetric value 1/2 at the origin."""
    if x > 0:
        return 1.0
    if x < 0:
        return 0.0
    return 0.5


def sigma_interaction(i: int, Omega: float, t: float) -> np.ndarray:
    """Pauli matrix ``i`` (0, 1, 2 for x, y, z) in the interaction picture of ``H0 = Omega sigma_z / 2``."""
    if i == 2:
        return PAULI[2]
    c, s = math.cos(Omega * t), math.sin(Omega * t)
    if i == 0:
        return c * PAULI[0] - s * PAULI[1]
    return s * PAULI[0] + c * PAULI[1]


def bloch_density(a) -> np.ndarray:
    """``(1 + a . sigma) / 2`` for a Bloch vector with ``|a| <= 1``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise DomainError("Bloch vector must have three components")
    if float(np.dot(a, a)) > 1.0 + 1e-12:
        raise DomainError(f"Bloch vector norm {np.linalg.norm(a)} exceeds 1")
    return 0.5 * (IDENTITY + a[0] * PAULI[0] + a[1] * PAULI[1] + a[2] * PAULI[2])


@lru_cache(maxsize=None)
def _sphere_rule(n_theta: int, n_phi: int):
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.5 * math.pi * (x + 1.0)
    w_theta = 0.5 * math.pi * w
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    return theta, w_theta, phi, 2.0 * math.pi / n_phi


@lru_cache(maxsize=None)
def _angular_moment(s: int, n_theta: int, n_phi: int) -> np.ndarray:
    theta, w_theta, phi, w_phi = _sphere_rule(n_theta, n_phi)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    st, ct, sp, cp = np.sin(th), np.cos(th), np.sin(ph), np.cos(ph)
    khat = np.stack([st * cp, st * sp, ct], axis=-1)
    E1 = np.stack([ct * cp, ct * sp, -st], axis=-1)
    E2 = np.stack([-sp, cp, np.zeros_like(ph)], axis=-1)
    e = np.cross(khat, E1 if s == 1 else E2)
    weight = (w_theta * np.sin(theta))[:, None] * w_phi
    out = np.einsum("ab,abi,abj->ij", weight, e, e)
    out.setflags(write=False)
    return out


def angular_moment(s: int, n_theta: int = 64, n_phi: int = 64) -> np.ndarray:
    """``int dtheta dphi sin(theta) eps_s^i eps_s^j`` by tensor quadrature."""
    if s not in (1, 2):
        raise DomainError(f"polarization index must be 1 or 2, got {s}")
    return _angular_moment(s, n_theta, n_phi)


def _term_operators(term: str, Omega: float, t: float, tprime: float, rho: np.ndarray):
    sig_t = [sigma_interaction(i, Omega, t) for i in range(3)]
    sig_tp = [sigma_interaction(i, Omega, tprime) for i in range(3)]
    if term == "U2rho":
        step = heaviside(t - tprime)
        return [[sig_t[i] @ sig_tp[j] @ rho * step for j in range(3)] for i in range(3)]
    if term == "rhoU2":
        step = heaviside(tprime - t)
        return [[rho @ sig_t[i] @ sig_tp[j] * step for j in range(3)] for i in range(3)]
    if term == "U1rhoU1":
        return [[sig_tp[i] @ rho @ sig_t[j] for j in range(3)] for i in range(3)]
    raise DomainError(f"unknown term {term!r}; expected one of {TERMS}")


def angular_pauli_integral(term: str, s: int, Omega: float, t: float, tprime: float, a,
                           n_theta: int = 64, n_phi: int = 64) -> np.ndarray:
    """Angular integral of ``eps_s^i eps_s^j X_ij`` by quadrature over the sphere.

    ``X_ij`` is ``sigma_i(t) sigma_j(t') rho Theta(t - t')`` for ``U2rho``,
    ``rho sigma_i(t) sigma_j(t') Theta(t' - t)`` for ``rhoU2`` and
    ``sigma_i(t') rho sigma_j(t)`` for ``U1rhoU1``.
    """
    if s not in (1, 2):
        raise DomainError(f"polarization index must be 1 or 2, got {s}")
    rho = bloch_density(a)
    moment = angular_moment(s, n_theta, n_phi)
    ops = _term_operators(term, Omega, t, tprime, rho)
    out = np.zeros((2, 2), dtype=complex)
    for i in range(3):
        for j in range(3):
            out += moment[i, j] * ops[i][j]
    return out


def angular_pauli_closed(term: str, s: int, Omega: float, t: float, tprime: float, a) -> np.ndarray:
    """Closed form of :func:`angular_pauli_integral`."""
    if s not in (1, 2):
        raise DomainError(f"polarization index must be 1 or 2, got {s}")
    ax, ay, az = (float(v) for v in np.asarray(a, dtype=float))
    bloch_density(a)
    tau = t - tprime
    e = complex(math.cos(Omega * tau), math.sin(Omega * tau))
    eb = e.conjugate()
    minus = complex(ax, -ay)
    plus = complex(ax, ay)
    if term == "U2rho":
        step = heaviside(tau)
        if s == 1:
            m = [[(1 + az) * e, minus * e], [plus * eb, (1 - az) * eb]]
            return 2 * math.pi * step * np.array(m)
        m = [[(1 + az) * (2 + e), minus * (2 + e)], [plus * (2 + eb), (1 - az) * (2 + eb)]]
        return 2 * math.pi / 3 * step * np.array(m)
    if term == "rhoU2":
        step = heaviside(-tau)
        if s == 1:
            m = [[(1 + az) * e, minus * eb], [plus * e, (1 - az) * eb]]
            return 2 * math.pi * step * np.array(m)
        m = [[(1 + az) * (2 + e), minus * (2 + eb)], [plus * (2 + e), (1 - az) * (2 + eb)]]
        return 2 * math.pi / 3 * step * np.array(m)
    if term == "U1rhoU1":
        if s == 1:
            return 2 * math.pi * np.array([[(1 - az) * eb, 0], [0, (1 + az) * e]])
        m = [[2 * (1 + az) + (1 - az) * eb, -2 * minus], [-2 * plus, 2 * (1 - az) + (1 + az) * e]]
        return 2 * math.pi / 3 * np.array(m)
    raise DomainError(f"unknown term {term!r}; expected one of {TERMS}")


def combined_R_matrix(Omega: float, t: float, tprime: float, a) -> np.ndarray:
    """Polarization-summed ``U1 rho U1 - U2 rho - rho U2`` angular matrix.

    Depends on the times only through ``tau = t - t'``; traceless.
    """
    ax, ay, az = (float(v) for v in np.asarray(a, dtype=float))
    bloch_density(a)
    tau = t - tprime
    e = complex(math.cos(Omega * tau), math.sin(Omega * tau))
    eb = e.conjugate()
    e_abs = complex(math.cos(Omega * abs(tau)), math.sin(Omega * abs(tau)))
    diag = az * (e + eb) + e - eb
    m = [[-diag, -complex(ax, -ay) * (1 + e_abs)],
         [-complex(ax, ay) * (1 + e_abs.conjugate()), diag]]
    return 8 * math.pi / 3 * np.array(m)


def combined_R_quadrature(Omega: float, t: float, tprime: float, a,
                          n_theta: int = 64, n_phi: int = 64) -> np.ndarray:
    """:func:`combined_R_matrix` assembled from the quadrature angular integrals."""
    out = np.zeros((2, 2), dtype=complex)
    for s in (1, 2):
        out += angular_pauli_integral("U1rhoU1", s, Omega, t, tprime, a, n_theta, n_phi)
        out -= angular_pauli_integral("U2rho", s, Omega, t, tprime, a, n_theta, n_phi)
        out -= angular_pauli_integral("rhoU2", s, Omega, t, tprime, a, n_theta, n_phi)
    return out
