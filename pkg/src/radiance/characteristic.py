"""Characteristic cubic H(z) = kappa + z^2 (m - beta z) and its roots.

The zeros of H control every response kernel. For beta > 0 and kappa >= 0
there is always one positive real root z1 ~ m/beta (the runaway root of the
radiation-reaction equation) and a complex-conjugate pair z2, z3 with
nonpositive real part. Roots are normalized so z1 is real and Im(z2) >= 0.

All root finding happens on the dimensionless cubic u^3 - u^2 - eps = 0
obtained with z = (m/beta) u and eps = kappa beta^2 / m^3; this keeps the
arithmetic well scaled across ~40 orders of magnitude of physical input.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .params import ModelParams

__all__ = [
    "CardanIntermediates",
    "CubicRoots",
    "DegenerateCubicError",
    "NonSimpleRootError",
    "ApproximationDomainError",
    "h_of_z",
    "h_prime",
    "cardan_roots",
    "approx_roots",
    "companion_roots",
    "residue_weight",
]


class DegenerateCubicError(ValueError):
    """Raised when beta = 0 drops the cubic to a quadratic."""


class NonSimpleRootError(ValueError):
    """Raised when a residue weight is requested at a non-simple root."""


class ApproximationDomainError(ValueError):
    """Raised when the small-omega0 expansion is used outside its domain."""


@dataclass(frozen=True)
class CardanIntermediates:
    """Auxiliaries of the depressed-cubic solution of z^3 + a2 z^2 + a1 z + a0.

    For this model a0 = -kappa/beta, a1 = 0, a2 = -m/beta identically, and
    the radicand q^3 + r^2 is nonnegative (one real root, one conjugate
    pair) for every kappa >= 0.
    """

    a0: float
    a1: float
    a2: float
    q: float
    r: float
    s1: float
    s2: float


@dataclass(frozen=True)
class CubicRoots:
    """The three zeros of H, ordered: z1 real (runaway), Im(z2) >= 0, z3 = conj(z2)."""

    z1: complex
    z2: complex
    z3: complex
    method: str  # cardan_exact | small_omega0_approx | oracle
    intermediates: CardanIntermediates | None = None

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.z3], dtype=complex)


def h_of_z(params: ModelParams, z):
    """Evaluate H(z) = kappa + z^2 (m - beta z) (Horner form, complex z ok)."""
    z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    return params.kappa + z * z * (params.mass - params.beta * z)


def h_prime(params: ModelParams, z):
    """Evaluate H'(z) = 2 m z - 3 beta z^2."""
    z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    return z * (2.0 * params.mass - 3.0 * params.beta * z)


def _require_charged(params: ModelParams):
    if params.beta == 0.0:
        raise DegenerateCubicError(
            "beta = 0 (neutral particle): H is quadratic and the three-pole "
            "formulas downstream do not apply")


def _real_cbrt(x: float) -> float:
    # Sign-preserving real cube root.
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _real_u1(eps: float, u0: float) -> float:
    # Newton polish of the real root of u^3 - u^2 - eps, seeded at u0 >= 1.
    # The root is simple with f'(u1) >= 1, so convergence is immediate.
    u = u0
    for _ in range(60):
        f = (u - 1.0) * u * u - eps
        fp = u * (3.0 * u - 2.0)
        du = f / fp
        u -= du
        if abs(du) <= 1e-16 * u:
            break
    return u


def cardan_roots(params: ModelParams) -> CubicRoots:
    """Exact roots of H via the depressed-cubic radicals.

    The real root follows from the textbook cube-root construction (all
    contributions positive, no cancellation). The conjugate pair is then
    recovered from the exact root relations of the cubic with vanishing
    linear coefficient,

        z2 + z3 = -kappa / (beta z1^2),     z2 z3 = kappa / (beta z1),

    which evaluates the same roots without the catastrophic cancellation the
    raw radical differences would suffer when omega0 << m/beta.
    """
    _require_charged(params)
    m, beta, kappa = params.mass, params.beta, params.kappa

    a0 = -kappa / beta
    a1 = 0.0
    a2 = -m / beta
    q = a1 / 3.0 - a2 * a2 / 9.0
    r = (a1 * a2 - 3.0 * a0) / 6.0 - a2 ** 3 / 27.0
    disc = q ** 3 + r * r
    scale = abs(q) ** 3 + r * r
    if disc < 0.0:
        if abs(disc) <= 1e-10 * scale:
            disc = 0.0  # roundoff at the kappa -> 0 confluence
        else:
            warnings.warn(
                "negative Cardan radicand (outside the kappa >= 0 family); "
                "falling back to the eigenvalue solver", RuntimeWarning)
            fallback = companion_roots(params)
            return CubicRoots(fallback.z1, fallback.z2, fallback.z3,
                              method="oracle", intermediates=None)
    root_disc = math.sqrt(disc)
    s1 = _real_cbrt(r + root_disc)
    s2 = _real_cbrt(r - root_disc)
    inter = CardanIntermediates(a0=a0, a1=a1, a2=a2, q=q, r=r, s1=s1, s2=s2)

    # Work on the scaled cubic u^3 - u^2 - eps with u = beta z / m.
    eps = kappa * beta * beta / m ** 3
    u1 = _real_u1(eps, (s1 + s2 - a2 / 3.0) * beta / m)
    z1 = complex(m / beta * u1, 0.0)
    re2 = -eps / (2.0 * u1 * u1)
    mod2_sq = eps / u1
    im2 = math.sqrt(max(mod2_sq - re2 * re2, 0.0))
    z2 = (m / beta) * complex(re2, im2)
    return CubicRoots(z1=z1, z2=z2, z3=z2.conjugate(),
                      method="cardan_exact", intermediates=inter)


def approx_roots(params: ModelParams) -> CubicRoots:
    """Small-omega0 closed-form roots:

        z1 ~ m/beta,   z2,3 ~ -omega0^2 beta / (2 m) +/- i omega0.

    Only valid below the omega0 bound of the parameter set; the error of
    Re(z2) against the exact roots scales like omega0^4.
    """
    _require_charged(params)
    if not params.approx_valid:
        raise ApproximationDomainError(
            f"omega0 = {params.omega0:.6e} exceeds the expansion bound "
            f"{params.omega0_bound:.6e}")
    m, beta, w0 = params.mass, params.beta, params.omega0
    z1 = complex(m / beta, 0.0)
    z2 = complex(-w0 * w0 * beta / (2.0 * m), w0)
    return CubicRoots(z1=z1, z2=z2, z3=z2.conjugate(),
                      method="small_omega0_approx", intermediates=None)


def companion_roots(params: ModelParams) -> CubicRoots:
    """Independent eigenvalue route: roots as eigenvalues of the companion
    matrix of the scaled cubic u^3 - u^2 - eps."""
    _require_charged(params)
    m, beta, kappa = params.mass, params.beta, params.kappa
    eps = kappa * beta * beta / m ** 3
    comp = np.array([[1.0, 0.0, eps],
                     [1.0, 0.0, 0.0],
                     [0.0, 1.0, 0.0]])
    u = np.linalg.eigvals(comp)
    i_real = int(np.argmax(u.real))
    u1 = u[i_real]
    pair = np.delete(u, i_real)
    u2 = pair[int(np.argmax(pair.imag))]
    scale = m / beta
    return CubicRoots(z1=complex(scale * u1.real, 0.0),
                      z2=scale * complex(u2),
                      z3=scale * complex(u2).conjugate(),
                      method="oracle", intermediates=None)


def residue_weight(params: ModelParams, root: complex) -> complex:
    """1/H'(root), the weight of a simple pole of 1/H in a residue expansion.

    Signals :class:`NonSimpleRootError` when |H'(root)| falls below
    1e-12 * m^2/beta, the natural scale of H' at the runaway root; the
    free-particle double root at z = 0 always trips this guard.
    """
    _require_charged(params)
    hp = h_prime(params, root)
    threshold = 1e-12 * params.mass ** 2 / params.beta
    if abs(hp) <= threshold:
        raise NonSimpleRootError(
            f"|H'({root})| = {abs(hp):.3e} below the simple-root threshold "
            f"{threshold:.3e}; use the confluent (double-pole) formulas")
    return 1.0 / hp
