"""Response kernels of the collapse-driven charged particle.

The Heisenberg solutions are controlled by inverse Laplace transforms

    F_n(t)        of  1 / (z^n H(z)),                 n = 0, 1, 2
    G+-_n(k, t)   of  z^n / ((z +- i w_k) H(z)),      n = 0, 1
    G+-_+-(k,k',t) of z^2 / ((z +- i w_k)(z +- i w_k') H(z)),

with w_k = c k and H(z) = kappa + z^2 (m - beta z). Every kernel is a sum
of simple-pole residues (plus double-pole terms at confluences), evaluated
here in closed form. Each term is coef * t^power * exp(rate * t); kernels
are returned either as numeric values or as these term lists so callers can
integrate products analytically.

The runaway pole z1 > 0 is excluded by default and kept behind a policy
switch so the full-pole identities remain testable. The free particle
(kappa = 0) is a separate code path: its z = 0 pole is not simple and the
kappa -> 0 limit of the bound formulas is singular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .characteristic import cardan_roots, h_of_z, h_prime
from .params import ModelParams

__all__ = [
    "PolePolicy",
    "DEFAULT_POLICY",
    "FULL_POLICY",
    "ExpTerm",
    "ResponseEval",
    "ResonanceDegeneracyError",
    "f_n",
    "f_0_free",
    "g_pm_n",
    "g_pm_n_free",
    "g_pm_pm",
    "g_pm_pm_free",
    "f_terms",
    "f_0_free_terms",
    "g_pm_n_terms",
    "g_pm_pm_terms",
    "evaluate_terms",
    "evaluate",
    "RESPONSE_KINDS",
]


class ResonanceDegeneracyError(ArithmeticError):
    """A field pole collided with a mechanical pole (cannot happen for
    beta > 0, checked defensively)."""


@dataclass(frozen=True)
class PolePolicy:
    """Which poles of the Bromwich integrand contribute.

    The default drops the runaway root (the standard pragmatic exclusion of
    the radiation-reaction instability) and keeps the photon-line pole at
    z = -+ i w_k.
    """

    include_runaway: bool = False
    include_field_pole: bool = True


DEFAULT_POLICY = PolePolicy()
FULL_POLICY = PolePolicy(include_runaway=True, include_field_pole=True)


@dataclass(frozen=True)
class ExpTerm:
    """One additive kernel contribution coef * t**power * exp(rate * t).

    ``field_count`` records how many photon-line poles produced the term
    (0 for mechanical/origin poles); products of kernels use it to identify
    purely oscillatory cross terms for time averaging.
    """

    coef: complex
    rate: complex
    power: int = 0
    field_count: int = 0


@dataclass(frozen=True)
class ResponseEval:
    """A single kernel evaluation, tagged for serialization."""

    kind: str
    t: float
    value: complex
    policy: PolePolicy
    k: float | None = None
    k_prime: float | None = None


RESPONSE_KINDS = ("F0", "F1", "F2", "G_plus_0", "G_plus_1",
                  "G_minus_0", "G_minus_1", "Gpm")

_SIGNS = {"+": 1.0, "-": -1.0}


def _sign_value(sign) -> float:
    if sign in (1, 1.0, "+"):
        return 1.0
    if sign in (-1, -1.0, "-"):
        return -1.0
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def _mechanical_roots(params: ModelParams, policy: PolePolicy) -> list[complex]:
    roots = cardan_roots(params)
    mech = [roots.z2, roots.z3]
    if policy.include_runaway:
        mech.insert(0, roots.z1)
    return mech


def _omega(params: ModelParams, k: float) -> float:
    if k <= 0.0:
        raise ValueError("wavenumber k must be strictly positive")
    return params.constants.c * k


def _check_resonance(z: complex, pole: complex):
    if abs(z - pole) <= 1e-12 * (abs(z) + abs(pole)):
        raise ResonanceDegeneracyError(
            f"mechanical root {z} degenerate with field pole {pole}")


def evaluate_terms(terms: list[ExpTerm], t):
    """Sum coef * t^power * exp(rate t) over terms; t may be an array."""
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros(t_arr.shape, dtype=complex)
    for term in terms:
        contrib = term.coef * np.exp(term.rate * t_arr)
        if term.power:
            contrib = contrib * t_arr ** term.power
        out += contrib
    return out if t_arr.ndim else complex(out)


def _terms_scale(terms: list[ExpTerm], t) -> np.ndarray:
    t_arr = np.asarray(t, dtype=float)
    scale = np.zeros(t_arr.shape, dtype=float)
    for term in terms:
        contrib = abs(term.coef) * np.exp(term.rate.real * t_arr)
        if term.power:
            contrib = contrib * np.abs(t_arr) ** term.power
        scale += contrib
    return scale


def _real_part(terms: list[ExpTerm], t, what: str):
    value = evaluate_terms(terms, t)
    scale = _terms_scale(terms, t)
    imag = np.abs(np.imag(value))
    bad = imag > 1e-9 * scale + 1e-300
    if np.any(bad):
        raise ArithmeticError(
            f"{what}: imaginary residue {np.max(imag):.3e} exceeds the "
            "conjugate-symmetry tolerance")
    real = np.real(value)
    return real if np.ndim(t) else float(real)


# ---------------------------------------------------------------------------
# bound particle (kappa > 0)

def _require_bound(params: ModelParams):
    if params.kappa <= 0.0:
        raise ValueError("bound-particle kernel requires kappa > 0; "
                         "use the *_free variants for kappa = 0")


def _require_free(params: ModelParams):
    if params.kappa != 0.0:
        raise ValueError("free-particle kernel requires kappa = 0")


def f_terms(params: ModelParams, n: int,
            policy: PolePolicy = DEFAULT_POLICY) -> list[ExpTerm]:
    """Residue expansion of F_n for the bound particle.

    Mechanical poles contribute z^-n e^{zt}/H'(z); the origin pole of
    1/(z^n H) adds 1/kappa for n = 1 and t/kappa for n = 2 (H'(0) = 0, so
    the n = 2 double pole has no constant part).
    """
    _require_bound(params)
    if n not in (0, 1, 2):
        raise ValueError(f"n must be 0, 1 or 2, got {n}")
    terms = [ExpTerm(z ** (-n) / h_prime(params, z), z)
             for z in _mechanical_roots(params, policy)]
    if n == 1:
        terms.append(ExpTerm(1.0 / params.kappa, 0.0))
    elif n == 2:
        terms.append(ExpTerm(1.0 / params.kappa, 0.0, power=1))
    return terms


def f_n(params: ModelParams, n: int, t,
        policy: PolePolicy = DEFAULT_POLICY) -> float:
    """F_n(t); real by conjugate symmetry of the root set."""
    return _real_part(f_terms(params, n, policy), t, f"F{n}")


def g_pm_n_terms(params: ModelParams, sign, n: int, k: float,
                 policy: PolePolicy = DEFAULT_POLICY) -> list[ExpTerm]:
    """Residue expansion of G+-_n(k, .): dispatches on kappa.

    The field pole of 1/(z + s i w) sits at z = -s i w and contributes
    (-s i w)^n e^{-s i w t} / H(-s i w).
    """
    if params.kappa == 0.0:
        return g_pm_n_free_terms(params, sign, n, k, policy)
    s = _sign_value(sign)
    if n not in (0, 1):
        raise ValueError(f"n must be 0 or 1, got {n}")
    w = _omega(params, k)
    pole = -s * 1j * w
    terms = []
    for z in _mechanical_roots(params, policy):
        _check_resonance(z, pole)
        terms.append(ExpTerm(z ** n / ((z + s * 1j * w) * h_prime(params, z)), z))
    if policy.include_field_pole:
        terms.append(ExpTerm(pole ** n / h_of_z(params, pole), pole,
                             field_count=1))
    return terms


def g_pm_n(params: ModelParams, sign, n: int, k: float, t,
           policy: PolePolicy = DEFAULT_POLICY) -> complex:
    """G+-_n(k, t) for the bound (kappa > 0) or free (kappa = 0) particle."""
    return evaluate_terms(g_pm_n_terms(params, sign, n, k, policy), t)


def g_pm_pm_terms(params: ModelParams, signs: tuple, k: float, k_prime: float,
                  policy: PolePolicy = DEFAULT_POLICY) -> list[ExpTerm]:
    """Residue expansion of the two-photon kernel G+-_+-(k, k', .).

    When the two field poles coincide (same sign and w_k = w_k') the simple
    residues are replaced by the confluent double-pole derivative formula.
    """
    if params.kappa == 0.0:
        return g_pm_pm_free_terms(params, signs, k, k_prime, policy)
    s1 = _sign_value(signs[0])
    s2 = _sign_value(signs[1])
    w1 = _omega(params, k)
    w2 = _omega(params, k_prime)
    p1 = -s1 * 1j * w1
    p2 = -s2 * 1j * w2
    terms = []
    for z in _mechanical_roots(params, policy):
        _check_resonance(z, p1)
        _check_resonance(z, p2)
        coef = z * z / ((z + s1 * 1j * w1) * (z + s2 * 1j * w2)
                        * h_prime(params, z))
        terms.append(ExpTerm(coef, z))
    if not policy.include_field_pole:
        return terms
    if abs(p1 - p2) > 1e-9 * max(abs(p1), abs(p2)):
        h1 = h_of_z(params, p1)
        h2 = h_of_z(params, p2)
        terms.append(ExpTerm(p1 * p1 / ((p1 - p2) * h1), p1, field_count=1))
        terms.append(ExpTerm(p2 * p2 / ((p2 - p1) * h2), p2, field_count=1))
    else:
        # confluent limit: residue of z^2 e^{zt} / ((z - p)^2 H(z))
        p = p1
        h = h_of_z(params, p)
        hp = h_prime(params, p)
        terms.append(ExpTerm(2.0 * p / h - p * p * hp / (h * h), p,
                             field_count=2))
        terms.append(ExpTerm(p * p / h, p, power=1, field_count=2))
    return terms


def g_pm_pm(params: ModelParams, signs: tuple, k: float, k_prime: float, t,
            policy: PolePolicy = DEFAULT_POLICY) -> complex:
    """G+-_+-(k, k', t); signs is a pair from {'+', '-'} (first pole, second pole)."""
    return evaluate_terms(g_pm_pm_terms(params, signs, k, k_prime, policy), t)


# ---------------------------------------------------------------------------
# free particle (kappa = 0): H(z) = z^2 (m - beta z), double pole at z = 0

def f_0_free_terms(params: ModelParams,
                   policy: PolePolicy = DEFAULT_POLICY) -> list[ExpTerm]:
    """Free-particle F_0: the origin double pole gives t/m + beta/m^2, the
    runaway pole at m/beta gives -(beta/m^2) e^{m t/beta}."""
    _require_free(params)
    m = params.mass
    beta = params.beta
    terms = [ExpTerm(1.0 / m, 0.0, power=1), ExpTerm(beta / (m * m), 0.0)]
    if policy.include_runaway:
        if beta == 0.0:
            raise ValueError("runaway pole undefined for beta = 0")
        terms.append(ExpTerm(-beta / (m * m), m / beta))
    return terms


def f_0_free(params: ModelParams, t,
             policy: PolePolicy = DEFAULT_POLICY) -> float:
    return _real_part(f_0_free_terms(params, policy), t, "F0_free")


def g_pm_n_free_terms(params: ModelParams, sign, n: int, k: float,
                      policy: PolePolicy = DEFAULT_POLICY) -> list[ExpTerm]:
    """Free-particle G+-_n: origin pole of order 2-n, runaway pole, field pole."""
    _require_free(params)
    s = _sign_value(sign)
    if n not in (0, 1):
        raise ValueError(f"n must be 0 or 1, got {n}")
    m = params.mass
    beta = params.beta
    w = _omega(params, k)
    siw = s * 1j * w
    terms = []
    if n == 1:
        terms.append(ExpTerm(1.0 / (siw * m), 0.0))
    else:
        terms.append(ExpTerm(1.0 / (siw * m), 0.0, power=1))
        terms.append(ExpTerm(1.0 / (w * w * m) + beta / (siw * m * m), 0.0))
    if policy.include_runaway:
        if beta == 0.0:
            raise ValueError("runaway pole undefined for beta = 0")
        z1 = m / beta
        terms.append(ExpTerm(-z1 ** (n - 2) / (beta * (z1 + siw)), z1))
    if policy.include_field_pole:
        pole = -siw
        h_free = pole * pole * (m - beta * pole)
        terms.append(ExpTerm(pole ** n / h_free, pole, field_count=1))
    return terms


def g_pm_n_free(params: ModelParams, sign, n: int, k: float, t,
                policy: PolePolicy = DEFAULT_POLICY) -> complex:
    return evaluate_terms(g_pm_n_free_terms(params, sign, n, k, policy), t)


def g_pm_pm_free_terms(params: ModelParams, signs: tuple, k: float,
                       k_prime: float,
                       policy: PolePolicy = DEFAULT_POLICY) -> list[ExpTerm]:
    """Free two-photon kernel: the z^2 numerator cancels the origin pole, so
    only the runaway and the two field poles contribute."""
    _require_free(params)
    s1 = _sign_value(signs[0])
    s2 = _sign_value(signs[1])
    m = params.mass
    beta = params.beta
    w1 = _omega(params, k)
    w2 = _omega(params, k_prime)
    p1 = -s1 * 1j * w1
    p2 = -s2 * 1j * w2
    terms = []
    if policy.include_runaway:
        if beta == 0.0:
            raise ValueError("runaway pole undefined for beta = 0")
        z1 = m / beta
        terms.append(ExpTerm(-1.0 / (beta * (z1 + s1 * 1j * w1)
                                     * (z1 + s2 * 1j * w2)), z1))
    if not policy.include_field_pole:
        return terms

    def h_free(z):
        return z * z * (m - beta * z)

    if abs(p1 - p2) > 1e-9 * max(abs(p1), abs(p2)):
        terms.append(ExpTerm(p1 * p1 / ((p1 - p2) * h_free(p1)), p1,
                             field_count=1))
        terms.append(ExpTerm(p2 * p2 / ((p2 - p1) * h_free(p2)), p2,
                             field_count=1))
    else:
        # z^2/H = 1/(m - beta z): double pole residue of e^{zt}/((z-p)^2 (m - beta z))
        p = p1
        terms.append(ExpTerm(beta / (m - beta * p) ** 2, p, field_count=2))
        terms.append(ExpTerm(1.0 / (m - beta * p), p, power=1, field_count=2))
    return terms


def g_pm_pm_free(params: ModelParams, signs: tuple, k: float, k_prime: float,
                 t, policy: PolePolicy = DEFAULT_POLICY) -> complex:
    return evaluate_terms(g_pm_pm_free_terms(params, signs, k, k_prime,
                                             policy), t)


# ---------------------------------------------------------------------------
# tagged evaluation (CLI / serialization entry point)

def evaluate(params: ModelParams, kind: str, t: float,
             k: float | None = None, k_prime: float | None = None,
             signs: tuple = ("+", "-"),
             policy: PolePolicy = DEFAULT_POLICY) -> ResponseEval:
    """Evaluate one kernel by its tag (F0, F1, F2, G_plus_0, ..., Gpm)."""
    if kind not in RESPONSE_KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}")
    if kind.startswith("F"):
        n = int(kind[1])
        if params.kappa == 0.0:
            if n != 0:
                raise ValueError("only F0 is defined on the free branch")
            value = complex(f_0_free(params, t, policy))
        else:
            value = complex(f_n(params, n, t, policy))
        return ResponseEval(kind=kind, t=t, value=value, policy=policy)
    if kind == "Gpm":
        if k is None or k_prime is None:
            raise ValueError("Gpm requires k and k_prime")
        value = g_pm_pm(params, signs, k, k_prime, t, policy)
        return ResponseEval(kind=kind, t=t, value=value, policy=policy,
                            k=k, k_prime=k_prime)
    _, sign_name, n_str = kind.split("_")
    sign = "+" if sign_name == "plus" else "-"
    if k is None:
        raise ValueError(f"{kind} requires k")
    value = g_pm_n(params, sign, int(n_str), k, t, policy)
    return ResponseEval(kind=kind, t=t, value=value, policy=policy, k=k)
