"""Collapse-induced photon emission spectra and energy growth.

The noise-averaged photon number per mode grows as

    S(k, t) = [lambda hbar e^2 / (16 pi^3 eps0 w_k)] Int_0^t G-_1(k,s) G+_1(k,s) ds,

and the observable emission rate per unit wavenumber follows by summing the
two polarizations and integrating over photon directions. For isotropic
noise that angular/polarization sum is k-space measure bookkeeping only: it
multiplies dS/dt by 8 pi k^2, the unique factor for which the kernel-product
pipeline reproduces the closed-form free-particle rate

    dGamma/dk = [lambda hbar e^2 / (2 pi^2 eps0 m^2 c^3 k)]
                * (2 + (beta c k / m)^2) / (1 + (beta c k / m)^2)

exactly. The runaway pole is excluded throughout (policy-switchable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .characteristic import cardan_roots
from .params import ModelParams
from .response import (DEFAULT_POLICY, ExpTerm, PolePolicy, g_pm_n_terms)

__all__ = [
    "SpectrumPoint",
    "EmissionSummary",
    "LimitWitness",
    "GridTooShortError",
    "REGIMES",
    "s_col_time_integral",
    "free_emission_rate",
    "ho_emission_rate_large_time",
    "ho_finite_time_rate",
    "mean_energy_growth",
    "csl_comparison_factor",
    "spectrum_sweep",
    "transient_decay_time",
    "large_time_cutoff",
    "order_of_limits_witness",
]

REGIMES = ("free_exact", "free_beta0", "ho_large_time", "ho_finite_time",
           "ho_beta0")


class GridTooShortError(ValueError):
    """Wavenumber grid too sparse for the requested tail fit."""


@dataclass(frozen=True)
class SpectrumPoint:
    """Differential emission rate dGamma/dk at one wavenumber."""

    k: float            # m^-1
    rate: float         # s^-1 per m^-1
    regime: str
    t: float | None = None  # finite-time regime only


@dataclass(frozen=True)
class EmissionSummary:
    """Sweep-level observables: resonance location/height and tail power."""

    tail_exponent: float
    resonance_k: float | None = None
    resonance_peak: float | None = None
    energy_growth_rate: float | None = None  # W, free particle only
    flags: tuple = ()


def _mode_prefactor(params: ModelParams, k: float) -> float:
    # lambda hbar e^2 / (16 pi^3 eps0 w_k): per-mode, per-polarization weight
    c = params.constants
    w = c.c * k
    return (params.lambda_qmupl * c.hbar * params.charge ** 2
            / (16.0 * math.pi ** 3 * c.epsilon0 * w))


def _rate_prefactor(params: ModelParams, k: float) -> float:
    # 8 pi k^2 angular/polarization factor folded in
    return 8.0 * math.pi * k * k * _mode_prefactor(params, k)


def _product_terms(minus: list[ExpTerm], plus: list[ExpTerm],
                   time_average: bool) -> list[tuple[complex, complex]]:
    """(coefficient, rate) pairs of G-_1 * G+_1; single-photon-line cross
    terms oscillate at the photon frequency and drop under time averaging."""
    out = []
    for a in minus:
        for b in plus:
            if time_average and (a.field_count + b.field_count) == 1:
                continue
            out.append((a.coef * b.coef, a.rate + b.rate))
    return out


def _integrate_products(pairs, t, rate_scale: float):
    """Int_0^t sum coef e^{rate s} ds, with the rate ~ 0 terms linear in t."""
    total = 0.0 + 0.0j
    for coef, rate in pairs:
        if abs(rate) <= 1e-14 * rate_scale:
            total += coef * t * (1.0 + rate * t / 2.0)
        else:
            total += coef * (np.exp(rate * t) - 1.0) / rate
    return total


def s_col_time_integral(params: ModelParams, k: float, t: float,
                        policy: PolePolicy = DEFAULT_POLICY) -> float:
    """Noise-averaged photon number per mode at time t (runaway excluded by
    default). Evaluated term by term from the kernel product: a double sum
    over mechanical poles, two photon-line cross sums, and the linear term
    w_k^2 t / (H(-i w_k) H(+i w_k))."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if params.lambda_qmupl == 0.0:
        return 0.0
    minus = g_pm_n_terms(params, "-", 1, k, policy)
    plus = g_pm_n_terms(params, "+", 1, k, policy)
    w = params.constants.c * k
    rate_scale = max(abs(term.rate) for term in minus + plus) + w
    pairs = _product_terms(minus, plus, time_average=False)
    value = _integrate_products(pairs, t, rate_scale)
    scale = sum(abs(c) * (t + 1.0 / rate_scale) for c, _ in pairs)
    if abs(value.imag) > 1e-9 * scale + 1e-300:
        raise ArithmeticError("photon-number integral developed an "
                              f"imaginary part {value.imag:.3e}")
    return _mode_prefactor(params, k) * value.real


def ho_finite_time_rate(params: ModelParams, k: float, t: float,
                        policy: PolePolicy = DEFAULT_POLICY, *,
                        time_average: bool = True) -> SpectrumPoint:
    """Finite-time emission rate d(Gamma)/dk: the time derivative of the
    photon-number growth times the angular/polarization factor.

    Works for kappa > 0 and for the free particle alike; with the photon-
    frequency oscillations averaged away the kappa = 0 rate equals the
    closed free-particle form for every t.
    """
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    minus = g_pm_n_terms(params, "-", 1, k, policy)
    plus = g_pm_n_terms(params, "+", 1, k, policy)
    pairs = _product_terms(minus, plus, time_average=time_average)
    value = complex(sum(c * np.exp(r * t) for c, r in pairs))
    scale = sum(abs(c) * math.exp(r.real * t) for c, r in pairs)
    if abs(value.imag) > 1e-9 * scale + 1e-300:
        raise ArithmeticError("finite-time rate developed an imaginary part "
                              f"{value.imag:.3e}")
    return SpectrumPoint(k=k, rate=_rate_prefactor(params, k) * value.real,
                         regime="ho_finite_time", t=t)


def free_emission_rate(params: ModelParams, k: float, *,
                       drop_radiation_reaction: bool = False) -> SpectrumPoint:
    """Closed-form free-particle rate (oscillating terms averaged to zero).

    With ``drop_radiation_reaction`` the beta-dependent correction factor is
    replaced by its k -> 0 value 2, the lowest-order result.
    """
    if params.kappa != 0.0:
        raise ValueError("free_emission_rate requires kappa = 0")
    if k <= 0.0:
        raise ValueError("k must be strictly positive (1/k divergence at 0)")
    c = params.constants
    base = (params.lambda_qmupl * c.hbar * params.charge ** 2
            / (2.0 * math.pi ** 2 * c.epsilon0 * params.mass ** 2
               * c.c ** 3 * k))
    if drop_radiation_reaction:
        return SpectrumPoint(k=k, rate=2.0 * base, regime="free_beta0")
    factor = csl_comparison_factor(params, k)
    return SpectrumPoint(k=k, rate=base * factor, regime="free_exact")


def ho_emission_rate_large_time(params: ModelParams, k: float, *,
                                drop_radiation_reaction: bool = False
                                ) -> SpectrumPoint:
    """Large-time oscillator rate

        dGamma/dk = [lambda hbar c e^2 / (2 pi^2 eps0)]
                    * k^3 / (m^2 (w0^2 - c^2 k^2)^2 + beta^2 c^6 k^6),

    resonant at c k = w0. Dropping the radiation-reaction term removes the
    beta^2 saturation (1/k tail instead of 1/k^3, divergent at resonance).
    """
    if params.kappa <= 0.0:
        raise ValueError("large-time oscillator rate requires kappa > 0")
    if k <= 0.0:
        raise ValueError("k must be strictly positive")
    c = params.constants
    w0 = params.omega0
    denom = params.mass ** 2 * (w0 ** 2 - (c.c * k) ** 2) ** 2
    if not drop_radiation_reaction:
        denom += params.beta ** 2 * c.c ** 6 * k ** 6
    num = (params.lambda_qmupl * c.hbar * c.c * params.charge ** 2 * k ** 3
           / (2.0 * math.pi ** 2 * c.epsilon0))
    rate = math.inf if denom == 0.0 else num / denom
    regime = "ho_beta0" if drop_radiation_reaction else "ho_large_time"
    return SpectrumPoint(k=k, rate=rate, regime=regime)


def mean_energy_growth(params: ModelParams) -> float:
    """Free-particle mean kinetic-energy growth rate (3/2) lambda hbar^2 / m
    in W; identical whether lambda is given directly or built from the
    jump-model pair (alpha, lambda_grw)."""
    if params.kappa != 0.0:
        raise ValueError("mean_energy_growth applies to the free particle")
    hbar = params.constants.hbar
    return 1.5 * params.lambda_qmupl * hbar * hbar / params.mass


def csl_comparison_factor(params: ModelParams, k: float) -> float:
    """Exact-to-perturbative rate factor [2 + (beta c k/m)^2]/[1 + (beta c k/m)^2],
    monotone from 2 (k -> 0) to 1 (k -> inf)."""
    if k < 0.0:
        raise ValueError("k must be nonnegative")
    x2 = (params.beta * params.constants.c * k / params.mass) ** 2
    return (2.0 + x2) / (1.0 + x2)


def transient_decay_time(params: ModelParams) -> float:
    """Slowest decay time of the finite-time transients, 1/|Re z2|."""
    roots = cardan_roots(params)
    re = abs(roots.z2.real)
    return math.inf if re == 0.0 else 1.0 / re


def large_time_cutoff(params: ModelParams, factor: float = 10.0) -> float:
    """Time beyond which the large-time spectrum applies: factor/|Re z2|."""
    return factor * transient_decay_time(params)


def _evaluate_regime(params: ModelParams, k: float, regime: str,
                     t: float | None, policy: PolePolicy,
                     time_average: bool) -> SpectrumPoint:
    if regime == "free_exact":
        return free_emission_rate(params, k)
    if regime == "free_beta0":
        return free_emission_rate(params, k, drop_radiation_reaction=True)
    if regime == "ho_large_time":
        return ho_emission_rate_large_time(params, k)
    if regime == "ho_beta0":
        return ho_emission_rate_large_time(params, k,
                                           drop_radiation_reaction=True)
    if regime == "ho_finite_time":
        if t is None:
            raise ValueError("ho_finite_time requires a time t")
        return ho_finite_time_rate(params, k, t, policy,
                                   time_average=time_average)
    raise ValueError(f"unknown regime {regime!r}")


def spectrum_sweep(params: ModelParams, k_grid, regime: str,
                   t: float | None = None,
                   policy: PolePolicy = DEFAULT_POLICY, *,
                   time_average: bool = True,
                   min_points_per_decade: int = 8
                   ) -> tuple[list[SpectrumPoint], EmissionSummary]:
    """Evaluate a spectrum over a monotone wavenumber grid and summarize it:
    resonance argmax (oscillator regimes), log-log tail slope fitted over
    the top decade, and the energy growth rate for the free particle."""
    k_arr = np.asarray(k_grid, dtype=float)
    if k_arr.ndim != 1 or len(k_arr) < 2:
        raise ValueError("k_grid must be a 1-d grid with at least 2 points")
    if np.any(np.diff(k_arr) <= 0.0) or k_arr[0] <= 0.0:
        raise ValueError("k_grid must be strictly increasing and positive")
    decades = math.log10(k_arr[-1] / k_arr[0])
    if decades <= 0.0 or (len(k_arr) - 1) / decades < min_points_per_decade:
        raise GridTooShortError(
            f"grid has {(len(k_arr) - 1) / max(decades, 1e-300):.1f} points "
            f"per decade; at least {min_points_per_decade} required for the "
            "tail fit")
    points = [_evaluate_regime(params, float(k), regime, t, policy,
                               time_average) for k in k_arr]
    rates = np.array([pt.rate for pt in points])

    tail_mask = k_arr >= k_arr[-1] / 10.0
    tail_k = k_arr[tail_mask]
    tail_rate = rates[tail_mask]
    good = np.isfinite(tail_rate) & (tail_rate > 0.0)
    if good.sum() >= 2:
        slope = np.polyfit(np.log(tail_k[good]), np.log(tail_rate[good]),
                           1)[0]
    else:
        slope = math.nan  # identically zero spectrum (lambda = 0)

    resonance_k = None
    resonance_peak = None
    if regime in ("ho_large_time", "ho_beta0", "ho_finite_time") \
            and params.kappa > 0.0:
        i_max = int(np.argmax(rates))
        resonance_k = float(k_arr[i_max])
        resonance_peak = float(rates[i_max])
    energy = mean_energy_growth(params) if params.kappa == 0.0 else None
    flags = ("ultraviolet_catastrophe",) if slope >= -1.5 else ()
    summary = EmissionSummary(tail_exponent=float(slope),
                              resonance_k=resonance_k,
                              resonance_peak=resonance_peak,
                              energy_growth_rate=energy, flags=flags)
    return points, summary


@dataclass(frozen=True)
class LimitWitness:
    """Order-of-limits experiment at fixed c k / w0.

    ``finite_time_rates`` follows the w0 -> 0 sweep at fixed t (converging
    to the free rate); ``large_time_rate`` takes t -> inf first and stays a
    fixed multiple of the free rate no matter how small w0 becomes.
    """

    k: float
    t: float
    omega0_ref: float
    free_rate: float
    large_time_rate: float
    ratio_large_time_to_free: float
    omega0_sweep: tuple
    finite_time_rates: tuple


def order_of_limits_witness(params: ModelParams, *, k_over_omega0: float = 10.0,
                            decades: float = 3.0, n_sweep: int = 7,
                            t: float | None = None,
                            policy: PolePolicy = DEFAULT_POLICY) -> LimitWitness:
    """Demonstrate that the free-particle limit and the large-time limit do
    not commute: sweep w0 down ``decades`` at fixed t and photon wavenumber
    k = k_over_omega0 * w0_ref / c, and compare against the two closed forms."""
    if params.kappa <= 0.0:
        raise ValueError("order_of_limits_witness requires kappa > 0")
    c = params.constants
    k = k_over_omega0 * params.omega0 / c.c
    sweep = np.logspace(math.log10(params.omega0),
                        math.log10(params.omega0) - decades, n_sweep)
    if t is None:
        t = 0.01 / sweep[-1]
    finite = tuple(
        ho_finite_time_rate(replace(params, omega0=float(w0)), k, t, policy,
                            time_average=True).rate
        for w0 in sweep)
    free = free_emission_rate(replace(params, omega0=0.0), k).rate
    large = ho_emission_rate_large_time(params, k).rate
    return LimitWitness(k=k, t=t, omega0_ref=params.omega0, free_rate=free,
                        large_time_rate=large,
                        ratio_large_time_to_free=large / free,
                        omega0_sweep=tuple(float(w) for w in sweep),
                        finite_time_rates=finite)
