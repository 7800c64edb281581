"""Physical constants, model parameters and unit conversions.

Everything downstream consumes one validated parameter object built here.
SI units are used internally; the command line accepts cm^-2, cm^3 s^-1 and
keV inputs and converts at the boundary (see :mod:`radiance.cli`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "PhysicalConstants",
    "ModelParams",
    "GrwParams",
    "CODATA",
    "beta_coefficient",
    "lambda_from_grw",
    "lambda_mass_scaled",
    "photon_energy_to_wavenumber",
    "wavenumber_to_photon_energy",
    "KEV_TO_JOULE",
    "PER_CM2_TO_PER_M2",
    "CM3_PER_S_TO_M3_PER_S",
]

# Unit conversion factors (exact).
KEV_TO_JOULE = 1.602176634e-16
PER_CM2_TO_PER_M2 = 1.0e4
CM3_PER_S_TO_M3_PER_S = 1.0e-6


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants in SI units (CODATA 2018 defaults).

    All fields must be strictly positive and are fixed at construction.
    Alternate values (e.g. hbar = c = 1 working units) may be supplied for
    scaled computations; the defaults are the single source of CODATA values
    in this package.
    """

    hbar: float = 1.054571817e-34          # J s
    c: float = 2.99792458e8                # m/s (exact)
    epsilon0: float = 8.8541878128e-12     # C^2 N^-1 m^-2
    electron_mass: float = 9.1093837015e-31  # kg
    elementary_charge: float = 1.602176634e-19  # C (exact)
    proton_mass: float = 1.67262192369e-27   # kg, also the nucleon reference mass

    def __post_init__(self):
        for name in ("hbar", "c", "epsilon0", "electron_mass",
                     "elementary_charge", "proton_mass"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"constant {name} must be strictly positive")


CODATA = PhysicalConstants()


def beta_coefficient(charge: float, constants: PhysicalConstants = CODATA) -> float:
    """Radiation-reaction coefficient e^2 / (6 pi epsilon0 c^3) in kg s.

    This is the coefficient multiplying the third time derivative in the
    Abraham-Lorentz force; it controls the runaway root of the
    characteristic cubic. Quadratic in the charge; zero charge is allowed.
    """
    return charge * charge / (6.0 * math.pi * constants.epsilon0 * constants.c ** 3)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of a charged particle subject to position collapse.

    ``kappa = mass * omega0**2`` and ``beta`` are always derived; they cannot
    be overridden. ``omega0 = 0`` selects the free particle.
    """

    mass: float                      # renormalized mass m (kg)
    charge: float                    # e (C)
    omega0: float = 0.0              # oscillator angular frequency (rad/s)
    lambda_qmupl: float = 0.0        # collapse strength (m^-2 s^-1)
    constants: PhysicalConstants = field(default=CODATA)
    kappa: float = field(init=False)   # force constant m*omega0^2 (N/m)
    beta: float = field(init=False)    # e^2/(6 pi eps0 c^3) (kg s)

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError("mass must be strictly positive")
        if self.omega0 < 0.0:
            raise ValueError("omega0 must be nonnegative")
        if self.lambda_qmupl < 0.0:
            raise ValueError("lambda_qmupl must be nonnegative")
        object.__setattr__(self, "kappa", self.mass * self.omega0 ** 2)
        object.__setattr__(self, "beta",
                           beta_coefficient(self.charge, self.constants))

    @property
    def omega0_bound(self) -> float:
        """Largest omega0 for which the small-omega0 root expansion holds,
        2 m / (sqrt(27) beta). Infinite for a neutral particle."""
        if self.beta == 0.0:
            return math.inf
        return 2.0 * self.mass / (math.sqrt(27.0) * self.beta)

    @property
    def approx_valid(self) -> bool:
        """True when omega0 lies below the root-expansion validity bound."""
        return self.omega0 < self.omega0_bound

    @classmethod
    def electron(cls, omega0: float = 0.0, lambda_qmupl: float = 0.0,
                 constants: PhysicalConstants = CODATA) -> "ModelParams":
        return cls(mass=constants.electron_mass,
                   charge=constants.elementary_charge,
                   omega0=omega0, lambda_qmupl=lambda_qmupl,
                   constants=constants)

    @classmethod
    def proton(cls, omega0: float = 0.0, lambda_qmupl: float = 0.0,
               constants: PhysicalConstants = CODATA) -> "ModelParams":
        return cls(mass=constants.proton_mass,
                   charge=constants.elementary_charge,
                   omega0=omega0, lambda_qmupl=lambda_qmupl,
                   constants=constants)


@dataclass(frozen=True)
class GrwParams:
    """Jump-model collapse parameters: rate lambda_grw (s^-1) and inverse
    correlation area alpha (m^-2).

    ``r_c = 1/sqrt(alpha)`` is the correlation length. When a diffusion
    strength ``gamma_csl`` (m^3 s^-1) is supplied alongside ``lambda_grw``,
    the two must satisfy ``lambda_grw = gamma_csl * (alpha/4pi)**1.5``.
    """

    lambda_grw: float
    alpha: float
    gamma_csl: float | None = None

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError("alpha must be strictly positive")
        if self.lambda_grw < 0.0:
            raise ValueError("lambda_grw must be nonnegative")
        if self.gamma_csl is not None:
            implied = self.gamma_csl * (self.alpha / (4.0 * math.pi)) ** 1.5
            scale = max(abs(self.lambda_grw), abs(implied))
            if scale > 0.0 and abs(implied - self.lambda_grw) > 1e-9 * scale:
                raise ValueError(
                    "inconsistent lambda_grw and gamma_csl: "
                    f"gamma implies lambda_grw={implied:.6e}")

    @property
    def r_c(self) -> float:
        return 1.0 / math.sqrt(self.alpha)

    @classmethod
    def from_gamma(cls, gamma_csl: float, alpha: float) -> "GrwParams":
        """Build from the diffusion strength gamma (m^3 s^-1) and alpha."""
        lam = gamma_csl * (alpha / (4.0 * math.pi)) ** 1.5
        return cls(lambda_grw=lam, alpha=alpha, gamma_csl=gamma_csl)

    def implied_gamma(self) -> float:
        """Diffusion strength reproducing lambda_grw at this alpha."""
        return self.lambda_grw * (4.0 * math.pi / self.alpha) ** 1.5


def lambda_from_grw(grw: GrwParams) -> float:
    """Position-collapse strength lambda = alpha * lambda_grw / 2 (m^-2 s^-1).

    This is the small-distance identification of the jump model with the
    quadratic-localization model. Expressed through the diffusion strength it
    reads lambda = alpha^{5/2} gamma / (16 pi^{3/2}).
    """
    if not grw.alpha > 0.0:
        raise ValueError("alpha must be strictly positive")
    return grw.alpha * grw.lambda_grw / 2.0


def lambda_mass_scaled(lambda0: float, mass: float,
                       constants: PhysicalConstants = CODATA) -> float:
    """Optional mass-proportional scaling lambda = (m/m_nucleon)^2 lambda0.

    The reference strength lambda0 must be supplied explicitly; no default
    value is asserted.
    """
    if lambda0 < 0.0:
        raise ValueError("lambda0 must be nonnegative")
    return (mass / constants.proton_mass) ** 2 * lambda0


def photon_energy_to_wavenumber(energy: float, unit: str = "J",
                                constants: PhysicalConstants = CODATA) -> float:
    """Convert a photon energy to its wavenumber k = E/(hbar c) in m^-1.

    ``unit`` must be ``"J"`` or ``"keV"``; the tag is required so callers
    never pass mixed units silently. Negative energies are rejected.
    """
    if unit == "J":
        e_joule = energy
    elif unit == "keV":
        e_joule = energy * KEV_TO_JOULE
    else:
        raise ValueError(f"unknown energy unit {unit!r}; use 'J' or 'keV'")
    if e_joule < 0.0:
        raise ValueError("photon energy must be nonnegative")
    return e_joule / (constants.hbar * constants.c)


def wavenumber_to_photon_energy(k: float, unit: str = "J",
                                constants: PhysicalConstants = CODATA) -> float:
    """Inverse of :func:`photon_energy_to_wavenumber`."""
    e_joule = k * constants.hbar * constants.c
    if unit == "J":
        return e_joule
    if unit == "keV":
        return e_joule / KEV_TO_JOULE
    raise ValueError(f"unknown energy unit {unit!r}; use 'J' or 'keV'")
