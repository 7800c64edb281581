"""Collapse-model electromagnetics toolkit.

Characteristic-cubic roots, Laplace-inversion response kernels, spontaneous
emission spectra and energy growth for charged particles subject to
position-collapse noise, plus a stochastic trajectory / master-equation
simulator of the collapse dynamics. See README.md for the CLI.
"""

__version__ = "0.1.0"

from .params import (CODATA, GrwParams, ModelParams, PhysicalConstants,
                     beta_coefficient, lambda_from_grw, lambda_mass_scaled,
                     photon_energy_to_wavenumber,
                     wavenumber_to_photon_energy)
from .characteristic import (CardanIntermediates, CubicRoots, approx_roots,
                             cardan_roots, companion_roots, h_of_z, h_prime,
                             residue_weight)
from .response import (DEFAULT_POLICY, FULL_POLICY, PolePolicy, ResponseEval,
                       f_0_free, f_n, g_pm_n, g_pm_n_free, g_pm_pm,
                       g_pm_pm_free)
from .radiation import (EmissionSummary, LimitWitness, SpectrumPoint,
                        csl_comparison_factor, free_emission_rate,
                        ho_emission_rate_large_time, ho_finite_time_rate,
                        mean_energy_growth, order_of_limits_witness,
                        s_col_time_integral, spectrum_sweep)
from .dynamics import (DensityMatrixGrid, EnsembleStats, NoisePath,
                       WavefunctionGrid, ensemble_run, evolve_master_grw,
                       evolve_master_qmupl, evolve_zeta, make_grid)
from .laplace import bromwich_inverse

__all__ = [name for name in dir() if not name.startswith("_")]
