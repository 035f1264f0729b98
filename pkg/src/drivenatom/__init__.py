"""Dynamics of a two-level transition under an intense periodic drive.

Exact integration of the fundamental amplitude pair, quasi-periodic
mode decomposition with its characteristic exponent, emission line
spectra of the dipole and inversion by three cross-checking routes, and
the semiclassical (phase-integral) counterparts of all of the above.
"""

from .elliptic import ellip_E, ellip_Ecomp, ellip_F, ellip_K
from .errors import (
    ConditioningWarning,
    ConfigError,
    ConvergenceError,
    DegenerateFloquetError,
    DomainError,
    IntegralityError,
    IntegrationError,
    NumericalConsistencyWarning,
    ProjectionConditioningError,
    ValidityWarning,
)
from .floquet import (
    FloquetData,
    fit_superposition,
    floquet_data,
    floquet_modes,
    mode_sums,
    nu_from_monodromy,
    recurrence_residual,
    solve_recurrence,
)
from .ode import (
    SolutionGrid,
    bloch_residuals,
    dipole_inversion,
    extend_solution,
    integrate_uv,
    q_of_x,
    solve_window,
)
from .params import Params, epsilon_zero, reduce, select_epsilon
from .spectrum import (
    SpectralLine,
    amps_by_projection,
    amps_by_quadrature,
    dipole_amps_cf,
    inversion_amps,
    line_frequency,
    reconstruct,
    sum_rule_residual,
    triplet_report,
)
from .wkb import (
    fit_sawtooth,
    integrality_sign,
    wkb_dc_inversion_amp,
    wkb_delta1,
    wkb_delta2,
    wkb_dipole_amps,
    wkb_dipole_inversion,
    wkb_fundamental_dipole_amp,
    wkb_hierarchy_check,
    wkb_inversion_amps,
    wkb_nu,
    wkb_omega,
    wkb_phase,
    wkb_pi1,
    wkb_pi2,
    wkb_sawtooth,
    wkb_uv,
)

__version__ = "0.1.0"

__all__ = [
    "ConditioningWarning",
    "ConfigError",
    "ConvergenceError",
    "DegenerateFloquetError",
    "DomainError",
    "FloquetData",
    "IntegralityError",
    "IntegrationError",
    "NumericalConsistencyWarning",
    "Params",
    "ProjectionConditioningError",
    "SolutionGrid",
    "SpectralLine",
    "ValidityWarning",
    "amps_by_projection",
    "amps_by_quadrature",
    "bloch_residuals",
    "dipole_amps_cf",
    "dipole_inversion",
    "ellip_E",
    "ellip_Ecomp",
    "ellip_F",
    "ellip_K",
    "epsilon_zero",
    "extend_solution",
    "fit_sawtooth",
    "fit_superposition",
    "floquet_data",
    "floquet_modes",
    "integrality_sign",
    "integrate_uv",
    "inversion_amps",
    "line_frequency",
    "mode_sums",
    "nu_from_monodromy",
    "q_of_x",
    "reconstruct",
    "recurrence_residual",
    "reduce",
    "select_epsilon",
    "solve_recurrence",
    "solve_window",
    "sum_rule_residual",
    "triplet_report",
    "wkb_dc_inversion_amp",
    "wkb_delta1",
    "wkb_delta2",
    "wkb_dipole_amps",
    "wkb_dipole_inversion",
    "wkb_fundamental_dipole_amp",
    "wkb_hierarchy_check",
    "wkb_inversion_amps",
    "wkb_nu",
    "wkb_omega",
    "wkb_phase",
    "wkb_pi1",
    "wkb_pi2",
    "wkb_sawtooth",
    "wkb_uv",
]
