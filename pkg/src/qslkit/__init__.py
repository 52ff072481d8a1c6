"""Quantum speed limit bounds for time-independent Hamiltonians.

A state is given in its energy representation as a
:class:`~qslkit.spectrum.DiscreteSpectrum`; every bound returns a
:class:`~qslkit.bounds.BoundResult` whose value is a time in units of
hbar divided by the energy unit.
"""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DomainError, QSLError, QuadratureError,
                     SaturabilityError, ValidationError)
from .kernel import (TangentPair, AngleSolution, cz_angle_factor, epsilon_c, h, h_inverse,
                     phi_pair, theta_crit, theta_opt)
from .spectrum import (ContinuousSpectrum, DiscreteSpectrum, MomentProfile, SpectrumSummary,
                       build_continuous, build_state, continuous_profile, e_r_opt, moments,
                       summary)
from .bounds import (BoundKind, BoundResult, cz_asymmetric, cz_bound_2d, cz_bound_fixed_p,
                     dual_ml_bound, lc_bound, lz_bound, ml_bound, mt_bound)
from .optimizer import (DivergenceAnalysis, Verdict, best_bound, divergence_analysis,
                        mt_recovery_p, optimize_p)
from .saturation import (OracleResult, SaturatingTriple, evolution_time, saturating_state,
                         verify_saturation)
from .io import dump_state, load_state, loads_state

__all__ = [
    "AngleSolution", "BoundKind", "BoundResult", "ContinuousSpectrum", "ConvergenceError",
    "DiscreteSpectrum", "DivergenceAnalysis", "DomainError", "MomentProfile", "OracleResult",
    "QSLError", "QuadratureError", "SaturabilityError", "SaturatingTriple", "SpectrumSummary",
    "TangentPair", "ValidationError", "Verdict", "best_bound", "build_continuous", "build_state",
    "continuous_profile", "cz_angle_factor", "cz_asymmetric", "cz_bound_2d", "cz_bound_fixed_p",
    "divergence_analysis", "dual_ml_bound", "dump_state", "e_r_opt", "epsilon_c",
    "evolution_time", "h", "h_inverse", "lc_bound", "load_state", "loads_state", "lz_bound",
    "ml_bound", "moments", "mt_bound", "mt_recovery_p", "optimize_p", "phi_pair",
    "saturating_state", "summary", "theta_crit", "theta_opt", "verify_saturation",
]
