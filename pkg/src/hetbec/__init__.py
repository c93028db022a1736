"""Three-mode model of two bosonic atomic species coherently coupled to a
heteronuclear molecular condensate: exact quantum solvers over the conserved
Fock sector and semiclassical mean-field dynamics, plus the analytic
elliptic-function oscillation solutions and stability analysis."""

from ._backend import NUMBA_ENABLED, backend_name
from .drivers import (AdiabaticityResult, ComparisonResult, SweepResult,
                      SweepSpec, adiabaticity_check, agreement_window,
                      oscillation_compare, sweep)
from .elliptic import (OscillationSolution, analytic_y, ellip_k, jacobi_sn,
                       jacobi_sn_cn_dn, measured_period, oscillation_params,
                       quartic_rhs, resonant_period_asymptote, turning_points)
from .errors import (ConvergenceError, DomainError, IntegrationError,
                     ParameterError)
from .meanfield import (CanonicalPoint, MeanFieldState, MeanFieldTrajectory,
                        classical_energy, convert, energy_from_amplitudes,
                        from_canonical, integrate, rhs_amplitudes,
                        rhs_canonical, seeded_atom_state)
from .model import RawParams, ScaledParams, scale_params
from .quantum import (DeltaSchedule, FockSector, GroundObservables,
                      QuantumState, QuantumTrajectory, Spectrum,
                      TridiagonalHamiltonian, build_hamiltonian, build_sector,
                      diagonalize, evolve, evolve_spectral,
                      ground_observables, pure_atom_state)
from .stationary import (GroundStateScan, StabilityMap, SteadyState,
                         excitation_frequency, find_steady_states,
                         ground_state, ground_state_scan, stability_map,
                         swallowtail_bounds)
from .svgplot import emit_svg
from .tridiag import tridiag_eigh

__version__ = "0.1.0"
