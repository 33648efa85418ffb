"""adiband: a numerical laboratory for adiabatic band decoupling and
effective Born-Oppenheimer dynamics of 1-D model molecular systems.

The package discretizes a fibered Hamiltonian
H = (eps^2/2)(-i d/dX + A(X))^2 + H_e(X) on a periodic grid with a small
matrix fiber, evolves it exactly through dense eigendecompositions, and
measures how fast band-preserving and effective single-band dynamics
converge to the full dynamics as eps decreases.
"""

from .electronic import (
    BandData,
    ContourSpec,
    GapReport,
    band_decompose,
    berry_connection,
    gap_check,
    grad_projection,
    riesz_projection,
)
from .grids import Grid1D, MolecularWave, NuclearWave, make_grid, norm, sobolev_norm
from .hamiltonians import (
    DenseHamiltonian,
    ProjectionOperator,
    assemble_bo,
    assemble_diag,
    assemble_full,
    energy_cutoff,
    full_projection,
    smoothed_projection_family,
    u_map,
    u_star_map,
)
from .harness import ExperimentConfig, ScanResult, eps_scan, run_suite
from .identities import commutator_inverse, commutator_inverse_residual, offdiag_scaling
from .indicators import PhaseSpaceRegion, SmoothIndicator, smooth_indicator
from .models import ElectronicModel, get_model, list_models
from .propagation import (
    SpectralPropagator,
    decoupling_error,
    diagonalize,
    effective_dynamics_error,
    evolve,
)
from .semiclassics import (
    ClassicalDensity,
    Symbol,
    boundary_leakage,
    classical_flow,
    egorov_residual,
    hitting_times,
    phase_space_projection,
    reduced_observable_residual,
    weyl_quantize,
    wigner_marginal,
)
from .states import (
    coherent_state,
    lift_to_band,
    sharp_momentum_state,
    sharp_position_state,
    wkb_state,
)

__version__ = "0.1.0"
