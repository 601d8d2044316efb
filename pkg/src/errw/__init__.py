"""Reinforced branching random walk on a triangle: simulation and analysis."""

from .simplex import (
    SpectralData, VertexPoint, NotBoundary, DegenerateBasis,
    idx_next, idx_prev, transition_matrix, equilibrium_q, eigenvalues,
    eigen_data, e_minus1_boundary, chi, operator_norm_L, tangent_coords,
)
from .offspring import (
    OffspringSpec, InvalidOffspring, constant, two_point, shifted_geometric,
    make_offspring, sample_binomial, sample_offspring_sum, stream,
)
from .process import (
    Free, EqualSplit, EdgeAvoid, ProcessState, StepRecord, Trajectory,
    init_state, step, run, martingale_summary,
)
from .dynsys import (
    LeftSimplex, BoundaryOrbit, LocalCoords,
    phi_step, phi_step_perturbed, orbit, boundary_orbit, local_coords, verify_newas,
)
from .classify import (
    Thresholds, ScenarioReport, GrowthReport, InsufficientTail,
    estimate_ell, classify_series, growth_report,
)
from .trajio import RunConfig, ConfigError, load_config, config_from_dict

# keep submodule names bound to the modules themselves (classify_series above
# is the series-level entry point; classify(traj) lives in errw.classify)
from . import classify, dynsys, offspring, process, simplex, trajio  # noqa: E402,F401

__version__ = "0.1.0"
