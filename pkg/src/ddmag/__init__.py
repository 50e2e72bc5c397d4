"""ddmag: data-driven 2D magnetostatic finite-element solver.

Solves the magnetostatic boundary value problem directly on raw (H, B)
measurement samples by alternating between Maxwell-conforming linear
solves and weighted nearest-state projections onto the data, next to a
conventional damped-Newton reference solver and energy-based error
metrics.
"""

from .geometry import InductorGeometry, Region, Rect, build_regions, default_geometry
from .mesh import Mesh, triangulate
from .material import (MU0, NU0, BrauerConstants, ElementState,
                       MaterialDataSet, WeightPair, brauer_H,
                       brauer_differential_reluctivity, brauer_reluctivity,
                       fit_brauer, global_weight, load_csv, local_weight,
                       nearest_state_1d, nearest_state_2d, project_linear_law,
                       sample_brauer)
from .fem import (P1Basis, SparseSpd, assemble_rhs_B, assemble_rhs_H_J,
                  assemble_stiffness, assemble_stiffness_tensor, element_curl,
                  solve_spd)
from .dd import (ConvergenceLog, DDConfig, DDSolution, DDState,
                 current_density, dd_initialize, dd_iterate, dd_run,
                 distance_functional)
from .newton import ReferenceSolution, consistent_tangent, newton_solve
from .metrics import (ConvergenceStudy, airgap_energy, energy_mismatch,
                      energy_mismatch_data, fit_loglog_slope,
                      rel_airgap_error)
from .config import RunConfig, load_config, parse_config, save_config, serialize_config

__version__ = "0.1.0"
