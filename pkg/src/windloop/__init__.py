"""Winding-number fields of sampled planar Brownian loops.

Simulates closed Brownian trajectories, rasterizes their integer
winding fields, and checks the quantitative behaviour of high-winding
areas (normalization, decomposition brackets, tail events, scaling)
against exact oracles and Monte Carlo trends.  Kernel backend is
chosen by the WINDLOOP_BACKEND environment variable (numba or numpy).
"""

__version__ = "0.1.0"

from ._kernels import backend_name
from .measures import (AreaPair, OccupationHistogram, TestFunction,
                       ThresholdSet, constant_fn, cosine_fn, f_measure,
                       gaussian_bump, mu_N_f, nu_f, occupation_measure,
                       threshold_area)
from .montecarlo import (McConfig, McSummary, ScalingReport, ks_critical,
                         ks_statistic, pair_moment_table, run_replicates,
                         scaling_check, tail_table)
from .sampling import (PlanarPath, RngStream, SubpathView, derive_child_seed,
                       holder_norm, path_from_normals, sample_bm, splitmix64,
                       subpath)
from .verify import (AdditivityReport, DecompositionFields, EventFlags,
                     ParamSet, RateReport, SandwichReport, Schedule,
                     additivity_report, decomposition_fields, eta_value,
                     event_flags, gamma_grid, joint_statistic_from_fields,
                     joint_threshold_statistic, make_schedule,
                     normalization_statistic, occupation_discrepancy,
                     rate_bound, sandwich_report, validate_params,
                     verify_decomposition)
from .winding import (ClosedLoop, GridSpec, WindingField, arc_cut_indices,
                      chord_polygon, chord_winding_bound, close_path,
                      default_band_eps, split_closed, winding_field,
                      winding_field_reference, winding_number_point,
                      winding_numbers_at)

__all__ = [name for name in dir() if not name.startswith("_")]
