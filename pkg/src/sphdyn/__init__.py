"""Spherical derivatives and characteristic exponents of rational maps."""
from .errors import (
    CompositionError,
    DegenerateMapError,
    DegreeCapError,
    NonFiniteError,
    OrbitTracingError,
    RootFindingError,
    SamplingError,
    SphdynError,
)
from .ergodic import ChiEstimate, MuSample, birkhoff_forward, chi_average, mu_sample, preimages
from .knorm import KReport, area_identity, chain_norm_log, k_norm, k_norm_iterate, min_k_search, phi_functional
from .lab import ExponentReport, inequality_chain_report, k_infinity_bracket, theorem1_growth_table
from .periodic import (
    CycleRecord,
    all_cycles,
    chi_max_lower,
    k_attaining_cycle_check,
    periodic_cycles,
    poly_roots,
)
from .rational import Poly, RationalMap, apply, compose, iterate, load_map, make_map, spherical_norm_deriv
from .report import emit_report
from .sphere import Chart, SpherePoint, chordal_distance, make_grid, quadrature
from .zoo import FamilyLabel, chebyshev_map, lattes4, power_map, random_map, theorem1_map

__version__ = "0.1.0"
