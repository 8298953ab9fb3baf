"""Linear optimization over convex semi-algebraic bodies with identifiability diagnostics."""

from .body import FIXTURE_NAMES, ConvexBody, fixture, load
from .cones import ConeRep, directed_distance, normal_cone, strict_complementarity
from .criticality import quadratic_decay, sensitivity, strong_criticality
from .errors import (
    ConvergenceError, ConvexityError, DegenerateGradientError, InputError, NoInteriorError,
    SamplingError, SecondOrderDegeneracyError, SingularMatrixError, TameOptError, WalkError,
)
from .harness import DiagnoseOptions, diagnose, emit_report, parse_report, path_probe, sample_sphere, survey
from .identify import ProbeOptions, check_partial_smoothness, extract_manifold, manifold_at, walk_manifold
from .poly import Polynomial, PolySystem
from .solver import SolverOptions, maximize_linear, support_value

__version__ = "0.1.0"
