"""Every numerical threshold that feeds a verdict, in one place."""

# mini-LP and cone arithmetic
LP_TOL = 1e-9
RI_TOL = 1e-7
RANK_TOL = 1e-8
PIVOT_TOL = 1e-12
NNLS_KKT_TOL = 1e-9
MIN_GENERATOR_NORM = 1e-12

# bodies
SLATER_MARGIN = 1e-6
CONVEXITY_TOL = 1e-9
CONVEXITY_SAMPLES = 200

# barrier solver
MU0 = 1.0
MU_SHRINK = 0.2
GAP_TARGET = 1e-9
NEWTON_TOL = 1e-10
ARMIJO_FACTOR = 0.5
ARMIJO_SLOPE = 0.25
MAX_BACKTRACKS = 50
MAX_NEWTON_ITERS = 100
TIKHONOV_SHIFT = 1e-12
ACT_LAMBDA_REL = 1e-6  # times ||c||
ACT_G_REL = 1e-7  # times (1 + R^2)
FEAS_TOL = 1e-7

# manifolds and verdicts
WALK_TOL = 1e-11
CONT_TOL = 0.05
PROBE_RADII = (1e-2, 1e-3)
PIN_TOL = 1e-6  # relative to the walk radius
DELTA_TOL = 1e-4
KKT_REL_TOL = 1e-6  # times (1 + ||c||)

SCHEMA = "tame-opt-lab/1"
