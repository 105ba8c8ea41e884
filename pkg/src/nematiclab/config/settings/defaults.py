"""
Module which defines default settings for the laboratory.
"""

import math

LAB_CONFIGURATION_PREFIX = "EL"
LAB_DISABLE_AUTOWIRING_VARIABLE = "EL_INIT__DISABLE_AUTOWIRING"

DEFAULT_BOX_LENGTH = 2.0 * math.pi
DEFAULT_THREADS = 1
DEFAULT_LOG_LEVEL = "INFO"

# Inner fixed-point sweeps of the director and velocity steps
INNER_TOLERANCE = 1e-10
INNER_MAX_SWEEPS = 20
DIVERGENCE_WINDOW = 5

MEAN_ZERO_TOLERANCE = 1e-9
SPHERE_TOLERANCE = 1e-8

NEUMANN_TOLERANCE = 1e-12
NEUMANN_MAX_TERMS = 64

RESOLUTION_DRIFT = 0.2
RESIDUAL_FLOOR = 1e-12

# Picard scheme
PICARD_TOLERANCE = 1e-8
PICARD_MAX_ITERATIONS = 30
SMALLNESS_THRESHOLD = 0.05
DEFAULT_STEPS_PER_RUN = 256
DEFAULT_SCHEME_R = 1.5
DEFAULT_SCHEME_P = 1.2

# Density guard, a = 1/rho - 1 must stay above -1
DENSITY_GUARD = -0.9

# Fraction of the grid a backward characteristic may cross in a single step
CFL_GRID_FRACTION = 0.25

SNAPSHOT_MAGIC = b"ELFIELD1"
TRAJECTORY_METADATA_FILENAME = "trajectory.json"
RESOLVED_CONFIG_FILENAME = "config.resolved.json"

# Observed orders under halving of the time step
REFINEMENT_HALVINGS = 2
REFINEMENT_FLOOR = 1e-10
ENERGY_LAW_ORDER = 1.8
WEAK_FORM_ORDER = 1.8
SPHERE_DRIFT_ORDER = 1.0

# Verification thresholds of stored trajectories
WEAK_FORM_THRESHOLD = 1e-4
ENERGY_LAW_THRESHOLD = 1e-3
DIVERGENCE_THRESHOLD = 1e-8
MAX_PRINCIPLE_SLACK = 1e-12
SCALING_RESIDUAL_RATIO = 2.0
CRITICAL_INVARIANCE_THRESHOLD = 0.05
VERDICT_FILENAME = "verdict.txt"
ANALYTIC_THRESHOLD = 1e-6
HEAT_EQUIVALENCE_CONSTANT = 10.0
L2_EQUIVALENCE_BAND = (2.0**-0.5, 1.0 + 1e-9)

GRADIENT_IDENTITY_THRESHOLD = 1e-3
SERIES_INVERSE_THRESHOLD = 1e-8
DIRECT_INVERSE_THRESHOLD = 1e-10
VOLUME_THRESHOLD = 1e-4
DELTA_A_THRESHOLD = 1e-9
LAGRANGIAN_RESIDUAL_THRESHOLD = 1e-2

EXIT_SUCCESS = 0
EXIT_SUITE_FAILURE = 1
EXIT_USAGE_ERROR = 2
