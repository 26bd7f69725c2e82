#!/usr/bin/env python3

# constants for the twisted moment computation

import math

# tolerances
EXACT_TOLERANCE = 1e-9          # algebraically exact identities (B, D, Gauss sums)
ORTHOGONALITY_TOLERANCE = 1e-10 # character orthogonality
QUADRATURE_TOLERANCE = 1e-4     # quadrature-mediated identities (Voronoi)
POISSON_TOLERANCE = 1e-10
REALITY_TOLERANCE = 1e-8        # max imaginary residue accepted for real integrals
FILE_TOLERANCE = 1e-6           # precision of ingested coefficient tables
POLE_GUARD = 1e-8               # distance from a Gamma pole that is rejected
L_CHI_GUARD = 1e-8              # |L(1/2, chi)| below which product / L is not formed

# Ramanujan exponent towards |lambda(p)| <= 2 p^theta (Kim - Sarnak)
THETA_BOUND = 7 / 64

# contour plans: (sigma, height, step)
AFE_SIGMA = 1.0
AFE_HEIGHT = 12.0
AFE_STEP = 0.05
VORONOI_SIGMA = -0.5
VORONOI_HEIGHT = 3000.0
VORONOI_STEP = 0.1
MIN_NODES_PER_PLAN = 100        # height / step lower bound

# approximate functional equation truncation
AFE_TAIL_TOLERANCE = 1e-8
AFE_HORIZON_GRID = 2 ** 0.25    # ratio of the geometric grid used to locate y_max
AFE_HORIZON_WINDOW = 8.0        # tail bound must hold on [y_max, window * y_max]
AFE_HORIZON_Y_LIMIT = 1e9
T_CUT_CAP = 2 ** 26             # largest AFE horizon accepted
AFE_TABLE_SPACING = 1e-3        # log y spacing of the spline table of V used by the sweep
SWEEP_CHUNKS = 64               # equal-work chunks of the divisor sweep (depend on T only)

# Hurwitz zeta (Euler - Maclaurin)
HURWITZ_TERMS = 50
HURWITZ_BERNOULLI_ORDER = 12

# Mellin transform / Voronoi
MELLIN_NODES = 2048             # trapezoid nodes in log x over the bump support
VORONOI_FFT_SIZE = 2 ** 21
VORONOI_X_CAP = 4.0e4           # dual sum runs over n N / c^2 <= X_CAP
VORONOI_TERM_TOLERANCE = 1e-9

# exponential sums (uniform bound in alpha)
EXP_SUM_EXPONENT = 0.6
EXP_SUM_GROWTH_FACTOR = 1.5
EXP_SUM_GRID_SIZE = 200
EXP_SUM_N_LIST = (256, 1024, 4096)
EXP_SUM_GRID_OFFSET = (math.sqrt(5) - 1) / 2  # keeps grid points off small-denominator rationals

# L(1, f) by exponential smoothing
L_ONE_MIN_N = 10_000
L_ONE_X_DIVISORS = (20, 10)     # X = n_max / 20 and n_max / 10
L_ONE_SPREAD_LIMIT = 1e-3

# default bump psi: exp(1 - 1 / (1 - (2x - 3)^2)) on [1, 2]
BUMP_SUPPORT = (1.0, 2.0)

# family scans and trends
NONVANISHING_THRESHOLD = 1e-4
TREND_TARGET = 0.5
DEFAULT_MODULI = (15, 35, 77, 143, 221)
VERIFY_MODULI = (15, 21, 33, 35, 55, 77, 143, 221)
AB_LIMIT = 50

# report formats
MOMENT_CSV_HEADER = (
    'q', 'q1', 'q2', 're_sum', 'im_sum', 'main_term', 're_ratio', 'im_ratio',
    's1_re', 's1_im', 's2_re', 's2_im', 'n_chars', 'runtime_ms'
)
LVALUE_CSV_HEADER = (
    'chi_id', 're_product', 'im_product', 're_l_chi', 'im_l_chi',
    're_l_twist', 'im_l_twist', 'truncation_n', 'tail_estimate'
)
CHARACTER_CSV_HEADER = (
    'chi_id', 'exponents', 'parity', 'conductor', 'primitive', 'abs_gauss_sum'
)
SCAN_CSV_HEADER = ('chi_id', 'abs_product')
VERIFICATION_CSV_HEADER = (
    'name', 'cases_run', 'max_abs_deviation', 'tolerance', 'passed', 'worst_case'
)
FORMAT_CSV = 'csv'
FORMAT_JSON = 'json'

# configuration
CONFIG_ENV_VAR = 'LMOMENT_CONFIG'
DEFAULT_COEFF_SPEC = 'eisenstein:1'
DEFAULT_SYNTHETIC_SEED = 20240611

# coefficient sources
SOURCE_EISENSTEIN = 'eisenstein'
SOURCE_FILE = 'file'
SOURCE_SYNTHETIC = 'synthetic'

# exit codes
EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
