"""
Shared Constants
Model defaults, threshold presets and the CLI exit-code contract.
"""

# Exit codes (stable across releases)
EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_UNSTABLE_LOAD = 3
EXIT_SIMULATION_FAILURE = 4

# Decimal unit multipliers (1 Mb = 10^6 bits)
UNIT_MULTIPLIERS = {
    "": 1.0,
    "k": 1e3,
    "m": 1e6,
    "g": 1e9,
    "t": 1e12,
}

# Algebraic identities are checked to this relative tolerance
IDENTITY_TOLERANCE = 1e-12

# Simulation defaults
DEFAULT_WARMUP_FRACTION = 0.1
COMPLETION_SLACK_BITS = 1e-9
CONFIDENCE_BATCHES = 20
CONFIDENCE_LEVEL = 0.95
RANDOM_BLOCK_SIZE = 256

# Finite-population product form switches to log space above this population
LOG_SPACE_POPULATION = 50

# Speed-test defaults
PROBE_SIZE_MULTIPLIER = 100.0

# Input tables
MAX_MALFORMED_FRACTION = 0.10

# Reported rates are rounded to 0.1 Mb/s
REPORT_RATE_DECIMALS = 1

# VHCN threshold presets: (download floor, upload floor) in bit/s
THRESHOLD_PRESETS = {
    "italia_1_giga": (1e9, 200e6),
    "italia_5g": (150e6, 30e6),
}

# Validation sweeps
SWEEP_POPULATION = 2000
SWEEP_TAIL_DURATIONS = 10.0

# Insensitivity comparisons from the CLI
DEFAULT_PARETO_SHAPE = 1.5
DEFAULT_PARETO_CAP_FACTOR = 100.0
