# Lie order toolkit configuration

# Default search bounds used by the CLI
DEFAULT_MAX_RANK = 4  # Largest total rank considered by recover/coincide
DEFAULT_Q_MAX = 49  # Largest field size scanned by verify prop31
DEFAULT_N_MAX = 8  # Largest family parameter for triples and generators
DEFAULT_MAX_DEGREE = 30  # Largest Weyl degree for the two-factor join

# Field sizes the coincidence and triple checks are evaluated at
VERIFY_Q_VALUES = [2, 3, 4, 5, 7, 8, 9]

# Logging Configuration
LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
