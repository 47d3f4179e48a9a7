"""
Runtime configuration for the Lie order toolkit.
"""

import copy
import os
from typing import Dict, Any

from dotenv import load_dotenv

# Default configuration
DEFAULT_CONFIG = {
    "factorization": {
        "trial_bound": 10000,
        "max_digits": 200,
        "rho_iterations": 2_000_000,
        "seed": 20050720
    },
    "search": {
        "max_groups": 200_000
    },
    "scan": {
        "workers": 1
    },
    "atlas": {
        "path": "./data/order_atlas.json"
    }
}


def get_config() -> Dict[str, Any]:
    """Get configuration settings with environment variable overrides."""
    load_dotenv()
    config = copy.deepcopy(DEFAULT_CONFIG)

    # Factorization settings
    if os.getenv("LIEORDER_TRIAL_BOUND"):
        config["factorization"]["trial_bound"] = int(os.getenv("LIEORDER_TRIAL_BOUND"))

    if os.getenv("LIEORDER_MAX_DIGITS"):
        config["factorization"]["max_digits"] = int(os.getenv("LIEORDER_MAX_DIGITS"))

    if os.getenv("LIEORDER_RHO_ITERATIONS"):
        config["factorization"]["rho_iterations"] = int(os.getenv("LIEORDER_RHO_ITERATIONS"))

    if os.getenv("LIEORDER_SEED"):
        config["factorization"]["seed"] = int(os.getenv("LIEORDER_SEED"))

    # Search settings
    if os.getenv("LIEORDER_SEARCH_MAX_GROUPS"):
        config["search"]["max_groups"] = int(os.getenv("LIEORDER_SEARCH_MAX_GROUPS"))

    if os.getenv("LIEORDER_WORKERS"):
        config["scan"]["workers"] = int(os.getenv("LIEORDER_WORKERS"))

    # Atlas cache location
    if os.getenv("LIEORDER_ATLAS"):
        config["atlas"]["path"] = os.getenv("LIEORDER_ATLAS")

    return config
