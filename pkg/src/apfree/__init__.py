"""Large subsets of finite integer sets free of k-term D-progressions."""

__version__ = "0.1.0"

from .base_sets import base_set, behrend_digits, exact_max_free, greedy_free
from .bounds import bound_interval, bound_kssz, bound_main, bound_squares, type_upper_bound
from .constructor import ConstructionResult, run_construction
from .datasets import (
    RandomSetModel,
    interval_set,
    random_bernoulli_set,
    squares_3ap_bruteforce,
    squares_3ap_parameterized,
    squares_set,
)
from .estimator import ProgressionFreeSelector
from .geometry import AnnuliSpec, ball_volume, choose_z, estimate_volume, f_constant
from .intset import IntSet, load_set, save_set
from .progression import (
    Certificate,
    ProgressionType,
    count_types,
    enumerate_progressions,
    find_starters,
    is_progression,
    type_of,
    verify_free,
)
from .validation import DomainError, InvariantViolation

__all__ = [
    "AnnuliSpec", "Certificate", "ConstructionResult", "DomainError", "IntSet",
    "InvariantViolation", "ProgressionFreeSelector", "ProgressionType", "RandomSetModel",
    "ball_volume", "base_set", "behrend_digits", "bound_interval", "bound_kssz",
    "bound_main", "bound_squares", "choose_z", "count_types", "enumerate_progressions",
    "estimate_volume", "exact_max_free", "f_constant", "find_starters", "greedy_free",
    "interval_set", "is_progression", "load_set", "random_bernoulli_set",
    "run_construction", "save_set", "squares_3ap_bruteforce", "squares_3ap_parameterized",
    "squares_set", "type_of", "type_upper_bound", "verify_free",
]
