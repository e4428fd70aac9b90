"""Three purity disciplines for a Boolean lambda calculus with references,
and a brute-force oracle to test them against."""

from .environment import EnvSpec
from .evaluator import Done, Err, Timeout, evaluate
from .oracle import Bounds, PurityVerdict, obs_purity, op_equiv
from .syntax import parse, print_term
from .systems import judge

__version__ = "0.1.0"

__all__ = [
    "Bounds", "Done", "EnvSpec", "Err", "PurityVerdict", "Timeout",
    "evaluate", "judge", "obs_purity", "op_equiv", "parse", "print_term",
]
