"""Deterministic complete timed FSMs: simulation, equivalence, conversion."""

from .abstraction import (
    Region,
    Tick,
    UntimedFsm,
    abstract,
    abstract_general,
    abstract_guarded,
    abstract_timeout,
    abstract_word_one,
    abstract_word_regions,
    abstract_word_tick,
    classify,
    interval_set,
)
from .core import (
    INF,
    GeneralMachine,
    Guard,
    GuardedMachine,
    GuardedTransition,
    TimedState,
    TimedWord,
    Timeout,
    TimeoutMachine,
    Transition,
    ValidationError,
    ValidationReport,
    max_constant,
    untime,
    validate,
    validate_general,
    validate_guarded,
    validate_timeout,
)
from .equivalence import (
    AlphabetMismatch,
    ClockRange,
    EquivalenceVerdict,
    canonical_relation,
    equivalent,
    check_region_bisimulation,
    fsm_equivalent,
    general_equivalent,
    guarded_equivalent,
    lift_one,
    lift_regions,
    lift_tick,
    timeout_equivalent,
)
from .semantics import NoEnabledTransition, delay_guarded, delay_timeout, run, step
from .transform import (
    cross_equivalent,
    embed,
    embed_guarded,
    embed_timeout,
    is_lcro,
    is_timeout_loop_free,
    lcro_guarded_to_timeout,
    loopfree_timeout_to_guarded,
)

__version__ = "0.1.0"
