"""Compact builders for hand-written machines."""

from fractions import Fraction

from tfsm.core import (
    INF,
    GeneralMachine,
    Guard,
    GuardedMachine,
    GuardedTransition,
    TimedWord,
    Timeout,
    TimeoutMachine,
    Transition,
)


def gt(src, guard, inp, out, dst):
    return GuardedTransition(src, inp, Guard.parse(guard), out, dst)


def guarded(*transitions, inputs=("i",), outputs=("o1", "o2"), initial=None):
    states = tuple(dict.fromkeys(t.source for t in transitions))
    return GuardedMachine(states, inputs, outputs, initial or states[0], transitions)


def timeout(transitions, timeouts, inputs=("i",), outputs=("o1", "o2", "o3"), initial=None):
    states = tuple(timeouts)
    return TimeoutMachine(
        states, inputs, outputs, initial or states[0],
        tuple(Transition(*t) for t in transitions),
        {s: Timeout(target, d) for s, (target, d) in timeouts.items()},
    )


def general(transitions, timeouts, inputs=("i",), outputs=("o1", "o2"), initial=None):
    states = tuple(timeouts)
    return GeneralMachine(
        states, inputs, outputs, initial or states[0], tuple(transitions),
        {s: Timeout(target, d) for s, (target, d) in timeouts.items()},
    )


def word(*entries):
    return TimedWord((a, Fraction(t)) for a, t in entries)


__all__ = ["INF", "gt", "guarded", "timeout", "general", "word"]
