"""Timed operational semantics for the three machine variants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .core import (
    INF,
    GeneralMachine,
    GuardedMachine,
    Machine,
    TimedState,
    TimedWord,
    TimeoutMachine,
    format_rational,
    to_fraction,
)


class NoEnabledTransition(RuntimeError):
    """No input/output transition fires; the machine was not complete."""


@dataclass(frozen=True)
class DelayStep:
    source: TimedState
    delay: Fraction
    target: TimedState

    def __str__(self):
        return f"{self.source} --{format_rational(self.delay)}--> {self.target}"


@dataclass(frozen=True)
class IoStep:
    source: TimedState
    input: str
    output: str
    target: TimedState

    def __str__(self):
        return f"{self.source} --{self.input}/{self.output}--> {self.target}"


Step = Union[DelayStep, IoStep]


@dataclass(frozen=True)
class RunTrace:
    steps: tuple[Step, ...]
    outputs: TimedWord

    def __str__(self):
        return "\n".join(str(s) for s in self.steps)


class Run(NamedTuple):
    final: TimedState
    outputs: TimedWord
    trace: RunTrace


def delay_guarded(machine: GuardedMachine, ts: TimedState, t) -> TimedState:
    t = to_fraction(t)
    if t < 0:
        raise ValueError("negative delay")
    return TimedState(ts.state, ts.clock + t)


def delay_timeout(machine: TimeoutMachine | GeneralMachine, ts: TimedState, t) -> TimedState:
    """Let ``t`` time units pass, following every timeout that expires.

    A delay that ends exactly on a timeout lands in the timeout target with
    the clock reset.
    """
    remaining = to_fraction(t)
    if remaining < 0:
        raise ValueError("negative delay")
    state, clock = ts.state, Fraction(ts.clock)
    while True:
        entry = machine.timeouts[state]
        if entry.duration is INF or clock + remaining < entry.duration:
            return TimedState(state, clock + remaining)
        if entry.duration <= 0:
            raise ValueError(f"timeout of {state} is not positive")
        remaining -= entry.duration - clock
        state, clock = entry.target, Fraction(0)


def delay(machine: Machine, ts: TimedState, t) -> TimedState:
    if isinstance(machine, GuardedMachine):
        return delay_guarded(machine, ts, t)
    return delay_timeout(machine, ts, t)


def _index(machine) -> dict:
    table = machine.__dict__.get("_by_pair")
    if table is None:
        table = {}
        for tr in machine.transitions:
            table.setdefault((tr.source, tr.input), []).append(tr)
        # machines are frozen; the index is derived data
        object.__setattr__(machine, "_by_pair", table)
    return table


def fire(machine: Machine, ts: TimedState, symbol: str) -> tuple[TimedState, str]:
    """The input/output transition enabled at ``ts`` for ``symbol``."""
    candidates = _index(machine).get((ts.state, symbol), ())
    if isinstance(machine, TimeoutMachine):
        entry = machine.timeouts[ts.state]
        if candidates and ts.clock < entry.duration:
            tr = candidates[0]
            return TimedState(tr.target, Fraction(0)), tr.output
    else:
        for tr in candidates:
            if tr.guard.contains(ts.clock):
                return TimedState(tr.target, Fraction(0)), tr.output
    raise NoEnabledTransition(f"no transition for input {symbol!r} at {ts}")


def step(machine: Machine, ts: TimedState, t, symbol: str) -> tuple[TimedState, str]:
    return fire(machine, delay(machine, ts, t), symbol)


def initial_state(machine: Machine) -> TimedState:
    return TimedState(machine.initial, Fraction(0))


def run(machine: Machine, word) -> Run:
    if not isinstance(word, TimedWord):
        word = TimedWord(word)
    ts = initial_state(machine)
    steps, outputs, previous = [], [], Fraction(0)
    for symbol, t in word:
        waited = delay(machine, ts, t - previous)
        steps.append(DelayStep(ts, t - previous, waited))
        ts, out = fire(machine, waited, symbol)
        steps.append(IoStep(waited, symbol, out, ts))
        outputs.append((out, t))
        previous = t
    out_word = TimedWord(outputs)
    return Run(ts, out_word, RunTrace(tuple(steps), out_word))


def outputs(machine: Machine, word) -> TimedWord:
    return run(machine, word).outputs
