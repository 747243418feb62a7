"""Conversions between the machine variants.

Loop-free timeout machines and machines whose guards are all left-closed and
right-open describe the same behaviors; both embed into the general variant.
"""

from __future__ import annotations

from typing import NamedTuple

from .core import (
    FULL,
    INF,
    GeneralMachine,
    Guard,
    GuardedMachine,
    GuardedTransition,
    Timeout,
    TimeoutMachine,
    Transition,
    ValidationError,
    format_bound,
    validate_guarded,
    validate_timeout,
)
from .equivalence import EquivalenceVerdict, check_alphabets, general_equivalent


class NotLoopFree(ValueError):
    def __init__(self, cycle):
        super().__init__("timeouts form a cycle: " + " -> ".join(cycle + cycle[:1]))
        self.cycle = cycle


class NotLcro(ValueError):
    def __init__(self, transition):
        super().__init__(f"guard {transition.guard} of {transition} is not left-closed right-open")
        self.transition = transition


class LoopCheck(NamedTuple):
    loop_free: bool
    cycle: list

    def __bool__(self):
        return self.loop_free


class LcroCheck(NamedTuple):
    lcro: bool
    offending: GuardedTransition | None

    def __bool__(self):
        return self.lcro


def timeout_graph(machine: TimeoutMachine) -> dict:
    """Edges ``s -> target`` for every state with a finite timeout."""
    return {s: e.target for s, e in machine.timeouts.items() if e.duration is not INF}


def is_timeout_loop_free(machine: TimeoutMachine) -> LoopCheck:
    graph = timeout_graph(machine)
    done = set()
    for start in machine.states:
        path, position = [], {}
        node = start
        while node in graph and node not in done:
            if node in position:
                return LoopCheck(False, path[position[node]:])
            position[node] = len(path)
            path.append(node)
            node = graph[node]
        done.update(path)
    return LoopCheck(True, [])


def _resolution_order(machine: TimeoutMachine) -> list:
    """States with finite timeouts, each after the state its timeout leads to."""
    graph = timeout_graph(machine)
    order, placed = [], set()

    def place(s):
        chain = []
        while s in graph and s not in placed:
            chain.append(s)
            s = graph[s]
        for s in reversed(chain):
            placed.add(s)
            order.append(s)

    for s in machine.states:
        place(s)
    return order


def loopfree_timeout_to_guarded(machine: TimeoutMachine) -> GuardedMachine:
    """Replace timeouts by shifted copies of the successor's guarded transitions.

    Each transition first receives the guard ``[0, d)`` where ``d`` is the
    timeout of its source. States are then resolved successor-first, so a
    single shifted copy of the successor's (already final) transitions covers
    the clock range from ``d`` on.
    """
    check = is_timeout_loop_free(machine)
    if not check.loop_free:
        raise NotLoopFree(check.cycle)
    outgoing = {s: [] for s in machine.states}
    for tr in machine.transitions:
        d = machine.timeouts[tr.source].duration
        guard = FULL if d is INF else Guard(0, d)
        outgoing[tr.source].append(GuardedTransition(tr.source, tr.input, guard, tr.output, tr.target))
    for s in _resolution_order(machine):
        entry = machine.timeouts[s]
        n = entry.duration
        outgoing[s] += [
            GuardedTransition(s, tr.input, tr.guard.shifted(n), tr.output, tr.target)
            for tr in outgoing[entry.target]
        ]
    result = GuardedMachine(
        machine.states, machine.inputs, machine.outputs, machine.initial,
        tuple(tr for s in machine.states for tr in outgoing[s]),
    )
    report = validate_guarded(result)
    if not report.ok:
        raise ValidationError(report)
    return result


def is_lcro(machine: GuardedMachine) -> LcroCheck:
    for tr in machine.transitions:
        if not tr.guard.is_lcro:
            return LcroCheck(False, tr)
    return LcroCheck(True, None)


def window_name(state: str, lo: int, hi) -> str:
    return f"{state}[{lo},{format_bound(hi)})"


def lcro_guarded_to_timeout(machine: GuardedMachine) -> TimeoutMachine:
    """Split every state into windows between consecutive guard endpoints.

    Window ``[a, b)`` of state ``s`` times out after ``b - a`` into the next
    window; the last window never times out. Every transition is copied onto
    each window it covers and leads to the first window of its target.
    """
    check = is_lcro(machine)
    if not check.lcro:
        raise NotLcro(check.offending)
    bounds = {}
    for s in machine.states:
        points = {0}
        for tr in machine.transitions:
            if tr.source == s:
                points.add(tr.guard.lower)
                if tr.guard.upper is not INF:
                    points.add(tr.guard.upper)
        bounds[s] = sorted(points) + [INF]

    def first_window(s):
        b = bounds[s]
        return window_name(s, b[0], b[1])

    states, timeouts, transitions = [], {}, []
    for s in machine.states:
        b = bounds[s]
        windows = list(zip(b, b[1:]))
        for k, (lo, hi) in enumerate(windows):
            name = window_name(s, lo, hi)
            states.append(name)
            if hi is INF:
                timeouts[name] = Timeout(name, INF)
            else:
                timeouts[name] = Timeout(window_name(s, *windows[k + 1]), hi - lo)
            for tr in machine.transitions:
                if tr.source == s and tr.guard.lower <= lo and hi <= tr.guard.upper:
                    transitions.append(Transition(name, tr.input, tr.output, first_window(tr.target)))
    result = TimeoutMachine(
        tuple(states), machine.inputs, machine.outputs, first_window(machine.initial),
        tuple(transitions), timeouts,
    )
    report = validate_timeout(result)
    if not report.ok:
        raise ValidationError(report)
    return result


def embed_guarded(machine: GuardedMachine) -> GeneralMachine:
    return GeneralMachine(
        machine.states, machine.inputs, machine.outputs, machine.initial, machine.transitions,
        {s: Timeout(s, INF) for s in machine.states},
    )


def embed_timeout(machine: TimeoutMachine) -> GeneralMachine:
    transitions = []
    for tr in machine.transitions:
        d = machine.timeouts[tr.source].duration
        guard = FULL if d is INF else Guard(0, d)
        transitions.append(GuardedTransition(tr.source, tr.input, guard, tr.output, tr.target))
    return GeneralMachine(
        machine.states, machine.inputs, machine.outputs, machine.initial, tuple(transitions),
        dict(machine.timeouts),
    )


def embed(machine) -> GeneralMachine:
    if isinstance(machine, GeneralMachine):
        return machine
    if isinstance(machine, GuardedMachine):
        return embed_guarded(machine)
    if isinstance(machine, TimeoutMachine):
        return embed_timeout(machine)
    raise TypeError(f"not a timed machine: {type(machine).__name__}")


def cross_equivalent(m1, m2) -> EquivalenceVerdict:
    """Equivalence of machines of any variants, decided in the general model."""
    check_alphabets(m1, m2)
    return general_equivalent(embed(m1), embed(m2), replay=(m1, m2))
