"""Random machines and timed words for differential testing.

Every generator takes a ``random.Random`` so that test runs are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction

from .core import (
    INF,
    GeneralMachine,
    Guard,
    GuardedMachine,
    GuardedTransition,
    TimedWord,
    Timeout,
    TimeoutMachine,
    Transition,
    renamed,
)

INPUTS = ("a", "b")
OUTPUTS = ("x", "y", "z")


def _names(rng, max_states, max_inputs, max_outputs=2):
    states = tuple(f"s{k}" for k in range(rng.randint(1, max_states)))
    inputs = INPUTS[: rng.randint(1, max_inputs)]
    outputs = OUTPUTS[: max(2, min(max_outputs, len(OUTPUTS)))]
    return states, inputs, outputs


def random_partition(rng: random.Random, limit=INF, max_constant: int = 3) -> list[Guard]:
    """Guards that tile ``[0, limit)`` exactly, with integer cut points."""
    top = max_constant if limit is INF else min(max_constant, limit - 1)
    cuts = sorted(rng.sample(range(top + 1), rng.randint(0, top + 1)))
    pieces, lo, lo_closed = [], 0, True
    for c in cuts:
        # where the cut point itself goes: end of the left piece, start of
        # the right piece, or a point piece of its own
        mode = rng.choice(("left", "right", "point"))
        if c == 0:
            mode = "left"
        if mode == "right":
            pieces.append(Guard(lo, c, lo_closed, False))
            lo, lo_closed = c, True
        elif mode == "left":
            pieces.append(Guard(lo, c, lo_closed, True))
            lo, lo_closed = c, False
        else:
            if (lo, lo_closed) != (c, True):
                pieces.append(Guard(lo, c, lo_closed, False))
            pieces.append(Guard(c, c, True, True))
            lo, lo_closed = c, False
    if limit is INF:
        pieces.append(Guard(lo, INF, lo_closed, False))
    else:
        pieces.append(Guard(lo, limit, lo_closed, False))
    return pieces


def random_guarded(rng: random.Random, max_states=4, max_inputs=2, max_constant=3, max_outputs=2) -> GuardedMachine:
    states, inputs, outputs = _names(rng, max_states, max_inputs, max_outputs)
    transitions = []
    for s in states:
        for i in inputs:
            for g in random_partition(rng, INF, max_constant):
                transitions.append(GuardedTransition(s, i, g, rng.choice(outputs), rng.choice(states)))
    return GuardedMachine(states, inputs, outputs, states[0], tuple(transitions))


def random_lcro_guarded(rng: random.Random, max_states=4, max_inputs=2, max_constant=3) -> GuardedMachine:
    states, inputs, outputs = _names(rng, max_states, max_inputs)
    transitions = []
    for s in states:
        for i in inputs:
            cuts = sorted(rng.sample(range(1, max_constant + 1), rng.randint(0, max_constant)))
            bounds = [0] + cuts + [INF]
            for lo, hi in zip(bounds, bounds[1:]):
                transitions.append(GuardedTransition(s, i, Guard(lo, hi), rng.choice(outputs), rng.choice(states)))
    return GuardedMachine(states, inputs, outputs, states[0], tuple(transitions))


def _random_duration(rng, max_constant, p_inf=0.3):
    return INF if rng.random() < p_inf else rng.randint(1, max_constant)


def random_timeout(rng: random.Random, max_states=4, max_inputs=2, max_constant=3) -> TimeoutMachine:
    states, inputs, outputs = _names(rng, max_states, max_inputs)
    transitions = tuple(
        Transition(s, i, rng.choice(outputs), rng.choice(states)) for s in states for i in inputs
    )
    timeouts = {s: Timeout(rng.choice(states), _random_duration(rng, max_constant)) for s in states}
    return TimeoutMachine(states, inputs, outputs, states[0], transitions, timeouts)


def random_loop_free_timeout(rng: random.Random, max_states=4, max_inputs=2, max_constant=3) -> TimeoutMachine:
    """Timeout machine whose finite timeouts only lead to later states."""
    states, inputs, outputs = _names(rng, max_states, max_inputs)
    transitions = tuple(
        Transition(s, i, rng.choice(outputs), rng.choice(states)) for s in states for i in inputs
    )
    timeouts = {}
    for k, s in enumerate(states):
        later = states[k + 1:]
        if later and rng.random() < 0.75:
            timeouts[s] = Timeout(rng.choice(later), rng.randint(1, max_constant))
        else:
            timeouts[s] = Timeout(s, INF)
    order = list(states)
    rng.shuffle(order)
    # shuffle declaration order so the timeout chain is not always ascending
    return TimeoutMachine(tuple(order), inputs, outputs, states[0], transitions, timeouts)


def random_general(rng: random.Random, max_states=4, max_inputs=2, max_constant=3) -> GeneralMachine:
    states, inputs, outputs = _names(rng, max_states, max_inputs)
    timeouts = {s: Timeout(rng.choice(states), _random_duration(rng, max_constant)) for s in states}
    transitions = []
    for s in states:
        for i in inputs:
            for g in random_partition(rng, timeouts[s].duration, max_constant):
                transitions.append(GuardedTransition(s, i, g, rng.choice(outputs), rng.choice(states)))
    return GeneralMachine(states, inputs, outputs, states[0], tuple(transitions), timeouts)


def random_word(rng: random.Random, inputs, max_length=6, max_denominator=4, max_delay=4) -> TimedWord:
    pairs = []
    for _ in range(rng.randint(0, max_length)):
        q = rng.randint(1, max_denominator)
        pairs.append((rng.choice(inputs), Fraction(rng.randint(0, max_delay * q), q)))
    return TimedWord.from_delays(pairs)


GENERATORS = {
    "guarded": random_guarded,
    "timeout": random_timeout,
    "general": random_general,
}


# -- behavior-preserving rewrites ---------------------------------------------


def _split(rng, guard: Guard) -> list[Guard]:
    """Cut a guard at an interior integer, or return it unchanged."""
    top = guard.lower + 3 if guard.upper is INF else guard.upper - 1
    inner = range(guard.lower + 1, top + 1)
    if not inner:
        return [guard]
    c = rng.choice(inner)
    left_closed = rng.random() < 0.5
    return [
        Guard(guard.lower, c, guard.lower_closed, not left_closed),
        Guard(c, guard.upper, left_closed, guard.upper_closed),
    ]


def _duplicate(rng, machine):
    """Add a copy of one state and send some transitions to the copy."""
    s = rng.choice(machine.states)
    copy = s + "'"
    while copy in machine.states:
        copy += "'"

    def redirect(target):
        return copy if target == s and rng.random() < 0.5 else target

    transitions = []
    for tr in machine.transitions:
        tr = replace(tr, target=redirect(tr.target))
        transitions.append(tr)
        if tr.source == s:
            transitions.append(replace(tr, source=copy))
    states = machine.states + (copy,)
    if isinstance(machine, GuardedMachine):
        return GuardedMachine(states, machine.inputs, machine.outputs, machine.initial, tuple(transitions))
    timeouts = {}
    for state, entry in machine.timeouts.items():
        target = entry.target if entry.duration is INF else redirect(entry.target)
        timeouts[state] = Timeout(target, entry.duration)
    entry = machine.timeouts[s]
    timeouts[copy] = Timeout(copy if entry.duration is INF else entry.target, entry.duration)
    return type(machine)(states, machine.inputs, machine.outputs, machine.initial, tuple(transitions), timeouts)


def _split_guards(rng, machine):
    transitions = []
    for tr in machine.transitions:
        pieces = _split(rng, tr.guard) if rng.random() < 0.4 else [tr.guard]
        transitions += [replace(tr, guard=g) for g in pieces]
    return replace(machine, transitions=tuple(transitions))


def _cut(g: Guard, c: int):
    """The parts of ``g`` below ``c`` and from ``c`` on, the latter shifted back by ``c``."""
    left = right = None
    if g.lower < c:
        left = g if g.upper < c else Guard(g.lower, c, g.lower_closed, False)
    if g.upper > c or (g.upper == c and g.upper_closed):
        lo, closed = (g.lower, g.lower_closed) if g.lower >= c else (c, True)
        right = Guard(lo - c, g.upper if g.upper is INF else g.upper - c, closed, g.upper_closed)
    return left, right


def _unfold_timeout(rng, machine):
    """Split a finite timeout ``d > 1`` into two consecutive timeouts."""
    candidates = [s for s, e in machine.timeouts.items() if e.duration is not INF and e.duration > 1]
    if not candidates:
        return machine
    s = rng.choice(candidates)
    entry = machine.timeouts[s]
    cut = rng.randint(1, entry.duration - 1)
    rest = s + "+"
    while rest in machine.states:
        rest += "+"
    timeouts = dict(machine.timeouts)
    timeouts[s] = Timeout(rest, cut)
    timeouts[rest] = Timeout(entry.target, entry.duration - cut)
    transitions = []
    for tr in machine.transitions:
        if tr.source != s:
            transitions.append(tr)
        elif isinstance(tr, Transition):
            transitions += [tr, replace(tr, source=rest)]
        else:
            left, right = _cut(tr.guard, cut)
            if left is not None:
                transitions.append(replace(tr, guard=left))
            if right is not None:
                transitions.append(replace(tr, source=rest, guard=right))
    return type(machine)(
        machine.states + (rest,), machine.inputs, machine.outputs, machine.initial, tuple(transitions), timeouts,
    )


def equivalent_variant(rng: random.Random, machine):
    """A differently built machine with the same behavior."""
    rewrites = [_duplicate]
    if not isinstance(machine, TimeoutMachine):
        rewrites.append(_split_guards)
    if not isinstance(machine, GuardedMachine):
        rewrites.append(_unfold_timeout)
    for _ in range(rng.randint(1, 3)):
        machine = rng.choice(rewrites)(rng, machine)
    mapping = {s: f"r{k}" for k, s in enumerate(rng.sample(machine.states, len(machine.states)))}
    return renamed(machine, mapping)


def mutate_output(rng: random.Random, machine):
    """Change the output of one transition; the behavior may or may not change."""
    k = rng.randrange(len(machine.transitions))
    tr = machine.transitions[k]
    other = rng.choice([o for o in machine.outputs if o != tr.output])
    transitions = machine.transitions[:k] + (replace(tr, output=other),) + machine.transitions[k + 1:]
    return replace(machine, transitions=transitions)


def random_pair(rng: random.Random, kind: str):
    """Equivalent, mutated, or independent pair of machines of one variant."""
    m1 = GENERATORS[kind](rng)
    roll = rng.random()
    if roll < 0.5:
        return m1, equivalent_variant(rng, m1)
    if roll < 0.8:
        return m1, equivalent_variant(rng, mutate_output(rng, m1))
    while True:
        m2 = GENERATORS[kind](rng)
        if m2.inputs == m1.inputs:
            return m1, m2
