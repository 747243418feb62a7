"""Untimed abstractions of timed machines and timed words.

Three constructions are provided, one per machine variant:

* guarded machines read pairs ``(input, region)`` where the region is the
  interval of the partition ``interval_set(N)`` holding the delay;
* timeout machines read plain inputs interleaved with ``Tick.ONE``, one per
  elapsed time unit;
* general machines read plain inputs interleaved with ``Tick.HALF``, which
  alternately crosses an integer point and the open unit interval after it.
"""

from __future__ import annotations

import enum
import functools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Hashable, Iterable, Mapping, Sequence, Union

from .core import (
    INF,
    GeneralMachine,
    Guard,
    GuardedMachine,
    TimeoutMachine,
    format_rational,
    max_constant,
    to_fraction,
)


class Tick(enum.Enum):
    """Time-elapsing symbols of the untimed abstractions."""

    ONE = "1"
    HALF = "t"

    def __repr__(self):
        return f"Tick.{self.name}"

    def __str__(self):
        return "𝟙" if self is Tick.ONE else "𝕥"


@functools.total_ordering
@dataclass(frozen=True)
class Region:
    """One interval of the partition of ``[0, inf)`` at granularity ``N``.

    ``kind`` is ``"point"`` for ``[n,n]``, ``"open"`` for ``(n,n+1)`` and
    ``"tail"`` for ``(n,inf)`` where ``n`` is the bound ``N``.
    """

    n: int
    kind: str

    def __post_init__(self):
        if self.kind not in ("point", "open", "tail"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.n < 0:
            raise ValueError("regions start at 0")

    @classmethod
    def point(cls, n: int) -> "Region":
        return cls(n, "point")

    @classmethod
    def open(cls, n: int) -> "Region":
        return cls(n, "open")

    @classmethod
    def tail(cls, n: int) -> "Region":
        return cls(n, "tail")

    @classmethod
    def parse(cls, text: str) -> "Region":
        g = Guard.parse(text)
        if g.upper is INF:
            return cls.tail(g.lower)
        if g.lower == g.upper:
            return cls.point(g.lower)
        if g.upper == g.lower + 1 and not g.lower_closed and not g.upper_closed:
            return cls.open(g.lower)
        raise ValueError(f"{text!r} is not a region")

    @property
    def lower(self) -> int:
        return self.n

    @property
    def upper(self):
        return {"point": self.n, "open": self.n + 1, "tail": INF}[self.kind]

    @property
    def rank(self) -> int:
        """Position in the ascending order of the partition."""
        return 2 * self.n if self.kind == "point" else 2 * self.n + 1

    def __lt__(self, other):
        if not isinstance(other, Region):
            return NotImplemented
        return self.rank < other.rank

    @property
    def is_point(self) -> bool:
        return self.kind == "point"

    def representative(self) -> Fraction:
        if self.kind == "point":
            return Fraction(self.n)
        if self.kind == "open":
            return Fraction(2 * self.n + 1, 2)
        return Fraction(self.n + 1)

    def contains(self, x) -> bool:
        if self.kind == "point":
            return x == self.n
        if self.kind == "open":
            return self.n < x < self.n + 1
        return x > self.n

    __contains__ = contains

    def within(self, guard: Guard) -> bool:
        """Whether every clock value of the region satisfies ``guard``."""
        if self.kind == "point":
            return guard.contains(self.n)
        if guard.lower > self.n:
            return False
        if self.kind == "open":
            return guard.upper >= self.n + 1
        return guard.upper is INF

    def as_guard(self) -> Guard:
        if self.kind == "point":
            return Guard(self.n, self.n, True, True)
        return Guard(self.n, self.upper, False, False)

    def __str__(self):
        return str(self.as_guard())


def interval_set(n: int) -> tuple[Region, ...]:
    """The ``2N + 2`` regions partitioning ``[0, inf)``, in ascending order."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"the region bound must be a positive integer, got {n!r}")
    regions = []
    for k in range(n):
        regions += [Region.point(k), Region.open(k)]
    regions += [Region.point(n), Region.tail(n)]
    return tuple(regions)


def classify(t, n: int) -> Region:
    t = to_fraction(t)
    if t < 0:
        raise ValueError("negative delay")
    if t > n:
        return Region.tail(n)
    if t.denominator == 1:
        return Region.point(t.numerator)
    return Region.open(floor(t))


AbstractSymbol = Union[str, tuple, Tick]


@dataclass(frozen=True)
class UntimedFsm:
    """Deterministic Mealy machine over an abstract alphabet.

    ``transitions`` maps ``(state, symbol)`` to ``(next state, output)``.
    The alphabet tuple fixes the order in which symbols are explored.
    """

    states: tuple[Hashable, ...]
    alphabet: tuple[AbstractSymbol, ...]
    outputs: tuple[Hashable, ...]
    initial: Hashable
    transitions: Mapping[tuple, tuple] = field(default_factory=dict)
    kind: str = "plain"
    bound: int | None = None

    def __post_init__(self):
        for name in ("states", "alphabet", "outputs"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "transitions", dict(self.transitions))

    def successor(self, state, symbol):
        return self.transitions.get((state, symbol))

    def run(self, word: Iterable[AbstractSymbol], start=None) -> tuple[Hashable, tuple]:
        state = self.initial if start is None else start
        out = []
        for symbol in word:
            nxt = self.transitions.get((state, symbol))
            if nxt is None:
                raise KeyError(f"no transition from {state!r} on {symbol!r}")
            state, o = nxt
            out.append(o)
        return state, tuple(out)

    def output(self, word: Iterable[AbstractSymbol]) -> tuple:
        return self.run(word)[1]

    def is_complete(self) -> bool:
        return all((s, a) in self.transitions for s in self.states for a in self.alphabet)

    def with_output(self, state, symbol, output) -> "UntimedFsm":
        """Copy with one transition's output replaced."""
        table = dict(self.transitions)
        target, _ = table[state, symbol]
        table[state, symbol] = (target, output)
        outputs = self.outputs if output in self.outputs else self.outputs + (output,)
        return UntimedFsm(self.states, self.alphabet, outputs, self.initial, table, self.kind, self.bound)


def _explore(initial, alphabet, successor) -> tuple[list, dict]:
    """Breadth-first construction of the reachable part of an abstraction."""
    seen, order, table = {initial}, [initial], {}
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        for symbol in alphabet:
            nxt = successor(state, symbol)
            if nxt is None:
                continue
            table[state, symbol] = nxt
            if nxt[0] not in seen:
                seen.add(nxt[0])
                order.append(nxt[0])
                queue.append(nxt[0])
    return order, table


def abstract_guarded(machine: GuardedMachine, n: int | None = None) -> UntimedFsm:
    """Region abstraction: states unchanged, inputs tagged with delay regions."""
    least = max_constant(machine)
    if n is None:
        n = least
    if n < least:
        raise ValueError(f"bound {n} is below the machine constant {least}")
    regions = interval_set(n)
    alphabet = tuple((i, r) for i in machine.inputs for r in regions)
    table = {}
    for tr in machine.transitions:
        for r in regions:
            if r.within(tr.guard):
                table[tr.source, (tr.input, r)] = (tr.target, tr.output)
    return UntimedFsm(machine.states, alphabet, machine.outputs, machine.initial, table, "region", n)


def abstract_timeout(machine: TimeoutMachine) -> UntimedFsm:
    """Unit-tick abstraction over states ``(s, n)`` with ``n`` the clock's integer part."""
    io = {(tr.source, tr.input): (tr.target, tr.output) for tr in machine.transitions}
    alphabet = tuple(machine.inputs) + (Tick.ONE,)

    def successor(node, symbol):
        state, n = node
        if symbol is Tick.ONE:
            entry = machine.timeouts[state]
            if entry.duration is INF:
                return ((state, 0), Tick.ONE) if n == 0 else None
            if n + 1 < entry.duration:
                return (state, n + 1), Tick.ONE
            if n + 1 == entry.duration:
                return (entry.target, 0), Tick.ONE
            return None
        hit = io.get((state, symbol))
        if hit is None:
            return None
        return (hit[0], 0), hit[1]

    states, table = _explore((machine.initial, 0), alphabet, successor)
    outputs = tuple(machine.outputs) + (Tick.ONE,)
    return UntimedFsm(states, alphabet, outputs, (machine.initial, 0), table, "one", max_constant(machine))


def abstract_general(machine: GeneralMachine, n: int | None = None) -> UntimedFsm:
    """Half-tick abstraction over states ``(s, region)``."""
    least = max_constant(machine)
    if n is None:
        n = least
    if n < least:
        raise ValueError(f"bound {n} is below the machine constant {least}")
    regions = interval_set(n)
    alphabet = tuple(machine.inputs) + (Tick.HALF,)
    by_pair: dict = {}
    for tr in machine.transitions:
        by_pair.setdefault((tr.source, tr.input), []).append(tr)
    zero = Region.point(0)

    def tick(state, region):
        entry = machine.timeouts[state]
        d = entry.duration
        if region.kind == "point":
            if region.n == n:
                return (state, Region.tail(n)) if d is INF else None
            return (state, Region.open(region.n)) if region.n + 1 <= d else None
        if region.kind == "open":
            if region.n + 1 < d:
                return state, Region.point(region.n + 1)
            if region.n + 1 == d:
                return entry.target, zero
            return None
        return (state, region) if d is INF else None

    def successor(node, symbol):
        state, region = node
        if symbol is Tick.HALF:
            nxt = tick(state, region)
            return None if nxt is None else (nxt, Tick.HALF)
        for tr in by_pair.get((state, symbol), ()):
            if region.within(tr.guard):
                return (tr.target, zero), tr.output
        return None

    assert len(regions) == 2 * n + 2
    start = (machine.initial, zero)
    states, table = _explore(start, alphabet, successor)
    outputs = tuple(machine.outputs) + (Tick.HALF,)
    return UntimedFsm(states, alphabet, outputs, start, table, "half", n)


def abstract(machine, n: int | None = None) -> UntimedFsm:
    """The abstraction matching the machine's variant."""
    if isinstance(machine, GuardedMachine):
        return abstract_guarded(machine, n)
    if isinstance(machine, TimeoutMachine):
        return abstract_timeout(machine)
    if isinstance(machine, GeneralMachine):
        return abstract_general(machine, n)
    raise TypeError(f"not a timed machine: {type(machine).__name__}")


# -- timed words --------------------------------------------------------------


def _delays(word) -> list[tuple[str, Fraction]]:
    previous, out = Fraction(0), []
    for symbol, t in word:
        t = to_fraction(t)
        out.append((symbol, t - previous))
        previous = t
    return out


def abstract_word_regions(word, n: int) -> tuple:
    return tuple((symbol, classify(d, n)) for symbol, d in _delays(word))


def ticks_one(d: Fraction) -> int:
    return floor(d)


def ticks_half(d: Fraction) -> int:
    whole = floor(d)
    return 2 * whole if d == whole else 2 * whole + 1


def abstract_word_one(word) -> tuple:
    out = []
    for symbol, d in _delays(word):
        out += [Tick.ONE] * ticks_one(d)
        out.append(symbol)
    return tuple(out)


def abstract_word_tick(word) -> tuple:
    out = []
    for symbol, d in _delays(word):
        out += [Tick.HALF] * ticks_half(d)
        out.append(symbol)
    return tuple(out)


def format_symbol(symbol: AbstractSymbol) -> str:
    if isinstance(symbol, tuple):
        return f"({symbol[0]},{symbol[1]})"
    return str(symbol)


def format_state(state) -> str:
    if isinstance(state, tuple):
        a, b = state
        if isinstance(b, Fraction):
            b = format_rational(b)
        return f"({a},{b})"
    return str(state)


def format_word(word: Sequence[AbstractSymbol]) -> str:
    return " ".join(format_symbol(a) for a in word) or "ε"
