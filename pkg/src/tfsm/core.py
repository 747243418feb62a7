"""Machine records, guards, timed words and structural validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Iterator, Mapping, NamedTuple, Sequence, Union


class Infinity:
    """The unbounded endpoint. Compares greater than every number."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (Infinity, ())

    def __hash__(self):
        return hash("tfsm.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        if other is self or isinstance(other, Rational):
            return self
        return NotImplemented

    __radd__ = __add__


INF = Infinity()

Bound = Union[int, Infinity]
State = str
Symbol = str


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def to_fraction(value) -> Fraction:
    """Exact conversion to Fraction. Binary floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not timestamps")
    if isinstance(value, float):
        raise TypeError(f"binary float {value!r} is not an exact timestamp; use Fraction or 'p/q'")
    if isinstance(value, (int, Fraction, Decimal)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_bound(value: Bound) -> str:
    return "inf" if value is INF else str(value)


@dataclass(frozen=True)
class Guard:
    """An interval with integer endpoints, possibly unbounded on the right."""

    lower: int
    upper: Bound
    lower_closed: bool = True
    upper_closed: bool = False

    def __post_init__(self):
        if not _is_int(self.lower) or self.lower < 0:
            raise ValueError(f"guard lower bound must be a non-negative integer, got {self.lower!r}")
        if self.upper is not INF and not _is_int(self.upper):
            raise ValueError(f"guard upper bound must be an integer or INF, got {self.upper!r}")
        if self.upper < self.lower:
            raise ValueError(f"guard lower bound {self.lower} exceeds upper bound {self.upper}")
        if self.upper is INF and self.upper_closed:
            raise ValueError("an unbounded guard cannot be right-closed")
        if self.lower == self.upper and not (self.lower_closed and self.upper_closed):
            raise ValueError(f"empty guard {self._text()}")

    @classmethod
    def parse(cls, text: str) -> "Guard":
        """Read interval notation such as ``[0,1)`` or ``(2,inf)``."""
        text = text.strip()
        if len(text) < 5 or text[0] not in "[(" or text[-1] not in "])":
            raise ValueError(f"not an interval: {text!r}")
        lo, sep, hi = text[1:-1].partition(",")
        if not sep:
            raise ValueError(f"not an interval: {text!r}")
        hi = hi.strip()
        upper = INF if hi in ("inf", "∞", "oo") else int(hi)
        return cls(int(lo), upper, text[0] == "[", text[-1] == "]")

    def contains(self, x) -> bool:
        if x < self.lower or (x == self.lower and not self.lower_closed):
            return False
        if self.upper is INF:
            return True
        return x < self.upper or (x == self.upper and self.upper_closed)

    __contains__ = contains

    def shifted(self, n: int) -> "Guard":
        return Guard(self.lower + n, self.upper + n, self.lower_closed, self.upper_closed)

    @property
    def is_lcro(self) -> bool:
        return self.lower_closed and not self.upper_closed

    def _text(self):
        left = "[" if self.lower_closed else "("
        right = "]" if self.upper_closed else ")"
        return f"{left}{self.lower},{format_bound(self.upper)}{right}"

    def __str__(self):
        return self._text()


FULL = Guard(0, INF)


@dataclass(frozen=True)
class GuardedTransition:
    source: State
    input: Symbol
    guard: Guard
    output: Symbol
    target: State

    def __str__(self):
        return f"{self.source} --{self.guard}:{self.input}/{self.output}--> {self.target}"


@dataclass(frozen=True)
class Transition:
    source: State
    input: Symbol
    output: Symbol
    target: State

    def __str__(self):
        return f"{self.source} --{self.input}/{self.output}--> {self.target}"


@dataclass(frozen=True)
class Timeout:
    target: State
    duration: Bound

    @property
    def finite(self) -> bool:
        return self.duration is not INF


class TimedState(NamedTuple):
    state: State
    clock: Fraction

    def __str__(self):
        return f"({self.state}, {format_rational(self.clock)})"


class TimedWord(Sequence):
    """Immutable sequence of ``(symbol, timestamp)`` pairs with exact timestamps."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[tuple[Symbol, Any]] = ()):
        pairs = tuple((symbol, to_fraction(t)) for symbol, t in entries)
        previous = Fraction(0)
        for k, (_, t) in enumerate(pairs):
            if t < previous:
                raise ValueError(
                    f"timestamp {format_rational(t)} at position {k} is smaller than its predecessor"
                )
            previous = t
        self._entries = pairs

    def __getitem__(self, index):
        if isinstance(index, slice):
            return TimedWord(self._entries[index])
        return self._entries[index]

    def __len__(self):
        return len(self._entries)

    def __iter__(self) -> Iterator[tuple[Symbol, Fraction]]:
        return iter(self._entries)

    def __eq__(self, other):
        if isinstance(other, TimedWord):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self):
        return hash(self._entries)

    def __repr__(self):
        return f"TimedWord({list(self._entries)!r})"

    def __str__(self):
        return "".join(f"({a},{format_rational(t)})" for a, t in self._entries) or "ε"

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(a for a, _ in self._entries)

    @property
    def timestamps(self) -> tuple[Fraction, ...]:
        return tuple(t for _, t in self._entries)

    def delays(self) -> list[Fraction]:
        """Differences between consecutive timestamps, starting from time 0."""
        out, previous = [], Fraction(0)
        for _, t in self._entries:
            out.append(t - previous)
            previous = t
        return out

    @classmethod
    def from_delays(cls, pairs: Iterable[tuple[Symbol, Any]]) -> "TimedWord":
        now, entries = Fraction(0), []
        for symbol, d in pairs:
            d = to_fraction(d)
            if d < 0:
                raise ValueError("negative delay")
            now += d
            entries.append((symbol, now))
        return cls(entries)

    def is_strictly_increasing(self) -> bool:
        ts = self.timestamps
        return all(a < b for a, b in zip(ts, ts[1:]))


def untime(word: Iterable[tuple[Symbol, Any]]) -> tuple[Symbol, ...]:
    return tuple(symbol for symbol, _ in word)


def _normalize_timeouts(states, timeouts) -> dict[State, Timeout]:
    out = {}
    for state, entry in dict(timeouts).items():
        if not isinstance(entry, Timeout):
            entry = Timeout(*entry)
        if entry.duration is INF and entry.target != state:
            entry = Timeout(state, INF)
        out[state] = entry
    return out


def _order_key(order: Sequence):
    index = {item: k for k, item in enumerate(order)}
    return lambda item: (index.get(item, len(index)), str(item))


@dataclass(frozen=True)
class _Machine:
    states: tuple[State, ...]
    inputs: tuple[Symbol, ...]
    outputs: tuple[Symbol, ...]
    initial: State

    def _freeze(self):
        for name in ("states", "inputs", "outputs"):
            value = getattr(self, name)
            if isinstance(value, (set, frozenset)):
                value = sorted(value)
            object.__setattr__(self, name, tuple(value))

    def _sort_transitions(self, transitions, guarded):
        state_key = _order_key(self.states)
        input_key = _order_key(self.inputs)

        def key(tr):
            k = (state_key(tr.source), input_key(tr.input))
            if guarded:
                g = tr.guard
                k += (g.lower, not g.lower_closed, g.upper, g.upper_closed)
            return k + (tr.output, tr.target)

        object.__setattr__(self, "transitions", tuple(sorted(transitions, key=key)))


@dataclass(frozen=True, eq=True)
class GuardedMachine(_Machine):
    transitions: tuple[GuardedTransition, ...] = ()
    kind = "guarded"

    def __post_init__(self):
        self._freeze()
        self._sort_transitions(self.transitions, guarded=True)


@dataclass(frozen=True, eq=True)
class TimeoutMachine(_Machine):
    transitions: tuple[Transition, ...] = ()
    timeouts: Mapping[State, Timeout] = field(default_factory=dict)
    kind = "timeout"

    def __post_init__(self):
        self._freeze()
        self._sort_transitions(self.transitions, guarded=False)
        object.__setattr__(self, "timeouts", _normalize_timeouts(self.states, self.timeouts))


@dataclass(frozen=True, eq=True)
class GeneralMachine(_Machine):
    transitions: tuple[GuardedTransition, ...] = ()
    timeouts: Mapping[State, Timeout] = field(default_factory=dict)
    kind = "general"

    def __post_init__(self):
        self._freeze()
        self._sort_transitions(self.transitions, guarded=True)
        object.__setattr__(self, "timeouts", _normalize_timeouts(self.states, self.timeouts))


Machine = Union[GuardedMachine, TimeoutMachine, GeneralMachine]


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    state: State | None = None
    input: Symbol | None = None
    witness: Fraction | None = None

    def __str__(self):
        return self.message


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


class ValidationError(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(str(report))
        self.report = report


def _check_structure(machine) -> list[Violation]:
    found = []
    states, inputs, outputs = machine.states, machine.inputs, machine.outputs
    for name, group in (("states", states), ("inputs", inputs), ("outputs", outputs)):
        if not group:
            found.append(Violation("structure", f"the set of {name} is empty"))
        if len(set(group)) != len(group):
            found.append(Violation("structure", f"duplicate entries in {name}"))
    for a, b in (("states", "inputs"), ("states", "outputs"), ("inputs", "outputs")):
        shared = set(getattr(machine, a)) & set(getattr(machine, b))
        if shared:
            found.append(Violation("structure", f"{a} and {b} share {sorted(shared)}"))
    if machine.initial not in states:
        found.append(Violation("structure", f"initial state {machine.initial!r} is not a state"))
    for tr in machine.transitions:
        if tr.source not in states or tr.target not in states:
            found.append(Violation("structure", f"transition {tr} references an unknown state",
                                   tr.source, tr.input))
        if tr.input not in inputs:
            found.append(Violation("structure", f"transition {tr} reads unknown input {tr.input!r}",
                                   tr.source, tr.input))
        if tr.output not in outputs:
            found.append(Violation("structure", f"transition {tr} emits unknown output {tr.output!r}",
                                   tr.source, tr.input))
    return found


def _check_timeouts(machine) -> list[Violation]:
    found = []
    for state in machine.states:
        entry = machine.timeouts.get(state)
        if entry is None:
            found.append(Violation("timeout", f"state {state} has no timeout entry", state))
            continue
        d = entry.duration
        if d is not INF and (not _is_int(d) or d <= 0):
            found.append(Violation("timeout", f"non-positive timeout {d!r} at state {state}", state))
        if entry.target not in machine.states:
            found.append(Violation("timeout", f"timeout of {state} targets unknown state {entry.target!r}",
                                   state))
    for state in machine.timeouts:
        if state not in machine.states:
            found.append(Violation("timeout", f"timeout declared for unknown state {state!r}", state))
    return found


def _regions_below(guards: Sequence[Guard], limit: Bound) -> Iterator[Fraction]:
    """Representative clocks, one per elementary region of ``[0, limit)``.

    The elementary regions are the endpoint values themselves and the open
    stretches between consecutive endpoints.
    """
    points = {0}
    for g in guards:
        points.add(g.lower)
        if g.upper is not INF:
            points.add(g.upper)
    if limit is not INF:
        points.add(limit)
    points = sorted(p for p in points if p <= limit)
    for p, q in zip(points, points[1:] + [INF]):
        if p < limit:
            yield Fraction(p)
        if q is INF:
            if limit is INF:
                yield Fraction(p + 1)
        elif q <= limit:
            yield Fraction(p + q, 2)


def coverage_violations(state, symbol, guards: Sequence[Guard], limit: Bound = INF) -> list[Violation]:
    """Gaps and overlaps of ``guards`` over ``[0, limit)``.

    Adjacent regions with the same defect and the same guards involved are
    reported once, witnessed by the smallest offending region.
    """
    found, previous = [], None
    for x in _regions_below(guards, limit):
        members = tuple(k for k, g in enumerate(guards) if g.contains(x))
        if len(members) == 1:
            previous = None
            continue
        kind = "gap" if not members else "overlap"
        if previous == (kind, members):
            continue
        previous = (kind, members)
        if kind == "gap":
            msg = f"({state}, {symbol}): no transition enabled at clock {format_rational(x)}"
        else:
            involved = ", ".join(str(guards[k]) for k in members)
            msg = f"({state}, {symbol}): guards {involved} overlap at clock {format_rational(x)}"
        found.append(Violation(kind, msg, state, symbol, x))
    return found


def _guards_by_pair(machine) -> dict[tuple[State, Symbol], list[Guard]]:
    table = {(s, i): [] for s in machine.states for i in machine.inputs}
    for tr in machine.transitions:
        table.setdefault((tr.source, tr.input), []).append(tr.guard)
    return table


def validate_guarded(machine: GuardedMachine) -> ValidationReport:
    found = _check_structure(machine)
    for (state, symbol), guards in _guards_by_pair(machine).items():
        found += coverage_violations(state, symbol, guards)
    return ValidationReport(tuple(found))


def validate_timeout(machine: TimeoutMachine) -> ValidationReport:
    found = _check_structure(machine)
    counts = {(s, i): 0 for s in machine.states for i in machine.inputs}
    for tr in machine.transitions:
        counts[tr.source, tr.input] = counts.get((tr.source, tr.input), 0) + 1
    for (state, symbol), n in counts.items():
        if n == 0:
            found.append(Violation("missing", f"({state}, {symbol}): no transition", state, symbol))
        elif n > 1:
            found.append(Violation("overlap", f"({state}, {symbol}): {n} transitions", state, symbol))
    found += _check_timeouts(machine)
    return ValidationReport(tuple(found))


def validate_general(machine: GeneralMachine) -> ValidationReport:
    found = _check_structure(machine) + _check_timeouts(machine)
    for tr in machine.transitions:
        entry = machine.timeouts.get(tr.source)
        if entry is None or entry.duration is INF:
            continue
        d, g = entry.duration, tr.guard
        if g.upper > d or (g.upper == d and g.upper_closed):
            found.append(Violation(
                "guard-exceeds-timeout",
                f"guard {g} of {tr} reaches the timeout {d} of {tr.source}",
                tr.source, tr.input, Fraction(d),
            ))
    for (state, symbol), guards in _guards_by_pair(machine).items():
        entry = machine.timeouts.get(state)
        limit = entry.duration if entry is not None and _is_int(entry.duration) and entry.duration > 0 else INF
        found += coverage_violations(state, symbol, guards, limit)
    return ValidationReport(tuple(found))


def validate(machine: Machine) -> ValidationReport:
    if isinstance(machine, GuardedMachine):
        return validate_guarded(machine)
    if isinstance(machine, TimeoutMachine):
        return validate_timeout(machine)
    if isinstance(machine, GeneralMachine):
        return validate_general(machine)
    raise TypeError(f"not a timed machine: {type(machine).__name__}")


def ensure_valid(machine: Machine) -> Machine:
    report = validate(machine)
    if not report.ok:
        raise ValidationError(report)
    return machine


def max_constant(machine: Machine) -> int:
    """Largest finite integer constant in guards and timeouts, at least 1."""
    constants = [1]
    for tr in getattr(machine, "transitions", ()):
        guard = getattr(tr, "guard", None)
        if guard is not None:
            constants.append(guard.lower)
            if guard.upper is not INF:
                constants.append(guard.upper)
    for entry in getattr(machine, "timeouts", {}).values():
        if entry.duration is not INF:
            constants.append(entry.duration)
    return max(constants)


def renamed(machine: Machine, mapping: Mapping[State, State]) -> Machine:
    """Copy of ``machine`` with states renamed through ``mapping``."""
    rename = lambda s: mapping.get(s, s)  # noqa: E731
    common = dict(
        states=tuple(rename(s) for s in machine.states),
        inputs=machine.inputs,
        outputs=machine.outputs,
        initial=rename(machine.initial),
    )
    if isinstance(machine, TimeoutMachine):
        trs = [Transition(rename(t.source), t.input, t.output, rename(t.target)) for t in machine.transitions]
    else:
        trs = [GuardedTransition(rename(t.source), t.input, t.guard, t.output, rename(t.target))
               for t in machine.transitions]
    common["transitions"] = tuple(trs)
    if isinstance(machine, GuardedMachine):
        return GuardedMachine(**common)
    timeouts = {rename(s): Timeout(rename(e.target), e.duration) for s, e in machine.timeouts.items()}
    return type(machine)(**common, timeouts=timeouts)
