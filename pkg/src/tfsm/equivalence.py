"""Equivalence checking through the untimed abstractions.

Two timed machines of the same variant are equivalent exactly when their
abstractions are; the abstractions are compared with a breadth-first walk of
their synchronous product, which also yields a shortest distinguishing word.
That word is turned back into a timed word by picking one delay per region.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Hashable, Iterable

from .abstraction import (
    Region,
    Tick,
    UntimedFsm,
    abstract_general,
    abstract_guarded,
    abstract_timeout,
    format_state,
    format_symbol,
    interval_set,
)
from .core import (
    INF,
    Bound,
    GeneralMachine,
    GuardedMachine,
    TimedState,
    TimedWord,
    TimeoutMachine,
    format_bound,
    max_constant,
)
from .semantics import NoEnabledTransition, delay_timeout, fire, run


class AlphabetMismatch(ValueError):
    pass


class TrailingTicks(ValueError):
    pass


class MalformedRelation(ValueError):
    pass


@dataclass(frozen=True)
class Counterexample:
    """A word on which two machines answer differently.

    ``outputs_a``/``outputs_b`` are the machines' answers and ``index`` the
    first position where they differ. For timed machines ``word`` holds the
    lifted timed input and the outputs are timed words; for untimed machines
    ``word`` is None and the outputs are abstract output sequences.
    """

    abstract_word: tuple
    outputs_a: tuple | TimedWord
    outputs_b: tuple | TimedWord
    index: int
    word: TimedWord | None = None


@dataclass(frozen=True)
class EquivalenceVerdict:
    counterexample: Counterexample | None = None

    @property
    def equivalent(self) -> bool:
        return self.counterexample is None

    def __bool__(self):
        return self.equivalent


EQUIVALENT = EquivalenceVerdict()


def _first_difference(a: Iterable, b: Iterable) -> int:
    for k, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return k
    raise AssertionError("outputs do not differ")


def fsm_equivalent(a: UntimedFsm, b: UntimedFsm) -> EquivalenceVerdict:
    """Compare two deterministic machines from their initial states.

    Symbols are tried in the order of ``a.alphabet``, so the returned word is
    the first shortest one in that order.
    """
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch("the machines read different alphabets")
    start = (a.initial, b.initial)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        for symbol in a.alphabet:
            na, nb = a.successor(pair[0], symbol), b.successor(pair[1], symbol)
            if na is None or nb is None:
                raise ValueError(f"no transition on {format_symbol(symbol)} from {pair}")
            if na[1] != nb[1]:
                word = [symbol]
                node = pair
                while parent[node] is not None:
                    node, via = parent[node]
                    word.append(via)
                word.reverse()
                word = tuple(word)
                return EquivalenceVerdict(
                    Counterexample(word, a.output(word), b.output(word), len(word) - 1)
                )
            nxt = (na[0], nb[0])
            if nxt not in parent:
                parent[nxt] = (pair, symbol)
                queue.append(nxt)
    return EQUIVALENT


# -- lifting abstract words to timed words --------------------------------------


def lift_regions(word: Iterable[tuple]) -> TimedWord:
    return TimedWord.from_delays((symbol, region.representative()) for symbol, region in word)


def _lift_ticks(word: Iterable, tick: Tick, delay_for) -> TimedWord:
    pairs, run_length = [], 0
    for symbol in word:
        if symbol is tick:
            run_length += 1
        else:
            pairs.append((symbol, delay_for(run_length)))
            run_length = 0
    if run_length:
        raise TrailingTicks(f"{run_length} tick(s) after the last input")
    return TimedWord.from_delays(pairs)


def lift_one(word: Iterable) -> TimedWord:
    return _lift_ticks(word, Tick.ONE, lambda k: Fraction(2 * k + 1, 2))


def lift_tick(word: Iterable) -> TimedWord:
    return _lift_ticks(word, Tick.HALF, lambda k: Fraction(k, 2))


# -- timed equivalence --------------------------------------------------------


def check_alphabets(m1, m2) -> None:
    if set(m1.inputs) != set(m2.inputs):
        raise AlphabetMismatch(f"inputs differ: {sorted(m1.inputs)} vs {sorted(m2.inputs)}")
    if set(m1.outputs) != set(m2.outputs):
        raise AlphabetMismatch(f"outputs differ: {sorted(m1.outputs)} vs {sorted(m2.outputs)}")


def _lifted(verdict: EquivalenceVerdict, lift, m1, m2) -> EquivalenceVerdict:
    if verdict.equivalent:
        return verdict
    abstract_word = verdict.counterexample.abstract_word
    word = lift(abstract_word)
    out_a, out_b = run(m1, word).outputs, run(m2, word).outputs
    return EquivalenceVerdict(
        Counterexample(abstract_word, out_a, out_b, _first_difference(out_a, out_b), word)
    )


def guarded_equivalent(m1: GuardedMachine, m2: GuardedMachine) -> EquivalenceVerdict:
    check_alphabets(m1, m2)
    n = max(max_constant(m1), max_constant(m2))
    verdict = fsm_equivalent(abstract_guarded(m1, n), abstract_guarded(m2, n))
    return _lifted(verdict, lift_regions, m1, m2)


def timeout_equivalent(m1: TimeoutMachine, m2: TimeoutMachine) -> EquivalenceVerdict:
    check_alphabets(m1, m2)
    verdict = fsm_equivalent(abstract_timeout(m1), abstract_timeout(m2))
    return _lifted(verdict, lift_one, m1, m2)


def general_equivalent(m1: GeneralMachine, m2: GeneralMachine, *, replay=None) -> EquivalenceVerdict:
    """Equivalence of general machines.

    ``replay`` optionally supplies the pair of machines used to compute the
    reported outputs; callers that embedded simpler machines pass the
    originals so reports speak about what the user wrote.
    """
    check_alphabets(m1, m2)
    n = max(max_constant(m1), max_constant(m2))
    verdict = fsm_equivalent(abstract_general(m1, n), abstract_general(m2, n))
    a, b = replay or (m1, m2)
    return _lifted(verdict, lift_tick, a, b)


def equivalent(m1, m2) -> EquivalenceVerdict:
    """Same-variant equivalence, dispatched on the machines' type."""
    if type(m1) is not type(m2):
        raise TypeError("machines of different variants; use cross_equivalent")
    check = {
        GuardedMachine: guarded_equivalent,
        TimeoutMachine: timeout_equivalent,
        GeneralMachine: general_equivalent,
    }[type(m1)]
    return check(m1, m2)


# -- bisimulation relations ---------------------------------------------------


@dataclass(frozen=True)
class ClockRange:
    """Clock values ``[lo, hi)``, the timed side of a unit-tick relation."""

    lo: int
    hi: Bound

    def __post_init__(self):
        if self.lo < 0 or not self.hi > self.lo:
            raise MalformedRelation(f"empty clock range [{self.lo},{format_bound(self.hi)})")

    def contains(self, x) -> bool:
        return self.lo <= x < self.hi

    def __str__(self):
        return f"[{self.lo},{format_bound(self.hi)})"


@dataclass(frozen=True)
class BisimulationViolation:
    condition: int
    pair: tuple
    symbol: object
    message: str

    def __str__(self):
        return f"condition {self.condition} fails for {self.pair}: {self.message}"


@dataclass(frozen=True)
class BisimulationResult:
    violation: BisimulationViolation | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __bool__(self):
        return self.ok


RegionRelation = Iterable[tuple]
KINDS = ("guarded", "timeout", "general")


def _kind_of(machine) -> str:
    return {GuardedMachine: "guarded", TimeoutMachine: "timeout", GeneralMachine: "general"}[type(machine)]


def canonical_relation(machine, abstract: UntimedFsm) -> frozenset:
    """The relation that ties a machine to its own abstraction.

    Guarded: the identity on states. Timeout: clocks with integer part ``n``
    relate to ``(s, n)``, and every clock of a state without timeout relates
    to ``(s, 0)``. General: clocks inside a region relate to ``(s, region)``.
    """
    kind = _kind_of(machine)
    if kind == "guarded":
        return frozenset((s, s) for s in machine.states)
    pairs = set()
    for state, cls in abstract.states:
        if kind == "timeout":
            if machine.timeouts[state].duration is INF:
                pairs.add(((state, ClockRange(0, INF)), (state, cls)))
            else:
                pairs.add(((state, ClockRange(cls, cls + 1)), (state, cls)))
        else:
            pairs.add(((state, cls), (state, cls)))
    return frozenset(pairs)


def _normalize(kind, machine, abstract, rel) -> list[tuple]:
    abstract_states = set(abstract.states)
    out = []
    for pair in rel:
        try:
            left, right = pair
        except (TypeError, ValueError):
            raise MalformedRelation(f"not a pair: {pair!r}") from None
        if right not in abstract_states:
            raise MalformedRelation(f"{right!r} is not a state of the abstraction")
        if kind == "guarded":
            if left not in machine.states:
                raise MalformedRelation(f"{left!r} is not a state of the machine")
            out.append((left, right))
            continue
        try:
            state, cls = left
        except (TypeError, ValueError):
            raise MalformedRelation(f"expected (state, clock class), got {left!r}") from None
        if state not in machine.states:
            raise MalformedRelation(f"{state!r} is not a state of the machine")
        d = machine.timeouts[state].duration
        if kind == "timeout":
            if isinstance(cls, int) and not isinstance(cls, bool):
                cls = ClockRange(cls, cls + 1)
            if not isinstance(cls, ClockRange):
                raise MalformedRelation(f"expected a clock index or ClockRange, got {cls!r}")
            if cls.hi > d:
                raise MalformedRelation(f"clock range {cls} of {state} reaches its timeout {d}")
        else:
            if not isinstance(cls, Region):
                raise MalformedRelation(f"expected a Region, got {cls!r}")
            if cls not in interval_set(abstract.bound):
                raise MalformedRelation(f"region {cls} is not in the partition of the abstraction")
            if not cls.lower < d:
                raise MalformedRelation(f"region {cls} of {state} lies beyond its timeout {d}")
        out.append(((state, cls), right))
    return out


def check_region_bisimulation(kind: str, machine, abstract: UntimedFsm, rel: RegionRelation) -> BisimulationResult:
    """Check that ``rel`` is a bisimulation between a timed machine and ``abstract``.

    Real-valued quantifiers are discharged with one clock value per region:
    guard membership, integer parts and timeout comparisons are constant on
    regions, so a representative decides every condition.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if kind != _kind_of(machine):
        raise ValueError(f"a {_kind_of(machine)} machine cannot be checked as {kind}")
    pairs = _normalize(kind, machine, abstract, rel)
    check = {"guarded": _check_guarded, "timeout": _check_one, "general": _check_half}[kind]
    violation = check(machine, abstract, pairs)
    return BisimulationResult(violation)


def _check_guarded(machine, abstract, pairs):
    related = set(pairs)
    regions = interval_set(abstract.bound)
    by_source: dict = {}
    for tr in machine.transitions:
        by_source.setdefault(tr.source, []).append(tr)
    for s, r in pairs:
        for tr in by_source.get(s, ()):
            for region in regions:
                if not region.within(tr.guard):
                    continue
                symbol = (tr.input, region)
                hit = abstract.successor(r, symbol)
                if hit is None or hit[1] != tr.output or (tr.target, hit[0]) not in related:
                    return BisimulationViolation(
                        1, (s, r), symbol,
                        f"{tr} has no matching abstract transition on {format_symbol(symbol)}",
                    )
        for symbol in abstract.alphabet:
            hit = abstract.successor(r, symbol)
            if hit is None:
                continue
            i, region = symbol
            if not any(
                tr.input == i and region.within(tr.guard) and tr.output == hit[1]
                and (tr.target, hit[0]) in related
                for tr in by_source.get(s, ())
            ):
                return BisimulationViolation(
                    2, (s, r), symbol,
                    f"abstract {format_state(r)} --{format_symbol(symbol)}/{hit[1]}--> "
                    f"{format_state(hit[0])} has no matching timed transition",
                )
    return None


class _Membership:
    def __init__(self, pairs):
        self._by_right: dict = {}
        for (state, cls), right in pairs:
            self._by_right.setdefault(right, []).append((state, cls))

    def __call__(self, ts: TimedState, right: Hashable) -> bool:
        return any(state == ts.state and cls.contains(ts.clock) for state, cls in self._by_right.get(right, ()))


def _io_conditions(machine, abstract, related, ts, r, pair, conditions):
    """Input/output conditions shared by both tick kinds."""
    first, second = conditions
    for i in machine.inputs:
        try:
            timed = fire(machine, ts, i)
        except NoEnabledTransition:
            timed = None
        hit = abstract.successor(r, i)
        if timed is not None:
            (target, out) = timed
            if hit is None or hit[1] != out or not related(target, hit[0]):
                return BisimulationViolation(
                    first, pair, i, f"timed step {ts} --{i}/{out}--> {target} has no matching abstract step",
                )
        if hit is not None:
            if timed is None or timed[1] != hit[1] or not related(timed[0], hit[0]):
                return BisimulationViolation(
                    second, pair, i,
                    f"abstract step {format_state(r)} --{i}/{hit[1]}--> {format_state(hit[0])} "
                    f"has no matching timed step from {ts}",
                )
    return None


def _tick_conditions(machine, abstract, related, tick, ts, delays, r, pair):
    hit = abstract.successor(r, tick)
    for t in delays:
        after = delay_timeout(machine, ts, t)
        if hit is None or hit[1] is not tick or not related(after, hit[0]):
            return BisimulationViolation(
                1, pair, tick, f"delay {t} from {ts} reaches {after} with no matching {tick} step",
            )
    if hit is not None and hit[1] is tick:
        for t in delays:
            after = delay_timeout(machine, ts, t)
            if not related(after, hit[0]):
                return BisimulationViolation(
                    2, pair, tick, f"{tick} step to {format_state(hit[0])} is not matched by delay {t}",
                )
    return None


def _check_one(machine, abstract, pairs):
    related = _Membership(pairs)
    cap = max_constant(machine) + 1
    for (state, cls), _ in pairs:
        if cls.hi is not INF:
            cap = max(cap, cls.hi)
        cap = max(cap, cls.lo + 1)
    for (state, cls), r in pairs:
        top = cls.hi if cls.hi is not INF else cap + 1
        for m in range(cls.lo, top):
            for x in (Fraction(m), Fraction(2 * m + 1, 2)):
                ts = TimedState(state, x)
                base = floor(x)
                # delays reaching the next integer part, landing on and past it
                delays = (base + 1 - x, base + Fraction(3, 2) - x)
                found = _tick_conditions(machine, abstract, related, Tick.ONE, ts, delays, r, ((state, cls), r))
                found = found or _io_conditions(machine, abstract, related, ts, r, ((state, cls), r), (3, 4))
                if found:
                    return found
    return None


def _check_half(machine, abstract, pairs):
    related = _Membership(pairs)
    for (state, region), r in pairs:
        x = region.representative()
        ts = TimedState(state, x)
        t = Fraction(1, 2) if x.denominator == 1 else ceil(x) - x
        pair = ((state, region), r)
        found = _tick_conditions(machine, abstract, related, Tick.HALF, ts, (t,), r, pair)
        found = found or _io_conditions(machine, abstract, related, ts, r, pair, (3, 4))
        if found:
            return found
    return None

