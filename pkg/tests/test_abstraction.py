import random
from fractions import Fraction

import pytest

from oracles import in_guard
from helpers import INF, general, gt, guarded, timeout, word
from tfsm.abstraction import (
    Region,
    Tick,
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
from tfsm.core import untime
from tfsm.sampling import GENERATORS, random_word
from tfsm.semantics import run
from tfsm.transform import embed

F = Fraction
P, O, T = Region.point, Region.open, Region.tail
ONE, HALF = Tick.ONE, Tick.HALF


class TestIntervalSet:
    def test_n1(self):
        assert interval_set(1) == (P(0), O(0), P(1), T(1))
        assert [str(r) for r in interval_set(1)] == ["[0,0]", "(0,1)", "[1,1]", "(1,inf)"]

    def test_n2(self):
        regions = interval_set(2)
        assert len(regions) == 6 and regions[-1] == T(2)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            interval_set(0)

    def test_parse_round_trip(self):
        for r in interval_set(3):
            assert Region.parse(str(r)) == r

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_partition(self, n):
        regions = interval_set(n)
        for q in range(1, 9):
            for k in range(0, (n + 2) * q + 1):
                x = F(k, q)
                hits = [r for r in regions if in_guard(r.as_guard(), x)]
                assert hits == [classify(x, n)]


class TestClassify:
    def test_examples(self):
        assert classify(1, 1) == P(1)
        assert classify(F(9, 5), 1) == T(1)
        assert classify(F(1, 2), 3) == O(0)
        assert F(3, 2) in T(1).as_guard()


class TestWordAbstractions:
    def test_regions(self):
        assert abstract_word_regions(word(("i", "1/2"), ("i", "23/10")), 1) == (("i", O(0)), ("i", T(1)))
        assert abstract_word_regions(word(("i", 1)), 1) == (("i", P(1)),)
        assert abstract_word_regions(word(("i", 3), ("i", 3)), 2) == (("i", T(2)), ("i", P(0)))

    def test_one(self):
        assert abstract_word_one(word(("i", "5/2"), ("i", "16/5"))) == (ONE, ONE, "i", "i")
        assert abstract_word_one(word(("i", "1/2"))) == ("i",)
        assert abstract_word_one(word(("i", 3))) == (ONE, ONE, ONE, "i")

    def test_tick(self):
        assert abstract_word_tick(word(("i", "5/2"))) == (HALF,) * 5 + ("i",)
        assert abstract_word_tick(word(("i", 2))) == (HALF,) * 4 + ("i",)
        assert abstract_word_tick(word(("i", 0))) == ("i",)

    def test_tick_parity_encodes_integrality(self):
        rng = random.Random(4)
        for _ in range(300):
            w = random_word(rng, ("a", "b"), max_denominator=8)
            runs, count = [], 0
            for sym in abstract_word_tick(w):
                if sym is HALF:
                    count += 1
                else:
                    runs.append(count)
                    count = 0
            assert [r % 2 == 0 for r in runs] == [d.denominator == 1 for d in w.delays()]


class TestGuardedAbstraction:
    def test_region_abstraction_of_fixture(self, fig1a):
        fsm = abstract_guarded(fig1a, 1)
        assert set(fsm.states) == {"s0", "s1"} and fsm.initial == "s0"
        assert fsm.transitions == {
            ("s0", ("i", P(0))): ("s0", "o1"),
            ("s0", ("i", O(0))): ("s0", "o1"),
            ("s0", ("i", P(1))): ("s0", "o1"),
            ("s0", ("i", T(1))): ("s1", "o2"),
            ("s1", ("i", P(0))): ("s1", "o2"),
            ("s1", ("i", O(0))): ("s1", "o2"),
            ("s1", ("i", P(1))): ("s0", "o1"),
            ("s1", ("i", T(1))): ("s0", "o1"),
        }

    def test_full_cover(self):
        fsm = abstract_guarded(guarded(gt("s", "[0,inf)", "i", "o1", "s")), 1)
        assert len(fsm.transitions) == 4
        assert {v for v in fsm.transitions.values()} == {("s", "o1")}

    def test_larger_bound(self, fig1a):
        fsm = abstract_guarded(fig1a, 2)
        assert len(fsm.transitions) == 12
        for r in (O(1), P(2), T(2)):
            assert fsm.transitions["s0", ("i", r)] == ("s1", "o2")
            assert fsm.transitions["s1", ("i", r)] == ("s0", "o1")

    def test_bound_below_constant_rejected(self, m2):
        with pytest.raises(ValueError):
            abstract_guarded(m2, 1)


class TestTimeoutAbstraction:
    def test_one_tick_abstraction_of_fixture(self, fig2a):
        fsm = abstract_timeout(fig2a)
        assert set(fsm.states) == {("q0", 0), ("q0", 1), ("q0", 2), ("q1", 0), ("q1", 1)}
        chain = [("q0", 0), ("q0", 1), ("q0", 2), ("q1", 0), ("q1", 1), ("q0", 0)]
        for a, b in zip(chain, chain[1:]):
            assert fsm.transitions[a, ONE] == (b, ONE)
        for s in fsm.states:
            out = "o1" if s[0] == "q0" else "o2"
            assert fsm.transitions[s, "i"] == ((s[0], 0), out)
        assert len(fsm.transitions) == 10

    def test_infinite_self_loop(self):
        m = timeout([("s", "i", "o1", "s")], {"s": ("s", INF)})
        fsm = abstract_timeout(m)
        assert fsm.states == (("s", 0),)
        assert fsm.transitions == {(("s", 0), ONE): (("s", 0), ONE), (("s", 0), "i"): (("s", 0), "o1")}

    def test_m1_toggles(self, m1):
        fsm = abstract_timeout(m1)
        assert set(fsm.states) == {("q0", 0), ("q1", 0)}
        assert fsm.transitions[("q0", 0), ONE] == (("q1", 0), ONE)
        assert fsm.transitions[("q1", 0), ONE] == (("q0", 0), ONE)


class TestGeneralAbstraction:
    def test_half_tick_abstraction_of_fixture(self, fig3a):
        fsm = abstract_general(fig3a)
        chain = [("s0", P(0)), ("s0", O(0)), ("s1", P(0)), ("s1", O(0)), ("s1", P(1)), ("s1", T(1))]
        assert set(fsm.states) == set(chain)
        for a, b in zip(chain, chain[1:] + chain[-1:]):
            assert fsm.transitions[a, HALF] == (b, HALF)
        for s in chain[:2]:
            assert fsm.transitions[s, "i"] == (("s0", P(0)), "o1")
        for s in chain[2:5]:
            assert fsm.transitions[s, "i"] == (("s1", P(0)), "o2")
        assert fsm.transitions[("s1", T(1)), "i"] == (("s0", P(0)), "o1")
        assert len(fsm.transitions) == 12

    def test_embedded_m2(self, m2):
        fsm = abstract_general(embed(m2))
        assert len(fsm.states) == 6
        assert fsm.transitions[("q0", T(2)), HALF] == (("q0", T(2)), HALF)

    def test_single_infinite_state(self):
        m = general([gt("s", "[0,inf)", "i", "o1", "s")], {"s": ("s", INF)})
        fsm = abstract_general(m)
        assert set(fsm.states) == {("s", r) for r in interval_set(1)}
        assert all(fsm.transitions[s, "i"] == (("s", P(0)), "o1") for s in fsm.states)


def test_dispatch(fig1a, fig2a, fig3a):
    assert abstract(fig1a).kind == "region"
    assert abstract(fig2a).kind == "one"
    assert abstract(fig3a).kind == "half"


@pytest.mark.parametrize("kind", ["guarded", "timeout", "general"])
def test_commuting_identity(kind):
    rng = random.Random({"guarded": 1, "timeout": 2, "general": 3}[kind])
    for _ in range(150):
        m = GENERATORS[kind](rng)
        fsm = abstract(m)
        w = random_word(rng, m.inputs)
        out = run(m, w).outputs
        if kind == "guarded":
            assert fsm.output(abstract_word_regions(w, fsm.bound)) == untime(out)
        elif kind == "timeout":
            assert fsm.output(abstract_word_one(w)) == abstract_word_one(out)
        else:
            assert fsm.output(abstract_word_tick(w)) == abstract_word_tick(out)


@pytest.mark.parametrize("kind", ["guarded", "timeout", "general"])
def test_abstractions_complete(kind):
    rng = random.Random(30)
    for _ in range(50):
        assert abstract(GENERATORS[kind](rng)).is_complete()
