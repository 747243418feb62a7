"""JSON documents for machines, timed words, abstractions and verdicts.

Serialization is canonical: keys are sorted, transitions appear in the
machine's canonical order, rationals are written as ``"p/q"`` strings and
the unbounded endpoint as ``"inf"``.
"""

from __future__ import annotations

import json
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any

from .abstraction import Region, Tick, UntimedFsm
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
    ensure_valid,
    format_rational,
)
from .equivalence import EquivalenceVerdict


class ParseError(ValueError):
    """Malformed document; ``where`` names the offending field."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


KINDS = ("guarded", "timeout", "general")


def _loads(text: str) -> Any:
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{exc.msg} (line {exc.lineno}, column {exc.colno})") from None


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _field(obj, key, where, kind=None):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", where)
    if key not in obj:
        raise ParseError(f"missing field {key!r}", where)
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"expected {kind.__name__}", f"{where}.{key}" if where else key)
    return value


def _names(obj, key) -> list[str]:
    values = _field(obj, key, "", list)
    for k, v in enumerate(values):
        if not isinstance(v, str):
            raise ParseError("expected a string", f"{key}[{k}]")
    return values


def _int(value, where) -> int:
    if isinstance(value, bool):
        raise ParseError("expected an integer", where)
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.strip().lstrip("-").isdigit():
        return int(value)
    raise ParseError(f"expected an integer, got {value!r}", where)


def _bound(value, where):
    if value == "inf":
        return INF
    return _int(value, where)


def _guard(obj, where) -> Guard:
    try:
        return Guard(
            _int(_field(obj, "lower", where), f"{where}.lower"),
            _bound(_field(obj, "upper", where), f"{where}.upper"),
            _field(obj, "lower_closed", where, bool),
            _field(obj, "upper_closed", where, bool),
        )
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), where) from None


def machine_from_dict(doc: dict, *, validate: bool = True):
    kind = _field(doc, "kind", "", str)
    if kind not in KINDS:
        raise ParseError(f"unknown machine kind {kind!r}", "kind")
    common = dict(
        states=tuple(_names(doc, "states")),
        inputs=tuple(_names(doc, "inputs")),
        outputs=tuple(_names(doc, "outputs")),
        initial=_field(doc, "initial", "", str),
    )
    transitions = []
    for k, tr in enumerate(_field(doc, "transitions", "", list)):
        where = f"transitions[{k}]"
        parts = [_field(tr, name, where, str) for name in ("source", "input", "output", "target")]
        if kind == "timeout":
            if "guard" in tr:
                raise ParseError("timeout machines carry no guards", where)
            transitions.append(Transition(*parts))
        else:
            guard = _guard(_field(tr, "guard", where, dict), f"{where}.guard")
            transitions.append(GuardedTransition(parts[0], parts[1], guard, parts[2], parts[3]))
    common["transitions"] = tuple(transitions)
    if kind == "guarded":
        if "timeouts" in doc:
            raise ParseError("guarded machines carry no timeouts", "timeouts")
        machine = GuardedMachine(**common)
    else:
        timeouts = {}
        for state, entry in _field(doc, "timeouts", "", dict).items():
            where = f"timeouts.{state}"
            timeouts[state] = Timeout(
                _field(entry, "target", where, str),
                _bound(_field(entry, "duration", where), f"{where}.duration"),
            )
        cls = TimeoutMachine if kind == "timeout" else GeneralMachine
        machine = cls(**common, timeouts=timeouts)
    return ensure_valid(machine) if validate else machine


def parse_machine(text: str, *, validate: bool = True):
    """Parse and (by default) validate a machine document."""
    return machine_from_dict(_loads(text), validate=validate)


def load_machine(path, *, validate: bool = True):
    with open(path, encoding="utf-8") as fh:
        return parse_machine(fh.read(), validate=validate)


def guard_to_dict(g: Guard) -> dict:
    return {
        "lower": g.lower,
        "lower_closed": g.lower_closed,
        "upper": "inf" if g.upper is INF else g.upper,
        "upper_closed": g.upper_closed,
    }


def machine_to_dict(machine) -> dict:
    doc = {
        "kind": machine.kind,
        "states": list(machine.states),
        "inputs": list(machine.inputs),
        "outputs": list(machine.outputs),
        "initial": machine.initial,
    }
    transitions = []
    for tr in machine.transitions:
        entry = {"source": tr.source, "input": tr.input, "output": tr.output, "target": tr.target}
        if machine.kind != "timeout":
            entry["guard"] = guard_to_dict(tr.guard)
        transitions.append(entry)
    doc["transitions"] = transitions
    if machine.kind != "guarded":
        doc["timeouts"] = {
            s: {"target": e.target, "duration": "inf" if e.duration is INF else e.duration}
            for s, e in machine.timeouts.items()
        }
    return doc


def serialize_machine(machine) -> str:
    return dumps(machine_to_dict(machine))


# -- timed words --------------------------------------------------------------


def _timestamp(value, where) -> Fraction:
    if isinstance(value, bool):
        raise ParseError("expected a timestamp", where)
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return Fraction(text)
            return Fraction(Decimal(text))
        except (ValueError, ZeroDivisionError, InvalidOperation, OverflowError):
            pass
    raise ParseError(f"not an exact rational: {value!r}", where)


def word_from_list(doc) -> TimedWord:
    if not isinstance(doc, list):
        raise ParseError("a timed word is a list of {symbol, timestamp} objects")
    entries = []
    for k, item in enumerate(doc):
        where = f"[{k}]"
        entries.append((_field(item, "symbol", where, str), _timestamp(_field(item, "timestamp", where), f"{where}.timestamp")))
    try:
        return TimedWord(entries)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_word(text: str) -> TimedWord:
    return word_from_list(_loads(text))


def load_word(path) -> TimedWord:
    with open(path, encoding="utf-8") as fh:
        return parse_word(fh.read())


def word_to_list(word: TimedWord) -> list:
    return [{"symbol": a, "timestamp": format_rational(t)} for a, t in word]


# -- abstractions -------------------------------------------------------------


def symbol_to_json(symbol):
    if isinstance(symbol, Tick):
        return {"tick": symbol.value}
    if isinstance(symbol, tuple):
        return {"input": symbol[0], "region": str(symbol[1])}
    return symbol


def symbol_from_json(value):
    if isinstance(value, str):
        return value
    if isinstance(value, dict) and "tick" in value:
        return Tick(value["tick"])
    if isinstance(value, dict) and "input" in value:
        return (value["input"], Region.parse(value["region"]))
    raise ParseError(f"not an abstract symbol: {value!r}")


def abstract_state_to_json(fsm: UntimedFsm, state) -> dict:
    if fsm.kind == "one":
        return {"state": state[0], "index": state[1]}
    if fsm.kind == "half":
        return {"state": state[0], "region": str(state[1])}
    return {"state": state}


def fsm_to_dict(fsm: UntimedFsm) -> dict:
    enc = lambda s: abstract_state_to_json(fsm, s)  # noqa: E731
    return {
        "kind": fsm.kind,
        "bound": fsm.bound,
        "initial": enc(fsm.initial),
        "states": [enc(s) for s in fsm.states],
        "alphabet": [symbol_to_json(a) for a in fsm.alphabet],
        "outputs": [symbol_to_json(o) for o in fsm.outputs],
        "transitions": [
            {
                "source": enc(src),
                "symbol": symbol_to_json(sym),
                "output": symbol_to_json(out),
                "target": enc(dst),
            }
            for (src, sym), (dst, out) in fsm.transitions.items()
        ],
    }


# -- verdicts -----------------------------------------------------------------


def _outputs_to_json(outputs):
    if isinstance(outputs, TimedWord):
        return word_to_list(outputs)
    return [symbol_to_json(o) for o in outputs]


def verdict_to_dict(verdict: EquivalenceVerdict) -> dict:
    if verdict.equivalent:
        return {"equivalent": True}
    cex = verdict.counterexample
    return {
        "equivalent": False,
        "abstract_word": [symbol_to_json(a) for a in cex.abstract_word],
        "word": None if cex.word is None else word_to_list(cex.word),
        "outputs_a": _outputs_to_json(cex.outputs_a),
        "outputs_b": _outputs_to_json(cex.outputs_b),
        "index": cex.index,
    }

