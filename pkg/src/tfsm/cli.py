"""Command-line interface.

Exit codes: 0 success (or equivalent), 1 machines not equivalent, 2 any
precondition failure (unreadable or invalid input, inapplicable conversion,
alphabet mismatch).
"""

from __future__ import annotations

import argparse
import sys

from . import io
from .abstraction import abstract, format_symbol
from .core import ValidationError, format_rational, validate
from .equivalence import AlphabetMismatch
from .semantics import run
from .transform import (
    NotLcro,
    NotLoopFree,
    cross_equivalent,
    embed,
    lcro_guarded_to_timeout,
    loopfree_timeout_to_guarded,
)

OK, DIFFERENT, FAILED = 0, 1, 2


class Failure(Exception):
    def __init__(self, kind: str, message: str, **extra):
        super().__init__(message)
        self.kind = kind
        self.extra = extra


def _out(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path, *, check=True):
    try:
        return io.load_machine(path, validate=check)
    except OSError as exc:
        raise Failure("IOError", f"{path}: {exc.strerror}") from None
    except io.ParseError as exc:
        raise Failure("ParseError", f"{path}: {exc}") from None
    except ValidationError as exc:
        raise Failure(
            "ValidationError", f"{path}: invalid machine\n{exc.report}",
            violations=[v.message for v in exc.report.violations],
        ) from None


def cmd_validate(args) -> int:
    machine = _load(args.machine, check=False)
    report = validate(machine)
    if args.json:
        _out(args, io.dumps({
            "ok": report.ok,
            "violations": [
                {
                    "kind": v.kind,
                    "message": v.message,
                    "state": v.state,
                    "input": v.input,
                    "witness": None if v.witness is None else format_rational(v.witness),
                }
                for v in report.violations
            ],
        }))
    else:
        _out(args, f"{args.machine}: {report}\n")
    return OK if report.ok else FAILED


def cmd_simulate(args) -> int:
    machine = _load(args.machine)
    try:
        word = io.load_word(args.word)
    except OSError as exc:
        raise Failure("IOError", f"{args.word}: {exc.strerror}") from None
    except io.ParseError as exc:
        raise Failure("ParseError", f"{args.word}: {exc}") from None
    if args.strict and not word.is_strictly_increasing():
        raise Failure("ParseError", f"{args.word}: timestamps are not strictly increasing")
    result = run(machine, word)
    if args.json:
        doc = {
            "outputs": io.word_to_list(result.outputs),
            "final": {"state": result.final.state, "clock": format_rational(result.final.clock)},
        }
        if args.trace:
            doc["trace"] = [str(s) for s in result.trace.steps]
        _out(args, io.dumps(doc))
    else:
        lines = [str(result.outputs)]
        if args.trace:
            lines += [str(s) for s in result.trace.steps]
        _out(args, "\n".join(lines) + "\n")
    return OK


def cmd_abstract(args) -> int:
    machine = _load(args.machine)
    if args.n is not None and machine.kind == "timeout":
        raise Failure("UsageError", "--n applies to guarded and general machines only")
    try:
        fsm = abstract(machine, args.n)
    except ValueError as exc:
        raise Failure("UsageError", str(exc)) from None
    _out(args, io.dumps(io.fsm_to_dict(fsm)))
    return OK


def _report(verdict, a_name, b_name) -> str:
    if verdict.equivalent:
        return f"{a_name} and {b_name} are equivalent\n"
    cex = verdict.counterexample
    return "\n".join([
        f"{a_name} and {b_name} are not equivalent",
        f"abstract word: {' '.join(format_symbol(s) for s in cex.abstract_word)}",
        f"timed word:    {cex.word}",
        f"outputs of A:  {cex.outputs_a}",
        f"outputs of B:  {cex.outputs_b}",
        f"first difference at index {cex.index}",
    ]) + "\n"


def cmd_equiv(args) -> int:
    a, b = _load(args.a), _load(args.b)
    try:
        verdict = cross_equivalent(a, b)
    except AlphabetMismatch as exc:
        raise Failure("AlphabetMismatch", str(exc)) from None
    if args.json:
        _out(args, io.dumps(io.verdict_to_dict(verdict)))
    else:
        _out(args, _report(verdict, args.a, args.b))
    return OK if verdict.equivalent else DIFFERENT


def cmd_convert(args) -> int:
    machine = _load(args.machine)
    try:
        if args.to == "guarded" and machine.kind == "timeout":
            result = loopfree_timeout_to_guarded(machine)
        elif args.to == "timeout" and machine.kind == "guarded":
            result = lcro_guarded_to_timeout(machine)
        else:
            raise Failure("UsageError", f"cannot convert a {machine.kind} machine to {args.to}")
    except NotLoopFree as exc:
        raise Failure("NotLoopFree", str(exc), cycle=exc.cycle) from None
    except NotLcro as exc:
        raise Failure("NotLcro", str(exc), guard=str(exc.transition.guard)) from None
    _out(args, io.serialize_machine(result))
    return OK


def cmd_embed(args) -> int:
    _out(args, io.serialize_machine(embed(_load(args.machine))))
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfsm", description="Timed finite state machine toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="machine-readable report")
        return p

    p = command("validate", cmd_validate, "check completeness and determinism")
    p.add_argument("machine")

    p = command("simulate", cmd_simulate, "run a machine on a timed input word")
    p.add_argument("machine")
    p.add_argument("word")
    p.add_argument("--trace", action="store_true", help="show every delay and input/output step")
    p.add_argument("--strict", action="store_true", help="require strictly increasing timestamps")

    p = command("abstract", cmd_abstract, "write the untimed abstraction as JSON")
    p.add_argument("machine")
    p.add_argument("--n", type=int, default=None, help="region bound (default: the machine constant)")
    p.add_argument("-o", "--output")

    p = command("equiv", cmd_equiv, "decide equivalence of two machines of any variants")
    p.add_argument("a")
    p.add_argument("b")

    p = command("convert", cmd_convert, "convert between timeout and guarded machines")
    p.add_argument("machine")
    p.add_argument("--to", choices=("guarded", "timeout"), required=True)
    p.add_argument("-o", "--output")

    p = command("embed", cmd_embed, "embed a machine into the general variant")
    p.add_argument("machine")
    p.add_argument("-o", "--output")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Failure as exc:
        if args.json:
            sys.stdout.write(io.dumps({"error": exc.kind, "message": str(exc), **exc.extra}))
        else:
            sys.stderr.write(f"error: {exc.kind}: {exc}\n")
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
