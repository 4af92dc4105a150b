"""Command-line front end: analysis commands, game solving, interactive play.

Exit codes: 0 ok, 2 validation failure, 3 no certified winner within the
budget, 4 budget exceeded, 5 parse error.  Environment variables
NMEMORY_HEIGHT, NMEMORY_MAX_HEIGHT and NMEMORY_LIMIT override the default
solving budgets where the matching flags are not given.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .column import BudgetError
from .core import (INPUT, OUTPUT, DivergenceError, ParseError, WordSpec,
                   accepts_omega, parse_automaton, simulate_word, validate)
from .solver import is_empty, solve
from .synth import (NonTermination, parse_transducer, run_transducer,
                    serialize_transducer, step_column, synthesize_transducer)

OK, VALIDATION, UNKNOWN, BUDGET, PARSE = 0, 2, 3, 4, 5

_ROLE_NAME = {OUTPUT: "Output", INPUT: "Input"}


def _env_int(name):
    raw = os.environ.get(name)
    return int(raw) if raw else None


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as err:
        raise ParseError(0, f"cannot read {path}: {err.strerror}")


def _numbers(text):
    values = []
    for token in text.split():
        if not token.isdigit():
            raise ValueError(f"not a natural number: {token}")
        values.append(int(token))
    return tuple(values)


def _budgets(args):
    height = args.height if args.height is not None \
        else _env_int("NMEMORY_HEIGHT")
    max_height = args.max_height if args.max_height is not None \
        else _env_int("NMEMORY_MAX_HEIGHT") or 2 ** 14
    limit = args.limit if args.limit is not None \
        else _env_int("NMEMORY_LIMIT") or 4_000_000
    return height, max_height, limit


def certificate_text(result) -> str:
    """Human- and machine-readable summary of a solved game."""
    cert = result.certificate
    table = cert.strategy
    lines = [f"winner: {cert.role}",
             f"height: {result.height}",
             f"threshold: {table.threshold}",
             f"period: {table.period}",
             f"verdict: {cert.reason}"]
    lines += [f"rule: {line}" for line in table.lines()]
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------

def cmd_validate(args):
    automaton = parse_automaton(_read(args.file))
    problems = validate(automaton)
    for problem in problems:
        print(problem)
    if problems:
        return VALIDATION
    print(f"ok: {len(automaton.states)} states, "
          f"{len(automaton.transitions)} transitions")
    return OK


def cmd_simulate(args):
    automaton = parse_automaton(_read(args.file))
    word = _numbers(" ".join(args.numbers))
    try:
        traces = simulate_word(automaton, word)
    except DivergenceError as err:
        verdict = "accepting" if err.max_inf % 2 == 0 else "rejecting"
        print(f"diverges in column {err.column} "
              f"(max priority {err.max_inf}, {verdict})")
        return OK
    for k, trace in enumerate(traces):
        print(f"col {k}: value {trace.value} {trace.entry_state} -> "
              f"{trace.exit_state} mem={trace.exit_mem} "
              f"max={trace.col_max} h={trace.exit_height}")
    return OK


def cmd_member(args):
    automaton = parse_automaton(_read(args.file))
    word = WordSpec(_numbers(args.prefix), _numbers(args.loop))
    print("accept" if accepts_omega(automaton, word) else "reject")
    return OK


def cmd_empty(args):
    automaton = parse_automaton(_read(args.file))
    print("empty" if is_empty(automaton) else "nonempty")
    return OK


def cmd_solve(args):
    automaton = parse_automaton(_read(args.file))
    height, max_height, limit = _budgets(args)
    result = solve(automaton, height=height, max_height=max_height,
                   limit=limit)
    if result.winner is None:
        print(f"unknown: no certified winner within height {result.height}")
        for role, why in result.attempts:
            print(f"  tried {_ROLE_NAME[role]}: {why}")
        return UNKNOWN
    print(f"winner: {_ROLE_NAME[result.winner]}")
    print(f"verdict: {result.certificate.reason}")
    if args.emit_cert:
        Path(args.emit_cert).write_text(certificate_text(result))
        print(f"certificate written to {args.emit_cert}")
    if args.dump_r:
        Path(args.dump_r).write_text(result.macro.table.serialize())
        print(f"exit table written to {args.dump_r}")
    return OK


def cmd_synthesize(args):
    automaton = parse_automaton(_read(args.file))
    height, max_height, limit = _budgets(args)
    result = solve(automaton, height=height, max_height=max_height,
                   limit=limit)
    if result.winner is None:
        print(f"unknown: no certified winner within height {result.height}")
        return UNKNOWN
    machine = synthesize_transducer(automaton, result.certificate)
    Path(args.out).write_text(serialize_transducer(machine))
    print(f"winner: {_ROLE_NAME[result.winner]}; machine with "
          f"{len(machine.states)} states written to {args.out}")
    return OK


def cmd_run(args):
    machine = parse_transducer(_read(args.file))
    if args.input is not None:
        inputs = _numbers(args.input)
        rounds = args.rounds if args.rounds is not None else len(inputs)
    elif args.loop is not None:
        if args.rounds is None:
            print("--rounds is required with --prefix/--loop",
                  file=sys.stderr)
            return VALIDATION
        spec = WordSpec(_numbers(args.prefix), _numbers(args.loop))
        rounds = args.rounds
        inputs = [spec.value(k) for k in range(rounds)]
    else:
        print("one of --input or --loop is required", file=sys.stderr)
        return VALIDATION
    transcript = run_transducer(machine, inputs, rounds=rounds)
    for side, value in transcript.moves:
        print(f"{side} {value}")
    return OK


def cmd_play(args):
    automaton = parse_automaton(_read(args.file))
    height, max_height, limit = _budgets(args)
    result = solve(automaton, height=height, max_height=max_height,
                   limit=limit)
    if result.winner is None:
        print(f"unknown: no certified winner within height {result.height}")
        return UNKNOWN
    human = INPUT if args.side == "input" else OUTPUT
    if human == result.winner:
        print(f"the certified winner is {_ROLE_NAME[result.winner]}; "
              f"the machine must play that side "
              f"(choose --as {'output' if human == INPUT else 'input'})")
        return VALIDATION
    machine = synthesize_transducer(automaton, result.certificate)
    print(f"machine plays {_ROLE_NAME[result.winner]}; "
          f"you play {_ROLE_NAME[human]}; enter naturals, "
          f":history :state :quit")
    return _repl(machine, result.macro, human, args)


def _repl(machine, macro, human, args):
    state, mem = machine.initial, 0
    vertex = macro.initial
    record = []
    moves = []
    round_no = 0
    machine_first = machine.role == INPUT

    def machine_move():
        nonlocal state, mem, vertex
        state, mem, played, _, _ = step_column(machine, state, mem, None,
                                               round_no=round_no)
        prio, vertex = macro.step(vertex, played)
        record.append(prio)
        moves.append((machine.role, played))
        print(f"{machine.role} {played}")

    def flush():
        print("transcript:")
        for side, value in moves:
            print(f"{side} {value}")
        if args.save:
            Path(args.save).write_text(
                "".join(f"{side} {value}\n" for side, value in moves))
            print(f"saved to {args.save}")
        return OK

    while True:
        if machine_first and len(moves) % 2 == 0:
            machine_move()
        best = max(record) if record else "-"
        print(f"[round {round_no} | {vertex[0]} mem {vertex[1]} | "
              f"max {best}] {human}> ", end="", flush=True)
        line = sys.stdin.readline()
        if not line:
            print()
            return flush()
        line = line.strip()
        if line == ":quit":
            return flush()
        if line == ":history":
            for side, value in moves:
                print(f"{side} {value}")
            continue
        if line == ":state":
            print(f"round {round_no}, position ({vertex[0]}, {vertex[1]}), "
                  f"priorities {record}")
            continue
        if not line.isdigit():
            print("enter a natural number, or :history :state :quit")
            continue
        value = int(line)
        if value > args.cap:
            print(f"numbers above {args.cap} are rejected; try again")
            continue
        nonloc_state = step_column(machine, state, mem, value,
                                   round_no=round_no)
        state, mem = nonloc_state[0], nonloc_state[1]
        prio, vertex = macro.step(vertex, value)
        record.append(prio)
        moves.append((human, value))
        if not machine_first:
            machine_move()
        round_no += 1


# -- argument parsing --------------------------------------------------

def _solver_flags(sub):
    sub.add_argument("--height", type=int, default=None,
                     help="initial truncation height")
    sub.add_argument("--max-height", type=int, default=None,
                     help="height cap before giving up")
    sub.add_argument("--limit", type=int, default=None,
                     help="pushdown analysis step budget")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nmemory",
        description="memory-automaton games over infinite words of naturals")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an automaton file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("simulate", help="trace a finite word column by column")
    p.add_argument("file")
    p.add_argument("numbers", nargs="+")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("member", help="decide an ultimately periodic word")
    p.add_argument("file")
    p.add_argument("--prefix", default="")
    p.add_argument("--loop", required=True)
    p.set_defaults(fn=cmd_member)

    p = sub.add_parser("empty", help="decide language emptiness")
    p.add_argument("file")
    p.set_defaults(fn=cmd_empty)

    p = sub.add_parser("solve", help="decide the induced game with proof")
    p.add_argument("file")
    _solver_flags(p)
    p.add_argument("--emit-cert", default=None, metavar="PATH")
    p.add_argument("--dump-r", default=None, metavar="PATH")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("synthesize", help="compile the winner into a machine")
    p.add_argument("file")
    p.add_argument("-o", "--out", required=True)
    _solver_flags(p)
    p.set_defaults(fn=cmd_synthesize)

    p = sub.add_parser("run", help="run a machine file against inputs")
    p.add_argument("file")
    p.add_argument("--input", default=None,
                   help="whitespace-separated opponent values")
    p.add_argument("--prefix", default="")
    p.add_argument("--loop", default=None)
    p.add_argument("--rounds", type=int, default=None)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("play", help="play against the certified winner")
    p.add_argument("file")
    p.add_argument("--as", dest="side", choices=("input", "output"),
                   default="input")
    p.add_argument("--cap", type=int, default=10 ** 6)
    p.add_argument("--save", default=None, metavar="PATH")
    _solver_flags(p)
    p.set_defaults(fn=cmd_play)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return PARSE
    except ValueError as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return VALIDATION
    except (BudgetError, NonTermination) as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return BUDGET


if __name__ == "__main__":
    sys.exit(main())
