"""Strategy machines: conformance checkers, synthesis, play verification."""

from functools import lru_cache

import pytest

from nmemory.core import INPUT, OUTPUT, ParseError, WordSpec
from nmemory.fixtures import build_fixture
from nmemory.solver import Certificate, solve
from nmemory.synth import (NonTermination, SynthesisUnsupported,
                           build_strategy_checker, parse_transducer,
                           periodic_play, role_shift, run_transducer,
                           serialize_transducer, synthesize_transducer,
                           validate_transducer, verify_play)


@lru_cache(maxsize=None)
def solved(name):
    automaton = build_fixture(name)
    return automaton, solve(automaton)


@lru_cache(maxsize=None)
def machine_for(name):
    automaton, result = solved(name)
    return synthesize_transducer(automaton, result.certificate)


def machine_columns(macro, transcript, role):
    """Replay the transcript; yield (vertex, played) at machine columns."""
    vertex = macro.initial
    for side, value in transcript.moves:
        if side == role:
            yield vertex, value
        _, vertex = macro.step(vertex, value)


def test_the_copy_machine_echoes_its_input():
    automaton, _ = solved("game_copy")
    machine = machine_for("game_copy")
    transcript = run_transducer(machine, [7, 3, 0, 12])
    assert transcript.values() == (7, 7, 3, 3, 0, 0, 12, 12)
    assert verify_play(automaton, transcript)
    assert validate_transducer(machine) == []


def test_the_successor_machine_adds_one():
    automaton, _ = solved("game_successor")
    machine = machine_for("game_successor")
    transcript = run_transducer(machine, [5, 0, 9, 41])
    assert transcript.values() == (5, 6, 0, 1, 9, 10, 41, 42)
    assert transcript.moves[1] == (OUTPUT, 6)
    assert verify_play(automaton, transcript)


def test_machines_emit_the_least_conforming_value():
    for name in ("game_copy", "game_successor"):
        _, result = solved(name)
        machine = machine_for(name)
        macro, table = result.macro, result.certificate.strategy
        params = macro.table.params
        transcript = run_transducer(machine, [6, 2, 11])
        for vertex, played in machine_columns(macro, transcript, OUTPUT):
            state, mem = vertex
            move = table.concrete_move(params, state, mem)
            prescribed = macro.step(vertex, move)
            least = next(m for m in range(played + 1)
                         if macro.step(vertex, m) == prescribed)
            assert played == least


def test_memory_tokens_stay_synchronized():
    _, result = solved("game_copy")
    machine = machine_for("game_copy")
    macro = result.macro
    transcript = run_transducer(machine, [4, 0, 13, 2, 8])
    vertex = macro.initial
    for column in transcript.columns:
        _, vertex = macro.step(vertex, column.value)
        assert column.exit_mem == vertex[1]


def test_the_checker_accepts_exactly_the_prescribed_crossings():
    _, result = solved("game_copy")
    macro, table = result.macro, result.certificate.strategy
    params = macro.table.params
    checker = build_strategy_checker(macro, table)
    positions = sorted(table.explicit)
    positions += [(state, table.threshold + k)
                  for state, _ in table.periodic
                  for k in range(2 * params.period + 1)]
    for state, mem in positions:
        move = table.concrete_move(params, state, mem)
        if move is None:
            continue
        prescribed = macro.step((state, mem), move)
        for m in range(mem + checker.gap_cap + 2):
            prio, (land, upd) = macro.step((state, mem), m)
            hit = checker.accepts(state, land, mem, upd, prio)
            assert hit == ((prio, (land, upd)) == prescribed), \
                f"{state} i={mem} m={m}"


def test_the_checker_rejects_perturbed_landings():
    _, result = solved("game_successor")
    macro, table = result.macro, result.certificate.strategy
    params = macro.table.params
    checker = build_strategy_checker(macro, table)
    for state, mem in sorted(table.explicit)[:12]:
        move = table.concrete_move(params, state, mem)
        prio, (land, upd) = macro.step((state, mem), move)
        assert checker.accepts(state, land, mem, upd, prio)
        assert not checker.accepts(state, land, mem, upd + 1, prio)
        assert not checker.accepts(state, land, mem, upd, prio + 1)
        for other in macro.automaton.states:
            if other != land:
                assert not checker.accepts(state, other, mem, upd, prio)


def test_periodic_plays_fold_and_verify():
    automaton, _ = solved("game_successor")
    machine = machine_for("game_successor")
    play = periodic_play(machine, WordSpec((), (4,)))
    assert play.loop and verify_play(automaton, play)
    assert play.value(0) == 4 and play.value(1) == 5
    corrupted = WordSpec(play.prefix, play.loop[:-1] + (play.loop[-1] + 1,))
    assert not verify_play(automaton, corrupted)


def test_the_predict_machine_dodges_every_prediction():
    automaton, result = solved("game_predict")
    assert result.winner == INPUT
    machine = role_shift(automaton, result.certificate)
    assert machine.role == INPUT
    for guesses in ([0, 0, 0, 0, 0], [3, 1, 4, 1, 5], [9, 9, 9, 9, 9]):
        transcript = run_transducer(machine, guesses)
        values = transcript.values()
        chosen, predicted = values[0::2], values[1::2]
        assert any(chosen[k + 1] != predicted[k]
                   for k in range(len(predicted) - 1))
    for loop in ((0,), (7,), (0, 2)):
        play = periodic_play(machine, WordSpec((), loop))
        assert not verify_play(automaton, play)


def test_machine_files_roundtrip():
    machine = machine_for("game_copy")
    text = serialize_transducer(machine)
    reloaded = parse_transducer(text)
    assert validate_transducer(reloaded) == []
    assert reloaded.role == machine.role
    for inputs in ([1, 2, 3], [0, 0], [25]):
        assert (run_transducer(reloaded, inputs).moves
                == run_transducer(machine, inputs).moves)


def test_malformed_machine_files_are_rejected():
    with pytest.raises(ParseError) as err:
        parse_transducer("states: a\ninit: a\nrole: O\ntrans: a # 0 0 -> a U\n")
    assert err.value.line_no == 4
    with pytest.raises(ParseError):
        parse_transducer("states: a\ninit: a\n")


def test_synthesis_requires_a_usable_certificate():
    automaton, result = solved("game_copy")
    with pytest.raises(SynthesisUnsupported):
        synthesize_transducer(automaton, None)
    cert = result.certificate
    broken = Certificate(cert.role, cert.strategy, False, "not checked")
    with pytest.raises(SynthesisUnsupported):
        synthesize_transducer(automaton, broken)
    with pytest.raises(SynthesisUnsupported):
        role_shift(automaton, cert)


def test_divergent_prescriptions_are_refused():
    automaton, result = solved("game_unbounded")
    with pytest.raises(SynthesisUnsupported):
        synthesize_transducer(automaton, result.certificate)


def test_empty_and_overlong_runs():
    machine = machine_for("game_copy")
    transcript = run_transducer(machine, [5], rounds=0)
    assert transcript.moves == () and transcript.columns == ()
    with pytest.raises(ValueError):
        run_transducer(machine, [5], rounds=3)
    with pytest.raises(NonTermination):
        run_transducer(machine, [3], budget=10)
