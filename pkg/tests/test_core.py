"""Automaton model: parsing, validation, micro semantics, normal forms."""

import random

import pytest

from nmemory.core import (Action, ColumnExit, GridLetter, MicroConfiguration,
                          NMemoryAutomaton, ParseError, Transition, WordSpec,
                          accepts_omega, bump_priorities, grid_letter,
                          micro_step, normalize_bottom_exit, parse_automaton,
                          serialize_automaton, simulate_word,
                          split_alternation, validate)
from nmemory.fixtures import FIXTURES, build_fixture, load_fixture


def test_grid_letter():
    assert grid_letter(3, 0) is GridLetter.HASH
    assert grid_letter(3, 1) is GridLetter.ONE
    assert grid_letter(3, 3) is GridLetter.ONE
    assert grid_letter(3, 4) is GridLetter.BOT
    assert grid_letter(0, 1) is GridLetter.BOT


def test_wordspec_indexing():
    w = WordSpec((5, 3), (1, 2))
    assert [w.value(k) for k in range(7)] == [5, 3, 1, 2, 1, 2, 1]
    with pytest.raises(ValueError):
        WordSpec((1,), ())


def test_fixtures_validate_clean():
    for name, builder in FIXTURES.items():
        assert validate(builder()) == [], name


def test_parse_round_trip_all_fixtures():
    for name, builder in FIXTURES.items():
        text = serialize_automaton(builder())
        again = parse_automaton(text)
        assert serialize_automaton(again) == text, name
        assert validate(again) == [], name


def test_fixture_files_match_builders():
    for name, builder in FIXTURES.items():
        packaged = serialize_automaton(load_fixture(name))
        assert packaged == serialize_automaton(builder()), name


def test_parse_hash_is_a_letter_not_a_comment():
    text = """
# leading comment line
states: s
init: s   # trailing comment
priority: s=2
trans: s # 0 0 -> s R
trans: s # 0 1 -> s R  extra trailing junk ignored
trans: s # 1 0 -> s R
trans: s # 1 1 -> s R
trans: s 1 0 0 -> s D
trans: s 1 0 1 -> s D
trans: s 1 1 0 -> s D
trans: s 1 1 1 -> s D
trans: s _ 0 0 -> s D
trans: s _ 0 1 -> s D
trans: s _ 1 0 -> s D
trans: s _ 1 1 -> s D
"""
    aut = parse_automaton(text)
    assert validate(aut) == []
    assert aut.rule("s", GridLetter.HASH, 0, 0).action is Action.RIGHT


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as err:
        parse_automaton("states: s\ninit: s\ntrans: s X 0 0 -> s R\n")
    assert "letter" in str(err.value) and "line 3" in str(err.value)
    with pytest.raises(ParseError):
        parse_automaton("states: s\ninit: s\ntrans: s 1 0 0 -> s Z\n")
    with pytest.raises(ParseError):
        parse_automaton("states: s\ninit: s\ntrans: s 1 2 0 -> s U\n")
    with pytest.raises(ParseError):
        parse_automaton("states: s\ninit: s\npriority: s=two\n")
    with pytest.raises(ParseError):
        parse_automaton("states: s\npriority: s=1\n")  # no init
    with pytest.raises(ParseError):
        parse_automaton("init: s\n")  # no states
    with pytest.raises(ParseError):
        parse_automaton("states: s\ninit: s\nwobble: 3\n")


def test_validate_reports_problems():
    def rows_for(q):
        out = []
        for letter in (GridLetter.HASH, GridLetter.ONE, GridLetter.BOT):
            for b1 in (0, 1):
                for b2 in (0, 1):
                    out.append(Transition(q, letter, b1, b2, q, Action.UP))
        return out

    base = rows_for("a")
    ok = NMemoryAutomaton(["a"], "a", base, {"a": 0})
    assert validate(ok) == []

    missing = NMemoryAutomaton(["a"], "a", base[1:], {"a": 0})
    assert any("missing transition" in v for v in validate(missing))

    doubled = NMemoryAutomaton(["a"], "a", base + [base[0]], {"a": 0})
    assert any("nondeterministic" in v for v in validate(doubled))

    down_hash = base[1:] + [Transition("a", GridLetter.HASH, 0, 0, "a", Action.DOWN)]
    assert any("Down on '#'" in v for v in validate(
        NMemoryAutomaton(["a"], "a", down_hash, {"a": 0})))

    stray = base + [Transition("a", GridLetter.ONE, 0, 0, "ghost", Action.UP)]
    assert any("undeclared" in v for v in validate(
        NMemoryAutomaton(["a"], "a", stray, {"a": 0})))

    assert any("priority" in v for v in validate(
        NMemoryAutomaton(["a"], "a", base, {"a": -1})))
    assert any("initial" in v for v in validate(
        NMemoryAutomaton(["a"], "b", base, {"a": 0})))


def test_micro_step_walks_a_column():
    aut = build_fixture("record_input")
    letter_at = lambda h: grid_letter(3, h)
    cfg = MicroConfiguration("s0", 0, 0, 0, 0)
    cfg = micro_step(aut, letter_at, cfg)
    assert (cfg.state, cfg.height) == ("c", 1)
    while cfg.state == "c":
        cfg = micro_step(aut, letter_at, cfg)
    assert (cfg.state, cfg.height) == ("p", 3)  # stepped down off the blank
    cfg = micro_step(aut, letter_at, cfg)
    assert cfg.state == "pp" and cfg.upd == 3  # token placed at the top one
    cfg = micro_step(aut, letter_at, cfg)
    cfg = micro_step(aut, letter_at, cfg)
    cfg = micro_step(aut, letter_at, cfg)
    assert cfg.height == 0
    with pytest.raises(ColumnExit) as ex:
        micro_step(aut, letter_at, cfg)
    assert ex.value.target == "s0"


def test_simulate_word_records_values():
    traces = simulate_word(build_fixture("record_input"), [4, 0, 7])
    assert [t.exit_mem for t in traces] == [4, 0, 7]
    assert all(t.col_max == 2 for t in traces)
    assert all(t.exit_height == 0 for t in traces)


def test_simulate_word_successor_check():
    traces = simulate_word(build_fixture("successors"), [1, 2, 5])
    assert [t.col_max for t in traces] == [2, 2, 1]
    traces = simulate_word(build_fixture("successors"), list(range(1, 21)))
    assert all(t.col_max == 2 for t in traces)
    assert [t.exit_mem for t in traces] == list(range(1, 21))


def _mid_exit_automaton():
    """Climbs to the first blank and switches columns right there."""
    rows = []
    for b1 in (0, 1):
        for b2 in (0, 1):
            rows.append(Transition("r", GridLetter.HASH, b1, b2, "r", Action.UP))
            rows.append(Transition("r", GridLetter.ONE, b1, b2, "r", Action.UP))
            rows.append(Transition("r", GridLetter.BOT, b1, b2, "r", Action.RIGHT))
    return NMemoryAutomaton(["r"], "r", rows, {"r": 2})


def test_normalize_bottom_exit():
    aut = _mid_exit_automaton()
    norm = normalize_bottom_exit(aut)
    assert validate(norm) == []
    for t in norm.transitions:
        if t.action is Action.RIGHT:
            assert t.letter is GridLetter.HASH
    fresh = set(norm.states) - set(aut.states)
    assert fresh and all(norm.priority[q] == aut.min_priority() for q in fresh)
    assert normalize_bottom_exit(norm) is norm
    for word in (WordSpec((), (2,)), WordSpec((3, 0), (1, 5))):
        assert accepts_omega(aut, word) == accepts_omega(norm, word)


def test_split_alternation_roles():
    split = split_alternation(build_fixture("game_copy"))
    assert validate(split) == []
    assert split.initial.endswith("~I") and split.role(split.initial) == "I"
    for t in split.transitions:
        src_role = split.role(t.source)
        dst_role = split.role(t.target)
        if t.action is Action.RIGHT:
            assert dst_role != src_role
        else:
            assert dst_role == src_role
    base = build_fixture("game_copy")
    for q in base.states:
        for role in ("I", "O"):
            assert split.priority[f"{q}~{role}"] == base.priority[q]


def test_split_alternation_preserves_language():
    aut = build_fixture("game_successor")
    split = split_alternation(aut)
    for word in (WordSpec((), (5, 6)), WordSpec((), (5, 5)), WordSpec((2, 3), (0, 1, 4, 5))):
        assert accepts_omega(split, word) == accepts_omega(aut, word)


def test_bump_priorities():
    aut = build_fixture("step_walk")
    with pytest.raises(ValueError):
        bump_priorities(aut, 1)
    assert bump_priorities(aut, 0) is aut
    bumped = bump_priorities(aut, 4)
    assert bumped.min_priority() == aut.min_priority() + 4
    for word in (WordSpec((), (0, 1)), WordSpec((), (0, 2))):
        assert accepts_omega(bumped, word) == accepts_omega(aut, word)


def test_normalize_random_automata_language_stable():
    # mid-column exits rerouted to the bottom keep the decided language
    from oracles import random_automaton

    rng = random.Random(7)
    words = [WordSpec((), (0,)), WordSpec((), (1, 3)), WordSpec((2,), (0, 4))]
    for _ in range(15):
        aut = random_automaton(rng, max_states=3)
        norm = normalize_bottom_exit(aut)
        assert validate(norm) == []
        for word in words:
            assert accepts_omega(aut, word) == accepts_omega(norm, word)
