"""Window solving, exact certification, and reachability saturation."""

import random

from nmemory import build_fixture
from nmemory.column import signature_of
from nmemory.core import INPUT, OUTPUT
from nmemory.game import (SINK, ConstInput, Rule, StrategyTable,
                          build_macro_game, build_one_player_game,
                          encode_pushdown, encode_residual, large_entries,
                          move_witness)
from nmemory.solver import (BEYOND, PushdownAnalysis, certify_strategy,
                            default_height, is_empty, saturate_reachability,
                            solve, truncate, two_sided_solve)
from oracles import attractor_bracket, explicit_pushdown, random_pushdown


def _clip(succ, height):
    """Map an exact successor to its truncated-game vertex."""
    if succ[0] == SINK:
        return succ
    return succ if succ[1] <= height else BEYOND


def replay_witness(game, witness):
    """Re-run a witness on the game, validating every rule as it is applied.

    Returns the maximum priority seen along the cycle (None for dead ends).
    """
    assert not witness.truncated
    config = game.initial
    for rule in witness.prefix:
        assert rule in game.moves(config[0], config[1][-1])
        config = game.apply(config, rule)
    control, stack = config
    assert (control, stack[-1]) == witness.head
    if witness.kind == "deadend":
        assert game.moves(control, stack[-1]) == ()
        return None
    assert witness.cycle
    base = len(stack)
    best = 0
    for rule in witness.cycle:
        assert rule in game.moves(config[0], config[1][-1])
        config = game.apply(config, rule)
        best = max(best, game.priority(config[0]))
        assert len(config[1]) >= base, "cycle dipped below its head"
    end_control, end_stack = config
    assert (end_control, end_stack[-1]) == witness.head
    assert end_stack[:base] == stack
    assert best == witness.max_priority
    return best


# -- truncation -------------------------------------------------------

def test_truncation_represents_every_move():
    """Each column value within the exact window gets its own edge; values
    past it fall into some offered exit class; each offered edge is realized
    by the column value recorded for it."""
    for name in ("game_copy", "game_predict"):
        macro = build_macro_game(build_fixture(name))
        params = macro.table.params
        bound = params.bound
        height = 12
        trunc = truncate(macro, height, OUTPUT)
        far_floor = height + bound + 2
        for v in trunc.reals:
            state, mem = v
            offered = {}
            for r in trunc.game.edges[v]:
                _, prio, succ = r
                offered[(prio, succ)] = trunc.moves[(v, r)]
            for move in range(mem + bound + 2):
                prio, succ = macro.step(v, move)
                assert (prio, _clip(succ, height)) in offered, (v, move)
            far = {sig for sig, _c in large_entries(macro.table, state, mem)}
            for move in range(mem + bound + 2,
                              mem + bound + 2 * params.period + 6):
                assert signature_of(mem, move, params) in far, (v, move)
            for (prio, succ), desc in offered.items():
                if isinstance(desc, int):
                    got_prio, got_succ = macro.step(v, desc)
                    got_succ = _clip(got_succ, height)
                else:
                    m = move_witness(params, mem, desc[1], floor=far_floor)
                    assert m is not None, (v, desc)
                    got_prio, exact = macro.step(v, m)
                    got_succ = _clip(exact, height)
                    combo = macro.table.lookup(state, mem, m)
                    if not combo.diverge and combo.anchor == "M":
                        got_succ = BEYOND
                assert (got_prio, got_succ) == (prio, succ), (v, desc)


def test_slanted_windows_disagree_on_the_fixture_games():
    """At the default window each builder still wins its optimistic slant,
    so the pessimistic agreement gives no verdict and certification must
    decide."""
    for name in ("game_copy", "game_predict"):
        macro = build_macro_game(build_fixture(name))
        height = default_height(macro.table.params)
        winner, out_side, in_side = two_sided_solve(macro, height)
        assert winner is None
        _, out_regions, _ = out_side
        _, in_regions, _ = in_side
        assert macro.initial in out_regions[0]
        assert macro.initial in in_regions[1]


# -- solving with certification ---------------------------------------

def test_solve_decides_the_four_games():
    expected = {"game_copy": OUTPUT, "game_successor": OUTPUT,
                "game_predict": INPUT, "game_unbounded": OUTPUT}
    for name, winner in expected.items():
        result = solve(build_fixture(name))
        assert result.winner == winner, name
        cert = result.certificate
        assert cert.verified and cert.role == winner
        assert cert.strategy.periodic, "winning table should have a tail"


def test_solve_refutes_the_losers_candidate_first():
    result = solve(build_fixture("game_predict"))
    assert result.winner == INPUT
    assert result.attempts and result.attempts[0][0] == OUTPUT


def test_a_bad_table_is_refuted_by_a_concrete_run():
    macro = build_macro_game(build_fixture("game_copy"))
    params = macro.table.params
    out_states = [s for s in macro.automaton.states
                  if macro.automaton.role(s) == OUTPUT]
    always0 = StrategyTable(
        OUTPUT, 4, params.period,
        {(s, m): ConstInput(0) for s in out_states for m in range(4)},
        {(s, r): ConstInput(0) for s in out_states
         for r in range(params.period)})
    cert = certify_strategy(macro, always0)
    assert not cert.verified
    witness = cert.refutation
    assert witness.kind == "cycle"
    best = replay_witness(encode_residual(macro, always0), witness)
    assert best % 2 == 1, "refuting run must reach the odd parity"


def test_an_empty_table_is_refuted_by_a_dead_end():
    macro = build_macro_game(build_fixture("game_copy"))
    params = macro.table.params
    empty = StrategyTable(OUTPUT, 4, params.period, {}, {})
    cert = certify_strategy(macro, empty)
    assert not cert.verified
    witness = cert.refutation
    assert witness.kind == "deadend"
    game = encode_residual(macro, empty)
    replay_witness(game, witness)
    assert game.owner(witness.head[0]) == 0


def test_the_winning_table_survives_certification_replay():
    result = solve(build_fixture("game_successor"))
    cert = result.certificate
    assert cert.verified
    # re-certifying the stored table is deterministic
    again = certify_strategy(result.macro, cert.strategy)
    assert again.verified


# -- emptiness --------------------------------------------------------

def test_emptiness_of_the_fixture_languages():
    assert not is_empty(build_fixture("accept_all"))
    assert is_empty(build_fixture("reject_all"))
    assert is_empty(build_fixture("climb_forever"))
    assert not is_empty(build_fixture("successors"))
    assert not is_empty(build_fixture("record_input"))


def test_accepting_runs_replay_with_even_dominating_priority():
    for name in ("accept_all", "successors", "record_input"):
        macro = build_one_player_game(build_fixture(name))
        game = encode_pushdown(macro)
        witness = PushdownAnalysis(game).run_witness(0)
        assert witness is not None, name
        best = replay_witness(game, witness)
        assert best % 2 == 0, name


# -- reachability saturation ------------------------------------------

def test_saturation_matches_hand_solved_heights():
    """p escapes to the target by one pop; q must hand over from height two
    because popping its single cell strands p on the empty stack."""
    game = explicit_pushdown(
        {"p": 0, "q": 1, "t": 0},
        [Rule("p", "x", "stay", "q"),
         Rule("p", "x", "pop", "t"),
         Rule("q", "x", "pop", "p"),
         Rule("q", "x", "push", "p", push="x")],
        ("p", "q", "t"), ("x",))
    winning = saturate_reachability(game, {"t"})
    for h in range(0, 9):
        stack = ("x",) * h
        assert winning(("t", stack))
        assert winning(("p", stack)) == (h >= 1)
        # at height zero q is a stranded opponent, which also counts as a win
        assert winning(("q", stack)) == (h != 1)


def test_saturation_sees_through_unbounded_climbing():
    """Climbing forever never reaches the target, no matter how high."""
    game = explicit_pushdown(
        {"u": 0, "t": 0},
        [Rule("u", "x", "push", "u", push="x")],
        ("u", "t"), ("x",))
    winning = saturate_reachability(game, {"t"})
    for h in range(0, 7):
        assert not winning(("u", ("x",) * h))


def test_saturation_charges_stack_exhaustion_to_the_owner():
    """An opponent forced to pop will eventually strand itself."""
    game = explicit_pushdown(
        {"b": 1, "t": 0},
        [Rule("b", "x", "pop", "b")],
        ("b", "t"), ("x",))
    winning = saturate_reachability(game, {"t"})
    for h in range(0, 7):
        assert winning(("b", ("x",) * h))


def test_saturation_sits_inside_the_reachability_bracket():
    """On random games the saturated region must contain every config won
    within a cut-off window and avoid every config lost even with free wins
    past the cut-off."""
    rng = random.Random(2026)
    for _trial in range(30):
        game = random_pushdown(rng)
        height = 24 if len(game.alphabet) == 1 else 8
        winning = saturate_reachability(game, {"t"})
        upper = attractor_bracket(game, {"t"}, height, True)
        lower = attractor_bracket(game, {"t"}, height, False)
        for cfg, low in lower.items():
            high = upper[cfg]
            assert high or not low
            if low:
                assert winning(cfg), cfg
            elif not high:
                assert not winning(cfg), cfg
