"""Executable strategy machines compiled from certified solutions.

A strategy machine plays one side of the round game in real time.  It walks
the opponent's columns exactly like the underlying automaton, and it builds
its own columns bottom-up before their value exists: a third token marks the
candidate value, the automaton's crossing is simulated against the marked
blank column, and the landing configuration plus crossing priority is
compared with what the certified strategy table prescribes.  Candidates are
tried in increasing order and the first conforming one is played, so the
emitted value is always the least that reproduces the table's move exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .column import signature_of, status_of
from .core import (INPUT, OUTPUT, Action, DivergenceError, GridLetter,
                   LETTERS, ParseError, WordSpec, accepts_omega,
                   simulate_word)
from .game import SINK, ConstInput, OffsetInput, build_macro_game


class MachineAction(Enum):
    UP = "U"
    DOWN = "D"
    RIGHT = "R"
    PLACE_UPDATE = "P"
    PLACE_OUTPUT = "O"


class SynthesisUnsupported(ValueError):
    """The certificate cannot be turned into an executable machine."""


class NonTermination(RuntimeError):
    """A column walk of the machine exceeded its step budget."""

    def __init__(self, round_no, budget):
        super().__init__(f"round {round_no}: no conforming column value "
                         f"within {budget} machine steps")
        self.round_no = round_no
        self.budget = budget


# -- strategy-conformance checking -------------------------------------

@dataclass(frozen=True)
class Prescription:
    """The certified successor at one position: state, crossing priority,
    and the target memory, either absolute or relative to the position."""

    state: str
    prio: int
    mem: int | None
    delta: int | None


class StrategyChecker:
    """Finite-state conformance acceptors, one per (entry, landing) pair.

    Fed the cells of a column bottom-up with the two token flags, a checker
    decides whether the landing configuration (q, j) together with the
    crossing's maximal priority is exactly what the strategy table
    prescribes at (p, i).  The climb tracks the height up to a cap, its
    residue, and the gap between the two marks, so the decision falls at
    the second mark or within a bounded countdown above it.
    """

    def __init__(self, macro, strategy):
        self.macro = macro
        self.strategy = strategy
        self.params = macro.table.params
        params = self.params
        # below exact_cap positions are resolved individually; above it the
        # statuses are uniform and one template per residue class suffices
        self.exact_cap = max(strategy.threshold, params.prefix_len + 1)
        self.gap_cap = 2 * params.bound + 2 * (params.prefix_len
                                               + params.period) + 2
        self.height_cap = max(self.exact_cap, 2 * params.bound + 1)
        self._exact = {}
        self._classes = {}

    def start(self):
        return ("scan", 0, 0)

    def prescription(self, state, mem):
        """The certified successor template at the given position."""
        if mem < self.exact_cap:
            key = (state, mem)
            if key not in self._exact:
                self._exact[key] = self._exact_prescription(state, mem)
            return self._exact[key]
        return self._class_lookup(state, mem % self.params.period)

    def _class_lookup(self, state, res):
        key = (state, res)
        if key not in self._classes:
            self._classes[key] = self._class_prescription(state, res)
        return self._classes[key]

    def _lookup(self, state, hc, hr):
        """Template at a climb position: exact height hc, residue hr."""
        if hc < self.exact_cap:
            return self.prescription(state, hc)
        return self._class_lookup(state, hr)

    def _exact_prescription(self, state, mem):
        move = self.strategy.concrete_move(self.params, state, mem)
        if move is None:
            return None
        prio, succ = self.macro.step((state, mem), move)
        if succ[0] == SINK:
            return None
        return Prescription(succ[0], prio, succ[1], None)

    def _class_prescription(self, state, res):
        rule = self.strategy.periodic.get((state, res))
        if rule is None:
            return None
        params = self.params
        rep = self.exact_cap + ((res - self.exact_cap) % params.period)
        if isinstance(rule, ConstInput):
            move, relative = rule.value, False
        elif isinstance(rule, OffsetInput):
            move, relative = rep + rule.delta, True
            if move < 0:
                return None
        else:
            sig = rule.sig
            if sig.status_i != status_of(rep, params):
                return None
            ell0 = params.prefix_len
            if sig.status_m <= ell0 or sig.status_diff <= ell0:
                return None
            shift = sig.status_diff if sig.i_less_m else -sig.status_diff
            move, relative = rep + shift, True
            if move < 0 or signature_of(rep, move, params) != sig:
                return None
        try:
            combo = self.macro.table.lookup(state, rep, move)
        except KeyError:
            return None
        if combo.diverge:
            return None
        if combo.anchor == "0":
            return Prescription(combo.state, combo.col_max, combo.offset, None)
        if combo.anchor == "I":
            return Prescription(combo.state, combo.col_max, None, combo.offset)
        if relative:
            return Prescription(combo.state, combo.col_max, None,
                                move - rep + combo.offset)
        return Prescription(combo.state, combo.col_max, move + combo.offset,
                            None)

    def divergent_prescriptions(self):
        """Positions where the table demands a crossing that never exits."""
        bad = []
        for state, mem in self.strategy.explicit:
            move = self.strategy.concrete_move(self.params, state, mem)
            if move is None:
                continue
            _, succ = self.macro.step((state, mem), move)
            if succ[0] == SINK:
                bad.append((state, mem))
        for state, res in self.strategy.periodic:
            rep = self.exact_cap + ((res - self.exact_cap)
                                    % self.params.period)
            move = self.strategy.concrete_move(self.params, state, rep)
            if move is None:
                continue
            _, succ = self.macro.step((state, rep), move)
            if succ[0] == SINK:
                bad.append((state, f"mod {res}"))
        return bad

    # -- the climb automaton -------------------------------------------

    def step(self, cst, b1, b2, entry, landing, prio):
        """Advance one cell; returns the next state, ("acc",) or ("rej",)."""
        kind = cst[0]
        if kind in ("acc", "rej"):
            return cst
        if kind == "count":
            _, qstar, pstar, theta = cst
            if theta > 1:
                if b2:
                    return ("rej",)
                return ("count", qstar, pstar, theta - 1)
            if b2 and landing == qstar and prio == pstar:
                return ("acc",)
            return ("rej",)
        if kind == "scan":
            _, hc, hr = cst
            if b1:
                pres = self._lookup(entry, hc, hr)
                if b2:
                    return self._decide(pres, landing, prio,
                                        self._match_here(pres, hc))
                return self._await(pres, hc)
            if b2:
                return ("jseen", self._bump_h(hc), (hr + 1)
                        % self.params.period, hc, 1)
            return ("scan", self._bump_h(hc), (hr + 1) % self.params.period)
        # kind == "jseen"
        _, hc, hr, jv, gap = cst
        if b1:
            pres = self._lookup(entry, hc, hr)
            return self._decide(pres, landing, prio,
                                self._match_below(pres, jv, gap))
        return ("jseen", self._bump_h(hc), (hr + 1) % self.params.period,
                jv, min(gap + 1, self.gap_cap))

    def _bump_h(self, hc):
        return min(hc + 1, self.height_cap)

    def _await(self, pres, hc):
        """The update mark is still above the memory mark: count up to it."""
        if pres is None:
            return ("rej",)
        if pres.mem is not None:
            theta = pres.mem - hc if hc < self.height_cap else -1
        else:
            theta = pres.delta
        if theta is None or not 0 < theta <= self.gap_cap:
            return ("rej",)
        return ("count", pres.state, pres.prio, theta)

    def _match_here(self, pres, hc):
        """Does an update mark on the memory cell itself match the target?"""
        if pres is None:
            return False
        if pres.mem is not None:
            return hc < self.height_cap and pres.mem == hc
        return pres.delta == 0

    def _match_below(self, pres, jv, gap):
        """Does an update mark seen gap cells below the memory mark match?"""
        if pres is None:
            return False
        if pres.mem is not None:
            return jv < self.height_cap and pres.mem == jv
        return gap < self.gap_cap and pres.delta == -gap

    def _decide(self, pres, landing, prio, jmatch):
        if pres is not None and jmatch and landing == pres.state \
                and prio == pres.prio:
            return ("acc",)
        return ("rej",)

    def accepts(self, entry, landing, mem, upd, prio):
        """Run one checker on the column marked at mem and upd."""
        cst = self.start()
        limit = max(mem, upd) + self.gap_cap + 2
        for height in range(limit + 1):
            cst = self.step(cst, 1 if height == mem else 0,
                            1 if height == upd else 0, entry, landing, prio)
            if cst[0] == "acc":
                return True
            if cst[0] == "rej":
                return False
        raise AssertionError("checker failed to decide within its bound")


def build_strategy_checker(macro, strategy) -> StrategyChecker:
    """Conformance acceptors for every entry/landing pair of the table."""
    return StrategyChecker(macro, strategy)


# -- the strategy machine ----------------------------------------------

@dataclass
class NMemoryTransducer:
    """Deterministic machine over marked columns with an output token.

    Transitions read (state, letter, mem flag, upd flag, out flag) and move
    like the host automaton, with one extra action O placing the output
    token at the current height.  Right is only taken at height 0; on its
    own columns the machine's emitted value is the output token's height.
    """

    role: str
    states: tuple
    initial: object
    delta: dict

    def rule(self, state, letter, b1, b2, b3):
        return self.delta[(state, letter, b1, b2, b3)]


def validate_transducer(machine) -> list:
    """Structural checks; returns a list of problem descriptions."""
    problems = []
    if machine.role not in (INPUT, OUTPUT):
        problems.append(f"unknown role {machine.role!r}")
    index = set(machine.states)
    if machine.initial not in index:
        problems.append("initial state is not a state")
    seen = set()
    for (src, letter, b1, b2, b3), (tgt, act) in machine.delta.items():
        where = f"{src} {letter.value} {b1}{b2}{b3}"
        if src not in index or tgt not in index:
            problems.append(f"{where}: unknown state")
        if act is MachineAction.DOWN and letter is GridLetter.HASH:
            problems.append(f"{where}: moves below the bottom row")
        if act is MachineAction.RIGHT and letter is not GridLetter.HASH:
            problems.append(f"{where}: leaves the column above height 0")
        seen.add((src, letter, b1, b2, b3))
    for src in machine.states:
        for letter in LETTERS:
            for flags in range(8):
                combo = (src, letter, flags >> 2 & 1, flags >> 1 & 1,
                         flags & 1)
                if combo not in seen:
                    problems.append(f"{src} {letter.value}: missing combo")
    return problems


_STATE_BUDGET = 300_000


def synthesize_transducer(automaton, certificate) -> NMemoryTransducer:
    """Compile a verified certificate into an executable strategy machine.

    The machine's side is the certificate's role.  Construction fails when
    the certificate is missing or unverified, and when the table prescribes
    a crossing that never exits a column, which no enumerating machine can
    realize as a played value.
    """
    if certificate is None or not certificate.verified:
        raise SynthesisUnsupported("a verified certificate is required")
    macro = build_macro_game(automaton)
    strategy = certificate.strategy
    host = macro.automaton
    checker = StrategyChecker(macro, strategy)
    bad = checker.divergent_prescriptions()
    if bad:
        raise SynthesisUnsupported(
            f"table prescribes non-terminating crossings at {bad[:3]}")
    machine_role = certificate.role
    rules = {(t.source, t.letter, t.mem_flag, t.upd_flag): t
             for t in host.transitions}
    prio = host.priority

    def own(state):
        return host.role(state) == machine_role

    def landing_target(q_next):
        return ("mark0", q_next) if own(q_next) else ("host", q_next)

    def enter_check(p, q_sim, pm, b1, b2, b3):
        """Fold the height-0 cell into the checker right at the landing."""
        cst = checker.step(checker.start(), b1, b2, p, q_sim, pm)
        if cst[0] == "acc":
            return landing_target(q_sim), MachineAction.RIGHT
        if cst[0] == "rej":
            return restart(p, b3)
        return ("check", p, q_sim, pm, cst), MachineAction.UP

    def restart(p, b3):
        """At height 0 after a rejection: go bump the output token."""
        if b3:
            return ("place", p), MachineAction.UP
        return ("seekT", p), MachineAction.UP

    def build(state, letter, b1, b2, b3):
        kind = state[0]
        if kind == "host":
            t = rules[(state[1], letter, b1, b2)]
            if t.action is Action.RIGHT:
                return landing_target(t.target), MachineAction.RIGHT
            nxt = ("host", t.target)
            if t.action is Action.UP:
                return nxt, MachineAction.UP
            if t.action is Action.DOWN:
                return nxt, MachineAction.DOWN
            return nxt, MachineAction.PLACE_UPDATE
        if kind == "mark0":
            p = state[1]
            return (("sim", p, p, False, prio[p]),
                    MachineAction.PLACE_OUTPUT)
        if kind == "sim":
            _, p, qh, above, pm = state
            if letter is GridLetter.HASH:
                eff = GridLetter.HASH
            elif b3 or not above:
                eff = GridLetter.ONE
            else:
                eff = GridLetter.BOT
            t = rules[(qh, eff, b1, b2)]
            if t.action is Action.RIGHT:
                return enter_check(p, t.target, pm, b1, b2, b3)
            pm2 = max(pm, prio[t.target])
            if t.action is Action.UP:
                return (("sim", p, t.target, True if b3 else above, pm2),
                        MachineAction.UP)
            if t.action is Action.DOWN:
                return (("sim", p, t.target, False if b3 else above, pm2),
                        MachineAction.DOWN)
            return ("sim", p, t.target, above, pm2), MachineAction.PLACE_UPDATE
        if kind == "check":
            _, p, q_sim, pm, cst = state
            if letter is GridLetter.HASH:
                nxt = checker.step(cst, b1, b2, p, q_sim, pm)
                if nxt[0] == "acc":
                    return landing_target(q_sim), MachineAction.RIGHT
                if nxt[0] == "rej":
                    return restart(p, b3)
                return ("check", p, q_sim, pm, nxt), MachineAction.UP
            nxt = checker.step(cst, b1, b2, p, q_sim, pm)
            if nxt[0] == "acc":
                return ("down", q_sim), MachineAction.DOWN
            if nxt[0] == "rej":
                return ("seek0", p), MachineAction.DOWN
            return ("check", p, q_sim, pm, nxt), MachineAction.UP
        if kind == "down":
            if letter is GridLetter.HASH:
                return landing_target(state[1]), MachineAction.RIGHT
            return state, MachineAction.DOWN
        if kind == "seek0":
            if letter is GridLetter.HASH:
                return restart(state[1], b3)
            return state, MachineAction.DOWN
        if kind == "seekT":
            if b3:
                return ("place", state[1]), MachineAction.UP
            return state, MachineAction.UP
        if kind == "place":
            return ("fall", state[1]), MachineAction.PLACE_OUTPUT
        # kind == "fall": descend, reset the update token, resimulate
        p = state[1]
        if letter is GridLetter.HASH:
            return ("sim", p, p, False, prio[p]), MachineAction.PLACE_UPDATE
        return state, MachineAction.DOWN

    initial = ("mark0", host.initial) if own(host.initial) \
        else ("host", host.initial)
    states = [initial]
    index = {initial}
    delta = {}
    cursor = 0
    while cursor < len(states):
        src = states[cursor]
        cursor += 1
        for letter in LETTERS:
            for flags in range(8):
                b1, b2, b3 = flags >> 2 & 1, flags >> 1 & 1, flags & 1
                tgt, act = build(src, letter, b1, b2, b3)
                delta[(src, letter, b1, b2, b3)] = (tgt, act)
                if tgt not in index:
                    if len(index) >= _STATE_BUDGET:
                        raise SynthesisUnsupported(
                            "state budget exceeded during construction")
                    index.add(tgt)
                    states.append(tgt)
    return NMemoryTransducer(machine_role, tuple(states), initial, delta)


def role_shift(automaton, certificate) -> NMemoryTransducer:
    """The same construction playing the Input side of the round game."""
    if certificate is not None and certificate.role != INPUT:
        raise SynthesisUnsupported("role_shift expects an Input certificate")
    return synthesize_transducer(automaton, certificate)


# -- running machines --------------------------------------------------

@dataclass(frozen=True)
class ColumnInfo:
    """Diagnostics for one processed column."""

    index: int
    side: str
    value: int
    exit_mem: int
    steps: int
    candidates: int


@dataclass(frozen=True)
class PlayTranscript:
    """A finite play: interleaved moves plus per-column diagnostics."""

    role: str
    moves: tuple
    columns: tuple

    def values(self):
        return tuple(value for _, value in self.moves)


def _run_column(machine, state, mem, value, budget, round_no):
    """Process one column; value None means the machine builds it."""
    height, upd, out = 0, 0, None
    steps = candidates = 0
    while True:
        if height == 0:
            letter = GridLetter.HASH
        elif value is not None and height <= value:
            letter = GridLetter.ONE
        else:
            letter = GridLetter.BOT
        b1 = 1 if height == mem else 0
        b2 = 1 if height == upd else 0
        b3 = 1 if out is not None and height == out else 0
        tgt, act = machine.delta[(state, letter, b1, b2, b3)]
        steps += 1
        if steps > budget:
            raise NonTermination(round_no, budget)
        if act is MachineAction.RIGHT:
            played = value if value is not None else out
            if played is None:
                raise RuntimeError("machine left its column without output")
            return tgt, upd, played, steps, candidates
        state = tgt
        if act is MachineAction.UP:
            height += 1
        elif act is MachineAction.DOWN:
            height -= 1
            if height < 0:
                raise RuntimeError("machine stepped below the bottom row")
        elif act is MachineAction.PLACE_UPDATE:
            upd = height
        else:
            out = height
            candidates += 1


def step_column(machine, state, mem, value=None, budget=10 ** 6,
                round_no=0):
    """Process one column interactively; value None means the machine's own.

    Returns (next state, next memory, played value, steps, candidates).
    """
    return _run_column(machine, state, mem, value, budget, round_no)


def run_transducer(machine, inputs, rounds=None, budget=10 ** 6):
    """Play the machine against the given opponent values.

    One round is one opponent column and one machine column, in the order
    fixed by the machine's role.  Returns the transcript of the play.
    """
    inputs = list(inputs)
    if rounds is None:
        rounds = len(inputs)
    if rounds > len(inputs):
        raise ValueError("not enough opponent values for the requested rounds")
    opponent = INPUT if machine.role == OUTPUT else OUTPUT
    state, mem = machine.initial, 0
    moves, columns = [], []
    for round_no in range(rounds):
        sides = ((opponent, machine.role) if machine.role == OUTPUT
                 else (machine.role, opponent))
        for side in sides:
            fed = inputs[round_no] if side == opponent else None
            state, mem, played, steps, cands = _run_column(
                machine, state, mem, fed, budget, round_no)
            moves.append((side, played))
            columns.append(ColumnInfo(len(columns), side, played, mem,
                                      steps, cands))
    return PlayTranscript(machine.role, tuple(moves), tuple(columns))


def periodic_play(machine, spec: WordSpec, max_rounds=4096, budget=10 ** 6):
    """The ultimately periodic play against an ultimately periodic opponent.

    Runs rounds until the machine configuration realigns with the opponent's
    loop, then folds the recorded moves into a word spec of the full play.
    """
    opponent_first = machine.role == OUTPUT
    state, mem = machine.initial, 0
    moves = []
    seen = {}
    for round_no in range(max_rounds):
        phase = (round_no if round_no < len(spec.prefix)
                 else len(spec.prefix) + ((round_no - len(spec.prefix))
                                          % len(spec.loop)))
        config = (state, mem, phase)
        if config in seen:
            cut = seen[config]
            return WordSpec(tuple(moves[:cut]), tuple(moves[cut:]))
        seen[config] = len(moves)
        fed = spec.value(round_no)
        order = ((fed, None) if opponent_first else (None, fed))
        for value in order:
            state, mem, played, _, _ = _run_column(
                machine, state, mem, value, budget, round_no)
            moves.append(played)
    raise NonTermination(max_rounds, budget)


def verify_play(automaton, play) -> bool:
    """Whether a play conforms to the automaton's winning condition.

    Word specs are decided exactly.  Finite transcripts are checked for
    consistency: the play alternates properly and no column traps the run
    with an odd dominating priority; an empty transcript passes vacuously.
    """
    if isinstance(play, WordSpec):
        return accepts_omega(automaton, play)
    if isinstance(play, PlayTranscript):
        sides = [side for side, _ in play.moves]
        if sides != [(INPUT, OUTPUT)[k % 2] for k in range(len(sides))]:
            return False
        word = play.values()
    else:
        word = tuple(play)
    try:
        simulate_word(automaton, word)
    except DivergenceError as err:
        return err.max_inf % 2 == 0
    return True


# -- text format -------------------------------------------------------

_ACTION_BY_TEXT = {a.value: a for a in MachineAction}
_LETTER_BY_TEXT = {letter.value: letter for letter in GridLetter}


def serialize_transducer(machine) -> str:
    """Stable text form; internal states are renamed t0, t1, ..."""
    names = {state: f"t{k}" for k, state in enumerate(machine.states)}
    lines = [f"states: {' '.join(names[s] for s in machine.states)}",
             f"init: {names[machine.initial]}",
             f"role: {machine.role}"]
    order = {letter: k for k, letter in enumerate(LETTERS)}
    index = {state: k for k, state in enumerate(machine.states)}
    keys = sorted(machine.delta,
                  key=lambda k: (index[k[0]], order[k[1]], k[2], k[3], k[4]))
    for src, letter, b1, b2, b3 in keys:
        tgt, act = machine.delta[(src, letter, b1, b2, b3)]
        lines.append(f"trans: {names[src]} {letter.value} {b1} {b2} {b3} "
                     f"-> {names[tgt]} {act.value}")
    return "\n".join(lines) + "\n"


def parse_transducer(text: str) -> NMemoryTransducer:
    """Parse the text form back into a runnable machine."""
    states, initial, role = (), None, None
    delta = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("states:"):
            states = tuple(line[len("states:"):].split())
        elif line.startswith("init:"):
            initial = line[len("init:"):].strip()
        elif line.startswith("role:"):
            role = line[len("role:"):].strip()
        elif line.startswith("trans:"):
            payload = line[len("trans:"):].split()
            if len(payload) > 8 and payload[8].startswith("#"):
                payload = payload[:8]
            if len(payload) != 8 or payload[5] != "->":
                raise ParseError(line_no, "malformed transition")
            src, letter_text, b1, b2, b3, _, tgt, act_text = payload
            letter = _LETTER_BY_TEXT.get(letter_text)
            action = _ACTION_BY_TEXT.get(act_text)
            if letter is None or action is None:
                raise ParseError(line_no, "unknown letter or action")
            if not all(flag in ("0", "1") for flag in (b1, b2, b3)):
                raise ParseError(line_no, "flags must be 0 or 1")
            key = (src, letter, int(b1), int(b2), int(b3))
            if key in delta:
                raise ParseError(line_no, "duplicate transition")
            delta[key] = (tgt, action)
        else:
            raise ParseError(line_no, f"unrecognized line: {line}")
    if not states or initial is None or role is None:
        raise ParseError(0, "missing states, init or role section")
    machine = NMemoryTransducer(role, states, initial, delta)
    problems = validate_transducer(machine)
    if problems:
        raise ParseError(0, "; ".join(problems[:3]))
    return machine
