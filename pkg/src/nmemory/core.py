"""Two-way parity automata with a natural-number memory token.

Inputs are infinite sequences of naturals, presented column by column: the
column for value m reads ``#`` at height 0, ``1`` on heights 1..m and blank
above.  The automaton walks one column at a time carrying two height-valued
tokens, the memory token and the update token; moving to the next column
turns the update token into the new memory token.  A run is accepting when
the highest state priority seen infinitely often is even.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class GridLetter(Enum):
    HASH = "#"
    ONE = "1"
    BOT = "_"


class Action(Enum):
    UP = "U"
    DOWN = "D"
    RIGHT = "R"
    PLACE_UPDATE = "P"


LETTERS = (GridLetter.HASH, GridLetter.ONE, GridLetter.BOT)

INPUT = "I"
OUTPUT = "O"


def grid_letter(column_value: int, height: int) -> GridLetter:
    """Letter at `height` in the column that encodes `column_value`."""
    if height == 0:
        return GridLetter.HASH
    return GridLetter.ONE if height <= column_value else GridLetter.BOT


@dataclass(frozen=True)
class Transition:
    source: str
    letter: GridLetter
    mem_flag: int
    upd_flag: int
    target: str
    action: Action


class NMemoryAutomaton:
    """Deterministic two-way automaton over grid columns with parity priorities.

    `roles` is optional; after `split_alternation` it maps each state to
    INPUT or OUTPUT according to whose column the state is about to read.
    """

    def __init__(self, states, initial, transitions, priority, roles=None):
        self.states = tuple(states)
        self.initial = initial
        self.transitions = tuple(transitions)
        self.priority = dict(priority)
        self.roles = dict(roles) if roles is not None else None
        self._table = {}
        for t in self.transitions:
            key = (t.source, t.letter, t.mem_flag, t.upd_flag)
            self._table.setdefault(key, []).append(t)

    def rule(self, state, letter, mem_flag, upd_flag) -> Transition:
        """The unique transition enabled at this state/letter/flag combination."""
        rules = self._table.get((state, letter, mem_flag, upd_flag))
        if not rules or len(rules) != 1:
            raise KeyError((state, letter.value, mem_flag, upd_flag))
        return rules[0]

    def flagless_step(self, letter):
        """state -> Transition map on unmarked cells of the given letter."""
        return {q: self.rule(q, letter, 0, 0) for q in self.states}

    def max_priority(self) -> int:
        return max(self.priority.values())

    def min_priority(self) -> int:
        return min(self.priority.values())

    def role(self, state) -> str:
        if self.roles is None:
            raise ValueError("automaton has no role tags; run split_alternation")
        return self.roles[state]


@dataclass(frozen=True)
class MicroConfiguration:
    state: str
    column: int
    height: int
    mem: int
    upd: int


@dataclass(frozen=True)
class WordSpec:
    """The ultimately periodic word prefix . loop^omega."""

    prefix: tuple
    loop: tuple

    def __post_init__(self):
        if not self.loop:
            raise ValueError("loop must be nonempty")

    def value(self, index: int) -> int:
        if index < len(self.prefix):
            return self.prefix[index]
        return self.loop[(index - len(self.prefix)) % len(self.loop)]


@dataclass(frozen=True)
class ColumnTrace:
    value: int
    entry_state: str
    exit_state: str
    exit_mem: int
    col_max: int
    exit_height: int


class ColumnExit(Exception):
    """Raised by micro_step when the enabled action moves to the next column."""

    def __init__(self, target):
        super().__init__(target)
        self.target = target


class DivergenceError(Exception):
    """A column was never left by the run."""

    def __init__(self, column, max_inf):
        super().__init__(f"run never leaves column {column}")
        self.column = column
        self.max_inf = max_inf


def validate(automaton: NMemoryAutomaton):
    """List of violation messages; empty iff the automaton is well formed."""
    report = []
    states = set(automaton.states)
    if len(states) != len(automaton.states):
        report.append("duplicate state ids")
    if automaton.initial not in states:
        report.append(f"initial state {automaton.initial!r} not declared")
    for q in automaton.states:
        p = automaton.priority.get(q)
        if p is None:
            report.append(f"state {q}: no priority")
        elif not isinstance(p, int) or p < 0:
            report.append(f"state {q}: priority {p!r} is not a natural")
    for t in automaton.transitions:
        if t.source not in states:
            report.append(f"transition from undeclared state {t.source!r}")
        if t.target not in states:
            report.append(f"transition to undeclared state {t.target!r}")
        if t.letter is GridLetter.HASH and t.action is Action.DOWN:
            report.append(f"state {t.source}: Down on '#' (flags {t.mem_flag}{t.upd_flag})")
        if t.mem_flag not in (0, 1) or t.upd_flag not in (0, 1):
            report.append(f"state {t.source}: flags must be bits")
    for q in automaton.states:
        for letter in LETTERS:
            for b1 in (0, 1):
                for b2 in (0, 1):
                    rules = automaton._table.get((q, letter, b1, b2), [])
                    if len(rules) == 0:
                        report.append(
                            f"missing transition ({q}, {letter.value}, {b1}, {b2})")
                    elif len(rules) > 1:
                        report.append(
                            f"nondeterministic ({q}, {letter.value}, {b1}, {b2})")
    return report


def micro_step(automaton, letter_at, cfg: MicroConfiguration) -> MicroConfiguration:
    """One step inside the current column; raises ColumnExit on a Right move."""
    letter = letter_at(cfg.height)
    b1 = 1 if cfg.mem == cfg.height else 0
    b2 = 1 if cfg.upd == cfg.height else 0
    t = automaton.rule(cfg.state, letter, b1, b2)
    if t.action is Action.RIGHT:
        raise ColumnExit(t.target)
    if t.action is Action.UP:
        return MicroConfiguration(t.target, cfg.column, cfg.height + 1, cfg.mem, cfg.upd)
    if t.action is Action.DOWN:
        if cfg.height == 0:
            raise AssertionError("Down at height 0 slipped through validation")
        return MicroConfiguration(t.target, cfg.column, cfg.height - 1, cfg.mem, cfg.upd)
    return MicroConfiguration(t.target, cfg.column, cfg.height, cfg.mem, cfg.height)


def simulate_word(automaton, word):
    """ColumnTrace per value of the finite word, chained across column switches."""
    from . import column as column_engine

    engine = column_engine.ColumnEngine(automaton)
    traces = []
    state, mem, height = automaton.initial, 0, 0
    for index, value in enumerate(word):
        outcome = engine.column_exit(state, mem, value, entry_height=height)
        if isinstance(outcome, column_engine.Diverge):
            raise DivergenceError(index, outcome.max_inf)
        traces.append(ColumnTrace(value, state, outcome.state, outcome.mem,
                                  outcome.col_max, outcome.exit_height))
        state, mem, height = outcome.state, outcome.mem, outcome.exit_height
    return traces


def accepts_omega(automaton, word: WordSpec) -> bool:
    """Membership of the ultimately periodic word prefix.loop^omega."""
    from . import column as column_engine

    aut = normalize_bottom_exit(automaton)
    engine = column_engine.ColumnEngine(aut)
    # thresholds and the repeat key follow the certified exit-table window,
    # which may be wider than the minimal crossing-behavior orbit
    certified = column_engine.compute_R(engine).params
    bound = certified.bound
    ell0, ell = certified.prefix_len, certified.period
    loop = word.loop
    theta = (max(max(loop, default=0), max(word.prefix, default=0))
             + ell0 + (bound + 1) * (len(loop) + 1) + ell + 2)

    state, mem = aut.initial, 0
    for value in word.prefix:
        outcome = engine.column_exit(state, mem, value)
        if isinstance(outcome, column_engine.Diverge):
            return outcome.max_inf % 2 == 0
        state, mem = outcome.state, outcome.mem

    # One snapshot per full pass over the loop.  An exact repeat closes a
    # genuine cycle; a repeat of the abstract key with the memory shifted
    # upward while it stayed large throughout mirrors forever.
    seen = {}
    history = []  # (state, mem, block_max)
    low_floor = max(max(loop), ell0) + (bound + 1) * len(loop) + ell + 2
    last_small = 0
    block_no = 0
    budget = (len(aut.states) * (theta + 2) * (ell + 1) + 200)
    while block_no <= budget:
        block_max = -1
        diverged = None
        for value in loop:
            outcome = engine.column_exit(state, mem, value)
            if isinstance(outcome, column_engine.Diverge):
                diverged = outcome.max_inf
                break
            block_max = max(block_max, outcome.col_max)
            state, mem = outcome.state, outcome.mem
            if mem <= low_floor:
                last_small = block_no + 1
        if diverged is not None:
            return diverged % 2 == 0
        block_no += 1
        history.append((state, mem, block_max))
        key = (state, mem) if mem <= theta else (state, "big", mem % ell)
        for earlier in seen.get(key, ()):
            e_state, e_mem, e_idx = earlier
            if e_mem == mem:
                cycle = [h[2] for h in history[e_idx:block_no]]
                return max(cycle) % 2 == 0
            if (mem > e_mem and e_mem > theta and e_idx >= last_small):
                cycle = [h[2] for h in history[e_idx:block_no]]
                return max(cycle) % 2 == 0
        seen.setdefault(key, []).append((state, mem, block_no))
    raise RuntimeError("loop analysis exceeded its block budget; this is a bug")


def normalize_bottom_exit(automaton) -> NMemoryAutomaton:
    """Reroute every column switch through a descent so Rights happen on '#'."""
    needs = sorted({t.target for t in automaton.transitions
                    if t.action is Action.RIGHT and t.letter is not GridLetter.HASH})
    if not needs:
        return automaton
    low = automaton.min_priority()
    fresh = {target: f"{target}!dn" for target in needs}
    while set(fresh.values()) & set(automaton.states):
        fresh = {t: name + "_" for t, name in fresh.items()}
    transitions = []
    for t in automaton.transitions:
        if t.action is Action.RIGHT and t.letter is not GridLetter.HASH:
            transitions.append(Transition(t.source, t.letter, t.mem_flag,
                                          t.upd_flag, fresh[t.target], Action.DOWN))
        else:
            transitions.append(t)
    priority = dict(automaton.priority)
    roles = dict(automaton.roles) if automaton.roles is not None else None
    states = list(automaton.states)
    for target, name in fresh.items():
        states.append(name)
        priority[name] = low
        if roles is not None:
            roles[name] = automaton.roles[target]
        for b1 in (0, 1):
            for b2 in (0, 1):
                transitions.append(Transition(name, GridLetter.HASH, b1, b2,
                                              target, Action.RIGHT))
                for letter in (GridLetter.ONE, GridLetter.BOT):
                    transitions.append(Transition(name, letter, b1, b2,
                                                  name, Action.DOWN))
    return NMemoryAutomaton(states, automaton.initial, transitions, priority, roles)


def split_alternation(automaton) -> NMemoryAutomaton:
    """Duplicate states into reader roles that flip at every column switch."""
    def tag(state, role):
        return f"{state}~{role}"

    states, priority, roles, transitions = [], {}, {}, []
    for role in (INPUT, OUTPUT):
        other = OUTPUT if role == INPUT else INPUT
        for q in automaton.states:
            name = tag(q, role)
            states.append(name)
            priority[name] = automaton.priority[q]
            roles[name] = role
        for t in automaton.transitions:
            target_role = other if t.action is Action.RIGHT else role
            transitions.append(Transition(tag(t.source, role), t.letter,
                                          t.mem_flag, t.upd_flag,
                                          tag(t.target, target_role), t.action))
    return NMemoryAutomaton(states, tag(automaton.initial, INPUT),
                            transitions, priority, roles)


def bump_priorities(automaton, delta: int) -> NMemoryAutomaton:
    """Shift every priority by an even delta; acceptance is unchanged."""
    if delta % 2 != 0 or delta < 0:
        raise ValueError("delta must be an even natural")
    if delta == 0:
        return automaton
    priority = {q: p + delta for q, p in automaton.priority.items()}
    return NMemoryAutomaton(automaton.states, automaton.initial,
                            automaton.transitions, priority, automaton.roles)


class ParseError(Exception):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_LETTER_BY_TEXT = {letter.value: letter for letter in LETTERS}
_ACTION_BY_TEXT = {action.value: action for action in Action}


def parse_automaton(text: str) -> NMemoryAutomaton:
    """Parse the line-oriented automaton format (states/init/priority/trans)."""
    states, initial, priority, transitions = [], None, {}, []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("trans:"):
            # '#' is also the hash letter, so on trans lines a comment can
            # only start after the seven payload fields
            fields = stripped[6:].split()
            if "->" in fields:
                arrow = fields.index("->")
                fields = fields[:arrow + 3]
            line = stripped
        else:
            line = stripped.split("#", 1)[0].strip()
            if not line:
                continue
        if line.startswith("states:"):
            states.extend(line[7:].split())
        elif line.startswith("init:"):
            parts = line[5:].split()
            if len(parts) != 1:
                raise ParseError(line_no, "init wants exactly one state")
            initial = parts[0]
        elif line.startswith("priority:"):
            for item in line[9:].split():
                if "=" not in item:
                    raise ParseError(line_no, f"bad priority item {item!r}")
                name, _, value = item.partition("=")
                try:
                    priority[name] = int(value)
                except ValueError:
                    raise ParseError(line_no, f"bad priority value {value!r}") from None
        elif line.startswith("trans:"):
            if len(fields) != 7 or fields[4] != "->":
                raise ParseError(line_no, f"bad transition {line!r}")
            src, letter, b1, b2, _, dst, action = fields
            if letter not in _LETTER_BY_TEXT:
                raise ParseError(line_no, f"bad letter {letter!r}")
            if action not in _ACTION_BY_TEXT:
                raise ParseError(line_no, f"bad action {action!r}")
            if b1 not in "01" or b2 not in "01":
                raise ParseError(line_no, f"flags must be 0 or 1 in {line!r}")
            transitions.append(Transition(src, _LETTER_BY_TEXT[letter], int(b1),
                                          int(b2), dst, _ACTION_BY_TEXT[action]))
        else:
            raise ParseError(line_no, f"unknown directive {line!r}")
    if initial is None:
        raise ParseError(0, "missing init line")
    if not states:
        raise ParseError(0, "missing states line")
    return NMemoryAutomaton(states, initial, transitions, priority)


def serialize_automaton(automaton) -> str:
    lines = ["states: " + " ".join(automaton.states),
             "init: " + automaton.initial,
             "priority: " + " ".join(f"{q}={automaton.priority[q]}"
                                     for q in automaton.states)]
    order = {q: k for k, q in enumerate(automaton.states)}
    letter_order = {letter: k for k, letter in enumerate(LETTERS)}
    for t in sorted(automaton.transitions,
                    key=lambda t: (order[t.source], letter_order[t.letter],
                                   t.mem_flag, t.upd_flag)):
        lines.append(f"trans: {t.source} {t.letter.value} {t.mem_flag} "
                     f"{t.upd_flag} -> {t.target} {t.action.value}")
    return "\n".join(lines) + "\n"
