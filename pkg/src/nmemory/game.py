"""Round game over (state, memory) pairs, one column crossing per move.

A vertex pairs an automaton state with the memory height; the mover picks the
next column value m and the column engine determines the landing vertex and
the crossing's maximum priority.  Divergent columns fall into absorbing sink
vertices.  The same game is also presented as a pushdown game whose stack
height carries the memory height, which keeps the unbounded memory analyzable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import OUTPUT, bump_priorities, normalize_bottom_exit, \
    split_alternation, validate
from .column import ColumnEngine, Diverge, StatusSignature, compute_R, \
    signature_of, status_of

SINK = "!div"
BOTTOM = "bot"


@dataclass(frozen=True)
class MacroGame:
    """Symbolic arena: vertices are (state, mem), moves are naturals."""

    automaton: object
    engine: ColumnEngine
    table: object
    one_player: bool = False
    _entry_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def initial(self):
        return (self.automaton.initial, 0)

    def mover(self, vertex) -> str:
        if self.one_player:
            return OUTPUT
        return self.automaton.role(vertex[0])

    def step(self, vertex, move):
        """Exact edge for the chosen column value: (priority, successor)."""
        state, mem = vertex
        if state == SINK:
            return mem, vertex
        outcome = self.engine.column_exit(state, mem, move)
        if isinstance(outcome, Diverge):
            return outcome.max_inf, (SINK, outcome.max_inf)
        return outcome.col_max, (outcome.state, outcome.mem)

    def entries(self, state):
        """The state's exit classes as a stable list of (signature, class)."""
        cached = self._entry_cache.get(state)
        if cached is None:
            cached = sorted(self.table.by_state(state).items(),
                            key=lambda kv: (kv[0].status_i, kv[0].status_m,
                                            kv[0].status_diff, kv[0].i_less_m))
            self._entry_cache[state] = cached
        return cached


def _prepared(automaton, split):
    problems = validate(automaton)
    if problems:
        raise ValueError("invalid automaton: " + "; ".join(problems))
    prepared = normalize_bottom_exit(automaton)
    if split:
        prepared = split_alternation(prepared)
    return bump_priorities(prepared, 2)


def build_macro_game(automaton) -> MacroGame:
    """Normalize, split into mover roles, bump, and certify the exit table."""
    prepared = _prepared(automaton, split=True)
    engine = ColumnEngine(prepared)
    return MacroGame(prepared, engine, compute_R(engine))


def build_one_player_game(automaton) -> MacroGame:
    """Same arena but every column value is chosen by one builder."""
    prepared = _prepared(automaton, split=False)
    engine = ColumnEngine(prepared)
    return MacroGame(prepared, engine, compute_R(engine), one_player=True)


# -- move classes ------------------------------------------------------

def move_witness(params, i, sig, floor=-1):
    """Least column value above floor whose pair with i matches sig, or None.

    Signatures are periodic in m once m clears both i and the status prefix,
    so a bounded scan is conclusive.
    """
    horizon = max(floor, i) + params.prefix_len + params.period + 2
    for m in range(floor + 1, horizon + 1):
        if signature_of(i, m, params) == sig:
            return m
    return None


def class_move_applicable(params, i, sig):
    """Whether sig is matched by arbitrarily large column values at memory i.

    Beyond every landmark both the value and the distance statuses cycle, so
    unbounded realizability needs periodic-class statuses on the m side whose
    residues agree with i's height.
    """
    if sig.status_i != status_of(i, params):
        return False
    if sig.i_less_m != 1:
        return False
    ell0, ell = params.prefix_len, params.period
    if sig.status_m <= ell0 or sig.status_diff <= ell0:
        return False
    # heights above the prefix are congruent to their status modulo the period
    return (sig.status_m - sig.status_diff - i) % ell == 0


def large_entries(table, state, i):
    """The state's entries realizable with arbitrarily large column values."""
    return [(sig, combo)
            for sig, combo in sorted(table.by_state(state).items(),
                                     key=lambda kv: (kv[0].status_i,
                                                     kv[0].status_m,
                                                     kv[0].status_diff,
                                                     kv[0].i_less_m))
            if class_move_applicable(table.params, i, sig)]


# -- finite strategy descriptions -------------------------------------

@dataclass(frozen=True)
class ConstInput:
    """Play the fixed column value."""
    value: int


@dataclass(frozen=True)
class OffsetInput:
    """Play the current memory plus a fixed delta."""
    delta: int


@dataclass(frozen=True)
class LargeInput:
    """Play some column value whose pair with the memory matches sig."""
    sig: StatusSignature


MoveRule = ConstInput | OffsetInput | LargeInput


@dataclass(frozen=True)
class StrategyTable:
    """Finitely presented positional strategy for one of the two builders.

    Memories below the threshold carry explicit per-vertex rules; at or above
    it the rule depends only on the memory's residue modulo the period.
    """

    role: str
    threshold: int
    period: int
    explicit: dict   # (state, mem) -> MoveRule, mem < threshold
    periodic: dict   # (state, mem % period) -> MoveRule

    def rule_for(self, state, mem):
        if mem < self.threshold:
            return self.explicit.get((state, mem))
        return self.periodic.get((state, mem % self.period))

    def concrete_move(self, params, state, mem):
        """The rule resolved to an actual column value, or None."""
        rule = self.rule_for(state, mem)
        if rule is None:
            return None
        if isinstance(rule, ConstInput):
            return rule.value
        if isinstance(rule, OffsetInput):
            move = mem + rule.delta
            return move if move >= 0 else None
        return move_witness(params, mem, rule.sig)

    def lines(self):
        """Human-readable dump, one rule per line."""
        out = []
        for (state, mem), rule in sorted(self.explicit.items()):
            out.append(f"{state} @{mem}: {_rule_text(rule)}")
        for (state, res), rule in sorted(self.periodic.items()):
            out.append(f"{state} @>={self.threshold}"
                       f" mod {self.period}={res}: {_rule_text(rule)}")
        return out


def _rule_text(rule):
    if isinstance(rule, ConstInput):
        return f"value {rule.value}"
    if isinstance(rule, OffsetInput):
        return f"memory{rule.delta:+d}"
    s = rule.sig
    return (f"class {s.status_i}/{s.status_m}/{s.status_diff}"
            f"/{'above' if s.i_less_m else 'below'}")
    s = rule.sig
    return (f"class value~{s.status_m} distance~{s.status_diff}"
            f" {'above' if s.i_less_m else 'below'}")


# -- pushdown presentation --------------------------------------------

@dataclass(frozen=True)
class Rule:
    """One pushdown move, applicable at `control` with `top` on the stack."""

    control: object
    top: object
    action: str          # "push" | "pop" | "stay"
    target: object
    push: object = None  # symbol pushed on "push"
    note: tuple = ()     # provenance, used for strategy plumbing


class PushdownGame:
    """Pushdown parity game; stacks are tuples growing bottom to top.

    Owner, priority, and the rules applicable at a (control, top) pair may be
    given as dicts for small explicit games or as callables for the lazily
    generated encodings.  A pair with no applicable rule is a dead end and
    loses for the owner of its control.
    """

    def __init__(self, owner, priority, rules, initial,
                 controls=None, alphabet=None):
        self._owner = owner
        self._priority = priority
        self._rules = rules
        self._moves_cache = {}
        self.initial = initial
        self.controls = controls
        self.alphabet = alphabet

    def owner(self, control) -> int:
        if callable(self._owner):
            return self._owner(control)
        return self._owner[control]

    def priority(self, control) -> int:
        if callable(self._priority):
            return self._priority(control)
        return self._priority[control]

    def moves(self, control, top):
        key = (control, top)
        hit = self._moves_cache.get(key)
        if hit is None:
            if callable(self._rules):
                hit = tuple(self._rules(control, top))
            else:
                hit = tuple(self._rules.get(key, ()))
            self._moves_cache[key] = hit
        return hit

    def apply(self, config, rule: Rule):
        control, stack = config
        assert rule.control == control and rule.top == stack[-1]
        if rule.action == "push":
            return rule.target, stack + (rule.push,)
        if rule.action == "pop":
            return rule.target, stack[:-1]
        return rule.target, stack


class PushdownEncoder:
    """Builds the stack presentation of a macro game.

    Stack symbols name heights exactly up to tag_cap and by periodic status
    class above it, so the stack for height i is always determined: bottom,
    symbol(1), ..., symbol(i).  Rules are generated on demand.

    Mover-owned choice points (entry selection and value walkers) carry
    priority 1 for the output builder and 0 for the input builder, so a mover
    who stalls forever inside a gadget loses, while every completed crossing
    passes a landing control carrying the crossing's real priority (>= 2
    after bumping).  Shared deterministic plumbing (height rewrites) carries
    priority 0 and always terminates, so it never dominates a play.

    With a strategy table, that builder's choice controls compile to a single
    deterministic height rewrite per stack symbol instead of the gadgets; a
    symbol where the table offers no legal rule becomes a dead end charged to
    that builder.
    """

    def __init__(self, macro: MacroGame, tag_cap=None, strategy=None):
        self.macro = macro
        params = macro.table.params
        self.params = params
        ell0, ell, bound = params.prefix_len, params.period, params.bound
        floor = max(2 * (ell0 + ell) + 2, bound + 2,
                    ell0 + bound + 2 * ell + 2)
        if strategy is not None:
            if strategy.period != ell:
                raise ValueError("strategy period does not match the table")
            floor = max(floor, strategy.threshold + bound + 2)
        self.tag_cap = max(tag_cap or 0, floor)
        self.strategy = strategy
        self._rep_cache = {}

    # symbols ----------------------------------------------------------

    def symbol(self, height):
        if height == 0:
            return BOTTOM
        if height <= self.tag_cap:
            return height
        return ("big", status_of(height, self.params))

    def push_symbol(self, top):
        """Symbol of height h+1 given the symbol of height h."""
        if top == BOTTOM:
            return self.symbol(1)
        if isinstance(top, int):
            return self.symbol(top + 1)
        return ("big", self._next_status(top[1]))

    def _next_status(self, status):
        if status < self.params.prefix_len + self.params.period:
            return status + 1
        return self.params.prefix_len + 1

    def symbol_status(self, top):
        if top == BOTTOM:
            return 0
        if isinstance(top, int):
            return status_of(top, self.params)
        return top[1]

    def rep_height(self, top):
        """A height the symbol can sit at; exact for tagged symbols."""
        if top == BOTTOM:
            return 0
        if isinstance(top, int):
            return top
        hit = self._rep_cache.get(top)
        if hit is None:
            hit = self.tag_cap + 1
            while status_of(hit, self.params) != top[1]:
                hit += 1
            self._rep_cache[top] = hit
        return hit

    def alphabet(self):
        ell0, ell = self.params.prefix_len, self.params.period
        return tuple([BOTTOM] + list(range(1, self.tag_cap + 1))
                     + [("big", s) for s in range(ell0 + 1, ell0 + ell + 1)])

    # game views -------------------------------------------------------

    def game(self) -> PushdownGame:
        return PushdownGame(
            self._owner, self._priority, self._moves,
            (("choose", self.macro.automaton.initial), (BOTTOM,)))

    def _who(self, state) -> int:
        return 0 if self.macro.mover((state, 0)) == OUTPUT else 1

    def _stall(self, state) -> int:
        return 1 if self._who(state) == 0 else 0

    def _owner(self, control) -> int:
        kind = control[0]
        if kind in ("choose", "wup", "wdn"):
            return self._who(control[1])
        return 0

    def _priority(self, control) -> int:
        kind = control[0]
        if kind in ("choose", "wup", "wdn"):
            return self._stall(control[1])
        if kind == "land":
            return control[2]
        if kind == "div":
            return control[1]
        return 0

    # rules ------------------------------------------------------------

    def _moves(self, control, top):
        kind = control[0]
        if kind == "choose":
            state = control[1]
            fixed = self.strategy
            if fixed is not None and self.macro.mover((state, 0)) == fixed.role:
                return self._compiled_rules(control, top)
            return self._entry_rules(control, top)
        if kind == "land":
            return (Rule(control, top, "stay", ("choose", control[1])),)
        if kind == "div":
            return (Rule(control, top, "stay", control),)
        if kind == "zap":
            _, state, prio, height = control
            if top != BOTTOM:
                return (Rule(control, top, "pop", control),)
            return self._step_rules(control, top, height, state, prio)
        if kind == "up":
            _, state, prio, rest = control
            nxt = ("up", state, prio, rest - 1) if rest > 1 \
                else ("land", state, prio)
            return (Rule(control, top, "push", nxt,
                         push=self.push_symbol(top)),)
        if kind == "dn":
            _, state, prio, rest = control
            if top == BOTTOM:
                return ()
            nxt = ("dn", state, prio, rest - 1) if rest > 1 \
                else ("land", state, prio)
            return (Rule(control, top, "pop", nxt),)
        if kind in ("wup", "wdn"):
            return self._walker_rules(control, top)
        raise ValueError(f"unknown control {control!r}")

    def _step_rules(self, control, top, delta, state, prio, note=()):
        """First step of a height change by delta, ending at the landing."""
        land = ("land", state, prio)
        if delta == 0:
            return (Rule(control, top, "stay", land, note=note),)
        if delta > 0:
            nxt = ("up", state, prio, delta - 1) if delta > 1 else land
            return (Rule(control, top, "push", nxt,
                         push=self.push_symbol(top), note=note),)
        if top == BOTTOM:
            return ()
        nxt = ("dn", state, prio, -delta - 1) if delta < -1 else land
        return (Rule(control, top, "pop", nxt, note=note),)

    def _entry_rules(self, control, top):
        """All exit-class gadget entries available to the mover."""
        state = control[1]
        rep = self.rep_height(top)
        status = self.symbol_status(top)
        params = self.params
        rules = []
        for eid, (sig, combo) in enumerate(self.macro.entries(state)):
            if sig.status_i != status:
                continue
            if move_witness(params, rep, sig) is None:
                continue
            note = ("entry", state, eid)
            if combo.diverge:
                rules.append(Rule(control, top, "stay",
                                  ("div", combo.max_inf), note=note))
                continue
            land_state, prio, off = combo.state, combo.col_max, combo.offset
            if combo.anchor == "0":
                rules.append(Rule(control, top, "stay",
                                  ("zap", land_state, prio, off), note=note))
            elif combo.anchor == "I":
                rules.extend(self._step_rules(control, top, off,
                                              land_state, prio, note=note))
            elif sig.i_less_m == 1:
                rules.append(Rule(control, top, "push",
                                  ("wup", state, eid, status_of(1, params)),
                                  push=self.push_symbol(top), note=note))
            elif sig.status_diff == 0:
                rules.extend(self._step_rules(control, top, off,
                                              land_state, prio, note=note))
            elif top != BOTTOM:
                rules.append(Rule(control, top, "pop",
                                  ("wdn", state, eid, status_of(1, params)),
                                  note=note))
        return rules

    def _walker_rules(self, control, top):
        """Seek a column value: move away from the memory height, commit on
        any cell whose value and distance statuses match the entry."""
        kind, state, eid, dstat = control
        sig, combo = self.macro.entries(state)[eid]
        rules = []
        if dstat == sig.status_diff and self.symbol_status(top) == sig.status_m:
            rules.extend(self._step_rules(control, top, combo.offset,
                                          combo.state, combo.col_max,
                                          note=("commit", eid)))
        cont = (kind, state, eid, self._next_status(dstat))
        if kind == "wup":
            rules.append(Rule(control, top, "push", cont,
                              push=self.push_symbol(top)))
        elif top != BOTTOM:
            rules.append(Rule(control, top, "pop", cont))
        return rules

    # strategy compilation ---------------------------------------------

    def _compiled_rules(self, control, top):
        """The fixed builder's single deterministic move at this symbol."""
        state = control[1]
        strat = self.strategy
        params = self.params
        engine = self.macro.engine
        if top == BOTTOM or isinstance(top, int):
            mem = 0 if top == BOTTOM else top
            move = strat.concrete_move(params, state, mem)
            if move is None:
                return ()
            note = ("play", move)
            outcome = engine.column_exit(state, mem, move)
            if isinstance(outcome, Diverge):
                return (Rule(control, top, "stay", ("div", outcome.max_inf),
                             note=note),)
            return self._step_rules(control, top, outcome.mem - mem,
                                    outcome.state, outcome.col_max, note=note)
        rule = strat.periodic.get((state, top[1] % params.period))
        if rule is None:
            return ()
        return self._class_rules(control, top, rule)

    def _class_rules(self, control, top, rule):
        """One rule valid for every height the periodic-class symbol covers."""
        state = control[1]
        params = self.params
        rep = self.rep_height(top)
        if isinstance(rule, ConstInput):
            move, shift = rule.value, None
        elif isinstance(rule, OffsetInput):
            move, shift = rep + rule.delta, rule.delta
            if move < 0:
                return ()
        else:
            sig = rule.sig
            if sig.status_i != top[1]:
                return ()
            ell0 = params.prefix_len
            if sig.status_m <= ell0 or sig.status_diff <= ell0:
                return ()
            shift = sig.status_diff if sig.i_less_m else -sig.status_diff
            move = rep + shift
            if move < 0 or signature_of(rep, move, params) != sig:
                return ()
        try:
            combo = self.macro.table.lookup(state, rep, move)
        except KeyError:
            return ()
        note = ("play", "class", move - rep if shift is not None else move)
        if combo.diverge:
            return (Rule(control, top, "stay", ("div", combo.max_inf),
                         note=note),)
        land_state, prio, off = combo.state, combo.col_max, combo.offset
        if combo.anchor == "0":
            return (Rule(control, top, "stay",
                         ("zap", land_state, prio, off), note=note),)
        if combo.anchor == "I":
            return self._step_rules(control, top, off, land_state, prio,
                                    note=note)
        if shift is None:
            # constant move with a value-anchored exit: the target is constant
            return (Rule(control, top, "stay",
                         ("zap", land_state, prio, move + off), note=note),)
        return self._step_rules(control, top, shift + off, land_state, prio,
                                note=note)


def encode_pushdown(macro: MacroGame, tag_cap=None) -> PushdownGame:
    return PushdownEncoder(macro, tag_cap).game()


def encode_residual(macro: MacroGame, strategy: StrategyTable,
                    tag_cap=None) -> PushdownGame:
    """The pushdown game with one builder fixed to the given strategy."""
    return PushdownEncoder(macro, tag_cap, strategy).game()
