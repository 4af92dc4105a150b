"""Deciding the round game and certifying finite strategy tables.

Player 0 wins a play iff the maximum priority seen infinitely often is even;
player 1 wins otherwise.  Strategies are positional (one successor per owned
vertex) throughout.

The overall pipeline guesses and then proves: slanted finite truncations of
the macro game propose candidate strategies, each candidate is generalized
into a finite rule table, and only an exact analysis of the induced pushdown
game can declare a winner.  Truncations are never trusted on their own.
"""

from __future__ import annotations

import itertools
import sys
from collections import deque
from dataclasses import dataclass

from .core import INPUT, OUTPUT
from .column import BudgetError, signature_of
from .game import (SINK, ConstInput, LargeInput, MacroGame, OffsetInput,
                   PushdownGame, StrategyTable, build_macro_game,
                   build_one_player_game, encode_pushdown, encode_residual,
                   large_entries)


@dataclass(frozen=True)
class FiniteParityGame:
    """Explicit parity game: total successor relation, vertex priorities."""

    vertices: tuple
    owner: dict    # vertex -> 0 | 1
    edges: dict    # vertex -> tuple of successors
    priority: dict  # vertex -> natural

    def validate(self) -> list:
        problems = []
        known = set(self.vertices)
        for v in self.vertices:
            if v not in self.owner or self.owner[v] not in (0, 1):
                problems.append(f"vertex {v!r} lacks a valid owner")
            if v not in self.priority or self.priority[v] < 0:
                problems.append(f"vertex {v!r} lacks a valid priority")
            succ = self.edges.get(v, ())
            if not succ:
                problems.append(f"vertex {v!r} has no successor")
            for w in succ:
                if w not in known:
                    problems.append(f"edge {v!r} -> {w!r} leaves the game")
        return problems

    def subgame(self, keep) -> "FiniteParityGame":
        keep = frozenset(keep)
        return FiniteParityGame(
            tuple(v for v in self.vertices if v in keep),
            {v: self.owner[v] for v in keep},
            {v: tuple(w for w in self.edges[v] if w in keep) for v in keep},
            {v: self.priority[v] for v in keep})


def attractor(game: FiniteParityGame, target, player):
    """Least superset of target the player can force the play into.

    Returns the attractor set and a strategy for the player's vertices
    outside the target that strictly decreases the distance to it.
    """
    inside = set(target)
    strategy = {}
    preds = {v: set() for v in game.vertices}
    for v in game.vertices:
        for w in set(game.edges[v]):
            preds[w].add(v)
    missing = {v: len(set(game.edges[v])) for v in game.vertices}
    queue = list(inside)
    while queue:
        w = queue.pop()
        for v in preds[w]:
            if v in inside:
                continue
            if game.owner[v] == player:
                inside.add(v)
                strategy[v] = w
                queue.append(v)
            else:
                missing[v] -= 1
                if missing[v] == 0:
                    inside.add(v)
                    queue.append(v)
    return frozenset(inside), strategy


def zielonka(game: FiniteParityGame):
    """Exact winning partition with positional strategies for both players."""
    regions = {0: set(), 1: set()}
    strategies = {0: {}, 1: {}}
    depth = min(200_000, max(sys.getrecursionlimit(),
                             2 * len(game.vertices) + 1000))
    sys.setrecursionlimit(depth)
    _zielonka(game, regions, strategies)
    return regions, strategies


def _zielonka(game, regions, strategies):
    if not game.vertices:
        return
    top = max(game.priority[v] for v in game.vertices)
    mover = top % 2
    other = 1 - mover
    peak = [v for v in game.vertices if game.priority[v] == top]
    area, reach = attractor(game, peak, mover)
    sub_regions = {0: set(), 1: set()}
    sub_strategies = {0: {}, 1: {}}
    _zielonka(game.subgame(set(game.vertices) - set(area)),
              sub_regions, sub_strategies)
    if not sub_regions[other]:
        # the mover keeps the whole game: recurse strategy + attractor pull +
        # any staying edge on owned peak vertices
        regions[mover].update(game.vertices)
        strategies[mover].update(sub_strategies[mover])
        strategies[mover].update(reach)
        for v in peak:
            if game.owner[v] == mover and v not in strategies[mover]:
                strategies[mover][v] = game.edges[v][0]
        return
    escape, pull = attractor(game, sub_regions[other], other)
    regions[other].update(escape)
    strategies[other].update(sub_strategies[other])
    strategies[other].update(pull)
    _zielonka(game.subgame(set(game.vertices) - set(escape)),
              regions, strategies)


# -- truncation of the macro game -------------------------------------

BEYOND = ("!beyond",)


@dataclass
class TruncatedGame:
    """Finite window of a macro game with unbounded moves classed together.

    Real vertices are (state, mem) with mem <= height.  Every move routes
    through a shared (priority, successor) relay vertex so that crossing
    priorities live on vertices.  Column values past the exact window are
    grouped by exit class; classes with a value-anchored or out-of-window
    target land on the absorbing `beyond` vertex, whose priority favors the
    builder named by optimistic_for.
    """

    game: FiniteParityGame
    moves: dict          # (vertex, relay) -> int column value or ("large", sig)
    reals: tuple
    height: int
    optimistic_for: str


def truncate(macro: MacroGame, height: int, optimistic_for: str):
    table = macro.table
    bound = table.params.bound
    owner, edges, priority = {}, {}, {}
    vertices, moves = [], {}

    def declare(v, who, prio, succs=None):
        if v not in priority:
            vertices.append(v)
            owner[v] = who
            priority[v] = prio
            if succs is not None:
                edges[v] = succs
        return v

    declare(BEYOND, 0, 0 if optimistic_for == OUTPUT else 1, (BEYOND,))

    def sink_vertex(max_inf):
        return declare((SINK, max_inf), 0, max_inf, ((SINK, max_inf),))

    def relay(prio, succ):
        return declare(("!e", prio, succ), 0, prio, (succ,))

    reals = tuple((state, mem) for state in macro.automaton.states
                  for mem in range(height + 1))
    for v in reals:
        declare(v, 0 if macro.mover(v) == OUTPUT else 1, 0)
    for v in reals:
        state, mem = v
        out = {}
        for move in range(mem + bound + 2):
            combo = table.lookup(state, mem, move)
            if combo.diverge:
                prio = combo.max_inf
                succ = sink_vertex(prio)
            else:
                prio = combo.col_max
                exit_mem = combo.mem_for(mem, move)
                succ = ((combo.state, exit_mem)
                        if exit_mem <= height else BEYOND)
            out.setdefault((prio, succ), move)
        for sig, combo in large_entries(table, state, mem):
            if combo.diverge:
                prio = combo.max_inf
                succ = sink_vertex(prio)
            else:
                prio = combo.col_max
                if combo.anchor == "M":
                    succ = BEYOND
                else:
                    exit_mem = (combo.offset if combo.anchor == "0"
                                else mem + combo.offset)
                    succ = ((combo.state, exit_mem)
                            if 0 <= exit_mem <= height else BEYOND)
            out.setdefault((prio, succ), ("large", sig))
        succs = []
        for (prio, succ), desc in out.items():
            r = relay(prio, succ)
            succs.append(r)
            moves[(v, r)] = desc
        edges[v] = tuple(succs)
    game = FiniteParityGame(tuple(vertices), owner, edges, priority)
    return TruncatedGame(game, moves, reals, height, optimistic_for)


def two_sided_solve(macro: MacroGame, height: int):
    """Solve both slanted truncations; a pessimistic win decides the start.

    The returned winner (possibly None) is the builder who wins even when
    every out-of-window continuation is counted against them; the two solved
    truncations are returned for candidate extraction either way.
    """
    out_slant = truncate(macro, height, OUTPUT)
    in_slant = truncate(macro, height, INPUT)
    out_regions, out_strats = zielonka(out_slant.game)
    in_regions, in_strats = zielonka(in_slant.game)
    start = macro.initial
    winner = None
    if start in in_regions[0]:
        winner = OUTPUT
    elif start in out_regions[1]:
        winner = INPUT
    return winner, (out_slant, out_regions, out_strats), \
        (in_slant, in_regions, in_strats)


# -- strategy extraction ----------------------------------------------

class TemplateMismatch(Exception):
    """The truncated strategy does not fit the finite rule templates."""


def _classify_move(params, mem, desc):
    if isinstance(desc, tuple):
        return LargeInput(desc[1])
    if desc <= params.bound:
        return ConstInput(desc)
    if abs(desc - mem) <= params.bound:
        return OffsetInput(desc - mem)
    return LargeInput(signature_of(mem, desc, params))


def extract_periodic_strategy(macro: MacroGame, trunc: TruncatedGame,
                              fstrat: dict, role: str,
                              threshold: int) -> StrategyTable:
    """Generalize a positional truncated strategy into a finite rule table.

    Memories below the threshold keep their move verbatim; just above it,
    one window of residues donates the periodic rules.  Vertices the
    truncated strategy leaves uncovered stay uncovered: if the opponent can
    reach them, certification will fail and a wider window is needed.
    """
    params = macro.table.params
    who = 0 if role == OUTPUT else 1
    explicit, periodic = {}, {}
    for vertex in trunc.reals:
        state, mem = vertex
        if trunc.game.owner[vertex] != who:
            continue
        relay_v = fstrat.get(vertex)
        if relay_v is None:
            continue
        desc = trunc.moves.get((vertex, relay_v))
        if desc is None:
            raise TemplateMismatch(f"untracked move at {vertex!r}")
        rule = _classify_move(params, mem, desc)
        if mem < threshold:
            explicit[(state, mem)] = rule
        elif mem < threshold + params.period:
            periodic[(state, mem % params.period)] = rule
    return StrategyTable(role, threshold, params.period, explicit, periodic)


# -- exact analysis of pushdown runs ----------------------------------

@dataclass
class RunWitness:
    """A concrete run demonstrating a claim about a pushdown game."""

    kind: str                  # "cycle" | "deadend"
    head: tuple                # (control, top) where the event happens
    max_priority: int | None   # dominating priority of the cycle part
    prefix: tuple              # rules from the initial configuration
    cycle: tuple               # repeating rule section, empty for dead ends
    truncated: bool = False


class PushdownAnalysis:
    """Reachable-head summaries of all runs of a pushdown game.

    A head is a (control, top symbol) pair.  Pop summaries record from which
    control a run can continue once the current top has been popped, with the
    maximum control priority passed on the way.  Excursion edges relabel a
    push together with its summarized return, so each infinite run maps onto
    an infinite path of this finite labeled graph whose edge labels partition
    the run's control sequence; limsup questions become cycle search.
    """

    def __init__(self, game: PushdownGame, limit=4_000_000):
        self.game = game
        self.limit = limit
        self._ops = 0
        self._prio_cache = {}
        self.heads = set()
        self.edges = {}          # src head -> {(label, dst head): evidence}
        self.summaries = {}      # head -> {(target control, prio): derivation}
        self._stay_parents = {}
        self._push_parents = {}
        self._ret_parents = {}
        self.dead_heads = []
        self._todo = deque()
        self.initial_head = (game.initial[0], game.initial[1][-1])
        self._add_head(self.initial_head)
        self._drain()

    # construction -----------------------------------------------------

    def _pr(self, control):
        hit = self._prio_cache.get(control)
        if hit is None:
            hit = self.game.priority(control)
            self._prio_cache[control] = hit
        return hit

    def _tick(self):
        self._ops += 1
        if self._ops > self.limit:
            raise BudgetError(
                f"pushdown analysis exceeded {self.limit} steps")

    def _add_head(self, head):
        if head not in self.heads:
            self.heads.add(head)
            self._todo.append(("head", head))

    def _add_edge(self, src, label, dst, evidence):
        self._tick()
        bucket = self.edges.setdefault(src, {})
        key = (label, dst)
        if key not in bucket:
            bucket[key] = evidence
            self._add_head(dst)

    def _add_summary(self, head, target, prio, deriv):
        self._tick()
        bucket = self.summaries.setdefault(head, {})
        key = (target, prio)
        if key not in bucket:
            bucket[key] = deriv
            self._todo.append(("sum", head, target, prio))

    def _drain(self):
        todo = self._todo
        while todo:
            item = todo.popleft()
            if item[0] == "head":
                self._open(item[1])
            else:
                self._propagate(item[1], item[2], item[3])

    def _open(self, head):
        control, top = head
        rules = self.game.moves(control, top)
        if not rules:
            self.dead_heads.append(head)
            return
        pc = self._pr(control)
        for rule in rules:
            self._tick()
            if rule.action == "stay":
                dst = (rule.target, top)
                self._add_edge(head, self._pr(rule.target), dst,
                               ("step", rule))
                self._stay_parents.setdefault(dst, []).append((head, rule))
                for (tgt, prio) in list(self.summaries.get(dst, {})):
                    self._add_summary(head, tgt, max(pc, prio),
                                      ("stay", rule, (dst, tgt, prio)))
            elif rule.action == "push":
                dst = (rule.target, rule.push)
                self._add_edge(head, self._pr(rule.target), dst,
                               ("step", rule))
                self._push_parents.setdefault(dst, []).append((head, rule))
                for (tgt, prio) in list(self.summaries.get(dst, {})):
                    self._returned(head, rule, dst, tgt, prio)
            else:
                self._add_summary(head, rule.target,
                                  max(pc, self._pr(rule.target)),
                                  ("pop", rule))

    def _returned(self, origin, rule, pushed, target, prio):
        """Relabel a push whose excursion pops back as one edge."""
        back = (target, origin[1])
        self._add_edge(origin, prio, back,
                       ("ret", rule, (pushed, target, prio)))
        self._ret_parents.setdefault(back, []).append(
            (origin, prio, rule, pushed))
        pc = self._pr(origin[0])
        for (tgt, p2) in list(self.summaries.get(back, {})):
            self._add_summary(origin, tgt, max(pc, prio, p2),
                              ("ret", rule, (pushed, target, prio),
                               (back, tgt, p2)))

    def _propagate(self, head, target, prio):
        skey = (head, target, prio)
        for parent, rule in self._stay_parents.get(head, ()):
            self._add_summary(parent, target,
                              max(self._pr(parent[0]), prio),
                              ("stay", rule, skey))
        for parent, rule in self._push_parents.get(head, ()):
            self._returned(parent, rule, head, target, prio)
        for origin, p1, rule, pushed in self._ret_parents.get(head, ()):
            self._add_summary(origin, target,
                              max(self._pr(origin[0]), p1, prio),
                              ("ret", rule, (pushed, head[0], p1), skey))

    # queries ----------------------------------------------------------

    def labels(self):
        out = set()
        for bucket in self.edges.values():
            for (label, _dst) in bucket:
                out.add(label)
        return out

    def run_witness(self, parity) -> RunWitness | None:
        """A reachable lasso whose dominating priority has the parity."""
        for target in sorted(self.labels(), reverse=True):
            if target % 2 == parity:
                found = self._lasso(target)
                if found is not None:
                    return found
        return None

    def deadend_witness(self, owner) -> RunWitness | None:
        """A run into a rule-less head owned by the given player."""
        for head in self.dead_heads:
            if self.game.owner(head[0]) != owner:
                continue
            path = self._path(self.initial_head, head)
            if path is None:
                continue
            rules, cut = self._expand([ev for (_s, ev, _d) in path])
            return RunWitness("deadend", head, None, tuple(rules), (), cut)
        return None

    def _lasso(self, target):
        allowed = {}
        for src, bucket in self.edges.items():
            for (label, dst), ev in bucket.items():
                if label <= target:
                    allowed.setdefault(src, []).append((label, dst, ev))
        comp = _tarjan(allowed)
        for src, outs in allowed.items():
            for label, dst, ev in outs:
                if label != target or comp.get(src) != comp.get(dst):
                    continue
                pre = self._path(self.initial_head, src)
                if pre is None:
                    continue
                loop = self._path(dst, src, cap=target,
                                  comp=comp, comp_id=comp[src])
                if loop is None:
                    continue
                prefix, cut1 = self._expand([e for (_s, e, _d) in pre])
                cycle, cut2 = self._expand(
                    [ev] + [e for (_s, e, _d) in loop])
                return RunWitness("cycle", src, target, tuple(prefix),
                                  tuple(cycle), cut1 or cut2)
        return None

    def _path(self, src, dst, cap=None, comp=None, comp_id=None):
        """Edge path between heads, optionally label-capped inside one SCC."""
        if src == dst:
            return []
        seen = {src: None}
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            for (label, nxt), ev in self.edges.get(cur, {}).items():
                if cap is not None and label > cap:
                    continue
                if comp is not None and comp.get(nxt) != comp_id:
                    continue
                if nxt in seen:
                    continue
                seen[nxt] = (cur, ev)
                if nxt == dst:
                    path = []
                    walk = nxt
                    while seen[walk] is not None:
                        prev, pev = seen[walk]
                        path.append((prev, pev, walk))
                        walk = prev
                    path.reverse()
                    return path
                queue.append(nxt)
        return None

    def _expand(self, evidences, limit=20000):
        """Flatten edge evidence and pop summaries into a rule sequence."""
        out = []
        cut = False
        stack = [("ev", ev) for ev in reversed(evidences)]
        while stack:
            if len(out) >= limit:
                cut = True
                break
            kind, payload = stack.pop()
            if kind == "ev":
                out.append(payload[1])
                if payload[0] == "ret":
                    stack.append(("sum", payload[2]))
                continue
            head, target, prio = payload
            deriv = self.summaries[head][(target, prio)]
            out.append(deriv[1])
            if deriv[0] == "stay":
                stack.append(("sum", deriv[2]))
            elif deriv[0] == "ret":
                stack.append(("sum", deriv[3]))
                stack.append(("sum", deriv[2]))
        return out, cut


def _tarjan(adj):
    """Strongly connected components of {node: [(label, dst, ev)]}."""
    nodes = set(adj)
    for outs in adj.values():
        for (_label, dst, _ev) in outs:
            nodes.add(dst)
    index, low, comp = {}, {}, {}
    onstack, stack = set(), []
    counter = 0
    comp_count = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, pos = work[-1]
            if pos == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                onstack.add(node)
            outs = adj.get(node, ())
            advanced = False
            while pos < len(outs):
                succ = outs[pos][1]
                pos += 1
                if succ not in index:
                    work[-1] = (node, pos)
                    work.append((succ, 0))
                    advanced = True
                    break
                if succ in onstack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                while True:
                    member = stack.pop()
                    onstack.discard(member)
                    comp[member] = comp_count
                    if member == node:
                        break
                comp_count += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return comp


# -- certification and the solve driver -------------------------------

@dataclass
class Certificate:
    """Outcome of checking one finite strategy table exactly."""

    role: str
    strategy: StrategyTable
    verified: bool
    reason: str
    refutation: RunWitness | None = None


def certify_strategy(macro: MacroGame, strategy: StrategyTable,
                     limit=4_000_000) -> Certificate:
    """Check a strategy table against every opponent behavior.

    The fixed builder's choices compile away in the pushdown encoding,
    leaving all nondeterminism to the opponent; the table is verified iff no
    remaining run reaches the losing parity and no reachable position falls
    off the table.  This is exact: a verified certificate proves the table
    wins the round game from the start, whatever window proposed it.
    """
    who = 0 if strategy.role == OUTPUT else 1
    try:
        residual = encode_residual(macro, strategy)
        analysis = PushdownAnalysis(residual, limit=limit)
        witness = analysis.run_witness(1 - who)
    except BudgetError as err:
        return Certificate(strategy.role, strategy, False, str(err))
    if witness is not None:
        return Certificate(strategy.role, strategy, False,
                           "opponent can force the losing parity", witness)
    stuck = analysis.deadend_witness(who)
    if stuck is not None:
        return Certificate(strategy.role, strategy, False,
                           "table offers no move on a reachable position",
                           stuck)
    return Certificate(strategy.role, strategy, True,
                       "no opponent run defeats the table")


@dataclass
class SolveResult:
    winner: str | None
    certificate: Certificate | None
    height: int
    macro: MacroGame
    attempts: tuple


def default_height(params) -> int:
    return 4 * (params.prefix_len + params.period + params.bound) + 8


def solve(automaton, height=None, max_height=2 ** 14,
          limit=4_000_000) -> SolveResult:
    """Decide the winner of the induced round game, with proof.

    Slanted truncations propose candidate strategies for both builders;
    each candidate is generalized into a finite table and certified against
    the full pushdown game.  Only certification decides.  The window doubles
    until some candidate certifies or max_height is passed; winner None
    means no verdict within the budget, never a guess.
    """
    macro = build_macro_game(automaton)
    window = height or default_height(macro.table.params)
    window = max(8, min(window, max_height))
    attempts = []
    while True:
        _hint, out_side, in_side = two_sided_solve(macro, window)
        out_slant, out_regions, out_strats = out_side
        in_slant, in_regions, in_strats = in_side
        threshold = window // 2
        start = macro.initial
        candidates = []
        if start in in_regions[0]:
            candidates.append((OUTPUT, in_slant, in_strats[0]))
        if start in out_regions[1]:
            candidates.append((INPUT, out_slant, out_strats[1]))
        if start in out_regions[0]:
            candidates.append((OUTPUT, out_slant, out_strats[0]))
        if start in in_regions[1]:
            candidates.append((INPUT, in_slant, in_strats[1]))
        for role, slant, fstrat in candidates:
            try:
                table = extract_periodic_strategy(macro, slant, fstrat,
                                                  role, threshold)
            except TemplateMismatch as err:
                attempts.append((role, f"window {window}: {err}"))
                continue
            cert = certify_strategy(macro, table, limit=limit)
            if cert.verified:
                return SolveResult(role, cert, window, macro, tuple(attempts))
            attempts.append((role, f"window {window}: {cert.reason}"))
        if window >= max_height:
            return SolveResult(None, None, window, macro, tuple(attempts))
        window = min(2 * window, max_height)


def accepting_run(automaton, limit=4_000_000) -> RunWitness | None:
    """A lasso witnessing an accepted word, or None if none exists."""
    macro = build_one_player_game(automaton)
    analysis = PushdownAnalysis(encode_pushdown(macro), limit=limit)
    return analysis.run_witness(0)


def is_empty(automaton, limit=4_000_000) -> bool:
    """Whether the automaton accepts no word at all."""
    return accepting_run(automaton, limit=limit) is None


# -- reachability saturation ------------------------------------------

def saturate_reachability(game: PushdownGame, targets):
    """Player 0's winning region for reaching any target control.

    Returns a predicate on configurations, computed via an alternating
    automaton over stack suffixes saturated from the game rules: player 0
    wins (control, stack) iff the automaton accepts the stack read from the
    top.  A control with no applicable rule loses for its owner, so opponent
    dead ends (including empty-stack ones) count as vacuous wins.
    Needs an explicit-table game: controls and alphabet must be listed.
    """
    if game.controls is None or game.alphabet is None:
        raise ValueError("saturation needs explicit controls and alphabet")
    targets = set(targets)
    any_state = "!any"
    finals = ({any_state} | targets
              | {c for c in game.controls if game.owner(c) == 1})
    trans = {}

    def add(state, symbol, needs) -> bool:
        needs = frozenset(needs)
        bucket = trans.setdefault((state, symbol), set())
        for have in bucket:
            if have <= needs:
                return False
        bucket.difference_update([h for h in bucket if needs < h])
        bucket.add(needs)
        return True

    for symbol in game.alphabet:
        add(any_state, symbol, {any_state})
        for t in targets:
            add(t, symbol, {any_state})

    def options(rule):
        if rule.action == "pop":
            return [frozenset({rule.target})]
        if rule.action == "stay":
            return list(trans.get((rule.target, rule.top), ()))
        out = []
        for first in trans.get((rule.target, rule.push), ()):
            choice_sets = []
            for state in first:
                opts = trans.get((state, rule.top), ())
                if not opts:
                    choice_sets = None
                    break
                choice_sets.append(list(opts))
            if choice_sets is None:
                continue
            for pick in itertools.product(*choice_sets):
                out.append(frozenset().union(*pick))
        return out

    changed = True
    while changed:
        changed = False
        for control in game.controls:
            if control in targets:
                continue
            conjunctive = game.owner(control) == 1
            for symbol in game.alphabet:
                rules = game.moves(control, symbol)
                if not conjunctive:
                    for rule in rules:
                        for opt in options(rule):
                            if add(control, symbol, opt):
                                changed = True
                    continue
                per_rule = []
                blocked = False
                for rule in rules:
                    opts = options(rule)
                    if not opts:
                        blocked = True
                        break
                    per_rule.append(opts)
                if blocked:
                    continue
                combos = 1
                for opts in per_rule:
                    combos *= len(opts)
                if combos > 100_000:
                    raise BudgetError("saturation fanout too large")
                for pick in itertools.product(*per_rule):
                    if add(control, symbol, frozenset().union(*pick)):
                        changed = True

    def winning(config) -> bool:
        control, stack = config
        word = tuple(reversed(stack))
        memo = {}

        def acc(state, k):
            if k == len(word):
                return state in finals
            key = (state, k)
            hit = memo.get(key)
            if hit is None:
                hit = any(all(acc(s, k + 1) for s in needs)
                          for needs in trans.get((state, word[k]), ()))
                memo[key] = hit
            return hit

        return acc(control, 0)

    return winning
