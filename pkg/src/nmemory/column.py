"""Exact per-column behavior, computed in time independent of token heights.

A column walk only ever changes course at the hash cell, at the two token
positions and at the ones/blank boundary.  Stretches of unmarked cells with
one letter are crossed using precomputed block behaviors; the sequence of
those behaviors over the block length is eventually periodic, which yields
the status abstraction (prefix length, period, distance bound) and a finite
table of exit combinations indexed by status signatures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Action, GridLetter

OUTER_BUDGET = 10 ** 6


class BudgetError(Exception):
    """A configured analysis budget was exhausted before an answer was found."""


class SignatureConflict(Exception):
    """Two height pairs with equal signatures produced different exits."""

    def __init__(self, state, signature, witnesses):
        super().__init__(f"state {state}: signature {signature} is not uniform")
        self.state = state
        self.signature = signature
        self.witnesses = witnesses


@dataclass(frozen=True)
class Exit:
    state: str
    mem: int
    col_max: int
    exit_height: int = 0


@dataclass(frozen=True)
class Diverge:
    max_inf: int


ExitOutcome = Exit | Diverge


@dataclass(frozen=True)
class StatusParams:
    prefix_len: int
    period: int
    bound: int


@dataclass(frozen=True)
class StatusSignature:
    status_i: int
    status_m: int
    status_diff: int
    i_less_m: int


@dataclass(frozen=True)
class ExitCombination:
    state: str | None
    anchor: str | None  # "0" absolute, "I" memory-relative, "M" value-relative
    offset: int | None
    col_max: int | None
    max_inf: int | None = None

    @property
    def diverge(self) -> bool:
        return self.anchor is None and self.state is None

    def mem_for(self, i: int, m: int) -> int:
        if self.anchor == "0":
            return self.offset
        if self.anchor == "I":
            return i + self.offset
        return m + self.offset


def status_of(k: int, params: StatusParams) -> int:
    """Exact below the prefix length, then periodic with the given period."""
    if k <= params.prefix_len:
        return k
    return params.prefix_len + 1 + (k - params.prefix_len - 1) % params.period


def signature_of(i: int, m: int, params: StatusParams) -> StatusSignature:
    return StatusSignature(status_of(i, params), status_of(m, params),
                           status_of(abs(i - m), params), 1 if i < m else 0)


def _canon(tau):
    return tuple(sorted(tau.items()))


def _compose(tau_low, low_size, tau_high, high_size, states):
    """Crossing behavior of a low block stacked under a high block."""
    total = low_size + high_size
    result = {}
    for q0 in states:
        for entry_side in ("B", "T"):
            if entry_side == "B":
                cur = ("low", "B", q0)
            else:
                cur = ("high", "T", q0)
            maxp = -1
            visited = {}
            trail = []
            outcome = None
            while outcome is None:
                if cur in visited:
                    cycle = trail[visited[cur]:]
                    outcome = ("div", max(mp for mp in cycle))
                    break
                visited[cur] = len(trail)
                block, side, q = cur
                tau = tau_low if block == "low" else tau_high
                beh = tau[(q, side)]
                kind = beh[0]
                if kind == "div":
                    outcome = beh
                    break
                mp = beh[-1]
                trail.append(mp)
                if kind == "low":
                    if block == "low":
                        outcome = ("low", beh[1], max(maxp, mp))
                    else:
                        maxp = max(maxp, mp)
                        cur = ("low", "T", beh[1])
                elif kind == "high":
                    if block == "high":
                        outcome = ("high", beh[1], max(maxp, mp))
                    else:
                        maxp = max(maxp, mp)
                        cur = ("high", "B", beh[1])
                else:  # dia or right happen at an absolute cell of the stack
                    off = beh[2]
                    if block == "low":
                        cfb = off if side == "B" else low_size - 1 - off
                    else:
                        cfb = low_size + (off if side == "B" else high_size - 1 - off)
                    off_total = cfb if entry_side == "B" else total - 1 - cfb
                    outcome = (kind, beh[1], off_total, max(maxp, mp))
            result[(q0, entry_side)] = outcome
    return result


class ColumnEngine:
    """Accelerated column walks plus the status/signature machinery."""

    def __init__(self, automaton, param_budget=4096):
        self.aut = automaton
        self._flagless = {letter: automaton.flagless_step(letter)
                          for letter in (GridLetter.ONE, GridLetter.BOT)}
        self._top_cache = {}
        self._tau = {}
        self._exit_cache = {}
        self.params = self._compute_params(param_budget)

    # -- block behaviors ------------------------------------------------

    def _tau_one_cell(self, letter):
        prio = self.aut.priority
        tau = {}
        for q, t in self._flagless[letter].items():
            if t.action is Action.UP:
                beh = ("high", t.target, prio[t.target])
            elif t.action is Action.DOWN:
                beh = ("low", t.target, prio[t.target])
            elif t.action is Action.PLACE_UPDATE:
                beh = ("dia", t.target, 0, prio[t.target])
            else:
                beh = ("right", t.target, 0, -1)
            tau[(q, "B")] = beh
            tau[(q, "T")] = beh
        return tau

    def _compute_params(self, budget):
        states = self.aut.states
        seqs = {letter: [None, self._tau_one_cell(letter)]
                for letter in (GridLetter.ONE, GridLetter.BOT)}
        seen = {}
        n = 1
        while True:
            key = tuple(_canon(seqs[letter][n])
                        for letter in (GridLetter.ONE, GridLetter.BOT))
            if key in seen:
                first = seen[key]
                prefix_len = first - 1
                period = n - first
                for letter, seq in seqs.items():
                    self._tau[letter] = seq[:prefix_len + period + 1]
                return StatusParams(prefix_len, period, prefix_len + period)
            seen[key] = n
            if n >= budget:
                raise BudgetError(
                    f"block-behavior periodicity not found within {budget} lengths")
            for letter, seq in seqs.items():
                seq.append(_compose(seq[n], n, seq[1], 1, states))
            n += 1

    def tau_for(self, letter, length):
        idx = length if length <= self.params.prefix_len + self.params.period \
            else status_of(length, self.params)
        return self._tau[letter][idx]

    def top_behavior(self, q0):
        """Walk outcome on the infinite unmarked blank region entered from below."""
        if q0 in self._top_cache:
            return self._top_cache[q0]
        rules = self._flagless[GridLetter.BOT]
        prio = self.aut.priority
        state, pos, maxp = q0, 0, -1
        occurrence = {state: (0, 0)}
        created = []  # (state, pos, prio) after each move
        beh = None
        while beh is None:
            t = rules[state]
            if t.action is Action.PLACE_UPDATE:
                beh = ("dia", t.target, pos, max(maxp, prio[t.target]))
                break
            if t.action is Action.RIGHT:
                beh = ("right", t.target, pos, maxp)
                break
            pos += 1 if t.action is Action.UP else -1
            if pos < 0:
                beh = ("low", t.target, max(maxp, prio[t.target]))
                break
            state = t.target
            maxp = max(maxp, prio[state])
            created.append((state, pos, prio[state]))
            if state in occurrence:
                idx, old_pos = occurrence[state]
                drift = pos - old_pos
                segment = created[idx:]
                if drift >= 0:
                    beh = ("div", max(pr for _, _, pr in segment))
                    break
                # downward drift: the segment repeats shifted until the walk
                # steps below the region; find the exit inside that copy
                rels = [p - old_pos for _, p, _ in segment]
                k = 1
                while old_pos + k * drift + min(rels) > -1:
                    k += 1
                target_rel = -1 - old_pos - k * drift
                exit_state = next(st for (st, p, _), r in zip(segment, rels)
                                  if r == target_rel)
                beh = ("low", exit_state, maxp)
                break
            occurrence[state] = (len(created), pos)
        self._top_cache[q0] = beh
        return beh

    # -- the column walk ------------------------------------------------

    def column_exit(self, state, mem, value, entry_height=0) -> ExitOutcome:
        """Run one column of the given value with the memory token at `mem`."""
        key = (state, mem, value, entry_height)
        hit = self._exit_cache.get(key)
        if hit is not None:
            return hit
        out = self._column_exit(state, mem, value, entry_height)
        self._exit_cache[key] = out
        return out

    def _column_exit(self, state, mem, value, entry_height=0) -> ExitOutcome:
        aut = self.aut
        prio = aut.priority
        i, m = mem, value
        q, v, j = state, entry_height, 0
        maxp = prio[q]
        nstates = len(aut.states)
        cushion = 2 * nstates + 2
        high_floor = (max(i, m) + self.params.prefix_len + self.params.period
                      + 4 * nstates + 4)
        ell = self.params.period
        seen_exact = {}
        shifted = {}
        deltas = []
        last_low = 0
        came = None
        while True:
            if len(deltas) > OUTER_BUDGET:
                raise RuntimeError("column walk exceeded its step budget; "
                                   "divergence detection failed")
            letter = GridLetter.HASH if v == 0 else (
                GridLetter.ONE if v <= m else GridLetter.BOT)
            b1 = 1 if v == i else 0
            b2 = 1 if v == j else 0
            if letter is GridLetter.HASH or b1 or b2:
                t = aut.rule(q, letter, b1, b2)
                if t.action is Action.RIGHT:
                    return Exit(t.target, j, maxp, v)
                delta = prio[t.target]
                q = t.target
                if t.action is Action.UP:
                    v, came = v + 1, 1
                elif t.action is Action.DOWN:
                    v, came = v - 1, -1
                else:
                    j, came = v, None
            else:
                below = [x for x in (0, i, j) if x < v]
                if letter is GridLetter.BOT:
                    below.append(m)
                above = [x for x in (i, j) if x > v]
                if letter is GridLetter.ONE:
                    above.append(m + 1)
                lo = max(below) + 1
                hi = min(above) - 1 if above else None
                if came == -1:
                    beh = self.tau_for(letter, v - lo + 1)[(q, "T")]
                    base_lo, base_hi = lo, v
                elif hi is None:
                    beh = self.top_behavior(q)
                    base_lo, base_hi = v, None
                else:
                    beh = self.tau_for(letter, hi - v + 1)[(q, "B")]
                    base_lo, base_hi = v, hi
                kind = beh[0]
                if kind == "div":
                    return Diverge(beh[1])
                delta = beh[-1]
                if kind == "low":
                    q, v, came = beh[1], base_lo - 1, -1
                elif kind == "high":
                    q, v, came = beh[1], base_hi + 1, 1
                else:
                    pos = base_lo + beh[2] if came != -1 else base_hi - beh[2]
                    if kind == "right":
                        return Exit(beh[1], j, max(maxp, delta), pos)
                    q, v, j, came = beh[1], pos, pos, None
            maxp = max(maxp, delta)
            deltas.append(delta)
            step = len(deltas)
            key = (q, v, j)
            if key in seen_exact:
                return Diverge(max(deltas[seen_exact[key]:]))
            seen_exact[key] = step
            if j <= high_floor:
                last_low = step
            else:
                vtag = ("low", v) if v <= max(i, m) + cushion else ("rel", j - v)
                skey = (q, vtag, j % ell)
                for idx, old_j in shifted.get(skey, ()):
                    if idx >= last_low and old_j < j:
                        return Diverge(max(deltas[idx:]))
                shifted.setdefault(skey, []).append((step, j))


def compute_status_params(automaton) -> StatusParams:
    return ColumnEngine(automaton).params


def column_exit(automaton, state, mem, value) -> ExitOutcome:
    """One-off column walk; build a ColumnEngine for repeated queries."""
    return ColumnEngine(automaton).column_exit(state, mem, value)


_ANCHOR_RANK = {"0": 0, "I": 1, "M": 2}


def _candidates(i, m, j, bound):
    cands = set()
    if j <= bound:
        cands.add(("0", j))
    if abs(j - i) <= bound:
        cands.add(("I", j - i))
    if abs(j - m) <= bound:
        cands.add(("M", j - m))
    return cands


class RTable:
    """Exit combinations per state and consistent status signature."""

    def __init__(self, entries, params):
        self.entries = entries
        self.params = params

    def lookup(self, state, i, m) -> ExitCombination:
        return self.entries[(state, signature_of(i, m, self.params))]

    def by_state(self, state):
        return {sig: combo for (p, sig), combo in self.entries.items() if p == state}

    def serialize(self) -> str:
        lines = []
        for (p, sig), combo in sorted(self.entries.items(),
                                      key=lambda kv: (kv[0][0], kv[0][1].status_i,
                                                      kv[0][1].status_m,
                                                      kv[0][1].status_diff,
                                                      kv[0][1].i_less_m)):
            head = (f"{p} {sig.status_i} {sig.status_m} {sig.status_diff} "
                    f"{sig.i_less_m} ->")
            if combo.diverge:
                lines.append(f"{head} DIV {combo.max_inf}")
            else:
                lines.append(f"{head} {combo.state} {combo.anchor} {combo.offset} "
                             f"{combo.col_max}")
        return "\n".join(lines) + "\n"


def _build_r(engine, params):
    reach = 2 * (params.prefix_len + params.period) + params.bound + 2
    groups = {}
    for p in engine.aut.states:
        for i in range(reach + 1):
            for m in range(reach + 1):
                sig = signature_of(i, m, params)
                outcome = engine.column_exit(p, i, m)
                groups.setdefault((p, sig), []).append((i, m, outcome))
    shared = {}  # (p, sig) -> candidate anchor set, for the second pass
    heads = {}
    for (p, sig), members in groups.items():
        first = members[0][2]
        if isinstance(first, Diverge):
            for i, m, outcome in members:
                if outcome != first:
                    raise SignatureConflict(p, sig, members)
            heads[(p, sig)] = first
            continue
        cands = None
        for i, m, outcome in members:
            if (not isinstance(outcome, Exit) or outcome.state != first.state
                    or outcome.col_max != first.col_max):
                raise SignatureConflict(p, sig, members)
            here = _candidates(i, m, outcome.mem, params.bound)
            cands = here if cands is None else (cands & here)
            if not cands:
                raise SignatureConflict(p, sig, members)
        shared[(p, sig)] = cands
        heads[(p, sig)] = first
    # prefer, per state, the anchoring shared by the most signature classes,
    # so degenerate classes read the same way as the general-position ones
    freq = {}
    for (p, sig), cands in shared.items():
        for cand in cands:
            freq[(p, cand)] = freq.get((p, cand), 0) + 1
    entries = {}
    for (p, sig), head in heads.items():
        if isinstance(head, Diverge):
            entries[(p, sig)] = ExitCombination(None, None, None, None,
                                                head.max_inf)
            continue
        anchor, offset = min(shared[(p, sig)],
                             key=lambda c: (-freq[(p, c)], _ANCHOR_RANK[c[0]],
                                            abs(c[1]), c[1] < 0))
        entries[(p, sig)] = ExitCombination(head.state, anchor, offset,
                                            head.col_max)
    return RTable(entries, params)


def _residues_uniform(line, p):
    """Whether every residue class of an axis line fits one anchoring."""
    classes = {}
    for varying, i, m, outcome in line:
        if isinstance(outcome, Diverge):
            fits = {("div", outcome.max_inf)}
        else:
            fits = {("exit", outcome.state, outcome.col_max, "0", outcome.mem),
                    ("exit", outcome.state, outcome.col_max, "I", outcome.mem - i),
                    ("exit", outcome.state, outcome.col_max, "M", outcome.mem - m)}
        key = varying % p
        if key in classes:
            classes[key] &= fits
            if not classes[key]:
                return False
        else:
            classes[key] = fits
    return True


def _conflict_period(witnesses, cap):
    """Smallest period refinement that could make a conflicting class uniform.

    A placement walk can ratchet its token upward by a fixed step on every
    bounce, so the exit depends on the entry heights modulo that step even
    though the crossing behaviors repeat faster.  The witnesses expose the
    step: along each axis line of the class, find the least period whose
    residue classes are uniform, and combine the lines with an lcm.  Periods
    are only trusted when every residue keeps at least two sample points;
    lines that no such period explains are left to the prefix widening.
    """
    need = 1
    for axis in (0, 1):
        lines = {}
        for i, m, outcome in witnesses:
            fixed, varying = (m, i) if axis == 0 else (i, m)
            lines.setdefault(fixed, []).append((varying, i, m, outcome))
        for line in lines.values():
            if len(line) < 4:
                continue
            line.sort()
            for p in range(1, min(cap, len(line) // 2) + 1):
                if _residues_uniform(line, p):
                    need = need * p // math.gcd(need, p)
                    break
    return need


def compute_R(automaton_or_engine, params=None, retries=3) -> RTable:
    """Widen the signature window until every signature class is uniform.

    Conflicts have two causes.  A derived block length (a status minus a
    small walk offset) can fall on different sides of the exact/periodic
    boundary; widening the exact prefix beyond the largest such offset --
    and with it the distance bound -- separates those pairs.  A placement
    walk can also ratchet its token by a fixed step per bounce, making the
    exit sensitive to the heights modulo that step; the period is then
    scaled to a common multiple of the step read off the conflict.
    """
    engine = (automaton_or_engine if isinstance(automaton_or_engine, ColumnEngine)
              else ColumnEngine(automaton_or_engine))
    params = params or engine.params
    slack = 2 * len(engine.aut.states) + 2
    for _ in range(retries + 1):
        try:
            return _build_r(engine, params)
        except SignatureConflict as err:
            step = _conflict_period(err.witnesses, slack) if err.witnesses else 0
            period = params.period
            if step > 1:
                period = period * step // math.gcd(period, step)
            prefix = params.prefix_len + params.bound + slack
            params = StatusParams(prefix, period, prefix + period)
    raise SignatureConflict("<table>", None,
                            f"no uniform window after {retries} widenings")


def validate_lemma2(automaton_or_engine, params=None, up_to=None):
    """Check the exit-distance bound and signature uniformity exhaustively."""
    engine = (automaton_or_engine if isinstance(automaton_or_engine, ColumnEngine)
              else ColumnEngine(automaton_or_engine))
    params = params or engine.params
    if up_to is None:
        up_to = 2 * (params.prefix_len + params.period) + params.bound + 2
    violations = []
    groups = {}
    for p in engine.aut.states:
        for i in range(up_to + 1):
            for m in range(up_to + 1):
                outcome = engine.column_exit(p, i, m)
                if isinstance(outcome, Exit):
                    dist = min(outcome.mem, abs(outcome.mem - i),
                               abs(outcome.mem - m))
                    if dist > params.bound:
                        violations.append(
                            f"{p} i={i} m={m}: exit mem {outcome.mem} is {dist} "
                            f"away from all anchors (bound {params.bound})")
                sig = signature_of(i, m, params)
                groups.setdefault((p, sig), []).append((i, m, outcome))
    for (p, sig), members in groups.items():
        i0, m0, first = members[0]
        shared = None
        for i, m, outcome in members:
            if type(outcome) is not type(first):
                violations.append(f"{p} {sig}: {i0},{m0} and {i},{m} disagree")
                break
            if isinstance(outcome, Diverge):
                if outcome != first:
                    violations.append(f"{p} {sig}: divergence priorities differ")
                    break
                continue
            if outcome.state != first.state or outcome.col_max != first.col_max:
                violations.append(f"{p} {sig}: exit state/priority differ "
                                  f"between {(i0, m0)} and {(i, m)}")
                break
            here = _candidates(i, m, outcome.mem, params.bound)
            shared = here if shared is None else shared & here
            if not shared:
                violations.append(f"{p} {sig}: no common anchored offset")
                break
    return violations
