"""Builders for the bundled example automata.

Each builder returns a small deterministic automaton for one concrete
language or game condition; the same automata are shipped pre-serialized
under ``nmemory/fixtures/`` for the command line.  Rows that can never be
reached from the initial configuration are filled with a harmless self-loop
so every automaton is total.
"""

from importlib import resources

from .core import Action, GridLetter, LETTERS, NMemoryAutomaton, Transition, \
    parse_automaton

H, O, B = GridLetter.HASH, GridLetter.ONE, GridLetter.BOT
U, D, R, P = Action.UP, Action.DOWN, Action.RIGHT, Action.PLACE_UPDATE


def _r(rows, state, letter, b1, b2, target, action):
    """Set rows for one state/letter; a flag of None covers both values."""
    for x1 in ((0, 1) if b1 is None else (b1,)):
        for x2 in ((0, 1) if b2 is None else (b2,)):
            rows[(state, letter, x1, x2)] = (target, action)


def _finish(rows, states, initial, priority):
    transitions = []
    for q in states:
        for letter in LETTERS:
            for b1 in (0, 1):
                for b2 in (0, 1):
                    target, action = rows.get((q, letter, b1, b2), (q, U))
                    transitions.append(Transition(q, letter, b1, b2, target, action))
    return NMemoryAutomaton(states, initial, transitions, priority)


def make_accept_all():
    """Switch columns immediately; every word is accepted."""
    rows = {}
    _r(rows, "s", H, None, 1, "s", R)
    _r(rows, "s", H, None, 0, "s", P)
    _r(rows, "s", O, None, None, "s", D)
    _r(rows, "s", B, None, None, "s", D)
    return _finish(rows, ["s"], "s", {"s": 2})


def make_reject_all():
    """Like make_accept_all but with an odd priority; nothing is accepted."""
    aut = make_accept_all()
    return NMemoryAutomaton(aut.states, aut.initial, aut.transitions, {"s": 1})


def make_record_input():
    """Copy every column value into the memory token; accepts everything."""
    rows = {}
    _r(rows, "s0", H, None, None, "c", U)
    _r(rows, "c", O, None, None, "c", U)
    _r(rows, "c", B, None, None, "p", D)
    _r(rows, "p", O, None, None, "pp", P)
    _r(rows, "p", H, None, None, "pp", P)
    _r(rows, "pp", O, None, 1, "d", D)
    _r(rows, "pp", H, None, None, "s0", R)
    _r(rows, "d", O, None, None, "d", D)
    _r(rows, "d", H, None, None, "s0", R)
    states = ["s0", "c", "p", "pp", "d"]
    return _finish(rows, states, "s0", {q: 2 for q in states})


def make_climb_forever():
    """Climb up forever in the first column; no word is accepted."""
    return _finish({}, ["s"], "s", {"s": 1})


def make_successors():
    """The singleton language 1 2 3 4 ...: each value must be memory + 1."""
    rows = {}
    _r(rows, "ck", H, 1, None, "top1", U)
    _r(rows, "ck", H, 0, None, "climb", U)
    _r(rows, "climb", O, 0, None, "climb", U)
    _r(rows, "climb", O, 1, None, "top1", U)
    _r(rows, "climb", B, None, None, "rej", D)
    _r(rows, "top1", O, None, None, "top2", U)
    _r(rows, "top1", B, None, None, "rej", D)
    _r(rows, "top2", B, None, None, "dn1", D)
    _r(rows, "top2", O, None, None, "rej", D)
    _r(rows, "dn1", O, None, None, "pl", P)
    _r(rows, "pl", O, None, None, "down", D)
    _r(rows, "down", O, None, None, "down", D)
    _r(rows, "down", H, None, None, "ck", R)
    _r(rows, "rej", O, None, None, "rej", D)
    _r(rows, "rej", B, None, None, "rej", D)
    _r(rows, "rej", H, None, None, "rej", R)
    states = ["ck", "climb", "top1", "top2", "dn1", "pl", "down", "rej"]
    priority = {q: 0 for q in states}
    priority["pl"] = 2
    priority["rej"] = 1
    return _finish(rows, states, "ck", priority)


def make_unbounded():
    """Accepts exactly the unbounded words; memory tracks the running maximum."""
    rows = {}
    _r(rows, "ub", H, 1, None, "u0a", U)
    _r(rows, "ub", H, 0, None, "uc", U)
    _r(rows, "u0a", B, None, None, "lwd", D)
    _r(rows, "u0a", O, None, None, "u0b", U)
    _r(rows, "u0b", O, None, None, "u0b", U)
    _r(rows, "u0b", B, None, None, "plc", D)
    _r(rows, "lwd", H, None, None, "ub", R)
    _r(rows, "plc", O, None, None, "rec", P)
    _r(rows, "rec", O, None, None, "dnu", D)
    _r(rows, "dnu", O, None, None, "dnu", D)
    _r(rows, "dnu", B, None, None, "dnu", D)
    _r(rows, "dnu", H, None, None, "ub", R)
    _r(rows, "uc", O, 0, None, "uc", U)
    _r(rows, "uc", O, 1, None, "ud", U)
    _r(rows, "uc", B, 0, None, "kb", U)
    _r(rows, "uc", B, 1, None, "krecb", P)
    _r(rows, "ud", O, None, None, "ue", U)
    _r(rows, "ud", B, None, None, "kp1", D)
    _r(rows, "ue", O, None, None, "ue", U)
    _r(rows, "ue", B, None, None, "plc", D)
    _r(rows, "kp1", O, 1, None, "krec", P)
    _r(rows, "krec", O, None, None, "dnu", D)
    _r(rows, "kb", B, 0, None, "kb", U)
    _r(rows, "kb", B, 1, None, "krecb", P)
    _r(rows, "krecb", B, None, None, "dnu", D)
    states = ["ub", "u0a", "u0b", "uc", "ud", "ue", "plc", "rec", "krec",
              "krecb", "kb", "kp1", "dnu", "lwd"]
    priority = {q: 1 for q in states}
    priority["rec"] = 2
    return _finish(rows, states, "ub", priority)


def make_step_walk():
    """Accepts words whose consecutive values differ by exactly one."""
    rows = {}
    _r(rows, "st0", H, None, None, "cl0", U)
    _r(rows, "cl0", O, None, None, "cl0", U)
    _r(rows, "cl0", B, None, None, "plm", D)
    _r(rows, "ck", H, 1, None, "one1", U)
    _r(rows, "ck", H, 0, None, "cl", U)
    _r(rows, "one1", O, None, None, "top2", U)
    _r(rows, "one1", B, None, None, "fl", D)
    _r(rows, "top2", B, None, None, "plm", D)
    _r(rows, "top2", O, None, None, "fl", D)
    _r(rows, "cl", O, 0, None, "cl", U)
    _r(rows, "cl", O, 1, None, "hi1", U)
    _r(rows, "cl", B, 1, None, "plm", D)
    _r(rows, "cl", B, 0, None, "fl", D)
    _r(rows, "hi1", O, None, None, "hi2", U)
    _r(rows, "hi1", B, None, None, "fl", D)
    _r(rows, "hi2", B, None, None, "plm", D)
    _r(rows, "hi2", O, None, None, "fl", D)
    _r(rows, "plm", O, None, None, "pl", P)
    _r(rows, "plm", H, None, None, "pl", P)
    _r(rows, "pl", O, None, None, "dn", D)
    _r(rows, "pl", H, None, None, "ck", R)
    _r(rows, "dn", O, None, None, "dn", D)
    _r(rows, "dn", H, None, None, "ck", R)
    _r(rows, "fl", O, None, None, "fl", D)
    _r(rows, "fl", B, None, None, "fl", D)
    _r(rows, "fl", H, None, None, "rej", R)
    _r(rows, "rej", H, None, None, "rej", R)
    states = ["st0", "cl0", "ck", "cl", "one1", "top2", "hi1", "hi2", "plm",
              "pl", "dn", "fl", "rej"]
    priority = {q: 2 for q in states}
    priority["rej"] = 1
    return _finish(rows, states, "st0", priority)


def make_parity_alternate():
    """Accepts words whose values strictly alternate between odd and even."""
    rows = {}
    states = []
    for exp in ("n", "0", "1"):
        for par in (0, 1):
            states.append(f"u{exp}{par}")
    states += ["d0", "d1", "df", "rej"]
    for exp in ("n", "0", "1"):
        for par in (0, 1):
            q = f"u{exp}{par}"
            _r(rows, q, H, None, None, q, U)
            _r(rows, q, O, None, None, f"u{exp}{1 - par}", U)
            ok = exp == "n" or int(exp) == par
            _r(rows, q, B, None, None, f"d{par}" if ok else "df", D)
    for par in (0, 1):
        _r(rows, f"d{par}", O, None, None, f"d{par}", D)
        _r(rows, f"d{par}", H, None, None, f"u{1 - par}0", R)
    _r(rows, "df", O, None, None, "df", D)
    _r(rows, "df", H, None, None, "rej", R)
    _r(rows, "rej", H, None, None, "rej", R)
    priority = {q: 2 for q in states}
    priority["rej"] = 1
    return _finish(rows, states, "un0", priority)


def make_parity_directed_walk():
    """Even-position values walk by one; odd values set the step direction.

    An even value at an odd position forces the next even-position value one
    up, an odd value forces it one down.
    """
    rows = {}
    # even columns: record the value, first freely, later after a check
    _r(rows, "st0", H, None, None, "cl0", U)
    _r(rows, "cl0", O, None, None, "cl0", U)
    _r(rows, "cl0", B, None, None, "plm", D)
    _r(rows, "plm", O, None, None, "pl", P)
    _r(rows, "plm", H, None, None, "pl", P)
    _r(rows, "pl", O, None, None, "dn", D)
    _r(rows, "pl", H, None, None, "ot", R)
    _r(rows, "dn", O, None, None, "dn", D)
    _r(rows, "dn", H, None, None, "ot", R)
    # odd columns: note the parity of the value, carry the memory over
    _r(rows, "ot", H, 1, None, "otp", P)
    _r(rows, "otp", H, None, None, "od0", U)
    _r(rows, "ot", H, 0, None, "oc0", U)
    for p in (0, 1):
        _r(rows, f"oc{p}", O, 0, None, f"oc{1 - p}", U)
        _r(rows, f"oc{p}", O, 1, None, f"od{p}", P)
        _r(rows, f"od{p}", O, None, None, f"od{1 - p}", U)
        _r(rows, f"od{p}", B, None, None, f"odn{p}", D)
        _r(rows, f"oc{p}", B, 0, None, f"ab{p}", U)
        _r(rows, f"oc{p}", B, 1, None, f"abd{p}", P)
        _r(rows, f"ab{p}", B, 0, None, f"ab{p}", U)
        _r(rows, f"ab{p}", B, 1, None, f"abd{p}", P)
        _r(rows, f"abd{p}", B, None, None, f"odn{p}", D)
        _r(rows, f"odn{p}", O, None, None, f"odn{p}", D)
        _r(rows, f"odn{p}", B, None, None, f"odn{p}", D)
        _r(rows, f"odn{p}", H, None, None, "ckP" if p == 0 else "ckM", R)
    # even columns after an even odd-value: the value must be memory + 1
    _r(rows, "ckP", H, 1, None, "one1", U)
    _r(rows, "ckP", H, 0, None, "clP", U)
    _r(rows, "one1", O, None, None, "top2", U)
    _r(rows, "one1", B, None, None, "fl", D)
    _r(rows, "top2", B, None, None, "plm", D)
    _r(rows, "top2", O, None, None, "fl", D)
    _r(rows, "clP", O, 0, None, "clP", U)
    _r(rows, "clP", O, 1, None, "hi1", U)
    _r(rows, "clP", B, None, None, "fl", D)
    _r(rows, "hi1", O, None, None, "hi2", U)
    _r(rows, "hi1", B, None, None, "fl", D)
    _r(rows, "hi2", B, None, None, "plm", D)
    _r(rows, "hi2", O, None, None, "fl", D)
    # even columns after an odd odd-value: the value must be memory - 1
    _r(rows, "ckM", H, 1, None, "rej", R)
    _r(rows, "ckM", H, 0, None, "clM", U)
    _r(rows, "clM", O, 0, None, "clM", U)
    _r(rows, "clM", O, 1, None, "fl", D)
    _r(rows, "clM", B, 1, None, "plm", D)
    _r(rows, "clM", B, 0, None, "fl", D)
    _r(rows, "fl", O, None, None, "fl", D)
    _r(rows, "fl", B, None, None, "fl", D)
    _r(rows, "fl", H, None, None, "rej", R)
    _r(rows, "rej", H, None, None, "rej", R)
    states = ["st0", "cl0", "plm", "pl", "dn", "ot", "otp"]
    for p in (0, 1):
        states += [f"oc{p}", f"od{p}", f"ab{p}", f"abd{p}", f"odn{p}"]
    states += ["ckP", "one1", "top2", "clP", "hi1", "hi2", "ckM", "clM",
               "fl", "rej"]
    priority = {q: 2 for q in states}
    priority["rej"] = 1
    return _finish(rows, states, "st0", priority)


def make_game_copy():
    """Game condition: the reply must copy the value just played."""
    rows = {}
    _r(rows, "ic", H, None, None, "icl", U)
    _r(rows, "icl", O, None, None, "icl", U)
    _r(rows, "icl", B, None, None, "iplm", D)
    _r(rows, "iplm", O, None, None, "ipl", P)
    _r(rows, "iplm", H, None, None, "ipl", P)
    _r(rows, "ipl", O, None, None, "idn", D)
    _r(rows, "ipl", H, None, None, "oc", R)
    _r(rows, "idn", O, None, None, "idn", D)
    _r(rows, "idn", H, None, None, "oc", R)
    _r(rows, "oc", H, 1, None, "oz", U)
    _r(rows, "oc", H, 0, None, "ocl", U)
    _r(rows, "oz", B, None, None, "dno", D)
    _r(rows, "oz", O, None, None, "fl", D)
    _r(rows, "ocl", O, 0, None, "ocl", U)
    _r(rows, "ocl", O, 1, None, "oce", U)
    _r(rows, "ocl", B, None, None, "fl", D)
    _r(rows, "oce", B, None, None, "dno", D)
    _r(rows, "oce", O, None, None, "fl", D)
    _r(rows, "dno", O, None, None, "dno", D)
    _r(rows, "dno", B, None, None, "dno", D)
    _r(rows, "dno", H, None, None, "ic", R)
    _r(rows, "fl", O, None, None, "fl", D)
    _r(rows, "fl", B, None, None, "fl", D)
    _r(rows, "fl", H, None, None, "rej", R)
    _r(rows, "rej", H, None, None, "rej", R)
    states = ["ic", "icl", "iplm", "ipl", "idn", "oc", "oz", "ocl", "oce",
              "dno", "fl", "rej"]
    priority = {q: 2 for q in states}
    priority["rej"] = 1
    return _finish(rows, states, "ic", priority)


def make_game_successor():
    """Game condition: the reply must be the value just played plus one."""
    rows = {}
    _r(rows, "ic", H, None, None, "icl", U)
    _r(rows, "icl", O, None, None, "icl", U)
    _r(rows, "icl", B, None, None, "iplm", D)
    _r(rows, "iplm", O, None, None, "ipl", P)
    _r(rows, "iplm", H, None, None, "ipl", P)
    _r(rows, "ipl", O, None, None, "idn", D)
    _r(rows, "ipl", H, None, None, "oc", R)
    _r(rows, "idn", O, None, None, "idn", D)
    _r(rows, "idn", H, None, None, "oc", R)
    _r(rows, "oc", H, 1, None, "oz1", U)
    _r(rows, "oc", H, 0, None, "ocl", U)
    _r(rows, "oz1", O, None, None, "oz2", U)
    _r(rows, "oz1", B, None, None, "fl", D)
    _r(rows, "oz2", B, None, None, "dno", D)
    _r(rows, "oz2", O, None, None, "fl", D)
    _r(rows, "ocl", O, 0, None, "ocl", U)
    _r(rows, "ocl", O, 1, None, "oce1", U)
    _r(rows, "ocl", B, None, None, "fl", D)
    _r(rows, "oce1", O, None, None, "oce2", U)
    _r(rows, "oce1", B, None, None, "fl", D)
    _r(rows, "oce2", B, None, None, "dno", D)
    _r(rows, "oce2", O, None, None, "fl", D)
    _r(rows, "dno", O, None, None, "dno", D)
    _r(rows, "dno", B, None, None, "dno", D)
    _r(rows, "dno", H, None, None, "ic", R)
    _r(rows, "fl", O, None, None, "fl", D)
    _r(rows, "fl", B, None, None, "fl", D)
    _r(rows, "fl", H, None, None, "rej", R)
    _r(rows, "rej", H, None, None, "rej", R)
    states = ["ic", "icl", "iplm", "ipl", "idn", "oc", "oz1", "oz2", "ocl",
              "oce1", "oce2", "dno", "fl", "rej"]
    priority = {q: 2 for q in states}
    priority["rej"] = 1
    return _finish(rows, states, "ic", priority)


def make_game_predict():
    """Game condition: each reply must predict the opponent's next value."""
    rows = {}
    _r(rows, "ic0", H, None, None, "orec", R)
    _r(rows, "orec", H, None, None, "orcl", U)
    _r(rows, "orcl", O, None, None, "orcl", U)
    _r(rows, "orcl", B, None, None, "orplm", D)
    _r(rows, "orplm", O, None, None, "orpl", P)
    _r(rows, "orplm", H, None, None, "orpl", P)
    _r(rows, "orpl", O, None, None, "ordn", D)
    _r(rows, "orpl", H, None, None, "icn", R)
    _r(rows, "ordn", O, None, None, "ordn", D)
    _r(rows, "ordn", H, None, None, "icn", R)
    _r(rows, "icn", H, 1, None, "izn", U)
    _r(rows, "icn", H, 0, None, "icl2", U)
    _r(rows, "izn", B, None, None, "dni", D)
    _r(rows, "izn", O, None, None, "fl", D)
    _r(rows, "icl2", O, 0, None, "icl2", U)
    _r(rows, "icl2", O, 1, None, "ice", U)
    _r(rows, "icl2", B, None, None, "fl", D)
    _r(rows, "ice", B, None, None, "dni", D)
    _r(rows, "ice", O, None, None, "fl", D)
    _r(rows, "dni", O, None, None, "dni", D)
    _r(rows, "dni", B, None, None, "dni", D)
    _r(rows, "dni", H, None, None, "orec", R)
    _r(rows, "fl", O, None, None, "fl", D)
    _r(rows, "fl", B, None, None, "fl", D)
    _r(rows, "fl", H, None, None, "rej", R)
    _r(rows, "rej", H, None, None, "rej", R)
    states = ["ic0", "orec", "orcl", "orplm", "orpl", "ordn", "icn", "izn",
              "icl2", "ice", "dni", "fl", "rej"]
    priority = {q: 2 for q in states}
    priority["rej"] = 1
    return _finish(rows, states, "ic0", priority)


def make_game_unbounded():
    """Game condition: the interleaved play must be unbounded."""
    return make_unbounded()


FIXTURES = {
    "accept_all": make_accept_all,
    "reject_all": make_reject_all,
    "record_input": make_record_input,
    "climb_forever": make_climb_forever,
    "successors": make_successors,
    "unbounded": make_unbounded,
    "step_walk": make_step_walk,
    "parity_alternate": make_parity_alternate,
    "parity_directed_walk": make_parity_directed_walk,
    "game_copy": make_game_copy,
    "game_successor": make_game_successor,
    "game_predict": make_game_predict,
    "game_unbounded": make_game_unbounded,
}


def build_fixture(name) -> NMemoryAutomaton:
    return FIXTURES[name]()


def load_fixture(name) -> NMemoryAutomaton:
    """Parse the serialized copy shipped with the package."""
    text = resources.files("nmemory").joinpath("fixtures", f"{name}.aut").read_text()
    return parse_automaton(text)
