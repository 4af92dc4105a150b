"""Parity automata with a single natural-number memory over infinite words
of naturals: membership, emptiness, game solving and strategy synthesis."""

from .core import (
    Action,
    ColumnTrace,
    DivergenceError,
    GridLetter,
    MicroConfiguration,
    NMemoryAutomaton,
    ParseError,
    Transition,
    WordSpec,
    accepts_omega,
    bump_priorities,
    normalize_bottom_exit,
    parse_automaton,
    serialize_automaton,
    simulate_word,
    split_alternation,
    validate,
)
from .column import (
    BudgetError,
    ColumnEngine,
    Diverge,
    Exit,
    ExitCombination,
    RTable,
    SignatureConflict,
    StatusParams,
    StatusSignature,
    column_exit,
    compute_R,
    compute_status_params,
    signature_of,
    status_of,
    validate_lemma2,
)
from .fixtures import FIXTURES, build_fixture, load_fixture
from .game import (
    ConstInput,
    LargeInput,
    MacroGame,
    OffsetInput,
    PushdownEncoder,
    PushdownGame,
    Rule,
    StrategyTable,
    build_macro_game,
    build_one_player_game,
    encode_pushdown,
    encode_residual,
)
from .solver import (
    Certificate,
    FiniteParityGame,
    PushdownAnalysis,
    RunWitness,
    SolveResult,
    accepting_run,
    attractor,
    certify_strategy,
    is_empty,
    saturate_reachability,
    solve,
    truncate,
    two_sided_solve,
    zielonka,
)
from .synth import (
    ColumnInfo,
    MachineAction,
    NMemoryTransducer,
    NonTermination,
    PlayTranscript,
    StrategyChecker,
    SynthesisUnsupported,
    build_strategy_checker,
    parse_transducer,
    periodic_play,
    role_shift,
    run_transducer,
    serialize_transducer,
    step_column,
    synthesize_transducer,
    validate_transducer,
    verify_play,
)

__all__ = [
    "Action", "BudgetError", "Certificate", "ColumnEngine", "ColumnInfo",
    "ColumnTrace", "ConstInput", "Diverge", "DivergenceError", "Exit",
    "ExitCombination", "FIXTURES", "FiniteParityGame", "GridLetter",
    "LargeInput", "MachineAction", "MacroGame", "MicroConfiguration",
    "NMemoryAutomaton", "NMemoryTransducer", "NonTermination", "OffsetInput",
    "ParseError", "PlayTranscript", "PushdownAnalysis", "PushdownEncoder",
    "PushdownGame", "RTable", "Rule", "RunWitness", "SignatureConflict",
    "SolveResult", "StatusParams", "StatusSignature", "StrategyChecker",
    "StrategyTable", "SynthesisUnsupported", "Transition", "WordSpec",
    "accepting_run", "accepts_omega", "attractor", "build_fixture",
    "build_macro_game", "build_one_player_game", "build_strategy_checker",
    "bump_priorities", "certify_strategy", "column_exit", "compute_R",
    "compute_status_params", "encode_pushdown", "encode_residual", "is_empty",
    "load_fixture", "normalize_bottom_exit", "parse_automaton",
    "parse_transducer", "periodic_play", "role_shift", "run_transducer",
    "saturate_reachability", "serialize_automaton", "serialize_transducer",
    "signature_of", "simulate_word", "solve", "split_alternation",
    "status_of", "step_column", "synthesize_transducer", "truncate",
    "two_sided_solve",
    "validate", "validate_lemma2", "validate_transducer", "verify_play",
    "zielonka",
]
