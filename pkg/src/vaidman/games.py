"""Vaidman-type parity games: definitions, exact quantum and classical values.

A game is a list of rounds.  In each round every player receives one question
(a basis letter X, Y or Z) and answers +1 or -1; the team wins the round when
the product of the answers equals the round's required product.  The quantum
strategy is always "measure your qubit in the basis you were asked and
answer with the outcome".

Classical values are maxima over deterministic local strategies.  Shared
randomness cannot beat the best deterministic strategy because the winning
probability is linear in the mixture weights.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .qstate import (
    MeasurementBasis,
    PureState,
    State,
    ZeroProbabilityOutcome,
    as_density,
    ghz,
    make_ghz_general,
    outcome_distribution,
    partial_trace,
    project_qubit,
    w_state,
)

QUESTION_LETTERS = ("X", "Y", "Z")


@dataclass(frozen=True)
class Round:
    questions: str
    required: int
    weight: Fraction


@dataclass(frozen=True)
class GameSpec:
    n_players: int
    rounds: tuple[Round, ...]

    def __post_init__(self):
        if self.n_players < 2:
            raise ValueError("a game needs at least two players")
        seen = set()
        for r in self.rounds:
            if len(r.questions) != self.n_players or set(r.questions) - set(QUESTION_LETTERS):
                raise ValueError(f"bad question tuple {r.questions!r}")
            if r.required not in (1, -1):
                raise ValueError("required product must be +1 or -1")
            if r.questions in seen:
                raise ValueError(f"duplicate question tuple {r.questions!r}")
            seen.add(r.questions)
        total = sum(r.weight for r in self.rounds)
        if abs(float(total) - 1.0) > 1e-12:
            raise ValueError(f"round weights sum to {float(total)!r}, expected 1")

    @classmethod
    def uniform(cls, rows: Sequence[tuple[str, int]]) -> "GameSpec":
        w = Fraction(1, len(rows))
        return cls(len(rows[0][0]), tuple(Round(q, p, w) for q, p in rows))

    def permuted(self, order: Sequence[int]) -> "GameSpec":
        """Same game with player ``i`` taking the role previously held by ``order[i]``."""
        rounds = tuple(Round("".join(r.questions[k] for k in order), r.required, r.weight) for r in self.rounds)
        return GameSpec(self.n_players, rounds)

    def questions_for(self, player: int) -> list[str]:
        return sorted({r.questions[player] for r in self.rounds})


def format_game_spec(game: GameSpec) -> str:
    """One line per round: ``<letters> <required product> <weight>``."""
    return "".join(f"{r.questions} {r.required:+d} {r.weight}\n" for r in game.rounds)


def parse_game_spec(text: str) -> GameSpec:
    rounds = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        letters, prod, weight = line.split()
        rounds.append(Round(letters, int(prod), Fraction(weight)))
    if not rounds:
        raise ValueError("empty game specification")
    return GameSpec(len(rounds[0].questions), tuple(rounds))


# --- game catalogue -------------------------------------------------------------


def vaidman_ghz_game() -> GameSpec:
    return GameSpec.uniform([("XXX", 1), ("XYY", -1), ("YXY", -1), ("YYX", -1)])


def vaidman_w_game() -> GameSpec:
    return GameSpec.uniform([("ZZZ", -1), ("ZYY", 1), ("YZY", 1), ("YYZ", 1)])


def _with_y_count(n: int, k: int) -> list[str]:
    """All X/Y strings of length ``n`` with exactly ``k`` Y's, in the listed order (Y first)."""
    out = []
    for pos in itertools.combinations(range(n), k):
        out.append("".join("Y" if i in pos else "X" for i in range(n)))
    return out


# number of players, then (Y count, required product) blocks
_MULTIPLAYER = {
    "G4_1": (4, [(0, -1), (2, 1)]),
    "G5_1": (5, [(0, -1), (2, 1)]),
    "G5_2": (5, [(2, 1), (4, -1)]),
    "G6_1": (6, [(0, -1), (2, 1)]),
    "G6_2": (6, [(2, 1), (4, -1)]),
    "G6_3": (6, [(4, -1), (6, 1)]),
}
MULTIPLAYER_IDS = tuple(_MULTIPLAYER)
GAME_IDS = ("ghz3", "w3") + MULTIPLAYER_IDS

# classical bounds as reported alongside each game; the G4_1 entry (0.8517)
# disagrees with exhaustive search, which gives 6/7
REFERENCE_CLASSICAL = {
    "ghz3": 0.75,
    "w3": 0.75,
    "G4_1": 0.8517,
    "G5_1": 0.909,
    "G5_2": 0.6667,
    "G6_1": 0.9375,
    "G6_2": 0.5,
    "G6_3": 0.9375,
}
# lower end of the reported n-tangle range where quantum beats classical
REFERENCE_TAU_THRESHOLD = {
    "ghz3": 0.25,
    "G4_1": 0.51,
    "G5_1": 0.67,
    "G5_2": 0.11,
    "G6_1": 0.765,
    "G6_2": 0.0,
    "G6_3": 0.765,
}


def multiplayer_game(game_id: str) -> GameSpec:
    try:
        n, blocks = _MULTIPLAYER[game_id]
    except KeyError:
        raise ValueError(f"unknown game id {game_id!r}; choose from {', '.join(MULTIPLAYER_IDS)}") from None
    rows = [(q, prod) for k, prod in blocks for q in _with_y_count(n, k)]
    return GameSpec.uniform(rows)


def game_by_id(game_id: str) -> GameSpec:
    if game_id == "ghz3":
        return vaidman_ghz_game()
    if game_id == "w3":
        return vaidman_w_game()
    return multiplayer_game(game_id)


# --- quantum value ----------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _parities(n: int) -> np.ndarray:
    """Product of +-1 answers for every outcome index (bit 1 means answer -1)."""
    idx = np.arange(2**n)
    ones = np.array([bin(i).count("1") for i in idx])
    return np.where(ones % 2 == 0, 1, -1)


def quantum_win_probability(state: State, game: GameSpec) -> float:
    rho = as_density(state)
    if rho.n_qubits != game.n_players:
        raise ValueError(f"state has {rho.n_qubits} qubits but the game has {game.n_players} players")
    parity = _parities(game.n_players)
    total = 0.0
    for r in game.rounds:
        probs = outcome_distribution(rho, list(r.questions))
        total += float(r.weight) * float(probs[parity == r.required].sum())
    return min(max(total, 0.0), 1.0)


def ghz_phase_for(game: GameSpec) -> int:
    """Relative sign of ``|1..1>`` for which the maximal GHZ state always wins ``game``.

    Returns +1 or -1; raises if neither sign gives a certain win.
    """
    for sign in (1, -1):
        st = make_ghz_general(np.pi / 4, game.n_players, sign)
        if abs(quantum_win_probability(st, game) - 1.0) < 1e-9:
            return sign
    raise ValueError("no GHZ phase wins this game with certainty")


# --- classical value ----------------------------------------------------------------


@dataclass(frozen=True)
class ClassicalStrategy:
    """Deterministic answers: ``answers[player]`` is a tuple of ``(question, answer)``."""

    answers: tuple[tuple[tuple[str, int], ...], ...]

    def answer(self, player: int, question: str) -> int:
        return dict(self.answers[player])[question]

    def table(self) -> str:
        lines = []
        for i, ans in enumerate(self.answers):
            cells = "  ".join(f"{q}->{a:+d}" for q, a in ans)
            lines.append(f"player {i}: {cells}")
        return "\n".join(lines)


def classical_value(game: GameSpec, strategy: ClassicalStrategy) -> Fraction:
    won = Fraction(0)
    for r in game.rounds:
        prod = math.prod(strategy.answer(i, q) for i, q in enumerate(r.questions))
        if prod == r.required:
            won += r.weight
    return won


def classical_max_win(game: GameSpec) -> tuple[Fraction, ClassicalStrategy]:
    """Exhaustive maximum over deterministic local strategies.

    Strategies are enumerated player by player, questions in alphabetical
    order, answer +1 before -1; ties go to the first strategy in that order.
    """
    n = game.n_players
    labels = [game.questions_for(p) for p in range(n)]
    slots = [(p, q) for p in range(n) for q in labels[p]]
    if len(slots) > 24:
        raise ValueError("too many strategy bits for exhaustive search")
    # bit j of a strategy index = answer -1 on slot j, most significant slot first
    idx = np.arange(2 ** len(slots), dtype=np.int64)
    bits = (idx[:, None] >> np.arange(len(slots) - 1, -1, -1)) & 1
    slot_of = {s: j for j, s in enumerate(slots)}
    value = np.zeros(idx.size)
    for r in game.rounds:
        cols = [slot_of[(p, q)] for p, q in enumerate(r.questions)]
        odd = bits[:, cols].sum(axis=1) % 2
        prod = np.where(odd == 0, 1, -1)
        value += float(r.weight) * (prod == r.required)
    best = int(np.argmax(value >= value.max() - 1e-12))
    answers = []
    for p in range(n):
        answers.append(tuple((q, -1 if bits[best, slot_of[(p, q)]] else 1) for q in labels[p]))
    strategy = ClassicalStrategy(tuple(answers))
    return classical_value(game, strategy), strategy


def tau_threshold(classical: float) -> float:
    """n-tangle above which ``(1 + sin 2theta)/2`` beats a classical bound."""
    return (2 * float(classical) - 1) ** 2


# --- closed forms -------------------------------------------------------------------


def closed_form_ghz_win(theta: float) -> float:
    return 0.5 * (1 + np.sin(2 * theta))


def closed_form_w_win(a: float, b: float, c: float) -> float:
    """Valid for real non-negative amplitudes only."""
    for v in (a, b, c):
        if isinstance(v, complex) or v < 0:
            raise ValueError("closed form needs real non-negative amplitudes")
    if abs(a * a + b * b + c * c - 1) > 1e-9:
        raise ValueError("amplitudes must be normalized")
    return 0.25 * (2.5 + a * b + b * c + c * a)


def closed_form_wn_win(n: int) -> float:
    if n < 1:
        raise ValueError("n must be a positive integer")
    rn, rn1 = math.sqrt(n), math.sqrt(n + 1)
    return (5 + 5 * n + rn1 + rn * (rn1 + 1)) / (8 * (n + 1))


def closed_form_rulemaker_w(lam: float) -> float:
    return 11 / 12 - (5 / 6) * np.cos(lam) ** 2


def closed_form_rulemaker_ghz(lam: float) -> float:
    return 0.5 * (1 + np.sin(2 * lam))


# --- rule-maker games ------------------------------------------------------------------


@dataclass(frozen=True)
class RuleMakerSpec:
    """The ruler measures its qubit; outcome b0 or b1 selects the game the others play."""

    shared_state: State
    ruler_qubit: int
    ruler_basis: MeasurementBasis
    rule_b0: GameSpec
    rule_b1: GameSpec

    def __post_init__(self):
        n = self.shared_state.n_qubits
        if not 0 <= self.ruler_qubit < n:
            raise ValueError("ruler qubit out of range")
        for g in (self.rule_b0, self.rule_b1):
            if g.n_players != n - 1:
                raise ValueError("rule sets must cover every qubit except the ruler's")


def rulemaker_win_probability(spec: RuleMakerSpec) -> float:
    n = spec.shared_state.n_qubits
    others = [q for q in range(n) if q != spec.ruler_qubit]
    total = 0.0
    for outcome, rules in (("b0", spec.rule_b0), ("b1", spec.rule_b1)):
        try:
            p, post = project_qubit(spec.shared_state, spec.ruler_qubit, spec.ruler_basis, outcome)
        except ZeroProbabilityOutcome:
            continue
        total += p * quantum_win_probability(partial_trace(post, others), rules)
    return total


# Alice/Bob rules when the ruler holds a W state (X/Z questions)
W_RULE_B0 = GameSpec.uniform([("XX", 1), ("ZZ", -1)])
W_RULE_B1 = GameSpec.uniform([("XX", -1), ("ZZ", 1)])
# ... and when the ruler holds a GHZ state (X/Y questions)
GHZ_RULE_B0 = GameSpec.uniform([("XX", -1), ("YY", 1)])
GHZ_RULE_B1 = GameSpec.uniform([("XX", 1), ("YY", -1)])
# three players plus a ruler sharing (|0000> - |1111>)/sqrt2
FOUR_QUBIT_RULE_B0 = GameSpec.uniform([("XXX", 1), ("XYY", -1), ("YXY", -1), ("YYX", -1)])
FOUR_QUBIT_RULE_B1 = GameSpec.uniform([("XXX", -1), ("XYY", 1), ("YXY", 1), ("YYX", 1)])


def rulemaker_w_spec(lam: float, state: State | None = None) -> RuleMakerSpec:
    state = w_state() if state is None else state
    return RuleMakerSpec(state, 2, MeasurementBasis.param(lam), W_RULE_B0, W_RULE_B1)


def rulemaker_ghz_spec(lam: float, state: State | None = None) -> RuleMakerSpec:
    state = ghz() if state is None else state
    return RuleMakerSpec(state, 2, MeasurementBasis.param(lam), GHZ_RULE_B0, GHZ_RULE_B1)


def rulemaker_4qubit_spec(lam: float) -> RuleMakerSpec:
    state = make_ghz_general(np.pi / 4, 4, -1)
    return RuleMakerSpec(state, 3, MeasurementBasis.param(lam), FOUR_QUBIT_RULE_B0, FOUR_QUBIT_RULE_B1)


def rulemaker_4qubit_game(lam: float) -> float:
    return rulemaker_win_probability(rulemaker_4qubit_spec(lam))


def shipped_games() -> Iterable[tuple[str, GameSpec, PureState]]:
    """Every catalogued game with the state that plays it best."""
    yield "ghz3", vaidman_ghz_game(), ghz()
    yield "w3", vaidman_w_game(), w_state()
    for gid in MULTIPLAYER_IDS:
        g = multiplayer_game(gid)
        yield gid, g, make_ghz_general(np.pi / 4, g.n_players, ghz_phase_for(g))
