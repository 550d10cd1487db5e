import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaidman import games
from vaidman.entanglement import residual_concurrence_sum
from vaidman.qstate import PureState, ghz, make_ghz_general, make_w_general, make_wn, w_state

PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_oracle_win(psi, game):
    """Win probability from Pauli-string expectations: P(product = r) = (1 + r<P>)/2."""
    total = 0.0
    for r in game.rounds:
        op = np.ones((1, 1))
        for q in r.questions:
            op = np.kron(op, PAULI[q])
        expval = np.vdot(psi, op @ psi).real
        total += float(r.weight) * (1 + r.required * expval) / 2
    return total


def itertools_classical(game):
    """Best deterministic strategy, found by plain enumeration in exact arithmetic."""
    n = game.n_players
    letters = [sorted({r.questions[p] for r in game.rounds}) for p in range(n)]
    per_player = [list(itertools.product((1, -1), repeat=len(l))) for l in letters]
    best = Fraction(0)
    for choice in itertools.product(*per_player):
        table = [dict(zip(letters[p], choice[p])) for p in range(n)]
        v = sum((r.weight for r in game.rounds
                 if math.prod(table[p][q] for p, q in enumerate(r.questions)) == r.required), Fraction(0))
        best = max(best, v)
    return best


# transcribed row lists: (questions, required product)
GHZ3_ROWS = [("XXX", 1), ("XYY", -1), ("YXY", -1), ("YYX", -1)]
W3_ROWS = [("ZZZ", -1), ("ZYY", 1), ("YZY", 1), ("YYZ", 1)]
G4_1_ROWS = [("XXXX", -1), ("YYXX", 1), ("YXYX", 1), ("YXXY", 1), ("XYYX", 1), ("XYXY", 1), ("XXYY", 1)]


def rows(game):
    return [(r.questions, r.required) for r in game.rounds]


def test_three_player_catalogue():
    assert rows(games.vaidman_ghz_game()) == GHZ3_ROWS
    assert rows(games.vaidman_w_game()) == W3_ROWS
    for g in (games.vaidman_ghz_game(), games.vaidman_w_game()):
        assert all(r.weight == Fraction(1, 4) for r in g.rounds)


def test_multiplayer_catalogue_shapes():
    assert sorted(rows(games.multiplayer_game("G4_1"))) == sorted(G4_1_ROWS)
    expected = {  # (count, {Y count: required})
        "G4_1": (7, {0: -1, 2: 1}),
        "G5_1": (11, {0: -1, 2: 1}),
        "G5_2": (15, {2: 1, 4: -1}),
        "G6_1": (16, {0: -1, 2: 1}),
        "G6_2": (30, {2: 1, 4: -1}),
        "G6_3": (16, {4: -1, 6: 1}),
    }
    for gid, (count, req) in expected.items():
        g = games.multiplayer_game(gid)
        assert len(g.rounds) == count
        for q, p in rows(g):
            assert set(q) <= {"X", "Y"}
            assert req[q.count("Y")] == p
        assert sum(r.weight for r in g.rounds) == 1


def test_unknown_game_id():
    with pytest.raises(ValueError):
        games.game_by_id("G7_1")


def test_game_spec_validation():
    with pytest.raises(ValueError):
        games.GameSpec(2, (games.Round("XX", 1, Fraction(1, 2)),))
    with pytest.raises(ValueError):
        games.GameSpec.uniform([("XX", 1), ("XX", -1)])
    with pytest.raises(ValueError):
        games.GameSpec.uniform([("XQ", 1)])
    with pytest.raises(ValueError):
        games.GameSpec.uniform([("XX", 0)])


def test_spec_text_round_trip():
    for gid in games.GAME_IDS:
        g = games.game_by_id(gid)
        assert games.parse_game_spec(games.format_game_spec(g)) == g
    assert games.format_game_spec(games.vaidman_ghz_game()).splitlines()[1] == "XYY -1 1/4"
    with pytest.raises(ValueError):
        games.parse_game_spec("# nothing\n")


def test_quantum_win_examples():
    assert games.quantum_win_probability(ghz(), games.vaidman_ghz_game()) == pytest.approx(1, abs=1e-12)
    assert games.quantum_win_probability(w_state(), games.vaidman_w_game()) == pytest.approx(0.875, abs=1e-12)
    assert games.quantum_win_probability(make_wn(1), games.vaidman_w_game()) == pytest.approx(
        (11 + 2 * math.sqrt(2)) / 16, abs=1e-12)
    with pytest.raises(ValueError):
        games.quantum_win_probability(ghz(), games.multiplayer_game("G4_1"))


@st.composite
def states(draw, n):
    re = draw(st.lists(st.floats(-1, 1), min_size=2**n, max_size=2**n))
    im = draw(st.lists(st.floats(-1, 1), min_size=2**n, max_size=2**n))
    v = np.array(re) + 1j * np.array(im)
    if np.linalg.norm(v) < 1e-3:
        v = np.eye(1, 2**n).ravel().astype(complex)
    return PureState(n, v / np.linalg.norm(v))


@settings(max_examples=40, deadline=None)
@given(states(3))
def test_quantum_win_matches_pauli_oracle(state):
    for g in (games.vaidman_ghz_game(), games.vaidman_w_game()):
        ours = games.quantum_win_probability(state, g)
        assert abs(ours - pauli_oracle_win(state.amplitudes, g)) < 1e-12
        assert -1e-12 <= ours <= 1 + 1e-12


@settings(max_examples=15, deadline=None)
@given(states(4))
def test_quantum_win_matches_pauli_oracle_four_players(state):
    g = games.multiplayer_game("G4_1")
    assert abs(games.quantum_win_probability(state, g) - pauli_oracle_win(state.amplitudes, g)) < 1e-12


def test_quantum_win_accepts_density_matrix():
    g = games.vaidman_w_game()
    assert games.quantum_win_probability(w_state().to_density(), g) == pytest.approx(0.875, abs=1e-12)


def test_ghz_closed_form_grid():
    g = games.vaidman_ghz_game()
    for t in np.linspace(0, np.pi / 4, 50):
        st_ = make_ghz_general(t)
        assert games.quantum_win_probability(st_, g) == pytest.approx(games.closed_form_ghz_win(t), abs=1e-9)
        assert pauli_oracle_win(st_.amplitudes, g) == pytest.approx(games.closed_form_ghz_win(t), abs=1e-9)


def test_w_closed_form_on_simplex():
    g = games.vaidman_w_game()
    rng = np.random.default_rng(11)
    for sq in rng.dirichlet([1, 1, 1], size=100):
        a, b, c = np.sqrt(sq / sq.sum())
        st_ = make_w_general(a, b, c)
        assert pauli_oracle_win(st_.amplitudes, g) == pytest.approx(games.closed_form_w_win(a, b, c), abs=1e-9)


def test_w_closed_form_rejects_bad_amplitudes():
    with pytest.raises(ValueError):
        games.closed_form_w_win(-0.5, 0.5, math.sqrt(0.5))
    with pytest.raises(ValueError):
        games.closed_form_w_win(1, 1, 0)


def test_wn_closed_form_and_limit():
    g = games.vaidman_w_game()
    for n in range(1, 21):
        assert pauli_oracle_win(make_wn(n).amplitudes, g) == pytest.approx(games.closed_form_wn_win(n), abs=1e-9)
    values = [games.closed_form_wn_win(n) for n in (1, 10, 1000, 10**6)]
    assert all(v > 0.75 for v in values)
    assert values == sorted(values, reverse=True)
    with pytest.raises(ValueError):
        games.closed_form_wn_win(0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 50), st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi))
def test_wn_win_with_phases_follows_complex_pair_sum(n, gamma, delta):
    st_ = make_wn(n, gamma, delta)
    a, b, c = (st_.amplitude(k) for k in ("100", "010", "001"))
    pairs = (a * np.conj(b) + b * np.conj(c) + c * np.conj(a)).real
    assert games.quantum_win_probability(st_, games.vaidman_w_game()) == pytest.approx((2.5 + pairs) / 4, abs=1e-12)


def test_wn_closed_form_needs_zero_phases():
    g = games.vaidman_w_game()
    assert games.quantum_win_probability(make_wn(1), g) == pytest.approx(games.closed_form_wn_win(1), abs=1e-12)
    assert abs(games.quantum_win_probability(make_wn(1, 0.7, 0.7), g) - games.closed_form_wn_win(1)) > 0.01


def test_w_game_beats_classical_exactly_above_unit_concurrence_sum():
    g = games.vaidman_w_game()
    for a in np.linspace(0, 1, 41):
        for b in np.linspace(0, math.sqrt(1 - a * a), 11):
            c = math.sqrt(max(0.0, 1 - a * a - b * b))
            st_ = make_w_general(a, b, c)
            s = residual_concurrence_sum(st_)
            win = games.quantum_win_probability(st_, g)
            assert win - 0.75 == pytest.approx((s - 1) / 8, abs=1e-9)


def test_classical_values_match_enumeration_oracle():
    for gid in ("ghz3", "w3", "G4_1", "G5_1", "G5_2"):
        g = games.game_by_id(gid)
        value, strategy = games.classical_max_win(g)
        assert value == itertools_classical(g)
        assert games.classical_value(g, strategy) == value


def test_classical_exact_fractions():
    expected = {"ghz3": Fraction(3, 4), "w3": Fraction(3, 4), "G4_1": Fraction(6, 7), "G5_1": Fraction(10, 11),
                "G5_2": Fraction(2, 3), "G6_1": Fraction(15, 16), "G6_3": Fraction(15, 16)}
    for gid, frac in expected.items():
        assert games.classical_max_win(games.game_by_id(gid))[0] == frac


def test_g6_2_has_a_two_thirds_witness():
    g = games.multiplayer_game("G6_2")
    answers = [(("X", 1), ("Y", -1 if p == 0 else 1)) for p in range(6)]
    assert games.classical_value(g, games.ClassicalStrategy(tuple(answers))) == Fraction(2, 3)
    assert games.classical_max_win(g)[0] == Fraction(2, 3)


def test_classical_tie_break_prefers_plus_one():
    _, strategy = games.classical_max_win(games.vaidman_ghz_game())
    # the first optimum in enumeration order flips only the last answer slot
    assert strategy.table().splitlines() == [
        "player 0: X->+1  Y->+1", "player 1: X->+1  Y->+1", "player 2: X->+1  Y->-1"]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["ghz3", "w3", "G4_1", "G5_2"]), st.randoms())
def test_classical_value_invariant_under_player_relabeling(gid, rnd):
    g = games.game_by_id(gid)
    order = list(range(g.n_players))
    rnd.shuffle(order)
    assert games.classical_max_win(g.permuted(order))[0] == games.classical_max_win(g)[0]


def test_ghz_phase_per_game():
    assert games.ghz_phase_for(games.vaidman_ghz_game()) == 1
    for gid in games.MULTIPLAYER_IDS:
        assert games.ghz_phase_for(games.multiplayer_game(gid)) == -1
    with pytest.raises(ValueError):
        games.ghz_phase_for(games.vaidman_w_game())


def test_multiplayer_quantum_follows_ghz_closed_form():
    for gid in games.MULTIPLAYER_IDS:
        g = games.multiplayer_game(gid)
        for t in np.linspace(0, np.pi / 4, 9):
            st_ = make_ghz_general(t, g.n_players, -1)
            assert games.quantum_win_probability(st_, g) == pytest.approx(games.closed_form_ghz_win(t), abs=1e-9)


def test_tau_threshold():
    assert games.tau_threshold(0.75) == pytest.approx(0.25)
    assert games.tau_threshold(Fraction(1, 2)) == 0
    # at tau = threshold the quantum value meets the classical bound
    for c in (Fraction(10, 11), Fraction(15, 16), Fraction(2, 3)):
        theta = math.asin(math.sqrt(games.tau_threshold(c))) / 2
        assert games.closed_form_ghz_win(theta) == pytest.approx(float(c), abs=1e-12)


def test_shipped_games_all_won_with_certainty():
    for gid, g, st_ in games.shipped_games():
        target = 0.875 if gid == "w3" else 1.0
        assert games.quantum_win_probability(st_, g) == pytest.approx(target, abs=1e-12)


# --- rule-maker ---------------------------------------------------------------------------


def test_rulemaker_w_examples():
    for lam, expected in ((0, 1 / 12), (np.pi / 4, 0.5), (np.pi / 2, 11 / 12)):
        assert games.rulemaker_win_probability(games.rulemaker_w_spec(lam)) == pytest.approx(expected, abs=1e-12)


def test_rulemaker_closed_forms_on_grid():
    for lam in np.linspace(0, np.pi / 2, 100):
        assert games.rulemaker_win_probability(games.rulemaker_w_spec(lam)) == pytest.approx(
            games.closed_form_rulemaker_w(lam), abs=1e-9)
        assert games.rulemaker_win_probability(games.rulemaker_ghz_spec(lam)) == pytest.approx(
            games.closed_form_rulemaker_ghz(lam), abs=1e-9)


def test_rulemaker_zero_probability_outcome_contributes_nothing():
    # |000> with the ruler measuring in Z: b1 = |1> never happens
    spec = games.rulemaker_w_spec(np.pi / 2, PureState.basis("000"))
    # residual |00>: XX gives +1 or -1 evenly, ZZ gives +1, so rule b0 wins half the time
    assert games.rulemaker_win_probability(spec) == pytest.approx(0.25, abs=1e-12)


def test_rulemaker_spec_validation():
    with pytest.raises(ValueError):
        games.RuleMakerSpec(w_state(), 3, games.MeasurementBasis.param(0.1), games.W_RULE_B0, games.W_RULE_B1)
    with pytest.raises(ValueError):
        games.RuleMakerSpec(w_state(), 2, games.MeasurementBasis.param(0.1), games.vaidman_ghz_game(),
                            games.W_RULE_B1)


def test_four_qubit_rulemaker():
    assert games.rulemaker_4qubit_game(np.pi / 4) == pytest.approx(1, abs=1e-12)
    for d in np.linspace(0, np.pi / 4, 25):
        assert games.rulemaker_4qubit_game(np.pi / 4 + d) == pytest.approx(
            games.rulemaker_4qubit_game(np.pi / 4 - d), abs=1e-9)
    assert games.rulemaker_4qubit_game(0) == pytest.approx(0.5, abs=1e-12)
