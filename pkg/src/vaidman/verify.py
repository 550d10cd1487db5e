"""Closed-form versus brute-force cross-checks, collected into one report.

Each check compares an analytic expression (or a reported number) with an
independent exhaustive evaluation and records the worst deviation.  Waived
checks run and report like any other but never fail the suite; they cover
reported values known to disagree with simulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import entanglement as ent
from . import games
from . import noise
from .qstate import make_ghz_general, make_w_general, make_wn, w_state

PRINTED_DECIMAL_TOL = 5e-4


@dataclass(frozen=True)
class Check:
    name: str
    max_dev: float
    tolerance: float
    waived: bool = False
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.max_dev <= self.tolerance

    @property
    def status(self) -> str:
        if self.passed:
            return "PASS"
        return "WAIVED" if self.waived else "FAIL"


def _max_dev(pairs: Iterable[tuple[float, float]]) -> float:
    return max(abs(a - b) for a, b in pairs)


def simplex_samples(count: int, seed: int = 0) -> np.ndarray:
    """Real non-negative ``(a, b, c)`` with ``a^2 + b^2 + c^2 = 1``."""
    rng = np.random.default_rng(seed)
    sq = rng.dirichlet([1.0, 1.0, 1.0], size=count)
    return np.sqrt(sq / sq.sum(axis=1, keepdims=True))


def _game_checks(tol: float, grid: int) -> list[Check]:
    out = []
    thetas = np.linspace(0, np.pi / 4, grid)
    g3 = games.vaidman_ghz_game()
    out.append(Check("ghz_game_closed_form", _max_dev(
        (games.quantum_win_probability(make_ghz_general(t), g3), games.closed_form_ghz_win(t)) for t in thetas), tol))

    w3 = games.vaidman_w_game()
    out.append(Check("w_game_closed_form", _max_dev(
        (games.quantum_win_probability(make_w_general(*abc), w3), games.closed_form_w_win(*abc))
        for abc in simplex_samples(100)), tol))
    out.append(Check("w_game_standard_value", abs(games.quantum_win_probability(w_state(), w3) - 0.875), tol))
    out.append(Check("wn_game_closed_form", _max_dev(
        (games.quantum_win_probability(make_wn(n), w3), games.closed_form_wn_win(n)) for n in range(1, 21)), tol))
    out.append(Check("wn_game_reported_0.86425", abs(games.closed_form_wn_win(1) - 0.86425), PRINTED_DECIMAL_TOL))
    out.append(Check("wn_concurrence_sum_reported_1.914", abs(ent.residual_concurrence_sum(make_wn(1)) - 1.914), 1e-3))
    # phases enter through Re(a b* + b c* + c a*); report rather than assume
    phase_dev = max(abs(games.quantum_win_probability(make_wn(1, g, d), w3) - games.closed_form_wn_win(1))
                    for g in np.linspace(0, np.pi, 5) for d in np.linspace(0, np.pi, 5))
    out.append(Check("wn_game_phase_dependence", phase_dev, tol, waived=True,
                     detail="closed form assumes zero phases"))

    lams = np.linspace(0, np.pi / 2, grid)
    out.append(Check("rulemaker_w_closed_form", _max_dev(
        (games.rulemaker_win_probability(games.rulemaker_w_spec(l)), games.closed_form_rulemaker_w(l)) for l in lams), tol))
    out.append(Check("rulemaker_w_reported_endpoints", max(
        abs(games.rulemaker_win_probability(games.rulemaker_w_spec(np.pi / 2)) - 0.9167),
        abs(games.rulemaker_win_probability(games.rulemaker_w_spec(0.0)) - 0.0833)), 5e-5))
    out.append(Check("rulemaker_ghz_closed_form", _max_dev(
        (games.rulemaker_win_probability(games.rulemaker_ghz_spec(l)), games.closed_form_rulemaker_ghz(l)) for l in lams), tol))
    out.append(Check("rulemaker_4q_max_at_pi_4", abs(games.rulemaker_4qubit_game(np.pi / 4) - 1.0), tol))
    out.append(Check("rulemaker_4q_symmetry", _max_dev(
        (games.rulemaker_4qubit_game(np.pi / 4 + d), games.rulemaker_4qubit_game(np.pi / 4 - d))
        for d in np.linspace(0, np.pi / 4, grid)), tol))

    for gid in games.MULTIPLAYER_IDS:
        g = games.multiplayer_game(gid)
        sign = games.ghz_phase_for(g)
        out.append(Check(f"{gid}_quantum_ghz_family", _max_dev(
            (games.quantum_win_probability(make_ghz_general(t, g.n_players, sign), g), games.closed_form_ghz_win(t))
            for t in thetas), tol))
    return out


def classical_rows() -> list[tuple[str, Fraction, float, float, float]]:
    """``(game id, exact value, reported value, derived tau threshold, reported threshold)``."""
    rows = []
    for gid in games.GAME_IDS:
        value, _ = games.classical_max_win(games.game_by_id(gid))
        rows.append((gid, value, games.REFERENCE_CLASSICAL[gid], games.tau_threshold(value),
                     games.REFERENCE_TAU_THRESHOLD.get(gid, float("nan"))))
    return rows


# reported classical bounds that exhaustive search contradicts
CLASSICAL_WAIVERS = {"G4_1": "reported 0.8517, search gives 6/7", "G6_2": "reported 0.5, search gives 2/3"}


def _classical_checks() -> list[Check]:
    out = []
    for gid, value, reported, tau, tau_reported in classical_rows():
        waived = gid in CLASSICAL_WAIVERS
        out.append(Check(f"{gid}_classical_value", abs(float(value) - reported), PRINTED_DECIMAL_TOL, waived,
                         f"{value} vs {reported}"))
        if not np.isnan(tau_reported):
            # G4_1's threshold follows from 6/7, so only G6_2 stays waived here
            out.append(Check(f"{gid}_tau_threshold", abs(tau - tau_reported), 0.01, gid == "G6_2",
                             f"{tau:.4f} vs {tau_reported}"))
    return out


def _tangle_checks(tol: float, grid: int) -> list[Check]:
    thetas = np.linspace(0, np.pi / 4, grid)
    out = [Check("tau_ghz_family", _max_dev(
        (ent.three_tangle(make_ghz_general(t)).tau, ent.n_tangle_ghz_family(t)) for t in thetas), tol)]
    out.append(Check("residual_concurrence_w_family", _max_dev(
        (ent.residual_concurrence_sum(make_w_general(a, b, c)), 2 * (a * b + b * c + c * a))
        for a, b, c in simplex_samples(50, seed=1)), max(tol, 1e-9)))
    crossing = np.arcsin(0.5) / 2
    out.append(Check("ghz_threshold_tau_0.25", abs(ent.n_tangle_ghz_family(crossing) - 0.25), tol,
                     detail="closed form equals 3/4 at this tau"))
    return out


def _noise_checks(tol: float, grid: int) -> list[Check]:
    report = noise.verify_noise_formulas(min(grid, 21))
    out = []
    for p in report.pairs:
        name = f"noise_{p.state}_{p.channel}" + (f"_{p.convention}" if p.channel == noise.DEPOLARIZING else "")
        waived = p.channel == noise.DEPOLARIZING
        out.append(Check(name, p.max_dev, tol, waived, f"worst at D1={p.argmax[0]:.3g}, D2={p.argmax[1]:.3g}"))
    rounded = max(abs(pt.simulated - noise.rounded_closed_form_noisy(pt.state, pt.channel, pt.d1, pt.d2))
                  for pt in report.points if (pt.state, pt.channel) == ("W", noise.AMPLITUDE_DAMPING))
    out.append(Check("noise_W_AmplitudeDamping_rounded_coefficients", rounded, 1e-4))
    return out


def run_checks(tolerance: float = 1e-9, grid: int = 101,
               progress: Callable[[Check], None] | None = None) -> list[Check]:
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    checks = []
    for group in (_game_checks(tolerance, grid), _classical_checks(), _tangle_checks(tolerance, grid),
                  _noise_checks(tolerance, grid)):
        for c in group:
            checks.append(c)
            if progress:
                progress(c)
    return checks


def all_passed(checks: Iterable[Check]) -> bool:
    return all(c.passed or c.waived for c in checks)
