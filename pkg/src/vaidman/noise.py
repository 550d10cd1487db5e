"""Single-qubit noise channels and the rule-maker game on noisy qubits.

Noise acts on Alice's (qubit 0, strength ``d1``) and Bob's (qubit 1, strength
``d2``) qubits before anyone measures; the ruler's qubit is noiseless and the
ruler measures at the state's optimal angle (pi/2 for W, pi/4 for GHZ).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .games import rulemaker_ghz_spec, rulemaker_w_spec, rulemaker_win_probability
from .qstate import DensityMatrix, State, _apply_1q, as_density, ghz, w_state

PHASE_FLIP = "PhaseFlip"
DEPOLARIZING = "Depolarizing"
AMPLITUDE_DAMPING = "AmplitudeDamping"
CHANNEL_KINDS = (PHASE_FLIP, DEPOLARIZING, AMPLITUDE_DAMPING)
STATE_KINDS = ("W", "GHZ")

# depolarizing conventions: "affine" is D*I/2 + (1-D)*rho, "pauli" is
# (1-D)*rho + D/3*(X rho X + Y rho Y + Z rho Z)
DEPOLARIZING_CONVENTIONS = ("affine", "pauli")

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)


@dataclass(frozen=True)
class NoiseChannel:
    kind: str
    strength: float
    convention: str = "affine"
    kraus: tuple = field(default=(), repr=False, compare=False)

    def is_affine(self) -> bool:
        return self.kind == DEPOLARIZING and self.convention == "affine"

    def apply_1q(self, rho: np.ndarray) -> np.ndarray:
        if self.is_affine():
            return self.strength * np.trace(rho) * _I / 2 + (1 - self.strength) * rho
        return sum(e @ rho @ e.conj().T for e in self.kraus)


def channel_kraus(kind: str, strength: float, convention: str = "affine") -> NoiseChannel:
    """Build a channel.  ``strength`` is the flip probability, depolarizing
    probability or damping rate, so strength 0 is always the identity."""
    if kind not in CHANNEL_KINDS:
        raise ValueError(f"unknown channel {kind!r}")
    if not 0.0 <= strength <= 1.0:
        raise ValueError(f"strength must be in [0, 1], got {strength!r}")
    if convention not in DEPOLARIZING_CONVENTIONS:
        raise ValueError(f"unknown depolarizing convention {convention!r}")
    d = float(strength)
    if kind == PHASE_FLIP:
        ops = (np.sqrt(1 - d) * _I, np.sqrt(d) * _Z)
    elif kind == AMPLITUDE_DAMPING:
        ops = (np.array([[1, 0], [0, np.sqrt(1 - d)]], dtype=complex), np.array([[0, np.sqrt(d)], [0, 0]], dtype=complex))
    elif convention == "pauli":
        ops = (np.sqrt(1 - d) * _I,) + tuple(np.sqrt(d / 3) * p for p in (_X, _Y, _Z))
    else:
        # affine rule; Kraus form kept for completeness checks
        ops = (np.sqrt(1 - 3 * d / 4) * _I,) + tuple(np.sqrt(d / 4) * p for p in (_X, _Y, _Z))
    return NoiseChannel(kind, d, convention, ops)


def apply_channel(state: State, qubit: int, ch: NoiseChannel) -> DensityMatrix:
    rho = as_density(state)
    n = rho.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    m = np.array(rho.entries)
    if ch.is_affine():
        # D * (Tr_q rho) ⊗ I/2 + (1 - D) rho, written via the Pauli twirl identity
        twirled = sum(_apply_1q(m, n, qubit, p) for p in (_I, _X, _Y, _Z)) / 4
        out = ch.strength * twirled + (1 - ch.strength) * m
    else:
        out = sum(_apply_1q(m, n, qubit, e) for e in ch.kraus)
    return DensityMatrix(n, (out + out.conj().T) / 2)


def _noisy_state(state_kind: str, kind: str, d1: float, d2: float, convention: str) -> DensityMatrix:
    if state_kind not in STATE_KINDS:
        raise ValueError(f"unknown state kind {state_kind!r}")
    rho = (w_state() if state_kind == "W" else ghz()).to_density()
    rho = apply_channel(rho, 0, channel_kraus(kind, d1, convention))
    return apply_channel(rho, 1, channel_kraus(kind, d2, convention))


def noisy_rulemaker_win(state_kind: str, kind: str, d1: float, d2: float, convention: str = "affine") -> float:
    rho = _noisy_state(state_kind, kind, d1, d2, convention)
    if state_kind == "W":
        spec = rulemaker_w_spec(np.pi / 2, rho)
    else:
        spec = rulemaker_ghz_spec(np.pi / 4, rho)
    return rulemaker_win_probability(spec)


def closed_form_noisy(state_kind: str, kind: str, d1: float, d2: float) -> float:
    """Reported closed forms, with exact fractions in place of rounded decimals.

    The depolarizing rows are reproduced as reported even though they do not
    agree with either depolarizing convention implemented here.
    """
    for d in (d1, d2):
        if not 0.0 <= d <= 1.0:
            raise ValueError("noise strengths must be in [0, 1]")
    root = np.sqrt((1 - d1) * (1 - d2))
    table = {
        ("W", AMPLITUDE_DAMPING): lambda: 3 / 4 - d1 / 6 - d2 / 6 + root / 6,
        ("W", DEPOLARIZING): lambda: 11 / 12 - 11 / 24 * d1 - 11 / 24 * d2 + 11 / 48 * d1 * d2,
        ("W", PHASE_FLIP): lambda: 11 / 12 - d1 / 3 - d2 / 3 + 2 / 3 * d1 * d2,
        ("GHZ", AMPLITUDE_DAMPING): lambda: 0.5 + 0.5 * root,
        ("GHZ", DEPOLARIZING): lambda: 1 - 0.75 * d1 - 0.75 * d2 + 0.75 * d1 * d2,
        ("GHZ", PHASE_FLIP): lambda: 1 - d1 - d2 + 2 * d1 * d2,
    }
    try:
        return float(table[(state_kind, kind)]())
    except KeyError:
        raise ValueError(f"no closed form for {state_kind}/{kind}") from None


def rounded_closed_form_noisy(state_kind: str, kind: str, d1: float, d2: float) -> float:
    """The same closed forms with the coefficients exactly as printed."""
    root = np.sqrt((1 - d1) * (1 - d2))
    table = {
        ("W", AMPLITUDE_DAMPING): 0.75 - 0.1667 * d1 - 0.1667 * d2 + 0.1667 * root,
        ("W", DEPOLARIZING): 0.91667 - 0.45833 * d1 - 0.45833 * d2 + 0.229167 * d1 * d2,
        ("W", PHASE_FLIP): 0.91667 - 0.333 * d1 - 0.333 * d2 + 0.667 * d1 * d2,
        ("GHZ", AMPLITUDE_DAMPING): 0.5 + 0.5 * root,
        ("GHZ", DEPOLARIZING): 1 - 0.75 * d1 - 0.75 * d2 + 0.75 * d1 * d2,
        ("GHZ", PHASE_FLIP): 1 - d1 - d2 + 2 * d1 * d2,
    }
    return float(table[(state_kind, kind)])


@dataclass(frozen=True)
class GridPoint:
    state: str
    channel: str
    d1: float
    d2: float
    simulated: float
    closed_form: float

    @property
    def abs_dev(self) -> float:
        return abs(self.simulated - self.closed_form)


@dataclass(frozen=True)
class PairReport:
    state: str
    channel: str
    convention: str
    max_dev: float
    argmax: tuple[float, float]
    flagged: bool


@dataclass
class NoiseReport:
    pairs: list[PairReport]
    points: list[GridPoint]

    def pair(self, state: str, channel: str, convention: str = "affine") -> PairReport:
        for p in self.pairs:
            if (p.state, p.channel, p.convention) == (state, channel, convention):
                return p
        raise KeyError((state, channel, convention))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["state", "channel", "D1", "D2", "simulated", "closed_form", "abs_dev"])
        for pt in self.points:
            w.writerow([pt.state, pt.channel] + [f"{v:.12g}" for v in (pt.d1, pt.d2, pt.simulated, pt.closed_form, pt.abs_dev)])
        return buf.getvalue()


def verify_noise_formulas(grid_size: int = 21, flag_tol: float = 1e-6,
                          conventions: Sequence[str] = DEPOLARIZING_CONVENTIONS) -> NoiseReport:
    """Compare density-matrix simulation with the closed forms on a ``grid_size``² lattice.

    Depolarizing pairs are evaluated once per convention; the CSV points use
    the affine convention only.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    grid = np.linspace(0.0, 1.0, grid_size)
    pairs, points = [], []
    for state in STATE_KINDS:
        for kind in CHANNEL_KINDS:
            for conv in conventions if kind == DEPOLARIZING else ("affine",):
                worst, where = -1.0, (0.0, 0.0)
                for d1 in grid:
                    for d2 in grid:
                        sim = noisy_rulemaker_win(state, kind, d1, d2, conv)
                        ref = closed_form_noisy(state, kind, d1, d2)
                        if conv == "affine":
                            points.append(GridPoint(state, kind, float(d1), float(d2), sim, ref))
                        if abs(sim - ref) > worst:
                            worst, where = abs(sim - ref), (float(d1), float(d2))
                pairs.append(PairReport(state, kind, conv, worst, where, worst > flag_tol))
    return NoiseReport(pairs, points)
