"""Seeded Monte-Carlo simulation of GHZ secret sharing and facilitated key sharing.

Every round draws its randomness from its own substream seeded with
``(seed, round_index)``, so a round's outcome does not depend on which other
rounds were simulated or in what order.  Measurement outcomes are sampled
from the exact joint Born distribution of all three qubits.

Outcome convention for key bits: ``+1`` (``|0>`` or ``|+>``) is bit 0 and
``-1`` (``|1>`` or ``|->``) is bit 1.
"""

from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .games import GHZ_RULE_B0, GHZ_RULE_B1, W_RULE_B0, W_RULE_B1, GameSpec
from .qstate import MeasurementBasis, ghz, outcome_distribution, outcome_tuples, w_state

MESSAGE = "Message"
CONTROL = "Control"
DISCARDED = "Discarded"

ACCEPTED = "Accepted"
CHEATING_SUSPECTED = "CheatingSuspected"

HONEST = "honest"
RANDOM_ANNOUNCER = "random"
FLIP_ANNOUNCER = "flip"
PARTIES = ("alice", "bob")

BASIC_ACCEPTED = {"XXX": 1, "XYY": -1, "YXY": -1, "YYX": -1}


class KeyRefused(RuntimeError):
    """Key extraction was requested for a session flagged as cheating."""


@dataclass(frozen=True)
class CheatModel:
    """Which party (if any) corrupts its announced control-mode outcomes.

    ``random`` announces a fresh uniform +-1; ``flip`` announces the negation
    of the true outcome every time.
    """

    kind: str = HONEST
    party: Optional[str] = None

    def __post_init__(self):
        if self.kind not in (HONEST, RANDOM_ANNOUNCER, FLIP_ANNOUNCER):
            raise ValueError(f"unknown cheat model {self.kind!r}")
        if self.kind == HONEST and self.party is not None:
            raise ValueError("an honest model has no cheating party")
        if self.kind != HONEST and self.party not in PARTIES:
            raise ValueError(f"cheating party must be one of {PARTIES}, got {self.party!r}")

    @classmethod
    def parse(cls, text: str) -> "CheatModel":
        """``honest``, ``random:bob``, ``flip:alice`` ..."""
        text = text.strip().lower()
        if text == HONEST:
            return cls()
        kind, sep, party = text.partition(":")
        if not sep:
            raise ValueError(f"cheat model must look like 'flip:bob', got {text!r}")
        return cls(kind, party)

    def __str__(self):
        return self.kind if self.kind == HONEST else f"{self.kind}:{self.party}"


@dataclass(frozen=True)
class SessionConfig:
    rounds: int
    state_kind: str = "W"
    cheat: CheatModel = CheatModel()
    seed: int = 0
    control_rate: float = 1.0
    allowance_sigmas: float = 3.0

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be positive")
        if self.state_kind not in ("W", "GHZ"):
            raise ValueError(f"state kind must be W or GHZ, got {self.state_kind!r}")
        if not 0.0 < self.control_rate <= 1.0:
            raise ValueError("control_rate must be in (0, 1]")

    @property
    def nominal_threshold(self) -> float:
        return 0.75 if self.state_kind == "W" else 1.0

    def threshold(self, control_rounds: int) -> float:
        """Compliance needed to pass; the W rate gets a binomial allowance."""
        if self.state_kind == "GHZ" or control_rounds == 0:
            return self.nominal_threshold
        p = self.nominal_threshold
        return p - self.allowance_sigmas * math.sqrt(p * (1 - p) / control_rounds)


@dataclass(frozen=True)
class RoundRecord:
    index: int
    mode: str
    bases: tuple[str, ...]
    outcomes: Optional[tuple[int, ...]] = None
    announced: Optional[tuple[int, ...]] = None
    ruler_outcome: Optional[str] = None
    key_bit: Optional[int] = None
    compliant: Optional[bool] = None


@dataclass(frozen=True)
class SessionResult:
    """Outcome of a session.

    For the basic protocol ``compliance_rate`` is the fraction of sifted rounds
    in which Bob and Charlie's joint inference of Alice's outcome was right,
    and ``checked_rounds`` counts the sifted rounds.  For the facilitated
    protocol they refer to the verified control rounds.
    """

    protocol: str
    state_kind: str
    records: tuple[RoundRecord, ...]
    key_bits: str
    compliance_rate: float
    checked_rounds: int
    threshold: float
    verdict: str
    sifted_fraction: float

    def to_csv(self) -> str:
        return transcript_csv(self)


def _bit(outcome: int) -> int:
    return 0 if outcome == 1 else 1


def _round_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


@functools.lru_cache(maxsize=None)
def _sampler(state_kind: str, bases: tuple) -> tuple[np.ndarray, tuple]:
    """Cumulative Born distribution and outcome labels for a basis assignment."""
    st = ghz() if state_kind == "GHZ" else w_state()
    bs = [b if isinstance(b, MeasurementBasis) else MeasurementBasis(b) for b in bases]
    probs = outcome_distribution(st, bs)
    cdf = np.cumsum(probs / probs.sum())
    return cdf, tuple(outcome_tuples(bs))


def _sample(state_kind: str, bases: tuple, u: float) -> tuple:
    cdf, labels = _sampler(state_kind, bases)
    return labels[min(int(np.searchsorted(cdf, u, side="right")), len(labels) - 1)]


# --- basic three-party protocol -------------------------------------------------------


def infer_alice_outcome(bases: str, bob: int, charlie: int) -> int:
    """Alice's outcome implied by Bob's and Charlie's for an accepted basis triple."""
    try:
        required = BASIC_ACCEPTED[bases]
    except KeyError:
        raise ValueError(f"basis triple {bases!r} is not accepted") from None
    return required * bob * charlie


def _basic_round(seed: int, i: int) -> RoundRecord:
    u = _round_rng(seed, i).random(4)
    bases = tuple("X" if x < 0.5 else "Y" for x in u[:3])
    triple = "".join(bases)
    if triple not in BASIC_ACCEPTED:
        return RoundRecord(i, DISCARDED, bases)
    a, b, c = _sample("GHZ", bases, u[3])
    inferred = infer_alice_outcome(triple, b, c)
    return RoundRecord(i, MESSAGE, bases, (a, b, c), key_bit=_bit(a), compliant=inferred == a)


def run_basic_qss(rounds: int, seed: int) -> SessionResult:
    if rounds < 1:
        raise ValueError("rounds must be positive")
    records = tuple(_basic_round(seed, i) for i in range(rounds))
    kept = [r for r in records if r.mode != DISCARDED]
    agree = sum(r.compliant for r in kept)
    rate = agree / len(kept) if kept else 1.0
    verdict = ACCEPTED if rate == 1.0 else CHEATING_SUSPECTED
    key = "".join(str(r.key_bit) for r in kept)
    return SessionResult("basic", "GHZ", records, key, rate, len(kept), 1.0, verdict, len(kept) / rounds)


# --- facilitated protocol --------------------------------------------------------------

# ruler angle, player bases, rule checked in control mode, rule used for the key
_FACILITATED = {
    "W": (np.pi / 2, ("X", "Z"), "b1", W_RULE_B1, W_RULE_B0),
    "GHZ": (np.pi / 4, ("X", "Y"), "b0", GHZ_RULE_B0, GHZ_RULE_B1),
}


def _required(rule: GameSpec, letter: str) -> int:
    for r in rule.rounds:
        if r.questions == letter * 2:
            return r.required
    raise KeyError(letter)


def _announce(cheat: CheatModel, party: int, outcome: int, u: float) -> int:
    if cheat.kind == HONEST or PARTIES[party] != cheat.party:
        return outcome
    if cheat.kind == FLIP_ANNOUNCER:
        return -outcome
    return 1 if u < 0.5 else -1


def _facilitated_round(cfg: SessionConfig, i: int) -> RoundRecord:
    lam, letters, control_label, control_rule, message_rule = _FACILITATED[cfg.state_kind]
    u = _round_rng(cfg.seed, i).random(6)
    ab = (letters[int(u[0] >= 0.5)], letters[int(u[1] >= 0.5)])
    a, b, c = _sample(cfg.state_kind, ab + (MeasurementBasis.param(lam),), u[2])
    if ab[0] != ab[1]:
        return RoundRecord(i, DISCARDED, ab, ruler_outcome=c)
    letter = ab[0]
    if c == control_label:
        if u[5] >= cfg.control_rate:
            return RoundRecord(i, CONTROL, ab, (a, b), ruler_outcome=c)
        announced = (_announce(cfg.cheat, 0, a, u[3]), _announce(cfg.cheat, 1, b, u[4]))
        ok = announced[0] * announced[1] == _required(control_rule, letter)
        return RoundRecord(i, CONTROL, ab, (a, b), announced, c, compliant=ok)
    return RoundRecord(i, MESSAGE, ab, (a, b), ruler_outcome=c, key_bit=_bit(a))


def derive_keys(records: Sequence[RoundRecord], state_kind: str) -> tuple[str, str]:
    """Alice's and Bob's key strings after the ruler's flip announcement."""
    message_rule = _FACILITATED[state_kind][4]
    alice, bob = [], []
    for r in records:
        if r.mode != MESSAGE:
            continue
        a, b = r.outcomes
        flip = _required(message_rule, r.bases[0]) == -1
        alice.append(_bit(a))
        bob.append(_bit(b) ^ int(flip))
    return "".join(map(str, alice)), "".join(map(str, bob))


def shared_bit(state_kind: str, letter: str, alice: int, bob: int) -> int:
    """Secret bit of one message round; raises if the outcomes break the message rule."""
    rule = _FACILITATED[state_kind][4]
    if alice * bob != _required(rule, letter):
        raise ValueError("outcomes are inconsistent with the message-mode relation")
    return _bit(alice)


def run_facilitated(cfg: SessionConfig) -> SessionResult:
    records = tuple(_facilitated_round(cfg, i) for i in range(cfg.rounds))
    checked = [r for r in records if r.compliant is not None]
    rate = sum(r.compliant for r in checked) / len(checked) if checked else 1.0
    threshold = cfg.threshold(len(checked))
    verdict = CHEATING_SUSPECTED if rate < threshold else ACCEPTED
    key = derive_keys(records, cfg.state_kind)[0] if verdict == ACCEPTED else ""
    sifted = sum(r.mode != DISCARDED for r in records) / cfg.rounds
    return SessionResult("facilitated", cfg.state_kind, records, key, rate, len(checked), threshold, verdict, sifted)


def extract_key(result: SessionResult) -> str:
    if result.verdict != ACCEPTED:
        raise KeyRefused("cheating was suspected; the ruler withholds the message-mode relation")
    if result.protocol == "basic":
        return result.key_bits
    alice, bob = derive_keys(result.records, result.state_kind)
    if alice != bob:
        raise RuntimeError("Alice's and Bob's keys disagree")
    return alice


# --- transcripts ----------------------------------------------------------------------------

FACILITATED_COLUMNS = ["round", "mode", "aliceBasis", "bobBasis", "charlieOutcome", "aliceOut", "bobOut", "keyBit"]
BASIC_COLUMNS = ["round", "mode", "aliceBasis", "bobBasis", "charlieBasis", "aliceOut", "bobOut", "charlieOut", "inferredAlice"]


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{v:+d}" if isinstance(v, (int, np.integer)) and not isinstance(v, bool) else str(v)


def transcript_csv(result: SessionResult) -> str:
    """Control rounds show the announced outcomes, other rounds the measured ones."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if result.protocol == "basic":
        w.writerow(BASIC_COLUMNS)
        for r in result.records:
            outs = r.outcomes or (None, None, None)
            inferred = infer_alice_outcome("".join(r.bases), outs[1], outs[2]) if r.outcomes else None
            w.writerow([r.index, r.mode, *r.bases, *map(_fmt, outs), _fmt(inferred)])
        return buf.getvalue()
    w.writerow(FACILITATED_COLUMNS)
    for r in result.records:
        outs = r.announced or r.outcomes or (None, None)
        key = "" if r.key_bit is None else str(r.key_bit)
        w.writerow([r.index, r.mode, r.bases[0], r.bases[1], r.ruler_outcome, _fmt(outs[0]), _fmt(outs[1]), key])
    return buf.getvalue()
