"""Dense n-qubit states, single-qubit measurement bases and Born-rule helpers.

Qubit 0 is the leftmost (most significant) bit of a computational basis
index, so for three players the index of ``|abc>`` is ``4a + 2b + c`` and
Alice, Bob, Charlie (and Dave) hold qubits 0, 1, 2 (and 3).

Outcome conventions are global: for the Pauli bases the first eigenvector is
labelled ``+1`` (``|0>``, ``|+x>``, ``|+y>``) and the second ``-1``.  For the
parametrised basis the outcomes are the strings ``"b0"`` and ``"b1"``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

MAX_QUBITS = 6
STATE_TOL = 1e-12
PROB_TOL = 1e-10

PAULI_KINDS = ("X", "Y", "Z")
PARAM = "Param"

Outcome = Union[int, str]


class ZeroProbabilityOutcome(ValueError):
    """Raised when a projective measurement outcome has zero Born probability."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")


@dataclass(frozen=True)
class PureState:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_n(self.n_qubits)
        amps = _frozen(np.asarray(self.amplitudes).reshape(-1))
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(f"expected {2**self.n_qubits} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > STATE_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size)))
        return cls(n, amps)

    @classmethod
    def basis(cls, bits: str) -> "PureState":
        """Computational basis state from a bit string such as ``"100"``."""
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[int(bits, 2)])

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def tensor(self, other: "PureState") -> "PureState":
        return PureState(self.n_qubits + other.n_qubits, np.kron(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_n(self.n_qubits)
        rho = _frozen(self.entries)
        dim = 2**self.n_qubits
        if rho.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise ValueError("density matrix entries must be finite")
        if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > STATE_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if np.min(np.linalg.eigvalsh(rho)) < -PROB_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", rho)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        dim = 2**n_qubits
        return cls(n_qubits, np.eye(dim) / dim)

    def to_density(self) -> "DensityMatrix":
        return self

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(self.n_qubits + other.n_qubits, np.kron(self.entries, other.entries))

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


State = Union[PureState, DensityMatrix]


def as_density(state: State) -> DensityMatrix:
    return state.to_density()


@dataclass(frozen=True)
class MeasurementBasis:
    """A single-qubit orthonormal basis: X, Y, Z, or the lambda-parametrised one.

    The parametrised basis has ``b0 = sin(lam)|0> - cos(lam)|1>`` and
    ``b1 = cos(lam)|0> + sin(lam)|1>``.
    """

    kind: str
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in PAULI_KINDS + (PARAM,):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if not np.isfinite(self.lam):
            raise ValueError("lambda must be finite")

    @classmethod
    def param(cls, lam: float) -> "MeasurementBasis":
        return cls(PARAM, float(lam))

    @property
    def labels(self) -> tuple:
        return ("b0", "b1") if self.kind == PARAM else (1, -1)

    def matrix(self) -> np.ndarray:
        """2x2 unitary whose columns are the eigenvectors, in label order."""
        s = 1 / np.sqrt(2)
        if self.kind == "Z":
            return np.eye(2, dtype=complex)
        if self.kind == "X":
            return np.array([[s, s], [s, -s]], dtype=complex)
        if self.kind == "Y":
            return np.array([[s, s], [1j * s, -1j * s]], dtype=complex)
        c, sn = np.cos(self.lam), np.sin(self.lam)
        return np.array([[sn, c], [-c, sn]], dtype=complex)

    def index(self, outcome: Outcome) -> int:
        try:
            return self.labels.index(outcome)
        except ValueError:
            raise ValueError(f"outcome {outcome!r} is not valid for basis {self.kind}") from None

    def __str__(self):
        return f"Param({self.lam:.6g})" if self.kind == PARAM else self.kind


X = MeasurementBasis("X")
Y = MeasurementBasis("Y")
Z = MeasurementBasis("Z")


def basis(label: Union[str, MeasurementBasis]) -> MeasurementBasis:
    if isinstance(label, MeasurementBasis):
        return label
    return MeasurementBasis(label)


def basis_eigenvectors(b: MeasurementBasis) -> tuple[tuple[PureState, Outcome], tuple[PureState, Outcome]]:
    u = b.matrix()
    first, second = b.labels
    return (PureState(1, u[:, 0]), first), (PureState(1, u[:, 1]), second)


# --- constructors -----------------------------------------------------------


def make_ghz_general(theta: float, n_qubits: int = 3, phase_sign: int = 1) -> PureState:
    """``sin(theta)|0...0> + phase_sign*cos(theta)|1...1>``."""
    if n_qubits < 2:
        raise ValueError("a GHZ-type state needs at least 2 qubits")
    if phase_sign not in (1, -1):
        raise ValueError("phase_sign must be +1 or -1")
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = np.sin(theta)
    amps[-1] = phase_sign * np.cos(theta)
    return PureState(n_qubits, amps)


def ghz() -> PureState:
    return make_ghz_general(np.pi / 4, 3, 1)


def make_w_general(a: complex, b: complex, c: complex) -> PureState:
    """``a|100> + b|010> + c|001>``."""
    norm = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"|a|^2+|b|^2+|c|^2 must be 1, got {norm!r}")
    amps = np.zeros(8, dtype=complex)
    amps[0b100], amps[0b010], amps[0b001] = a, b, c
    # absorb the 1e-9 input slack so the stricter state invariant holds
    return PureState(3, amps / np.sqrt(norm))


def w_state() -> PureState:
    s = 1 / np.sqrt(3)
    return make_w_general(s, s, s)


def make_wn(n: int, gamma: float = 0.0, delta: float = 0.0) -> PureState:
    if n < 1:
        raise ValueError("n must be a positive integer")
    k = 1 / np.sqrt(2 * (1 + n))
    return make_w_general(k, k * np.sqrt(n) * np.exp(1j * gamma), k * np.sqrt(n + 1) * np.exp(1j * delta))


# --- measurement --------------------------------------------------------------


def _apply_1q(rho: np.ndarray, n: int, qubit: int, op: np.ndarray) -> np.ndarray:
    """Return ``op_q rho op_q^dagger`` for a 2x2 ``op`` acting on ``qubit``."""
    a, b = 2**qubit, 2 ** (n - qubit - 1)
    t = rho.reshape(a, 2, b, a, 2, b)
    t = np.einsum("ij,AjBCkD,lk->AiBClD", op, t, op.conj())
    return t.reshape(2**n, 2**n)


def _check_bases(rho: DensityMatrix, bases: Sequence) -> list[MeasurementBasis]:
    bases = [basis(b) for b in bases]
    if len(bases) != rho.n_qubits:
        raise ValueError(f"got {len(bases)} bases for a {rho.n_qubits}-qubit state")
    return bases


def outcome_distribution(state: State, bases: Sequence) -> np.ndarray:
    """Probabilities of every outcome tuple, indexed like computational basis strings.

    Bit ``k`` of the index selects the first (0) or second (1) eigenvector of
    qubit ``k``'s basis.  Computed by rotating the state into the product
    basis and reading off the diagonal.
    """
    rho = as_density(state)
    bases = _check_bases(rho, bases)
    u = _product_unitary(tuple((b.kind, b.lam) for b in bases))
    probs = np.einsum("ji,jk,ki->i", u.conj(), rho.entries, u).real
    return np.clip(probs, 0.0, None)


@functools.lru_cache(maxsize=4096)
def _product_unitary(key: tuple) -> np.ndarray:
    u = np.ones((1, 1), dtype=complex)
    for kind, lam in key:
        u = np.kron(u, MeasurementBasis(kind, lam).matrix())
    u.setflags(write=False)
    return u


def outcome_probability(state: State, bases: Sequence, outcomes: Sequence[Outcome]) -> float:
    """Born probability ``Tr(rho * P)`` with ``P`` the tensor product of eigenprojectors."""
    rho = as_density(state)
    bases = _check_bases(rho, bases)
    if len(outcomes) != rho.n_qubits:
        raise ValueError(f"got {len(outcomes)} outcomes for a {rho.n_qubits}-qubit state")
    proj = np.ones((1, 1), dtype=complex)
    for b, o in zip(bases, outcomes):
        v = b.matrix()[:, b.index(o)]
        proj = np.kron(proj, np.outer(v, v.conj()))
    return float(max(np.trace(rho.entries @ proj).real, 0.0))


def outcome_tuples(bases: Sequence) -> Iterable[tuple]:
    """All outcome-label tuples in the same order as :func:`outcome_distribution`."""
    return itertools.product(*(basis(b).labels for b in bases))


def project_qubit(state: State, qubit: int, b: MeasurementBasis, outcome: Outcome) -> tuple[float, DensityMatrix]:
    rho = as_density(state)
    n = rho.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    b = basis(b)
    v = b.matrix()[:, b.index(outcome)]
    post = _apply_1q(np.array(rho.entries), n, qubit, np.outer(v, v.conj()))
    p = float(np.trace(post).real)
    if p <= PROB_TOL:
        raise ZeroProbabilityOutcome(f"outcome {outcome!r} of qubit {qubit} in basis {b} has zero probability")
    post = post / p
    post = (post + post.conj().T) / 2
    return p, DensityMatrix(n, post)


def partial_trace(state: State, keep: Iterable[int]) -> DensityMatrix:
    rho = as_density(state)
    n = rho.n_qubits
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set must be non-empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep set {keep} out of range for {n} qubits")
    drop = [q for q in range(n) if q not in keep]
    t = rho.entries.reshape((2,) * (2 * n))
    # trace highest index first so the remaining axis numbers stay valid
    for count, q in enumerate(sorted(drop, reverse=True)):
        m = n - count
        t = np.trace(t, axis1=q, axis2=q + m)
    k = len(keep)
    red = t.reshape(2**k, 2**k)
    return DensityMatrix(k, (red + red.conj().T) / 2)
