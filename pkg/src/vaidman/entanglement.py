"""Concurrence, three-tangle and related entanglement quantifiers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import DensityMatrix, PureState, State, as_density, partial_trace

SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


@dataclass(frozen=True)
class TangleReport:
    """Three-tangle with focus qubit A and the (unsquared) concurrences feeding it."""

    tau: float
    c_a_bc: float
    c_ab: float
    c_ac: float


def _require_qubits(state: State, n: int) -> None:
    if state.n_qubits != n:
        raise ValueError(f"expected a {n}-qubit state, got {state.n_qubits}")


def concurrence_pure_pair(state: PureState) -> float:
    _require_qubits(state, 2)
    psi = state.amplitudes
    # <psi| sy⊗sy |psi*> with psi* the entrywise conjugate
    return float(abs(psi.conj() @ SIGMA_YY @ psi.conj()))


def concurrence_mixed_pair(state: State) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the square roots of the eigenvalues of
    ``rho (sy⊗sy) rho* (sy⊗sy)``.  They are taken as the singular values of
    ``sqrt(rho) sqrt(rho~)``, which avoids square-rooting eigenvalues that
    are zero up to rounding (rank-deficient reductions are the common case).
    """
    _require_qubits(state, 2)
    rho = as_density(state).entries
    w, v = np.linalg.eigh(rho)
    if w.min() < -1e-10:
        raise ValueError("input is not positive semidefinite")
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    m = sqrt_rho @ SIGMA_YY @ sqrt_rho.conj() @ SIGMA_YY
    lam = np.linalg.svd(m, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def one_vs_rest_concurrence(state: PureState, p: int) -> float:
    """Concurrence between qubit ``p`` and the other two qubits taken together."""
    _require_qubits(state, 3)
    rho_p = partial_trace(state, [p])
    return float(np.sqrt(max(0.0, 2 * (1 - rho_p.purity()))))


def three_tangle(state: PureState) -> TangleReport:
    _require_qubits(state, 3)
    c_a_bc = one_vs_rest_concurrence(state, 0)
    c_ab = concurrence_mixed_pair(partial_trace(state, [0, 1]))
    c_ac = concurrence_mixed_pair(partial_trace(state, [0, 2]))
    tau = c_a_bc**2 - c_ab**2 - c_ac**2
    if -1e-9 < tau < 0:
        tau = 0.0
    return TangleReport(float(tau), c_a_bc, c_ab, c_ac)


def pairwise_concurrences(state: PureState) -> tuple[float, float, float]:
    """``(C_AB, C_BC, C_CA)`` of a three-qubit state."""
    _require_qubits(state, 3)
    return tuple(concurrence_mixed_pair(partial_trace(state, pair)) for pair in ((0, 1), (1, 2), (0, 2)))


def residual_concurrence_sum(state: PureState) -> float:
    """``C_AB + C_BC + C_CA``; for real W-type states this is ``2(ab + bc + ca)``."""
    return float(sum(pairwise_concurrences(state)))


def n_tangle_ghz_family(theta: float) -> float:
    """n-tangle of ``sin(theta)|0..0> + cos(theta)|1..1>``, i.e. ``sin^2(2 theta)``.

    Only defined on the GHZ family; it coincides with the three-tangle for
    three qubits and is used for the multi-player thresholds.
    """
    if not 0.0 <= theta <= np.pi / 2:
        raise ValueError("theta must lie in [0, pi/2]")
    return float(np.sin(2 * theta) ** 2)
