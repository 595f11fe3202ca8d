"""Exact and Trotterized time evolution of plaquette states.

Exact evolution goes through the spectral decomposition of the dense
Hamiltonian; Trotterized evolution applies the closed-form exponential of one
monomial at a time (cos * 1 - i sin * P) in a fixed term order, repeated for
the chosen number of steps.  The simulated phase is phi = J * t, so at unit
coupling the phase and the evolution time coincide.

States are plain complex numpy arrays of length 2^n.  Every evolution
preserves the norm to 1e-10; sweeps are evaluated in deterministic grid order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import GuardError
from .linkmodel import (
    PlaquetteLayout,
    canonical_sector_state,
    gauge_sectors,
    plaquette_hamiltonian,
    plaquette_monomials,
    total_gauge_casimir,
)
from .pauli import PauliSum, dense

EVOLVE_QUBIT_LIMIT = 12
NORM_TOL = 1e-10
DEVIATION_GUARD = 1e-12


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    state = np.zeros(2**n_qubits, dtype=complex)
    state[index] = 1.0
    return state


def _n_qubits_of(state: np.ndarray) -> int:
    n = int(np.log2(len(state)))
    if 2**n != len(state):
        raise ValueError("state length is not a power of two")
    return n


def _check_norm(state: np.ndarray) -> np.ndarray:
    if abs(np.linalg.norm(state) - 1.0) > NORM_TOL:
        raise GuardError("state norm drifted beyond 1e-10")
    return state


def expectation(op: PauliSum, state: np.ndarray) -> float:
    matrix = dense(op, _n_qubits_of(state))
    return float((state.conj() @ matrix @ state).real)


def exact_evolve(hamiltonian: PauliSum, state: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) applied through the spectral decomposition of dense(H)."""
    n = _n_qubits_of(state)
    if n > EVOLVE_QUBIT_LIMIT:
        raise GuardError(f"exact evolution limited to {EVOLVE_QUBIT_LIMIT} qubits")
    if not hamiltonian.is_hermitian():
        raise GuardError("Hamiltonian must be Hermitian")
    eigvals, eigvecs = np.linalg.eigh(dense(hamiltonian, n))
    out = (eigvecs * np.exp(-1j * eigvals * t)) @ (eigvecs.conj().T @ state)
    return _check_norm(out)


@dataclass(frozen=True)
class TrotterPlan:
    """Term order (a permutation of the Hamiltonian's canonical term list),
    step count N >= 1 and simulated phase phi = J t."""

    order: tuple[int, ...]
    steps: int
    phi: float

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("step count must be at least 1")
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("order must be a permutation of the term indices")


def trotter_plan(hamiltonian: PauliSum, steps: int, phi: float) -> TrotterPlan:
    """Plan using the Hamiltonian's canonical term order."""
    return TrotterPlan(tuple(range(len(hamiltonian))), steps, phi)


def plaquette_plan(
    layout: PlaquetteLayout, coupling: float, steps: int, phi: float
) -> tuple[PauliSum, TrotterPlan]:
    """Hamiltonian plus the plan that walks its monomials in listing order
    (all-position term, antisymmetric color triples, mixed terms)."""
    hamiltonian = plaquette_hamiltonian(layout, coupling)
    index_of = {term.key(): i for i, term in enumerate(hamiltonian.terms)}
    order = tuple(index_of[m.key()] for m in plaquette_monomials(layout, coupling))
    return hamiltonian, TrotterPlan(order, steps, phi)


def trotter_evolve(
    hamiltonian: PauliSum, plan: TrotterPlan, state: np.ndarray, coupling: float = 1.0
) -> np.ndarray:
    """Sequential monomial exponentials in plan order, repeated plan.steps times.

    Each factor is computed in closed form: exp(-i c P dt) = cos(c dt) - i sin(c dt) P
    for a unit-coefficient string P with real weight c.
    """
    n = _n_qubits_of(state)
    if n > EVOLVE_QUBIT_LIMIT:
        raise GuardError(f"Trotter evolution limited to {EVOLVE_QUBIT_LIMIT} qubits")
    if not hamiltonian.is_hermitian():
        raise GuardError("Hamiltonian must be Hermitian")
    terms = hamiltonian.terms
    if len(plan.order) != len(terms):
        raise ValueError("plan order does not cover the Hamiltonian's terms")
    dt = plan.phi / coupling / plan.steps
    factors = []
    for k in plan.order:
        term = terms[k]
        angle = term.coefficient.real * dt
        factors.append((np.cos(angle), np.sin(angle), dense(term.bare(), n)))
    out = state
    for _ in range(plan.steps):
        for cos_a, sin_a, matrix in factors:
            out = cos_a * out - 1j * sin_a * (matrix @ out)
    return _check_norm(out)


def overlap(state: np.ndarray, other: np.ndarray) -> float:
    """Squared modulus of the inner product."""
    if state.shape != other.shape:
        raise ValueError("states must have equal dimension")
    return float(abs(np.vdot(state, other)) ** 2)


def relative_deviation(op: PauliSum, reference: np.ndarray, other: np.ndarray) -> float:
    """(<op>_ref - <op>_other) / <op>_ref, guarded against a vanishing reference."""
    ref_value = expectation(op, reference)
    if abs(ref_value) < DEVIATION_GUARD:
        raise GuardError("reference expectation value too small for a relative deviation")
    return (ref_value - expectation(op, other)) / ref_value


def gauge_deviation(psi_ideal: np.ndarray, psi_digital: np.ndarray, layout: PlaquetteLayout) -> float:
    """Relative deviation of the summed squared gauge generators between the
    ideal and the digitized state."""
    return relative_deviation(total_gauge_casimir(layout), psi_ideal, psi_digital)


@dataclass(frozen=True)
class SweepRow:
    steps: int
    phi: float
    deviation: float
    overlap_initial: float
    fidelity: float
    gauge_ideal: float
    gauge_digital: float


def sweep(
    layout: PlaquetteLayout,
    coupling: float,
    steps_list: list[int],
    phis: list[float],
    start_sector: float,
    backend: str = "trotter",
) -> list[SweepRow]:
    """Deterministic grid evaluation: rows in (steps outer, phi inner) order.

    The initial state is the canonical representative of the requested gauge
    sector; the digital state uses the listing-order Trotter plan, or equals
    the ideal state for the exact backend.
    """
    if backend not in ("trotter", "exact"):
        raise ValueError(f"unknown backend {backend!r}")
    if not steps_list or not phis:
        return []
    n = layout.n_qubits
    table = gauge_sectors(layout)
    psi0 = canonical_sector_state(table, start_sector)
    hamiltonian = plaquette_hamiltonian(layout, coupling)
    casimir = dense(total_gauge_casimir(layout), n)
    eigvals, eigvecs = np.linalg.eigh(dense(hamiltonian, n))
    psi0_eig = eigvecs.conj().T @ psi0

    rows = []
    for steps in steps_list:
        for phi in phis:
            t = phi / coupling
            psi_ideal = (eigvecs * np.exp(-1j * eigvals * t)) @ psi0_eig
            if backend == "exact":
                psi_digital = psi_ideal
            else:
                _, plan = plaquette_plan(layout, coupling, steps, phi)
                psi_digital = trotter_evolve(hamiltonian, plan, psi0, coupling)
            gauge_i = float((psi_ideal.conj() @ casimir @ psi_ideal).real)
            gauge_d = float((psi_digital.conj() @ casimir @ psi_digital).real)
            if abs(gauge_i) < DEVIATION_GUARD:
                raise GuardError("ideal gauge expectation vanished")
            rows.append(
                SweepRow(
                    steps=steps,
                    phi=float(phi),
                    deviation=(gauge_i - gauge_d) / gauge_i,
                    overlap_initial=overlap(psi_ideal, psi0),
                    fidelity=overlap(psi_ideal, psi_digital),
                    gauge_ideal=gauge_i,
                    gauge_digital=gauge_d,
                )
            )
    return rows


SWEEP_COLUMNS = ("N", "phi", "E", "overlap_I0", "fidelity_ID")


def _fmt(value: float) -> str:
    return repr(float(value))


def sweep_csv(rows: list[SweepRow]) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for r in rows:
        lines.append(
            f"{r.steps},{_fmt(r.phi)},{_fmt(r.deviation)},{_fmt(r.overlap_initial)},{_fmt(r.fidelity)}"
        )
    return "\n".join(lines) + "\n"


def sweep_json(rows: list[SweepRow]) -> str:
    payload = {
        "schema": 1,
        "columns": list(SWEEP_COLUMNS),
        "rows": [
            [r.steps, r.phi, r.deviation, r.overlap_initial, r.fidelity] for r in rows
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
