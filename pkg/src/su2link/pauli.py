"""Exact algebra of Pauli strings and their dense realizations.

A PauliString is a complex coefficient times a tensor product of single-qubit
Pauli letters; a PauliSum is a merged linear combination of strings.  All
coefficient arithmetic is double-precision complex, phases are tracked exactly
over {1, i, -1, -i}, and like terms merge with tolerance ``MERGE_TOL``.

Values are immutable after construction and safe to share between threads.
"""
from __future__ import annotations

import re
from typing import Iterable, Mapping

import numpy as np

from .errors import GuardError

MERGE_TOL = 1e-12
DENSE_QUBIT_LIMIT = 14

_LETTERS = ("I", "X", "Y", "Z")

# single-letter products: (a, b) -> (letter, phase) with sigma_a sigma_b = phase * sigma_letter
_PRODUCT = {
    ("X", "X"): ("I", 1), ("Y", "Y"): ("I", 1), ("Z", "Z"): ("I", 1),
    ("X", "Y"): ("Z", 1j), ("Y", "X"): ("Z", -1j),
    ("Y", "Z"): ("X", 1j), ("Z", "Y"): ("X", -1j),
    ("Z", "X"): ("Y", 1j), ("X", "Z"): ("Y", -1j),
}

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def letter_matrix(letter: str) -> np.ndarray:
    return _MATRICES[letter].copy()


class PauliString:
    """A signed, weighted tensor product of Pauli letters on indexed qubits.

    ``letters`` maps qubit index to one of X, Y, Z; identity entries are never
    stored, so the support is exactly ``letters.keys()``.  The coefficient must
    be nonzero.
    """

    __slots__ = ("coefficient", "letters", "_key")

    def __init__(self, coefficient: complex, letters: Mapping[int, str] | Iterable[tuple[int, str]] = ()):
        coefficient = complex(coefficient)
        if coefficient == 0:
            raise ValueError("zero-coefficient Pauli strings are not representable")
        items = dict(letters)
        for q, letter in items.items():
            if letter == "I":
                raise ValueError("identity letters must be omitted")
            if letter not in _LETTERS:
                raise ValueError(f"unknown Pauli letter {letter!r}")
            if q < 0:
                raise ValueError("qubit indices must be non-negative")
        self.coefficient = coefficient
        self.letters = items
        self._key = tuple(sorted(items.items()))

    def key(self) -> tuple[tuple[int, str], ...]:
        """Canonical letter pattern, sorted by qubit index."""
        return self._key

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self._key)

    @property
    def weight(self) -> int:
        return len(self._key)

    def with_coefficient(self, coefficient: complex) -> PauliString:
        return PauliString(coefficient, self.letters)

    def bare(self) -> PauliString:
        """The same letter pattern with unit coefficient."""
        return PauliString(1.0, self.letters)

    def adjoint(self) -> PauliString:
        # every letter is Hermitian, so only the coefficient conjugates
        return PauliString(self.coefficient.conjugate(), self.letters)

    def is_hermitian(self, tol: float = MERGE_TOL) -> bool:
        return abs(self.coefficient.imag) <= tol

    def __mul__(self, other):
        if isinstance(other, PauliString):
            return multiply(self, other)
        return PauliString(self.coefficient * other, self.letters)

    def __rmul__(self, other):
        return PauliString(self.coefficient * other, self.letters)

    def __neg__(self):
        return PauliString(-self.coefficient, self.letters)

    def __eq__(self, other):
        if not isinstance(other, PauliString):
            return NotImplemented
        return self._key == other._key and self.coefficient == other.coefficient

    def __hash__(self):
        return hash((self.coefficient, self._key))

    def __repr__(self):
        return f"PauliString({format_string(self)!r})"


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Operator product of two Pauli strings, phase tracked exactly."""
    coefficient = a.coefficient * b.coefficient
    letters = dict(a.letters)
    for q, letter in b.letters.items():
        if q not in letters:
            letters[q] = letter
            continue
        merged, phase = _PRODUCT[(letters[q], letter)]
        coefficient *= phase
        if merged == "I":
            del letters[q]
        else:
            letters[q] = merged
    return PauliString(coefficient, letters)


class PauliSum:
    """A merged linear combination of Pauli strings.

    Terms with the same letter pattern are combined and coefficients below
    ``MERGE_TOL`` are dropped, so equality is structural.  ``terms`` lists the
    strings in canonical order (lexicographic by support, then letters).
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[PauliString] = ()):
        merged: dict[tuple, complex] = {}
        for term in terms:
            key = term.key()
            merged[key] = merged.get(key, 0) + term.coefficient
        self._terms = {k: c for k, c in merged.items() if abs(c) > MERGE_TOL}

    @property
    def terms(self) -> list[PauliString]:
        return [PauliString(c, dict(k)) for k, c in sorted(self._terms.items())]

    @property
    def support(self) -> tuple[int, ...]:
        qubits = set()
        for key in self._terms:
            qubits.update(q for q, _ in key)
        return tuple(sorted(qubits))

    def coefficient_of(self, pattern: PauliString) -> complex:
        return self._terms.get(pattern.key(), 0j)

    def __len__(self):
        return len(self._terms)

    def __add__(self, other):
        return PauliSum(self.terms + _as_sum(other).terms)

    def __sub__(self, other):
        return PauliSum(self.terms + [-t for t in _as_sum(other).terms])

    def __mul__(self, other):
        if isinstance(other, (PauliSum, PauliString)):
            out = []
            for a in self.terms:
                for b in _as_sum(other).terms:
                    out.append(multiply(a, b))
            return PauliSum(out)
        if other == 0:
            return PauliSum()
        return PauliSum([t * other for t in self.terms])

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return PauliSum([-t for t in self.terms])

    def __eq__(self, other):
        if not isinstance(other, (PauliSum, PauliString)):
            return NotImplemented
        other = _as_sum(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(k, 0) - other._terms.get(k, 0)) <= MERGE_TOL for k in keys)

    def adjoint(self) -> PauliSum:
        return PauliSum([t.adjoint() for t in self.terms])

    def is_hermitian(self, tol: float = MERGE_TOL) -> bool:
        """Checked termwise: the sum must equal its own adjoint."""
        return all(abs(c - c.conjugate()) <= tol for c in self._terms.values())

    def __repr__(self):
        return f"PauliSum({format_sum(self)!r})"


def _as_sum(op) -> PauliSum:
    if isinstance(op, PauliSum):
        return op
    if isinstance(op, PauliString):
        return PauliSum([op])
    raise TypeError(f"expected PauliString or PauliSum, got {type(op).__name__}")


def commutator(a: PauliString, b: PauliString) -> PauliSum:
    """ab - ba as a PauliSum with zero or one term."""
    ab = multiply(a, b)
    ba = multiply(b, a)
    return PauliSum([ab, -ba])


def dense(op: PauliSum | PauliString, n_qubits: int) -> np.ndarray:
    """Dense matrix of ``op`` on ``n_qubits`` qubits.

    Bit ordering: qubit 0 is the least significant bit of the basis index, so
    basis state ``k`` assigns qubit q the bit ``(k >> q) & 1``.
    """
    if n_qubits > DENSE_QUBIT_LIMIT:
        raise GuardError(f"dense realization limited to {DENSE_QUBIT_LIMIT} qubits, got {n_qubits}")
    if n_qubits < 0:
        raise ValueError("n_qubits must be non-negative")
    terms = _as_sum(op).terms
    for term in terms:
        if term.support and max(term.support) >= n_qubits:
            raise ValueError(f"support {term.support} does not fit in {n_qubits} qubits")
    dim = 2**n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for term in terms:
        block = np.array([[1]], dtype=complex)
        for q in range(n_qubits - 1, -1, -1):
            block = np.kron(block, _MATRICES[term.letters.get(q, "I")])
        out += term.coefficient * block
    return out


def identity_sum() -> PauliSum:
    return PauliSum([PauliString(1.0)])


# ---------------------------------------------------------------------------
# textual notation, e.g. "(-0.5) X0 Y3 Z5"

_TOKEN = re.compile(r"([IXYZ])(\d+)?")


def format_string(term: PauliString) -> str:
    c = term.coefficient
    if c.imag == 0:
        coeff = repr(c.real)
    else:
        coeff = repr(c)[1:-1] if repr(c).startswith("(") else repr(c)
    body = " ".join(f"{letter}{q}" for q, letter in term.key()) or "I"
    return f"({coeff}) {body}"


def format_sum(op: PauliSum) -> str:
    return "\n".join(format_string(t) for t in op.terms)


def parse_string(text: str) -> PauliString:
    text = text.strip()
    match = re.fullmatch(r"\(([^()]+)\)\s*(.*)", text)
    if match is None:
        raise ValueError(f"cannot parse Pauli string {text!r}")
    coefficient = complex(match.group(1))
    letters: dict[int, str] = {}
    body = match.group(2).strip()
    if body and body != "I":
        for token in body.split():
            m = _TOKEN.fullmatch(token)
            if m is None or m.group(2) is None:
                raise ValueError(f"bad Pauli token {token!r}")
            letter, qubit = m.group(1), int(m.group(2))
            if qubit in letters:
                raise ValueError(f"qubit {qubit} listed twice")
            if letter != "I":
                letters[qubit] = letter
    return PauliString(coefficient, letters)


def parse_sum(text: str) -> PauliSum:
    lines = [line for line in (ln.strip() for ln in text.splitlines()) if line]
    return PauliSum([parse_string(line) for line in lines])
