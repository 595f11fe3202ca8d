"""SU(2) quantum link operators in the two-qubit-per-link encoding.

Each link carries a position qubit and a spin qubit.  The position qubit says
on which end of the link the single excitation sits (Z = +1 means the head /
right end), the spin qubit carries its color.  From these we build the link
operators, left/right generators, the per-vertex gauge generators, the
triangular-plaquette Hamiltonian, and the decomposition of the register into
gauge sectors (common eigenspaces of the summed squared generators).

All construction functions are pure and return immutable values.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import pauli
from .errors import GuardError, LayoutError
from .linalg import expi_hermitian
from .pauli import PauliString, PauliSum, dense

SECTOR_CLUSTER_TOL = 1e-8
SECTOR_DIM_LIMIT = 12

_AXES = {1: "X", 2: "Y", 3: "Z"}


@dataclass(frozen=True)
class Link:
    link_id: str
    frm: int
    to: int
    pos_qubit: int
    spin_qubit: int


@dataclass(frozen=True)
class PlaquetteLayout:
    """Oriented links with qubit assignments plus the plaquettes they close.

    The tail (``frm``) end of a link is its left end, the head (``to``) its
    right end.  Plaquettes list link ids in circulation order: each link's head
    must be the next link's tail.
    """

    links: tuple[Link, ...]
    plaquettes: tuple[tuple[str, str, str], ...]
    vertices: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        qubits = [q for l in self.links for q in (l.pos_qubit, l.spin_qubit)]
        if len(set(qubits)) != len(qubits):
            raise LayoutError("qubit indices must be pairwise distinct")
        if any(q < 0 for q in qubits):
            raise LayoutError("qubit indices must be non-negative")
        ids = [l.link_id for l in self.links]
        if len(set(ids)) != len(ids):
            raise LayoutError("link ids must be unique")
        by_id = {l.link_id: l for l in self.links}
        for plaq in self.plaquettes:
            if len(plaq) != 3:
                raise LayoutError("plaquettes must contain exactly three links")
            try:
                loop = [by_id[i] for i in plaq]
            except KeyError as err:
                raise LayoutError(f"plaquette references unknown link {err.args[0]!r}") from None
            for a, b in zip(loop, loop[1:] + loop[:1]):
                if a.to != b.frm:
                    raise LayoutError(f"plaquette {plaq} is not a closed oriented loop")
        vertices = sorted({v for l in self.links for v in (l.frm, l.to)})
        object.__setattr__(self, "vertices", tuple(vertices))

    def link(self, link_id: str) -> Link:
        for l in self.links:
            if l.link_id == link_id:
                return l
        raise LayoutError(f"unknown link {link_id!r}")

    @property
    def n_qubits(self) -> int:
        return 1 + max(q for l in self.links for q in (l.pos_qubit, l.spin_qubit))


def triangle_layout() -> PlaquetteLayout:
    """The single triangle 1 -> 2 -> 3 -> 1 with qubits (pos, spin) = (0,1), (2,3), (4,5)."""
    return PlaquetteLayout(
        links=(
            Link("12", 1, 2, 0, 1),
            Link("23", 2, 3, 2, 3),
            Link("31", 3, 1, 4, 5),
        ),
        plaquettes=(("12", "23", "31"),),
    )


def gamma(layout: PlaquetteLayout, link_id: str, index: int) -> PauliString:
    """Two-qubit link letters: index 0 is X on the position qubit, index a in
    {1,2,3} is Y(position) tensor sigma^a(spin)."""
    link = layout.link(link_id)
    if index == 0:
        return PauliString(1.0, {link.pos_qubit: "X"})
    if index in _AXES:
        return PauliString(1.0, {link.pos_qubit: "Y", link.spin_qubit: _AXES[index]})
    raise ValueError(f"gamma index must be 0..3, got {index}")


def left_right_generators(layout: PlaquetteLayout, link_id: str) -> tuple[tuple[PauliSum, ...], tuple[PauliSum, ...]]:
    """(L, R) color generators of a link, each a triple indexed by a-1.

    R^a projects on the head-occupied position state times sigma^a/2 on spin,
    L^a uses the tail projector: R^a = (1+Z_pos)/2 * sigma^a_spin/2 and
    L^a = (1-Z_pos)/2 * sigma^a_spin/2.
    """
    link = layout.link(link_id)
    left, right = [], []
    for a in (1, 2, 3):
        spin = PauliString(0.25, {link.spin_qubit: _AXES[a]})
        spin_pos = PauliString(0.25, {link.pos_qubit: "Z", link.spin_qubit: _AXES[a]})
        right.append(PauliSum([spin, spin_pos]))
        left.append(PauliSum([spin, -spin_pos]))
    return tuple(left), tuple(right)


def link_operator(layout: PlaquetteLayout, link_id: str) -> list[list[PauliSum]]:
    """The 2x2 color matrix of qubit operators transporting color along a link:
    U = (Gamma0 tau0 + i sum_a Gamma_a tau_a) / 2 with tau acting on the color
    indices."""
    g = [gamma(layout, link_id, k) for k in range(4)]
    tau = [pauli.letter_matrix(l) for l in ("I", "X", "Y", "Z")]
    out = []
    for alpha in range(2):
        row = []
        for beta in range(2):
            coeffs = [0.5 * tau[0][alpha, beta]] + [0.5j * tau[a][alpha, beta] for a in (1, 2, 3)]
            row.append(PauliSum([c * g[k] for k, c in enumerate(coeffs) if c != 0]))
        out.append(row)
    return out


def gauge_generator(layout: PlaquetteLayout, vertex: int, a: int) -> PauliSum:
    """Sum of R^a over links terminating at the vertex and L^a over links
    emanating from it."""
    if vertex not in layout.vertices:
        raise LayoutError(f"unknown vertex {vertex!r}")
    if a not in _AXES:
        raise ValueError(f"color index must be 1..3, got {a}")
    total = PauliSum()
    for link in layout.links:
        left, right = left_right_generators(layout, link.link_id)
        if link.to == vertex:
            total = total + right[a - 1]
        if link.frm == vertex:
            total = total + left[a - 1]
    return total


def total_gauge_casimir(layout: PlaquetteLayout) -> PauliSum:
    """Sum over vertices and colors of the squared gauge generators."""
    total = PauliSum()
    for vertex in layout.vertices:
        for a in (1, 2, 3):
            g = gauge_generator(layout, vertex, a)
            total = total + g * g
    return total


def plaquette_monomials(layout: PlaquetteLayout, coupling: float) -> list[PauliString]:
    """The interaction monomials in listing order, one plaquette after another.

    Per plaquette: the all-position X term first, the six antisymmetric
    triple-color terms in lexicographic (a, b, c) order, then the nine mixed
    terms grouped by color.  Coefficients are -J/2 times the implied signs.
    """
    epsilon = {
        (1, 2, 3): 1, (1, 3, 2): -1, (2, 1, 3): -1,
        (2, 3, 1): 1, (3, 1, 2): 1, (3, 2, 1): -1,
    }
    out: list[PauliString] = []
    for plaq in layout.plaquettes:
        g = [[gamma(layout, link_id, k) for k in range(4)] for link_id in plaq]
        half = -coupling / 2.0
        out.append(half * (g[0][0] * g[1][0] * g[2][0]))
        for (a, b, c) in sorted(epsilon):
            out.append((half * epsilon[(a, b, c)]) * (g[0][a] * g[1][b] * g[2][c]))
        for a in (1, 2, 3):
            out.append((-half) * (g[0][0] * g[1][a] * g[2][a]))
            out.append((-half) * (g[0][a] * g[1][0] * g[2][a]))
            out.append((-half) * (g[0][a] * g[1][a] * g[2][0]))
    return out


def plaquette_hamiltonian(layout: PlaquetteLayout, coupling: float) -> PauliSum:
    """Magnetic Hamiltonian summed over the layout's plaquettes: 16 monomials
    per plaquette with coefficients of magnitude J/2."""
    if not layout.plaquettes:
        raise LayoutError("layout contains no plaquettes")
    return PauliSum(plaquette_monomials(layout, coupling))


@dataclass(frozen=True)
class GaugeSector:
    eigenvalue: float
    degeneracy: int
    basis: np.ndarray  # shape (2^n, degeneracy), orthonormal columns


@dataclass(frozen=True)
class GaugeSectorTable:
    n_qubits: int
    sectors: tuple[GaugeSector, ...]

    def eigenvalues(self) -> list[float]:
        return [s.eigenvalue for s in self.sectors]

    def sector(self, eigenvalue: float, tol: float = 1e-6) -> GaugeSector:
        for s in self.sectors:
            if abs(s.eigenvalue - eigenvalue) <= tol:
                return s
        raise KeyError(f"no sector with eigenvalue {eigenvalue}")


def gauge_sectors(layout: PlaquetteLayout) -> GaugeSectorTable:
    """Full spectral decomposition of the summed squared gauge generators.

    Eigenvalues are clustered with tolerance 1e-8 (the spectral gaps are order
    one); each sector keeps an orthonormal eigenbasis.
    """
    n = layout.n_qubits
    if n > SECTOR_DIM_LIMIT:
        raise GuardError(f"sector analysis limited to {SECTOR_DIM_LIMIT} qubits, got {n}")
    casimir = dense(total_gauge_casimir(layout), n)
    eigvals, eigvecs = np.linalg.eigh(casimir)
    sectors = []
    start = 0
    for i in range(1, len(eigvals) + 1):
        if i == len(eigvals) or eigvals[i] - eigvals[start] > SECTOR_CLUSTER_TOL:
            value = float(np.mean(eigvals[start:i]))
            sectors.append(GaugeSector(value, i - start, eigvecs[:, start:i].copy()))
            start = i
    return GaugeSectorTable(n, tuple(sectors))


def canonical_sector_state(table: GaugeSectorTable, eigenvalue: float) -> np.ndarray:
    """Deterministic representative of a sector: the normalized projection of
    the lowest-index computational basis state with nonzero weight in it."""
    sector = table.sector(eigenvalue)
    basis = sector.basis
    for index in range(2**table.n_qubits):
        component = basis @ basis[index, :].conj()
        norm = np.linalg.norm(component)
        if norm > 1e-8:
            return component / norm
    raise RuntimeError("sector basis is empty")  # unreachable for a valid table


def gauge_covariance_check(
    layout: PlaquetteLayout,
    link_id: str,
    angles: dict[int, tuple[float, float, float]],
) -> float:
    """Max deviation between conjugating a link operator by the lattice gauge
    transformation and rotating its color indices locally at the two ends.

    ``angles`` assigns three rotation angles to every vertex.
    """
    missing = set(layout.vertices) - set(angles)
    if missing:
        raise ValueError(f"angles missing for vertices {sorted(missing)}")
    n = layout.n_qubits
    generator = PauliSum()
    for vertex in layout.vertices:
        for a in (1, 2, 3):
            generator = generator + angles[vertex][a - 1] * gauge_generator(layout, vertex, a)
    transform = expi_hermitian(dense(generator, n), scale=-1.0)

    link = layout.link(link_id)
    sigma = [pauli.letter_matrix(l) for l in ("X", "Y", "Z")]
    half_from = sum(angles[link.frm][a] * sigma[a] for a in range(3)) / 2.0
    half_to = sum(angles[link.to][a] * sigma[a] for a in range(3)) / 2.0
    rot_from = expi_hermitian(half_from)
    rot_to = expi_hermitian(half_to, scale=-1.0)

    u_dense = [[dense(op, n) for op in row] for row in link_operator(layout, link_id)]
    worst = 0.0
    for alpha in range(2):
        for beta in range(2):
            lhs = transform @ u_dense[alpha][beta] @ transform.conj().T
            rhs = np.zeros_like(lhs)
            for gam in range(2):
                for delta in range(2):
                    rhs += rot_from[alpha, gam] * rot_to[delta, beta] * u_dense[gam][delta]
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


# ---------------------------------------------------------------------------
# plain-text layout files

def format_layout(layout: PlaquetteLayout) -> str:
    lines = [f"vertex {v}" for v in layout.vertices]
    lines += [
        f"link {l.link_id} {l.frm} {l.to} {l.pos_qubit} {l.spin_qubit}"
        for l in layout.links
    ]
    lines += ["plaquette " + " ".join(p) for p in layout.plaquettes]
    return "\n".join(lines) + "\n"


def parse_layout(text: str) -> PlaquetteLayout:
    links: list[Link] = []
    plaquettes: list[tuple[str, str, str]] = []
    declared: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "vertex":
                declared.add(int(fields[1]))
            elif kind == "link":
                if len(fields) != 6:
                    raise ValueError("expected: link <id> <from> <to> <pos-qubit> <spin-qubit>")
                links.append(Link(fields[1], int(fields[2]), int(fields[3]), int(fields[4]), int(fields[5])))
            elif kind == "plaquette":
                if len(fields) != 4:
                    raise ValueError("expected: plaquette <link> <link> <link>")
                plaquettes.append((fields[1], fields[2], fields[3]))
            else:
                raise ValueError(f"unknown directive {kind!r}")
        except (ValueError, IndexError) as err:
            raise LayoutError(f"line {lineno}: {err}") from None
    if not links:
        raise LayoutError("layout declares no links")
    layout = PlaquetteLayout(tuple(links), tuple(plaquettes))
    undeclared = set(layout.vertices) - declared if declared else set()
    if undeclared:
        raise LayoutError(f"links reference undeclared vertices {sorted(undeclared)}")
    return layout
