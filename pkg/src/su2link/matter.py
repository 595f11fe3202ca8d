"""Matter fields coupled to links on an open chain of hard-core modes.

A chain of ``n_sites`` matter sites carries two color modes per site and four
per link (two colors at each link end).  A strong diagonal penalty enforces a
fixed total occupation per link; a color-symmetric hopping couples matter and
link ends.  The second-order effective interaction inside the penalty-free
subspace is computed brute force from the projector formula and compared to
the closed-form hopping-plus-density expression it is expected to reduce to.

Hard-core modes commute across different modes (no exchange signs); each mode
is realized as one qubit so the full operator algebra reuses the Pauli layer.
The two modes of one color cell (a matter site, or one end of a link) realize
a color doublet; the qubit representation of the color algebra is faithful
only while a cell holds at most one excitation, so the model space keeps that
restriction and the effective-operator resolvent never leaves it.  The
validation works inside a fixed total-excitation sector; effective blocks are
compared modulo an additive constant, in units of the hopping strength.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import GuardError
from .pauli import PauliString, PauliSum, dense

MODE_LIMIT = 14
DEGENERACY_GUARD = 1e-9
REACH_TOL = 1e-12

_SIGMA = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}
_SIGMA_Y = _SIGMA[2]

UP, DOWN = 0, 1
LEFT, RIGHT = 0, 1


@dataclass(frozen=True)
class ChainConfig:
    """Open chain: ``n_sites`` matter sites joined by ``n_sites - 1`` links.

    ``penalty`` (the link-occupation enforcement scale) should dominate
    ``hopping`` for the perturbative reduction to be meaningful; ``ratio``
    records hopping / penalty.  ``matter_number`` fixes the total-excitation
    sector used for validation: total = matter_number + n0 * n_links.
    """

    n_sites: int = 2
    omega: float = 1.0
    penalty: float = 1000.0
    hopping: float = 1.0
    n0: int = 1
    matter_number: int = 1

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("a chain needs at least two sites")
        if self.penalty <= 0:
            raise ValueError("penalty scale must be positive")
        if self.n_modes > MODE_LIMIT:
            raise GuardError(f"chain needs {self.n_modes} modes, limit is {MODE_LIMIT}")
        if not 0 <= self.matter_number <= 2 * self.n_sites:
            raise ValueError("matter_number out of range")

    @property
    def n_links(self) -> int:
        return self.n_sites - 1

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites + 4 * self.n_links

    @property
    def ratio(self) -> float:
        return self.hopping / self.penalty

    @property
    def total_excitations(self) -> int:
        return self.matter_number + self.n0 * self.n_links

    # mode indexing: per spatial cell of six modes, matter first
    def b_mode(self, site: int, spin: int) -> int:
        return 6 * site + spin

    def c_mode(self, link: int, side: int, spin: int) -> int:
        return 6 * link + 2 + 2 * side + spin


@dataclass(frozen=True)
class FockBasis:
    """Occupation basis of all hard-core modes; mode k is bit k of the index."""

    n_modes: int

    def __post_init__(self):
        if self.n_modes > MODE_LIMIT:
            raise GuardError(f"Fock basis limited to {MODE_LIMIT} modes")

    @property
    def dimension(self) -> int:
        return 2**self.n_modes

    def occupation(self, index: int, mode: int) -> int:
        return (index >> mode) & 1

    def total(self, index: int) -> int:
        return bin(index).count("1")

    def indices_where(self, predicate) -> np.ndarray:
        return np.array([i for i in range(self.dimension) if predicate(i)], dtype=int)


def lowering(mode: int) -> PauliSum:
    return PauliSum([PauliString(0.5, {mode: "X"}), PauliString(0.5j, {mode: "Y"})])


def raising(mode: int) -> PauliSum:
    return PauliSum([PauliString(0.5, {mode: "X"}), PauliString(-0.5j, {mode: "Y"})])


def number(mode: int) -> PauliSum:
    return PauliSum([PauliString(0.5), PauliString(-0.5, {mode: "Z"})])


def link_charge(cfg: ChainConfig, link: int) -> PauliSum:
    total = PauliSum()
    for side in (LEFT, RIGHT):
        for spin in (UP, DOWN):
            total = total + number(cfg.c_mode(link, side, spin))
    return total


def total_number(cfg: ChainConfig) -> PauliSum:
    total = PauliSum()
    for mode in range(cfg.n_modes):
        total = total + number(mode)
    return total


def h0_operator(cfg: ChainConfig) -> PauliSum:
    """Mode frequencies plus the quadratic link-occupation penalty (diagonal)."""
    identity = PauliSum([PauliString(1.0)])
    total = cfg.omega * total_number(cfg)
    for link in range(cfg.n_links):
        excess = link_charge(cfg, link) - cfg.n0 * identity
        total = total + cfg.penalty * (excess * excess)
    return total


def build_h0(cfg: ChainConfig) -> np.ndarray:
    return dense(h0_operator(cfg), cfg.n_modes)


def h0_diagonal(cfg: ChainConfig) -> np.ndarray:
    return np.real(np.diag(build_h0(cfg)))


def v_operator(cfg: ChainConfig) -> PauliSum:
    """Color-symmetric matter-link hopping, explicitly Hermitian."""
    half = PauliSum()
    for site in range(cfg.n_sites):
        for alpha in (UP, DOWN):
            b_dag = raising(cfg.b_mode(site, alpha))
            b_low = lowering(cfg.b_mode(site, alpha))
            if site < cfg.n_links:  # link leaving this site
                link = site
                half = half + b_dag * lowering(cfg.c_mode(link, LEFT, alpha))
                for mu in (UP, DOWN):
                    coeff = _SIGMA_Y[alpha, mu]
                    if coeff != 0:
                        half = half + coeff * (b_dag * raising(cfg.c_mode(link, LEFT, mu)))
            if site > 0:  # link arriving at this site
                link = site - 1
                half = half + raising(cfg.c_mode(link, RIGHT, alpha)) * b_low
                for mu in (UP, DOWN):
                    coeff = _SIGMA_Y[mu, alpha]
                    if coeff != 0:
                        half = half + coeff * (lowering(cfg.c_mode(link, RIGHT, mu)) * b_low)
    total = cfg.hopping * half
    return total + total.adjoint()


def build_v(cfg: ChainConfig) -> np.ndarray:
    return dense(v_operator(cfg), cfg.n_modes)


def su2_generator(cfg: ChainConfig, site: int, a: int) -> PauliSum:
    """Color generator at a site: link right-end part (incoming link), the
    matter spin, and link left-end part (outgoing link)."""
    total = PauliSum()
    pieces = []
    if site > 0:
        pieces.append([cfg.c_mode(site - 1, RIGHT, s) for s in (UP, DOWN)])
    pieces.append([cfg.b_mode(site, s) for s in (UP, DOWN)])
    if site < cfg.n_links:
        pieces.append([cfg.c_mode(site, LEFT, s) for s in (UP, DOWN)])
    for modes in pieces:
        for alpha in (UP, DOWN):
            for beta in (UP, DOWN):
                coeff = _SIGMA[a][alpha, beta] / 2.0
                if coeff != 0:
                    total = total + coeff * (raising(modes[alpha]) * lowering(modes[beta]))
    return total


def color_cells(cfg: ChainConfig) -> list[tuple[int, int]]:
    """Mode pairs forming one color doublet each: every matter site and every
    link end."""
    cells = [(cfg.b_mode(site, UP), cfg.b_mode(site, DOWN)) for site in range(cfg.n_sites)]
    for link in range(cfg.n_links):
        for side in (LEFT, RIGHT):
            cells.append((cfg.c_mode(link, side, UP), cfg.c_mode(link, side, DOWN)))
    return cells


def faithful_indices(cfg: ChainConfig, basis: FockBasis) -> np.ndarray:
    """Model space: occupation states with at most one excitation per color
    cell (where the qubit realization of the color algebra is faithful)."""
    cells = color_cells(cfg)

    def good(index: int) -> bool:
        return all(
            basis.occupation(index, a) + basis.occupation(index, b) <= 1 for a, b in cells
        )

    return basis.indices_where(good)


def sector_indices(cfg: ChainConfig, basis: FockBasis) -> np.ndarray:
    """Model-space indices of the fixed total-excitation sector."""
    faithful = set(faithful_indices(cfg, basis).tolist())
    return basis.indices_where(
        lambda i: i in faithful and basis.total(i) == cfg.total_excitations
    )


def penalty_free_indices(cfg: ChainConfig, basis: FockBasis) -> np.ndarray:
    """Sector states with exactly n0 excitations on every link."""
    charge = [
        [cfg.c_mode(link, side, spin) for side in (LEFT, RIGHT) for spin in (UP, DOWN)]
        for link in range(cfg.n_links)
    ]
    sector = set(sector_indices(cfg, basis).tolist())

    def good(index: int) -> bool:
        if index not in sector:
            return False
        return all(sum(basis.occupation(index, m) for m in modes) == cfg.n0 for modes in charge)

    return basis.indices_where(good)


@dataclass(frozen=True)
class EffectiveBlock:
    """Dense effective operator on the penalty-free subspace.

    ``basis_indices`` are the Fock indices spanning the block, in ascending
    order; ``degenerate_unreachable`` counts complement states inside the
    degeneracy guard that carry no coupling (they cannot contribute).
    """

    matrix: np.ndarray
    basis_indices: np.ndarray
    degenerate_unreachable: int = 0


def effective_hamiltonian(cfg: ChainConfig, energy_shift: float = 0.0) -> EffectiveBlock:
    """Second-order effective operator from the projector formula.

    With P the penalty-free subspace of the chosen sector at unperturbed
    energy E0 and Q its model-space complement, the block is
    P V Q (E0 - H0)^(-1) Q V P, symmetrized to kill roundoff.  Raises if the
    hopping couples P to a complement state within 1e-9 * penalty of E0.
    ``energy_shift`` adds a constant to the bare spectrum; the block cannot
    depend on it (E0 shifts along) and the knob exists for consistency tests.
    """
    basis = FockBasis(cfg.n_modes)
    p_idx = penalty_free_indices(cfg, basis)
    if len(p_idx) == 0:
        raise GuardError("penalty-free subspace is empty in this sector")
    diag = h0_diagonal(cfg) + energy_shift
    e0_values = diag[p_idx]
    if np.max(e0_values) - np.min(e0_values) > 1e-9:
        raise GuardError("penalty-free subspace is not degenerate")
    e0 = float(e0_values[0])

    in_p = set(p_idx.tolist())
    q_idx = np.array([i for i in faithful_indices(cfg, basis) if i not in in_p], dtype=int)

    v = build_v(cfg)
    couplings = v[np.ix_(q_idx, p_idx)]
    gaps = e0 - diag[q_idx]
    near = np.abs(gaps) < DEGENERACY_GUARD * cfg.penalty
    reachable = np.max(np.abs(couplings), axis=1) > REACH_TOL
    if np.any(near & reachable):
        raise GuardError("hopping couples the penalty-free subspace to a nearly degenerate state")
    degenerate_unreachable = int(np.count_nonzero(near & ~reachable))

    inverse = np.where(near, 0.0, 1.0 / np.where(near, 1.0, gaps))
    block = couplings.conj().T @ (inverse[:, None] * couplings)
    block = (block + block.conj().T) / 2.0
    return EffectiveBlock(block, p_idx, degenerate_unreachable)


def closed_form_hopping(cfg: ChainConfig) -> PauliSum:
    """The expected effective hopping: matter moves across a link while the
    link excitation swaps ends, in both color channels."""
    total = PauliSum()
    for link in range(cfg.n_links):
        site, nxt = link, link + 1
        for alpha in (UP, DOWN):
            for beta in (UP, DOWN):
                b_pair = raising(cfg.b_mode(site, alpha)) * lowering(cfg.b_mode(nxt, beta))
                direct = lowering(cfg.c_mode(link, LEFT, alpha)) * raising(cfg.c_mode(link, RIGHT, beta))
                total = total + b_pair * direct
                for mu in (UP, DOWN):
                    for nu in (UP, DOWN):
                        coeff = _SIGMA_Y[alpha, mu] * _SIGMA_Y[nu, beta]
                        if coeff != 0:
                            conj = raising(cfg.c_mode(link, LEFT, mu)) * lowering(cfg.c_mode(link, RIGHT, nu))
                            total = total + coeff * (b_pair * conj)
    scaled = (-2.0 * cfg.hopping**2 / cfg.penalty) * total
    return scaled + scaled.adjoint()


def closed_form_density(cfg: ChainConfig) -> PauliSum:
    """The density-density companion term: matter density times the density of
    the adjacent link ends."""
    total = PauliSum()
    for site in range(cfg.n_sites):
        matter = PauliSum()
        for spin in (UP, DOWN):
            matter = matter + number(cfg.b_mode(site, spin))
        ends = PauliSum()
        if site > 0:
            for spin in (UP, DOWN):
                ends = ends + number(cfg.c_mode(site - 1, RIGHT, spin))
        if site < cfg.n_links:
            for spin in (UP, DOWN):
                ends = ends + number(cfg.c_mode(site, LEFT, spin))
        total = total + matter * ends
    return (-2.0 * cfg.hopping**2 / cfg.penalty) * total


def closed_form_block(cfg: ChainConfig) -> EffectiveBlock:
    basis = FockBasis(cfg.n_modes)
    p_idx = penalty_free_indices(cfg, basis)
    full = dense(closed_form_hopping(cfg) + closed_form_density(cfg), cfg.n_modes)
    return EffectiveBlock(full[np.ix_(p_idx, p_idx)], p_idx)


def block_deviation(brute: EffectiveBlock, closed: EffectiveBlock, hopping: float) -> float:
    """Operator-norm difference modulo an additive constant, in units of the
    hopping strength (effective blocks are defined up to constant shifts)."""
    if brute.basis_indices.shape != closed.basis_indices.shape or np.any(
        brute.basis_indices != closed.basis_indices
    ):
        raise ValueError("blocks live on different subspaces")
    delta = brute.matrix - closed.matrix
    eigvals = np.linalg.eigvalsh((delta + delta.conj().T) / 2.0)
    centered = (eigvals[-1] + eigvals[0]) / 2.0
    return float(max(abs(eigvals[-1] - centered), abs(eigvals[0] - centered))) / abs(hopping)


@dataclass(frozen=True)
class ComparisonRow:
    ratio: float
    deviation: float
    density_norm: float


def compare_effective(cfg: ChainConfig, ratios: list[float]) -> list[ComparisonRow]:
    """Deviation sweep: the penalty scale runs over hopping / ratio while the
    mode frequency and hopping stay fixed."""
    rows = []
    for ratio in ratios:
        scaled = replace(cfg, penalty=cfg.hopping / ratio)
        brute = effective_hamiltonian(scaled)
        closed = closed_form_block(scaled)
        basis = FockBasis(scaled.n_modes)
        p_idx = penalty_free_indices(scaled, basis)
        density = dense(closed_form_density(scaled), scaled.n_modes)[np.ix_(p_idx, p_idx)]
        rows.append(
            ComparisonRow(
                ratio=float(ratio),
                deviation=block_deviation(brute, closed, scaled.hopping),
                density_norm=float(np.linalg.norm(density, 2)),
            )
        )
    return rows


def comparison_csv(rows: list[ComparisonRow]) -> str:
    lines = ["ratio,deviation,density_norm"]
    for r in rows:
        lines.append(f"{r.ratio!r},{r.deviation!r},{r.density_norm!r}")
    return "\n".join(lines) + "\n"


def comparison_json(rows: list[ComparisonRow]) -> str:
    payload = {
        "schema": 1,
        "columns": ["ratio", "deviation", "density_norm"],
        "rows": [[r.ratio, r.deviation, r.density_norm] for r in rows],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
