from dataclasses import replace

import numpy as np
import pytest

from su2link import matter as mt
from su2link.errors import GuardError
from su2link.pauli import dense

RATIOS = [1e-1, 1e-2, 1e-3]


@pytest.fixture(scope="module")
def cfg():
    return mt.ChainConfig()


@pytest.fixture(scope="module")
def basis(cfg):
    return mt.FockBasis(cfg.n_modes)


def test_config_validation():
    with pytest.raises(ValueError):
        mt.ChainConfig(n_sites=1)
    with pytest.raises(ValueError):
        mt.ChainConfig(penalty=0.0)
    with pytest.raises(GuardError):
        mt.ChainConfig(n_sites=4)  # 20 modes, over the limit
    cfg = mt.ChainConfig()
    assert cfg.n_modes == 8
    assert cfg.total_excitations == 2
    assert cfg.ratio == pytest.approx(1e-3)


def test_mode_operators(basis):
    low = dense(mt.lowering(0), 1)
    assert np.allclose(low, [[0, 1], [0, 0]])
    assert np.allclose(dense(mt.raising(0), 1), low.conj().T)
    assert np.allclose(dense(mt.number(0), 1), np.diag([0, 1]))


def test_h0_is_diagonal_with_expected_values(cfg, basis):
    h0 = mt.build_h0(cfg)
    assert np.max(np.abs(h0 - np.diag(np.diag(h0)))) == 0
    diag = np.real(np.diag(h0))
    # empty chain: penalty n0^2 per link, no frequency part
    assert diag[0] == pytest.approx(cfg.penalty * cfg.n0**2 * cfg.n_links)
    # states with exactly one excitation on the link carry no penalty
    one_link = 1 << cfg.c_mode(0, mt.LEFT, mt.UP)
    assert diag[one_link] == pytest.approx(cfg.omega)
    assert np.min(diag) >= 0.0


def test_v_hermitian_and_moves_one_link_quantum(cfg, basis):
    v = mt.build_v(cfg)
    assert np.max(np.abs(v - v.conj().T)) < 1e-12
    charge = np.real(np.diag(dense(mt.link_charge(cfg, 0), cfg.n_modes)))
    rows, cols = np.nonzero(np.abs(v) > 1e-12)
    assert len(rows) > 0
    assert all(abs(charge[r] - charge[c]) == 1 for r, c in zip(rows, cols))


def test_h0_plus_v_color_invariance_on_model_space(cfg, basis):
    total = mt.build_h0(cfg) + mt.build_v(cfg)
    keep = mt.faithful_indices(cfg, basis)
    for site in range(cfg.n_sites):
        for a in (1, 2, 3):
            gen = dense(mt.su2_generator(cfg, site, a), cfg.n_modes)
            comm = total @ gen - gen @ total
            assert np.max(np.abs(comm[np.ix_(keep, keep)])) < 1e-10


def test_su2_generator_algebra(cfg):
    epsilon = {(1, 2, 3): 1, (1, 3, 2): -1, (2, 1, 3): -1, (2, 3, 1): 1, (3, 1, 2): 1, (3, 2, 1): -1}
    for site in range(cfg.n_sites):
        gens = [dense(mt.su2_generator(cfg, site, a), cfg.n_modes) for a in (1, 2, 3)]
        for (a, b, c), sign in epsilon.items():
            comm = gens[a - 1] @ gens[b - 1] - gens[b - 1] @ gens[a - 1]
            assert np.allclose(comm, 1j * sign * gens[c - 1], atol=1e-12)


def test_penalty_free_subspace(cfg, basis):
    p_idx = mt.penalty_free_indices(cfg, basis)
    # one matter particle on 4 slots times one link excitation on 4 slots
    assert len(p_idx) == 16
    diag = mt.h0_diagonal(cfg)
    assert np.allclose(diag[p_idx], cfg.omega * cfg.total_excitations)


def test_effective_hamiltonian_properties(cfg):
    block = mt.effective_hamiltonian(cfg)
    matrix = block.matrix
    assert np.max(np.abs(matrix - matrix.conj().T)) < 1e-12
    base_norm = np.linalg.norm(matrix, 2)
    assert base_norm > 0
    doubled = mt.effective_hamiltonian(replace(cfg, hopping=2.0))
    assert np.linalg.norm(doubled.matrix, 2) == pytest.approx(4 * base_norm, rel=1e-9)
    stiffer = mt.effective_hamiltonian(replace(cfg, penalty=2 * cfg.penalty))
    assert np.linalg.norm(stiffer.matrix, 2) == pytest.approx(base_norm / 2, rel=1e-4)


def test_effective_hamiltonian_zero_hopping(cfg):
    block = mt.effective_hamiltonian(replace(cfg, hopping=0.0))
    assert np.max(np.abs(block.matrix)) == 0.0


def test_effective_block_invariances(cfg):
    block = mt.effective_hamiltonian(cfg)
    p = block.basis_indices
    for site in range(cfg.n_sites):
        for a in (1, 2, 3):
            gen = dense(mt.su2_generator(cfg, site, a), cfg.n_modes)[np.ix_(p, p)]
            assert np.max(np.abs(block.matrix @ gen - gen @ block.matrix)) < 1e-9
    charge = dense(mt.link_charge(cfg, 0), cfg.n_modes)[np.ix_(p, p)]
    assert np.max(np.abs(block.matrix @ charge - charge @ block.matrix)) < 1e-9


def test_effective_invariant_under_energy_shift(cfg):
    plain = mt.effective_hamiltonian(cfg)
    shifted = mt.effective_hamiltonian(cfg, energy_shift=17.3)
    assert np.max(np.abs(plain.matrix - shifted.matrix)) < 1e-12


def test_density_term_block_diagonal_in_matter_occupation(cfg, basis):
    density = dense(mt.closed_form_density(cfg), cfg.n_modes)
    assert np.max(np.abs(density - np.diag(np.diag(density)))) == 0
    matter_modes = [cfg.b_mode(s, a) for s in range(cfg.n_sites) for a in (mt.UP, mt.DOWN)]
    for mode in matter_modes:
        n_op = dense(mt.number(mode), cfg.n_modes)
        assert np.max(np.abs(density @ n_op - n_op @ density)) < 1e-12


def test_closed_form_matches_brute_force_at_small_ratio(cfg):
    rows = mt.compare_effective(cfg, RATIOS)
    deviations = [r.deviation for r in rows]
    assert all(b < a for a, b in zip(deviations, deviations[1:]))
    for r in rows:
        assert r.deviation < 3 * r.ratio
    # leading behavior is linear in the ratio
    assert deviations[2] / deviations[1] == pytest.approx(0.1, rel=0.15)


def test_comparison_serialization(cfg):
    rows = mt.compare_effective(cfg, [1e-2])
    assert mt.comparison_csv(rows) == mt.comparison_csv(rows)
    assert mt.comparison_csv(rows).splitlines()[0] == "ratio,deviation,density_norm"
    assert mt.comparison_json(rows).startswith('{"columns"')


def test_degenerate_denominator_guard(cfg):
    # with penalty comparable to the mode splitting, pair processes land within
    # the guard band around E0
    with pytest.raises(GuardError):
        mt.effective_hamiltonian(replace(cfg, omega=500.0, penalty=1000.0))
