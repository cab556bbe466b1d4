import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import DEFECT_START, ELL, SECOND_DEFECT_START, TOP_START
from defect_entropy.entities.chain import Boundary, ChainSpec, DefectKind, DefectSpec
from defect_entropy.entities.spectra import Filling, OccupationPolicy, Window
from defect_entropy.errors import WindowError, ZeroModeCountError
from defect_entropy.lattice.groundstate import (
    GroundState,
    correlation_matrix,
    localized_zero_modes,
    near_zero_indices,
)
from defect_entropy.lattice.entanglement import correlation_spectrum
from defect_entropy.lattice.model import build_hamiltonian, localization_length
from defect_entropy.numerics.linalg import eigh_symmetric


def test_default_chain_has_one_zero_mode_pair(chain, eig):
    assert len(near_zero_indices(eig, chain)) == 2


def test_particle_counts(chain, eig, below_half, hybridized):
    assert below_half.particle_count == chain.n_cells - 1
    assert hybridized(0.3).particle_count == chain.n_cells
    half = GroundState(chain, eig, OccupationPolicy(base_filling=Filling.HALF))
    assert half.particle_count == chain.n_cells


def test_zero_modes_are_localized(chain, eig):
    pair = localized_zero_modes(eig, chain)
    assert_allclose(pair.psi1 @ pair.psi1, 1.0)
    assert abs(pair.psi1 @ pair.psi2) < 1e-12
    # psi1 lives on the first defect, psi2 on the second
    assert np.sum(pair.psi1[50:200] ** 2) > 1 - 1e-10
    assert np.sum(pair.psi2[250:350] ** 2) > 1 - 1e-10
    assert abs(pair.psi1[99]) == pytest.approx(np.max(np.abs(pair.psi1)))


def test_hybridized_state(chain, eig):
    pair = localized_zero_modes(eig, chain)
    state = pair.hybridized(0.25)
    assert_allclose(state @ state, 1.0)
    assert np.sum(state[50:200] ** 2) == pytest.approx(0.75, abs=1e-10)
    assert np.iscomplexobj(pair.hybridized(0.25, phi=0.4))
    with pytest.raises(ValueError):
        pair.hybridized(1.5)


def test_correlation_matrix_is_a_contraction(below_half):
    corr = below_half.correlation_matrix(Window(start=TOP_START, length=ELL))
    eigenvalues = corr.eigenvalues()
    assert corr.entries.shape == (2 * ELL, 2 * ELL)
    assert eigenvalues.min() > -1e-12
    assert eigenvalues.max() < 1 + 1e-12
    assert corr.trace == pytest.approx(ELL, abs=1e-8)


@pytest.mark.parametrize("p", [0.1, 0.35, 0.8])
def test_zero_mode_enters_as_rank_one_update(below_half, hybridized, p):
    window = Window(start=DEFECT_START, length=ELL)
    ground = hybridized(p)
    psi1 = ground.zero_modes.psi1[window.site_slice()]
    difference = ground.correlation_matrix(window).entries - below_half.correlation_matrix(window).entries
    assert_allclose(difference, (1 - p) * np.outer(psi1, psi1), atol=1e-14)
    assert np.linalg.matrix_rank(difference, tol=1e-8) == 1


def test_second_defect_sees_complementary_weight(hybridized):
    window = Window(start=SECOND_DEFECT_START, length=ELL)
    ground = hybridized(0.3)
    psi2 = ground.zero_modes.psi2[window.site_slice()]
    assert psi2 @ psi2 == pytest.approx(1.0, abs=1e-4)
    # an empty defect holds half a particle less, the hybridized mode adds p
    assert np.trace(ground.correlation_matrix(window).entries) == pytest.approx(ELL - 0.5 + 0.3, abs=1e-4)


def test_window_with_both_defects(below_half):
    with pytest.raises(WindowError):
        below_half.correlation_matrix(Window(start=40, length=120))


def test_module_level_correlation_matrix(chain, eig, below_half):
    window = Window(start=TOP_START, length=ELL)
    assert_allclose(
        correlation_matrix(eig, OccupationPolicy(), window, chain).entries,
        below_half.correlation_matrix(window).entries,
    )


def test_missing_zero_modes():
    spec = ChainSpec(n_sites=40, delta=0.3)
    eig = eigh_symmetric(build_hamiltonian(spec))
    policy = OccupationPolicy(base_filling=Filling.HALF, zero_mode_p=0.5)
    with pytest.raises(ZeroModeCountError) as info:
        GroundState(spec, eig, policy)
    assert info.value.found == 0


def test_open_chain_edge_modes():
    spec = ChainSpec(n_sites=60, delta=0.4, boundary=Boundary.OPEN)
    eig = eigh_symmetric(build_hamiltonian(spec))
    pair = localized_zero_modes(eig, spec)
    assert np.sum(pair.psi1[:30] ** 2) > 1 - 1e-10
    assert np.sum(pair.psi2[30:] ** 2) > 1 - 1e-10


def test_policy_requires_half_filling_for_p():
    with pytest.raises(ValueError):
        OccupationPolicy(base_filling=Filling.BELOW_HALF, zero_mode_p=0.5)


def open_chain(n_sites=40, delta=0.3, defects=()):
    spec = ChainSpec(n_sites=n_sites, delta=delta, boundary=Boundary.OPEN, defects=defects)
    return spec, eigh_symmetric(build_hamiltonian(spec))


def cell_amplitudes(vector):
    return np.sqrt(vector[0::2] ** 2 + vector[1::2] ** 2)


@pytest.mark.parametrize("cells", [range(51, 66), range(35, 50)])
def test_zero_mode_envelope_decays_with_localization_length(chain, eig, cells):
    psi1 = localized_zero_modes(eig, chain).psi1
    amplitudes = cell_amplitudes(psi1)[np.array(cells) - 1]
    slope, _ = np.polyfit(np.abs(np.array(cells) - 50), np.log(amplitudes), 1)
    assert -slope == pytest.approx(1 / localization_length(chain.delta), rel=0.1)


def test_zero_mode_phase_leaves_window_spectrum_unchanged(chain, eig):
    window = Window(start=DEFECT_START, length=ELL)
    spectra = [
        correlation_spectrum(
            GroundState(
                chain, eig, OccupationPolicy(base_filling=Filling.HALF, zero_mode_p=0.3, zero_mode_phi=phi)
            ).correlation_matrix(window)
        ).lambdas
        for phi in (0.0, 1.1)
    ]
    assert_allclose(np.sort(spectra[0]), np.sort(spectra[1]), atol=1e-12)


def test_phase_with_both_modes_in_window_drops_imaginary_part(caplog):
    spec, eig = open_chain()
    policy = OccupationPolicy(base_filling=Filling.HALF, zero_mode_p=0.5, zero_mode_phi=1.1)
    ground = GroundState(spec, eig, policy)
    # cells 2..19 hold the tails of both edge modes
    with caplog.at_level(logging.WARNING, logger="defect_entropy"):
        corr = ground.correlation_matrix(Window(start=2, length=18))
    assert "Dropping imaginary part" in caplog.text
    assert not np.iscomplexobj(corr.entries)
    assert_allclose(corr.entries, corr.entries.T)


@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_full_window_is_a_projector(p):
    spec, eig = open_chain()
    ground = GroundState(spec, eig, OccupationPolicy(base_filling=Filling.HALF, zero_mode_p=p))
    entries = ground.correlation_matrix(Window(start=1, length=spec.n_cells)).entries
    assert_allclose(entries @ entries, entries, atol=1e-10)
    assert np.trace(entries) == pytest.approx(spec.n_cells)


def test_full_window_with_one_defect_is_a_projector():
    spec, eig = open_chain(n_sites=60, defects=(DefectSpec(cell_index=15, kind=DefectKind.ONE_SITE),))
    entries = GroundState(spec, eig, OccupationPolicy()).correlation_matrix(Window(start=1, length=30)).entries
    assert_allclose(entries @ entries, entries, atol=1e-10)
