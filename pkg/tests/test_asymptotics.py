import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import DEFECT_START, ELL, SECOND_DEFECT_START, TOP_START, TRIV_START
from defect_entropy.analytics.asymptotics import (
    asymptotic_table,
    boundary_moment,
    charged_moment_asymptotic,
    crossing_p,
    defect_spectrum,
    dimerized_table,
    excess_entropy,
    excess_entropy_asymptotic,
    interval_spectrum,
    replica_modulus,
    sre_asymptotic,
    sre_vn_asymptotic,
    srpf_asymptotic,
    zero_mode_level,
    zero_mode_table,
)
from defect_entropy.entities.cases import BondKind, CaseKind, WindowCase
from defect_entropy.entities.spectra import Window
from defect_entropy.lattice.entanglement import charge_resolved_table, correlation_spectrum
from defect_entropy.numerics.linalg import binary_entropy
from defect_entropy.numerics.specialfn import nome_modulus

LOG2 = np.log(2.0)
STARTS = {CaseKind.TOPOLOGICAL: TOP_START, CaseKind.TRIVIAL: TRIV_START, CaseKind.DEFECT: DEFECT_START}
DELTA_QS = range(-2, 3)


def lattice_lambdas(ground, start):
    return correlation_spectrum(ground.correlation_matrix(Window(start=start, length=ELL))).lambdas


@pytest.mark.parametrize(
    "case, renyi, configuration, fluctuation",
    [
        (CaseKind.TRIVIAL, 0.0, 0.0, 0.0),
        (CaseKind.TOPOLOGICAL, 2 * LOG2, 0.5 * LOG2, 1.5 * LOG2),
        (CaseKind.DEFECT, LOG2, 0.0, LOG2),
    ],
)
@pytest.mark.parametrize("n", [1.0, 2.0, 3.0, 0.5])
def test_dimerized_totals(case, renyi, configuration, fluctuation, n):
    table = dimerized_table(case, ELL, n)
    assert table.totals.renyi == pytest.approx(renyi, abs=1e-12)
    assert table.totals.configuration == pytest.approx(configuration, abs=1e-12)
    assert table.totals.fluctuation == pytest.approx(fluctuation, abs=1e-12)
    assert table.z_1_q.sum() == pytest.approx(1.0)


def test_dimerized_topological_sectors():
    table = dimerized_table(CaseKind.TOPOLOGICAL, ELL, 2.0)
    assert table.probability(ELL) == 0.5
    assert table.probability(ELL + 1) == 0.25
    assert table.vn_at(ELL) == pytest.approx(LOG2)
    assert table.vn_at(ELL - 1) == 0.0
    assert table.renyi_at(ELL) == pytest.approx(LOG2)


@pytest.mark.parametrize("p", [0.0, 0.2, 0.5, 0.9])
@pytest.mark.parametrize("n", [1.0, 2.0, 3.0])
def test_dimerized_zero_mode(p, n):
    table = dimerized_table(CaseKind.DEFECT, ELL, n, p)
    assert table.totals.renyi == pytest.approx(LOG2 + excess_entropy(p, n), abs=1e-12)
    assert table.renyi_at(ELL) == pytest.approx(excess_entropy(p, n), abs=1e-12)
    if 0 < p < 1:
        assert table.vn_at(ELL - 1) == 0.0


def test_zero_mode_rejected_outside_defect():
    with pytest.raises(ValueError):
        dimerized_table(CaseKind.TRIVIAL, ELL, 1.0, 0.5)
    with pytest.raises(ValueError):
        srpf_asymptotic(CaseKind.TOPOLOGICAL, 1.0, 0, None, 0.5)


def test_excess_entropy_limits():
    assert excess_entropy(0.5, 1.0) == pytest.approx(LOG2)
    assert excess_entropy(0.5, 3.0) == pytest.approx(LOG2)
    assert excess_entropy(0.0, 2.0) == 0.0


@pytest.mark.parametrize("n", [1.0, 2.0, 3.5])
def test_replica_modulus_matches_nome_inversion(params, n):
    assert_allclose(replica_modulus(n, params), nome_modulus(n * params.epsilon), atol=1e-10)


def test_replica_modulus_reduces_to_chain_modulus(params):
    assert_allclose(replica_modulus(1.0, params), (params.k, params.k_prime), atol=1e-10)


@pytest.mark.parametrize("case", list(CaseKind))
@pytest.mark.parametrize("n", [1.0, 2.0, 3.0])
def test_srpf_sums_to_moment(params, case, n):
    total = sum(srpf_asymptotic(case, n, dq, params) for dq in range(-12, 13))
    assert total == pytest.approx(charged_moment_asymptotic(case, n, 0.0, ELL, params).real, rel=1e-8)
    if n == 1:
        assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("case", list(CaseKind))
@pytest.mark.parametrize("n", [1.0, 2.0, 3.0])
def test_lattice_agreement(below_half, params, case, n):
    lattice = charge_resolved_table(lattice_lambdas(below_half, STARTS[case]), n)
    predicted = asymptotic_table(WindowCase(case=case, ell=ELL, params=params), n)
    for dq in DELTA_QS:
        q = ELL + dq
        assert lattice.probability(q) == pytest.approx(predicted.probability(q), abs=1e-3)
        assert lattice.vn_at(q) == pytest.approx(predicted.vn_at(q), abs=1e-3)
        assert lattice.renyi_at(q) == pytest.approx(predicted.renyi_at(q), abs=1e-3)
    assert lattice.totals.renyi == pytest.approx(predicted.totals.renyi, abs=1e-3)


@pytest.mark.parametrize("p", [0.02, 0.1, 0.3, 0.5, 0.98])
@pytest.mark.parametrize("start", [DEFECT_START, SECOND_DEFECT_START])
@pytest.mark.parametrize("n", [1.0, 2.0])
def test_lattice_agreement_with_zero_mode(hybridized, params, start, p, n):
    # psi1 carries weight 1 - p, so the second defect sees the mirrored hybridization
    p_eff = p if start == DEFECT_START else 1 - p
    lattice = charge_resolved_table(lattice_lambdas(hybridized(p), start), n)
    predicted = zero_mode_table(p_eff, n, params, ELL)
    for dq in DELTA_QS:
        q = ELL + dq
        assert lattice.probability(q) == pytest.approx(predicted.probability(q), abs=1e-3)
        if predicted.probability(q) > 1e-6:
            assert lattice.renyi_at(q) == pytest.approx(predicted.renyi_at(q), abs=1e-3)


@pytest.mark.parametrize("dq", [-1, 0, 1])
def test_lattice_sector_entropy_peaks_at_crossing(hybridized, params, dq):
    grid = np.linspace(0.005, 0.995, 199)
    entropies = [
        charge_resolved_table(lattice_lambdas(hybridized(p), DEFECT_START), 1.0).vn_at(ELL + dq) for p in grid
    ]
    assert abs(grid[np.argmax(entropies)] - crossing_p(dq, params)) <= 0.01


@pytest.mark.parametrize("n", [1.0, 2.0, 3.0])
def test_defect_equipartition(below_half, n):
    lattice = charge_resolved_table(lattice_lambdas(below_half, DEFECT_START), n)
    values = [lattice.renyi_at(ELL + dq) for dq in DELTA_QS]
    assert np.ptp(values) < 1e-3


@pytest.mark.parametrize("n", [2.0, 3.0])
def test_parity_classes(params, n):
    for dq in DELTA_QS:
        top = sre_asymptotic(CaseKind.TOPOLOGICAL, n, dq, params)
        assert top == pytest.approx(sre_asymptotic(CaseKind.TOPOLOGICAL, n, dq + 2, params))
        # same parity class after swapping phases and shifting by one
        assert top == pytest.approx(sre_asymptotic(CaseKind.TRIVIAL, n, dq + 1, params))
    assert sre_asymptotic(CaseKind.DEFECT, n, -3, params) == pytest.approx(sre_asymptotic(CaseKind.DEFECT, n, 4, params))


@pytest.mark.parametrize("case", list(CaseKind))
def test_closed_form_matches_ratio(params, case):
    for dq in DELTA_QS:
        z_1 = srpf_asymptotic(case, 1.0, dq, params)
        z_2 = srpf_asymptotic(case, 2.0, dq, params)
        assert sre_asymptotic(case, 2.0, dq, params) == pytest.approx(-np.log(z_2 / z_1**2), abs=1e-10)


def test_von_neumann_is_renyi_limit(params):
    h = 1e-4
    for case in CaseKind:
        limit = 0.5 * (sre_asymptotic(case, 1 + h, 0, params) + sre_asymptotic(case, 1 - h, 0, params))
        assert sre_vn_asymptotic(case, 0, params) == pytest.approx(limit, abs=1e-6)


def test_renyi_rejects_unit_index(params):
    with pytest.raises(ValueError):
        sre_asymptotic(CaseKind.TRIVIAL, 1.0, 0, params)


def test_zero_mode_level():
    assert zero_mode_level(0.5) == 0.0
    assert zero_mode_level(0.0) == -np.inf
    assert zero_mode_level(1.0) == np.inf


@pytest.mark.parametrize("dq", [-1, 0, 1])
def test_excess_peaks_at_crossing(params, dq):
    grid = np.linspace(0.0005, 0.9995, 1999)
    excess = np.array([excess_entropy_asymptotic(p, 1.0, dq, params) for p in grid])
    assert abs(grid[np.argmax(excess)] - crossing_p(dq, params)) <= 1e-3
    assert excess.max() == pytest.approx(LOG2, abs=1e-3)
    assert excess_entropy_asymptotic(crossing_p(dq, params), 2.0, dq, params) == pytest.approx(LOG2)


def test_crossing_symmetry(params):
    assert crossing_p(0, params) == 0.5
    assert crossing_p(1, params) == pytest.approx(1 - crossing_p(-1, params))
    for p in (0.1, 0.4, 0.83):
        for n in (1.0, 2.0):
            assert excess_entropy_asymptotic(p, n, 1, params) == pytest.approx(
                excess_entropy_asymptotic(1 - p, n, -1, params)
            )


@pytest.mark.parametrize("p", [0.001, 0.999])
def test_totals_insensitive_to_extreme_hybridization(params, p):
    with_mode = zero_mode_table(p, 1.0, params, ELL)
    empty = asymptotic_table(WindowCase(case=CaseKind.DEFECT, ell=ELL, params=params), 1.0)
    # a nearly pure zero mode only adds its own binary entropy
    assert with_mode.totals.vn == pytest.approx(empty.totals.vn + binary_entropy(p), abs=1e-8)
    assert with_mode.totals.fluctuation == pytest.approx(empty.totals.fluctuation, abs=1e-2)


@pytest.mark.parametrize("case", list(CaseKind))
def test_interval_spectrum_matches_lattice(below_half, params, case):
    levels = interval_spectrum(case, params, ELL)
    assert len(levels) == 2 * ELL
    lattice = np.sort(lattice_lambdas(below_half, STARTS[case]))
    predicted = np.sort(1.0 / (np.exp(levels) + 1.0))
    assert_allclose(lattice, predicted, atol=1e-4)


def test_interval_spectrum_symmetry(params):
    for case in (CaseKind.TOPOLOGICAL, CaseKind.TRIVIAL):
        levels = interval_spectrum(case, params, ELL)
        assert_allclose(levels, -levels[::-1])
    defect = interval_spectrum(CaseKind.DEFECT, params, ELL, p=0.3)
    assert zero_mode_level(0.3) in defect


@pytest.mark.parametrize("n", [1.0, 2.0, 3.0])
@pytest.mark.parametrize("alpha", [0.0, 0.7, 2.1])
@pytest.mark.parametrize("case, bond", [(CaseKind.TOPOLOGICAL, BondKind.STRONG), (CaseKind.TRIVIAL, BondKind.WEAK)])
def test_interval_moment_factorizes_into_boundaries(params, case, bond, n, alpha):
    interval = charged_moment_asymptotic(case, n, alpha, ELL, params)
    boundary = boundary_moment(bond, n, alpha, params)
    assert abs(interval) == pytest.approx(abs(boundary) ** 2, rel=1e-12)


def test_strong_boundary_moment_vanishes_at_pi(params):
    for n in (1.0, 2.0, 3.0):
        assert abs(boundary_moment(BondKind.STRONG, n, np.pi, params)) < 1e-14
        assert abs(boundary_moment(BondKind.WEAK, n, np.pi, params)) > 0.0


def test_defect_spectrum_levels(params):
    eps = params.epsilon
    assert_allclose(defect_spectrum(params, 2), eps * np.array([-2, -1, 0, 1, 2]))
    assert_allclose(defect_spectrum(params, 2, BondKind.STRONG), eps * np.array([-4, -2, 0, 2, 4]))
    assert_allclose(defect_spectrum(params, 2, BondKind.WEAK), eps * np.array([-3, -1, 1, 3]))
    with pytest.raises(ValueError):
        defect_spectrum(params, 0)


def test_defect_spectrum_matches_lattice(below_half, params):
    lattice = lattice_lambdas(below_half, DEFECT_START)
    for level in defect_spectrum(params, 5):
        assert np.min(np.abs(lattice - 1.0 / (np.exp(level) + 1.0))) < 1e-4
