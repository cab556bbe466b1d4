import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from defect_entropy.analytics.aklt import (
    aklt_entropies,
    hybrid_sector_entropy,
    hybrid_total_entropy,
    reduced_density_matrix,
    ssh_equivalent_p,
)
from defect_entropy.analytics.asymptotics import excess_entropy
from defect_entropy.entities.cases import AkltCase, AkltRegion, AkltState

LOG2 = np.log(2.0)
ETA_GRID = np.linspace(0.0, 1.0, 11)


@pytest.mark.parametrize(
    "region, total, zero_sector",
    [
        (AkltRegion.TRIVIAL_PRODUCT, 0.0, 0.0),
        (AkltRegion.AKLT_BULK, 2 * LOG2, LOG2),
        (AkltRegion.DEFECT_INTERFACE, LOG2, 0.0),
    ],
)
@pytest.mark.parametrize("n", [1.0, 2.0, 3.0])
def test_closed_forms(region, total, zero_sector, n):
    result = aklt_entropies(AkltCase(case=region), n)
    assert result.table.totals.renyi == pytest.approx(total, abs=1e-12)
    assert result.table.renyi_at(0) == pytest.approx(zero_sector, abs=1e-12)
    assert result.residual <= 1e-12


def test_bulk_sectors():
    table = aklt_entropies(AkltCase(case=AkltRegion.AKLT_BULK), 1.0).table
    assert_allclose(table.q_values, [-1, 0, 1])
    assert_allclose(table.z_1_q, [0.25, 0.5, 0.25])
    assert table.vn_at(1) == 0.0
    assert table.totals.configuration == pytest.approx(0.5 * LOG2)
    assert table.totals.fluctuation == pytest.approx(1.5 * LOG2)


def test_interface_sectors():
    table = aklt_entropies(AkltCase(case=AkltRegion.DEFECT_INTERFACE), 2.0).table
    assert_allclose(table.q_values, [-1, 0])
    assert_allclose(table.z_1_q, [0.5, 0.5])


@pytest.mark.parametrize("p", np.linspace(0.0, 1.0, 11))
@pytest.mark.parametrize("n", [1.0, 2.0, 3.0])
def test_hybrid_matches_closed_form(p, n):
    case = AkltCase(case=AkltRegion.DEFECT_INTERFACE, ground_state=AkltState.HYBRID, p=p)
    result = aklt_entropies(case, n)
    assert result.residual <= 1e-12
    assert result.table.totals.renyi == pytest.approx(hybrid_total_entropy(case.eta, n), abs=1e-12)


@pytest.mark.parametrize("eta", ETA_GRID)
@pytest.mark.parametrize("n", [1.0, 2.0, 3.0])
def test_ssh_correspondence(eta, n):
    assert hybrid_sector_entropy(eta, n) == pytest.approx(excess_entropy(ssh_equivalent_p(eta), n), abs=1e-12)


def test_eta():
    assert AkltCase(case=AkltRegion.DEFECT_INTERFACE, ground_state=AkltState.HYBRID, p=0.5).eta == pytest.approx(1.0)
    assert AkltCase(case=AkltRegion.DEFECT_INTERFACE).eta == 0.0
    assert hybrid_sector_entropy(1.0, 2.0) == pytest.approx(0.0)
    assert hybrid_sector_entropy(0.0, 1.0) == pytest.approx(LOG2)


def test_density_matrices_are_normalized():
    cases = [
        AkltCase(case=AkltRegion.TRIVIAL_PRODUCT),
        AkltCase(case=AkltRegion.AKLT_BULK),
        AkltCase(case=AkltRegion.DEFECT_INTERFACE),
        AkltCase(case=AkltRegion.DEFECT_INTERFACE, ground_state=AkltState.HYBRID, p=0.3),
    ]
    for case in cases:
        rho, labels = reduced_density_matrix(case)
        assert np.trace(rho) == pytest.approx(1.0)
        assert len(labels) == len(rho)
        assert np.linalg.eigvalsh(rho).min() >= -1e-15


def test_invalid_cases():
    with pytest.raises(ValidationError):
        AkltCase(case=AkltRegion.AKLT_BULK, ground_state=AkltState.HYBRID, p=0.5)
    with pytest.raises(ValidationError):
        AkltCase(case=AkltRegion.DEFECT_INTERFACE, ground_state=AkltState.HYBRID)
    with pytest.raises(ValueError):
        aklt_entropies(AkltCase(case=AkltRegion.AKLT_BULK), 0.0)
