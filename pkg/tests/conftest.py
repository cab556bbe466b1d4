import pytest

from defect_entropy.entities.scan import default_chain
from defect_entropy.entities.spectra import Filling, OccupationPolicy
from defect_entropy.lattice.groundstate import GroundState
from defect_entropy.lattice.model import build_hamiltonian
from defect_entropy.numerics.linalg import eigh_symmetric
from defect_entropy.numerics.specialfn import asymptotic_params

ELL = 20
TOP_START, TRIV_START, DEFECT_START, SECOND_DEFECT_START = 10, 90, 41, 142


@pytest.fixture(scope="session")
def chain():
    return default_chain()


@pytest.fixture(scope="session")
def eig(chain):
    return eigh_symmetric(build_hamiltonian(chain))


@pytest.fixture(scope="session")
def below_half(chain, eig):
    return GroundState(chain, eig, OccupationPolicy())


@pytest.fixture(scope="session")
def hybridized(chain, eig):
    def build(p: float) -> GroundState:
        return GroundState(chain, eig, OccupationPolicy(base_filling=Filling.HALF, zero_mode_p=p))

    return build


@pytest.fixture(scope="session")
def params():
    return asymptotic_params(0.3)
