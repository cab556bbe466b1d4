"""Deterministic invariant checks run by `defect-entropy selftest`."""

from itertools import product

import numpy as np
from scipy.special import xlogy

from defect_entropy.analytics.aklt import aklt_entropies, hybrid_sector_entropy, ssh_equivalent_p
from defect_entropy.analytics.asymptotics import dimerized_table, excess_entropy, interval_spectrum
from defect_entropy.analytics.statmech import equipartition_report, solve_mu
from defect_entropy.entities.cases import AkltCase, AkltRegion, AkltState, CaseKind
from defect_entropy.entities.chain import ChainSpec, DefectKind, DefectSpec
from defect_entropy.entities.scan import CheckResult, ScanConfig, ScanMode, default_chain
from defect_entropy.entities.spectra import Filling, OccupationPolicy, Window
from defect_entropy.lattice.entanglement import (
    charge_resolved_table,
    correlation_spectrum,
    srpf_exact,
)
from defect_entropy.lattice.groundstate import GroundState
from defect_entropy.lattice.model import build_hamiltonian
from defect_entropy.log import logger
from defect_entropy.numerics.linalg import eigh_symmetric
from defect_entropy.numerics.specialfn import (
    asymptotic_params,
    euler_product_check,
    modulus_from_nome,
    nome_modulus,
    theta2,
    theta2_product,
    theta3,
    theta3_product,
)
from defect_entropy.settings import Settings

ELL = 20
# window starts of the default chain: topological bulk, trivial bulk, first defect
WINDOWS = {CaseKind.TOPOLOGICAL: 10, CaseKind.TRIVIAL: 90, CaseKind.DEFECT: 41}
BRUTE_FORCE_LAMBDAS = np.array([0.07, 0.31, 0.5, 0.64, 0.92])


def _chain(delta: float, kind: DefectKind = DefectKind.ONE_SITE) -> ChainSpec:
    return default_chain().model_copy(
        update={
            "delta": delta,
            "defects": (DefectSpec(cell_index=50, kind=kind), DefectSpec(cell_index=150, kind=kind)),
        }
    )


def _window_lambdas(ground: GroundState, start: int) -> np.ndarray:
    return correlation_spectrum(ground.correlation_matrix(Window(start=start, length=ELL))).lambdas


def _result(name: str, error: float, tolerance: float) -> CheckResult:
    return CheckResult(name=name, passed=bool(error <= tolerance), detail=f"max error {error:.3e} (tol {tolerance:.0e})")


class InvariantSuite:
    def __init__(self, settings: Settings | None = None):
        self.settings = settings or Settings()

    def _ground_state(self, spec: ChainSpec, policy: OccupationPolicy | None = None) -> GroundState:
        tolerances = self.settings.tolerances
        return GroundState(
            spec,
            eigh_symmetric(build_hamiltonian(spec)),
            policy or OccupationPolicy(),
            tolerances.near_zero,
            tolerances.imaginary,
        )

    def check_dimerized_lattice(self) -> CheckResult:
        ground = self._ground_state(_chain(1.0))
        error = 0.0
        for case, start in WINDOWS.items():
            for n in (1.0, 2.0, 3.0):
                lattice = charge_resolved_table(_window_lambdas(ground, start), n)
                exact = dimerized_table(case, ELL, n)
                occupied = exact.occupied
                error = max(
                    error,
                    float(np.max(np.abs(lattice.z_1_q - exact.z_1_q))),
                    float(np.max(np.abs(lattice.z_n_q - exact.z_n_q))),
                    float(np.max(np.abs(lattice.sre_vn[occupied] - exact.sre_vn[occupied]))),
                    abs(lattice.totals.renyi - exact.totals.renyi),
                    abs(lattice.totals.configuration - exact.totals.configuration),
                    abs(lattice.totals.fluctuation - exact.totals.fluctuation),
                )
        return _result("dimerized_lattice", error, 1e-12)

    def check_defect_kinds(self) -> CheckResult:
        expected = {
            CaseKind.TOPOLOGICAL: [0.0] * (ELL - 1) + [0.5, 0.5] + [1.0] * (ELL - 1),
            CaseKind.TRIVIAL: [0.0] * ELL + [1.0] * ELL,
            CaseKind.DEFECT: [0.0] * ELL + [0.5] + [1.0] * (ELL - 1),
        }
        error = 0.0
        for kind in DefectKind:
            ground = self._ground_state(_chain(1.0, kind))
            for case, start in WINDOWS.items():
                error = max(error, float(np.max(np.abs(_window_lambdas(ground, start) - expected[case]))))
        return _result("defect_kinds", error, 1e-10)

    def check_lattice_asymptotics(self) -> CheckResult:
        from defect_entropy.engine import Engine

        engine = Engine(self.settings)
        error = 0.0
        for start in WINDOWS.values():
            config = ScanConfig(
                chain=_chain(0.3),
                window_length=ELL,
                m_range=(start, start),
                n_list=[1.0, 2.0, 3.0],
                mode=ScanMode.BOTH,
            )
            rows = engine.compute(config).rows
            deviations = [row.deviation for row in rows if abs(row.delta_q) <= 2 and row.deviation is not None]
            error = max([error, *deviations])
        return _result("lattice_asymptotics", error, 1e-3)

    def check_special_functions(self) -> CheckResult:
        omegas = np.linspace(0.0, np.pi, 7)
        error = 0.0
        for zeta in (0.05, 0.3, 0.6, 0.85):
            error = max(
                error,
                float(np.max(np.abs(theta2(omegas, zeta) - theta2_product(omegas, zeta)))),
                float(np.max(np.abs(theta3(omegas, zeta) - theta3_product(omegas, zeta)))),
                euler_product_check(zeta),
            )
        for n_epsilon in (0.5, 2.0, np.pi, 3.78, 11.3):
            k, k_prime = nome_modulus(n_epsilon)
            k_back, k_prime_back = modulus_from_nome(np.exp(-n_epsilon))
            error = max(error, abs(k - k_back), abs(k_prime - k_prime_back))
        return _result("special_functions", error, 1e-10)

    def check_brute_force(self) -> CheckResult:
        lambdas = BRUTE_FORCE_LAMBDAS
        size = len(lambdas)
        error = 0.0
        for n in (1.0, 2.0, 3.5):
            weights = [[] for _ in range(size + 1)]
            for pattern in product((0, 1), repeat=size):
                occupied = np.array(pattern, dtype=bool)
                weight = np.prod(np.where(occupied, lambdas, 1.0 - lambdas))
                weights[occupied.sum()].append(weight)
            z_1 = np.array([sum(w) for w in weights])
            z_n = np.array([sum(x**n for x in w) for w in weights])
            vn = np.array([-np.sum(xlogy(np.array(w) / sum(w), np.array(w) / sum(w))) for w in weights])

            table = charge_resolved_table(lambdas, n)
            error = max(
                error,
                float(np.max(np.abs(srpf_exact(lambdas, n) - z_n))),
                float(np.max(np.abs(table.z_1_q - z_1))),
                float(np.max(np.abs(table.sre_vn - vn))),
            )
            if n != 1:
                renyi = np.log(z_n) - n * np.log(z_1)
                error = max(error, float(np.max(np.abs(table.sre_renyi - renyi / (1 - n)))))
        return _result("brute_force", error, 1e-12)

    def check_statmech(self) -> CheckResult:
        params = asymptotic_params(0.3)
        spectrum = interval_spectrum(CaseKind.TRIVIAL, params, ELL)
        error = max(abs(solve_mu(spectrum, ELL)), abs(solve_mu(spectrum, ELL + 1) - params.epsilon))
        entries = equipartition_report(spectrum, range(ELL - 3, ELL + 4), self.settings.tolerances.degeneracy)
        closure = max(entry.decomposition_residual for entry in entries)
        invariance = max(entry.mu_invariance_residual for entry in entries)
        passed = error <= 1e-10 and closure <= 1e-8 and invariance <= 1e-10
        return CheckResult(
            name="statmech",
            passed=passed,
            detail=f"mu error {error:.3e}, decomposition {closure:.3e}, mu-invariance {invariance:.3e}",
        )

    def check_aklt(self) -> CheckResult:
        cases = [
            AkltCase(case=AkltRegion.TRIVIAL_PRODUCT),
            AkltCase(case=AkltRegion.AKLT_BULK),
            AkltCase(case=AkltRegion.DEFECT_INTERFACE),
        ] + [
            AkltCase(case=AkltRegion.DEFECT_INTERFACE, ground_state=AkltState.HYBRID, p=p)
            for p in np.linspace(0.0, 1.0, 11)
        ]
        error = 0.0
        for case, n in product(cases, (1.0, 2.0, 3.0)):
            error = max(error, aklt_entropies(case, n).residual)
            if case.ground_state == AkltState.HYBRID:
                eta = case.eta
                error = max(error, abs(hybrid_sector_entropy(eta, n) - excess_entropy(ssh_equivalent_p(eta), n)))
        return _result("aklt", error, 1e-12)

    def check_zero_mode_update(self) -> CheckResult:
        spec = _chain(0.3)
        start = WINDOWS[CaseKind.DEFECT]
        sites = Window(start=start, length=ELL).site_slice()
        error = 0.0
        rest = None
        # 0.5 would sit on the lambda = 1/2 level of the strong cut at the window edge
        for p in (0.2, 0.7, 0.9):
            ground = self._ground_state(spec, OccupationPolicy(base_filling=Filling.HALF, zero_mode_p=p))
            # psi1 leaks out of the window, so the new level is (1 - p) times its window weight
            level = (1.0 - p) * float(np.sum(ground.zero_modes.psi1[sites] ** 2))
            lambdas = np.sort(_window_lambdas(ground, start))
            hit = int(np.argmin(np.abs(lambdas - level)))
            others = np.delete(lambdas, hit)
            rest = others if rest is None else rest
            error = max(error, abs(lambdas[hit] - level), float(np.max(np.abs(others - rest))))
        # second-order mixing with the edge levels is O(k^(2d)) too
        return _result("zero_mode_update", error, 1e-5)

    def run(self) -> list[CheckResult]:
        checks = [
            self.check_dimerized_lattice,
            self.check_defect_kinds,
            self.check_lattice_asymptotics,
            self.check_special_functions,
            self.check_brute_force,
            self.check_statmech,
            self.check_aklt,
            self.check_zero_mode_update,
        ]
        results = []
        for check in checks:
            result = check()
            log = logger.info if result.passed else logger.error
            log(f"InvariantSuite. {result.name}: {'ok' if result.passed else 'FAILED'} ({result.detail})")
            results.append(result)
        return results
