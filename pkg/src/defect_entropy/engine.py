import math
from concurrent.futures import ThreadPoolExecutor
from itertools import chain as flatten

import numpy as np

from defect_entropy.analytics.aklt import aklt_entropies
from defect_entropy.analytics.asymptotics import asymptotic_table, dimerized_table, interval_spectrum
from defect_entropy.analytics.statmech import equipartition_report
from defect_entropy.entities.cases import (
    AkltCase,
    AkltRegion,
    AkltState,
    AsymptoticParams,
    CaseKind,
    WindowCase,
)
from defect_entropy.entities.chain import Boundary, ChainSpec
from defect_entropy.entities.handlers.storage_handler import StorageHandler
from defect_entropy.entities.scan import (
    EquipartitionRow,
    ScanConfig,
    ScanMode,
    ScanResult,
    ScanRow,
)
from defect_entropy.entities.spectra import Filling, OccupationPolicy, Window
from defect_entropy.entities.tables import ChargeResolvedTable
from defect_entropy.errors import NumericalValidationError, WindowError
from defect_entropy.lattice.entanglement import charge_resolved_table, correlation_spectrum
from defect_entropy.lattice.groundstate import GroundState
from defect_entropy.lattice.model import (
    build_hamiltonian,
    classify_window,
    defect_sites,
    defects_in_window,
    localization_length,
)
from defect_entropy.log import logger
from defect_entropy.numerics.linalg import eigh_symmetric
from defect_entropy.numerics.specialfn import asymptotic_params
from defect_entropy.settings import Settings

AKLT_RESIDUAL_TOL = 1e-12


class Engine:
    """Runs scans described by a ScanConfig and persists their rows."""

    def __init__(self, settings: Settings | None = None):
        self.settings = settings or Settings()
        self.storage_handler = StorageHandler(self.settings)

    # table -> rows

    def _rows_from_tables(
        self,
        tables: dict[float, ChargeResolvedTable],
        ell: int,
        case: str,
        source: str,
        m: int | None = None,
        p: float | None = None,
    ) -> list[ScanRow]:
        cutoff = self.settings.delta_q_cutoff
        first = next(iter(tables.values()))
        rows = []
        for index, q in enumerate(first.q_values):
            q = int(q)
            if abs(q - ell) > cutoff:
                continue
            for n, table in tables.items():
                totals = table.totals
                rows.append(
                    ScanRow(
                        m=m,
                        case=case,
                        p=p,
                        q=q,
                        delta_q=q - ell,
                        n=n,
                        Z1_q=float(table.z_1_q[index]),
                        Zn_q=float(table.z_n_q[index]),
                        S_n_q=float(table.sre_renyi[index]),
                        S_q=float(table.sre_vn[index]),
                        S_n=totals.renyi,
                        S=totals.vn,
                        S_c=totals.configuration,
                        S_f=totals.fluctuation,
                        source=source,
                    )
                )
        return rows

    # lattice

    def _ground_states(self, config: ScanConfig) -> list[tuple[float | None, GroundState]]:
        spec = config.chain
        tolerances = self.settings.tolerances
        eig = eigh_symmetric(build_hamiltonian(spec))
        logger.info(f"Engine. Diagonalized chain of {spec.n_sites} sites")
        if config.p_list:
            policies = [
                (p, OccupationPolicy(base_filling=Filling.HALF, zero_mode_p=p)) for p in config.p_list
            ]
        else:
            policies = [(None, OccupationPolicy(base_filling=config.filling))]
        return [
            (p, GroundState(spec, eig, policy, tolerances.near_zero, tolerances.imaginary))
            for p, policy in policies
        ]

    def _lattice_window(self, config: ScanConfig, ground: GroundState, p: float | None, m: int) -> list[ScanRow]:
        tolerances = self.settings.tolerances
        window = Window(start=m, length=config.window_length)
        try:
            case = classify_window(config.chain, window)
        except WindowError as e:
            logger.warning(f"Engine. Skipping window {m}: {e}")
            return []
        spectrum = correlation_spectrum(ground.correlation_matrix(window), tolerances.lambda_clamp)
        tables = {
            n: charge_resolved_table(spectrum.lambdas, n, tolerances.empty_sector, tolerances.lambda_clamp)
            for n in config.n_list
        }
        logger.debug(f"Engine. Lattice window {m} ({case})")
        return self._rows_from_tables(tables, config.window_length, case, "lattice", m=m, p=p)

    def _map_windows(self, function, starts: list[int]) -> list[ScanRow]:
        with ThreadPoolExecutor(max_workers=max(1, self.settings.threads)) as executor:
            return list(flatten.from_iterable(executor.map(function, starts)))

    def lattice_rows(self, config: ScanConfig) -> list[ScanRow]:
        rows = []
        for p, ground in self._ground_states(config):
            rows += self._map_windows(lambda m: self._lattice_window(config, ground, p, m), config.window_starts())
        return rows

    # asymptotics

    def _window_case(
        self, spec: ChainSpec, window: Window, params: AsymptoticParams, filling: Filling, p: float | None
    ) -> WindowCase:
        case = classify_window(spec, window)
        zero_mode_p = None
        if case == CaseKind.DEFECT and (filling == Filling.HALF or p is not None):
            hybridization = 0.5 if p is None else p
            # psi2 carries weight p, so the second defect sees the mirrored hybridization
            site = defects_in_window(spec, window)[0]
            first = defect_sites(spec).index(site) == 0
            zero_mode_p = hybridization if first else 1.0 - hybridization
        return WindowCase(case=case, ell=window.length, params=params, zero_mode_p=zero_mode_p)

    def _asymptotic_window(self, config: ScanConfig, params: AsymptoticParams, p: float | None, m: int) -> list[ScanRow]:
        window = Window(start=m, length=config.window_length)
        try:
            window_case = self._window_case(config.chain, window, params, config.filling, p)
        except WindowError as e:
            logger.warning(f"Engine. Skipping window {m}: {e}")
            return []
        tables = {
            n: asymptotic_table(window_case, n, self.settings.delta_q_cutoff) for n in config.n_list
        }
        return self._rows_from_tables(tables, config.window_length, window_case.case, "asymptotic", m=m, p=p)

    def asymptotic_rows(self, config: ScanConfig) -> list[ScanRow]:
        params = asymptotic_params(config.chain.delta)
        rows = []
        for p in config.p_list or [None]:
            rows += self._map_windows(
                lambda m: self._asymptotic_window(config, params, p, m), config.window_starts()
            )
        return rows

    # comparison

    def is_bulk_window(self, spec: ChainSpec, window: Window) -> bool:
        margin = math.ceil(self.settings.bulk_margin_xi * localization_length(spec.delta))
        if spec.boundary == Boundary.OPEN:
            if window.start - 1 < margin or spec.n_cells - window.stop < margin:
                return False
        cells = spec.n_cells

        def distance(a: int, b: int) -> int:
            gap = abs(a - b)
            return min(gap, cells - gap) if spec.boundary == Boundary.PERIODIC else gap

        for site in defect_sites(spec):
            cell = (site + 1) // 2
            if window.start <= cell <= window.stop:
                if min(cell - window.start, window.stop - cell) < margin:
                    return False
            elif min(distance(cell, window.start), distance(cell, window.stop)) < margin:
                return False
        return True

    def _deviation(self, lattice: ScanRow, asymptotic: ScanRow) -> float:
        floor = self.settings.tolerances.probability_floor
        deviation = abs(lattice.Z1_q - asymptotic.Z1_q)
        if lattice.Z1_q > floor and asymptotic.Z1_q > floor:
            deviation = max(
                deviation,
                abs(lattice.S_n_q - asymptotic.S_n_q),
                abs(lattice.S_q - asymptotic.S_q),
            )
        return float(deviation)

    def compare(self, config: ScanConfig, lattice: list[ScanRow], asymptotic: list[ScanRow]) -> tuple[list[ScanRow], list[str]]:
        keyed = {(row.p, row.m, row.q, row.n): row for row in asymptotic}
        tolerance = self.settings.tolerances.deviation if config.tolerance is None else config.tolerance
        rows, failures = [], []
        for row in lattice:
            partner = keyed.get((row.p, row.m, row.q, row.n))
            if partner is None:
                rows.append(row)
                continue
            deviation = self._deviation(row, partner)
            rows.append(row.model_copy(update={"deviation": deviation}))
            rows.append(partner.model_copy(update={"deviation": deviation}))
            window = Window(start=row.m, length=config.window_length)
            if deviation > tolerance and self.is_bulk_window(config.chain, window):
                failures.append(
                    f"m={row.m} q={row.q} n={row.n} p={row.p}: deviation {deviation:.3e} above {tolerance:.1e}"
                )
        return rows, failures

    # closed-form modes

    def dimerized_rows(self, config: ScanConfig) -> list[ScanRow]:
        ell = config.window_length
        rows = []
        for case in CaseKind:
            tables = {n: dimerized_table(case, ell, n) for n in config.n_list}
            rows += self._rows_from_tables(tables, ell, case, "dimerized")
        for p in config.p_list:
            tables = {n: dimerized_table(CaseKind.DEFECT, ell, n, p) for n in config.n_list}
            rows += self._rows_from_tables(tables, ell, CaseKind.DEFECT, "dimerized", p=p)
        return rows

    def statmech_rows(self, config: ScanConfig) -> list[EquipartitionRow]:
        params = asymptotic_params(config.chain.delta)
        ell = config.window_length
        cutoff = self.settings.delta_q_cutoff
        tolerances = self.settings.tolerances
        variants = [(case, None) for case in CaseKind] + [(CaseKind.DEFECT, p) for p in config.p_list]
        rows = []
        for case, p in variants:
            spectrum = interval_spectrum(case, params, ell, p)
            finite = int(np.sum(np.isfinite(spectrum)))
            filled = int(np.sum(spectrum == -np.inf))
            charges = [q for q in range(ell - cutoff, ell + cutoff + 1) if 0 < q - filled < finite]
            for entry in equipartition_report(spectrum, charges, tolerances.degeneracy):
                rows.append(
                    EquipartitionRow(
                        case=case,
                        p=p,
                        q=entry.q,
                        delta_q=entry.q - ell,
                        mu=entry.mu,
                        S_tilde=entry.constrained_entropy,
                        Z1_q=entry.sector_probability,
                        S_q=entry.reconstructed_sre,
                        gap_position=entry.gap_position,
                        decomposition_residual=entry.decomposition_residual,
                        mu_invariance_residual=entry.mu_invariance_residual,
                    )
                )
        return rows

    def aklt_rows(self, config: ScanConfig) -> tuple[list[ScanRow], list[str]]:
        cases = [
            AkltCase(case=AkltRegion.TRIVIAL_PRODUCT),
            AkltCase(case=AkltRegion.AKLT_BULK),
            AkltCase(case=AkltRegion.DEFECT_INTERFACE),
        ] + [
            AkltCase(case=AkltRegion.DEFECT_INTERFACE, ground_state=AkltState.HYBRID, p=p)
            for p in config.p_list or [0.5]
        ]
        rows, failures = [], []
        for case in cases:
            results = {n: aklt_entropies(case, n) for n in config.n_list}
            for n, result in results.items():
                if result.residual > AKLT_RESIDUAL_TOL:
                    failures.append(f"{case.case}:{case.ground_state} n={n}: residual {result.residual:.3e}")
            tables = {n: result.table for n, result in results.items()}
            rows += self._rows_from_tables(tables, 0, f"{case.case}:{case.ground_state}", "aklt", p=case.p)
        return rows, failures

    # entry points

    def compute(self, config: ScanConfig) -> ScanResult:
        logger.info(f"Engine. Running {config.mode} scan")
        match config.mode:
            case ScanMode.LATTICE:
                return ScanResult(kind="scan", rows=self.lattice_rows(config))
            case ScanMode.ASYMPTOTIC:
                return ScanResult(kind="scan", rows=self.asymptotic_rows(config))
            case ScanMode.BOTH:
                rows, failures = self.compare(config, self.lattice_rows(config), self.asymptotic_rows(config))
                return ScanResult(kind="scan", rows=rows, failures=failures)
            case ScanMode.DIMERIZED:
                return ScanResult(kind="scan", rows=self.dimerized_rows(config))
            case ScanMode.STATMECH:
                return ScanResult(kind="equipartition", rows=self.statmech_rows(config))
            case ScanMode.AKLT:
                rows, failures = self.aklt_rows(config)
                return ScanResult(kind="scan", rows=rows, failures=failures)

    def run(self, config: ScanConfig, stem: str | None = None) -> ScanResult:
        result = self.compute(config)
        self.storage_handler.save(config, result, stem or str(config.mode))
        if result.failures:
            for failure in result.failures[:10]:
                logger.error(f"Engine. {failure}")
            raise NumericalValidationError(f"{len(result.failures)} rows failed validation")
        logger.info(f"Engine. Finished with {len(result.rows)} rows")
        return result
