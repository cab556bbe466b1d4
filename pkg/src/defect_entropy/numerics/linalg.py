import numpy as np
import scipy.linalg
from scipy.special import xlogy

from defect_entropy.entities.spectra import EigenSystem
from defect_entropy.errors import EigenSolverError, NumericalValidationError
from defect_entropy.log import logger

SYMMETRY_RTOL = 1e-12
RESIDUAL_TOL = 1e-10


def eigh_symmetric(
    matrix: np.ndarray,
    symmetry_rtol: float = SYMMETRY_RTOL,
    residual_tol: float = RESIDUAL_TOL,
) -> EigenSystem:
    """Eigendecomposition of a real symmetric matrix, eigenvalues ascending.

    Raises EigenSolverError for asymmetric input, a LAPACK failure, or an
    eigenpair residual above ``residual_tol * ||A||_inf``.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise EigenSolverError(f"Expected a square matrix, got shape {a.shape}")

    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    asymmetry = float(np.max(np.abs(a - a.T), initial=0.0))
    if asymmetry > symmetry_rtol * scale:
        raise EigenSolverError(f"Matrix is not symmetric (max |A - A^T| = {asymmetry:.3e})")

    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(a)
    except scipy.linalg.LinAlgError as e:
        logger.error(f"eigh_symmetric. LAPACK failure on {a.shape[0]}x{a.shape[0]}: {e}")
        raise EigenSolverError(str(e)) from e

    norm = float(np.max(np.sum(np.abs(a), axis=1), initial=0.0)) or 1.0
    residual = float(np.max(np.abs(a @ eigenvectors - eigenvectors * eigenvalues), initial=0.0)) / norm
    if residual > residual_tol:
        logger.error(f"eigh_symmetric. Residual {residual:.3e} above {residual_tol:.1e}")
        raise EigenSolverError("Eigenpair residual above tolerance", residual=residual)

    return EigenSystem(eigenvalues=eigenvalues, eigenvectors=eigenvectors, residual=residual)


def reconstruct(eig: EigenSystem) -> np.ndarray:
    v = eig.eigenvectors
    return (v * eig.eigenvalues) @ v.T


def determinant_sign(eig: EigenSystem) -> int:
    return int(np.prod(np.sign(eig.eigenvalues)))


def clamp_unit_interval(values: np.ndarray, tolerance: float) -> np.ndarray:
    """Clip values to [0, 1]; anything further out than `tolerance` is an error."""
    values = np.asarray(values, dtype=float)
    excess = float(np.max(np.maximum(-values, values - 1.0), initial=0.0))
    if excess > tolerance:
        raise NumericalValidationError(
            f"Correlation eigenvalue outside [0, 1] by {excess:.3e} (tolerance {tolerance:.1e})"
        )
    return np.clip(values, 0.0, 1.0)


def binary_entropy(x: np.ndarray | float) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    result = -xlogy(x, x) - xlogy(1.0 - x, 1.0 - x)
    return result if result.ndim else float(result)
