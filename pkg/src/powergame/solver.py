"""Expected-utility solves against a fixed transition structure.

The per-player utility vector R solves (I - W) R = Z.  W is strictly
substochastic, so the affine map R -> W R + Z is a sup-norm contraction and
plain fixed-point iteration from zero converges; the step size after
iteration t equals the residual of iterate t-1, so stopping when the step
drops to ``tol`` certifies a residual below ``tol`` for the returned vector
(one extra matvec reports the exact value).

Small systems can instead be solved directly; ``solve_utilities_auto`` picks
a direct method sized to the problem, which matters for chains whose
contraction factor is close to one (absorption much rarer than churn).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .dynamics import TransitionMatrix

__all__ = [
    "DEFAULT_TOL",
    "DEFAULT_MAX_ITER",
    "DENSE_SIZE_GUARD",
    "UtilityVector",
    "NonConvergenceError",
    "DenseGuardError",
    "solve_utilities",
    "solve_utilities_direct",
    "solve_utilities_auto",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10 ** 6
DENSE_SIZE_GUARD = 4096


@dataclass(frozen=True)
class UtilityVector:
    """Per-state expected utility of one player, with solve diagnostics."""

    values: np.ndarray
    residual: float
    iterations: int

    def __post_init__(self):
        self.values.flags.writeable = False


class NonConvergenceError(RuntimeError):
    """Iteration budget exhausted before the residual target.

    Usually means the transition matrix is mis-built (not substochastic) or
    its contraction factor is so close to 1 that the direct solver should be
    used instead.
    """

    def __init__(self, residual: float, iterations: int, tol: float):
        self.residual = residual
        self.iterations = iterations
        self.tol = tol
        super().__init__(
            f"no convergence after {iterations} iterations: "
            f"residual {residual:.3e} > tol {tol:.3e}"
        )


class DenseGuardError(ValueError):
    """System too large for the dense direct solve."""


def _residual(W: TransitionMatrix, z: np.ndarray, r: np.ndarray) -> float:
    back = W.matvec(r) + z
    return float(np.max(np.abs(back - r))) if len(r) else 0.0


def solve_utilities(W: TransitionMatrix, Z: np.ndarray,
                    tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> UtilityVector:
    """Fixed-point iteration R <- W R + Z starting from R = 0."""
    if tol <= 0:
        raise ValueError("tol must be strictly positive")
    z = np.ascontiguousarray(Z, dtype=np.float64)
    r, iterations, diff = kernels.picard_solve(
        W.indptr, W.indices, W.data, z, tol, int(max_iter)
    )
    if diff > tol:
        raise NonConvergenceError(_residual(W, z, r), iterations, tol)
    return UtilityVector(r, residual=_residual(W, z, r), iterations=iterations)


def solve_utilities_direct(W: TransitionMatrix, Z: np.ndarray) -> UtilityVector:
    """Dense Gaussian-elimination solve of (I - W) R = Z; small systems only."""
    if W.size > DENSE_SIZE_GUARD:
        raise DenseGuardError(
            f"{W.size} states exceed the dense guard of {DENSE_SIZE_GUARD}; "
            f"use solve_utilities (iterative) or solve_utilities_auto"
        )
    z = np.ascontiguousarray(Z, dtype=np.float64)
    a = np.eye(W.size) - W.to_dense()
    r = np.ascontiguousarray(np.linalg.solve(a, z))
    return UtilityVector(r, residual=_residual(W, z, r), iterations=0)


def solve_utilities_auto(W: TransitionMatrix, Z: np.ndarray) -> UtilityVector:
    """Direct solve sized to the system: dense when small, sparse LU beyond.

    Unlike the fixed-point path this does not degrade when absorption is
    rare (contraction factor near 1), at the price of materializing a
    factorization.
    """
    if W.size <= DENSE_SIZE_GUARD:
        return solve_utilities_direct(W, Z)
    z = np.ascontiguousarray(Z, dtype=np.float64)
    a = (sp.identity(W.size, format="csr") - W.to_scipy()).tocsc()
    r = np.ascontiguousarray(spla.spsolve(a, z))
    return UtilityVector(r, residual=_residual(W, z, r), iterations=0)
