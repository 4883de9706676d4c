"""Diagonalization facade: dense full spectra and iterative ground states.

Dense solves go through LAPACK (numpy.linalg.eigh) and are allowed up to a
configurable dimension; iterative extremal solves use ARPACK with a fixed
all-equal starting vector so results are deterministic run to run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import Sector
from .errors import CapacityError, ConvergenceError
from .model import HamiltonianBlock, ModelParams

#: Blocks up to this dimension may be densified for full diagonalization.
DENSE_THRESHOLD = 12000

#: Dense residual contract, relative to the spectral range.
DENSE_RESIDUAL_RTOL = 1e-9

#: Iterative residual contract, relative to a spectral-range estimate.
ITERATIVE_RESIDUAL_RTOL = 1e-8

_PHASE_FLOOR = 1e-12


@dataclass
class SpectrumResult:
    """Ascending eigenvalues (and optional eigenvectors) for one block."""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]
    residual_max: Optional[float]
    params: Optional[ModelParams] = None
    sector: Optional[Sector] = None
    method: str = "dense"

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def spectral_range(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])


def fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significant component is real positive."""
    v = vectors
    absmax = np.abs(v).max(axis=0)
    first = np.argmax(np.abs(v) > _PHASE_FLOOR * absmax, axis=0)
    lead = v[first, np.arange(v.shape[1])]
    if np.iscomplexobj(v):
        phase = lead / np.abs(lead)
        return v * phase.conj()
    return v * np.sign(lead)


def _residual_max(matrix: sp.spmatrix, w: np.ndarray, v: np.ndarray) -> float:
    r = matrix @ v - v * w
    return float(np.sqrt((np.abs(r) ** 2).sum(axis=0)).max())


def full_spectrum(
    block: HamiltonianBlock,
    want_vectors: bool = True,
    dense_threshold: int = DENSE_THRESHOLD,
) -> SpectrumResult:
    """All eigenvalues of the block, ascending, via dense diagonalization."""
    if block.dim > dense_threshold:
        raise CapacityError(
            f"block dimension {block.dim} exceeds the dense threshold {dense_threshold}"
        )
    dense = block.toarray()
    if want_vectors:
        try:
            w, v = np.linalg.eigh(dense)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - defective build
            raise ConvergenceError(f"dense eigensolver failed: {exc}") from exc
        v = fix_phase(v)
        residual = _residual_max(block.matrix, w, v)
        spread = float(w[-1] - w[0]) or 1.0
        if residual > DENSE_RESIDUAL_RTOL * spread:
            raise ConvergenceError(
                f"dense residual {residual:.3e} violates contract "
                f"{DENSE_RESIDUAL_RTOL:.0e} * range",
                residual=residual,
            )
    else:
        w = np.linalg.eigvalsh(dense)
        v = None
        residual = None
    return SpectrumResult(
        eigenvalues=w,
        eigenvectors=v,
        residual_max=residual,
        params=block.params,
        sector=block.sector,
        method="dense",
    )


def _range_estimate(matrix: sp.spmatrix) -> float:
    """Infinity-norm bound on the spectral radius (cheap, always >= range/2)."""
    est = float(np.abs(matrix).sum(axis=1).max())
    return est if est > 0 else 1.0


def extremal_eigenpair(
    block: HamiltonianBlock,
    which: str = "lowest",
    maxiter: Optional[int] = None,
) -> tuple[float, np.ndarray]:
    """Converged extremal eigenpair via ARPACK (dense fallback when tiny).

    Deterministic: the Lanczos recursion starts from the normalized
    all-equal vector.  Raises ConvergenceError (with the attained residual)
    if the residual contract is not met.
    """
    if which != "lowest":
        raise ValueError(f"only the lowest eigenpair is supported, got {which!r}")
    matrix = block.matrix
    dim = block.dim
    est = _range_estimate(matrix)

    if dim < 16:
        w, v = np.linalg.eigh(block.toarray())
        value, vector = float(w[0]), fix_phase(v[:, :1])[:, 0]
    else:
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        try:
            w, v = spla.eigsh(matrix, k=1, which="SA", v0=v0, maxiter=maxiter)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(
                f"ARPACK did not converge within {maxiter or 'default'} iterations"
            ) from exc
        value, vector = float(w[0]), fix_phase(v)[:, 0]

    residual = float(np.linalg.norm(matrix @ vector - value * vector))
    if residual > ITERATIVE_RESIDUAL_RTOL * est:
        raise ConvergenceError(
            f"ground-state residual {residual:.3e} exceeds "
            f"{ITERATIVE_RESIDUAL_RTOL:.0e} * {est:.3e}",
            residual=residual,
        )
    return value, vector
