"""JCH Hamiltonian assembly in product and symmetry-adapted bases.

The Hamiltonian splits as H = H_int + H_tun with

    H_int = sum_i [ delta * s+_i s-_i + g * (a_i s+_i + a_i^dag s-_i) ]
    H_tun = -t * sum_bonds (a_i^dag a_j + a_i a_j^dag)

All parameter dependence is linear, so the three bare operators (excited
atom counter, on-site coupling, hopping sum) are reduced into a sector
exactly once and every (delta, t) point is a cheap linear combination.
The coupling g sets the energy unit; public parameters are delta/g and t/g.

Bond convention: PBC sums the directed bonds i -> i+1 mod L (so the single
bond of an L=2 ring is counted twice, as in the literal Hamiltonian sum);
HWBC drops the wrap-around bond; an L=1 chain has no bonds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .basis import HWBC, PBC, ProductBasis, SymBasis
from .errors import DimensionMismatchError

#: Relative Hermiticity tolerance enforced on every assembled block.
HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Couplings in units of the atom-photon coupling g."""

    delta: float
    t: float
    g: float = 1.0
    boundary: str = PBC

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError(f"coupling g must be positive, got {self.g}")
        if self.t < 0:
            raise ValueError(f"tunneling t must be >= 0, got {self.t}")
        if self.boundary not in (PBC, HWBC):
            raise ValueError(f"unknown boundary {self.boundary!r}")


def dressed_energies(n: int, delta: float, g: float = 1.0) -> tuple[float, float]:
    """Single-site dressed-state energies (E_plus, E_minus) at excitation n.

    E_pm = (delta +- chi_n)/2 with chi_n = sqrt(4 g^2 n + delta^2).  Defined
    for n >= 1; the n = 0 space is the bare ground level at energy zero.
    """
    if n < 1:
        raise ValueError(f"dressed states need n >= 1, got n={n}")
    chi = math.sqrt(4.0 * g * g * n + delta * delta)
    return (delta + chi) / 2.0, (delta - chi) / 2.0


def _bonds(L: int, boundary: str) -> list[tuple[int, int]]:
    if boundary == HWBC:
        return [(i, i + 1) for i in range(L - 1)]
    if L == 1:
        return []
    return [(i, (i + 1) % L) for i in range(L)]


def _full_space_operators(product: ProductBasis, boundary: str):
    """Bare operators over the product basis, as CSR matrices.

    Returns (excited_count, jc_coupling, hop_sum):
      excited_count: diagonal number of excited atoms (coefficient of delta)
      jc_coupling:   sum_i (a_i s+_i + a_i^dag s-_i)  (coefficient of g)
      hop_sum:       sum_bonds (a_i^dag a_j + a_i a_j^dag)  (coefficient of -t)
    """
    nfull = product.dim
    L = product.L
    ph, at = product.photons, product.atoms

    excited = sp.diags(at.sum(axis=1).astype(np.float64), format="csr")

    rows, cols, vals = [], [], []

    def add_with_dagger(src, dst, amp):
        rows.append(dst)
        cols.append(src)
        vals.append(amp)
        rows.append(src)
        cols.append(dst)
        vals.append(amp)

    # on-site a s+ : |n, g> -> sqrt(n) |n-1, e>
    for i in range(L):
        mask = (ph[:, i] >= 1) & (at[:, i] == 0)
        src = np.flatnonzero(mask)
        if src.size == 0:
            continue
        tp = ph[src].copy()
        ta = at[src].copy()
        tp[:, i] -= 1
        ta[:, i] = 1
        dst = product.index_of_keys(product.encode(tp, ta))
        add_with_dagger(src, dst, np.sqrt(ph[src, i].astype(np.float64)))
    if rows:
        coupling = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(nfull, nfull),
        ).tocsr()
    else:
        coupling = sp.csr_matrix((nfull, nfull))

    rows, cols, vals = [], [], []
    # a_i^dag a_j : move one photon j -> i, amplitude sqrt((n_i + 1) n_j)
    for i, j in _bonds(L, boundary):
        mask = ph[:, j] >= 1
        src = np.flatnonzero(mask)
        if src.size == 0:
            continue
        tp = ph[src].copy()
        tp[:, i] += 1
        tp[:, j] -= 1
        dst = product.index_of_keys(product.encode(tp, at[src]))
        amp = np.sqrt((ph[src, i] + 1.0) * ph[src, j])
        add_with_dagger(src, dst, amp)
    if rows:
        hop = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(nfull, nfull),
        ).tocsr()
    else:
        hop = sp.csr_matrix((nfull, nfull))

    return excited, coupling, hop


def sector_operators(basis: SymBasis):
    """Bare operators reduced into the sector basis (cached on the basis)."""
    cache = basis._op_cache
    if "ops" not in cache:
        excited, coupling, hop = _full_space_operators(
            basis.product, basis.sector.boundary
        )
        u = basis.isometry
        udag = u.conj().T
        reduce = lambda op: (u @ (op @ udag)).tocsr()
        cache["ops"] = (reduce(excited), reduce(coupling), reduce(hop))
    return cache["ops"]


@dataclass
class HamiltonianBlock:
    """H restricted to one sector, with separable interaction/tunneling parts."""

    basis: SymBasis
    params: ModelParams
    h_int: sp.csr_matrix
    h_tun: sp.csr_matrix

    _matrix: Optional[sp.csr_matrix] = None

    @property
    def sector(self):
        return self.basis.sector

    @property
    def dim(self) -> int:
        return self.h_int.shape[0]

    @property
    def matrix(self) -> sp.csr_matrix:
        if self._matrix is None:
            self._matrix = (self.h_int + self.h_tun).tocsr()
        return self._matrix

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.matrix)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def max_hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.conj().T
        scale = np.abs(self.matrix).max() if self.matrix.nnz else 1.0
        return float(np.abs(d).max() / scale) if d.nnz else 0.0


def build_hamiltonian(params: ModelParams, basis: SymBasis) -> HamiltonianBlock:
    """Assemble H = H_int + H_tun in the given sector basis."""
    if params.boundary != basis.sector.boundary:
        raise DimensionMismatchError(
            f"params boundary {params.boundary} != basis boundary {basis.sector.boundary}"
        )
    excited, coupling, hop = sector_operators(basis)
    h_int = (params.delta * excited + params.g * coupling).tocsr()
    h_tun = (-params.t) * hop
    block = HamiltonianBlock(basis=basis, params=params, h_int=h_int, h_tun=h_tun.tocsr())
    defect = block.max_hermiticity_defect()
    if defect > HERMITICITY_RTOL:
        raise DimensionMismatchError(f"assembled block is not Hermitian: defect {defect:.3e}")
    return block


def chiral_signs(product: ProductBasis) -> np.ndarray:
    """Diagonal of the chiral operator in the product basis.

    Sign (-1)^(photons on even sites) * (-1)^(excited atoms on odd sites),
    with 1-based site indexing: array column 1, 3, ... are the even sites.
    """
    even = np.arange(1, product.L, 2)  # 0-based columns of 1-based even sites
    odd = np.arange(0, product.L, 2)
    exponent = product.photons[:, even].sum(axis=1) + product.atoms[:, odd].sum(axis=1)
    return np.where(exponent % 2 == 0, 1.0, -1.0)


def apply_chiral(vec: np.ndarray, basis: SymBasis) -> np.ndarray:
    """Apply the chiral operator to a sector vector.

    The operator is diagonal in the product basis; in a symmetry-adapted
    basis it is conjugated through the sector isometry.  It maps the sector
    into itself (and squares to the identity there) whenever the chain
    length is even or the sector is the full space.
    """
    if vec.shape[0] != basis.dim:
        raise DimensionMismatchError(
            f"vector length {vec.shape[0]} != sector dimension {basis.dim}"
        )
    signs = chiral_signs(basis.product)
    if basis.sector.is_full_space:
        return signs * vec
    return basis.isometry @ (signs * (basis.isometry.conj().T @ vec))
