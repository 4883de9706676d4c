"""Product basis and symmetry-adapted sector bases for the JCH chain.

Each cavity carries a photon mode and a two-level atom, so a product state
is a string of per-site pairs (n_i, a_i) with n_i photons and a_i in {0, 1}
(ground/excited).  The total excitation number N = sum(n_i + a_i) is
conserved, which makes every fixed-(L, N) space finite without any photon
cutoff: n_i can never exceed N.

States are encoded as mixed-radix integer keys (site 0 most significant,
per-site digit 2*n + a with radix 2*(N+1)), so lexicographic order of the
site tuples coincides with numeric key order and lookups are a single
searchsorted.

Sector bases for conserved momentum Q (periodic chains) and reflection
parity p are built with the standard orbit-representative technique: the
group projector is applied to the minimal-key member of each symmetry
orbit, zero-norm vectors are discarded, and the surviving vectors are
stored row-wise as a sparse isometry U of shape (D, N_full).  Rows touch at
most |G| product states, so no full-space projector is ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, SectorError

PBC = "PBC"
HWBC = "HWBC"
BOUNDARIES = (PBC, HWBC)

#: Hard cap on enumerated product-basis sizes (L=10, N=10 is ~4.8e6).
MAX_STATES = 6_000_000

#: Norm below which a projected orbit vector is treated as exactly zero.
#: Nonzero norms are quantized at >= 1/sqrt(|G|) >= 1/sqrt(2L), so the
#: threshold has orders of magnitude of headroom.
_NORM_FLOOR = 1e-8


@dataclass(frozen=True)
class SiteState:
    """One cavity: photon count plus atomic level (g=0, e=1)."""

    photons: int
    atom: int

    def __post_init__(self):
        if self.photons < 0:
            raise ValueError(f"photon count must be >= 0, got {self.photons}")
        if self.atom not in (0, 1):
            raise ValueError(f"atom level must be 0 or 1, got {self.atom}")

    @property
    def excitations(self) -> int:
        return self.photons + self.atom


@dataclass(frozen=True)
class BasisState:
    """A product state over the whole chain."""

    sites: tuple[SiteState, ...]

    @property
    def L(self) -> int:
        return len(self.sites)

    @property
    def excitations(self) -> int:
        return sum(s.excitations for s in self.sites)

    def photon_tuple(self) -> tuple[int, ...]:
        return tuple(s.photons for s in self.sites)

    def atom_tuple(self) -> tuple[int, ...]:
        return tuple(s.atom for s in self.sites)

    def key(self, radix: Optional[int] = None) -> int:
        """Mixed-radix integer key; unique within fixed (L, N)."""
        base = radix if radix is not None else 2 * (self.excitations + 1)
        k = 0
        for s in self.sites:
            k = k * base + 2 * s.photons + s.atom
        return k


def apply_translation(state: BasisState) -> BasisState:
    """Cyclic shift by one site: (s1, ..., sL) -> (sL, s1, ..., s(L-1))."""
    sites = state.sites
    return BasisState(sites[-1:] + sites[:-1])


def apply_reflection(state: BasisState) -> BasisState:
    """Site-order reversal about the chain center."""
    return BasisState(tuple(reversed(state.sites)))


def full_dimension(L: int, N: int) -> int:
    """Number of product states with exactly N excitations on L sites.

    Counts s excited atoms on C(L, s) site subsets and distributes the
    remaining N-s photons freely, summed over s = 0..min(N, L).
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    return sum(comb(L, s) * comb(N - s + L - 1, L - 1) for s in range(min(N, L) + 1))


class ProductBasis(Sequence):
    """Ordered enumeration of all (L, N) product states.

    Behaves as a sequence of :class:`BasisState` while storing the states
    as integer arrays: ``photons`` and ``atoms`` of shape (dim, L) and the
    sorted ``keys`` of shape (dim,).
    """

    def __init__(self, L: int, N: int, max_states: int = MAX_STATES):
        if L < 1:
            raise ValueError(f"L must be >= 1, got {L}")
        if N < 0:
            raise ValueError(f"N must be >= 0, got {N}")
        dim = full_dimension(L, N)
        if dim > max_states:
            raise CapacityError(
                f"basis for L={L}, N={N} has {dim} states, exceeding the cap {max_states}"
            )
        self.L = L
        self.N = N
        self.radix = 2 * (N + 1)
        if self.radix ** L > np.iinfo(np.int64).max:
            raise CapacityError(f"state keys for L={L}, N={N} overflow int64")
        self.photons, self.atoms = _enumerate_states(L, N, dim)
        self.keys = self.encode(self.photons, self.atoms)
        # DFS emits site digits most-significant first: already key-sorted.
        assert np.all(np.diff(self.keys) > 0)

    # -- sequence protocol -------------------------------------------------

    def __len__(self) -> int:
        return self.keys.shape[0]

    def __getitem__(self, i) -> BasisState:
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return self.state(int(i))

    def __iter__(self) -> Iterator[BasisState]:
        for i in range(len(self)):
            yield self.state(i)

    # -- array-level interface ----------------------------------------------

    @property
    def dim(self) -> int:
        return self.keys.shape[0]

    def state(self, i: int) -> BasisState:
        return BasisState(
            tuple(
                SiteState(int(n), int(a))
                for n, a in zip(self.photons[i], self.atoms[i])
            )
        )

    def encode(self, photons: np.ndarray, atoms: np.ndarray) -> np.ndarray:
        """Vectorized key computation for arrays of shape (..., L)."""
        digits = 2 * photons.astype(np.int64) + atoms.astype(np.int64)
        powers = self.radix ** np.arange(self.L - 1, -1, -1, dtype=np.int64)
        return digits @ powers

    def index_of_keys(self, keys: np.ndarray) -> np.ndarray:
        """Positions of the given keys; every key must belong to the basis."""
        idx = np.searchsorted(self.keys, keys)
        if np.any(idx >= len(self)) or np.any(self.keys[idx] != keys):
            raise KeyError("key does not belong to this basis")
        return idx

    def index(self, state: BasisState) -> int:
        if state.excitations != self.N or state.L != self.L:
            raise KeyError("state has wrong length or excitation number")
        key = state.key(self.radix)
        return int(self.index_of_keys(np.asarray([key], dtype=np.int64))[0])


def _enumerate_states(L: int, N: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """DFS over sites in ascending digit order; output is key-sorted."""
    photons = np.empty((dim, L), dtype=np.int16)
    atoms = np.empty((dim, L), dtype=np.int8)
    row_p = np.empty(L, dtype=np.int16)
    row_a = np.empty(L, dtype=np.int8)
    cursor = 0

    def fill(site: int, remaining: int):
        nonlocal cursor
        if site == L - 1:
            # last site must absorb the remainder; digit order (n-1,e) < (n,g)
            if remaining >= 1:
                row_p[site] = remaining - 1
                row_a[site] = 1
                photons[cursor] = row_p
                atoms[cursor] = row_a
                cursor += 1
            row_p[site] = remaining
            row_a[site] = 0
            photons[cursor] = row_p
            atoms[cursor] = row_a
            cursor += 1
            return
        for n in range(remaining + 1):
            row_p[site] = n
            for a in (0, 1):
                if n + a > remaining:
                    break
                row_a[site] = a
                fill(site + 1, remaining - n - a)

    fill(0, N)
    assert cursor == dim
    return photons, atoms


def enumerate_basis(L: int, N: int, max_states: int = MAX_STATES) -> ProductBasis:
    """All product states with N excitations on L sites, in canonical order."""
    return ProductBasis(L, N, max_states=max_states)


@dataclass(frozen=True)
class Sector:
    """Conserved-quantity labels of one symmetry block.

    Q is the momentum index in [0, L) and only exists under PBC; p is the
    reflection parity (+1/-1) and may be combined with momentum only in the
    self-conjugate sectors Q = 0 and Q = L/2.  Q = p = None selects the
    unreduced product basis (used by cross-check oracles).
    """

    L: int
    N: int
    boundary: str
    Q: Optional[int] = None
    p: Optional[int] = None

    def __post_init__(self):
        if self.boundary not in BOUNDARIES:
            raise SectorError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.L < 1 or self.N < 0:
            raise SectorError(f"bad sector size L={self.L}, N={self.N}")
        if self.p not in (None, 1, -1):
            raise SectorError(f"parity must be +1, -1 or None, got {self.p}")
        if self.boundary == HWBC:
            if self.Q is not None:
                raise SectorError("momentum Q is undefined under HWBC")
        else:
            if self.Q is not None:
                if not 0 <= self.Q < self.L:
                    raise SectorError(f"Q={self.Q} outside [0, {self.L})")
                if self.p is not None and not self._is_self_conjugate(self.Q):
                    raise SectorError(
                        f"parity cannot be combined with Q={self.Q}; reflection maps Q to -Q"
                    )
            elif self.p is not None:
                raise SectorError("parity without momentum is not a PBC sector label")

    def _is_self_conjugate(self, Q: int) -> bool:
        return Q == 0 or (self.L % 2 == 0 and Q == self.L // 2)

    @property
    def filling(self) -> float:
        return self.N / self.L

    @property
    def is_full_space(self) -> bool:
        return self.Q is None and self.p is None

    def label(self) -> str:
        parts = [f"L{self.L}", f"N{self.N}", self.boundary]
        if self.Q is not None:
            parts.append(f"Q{self.Q}")
        if self.p is not None:
            parts.append(f"p{'+' if self.p > 0 else '-'}1")
        return "_".join(parts)


def sector_labels(L: int, N: int, boundary: str) -> list[Sector]:
    """A complete, disjoint set of sectors for one (L, N, boundary) family."""
    if boundary == HWBC:
        return [Sector(L, N, HWBC, p=1), Sector(L, N, HWBC, p=-1)]
    sectors = []
    for Q in range(L):
        if Q == 0 or (L % 2 == 0 and Q == L // 2):
            sectors.append(Sector(L, N, PBC, Q=Q, p=1))
            sectors.append(Sector(L, N, PBC, Q=Q, p=-1))
        else:
            sectors.append(Sector(L, N, PBC, Q=Q))
    return sectors


@dataclass
class SymBasis:
    """Orthonormal symmetry-adapted basis of one sector.

    ``isometry`` holds the basis vectors as rows over the product basis:
    U @ U.conj().T = identity on the sector, and O_sector = U O U^dagger for
    any symmetric operator O.  ``normalizations`` are the pre-normalization
    norms of the projected representatives.
    """

    sector: Sector
    product: ProductBasis
    rep_indices: np.ndarray
    normalizations: np.ndarray
    isometry: sp.csr_matrix

    _op_cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.isometry.shape[0]

    @property
    def dimension(self) -> int:
        return self.dim

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.isometry)

    @property
    def representatives(self) -> list[BasisState]:
        return [self.product.state(int(i)) for i in self.rep_indices]

    def expand(self, vec: np.ndarray) -> np.ndarray:
        """Lift a sector vector back to product-basis amplitudes."""
        if vec.shape[0] != self.dim:
            raise ValueError(f"vector length {vec.shape[0]} != sector dim {self.dim}")
        return self.isometry.conj().T @ vec

    def project(self, full_vec: np.ndarray) -> np.ndarray:
        return self.isometry @ full_vec


def _group_elements(sector: Sector) -> tuple[list[tuple[int, bool]], np.ndarray]:
    """Formal group elements (shift l, reflect?) and projector coefficients.

    Characters are chi(T^l) = exp(2*pi*i*Q*l/L) and chi(T^l P) = chi(T^l)*p;
    the projector uses conj(chi)/|G|.  Coefficients come out exactly real
    for Q in {0, L/2}, which keeps those sectors in float64.
    """
    L = sector.L
    if sector.boundary == HWBC:
        elements = [(0, False)]
        if sector.p is not None:
            elements.append((0, True))
        chars = np.array([1.0] + ([float(sector.p)] if sector.p is not None else []))
        return elements, chars.astype(np.float64) / len(elements)

    elements = [(l, False) for l in range(L)]
    chars = [np.exp(2j * np.pi * sector.Q * l / L) for l in range(L)]
    if sector.p is not None:
        elements += [(l, True) for l in range(L)]
        chars += [sector.p * np.exp(2j * np.pi * sector.Q * l / L) for l in range(L)]
    chars = np.conj(np.asarray(chars)) / len(elements)
    if sector.Q == 0 or (L % 2 == 0 and sector.Q == L // 2):
        chars = chars.real.astype(np.float64)
    return elements, chars


def _transformed_keys(product: ProductBasis, shift: int, reflect: bool) -> np.ndarray:
    p, a = product.photons, product.atoms
    if reflect:
        p, a = p[:, ::-1], a[:, ::-1]
    if shift % product.L:
        p = np.roll(p, shift % product.L, axis=1)
        a = np.roll(a, shift % product.L, axis=1)
    return product.encode(p, a)


def build_sector_basis(
    L: int,
    N: int,
    boundary: str,
    Q: Optional[int] = None,
    p: Optional[int] = None,
    product: Optional[ProductBasis] = None,
    max_states: int = MAX_STATES,
) -> SymBasis:
    """Construct the orthonormal symmetry-adapted basis of one sector.

    For the full-space pseudo-sector (Q = p = None under PBC, p = None under
    HWBC) the isometry is the identity.
    """
    sector = Sector(L, N, boundary, Q=Q, p=p)
    if product is None:
        product = ProductBasis(L, N, max_states=max_states)
    elif (product.L, product.N) != (L, N):
        raise SectorError("product basis does not match the requested sector")
    nfull = product.dim

    if sector.is_full_space:
        return SymBasis(
            sector=sector,
            product=product,
            rep_indices=np.arange(nfull, dtype=np.int64),
            normalizations=np.ones(nfull),
            isometry=sp.identity(nfull, dtype=np.float64, format="csr"),
        )

    elements, coeffs = _group_elements(sector)
    target_idx = np.empty((len(elements), nfull), dtype=np.int64)
    orbit_min = np.full(nfull, np.iinfo(np.int64).max, dtype=np.int64)
    for k, (shift, reflect) in enumerate(elements):
        tkeys = _transformed_keys(product, shift, reflect)
        target_idx[k] = product.index_of_keys(tkeys)
        np.minimum(orbit_min, tkeys, out=orbit_min)

    reps = np.flatnonzero(orbit_min == product.keys)  # orbit-minimal states
    nreps = reps.shape[0]

    rows = np.repeat(np.arange(nreps, dtype=np.int64), len(elements))
    cols = target_idx[:, reps].T.ravel()
    data = np.tile(coeffs, nreps)
    u = sp.coo_matrix((data, (rows, cols)), shape=(nreps, nfull)).tocsr()

    norms = np.sqrt(np.asarray(u.multiply(u.conj()).sum(axis=1)).ravel().real)
    keep = norms > _NORM_FLOOR
    u = u[keep]
    norms = norms[keep]
    u = sp.diags(1.0 / norms) @ u
    u.sort_indices()

    return SymBasis(
        sector=sector,
        product=product,
        rep_indices=reps[keep],
        normalizations=norms,
        isometry=u.tocsr(),
    )
