"""Dense linear algebra on small multi-party Hilbert spaces.

States are stored as flat complex amplitude vectors in lexicographic basis
order, last subsystem fastest, so ``amps[i0*d1*d2 + i1*d2 + i2]`` is the
amplitude of ``|i0 i1 i2>``.  Density matrices use the same ordering on both
indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionError,
    NonUnitaryError,
    NormalizationError,
    NotPhysicalError,
    ZeroBranchError,
)

MAX_DIM = 2**16
NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-10
UNITARY_TOL = 1e-10
SCHMIDT_ZERO = 1e-10
BRANCH_ZERO = 1e-12


def check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise DimensionError("dims must list at least one subsystem")
    if any(d < 2 for d in dims):
        raise DimensionError(f"every subsystem dimension must be >= 2, got {list(dims)}")
    if prod(dims) > MAX_DIM:
        raise DimensionError(
            f"total dimension {prod(dims)} exceeds the cap of {MAX_DIM}"
        )
    return dims


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of a multi-party system."""

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        dims = check_dims(self.dims)
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != prod(dims):
            raise DimensionError(
                f"expected {prod(dims)} amplitudes for dims {list(dims)}, got {amps.size}"
            )
        if not np.all(np.isfinite(amps)):
            raise NormalizationError("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NormalizationError(f"state norm^2 is {norm2!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, amps, dims: Sequence[int]) -> "StateVector":
        """Build a state from amplitudes of any non-zero norm."""
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm) or norm < BRANCH_ZERO:
            raise NormalizationError("cannot normalize a zero or non-finite vector")
        return cls(tuple(dims), amps / norm)

    @classmethod
    def basis(cls, dims: Sequence[int], indices: Sequence[int]) -> "StateVector":
        """Computational basis state ``|indices>``."""
        dims = check_dims(dims)
        if len(indices) != len(dims) or any(not 0 <= i < d for i, d in zip(indices, dims)):
            raise DimensionError(f"basis index {list(indices)} invalid for dims {list(dims)}")
        amps = np.zeros(prod(dims), dtype=complex)
        amps[np.ravel_multi_index(tuple(indices), dims)] = 1.0
        return cls(dims, amps)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amps, self.amps.conj()))

    def amplitude(self, *indices: int) -> complex:
        return complex(self.tensor()[tuple(indices)])

    def __repr__(self):
        return f"StateVector(dims={list(self.dims)}, amps={np.array2string(self.amps, precision=4)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = check_dims(self.dims)
        n = prod(dims)
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (n, n):
            raise DimensionError(f"expected a {n}x{n} matrix for dims {list(dims)}, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NotPhysicalError("matrix elements must be finite")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > HERMITIAN_TOL:
            raise NotPhysicalError(f"matrix is not Hermitian (max deviation {herm:.3g})")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotPhysicalError(f"trace is {tr.real:.12g}, expected 1")
        lo = float(np.linalg.eigvalsh(m).min())
        if lo < -PSD_TOL:
            raise NotPhysicalError(f"matrix has negative eigenvalue {lo:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    def element(self, i: int, j: int) -> complex:
        """Element by 1-based index, matching the rho_14-style labels."""
        return complex(self.matrix[i - 1, j - 1])

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """Bipartite form ``sum_i coeffs[i] |left_i>|right_i>``.

    ``left_basis`` has one row per term (length ``prod(dims[:cut])``),
    ``right_basis`` likewise for the remaining subsystems.
    """

    coeffs: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    cut: int
    dims: tuple[int, ...]

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        left = np.asarray(self.left_basis, dtype=complex)
        right = np.asarray(self.right_basis, dtype=complex)
        if np.any(coeffs < 0):
            raise NormalizationError("Schmidt coefficients must be non-negative")
        if abs(float(coeffs @ coeffs) - 1.0) > NORM_TOL:
            raise NormalizationError("Schmidt coefficients must satisfy sum(l^2) = 1")
        k = coeffs.size
        if left.shape[0] != k or right.shape[0] != k:
            raise DimensionError("one left and one right basis vector per coefficient")
        for name, basis in (("left", left), ("right", right)):
            gram = basis.conj() @ basis.T
            if np.max(np.abs(gram - np.eye(k))) > 1e-9:
                raise NormalizationError(f"{name} basis is not orthonormal")
        for arr in (coeffs, left, right):
            arr.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "left_basis", left)
        object.__setattr__(self, "right_basis", right)
        object.__setattr__(self, "dims", tuple(self.dims))

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.coeffs))

    def amplitudes(self) -> np.ndarray:
        return np.einsum("k,ka,kb->ab", self.coeffs, self.left_basis, self.right_basis).reshape(-1)

    def reconstruct(self) -> StateVector:
        return StateVector.normalized(self.amplitudes(), self.dims)


@dataclass(frozen=True)
class EnsembleState:
    """Incoherent ensemble of sectors ``[(p, psi), ...]``.

    Only the weights ``p = |gamma|^2`` are kept; the density operator is
    always the weighted sum of sector projectors.
    """

    sectors: tuple[tuple[float, StateVector], ...]

    def __post_init__(self):
        sectors = tuple((float(p), psi) for p, psi in self.sectors)
        if not sectors:
            raise NormalizationError("an ensemble needs at least one sector")
        if any(not 0.0 < p <= 1.0 for p, _ in sectors):
            raise NormalizationError("sector weights must lie in (0, 1]")
        total = sum(p for p, _ in sectors)
        if abs(total - 1.0) > NORM_TOL:
            raise NormalizationError(f"sector weights sum to {total!r}, expected 1")
        dims = sectors[0][1].dims
        if any(psi.dims != dims for _, psi in sectors):
            raise DimensionError("all sectors must share the same dims")
        object.__setattr__(self, "sectors", sectors)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.sectors[0][1].dims


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    dims = check_dims(a.dims + b.dims)
    return StateVector.normalized(np.kron(a.amps, b.amps), dims)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems retain their original relative order.
    """
    n = len(rho.dims)
    keep_list = list(keep)
    if not keep_list:
        raise DimensionError("keep must name at least one subsystem")
    if len(set(keep_list)) != len(keep_list) or any(not 0 <= k < n for k in keep_list):
        raise DimensionError(f"invalid subsystem set {keep_list} for {n} parties")
    kept = sorted(keep_list)
    traced = [i for i in range(n) if i not in kept]
    t = rho.matrix.reshape(rho.dims + rho.dims)
    # einsum labels: row index i -> letter i, column index -> letter n+i
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    for i in traced:
        letters[n + i] = letters[i]
    out = "".join(letters[i] for i in kept) + "".join(letters[n + i] for i in kept)
    reduced = np.einsum("".join(letters) + "->" + out, t)
    dims = tuple(rho.dims[i] for i in kept)
    d = prod(dims)
    m = reduced.reshape(d, d)
    return DensityMatrix(dims, 0.5 * (m + m.conj().T))


def bipartition_dims(dims: Sequence[int], cut: int) -> tuple[int, int]:
    if not 1 <= cut < len(dims):
        raise DimensionError(f"cut {cut} must split {len(dims)} parties into two non-empty groups")
    return prod(dims[:cut]), prod(dims[cut:])


def schmidt_decompose(psi: StateVector, cut: int = 1) -> SchmidtForm:
    """Schmidt form across the split ``dims[:cut] | dims[cut:]``.

    Coefficients come back in descending order; degenerate coefficients are
    ordered by the position of the first significant entry of the left
    vector, and each left vector is phase-fixed so that entry is real and
    positive.
    """
    da, db = bipartition_dims(psi.dims, cut)
    u, s, vh = np.linalg.svd(psi.amps.reshape(da, db), full_matrices=False)
    left = u.T.copy()
    right = vh.copy()
    s = np.where(s < SCHMIDT_ZERO, 0.0, s)

    leading = np.empty(len(s), dtype=int)
    for k in range(len(s)):
        mags = np.abs(left[k])
        idx = int(np.argmax(mags > mags.max() * 1e-6))
        leading[k] = idx
        phase = left[k, idx] / abs(left[k, idx])
        left[k] /= phase
        right[k] *= phase

    # group near-equal singular values before applying the tie-break
    order = sorted(range(len(s)), key=lambda k: (-round(s[k], 9), leading[k]))
    coeffs = s[order]
    coeffs = coeffs / np.sqrt(coeffs @ coeffs)
    return SchmidtForm(coeffs, left[order], right[order], cut, psi.dims)


def overlap(a: StateVector, b: StateVector) -> complex:
    if a.dims != b.dims:
        raise DimensionError(f"dims differ: {list(a.dims)} vs {list(b.dims)}")
    return complex(np.vdot(a.amps, b.amps))


def equal_mod_phase(a: StateVector, b: StateVector, tol: float = 1e-10) -> bool:
    return abs(overlap(a, b)) >= 1.0 - tol


def _check_unitary(u: np.ndarray, dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim):
        raise DimensionError(f"operator of shape {u.shape} does not act on dimension {dim}")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(dim))))
    if dev > UNITARY_TOL:
        raise NonUnitaryError(f"operator is not unitary (max |U^dag U - I| = {dev:.3g})")
    return u


def _apply_on(amps: np.ndarray, dims: tuple[int, ...], op: np.ndarray, target: int) -> np.ndarray:
    t = amps.reshape(dims)
    t = np.tensordot(op, t, axes=([1], [target]))
    return np.moveaxis(t, 0, target).reshape(-1)


def _check_target(dims: tuple[int, ...], target: int) -> int:
    if not 0 <= target < len(dims):
        raise DimensionError(f"target {target} out of range for {len(dims)} parties")
    return target


def apply_local_unitary(psi: StateVector, u, target: int) -> StateVector:
    target = _check_target(psi.dims, target)
    u = _check_unitary(u, psi.dims[target])
    out = _apply_on(psi.amps, psi.dims, u, target)
    # unitary checked to 1e-10; absorb the residual norm drift
    return StateVector.normalized(out, psi.dims)


def _as_projector_vector(projector, dim: int) -> np.ndarray:
    p = np.asarray(projector, dtype=complex)
    if p.ndim == 1:
        v = p
    elif p.shape == (dim, dim):
        w, vecs = np.linalg.eigh(0.5 * (p + p.conj().T))
        if abs(w[-1] - 1.0) > NORM_TOL or np.max(np.abs(w[:-1])) > NORM_TOL:
            raise NormalizationError("projector must be rank one with unit eigenvalue")
        v = vecs[:, -1]
    else:
        raise DimensionError(f"projector shape {p.shape} does not match dimension {dim}")
    if v.size != dim:
        raise DimensionError(f"projector vector length {v.size} does not match dimension {dim}")
    if abs(np.vdot(v, v).real - 1.0) > NORM_TOL:
        raise NormalizationError("projector vector must be normalized")
    return v


def project_branch(psi: StateVector, projector, target: int) -> tuple[StateVector, float]:
    """Apply ``|v><v|`` on subsystem ``target``.

    ``projector`` is either the vector ``v`` or the rank-one matrix.  Returns
    the renormalized branch and its weight; raises :class:`ZeroBranchError`
    when the weight is below 1e-12.
    """
    target = _check_target(psi.dims, target)
    v = _as_projector_vector(projector, psi.dims[target])
    out = _apply_on(psi.amps, psi.dims, np.outer(v, v.conj()), target)
    weight = float(np.vdot(out, out).real)
    if weight < BRANCH_ZERO:
        raise ZeroBranchError(f"branch weight {weight:.3g} is below {BRANCH_ZERO}")
    return StateVector(psi.dims, out / np.sqrt(weight)), weight


def ensemble_density(e: EnsembleState) -> DensityMatrix:
    m = sum(p * np.outer(psi.amps, psi.amps.conj()) for p, psi in e.sectors)
    return DensityMatrix(e.dims, m)
