"""Degree-of-entanglement measure, natural points and the concurrence oracle.

The pure-state measure is ``E = sum_{i<j} |l_i||l_j|`` over Schmidt
coefficients.  A mixed state is credited ``E(rho) = pi * E(rho_eE)`` where
``rho = pi rho_eE + (1 - pi) rho'`` and ``rho_eE`` (the natural point) is an
ensemble of pure entangled sectors.  ``E(rho_eE)`` is taken as the
weight-averaged sector value; this extension is our interpretation, the
worked cases only ever have a single sector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, NormalizationError, NotPhysicalError
from .hilbert import (
    NORM_TOL,
    DensityMatrix,
    SchmidtForm,
    StateVector,
    schmidt_decompose,
)

X_POSITIVITY_SLACK = 1e-10
PI_ONE = 1e-12
_SQ2 = np.sqrt(0.5)

_BELL = {
    "phi+": (0, 3, 1.0),
    "phi-": (0, 3, -1.0),
    "psi+": (1, 2, 1.0),
    "psi-": (1, 2, -1.0),
}


def bell_state(kind: str = "phi+") -> StateVector:
    """One of the four Bell states; ``kind`` in phi+, phi-, psi+, psi-."""
    key = kind.lower().replace("−", "-")
    if key not in _BELL:
        raise ValueError(f"unknown Bell state {kind!r}; expected one of {sorted(_BELL)}")
    i, j, sign = _BELL[key]
    amps = np.zeros(4, dtype=complex)
    amps[i] = _SQ2
    amps[j] = sign * _SQ2
    return StateVector((2, 2), amps)


def entanglement_pure(coeffs: Sequence[complex]) -> float:
    """``sum_{i<j} |l_i||l_j|`` for a normalized Schmidt coefficient list.

    >>> entanglement_pure([0.8, 0.6])
    0.48
    """
    lam = np.abs(np.asarray(coeffs, dtype=complex).reshape(-1))
    norm2 = float(lam @ lam)
    if abs(norm2 - 1.0) > 1e-9:
        raise NormalizationError(f"Schmidt coefficients have sum(l^2) = {norm2!r}, expected 1")
    lam = np.sort(lam)[::-1]
    pairs = [lam[i] * lam[j] for i in range(lam.size) for j in range(i + 1, lam.size)]
    # dividing by sum(l^2) keeps the value scale-free against rounding in the input
    return float(np.sum(pairs) / norm2) if pairs else 0.0


def entanglement_state(psi: StateVector, cut: int = 1) -> float:
    return entanglement_pure(schmidt_decompose(psi, cut).coeffs)


@dataclass(frozen=True)
class EnsembleEntangledState:
    """Weighted pure sectors, each given in Schmidt form over one bipartition."""

    sectors: tuple[tuple[float, SchmidtForm], ...]

    def __post_init__(self):
        sectors = tuple((float(p), form) for p, form in self.sectors)
        if not sectors:
            raise NormalizationError("need at least one sector")
        total = sum(p for p, _ in sectors)
        if abs(total - 1.0) > NORM_TOL or any(p < 0 for p, _ in sectors):
            raise NormalizationError(f"sector weights sum to {total!r}, expected 1")
        dims, cut = sectors[0][1].dims, sectors[0][1].cut
        if any(f.dims != dims or f.cut != cut for _, f in sectors):
            raise DimensionError("all sectors must share dims and bipartition")
        object.__setattr__(self, "sectors", sectors)

    @property
    def dims(self):
        return self.sectors[0][1].dims

    def density(self) -> DensityMatrix:
        m = 0
        for p, form in self.sectors:
            a = form.amplitudes()
            m = m + p * np.outer(a, a.conj())
        return DensityMatrix(self.dims, m)


def entanglement_ensemble(e: EnsembleEntangledState) -> float:
    return float(sum(p * entanglement_pure(form.coeffs) for p, form in e.sectors))


@dataclass(frozen=True)
class XState:
    """Two-qubit state whose only coherences are rho_14 = w and rho_23 = z."""

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    w: complex = 0j
    z: complex = 0j

    def __post_init__(self):
        diag = (self.rho11, self.rho22, self.rho33, self.rho44)
        if any(d < -X_POSITIVITY_SLACK for d in diag):
            raise NotPhysicalError(f"diagonal must be non-negative, got {diag}")
        if abs(sum(diag) - 1.0) > NORM_TOL:
            raise NotPhysicalError(f"diagonal sums to {sum(diag)!r}, expected 1")
        bound_w = np.sqrt(max(self.rho11, 0.0) * max(self.rho44, 0.0))
        bound_z = np.sqrt(max(self.rho22, 0.0) * max(self.rho33, 0.0))
        if abs(self.w) > bound_w + X_POSITIVITY_SLACK:
            raise NotPhysicalError(f"|w| = {abs(self.w):.12g} exceeds sqrt(rho11 rho44) = {bound_w:.12g}")
        if abs(self.z) > bound_z + X_POSITIVITY_SLACK:
            raise NotPhysicalError(f"|z| = {abs(self.z):.12g} exceeds sqrt(rho22 rho33) = {bound_z:.12g}")

    def matrix(self) -> np.ndarray:
        m = np.diag(np.array([self.rho11, self.rho22, self.rho33, self.rho44], dtype=complex))
        m[0, 3], m[3, 0] = self.w, np.conj(self.w)
        m[1, 2], m[2, 1] = self.z, np.conj(self.z)
        return m

    def density(self) -> DensityMatrix:
        return DensityMatrix((2, 2), self.matrix())

    @classmethod
    def from_density(cls, rho: DensityMatrix, tol: float = 1e-10) -> "XState":
        if rho.dims != (2, 2):
            raise DimensionError(f"X states are two-qubit, got dims {list(rho.dims)}")
        m = rho.matrix
        mask = np.ones((4, 4), dtype=bool)
        for i, j in ((0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)):
            mask[i, j] = False
        stray = float(np.max(np.abs(m[mask])))
        if stray > tol:
            raise NotPhysicalError(f"matrix is not of X form (off-X element {stray:.3g})")
        d = np.real(np.diag(m))
        return cls(d[0], d[1], d[2], d[3], complex(m[0, 3]), complex(m[1, 2]))


def x_state_entanglement(x: XState) -> float:
    return abs(x.w) + abs(x.z)


def werner_state(z: float) -> DensityMatrix:
    """``(1-z)/4 I + z |Psi-><Psi-|``; rho_23 = -z/2."""
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"Werner parameter z must lie in [0, 1], got {z}")
    noise = (1.0 - z) / 4.0
    m = np.diag([noise, noise + z / 2, noise + z / 2, noise]).astype(complex)
    m[1, 2] = m[2, 1] = -z / 2
    return DensityMatrix((2, 2), m)


@dataclass(frozen=True)
class NaturalPoint:
    """Split ``rho = pi * rho_eE + (1 - pi) * residual``.

    ``eE`` is None when pi = 0 (nothing entangled to extract) and
    ``residual`` is None when pi = 1 (it carries zero weight and is
    undefined).
    """

    pi: float
    eE: EnsembleEntangledState | None
    residual: DensityMatrix | None

    @property
    def residual_defined(self) -> bool:
        return self.residual is not None

    def sigma(self) -> DensityMatrix | None:
        return None if self.eE is None else self.eE.density()

    def reconstruct(self) -> np.ndarray:
        m = 0
        if self.eE is not None:
            m = m + self.pi * self.eE.density().matrix
        if self.residual is not None:
            m = m + (1.0 - self.pi) * self.residual.matrix
        return np.asarray(m, dtype=complex)


def entanglement_mixed(point: NaturalPoint) -> float:
    if point.eE is None:
        return 0.0
    return point.pi * entanglement_ensemble(point.eE)


def _pair_sector(coh: complex, lo: float, hi: float, lo_idx: int, hi_idx: int):
    """Pure sector on the basis pair (lo_idx, hi_idx) carrying coherence ``coh``.

    The sector takes all of the ``hi`` population and ``|coh|^2 / hi`` of the
    ``lo`` population, so ``p^2 |a|^2 |b|^2 = |coh|^2`` and the sector is pure.
    Returns (weight, amplitude vector over 4 basis states, lo taken, hi taken).
    """
    take_lo = abs(coh) ** 2 / hi
    take_lo = min(take_lo, max(lo, 0.0))
    p = take_lo + hi
    amps = np.zeros(4, dtype=complex)
    # rho[lo, hi] = p a conj(b); put the phase on a, b real
    amps[lo_idx] = np.sqrt(take_lo / p) * np.exp(1j * np.angle(coh))
    amps[hi_idx] = np.sqrt(hi / p)
    return p, amps, take_lo, hi


def _form_from_amps(amps: np.ndarray) -> SchmidtForm:
    """Schmidt form of an X-pair sector, read off directly.

    The two basis states of a pair differ on both qubits, so the sector is
    already in Schmidt form; going through the SVD would zero out
    coefficients below its cutoff and lose small but real entanglement.
    """
    terms = []
    for k in np.flatnonzero(amps):
        i, j = divmod(int(k), 2)
        right = np.zeros(2, dtype=complex)
        right[j] = np.exp(1j * np.angle(amps[k]))
        terms.append((abs(amps[k]), np.eye(2, dtype=complex)[i], right))
    terms.sort(key=lambda term: -term[0])
    coeffs = np.array([c for c, _, _ in terms])
    coeffs = coeffs / np.linalg.norm(coeffs)
    return SchmidtForm(coeffs, np.array([l for _, l, _ in terms]), np.array([r for _, _, r in terms]), 1, (2, 2))


def natural_point_x(x: XState) -> NaturalPoint:
    """Closed-form natural point of an X state.

    Each non-zero coherence contributes one pure sector on its basis pair
    (|00>,|11> for w; |01>,|10> for z).  The residual is the diagonal
    remainder, so ``pi * E(rho_eE) = |w| + |z|``.
    """
    diag = [max(x.rho11, 0.0), max(x.rho22, 0.0), max(x.rho33, 0.0), max(x.rho44, 0.0)]
    taken = [0.0, 0.0, 0.0, 0.0]
    sectors = []
    for coh, lo_idx, hi_idx in ((x.w, 0, 3), (x.z, 1, 2)):
        if abs(coh) == 0.0 or diag[hi_idx] == 0.0:
            continue
        p, amps, t_lo, t_hi = _pair_sector(coh, diag[lo_idx], diag[hi_idx], lo_idx, hi_idx)
        taken[lo_idx] += t_lo
        taken[hi_idx] += t_hi
        sectors.append((p, amps))

    if not sectors:
        return NaturalPoint(0.0, None, x.density())

    pi = float(sum(p for p, _ in sectors))
    eE = EnsembleEntangledState(tuple((p / pi, _form_from_amps(a)) for p, a in sectors))
    rest = np.clip(np.array(diag) - np.array(taken), 0.0, None)
    if 1.0 - pi < PI_ONE or rest.sum() <= 0.0:
        return NaturalPoint(1.0, eE, None)
    residual = DensityMatrix((2, 2), np.diag(rest / rest.sum()).astype(complex))
    return NaturalPoint(pi, eE, residual)


def natural_point(rho: DensityMatrix) -> NaturalPoint:
    """Natural point for density matrices of X form (the only closed-form case)."""
    return natural_point_x(XState.from_density(rho))


_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


def concurrence_two_qubit(rho: DensityMatrix) -> float:
    """Wootters concurrence ``max(0, m1 - m2 - m3 - m4)``."""
    if rho.dims != (2, 2):
        raise DimensionError(f"concurrence needs a two-qubit state, got dims {list(rho.dims)}")
    w, v = np.linalg.eigh(rho.matrix)
    # round-off eigenvalues would otherwise leak ~sqrt(eps) into mu
    w = np.where(w > 1e-14 * max(w.max(), 1.0), w, 0.0)
    sqrt_rho = (v * np.sqrt(w)) @ v.conj().T
    # mu_i = singular values of sqrt(rho) sqrt(rho~), sqrt(rho~) = YY sqrt(rho)* YY
    mu = np.linalg.svd(sqrt_rho @ _YY @ sqrt_rho.conj(), compute_uv=False)
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


def concurrence_x(x: XState) -> float:
    """Closed-form concurrence of an X state."""
    return 2.0 * max(0.0, concurrence_x_margin(x))


def concurrence_x_margin(x: XState) -> float:
    """Signed argument of the X-state concurrence; positive iff C > 0."""
    return max(
        abs(x.w) - np.sqrt(max(x.rho22 * x.rho33, 0.0)),
        abs(x.z) - np.sqrt(max(x.rho11 * x.rho44, 0.0)),
    )
