"""Preferred-basis analysis for the spin (S) / atom (A) / environment (E) model.

Computational basis labels: spin u=|0>, d=|1>; atom U=|0>, D=|1>;
environment mu=|0>, delta=|1>.  Rotated bases:

    S+- = (u +- i d)/sqrt2      A+- = (U +- D)/sqrt2      E+- = (mu -+ i delta)/sqrt2

The E+- labels are chosen so that the coupled state at A(t) = pi/4 reads
(|dU E-> - i|uD E+>)/sqrt2; with the opposite labelling the two E states
swap roles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionError, NormalizationError, ZeroBranchError
from .hilbert import (
    BRANCH_ZERO,
    NORM_TOL,
    DensityMatrix,
    SchmidtForm,
    StateVector,
    bipartition_dims,
    partial_trace,
    project_branch,
    schmidt_decompose,
)

_R2 = np.sqrt(0.5)

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)
U_ATOM, D_ATOM = UP, DOWN
MU, DELTA = UP, DOWN
S_PLUS = _R2 * (UP + 1j * DOWN)
S_MINUS = _R2 * (UP - 1j * DOWN)
A_PLUS = _R2 * (U_ATOM + D_ATOM)
A_MINUS = _R2 * (U_ATOM - D_ATOM)
E_PLUS = _R2 * (MU - 1j * DELTA)
E_MINUS = _R2 * (MU + 1j * DELTA)

BASES = {
    "ud": (U_ATOM, D_ATOM),
    "apm": (A_PLUS, A_MINUS),
}

POINTER_PURITY_TOL = 1e-9


def _ket(*vecs) -> np.ndarray:
    out = np.array([1.0 + 0j])
    for v in vecs:
        out = np.kron(out, v)
    return out


def build_pbp_states() -> tuple[StateVector, StateVector]:
    """The two spin-atom forms of one record:

    psi1 = (|dU> - i|uD>)/sqrt2,   psi2 = (|S+ A+> - |S- A->)/sqrt2
    """
    psi1 = _R2 * (_ket(DOWN, U_ATOM) - 1j * _ket(UP, D_ATOM))
    psi2 = _R2 * (_ket(S_PLUS, A_PLUS) - _ket(S_MINUS, A_MINUS))
    return StateVector((2, 2), psi1), StateVector((2, 2), psi2)


@dataclass(frozen=True)
class SternGerlachState:
    angle: float
    state: StateVector


def build_phi(angle: float) -> SternGerlachState:
    c, s = np.cos(angle), np.sin(angle)
    amps = _R2 * (
        -1j * c * _ket(UP, D_ATOM, MU)
        - s * _ket(UP, D_ATOM, DELTA)
        + c * _ket(DOWN, U_ATOM, MU)
        + 1j * s * _ket(DOWN, U_ATOM, DELTA)
    )
    return SternGerlachState(float(angle), StateVector((2, 2, 2), amps))


def ghz_form() -> StateVector:
    """(|dU E-> - i|uD E+>)/sqrt2 over (S, A, E)."""
    amps = _R2 * (_ket(DOWN, U_ATOM, E_MINUS) - 1j * _ket(UP, D_ATOM, E_PLUS))
    return StateVector((2, 2, 2), amps)


@dataclass
class PointerReport:
    """Branch weights and conditional spin purities for one apparatus basis.

    ``purities`` holds the largest eigenvalue of the spin's reduced state in
    each branch (1 for a factorized branch, 1/2 for maximal S-E mixing);
    ``purities_tr2`` holds tr(rho_S^2) for reference.  Branches that carry no
    weight report purity 1.
    """

    basis: str
    angle: float | None
    weights: list[float]
    purities: list[float]
    purities_tr2: list[float]
    is_pointer: bool

    def row(self) -> dict:
        out = {"angle": self.angle, "basis": self.basis}
        for k, (w, p) in enumerate(zip(self.weights, self.purities), start=1):
            out[f"branch{k}_weight"] = w
            out[f"branch{k}_purity"] = p
        out["is_pointer"] = self.is_pointer
        return out


def _check_basis(basis: Sequence[np.ndarray], dim: int = 2) -> np.ndarray:
    b = np.array([np.asarray(v, dtype=complex).reshape(-1) for v in basis])
    if b.shape != (dim, dim):
        raise DimensionError(f"basis must hold {dim} vectors of length {dim}")
    if np.max(np.abs(b.conj() @ b.T - np.eye(dim))) > NORM_TOL:
        raise NormalizationError("basis vectors are not orthonormal")
    return b


def pointer_test(
    state: SternGerlachState | StateVector,
    apparatus_basis: Sequence[np.ndarray] | str,
    label: str | None = None,
) -> PointerReport:
    """Project the atom onto each basis vector and measure the spin's branch purity."""
    if isinstance(apparatus_basis, str):
        label = label or apparatus_basis
        apparatus_basis = BASES[apparatus_basis]
    basis = _check_basis(apparatus_basis)
    psi = state.state if isinstance(state, SternGerlachState) else state
    angle = state.angle if isinstance(state, SternGerlachState) else None

    weights, purities, tr2 = [], [], []
    for v in basis:
        try:
            branch, w = project_branch(psi, v, target=1)
        except ZeroBranchError:
            weights.append(0.0)
            purities.append(1.0)
            tr2.append(1.0)
            continue
        rho_s = partial_trace(branch.density(), [0])
        weights.append(w)
        purities.append(float(rho_s.eigenvalues().max()))
        tr2.append(rho_s.purity())
    is_pointer = all(
        p >= 1.0 - POINTER_PURITY_TOL for w, p in zip(weights, purities) if w > BRANCH_ZERO
    )
    return PointerReport(label or "custom", angle, weights, purities, tr2, is_pointer)


def pointer_sweep(
    angles: Sequence[float], bases: Mapping[str, Sequence[np.ndarray]] | Sequence[str]
) -> list[PointerReport]:
    angles = list(angles)
    if not angles:
        raise ValueError("angle grid is empty")
    if not isinstance(bases, Mapping):
        bases = {name: BASES[name] for name in bases}
    if not bases:
        raise ValueError("basis list is empty")
    return [
        pointer_test(build_phi(a), basis, label=name)
        for a in angles
        for name, basis in bases.items()
    ]


def uniform_angles(n: int, stop: float = np.pi / 2) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one angle")
    if n == 1:
        return np.array([0.0])
    return np.linspace(0.0, stop, n)


@dataclass(frozen=True)
class AlternativeForm:
    form: SchmidtForm
    overlap: float
    reproduces: bool


def pbp1_forms(
    psi: StateVector, cut: int, rotations: Sequence[np.ndarray], tol: float = 1e-9
) -> list[AlternativeForm]:
    """Rotate the Schmidt vectors by ``R`` on one side and ``conj(R)`` on the other.

    Each candidate keeps the original coefficients; it is a valid rewriting
    of ``psi`` only when ``R`` commutes with the coefficient spectrum, which
    for a degenerate spectrum includes every unitary on that block.
    """
    base = schmidt_decompose(psi, cut)
    k = base.coeffs.size
    out = []
    for r in rotations:
        r = np.asarray(r, dtype=complex)
        if r.shape != (k, k):
            raise DimensionError(f"rotation must be {k}x{k} to act on the Schmidt index")
        if np.max(np.abs(r.conj().T @ r - np.eye(k))) > NORM_TOL:
            raise NormalizationError("rotation is not unitary")
        form = SchmidtForm(
            base.coeffs, r @ base.left_basis, r.conj() @ base.right_basis, cut, psi.dims
        )
        ov = abs(np.vdot(psi.amps, form.amplitudes()))
        out.append(AlternativeForm(form, float(ov), bool(ov >= 1.0 - tol)))
    return out


@dataclass(frozen=True)
class PBP2Result:
    one_to_one: bool
    residual: float
    coefficients: np.ndarray


def pbp2_check(
    psi: StateVector, basis_s: Sequence[np.ndarray], basis_a: Sequence[np.ndarray], tol: float = 1e-9
) -> PBP2Result:
    """Is ``psi`` a one-to-one correlation between the two given bases?

    The coefficient matrix ``C[i, j] = <S_i A_j|psi>`` must have at most one
    non-zero entry per row and column (diagonal after relabelling).  The
    residual is the largest entry off the best such pairing.
    """
    da, db = bipartition_dims(psi.dims, 1)
    bs = _check_basis(basis_s, da)
    ba = _check_basis(basis_a, db)
    c = bs.conj() @ psi.amps.reshape(da, db) @ ba.conj().T
    mag = np.abs(c)
    rows, cols = linear_sum_assignment(-mag)
    off = mag.copy()
    off[rows, cols] = 0.0
    residual = float(off.max())
    return PBP2Result(residual <= tol, residual, c)


Scenario = Literal["trivial", "measured", "classical"]


@dataclass
class DoubleSlitReport:
    scenario: str
    reduced: DensityMatrix
    visibility: float

    def to_dict(self) -> dict:
        m = self.reduced.matrix
        return {
            "scenario": self.scenario,
            "visibility": self.visibility,
            "rho": [[[float(z.real), float(z.imag)] for z in row] for row in m],
        }


def doubleslit(scenario: Scenario, amps: Sequence[complex]) -> DoubleSlitReport:
    """Reduced particle state and fringe visibility for the three frame scenarios.

    trivial:   (a1|l> + a2|r>)|f>                 frame does not record the path
    measured:  (a1|l>|M_l> + a2|r>|M_r>)|f>       orthogonal detector states
    classical: a1|l>|c_l> + a2|r>|c_r>            orthogonal frame states
    """
    a = np.asarray(amps, dtype=complex).reshape(-1)
    if a.size != 2:
        raise DimensionError("need exactly two path amplitudes")
    if abs(np.vdot(a, a).real - 1.0) > NORM_TOL:
        raise NormalizationError(f"|a1|^2 + |a2|^2 = {np.vdot(a, a).real!r}, expected 1")
    left, right = UP, DOWN
    f = UP
    if scenario == "trivial":
        psi = StateVector((2, 2), _ket(a[0] * left + a[1] * right, f))
    elif scenario == "measured":
        psi = StateVector((2, 2, 2), a[0] * _ket(left, UP, f) + a[1] * _ket(right, DOWN, f))
    elif scenario == "classical":
        psi = StateVector((2, 2), a[0] * _ket(left, UP) + a[1] * _ket(right, DOWN))
    else:
        raise ValueError(f"unknown scenario {scenario!r}; expected trivial, measured or classical")
    rho = partial_trace(psi.density(), [0])
    return DoubleSlitReport(scenario, rho, float(2.0 * abs(rho.matrix[0, 1])))
