"""Entanglement swapping between two system/frame qubit pairs.

Each pair is ``c1|s1 e1> + c2|s2 e2>`` with system qubit ``s`` and frame
qubit ``e``.  The four-party product ``|A alpha> (x) |B beta>`` is rewritten
as four branch products over the (A,B) / (alpha,beta) pairing.  Branch
states are kept unnormalized; the entanglement of a branch ``c1|..> +- c2|..>``
is ``|c1 c2|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NormalizationError
from .hilbert import BRANCH_ZERO, NORM_TOL, StateVector, bipartition_dims, check_dims

_Q = (2, 2, 2, 2)


@dataclass(frozen=True)
class BipartyCF:
    """System qubit entangled with its coherence frame: ``c1|00> + c2|11>``."""

    c1: complex
    c2: complex
    system: str = "A"
    frame: str = "alpha"

    def __post_init__(self):
        n2 = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if abs(n2 - 1.0) > NORM_TOL:
            raise NormalizationError(f"|c1|^2 + |c2|^2 = {n2!r}, expected 1")
        object.__setattr__(self, "c1", complex(self.c1))
        object.__setattr__(self, "c2", complex(self.c2))

    @classmethod
    def normalized(cls, c1, c2, system="A", frame="alpha") -> "BipartyCF":
        n = np.hypot(abs(c1), abs(c2))
        if n < BRANCH_ZERO:
            raise NormalizationError("both coefficients are zero")
        return cls(complex(c1) / n, complex(c2) / n, system, frame)

    @property
    def entanglement(self) -> float:
        return abs(self.c1 * self.c2)

    def state(self) -> StateVector:
        return StateVector((2, 2), [self.c1, 0, 0, self.c2])


def build_four_party(A: BipartyCF, B: BipartyCF) -> StateVector:
    """Product state over the ordering (A, alpha, B, beta)."""
    return StateVector(check_dims(_Q), np.kron(A.state().amps, B.state().amps))


def _split(product: complex) -> tuple[complex, complex]:
    """Symmetric split of ``product = 2 u v``: |u| = |v|, v real >= 0."""
    mag = np.sqrt(abs(product) / 2.0)
    if mag == 0.0:
        return 0j, 0j
    return complex(mag * np.exp(1j * np.angle(product))), complex(mag)


@dataclass(frozen=True)
class BranchDecomposition:
    """Raw branch coefficients.

    psi+-_AB = s1|s1 s1> +- s2|s2 s2>   phi+-_AB = t1|s1 s2> +- t2|s2 s1>
    psi+-_ab = x1|e1 e1> +- x2|e2 e2>   phi+-_ab = y1|e1 e2> +- y2|e2 e1>
    """

    s: tuple[complex, complex]
    t: tuple[complex, complex]
    x: tuple[complex, complex]
    y: tuple[complex, complex]

    def relation_residuals(self, A: BipartyCF, B: BipartyCF) -> dict[str, float]:
        (s1, s2), (t1, t2), (x1, x2), (y1, y2) = self.s, self.t, self.x, self.y
        return {
            "a1b1=2s1x1": abs(A.c1 * B.c1 - 2 * s1 * x1),
            "a2b2=2s2x2": abs(A.c2 * B.c2 - 2 * s2 * x2),
            "a1b2=2t1y1": abs(A.c1 * B.c2 - 2 * t1 * y1),
            "a2b1=2t2y2": abs(A.c2 * B.c1 - 2 * t2 * y2),
        }

    def branch_pairs(self) -> dict[str, tuple[np.ndarray, np.ndarray]]:
        """Two-qubit (AB, alpha-beta) coefficient vectors of each branch."""
        (s1, s2), (t1, t2), (x1, x2), (y1, y2) = self.s, self.t, self.x, self.y
        out = {}
        for sign, tag in ((1, "+"), (-1, "-")):
            out["psi" + tag] = (np.array([s1, 0, 0, sign * s2]), np.array([x1, 0, 0, sign * x2]))
        for sign, tag in ((1, "+"), (-1, "-")):
            out["phi" + tag] = (np.array([0, t1, sign * t2, 0]), np.array([0, y1, sign * y2, 0]))
        return out

    def branch_vectors(self) -> dict[str, np.ndarray]:
        """Each branch product as a 16-amplitude vector in (A, alpha, B, beta) order."""
        out = {}
        for name, (ab, ee) in self.branch_pairs().items():
            # kron gives (A, B, alpha, beta); swap the middle two axes
            t = np.kron(ab, ee).reshape(_Q).transpose(0, 2, 1, 3)
            out[name] = t.reshape(-1)
        return out

    def reassemble(self) -> np.ndarray:
        return sum(self.branch_vectors().values())


def branch_decompose(A: BipartyCF, B: BipartyCF) -> BranchDecomposition:
    s1, x1 = _split(A.c1 * B.c1)
    s2, x2 = _split(A.c2 * B.c2)
    t1, y1 = _split(A.c1 * B.c2)
    t2, y2 = _split(A.c2 * B.c1)
    return BranchDecomposition((s1, s2), (t1, t2), (x1, x2), (y1, y2))


@dataclass
class ConservationReport:
    lhs: float
    branches: list[dict] = field(default_factory=list)
    rhs: float = 0.0
    residual: float = 0.0
    identity_residual_s: float = 0.0
    identity_residual_t: float = 0.0

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "branches": self.branches,
            "rhs": self.rhs,
            "residual": self.residual,
            "identity_residual_s": self.identity_residual_s,
            "identity_residual_t": self.identity_residual_t,
        }


def conservation_check(
    A: BipartyCF, B: BipartyCF, branches: Optional[BranchDecomposition] = None
) -> ConservationReport:
    """Compare E(A alpha) E(B beta) with the sum of branch products.

    ``branches`` defaults to the canonical split; any split satisfying the
    coefficient relations gives the same totals.
    """
    bd = branch_decompose(A, B) if branches is None else branches
    lhs = A.entanglement * B.entanglement
    rows = []
    for name, (ab, ee) in bd.branch_pairs().items():
        e_ab = abs(ab[0] * ab[3]) + abs(ab[1] * ab[2])
        e_ee = abs(ee[0] * ee[3]) + abs(ee[1] * ee[2])
        rows.append({"name": name, "E_AB": float(e_ab), "E_ab": float(e_ee)})
    rhs = float(sum(r["E_AB"] * r["E_ab"] for r in rows))
    (s1, s2), (t1, t2), (x1, x2), (y1, y2) = bd.s, bd.t, bd.x, bd.y
    return ConservationReport(
        lhs=float(lhs),
        branches=rows,
        rhs=rhs,
        residual=abs(lhs - rhs),
        identity_residual_s=abs(lhs - 4 * abs(s1 * s2 * x1 * x2)),
        identity_residual_t=abs(lhs - 4 * abs(t1 * t2 * y1 * y2)),
    )


def cf_classicality(psi: StateVector, cut: int = 1) -> float:
    """Largest overlap between frame-side states conditioned on system basis states.

    1 means the frame does not record the system (classical frame); 0 means
    the frame states are mutually orthogonal.  With fewer than two weighted
    branches the frame is trivially classical and 1 is returned.
    """
    da, db = bipartition_dims(psi.dims, cut)
    m = psi.amps.reshape(da, db)
    frames = []
    for row in m:
        n = np.linalg.norm(row)
        if n**2 >= BRANCH_ZERO:
            frames.append(row / n)
    if len(frames) < 2:
        return 1.0
    best = 0.0
    for i in range(len(frames)):
        for j in range(i + 1, len(frames)):
            best = max(best, abs(np.vdot(frames[i], frames[j])))
    return float(min(best, 1.0))
