"""Two cavities decaying into two reservoirs.

Each reservoir is reduced to the single collective mode the cavity photon
decays into, so the whole model lives on four qubits ordered
(c1, r1, c2, r2).  A single excitation evolves as

    |1>_c |0>_r  ->  xi |1>_c |0>_r + chi |0>_c |1>_r,   xi = exp(-kappa t / 2)

independently in each arm, which is the exact amplitude-damping solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .entanglement import (
    NaturalPoint,
    XState,
    concurrence_two_qubit,
    concurrence_x_margin,
    entanglement_mixed,
    natural_point_x,
)
from .errors import NormalizationError
from .hilbert import NORM_TOL, DensityMatrix, StateVector, partial_trace
from .parallel import parallel_map

CAVITY_SLOTS = (0, 2)
RESERVOIR_SLOTS = (1, 3)


@dataclass(frozen=True)
class CavityParams:
    """Initial amplitudes of ``alpha|00> + beta|11>`` and the decay constant."""

    alpha: float
    beta: float
    kappa: float = 1.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if abs(self.alpha**2 + self.beta**2 - 1.0) > NORM_TOL:
            raise NormalizationError(
                f"alpha^2 + beta^2 = {self.alpha**2 + self.beta**2!r}, expected 1"
            )
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    @classmethod
    def normalized(cls, alpha: complex, beta: complex, kappa: float = 1.0) -> "CavityParams":
        """Fold phases into magnitudes and rescale to unit norm."""
        a, b = abs(alpha), abs(beta)
        n = math.hypot(a, b)
        if n == 0:
            raise NormalizationError("alpha and beta cannot both vanish")
        return cls(a / n, b / n, kappa)

    @property
    def initial_entanglement(self) -> float:
        return self.alpha * self.beta


@dataclass(frozen=True)
class DissipationSnapshot:
    t: float
    xi: float
    chi: float
    state: StateVector
    rho_cc: DensityMatrix
    rho_rr: DensityMatrix
    E_cav: float
    E_res: float
    concurrence_cav: float

    @property
    def E_sum(self) -> float:
        return self.E_cav + self.E_res

    def row(self) -> dict:
        return {
            "t": self.t,
            "xi": self.xi,
            "chi": self.chi,
            "E_cav": self.E_cav,
            "E_res": self.E_res,
            "E_sum": self.E_sum,
            "concurrence_cav": self.concurrence_cav,
        }


def decay_amplitudes(kappa: float, t: float) -> tuple[float, float]:
    """(xi, chi) with xi = exp(-kappa t / 2) and chi = sqrt(1 - xi^2)."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    xi = math.exp(-0.5 * kappa * t)
    chi = math.sqrt(-math.expm1(-kappa * t))
    return xi, chi


def four_party_state(p: CavityParams, xi: float, chi: float) -> StateVector:
    arm = np.array([0.0, chi, xi, 0.0])  # xi|10> + chi|01> over (c, r)
    amps = p.beta * np.kron(arm, arm).astype(complex)
    amps[0] += p.alpha
    return StateVector.normalized(amps, (2, 2, 2, 2))


def reduced_cavity(snapshot: DissipationSnapshot) -> DensityMatrix:
    return snapshot.rho_cc


def reduced_reservoir(snapshot: DissipationSnapshot) -> DensityMatrix:
    return snapshot.rho_rr


def natural_point_cavity(snapshot: DissipationSnapshot) -> NaturalPoint:
    return natural_point_x(XState.from_density(snapshot.rho_cc))


def natural_point_reservoir(snapshot: DissipationSnapshot) -> NaturalPoint:
    return natural_point_x(XState.from_density(snapshot.rho_rr))


def evolve(p: CavityParams, t: float) -> DissipationSnapshot:
    xi, chi = decay_amplitudes(p.kappa, t)
    psi = four_party_state(p, xi, chi)
    rho = psi.density()
    rho_cc = partial_trace(rho, CAVITY_SLOTS)
    rho_rr = partial_trace(rho, RESERVOIR_SLOTS)
    e_cav = entanglement_mixed(natural_point_x(XState.from_density(rho_cc)))
    e_res = entanglement_mixed(natural_point_x(XState.from_density(rho_rr)))
    return DissipationSnapshot(
        t=float(t),
        xi=xi,
        chi=chi,
        state=psi,
        rho_cc=rho_cc,
        rho_rr=rho_rr,
        E_cav=e_cav,
        E_res=e_res,
        concurrence_cav=concurrence_two_qubit(rho_cc),
    )


def cavity_entanglement_closed_form(p: CavityParams, t: float) -> float:
    """``alpha beta xi^2 = alpha beta exp(-kappa t)``."""
    return p.alpha * p.beta * math.exp(-p.kappa * t)


def reservoir_entanglement_closed_form(p: CavityParams, t: float) -> float:
    return p.alpha * p.beta * -math.expm1(-p.kappa * t)


def cavity_xstate_closed_form(p: CavityParams, t: float) -> XState:
    """Reduced cavity state from the element formulas, without the four-qubit state."""
    xi, chi = decay_amplitudes(p.kappa, t)
    a2, b2 = p.alpha**2, p.beta**2
    xi2, chi2 = xi * xi, chi * chi
    return XState(
        rho11=a2 + b2 * chi2 * chi2,
        rho22=b2 * xi2 * chi2,
        rho33=b2 * xi2 * chi2,
        rho44=b2 * xi2 * xi2,
        w=complex(p.alpha * p.beta * xi2),
    )


def time_grid(p: CavityParams, t_max: Optional[float] = None, steps: int = 201) -> np.ndarray:
    if t_max is None:
        t_max = 5.0 / p.kappa
    if steps < 2:
        raise ValueError("steps must be at least 2")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    return np.linspace(0.0, t_max, steps)


def timeseries(
    p: CavityParams, t_max: Optional[float] = None, steps: int = 201
) -> list[DissipationSnapshot]:
    grid = time_grid(p, t_max, steps)
    return parallel_map(lambda t: evolve(p, float(t)), list(grid))


@dataclass
class ESDBReport:
    death_time: Optional[float]
    min_E_cav: float
    E_cav_positive: bool
    t_max: float
    steps: int

    def to_dict(self) -> dict:
        return {
            "concurrence_death_time": "never" if self.death_time is None else self.death_time,
            "min_E_cav": self.min_E_cav,
            "E_cav_positive": self.E_cav_positive,
            "t_max": self.t_max,
            "steps": self.steps,
        }


def concurrence_death_time(p: CavityParams, t_max: float, resolution: float = 1e-9) -> Optional[float]:
    """First time the cavity concurrence reaches zero, by bisection.

    Works on the signed X-state margin ``|rho14| - sqrt(rho22 rho33)`` built
    from the closed-form elements.  Returns None if it stays positive on
    ``[0, t_max]``.
    """
    def margin(t):
        return concurrence_x_margin(cavity_xstate_closed_form(p, t))

    if margin(0.0) <= 0:
        return 0.0
    if margin(t_max) > 0:
        return None
    lo, hi = 0.0, float(t_max)
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if margin(mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


def esdb_compare(p: CavityParams, t_max: Optional[float] = None, steps: int = 201) -> ESDBReport:
    grid = time_grid(p, t_max, steps)
    series = timeseries(p, float(grid[-1]), steps)
    e_cav = np.array([s.E_cav for s in series])
    return ESDBReport(
        death_time=concurrence_death_time(p, float(grid[-1])),
        min_E_cav=float(e_cav.min()),
        E_cav_positive=bool(np.all(e_cav > 0)),
        t_max=float(grid[-1]),
        steps=steps,
    )
