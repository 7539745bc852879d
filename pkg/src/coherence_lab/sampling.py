"""Seeded random inputs for property checks.

All randomness goes through ``numpy.random.Generator(PCG64(seed))`` so a
seed reproduces the same draws on any platform running the same numpy.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .entanglement import XState
from .hilbert import StateVector
from .swapping import BipartyCF

DEFAULT_SEED = 42


def make_rng(seed: int = DEFAULT_SEED, *stream: int) -> np.random.Generator:
    """PCG64 generator; extra ``stream`` integers give independent sub-streams."""
    return np.random.Generator(np.random.PCG64([seed, *stream]) if stream else np.random.PCG64(seed))


def random_state(rng: np.random.Generator, dims) -> StateVector:
    n = int(np.prod(dims))
    amps = rng.normal(size=n) + 1j * rng.normal(size=n)
    return StateVector.normalized(amps, tuple(dims))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary."""
    return unitary_group.rvs(dim, random_state=rng)


def random_complex_pair(rng: np.random.Generator) -> tuple[complex, complex]:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return complex(v[0]), complex(v[1])


def random_cf(rng: np.random.Generator, system="A", frame="alpha") -> BipartyCF:
    return BipartyCF(*random_complex_pair(rng), system=system, frame=frame)


def random_xstate(rng: np.random.Generator) -> XState:
    diag = rng.dirichlet(np.ones(4))
    w_mag = rng.uniform() * np.sqrt(diag[0] * diag[3])
    z_mag = rng.uniform() * np.sqrt(diag[1] * diag[2])
    w = w_mag * np.exp(2j * np.pi * rng.uniform())
    z = z_mag * np.exp(2j * np.pi * rng.uniform())
    return XState(*diag, w=complex(w), z=complex(z))
