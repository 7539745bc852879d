"""Seeded invariant suite run by ``coherence-lab verify``.

Every check draws from its own PCG64 stream keyed by ``(seed, index)`` so
adding or removing one check does not shift the draws of the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dissipation as dis
from . import einselection as ein
from .entanglement import (
    XState,
    bell_state,
    concurrence_two_qubit,
    entanglement_mixed,
    entanglement_pure,
    entanglement_state,
    natural_point_x,
    werner_state,
    x_state_entanglement,
)
from .hilbert import (
    DensityMatrix,
    StateVector,
    apply_local_unitary,
    equal_mod_phase,
    partial_trace,
    project_branch,
    schmidt_decompose,
    tensor_product,
)
from .sampling import (
    make_rng,
    random_cf,
    random_state,
    random_unitary,
    random_xstate,
)
from .swapping import BranchDecomposition, branch_decompose, build_four_party, conservation_check, BipartyCF


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.suite}.{self.name}: {self.detail}"


_REGISTRY: list[tuple[str, str, Callable[[np.random.Generator, float], tuple[bool, str]]]] = []
SUITES = ("hilbert", "entanglement", "swapping", "dissipation", "einselection")


def check(suite: str, name: str):
    def deco(fn):
        _REGISTRY.append((suite, name, fn))
        return fn

    return deco


def _dims_samples(rng, count, max_side=4):
    for _ in range(count):
        yield (int(rng.integers(2, max_side + 1)), int(rng.integers(2, max_side + 1)))


# -- hilbert -----------------------------------------------------------------


@check("hilbert", "partial_trace_physical")
def _(rng, scale):
    worst_h = worst_t = 0.0
    worst_eig = 0.0
    for dims in _dims_samples(rng, 50):
        dims = dims + (2,)
        rho = random_state(rng, dims).density()
        for keep in ([0], [1], [0, 2], [2]):
            r = partial_trace(rho, keep).matrix
            worst_h = max(worst_h, float(np.max(np.abs(r - r.conj().T))))
            worst_t = max(worst_t, abs(complex(np.trace(r)) - 1))
            worst_eig = min(worst_eig, float(np.linalg.eigvalsh(r).min()))
    ok = worst_h < 1e-10 * scale and worst_t < 1e-10 * scale and worst_eig > -1e-9 * scale
    return ok, f"max herm dev {worst_h:.2e}, max trace dev {worst_t:.2e}, min eig {worst_eig:.2e}"


@check("hilbert", "schmidt_reconstruction")
def _(rng, scale):
    worst = 0.0
    for dims in _dims_samples(rng, 100):
        psi = random_state(rng, dims)
        form = schmidt_decompose(psi, 1)
        worst = max(worst, 1 - abs(np.vdot(psi.amps, form.amplitudes())))
    return worst <= 1e-9 * scale, f"max 1 - overlap {worst:.2e}"


@check("hilbert", "schmidt_local_unitary_invariance")
def _(rng, scale):
    worst = 0.0
    for dims in _dims_samples(rng, 50):
        psi = random_state(rng, dims)
        ref = schmidt_decompose(psi, 1).coeffs
        side = int(rng.integers(0, 2))
        rotated = apply_local_unitary(psi, random_unitary(rng, dims[side]), side)
        worst = max(worst, float(np.max(np.abs(schmidt_decompose(rotated, 1).coeffs - ref))))
    return worst < 1e-9 * scale, f"max |d lambda| {worst:.2e}"


@check("hilbert", "tensor_then_trace")
def _(rng, scale):
    worst = 0.0
    for da, db in _dims_samples(rng, 50):
        a, b = random_state(rng, (da,)), random_state(rng, (db,))
        r = partial_trace(tensor_product(a, b).density(), [0]).matrix
        worst = max(worst, float(np.max(np.abs(r - a.density().matrix))))
    return worst < 1e-10 * scale, f"max element dev {worst:.2e}"


@check("hilbert", "equal_mod_phase_relation")
def _(rng, scale):
    ok = True
    for dims in _dims_samples(rng, 30):
        a, b = random_state(rng, dims), random_state(rng, dims)
        theta = rng.uniform(0, 2 * np.pi)
        rotated = StateVector(a.dims, np.exp(1j * theta) * a.amps)
        ok &= equal_mod_phase(a, a) and equal_mod_phase(a, rotated) and equal_mod_phase(rotated, a)
        ok &= equal_mod_phase(a, b) == equal_mod_phase(b, a)
    return bool(ok), "reflexive, symmetric and phase-blind on 30 samples"


@check("hilbert", "projector_weights_complete")
def _(rng, scale):
    worst = 0.0
    for dims in _dims_samples(rng, 30):
        psi = random_state(rng, dims + (2,))
        target = int(rng.integers(0, 3))
        basis = random_unitary(rng, psi.dims[target])
        total = 0.0
        for k in range(psi.dims[target]):
            try:
                total += project_branch(psi, basis[:, k], target)[1]
            except ValueError:
                pass
        worst = max(worst, abs(total - 1))
    return worst < 1e-10 * scale, f"max |sum w - 1| {worst:.2e}"


# -- entanglement ------------------------------------------------------------


@check("entanglement", "local_unitary_invariance")
def _(rng, scale):
    worst = 0.0
    for dims in _dims_samples(rng, 50):
        psi = random_state(rng, dims)
        e0 = entanglement_state(psi)
        side = int(rng.integers(0, 2))
        e1 = entanglement_state(apply_local_unitary(psi, random_unitary(rng, dims[side]), side))
        worst = max(worst, abs(e1 - e0))
    return worst < 1e-9 * scale, f"max |dE| {worst:.2e}"


@check("entanglement", "pure_bounds")
def _(rng, scale):
    ok = True
    details = []
    for n in range(2, 7):
        top = (n - 1) / 2
        uniform = entanglement_pure(np.full(n, 1 / math.sqrt(n)))
        ok &= abs(uniform - top) < 1e-12 * scale
        for _ in range(200):
            lam = np.abs(rng.normal(size=n))
            lam /= np.linalg.norm(lam)
            e = entanglement_pure(lam)
            ok &= -1e-15 <= e <= top + 1e-12
            if not np.allclose(lam, lam[0]):
                ok &= e < top
        details.append(f"n={n}:{uniform:.6g}")
    return bool(ok), "max at uniform " + " ".join(details)


@check("entanglement", "werner_grid")
def _(rng, scale):
    worst = 0.0
    for z in np.linspace(0, 1, 101):
        worst = max(worst, abs(x_state_entanglement(XState.from_density(werner_state(z))) - z / 2))
    return worst <= 1e-12 * scale, f"max |E - z/2| {worst:.2e}"


@check("entanglement", "natural_point_reconstruction")
def _(rng, scale):
    worst = 0.0
    for _ in range(200):
        x = random_xstate(rng)
        pt = natural_point_x(x)
        worst = max(worst, float(np.max(np.abs(pt.reconstruct() - x.matrix()))))
        if pt.residual is not None:
            DensityMatrix(pt.residual.dims, pt.residual.matrix)
    return worst < 1e-9 * scale, f"max element dev {worst:.2e} (residuals valid)"


@check("entanglement", "pure_x_agreement")
def _(rng, scale):
    worst = 0.0
    for _ in range(100):
        if rng.uniform() < 0.5:
            amps = np.array([rng.normal() + 1j * rng.normal(), 0, 0, rng.normal() + 1j * rng.normal()])
        else:
            amps = np.array([0, rng.normal() + 1j * rng.normal(), rng.normal() + 1j * rng.normal(), 0])
        psi = StateVector.normalized(amps, (2, 2))
        mixed = entanglement_mixed(natural_point_x(XState.from_density(psi.density())))
        worst = max(worst, abs(mixed - entanglement_state(psi)))
    return worst < 1e-9 * scale, f"max |E_mixed - E_pure| {worst:.2e}"


@check("entanglement", "concurrence_disagreement")
def _(rng, scale):
    bell_c = concurrence_two_qubit(bell_state("phi+").density())
    bell_e = entanglement_state(bell_state("phi+"))
    ok = abs(bell_c - 1) < 1e-9 and abs(bell_e - 0.5) < 1e-12
    worst_c = 0.0
    for z in np.linspace(1e-3, 1 / 3, 50):
        rho = werner_state(z)
        worst_c = max(worst_c, concurrence_two_qubit(rho))
        ok &= abs(entanglement_mixed(natural_point_x(XState.from_density(rho))) - z / 2) < 1e-12
    ok &= worst_c < 1e-7
    return bool(ok), f"Bell C={bell_c:.6g} E={bell_e:.6g}; Werner z<=1/3 max C {worst_c:.2e} while E=z/2"


# -- swapping ----------------------------------------------------------------


@check("swapping", "conservation")
def _(rng, scale):
    worst = 0.0
    for _ in range(1000):
        rep = conservation_check(random_cf(rng), random_cf(rng, "B", "beta"))
        worst = max(worst, rep.residual, rep.identity_residual_s, rep.identity_residual_t)
    return worst < 1e-12 * scale, f"max residual {worst:.2e} over 1000 pairs"


@check("swapping", "split_invariance")
def _(rng, scale):
    worst = 0.0
    for _ in range(200):
        A, B = random_cf(rng), random_cf(rng, "B", "beta")
        bd = branch_decompose(A, B)
        c = rng.uniform(0.1, 10, size=4)
        alt = BranchDecomposition(
            (bd.s[0] * c[0], bd.s[1] * c[1]),
            (bd.t[0] * c[2], bd.t[1] * c[3]),
            (bd.x[0] / c[0], bd.x[1] / c[1]),
            (bd.y[0] / c[2], bd.y[1] / c[3]),
        )
        worst = max(worst, abs(conservation_check(A, B, alt).residual - conservation_check(A, B).residual))
    return worst < 1e-12 * scale, f"max residual change {worst:.2e}"


@check("swapping", "reassembly")
def _(rng, scale):
    worst = 0.0
    for _ in range(200):
        A, B = random_cf(rng), random_cf(rng, "B", "beta")
        worst = max(worst, float(np.max(np.abs(branch_decompose(A, B).reassemble() - build_four_party(A, B).amps))))
    return worst < 1e-10 * scale, f"max amplitude dev {worst:.2e}"


@check("swapping", "zero_coefficients")
def _(rng, scale):
    ok = True
    for a, b in (((1, 0), (0.6, 0.8)), ((0, 1), (1, 0)), ((1, 0), (1, 0))):
        bd = branch_decompose(BipartyCF(*a), BipartyCF(*b, system="B", frame="beta"))
        vals = np.array(bd.s + bd.t + bd.x + bd.y)
        ok &= bool(np.all(np.isfinite(vals)))
        rep = conservation_check(BipartyCF(*a), BipartyCF(*b))
        ok &= rep.lhs == 0.0 and rep.rhs == 0.0
    return ok, "zero inputs give finite, exactly-zero branches"


# -- dissipation -------------------------------------------------------------


def _random_params(rng) -> dis.CavityParams:
    theta = rng.uniform(0, np.pi / 2)
    return dis.CavityParams(math.cos(theta), math.sin(theta), float(rng.uniform(0.1, 5)))


@check("dissipation", "conservation")
def _(rng, scale):
    worst = 0.0
    for _ in range(20):
        p = _random_params(rng)
        for snap in dis.timeseries(p, 5 / p.kappa, 201):
            worst = max(worst, abs(snap.E_sum - p.alpha * p.beta))
    return worst < 1e-9 * scale, f"max |E_cav + E_res - ab| {worst:.2e}"


@check("dissipation", "closed_form_vs_pipeline")
def _(rng, scale):
    worst = 0.0
    for _ in range(20):
        p = _random_params(rng)
        for t in np.linspace(0, 5 / p.kappa, 51):
            snap = dis.evolve(p, t)
            worst = max(worst, abs(snap.E_cav - dis.cavity_entanglement_closed_form(p, t)))
    return worst < 1e-12 * scale, f"max |pipeline - ab e^-kt| {worst:.2e}"


@check("dissipation", "normalization")
def _(rng, scale):
    worst = 0.0
    for _ in range(20):
        p = _random_params(rng)
        for t in np.linspace(0, 10 / p.kappa, 21):
            xi, chi = dis.decay_amplitudes(p.kappa, t)
            amps = p.beta * np.kron([0, chi, xi, 0], [0, chi, xi, 0])
            amps[0] += p.alpha
            worst = max(worst, abs(np.linalg.norm(amps) - 1), abs(xi * xi + chi * chi - 1))
    return worst < 1e-12 * scale, f"max norm dev {worst:.2e}"


@check("dissipation", "reservoir_mirror")
def _(rng, scale):
    worst = 0.0
    for _ in range(20):
        p = _random_params(rng)
        t = float(rng.uniform(0, 5 / p.kappa))
        snap = dis.evolve(p, t)
        swapped = dis.four_party_state(p, snap.chi, snap.xi)
        mirror = partial_trace(swapped.density(), dis.CAVITY_SLOTS).matrix
        worst = max(worst, float(np.max(np.abs(snap.rho_rr.matrix - mirror))))
    return worst < 1e-12 * scale, f"max |rho_rr - rho_cc(xi<->chi)| {worst:.2e}"


@check("dissipation", "sigma_purity")
def _(rng, scale):
    worst = 0.0
    for _ in range(20):
        p = _random_params(rng)
        for t in np.linspace(0.01, 5, 25) / p.kappa:
            pt = dis.natural_point_cavity(dis.evolve(p, t))
            if pt.eE is None:
                continue
            s = pt.sigma().matrix
            worst = max(worst, abs((s[0, 0] * s[3, 3]).real - abs(s[0, 3]) ** 2))
    return worst < 1e-12 * scale, f"max |s11 s44 - s14^2| {worst:.2e}"


@check("dissipation", "no_esdb")
def _(rng, scale):
    p = dis.CavityParams(math.sqrt(0.2), math.sqrt(0.8), 1.0)
    rep = dis.esdb_compare(p, 5.0, 201)
    ok = rep.death_time is not None and abs(rep.death_time - math.log(2)) < 1e-6 and rep.min_E_cav > 0
    return ok, f"concurrence death at {rep.death_time}, min E_cav {rep.min_E_cav:.3e}"


# -- einselection ------------------------------------------------------------


@check("einselection", "phi_at_zero")
def _(rng, scale):
    psi1, _ = ein.build_pbp_states()
    ref = tensor_product(psi1, StateVector((2,), ein.MU))
    dev = 1 - abs(np.vdot(ein.build_phi(0.0).state.amps, ref.amps))
    return dev <= 1e-12 * scale, f"1 - overlap {dev:.2e}"


@check("einselection", "pointer_purity_curves")
def _(rng, scale):
    worst_ud = worst_apm = 0.0
    for a in np.concatenate([np.linspace(0, np.pi / 2, 50), rng.uniform(0, 2 * np.pi, 50)]):
        phi = ein.build_phi(a)
        ud = ein.pointer_test(phi, "ud")
        apm = ein.pointer_test(phi, "apm")
        worst_ud = max(worst_ud, max(1 - p for p in ud.purities))
        expected = (1 + abs(math.cos(2 * a))) / 2
        worst_apm = max(worst_apm, max(abs(p - expected) for p in apm.purities))
    ok = worst_ud < 1e-9 * scale and worst_apm < 1e-9 * scale
    return ok, f"U/D max 1-purity {worst_ud:.2e}; A+- max |purity - (1+|cos2A|)/2| {worst_apm:.2e}"


@check("einselection", "pbp1_reconstruction")
def _(rng, scale):
    worst = 0.0
    for dims in _dims_samples(rng, 20):
        psi = random_state(rng, dims)
        k = min(dims)
        rots = [np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, k))) for _ in range(3)]
        for alt in ein.pbp1_forms(psi, 1, rots):
            worst = max(worst, 1 - alt.overlap)
    bell = bell_state("phi+")
    for alt in ein.pbp1_forms(bell, 1, [random_unitary(rng, 2) for _ in range(10)]):
        worst = max(worst, 1 - alt.overlap)
    return worst <= 1e-9 * scale, f"max 1 - overlap of returned forms {worst:.2e}"


@check("einselection", "pbp2_relabel_phase")
def _(rng, scale):
    ok = True
    psi1, _ = ein.build_pbp_states()
    pairs = [
        (ein.BASES["ud"], ein.BASES["ud"]),
        ((ein.S_PLUS, ein.S_MINUS), ein.BASES["apm"]),
        (ein.BASES["ud"], ein.BASES["apm"]),
    ]
    for bs, ba in pairs:
        ref = ein.pbp2_check(psi1, bs, ba)
        phased = StateVector(psi1.dims, np.exp(1j * rng.uniform(0, 2 * np.pi)) * psi1.amps)
        for variant in (
            ein.pbp2_check(psi1, bs[::-1], ba),
            ein.pbp2_check(psi1, bs, ba[::-1]),
            ein.pbp2_check(phased, bs, ba),
        ):
            ok &= variant.one_to_one == ref.one_to_one and abs(variant.residual - ref.residual) < 1e-12
    return bool(ok), "verdict and residual unchanged by relabelling and global phase"


@check("einselection", "doubleslit_visibility")
def _(rng, scale):
    ok = True
    worst = 0.0
    for _ in range(100):
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        a /= np.linalg.norm(a)
        for sc in ("trivial", "measured", "classical"):
            v = ein.doubleslit(sc, a).visibility
            ok &= 0.0 <= v <= 1.0 + 1e-12
        worst = max(worst, abs(ein.doubleslit("trivial", a).visibility - 2 * abs(a[0] * a[1])))
    ok &= worst < 1e-12 * scale
    return bool(ok), f"visibility in [0,1]; max |V_trivial - 2|a1 a2|| {worst:.2e}"


def run_suite(suite: str = "all", seed: int = 42, tolerance_scale: float = 1.0) -> list[CheckResult]:
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected 'all' or one of {', '.join(SUITES)}")
    results = []
    for index, (s, name, fn) in enumerate(_REGISTRY):
        if suite not in ("all", s):
            continue
        rng = make_rng(seed, index)
        try:
            passed, detail = fn(rng, tolerance_scale)
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(s, name, bool(passed), detail))
    return results
