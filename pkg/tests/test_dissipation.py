import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherence_lab.dissipation import (
    CavityParams,
    cavity_entanglement_closed_form,
    cavity_xstate_closed_form,
    concurrence_death_time,
    decay_amplitudes,
    esdb_compare,
    evolve,
    natural_point_cavity,
    natural_point_reservoir,
    reservoir_entanglement_closed_form,
    time_grid,
    timeseries,
)
from coherence_lab.entanglement import entanglement_mixed
from coherence_lab.errors import NormalizationError

R2 = 1 / math.sqrt(2)
SYM = CavityParams(R2, R2, 1.0)
ESD = CavityParams(math.sqrt(0.2), math.sqrt(0.8), 1.0)


def params(theta, kappa=1.0):
    return CavityParams(math.cos(theta), math.sin(theta), kappa)


angles = st.floats(0, math.pi / 2)
times = st.floats(0, 20)


def kraus_oracle(p, t):
    """Amplitude-damping channel applied to each cavity of the initial density matrix."""
    xi2 = math.exp(-p.kappa * t)
    k0 = np.diag([1, math.sqrt(xi2)])
    k1 = np.array([[0, math.sqrt(1 - xi2)], [0, 0]])
    psi0 = np.zeros(4)
    psi0[0], psi0[3] = p.alpha, p.beta
    rho = np.outer(psi0, psi0)
    out = np.zeros((4, 4))
    for a in (k0, k1):
        for b in (k0, k1):
            k = np.kron(a, b)
            out += k @ rho @ k.T
    return out


def test_params_validation():
    with pytest.raises(NormalizationError):
        CavityParams(0.5, 0.5)
    with pytest.raises(ValueError):
        CavityParams(R2, R2, 0.0)
    with pytest.raises(ValueError):
        CavityParams(-R2, R2)


def test_params_normalized_folds_phase():
    p = CavityParams.normalized(1, -1j)
    assert p.alpha == pytest.approx(R2) and p.beta == pytest.approx(R2)


def test_decay_amplitudes():
    xi, chi = decay_amplitudes(2.0, 0.7)
    assert xi == pytest.approx(math.exp(-0.7), abs=1e-15)
    assert xi**2 + chi**2 == pytest.approx(1, abs=1e-12)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        evolve(SYM, -0.1)


# -- evolve ------------------------------------------------------------------


def test_initial_snapshot():
    s = evolve(SYM, 0.0)
    assert s.xi == 1.0 and s.chi == 0.0
    expected = np.zeros(16)
    expected[0] = expected[0b1010] = R2  # |c1 r1 c2 r2> = |1010>
    np.testing.assert_allclose(s.state.amps, expected, atol=1e-15)
    assert s.E_cav == pytest.approx(0.5, abs=1e-12)
    assert s.E_res == 0.0


def test_late_time_limit():
    s = evolve(SYM, 60.0)
    assert s.E_cav < 1e-20
    assert s.E_res == pytest.approx(0.5, abs=1e-12)


def test_quarter_at_two_ln2():
    p = params(0.4)
    s = evolve(p, 2 * math.log(2))
    assert s.xi**2 == pytest.approx(0.25, abs=1e-15)
    assert s.E_cav == pytest.approx(p.alpha * p.beta / 4, abs=1e-12)


def test_cavity_elements_example():
    s = evolve(SYM, math.log(2))
    m = s.rho_cc.matrix
    assert m[0, 3].real == pytest.approx(0.25, abs=1e-15)
    assert m[1, 1].real == pytest.approx(0.125, abs=1e-15)


def test_initial_cavity_state_pure():
    assert evolve(params(0.3), 0).rho_cc.purity() == pytest.approx(1, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(theta=angles, t=times, kappa=st.floats(0.1, 5))
def test_cavity_matches_kraus_oracle(theta, t, kappa):
    p = params(theta, kappa)
    np.testing.assert_allclose(evolve(p, t).rho_cc.matrix, kraus_oracle(p, t), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(theta=angles, t=times)
def test_element_formulas(theta, t):
    p = params(theta)
    s = evolve(p, t)
    np.testing.assert_allclose(s.rho_cc.matrix, cavity_xstate_closed_form(p, t).matrix(), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(theta=angles, t=times)
def test_reservoir_mirrors_cavity(theta, t):
    p = params(theta)
    s = evolve(p, t)
    xi, chi = s.xi, s.chi
    a2, b2 = p.alpha**2, p.beta**2
    expected = np.diag([a2 + b2 * xi**4, b2 * xi**2 * chi**2, b2 * xi**2 * chi**2, b2 * chi**4]).astype(complex)
    expected[0, 3] = expected[3, 0] = p.alpha * p.beta * chi**2
    np.testing.assert_allclose(s.rho_rr.matrix, expected, atol=1e-12)


@settings(max_examples=150, deadline=None)
@given(theta=angles, t=times, kappa=st.floats(0.1, 5))
def test_conservation_and_closed_forms(theta, t, kappa):
    p = params(theta, kappa)
    s = evolve(p, t)
    assert abs(np.linalg.norm(s.state.amps) - 1) < 1e-12
    assert abs(s.E_sum - p.alpha * p.beta) < 1e-9
    assert abs(s.E_cav - cavity_entanglement_closed_form(p, t)) < 1e-12
    assert abs(s.E_res - reservoir_entanglement_closed_form(p, t)) < 1e-12


# -- natural points ----------------------------------------------------------


def test_natural_point_cavity_example():
    pt = natural_point_cavity(evolve(SYM, math.log(2)))
    assert pt.pi == pytest.approx(0.625, abs=1e-12)
    sig = pt.sigma().matrix
    np.testing.assert_allclose([sig[0, 0].real, sig[3, 3].real, sig[0, 3].real], [0.8, 0.2, 0.4], atol=1e-12)


def test_natural_point_initial_is_pure():
    pt = natural_point_cavity(evolve(SYM, 0))
    assert pt.pi == 1.0 and not pt.residual_defined


@settings(max_examples=100, deadline=None)
@given(theta=st.floats(0.01, math.pi / 2 - 0.01), t=st.floats(0.001, 20))
def test_natural_point_quoted_elements(theta, t):
    p = params(theta)
    s = evolve(p, t)
    pt = natural_point_cavity(s)
    xi4 = s.xi**4
    pi = p.alpha**2 + p.beta**2 * xi4
    assert abs(pt.pi - pi) < 1e-12
    sig = pt.sigma().matrix
    assert abs(sig[0, 0] - p.alpha**2 / pi) < 1e-12
    assert abs(sig[3, 3] - p.beta**2 * xi4 / pi) < 1e-12
    assert abs(sig[0, 3] - p.alpha * p.beta * s.xi**2 / pi) < 1e-12
    assert abs(sig[0, 0] * sig[3, 3] - abs(sig[0, 3]) ** 2) < 1e-12
    if pt.residual_defined:
        r = pt.residual.matrix
        np.testing.assert_array_equal(r, np.diag(np.diag(r)))
        assert np.all(np.diag(r).real >= -1e-12)
    assert entanglement_mixed(pt) == pytest.approx(p.alpha * p.beta * s.xi**2, abs=1e-12)


def test_natural_point_reservoir_symmetry():
    s = evolve(params(0.6), 0.9)
    assert entanglement_mixed(natural_point_reservoir(s)) == pytest.approx(
        math.cos(0.6) * math.sin(0.6) * s.chi**2, abs=1e-12
    )


# -- timeseries --------------------------------------------------------------


def test_time_grid_defaults():
    g = time_grid(CavityParams(R2, R2, 2.0))
    assert len(g) == 201 and g[0] == 0 and g[-1] == 2.5


def test_time_grid_validation():
    with pytest.raises(ValueError):
        time_grid(SYM, 1.0, 1)
    with pytest.raises(ValueError):
        time_grid(SYM, 0.0, 5)


def test_timeseries_two_steps():
    rows = timeseries(SYM, 3.0, 2)
    assert [r.t for r in rows] == [0.0, 3.0]


def test_timeseries_monotone_and_conserved():
    p = params(0.5)
    rows = timeseries(p, 5.0, 201)
    e_cav = np.array([r.E_cav for r in rows])
    e_res = np.array([r.E_res for r in rows])
    assert np.all(np.diff(e_cav) < 0) and np.all(np.diff(e_res) > 0)
    np.testing.assert_allclose(e_cav + e_res, p.alpha * p.beta, atol=1e-9)
    assert [r.t for r in rows] == sorted(r.t for r in rows)


def test_timeseries_parallel_matches_serial(monkeypatch):
    p = params(0.9)
    monkeypatch.setenv("COHERENCE_LAB_THREADS", "1")
    serial = [r.row() for r in timeseries(p, 4.0, 101)]
    monkeypatch.setenv("COHERENCE_LAB_THREADS", "4")
    threaded = [r.row() for r in timeseries(p, 4.0, 101)]
    assert serial == threaded


# -- ESDB --------------------------------------------------------------------


def test_esdb_symmetric_never():
    rep = esdb_compare(SYM, 5.0, 201)
    assert rep.death_time is None
    assert rep.E_cav_positive and rep.min_E_cav > 0
    assert rep.to_dict()["concurrence_death_time"] == "never"


def test_esdb_death_at_ln2():
    rep = esdb_compare(ESD, 5.0, 201)
    assert abs(rep.death_time - math.log(2)) <= 1e-8
    assert rep.E_cav_positive and rep.min_E_cav > 0


def test_concurrence_positive_before_death():
    t_d = concurrence_death_time(ESD, 5.0)
    assert evolve(ESD, 0.9 * t_d).concurrence_cav > 0
    assert evolve(ESD, 1.2 * t_d).concurrence_cav == pytest.approx(0, abs=1e-7)
    assert evolve(ESD, 1.2 * t_d).E_cav > 0


def test_esdb_unentangled():
    p = CavityParams(1.0, 0.0)
    rep = esdb_compare(p, 5.0, 11)
    assert rep.min_E_cav == 0 and not rep.E_cav_positive
    for r in timeseries(p, 5.0, 11):
        assert r.E_cav == 0 and r.E_res == 0 and r.concurrence_cav == pytest.approx(0, abs=1e-7)
