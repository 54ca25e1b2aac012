import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirror_teleport import (
    Couplings,
    DomainError,
    IntegrationError,
    coeffs_analytic,
    coeffs_from_propagator,
    coeffs_ode,
    period,
    propagator,
    symplectic_defect,
)
from mirror_teleport.dynamics import _moment_derivatives

from conftest import COEFF_FIELDS

rate_pairs = st.tuples(
    st.floats(0.1, 50.0), st.floats(1.01, 3.0)
).map(lambda pb: Couplings.from_rates(pb[0], pb[0] * pb[1]))


def _vector(g):
    return np.array([getattr(g, f) for f in COEFF_FIELDS], dtype=float)


def test_initial_condition(moderate):
    g = coeffs_analytic(moderate, nbar=3.5, time=0.0)
    assert _vector(g) == pytest.approx([0.0, 3.5, 0.0, 0.0, 0.0, 0.0], abs=0.0)


def test_period(moderate):
    assert period(moderate) == pytest.approx(2.0 * math.pi / math.sqrt(5.0), rel=1e-15)


def test_periodicity(moderate):
    t = period(moderate)
    g0 = coeffs_analytic(moderate, nbar=2.0, time=0.0)
    g1 = coeffs_analytic(moderate, nbar=2.0, time=t)
    assert _vector(g1) == pytest.approx(_vector(g0), abs=1e-12)


def test_scalar_and_array_evaluation_agree(moderate):
    ts = np.linspace(0.0, period(moderate), 17)
    ga = coeffs_analytic(moderate, 1.5, ts)
    for i, t in enumerate(ts):
        gs = coeffs_analytic(moderate, 1.5, float(t))
        assert _vector(gs) == pytest.approx(
            [float(np.asarray(getattr(ga, f))[i]) for f in COEFF_FIELDS], rel=1e-15
        )


def test_coefficients_affine_in_nbar(moderate):
    # Each coefficient is a + b*nbar at fixed time; check by interpolation.
    t = 0.73
    v0 = _vector(coeffs_analytic(moderate, 0.0, t))
    v1 = _vector(coeffs_analytic(moderate, 1.0, t))
    v7 = _vector(coeffs_analytic(moderate, 7.0, t))
    assert v7 == pytest.approx(v0 + 7.0 * (v1 - v0), rel=1e-12, abs=1e-12)


def test_propagator_identity_at_zero(moderate):
    assert propagator(moderate, 0.0).matrix == pytest.approx(np.eye(3), abs=0.0)


@given(c=rate_pairs, x=st.floats(0.0, 12.0))
@settings(max_examples=80, deadline=None)
def test_propagator_preserves_commutator_metric(c, x):
    assert symplectic_defect(propagator(c, x / c.oscillation)) < 1e-12


@given(c=rate_pairs, x1=st.floats(0.0, 6.0), x2=st.floats(0.0, 6.0))
@settings(max_examples=60, deadline=None)
def test_propagator_group_property(c, x1, x2):
    t1, t2 = x1 / c.oscillation, x2 / c.oscillation
    m12 = propagator(c, t1 + t2).matrix
    prod = propagator(c, t1).matrix @ propagator(c, t2).matrix
    scale = max(1.0, np.abs(m12).max()) ** 2
    assert np.abs(m12 - prod).max() / scale < 1e-11


def test_propagator_inverse_is_negative_time(moderate):
    m = propagator(moderate, 0.4).matrix
    minv = propagator(moderate, -0.4).matrix
    assert m @ minv == pytest.approx(np.eye(3), abs=1e-13)


@given(c=rate_pairs, x=st.floats(0.0, 6.2), nbar=st.floats(0.0, 50.0))
@settings(max_examples=80, deadline=None)
def test_moment_route_matches_closed_form(c, x, nbar):
    t = x / c.oscillation
    va = _vector(coeffs_analytic(c, nbar, t))
    vm = _vector(coeffs_from_propagator(propagator(c, t), nbar))
    assert np.abs(va - vm).max() / max(1.0, np.abs(va).max()) < 1e-12


def test_sign_map_fixed_by_first_derivatives(moderate):
    # d/dt at t=0: stokes_mirror' = parametric*(1 + nbar),
    # mirror_anti' = -beam_splitter*nbar, everything else zero to O(t).
    nbar = 4.0
    h = 1e-8
    g = coeffs_analytic(moderate, nbar, h)
    assert g.stokes_mirror / h == pytest.approx(
        moderate.parametric * (1.0 + nbar), rel=1e-6
    )
    assert g.mirror_anti / h == pytest.approx(
        -moderate.beam_splitter * nbar, rel=1e-6
    )
    assert abs(g.stokes_anti) < 1e-13


def test_closed_form_satisfies_moment_odes(moderate):
    # Central finite differences of the closed form vs the ODE right-hand
    # side, across one full period.
    nbar = 2.0
    h = 1e-7
    for t in np.linspace(0.05, period(moderate), 23):
        lhs = (
            _vector(coeffs_analytic(moderate, nbar, t + h))
            - _vector(coeffs_analytic(moderate, nbar, t - h))
        ) / (2.0 * h)
        rhs = _moment_derivatives(
            _vector(coeffs_analytic(moderate, nbar, t)),
            moderate.parametric,
            moderate.beam_splitter,
        )
        assert np.abs(lhs - rhs).max() < 1e-6


def test_rk4_matches_closed_form(moderate):
    ts = np.linspace(0.0, period(moderate), 101)[1:]
    for nbar in (0.0, 10.0):
        ode = coeffs_ode(moderate, nbar, ts, dt_max=1e-4)
        ana = coeffs_analytic(moderate, nbar, ts)
        for f in COEFF_FIELDS:
            assert np.abs(
                np.asarray(getattr(ode, f)) - np.asarray(getattr(ana, f))
            ).max() < 1e-9


def test_rk4_scalar_time(moderate):
    g = coeffs_ode(moderate, 1.0, 0.3, dt_max=1e-4)
    ana = coeffs_analytic(moderate, 1.0, 0.3)
    assert _vector(g) == pytest.approx(_vector(ana), abs=1e-10)


def test_rk4_step_doubling_guards_against_coarse_steps(moderate):
    with pytest.raises(IntegrationError):
        coeffs_ode(moderate, 0.0, period(moderate), dt_max=0.3)


def test_rk4_certifies_stiff_regime_window(bench_couplings):
    # Near-degenerate rates: certification only over a short window, with
    # the defect scaled by the coefficient size (entries reach ~1e8 here).
    c = bench_couplings
    ts = np.linspace(0.0, 30.0 / c.parametric, 51)[1:]
    ode = coeffs_ode(c, 1.0, ts, dt_max=2e-3 / c.parametric, doubling_tol=1e-9)
    ana = coeffs_analytic(c, 1.0, ts)
    for f in COEFF_FIELDS:
        a = np.asarray(getattr(ana, f))
        o = np.asarray(getattr(ode, f))
        assert np.max(np.abs(a - o) / np.maximum(1.0, np.abs(a))) < 1e-8


def test_invalid_inputs(moderate):
    with pytest.raises(DomainError):
        coeffs_analytic(moderate, -0.5, 1.0)
    with pytest.raises(DomainError):
        coeffs_analytic(moderate, 1.0, -1.0)
    with pytest.raises(DomainError):
        coeffs_ode(moderate, 1.0, [0.2, 0.1], dt_max=1e-3)
    with pytest.raises(DomainError):
        coeffs_ode(moderate, 1.0, 0.5, dt_max=0.0)
