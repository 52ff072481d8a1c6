import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qslkit import kernel
from qslkit.errors import DomainError

from conftest import small_p, sqrt_fidelities
from oracles import angle_factor_grid, tangency_coefficient


# -- tangency pair ------------------------------------------------------------

def test_p2_theta0_is_degenerate():
    pair = kernel.phi_pair(2.0, 0.0)
    assert pair.phi_plus == 0.0 and pair.phi_minus == 0.0
    assert pair.a_plus == pair.a_minus == 0.5


def test_p1_theta0_matches_high_precision_root():
    pair = kernel.phi_pair(1.0, 0.0)
    phi, a = tangency_coefficient(1.0, 0.0)
    assert pair.phi_plus == pytest.approx(phi, abs=1e-13)
    assert pair.a_plus == pytest.approx(a, abs=1e-13)
    assert pair.phi_plus == pytest.approx(2.33112, abs=1e-5)
    assert pair.a_plus == pytest.approx(0.72461, abs=1e-5)


def test_half_p_negative_theta_curve_touches_cosine():
    p, theta = 0.5, -0.75
    pair = kernel.phi_pair(p, theta)
    for phi, a, sign in ((pair.phi_plus, pair.a_plus, 1), (pair.phi_minus, pair.a_minus, -1)):
        d = sign * (phi - theta)
        curve = math.cos(theta) - a * d**p
        slope = -sign * a * p * d ** (p - 1)
        assert curve == pytest.approx(math.cos(phi), abs=1e-12)
        assert slope == pytest.approx(-math.sin(phi), abs=1e-12)
    ref_plus = tangency_coefficient(p, theta)
    ref_minus = tangency_coefficient(p, -theta)
    assert pair.phi_plus == pytest.approx(ref_plus[0], abs=1e-12)
    assert pair.phi_minus == pytest.approx(-ref_minus[0], abs=1e-12)


@pytest.mark.parametrize("p,theta", [(0.5, 1.8), (1.5, 0.2), (2.5, 0.0), (0.0, 0.0),
                                     (1.0, 2.0)])
def test_outside_region_rejected(p, theta):
    with pytest.raises(DomainError):
        kernel.phi_pair(p, theta)


@given(p=small_p, theta=st.floats(-math.pi / 2, math.pi / 2))
def test_mirror_identity(p, theta):
    pair = kernel.phi_pair(p, theta)
    mirrored = kernel.phi_pair(p, -theta)
    assert pair.phi_minus == pytest.approx(-mirrored.phi_plus, abs=1e-12)
    assert pair.a_minus == pytest.approx(mirrored.a_plus, rel=1e-12)


@given(p=small_p, theta=st.floats(-math.pi / 2, math.pi / 2))
def test_tangency_residual_and_range(p, theta):
    pair = kernel.phi_pair(p, theta)
    assert abs(kernel.tangent_residual(p, theta, pair.phi_plus)) <= 1e-12
    assert abs(theta) <= pair.phi_plus < math.pi
    assert pair.a_plus > 0 and pair.a_minus > 0


@given(p=st.floats(0.05, 1.0), theta=st.floats(-1.4, 1.4))
def test_against_high_precision_oracle(p, theta):
    phi, a = tangency_coefficient(p, theta)
    got_phi, got_a = kernel.tangent_plus(p, theta)
    assert got_phi == pytest.approx(phi, abs=1e-11)
    assert got_a == pytest.approx(a, rel=1e-10)


@given(p=small_p)
def test_monotone_trends(p):
    thetas = np.linspace(-math.pi / 2, math.pi / 2, 200)
    phis = np.array([kernel.phi_plus(p, t) for t in thetas])
    assert np.all(np.diff(phis - thetas) < 0)
    assert np.all(np.diff(phis + thetas) > 0)


def test_comparison_curve_bounds_cosine_at_theta_zero():
    x = np.linspace(-4 * math.pi, 4 * math.pi, 4001)
    for p in (0.1, 0.5, 1.0, 1.3, 1.7, 1.99):
        a = kernel.phi_pair(p, 0.0).a_plus
        assert np.all(np.cos(x) >= 1.0 - a * np.abs(x) ** p - 1e-12)


def test_small_p_coefficient_keeps_precision():
    # the comparison curve passes through cos(phi) at the tangency point even when phi ~ pi
    for p in (1e-4, 1e-3, 1e-2):
        phi, a = kernel.tangent_plus(p, 0.0)
        ref_phi, ref_a = tangency_coefficient(p, 0.0)
        assert a == pytest.approx(ref_a, rel=1e-10)


# -- h and epsilon_c -----------------------------------------------------------

def test_h_values():
    assert kernel.h(0.0) == 2.0
    assert kernel.h(math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-15)
    assert kernel.h_inverse(math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-12)
    assert kernel.h_inverse(2.0) == 0.0
    with pytest.raises(DomainError):
        kernel.h(-0.1)
    with pytest.raises(DomainError):
        kernel.h_inverse(2.5)


@given(y=st.floats(0.0, 2.0))
def test_h_inverse_round_trip(y):
    assert kernel.h(kernel.h_inverse(y)) == pytest.approx(y, abs=1e-12)


def test_h_strictly_decreasing():
    xs = np.linspace(0, math.pi, 2001)
    hs = np.array([kernel.h(x) for x in xs])
    assert np.all(np.diff(hs) < 0)


def test_epsilon_c():
    assert kernel.epsilon_c(math.pi / 2) == pytest.approx(0.0, abs=1e-24)
    assert kernel.epsilon_c(2.0) == 1.0
    e = kernel.epsilon_c(1.8)
    assert 0 < e < 1
    assert kernel.epsilon_c(1.79) < e < kernel.epsilon_c(1.81)
    with pytest.raises(DomainError):
        kernel.epsilon_c(1.0)


def test_lemma5_grid_maximum():
    rng = np.random.default_rng(5)
    x = np.linspace(1e-6, math.pi - 1e-6, 400001)
    for s in rng.uniform(0.0, 0.95, 20):
        base = (1.0 - s) / (2.0 * np.sin(x / 2) ** 2)
        val = x * base ** (1.0 / (x / np.tan(x / 2)))
        k = int(np.argmax(val))
        assert val[k] == pytest.approx(math.acos(s), abs=1e-6)
        assert abs(x[k] - math.acos(s)) <= 1e-3


# -- angular optimisation ----------------------------------------------------------

def test_theta_crit_at_unit_fidelity():
    assert kernel.theta_crit(0.4, 1.0) == 0.0


def test_theta_crit_p1_eps0_solves_defining_equation():
    tc = kernel.theta_crit(1.0, 0.0)
    phi_minus = kernel.tangent_minus(1.0, tc)[0]
    assert math.cos((phi_minus - tc) / 2) == pytest.approx(0.0, abs=1e-12)
    assert 0 < tc < math.pi / 2


def test_theta_crit_case_f_parameters():
    tc = kernel.theta_crit(0.7, 0.04)
    assert 0 < tc < math.acos(0.2)


@given(p=small_p, s=sqrt_fidelities)
def test_theta_crit_root(p, s):
    eps = s * s
    tc = kernel.theta_crit(p, eps)
    assert 0.0 <= tc <= math.acos(s) + 1e-15
    phi_minus = kernel.tangent_minus(p, tc)[0]
    r = math.cos((phi_minus - tc) / 2) - s * math.cos((phi_minus + tc) / 2)
    if tc < math.acos(s):
        assert abs(r) <= 1e-12


@pytest.mark.parametrize("p,eps", [(0.3, 0.0), (0.7, 0.2), (1.0, 0.5)])
def test_theta_opt_limits(p, eps):
    tc = kernel.theta_crit(p, eps)
    assert kernel.theta_opt(p, eps, 1.0).theta_opt == -tc
    assert kernel.theta_opt(p, eps, 0.0).theta_opt == tc


def test_theta_opt_fig3_parameters():
    sol = kernel.theta_opt(0.7, 0.2, 0.8)
    assert abs(sol.residual) <= 1e-12
    assert -sol.theta_crit <= sol.theta_opt <= sol.theta_crit
    # stationary point of the objective
    f = lambda t: kernel.angle_objective(0.7, 0.2, 0.8, t)
    h = 1e-5
    assert f(sol.theta_opt) >= f(sol.theta_opt + h) and f(sol.theta_opt) >= f(sol.theta_opt - h)


@given(p=small_p, s=st.floats(0.0, 0.95), mu=st.floats(0.01, 0.99))
def test_theta_opt_residual(p, s, mu):
    sol = kernel.theta_opt(p, s * s, mu)
    assert -sol.theta_crit <= sol.theta_opt <= sol.theta_crit
    interior = -sol.theta_crit < sol.theta_opt < sol.theta_crit
    if interior:
        assert abs(kernel.s_function(p, s * s, mu, sol.theta_opt)[0]) <= 1e-12


def test_angle_factor_unit_fidelity():
    assert kernel.cz_angle_factor(0.5, 1.0, 0.3)[0] == 0.0


@pytest.mark.parametrize("p,s,mu", [(1.0, 0.0, 1.0), (0.5, 0.2, 0.3), (0.8, 0.5, 0.7),
                                    (0.2, 0.0, 0.5)])
def test_angle_factor_against_grid(p, s, mu):
    got = kernel.cz_angle_factor(p, s * s, mu)[0]
    ref = angle_factor_grid(p, s, mu, n=4001)
    assert got >= ref - 1e-12
    assert got == pytest.approx(ref, rel=1e-6)


def test_angle_factor_reproduces_ml_factor():
    # mu+ = 1 and p = 1: cos(theta*) / A+(theta*) at theta* = -theta_crit
    factor, sol = kernel.cz_angle_factor(1.0, 0.0, 1.0)
    a = kernel.tangent_plus(1.0, sol.theta_opt)[1]
    assert factor == pytest.approx(math.cos(sol.theta_opt) / a, rel=1e-14)
    assert factor == pytest.approx(angle_factor_grid(1.0, 0.0, 1.0, n=20001), rel=1e-8)


def test_theta_zero_factor_is_chau_factor():
    a1 = kernel.phi_pair(1.0, 0.0).a_plus
    s = 0.3
    assert kernel.angle_objective(1.0, s * s, 0.5, 0.0) == pytest.approx((1 - s) / a1, rel=1e-14)
