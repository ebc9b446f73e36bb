import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hollowbubble.energy import (
    functional,
    gradient_fd_check,
    identity_report,
    jump_residual,
    lambda_fit,
    perimeter_lower_envelope,
    shape_gradient,
    weber_number,
)
from hollowbubble.geometry import FourierShape, discretize, ellipse_family, ellipse_log_energy, ellipse_perimeter, perimeter
from hollowbubble.potential import solve_equilibrium

from conftest import fourier_shapes, random_shape


def test_weber_number():
    assert weber_number(1, 1, 1, 1) == 1
    assert weber_number(1, 2, 1, 1) == 4
    assert weber_number(1, 1, 2, 1) == 0.5
    with pytest.raises(ValueError):
        weber_number(1, 1, 0, 1)
    with pytest.raises(ValueError):
        weber_number(1, 1, 1, -1)


@pytest.mark.parametrize("we", [0, 1, 2.5, 7])
def test_functional_disk(we):
    assert functional(discretize(FourierShape.disk(2), 64), we) == pytest.approx(2 * np.pi, abs=1e-12)


@pytest.mark.parametrize("t,we", [(0.2, 3), (0.5, 1.5), (-0.3, 4)])
def test_functional_ellipse_closed_form(t, we):
    _, d = ellipse_family(t, 256)
    assert functional(d, we) == pytest.approx(ellipse_perimeter(t) + we * np.pi * ellipse_log_energy(t), abs=1e-10)


def test_functional_ellipse_quartic_at_we3():
    t = 0.2
    f = ellipse_perimeter(t) + 3 * np.pi * ellipse_log_energy(t)
    # O(t^6) remainder beyond the quartic term; t^6 = 6.4e-5
    assert f - 2 * np.pi == pytest.approx(27 * np.pi / 96 * t**4, abs=2e-5)


def test_negative_we_rejected():
    with pytest.raises(ValueError):
        functional(discretize(FourierShape.disk(2), 64), -1)


def test_jump_residual_disk():
    d = discretize(FourierShape.disk(2), 64)
    sol = solve_equilibrium(d)
    for we in (0.0, 1.0, 3.7):
        np.testing.assert_allclose(jump_residual(d, sol, we, 1 - we / 2), 0, atol=1e-12)
    np.testing.assert_allclose(jump_residual(d, sol, 2.0, 0.0), 0, atol=1e-12)


def test_jump_residual_ellipse_nonzero():
    _, d = ellipse_family(0.3, 256)
    sol = solve_equilibrium(d)
    for we in (0.5, 3.0):
        r = jump_residual(d, sol, we, lambda_fit(d, sol, we))
        assert np.sqrt(d.integrate(r**2)) > 1e-2


def test_lambda_fit():
    d = discretize(FourierShape.disk(2), 64)
    sol = solve_equilibrium(d)
    for we in (0.0, 1.0, 4.0):
        assert lambda_fit(d, sol, we) == pytest.approx(1 - we / 2, abs=1e-12)
    _, e = ellipse_family(0.5, 256)
    se = solve_equilibrium(e)
    assert lambda_fit(e, se, 0.0) == pytest.approx(2 * np.pi / perimeter(e), abs=1e-14)
    lam = lambda_fit(e, se, 2.0)
    # both sides of the integrated jump condition by separate quadratures; Gauss-Bonnet for int H
    assert e.integrate(e.curvature) == pytest.approx(2 * np.pi, abs=1e-10)
    lhs = -e.integrate(se.neumann_trace**2) + e.integrate(e.curvature)
    assert lhs == pytest.approx(lam * perimeter(e), abs=1e-10)
    # arclength mean of the residual vanishes at the fitted lambda
    assert e.integrate(jump_residual(e, se, 2.0, lam)) == pytest.approx(0, abs=1e-10)


def test_shape_gradient_limits():
    d = discretize(FourierShape.disk(2), 64)
    sol = solve_equilibrium(d)
    np.testing.assert_allclose(shape_gradient(d, sol, 1.5), 0.25, atol=1e-12)
    s = discretize(FourierShape.mode(3, 0.1), 64)
    np.testing.assert_allclose(shape_gradient(s, solve_equilibrium(s), 0.0), s.curvature)


def test_shape_gradient_matches_central_difference(rng):
    shape = random_shape(rng, 6, 0.15)
    direction = random_shape(rng, 6, 1.0)
    errs = []
    for eps in (1e-2, 5e-3):
        g, fd = gradient_fd_check(shape, direction, 1.0, eps)
        errs.append(abs(g - fd))
    assert errs[0] < 1e-3
    assert np.log2(errs[0] / errs[1]) > 1.9


def test_identity_report_disk():
    d = discretize(FourierShape.disk(2), 64)
    rep = identity_report(d, we=2.0)
    ids = rep.identity_residuals
    for v in (ids.flux, ids.pohozaev, ids.minkowski_1, ids.minkowski_2, ids.jump_gb, ids.flux_l2, ids.cauchy_schwarz_slack):
        assert abs(v) < 1e-9
    assert rep.functional == we_pi_i_plus_p(rep)
    assert rep.jump_residual_norm < 1e-9


def we_pi_i_plus_p(rep):
    return rep.we * np.pi * rep.log_energy + rep.perimeter


def test_identity_report_random_shape(rng):
    d = discretize(random_shape(rng), 256).translated(0.3, -0.2)
    rep = identity_report(d, we=1.0)
    ids = rep.identity_residuals
    assert ids.universal_max() < 1e-9
    assert abs(ids.jump_gb) < 1e-12
    assert abs(ids.flux_l2) > 1e-4
    assert ids.cauchy_schwarz_slack > 0
    assert identity_report(d, we=0.0).identity_residuals.flux_l2 is None


def test_report_json_roundtrip():
    import json

    rep = identity_report(discretize(FourierShape.mode(2, 0.1), 64), we=1.0)
    d = json.loads(rep.to_json())
    assert d["identity_residuals"]["flux_l2"] == pytest.approx(rep.identity_residuals.flux_l2)


def test_perimeter_lower_envelope():
    for we in (0, 1, 5):
        assert perimeter_lower_envelope(2 * np.pi, we) == pytest.approx(2 * np.pi)
    assert perimeter_lower_envelope(4 * np.pi, 0) == pytest.approx(4 * np.pi)
    with pytest.raises(ValueError):
        perimeter_lower_envelope(6.0, 1)
    s = np.linspace(2 * np.pi, 40, 200)
    for we in (0, 1, 2):
        assert np.all(np.diff([perimeter_lower_envelope(x, we) for x in s]) >= 0)


@settings(max_examples=20, deadline=None)
@given(fourier_shapes(), st.floats(0, 6))
def test_functional_above_envelope(shape, we):
    d = discretize(shape.scaled_to_area(np.pi), 128)
    f = functional(d, we)
    assert f >= perimeter_lower_envelope(perimeter(d), we) - 1e-8
    if we <= 2:
        assert f >= 2 * np.pi - 1e-10
