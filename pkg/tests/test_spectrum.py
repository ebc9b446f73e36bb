import numpy as np
import pytest

from hollowbubble.spectrum import (
    CALIBRATION,
    ToleranceError,
    bifurcation_points,
    calibrate,
    dispersion,
    dtn_symbol,
    ellipse_quartic_check,
    neumann_response,
    second_variation_fd,
    spectrum_table,
)


def test_dtn_symbol():
    assert dtn_symbol(0) == 0
    assert dtn_symbol(3) == dtn_symbol(-3) == 3


def test_dispersion_values():
    assert dispersion(1, 7.3).eigenvalue == 0
    assert dispersion(-1, 0).eigenvalue == 0
    assert dispersion(2, 3).eigenvalue == 0
    assert dispersion(2, 0).eigenvalue == 3
    assert dispersion(1, 5).tag == "translation"
    assert dispersion(2, 3).tag == "bifurcation"


def test_dispersion_sign_table():
    for we in np.arange(0, 10.01, 0.5):
        for k in range(2, 65):
            e = dispersion(k, we).eigenvalue
            assert e == dispersion(-k, we).eigenvalue
            # the neutral mode |k| = We - 1 sits on the boundary of the unstable band
            assert (e < 0) == (2 <= k < we - 1)
            assert (e == 0) == (k == we - 1)
            if we < 3:
                assert e > 0


def test_bifurcation_points():
    assert bifurcation_points(0, 2.9) == []
    assert [b.we for b in bifurcation_points(2.5, 5.5)] == [3, 4, 5]
    (b,) = bifurcation_points(3, 3)
    assert b.kernel_modes == (2, -2)
    with pytest.raises(ValueError):
        bifurcation_points(4, 3)


def test_calibration_constant():
    assert calibrate() == pytest.approx(CALIBRATION, rel=1e-5)


@pytest.mark.parametrize("we,k,target", [(0, 2, 3.0), (3, 2, 0.0), (4, 2, -1.0), (2, 5, 16.0)])
def test_second_variation(we, k, target):
    v = second_variation_fd(we, k, 1e-3)
    assert v == pytest.approx(target, rel=1e-3, abs=1e-3)


def test_second_variation_converges_quadratically():
    target = dispersion(3, 1.0).eigenvalue
    e1 = abs(second_variation_fd(1.0, 3, 2e-2, richardson=False) - target)
    e2 = abs(second_variation_fd(1.0, 3, 1e-2, richardson=False) - target)
    assert e1 / e2 == pytest.approx(4, rel=0.1)


def test_second_variation_rejects_bad_input():
    with pytest.raises(ValueError):
        second_variation_fd(1.0, 1)
    with pytest.raises(ValueError):
        second_variation_fd(1.0, 6, n_nodes=64)
    with pytest.raises(ToleranceError):
        second_variation_fd(0.0, 6, eps=0.2, n_nodes=128, check_tol=1e-4)


def test_spectrum_table_rows():
    rows = spectrum_table(range(1, 4), [0.0, 3.0])
    assert len(rows) == 6
    assert all(r.abs_err < 1e-3 for r in rows)
    assert [r.tag for r in rows if r.we == 3.0] == ["translation", "bifurcation", "stable"]


@pytest.mark.parametrize("k", [2, 3, 5])
def test_neumann_response_matches_dtn(k):
    # outward normal of the bubble: first-order response (Lambda - 1) delta eta
    assert neumann_response(k, 1e-3) == pytest.approx(dtn_symbol(k) - 1, rel=0.05)


def test_ellipse_quartic_check():
    t = np.linspace(0.01, 0.25, 25)
    f3 = ellipse_quartic_check(3, t)
    assert abs(f3.c2) < 1e-4
    assert f3.c4 == pytest.approx(9 * np.pi / 32, rel=0.01)
    assert ellipse_quartic_check(0, t).c2 == pytest.approx(1.5 * np.pi, rel=1e-3)
    f4 = ellipse_quartic_check(4, t)
    assert f4.c2 == pytest.approx(-np.pi / 2, rel=1e-3)
    with pytest.raises(ValueError):
        ellipse_quartic_check(1, [0.0, 0.1])
