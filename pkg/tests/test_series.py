import math
import warnings

import mpmath
import numpy as np
import pytest

from gbessel.core import HarmonicCoefficients, eval_orders
from gbessel.errors import DomainError, InvalidInputError, UnsupportedOrderError
from gbessel.series import (
    F1,
    F2,
    F3,
    ArgumentMoments,
    clausen2,
    dilog_unit,
    kapteyn_closed,
    kapteyn_context,
    kapteyn_direct,
    kapteyn_moment,
    neumann_direct,
    neumann_f3_closed,
    neumann_moment,
    omega_membership,
    schlomilch_direct,
    schlomilch_eval,
    schlomilch_moment,
    schlomilch_polylog,
    schlomilch_terms_needed,
    square_identity_check,
)

H = HarmonicCoefficients.from_arrays


@pytest.fixture(scope="module")
def mixed():
    return H([0.8, -0.5, 0.3], [0.4, 0.2, -0.6])


def test_argument_moments():
    m = ArgumentMoments.of(H([1.0, 2.0], [3.0, 0.0]))
    assert m.X == (3.0, 5.0, 9.0, 17.0)
    assert m.Y == (3.0, 3.0, 3.0, 3.0)


@pytest.mark.parametrize("series,top", [(F1, 3), (F2, 2), (F3, 2)])
def test_neumann_closed_forms_match_direct_sums(mixed, series, top):
    for ell in range(top + 1):
        report = neumann_moment(series, mixed, ell)
        assert report.abs_diff < 1e-10, (series, ell, report)


def test_neumann_direct_against_plain_fft(mixed):
    # independent truncation: one FFT over |n| <= 60
    orders, values = eval_orders(mixed, 60)
    for ell in range(3):
        want = np.sum(orders.astype(float) ** ell * values)
        assert neumann_direct(F1, mixed, ell).direct == pytest.approx(want, abs=1e-12)


def test_f3_normalisation_and_second_moment():
    h = H([1.2, -0.7])
    assert neumann_f3_closed(h, 0) == 1.0
    assert neumann_f3_closed(h, 1) == 0.0
    assert neumann_f3_closed(h, 2) == pytest.approx((1.2**2 + 4 * 0.7**2) / 2)
    assert neumann_f3_closed(H([0.9]), 2) == pytest.approx(0.9**2 / 2)


def test_unsupported_moment_orders(mixed):
    with pytest.raises(UnsupportedOrderError):
        neumann_moment(F2, mixed, 3)
    with pytest.raises(InvalidInputError):
        neumann_moment(F1, mixed, -1)


def test_fixed_truncation_is_respected(mixed):
    assert neumann_direct(F1, mixed, 0, N=3).N == 3


@pytest.mark.parametrize("n", [0, 1, 3])
def test_square_identities(n):
    h = H([1.3], [0.6])
    a, b = square_identity_check(h, n)
    assert a < 1e-10 and b < 1e-10


def test_omega_membership():
    assert omega_membership(H([0.5]))
    assert not omega_membership(H([1.5]))
    assert omega_membership(H([0.2, 0.1], [0.1, 0.05]))
    with pytest.raises(DomainError):
        kapteyn_context(H([0.3, 0.4]))


def test_kapteyn_classical_sum():
    # sum_{n>=1} J_n(n x) = x / (2(1 - x)), and the n < 0 half doubles it
    for x in (0.2, 0.5, 0.7):
        value, ctx = kapteyn_closed(H([x]), 0)
        assert value == pytest.approx(x / (1 - x), abs=1e-12)
        assert ctx.theta0 == pytest.approx(0.0, abs=1e-14)
    assert kapteyn_closed(H([0.5]), 0)[0] == pytest.approx(1.0, abs=1e-12)


def test_kapteyn_moments_match_direct_one_dimensional():
    h = H([0.5])
    for ell, want in ((0, 1.0), (1, 0.0), (2, 8.0)):
        report = kapteyn_moment(h, ell)
        assert report.closed == pytest.approx(want, abs=1e-12)
        assert report.abs_diff < 1e-9


def test_kapteyn_moments_match_direct_mixed_type():
    # h''(theta_0) != 0 here, which fixes the sign of the first moment
    h = H([0.2, 0.1], [0.15, -0.05])
    for ell in range(3):
        report = kapteyn_moment(h, ell)
        assert report.abs_diff < 1e-9, (ell, report)
    assert abs(kapteyn_moment(h, 1).closed.imag) > 1e-3


def test_kapteyn_direct_validates_truncation():
    with pytest.raises(InvalidInputError):
        kapteyn_direct(H([0.5]), 0, N=0)


@pytest.mark.parametrize("phi", [0.3, 1.0, 2.5, 4.0, -1.2])
def test_clausen_and_dilog_against_mpmath(phi):
    assert clausen2(phi) == pytest.approx(float(mpmath.clsin(2, phi)), abs=1e-13)
    want = complex(mpmath.polylog(2, mpmath.exp(1j * phi)))
    assert dilog_unit(phi) == pytest.approx(want, abs=1e-13)


def test_schlomilch_zero_argument():
    h = H([0.0, 0.0])
    assert schlomilch_polylog(h, 0) == pytest.approx(math.pi**2 / 6, abs=1e-12)
    direct = schlomilch_direct(h, 0, 2, N=1000).direct
    assert direct.real == pytest.approx(float(mpmath.zeta(2) - mpmath.zeta(2, 1001)), abs=1e-12)


def test_schlomilch_direct_vs_polylog():
    h = H([0.7, -0.4])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        report = schlomilch_moment(h, 0, 2)
    assert report.abs_diff < 1e-6


def test_schlomilch_direct_against_termwise_fft():
    h = H([0.9, 0.4])
    direct = schlomilch_direct(h, 1, 3, N=40).direct
    want = 0j
    for n in range(1, 41):
        orders, values = eval_orders(h.scaled(n), 2)
        want += values[list(orders).index(1)] / n**3
    assert direct == pytest.approx(want, abs=1e-13)


def test_schlomilch_tail_bound_and_cap():
    assert schlomilch_terms_needed(3) == 2237
    with pytest.warns(RuntimeWarning):
        report = schlomilch_direct(H([0.1]), 0, 2)
    assert report.N == 4096


def test_schlomilch_methods_validation():
    h = H([0.3])
    with pytest.raises(UnsupportedOrderError):
        schlomilch_eval(h, 0, 1)
    with pytest.raises(UnsupportedOrderError):
        schlomilch_polylog(h, 0, 3)
    with pytest.raises(InvalidInputError):
        schlomilch_eval(h, 0, 2, method="euler")


def test_report_serialisation(mixed):
    data = neumann_moment(F1, mixed, 1).to_json()
    assert set(data) == {"series", "ell", "closed", "direct", "N", "abs_diff"}
    assert "abs_diff" in neumann_moment(F1, mixed, 1).to_text()
