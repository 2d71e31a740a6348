import numpy as np
import pytest
from scipy.special import jv, jvp

from gbessel.core import COSINE, SINE, HarmonicCoefficients
from gbessel.errors import InvalidInputError
from gbessel.pde import (
    AUX_G,
    LAPLACIAN,
    PDE1,
    PDE2,
    SCHRODINGER,
    ResidualReport,
    finite_difference_check,
    pde_suite,
    reports_csv,
    residual_aux,
    residual_laplacian,
    residual_pde1,
    residual_pde2,
    residual_schrodinger,
)


@pytest.fixture(scope="module")
def suite():
    return pde_suite(seed=0, count=30)


def test_suite_covers_every_identity(suite):
    assert {r.identity for r in suite} == {PDE1, PDE2, LAPLACIAN, SCHRODINGER, AUX_G, "aux-gx"}
    assert len(suite) == 6 * 30


def test_identities_hold(suite):
    worst = max(r.relative for r in suite)
    assert worst < 1e-10


def test_flipped_identities_fail(suite):
    live = [r for r in suite if r.scale > 1e-12]
    assert min(r.flipped().relative for r in live) > 1e-3


@pytest.mark.parametrize("n", [0, 1, 3])
@pytest.mark.parametrize("x", [0.7, 4.2])
def test_second_pde_reduces_to_bessel_at_zero_y(n, x):
    report = residual_pde2(n, x, 0.0)
    assert report.relative < 1e-12
    # term by term against scipy: x^2 J'' + x J' + (x^2 - n^2) J
    jpp = jvp(n, x, 2)
    assert report.terms["[x^2+4y(n-2y)]f_xx"].real == pytest.approx(x * x * jpp, abs=1e-13)
    assert report.terms["x f_x"].real == pytest.approx(x * jvp(n, x), abs=1e-13)
    assert report.terms["[x^2-(n-2y)^2]f"].real == pytest.approx((x * x - n * n) * jv(n, x), abs=1e-13)


def test_first_pde_at_sample_point():
    assert residual_pde1(2, 1.3, -0.8).relative < 1e-12


def test_laplacian_and_schrodinger_on_three_harmonics():
    h = HarmonicCoefficients.from_arrays([0.9, -1.4, 0.3], [0.2, 0.5, -2.0])
    for n in (0, 2, -1):
        for k in (1, 2, 3):
            assert residual_laplacian(h, n, k).relative < 1e-12
        assert residual_schrodinger(h, n).relative < 1e-12


def test_laplacian_rejects_bad_harmonic():
    with pytest.raises(InvalidInputError):
        residual_laplacian(HarmonicCoefficients.from_arrays([1.0]), 0, 0)


def test_aux_identities():
    for report in residual_aux(3, 2.2, -1.1):
        assert report.relative < 1e-12


@pytest.mark.parametrize("slot", [(SINE, 1), (COSINE, 2)])
def test_recursion_matches_finite_difference(slot):
    h = HarmonicCoefficients.from_arrays([0.4, 1.1], [-0.7, 0.3])
    analytic, numeric = finite_difference_check(h, 1, slot)
    assert analytic == pytest.approx(numeric, abs=1e-9)


def test_relative_ignores_noise():
    r = ResidualReport("pde1", 0, (0.0,), (0.0,), {"a": 1e-15, "b": 1e-15})
    assert r.relative == 0.0
    assert r.scaled(2.0).terms["a"] == 2e-15


def test_csv_columns(suite):
    text = reports_csv(suite[:3])
    header, first = text.splitlines()[:2]
    assert header == "n,x,y,identity,residual,relative"
    assert first.split(",")[3] == PDE1


def test_suite_is_deterministic():
    a = [r.relative for r in pde_suite(seed=5, count=4)]
    b = [r.relative for r in pde_suite(seed=5, count=4)]
    assert a == b
    assert np.all(np.isfinite(a))
