import math

import numpy as np
import pytest

from gbessel.bifurcation import (
    NONTRIVIAL,
    ODD_ALTERNATE,
    SMOOTHNESS,
    TRIVIAL,
    curve_csv,
    large_arg_surfaces,
    large_order_surfaces,
    mt_critical_gap,
    mt_surfaces,
    sample_surface,
    schlomilch_boundaries,
    validate_surface_point,
)
from gbessel.errors import InvalidInputError
from gbessel.poly import divides, parse_poly

rng = np.random.default_rng(11)


def relative_value(poly, point):
    return abs(float(poly.evaluate(point))) / poly.magnitude(point)


def test_large_arg_trivial_planes():
    fam = large_arg_surfaces((1, 2))
    assert [e.poly.to_text() for e in fam.entries] == ["x + 2*y", "x - 2*y"]
    assert {e.kind for e in fam.entries} == {TRIVIAL}
    odd = large_arg_surfaces((1, 3))
    assert [e.kind for e in odd.entries] == [TRIVIAL, ODD_ALTERNATE]
    assert odd.entries[1].poly.to_text() == "x - 9*y"


def test_large_order_trivial_planes_and_core():
    fam = large_order_surfaces((1, 2))
    assert [f.to_text() for f in fam.polys(TRIVIAL)] == ["x + 2*y - nu", "x - 2*y + nu"]
    (core,) = fam.polys(NONTRIVIAL)
    assert core == parse_poly("x^2 + 32*y^2 + 16*y*nu", core.vars).primitive()


def test_large_order_core_for_one_three():
    (core,) = large_order_surfaces((1, 3)).polys(NONTRIVIAL)
    target = parse_poly("(x - 9*y)^3 + 81*y*nu^2", core.vars)
    assert divides(target, core)


@pytest.mark.parametrize("p", [(1, 2), (1, 3), (2, 3)])
def test_large_order_core_vanishes_on_constructed_critical_points(p):
    # pick t and x, solve f''(t) = 0 for y, read off nu = f'(t)
    (core,) = large_order_surfaces(p).polys(NONTRIVIAL)
    a, b = p
    for _ in range(10):
        t = rng.uniform(0.1, math.pi - 0.1)
        x = rng.uniform(-3, 3)
        y = -x * a * a * math.sin(a * t) / (b * b * math.sin(b * t))
        nu = x * a * math.cos(a * t) + y * b * math.cos(b * t)
        assert relative_value(core, {"x": x, "y": y, "nu": nu}) < 1e-12


def test_validity_flags_complex_angle_points():
    # on x^2 + 32y^2 + 16 y nu = 0 the angle has cos t = -x/(8y)
    nu = 1.0
    y = -0.05
    x = math.sqrt(-32 * y * y - 16 * y * nu)
    assert abs(x / (8 * y)) > 1
    assert not validate_surface_point((1, 2), nu, (x, y)).valid
    y = -0.5
    x = math.sqrt(-32 * y * y - 16 * y * nu)
    assert abs(x / (8 * y)) <= 1
    assert validate_surface_point((1, 2), nu, (x, y)).valid


def test_trivial_planes_are_always_valid():
    assert validate_surface_point((1, 2), 3.0, (1.0, 1.0)).valid  # x + 2y = nu
    assert validate_surface_point((1, 2), 0.5, (1.5, 1.0)).valid  # x - 2y + nu = 0
    assert not validate_surface_point((1, 2), 0.5, (2.5, 3.0)).valid


def test_schlomilch_one_two_contains_known_sextic():
    fam = schlomilch_boundaries((1, 2))
    (entry,) = fam.entries
    assert entry.kind == SMOOTHNESS
    sextic = parse_poly(
        "64*nu^4*y^2 + nu^2*(x^4 - 80*x^2*y^2 - 128*y^4) + (64*y^6 - 48*x^2*y^4 + 12*x^4*y^2 - x^6)",
        entry.poly.vars,
    )
    assert divides(sextic, entry.poly)


def test_schlomilch_one_three_cubic_factor():
    (entry,) = schlomilch_boundaries((1, 3)).entries
    cubic = parse_poly("27*nu^2*y - (x + 3*y)^3", entry.poly.vars)
    assert divides(cubic, entry.poly)


@pytest.mark.parametrize("p", [(1, 2), (1, 3)])
def test_schlomilch_boundary_vanishes_where_h_touches_level(p):
    (entry,) = schlomilch_boundaries(p).entries
    a, b = p
    for _ in range(10):
        t = rng.uniform(0.1, math.pi - 0.1)
        x = rng.uniform(-3, 3)
        y = -x * a * math.cos(a * t) / (b * math.cos(b * t))
        nu = x * math.sin(a * t) + y * math.sin(b * t)
        assert relative_value(entry.poly, {"x": x, "y": y, "nu": nu}) < 1e-11


def test_mt_surface_is_irreducible_sextic_with_real_critical_points():
    fam = mt_surfaces((1, 2))
    (entry,) = fam.entries
    sextic = [f for f in entry.factors if f.total_degree() == 6]
    assert len(sextic) == 1
    poly = sextic[0]
    for _ in range(8):
        # f'(t) = f''(t) = 0 is linear in (x2, y2) for fixed t, x1, y1
        t, x1, y1 = rng.uniform(-math.pi, math.pi), rng.uniform(-2, 2), rng.uniform(-2, 2)
        A = np.array([[2 * math.cos(2 * t), -2 * math.sin(2 * t)],
                      [4 * math.sin(2 * t), 4 * math.cos(2 * t)]])
        rhs = -np.array([x1 * math.cos(t) - y1 * math.sin(t), x1 * math.sin(t) + y1 * math.cos(t)])
        x2, y2 = np.linalg.solve(A, rhs)
        point = {"x1": x1, "x2": x2, "y1": y1, "y2": y2}
        assert relative_value(poly, point) < 1e-10
        assert mt_critical_gap((1, 2), (x1, x2, y1, y2)) < 1e-7


def test_mt_critical_gap_is_positive_off_surface():
    assert mt_critical_gap((1, 2), (3.0, 1.0, 0.0, 0.0)) > 1e-3


def test_mt_regime_validation():
    with pytest.raises(InvalidInputError):
        mt_surfaces((1, 2), "tiny-arg")


def test_non_coprime_indices_rejected():
    with pytest.raises(InvalidInputError):
        large_order_surfaces((2, 4))
    with pytest.raises(InvalidInputError):
        large_arg_surfaces((1, 1))


def test_sample_surface_points_lie_on_curve():
    (core,) = large_order_surfaces((1, 2)).polys(NONTRIVIAL)
    pts = sample_surface(core, 1.0, [(-3, 3), (-1, 0.5)], resolution=80)
    assert len(pts) > 20
    f = core.lambdify(("x", "y"), {"nu": 1.0})
    # the curve x^2 = -32y^2 - 16y has gradient of order one, so values track distance
    assert np.max(np.abs(f(pts[:, 0], pts[:, 1]))) < 1e-8


def test_sample_surface_one_free_variable():
    f = parse_poly("x^2 - 2")
    pts = sample_surface(f, None, [(-2, 2)], resolution=9)
    assert pts[:, 0] == pytest.approx([-math.sqrt(2), math.sqrt(2)], abs=1e-9)


def test_sample_surface_checks_box():
    with pytest.raises(InvalidInputError):
        sample_surface(parse_poly("x + y"), None, [(-1, 1)])


def test_curve_csv_layout():
    f = parse_poly("x - y")
    text = curve_csv(np.array([[0.5, 0.5]]), f)
    assert text.splitlines() == ["# zero set of x - y", "x,y", "0.5,0.5"]


def test_families_serialise():
    fam = large_order_surfaces((1, 2))
    data = fam.to_json()
    assert data["vars"] == ["x", "y", "nu"]
    assert data["entries"][2]["kind"] == NONTRIVIAL
    assert "x^2 + 32*y^2 + 16*y*nu = 0" in fam.to_text()
