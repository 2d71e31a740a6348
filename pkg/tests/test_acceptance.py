"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines are repeated in the terminal summary) or directly
with ``python tests/test_acceptance.py``.
"""

import math
import time
import warnings

import numpy as np
import pytest
from scipy.special import jv, jvp

from gbessel.asymptotics import (
    DECAY,
    classify_point,
    compare_estimate,
    decay_rate_probe,
    stationary_points,
)
from gbessel.bifurcation import (
    NONTRIVIAL,
    large_order_surfaces,
    schlomilch_boundaries,
    validate_surface_point,
)
from gbessel.core import ORACLE, HarmonicCoefficients, eval_gbf, eval_mtgbf, eval_orders
from gbessel.pde import pde_suite, residual_pde2
from gbessel.poly import divides, parse_poly, sylvester_resultant
from gbessel.series import (
    F1,
    F2,
    F3,
    kapteyn_closed,
    kapteyn_moment,
    neumann_direct,
    neumann_f3_closed,
    neumann_moment,
    omega_membership,
    schlomilch_direct,
    schlomilch_polylog,
    square_identity_check,
)

RESULTS = {}


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}"
    RESULTS[number] = line
    print(line)
    return ok


def coefficient_suite(seed=2024, count=20, box=2.0):
    """Seeded mixed-type phases on random subsets of harmonics 1..3."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        size = int(rng.integers(1, 4))
        ks = sorted(int(k) for k in rng.choice([1, 2, 3], size=size, replace=False))
        out.append(HarmonicCoefficients.from_arrays(
            rng.uniform(-box, box, size), rng.uniform(-box, box, size), ks))
    return out


# 1 ------------------------------------------------------------------------------


def check_exact_algebra():
    parts = []
    (core12,) = large_order_surfaces((1, 2)).polys(NONTRIVIAL)
    parts.append(("large-order (1,2)", core12, "x^2 + 32*y^2 + 16*y*nu"))
    (core13,) = large_order_surfaces((1, 3)).polys(NONTRIVIAL)
    parts.append(("large-order (1,3)", core13, "(x - 9*y)^3 + 81*y*nu^2"))
    (b12,) = schlomilch_boundaries((1, 2)).polys()
    parts.append(("smoothness (1,2)", b12,
                  "64*nu^4*y^2 + nu^2*(x^4 - 80*x^2*y^2 - 128*y^4) "
                  "+ (64*y^6 - 48*x^2*y^4 + 12*x^4*y^2 - x^6)"))
    (b13,) = schlomilch_boundaries((1, 3)).polys()
    parts.append(("smoothness (1,3)", b13, "nu^2*y - (x^3 + 9*x^2*y + 27*x*y^2 + 27*y^3)"))
    verdicts = []
    for label, computed, text in parts:
        verdicts.append((label, bool(divides(parse_poly(text, computed.vars), computed))))
    ok = all(v for _, v in verdicts)
    detail = "; ".join(f"{label} {'divides' if v else 'does NOT divide'}" for label, v in verdicts)
    if not verdicts[3][1]:
        (b13,) = schlomilch_boundaries((1, 3)).polys()
        fixed = parse_poly("27*nu^2*y - (x + 3*y)^3", b13.vars)
        detail += f" (27*nu^2*y - (x+3y)^3 divides: {bool(divides(fixed, b13))})"
    return ok, detail


# 2 ------------------------------------------------------------------------------


def check_resultant():
    vars = ("x", "a", "b", "c", "d")
    r = sylvester_resultant(parse_poly("a*x + b + 1", vars), parse_poly("c*x + d", vars), "x")
    want = parse_poly("a*d - b*c - c", ("a", "b", "c", "d"))
    got = r.with_vars(want.vars)
    return got == want, f"Res = {got.to_text()}"


# 3 ------------------------------------------------------------------------------


def check_pde_suite():
    reports = pde_suite(seed=0, count=100, box=5.0, orders=range(6))
    worst = max(r.relative for r in reports)
    live = [r for r in reports if r.scale > 1e-13]
    controls = [r.flipped().relative for r in live]
    weakest = min(controls)
    ok = worst < 1e-8 and weakest > 1e-3 and len(live) == len(reports)
    return ok, (f"{len(reports)} residuals over 100 points, max relative {worst:.2e}; "
                f"{len(controls)} perturbed controls, min relative {weakest:.2e}")


# 4 ------------------------------------------------------------------------------


def check_bessel_reduction():
    rng = np.random.default_rng(4)
    worst_res, worst_term = 0.0, 0.0
    for _ in range(30):
        n, x = int(rng.integers(0, 6)), float(rng.uniform(-5, 5))
        report = residual_pde2(n, x, 0.0)
        classical = {
            "[x^2+4y(n-2y)]f_xx": x * x * jvp(n, x, 2),
            "x f_x": x * jvp(n, x),
            "[x^2-(n-2y)^2]f": (x * x - n * n) * jv(n, x),
        }
        scale = max(abs(v) for v in classical.values())
        worst_term = max(worst_term, max(abs(report.terms[k] - v) for k, v in classical.items()) / scale)
        worst_res = max(worst_res, report.relative)
    ok = worst_res < 1e-8 and worst_term < 1e-8
    return ok, f"max relative residual {worst_res:.2e}; max term deviation from Bessel's equation {worst_term:.2e}"


# 5 ------------------------------------------------------------------------------


def check_normalisation():
    suite = coefficient_suite()
    worst_sum, worst_f30, worst_f31 = 0.0, 0.0, 0.0
    for h in suite:
        sine = HarmonicCoefficients.from_arrays(h.x, None, h.indices)
        _, values = eval_orders(sine, 40)
        worst_sum = max(worst_sum, abs(complex(np.sum(values)) - 1))
        worst_f30 = max(worst_f30, abs(neumann_direct(F3, h, 0).direct - 1))
        worst_f31 = max(worst_f31, abs(neumann_direct(F3, h, 1).direct))
    ok = max(worst_sum, worst_f30, worst_f31) < 1e-10
    return ok, (f"|sum J_n - 1| <= {worst_sum:.1e}, |f3(0) - 1| <= {worst_f30:.1e}, "
                f"|f3(1)| <= {worst_f31:.1e} over {len(suite)} phases")


# 6 ------------------------------------------------------------------------------


def kapteyn_suite(seed=6, count=10):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        size = int(rng.integers(1, 3))
        ks = sorted(int(k) for k in rng.choice([1, 2, 3], size=size, replace=False))
        h = HarmonicCoefficients.from_arrays(rng.uniform(-0.4, 0.4, size), rng.uniform(-0.4, 0.4, size), ks)
        if omega_membership(h) and h.bandwidth() < 0.8:
            out.append(h)
    return out


def check_moment_closed_forms():
    worst = {}
    for h in coefficient_suite(count=10):
        for series, top in ((F1, 3), (F2, 2), (F3, 2)):
            for ell in range(top + 1):
                d = neumann_moment(series, h, ell).abs_diff
                worst[series] = max(worst.get(series, 0.0), d)
    for h in kapteyn_suite():
        for ell in range(3):
            d = kapteyn_moment(h, ell).abs_diff
            worst["kapteyn"] = max(worst.get("kapteyn", 0.0), d)
    spot = kapteyn_closed(HarmonicCoefficients.from_gbf((1,), (0.5,)), 0)[0]
    ok = max(worst.values()) < 1e-8 and abs(spot - 1.0) < 1e-8
    body = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return ok, f"max |closed - direct|: {body}; mu_0(1/2) = {spot.real:.15f}"


# 7 ------------------------------------------------------------------------------


def check_f32():
    worst = 0.0
    for h in coefficient_suite(seed=7):
        worst = max(worst, abs(neumann_f3_closed(h, 2) - neumann_direct(F3, h, 2).direct))
    x = 1.7
    one = HarmonicCoefficients.from_gbf((1,), (x,))
    reduce_err = abs(neumann_f3_closed(one, 2) - x * x / 2)
    direct_err = abs(neumann_direct(F3, one, 2).direct - x * x / 2)
    ok = worst < 1e-9 and reduce_err < 1e-15 and direct_err < 1e-9
    return ok, (f"max |closed - direct| {worst:.1e}; m=1 closed - x^2/2 = {reduce_err:.1e}, "
                f"direct - x^2/2 = {direct_err:.1e}")


# 8 ------------------------------------------------------------------------------


def check_stationary_phase():
    h = HarmonicCoefficients.from_gbf((1, 2), (3.0, 1.0))
    ts = [20, 40, 80, 160]
    rows = compare_estimate(h, 0, ts)
    err = [r.rel_error for r in rows]
    pointwise = [r.pointwise_error for r in rows]
    monotone = all(b < a for a, b in zip(err, err[1:]))
    ratio = err[-1] / err[0]
    slope = decay_rate_probe(h, 0.0, ts).slope
    ok = err[0] < 0.1 and monotone and ratio < 0.5 and abs(slope + 0.5) <= 0.1
    return ok, ("window RMS errors " + ", ".join(f"{e:.2e}" for e in err)
                + " (pointwise " + ", ".join(f"{e:.2e}" for e in pointwise) + ")"
                + f"; end/start {ratio:.3f}; amplitude slope {slope:+.3f}")


# 9 ------------------------------------------------------------------------------


def check_region_structure(nu=1.0, rays=20, radius=3.0, samples=301):
    family = large_order_surfaces((1, 2))
    rng = np.random.default_rng(9)

    def decays(r, a):
        h = HarmonicCoefficients.from_gbf((1, 2), (r * math.cos(a), r * math.sin(a)))
        return classify_point(h, nu) == DECAY

    transitions, worst = 0, 0.0
    for _ in range(rays):
        a = float(rng.uniform(0, 2 * math.pi))
        rs = np.linspace(1e-3, radius, samples)
        state = [decays(r, a) for r in rs]
        for i in range(samples - 1):
            if state[i] == state[i + 1]:
                continue
            lo, hi = rs[i], rs[i + 1]
            while hi - lo > 1e-12:
                mid = 0.5 * (lo + hi)
                if decays(mid, a) == state[i]:
                    lo = mid
                else:
                    hi = mid
            r = 0.5 * (lo + hi)
            point = {"x": r * math.cos(a), "y": r * math.sin(a), "nu": nu}
            dist = min(abs(float(p.evaluate(point))) / p.magnitude(point) for p in family.polys())
            worst = max(worst, dist)
            transitions += 1

    # arc of x^2 + 32y^2 + 16 y nu = 0 with |x / 8y| > 1 (y > -nu/6) has no real angle
    invalid_ok, valid_ok = True, True
    for y in np.linspace(-nu / 6, 0, 12)[1:-1]:
        x = math.sqrt(-32 * y * y - 16 * y * nu)
        invalid_ok &= abs(x / (8 * y)) > 1 and not validate_surface_point((1, 2), nu, (x, y)).valid
    for y in np.linspace(-nu / 2, -nu / 6, 12)[1:-1]:
        x = math.sqrt(-32 * y * y - 16 * y * nu)
        valid_ok &= validate_surface_point((1, 2), nu, (x, y)).valid
    ok = transitions > 0 and worst < 1e-3 and invalid_ok and valid_ok
    return ok, (f"{transitions} transitions on {rays} rays, max scaled surface value {worst:.1e}; "
                f"upper arc flagged invalid: {invalid_ok}; lower arc valid: {valid_ok}")


# 10 -----------------------------------------------------------------------------


def check_square_identities():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(12):
        k = int(rng.integers(1, 4))
        h = HarmonicCoefficients.from_arrays([rng.uniform(-2, 2)], [rng.uniform(-2, 2)], [k])
        for n in range(4):
            worst = max(worst, *square_identity_check(h, n))
    return worst < 1e-8, f"max residual {worst:.1e} over 12 single-harmonic points, n = 0..3"


# 11 -----------------------------------------------------------------------------


def away_from_boundaries(h, margin=0.3):
    # smoothness boundaries: critical values of h at multiples of 2 pi
    crit = [-p.f_value for p in stationary_points(h)]
    return all(abs(math.remainder(v, 2 * math.pi)) > margin for v in crit)


def check_schlomilch():
    rng = np.random.default_rng(11)
    worst, checked = 0.0, 0
    while checked < 10:
        h = HarmonicCoefficients.from_gbf((1, 2), tuple(rng.uniform(-3, 3, 2)))
        if not away_from_boundaries(h):
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            direct = schlomilch_direct(h, 0, 2).direct
        worst = max(worst, abs(direct - schlomilch_polylog(h, 0)))
        checked += 1
    zero = HarmonicCoefficients.from_gbf((1, 2), (0.0, 0.0))
    at_zero = schlomilch_polylog(zero, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        direct_zero = schlomilch_direct(zero, 0, 2)
    ok = worst < 1e-6 and abs(at_zero - math.pi**2 / 6) < 1e-8
    return ok, (f"max |direct - polylog| {worst:.1e} at 10 points; "
                f"zero argument polylog - pi^2/6 = {abs(at_zero - math.pi ** 2 / 6):.1e} "
                f"(direct with N={direct_zero.N}: {abs(direct_zero.direct - math.pi ** 2 / 6):.1e})")


# 12 -----------------------------------------------------------------------------


def check_oracle_discipline(count=1000):
    rng = np.random.default_rng(12)
    worst = 0.0
    for i in range(count):
        size = int(rng.integers(1, 4))
        ks = sorted(int(k) for k in rng.choice([1, 2, 3, 4, 5], size=size, replace=False))
        if math.gcd(*ks) != 1:
            ks.append(1 if 1 not in ks else 7)
            ks.sort()
        k = np.array(ks, float)
        x = rng.uniform(-1, 1, len(ks))
        y = np.zeros(len(ks)) if i % 2 == 0 else rng.uniform(-1, 1, len(ks))
        budget = rng.uniform(0, 40)
        scale = budget / float(np.sum(k * (np.abs(x) + np.abs(y))))
        h = HarmonicCoefficients.from_arrays(x * scale, y * scale, ks)
        n = int(rng.integers(-20, 21))
        if i % 2 == 0:
            fast, slow = eval_gbf(h, n), eval_gbf(h, n, ORACLE)
        else:
            fast, slow = eval_mtgbf(h, n), eval_mtgbf(h, n, ORACLE)
        worst = max(worst, abs(fast - slow))
    return worst < 1e-11, f"max |fast - oracle| {worst:.1e} over {count} points"


CHECKS = {
    1: check_exact_algebra,
    2: check_resultant,
    3: check_pde_suite,
    4: check_bessel_reduction,
    5: check_normalisation,
    6: check_moment_closed_forms,
    7: check_f32,
    8: check_stationary_phase,
    9: check_region_structure,
    10: check_square_identities,
    11: check_schlomilch,
    12: check_oracle_discipline,
}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    ok, detail = CHECKS[number]()
    assert record(number, ok, detail), detail


if __name__ == "__main__":
    for number, check in CHECKS.items():
        start = time.perf_counter()
        ok, detail = check()
        record(number, ok, f"{detail} [{time.perf_counter() - start:.1f}s]")
