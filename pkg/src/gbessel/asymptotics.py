"""Stationary phase for ``J_n(t x; t y)`` and ``J_{t n}(t x; t y)`` as ``t`` grows.

Both regimes share the phase ``f(t) = nu t - h(t)`` (``nu = 0`` for large
argument, ``nu = n`` for large order and argument), with amplitude
``exp(i n t)`` in the first case and ``1`` in the second. Stationary points
solve ``h'(t) = nu``; in ``c = cos t``, ``s = sin t`` this reads
``A(c) - s B(c) = nu`` with ``A = sum k x_k T_k`` and ``B = sum k y_k U_{k-1}``.

The integrand is ``2 pi`` periodic, so stationary points at ``t = +-pi`` are
ordinary interior points of the circle; they are flagged but not excluded.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .bifurcation import NU, coefficient_names, large_order_surfaces
from .core import HarmonicCoefficients, QuadratureSpec, eval_mtgbf, phase_eval
from .errors import DecayRegimeError, DomainError, InvalidInputError, NearCriticalError
from .poly import chebyshev, real_roots

LARGE_ARG = "large-argument"
LARGE_ORDER = "large-order"

DECAY = "exponential-decay"
OSCILLATORY = "oscillatory"
NEAR_BOUNDARY = "near-boundary"

STATIONARY_TOL = 1e-10
CRITICAL_TOL = 1e-8
BOUNDARY_TOL = 1e-6

WINDOW = 0.1
WINDOW_SAMPLES = 65


@dataclass(frozen=True)
class StationaryPoint:
    theta: float
    f_value: float
    f_second: float

    @property
    def at_endpoint(self) -> bool:
        return abs(abs(self.theta) - math.pi) < 1e-9


@dataclass
class StationaryPointSet:
    regime: str
    nu: float
    points: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.points

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _regime(regime: str) -> str:
    aliases = {"large-arg": LARGE_ARG, LARGE_ARG: LARGE_ARG, LARGE_ORDER: LARGE_ORDER}
    if regime not in aliases:
        raise InvalidInputError(f"unknown regime {regime!r}")
    return aliases[regime]


@lru_cache(maxsize=None)
def _cheb_float(kind: str, k: int) -> np.ndarray:
    if k < 0:
        return np.zeros(1)
    return np.array([float(c.constant_value()) if c.terms else 0.0
                     for c in chebyshev(kind, k).coefficients_in("u")])


def _add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(max(len(a), len(b)))
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def _phase_polys(h: HarmonicCoefficients, nu: float) -> tuple:
    """Ascending coefficients of ``A(c) - nu`` and ``B(c)``."""
    A, B = np.array([-float(nu)]), np.zeros(1)
    for k, x, y in h.entries:
        if x:
            A = _add(A, k * x * _cheb_float("first", k))
        if y:
            B = _add(B, k * y * _cheb_float("second", k - 1))
    return A, B


def _first(h, nu, theta):
    return nu - phase_eval(h, theta, 1)


def _refine(h, nu, theta):
    # Newton on f'(t) = nu - h'(t); f'' = -h''
    for _ in range(50):
        g = _first(h, nu, theta)
        d = -phase_eval(h, theta, 2)
        if d == 0 or abs(g) < 1e-15:
            break
        step = g / d
        theta -= step
        if abs(step) < 1e-16:
            break
    return math.remainder(theta, 2 * math.pi)


def _candidate_angles(h: HarmonicCoefficients, nu: float) -> list:
    A, B = _phase_polys(h, nu)
    if not np.any(B):
        # pure sine phase: A(u) = 0 and both signs of sin t
        target = np.trim_zeros(A, "b")
        if len(target) <= 1:
            return []
        roots = [r.midpoint for r in real_roots(list(target), -1, 1)]
        return [s * math.acos(max(-1.0, min(1.0, u))) for u in roots for s in (1, -1)]
    # (A - nu)^2 = (1 - c^2) B^2 removes s, then s = (A - nu) / B
    circle = np.array([1.0, 0.0, -1.0])
    P = _add(np.polynomial.polynomial.polymul(A, A),
             -np.polynomial.polynomial.polymul(circle, np.polynomial.polynomial.polymul(B, B)))
    P = np.trim_zeros(P, "b")
    if len(P) <= 1:
        return []
    out = []
    for r in real_roots(list(P), -1, 1):
        c = max(-1.0, min(1.0, r.midpoint))
        a = np.polynomial.polynomial.polyval(c, A)
        b = np.polynomial.polynomial.polyval(c, B)
        root = math.sqrt(max(0.0, 1.0 - c * c))
        signs = (1.0, -1.0) if abs(b) < 1e-12 else (math.copysign(1.0, a / b),)
        out.extend(math.atan2(s * root, c) for s in signs)
    return out


def stationary_points(h: HarmonicCoefficients, n_ratio: float = 0.0,
                      regime: str = LARGE_ARG) -> StationaryPointSet:
    """Solutions of ``h'(t) = nu`` on the circle, refined to ``|f'| < 1e-10``.

    ``nu`` is ``n_ratio`` in the large-order regime and 0 for large argument.
    Candidates come from exact root isolation in ``cos t``; the sine branch is
    settled by requiring ``f'(t) = 0``, and spurious combinations are dropped.
    """
    regime = _regime(regime)
    nu = float(n_ratio) if regime == LARGE_ORDER else 0.0
    out = StationaryPointSet(regime, nu)
    scale = 1.0 + abs(nu) + h.bandwidth()
    seen: list = []
    for theta in _candidate_angles(h, nu):
        theta = _refine(h, nu, theta)
        if theta >= math.pi:
            theta -= 2 * math.pi
        if abs(_first(h, nu, theta)) > STATIONARY_TOL * scale:
            continue
        if any(abs(math.remainder(theta - s, 2 * math.pi)) < 1e-9 for s in seen):
            continue
        seen.append(theta)
        f_val = nu * theta - phase_eval(h, theta, 0)
        f_two = -phase_eval(h, theta, 2)
        point = StationaryPoint(theta, float(f_val), float(f_two))
        if point.at_endpoint:
            out.warnings.append(f"stationary point at the endpoint t = {theta:+.17g}")
        if abs(f_two) < CRITICAL_TOL * scale:
            out.warnings.append(f"near-critical point at t = {theta:+.17g} (f'' = {f_two:.3e})")
        out.points.append(point)
    out.points.sort(key=lambda p: p.theta)
    return out


def stationary_phase_estimate(h: HarmonicCoefficients, n: float, t: float,
                              regime: str = LARGE_ARG) -> complex:
    """Leading stationary-phase term of the integral.

    Large argument: ``J_n(t h)``. Large order: ``J_{t n}(t h)``, with ``n``
    the order-to-scale ratio. Each point contributes
    ``g exp(i t f) sqrt(2 pi / (t |f''|)) exp(+-i pi/4) / (2 pi)``.
    """
    regime = _regime(regime)
    t = float(t)
    if t < 1:
        raise DomainError("the estimate needs t >= 1")
    points = stationary_points(h, n, regime)
    if points.empty:
        raise DecayRegimeError("no stationary points: the integral decays faster than any power")
    scale = 1.0 + abs(points.nu) + h.bandwidth()
    total = 0j
    for p in points:
        if abs(p.f_second) < CRITICAL_TOL * scale:
            raise NearCriticalError(f"f'' = {p.f_second:.3e} at t = {p.theta:.6f}")
        amp = np.exp(1j * n * p.theta) if regime == LARGE_ARG else 1.0
        rot = np.exp(1j * math.copysign(math.pi / 4, p.f_second))
        total += amp * np.exp(1j * t * p.f_value) * math.sqrt(2 * math.pi / (t * abs(p.f_second))) * rot
    return complex(total / (2 * math.pi))


def _quadrature(h: HarmonicCoefficients, n: float, t: float, regime: str,
                spec: QuadratureSpec | None = None) -> complex:
    if regime == LARGE_ARG:
        return eval_mtgbf(h.scaled(t), int(n), spec)
    order = t * n
    if abs(order - round(order)) > 1e-9:
        raise InvalidInputError("t * n must be an integer order")
    return eval_mtgbf(h.scaled(t), int(round(order)), spec)


@dataclass
class ComparisonRow:
    t: float
    quadrature: complex
    estimate: complex
    pointwise_error: float
    window_error: float

    @property
    def rel_error(self) -> float:
        return self.window_error


def _window(t: float, n: float, regime: str) -> np.ndarray:
    ts = t * (1 + WINDOW * np.linspace(0.0, 1.0, WINDOW_SAMPLES))
    if regime == LARGE_ORDER and n:
        ts = np.unique(np.round(ts * n)) / n
    return ts


def compare_estimate(h: HarmonicCoefficients, n: float, t_values: Sequence[float],
                     regime: str = LARGE_ARG) -> list:
    """Estimate against quadrature at each ``t``.

    ``window_error`` is the RMS error over ``[t, 1.1 t]`` divided by the RMS
    of the quadrature values there. A single ``t`` can sit next to a zero of
    ``J`` and inflate the pointwise ratio; the window averages over a few
    oscillations and follows the ``t^{-1/2}`` trend.
    """
    regime = _regime(regime)
    rows = []
    for t in t_values:
        quad = _quadrature(h, n, t, regime)
        est = stationary_phase_estimate(h, n, t, regime)
        ts = _window(float(t), n, regime)
        q = np.array([_quadrature(h, n, s, regime) for s in ts])
        e = np.array([stationary_phase_estimate(h, n, s, regime) for s in ts])
        window = float(np.sqrt(np.mean(np.abs(e - q) ** 2) / np.mean(np.abs(q) ** 2)))
        rows.append(ComparisonRow(float(t), quad, est, abs(est - quad) / abs(quad), window))
    return rows


def comparison_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "quadrature_re", "quadrature_im", "estimate_re", "estimate_im",
                "rel_error", "pointwise_error"])
    for r in rows:
        w.writerow([f"{v:.17g}" for v in (r.t, r.quadrature.real, r.quadrature.imag,
                                          r.estimate.real, r.estimate.imag,
                                          r.rel_error, r.pointwise_error)])
    return buf.getvalue()


# classification -----------------------------------------------------------------


def _surface_distance(h: HarmonicCoefficients, nu: float) -> float | None:
    """Smallest scaled value of a large-order surface polynomial at ``(h, nu)``."""
    if not h.is_pure_sine or not h.entries:
        return None
    p = h.indices
    if math.gcd(*p) != 1:
        return None
    family = large_order_surfaces(p)
    values = dict(zip(coefficient_names(len(p)), h.x))
    values[NU] = nu
    best = math.inf
    for entry in family.entries:
        poly = entry.poly
        mag = poly.magnitude(values)
        if mag > 0:
            best = min(best, abs(float(poly.evaluate(values))) / mag)
    return best


def classify_point(h: HarmonicCoefficients, n_ratio: float) -> str:
    """Decay regime of ``J_{t n}(t h)``: decay, oscillatory or near a boundary."""
    nu = float(n_ratio)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        points = stationary_points(h, nu, LARGE_ORDER)
    if any(abs(p.f_second) < BOUNDARY_TOL for p in points):
        return NEAR_BOUNDARY
    d = _surface_distance(h, nu)
    if d is not None and d < BOUNDARY_TOL:
        return NEAR_BOUNDARY
    return DECAY if points.empty else OSCILLATORY


@dataclass
class DecayReport:
    regime: str
    t: tuple
    amplitude: tuple
    slope: float
    fit_against: str


def decay_rate_probe(h: HarmonicCoefficients, n: float, t_list: Sequence[float]) -> DecayReport:
    """Least-squares slope of ``log |J_{t n}(t h)|``.

    In the oscillatory regime the fit is against ``log t`` (expected slope
    ``-1/2``) using the RMS amplitude over ``[t, 1.1 t]``; in the decay
    regime it is against ``t`` using pointwise values.
    """
    t_list = [float(t) for t in t_list]
    if len(t_list) < 4 or any(b <= a for a, b in zip(t_list, t_list[1:])):
        raise InvalidInputError("need at least four increasing t values")
    regime = classify_point(h, n)
    if regime == DECAY or h.is_zero:
        amps = [abs(_quadrature(h, n, t, LARGE_ORDER)) for t in t_list]
        xs, against = np.array(t_list), "t"
    else:
        amps = []
        for t in t_list:
            q = np.array([_quadrature(h, n, s, LARGE_ORDER) for s in _window(t, n, LARGE_ORDER)])
            amps.append(float(np.sqrt(np.mean(np.abs(q) ** 2))))
        xs, against = np.log(t_list), "log t"
    keep = [i for i, a in enumerate(amps) if a > 1e-300]
    if len(keep) < 2:
        raise InvalidInputError("too few non-negligible values to fit")
    slope = float(np.polyfit(xs[keep], np.log([amps[i] for i in keep]), 1)[0])
    return DecayReport(regime, tuple(t_list), tuple(amps), slope, against)
