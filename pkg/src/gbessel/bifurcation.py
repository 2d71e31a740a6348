"""Bifurcation surfaces and Schlomilch smoothness boundaries as exact polynomials.

Phase derivatives are rewritten as polynomials in ``c = cos t`` (and
``s = sin t`` where needed) through ``cos kt = T_k(c)`` and
``sin kt = s U_{k-1}(c)``; the critical-point conditions are then eliminated
with resultants. ``nu`` is a symbolic variable standing for the order ``n``
(large order and argument) or for ``2 pi n`` (smoothness boundaries).

Resultants describe a superset of the true loci: points whose stationary
angle is complex lie on the polynomial too. :func:`validate_surface_point`
filters them numerically by checking ``|cos t| <= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidInputError
from .poly import (
    MultiPoly,
    chebyshev,
    divides,
    eliminate,
    irreducible_factors,
    real_roots,
    cauchy_bound,
    squarefree_primitive,
    sylvester_resultant,
)

NU = "nu"

TRIVIAL = "trivial-linear"
ODD_ALTERNATE = "odd-alternate"
NONTRIVIAL = "nontrivial-eliminant"
SMOOTHNESS = "smoothness-boundary"


@dataclass(frozen=True)
class SurfaceEntry:
    poly: MultiPoly
    kind: str
    validity_note: str
    raw: MultiPoly | None = None
    factors: tuple = ()

    def to_json(self) -> dict:
        out = {"kind": self.kind, "validity_note": self.validity_note,
               "text": self.poly.to_text(), "poly": self.poly.to_json()}
        if self.raw is not None:
            out["raw"] = self.raw.to_json()
        if self.factors:
            out["factors"] = [f.to_text() for f in self.factors]
        return out


@dataclass
class SurfaceFamily:
    indices: tuple
    regime: str
    vars: tuple
    entries: list = field(default_factory=list)

    def polys(self, kind: str | None = None) -> list:
        return [e.poly for e in self.entries if kind is None or e.kind == kind]

    def to_json(self) -> dict:
        return {"indices": list(self.indices), "regime": self.regime, "vars": list(self.vars),
                "entries": [e.to_json() for e in self.entries]}

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            lines.append(f"[{e.kind}] {e.poly.to_text()} = 0")
            if len(e.factors) > 1:
                for f in e.factors:
                    lines.append(f"    factor: {f.to_text()}")
            if e.validity_note:
                lines.append(f"    valid where: {e.validity_note}")
        return "\n".join(lines)


def coefficient_names(m: int) -> tuple:
    if m == 1:
        return ("x",)
    if m == 2:
        return ("x", "y")
    return tuple(f"x{i + 1}" for i in range(m))


def _check_indices(p: Sequence[int]) -> tuple:
    p = tuple(int(k) for k in p)
    if not p or any(k < 1 for k in p) or len(set(p)) != len(p):
        raise InvalidInputError(f"index set must be distinct positive integers, got {p}")
    if reduce(math.gcd, p) != 1:
        raise InvalidInputError(f"indices {p} are not coprime")
    return p


def _cheb(kind: str, k: int, vars: tuple) -> MultiPoly:
    if k < 0:
        return MultiPoly.const(0, vars)
    return chebyshev(kind, k, "c").with_vars(vars)


def _sin_k(k, vars):
    return MultiPoly.var("s", vars) * _cheb("second", k - 1, vars)


def _cos_k(k, vars):
    return _cheb("first", k, vars)


def split_factors(f: MultiPoly, candidates: Sequence[MultiPoly] = ()) -> tuple:
    """Squarefree primitive part of ``f`` split into recognisable factors.

    Single variables (degenerate leading coefficients) and the given
    candidates are divided out when they divide; the remaining cofactor is
    returned as the core. Result: ``(sqf, core, factors)``.
    """
    sqf = squarefree_primitive(f)
    rest = sqf
    factors = []
    for v in rest.used_vars():
        g = MultiPoly.var(v, rest.vars)
        d = divides(g, rest)
        if d:
            factors.append(g)
            rest = d.quotient
    for c in candidates:
        c = c.primitive()
        if c.is_constant:
            continue
        d = divides(c, rest)
        if d:
            factors.append(c.with_vars(rest.vars))
            rest = d.quotient
    if not rest.is_constant:
        factors.append(rest.primitive())
    core = rest.primitive() if not rest.is_constant else sqf
    return sqf, core, tuple(factors)


# large argument ---------------------------------------------------------------


def large_arg_surfaces(p: Sequence[int]) -> SurfaceFamily:
    """Linear bifurcation surfaces of ``J_n^p(t x)`` for large ``t``."""
    p = _check_indices(p)
    names = coefficient_names(len(p))
    X = [MultiPoly.var(v, names) for v in names]
    fam = SurfaceFamily(p, "large-arg", names)
    at0 = sum((k * x for k, x in zip(p, X)), MultiPoly.const(0, names))
    atpi = sum(((-1) ** k * k * x for k, x in zip(p, X)), MultiPoly.const(0, names))
    seen = []

    def add(poly, kind, note):
        poly = poly.primitive()
        if any(poly == q for q in seen):
            return
        seen.append(poly)
        fam.entries.append(SurfaceEntry(poly, kind, note))

    if all(k % 2 for k in p):
        add(at0, TRIVIAL, "always (t = 0 and t = pi branches coincide)")
        alt = sum(((-1) ** ((k + 1) // 2) * k * k * x for k, x in zip(p, X)), MultiPoly.const(0, names))
        add(alt, ODD_ALTERNATE, "always (t = pi/2 branch)")
    else:
        add(at0, TRIVIAL, "always (t = 0 branch)")
        add(atpi, TRIVIAL, "always (t = pi branch)")
    return fam


# large order and argument -------------------------------------------------------


def large_order_surfaces(p: Sequence[int]) -> SurfaceFamily:
    """Bifurcation surfaces of ``J_{tn}^p(t x)``: two trivial planes and the eliminant."""
    return _large_order_surfaces(_check_indices(p))


@lru_cache(maxsize=64)
def _large_order_surfaces(p: tuple) -> SurfaceFamily:
    names = coefficient_names(len(p))
    vars = ("c",) + names + (NU,)
    X = [MultiPoly.var(v, vars) for v in names]
    nu = MultiPoly.var(NU, vars)
    zero = MultiPoly.const(0, vars)
    fam = SurfaceFamily(p, "large-order", names + (NU,))
    out_vars = names + (NU,)

    at0 = sum((k * x for k, x in zip(p, X)), zero) - nu
    atpi = sum(((-1) ** k * k * x for k, x in zip(p, X)), zero) - nu
    fam.entries.append(SurfaceEntry(at0.with_vars(out_vars).primitive(), TRIVIAL, "always (t = 0 branch)"))
    fam.entries.append(SurfaceEntry(atpi.with_vars(out_vars).primitive(), TRIVIAL, "always (t = pi branch)"))

    first = sum((k * x * _cos_k(k, vars) for k, x in zip(p, X)), zero) - nu
    second = sum((k * k * x * _cheb("second", k - 1, vars) for k, x in zip(p, X)), zero)
    if second.degree("c") < 1:
        return fam
    raw = sylvester_resultant(first, second, "c").with_vars(out_vars)
    sqf, core, factors = split_factors(raw)
    fam.entries.append(SurfaceEntry(
        core, NONTRIVIAL,
        "only where the stationary angle is real: some root c of "
        + second.with_vars(vars).to_text() + " = 0 with |c| <= 1",
        raw=raw, factors=factors,
    ))
    return fam


# mixed type -----------------------------------------------------------------------


def mt_names(indices: Sequence[int]) -> tuple:
    return tuple(f"x{k}" for k in indices) + tuple(f"y{k}" for k in indices)


def _mt_derivatives(indices, vars):
    zero = MultiPoly.const(0, vars)
    d1, d2 = zero, zero
    for k in indices:
        x, y = MultiPoly.var(f"x{k}", vars), MultiPoly.var(f"y{k}", vars)
        d1 = d1 + k * (x * _cos_k(k, vars) - y * _sin_k(k, vars))
        d2 = d2 + k * k * (x * _sin_k(k, vars) + y * _cos_k(k, vars))
    return d1, d2


def mt_surfaces(indices: Sequence[int], regime: str = "large-arg") -> SurfaceFamily:
    """Eliminant surface for an MT-GBF with sine and cosine slots at ``indices``.

    With cosine terms present ``f''`` has no ``sin t`` factor, so only the
    full eliminant of ``{f' - nu, f'', s^2 + c^2 - 1}`` is produced (``nu``
    absent in the large-argument regime). Both derivatives are linear in
    ``s``, so ``s`` is eliminated between them first; pairing each one with
    the circle instead lets the two pick opposite signs of ``s`` and inflates
    the eliminant. The irreducible factors are listed; which of them carry
    real critical angles is decided numerically by :func:`mt_critical_gap`.
    """
    indices = _check_indices(indices)
    if regime not in ("large-arg", "large-order"):
        raise InvalidInputError(f"unknown regime {regime!r}")
    names = mt_names(indices)
    extra = (NU,) if regime == "large-order" else ()
    vars = ("s", "c") + names + extra
    d1, d2 = _mt_derivatives(indices, vars)
    if extra:
        d1 = d1 - MultiPoly.var(NU, vars)
    s, c = MultiPoly.var("s", vars), MultiPoly.var("c", vars)
    raw = eliminate([d2, s * s + c * c - 1, d1], ["s", "c"]).with_vars(names + extra)
    sqf = squarefree_primitive(raw)
    fam = SurfaceFamily(indices, f"mt-{regime}", names + extra)
    fam.entries.append(SurfaceEntry(sqf, NONTRIVIAL, "only where the stationary angle is real",
                                    raw=raw, factors=tuple(irreducible_factors(sqf))))
    return fam


def mt_critical_gap(indices: Sequence[int], point: Sequence[float], n: float = 0.0,
                    samples: int = 4096) -> float:
    """Smallest scaled ``|f'(t) - n| + |f''(t)|`` over real ``t``.

    ``point`` lists ``x_k`` then ``y_k`` in the order of :func:`mt_names`.
    Near zero means the point carries a genuine degenerate stationary angle.
    """
    indices = tuple(indices)
    m = len(indices)
    xs, ys = np.asarray(point[:m], float), np.asarray(point[m:], float)
    k = np.asarray(indices, float)

    def gap(t):
        t = np.atleast_1d(t)[:, None]
        d1 = (k * (xs * np.cos(k * t) - ys * np.sin(k * t))).sum(axis=1) - n
        d2 = (k * k * (xs * np.sin(k * t) + ys * np.cos(k * t))).sum(axis=1)
        return np.abs(d1) + np.abs(d2)

    scale = abs(n) + float(np.sum(k * k * (np.abs(xs) + np.abs(ys)))) or 1.0
    grid = np.linspace(-math.pi, math.pi, samples, endpoint=False)
    vals = gap(grid)
    step = 2 * math.pi / samples
    best = float(vals.min())
    for i in np.argsort(vals)[:8]:
        res = minimize_scalar(lambda t: float(gap(t)[0]), bounds=(grid[i] - step, grid[i] + step),
                              method="bounded", options={"xatol": 1e-12})
        best = min(best, float(res.fun))
    return best / scale


# validity ---------------------------------------------------------------------------


@dataclass
class ValidityReport:
    indices: tuple
    n: float
    point: tuple
    candidates: list
    valid: bool

    def to_json(self) -> dict:
        return {"indices": list(self.indices), "n": self.n, "point": list(self.point),
                "candidates": self.candidates, "valid": self.valid}


def _cheb_numeric(kind, k):
    return [float(c.constant_value()) if c.terms else 0.0
            for c in chebyshev(kind, k).coefficients_in("u")]


def _ascending_sum(parts):
    size = max(len(a) for a in parts)
    out = np.zeros(size)
    for a in parts:
        out[: len(a)] += a
    return out


def validate_surface_point(p: Sequence[int], n: float, point: Sequence[float],
                           tol: float = 1e-8) -> ValidityReport:
    """Decide whether a point of the large-order eliminant is a true critical locus.

    Solves ``f'(t) = n`` and ``f''(t) = 0`` in ``u = cos t`` at the point:
    candidates are the roots of ``sum x_k p_k^2 U_{p_k-1}(u)`` together with
    ``u = +-1`` (the ``sin t = 0`` factor). A point is valid when some
    candidate lies in ``[-1, 1]`` and both relative residuals are below ``tol``.
    """
    p = _check_indices(p)
    x = [float(v) for v in point]
    if len(x) != len(p):
        raise InvalidInputError("point dimension does not match the index set")
    first = _ascending_sum([xk * k * np.array(_cheb_numeric("first", k)) for k, xk in zip(p, x)])
    second = _ascending_sum([xk * k * k * np.array(_cheb_numeric("second", k - 1)) for k, xk in zip(p, x)])
    cands = []
    sec = np.trim_zeros(second, "b")
    if len(sec) > 1:
        bound = max(2.0, cauchy_bound(list(sec)))
        for r in real_roots(list(sec), -bound, bound):
            cands.append((r.midpoint, "nontrivial"))
    cands += [(1.0, "sin=0"), (-1.0, "sin=0")]
    out = []
    for u, branch in cands:
        f1 = np.polyval(first[::-1], u) - n
        s1 = 1.0 + abs(n) + sum(abs(xk) * k * max(1.0, abs(u)) ** k for k, xk in zip(p, x))
        if branch == "sin=0":
            f2 = 0.0
            s2 = 1.0
        else:
            f2 = np.polyval(second[::-1], u)
            s2 = 1.0 + sum(abs(c * u**i) for i, c in enumerate(second))
        out.append({"u": float(u), "branch": branch, "in_range": bool(abs(u) <= 1 + 1e-12),
                    "residual_first": float(abs(f1) / s1), "residual_second": float(abs(f2) / s2)})
    valid = any(c["in_range"] and c["residual_first"] < tol and c["residual_second"] < tol for c in out)
    return ValidityReport(p, float(n), tuple(x), out, valid)


# smoothness boundaries -------------------------------------------------------------


def schlomilch_names(sine: Sequence[int], cosine: Sequence[int]) -> tuple:
    if not cosine and len(sine) <= 2:
        return coefficient_names(len(sine))
    return tuple(f"x{k}" for k in sine) + tuple(f"y{k}" for k in cosine)


def schlomilch_boundaries(sine: Sequence[int] = (), cosine: Sequence[int] = ()) -> SurfaceFamily:
    """Smoothness boundaries ``h(t) = nu, h'(t) = 0`` eliminated over ``s`` then ``c``."""
    return _schlomilch_boundaries(tuple(int(k) for k in sine), tuple(int(k) for k in cosine))


@lru_cache(maxsize=64)
def _schlomilch_boundaries(sine: tuple, cosine: tuple) -> SurfaceFamily:
    if not sine and not cosine:
        raise InvalidInputError("empty support")
    if any(k < 1 for k in sine + cosine) or len(set(sine)) != len(sine) or len(set(cosine)) != len(cosine):
        raise InvalidInputError("support indices must be distinct positive integers")
    names = schlomilch_names(sine, cosine)
    vars = ("s", "c") + names + (NU,)
    zero = MultiPoly.const(0, vars)
    sv = [MultiPoly.var(v, vars) for v in names[: len(sine)]]
    cv = [MultiPoly.var(v, vars) for v in names[len(sine):]]
    s, c, nu = (MultiPoly.var(v, vars) for v in ("s", "c", NU))
    h = sum((x * _sin_k(k, vars) for k, x in zip(sine, sv)), zero) + \
        sum((y * _cos_k(k, vars) for k, y in zip(cosine, cv)), zero)
    dh = sum((k * x * _cos_k(k, vars) for k, x in zip(sine, sv)), zero) - \
        sum((k * y * _sin_k(k, vars) for k, y in zip(cosine, cv)), zero)
    raw = eliminate([h - nu, dh, s * s + c * c - 1], ["s", "c"]).with_vars(names + (NU,))

    # branches at t = 0, pi, +-pi/2 where h' vanishes identically give linear families
    candidates = []
    for sval, cval in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        at = lambda q: q.subs("s", sval).subs("c", cval).with_vars(names + (NU,))
        if at(dh).is_zero:
            candidates.append(MultiPoly.var(NU, names + (NU,)) - at(h))
    sqf, core, factors = split_factors(raw, candidates)
    fam = SurfaceFamily(sine + cosine, "schlomilch", names + (NU,))
    fam.entries.append(SurfaceEntry(sqf, SMOOTHNESS, "nu = 2 pi n; real angle required",
                                    raw=raw, factors=factors))
    return fam


# sampling ------------------------------------------------------------------------------


def sample_surface(poly: MultiPoly, n_value: float | None, box: Sequence[tuple],
                   resolution: int = 200, tol: float = 1e-10, free: Sequence[str] | None = None):
    """Zero crossings of ``poly`` (with ``nu`` fixed) on a grid, refined by bisection.

    Returns an ``(k, d)`` array of points, ``d`` the number of free variables
    (at most two). Crossings are detected as sign changes along grid edges.
    """
    fixed = {NU: n_value} if n_value is not None else {}
    free = tuple(free) if free is not None else tuple(v for v in poly.used_vars() if v not in fixed)
    if len(free) > 2 or len(free) != len(box):
        raise InvalidInputError(f"need one box range per free variable, free variables are {free}")
    if not free:
        return np.zeros((0, 0))
    if resolution < 2:
        raise InvalidInputError("resolution must be at least 2")
    f = poly.lambdify(free, fixed)
    axes = [np.linspace(lo, hi, resolution) for lo, hi in box]
    if len(free) == 1:
        vals = f(axes[0])
        pts = [axes[0][vals == 0][:, None]]
        idx = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
        a = axes[0][idx][:, None]
        b = axes[0][idx + 1][:, None]
        pts.append(_bisect(f, a, b, tol))
        return np.concatenate(pts) if pts else np.zeros((0, 1))
    X, Y = np.meshgrid(axes[0], axes[1], indexing="ij")
    vals = f(X, Y)
    pts = [np.stack([X[vals == 0], Y[vals == 0]], axis=1)]
    for axis in (0, 1):
        if axis == 0:
            v0, v1 = vals[:-1, :], vals[1:, :]
            a = np.stack([X[:-1, :], Y[:-1, :]], -1)
            b = np.stack([X[1:, :], Y[1:, :]], -1)
        else:
            v0, v1 = vals[:, :-1], vals[:, 1:]
            a = np.stack([X[:, :-1], Y[:, :-1]], -1)
            b = np.stack([X[:, 1:], Y[:, 1:]], -1)
        mask = v0 * v1 < 0
        if mask.any():
            pts.append(_bisect(f, a[mask], b[mask], tol))
    out = np.concatenate(pts)
    return out[np.lexsort(out.T[::-1])] if len(out) else out.reshape(0, 2)


def _bisect(f, a, b, tol):
    a, b = a.copy(), b.copy()
    fa = f(*a.T)
    for _ in range(200):
        if np.max(np.linalg.norm(b - a, axis=1), initial=0.0) <= tol:
            break
        m = 0.5 * (a + b)
        fm = f(*m.T)
        left = np.sign(fm) == np.sign(fa)
        a[left] = m[left]
        fa = np.where(left, fm, fa)
        b[~left] = m[~left]
    return 0.5 * (a + b)


def curve_csv(points, poly: MultiPoly, names: Sequence[str] = ("x", "y")) -> str:
    lines = [f"# zero set of {poly.to_text()}", ",".join(names)]
    for row in points:
        lines.append(",".join(format(float(v), ".17g") for v in row))
    return "\n".join(lines) + "\n"
