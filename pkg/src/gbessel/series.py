"""Moments of Neumann, Kapteyn and Schlomilch type series of GBFs.

Closed forms come from generating functions (Jacobi-Anger expansion for the
Neumann family, the inverse of ``t - h(t)`` for Kapteyn, the dilogarithm for
Schlomilch). Each has a direct truncated sum beside it as an oracle.

Kapteyn moments: with ``F(t) = sum_m J_m(m x; m y) exp(-i m t)`` equal to
``h'/(1 - h')`` along ``t = theta - h(theta)``, the moments are
``(i d/dt)^l F`` at ``t = 0``, which gives

    mu_0 = h' / (1-h')
    mu_1 = +i h'' / (1-h')**3
    mu_2 = -h''' / (1-h')**4 - 3 h''**2 / (1-h')**5

at ``theta_0``. Two variants circulate: ``-i`` in ``mu_1`` (invisible for
pure sine phases, where ``h''(theta_0) = 0``) and exponents ``3, 4`` in
``mu_2`` (``h = sin t / 2`` already needs ``mu_2 = 8``). The direct sums
side with the forms above.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .core import (
    COSINE,
    HarmonicCoefficients,
    default_node_count,
    derivative_stencil,
    eval_many,
    eval_mtgbf,
    eval_orders,
    phase_eval,
)
from .errors import AccuracyError, DomainError, InvalidInputError, UnsupportedOrderError

TERM_TOL = 1e-14
RUN_LENGTH = 5
MAX_TERMS = 10_000
# |J_n| below this, once n is past the bandwidth, is rounding noise of the quadrature
VALUE_FLOOR = 1e-15

SCHLOMILCH_TAIL = 1e-7
SCHLOMILCH_MAX_TERMS = 4096

F1, F2, F3 = "f1", "f2", "f3"
KAPTEYN = "kapteyn"
SCHLOMILCH = "schlomilch"


@dataclass(frozen=True)
class ArgumentMoments:
    """``X_l = sum k^l x_k`` and ``Y_l = sum k^l y_k`` for ``l = 0..3``."""

    X: tuple
    Y: tuple

    @classmethod
    def of(cls, h: HarmonicCoefficients) -> "ArgumentMoments":
        X = tuple(math.fsum(k**l * x for k, x, _ in h.entries) for l in range(4))
        Y = tuple(math.fsum(k**l * y for k, _, y in h.entries) for l in range(4))
        return cls(X, Y)


@dataclass
class MomentReport:
    series: str
    ell: int
    closed: complex | None
    direct: complex
    N: int
    tail: float = 0.0

    @property
    def abs_diff(self) -> float | None:
        return None if self.closed is None else abs(self.closed - self.direct)

    def to_json(self) -> dict:
        pair = lambda z: [float(z.real), float(z.imag)]
        return {
            "series": self.series,
            "ell": self.ell,
            "closed": None if self.closed is None else pair(complex(self.closed)),
            "direct": pair(complex(self.direct)),
            "N": self.N,
            "abs_diff": self.abs_diff,
        }

    def to_text(self) -> str:
        fmt = lambda z: "-" if z is None else f"{z.real:+.15e} {z.imag:+.15e}i"
        rows = [("series", self.series), ("ell", str(self.ell)), ("closed", fmt(self.closed)),
                ("direct", fmt(self.direct)), ("N", str(self.N)),
                ("abs_diff", "-" if self.abs_diff is None else f"{self.abs_diff:.3e}")]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def _check_ell(ell: int, top: int) -> int:
    ell = int(ell)
    if ell < 0:
        raise InvalidInputError("moment order must be non-negative")
    if ell > top:
        raise UnsupportedOrderError(f"closed form available for l <= {top} only")
    return ell


# Neumann ------------------------------------------------------------------------


def neumann_f1_closed(h: HarmonicCoefficients, ell: int) -> complex:
    """``sum_n n^l J_n``, i.e. ``(i d/dt)^l exp(-i h(t))`` at ``t = 0``."""
    ell = _check_ell(ell, 3)
    m = ArgumentMoments.of(h)
    X1, X3, Y2 = m.X[1], m.X[3], m.Y[2]
    poly = (1, X1, X1 * X1 - 1j * Y2, X3 - 3j * X1 * Y2 + X1**3)[ell]
    return complex(poly * np.exp(-1j * m.Y[0]))


def _doubled_cosine(h: HarmonicCoefficients) -> HarmonicCoefficients:
    # every slot of h, with x cleared and y doubled
    return HarmonicCoefficients(tuple((k, 0.0, 2.0 * y) for k, _, y in h.entries))


def neumann_f2_closed(h: HarmonicCoefficients, ell: int) -> complex:
    """``sum_n n^l J_n^2`` from ``J_0`` and its cosine-slot partials at ``(0; 2y)``.

    The double sum in the second moment carries ``x_j x_k``.
    """
    ell = _check_ell(ell, 2)
    g = _doubled_cosine(h)
    slots = [k for k, _, _ in h.entries]
    wanted = {(): {0: 1.0}}
    if ell >= 1:
        wanted.update({(k,): derivative_stencil([(COSINE, k)]) for k in slots})
    if ell == 2:
        wanted.update({(j, k): derivative_stencil([(COSINE, j), (COSINE, k)])
                       for j in slots for k in slots})
    values = eval_many(g, {s for st in wanted.values() for s in st})
    d = {key: sum(c * values[s] for s, c in st.items()) for key, st in wanted.items()}
    if ell == 0:
        return complex(d[()])
    xs = h.as_dict()
    if ell == 1:
        return complex(1j * sum(k * xs[k][0] * d[(k,)] for k in slots))
    single = 0.5 * sum(k * k * xs[k][1] * d[(k,)] for k in slots)
    double = sum(j * k * xs[j][0] * xs[k][0] * d[(j, k)] for j in slots for k in slots)
    return complex(single - double)


def neumann_f3_closed(h: HarmonicCoefficients, ell: int) -> float:
    """``sum_n n^l |J_n|^2``: 1, 0 and ``sum k^2 (x_k^2 + y_k^2) / 2``."""
    ell = _check_ell(ell, 2)
    if ell == 0:
        return 1.0
    if ell == 1:
        return 0.0
    return math.fsum(k * k * (x * x + y * y) for k, x, y in h.entries) / 2


def _symmetric_order(N: int) -> np.ndarray:
    # 0, 1, -1, 2, -2, ...
    idx = np.empty(2 * N + 1, dtype=np.int64)
    idx[0] = 0
    idx[1::2] = np.arange(1, N + 1)
    idx[2::2] = -np.arange(1, N + 1)
    return idx


def _negligible(terms: np.ndarray, values: np.ndarray, orders: np.ndarray, band: float) -> np.ndarray:
    beyond = np.abs(orders) > band
    return (np.abs(terms) < TERM_TOL) | (beyond & (np.abs(values) < VALUE_FLOOR))


def _truncate(levels, negligible) -> int | None:
    """First level ``N`` after which ``RUN_LENGTH`` consecutive levels are negligible."""
    run = 0
    for level, quiet in zip(levels, negligible):
        run = run + 1 if quiet else 0
        if run == RUN_LENGTH:
            return level - RUN_LENGTH
    return None


def _neumann_direct(h: HarmonicCoefficients, ell: int, transform, N: int | None) -> tuple:
    band = h.bandwidth()
    M = N if N is not None else int(32 + 2 * band)
    while True:
        M = min(M, MAX_TERMS)
        orders, values = eval_orders(h, M, default_node_count(h, M) * 2)
        terms = orders.astype(float) ** ell * transform(values)
        if N is not None:
            stop = N
            break
        # a level n is negligible when both n and -n are
        quiet = _negligible(terms, values, orders, band)
        level_quiet = quiet[M + 1:] & quiet[M - 1::-1]
        stop = _truncate(range(1, M + 1), level_quiet)
        if stop is not None:
            break
        if M == MAX_TERMS:
            warnings.warn("direct sum reached the term cap before its tail settled", RuntimeWarning)
            stop = M
            break
        M *= 2
    pick = _symmetric_order(stop)
    vals = terms[pick + M]
    tail = float(np.max(np.abs(terms[[M - stop - 1, M + stop + 1]]))) if stop < M else float("nan")
    return complex(np.sum(vals)), stop, tail


def neumann_direct(series: str, h: HarmonicCoefficients, ell: int, N: int | None = None) -> MomentReport:
    """Truncated ``sum_{|n|<=N}`` for ``f1``, ``f2`` or ``f3``.

    Without ``N`` the sum stops once five consecutive levels ``+-n`` are
    negligible (capped at ``10^4``).
    """
    ell = int(ell)
    if ell < 0:
        raise InvalidInputError("moment order must be non-negative")
    if N is not None and N < 1:
        raise InvalidInputError("N must be at least 1")
    transform = {F1: lambda v: v, F2: lambda v: v * v, F3: lambda v: np.abs(v) ** 2}.get(series)
    if transform is None:
        raise InvalidInputError(f"unknown series {series!r}")
    total, stop, tail = _neumann_direct(h, ell, transform, N)
    if series == F3:
        total = complex(total.real, 0.0)
    return MomentReport(series, ell, None, total, stop, tail)


_CLOSED = {F1: neumann_f1_closed, F2: neumann_f2_closed, F3: neumann_f3_closed}


def neumann_moment(series: str, h: HarmonicCoefficients, ell: int, N: int | None = None) -> MomentReport:
    """Closed form and direct sum side by side."""
    if series not in _CLOSED:
        raise InvalidInputError(f"unknown series {series!r}")
    report = neumann_direct(series, h, ell, N)
    report.closed = complex(_CLOSED[series](h, ell))
    return report


def neumann_f1_direct(h, ell, N=None) -> MomentReport:
    return neumann_direct(F1, h, ell, N)


def neumann_f2_direct(h, ell, N=None) -> MomentReport:
    return neumann_direct(F2, h, ell, N)


def neumann_f3_direct(h, ell, N=None) -> MomentReport:
    return neumann_direct(F3, h, ell, N)


# square identities --------------------------------------------------------------


def _outer_mean(fn, tolerance=1e-14, start=32, limit=1 << 14) -> complex:
    # trapezoid on a smooth periodic integrand, doubled until it settles
    count = start
    prev = None
    while count <= limit:
        t = -math.pi + 2 * math.pi * np.arange(count) / count
        cur = complex(np.mean([fn(v) for v in t]))
        if prev is not None and abs(cur - prev) <= tolerance * max(1.0, abs(cur)):
            return cur
        prev = cur
        count *= 2
    raise AccuracyError("outer quadrature did not settle", (prev, cur))


def square_identity_check(h: HarmonicCoefficients, n: int) -> tuple:
    """Residuals of the two integral representations of ``J_n^2`` and ``|J_n|^2``.

    ``J_n^2 = mean_t J_2n(2 x_k cos kt; 2 y_k cos kt)`` and
    ``|J_n|^2 = mean_t J_2n(2 x_k cos kt - 2 y_k sin kt; 0)``.
    Both hold slot by slot for any finite support.
    """
    n = int(n)
    J = eval_mtgbf(h, n)

    def squared(t):
        return eval_mtgbf(HarmonicCoefficients(tuple(
            (k, 2 * x * math.cos(k * t), 2 * y * math.cos(k * t)) for k, x, y in h.entries)), 2 * n)

    def modulus(t):
        return eval_mtgbf(HarmonicCoefficients(tuple(
            (k, 2 * x * math.cos(k * t) - 2 * y * math.sin(k * t), 0.0) for k, x, y in h.entries)), 2 * n)

    return abs(J * J - _outer_mean(squared)), abs(abs(J) ** 2 - _outer_mean(modulus))


# Kapteyn ------------------------------------------------------------------------

OMEGA_SCAN = 1024


def _min_slack(h: HarmonicCoefficients) -> float:
    """``min_t (1 - h'(t))`` by a scan and bounded refinement of the smallest cells."""
    if h.is_zero:
        return 1.0
    t = -math.pi + 2 * math.pi * np.arange(OMEGA_SCAN) / OMEGA_SCAN
    slack = 1.0 - phase_eval(h, t, 1)
    step = 2 * math.pi / OMEGA_SCAN
    best = float(slack.min())
    for i in np.argsort(slack)[:4]:
        res = optimize.minimize_scalar(lambda v: 1.0 - phase_eval(h, v, 1),
                                       bounds=(t[i] - step, t[i] + step), method="bounded",
                                       options={"xatol": 1e-10})
        best = min(best, float(res.fun))
    return best


def omega_membership(h: HarmonicCoefficients) -> bool:
    """Whether ``t - h(t)`` is strictly increasing, i.e. ``h' < 1`` everywhere."""
    return _min_slack(h) > 0


@dataclass(frozen=True)
class KapteynContext:
    theta0: float
    h1: float
    h2: float
    h3: float
    omega_member: bool


def kapteyn_context(h: HarmonicCoefficients, xtol: float = 1e-15) -> KapteynContext:
    """Root ``theta_0`` of ``t - h(t)`` and the phase derivatives there."""
    if not omega_membership(h):
        raise DomainError("t - h(t) is not monotone: outside the convergence region")
    bound = sum(abs(x) + abs(y) for _, x, y in h.entries) + 1.0
    f = lambda t: t - phase_eval(h, t, 0)
    theta0 = optimize.bisect(f, -bound, bound, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=400)
    return KapteynContext(theta0, *(float(phase_eval(h, theta0, r)) for r in (1, 2, 3)), True)


def kapteyn_closed(h: HarmonicCoefficients, ell: int, xtol: float = 1e-15) -> tuple:
    """``sum_{n != 0} n^l J_n(n x; n y)`` for ``l <= 2``; returns ``(value, context)``."""
    ell = _check_ell(ell, 2)
    ctx = kapteyn_context(h, xtol)
    q = 1.0 - ctx.h1
    if ell == 0:
        value = ctx.h1 / q
    elif ell == 1:
        value = 1j * ctx.h2 / q**3
    else:
        value = -ctx.h3 / q**4 - 3 * ctx.h2**2 / q**5
    return complex(value), ctx


def _kapteyn_term(h: HarmonicCoefficients, n: int) -> complex:
    return eval_mtgbf(h.scaled(n), n)


def kapteyn_direct(h: HarmonicCoefficients, ell: int, N: int | None = None) -> MomentReport:
    """Truncated ``sum_{0 < |n| <= N} n^l J_n(n x; n y)``."""
    ell = int(ell)
    if ell < 0:
        raise InvalidInputError("moment order must be non-negative")
    if N is not None and N < 1:
        raise InvalidInputError("N must be at least 1")
    cap = N if N is not None else MAX_TERMS
    total, run, last = 0j, 0, 0.0
    n = 0
    for n in range(1, cap + 1):
        pair = [_kapteyn_term(h, s) for s in (n, -n)]
        terms = [float(s) ** ell * v for s, v in zip((n, -n), pair)]
        total += terms[0] + terms[1]
        last = max(abs(t) for t in terms)
        if N is None:
            quiet = last < TERM_TOL or max(abs(v) for v in pair) < VALUE_FLOOR
            run = run + 1 if quiet else 0
            if run == RUN_LENGTH:
                break
    else:
        if N is None:
            warnings.warn("Kapteyn sum reached the term cap before its tail settled", RuntimeWarning)
    return MomentReport(KAPTEYN, ell, None, complex(total), n, last)


def kapteyn_moment(h: HarmonicCoefficients, ell: int, N: int | None = None) -> MomentReport:
    closed, _ = kapteyn_closed(h, ell)
    report = kapteyn_direct(h, ell, N)
    report.closed = closed
    return report


# Schlomilch ---------------------------------------------------------------------


def schlomilch_terms_needed(ell: int, tail: float = SCHLOMILCH_TAIL) -> int:
    """Smallest ``N`` with ``N^(1-l) / (l-1) < tail`` (the ``|J_m| <= 1`` tail bound)."""
    return int(math.floor((tail * (ell - 1)) ** (-1.0 / (ell - 1)))) + 1


def schlomilch_direct(h: HarmonicCoefficients, m: int, ell: int, N: int | None = None,
                      max_terms: int = SCHLOMILCH_MAX_TERMS) -> MomentReport:
    """``sum_{n=1}^N n^-l J_m(n h)`` on one node set that resolves every term.

    The node count is sized for ``n = N``, so each ``J_m(n h)`` is the same
    trapezoid value a standalone evaluation would give. Without ``N`` the
    rigorous tail bound picks it; when that exceeds ``max_terms`` the sum is
    cut there with a warning.
    """
    m, ell = int(m), int(ell)
    if ell < 2:
        raise UnsupportedOrderError("the series needs l >= 2")
    if N is None:
        N = schlomilch_terms_needed(ell)
        if N > max_terms:
            warnings.warn(f"tail bound needs {N} terms; truncating at {max_terms}", RuntimeWarning)
            N = max_terms
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    count = default_node_count(h.scaled(N), m)
    t = -math.pi + 2 * math.pi * np.arange(count) / count
    base = np.exp(-1j * phase_eval(h, t, 0))
    carrier = np.exp(1j * m * t)
    power = np.ones(count, dtype=complex)
    total = 0j
    last = 0j
    for n in range(1, N + 1):
        power *= base
        if n % 64 == 0:
            # resync against drift in the running product
            power = np.exp(-1j * n * phase_eval(h, t, 0))
        last = complex(np.mean(power * carrier)) / n**ell
        total += last
    return MomentReport(SCHLOMILCH, ell, None, total, N, abs(last))


def clausen2(phi: float) -> float:
    """``Cl_2(phi) = -int_0^phi log|2 sin(t/2)| dt``.

    Odd and ``2 pi``-periodic, so ``phi`` is folded into ``(0, pi]``; the
    ``log t`` singularity is integrated in closed form and only the smooth
    remainder goes to quadrature.
    """
    phi = math.remainder(float(phi), 2 * math.pi)
    if phi == 0.0 or abs(phi) == math.pi:
        return 0.0
    sign = 1.0 if phi > 0 else -1.0
    phi = abs(phi)
    smooth = lambda t: math.log(2 * math.sin(t / 2) / t) if t > 0 else 0.0
    rest, _ = integrate.quad(smooth, 0.0, phi, epsabs=1e-15, epsrel=1e-13, limit=200)
    return -sign * (phi * math.log(phi) - phi + rest)


def dilog_unit(phi: float) -> complex:
    """``Li_2(exp(i phi))`` for real ``phi``."""
    phi = float(phi) % (2 * math.pi)
    real = math.pi**2 / 6 - math.pi * phi / 2 + phi * phi / 4
    return complex(real, clausen2(phi))


def _branch_points(h: HarmonicCoefficients, samples: int = 4096) -> list:
    # angles where h(t) hits a multiple of 2 pi: the dilog integrand has kinks there
    t = np.linspace(-math.pi, math.pi, samples + 1)
    w = phase_eval(h, t, 0) / (2 * math.pi)
    out = []
    for a, b, wa, wb in zip(t[:-1], t[1:], w[:-1], w[1:]):
        lo, hi = sorted((wa, wb))
        for level in range(math.ceil(lo), math.floor(hi) + 1):
            g = lambda v: phase_eval(h, v, 0) / (2 * math.pi) - level
            if g(a) == 0:
                out.append(a)
            elif g(a) * g(b) < 0:
                out.append(optimize.brentq(g, a, b, xtol=1e-14))
    return sorted(set(out))


def schlomilch_polylog(h: HarmonicCoefficients, m: int, ell: int = 2) -> complex:
    """``mean_t exp(i m t) Li_2(exp(-i h(t)))`` by adaptive quadrature."""
    m, ell = int(m), int(ell)
    if ell != 2:
        raise UnsupportedOrderError("the dilogarithm route covers l = 2 only")
    integrand = lambda t: np.exp(1j * m * t) * dilog_unit(-phase_eval(h, t, 0))
    cuts = [-math.pi] + [p for p in _branch_points(h) if -math.pi < p < math.pi] + [math.pi]
    total = 0j
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a < 1e-15:
            continue
        re, _ = integrate.quad(lambda t: integrand(t).real, a, b, epsabs=1e-12, epsrel=1e-12, limit=400)
        im, _ = integrate.quad(lambda t: integrand(t).imag, a, b, epsabs=1e-12, epsrel=1e-12, limit=400)
        total += complex(re, im)
    return total / (2 * math.pi)


def schlomilch_eval(h: HarmonicCoefficients, m: int, ell: int, method: str = "direct",
                    N: int | None = None) -> complex:
    """``sum_{n >= 1} n^-l J_m(n x; n y)`` by direct summation or the dilogarithm."""
    if int(ell) < 2:
        raise UnsupportedOrderError("the series needs l >= 2")
    if method == "direct":
        return schlomilch_direct(h, m, ell, N).direct
    if method == "polylog":
        return schlomilch_polylog(h, m, ell)
    raise InvalidInputError(f"unknown method {method!r}")


def schlomilch_moment(h: HarmonicCoefficients, m: int, ell: int = 2, N: int | None = None) -> MomentReport:
    report = schlomilch_direct(h, m, ell, N)
    if ell == 2:
        report.closed = schlomilch_polylog(h, m, ell)
    return report
