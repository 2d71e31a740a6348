"""Evaluation of generalized Bessel functions by periodic trapezoidal quadrature.

A mixed-type generalized Bessel function (MT-GBF) of order ``n`` is the
Fourier coefficient

    J_n(x; y) = 1/(2 pi) * int_{-pi}^{pi} exp(i (n t - h(t))) dt,
    h(t) = sum_k x_k sin(k t) + y_k cos(k t).

The integrand is analytic and periodic, so the uniform trapezoid rule on
[-pi, pi) converges geometrically once the node count exceeds the effective
bandwidth of ``exp(-i h)``. The plain GBF ``J_n^p(x)`` is the special case with
all ``y_k = 0`` and support ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import AccuracyError, InvalidInputError

TWO_PI = 2.0 * math.pi
MIN_NODES = 64
MAX_NODES = 2**22
ORACLE_TOL = 1e-13
IMAG_TOL = 1e-12

SINE = "sine"
COSINE = "cosine"


@dataclass(frozen=True)
class HarmonicCoefficients:
    """Sparse phase coefficients ``k -> (x_k, y_k)``.

    ``entries`` is a tuple of ``(k, x_k, y_k)`` sorted by ``k``. Entries with
    both coefficients zero are kept: they declare a slot of the support (the
    index set ``p`` of a GBF) even when its argument currently vanishes.
    """

    entries: tuple = ()

    def __post_init__(self):
        rows = []
        seen = set()
        for k, x, y in self.entries:
            if int(k) != k or k < 1:
                raise InvalidInputError(f"harmonic index must be a positive integer, got {k!r}")
            k = int(k)
            if k in seen:
                raise InvalidInputError(f"duplicate harmonic index {k}")
            seen.add(k)
            x, y = float(x), float(y)
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InvalidInputError(f"non-finite coefficient at index {k}")
            rows.append((k, x, y))
        rows.sort()
        object.__setattr__(self, "entries", tuple(rows))

    # construction -------------------------------------------------------

    @classmethod
    def from_gbf(cls, p: Sequence[int], x: Sequence[float]) -> "HarmonicCoefficients":
        if len(p) != len(x):
            raise InvalidInputError("index and argument lists differ in length")
        return cls(tuple((k, xv, 0.0) for k, xv in zip(p, x)))

    @classmethod
    def from_arrays(cls, x: Sequence[float], y: Sequence[float] | None = None, indices=None):
        """Positional coefficients; indices default to ``1..m``."""
        m = max(len(x), len(y) if y is not None else 0)
        x = list(x) + [0.0] * (m - len(x))
        y = list(y) + [0.0] * (m - len(y)) if y is not None else [0.0] * m
        indices = range(1, m + 1) if indices is None else indices
        if len(indices) != m:
            raise InvalidInputError("index list does not match coefficient count")
        return cls(tuple(zip(indices, x, y)))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, tuple]) -> "HarmonicCoefficients":
        return cls(tuple((k, xy[0], xy[1]) for k, xy in mapping.items()))

    @classmethod
    def zero(cls) -> "HarmonicCoefficients":
        return cls(((1, 0.0, 0.0),))

    # views ----------------------------------------------------------------

    @property
    def indices(self) -> tuple:
        return tuple(k for k, _, _ in self.entries)

    @property
    def x(self) -> np.ndarray:
        return np.array([x for _, x, _ in self.entries], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([y for _, _, y in self.entries], dtype=float)

    def as_dict(self) -> dict:
        return {k: (x, y) for k, x, y in self.entries}

    def get(self, k: int) -> tuple:
        return self.as_dict().get(k, (0.0, 0.0))

    @property
    def is_pure_sine(self) -> bool:
        return all(y == 0.0 for _, _, y in self.entries)

    @property
    def is_zero(self) -> bool:
        return all(x == 0.0 and y == 0.0 for _, x, y in self.entries)

    def bandwidth(self) -> float:
        """``sum_k k (|x_k| + |y_k|)``, a bound on ``max |h'|``."""
        return sum(k * (abs(x) + abs(y)) for k, x, y in self.entries)

    def scaled(self, t: float) -> "HarmonicCoefficients":
        return HarmonicCoefficients(tuple((k, t * x, t * y) for k, x, y in self.entries))

    def with_value(self, k: int, kind: str, value: float) -> "HarmonicCoefficients":
        d = self.as_dict()
        x, y = d.get(k, (0.0, 0.0))
        if kind == SINE:
            d[k] = (value, y)
        elif kind == COSINE:
            d[k] = (x, value)
        else:
            raise InvalidInputError(f"unknown coefficient kind {kind!r}")
        return HarmonicCoefficients.from_mapping(d)

    def phase(self, theta, order: int = 0):
        return phase_eval(self, theta, order)


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings.

    ``node_count=None`` selects the bandwidth heuristic of
    :func:`default_node_count`. In ``refine`` mode the node count is doubled
    from 64 until successive values agree to ``tolerance``.
    """

    node_count: int | None = None
    mode: str = "fixed"
    tolerance: float = ORACLE_TOL

    def __post_init__(self):
        if self.mode not in ("fixed", "refine"):
            raise InvalidInputError(f"unknown quadrature mode {self.mode!r}")
        if self.node_count is not None:
            n = self.node_count
            if n < MIN_NODES or n & (n - 1):
                raise InvalidInputError("node_count must be a power of two >= 64")
        if not self.tolerance > 0:
            raise InvalidInputError("tolerance must be positive")


FIXED = QuadratureSpec()
ORACLE = QuadratureSpec(mode="refine")


def _next_pow2(v: float) -> int:
    return 1 << max(0, math.ceil(math.log2(max(v, 1.0))))


def default_node_count(h: HarmonicCoefficients, n: int = 0) -> int:
    """Smallest power of two >= 64 + 8 (|n| + sum_k k (|x_k| + |y_k|))."""
    return min(_next_pow2(MIN_NODES + 8.0 * (abs(n) + h.bandwidth())), MAX_NODES)


def _nodes(count: int) -> np.ndarray:
    return -math.pi + TWO_PI * np.arange(count) / count


def _carrier(n: int, count: int) -> np.ndarray:
    # exp(i n t_j) with t_j = -pi + 2 pi j / N, reduced exactly in integers
    j = np.arange(count, dtype=np.int64)
    sign = -1.0 if n % 2 else 1.0
    return sign * np.exp(1j * TWO_PI * ((n * j) % count) / count)


def _samples(h: HarmonicCoefficients, count: int) -> np.ndarray:
    return np.exp(-1j * phase_eval(h, _nodes(count)))


def _trapezoid(h, n, count, weight: Callable | None = None) -> complex:
    g = _samples(h, count)
    if weight is not None:
        g = g * weight(_nodes(count))
    return complex(np.mean(g * _carrier(n, count)))


def self_refining(h, n, tolerance=ORACLE_TOL, weight=None, start=MIN_NODES):
    """Double the node count until two successive values agree.

    Returns ``(value, node_count)``; raises :class:`AccuracyError` carrying
    the last two iterates once ``2**22`` nodes is exceeded.
    """
    count = start
    prev = cur = _trapezoid(h, n, count, weight)
    while True:
        count *= 2
        if count > MAX_NODES:
            raise AccuracyError(
                f"quadrature did not converge to {tolerance:g} within {MAX_NODES} nodes",
                iterates=(prev, cur),
            )
        cur = _trapezoid(h, n, count, weight)
        if abs(cur - prev) < tolerance:
            return cur, count
        prev = cur


def weighted_integral(h, n, weight: Callable, spec: QuadratureSpec | None = None) -> complex:
    """``1/(2 pi) int w(t) exp(i (n t - h(t))) dt`` for a trigonometric weight."""
    spec = spec or FIXED
    if spec.mode == "refine":
        return self_refining(h, n, spec.tolerance, weight)[0]
    count = spec.node_count or default_node_count(h, abs(n) + 4)
    return _trapezoid(h, n, count, weight)


def eval_mtgbf_with_nodes(h, n, spec=None) -> tuple:
    spec = spec or FIXED
    n = int(n)
    if spec.mode == "refine":
        return self_refining(h, n, spec.tolerance)
    count = spec.node_count or default_node_count(h, n)
    return _trapezoid(h, n, count), count


def eval_mtgbf(h: HarmonicCoefficients, n: int, spec: QuadratureSpec | None = None) -> complex:
    """Mixed-type GBF ``J_n(x; y)``."""
    return eval_mtgbf_with_nodes(h, n, spec)[0]


def check_coprime(h: HarmonicCoefficients) -> None:
    support = h.indices
    if support and reduce(math.gcd, support) != 1:
        raise InvalidInputError(
            f"indices {support} share the common factor {reduce(math.gcd, support)}; "
            "rescale the angle to obtain a lower-index GBF"
        )


def eval_gbf(h: HarmonicCoefficients, n: int, spec: QuadratureSpec | None = None) -> float:
    """Real GBF ``J_n^p(x)``; ``h`` must be sine-only with coprime support."""
    if not h.is_pure_sine:
        raise InvalidInputError("eval_gbf needs a sine-only phase; use eval_mtgbf")
    check_coprime(h)
    value = eval_mtgbf(h, n, spec)
    if abs(value.imag) >= IMAG_TOL:
        raise AccuracyError(
            f"imaginary residue {value.imag:.3e} of a real GBF exceeds {IMAG_TOL:g}",
            iterates=(value,),
        )
    return value.real


def eval_batch(indices: Sequence[int], x: np.ndarray, y: np.ndarray | None, n: int,
               chunk: int = 4096) -> tuple:
    """``J_n`` at many coefficient vectors sharing one support.

    ``x`` and ``y`` have shape ``(points, len(indices))``. Each point gets the
    node count a single :func:`eval_mtgbf` call would use, so results match
    point by point. Returns ``(values, node_counts)``.
    """
    k = np.asarray(indices, dtype=float)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.zeros_like(x) if y is None else np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.shape[1] != len(k):
        raise InvalidInputError("coefficient arrays do not match the index list")
    band = (np.abs(x) + np.abs(y)) @ k
    counts = np.array([min(_next_pow2(MIN_NODES + 8.0 * (abs(n) + b)), MAX_NODES) for b in band])
    values = np.empty(len(x), dtype=complex)
    for count in np.unique(counts):
        idx = np.flatnonzero(counts == count)
        t = _nodes(int(count))
        s, c = np.sin(np.outer(k, t)), np.cos(np.outer(k, t))
        carrier = _carrier(n, int(count))
        step = max(1, chunk * 64 // int(count))
        for start in range(0, len(idx), step):
            sel = idx[start:start + step]
            phase = x[sel] @ s + y[sel] @ c
            values[sel] = np.exp(-1j * phase) @ carrier / count
    return values, counts


def eval_bessel1d(n: int, x: float, spec: QuadratureSpec | None = None) -> float:
    """Ordinary Bessel function ``J_n(x)`` through the same quadrature path."""
    return eval_gbf(HarmonicCoefficients(((1, x, 0.0),)), n, spec)


def eval_orders(h: HarmonicCoefficients, max_order: int, count: int | None = None):
    """All ``J_m(h)`` for ``-M <= m <= M`` from a single FFT.

    Returns ``(orders, values)``. The node count must exceed the bandwidth
    by a margin on top of ``M``; the default heuristic already does.
    """
    max_order = int(max_order)
    count = count or default_node_count(h, max_order)
    while count <= 2 * max_order:
        count *= 2
    g = _samples(h, count)
    coeffs = np.fft.ifft(g)
    orders = np.arange(-max_order, max_order + 1)
    values = coeffs[orders % count] * np.where(orders % 2, -1.0, 1.0)
    return orders, values


# derivatives ---------------------------------------------------------------


def derivative_stencil(slots: Iterable[tuple]) -> dict:
    """Order shifts and weights for a product of coefficient derivatives.

    Each slot is ``(kind, k)``. Uses
    ``dJ_n/dx_k = (J_{n-k} - J_{n+k}) / 2`` and
    ``dJ_n/dy_k = (J_{n-k} + J_{n+k}) / (2i)``.
    """
    stencil = {0: 1.0 + 0j}
    for kind, k in slots:
        if kind == SINE:
            step = {-k: 0.5, k: -0.5}
        elif kind == COSINE:
            step = {-k: -0.5j, k: -0.5j}
        else:
            raise InvalidInputError(f"unknown derivative kind {kind!r}")
        out: dict = {}
        for s, c in stencil.items():
            for d, w in step.items():
                out[s + d] = out.get(s + d, 0) + c * w
        stencil = {s: c for s, c in out.items() if c != 0}
    return stencil


def eval_many(h: HarmonicCoefficients, orders: Iterable[int], spec: QuadratureSpec | None = None) -> dict:
    """Evaluate several orders of one function on a shared node set."""
    spec = spec or FIXED
    orders = sorted(set(int(o) for o in orders))
    if spec.mode == "refine":
        return {o: self_refining(h, o, spec.tolerance)[0] for o in orders}
    top = max(abs(o) for o in orders)
    count = spec.node_count or default_node_count(h, top)
    g = _samples(h, count)
    return {o: complex(np.mean(g * _carrier(o, count))) for o in orders}


def mixed_partial(h, n: int, slots: Sequence[tuple], spec: QuadratureSpec | None = None) -> complex:
    """Arbitrary mixed partial derivative of ``J_n`` via the order recursion."""
    stencil = derivative_stencil(slots)
    values = eval_many(h, (n + s for s in stencil), spec)
    return sum(c * values[n + s] for s, c in stencil.items())


def gbf_partial(h, n: int, k: int, kind: str = SINE, order: int = 1,
                spec: QuadratureSpec | None = None) -> complex:
    """First or second partial of ``J_n`` in the sine (x_k) or cosine (y_k) slot."""
    if order not in (1, 2):
        raise InvalidInputError("order must be 1 or 2; compose mixed_partial for more")
    return mixed_partial(h, n, [(kind, k)] * order, spec)


# phase ------------------------------------------------------------------------

_SIN_CYCLE = (np.sin, np.cos, lambda a: -np.sin(a), lambda a: -np.cos(a))
_COS_CYCLE = (np.cos, lambda a: -np.sin(a), lambda a: -np.cos(a), np.sin)


def phase_eval(h: HarmonicCoefficients, theta, derivative_order: int = 0):
    """``h(theta)`` or one of its first three derivatives, summed exactly."""
    r = int(derivative_order)
    if r < 0 or r > 3:
        raise InvalidInputError("derivative_order must be 0..3")
    theta = np.asarray(theta, dtype=float)
    out = np.zeros_like(theta)
    for k, x, y in h.entries:
        a = k * theta
        scale = float(k) ** r
        if x:
            out = out + scale * x * _SIN_CYCLE[r](a)
        if y:
            out = out + scale * y * _COS_CYCLE[r](a)
    return out if out.ndim else float(out)


def jacobi_anger_partial_sum(h: HarmonicCoefficients, theta: float, N: int) -> complex:
    """``sum_{|n|<=N} J_n(h) exp(-i n theta)``, converging to ``exp(-i h(theta))``."""
    if N < 0:
        raise InvalidInputError("N must be non-negative")
    orders, values = eval_orders(h, N)
    return complex(np.sum(values * np.exp(-1j * orders * theta)))
