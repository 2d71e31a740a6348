"""Numerical checks of the differential identities satisfied by GBFs.

Every identity is written as a sum of terms that should cancel. Derivatives
come from the order recursion, so the only error is the quadrature error of
the underlying ``J_n`` values. Residuals are normalised by the largest
term, which keeps them comparable across regions where ``J_n`` spans many
orders of magnitude.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import (
    COSINE,
    SINE,
    HarmonicCoefficients,
    QuadratureSpec,
    derivative_stencil,
    default_node_count,
    eval_many,
    eval_mtgbf,
    weighted_integral,
)
from .errors import InvalidInputError

# below this the terms are pure rounding noise and the identity holds trivially
NOISE_FLOOR = 1e-13

PDE1 = "pde1"
PDE2 = "pde2"
LAPLACIAN = "laplacian"
SCHRODINGER = "schrodinger"
AUX_G = "aux-g"
AUX_GX = "aux-gx"

# slots of J^{1,2}(x, y): x multiplies sin t, y multiplies sin 2t
_X = (SINE, 1)
_Y = (SINE, 2)


@dataclass
class ResidualReport:
    """Outcome of one identity at one point.

    ``terms`` maps a label to the value of each summand; ``residual`` is the
    modulus of their sum and ``scale`` the largest modulus among them.
    """

    identity: str
    n: int
    x: tuple
    y: tuple
    terms: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return abs(sum(self.terms.values()))

    @property
    def scale(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    @property
    def relative(self) -> float:
        scale = self.scale
        if scale < NOISE_FLOOR:
            return 0.0
        return self.residual / scale

    def dominant(self) -> str:
        return max(self.terms, key=lambda k: abs(self.terms[k]))

    def flipped(self, label: str | None = None) -> "ResidualReport":
        """Copy with one term negated (the dominant one by default).

        Useful as a negative control: a correct identity turns into a wrong
        one, and the relative residual must jump.
        """
        label = label or self.dominant()
        if label not in self.terms:
            raise InvalidInputError(f"no term {label!r} in {self.identity}")
        terms = dict(self.terms)
        terms[label] = -terms[label]
        return ResidualReport(self.identity, self.n, self.x, self.y, terms)

    def scaled(self, c: complex) -> "ResidualReport":
        """The report for ``c f`` in place of ``f``; every identity is linear."""
        return ResidualReport(self.identity, self.n, self.x, self.y,
                              {k: c * v for k, v in self.terms.items()})

    def to_row(self) -> dict:
        return {
            "n": self.n,
            "x": ";".join(repr(float(v)) for v in self.x),
            "y": ";".join(repr(float(v)) for v in self.y),
            "identity": self.identity,
            "residual": f"{self.residual:.17g}",
            "relative": f"{self.relative:.17g}",
        }


def _derivatives(h: HarmonicCoefficients, n: int, wanted: dict, spec=None) -> dict:
    """Evaluate several mixed partials of ``J_n`` from one batch of orders."""
    stencils = {name: derivative_stencil(slots) for name, slots in wanted.items()}
    values = eval_many(h, {n + s for st in stencils.values() for s in st}, spec)
    return {name: sum(c * values[n + s] for s, c in st.items()) for name, st in stencils.items()}


def _gbf12(x: float, y: float) -> HarmonicCoefficients:
    return HarmonicCoefficients.from_gbf((1, 2), (float(x), float(y)))


def residual_pde1(n: int, x: float, y: float, spec: QuadratureSpec | None = None) -> ResidualReport:
    """``(n + 2y) f_xx - y f_yy - (x/2) f_xy - f_y = 0`` for ``f = J_n^{1,2}(x, y)``."""
    n = int(n)
    d = _derivatives(_gbf12(x, y), n, {
        "f_xx": [_X, _X], "f_yy": [_Y, _Y], "f_xy": [_X, _Y], "f_y": [_Y],
    }, spec)
    terms = {
        "(n+2y)f_xx": (n + 2 * y) * d["f_xx"],
        "-y f_yy": -y * d["f_yy"],
        "-(x/2)f_xy": -0.5 * x * d["f_xy"],
        "-f_y": -d["f_y"],
    }
    return ResidualReport(PDE1, n, (x,), (y,), terms)


def residual_pde2(n: int, x: float, y: float, spec: QuadratureSpec | None = None) -> ResidualReport:
    """``[x^2 + 4y(n-2y)] f_xx + 2xy f_xy + x f_x + [x^2 - (n-2y)^2] f = 0``.

    At ``y = 0`` this is Bessel's equation for ``J_n(x)``.
    """
    n = int(n)
    d = _derivatives(_gbf12(x, y), n, {
        "f": [], "f_x": [_X], "f_xx": [_X, _X], "f_xy": [_X, _Y],
    }, spec)
    m = n - 2 * y
    terms = {
        "[x^2+4y(n-2y)]f_xx": (x * x + 4 * y * m) * d["f_xx"],
        "2xy f_xy": 2 * x * y * d["f_xy"],
        "x f_x": x * d["f_x"],
        "[x^2-(n-2y)^2]f": (x * x - m * m) * d["f"],
    }
    return ResidualReport(PDE2, n, (x,), (y,), terms)


def _coords(h: HarmonicCoefficients) -> tuple:
    return tuple(float(v) for v in h.x), tuple(float(v) for v in h.y)


def residual_laplacian(h: HarmonicCoefficients, n: int, k: int,
                       spec: QuadratureSpec | None = None) -> ResidualReport:
    """``d^2 J_n / dx_k^2 + d^2 J_n / dy_k^2 + J_n = 0`` for one harmonic ``k``."""
    n, k = int(n), int(k)
    if k <= 0:
        raise InvalidInputError("harmonic k must be a positive integer")
    d = _derivatives(h, n, {
        "xx": [(SINE, k)] * 2, "yy": [(COSINE, k)] * 2, "f": [],
    }, spec)
    terms = {f"d2/dx{k}^2": d["xx"], f"d2/dy{k}^2": d["yy"], "J_n": d["f"]}
    return ResidualReport(LAPLACIAN, n, *_coords(h), terms)


def residual_schrodinger(h: HarmonicCoefficients, n: int,
                         spec: QuadratureSpec | None = None) -> ResidualReport:
    """``n J_n - i sum_k k (x_k dJ_n/dy_k - y_k dJ_n/dx_k) = 0``."""
    n = int(n)
    wanted = {"f": []}
    for k in h.indices:
        wanted[f"x{k}"] = [(SINE, k)]
        wanted[f"y{k}"] = [(COSINE, k)]
    d = _derivatives(h, n, wanted, spec)
    terms = {"n J_n": n * d["f"]}
    for k, x, y in h.entries:
        terms[f"-i {k} x{k} dJ/dy{k}"] = -1j * k * x * d[f"y{k}"]
        terms[f"+i {k} y{k} dJ/dx{k}"] = 1j * k * y * d[f"x{k}"]
    return ResidualReport(SCHRODINGER, n, *_coords(h), terms)


def residual_aux(n: int, x: float, y: float,
                 spec: QuadratureSpec | None = None) -> tuple:
    """The two identities linking ``f = J_n^{1,2}`` with ``g``.

    ``g`` is the same integral with an extra ``cos t`` weight, so ``g_x``
    carries ``cos t * (-i sin t)``. Returns
    ``((n - 2y) f - x g - 4y f_xx, f_y - 2 g_x)``.
    """
    n = int(n)
    h = _gbf12(x, y)
    if spec is None:
        spec = QuadratureSpec(node_count=default_node_count(h, abs(n) + 4))
    d = _derivatives(h, n, {"f": [], "f_xx": [_X, _X], "f_y": [_Y]}, spec)
    g = weighted_integral(h, n, np.cos, spec)
    g_x = weighted_integral(h, n, lambda t: -1j * np.cos(t) * np.sin(t), spec)
    first = ResidualReport(AUX_G, n, (x,), (y,), {
        "(n-2y)f": (n - 2 * y) * d["f"], "-x g": -x * g, "-4y f_xx": -4 * y * d["f_xx"],
    })
    second = ResidualReport(AUX_GX, n, (x,), (y,), {"f_y": d["f_y"], "-2 g_x": -2 * g_x})
    return first, second


def finite_difference_check(h: HarmonicCoefficients, n: int, slot: tuple,
                            step: float = 1e-5, spec: QuadratureSpec | None = None) -> tuple:
    """First partial by the recursion and by a central difference.

    Returns ``(analytic, numeric)``. The difference has ``O(step^2)`` error.
    """
    kind, k = slot
    analytic = _derivatives(h, n, {"d": [slot]}, spec)["d"]
    base = h.get(k)[0 if kind == SINE else 1]
    values = [eval_mtgbf(h.with_value(k, kind, base + sign * step), n, spec) for sign in (1, -1)]
    return analytic, (values[0] - values[1]) / (2 * step)


def pde_suite(seed: int = 0, count: int = 100, box: float = 5.0,
              orders: Sequence[int] = range(6)) -> list:
    """Seeded random points for the two-variable identities, all five families."""
    rng = np.random.default_rng(seed)
    reports = []
    orders = list(orders)
    for i in range(count):
        n = orders[i % len(orders)]
        x, y = (float(v) for v in rng.uniform(-box, box, size=2))
        reports.append(residual_pde1(n, x, y))
        reports.append(residual_pde2(n, x, y))
        reports.extend(residual_aux(n, x, y))
        h = HarmonicCoefficients.from_arrays(rng.uniform(-box, box, 2), rng.uniform(-box, box, 2), (1, 2))
        reports.append(residual_laplacian(h, n, 1 + i % 2))
        reports.append(residual_schrodinger(h, n))
    return reports


def reports_csv(reports: Iterable[ResidualReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["n", "x", "y", "identity", "residual", "relative"],
                            lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.to_row())
    return buf.getvalue()
