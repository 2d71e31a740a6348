"""Exact multivariate polynomials over the integers.

Polynomials are immutable :class:`MultiPoly` values: an ordered tuple of
variable names and a dict from exponent tuples to nonzero Python ints.
Terms are ordered lexicographically (descending) in the declared variable
order; the first term in that order is the leading term.

Resultants are determinants of Sylvester matrices with polynomial entries,
computed by fraction-free (Bareiss) elimination so every intermediate
division is exact in Z[vars].
"""

from __future__ import annotations

import ast
import heapq
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np
import sympy

from .errors import DegenerateSystemError, InvalidInputError


def _as_int(c) -> int:
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    if isinstance(c, (np.integer,)):
        return int(c)
    raise InvalidInputError(f"coefficient {c!r} is not an integer")


def _madd(a, b):
    return tuple(i + j for i, j in zip(a, b))


# raw term-dict arithmetic on a shared variable tuple --------------------------

def _t_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _t_mul(a: dict, b: dict) -> dict:
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = _madd(e1, e2)
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def _t_div(f: dict, g: dict, rational: bool = False):
    """Exact quotient ``f / g`` or ``None`` if ``g`` does not divide ``f``.

    Lexicographic division by the leading term: if ``g | f`` every remainder
    stays a multiple of ``g``, so a leading monomial not divisible by that of
    ``g`` proves non-divisibility. Integer mode also rejects non-integral
    coefficient quotients.
    """
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    lg = max(g)
    cg = g[lg]
    r = dict(f)
    heap = [tuple(-x for x in e) for e in r]
    heapq.heapify(heap)
    q: dict = {}
    while r:
        while True:
            lr = tuple(-x for x in heapq.heappop(heap))
            if lr in r:
                break
        if any(a < b for a, b in zip(lr, lg)):
            return None
        c = r[lr]
        if rational:
            c = Fraction(c) / cg
        else:
            if c % cg:
                return None
            c //= cg
        m = tuple(a - b for a, b in zip(lr, lg))
        q[m] = c
        for e, gc in g.items():
            key = _madd(m, e)
            old = r.get(key)
            v = (old or 0) - c * gc
            if v:
                r[key] = v
                if old is None:
                    heapq.heappush(heap, tuple(-x for x in key))
            elif old is not None:
                del r[key]
    return q


class MultiPoly:
    """Multivariate polynomial with arbitrary-precision integer coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str] = (), terms: dict | None = None):
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise InvalidInputError(f"repeated variable names in {self.vars}")
        clean = {}
        nv = len(self.vars)
        for e, c in (terms or {}).items():
            e = tuple(int(i) for i in e)
            if len(e) != nv or any(i < 0 for i in e):
                raise InvalidInputError(f"bad exponent vector {e} for variables {self.vars}")
            c = _as_int(c)
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean

    # constructors -------------------------------------------------------------

    @classmethod
    def _raw(cls, vars, terms):
        p = cls.__new__(cls)
        p.vars = vars
        p.terms = terms
        return p

    @classmethod
    def var(cls, name: str, vars: Sequence[str] | None = None) -> "MultiPoly":
        vars = tuple(vars) if vars is not None else (name,)
        e = tuple(1 if v == name else 0 for v in vars)
        if name not in vars:
            raise InvalidInputError(f"{name} is not among {vars}")
        return cls._raw(vars, {e: 1})

    @classmethod
    def const(cls, c: int, vars: Sequence[str] = ()) -> "MultiPoly":
        vars = tuple(vars)
        c = _as_int(c)
        return cls._raw(vars, {(0,) * len(vars): c} if c else {})

    @classmethod
    def gens(cls, *names: str):
        return tuple(cls.var(n, names) for n in names)

    # universe handling ----------------------------------------------------------

    def with_vars(self, vars: Sequence[str]) -> "MultiPoly":
        """Re-express over ``vars`` (a superset of the variables in use)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        pos = {v: i for i, v in enumerate(vars)}
        used = self.used_vars()
        missing = [v for v in used if v not in pos]
        if missing:
            raise InvalidInputError(f"variables {missing} missing from {vars}")
        idx = [pos.get(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for i, k in enumerate(e):
                if k:
                    ne[idx[i]] = k
            out[tuple(ne)] = c
        return MultiPoly._raw(vars, out)

    def used_vars(self) -> tuple:
        return tuple(v for i, v in enumerate(self.vars) if any(e[i] for e in self.terms))

    def compact(self) -> "MultiPoly":
        """Drop declared variables that do not occur."""
        return self.with_vars(self.used_vars())

    @staticmethod
    def _merge(a: "MultiPoly", b: "MultiPoly"):
        if a.vars == b.vars:
            return a.vars, a.terms, b.terms
        vars = a.vars + tuple(v for v in b.vars if v not in a.vars)
        return vars, a.with_vars(vars).terms, b.with_vars(vars).terms

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction, np.integer)):
            return MultiPoly.const(_as_int(other), self.vars)
        return NotImplemented

    # arithmetic -------------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        vars, a, b = self._merge(self, other)
        return MultiPoly._raw(vars, _t_add(a, b))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        vars, a, b = self._merge(self, other)
        return MultiPoly._raw(vars, _t_add(a, b, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        vars, a, b = self._merge(self, other)
        return MultiPoly._raw(vars, _t_mul(a, b))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise InvalidInputError("only non-negative integer powers")
        result = MultiPoly.const(1, self.vars)
        base = self
        k = int(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other) if not isinstance(other, MultiPoly) else other
        if other is NotImplemented:
            return NotImplemented
        _, a, b = self._merge(self, other)
        return a == b

    def __hash__(self):
        p = self.compact()
        return hash((p.vars, frozenset(p.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # structure -----------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> int:
        if not self.is_constant:
            raise InvalidInputError("polynomial is not constant")
        return next(iter(self.terms.values()), 0)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), reverse=True)

    def leading_term(self) -> tuple:
        if not self.terms:
            raise InvalidInputError("zero polynomial has no leading term")
        e = max(self.terms)
        return e, self.terms[e]

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var: str) -> int:
        if var not in self.vars:
            return 0 if self.terms else -1
        i = self.vars.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def coefficients_in(self, var: str) -> list:
        """Coefficients of ``var**0 .. var**d`` as polynomials without ``var``."""
        if var not in self.vars:
            return [self]
        i = self.vars.index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        d = self.degree(var)
        buckets = [dict() for _ in range(max(d, 0) + 1)]
        for e, c in self.terms.items():
            buckets[e[i]][e[:i] + e[i + 1:]] = c
        return [MultiPoly._raw(rest, b) for b in buckets]

    def derivative(self, var: str) -> "MultiPoly":
        if var not in self.vars:
            return MultiPoly._raw(self.vars, {})
        i = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MultiPoly._raw(self.vars, out)

    def subs(self, var: str, value) -> "MultiPoly":
        """Substitute an integer or a polynomial for ``var``."""
        if var not in self.vars:
            return self
        coeffs = self.coefficients_in(var)
        if isinstance(value, MultiPoly):
            result = MultiPoly.const(0, coeffs[0].vars)
            for c in reversed(coeffs):
                result = result * value + c
            return result
        value = _as_int(value)
        result = MultiPoly.const(0, coeffs[0].vars)
        for c in reversed(coeffs):
            result = result * value + c
        return result

    def content(self) -> int:
        return reduce(math.gcd, self.terms.values(), 0)

    def primitive(self) -> "MultiPoly":
        """Content 1 with positive leading coefficient (zero stays zero)."""
        if not self.terms:
            return self
        g = self.content()
        if self.leading_term()[1] < 0:
            g = -g
        return MultiPoly._raw(self.vars, {e: c // g for e, c in self.terms.items()})

    normalize = primitive

    # evaluation -------------------------------------------------------------

    def evaluate(self, values: dict):
        """Evaluate at a point given as ``{name: number}``.

        Exact for int/Fraction inputs; floats and complex follow Python
        arithmetic. Unused variables may be omitted.
        """
        used = self.used_vars()
        missing = [v for v in used if v not in values]
        if missing:
            raise InvalidInputError(f"no value for {missing}")
        pts = [values.get(v, 0) for v in self.vars]
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(pts, e):
                if k:
                    t = t * x**k
            total = total + t
        return total

    def __call__(self, **values):
        return self.evaluate(values)

    def lambdify(self, order: Sequence[str], fixed: dict | None = None):
        """Vectorized float evaluator ``f(*arrays)`` over ``order``.

        Variables listed in ``fixed`` are replaced by the given numbers first.
        """
        fixed = fixed or {}
        order = tuple(order)
        missing = [v for v in self.used_vars() if v not in order and v not in fixed]
        if missing:
            raise InvalidInputError(f"variables {missing} are neither free nor fixed")
        pos = [order.index(v) if v in order else None for v in self.vars]
        collapsed: dict = {}
        for e, c in self.terms.items():
            w = float(c)
            key = [0] * len(order)
            for i, k in enumerate(e):
                if not k:
                    continue
                if pos[i] is None:
                    w *= float(fixed[self.vars[i]]) ** k
                else:
                    key[pos[i]] = k
            key = tuple(key)
            collapsed[key] = collapsed.get(key, 0.0) + w
        items = list(collapsed.items())

        def f(*args):
            args = [np.asarray(a, dtype=float) for a in args]
            shape = np.broadcast(*args).shape if args else ()
            out = np.zeros(shape)
            for e, w in items:
                t = w
                for a, k in zip(args, e):
                    if k:
                        t = t * a**k
                out = out + t
            return out

        return f

    def magnitude(self, values: dict) -> float:
        """Sum of absolute term values at a point (scale for relative residuals)."""
        pts = [abs(float(values.get(v, 0))) for v in self.vars]
        total = 0.0
        for e, c in self.terms.items():
            t = abs(float(c))
            for x, k in zip(pts, e):
                if k:
                    t *= x**k
            total += t
        return total

    # rendering ----------------------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            a = abs(c)
            body = mono if (a == 1 and mono) else (f"{a}*{mono}" if mono else str(a))
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    __str__ = to_text

    def __repr__(self):
        return f"MultiPoly({self.to_text()!r}, vars={self.vars})"

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "terms": [{"exp": list(e), "coef": str(c)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj) -> "MultiPoly":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["vars"], {tuple(t["exp"]): int(t["coef"]) for t in obj["terms"]})


# parsing ---------------------------------------------------------------------------

_ALLOWED = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Add, ast.Sub, ast.Mult, ast.Pow,
            ast.USub, ast.UAdd, ast.Name, ast.Load, ast.Constant)


def parse_poly(text: str, vars: Sequence[str] | None = None) -> MultiPoly:
    """Parse text such as ``x^2 + 32*y^2 + 16*y*nu``.

    Variable order is ``vars`` when given, otherwise order of first appearance.
    """
    tree = ast.parse(text.replace("^", "**"), mode="eval")
    names = []
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise InvalidInputError(f"unsupported syntax in polynomial: {ast.dump(node)}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, int):
            raise InvalidInputError("only integer constants are allowed")
    for node in sorted((n for n in ast.walk(tree) if isinstance(n, ast.Name)),
                       key=lambda n: (n.lineno, n.col_offset)):
        if node.id not in names:
            names.append(node.id)
    order = tuple(vars) if vars is not None else tuple(names)
    unknown = [n for n in names if n not in order]
    if unknown:
        raise InvalidInputError(f"unknown variables {unknown}")
    env = {v: MultiPoly.var(v, order) for v in order}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            return MultiPoly.const(node.value, order)
        if isinstance(node, ast.Name):
            return env[node.id]
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        left, right = ev(node.left), ev(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if not right.is_constant:
            raise InvalidInputError("exponent must be an integer constant")
        return left ** right.constant_value()

    return ev(tree).with_vars(order)


# operations -------------------------------------------------------------------------

def poly_arithmetic(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise InvalidInputError(f"unknown operation {op!r}")


def chebyshev(kind: str, k: int, var: str = "u") -> MultiPoly:
    """Chebyshev ``T_k`` (kind ``first``) or ``U_k`` (kind ``second``) in ``var``."""
    if k < 0:
        raise InvalidInputError("Chebyshev degree must be non-negative")
    u = MultiPoly.var(var)
    one = MultiPoly.const(1, (var,))
    if kind == "first":
        prev, cur = one, u
    elif kind == "second":
        prev, cur = one, 2 * u
    else:
        raise InvalidInputError(f"unknown Chebyshev kind {kind!r}")
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, 2 * u * cur - prev
    return cur


def bareiss_det(matrix: list, vars: tuple) -> dict:
    """Determinant of a square matrix of term dicts over ``vars``."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return {(0,) * len(vars): 1}
    sign = 1
    prev = {(0,) * len(vars): 1}
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return {}
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                num = _t_mul(pivot, m[i][j])
                if mik and m[k][j]:
                    num = _t_add(num, _t_mul(mik, m[k][j]), -1)
                q = _t_div(num, prev) if num else {}
                if q is None:
                    raise ArithmeticError("inexact Bareiss division")
                m[i][j] = q
            m[i][k] = {}
        prev = pivot
    det = m[n - 1][n - 1]
    return {e: sign * c for e, c in det.items()}


def sylvester_matrix(f: MultiPoly, g: MultiPoly, var: str) -> list:
    """Sylvester matrix (list of rows of MultiPoly) of ``f`` and ``g`` in ``var``."""
    vars, _, _ = MultiPoly._merge(f, g)
    f, g = f.with_vars(vars), g.with_vars(vars)
    a = f.coefficients_in(var)[::-1]
    b = g.coefficients_in(var)[::-1]
    m, n = len(a) - 1, len(b) - 1
    zero = MultiPoly.const(0, a[0].vars)
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + a + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + b + [zero] * (size - n - 1 - i))
    return rows


def sylvester_resultant(f: MultiPoly, g: MultiPoly, var: str) -> MultiPoly:
    """``Res(f, g; var)`` as the Sylvester determinant, exact over Z."""
    if f.degree(var) < 1 or g.degree(var) < 1:
        raise InvalidInputError(f"both polynomials need positive degree in {var}")
    rows = sylvester_matrix(f, g, var)
    rest = rows[0][0].vars
    det = bareiss_det([[p.terms for p in row] for row in rows], rest)
    return MultiPoly._raw(rest, det)


def eliminate(system: Sequence[MultiPoly], vars: Sequence[str]) -> MultiPoly:
    """Eliminate ``vars`` in order by iterated resultants.

    At each step, polynomials free of the variable are carried over and the
    others are paired with the last one that contains it. Every common
    solution projects to a root of the output, but the output may vanish on
    extra points as well. A zero intermediate resultant (common factor) is
    reported as :class:`DegenerateSystemError`.
    """
    polys = list(system)
    if not polys:
        raise InvalidInputError("empty system")
    vars = list(vars)
    for step, v in enumerate(vars):
        with_v = [p for p in polys if p.degree(v) > 0]
        without = [p for p in polys if p.degree(v) <= 0]
        if len(with_v) < 2:
            raise InvalidInputError(f"fewer than two polynomials involve {v}; cannot eliminate it")
        pivot = with_v[-1]
        new = []
        for p in with_v[:-1]:
            r = sylvester_resultant(p, pivot, v)
            if r.is_zero and (step < len(vars) - 1 or len(with_v) > 2 or without):
                raise DegenerateSystemError(f"zero resultant eliminating {v}: common factor present")
            new.append(r)
        polys = without + new
    if len(polys) != 1:
        nonzero = [p for p in polys if not p.is_zero]
        if len(nonzero) > 1:
            raise InvalidInputError(
                f"{len(polys)} polynomials remain after elimination; supply exactly len(vars)+1 equations"
            )
        return nonzero[0] if nonzero else polys[0]
    return polys[0]


def _to_sympy(f: MultiPoly):
    gens = sympy.symbols(f.vars) if f.vars else ()
    if not f.vars:
        return None, gens
    return sympy.Poly.from_dict({e: c for e, c in f.terms.items()}, *gens, domain="ZZ"), gens


def squarefree_primitive(f: MultiPoly) -> MultiPoly:
    """Primitive squarefree part with positive leading coefficient."""
    if f.is_zero:
        raise InvalidInputError("zero polynomial")
    if f.is_constant:
        return MultiPoly.const(1, f.vars)
    used = f.compact()
    sp, _ = _to_sympy(used)
    part = sp.sqf_part()
    out = MultiPoly(used.vars, {tuple(e): int(c) for e, c in part.as_dict().items()})
    return out.with_vars(f.vars).primitive()


def irreducible_factors(f: MultiPoly) -> list:
    """Distinct irreducible factors over the integers, each primitive."""
    if f.is_zero:
        raise InvalidInputError("zero polynomial")
    if f.is_constant:
        return []
    used = f.compact()
    sp, gens = _to_sympy(used)
    out = []
    for fac, _ in sp.factor_list()[1]:
        g = MultiPoly(used.vars, {tuple(e): int(c) for e, c in fac.as_dict().items()})
        out.append(g.with_vars(f.vars).primitive())
    return sorted(out, key=lambda g: (g.total_degree(), g.to_text()))


class Division(NamedTuple):
    """Outcome of :func:`divides`: ``g == f * scale * quotient`` when ``ok``."""

    ok: bool
    quotient: MultiPoly | None
    scale: Fraction

    def __bool__(self):
        return self.ok


def divides(f: MultiPoly, g: MultiPoly) -> Division:
    """Whether ``f`` divides ``g`` over the rationals."""
    if f.is_zero:
        raise InvalidInputError("divisor must be nonzero")
    vars, ft, gt = MultiPoly._merge(f, g)
    if not gt:
        return Division(True, MultiPoly.const(0, vars), Fraction(1))
    q = _t_div(gt, ft, rational=True)
    if q is None:
        return Division(False, None, Fraction(0))
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(c).denominator for c in q.values()), 1)
    ints = {e: int(Fraction(c) * den) for e, c in q.items()}
    cont = reduce(math.gcd, ints.values(), 0)
    lead = ints[max(ints)]
    if lead < 0:
        cont = -cont
    quotient = MultiPoly._raw(vars, {e: c // cont for e, c in ints.items()})
    return Division(True, quotient, Fraction(cont, den))


def multiplicity(f: MultiPoly, g: MultiPoly) -> int:
    """Largest ``k`` with ``f**k | g`` (``g`` nonzero)."""
    if g.is_zero:
        raise InvalidInputError("multiplicity in the zero polynomial is unbounded")
    k = 0
    while True:
        d = divides(f, g)
        if not d:
            return k
        k += 1
        g = d.quotient
        if f.is_constant:
            return k


# univariate exact toolkit (ascending Fraction coefficient lists) ---------------------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _ueval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _uderiv(p):
    return [i * c for i, c in enumerate(p)][1:]


def _udivmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    while len(a) >= len(b) and a:
        s = len(a) - len(b)
        c = Fraction(a[-1]) / lb
        q[s] = c
        for i, bc in enumerate(b):
            a[s + i] -= c * bc
        a = _trim(a)
    return _trim(q), a


def _ugcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _udivmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a] if a else a


def _sturm(p):
    seq = [p, _uderiv(p)]
    while True:
        _, r = _udivmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _variations(seq, x):
    signs = [v for v in (_ueval(s, x) for s in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _count(seq, a, b):
    """Distinct roots of ``seq[0]`` in the half-open interval ``(a, b]``."""
    return _variations(seq, a) - _variations(seq, b)


@dataclass(frozen=True)
class RootIsolate:
    lo: Fraction
    hi: Fraction
    midpoint: float
    multiple: bool = False


def _univariate_coeffs(f) -> list:
    if isinstance(f, MultiPoly):
        used = f.used_vars()
        if len(used) > 1:
            raise InvalidInputError(f"polynomial in {used} is not univariate")
        if not used:
            return [Fraction(f.constant_value())]
        return [Fraction(c.constant_value()) if c.terms else Fraction(0)
                for c in f.coefficients_in(used[0])]
    return [Fraction(c) for c in f]


def descartes_bound(coeffs, lo, hi) -> int:
    """Sign variations after mapping ``(lo, hi)`` onto ``(0, inf)``.

    An upper bound on the number of roots in ``(lo, hi)`` with the same parity.
    """
    p = _trim(_univariate_coeffs(coeffs))
    lo, hi = Fraction(lo), Fraction(hi)
    d = len(p) - 1
    # p((lo + hi*t) / (1 + t)) * (1 + t)^d expanded in t
    out = [Fraction(0)] * (d + 1)
    for k, c in enumerate(p):
        term = [Fraction(1)]
        for _ in range(k):
            term = _polymul(term, [lo, hi])
        for _ in range(d - k):
            term = _polymul(term, [Fraction(1), Fraction(1)])
        for i, t in enumerate(term):
            out[i] += c * t
    signs = [c for c in out if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _polymul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def real_roots(f, lo=-1, hi=1, tol: float = 1e-12) -> list:
    """All real roots of a univariate polynomial in ``[lo, hi]``.

    ``f`` is a univariate :class:`MultiPoly` or an ascending coefficient
    sequence (floats are converted exactly). Roots are isolated with a Sturm
    sequence of the squarefree part and refined by exact bisection to
    ``tol``. ``multiple`` marks roots shared with ``f'``.
    """
    p = _trim(_univariate_coeffs(f))
    if not p:
        raise InvalidInputError("zero polynomial has no isolated roots")
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise InvalidInputError("need lo < hi")
    if len(p) == 1:
        return []
    g = _ugcd(p, _uderiv(p))
    q = _udivmod(p, g)[0] if len(g) > 1 else p
    seq = _sturm(q)
    gseq = _sturm(g) if len(g) > 1 else None
    tol = Fraction(tol)
    out = []

    def is_multiple(a, b, exact=None):
        if gseq is None:
            return False
        if exact is not None:
            return _ueval(g, exact) == 0
        return _count(gseq, a, b) > 0

    def refine(a, b):
        fa = _ueval(q, a)
        while b - a > tol:
            m = (a + b) / 2
            fm = _ueval(q, m)
            if fm == 0:
                return m, m
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        return a, b

    def exact_root(r):
        width = (hi - lo) / 4
        while True:
            a, b = r - width, r + width
            if _ueval(q, a) != 0 and _ueval(q, b) != 0 and _count(seq, a, b) == 1:
                break
            width /= 2
        out.append(RootIsolate(a, b, float(r), is_multiple(a, b, r)))
        return a, b

    def isolate(a, b):
        n = _count(seq, a, b)
        if n == 0:
            return
        if n == 1:
            ra, rb = refine(a, b)
            mid = float((ra + rb) / 2)
            out.append(RootIsolate(a, b, mid, is_multiple(a, b)))
            return
        m = (a + b) / 2
        if _ueval(q, m) == 0:
            ea, eb = exact_root(m)
            isolate(a, ea)
            isolate(eb, b)
        else:
            isolate(a, m)
            isolate(m, b)

    a, b = lo, hi
    if _ueval(q, lo) == 0:
        a = exact_root(lo)[1]
    if _ueval(q, hi) == 0:
        b = exact_root(hi)[0]
    if a < b:
        isolate(a, b)
    out.sort(key=lambda r: r.midpoint)
    return out


def cauchy_bound(coeffs) -> float:
    p = _trim(_univariate_coeffs(coeffs))
    if len(p) < 2:
        return 1.0
    lead = abs(p[-1])
    return float(1 + max(abs(c) / lead for c in p[:-1]))
