"""Weighted-graded polynomial rings and their quotients, one degree at a time.

``S = k[x_1..x_n]`` with ``deg x_i = a_i > 0``.  A :class:`WeightedRing` may
carry homogeneous relations; its degree-``d`` slice ``R_d`` is then the
quotient chart of ``S_d`` by the degree-``d`` piece of the relation ideal.
Elements of ``R_d`` are coordinate vectors on the standard monomials of that
chart (the chart complement), so multiplication maps are small matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError, ValidationError
from .linalg import ExactMatrix, QuotientChart, quotient_structure, rank

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class WeightSystem:
    weights: tuple[int, ...]

    def __post_init__(self):
        if any(int(a) < 1 for a in self.weights):
            raise ValidationError(f"weights must be positive integers, got {self.weights}")

    def degree(self, exps: Sequence[int]) -> int:
        return sum(e * a for e, a in zip(exps, self.weights))


class HomPoly:
    """A weighted-homogeneous polynomial.

    ``terms`` maps exponent tuples to nonzero field scalars.  The zero
    polynomial keeps a formal degree, which may be ``None`` when unknown.
    """

    __slots__ = ("ring", "terms", "degree")

    def __init__(self, ring: "WeightedRing", terms: Mapping[Monomial, object], degree: int | None = None):
        field = ring.field
        clean = {}
        for mono, c in terms.items():
            c = field(c)
            if c != 0:
                clean[tuple(int(e) for e in mono)] = c
        degs = {ring.weights.degree(m) for m in clean}
        if len(degs) > 1:
            raise ValidationError(f"polynomial is not homogeneous: degrees {sorted(degs)}")
        if degs:
            (d,) = degs
            if degree is not None and degree != d:
                raise ValidationError(f"declared degree {degree} but terms have degree {d}")
            degree = d
        self.ring = ring
        self.terms = clean
        self.degree = degree

    @classmethod
    def zero(cls, ring, degree: int | None = None) -> "HomPoly":
        return cls(ring, {}, degree)

    @classmethod
    def constant(cls, ring, c=1) -> "HomPoly":
        return cls(ring, {(0,) * ring.nvars: c}, 0)

    @classmethod
    def variable(cls, ring, i: int) -> "HomPoly":
        exps = [0] * ring.nvars
        exps[i] = 1
        return cls(ring, {tuple(exps): 1})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def key(self):
        return (self.degree, tuple(sorted(self.terms.items())))

    def __eq__(self, other):
        if not isinstance(other, HomPoly):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def _combine(self, other: "HomPoly", sign: int) -> "HomPoly":
        if self.is_zero():
            return other if sign == 1 else -other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValidationError(f"cannot add degree {self.degree} and degree {other.degree}")
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + sign * c
        return HomPoly(self.ring, out, self.degree)

    def __add__(self, other: "HomPoly") -> "HomPoly":
        return self._combine(other, 1)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        return self._combine(other, -1)

    def __neg__(self) -> "HomPoly":
        return HomPoly(self.ring, {m: -c for m, c in self.terms.items()}, self.degree)

    def scale(self, c) -> "HomPoly":
        return HomPoly(self.ring, {m: v * c for m, v in self.terms.items()}, self.degree)

    def __mul__(self, other) -> "HomPoly":
        if not isinstance(other, HomPoly):
            return self.scale(other)
        return poly_multiply(self, other)

    __rmul__ = __mul__

    def derivative(self, i: int) -> "HomPoly":
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                out[tuple(e)] = c * m[i]
        deg = None if self.degree is None else self.degree - self.ring.weights.weights[i]
        return HomPoly(self.ring, out, deg)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.ring.variables, m) if e
            )
            if self.ring.field.kind == "fp" and c > self.ring.field.p // 2:
                c = c - self.ring.field.p
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"HomPoly({self}; deg {self.degree})"


def poly_multiply(f: HomPoly, g: HomPoly) -> HomPoly:
    deg = None if f.degree is None or g.degree is None else f.degree + g.degree
    out: dict[Monomial, object] = {}
    for m1, c1 in f.terms.items():
        for m2, c2 in g.terms.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return HomPoly(f.ring, out, deg)


class WeightedRing:
    """``k[variables]`` with positive weights, modulo homogeneous relations."""

    def __init__(self, variables: Sequence[str], weights: Sequence[int], field, relations: Iterable = ()):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValidationError("variable names must be distinct")
        if len(weights) != len(self.variables):
            raise ValidationError("need one weight per variable")
        self.weights = WeightSystem(tuple(int(a) for a in weights))
        self.field = field
        self._basis: dict[int, tuple[Monomial, ...]] = {}
        self._index: dict[int, dict[Monomial, int]] = {}
        self._slices: dict[int, QuotientChart] = {}
        self._mult: dict = {}
        rels = []
        for rel in relations:
            p = self.parse(rel) if isinstance(rel, str) else HomPoly(self, rel.terms, rel.degree)
            if p.is_zero():
                raise ValidationError("relations must be nonzero")
            rels.append(p)
        self.relations: tuple[HomPoly, ...] = tuple(rels)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def max_weight(self) -> int:
        return max(self.weights.weights)

    @property
    def relation_degrees(self) -> tuple[int, ...]:
        return tuple(p.degree for p in self.relations)

    def ambient(self) -> "WeightedRing":
        """The polynomial ring without relations."""
        return WeightedRing(self.variables, self.weights.weights, self.field)

    def __repr__(self):
        rel = ", ".join(map(str, self.relations))
        w = ",".join(map(str, self.weights.weights))
        return f"WeightedRing({','.join(self.variables)}; weights {w}; {self.field.descriptor}; ({rel}))"

    # polynomials ---------------------------------------------------------

    def parse(self, text: str) -> HomPoly:
        """Parse a polynomial with integer or rational coefficients."""
        return parse_poly(self, text)

    def poly(self, terms: Mapping[Monomial, object], degree: int | None = None) -> HomPoly:
        return HomPoly(self, terms, degree)

    def one(self) -> HomPoly:
        return HomPoly.constant(self, 1)

    def var(self, i: int) -> HomPoly:
        return HomPoly.variable(self, i)

    # slices --------------------------------------------------------------

    def monomial_basis(self, d: int) -> tuple[Monomial, ...]:
        return monomial_basis(self, d)

    def monomial_index(self, d: int) -> dict[Monomial, int]:
        idx = self._index.get(d)
        if idx is None:
            idx = {m: i for i, m in enumerate(self.monomial_basis(d))}
            self._index[d] = idx
        return idx

    def ring_slice(self, d: int) -> QuotientChart:
        return ring_slice(self, d)

    def dim(self, d: int) -> int:
        return self.ring_slice(d).dim

    def standard_monomials(self, d: int) -> tuple[Monomial, ...]:
        basis = self.monomial_basis(d)
        return tuple(basis[i] for i in self.ring_slice(d).complement)

    def coordinates(self, poly: HomPoly, d: int | None = None) -> np.ndarray:
        """Coordinates of ``poly`` in ``S_d`` (monomial basis)."""
        d = poly.degree if d is None else d
        idx = self.monomial_index(d)
        vec = _zeros_vec(self.field, len(idx))
        for m, c in poly.terms.items():
            vec[idx[m]] = c
        return vec

    def normal_form(self, poly: HomPoly) -> np.ndarray:
        """Coordinates of the class of ``poly`` in ``R_deg`` (standard monomials)."""
        if poly.is_zero() and poly.degree is None:
            raise ValidationError("zero polynomial without degree has no slice")
        chart = self.ring_slice(poly.degree)
        if chart.dim == 0:
            return _zeros_vec(self.field, 0)
        vec = self.coordinates(poly)
        if self.field.kind == "fp":
            from .linalg import matmul

            return matmul(self.field, chart.projection.data, vec.reshape(-1, 1)).ravel()
        return chart.projection.data.dot(vec)

    def is_zero_in_ring(self, poly: HomPoly) -> bool:
        if poly.is_zero():
            return True
        nf = self.normal_form(poly)
        return all(x == 0 for x in nf)

    def mult_matrix(self, poly: HomPoly, e: int) -> np.ndarray:
        """Raw matrix of multiplication by ``poly``: ``R_e -> R_{e+deg}``.

        Zero polynomials need a known degree.  The returned array is shared
        and must not be modified.
        """
        if poly.degree is None:
            raise ValidationError("multiplication by a polynomial of unknown degree")
        key = (poly.key, e)
        hit = self._mult.get(key)
        if hit is not None:
            return hit
        src = self.ring_slice(e)
        dst = self.ring_slice(e + poly.degree)
        field = self.field
        out = _zeros_mat(field, dst.dim, src.dim)
        if src.dim and dst.dim and poly.terms:
            src_monos = [self.monomial_basis(e)[i] for i in src.complement]
            tidx = self.monomial_index(e + poly.degree)
            proj = dst.projection.data
            for mono, c in poly.terms.items():
                cols = [tidx[tuple(a + b for a, b in zip(m, mono))] for m in src_monos]
                block = proj[:, cols]
                if field.kind == "fp":
                    out = (out + block * c) % field.p
                else:
                    out = out + block * c
        out.flags.writeable = False
        self._mult[key] = out
        return out

    def ideal_slice(self, generators: Sequence[HomPoly], d: int) -> ExactMatrix:
        return ideal_slice(self, generators, d)

    def quotient_dim(self, generators: Sequence[HomPoly], d: int) -> int:
        """``dim (R/J)_d`` for the ideal ``J`` generated by ``generators``."""
        n = len(self.monomial_basis(d))
        if n == 0:
            return 0
        gens = list(self.relations) + [g for g in generators if not g.is_zero()]
        return n - rank(ideal_slice(self, gens, d))

    def hilbert_series_coefficients(self, upto: int) -> list[int]:
        """Coefficients of the complete-intersection series up to degree ``upto``.

        This is the expansion of prod(1 - z^b_j) / prod(1 - z^a_i).
        """
        coeffs = [0] * (upto + 1)
        coeffs[0] = 1
        for a in self.weights.weights:
            for k in range(a, upto + 1):
                coeffs[k] += coeffs[k - a]
        for b in self.relation_degrees:
            for k in range(upto, b - 1, -1):
                coeffs[k] -= coeffs[k - b]
        return coeffs

    def is_complete_intersection(self, upto: int) -> bool:
        """Hilbert function of ``R`` matches the product formula through ``upto``."""
        expected = self.hilbert_series_coefficients(upto)
        return all(self.dim(d) == expected[d] for d in range(upto + 1))


def _zeros_vec(field, n: int) -> np.ndarray:
    if field.kind == "fp":
        return np.zeros(n, dtype=np.int64)
    return np.full(n, Fraction(0), dtype=object)


def _zeros_mat(field, r: int, c: int) -> np.ndarray:
    if field.kind == "fp":
        return np.zeros((r, c), dtype=np.int64)
    return np.full((r, c), Fraction(0), dtype=object)


def _enumerate(weights: Sequence[int], d: int) -> list[Monomial]:
    if not weights:
        return [()] if d == 0 else []
    a, rest = weights[0], weights[1:]
    out = []
    for e in range(d // a, -1, -1):
        for tail in _enumerate(rest, d - e * a):
            out.append((e,) + tail)
    return out


def monomial_basis(ring: WeightedRing, d: int) -> tuple[Monomial, ...]:
    """Monomials of weighted degree ``d``, lexicographically descending."""
    if d < 0:
        return ()
    hit = ring._basis.get(d)
    if hit is None:
        hit = tuple(_enumerate(ring.weights.weights, d))
        ring._basis[d] = hit
    return hit


def ideal_slice(ring: WeightedRing, generators: Sequence[HomPoly], d: int) -> ExactMatrix:
    """Columns ``m * g`` for each generator ``g`` and monomial ``m`` of degree ``d - deg g``."""
    idx = ring.monomial_index(d)
    cols = []
    for g in generators:
        if g.is_zero() or g.degree > d:
            continue
        for m in monomial_basis(ring, d - g.degree):
            cols.append([(tuple(a + b for a, b in zip(m, gm)), c) for gm, c in g.terms.items()])
    out = _zeros_mat(ring.field, len(idx), len(cols))
    for j, col in enumerate(cols):
        for mono, c in col:
            out[idx[mono], j] = c
    return ExactMatrix(ring.field, out, _trusted=True)


def ring_slice(ring: WeightedRing, d: int) -> QuotientChart:
    """Chart of ``R_d = S_d / (relations)_d``."""
    hit = ring._slices.get(d)
    if hit is None:
        n = len(monomial_basis(ring, d))
        hit = quotient_structure(n, ideal_slice(ring, ring.relations, d), ring.field)
        ring._slices[d] = hit
    return hit


def parse_poly(ring: WeightedRing, text: str) -> HomPoly:
    """Parse ``text`` as a homogeneous polynomial of ``ring``.

    Accepts integer or rational coefficients, ``*``, ``^`` or ``**``, ``+``,
    ``-`` and parentheses.
    """
    from sympy import Poly, Symbol
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    symbols = [Symbol(v) for v in ring.variables]
    env = dict(zip(ring.variables, symbols))
    try:
        expr = parse_expr(
            str(text), local_dict=env, transformations=standard_transformations + (convert_xor,), evaluate=True
        )
    except Exception as exc:  # sympy raises a zoo of types here
        raise ParseError(f"cannot parse polynomial {text!r}: {exc}") from None
    extra = set(map(str, getattr(expr, "free_symbols", set()))) - set(ring.variables)
    if extra:
        raise ParseError(f"unknown variables {sorted(extra)} in {text!r}")
    try:
        poly = Poly(expr, *symbols, domain="QQ") if symbols else None
    except Exception as exc:
        raise ParseError(f"{text!r} is not a polynomial: {exc}") from None
    if poly is None:
        return HomPoly.constant(ring, Fraction(str(expr)))
    terms = {}
    for mono, c in poly.terms():
        terms[tuple(mono)] = Fraction(int(c.p), int(c.q))
    try:
        return HomPoly(ring, terms)
    except ValidationError as exc:
        raise ValidationError(f"{text!r}: {exc}") from None

