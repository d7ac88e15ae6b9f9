"""Exact dense linear algebra over a prime field or the rationals.

Scalars are plain Python values in canonical form: residues in ``[0, p)`` for
``F_p`` and reduced :class:`fractions.Fraction` for ``Q``.  Matrices are numpy
arrays wrapped in :class:`ExactMatrix`; ``int64`` storage for ``F_p`` and
object storage for ``Q``.

Pivoting is deterministic (first nonzero entry in column order), so the
reduced row echelon form, and every chart derived from it, is reproducible.
Large ``F_p`` eliminations are delegated to FLINT when python-flint is
importable; the result is the same unique RREF either way.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

try:  # optional accelerator
    import flint
except ImportError:  # pragma: no cover - exercised only without python-flint
    flint = None

__all__ = [
    "PrimeField",
    "RationalField",
    "parse_field",
    "ExactMatrix",
    "QuotientChart",
    "WellDefinednessViolation",
    "rref",
    "rank",
    "kernel_basis",
    "quotient_structure",
    "induced_map_on_quotients",
]

# entry-count threshold above which FLINT is used for F_p eliminations
FLINT_THRESHOLD = 20_000


class WellDefinednessViolation(ValueError):
    """A map does not carry the source subspace into the target subspace."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The prime field F_p."""

    kind = "fp"
    dtype = np.int64

    def __init__(self, p: int):
        p = int(p)
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p >= 2**31:
            raise ValueError("prime must be below 2**31 for int64 storage")
        self.p = p

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def descriptor(self) -> str:
        return f"fp:{self.p}"

    def __call__(self, value) -> int:
        if isinstance(value, Fraction):
            num, den = value.numerator % self.p, value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return num * pow(den, -1, self.p) % self.p
        return int(value) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(int(a), -1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("fp", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


class RationalField:
    """The field Q of rationals."""

    kind = "q"
    dtype = object
    characteristic = 0
    descriptor = "q"

    def __call__(self, value) -> Fraction:
        return Fraction(value)

    def inv(self, a) -> Fraction:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("q")

    def __repr__(self):
        return "RationalField()"


def parse_field(text: str):
    """Parse ``"fp:<prime>"`` or ``"q"``."""
    text = text.strip().lower()
    if text in ("q", "qq", "rationals"):
        return RationalField()
    if text.startswith("fp:"):
        return PrimeField(int(text[3:]))
    raise ValueError(f"unknown field descriptor {text!r}")


def _as_array(field, data) -> np.ndarray:
    if field.kind == "fp":
        arr = np.asarray(data, dtype=object if not isinstance(data, np.ndarray) else None)
        if arr.dtype == object:
            arr = np.array([[field(x) for x in row] for row in arr], dtype=np.int64).reshape(arr.shape)
        else:
            arr = np.mod(arr.astype(np.int64), field.p)
        return arr
    arr = np.empty(np.shape(data), dtype=object)
    src = np.asarray(data, dtype=object)
    for idx in np.ndindex(arr.shape):
        arr[idx] = Fraction(src[idx])
    return arr


class ExactMatrix:
    """An immutable dense matrix over an exact field."""

    __slots__ = ("field", "data")

    def __init__(self, field, data: np.ndarray, *, _trusted: bool = False):
        if not _trusted:
            data = _as_array(field, data)
            if data.ndim != 2:
                raise ValueError("ExactMatrix needs a 2-d array")
        data.flags.writeable = False
        self.field = field
        self.data = data

    @classmethod
    def zeros(cls, field, rows: int, cols: int) -> "ExactMatrix":
        if field.kind == "fp":
            data = np.zeros((rows, cols), dtype=np.int64)
        else:
            data = np.full((rows, cols), Fraction(0), dtype=object)
        return cls(field, data, _trusted=True)

    @classmethod
    def identity(cls, field, n: int) -> "ExactMatrix":
        if field.kind == "fp":
            data = np.eye(n, dtype=np.int64)
        else:
            data = np.full((n, n), Fraction(0), dtype=object)
            for i in range(n):
                data[i, i] = Fraction(1)
        return cls(field, data, _trusted=True)

    @classmethod
    def from_rows(cls, field, rows: Sequence[Sequence], cols: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls.zeros(field, 0, cols or 0)
        return cls(field, np.array(rows, dtype=object))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.data.T.copy(), _trusted=True)

    def tolist(self) -> list[list]:
        return [list(map(_py, row)) for row in self.data]

    def is_zero(self) -> bool:
        if self.field.kind == "fp":
            return not self.data.any()
        return all(x == 0 for x in self.data.flat)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix(self.field, matmul(self.field, self.data, other.data), _trusted=True)

    def __neg__(self) -> "ExactMatrix":
        if self.field.kind == "fp":
            return ExactMatrix(self.field, (-self.data) % self.field.p, _trusted=True)
        return ExactMatrix(self.field, -self.data, _trusted=True)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix) or other.shape != self.shape:
            return NotImplemented if not isinstance(other, ExactMatrix) else False
        return bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.shape, tuple(map(_py, self.data.flat))))

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, {self.field.descriptor})"

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix(self.field, np.hstack([self.data, other.data]), _trusted=True)

    def columns(self, idx: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(self.field, self.data[:, list(idx)].copy(), _trusted=True)


def _py(x):
    return int(x) if isinstance(x, (np.integer, int)) else x


def _zeros(field, shape) -> np.ndarray:
    if field.kind == "fp":
        return np.zeros(shape, dtype=np.int64)
    return np.full(shape, Fraction(0), dtype=object)


def matmul(field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of raw arrays over ``field``."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if field.kind == "q":
        if a.size == 0 or b.size == 0:
            return _zeros(field, (a.shape[0], b.shape[1]))
        return a.dot(b)
    p = field.p
    inner = a.shape[1]
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if inner * (p - 1) ** 2 < 2**53:
        # float64 products are exact in this range
        prod = a.astype(np.float64) @ b.astype(np.float64)
        return np.fmod(prod, p).astype(np.int64)
    prod = a.astype(object).dot(b.astype(object))
    return np.array(prod % p, dtype=np.int64)


def _rref_array(field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    nrows, ncols = a.shape
    if field.kind == "fp" and flint is not None and nrows * ncols > FLINT_THRESHOLD:
        return _rref_flint(field.p, a)
    a = a.copy()
    pivots: list[int] = []
    r = 0
    fp = field.kind == "fp"
    for c in range(ncols):
        if r == nrows:
            break
        col = a[r:, c]
        nz = np.flatnonzero(col) if fp else [i for i, x in enumerate(col) if x != 0]
        if len(nz) == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        piv = a[r, c]
        if fp:
            if piv != 1:
                a[r, c:] = a[r, c:] * pow(int(piv), -1, field.p) % field.p
            column = a[:, c].copy()
            column[r] = 0
            hit = np.flatnonzero(column)
            if hit.size:
                a[np.ix_(hit, np.arange(c, ncols))] = (
                    a[hit, c:] - np.outer(column[hit], a[r, c:])
                ) % field.p
        else:
            if piv != 1:
                a[r, c:] = a[r, c:] / piv
            hit = [i for i in range(nrows) if i != r and a[i, c] != 0]
            for i in hit:
                a[i, c:] = a[i, c:] - a[i, c] * a[r, c:]
        pivots.append(c)
        r += 1
    return a, pivots


def _rref_flint(p: int, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    nrows, ncols = a.shape
    mat = flint.nmod_mat(nrows, ncols, a.ravel().tolist(), p)
    red, rk = mat.rref()
    out = np.fromiter((int(x) for x in red.entries()), dtype=np.int64, count=nrows * ncols)
    out = out.reshape(nrows, ncols)
    pivots = []
    for i in range(rk):
        pivots.append(int(np.flatnonzero(out[i])[0]))
    return out, pivots


def rref(m: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    """Reduced row echelon form and the strictly increasing pivot columns."""
    out, pivots = _rref_array(m.field, m.data)
    return ExactMatrix(m.field, out, _trusted=True), pivots


def rank(m: ExactMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.field.kind == "fp" and flint is not None and m.rows * m.cols > FLINT_THRESHOLD:
        return flint.nmod_mat(m.rows, m.cols, m.data.ravel().tolist(), m.field.p).rank()
    # eliminate along the shorter side
    data = m.data if m.rows <= m.cols else m.data.T
    return len(_rref_array(m.field, data)[1])


def kernel_basis(m: ExactMatrix) -> ExactMatrix:
    """Columns form a basis of ``ker m``, one per non-pivot column."""
    red, pivots = rref(m)
    field = m.field
    free = [c for c in range(m.cols) if c not in set(pivots)]
    out = _zeros(field, (m.cols, len(free)))
    for j, f in enumerate(free):
        out[f, j] = 1 if field.kind == "fp" else Fraction(1)
        for k, c in enumerate(pivots):
            v = red.data[k, f]
            if v != 0:
                out[c, j] = (-v) % field.p if field.kind == "fp" else -v
    return ExactMatrix(field, out, _trusted=True)


@dataclass(frozen=True)
class QuotientChart:
    """Coordinates on ``k^ambient_dim / span``.

    ``complement`` lists the ambient coordinates kept as a basis of the
    quotient; ``projection`` (dim x ambient_dim) is the identity on those
    coordinates and kills the span.
    """

    ambient_dim: int
    complement: tuple[int, ...]
    projection: ExactMatrix
    span_rank: int
    span: ExactMatrix | None = None

    @property
    def dim(self) -> int:
        return len(self.complement)

    def project(self, vectors: ExactMatrix) -> ExactMatrix:
        return self.projection @ vectors


def quotient_structure(ambient_dim: int, span: ExactMatrix, field=None, keep_span: bool = False) -> QuotientChart:
    """Chart of the quotient of the ambient coordinate space by the column span."""
    field = field or span.field
    if span.rows != ambient_dim:
        raise ValueError(f"span has {span.rows} rows, ambient dimension is {ambient_dim}")
    if span.cols == 0 or ambient_dim == 0:
        comp = tuple(range(ambient_dim))
        proj = ExactMatrix.identity(field, ambient_dim)
        return QuotientChart(ambient_dim, comp, proj, 0, span if keep_span else None)
    red, pivots = _rref_array(field, span.data.T)
    pivset = set(pivots)
    comp = tuple(c for c in range(ambient_dim) if c not in pivset)
    proj = _zeros(field, (len(comp), ambient_dim))
    one = 1 if field.kind == "fp" else Fraction(1)
    for i, c in enumerate(comp):
        proj[i, c] = one
    if comp and pivots:
        block = red[: len(pivots)][:, list(comp)]
        if field.kind == "fp":
            proj[:, pivots] = (-block.T) % field.p
        else:
            proj[:, pivots] = -block.T
    return QuotientChart(
        ambient_dim, comp, ExactMatrix(field, proj, _trusted=True), len(pivots), span if keep_span else None
    )


def induced_map_on_quotients(
    f: ExactMatrix, src: QuotientChart, dst: QuotientChart, check: bool = True
) -> ExactMatrix:
    """Matrix of the map induced by ``f`` between quotient coordinates.

    With ``check`` the source span must be recorded in ``src`` (``keep_span``)
    and is verified to land in the destination span.
    """
    if f.rows != dst.ambient_dim or f.cols != src.ambient_dim:
        raise ValueError(f"map of shape {f.shape} does not fit charts {dst.ambient_dim}x{src.ambient_dim}")
    if check and src.span is not None and src.span.cols:
        if not (dst.projection @ (f @ src.span)).is_zero():
            raise WellDefinednessViolation("image of the source span leaves the target span")
    return dst.projection @ f.columns(src.complement)
