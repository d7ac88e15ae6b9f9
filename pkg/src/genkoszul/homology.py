"""Degree-wise homology, Hilbert tables and finite-colength certificates.

Every question is answered inside one degree slice.  A module slice is the
quotient chart of the ambient slice by the presentation image; an induced
map is read off in those charts.  Homology dimensions are

    dim H^i_d = dim Q^i_d - rank f^i_d - rank f^{i-1}_d.

Termination of a Hilbert table:

* ``proved``: a cokernel whose slices vanish on ``max(a_i)`` consecutive
  degrees past its largest ambient twist vanishes in every higher degree
  (peel one variable off a monomial coefficient and use induction).  A
  homology table is proved when the underlying term is proved to vanish.
* ``heuristic``: homology vanished on the window past the twists of all
  the terms and presentations involved, but the terms themselves do not
  vanish; no a-priori bound for the homology is available.
* ``truncated``: the degree bound was hit first.  No total is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .complexes import ChainComplex, InducedMap, KernelRow, PresentedModule
from .linalg import (
    ExactMatrix,
    QuotientChart,
    WellDefinednessViolation,
    kernel_basis,
    quotient_structure,
    rank,
)
from .ring import HomPoly, WeightedRing

PROVED, HEURISTIC, TRUNCATED = "proved", "heuristic", "truncated"


@dataclass
class HilbertTable:
    entries: dict[int, int]
    d_min: int
    d_max: int
    termination: str
    note: str = ""

    @property
    def total(self) -> int | None:
        if self.termination == TRUNCATED:
            return None
        return sum(self.entries.values())

    @property
    def resolved(self) -> bool:
        return self.termination != TRUNCATED

    def trimmed(self) -> tuple[int, ...]:
        """Dimensions with leading and trailing zeros removed (twist-free shape)."""
        vals = [self.entries.get(d, 0) for d in range(self.d_min, self.d_max + 1)]
        while vals and vals[0] == 0:
            vals.pop(0)
        while vals and vals[-1] == 0:
            vals.pop()
        return tuple(vals)

    def nonzero_entries(self) -> dict[int, int]:
        return {d: k for d, k in sorted(self.entries.items()) if k}

    def as_dict(self) -> dict:
        return {
            "d_min": self.d_min,
            "d_max": self.d_max,
            "termination": self.termination,
            "total": self.total,
            "entries": {str(d): k for d, k in sorted(self.entries.items()) if k},
        }

    @classmethod
    def zero(cls, note: str = "zero module") -> "HilbertTable":
        return cls({}, 0, -1, PROVED, note)


def worst_status(tables: Sequence[HilbertTable]) -> str:
    order = {PROVED: 0, HEURISTIC: 1, TRUNCATED: 2}
    return max((t.termination for t in tables), key=order.__getitem__, default=PROVED)


@dataclass
class GradeCertificate:
    description: str
    verdict: str  # "unit", "finite-colength", "not-finite-within-bound"
    window: tuple[int, int] | None
    length: int | None = None

    @property
    def finite(self) -> bool:
        return self.verdict in ("unit", "finite-colength")

    def as_dict(self) -> dict:
        return {
            "ideal": self.description,
            "verdict": self.verdict,
            "window": list(self.window) if self.window else None,
            "colength": self.length,
        }


def default_bound(ring: WeightedRing) -> int:
    a = ring.weights.weights
    return sum(ring.relation_degrees) + sum(a) + 2 * max(a)


class HomologyEngine:
    """Per-degree evaluator with chart and rank caches.

    ``bound`` caps how many degrees past ``d_min`` any table may scan;
    ``window`` is the number of consecutive zero degrees required to stop.
    """

    def __init__(self, ring: WeightedRing, bound: int | None = None, window: int | None = None,
                 check_maps: bool = False):
        self.ring = ring
        self.bound = default_bound(ring) if bound is None else int(bound)
        self.window = ring.max_weight if window is None else max(int(window), 1)
        self.check_maps = check_maps
        self._charts: dict = {}
        self._ranks: dict = {}
        self._keep: list = []

    # slices ---------------------------------------------------------------

    def module_slice(self, m: PresentedModule, d: int) -> QuotientChart:
        key = (id(m), d)
        hit = self._charts.get(key)
        if hit is None:
            dim = m.ambient.slice_dim(d)
            if m.presentation is None or not m.presentation.entries or dim == 0:
                hit = _identity_chart(self.ring.field, dim)
            else:
                hit = quotient_structure(dim, m.presentation.slice(d), self.ring.field,
                                         keep_span=self.check_maps)
            self._charts[key] = hit
            self._keep.append(m)
        return hit

    def module_dim(self, m: PresentedModule, d: int) -> int:
        return self.module_slice(m, d).dim

    def map_slice(self, f: InducedMap, d: int) -> ExactMatrix:
        src = self.module_slice(f.source, d)
        dst = self.module_slice(f.target, d)
        raw = f.ambient_map.slice(d)
        if self.check_maps and src.span is not None and src.span.cols and dst.dim:
            if not (dst.projection @ (raw @ src.span)).is_zero():
                raise WellDefinednessViolation(f"{f.source.name} -> {f.target.name} at degree {d}")
        if src.dim != raw.cols:
            raw = raw.columns(src.complement)
        if dst.dim != raw.rows:
            raw = dst.projection @ raw
        return raw

    def map_rank(self, f: InducedMap | None, d: int) -> int:
        if f is None:
            return 0
        key = (id(f), d)
        hit = self._ranks.get(key)
        if hit is None:
            if self.module_dim(f.source, d) == 0 or self.module_dim(f.target, d) == 0:
                hit = 0
            else:
                hit = rank(self.map_slice(f, d))
            self._ranks[key] = hit
            self._keep.append(f)
        return hit

    def homology_dim(self, cx: ChainComplex, i: int, d: int) -> int:
        term = cx.term(i)
        if term is None:
            return 0
        q = self.module_dim(term, d)
        if q == 0:
            return 0
        return q - self.map_rank(cx.differential(i), d) - self.map_rank(cx.differential(i - 1), d)

    # tables ---------------------------------------------------------------

    def _scan(self, dim_at: Callable[[int], int], d_min: int, stop_from: int, prove: Callable[[int], bool] | None,
              bound: int | None, note: str) -> HilbertTable:
        """Scan degrees from ``d_min``; stop after ``window`` zeros at or past ``stop_from``."""
        bound = self.bound if bound is None else bound
        W = self.window
        entries: dict[int, int] = {}
        zeros = 0
        d = d_min
        while True:
            if d > d_min + bound:
                return HilbertTable(entries, d_min, d - 1, TRUNCATED, note)
            k = dim_at(d)
            entries[d] = k
            if d >= stop_from and k == 0:
                zeros += 1
            else:
                zeros = 0
            if zeros >= W:
                status = PROVED if prove is not None and prove(d) else HEURISTIC
                return HilbertTable(entries, d_min, d, status, note)
            d += 1

    def length_module(self, m: PresentedModule, bound: int | None = None) -> HilbertTable:
        """Hilbert table of a presented module; ``proved`` or ``truncated``."""
        tw = m.twist_range()
        if tw is None:
            return HilbertTable.zero()
        lo, hi = tw
        W = self.ring.max_weight
        bound = self.bound if bound is None else bound
        entries: dict[int, int] = {}
        zeros = 0
        for d in range(lo, lo + bound + 1):
            k = self.module_dim(m, d)
            entries[d] = k
            zeros = zeros + 1 if (k == 0 and d > hi) else 0
            if zeros >= W:
                return HilbertTable(entries, lo, d, PROVED, m.name)
        return HilbertTable(entries, lo, lo + bound, TRUNCATED, m.name)

    def module_vanishes_from(self, m: PresentedModule, d: int) -> bool:
        """Sound check that ``m`` is zero in every degree ``>= d - W + 1`` (``d`` past its twists)."""
        tw = m.twist_range()
        if tw is None:
            return True
        W = self.ring.max_weight
        start = d - W + 1
        if start <= tw[1]:
            return False
        return all(self.module_dim(m, e) == 0 for e in range(start, d + 1))

    def length(self, cx: ChainComplex, i: int, bound: int | None = None) -> HilbertTable:
        """Hilbert table of ``H^i(cx)``."""
        term = cx.term(i)
        if term is None or term.twist_range() is None:
            return HilbertTable.zero(f"{cx.name} H^{i}: no term")
        d_min = term.twist_range()[0]
        stop_from = _stop_degree([cx.term(i - 1), term, cx.term(i + 1)]) + 1
        return self._scan(
            lambda d: self.homology_dim(cx, i, d),
            d_min,
            stop_from,
            lambda d: self.module_vanishes_from(term, d),
            bound,
            f"{cx.name} H^{i}",
        )

    def lengths(self, cx: ChainComplex, positions=None, bound: int | None = None) -> dict[int, HilbertTable]:
        positions = cx.positions if positions is None else positions
        return {i: self.length(cx, i, bound) for i in positions}

    # kernel row N(t) -----------------------------------------------------

    def _kernel(self, N: KernelRow, p: int, d: int) -> np.ndarray | None:
        key = ("N", id(N), p, d)
        hit = self._charts.get(key)
        if hit is None:
            mod = N.inclusion_target(p)
            dim = mod.slice_dim(d)
            if dim == 0:
                hit = ExactMatrix.zeros(self.ring.field, 0, 0)
            else:
                v = N.boundary(p)
                if v.target.rank == 0:
                    hit = ExactMatrix.identity(self.ring.field, dim)
                else:
                    hit = kernel_basis(v.slice(d))
            self._charts[key] = hit
            self._keep.append(N)
        return hit

    def _restricted_rank(self, N: KernelRow, p: int, d: int) -> int:
        if p < 0 or p + 1 > N.lower.max_p() + 1:
            return 0
        key = ("Nrank", id(N), p, d)
        hit = self._ranks.get(key)
        if hit is None:
            K = self._kernel(N, p, d)
            if K.cols == 0:
                hit = 0
            else:
                h = N.horizontal(p)
                if h.target.rank == 0 or h.target.slice_dim(d) == 0:
                    hit = 0
                else:
                    hit = rank(h.slice(d) @ K)
            self._ranks[key] = hit
        return hit

    def kernel_homology_dim(self, N: KernelRow, p: int, d: int) -> int:
        if p < 0 or p > N.lower.max_p():
            return 0
        k = self._kernel(N, p, d).cols
        if k == 0:
            return 0
        return k - self._restricted_rank(N, p, d) - self._restricted_rank(N, p - 1, d)

    def length_kernel_row(self, N: KernelRow, p: int, bound: int | None = None) -> HilbertTable:
        lower = N.lower
        if p < 0 or p > lower.max_p():
            return HilbertTable.zero(f"Hbar^{p}: no term")
        cell = lower.cell(p, 0)
        if cell.rank == 0:
            return HilbertTable.zero(f"Hbar^{p}: no term")
        mods = [lower.cell(p + dp, dq) for dp in (-1, 0, 1) for dq in (0, 1) if p + dp >= 0]
        stop_from = _stop_degree([PresentedModule(m) for m in mods]) + 1
        return self._scan(
            lambda d: self.kernel_homology_dim(N, p, d),
            min(cell.twists),
            stop_from,
            None,
            bound,
            f"Hbar^{p}",
        )

    # ideals ---------------------------------------------------------------

    def finite_colength(self, generators: Sequence[HomPoly], description: str = "", limit: int | None = None) -> GradeCertificate:
        return finite_colength(self.ring, generators, description, limit)


def _identity_chart(field, dim: int) -> QuotientChart:
    return QuotientChart(dim, tuple(range(dim)), ExactMatrix.identity(field, dim), 0, None)


def _stop_degree(terms) -> int:
    """Largest twist among ambients and presentation sources of ``terms``."""
    best = -math.inf
    for t in terms:
        if t is None:
            continue
        if t.ambient.rank:
            best = max(best, max(t.ambient.twists))
        if t.presentation is not None and t.presentation.source.rank:
            best = max(best, max(t.presentation.source.twists))
    return int(best) if best > -math.inf else 0


def finite_colength(ring: WeightedRing, generators: Sequence[HomPoly], description: str = "",
                    limit: int | None = None) -> GradeCertificate:
    """Certify that ``R/I`` has finite length by finding a vanishing window.

    ``(R/I)_e = 0`` for ``max(a_i)`` consecutive ``e >= 1`` forces vanishing in
    all higher degrees.  ``(R/I)_0 = 0`` means ``I`` is the unit ideal.
    """
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        return GradeCertificate(description, "not-finite-within-bound", None)
    if limit is None:
        limit = (ring.nvars + 1) * max(g.degree for g in gens) + 2 * ring.max_weight
    W = ring.max_weight
    if ring.quotient_dim(gens, 0) == 0:
        return GradeCertificate(description, "unit", (0, 0), 0)
    total = 1
    zeros = 0
    for e in range(1, limit + 1):
        k = ring.quotient_dim(gens, e)
        total += k
        zeros = zeros + 1 if k == 0 else 0
        if zeros >= W:
            return GradeCertificate(description, "finite-colength", (e - W + 1, e), total)
    return GradeCertificate(description, "not-finite-within-bound", (1, limit))
