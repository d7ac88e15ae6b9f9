"""Generalized Koszul complexes, the Koszul bicomplex, and complexes derived
from it, all as complexes of presented graded modules with degree-0 maps.

Bicomplex coordinates ``(c, v)``.  Column ``c`` fixes the H-factor:
``c <= 0`` is ``D_{-c}(H)``, ``c >= 1`` is ``S_{c-1}(H*)``.  Row ``v`` fixes the
F-factor: ``v >= 0`` is ``S_v(F)``, ``v <= -1`` is ``S_{-1-v}(F)*``.  With
``T = t + c`` (``c <= 0``) or ``T = t + l + c - 1`` (``c >= 1``), the exterior
degree is ``T - v`` for ``v >= 0`` and ``T + m - 1 - v`` for ``v <= -1``.

Horizontal maps (``c -> c+1``) are ``d_φ``, and ``ν^φ`` from column 0 to 1.
Vertical maps (``v -> v+1``) are ``∂_ψ``, and ``ν_ψ`` from row -1 to 0.  All
horizontal maps are unsigned.  The unsigned squares commute up to the
factors ``(d, ∂): -1``, ``(ν^φ, ∂): (-1)^l``, ``(d, ν_ψ): (-1)^m`` and
``(ν^φ, ν_ψ): (-1)^(lm)``; the vertical map out of ``(c, v)`` is multiplied by

    v != -1:  1 for c <= 0,  (-1)^(l+1) for c >= 1
    v == -1:  (-1)^((m+1)|c|) for c <= 0,  (-1)^(lm+1) (-1)^((m+1)(c-1)) for c >= 1

which makes every square anticommute.  Column 0 and row 0 carry no signs,
so they are literally the complexes ``C_ψ(t)`` and ``D_φ(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import CompositionNonzero, ValidationError, WellDefinednessViolation
from .linalg import quotient_structure
from .multilinear import (
    FreeGradedModule,
    HomogeneousMap,
    _minus,
    _plus,
    contract_label,
    divided_power,
    exterior_power,
    full_contract_label,
    graded_dual,
    left_wedge_all,
    map_columns,
    map_rows,
    symmetric_power,
    tensor,
    wedge_label,
)


@dataclass(frozen=True, eq=False)
class PresentedModule:
    """``Coker(presentation)``; ``presentation=None`` means a free module."""

    ambient: FreeGradedModule
    presentation: HomogeneousMap | None = None
    name: str = ""

    def __post_init__(self):
        if self.presentation is not None and self.presentation.target != self.ambient:
            raise ValidationError("presentation must map into the ambient module")

    @property
    def is_free(self) -> bool:
        return self.presentation is None

    @property
    def is_zero_ambient(self) -> bool:
        return self.ambient.rank == 0

    def twist_range(self) -> tuple[int, int] | None:
        if not self.ambient.rank:
            return None
        return min(self.ambient.twists), max(self.ambient.twists)

    def __repr__(self):
        return f"PresentedModule({self.name or 'unnamed'}, ambient rank {self.ambient.rank})"


@dataclass(frozen=True, eq=False)
class InducedMap:
    source: PresentedModule
    target: PresentedModule
    ambient_map: HomogeneousMap

    def __post_init__(self):
        if self.ambient_map.source != self.source.ambient or self.ambient_map.target != self.target.ambient:
            raise ValidationError("ambient map does not match the modules")

    def check_well_defined(self) -> None:
        """Raise unless the source presentation lands in the target presentation image."""
        pres = self.source.presentation
        if pres is None or not pres.entries:
            return
        comp = self.ambient_map @ pres
        if not lands_in_image(comp, self.target):
            raise WellDefinednessViolation(
                f"induced map {self.source.name} -> {self.target.name} is not well defined"
            )


def lands_in_image(f: HomogeneousMap, target: PresentedModule) -> bool:
    """Whether the image of ``f`` lies in the presentation image of ``target``.

    Checked on the generators of ``f``'s source, i.e. at their twists.
    """
    if target.presentation is None:
        return f.is_zero()
    if not f.entries:
        return True
    ring = f.ring
    for d in sorted(set(f.source.twists[j] for (_, j) in f.entries)):
        span = target.presentation.slice(d)
        chart = quotient_structure(target.ambient.slice_dim(d), span, ring.field)
        if chart.dim and not (chart.projection @ f.slice(d)).is_zero():
            return False
    return True


@dataclass
class ChainComplex:
    """Cohomologically indexed: ``maps[k]`` goes from ``terms[k]`` to ``terms[k+1]``.

    ``start`` is the position of ``terms[0]``.
    """

    start: int
    terms: list[PresentedModule]
    maps: list[InducedMap]
    name: str = ""
    labels: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.maps) != max(len(self.terms) - 1, 0):
            raise ValidationError("a complex needs one map between consecutive terms")

    @property
    def positions(self) -> range:
        return range(self.start, self.start + len(self.terms))

    def term(self, pos: int) -> PresentedModule | None:
        k = pos - self.start
        return self.terms[k] if 0 <= k < len(self.terms) else None

    def differential(self, pos: int) -> InducedMap | None:
        """The map out of position ``pos``."""
        k = pos - self.start
        return self.maps[k] if 0 <= k < len(self.maps) else None

    def label(self, pos: int):
        k = pos - self.start
        return self.labels[k] if 0 <= k < len(self.labels) else None

    def __repr__(self):
        return f"ChainComplex({self.name}, positions {self.start}..{self.start + len(self.terms) - 1})"


def _bicomplex_window_default(n: int) -> int:
    return n + 2


class Bicomplex:
    """The Koszul bicomplex ``K(t)`` of ``H --φ--> G --ψ--> F`` with ``ψ ∘ φ = 0``."""

    def __init__(self, psi: HomogeneousMap, phi: HomogeneousMap, t: int, sign_overrides: dict | None = None,
                 check: bool = True):
        if phi.target != psi.source:
            raise ValidationError("φ must land in the source of ψ")
        if check and not (psi @ phi).is_zero():
            raise CompositionNonzero("ψ ∘ φ is not zero in the ring")
        self.psi, self.phi, self.t = psi, phi, t
        self.G, self.F, self.H = psi.source, psi.target, phi.source
        self.n, self.m, self.l = self.G.rank, self.F.rank, self.H.rank
        self.ring = psi.ring
        self._rows = map_rows(psi)
        self._cols = map_columns(phi)
        self._one = self.ring.one()
        self._cells: dict = {}
        self._hmaps: dict = {}
        self._vmaps: dict = {}
        self._c0: dict = {}
        self.sign_overrides = dict(sign_overrides or {})

    # geometry -------------------------------------------------------------

    def cell_info(self, c: int, v: int) -> tuple[str, int, int, str, int]:
        """``(hkind, hdeg, exterior degree, fkind, fdeg)`` of cell ``(c, v)``."""
        if c <= 0:
            hkind, hdeg, T = "D", -c, self.t + c
        else:
            hkind, hdeg, T = "S", c - 1, self.t + self.l + c - 1
        if v >= 0:
            return hkind, hdeg, T - v, "S", v
        j = -1 - v
        return hkind, hdeg, T + self.m + j, "S*", j

    def exterior_degree(self, c: int, v: int) -> int:
        return self.cell_info(c, v)[2]

    def cell(self, c: int, v: int) -> FreeGradedModule:
        hit = self._cells.get((c, v))
        if hit is not None:
            return hit
        hkind, hdeg, q, fkind, fdeg = self.cell_info(c, v)
        if hkind == "D":
            hmod = divided_power(self.H, hdeg)
            shift = 0
        else:
            hmod = symmetric_power(graded_dual(self.H), hdeg)
            shift = -sum(self.H.twists)
        if fkind == "S":
            fmod = symmetric_power(self.F, fdeg)
        else:
            fmod = graded_dual(symmetric_power(self.F, fdeg))
            shift -= sum(self.F.twists)
        mod = tensor(hmod, exterior_power(self.G, q), fmod).shifted(shift)
        self._cells[(c, v)] = mod
        return mod

    def is_zero_cell(self, c: int, v: int) -> bool:
        return self.cell(c, v).rank == 0

    def leftmost_column(self, v: int = 0) -> int:
        """``c_0``: the leftmost column with a nonzero cell in row ``v``.

        Falls back to the first column with nonnegative exterior degree when
        the whole row vanishes.
        """
        if v in self._c0:
            return self._c0[v]
        found = [c for c in self.row_range(v) if self.cell(c, v).rank]
        if found:
            c0 = found[0]
        else:
            t, l = self.t - max(v, 0), self.l
            if v < 0:
                t = self.t + self.m + (-1 - v)
            c0 = -t if t >= 0 else (1 if t >= -l else 1 - t - l)
        self._c0[v] = c0
        return c0

    # maps ---------------------------------------------------------------

    def natural_sign(self, c: int, v: int) -> int:
        l, m = self.l, self.m
        if v != -1:
            return 1 if c <= 0 else (-1) ** (l + 1)
        if c <= 0:
            return (-1) ** ((m + 1) * (-c))
        return (-1) ** (l * m + 1) * (-1) ** ((m + 1) * (c - 1))

    def sign(self, c: int, v: int) -> int:
        return self.sign_overrides.get((c, v), self.natural_sign(c, v))

    def horizontal(self, c: int, v: int) -> HomogeneousMap:
        """``cell(c, v) -> cell(c+1, v)``."""
        hit = self._hmaps.get((c, v))
        if hit is not None:
            return hit
        src, dst = self.cell(c, v), self.cell(c + 1, v)
        cols, one = self._cols, self._one
        if c == 0:

            def action(lab):
                _, subset, f = lab
                for s, coeff in left_wedge_all(cols, subset, one).items():
                    yield ((), s, f), coeff

        elif c < 0:

            def action(lab):
                alpha, subset, f = lab
                for k in sorted(set(alpha)):
                    rest = _minus(alpha, k)
                    for s, coeff in wedge_label(cols[k], subset):
                        yield (rest, s, f), coeff

        else:

            def action(lab):
                beta, subset, f = lab
                for k, col in enumerate(cols):
                    for s, coeff in wedge_label(col, subset):
                        yield (_plus(beta, k), s, f), coeff

        out = HomogeneousMap.from_action(src, dst, action)
        self._hmaps[(c, v)] = out
        return out

    def unsigned_vertical(self, c: int, v: int) -> HomogeneousMap:
        src, dst = self.cell(c, v), self.cell(c, v + 1)
        rows, one = self._rows, self._one
        if v == -1:

            def action(lab):
                h, subset, _ = lab
                for s, coeff in full_contract_label(subset, rows, one).items():
                    yield (h, s, ()), coeff

        elif v >= 0:

            def action(lab):
                h, subset, alpha = lab
                for j, u in enumerate(rows):
                    for s, coeff in contract_label(subset, u):
                        yield (h, s, _plus(alpha, j)), coeff

        else:

            def action(lab):
                h, subset, alpha = lab
                for j in sorted(set(alpha)):
                    rest = _minus(alpha, j)
                    for s, coeff in contract_label(subset, rows[j]):
                        yield (h, s, rest), coeff

        return HomogeneousMap.from_action(src, dst, action)

    def vertical(self, c: int, v: int) -> HomogeneousMap:
        """Signed ``cell(c, v) -> cell(c, v+1)``."""
        key = (c, v, self.sign(c, v))
        hit = self._vmaps.get(key)
        if hit is None:
            hit = self.unsigned_vertical(c, v).scaled(self.sign(c, v))
            self._vmaps[key] = hit
        return hit

    # windows and checks -----------------------------------------------------

    def default_window(self) -> tuple[range, range]:
        w = _bicomplex_window_default(self.n)
        c0 = self.leftmost_column(0)
        return range(c0 - 1, c0 + w + 1), range(-w, w + 1)

    def validate(self, window: tuple[range, range] | None = None) -> "Diagnostic":
        cs, vs = window or self.default_window()
        diag = Diagnostic(subject=f"bicomplex t={self.t}")
        for c in cs:
            for v in vs:
                if self.is_zero_cell(c, v):
                    continue
                if c + 1 in cs and v + 1 in vs:
                    lhs = self.vertical(c + 1, v) @ self.horizontal(c, v)
                    rhs = self.horizontal(c, v + 1) @ self.vertical(c, v)
                    diag.record(f"square ({c},{v})", (lhs + rhs).is_zero())
                if c + 2 in cs:
                    diag.record(f"row d^2 ({c},{v})", (self.horizontal(c + 1, v) @ self.horizontal(c, v)).is_zero())
                if v + 2 in vs:
                    diag.record(f"column d^2 ({c},{v})", (self.vertical(c, v + 1) @ self.vertical(c, v)).is_zero())
        return diag

    def column_T(self, c: int) -> int:
        return self.t + c if c <= 0 else self.t + self.l + c - 1

    def row_t(self, v: int) -> int:
        return self.t - v if v >= 0 else self.t + self.m - 1 - v

    def column_range(self, c: int) -> range:
        """Rows that can carry a nonzero cell in column ``c``."""
        T = self.column_T(c)
        return range(min(T + self.m - self.n - 1, -1), max(T, 0) + 1)

    def row_range(self, v: int) -> range:
        """Columns that can carry a nonzero cell in row ``v``."""
        t = self.row_t(v)
        return range(min(-t, 0), max(self.n - t - self.l + 1, 1) + 1)

    # derived complexes ------------------------------------------------------

    def column(self, c: int, v_range: range | None = None, name: str = "") -> ChainComplex:
        """The vertical complex through column ``c``, trimmed to nonzero terms."""
        v_range = v_range or self.column_range(c)
        return _free_complex(
            [(v, self.cell(c, v)) for v in v_range],
            lambda v: self.vertical(c, v),
            name or f"column {c} of K({self.t})",
        )

    def row(self, v: int, c_range: range | None = None, name: str = "") -> ChainComplex:
        c_range = c_range or self.row_range(v)
        return _free_complex(
            [(c, self.cell(c, v)) for c in c_range],
            lambda c: self.horizontal(c, v),
            name or f"row {v} of K({self.t})",
        )


def _free_complex(cells: list, mapper: Callable[[int], HomogeneousMap], name: str) -> ChainComplex:
    nonzero = [i for i, (_, mod) in enumerate(cells) if mod.rank]
    if not nonzero:
        return ChainComplex(0, [], [], name)
    cells = cells[nonzero[0] : nonzero[-1] + 1]
    terms = [PresentedModule(mod, None, f"{name}[{k}]") for k, (_, mod) in enumerate(cells)]
    maps = [InducedMap(terms[k], terms[k + 1], mapper(cells[k][0])) for k in range(len(cells) - 1)]
    return ChainComplex(0, terms, maps, name, [idx for idx, _ in cells])


@dataclass
class Diagnostic:
    subject: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    def record(self, what: str, ok: bool) -> None:
        self.checked += 1
        if not ok:
            self.failures.append(what)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None

    def __repr__(self):
        state = "ok" if self.ok else f"FAILED at {self.first_failure}"
        return f"Diagnostic({self.subject}: {self.checked} checks, {state})"


# factories -----------------------------------------------------------------


def _zero_map_source(G: FreeGradedModule) -> HomogeneousMap:
    H = FreeGradedModule(G.ring, (), ())
    return HomogeneousMap.zero(H, G)


def build_bicomplex(psi: HomogeneousMap, phi: HomogeneousMap, t: int, sign_overrides: dict | None = None) -> Bicomplex:
    return Bicomplex(psi, phi, t, sign_overrides)


def build_C_psi(psi: HomogeneousMap, t: int) -> ChainComplex:
    """``C_ψ(t)``: column 0 of the bicomplex of ``0 -> G -> F``."""
    bic = Bicomplex(psi, _zero_map_source(psi.source), t, check=False)
    return bic.column(0, name=f"C_psi({t})")


def build_D_phi(phi: HomogeneousMap, t: int) -> ChainComplex:
    """``D_φ(t)``: row 0 of the bicomplex of ``H -> G -> 0``."""
    G = phi.target
    zero_psi = HomogeneousMap.zero(G, FreeGradedModule(G.ring, (), ()))
    bic = Bicomplex(zero_psi, phi, t, check=False)
    return bic.row(0, name=f"D_phi({t})")


@dataclass
class LowerTruncation:
    """``C^{p,q} = K(t)`` cell ``(c_0 + p, q)`` for ``q >= 0``."""

    bicomplex: Bicomplex
    c0: int

    def cell(self, p: int, q: int) -> FreeGradedModule:
        return self.bicomplex.cell(self.c0 + p, q)

    def horizontal(self, p: int, q: int) -> HomogeneousMap:
        return self.bicomplex.horizontal(self.c0 + p, q)

    def vertical(self, p: int, q: int) -> HomogeneousMap:
        return self.bicomplex.vertical(self.c0 + p, q)

    def max_p(self) -> int:
        """Largest ``p`` with a nonzero ``C^{p,0}`` (or -1)."""
        cs = [c for c in self.bicomplex.row_range(0) if c >= self.c0 and self.bicomplex.cell(c, 0).rank]
        return cs[-1] - self.c0 if cs else -1

    def column_complex(self, p: int) -> ChainComplex:
        """Column ``p`` for rows ``q >= 0``, positions equal to ``q``."""
        bic = self.bicomplex
        qs = [q for q in bic.column_range(self.c0 + p) if q >= 0]
        terms = [PresentedModule(self.cell(p, q), None, f"C^{p},{q}") for q in qs]
        maps = [InducedMap(terms[k], terms[k + 1], self.vertical(p, qs[k])) for k in range(len(qs) - 1)]
        return ChainComplex(0, terms, maps, f"column {p} of C({bic.t})", qs)


def lower_truncation(bicx: Bicomplex) -> LowerTruncation:
    return LowerTruncation(bicx, bicx.leftmost_column(0))


@dataclass
class KernelRow:
    """The complex ``N(t)``: ``N^p = Ker(C^{p,0} -> C^{p,1})`` with induced ``d_φ``."""

    lower: LowerTruncation

    @property
    def positions(self) -> range:
        return range(0, self.lower.max_p() + 1)

    def inclusion_target(self, p: int) -> FreeGradedModule:
        return self.lower.cell(p, 0)

    def boundary(self, p: int) -> HomogeneousMap:
        """``∂: C^{p,0} -> C^{p,1}`` whose kernel is ``N^p``."""
        return self.lower.vertical(p, 0)

    def horizontal(self, p: int) -> HomogeneousMap:
        return self.lower.horizontal(p, 0)


def kernel_row_N(lower: LowerTruncation) -> KernelRow:
    return KernelRow(lower)


def build_M(psi: HomogeneousMap, phi: HomogeneousMap, T: int) -> ChainComplex:
    """The cokernel complex ``M(T)``: ``M^p = Coker(cell(c, -2) -> cell(c, -1))``,
    ``p = c - c_0(T)``, with maps induced by the row ``-1`` horizontals."""
    bic = Bicomplex(psi, phi, T)
    c0 = bic.leftmost_column(0)
    cs = [c for c in bic.row_range(-1) if bic.cell(c, -1).rank]
    if not cs:
        return ChainComplex(0, [], [], f"M({T})")
    cs = list(range(cs[0], cs[-1] + 1))
    terms = []
    for c in cs:
        pres = bic.vertical(c, -2)
        terms.append(PresentedModule(bic.cell(c, -1), pres if pres.source.rank else None, f"M^{c - c0}"))
    maps = [InducedMap(terms[k], terms[k + 1], bic.horizontal(cs[k], -1)) for k in range(len(cs) - 1)]
    cx = ChainComplex(cs[0] - c0, terms, maps, f"M({T})", cs)
    cx.bicomplex = bic
    return cx


def build_C_lambda_bar(chi: HomogeneousMap, lam: HomogeneousMap, t: int) -> ChainComplex:
    """``C_λ̄(t)`` realized as ``M(ρ - t)`` for ``ψ = χ*``, ``φ = λ*``."""
    if not (lam @ chi).is_zero():
        raise CompositionNonzero("λ ∘ χ is not zero in the ring")
    psi, phi = dualize(chi), dualize(lam)
    r = psi.source.rank - psi.target.rank
    rho = r - phi.source.rank
    cx = build_M(psi, phi, rho - t)
    cx.name = f"C_lambda_bar({t})"
    return cx


def truncate_nonneg(cx: ChainComplex) -> ChainComplex:
    """Drop every position below 0."""
    if cx.start >= 0:
        return cx
    k = -cx.start
    out = ChainComplex(0, cx.terms[k:], cx.maps[k:], cx.name + "~", cx.labels[k:])
    if hasattr(cx, "bicomplex"):
        out.bicomplex = cx.bicomplex
    return out


def build_C_psi_bar(phi: HomogeneousMap, psi: HomogeneousMap, r: int | None = None) -> ChainComplex:
    """``C_ψ̄(r)`` for ``ψ̄: Coker φ -> F``: column 0 of ``K(r)`` modulo the image of column -1."""
    if r is None:
        r = psi.source.rank - psi.target.rank
    bic = Bicomplex(psi, phi, r)
    vs = [v for v in bic.column_range(0) if bic.cell(0, v).rank]
    if not vs:
        return ChainComplex(0, [], [], f"C_psi_bar({r})")
    vs = list(range(vs[0], vs[-1] + 1))
    terms = []
    for v in vs:
        pres = bic.horizontal(-1, v)
        terms.append(PresentedModule(bic.cell(0, v), pres if pres.source.rank else None, f"C_psi_bar[{v}]"))
    maps = [InducedMap(terms[k], terms[k + 1], bic.vertical(0, vs[k])) for k in range(len(vs) - 1)]
    cx = ChainComplex(0, terms, maps, f"C_psi_bar({r})", vs)
    cx.bicomplex = bic
    return cx


def dualize(f: HomogeneousMap) -> HomogeneousMap:
    """The transpose map ``f*: B* -> A*`` for ``f: A -> B``."""
    src, dst = graded_dual(f.target), graded_dual(f.source)
    return HomogeneousMap(src, dst, {(j, i): p for (i, j), p in f.entries.items()})


def validate(obj) -> Diagnostic:
    """Check d² = 0, entry degrees and well-definedness (complexes) or squares (bicomplexes)."""
    if isinstance(obj, Bicomplex):
        return obj.validate()
    diag = Diagnostic(subject=obj.name)
    for k, f in enumerate(obj.maps):
        try:
            HomogeneousMap(f.ambient_map.source, f.ambient_map.target, f.ambient_map.entries)
            diag.record(f"degree at {obj.start + k}", True)
        except Exception:
            diag.record(f"degree at {obj.start + k}", False)
        try:
            f.check_well_defined()
            diag.record(f"well-defined at {obj.start + k}", True)
        except WellDefinednessViolation:
            diag.record(f"well-defined at {obj.start + k}", False)
        if k + 1 < len(obj.maps):
            comp = obj.maps[k + 1].ambient_map @ f.ambient_map
            diag.record(f"d^2 at {obj.start + k}", lands_in_image(comp, obj.terms[k + 2]))
    return diag
