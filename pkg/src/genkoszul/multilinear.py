"""Free graded modules, their exterior/symmetric/divided powers, and the
structure maps between them.

Basis labels:
  * base modules: ``0..n-1`` (or user names),
  * exterior powers: increasing index tuples, lexicographic,
  * symmetric and divided powers: nondecreasing index tuples, lexicographic,
  * tensor products: tuples of factor labels, in product order.

Right multiplication of ``ΛG`` by a functional ``u`` (contraction) is

    g_{i_0} ∧ … ∧ g_{i_{k-1}} ← u = Σ_j (-1)^j u(g_{i_j}) g_{I minus i_j}

and the contraction by ``u_1 ∧ … ∧ u_p`` is the iterate
``(((y ← u_1) ← u_2) … ← u_p)``.  This matches the signed-determinant
formula over shuffles with sign +1 (checked exhaustively in the tests).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import DegreeMismatch, ValidationError
from .linalg import ExactMatrix
from .ring import HomPoly, WeightedRing


@dataclass(frozen=True, eq=False)
class FreeGradedModule:
    """A free graded module ⊕ R(-w) with one twist ``w`` per generator."""

    ring: WeightedRing
    labels: tuple
    twists: tuple[int, ...]
    dual: bool = False
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.labels) != len(self.twists):
            raise ValidationError("one twist per generator is required")
        if not self._index:
            self._index.update({lab: i for i, lab in enumerate(self.labels)})
        if len(self._index) != len(self.labels):
            raise ValidationError("generator labels must be distinct")

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self._index[label]

    def __eq__(self, other):
        if not isinstance(other, FreeGradedModule):
            return NotImplemented
        return (
            self.ring is other.ring
            and self.labels == other.labels
            and self.twists == other.twists
            and self.dual == other.dual
        )

    def __hash__(self):
        return hash((self.labels, self.twists, self.dual))

    def slice_dims(self, d: int) -> list[int]:
        return [self.ring.dim(d - w) for w in self.twists]

    def slice_dim(self, d: int) -> int:
        return sum(self.slice_dims(d))

    def offsets(self, d: int) -> tuple[list[int], int]:
        dims = self.slice_dims(d)
        offs = [0] * len(dims)
        total = 0
        for i, k in enumerate(dims):
            offs[i] = total
            total += k
        return offs, total

    def shifted(self, s: int) -> "FreeGradedModule":
        """Same generators with every twist raised by ``s``."""
        if s == 0:
            return self
        return FreeGradedModule(self.ring, self.labels, tuple(w + s for w in self.twists), self.dual)

    def __repr__(self):
        return f"FreeGradedModule(rank {self.rank}, twists {self.twists})"


def free_module(ring: WeightedRing, twists: Sequence[int], labels: Sequence[Hashable] | None = None) -> FreeGradedModule:
    labels = tuple(range(len(twists))) if labels is None else tuple(labels)
    return FreeGradedModule(ring, labels, tuple(int(w) for w in twists))


def zero_module(ring: WeightedRing) -> FreeGradedModule:
    return FreeGradedModule(ring, (), ())


def exterior_power(mod: FreeGradedModule, k: int) -> FreeGradedModule:
    if k < 0:
        return zero_module(mod.ring)
    subsets = tuple(itertools.combinations(range(mod.rank), k))
    twists = tuple(sum(mod.twists[i] for i in s) for s in subsets)
    return FreeGradedModule(mod.ring, subsets, twists, mod.dual)


def _multisets(mod: FreeGradedModule, p: int) -> tuple[tuple[tuple, ...], tuple[int, ...]]:
    if p < 0:
        return (), ()
    ms = tuple(itertools.combinations_with_replacement(range(mod.rank), p))
    return ms, tuple(sum(mod.twists[i] for i in s) for s in ms)


def symmetric_power(mod: FreeGradedModule, p: int) -> FreeGradedModule:
    labels, twists = _multisets(mod, p)
    return FreeGradedModule(mod.ring, labels, twists, mod.dual)


def divided_power(mod: FreeGradedModule, p: int) -> FreeGradedModule:
    """``D_p``, identified with the dual of ``S_p`` of the dual on the same labels."""
    return graded_dual(symmetric_power(graded_dual(mod), p))


def graded_dual(mod: FreeGradedModule) -> FreeGradedModule:
    return FreeGradedModule(mod.ring, mod.labels, tuple(-w for w in mod.twists), not mod.dual)


def tensor(*mods: FreeGradedModule) -> FreeGradedModule:
    ring = mods[0].ring
    labels = tuple(itertools.product(*(m.labels for m in mods)))
    twists = tuple(sum(ws) for ws in itertools.product(*(m.twists for m in mods)))
    return FreeGradedModule(ring, labels, twists)


class HomogeneousMap:
    """A degree-0 map of free graded modules given by a sparse polynomial matrix.

    ``entries[(i, j)]`` is the coefficient of target generator ``i`` in the
    image of source generator ``j``; its degree must be
    ``source.twists[j] - target.twists[i]``.
    """

    __slots__ = ("source", "target", "entries")

    def __init__(self, source: FreeGradedModule, target: FreeGradedModule, entries: dict):
        clean = {}
        for (i, j), poly in entries.items():
            if poly.is_zero():
                continue
            want = source.twists[j] - target.twists[i]
            if poly.degree != want:
                raise DegreeMismatch(
                    f"entry ({i},{j}) = {poly} has degree {poly.degree}, map needs {want}"
                )
            clean[(i, j)] = poly
        self.source = source
        self.target = target
        self.entries = clean

    @property
    def shape(self) -> tuple[int, int]:
        return (self.target.rank, self.source.rank)

    @property
    def ring(self) -> WeightedRing:
        return self.source.ring

    @classmethod
    def zero(cls, source, target) -> "HomogeneousMap":
        return cls(source, target, {})

    @classmethod
    def identity(cls, mod: FreeGradedModule) -> "HomogeneousMap":
        one = mod.ring.one()
        return cls(mod, mod, {(i, i): one for i in range(mod.rank)})

    @classmethod
    def from_matrix(cls, source, target, rows: Sequence[Sequence[HomPoly]]) -> "HomogeneousMap":
        return cls(source, target, {(i, j): p for i, row in enumerate(rows) for j, p in enumerate(row)})

    @classmethod
    def from_action(
        cls,
        source: FreeGradedModule,
        target: FreeGradedModule,
        action: Callable[[Hashable], Iterable[tuple[Hashable, HomPoly]]],
    ) -> "HomogeneousMap":
        """Build from ``action(source_label) -> [(target_label, coefficient), ...]``."""
        acc: dict = {}
        for j, lab in enumerate(source.labels):
            for tlab, coeff in action(lab):
                if coeff.is_zero():
                    continue
                key = (target.index(tlab), j)
                prev = acc.get(key)
                acc[key] = coeff if prev is None else prev + coeff
        return cls(source, target, acc)

    def entry(self, i: int, j: int) -> HomPoly:
        return self.entries.get((i, j), HomPoly.zero(self.ring, self.source.twists[j] - self.target.twists[i]))

    def matrix(self) -> list[list[HomPoly]]:
        return [[self.entry(i, j) for j in range(self.source.rank)] for i in range(self.target.rank)]

    def __matmul__(self, other: "HomogeneousMap") -> "HomogeneousMap":
        """Composite ``self ∘ other``."""
        if other.target != self.source:
            raise ValidationError("composition of maps with mismatched modules")
        by_row: dict[int, list] = {}
        for (k, j), p in other.entries.items():
            by_row.setdefault(k, []).append((j, p))
        acc: dict = {}
        for (i, k), p in self.entries.items():
            for j, q in by_row.get(k, ()):
                prod = p * q
                prev = acc.get((i, j))
                acc[(i, j)] = prod if prev is None else prev + prod
        return HomogeneousMap(other.source, self.target, acc)

    def __neg__(self) -> "HomogeneousMap":
        return HomogeneousMap(self.source, self.target, {k: -p for k, p in self.entries.items()})

    def scaled(self, c: int) -> "HomogeneousMap":
        if c == 1:
            return self
        return HomogeneousMap(self.source, self.target, {k: p.scale(c) for k, p in self.entries.items()})

    def __add__(self, other: "HomogeneousMap") -> "HomogeneousMap":
        acc = dict(self.entries)
        for k, p in other.entries.items():
            acc[k] = acc[k] + p if k in acc else p
        return HomogeneousMap(self.source, self.target, acc)

    def is_zero(self, modulo_relations: bool = True) -> bool:
        if not modulo_relations:
            return not self.entries
        return all(self.ring.is_zero_in_ring(p) for p in self.entries.values())

    def first_nonzero_entry(self):
        for k, p in sorted(self.entries.items()):
            if not self.ring.is_zero_in_ring(p):
                return k, p
        return None

    def slice(self, d: int) -> ExactMatrix:
        """Degree-``d`` slice: matrix from ``source_d`` to ``target_d`` in ring-slice coordinates."""
        ring = self.ring
        field = ring.field
        soffs, sdim = self.source.offsets(d)
        toffs, tdim = self.target.offsets(d)
        if field.kind == "fp":
            out = np.zeros((tdim, sdim), dtype=np.int64)
        else:
            from fractions import Fraction

            out = np.full((tdim, sdim), Fraction(0), dtype=object)
        sw, tw = self.source.twists, self.target.twists
        for (i, j), p in self.entries.items():
            e = d - sw[j]
            if ring.dim(e) == 0 or ring.dim(d - tw[i]) == 0:
                continue
            block = ring.mult_matrix(p, e)
            r0, c0 = toffs[i], soffs[j]
            out[r0 : r0 + block.shape[0], c0 : c0 + block.shape[1]] += block
        if field.kind == "fp":
            out %= field.p
        return ExactMatrix(field, out, _trusted=True)

    def __repr__(self):
        return f"HomogeneousMap({self.source.rank} -> {self.target.rank}, {len(self.entries)} entries)"


# label-level actions ----------------------------------------------------


def contract_label(subset: tuple, u: Sequence[HomPoly]) -> list[tuple[tuple, HomPoly]]:
    """``g_subset ← u`` as a list of (subset, coefficient)."""
    out = []
    for pos, i in enumerate(subset):
        c = u[i]
        if c.is_zero():
            continue
        out.append((subset[:pos] + subset[pos + 1 :], c if pos % 2 == 0 else -c))
    return out


def wedge_label(v: Sequence[HomPoly], subset: tuple) -> list[tuple[tuple, HomPoly]]:
    """``(Σ v_i g_i) ∧ g_subset`` as a list of (subset, coefficient)."""
    out = []
    for i, c in enumerate(v):
        if c.is_zero() or i in subset:
            continue
        before = sum(1 for x in subset if x < i)
        merged = tuple(sorted(subset + (i,)))
        out.append((merged, c if before % 2 == 0 else -c))
    return out


def _combine_terms(terms: Iterable[tuple[Hashable, HomPoly]]) -> dict:
    acc: dict = {}
    for lab, c in terms:
        prev = acc.get(lab)
        acc[lab] = c if prev is None else prev + c
    return {k: v for k, v in acc.items() if not v.is_zero()}


def full_contract_label(subset: tuple, us: Sequence[Sequence[HomPoly]], one: HomPoly) -> dict:
    """``g_subset ← (u_1 ∧ … ∧ u_p)``, applying ``u_1`` first."""
    current = {subset: one}
    for u in us:
        current = _combine_terms(
            (lab, coeff * c) for s, coeff in current.items() for lab, c in contract_label(s, u)
        )
    return current


def left_wedge_all(vs: Sequence[Sequence[HomPoly]], subset: tuple, one: HomPoly) -> dict:
    """``v_1 ∧ … ∧ v_l ∧ g_subset``; ``v_l`` is wedged on first."""
    current = {subset: one}
    for v in reversed(vs):
        current = _combine_terms(
            (lab, c * coeff) for s, coeff in current.items() for lab, c in wedge_label(v, s)
        )
    return current


def functional_shift(g_module: FreeGradedModule, u: Sequence[HomPoly]) -> int:
    """The constant ``twist(g_i) - deg u_i`` over nonzero entries of ``u``."""
    if len(u) != g_module.rank:
        raise DegreeMismatch(f"functional has {len(u)} entries, module rank is {g_module.rank}")
    shifts = {g_module.twists[i] - c.degree for i, c in enumerate(u) if not c.is_zero()}
    if len(shifts) > 1:
        raise DegreeMismatch("functional is not homogeneous: entries have incompatible degrees")
    return shifts.pop() if shifts else 0


# public structure maps --------------------------------------------------


def single_contraction(g_module: FreeGradedModule, k: int, dual_elem: Sequence[HomPoly]) -> HomogeneousMap:
    """Right multiplication ``Λ^k G -> Λ^{k-1} G`` by one homogeneous functional.

    The target is twisted so that the map has degree 0.
    """
    e = functional_shift(g_module, dual_elem)
    src = exterior_power(g_module, k)
    dst = exterior_power(g_module, k - 1).shifted(e)
    return HomogeneousMap.from_action(src, dst, lambda lab: contract_label(lab, dual_elem))


def full_contraction(g_module: FreeGradedModule, k: int, dual_elems: Sequence[Sequence[HomPoly]]) -> HomogeneousMap:
    """Right multiplication ``Λ^k G -> Λ^{k-p} G`` by ``u_1 ∧ … ∧ u_p``."""
    shift = sum(functional_shift(g_module, u) for u in dual_elems)
    src = exterior_power(g_module, k)
    dst = exterior_power(g_module, k - len(dual_elems)).shifted(shift)
    one = g_module.ring.one()
    return HomogeneousMap.from_action(
        src, dst, lambda lab: full_contract_label(lab, dual_elems, one).items()
    )


def map_rows(m: HomogeneousMap) -> list[list[HomPoly]]:
    return m.matrix()


def map_columns(m: HomogeneousMap) -> list[list[HomPoly]]:
    mat = m.matrix()
    return [[mat[i][j] for i in range(m.target.rank)] for j in range(m.source.rank)]


def _plus(ms: tuple, j: int) -> tuple:
    return tuple(sorted(ms + (j,)))


def _minus(ms: tuple, j: int) -> tuple | None:
    if j not in ms:
        return None
    pos = ms.index(j)
    return ms[:pos] + ms[pos + 1 :]


def koszul_boundary(psi: HomogeneousMap, q: int, p: int, side: str = "plain") -> HomogeneousMap:
    """``∂_ψ`` on ``Λ^q G ⊗ S_p(F)`` (plain) or ``Λ^q G ⊗ S_p(F)*`` (dualized).

    Plain: ``g_I ⊗ f^α -> Σ_j (g_I ← ψ*(f_j*)) ⊗ f^α f_j``.
    Dualized: ``g_I ⊗ (f^α)* -> Σ_{j ∈ α} (g_I ← ψ*(f_j*)) ⊗ (f^{α - e_j})*``,
    the transpose of multiplication by ``f_j`` on the symmetric side.
    """
    G, F = psi.source, psi.target
    rows = map_rows(psi)
    if side == "plain":
        src = tensor(exterior_power(G, q), symmetric_power(F, p))
        dst = tensor(exterior_power(G, q - 1), symmetric_power(F, p + 1))

        def action(lab):
            subset, alpha = lab
            for j, u in enumerate(rows):
                for s, c in contract_label(subset, u):
                    yield (s, _plus(alpha, j)), c

    elif side == "dualized":
        src = tensor(exterior_power(G, q), graded_dual(symmetric_power(F, p)))
        dst = tensor(exterior_power(G, q - 1), graded_dual(symmetric_power(F, p - 1)))

        def action(lab):
            subset, alpha = lab
            for j in sorted(set(alpha)):
                rest = _minus(alpha, j)
                for s, c in contract_label(subset, rows[j]):
                    yield (s, rest), c

    else:
        raise ValueError(f"side must be 'plain' or 'dualized', got {side!r}")
    return HomogeneousMap.from_action(src, dst, action)


def wedge_boundary(phi: HomogeneousMap, k: int, q: int, side: str = "D") -> HomogeneousMap:
    """``d_φ``: left multiplication by ``φ``.

    ``side="D"``: ``D_k(H) ⊗ Λ^q G -> D_{k-1}(H) ⊗ Λ^{q+1} G``,
    ``h^(α) ⊗ y -> Σ_{j ∈ α} h^(α - e_j) ⊗ φ(h_j) ∧ y``.
    ``side="S"``: ``S_k(H*) ⊗ Λ^q G -> S_{k+1}(H*) ⊗ Λ^{q+1} G``,
    ``β ⊗ y -> Σ_j h_j* β ⊗ φ(h_j) ∧ y``.
    """
    H, G = phi.source, phi.target
    cols = map_columns(phi)
    if side == "D":
        src = tensor(divided_power(H, k), exterior_power(G, q))
        dst = tensor(divided_power(H, k - 1), exterior_power(G, q + 1))

        def action(lab):
            alpha, subset = lab
            for j in sorted(set(alpha)):
                rest = _minus(alpha, j)
                for s, c in wedge_label(cols[j], subset):
                    yield (rest, s), c

    elif side == "S":
        Hd = graded_dual(H)
        shift = -sum(H.twists)
        src = tensor(symmetric_power(Hd, k), exterior_power(G, q)).shifted(shift)
        dst = tensor(symmetric_power(Hd, k + 1), exterior_power(G, q + 1)).shifted(shift)

        def action(lab):
            beta, subset = lab
            for j, v in enumerate(cols):
                for s, c in wedge_label(v, subset):
                    yield (_plus(beta, j), s), c

    else:
        raise ValueError(f"side must be 'D' or 'S', got {side!r}")
    return HomogeneousMap.from_action(src, dst, action)


def splice_nu(m: HomogeneousMap, t: int, kind: str = "psi") -> HomogeneousMap:
    """The splicing maps.

    ``kind="psi"``: ``ν_ψ: Λ^{t+m} G ⊗ S_0(F)* -> Λ^t G ⊗ S_0(F)``, right
    multiplication by ``ψ*(f_1*) ∧ … ∧ ψ*(f_m*)``.
    ``kind="phi"``: ``ν^φ: D_0(H) ⊗ Λ^t G -> S_0(H*) ⊗ Λ^{t+l} G``, left
    multiplication by ``φ(h_1) ∧ … ∧ φ(h_l)``.
    Both are returned on plain exterior powers, twisted to degree 0.
    """
    one = m.ring.one()
    if kind == "psi":
        G, F = m.source, m.target
        rows = map_rows(m)
        src = exterior_power(G, t + F.rank).shifted(-sum(F.twists))
        dst = exterior_power(G, t)
        return HomogeneousMap.from_action(src, dst, lambda lab: full_contract_label(lab, rows, one).items())
    if kind == "phi":
        H, G = m.source, m.target
        cols = map_columns(m)
        src = exterior_power(G, t)
        dst = exterior_power(G, t + H.rank).shifted(-sum(H.twists))
        return HomogeneousMap.from_action(src, dst, lambda lab: left_wedge_all(cols, lab, one).items())
    raise ValueError(f"kind must be 'psi' or 'phi', got {kind!r}")
