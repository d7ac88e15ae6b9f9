"""Direct presentations of the modules the complexes are compared against.

These constructions multiply in the symmetric algebra and wedge in the
exterior algebra, but never build a Koszul complex, so lengths read off
here are an independent route to the same numbers.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .complexes import PresentedModule, dualize
from .multilinear import (
    FreeGradedModule,
    HomogeneousMap,
    exterior_power,
    free_module,
    graded_dual,
    map_columns,
    symmetric_power,
    tensor,
    wedge_label,
)
from .ring import HomPoly, WeightedRing


def determinant(rows: Sequence[Sequence[HomPoly]], ring: WeightedRing) -> HomPoly:
    """Laplace expansion along the first row."""
    k = len(rows)
    if k == 0:
        return ring.one()
    if k == 1:
        return rows[0][0]
    total = None
    for j in range(k):
        c = rows[0][j]
        if c.is_zero():
            continue
        sub = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = c * determinant(sub, ring)
        if j % 2:
            term = -term
        if term.is_zero():
            continue
        total = term if total is None else total + term
    return total if total is not None else HomPoly.zero(ring)


def minors(matrix: Sequence[Sequence[HomPoly]], k: int, ring: WeightedRing) -> list[HomPoly]:
    """All nonzero ``k x k`` minors."""
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    if k == 0:
        return [ring.one()]
    out = []
    for rs in itertools.combinations(range(nrows), k):
        for cs in itertools.combinations(range(ncols), k):
            det = determinant([[matrix[i][j] for j in cs] for i in rs], ring)
            if not det.is_zero():
                out.append(det)
    return out


def maximal_minors(f: HomogeneousMap) -> list[HomPoly]:
    t, s = f.shape
    return minors(f.matrix(), min(t, s), f.ring)


def quotient_by_ideal(ring: WeightedRing, generators: Sequence[HomPoly], name: str = "R/I") -> PresentedModule:
    """``R/I`` as a cokernel of ``⊕ R(-deg g) -> R``."""
    gens = [g for g in generators if not g.is_zero()]
    target = free_module(ring, [0])
    if not gens:
        return PresentedModule(target, None, name)
    source = free_module(ring, [g.degree for g in gens])
    pres = HomogeneousMap(source, target, {(0, j): g for j, g in enumerate(gens)})
    return PresentedModule(target, pres, name)


def symmetric_power_of_cokernel(psi: HomogeneousMap, t: int) -> PresentedModule:
    """``S_t(Coker ψ)`` for ``ψ: G -> F``, with the conventions for ``t = 0, -1``.

    ``t >= 1``: ambient ``S_t(F)``, relations ``ψ(g) · f^α`` from
    ``G ⊗ S_{t-1}(F)``.  ``t = 0``: ``R/I_ψ`` (maximal minors).
    ``t = -1``: ``Λ^{r+1} Coker ψ*``.
    """
    ring = psi.ring
    if t == 0:
        return quotient_by_ideal(ring, maximal_minors(psi), "S_0(C)")
    if t == -1:
        r = psi.source.rank - psi.target.rank
        return exterior_power_of_cokernel(dualize(psi), r + 1, "S_-1(C)")
    if t < -1:
        raise ValueError("symmetric powers below -1 are not defined")
    G, F = psi.source, psi.target
    cols = map_columns(psi)
    target = symmetric_power(F, t)
    source = tensor(G, symmetric_power(F, t - 1))

    def action(lab):
        i, alpha = lab
        for j, c in enumerate(cols[i]):
            if not c.is_zero():
                yield tuple(sorted(alpha + (j,))), c

    pres = HomogeneousMap.from_action(source, target, action)
    return PresentedModule(target, pres if source.rank else None, f"S_{t}(C)")


def exterior_power_of_cokernel(f: HomogeneousMap, k: int, name: str = "") -> PresentedModule:
    """``Λ^k Coker(f: A -> B)``: ambient ``Λ^k B``, relations ``f(a) ∧ ω``."""
    A, B = f.source, f.target
    cols = map_columns(f)
    target = exterior_power(B, k)
    source = tensor(A, exterior_power(B, k - 1))

    def action(lab):
        a, subset = lab
        return wedge_label(cols[a], subset)

    pres = HomogeneousMap.from_action(source, target, action)
    return PresentedModule(target, pres if source.rank and pres.entries else None, name or f"wedge^{k} Coker")


def symmetric_power_of_dual_cokernel(phi: HomogeneousMap, p: int) -> PresentedModule:
    """``S_p(D)`` for ``D = Coker φ*``, with ``S_0(D) = R/I_φ`` and
    ``S_{-1}(D) = Λ^{s+1} Coker φ``."""
    ring = phi.ring
    if p == 0:
        return quotient_by_ideal(ring, maximal_minors(phi), "S_0(D)")
    if p == -1:
        s = phi.target.rank - phi.source.rank
        return exterior_power_of_cokernel(phi, s + 1, "S_-1(D)")
    mod = symmetric_power_of_cokernel(dualize(phi), p)
    return PresentedModule(mod.ambient, mod.presentation, f"S_{p}(D)")

