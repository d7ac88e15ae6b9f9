"""Scenario ingestion: ring, the maps χ and λ, grades, and run parameters.

A scenario is a JSON document (or a preset name) with fields

    name, field ("fp:<p>" or "q"), vars, weights, relations,
    chi (n x m rows of polynomial strings, χ: 𝓕 -> 𝓖),
    lambda (l x n, λ: 𝓖 -> 𝓗), icis (bool), twists ({"F","G","H"}),
    t_range ([lo, hi]), bound, window, declared_grades ({"g", "h"}).

With ``icis`` set, χ is the Jacobian block (∂p_j/∂x_i) and λ the Euler row
(a_1 x_1, …, a_n x_n); ``chi``/``lambda`` must then be omitted.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Any

from .complexes import dualize
from .errors import ParseError, ValidationError
from .homology import GradeCertificate, default_bound, finite_colength
from .linalg import PrimeField, parse_field
from .multilinear import FreeGradedModule, HomogeneousMap
from .presentations import maximal_minors, minors
from .ring import HomPoly, WeightedRing

INF = math.inf


@dataclass
class Grade:
    value: float | int | None  # math.inf for the unit ideal, None when unknown
    source: str  # "certified", "declared" or "unknown"
    certificate: GradeCertificate | None = None

    @property
    def known(self) -> bool:
        return self.value is not None

    def as_dict(self) -> dict:
        v = self.value
        return {
            "value": "inf" if v == INF else v,
            "source": self.source,
            "certificate": self.certificate.as_dict() if self.certificate else None,
        }


@dataclass
class Scenario:
    name: str
    ring: WeightedRing
    chi: HomogeneousMap
    lam: HomogeneousMap
    icis: bool = False
    t_range: tuple[int, int] = (-1, 2)
    bound: int | None = None
    window: int | None = None
    declared: dict = field(default_factory=dict)
    spec: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)

    def __post_init__(self):
        self.psi = dualize(self.chi)
        self.phi = dualize(self.lam)
        self._grades: dict = {}

    @property
    def n(self) -> int:
        return self.chi.target.rank

    @property
    def m(self) -> int:
        return self.chi.source.rank

    @property
    def l(self) -> int:
        return self.lam.target.rank

    @property
    def r(self) -> int:
        return self.n - self.m

    @property
    def s(self) -> int:
        return self.n - self.l

    @property
    def rho(self) -> int:
        return self.r - self.l

    @property
    def dim_R(self) -> int:
        return self.ring.nvars - len(self.ring.relations)

    @property
    def effective_bound(self) -> int:
        return default_bound(self.ring) if self.bound is None else self.bound

    def ts(self) -> range:
        return range(self.t_range[0], self.t_range[1] + 1)

    def _grade(self, key: str, gens: list[HomPoly], description: str) -> Grade:
        if key in self._grades:
            return self._grades[key]
        cert = finite_colength(self.ring, gens, description)
        if cert.verdict == "unit":
            g = Grade(INF, "certified", cert)
        elif cert.verdict == "finite-colength":
            g = Grade(self.dim_R, "certified", cert)
        elif key in self.declared:
            v = self.declared[key]
            g = Grade(INF if v in ("inf", INF) else int(v), "declared", cert)
        else:
            g = Grade(None, "unknown", cert)
        self._grades[key] = g
        return g

    @property
    def g(self) -> Grade:
        """Grade of ``I_ψ`` (maximal minors of χ)."""
        return self._grade("g", maximal_minors(self.psi), "I_psi (maximal minors of chi)")

    @property
    def h(self) -> Grade:
        """Grade of ``I_φ`` (maximal minors of λ)."""
        return self._grade("h", maximal_minors(self.phi), "I_phi (maximal minors of lambda)")

    def minor_grade(self, which: str, k: int) -> Grade:
        """Grade of the ideal of ``k x k`` minors of ψ or φ."""
        f = self.psi if which == "psi" else self.phi
        gens = minors(f.matrix(), k, self.ring)
        return self._grade(f"I_{k}({which})", gens, f"I_{k}({which})")

    def describe(self) -> dict:
        return {
            "name": self.name,
            "field": self.ring.field.descriptor,
            "vars": list(self.ring.variables),
            "weights": list(self.ring.weights.weights),
            "relations": [str(p) for p in self.ring.relations],
            "icis": self.icis,
            "ranks": {"n": self.n, "m": self.m, "l": self.l, "r": self.r, "s": self.s, "rho": self.rho},
            "chi": [[str(p) for p in row] for row in self.chi.matrix()],
            "lambda": [[str(p) for p in row] for row in self.lam.matrix()],
            "twists": {
                "F": list(self.chi.source.twists),
                "G": list(self.chi.target.twists),
                "H": list(self.lam.target.twists),
            },
            "t_range": list(self.t_range),
            "bound": self.effective_bound,
            "window": self.window if self.window is not None else self.ring.max_weight,
            "grades": {"g": self.g.as_dict(), "h": self.h.as_dict()},
            "certificates": {k: v for k, v in self.certificates.items()},
        }


# presets -------------------------------------------------------------------

PRESETS: dict[str, dict] = {
    "cusp": {"preset": "brieskorn:x^3+y^2"},
    "fermat3": {"preset": "brieskorn:x^3+y^3+z^3", "t_range": [-1, 2]},
    "fermat4": {"preset": "brieskorn:x^3+y^3+z^3+w^3", "t_range": [-1, 3]},
    "ci-curve": {
        "name": "ci-curve",
        "vars": ["x", "y", "z"],
        "weights": [1, 1, 1],
        "relations": ["x^2+y^2+z^2", "x*y"],
        "icis": True,
        "t_range": [-1, 1],
    },
    "ci-surface": {
        "name": "ci-surface",
        "vars": ["x", "y", "z", "w"],
        "weights": [1, 1, 1, 1],
        "relations": ["x^2+y^2+z^2+w^2", "x^2+2*y^2+3*z^2+4*w^2"],
        "icis": True,
        "t_range": [-1, 2],
    },
    "koszul3": {
        "name": "koszul3",
        "vars": ["x", "y", "z"],
        "weights": [1, 1, 1],
        "relations": [],
        "chi": [["x"], ["y"], ["z"]],
        "lambda": [],
        "t_range": [-1, 2],
        "bound": 8,
    },
    "unit-koszul": {
        "name": "unit-koszul",
        "vars": ["x", "y"],
        "weights": [1, 1],
        "relations": [],
        "chi": [["1"], ["x"], ["y"]],
        "lambda": [],
        "t_range": [-1, 2],
        "bound": 8,
    },
}


def brieskorn_spec(text: str) -> dict:
    """``x^a+y^b+...`` (pure powers, coefficient 1) with weights ``L/e_i``."""
    body = text.split(":", 1)[1] if ":" in text else text
    names, exps = [], []
    for part in body.replace(" ", "").split("+"):
        if "^" not in part:
            raise ParseError(f"brieskorn term {part!r} must look like x^e")
        v, e = part.split("^", 1)
        if not v.isidentifier() or not e.isdigit() or int(e) < 2:
            raise ParseError(f"brieskorn term {part!r} must look like x^e with e >= 2")
        names.append(v)
        exps.append(int(e))
    if len(set(names)) != len(names):
        raise ParseError("brieskorn variables must be distinct")
    L = reduce(lambda a, b: a * b // math.gcd(a, b), exps)
    weights = [L // e for e in exps]
    g = reduce(math.gcd, weights)
    weights = [w // g for w in weights]
    return {
        "name": f"brieskorn:{body}",
        "vars": names,
        "weights": weights,
        "relations": [body],
        "icis": True,
        "t_range": [-1, len(names) - 1],
    }


def resolve_spec(source: str | dict) -> dict:
    """Turn a preset name, a brieskorn string or a JSON path into a spec dict."""
    if isinstance(source, dict):
        spec = dict(source)
    elif source in PRESETS:
        spec = dict(PRESETS[source])
        spec.setdefault("name", source)
    elif str(source).startswith("brieskorn:"):
        spec = brieskorn_spec(source)
    elif os.path.exists(source):
        try:
            with open(source, encoding="utf-8") as fh:
                spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{source}: invalid JSON ({exc})") from None
        if not isinstance(spec, dict):
            raise ParseError(f"{source}: scenario must be a JSON object")
        spec.setdefault("name", os.path.splitext(os.path.basename(source))[0])
    else:
        raise ParseError(f"no scenario file or preset named {source!r}")
    if "preset" in spec:
        base = resolve_spec(spec.pop("preset"))
        name = spec.pop("name", None)
        base.update(spec)
        if name:
            base["name"] = name
        spec = base
    return spec


def load_scenario(source: str | dict, field_override: str | None = None, bound: int | None = None,
                  window: int | None = None, t_range: tuple[int, int] | None = None) -> Scenario:
    spec = resolve_spec(source)
    if field_override:
        spec["field"] = field_override
    if bound is not None:
        spec["bound"] = bound
    if window is not None:
        spec["window"] = window
    if t_range is not None:
        spec["t_range"] = list(t_range)
    return build_scenario(spec)


def _require(spec: dict, key: str):
    if key not in spec:
        raise ValidationError(f"scenario is missing field {key!r}")
    return spec[key]


def build_scenario(spec: dict) -> Scenario:
    try:
        field = parse_field(str(spec.get("field", "fp:32003")))
    except ValueError as exc:
        raise ValidationError(f"field: {exc}") from None
    variables = list(_require(spec, "vars"))
    weights = [int(a) for a in _require(spec, "weights")]
    if len(weights) != len(variables):
        raise ValidationError("weights: need one weight per variable")
    if any(a < 1 for a in weights):
        raise ValidationError("weights: must be positive")
    relations = spec.get("relations", []) or []
    ring = WeightedRing(variables, weights, field, relations)
    _check_characteristic(ring, field)
    icis = bool(spec.get("icis", False))
    certificates: dict[str, Any] = {}

    if icis:
        if "chi" in spec or "lambda" in spec:
            raise ValidationError("icis scenarios derive chi and lambda; do not give them")
        chi, lam = _icis_maps(ring)
        _check_icis(ring, field, certificates, int(spec.get("bound") or default_bound(ring)))
    else:
        chi_rows = _require(spec, "chi")
        lam_rows = spec.get("lambda", []) or []
        chi, lam = _explicit_maps(ring, chi_rows, lam_rows, spec.get("twists"))
        if ring.relations:
            upto = int(spec.get("bound") or default_bound(ring))
            ok = ring.is_complete_intersection(upto)
            certificates["complete_intersection"] = {"verdict": "pass" if ok else "fail", "checked_up_to": upto}

    if not (lam @ chi).is_zero():
        bad = (lam @ chi).first_nonzero_entry()
        raise ValidationError(f"lambda o chi must vanish in R; entry {bad[0]} is {bad[1]}")
    if chi.target.rank < chi.source.rank:
        raise ValidationError("r = n - m must be nonnegative")
    if lam.target.rank > chi.target.rank:
        raise ValidationError("s = n - l must be nonnegative")

    t_range = spec.get("t_range", [-1, 2])
    if len(t_range) != 2 or int(t_range[0]) > int(t_range[1]):
        raise ValidationError("t_range must be [lo, hi] with lo <= hi")
    declared = dict(spec.get("declared_grades", {}) or {})
    return Scenario(
        name=str(spec.get("name", "scenario")),
        ring=ring,
        chi=chi,
        lam=lam,
        icis=icis,
        t_range=(int(t_range[0]), int(t_range[1])),
        bound=int(spec["bound"]) if spec.get("bound") is not None else None,
        window=int(spec["window"]) if spec.get("window") is not None else None,
        declared=declared,
        spec=spec,
        certificates=certificates,
    )


def _check_characteristic(ring: WeightedRing, field) -> None:
    if isinstance(field, PrimeField):
        for v in list(ring.weights.weights) + list(ring.relation_degrees):
            if v % field.p == 0 or v >= field.p:
                raise ValidationError(
                    f"characteristic {field.p} must exceed and not divide every weight and relation degree (found {v})"
                )


def _icis_maps(ring: WeightedRing) -> tuple[HomogeneousMap, HomogeneousMap]:
    a = ring.weights.weights
    b = ring.relation_degrees
    cF = FreeGradedModule(ring, tuple(range(len(b))), tuple(b))
    cG = FreeGradedModule(ring, tuple(range(len(a))), tuple(a))
    cH = FreeGradedModule(ring, (0,), (0,))
    chi = HomogeneousMap(cF, cG, {(i, j): p.derivative(i) for j, p in enumerate(ring.relations) for i in range(len(a))})
    lam = HomogeneousMap(cG, cH, {(0, i): ring.var(i).scale(a[i]) for i in range(len(a))})
    return chi, lam


def _check_icis(ring: WeightedRing, field, certificates: dict, upto: int) -> None:
    if not ring.relations:
        raise ValidationError("icis scenarios need at least one relation")
    if len(ring.relations) >= ring.nvars:
        raise ValidationError("icis scenarios need fewer relations than variables")
    for p in ring.relations:
        if any(sum(m) < 2 for m in p.terms):
            raise ValidationError(f"icis relation {p} must lie in the square of the maximal ideal")
    ok = ring.is_complete_intersection(upto)
    certificates["complete_intersection"] = {"verdict": "pass" if ok else "fail", "checked_up_to": upto}
    if not ok:
        raise ValidationError("relations fail the complete-intersection Hilbert series test")
    chi, _ = _icis_maps(ring)
    cert = finite_colength(ring, maximal_minors(chi), "I_chi (Jacobian minors)")
    certificates["isolated_singularity"] = cert.as_dict()
    if not cert.finite:
        raise ValidationError("Jacobian minors do not have finite colength: singularity is not isolated")


def _parse_entry(ring: WeightedRing, text) -> HomPoly:
    if isinstance(text, (int, Fraction)):
        text = str(text)
    if not isinstance(text, str):
        raise ParseError(f"matrix entries must be strings or integers, got {text!r}")
    return ring.parse(text)


def _explicit_maps(ring: WeightedRing, chi_rows, lam_rows, twists: dict | None):
    chi_p = [[_parse_entry(ring, e) for e in row] for row in chi_rows]
    lam_p = [[_parse_entry(ring, e) for e in row] for row in lam_rows]
    n = len(chi_p)
    if n == 0:
        raise ValidationError("chi must have at least one row")
    m = len(chi_p[0])
    if any(len(row) != m for row in chi_p):
        raise ValidationError("chi rows must all have the same length")
    l = len(lam_p)
    if any(len(row) != n for row in lam_p):
        raise ValidationError("lambda must have n columns, one per row of chi")
    if twists:
        tF, tG, tH = list(twists.get("F", [])), list(twists.get("G", [])), list(twists.get("H", []))
        if (len(tF), len(tG), len(tH)) != (m, n, l):
            raise ValidationError("twists must list F (m), G (n) and H (l) values")
    else:
        tF, tG, tH = _infer_twists(chi_p, lam_p, m, n, l)
    cF = FreeGradedModule(ring, tuple(range(m)), tuple(tF))
    cG = FreeGradedModule(ring, tuple(range(n)), tuple(tG))
    cH = FreeGradedModule(ring, tuple(range(l)), tuple(tH))
    try:
        chi = HomogeneousMap(cF, cG, {(i, j): chi_p[i][j] for i in range(n) for j in range(m)})
        lam = HomogeneousMap(cG, cH, {(k, i): lam_p[k][i] for k in range(l) for i in range(n)})
    except ValueError as exc:
        raise ValidationError(f"maps are not degree-0 for the given twists: {exc}") from None
    return chi, lam


def _infer_twists(chi_p, lam_p, m: int, n: int, l: int):
    """Solve deg chi_ij = b_j - a_i and deg lam_ki = a_i - c_k by propagation."""
    nodes = [("F", j) for j in range(m)] + [("G", i) for i in range(n)] + [("H", k) for k in range(l)]
    edges: dict = {v: [] for v in nodes}
    for i in range(n):
        for j in range(m):
            p = chi_p[i][j]
            if not p.is_zero():
                edges[("F", j)].append((("G", i), -p.degree))
                edges[("G", i)].append((("F", j), p.degree))
    for k in range(l):
        for i in range(n):
            p = lam_p[k][i]
            if not p.is_zero():
                edges[("G", i)].append((("H", k), -p.degree))
                edges[("H", k)].append((("G", i), p.degree))
    value: dict = {}
    for root in nodes:
        if root in value:
            continue
        value[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for w, delta in edges[u]:
                want = value[u] + delta
                if w in value:
                    if value[w] != want:
                        raise ValidationError("matrix entries admit no consistent twists (non-homogeneous map)")
                else:
                    value[w] = want
                    stack.append(w)
    return ([value[("F", j)] for j in range(m)], [value[("G", i)] for i in range(n)],
            [value[("H", k)] for k in range(l)])


def euler_identity_holds(text: str, variables, weights) -> bool:
    """``b p = Σ a_i x_i ∂p/∂x_i`` for the weighted top degree ``b`` of ``p``.

    Works on arbitrary (possibly non-homogeneous) polynomials; used as a
    negative control for the quasi-homogeneity assumption.
    """
    from sympy import Poly, Symbol, expand
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    syms = [Symbol(v) for v in variables]
    expr = parse_expr(text, local_dict=dict(zip(variables, syms)),
                      transformations=standard_transformations + (convert_xor,))
    poly = Poly(expr, *syms)
    b = max(sum(e * a for e, a in zip(mono, weights)) for mono in poly.monoms())
    lhs = b * expr
    rhs = sum(a * s * expr.diff(s) for a, s in zip(weights, syms))
    return expand(lhs - rhs) == 0
