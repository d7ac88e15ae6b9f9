"""One line per acceptance criterion: verdict, exact tolerance, runtime against its budget.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines; they are
also written through ``capsys.disabled`` so a plain ``pytest`` run shows them.
"""

import time

import pytest

from genkoszul.cli import main
from genkoszul.homology import TRUNCATED
from genkoszul.scenario import load_scenario
from genkoszul.suites import FAIL, PASS, SKIP, UNRESOLVED, CANDIDATE, CONSISTENT, Workbench, run_suites

TOL = "tolerance 0 (exact integer lengths)"


@pytest.fixture
def announce(capsys):
    def emit(n, problems, elapsed, budget, what):
        problems = list(problems)
        if elapsed >= budget:
            problems.append(f"runtime {elapsed:.1f}s over budget {budget}s")
        verdict = "PASS" if not problems else "FAIL"
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {verdict}: {what}; {TOL}; {elapsed:.2f}s < {budget}s"
                  + ("" if not problems else " | " + "; ".join(problems)))
        assert not problems

    return emit


def by_id(checks):
    return {c.id: c for c in checks}


def value(check, side="lhs"):
    return getattr(check, side).get("value")


def lengths_of_S(sc, upto):
    wb = Workbench(sc)
    return [wb.S(i).value for i in range(upto + 1)]


def test_criterion_1_cusp(announce):
    t0 = time.time()
    problems = []
    for field in ("fp:32003", "q"):
        sc = load_scenario("cusp", field_override=field)
        checks = run_suites(sc, ["euler", "thm21", "thm31", "cor33", "icis"])
        bad = [c.id for c in checks if c.verdict in (FAIL, UNRESOLVED)]
        if bad:
            problems.append(f"{field}: {bad}")
        if lengths_of_S(sc, 1) != [2, 2]:
            problems.append(f"{field}: S lengths {lengths_of_S(sc, 1)}")
        got = by_id(checks)
        # r = 1: H^0 and H^1 of C_psi_bar(r) vanish, H^2 has length l(S_1(C)) = 2
        bar = [value(got[k]) for k in ("icis/bar-low[i=0]", "icis/bar-low[i=1]", "icis/bar-top")]
        if bar != [0, 0, 2]:
            problems.append(f"{field}: bar lengths {bar}")
    announce(1, problems, time.time() - t0, 5, "cusp over F_32003 and Q: all suites pass, l(S_0)=l(S_1)=2, H^0=H^1=0, l(H^2)=2")


def test_criterion_2_fermat3(announce):
    t0 = time.time()
    sc = load_scenario("fermat3", bound=11)
    got = by_id(run_suites(sc, ["icis"]))
    problems = []
    if lengths_of_S(sc, 2) != [8, 8, 8]:
        problems.append(f"S lengths {lengths_of_S(sc, 2)}")
    for i in (0, 1):
        c = got[f"icis/top-homology[i={i}]"]
        if c.verdict != PASS:
            problems.append(f"{c.id} {c.verdict}")
    bar = [c for k, c in got.items() if k.startswith("icis/bar-")]
    if not bar or any(c.verdict != PASS for c in bar) or "icis/bar-even" not in got:
        problems.append("bar clauses: " + str({c.id: c.verdict for c in bar}))
    probe = got["icis/conjecture"]
    if probe.verdict not in (CONSISTENT, CANDIDATE) or not probe.lhs.get("lengths"):
        problems.append(f"probe {probe.verdict}")
    announce(2, problems, time.time() - t0, 60, "fermat3 B=11: l(S_i)=8, top homology i=0,1, bar clauses with H^2=0, probe reported")


def test_criterion_3_fermat4(announce):
    t0 = time.time()
    sc = load_scenario("fermat4", bound=14)
    got = by_id(run_suites(sc, ["thm31", "cor33"]))
    problems = []
    if lengths_of_S(sc, 3) != [16, 16, 16, 16]:
        problems.append(f"S lengths {lengths_of_S(sc, 3)}")
    a = [c for k, c in got.items() if k.startswith("thm31/a[") and c.params.get("i") == 1]
    if not a or any(c.verdict != PASS for c in a):
        problems.append("thm31 a: " + str({c.id: c.verdict for c in a}))
    b = got.get("cor33/b[t=0]")
    if b is None or b.verdict != PASS:
        problems.append(f"cor33/b[t=0] {None if b is None else b.verdict}")
    announce(3, problems, time.time() - t0, 600, "fermat4 B=14: difference identity at i=1, alternating sum at t=0, l(S_i)=16")


def test_criterion_4_ci_curve(announce):
    t0 = time.time()
    sc = load_scenario("ci-curve")
    problems = []
    certs = sc.certificates
    if certs["complete_intersection"]["verdict"] != "pass" or not certs["isolated_singularity"]["colength"]:
        problems.append(f"certificates {certs}")
    if any(g["source"] != "certified" for g in sc.describe()["grades"].values()):
        problems.append(f"grades {sc.describe()['grades']}")
    got = by_id(run_suites(sc, ["icis"]))
    c = got["icis/equal-lengths[i=1]"]
    if c.verdict != PASS or value(c) != value(c, "rhs"):
        problems.append(f"{c.id} {c.verdict}")
    announce(4, problems, time.time() - t0, 60, "ci-curve certified at load; l(S_0)=l(S_1) from disjoint code paths")


def test_criterion_5_classical_koszul(announce):
    t0 = time.time()
    problems = []
    sc = load_scenario("koszul3", t_range=(0, 2), bound=8)
    checks = run_suites(sc, ["thm21"])
    for c in checks:
        if c.id.startswith("thm21/C/") and c.verdict != PASS:
            problems.append(f"{c.id} {c.verdict}")
    res = {c.params["t"] for c in checks if c.id.startswith("thm21/C/resolution") and c.verdict == PASS}
    if res != {0, 1, 2}:
        problems.append(f"resolutions at t={sorted(res)}")
    low = [c for c in checks if c.id.startswith("thm21/C/vanishing")]
    if {c.params["i"] for c in low} != {0, 1, 2}:
        problems.append("vanishing not checked for i < 3")
    split = [c for c in run_suites(load_scenario("unit-koszul"), ["thm21"]) if "split" in c.id]
    if not split or any(c.verdict != PASS for c in split):
        problems.append("unit-entry split exactness")
    announce(5, problems, time.time() - t0, 5, "koszul3 acyclic below 3 and resolving S_t, t=0,1,2, degrees <= 8; unit entry split")


def test_criterion_6_property_suites(announce):
    import test_complexes as tc
    import test_homology as th
    import test_linalg as tl
    import test_multilinear as tm

    t0 = time.time()
    runs = []
    for preset in tc.GRID_PRESETS:
        runs.append((f"d∘d=0 {preset}", lambda p=preset: tc.test_every_factory_output_validates(p)))
        runs.append((f"anticommute {preset}", lambda p=preset: tc.test_bicomplex_squares_anticommute_exhaustively(p)))
    for n in range(1, 6):
        runs.append((f"contraction n={n}", lambda n=n: tm.test_full_contraction_is_iterated_single_contractions(n)))
        runs.append((f"determinant n={n}", lambda n=n: tm.test_full_contraction_matches_determinant_on_basis_functionals(n)))
    for preset in ("cusp", "fermat3", "ci-curve", "koszul3"):
        runs.append((f"homogeneity {preset}", lambda p=preset: tm.test_entry_degree_homogeneity_on_bicomplex_maps(p)))
    runs.append(("weighted homogeneity", tm.test_weighted_contraction_is_degree_zero))
    runs.append(("chart independence", th.test_homology_lengths_invariant_under_base_change))
    runs.append(("slice base change", th.test_homology_dim_invariant_under_slice_base_change))
    runs.append(("rank oracle F_p", tl.test_rank_matches_minor_oracle_fp))
    runs.append(("rank oracle Q", tl.test_rank_matches_minor_oracle_q))
    runs.append(("rref oracle", tl.test_rref_pivots_match_minor_oracle))
    problems = []
    for name, fn in runs:
        try:
            fn()
        except Exception as exc:  # collected, reported on the criterion line
            problems.append(f"{name}: {type(exc).__name__}")
    announce(6, problems, time.time() - t0, 600, f"{len(runs)} property groups with zero failures")


def test_criterion_7_truncation_is_unresolved(announce, capsys):
    t0 = time.time()
    problems = []
    sc = load_scenario("fermat3", bound=3)
    checks = run_suites(sc, ["icis"])
    leaked = [c.id for c in checks if TRUNCATED in c.statuses and c.verdict in (PASS, SKIP)]
    if leaked:
        problems.append(f"truncated checks passed: {leaked}")
    if not any(c.verdict == UNRESOLVED for c in checks):
        problems.append("no UNRESOLVED check")
    code = main(["fermat3", "--bound", "3", "--suite", "icis", "--report", "json", "--out", "-"])
    capsys.readouterr()
    if code != 2:
        problems.append(f"exit status {code}")
    announce(7, problems, time.time() - t0, 60, "fermat3 --bound 3: truncated tables give UNRESOLVED and exit 2")
