"""Acceptance gate: one printed pass or fail line per pinned criterion.

Run `pytest tests/test_acceptance.py -v -s` to watch the lines stream.  The
gate rebuilds everything from scratch in a temporary cache, so the stated
wall-clock budgets are asserted rather than just reported.  Two stretch
tests (the single-block value at m=11, the full relaxation at m=8 and 9)
take the better part of an hour and only run when CROSSINGS_STRETCH=1;
otherwise they print an honest SKIP line.  The even-rank expectation at
m=6 is provably unattainable and is kept as a strict xfail so the failure
stays on record without breaking the suite.
"""

import os
import time
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, permutations

import numpy as np
import pytest

from crossings.bounds import (
    asymptotic_ratio,
    knn_table,
    lift_bound,
    plain,
    quadratic_bound,
    rounded,
    truncated,
    zarankiewicz,
)
from crossings.coeffs import (
    PairTables,
    direct_expansion,
    hook_constraint_table,
    poly_method,
)
from crossings.cycles import Cycle, CycleIndex, act, canonical_form, stabilizer_elements
from crossings.orbits import orbit_census
from crossings.relaxations import (
    certify_single,
    exactly_psd,
    hook_tables,
    rank_report,
    run_full,
    run_single,
)
from crossings.repsets import build_blocks, hook_block_columns
from crossings.swapgraph import distances_from_base, distances_from_base_unpruned, self_cost

STRETCH = os.environ.get("CROSSINGS_STRETCH") == "1"

# Every target below is frozen by hand.  The gate must not read them from
# the library it is checking.

Q_DIAGONAL = {4: 2, 5: 4, 6: 6, 7: 9, 8: 12, 9: 16, 10: 20}

CENSUS = {
    4: (3, 3, 3),
    5: (8, 8, 7),
    6: (24, 20, 17),
    7: (108, 78, 56),
    8: (640, 380, 239),
    9: (4492, 2438, 1366),
    10: (36336, 18744, 9848),
}

BLOCK_DIMS = {
    4: {1: 3},
    5: {2: 1, 1: 4},
    6: {2: 3, 1: 8},
    7: {3: 6, 2: 4, 1: 8},
    8: {7: 2, 5: 2, 4: 9, 3: 7, 2: 4, 1: 9},
    9: {12: 8, 11: 2, 9: 6, 7: 3, 6: 5, 5: 2, 4: 2, 3: 16, 1: 5},
}

SINGLE_OPT = {
    4: "1.0000000000",
    5: "1.9270509831",
    6: "2.9519183588",
    7: "4.3107391257",
    8: "5.8284271247",
    9: "7.6527560430",
    10: "9.6866252078",
    11: "11.9987919703",
    12: "14.5115811776",
    13: "17.3135089904",
}

FULL_OPT = {
    4: "1.0000000000",
    5: "1.9472135954",
    6: "2.9519183588",
    7: "4.3593154948",
    8: "5.8599856417",
    9: "7.7352125975",
    10: "9.7411403685",
}

RATIO_SINGLE = {
    4: "0.6667", 5: "0.7708", 6: "0.7872", 7: "0.8210", 8: "0.8326",
    9: "0.8503", 10: "0.8610", 11: "0.8726", 12: "0.8794", 13: "0.8878",
}

RATIO_FULL = {
    4: "0.6667", 5: "0.7789", 6: "0.7872", 7: "0.8303", 8: "0.8371",
    9: "0.8595", 10: "0.8659",
}

QUADRATIC_COEFFS = {
    10: ("4.87057", "10"),
    11: ("5.99939", "12.5"),
    12: ("7.25579", "15"),
    13: ("8.65675", "18"),
}

LIFTED_COEFFS = {
    10: ("0.0541", "1/9"),
    11: ("0.0545", "5/44"),
    12: ("0.0549", "5/44"),
    13: ("0.0554", "3/26"),
}

BALANCED_BOUNDS = {10: 388, 11: 589, 12: 865, 13: 1229}

V5 = (0.5477225575051661, 0.3385111569432115)


def report(label, problems, detail):
    state = "FAIL" if problems else "PASS"
    text = "; ".join(problems) if problems else detail
    print(f"criterion {label}: {state} - {text}")
    assert not problems, text


@lru_cache(maxsize=None)
def _index(m):
    return CycleIndex(m)


@lru_cache(maxsize=None)
def _dist(m):
    return distances_from_base(_index(m))


@pytest.fixture(scope="module")
def store(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance-cache")


@pytest.fixture(scope="module")
def singles(store):
    outcomes, walls = {}, {}
    for m in range(4, 11):
        t0 = time.perf_counter()
        outcomes[m] = run_single(m, cache_dir=store)
        walls[m] = time.perf_counter() - t0
    return outcomes, walls


@pytest.fixture(scope="module")
def fulls(store):
    outcomes, walls = {}, {}
    for m in range(4, 8):
        t0 = time.perf_counter()
        outcomes[m] = run_full(m, cache_dir=store)
        walls[m] = time.perf_counter() - t0
    return outcomes, walls


def test_criterion_1_cost_diagonal():
    t0 = time.perf_counter()
    problems = []
    for m in range(4, 11):
        # relabeling carries every diagonal pair to (base, base), so one
        # entry checks the whole diagonal
        diag = int(_dist(m)[_index(m).id_of(Cycle.base(m).invert())])
        if diag != Q_DIAGONAL[m] or diag != self_cost(m):
            problems.append(f"m={m}: diagonal {diag}, want {Q_DIAGONAL[m]}")
    wall = time.perf_counter() - t0
    if wall > 60.0:
        problems.append(f"took {wall:.1f}s, budget 60s")
    report(1, problems,
           f"cost diagonal is floor((m-1)^2/4) for m=4..10 in {wall:.1f}s")


def test_criterion_2_orbit_census():
    t0 = time.perf_counter()
    problems = []
    for m in range(4, 11):
        got = orbit_census(_index(m), _dist(m))
        if got != CENSUS[m]:
            problems.append(f"m={m}: census {got}, want {CENSUS[m]}")
    wall = time.perf_counter() - t0
    if wall > 600.0:
        problems.append(f"took {wall:.1f}s, budget 600s")
    report(2, problems,
           f"orbit census matches for m=4..10, m=10 gives {CENSUS[10]}, in {wall:.1f}s")


def test_criterion_3_block_dimensions():
    t0 = time.perf_counter()
    problems = []
    for m in range(4, 10):
        blocks = build_blocks(_index(m))
        got = Counter(b.dim for b in blocks)
        if got != Counter(BLOCK_DIMS[m]):
            problems.append(f"m={m}: dimensions {dict(got)}, want {BLOCK_DIMS[m]}")
        squares = sum(b.dim ** 2 for b in blocks)
        if squares != CENSUS[m][1]:
            problems.append(f"m={m}: sum of squares {squares}, want {CENSUS[m][1]}")
    wall = time.perf_counter() - t0
    if wall > 1800.0:
        problems.append(f"took {wall:.1f}s, budget 1800s")
    report(3, problems,
           f"block dimension multisets match and squares sum to the orbit count "
           f"for m=4..9 in {wall:.1f}s")


def test_criterion_4_single_block_values(singles):
    outcomes, walls = singles
    problems = []
    for m in range(4, 11):
        out = outcomes[m]
        tol = 1e-5 if m == 10 else 1e-6
        err = abs(out.value - float(SINGLE_OPT[m]))
        if err > tol:
            problems.append(f"m={m}: value {out.value:.10f} off by {err:.2e}")
        cert = out.certificate
        if cert.bound > out.value + 1e-9:
            problems.append(f"m={m}: certificate {cert.bound:.10f} above the solve")
        if out.raw - cert.bound > 1e-5:
            problems.append(f"m={m}: certificate trails the solver by {out.raw - cert.bound:.2e}")
        if cert.value > Fraction(SINGLE_OPT[m]) + Fraction(1, 10**9):
            problems.append(f"m={m}: certified value exceeds the known optimum")
    if walls[10] > 7200.0:
        problems.append(f"m=10 took {walls[10]:.0f}s, budget 7200s")
    report(4, problems,
           f"single-block optima match to 1e-6 (1e-5 at m=10) with exact "
           f"certificates, m=10 end to end in {walls[10]:.0f}s")


def test_criterion_4_stretch_larger_m(store):
    if not STRETCH:
        print("criterion 4 (stretch m=11..13): SKIP - set CROSSINGS_STRETCH=1 to "
              "run m=11 (roughly half an hour); m=12 and m=13 need days of table "
              "building and more memory than this gate budgets")
        pytest.skip("stretch runs disabled")
    t0 = time.perf_counter()
    out = run_single(11, cache_dir=store)
    wall = time.perf_counter() - t0
    problems = []
    err = abs(out.value - float(SINGLE_OPT[11]))
    if err > 1e-5:
        problems.append(f"m=11: value {out.value:.10f} off by {err:.2e}")
    cert = out.certificate
    if out.raw - cert.bound > 1e-5:
        problems.append(f"m=11: certificate trails the solver by {out.raw - cert.bound:.2e}")
    if cert.value > Fraction(SINGLE_OPT[11]) + Fraction(1, 10**9):
        problems.append("m=11: certified value exceeds the known optimum")
    report("4 (stretch m=11)", problems,
           f"single-block optimum at m=11 matches to 1e-5 in {wall:.0f}s")


def test_criterion_5_full_values(fulls):
    outcomes, walls = fulls
    problems = []
    for m in range(4, 8):
        out = outcomes[m]
        err = abs(out.value - float(FULL_OPT[m]))
        if err > 1e-6:
            problems.append(f"m={m}: value {out.value:.10f} off by {err:.2e}")
        cert = out.certificate
        if cert.bound > out.value + 1e-9:
            problems.append(f"m={m}: certificate {cert.bound:.10f} above the solve")
        if out.raw - cert.bound > 1e-5:
            problems.append(f"m={m}: certificate trails the solver by {out.raw - cert.bound:.2e}")
        if cert.value > Fraction(FULL_OPT[m]) + Fraction(1, 10**9):
            problems.append(f"m={m}: certified value exceeds the known optimum")
    wall = sum(walls.values())
    report(5, problems,
           f"full relaxation optima match to 1e-6 for m=4..7 with exact "
           f"certificates in {wall:.1f}s")


def test_criterion_5_stretch_full_m8_m9(store):
    if not STRETCH:
        print("criterion 5 (stretch m=8,9): SKIP - set CROSSINGS_STRETCH=1 to run "
              "the full relaxation at m=8 (minutes) and m=9 (about an hour)")
        pytest.skip("stretch runs disabled")
    problems = []
    walls = {}
    for m in (8, 9):
        t0 = time.perf_counter()
        out = run_full(m, cache_dir=store)
        walls[m] = time.perf_counter() - t0
        err = abs(out.value - float(FULL_OPT[m]))
        if err > 1e-5:
            problems.append(f"m={m}: value {out.value:.10f} off by {err:.2e}")
        if out.raw - out.certificate.bound > 1e-5:
            problems.append(f"m={m}: certificate trails the solver")
        if out.certificate.value > Fraction(FULL_OPT[m]) + Fraction(1, 10**9):
            problems.append(f"m={m}: certified value exceeds the known optimum")
    report("5 (stretch m=8,9)", problems,
           f"full relaxation optima match to 1e-5, m=8 in {walls[8]:.0f}s "
           f"and m=9 in {walls[9]:.0f}s")


def test_criterion_6_published_bounds():
    problems = []
    strongest = {10: FULL_OPT[10], 11: SINGLE_OPT[11],
                 12: SINGLE_OPT[12], 13: SINGLE_OPT[13]}
    for m, g in strongest.items():
        qb = quadratic_bound(m, g)
        want_a, want_b = QUADRATIC_COEFFS[m]
        if want_a not in (truncated(qb.a, 5), rounded(qb.a, 5)):
            problems.append(f"m={m}: leading coefficient prints as {truncated(qb.a, 5)}, want {want_a}")
        if plain(qb.b) != want_b:
            problems.append(f"m={m}: linear coefficient prints as {plain(qb.b)}, want {want_b}")
        lb = lift_bound(qb)
        want_c, want_e = LIFTED_COEFFS[m]
        if want_c not in (truncated(lb.c, 4), rounded(lb.c, 4)):
            problems.append(f"m={m}: lifted coefficient prints as {truncated(lb.c, 4)}, want {want_c}")
        if plain(lb.e) != want_e:
            problems.append(f"m={m}: lifted linear term prints as {plain(lb.e)}, want {want_e}")
    balanced = knn_table(strongest)
    if balanced != BALANCED_BOUNDS:
        problems.append(f"balanced bounds {balanced}, want {BALANCED_BOUNDS}")
    for n, bound in BALANCED_BOUNDS.items():
        if bound >= zarankiewicz(n, n):
            problems.append(f"n={n}: bound {bound} reaches the drawing count {zarankiewicz(n, n)}")
    for table, optima in ((RATIO_SINGLE, SINGLE_OPT), (RATIO_FULL, FULL_OPT)):
        for m, printed in table.items():
            r = asymptotic_ratio(m, optima[m])
            if printed not in (truncated(r, 4), rounded(r, 4)):
                problems.append(f"m={m}: ratio prints as {truncated(r, 4)}, want {printed}")
    report(6, problems,
           "quadratic, lifted, balanced, and ratio displays all reproduce "
           "the published tables")


def test_criterion_7_independent_routes():
    t0 = time.perf_counter()
    problems = []
    for m in range(4, 8):
        tables = PairTables.build(m)
        for t1, t2 in combinations_with_replacement(hook_block_columns(m), 2):
            if direct_expansion(t1, t2, tables) != poly_method(t1, t2, tables):
                problems.append(f"m={m}: symbolic route disagrees with direct expansion")
                break
        if not (hook_constraint_table(tables, "poly")
                == hook_constraint_table(tables, "pairs")).all():
            problems.append(f"m={m}: pair-stream route disagrees with the symbolic route")
    for m in range(4, 8):
        if not (_dist(m) == distances_from_base_unpruned(_index(m))).all():
            problems.append(f"m={m}: pruned and unpruned searches disagree")
    for m in range(4, 7):
        elems = stabilizer_elements(m)
        seen = set()
        for rest in permutations(range(2, m + 1)):
            c = Cycle((1,) + rest)
            if c in seen:
                continue
            orb = {act(h, c) for h in elems}
            seen |= orb
            if {canonical_form(x) for x in orb} != {min(orb, key=lambda x: x.seq)}:
                problems.append(f"m={m}: canonical form disagrees with the group sweep")
                break
    wall = time.perf_counter() - t0
    report(7, problems,
           f"coefficient routes, search pruning, and canonicalization each "
           f"agree with their independent counterpart in {wall:.1f}s")


def test_criterion_8_relaxation_relations(singles, fulls):
    single_out, _ = singles
    full_out, _ = fulls
    problems = []
    for m in range(4, 8):
        if single_out[m].value > full_out[m].value + 1e-8:
            problems.append(f"m={m}: single block exceeds the full relaxation")
    if abs(single_out[6].value - full_out[6].value) > 1e-9:
        problems.append("m=6: the two relaxations differ")
    for m in (5, 7, 9):
        rank, _ = rank_report(single_out[m].y[0])
        if rank != 1:
            problems.append(f"m={m}: optimal block has rank {rank}, want 1")
    rank8, _ = rank_report(single_out[8].y[0])
    if rank8 != 2:
        problems.append(f"m=8: optimal block has rank {rank8}, want 2")
    _, v5 = rank_report(single_out[5].y[0])
    if v5 is None or not np.allclose(v5, V5, atol=1e-3):
        problems.append(f"m=5: factor {v5}, want {V5}")
    report(8, problems,
           "single block never beats the full relaxation, the two agree at "
           "m=6, ranks are 1 at m=5,7,9 and 2 at m=8, and the m=5 factor matches")


@pytest.mark.xfail(strict=True,
                   reason="the m=6 optimum sits where the feasible line meets "
                          "the cone boundary, a tangency, so the optimal block "
                          "is singular and rank 2 is unattainable")
def test_criterion_8_even_rank_at_m6(singles):
    single_out, _ = singles
    rank, _ = rank_report(single_out[6].y[0])
    print(f"criterion 8 (m=6 rank): FAIL - optimal block has rank {rank}, not 2; "
          "the tight classes leave one degree of freedom and the optimum is the "
          "tangency point, so the block is singular "
          "(see test_relaxations.py::test_rank_structure_even_m)")
    assert rank == 2


def test_criterion_9_certificates_after_perturbation(store, singles):
    single_out, _ = singles
    t0 = time.perf_counter()
    problems = []
    for m in range(4, 9):
        d, sizes, qs, tri = hook_tables(m, cache_dir=store)
        for exponent, scale in ((6, 1e-6), (3, 1e-3)):
            rng = np.random.default_rng(1000 * m + exponent)
            noise = rng.normal(0.0, scale, (d, d))
            y = single_out[m].y[0] + noise + noise.T
            cert = certify_single(y, sizes, qs, tri)
            n_mat = cert.numerators[0]
            if not exactly_psd(n_mat):
                problems.append(f"m={m} scale {scale:g}: numerator not positive semidefinite")
                continue
            # reprice every class from scratch with stdlib rationals only
            worst = None
            for i in range(len(qs)):
                inner = 0
                k = 0
                for a in range(d):
                    for b in range(a, d):
                        inner += (1 if a == b else 2) * int(n_mat[a, b]) * int(tri[i, k])
                        k += 1
                val = Fraction(int(qs[i])) - Fraction(inner, cert.denominator * int(sizes[i]))
                if worst is None or val < worst:
                    worst = val
            if cert.value != worst:
                problems.append(f"m={m} scale {scale:g}: certified value fails the recheck")
            if cert.value > Fraction(SINGLE_OPT[m]) + Fraction(1, 10**9):
                problems.append(f"m={m} scale {scale:g}: certificate exceeds the known optimum")
    wall = time.perf_counter() - t0
    report(9, problems,
           f"perturbed duals at m=4..8 still certify, and every certificate "
           f"survives an independent rational recheck, in {wall:.2f}s")
