"""Acceptance criteria 1-10, each reported as one PASS/FAIL line."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from xcent.automata import (FreeReductionDfa, build_fsa, estimate_delta, oracle_agreement,
                            product_equivalence)
from xcent.cayley import build_ball
from xcent.cocycle import (base_view, cocycle_identity_check, floor_section, full_bound_scan,
                           half, inverse_pair_scan, inverse_q_violations, repair_weakly_bounded,
                           rho_view, symmetrize_q, weak_bound_scan)
from xcent.maximise import (brute_force_potential, brute_force_table, compute_potential,
                            quasigeodesic_violations)
from xcent.rng import SplitMix64
from xcent.verify import DEFAULT_SEED, random_null_words
from xcent.wordproblem import solver


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def g7(genus):
    return build_ball(genus, 7)


@pytest.fixture(scope="module")
def gpt(genus, g7):
    # C = TK + 1 = 2; a radius-7 ball certifies F up to norm 6
    return compute_potential(genus, 6, ball=g7)


@pytest.fixture(scope="module")
def gpt10(genus, g7):
    return compute_potential(genus, 5, ball=g7, C=10)


@pytest.fixture(scope="module")
def fpt(free, free_ball):
    return compute_potential(free, 8, ball=free_ball)


@pytest.fixture(scope="module")
def fpt10(free, free_ball):
    return compute_potential(free, 8, ball=free_ball, C=10)


def _views(pt):
    q = symmetrize_q(pt)
    return [base_view(pt.ball), rho_view(pt), q, floor_section(q)]


def test_criterion_1_cocycle_identity(fpt, gpt):
    t = time.perf_counter()
    out = {}
    for name, pt in (("free", fpt), ("genus2", gpt)):
        for view in _views(pt):
            out[f"{name}/{view.label}"] = cocycle_identity_check(view, 2).violations
    secs = time.perf_counter() - t
    ok = all(v == 0 for v in out.values()) and secs < 60
    report(1, ok, f"violations={sum(out.values())} over {len(out)} views, {secs:.1f}s (< 60s)")
    assert ok, out


def test_criterion_2_quasigeodesic(fpt, fpt10, gpt, gpt10):
    out = {}
    for name, pt in (("free C=2", fpt), ("free C=10", fpt10), ("genus2 C=2", gpt),
                     ("genus2 C=10", gpt10)):
        out[name] = len(quasigeodesic_violations(pt, 5))
    ok = all(v == 0 for v in out.values())
    report(2, ok, f"len(w) <= lambda*norm on B(5): violations {out}")
    assert ok


def test_criterion_3_oracle(free, genus, fpt, gpt, gpt10):
    t = time.perf_counter()
    bad = []
    for spec, pt in ((free, fpt), (genus, gpt)):
        ball = pt.ball
        targets = list(range(int(ball.level_start[3])))
        table = brute_force_table(spec, ball, math.ceil(spec.lam * 2), targets=targets)
        bad += [ball.words[g] for g in targets if table.get(g) != pt.F[g]]
    ball = gpt10.ball
    rng = SplitMix64(DEFAULT_SEED)
    sphere = ball.sphere(4)
    picks = [sphere[i] for i in sorted(rng.sample_indices(len(sphere), 50))]
    max_len = math.ceil(Fraction(11, 9) * 4)
    for g in picks:
        if brute_force_potential(genus, ball.words[g], max_len, C=10) != gpt10.F[g]:
            bad.append(ball.words[g])
    secs = time.perf_counter() - t
    ok = not bad and secs < 600
    report(3, ok, f"exhaustive B(2) both groups + {len(picks)} random norm-4 elements at C=10: "
                  f"mismatches={len(bad)}, {secs:.1f}s (< 600s)")
    assert ok, bad


def test_criterion_4_weak_bound(free, genus, fpt, gpt):
    out = {}
    for name, spec, pt in (("free", free, fpt), ("genus2", genus, gpt)):
        rep = weak_bound_scan(rho_view(pt), 5, side="both")
        out[name] = (rep.extra["max_abs_right"], rep.extra["max_abs_left"], spec.C)
    ok = all(r <= C and l <= C for r, l, C in out.values())
    report(4, ok, f"max (right, left, C) on B(5): {out}")
    assert ok


def test_criterion_5_inverse_of_q(fpt, gpt):
    out = {name: len(inverse_q_violations(symmetrize_q(pt), 4)) for name, pt in (("free", fpt), ("genus2", gpt))}
    ok = all(v == 0 for v in out.values())
    report(5, ok, f"q(g^-1) = q(g)^-1 on B(4): violations {out}")
    assert ok


def test_criterion_6_boundedness(free, fpt, gpt):
    qf = symmetrize_q(fpt)
    a = full_bound_scan(qf, 3)
    qg = symmetrize_q(gpt)
    b3 = full_bound_scan(qg, 3, seed=DEFAULT_SEED)
    b4 = full_bound_scan(qg, 4, seed=DEFAULT_SEED)
    sep = inverse_pair_scan(rho_view(fpt), 3)
    ok_a = a.max_abs2 == 0 and not a.sampled
    ok_b = b3.max_abs2 == b4.max_abs2
    ok_c = all(sep[r] == 2 * (2 * free.C * r) for r in (1, 2, 3))
    ok = ok_a and ok_b and ok_c
    report(6, ok, f"(a) free max|sigma_q|={half(a.max_abs2)} exhaustive; "
                  f"(b) genus2 plateau r3={half(b3.max_abs2)} r4={half(b4.max_abs2)} "
                  f"(sampled: {b3.sampled}, {b4.sampled}); "
                  f"(c) max|sigma_rho(g,g^-1)| = {[half(sep[r]) for r in (1, 2, 3)]} vs 2Cr")
    assert ok


def test_criterion_7_fsa(free, fpt, gpt):
    t = time.perf_counter()
    d_free = estimate_delta(fpt, 4)["delta"]
    d_genus = estimate_delta(gpt, 4)["delta"]
    ffsa = build_fsa(fpt, d_free, explore=False)
    rf = oracle_agreement(ffsa, fpt, 8)
    gfsa = build_fsa(gpt, d_genus, explore=False)
    rg = oracle_agreement(gfsa, gpt, 6)
    eq = product_equivalence(ffsa, FreeReductionDfa(free.alphabet), 10)
    secs = time.perf_counter() - t
    ok = not rf.disagreements and not rg.disagreements and not eq["mismatches"] and secs < 900
    report(7, ok, f"free len<=8 tested={rf.tested} disagreements={len(rf.disagreements)}; "
                  f"genus2 len<=6 tested={rg.tested} disagreements={len(rg.disagreements)}; "
                  f"free-reduction language equal to len 10: {not eq['mismatches']}; {secs:.1f}s (< 900s)")
    assert ok


def test_criterion_8_repair(free, free_ball):
    rng = SplitMix64(DEFAULT_SEED)
    P = np.array([0] + [rng.randint(-50, 50) for _ in range(free_ball.size - 1)], dtype=np.int64)
    out = repair_weakly_bounded(free_ball, P, 3)
    right = weak_bound_scan(out["view"], 3, side="both")
    ok = out["K_in"] > 50 and right.max_abs2 <= 2 * out["C"] and out["C"] == out["K_in"] + 1
    report(8, ok, f"input K_in={out['K_in']} (> 50), repaired max={half(right.max_abs2)} "
                  f"(right {right.extra['max_abs_right']}, left {right.extra['max_abs_left']}) <= C={out['C']}")
    assert ok


def test_criterion_9_height_well_defined(free, genus):
    out = {}
    for name, spec in (("free", free), ("genus2", genus)):
        dehn = solver(spec)
        rng = SplitMix64(DEFAULT_SEED + 9)
        words = random_null_words(spec, 200, 24, DEFAULT_SEED)
        bad = 0
        for w in words:
            h = dehn.null_height(w)
            bad += sum(dehn.random_null_height(w, rng) != h for _ in range(100))
        out[name] = (len(words), max(map(len, words)), bad)
    ok = all(b == 0 for _, _, b in out.values())
    report(9, ok, f"(words, max length, mismatches) over 100 random orders: {out}")
    assert ok


def test_criterion_10_fellow_traveller(fpt, gpt):
    f4 = estimate_delta(fpt, 4)
    g3 = estimate_delta(gpt, 3)
    g4 = estimate_delta(gpt, 4)
    free_exact = f4["delta"] == 0
    stable = g3["delta"] == g4["delta"]
    ok = free_exact and stable
    report(10, ok, f"free delta_hat={f4['delta']} (required 0, witness {f4['argmax']}); "
                   f"genus2 delta_hat r3={g3['delta']} r4={g4['delta']} (required equal, "
                   f"witness {g4['argmax']})")
    assert ok, (f"free-group delta_hat is {f4['delta']} (witness {f4['argmax']}); genus-2 "
                f"delta_hat is {g3['delta']} at radius 3 and {g4['delta']} at radius 4")
