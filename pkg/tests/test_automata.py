from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from xcent.automata import (FAIL, FreeReductionDfa, NotMaximising, StateCapExceeded, _sync,
                            agree_with_retry, async_distance, biautomatic_lift_check, build_fsa,
                            estimate_delta, lift_eval, m_path, oracle_agreement,
                            product_equivalence, run_word)
from xcent.cayley import build_ext_ball
from xcent.maximise import compute_potential
from xcent.wordproblem import free_reduce


@pytest.fixture(scope="module")
def free_fsa0(free_pt):
    return build_fsa(free_pt, 0)


@pytest.fixture(scope="module")
def genus_fsa(genus_pt4):
    return build_fsa(genus_pt4, 3, explore=False)


def test_delta_estimates(free_pt, genus_pt4):
    assert estimate_delta(free_pt, 4)["delta"] == 1
    rep = estimate_delta(genus_pt4, 4)
    assert rep["delta"] == 3
    assert estimate_delta(genus_pt4, 3)["delta"] == 1


def test_free_fsa_delta0(free, free_fsa0):
    fsa = free_fsa0
    assert len(fsa.states) <= 10
    assert run_word(fsa, "")
    for n in range(5):
        for tup in product(free.alphabet.letters, repeat=n):
            w = "".join(tup)
            expect = "t" not in w and "T" not in w and free_reduce(w, free) == w
            assert fsa.accepts(w) == expect, w


def test_free_product_equivalence(free, free_fsa0, free_pt):
    rep = product_equivalence(free_fsa0, FreeReductionDfa(free.alphabet), 10)
    assert rep["mismatches"] == [] and rep["saturated"]
    fsa1 = build_fsa(free_pt, 1)
    assert product_equivalence(fsa1, FreeReductionDfa(free.alphabet), 10)["mismatches"] == []


def test_genus_agreement(genus_fsa, genus_pt4):
    rep = oracle_agreement(genus_fsa, genus_pt4, 4)
    assert rep.disagreements == []
    assert rep.tested == sum(10 ** k for k in range(5))


def test_sampled_agreement(genus_fsa, genus_pt4):
    rep = oracle_agreement(genus_fsa, genus_pt4, 4, mode="sample", n=300, seed=9)
    assert rep.tested == 300 and rep.disagreements == []


def test_retry_reports_delta(genus_pt4):
    fsa, rep = agree_with_retry(genus_pt4, 3, 3)
    assert fsa.delta == 3 and not rep.disagreements


def test_single_letters(genus_fsa, genus_pt4):
    from xcent.maximise import is_maximising
    for x in genus_fsa.letters:
        assert genus_fsa.accepts(x) == is_maximising(genus_pt4, x)


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="aAbBcCdDtT", max_size=6))
def test_prefix_closed_and_fail_absorbing(genus_fsa, w):
    s = genus_fsa.start
    dead = False
    for x in w:
        s = genus_fsa.step(s, x)
        if dead:
            assert s == FAIL
        dead = s == FAIL
    if genus_fsa.accepts(w):
        assert all(genus_fsa.accepts(w[:k]) for k in range(len(w)))


def test_profile_bounds(free_pt):
    fsa = build_fsa(free_pt, 1)
    top = 2 * fsa.W * fsa.C
    for s in range(1, len(fsa.states)):
        assert all(0 <= v <= top for v in fsa.profile(s).values())


def test_deterministic_rebuild(free_pt):
    a = build_fsa(free_pt, 1)
    b = build_fsa(free_pt, 1)
    assert a.transition_table() == b.transition_table()
    assert a.to_dot() == b.to_dot()
    assert a.to_dot().startswith("digraph")


def test_state_cap(genus_pt4):
    with pytest.raises(StateCapExceeded):
        build_fsa(genus_pt4, 3, state_cap=5)


def test_async_not_above_sync(genus_pt4):
    ball = genus_pt4.ball
    from xcent.cayley import fellow_travel_distance
    for u, v in [("ab", "ba"), ("abA", "aB"), ("", "cd"), ("DbA", "Dc")]:
        pu, pv = ball.path(u), ball.path(v)
        assert async_distance(ball, pu, pv) <= fellow_travel_distance(u, v, ball)


def test_lift_eval(free_pt):
    assert lift_eval("", free_pt) == []
    assert lift_eval("ab", free_pt) == [-2, -4]
    with pytest.raises(NotMaximising):
        lift_eval("aA", free_pt)


def _free_m_path(free, w, m):
    C = free.C
    pts = [(w[:k], -C * k) for k in range(len(w) + 1)]
    f = pts[-1][1]
    step = 1 if m > f else -1
    pts += [(w, k) for k in (range(f + step, m + step, step) if m != f else [])]
    return pts


def _free_dE(free, a, b):
    # E = F2 x Z with zero step heights: |g⁻¹h| + |m - n|
    return len(free_reduce(free.alphabet.invert(a[0]) + b[0], free)) + abs(a[1] - b[1])


def test_biautomatic_free_oracle(free):
    pt = compute_potential(free, 3)
    ext = build_ext_ball(free, 3, 2 * free.C * 3 + free.T)
    ball = pt.ball
    best = 0
    for g in range(int(ball.level_start[3])):
        w = ball.words[g]
        for m in range(-4, 5):
            for y in free.alphabet.noncentral:
                h = ball.adj[g, ball.letter_index(y)]
                if ball.norm[h] > 2:
                    continue
                p1, p2 = _free_m_path(free, w, m), _free_m_path(free, ball.words[h], m)
                d = max(_free_dE(free, p1[min(t, len(p1) - 1)], p2[min(t, len(p2) - 1)])
                        for t in range(max(len(p1), len(p2))))
                assert d == _sync(ext, m_path(pt, g, m), m_path(pt, int(h), m))
                best = max(best, d)
    # the worst case is (1, 1) against (a, 1): at time 1 the second path is at (a, -C)
    assert best == free.C + 2
    rep = biautomatic_lift_check(ext, pt, 200, seed=1, radius=2)
    assert rep["max_sync_ft"] == free.C + 2


def test_biautomatic_identical_targets(genus_pt4, genus, genus_ball5):
    ext = build_ext_ball(genus, 5, 2 * genus.C * 4 + genus.T, ball=genus_ball5)
    p = m_path(genus_pt4, genus_ball5.element("abc"), 3)
    assert _sync(ext, p, p) == 0


def test_biautomatic_genus_golden(genus, genus_pt4, genus_ball5):
    ext = build_ext_ball(genus, 5, 2 * genus.C * 4 + genus.T, ball=genus_ball5)
    rep = biautomatic_lift_check(ext, genus_pt4, 500, seed=20240611, radius=4)
    assert rep["samples"] == 500
    assert rep["max_sync_ft"] == 4
