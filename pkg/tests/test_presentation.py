from fractions import Fraction

import pytest

from xcent.presentation import (Alphabet, HeightedRelator, PresentationError,
                                SmallCancellationError, check_small_cancellation, parse_spec,
                                symmetrize)
from xcent.presentations import SHIPPED, load

GENUS_TEXT = """\
# comment line
generators: a A, b B, c C, d D
central: t T

relator: abABcdCD height 1   # trailing comment
"""


def test_shipped_files_parse():
    for name in SHIPPED:
        spec = load(name)
        assert not spec.unverified


def test_genus_constants(genus):
    assert (genus.T, genus.K, genus.C) == (1, 1, 2)
    assert genus.lam == 3
    assert len(genus.relators) == 16


def test_free_constants(free):
    assert (free.T, free.K, free.C) == (1, 1, 2)
    assert free.lam == 3
    assert free.relators == ()


def test_big_c_lambda():
    spec = parse_spec(GENUS_TEXT + "constant C = 10\n")
    assert spec.lam == Fraction(11, 9)


def test_c_must_exceed_tk():
    with pytest.raises(PresentationError):
        parse_spec(GENUS_TEXT + "constant C = 1\n")


def test_symmetrize_length_four():
    alph = Alphabet((("a", "A"), ("b", "B")), ("t", "T"))
    sym = symmetrize([HeightedRelator("abAB", 3)], alph)
    assert len(sym) == 8
    assert sorted(r.height for r in sym) == [-3] * 4 + [3] * 4


def test_symmetrize_genus(genus):
    assert sorted(r.height for r in genus.relators) == [-1] * 8 + [1] * 8


def test_symmetrize_inconsistent_heights():
    alph = Alphabet((("a", "A"), ("b", "B")), ("t", "T"))
    with pytest.raises(PresentationError):
        symmetrize([HeightedRelator("abAB", 1), HeightedRelator(alph.invert("abAB"), 1)], alph)


def test_symmetrize_idempotent(genus):
    again = symmetrize(list(genus.relators), genus.alphabet)
    assert set(again) == set(genus.relators)


def test_inverse_pairs_present(genus):
    rels = {(r.word, r.height) for r in genus.relators}
    for w, h in rels:
        assert (genus.alphabet.invert(w), -h) in rels


def _pieces_brute(words):
    best = Fraction(0)
    for i, u in enumerate(words):
        for j, v in enumerate(words):
            if i == j:
                continue
            n = 0
            while n < min(len(u), len(v)) and u[n] == v[n]:
                n += 1
            if n:
                best = max(best, Fraction(n, len(u)), Fraction(n, len(v)))
    return best


def test_small_cancellation_genus(genus):
    rep = check_small_cancellation(genus)
    assert rep["max_piece_ratio"] == Fraction(1, 8) == _pieces_brute([r.word for r in genus.relators])
    assert rep["passes"]


def test_small_cancellation_free(free):
    rep = check_small_cancellation(free)
    assert rep["max_piece_ratio"] == 0 and rep["passes"]


def test_small_cancellation_failure():
    text = "generators: a A, b B\ncentral: t T\nrelator: abAB height 0\nrelator: abab height 0\n"
    with pytest.raises(SmallCancellationError):
        parse_spec(text)
    spec = parse_spec(text, force=True)
    assert spec.unverified
    assert check_small_cancellation(spec)["max_piece_ratio"] >= Fraction(2, 4)


@pytest.mark.parametrize("text, line", [
    ("generators: a A\nrelator: a height 1\n", None),
    ("generators: a A\ncentral: t T\nrelator: ax height 1\n", 3),
    ("generators: a A\ncentral: t T\nrelator: aA height 1\n", 3),
    ("generators: a A\ncentral: t T\nrelator: at height 1\n", 3),
    ("generators: a A\ncentral: t T\nbogus\n", 3),
    ("generators: a A\ncentral: t T\nconstant Q = 3\n", 3),
    ("generators: a A, a B\ncentral: t T\n", 1),
])
def test_parse_errors(text, line):
    with pytest.raises(PresentationError) as info:
        parse_spec(text)
    if line is not None:
        assert info.value.line == line


def test_round_trip(genus):
    again = parse_spec(genus.serialize())
    assert again == genus
    assert again.digest == genus.digest


def test_lambda_decreases_with_c(genus):
    lams = [genus.with_C(C).lam for C in range(2, 12)]
    assert all(x > 1 for x in lams)
    assert all(a > b for a, b in zip(lams, lams[1:]))


def test_group_digest_ignores_constants(genus):
    assert genus.with_C(10).group_digest == genus.group_digest
    assert genus.with_C(10).digest != genus.digest
