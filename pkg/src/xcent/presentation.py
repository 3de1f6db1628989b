"""Extension presentations: parsing, symmetrization and derived constants.

A presentation file describes a group G by generators and relators, together
with a central extension of G by Z.  Each relator r carries an integer height
n, meaning that r evaluates to the n-th power of the central generator in E.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property


class PresentationError(ValueError):
    """Raised for malformed or inconsistent presentation data."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SmallCancellationError(PresentationError):
    pass


@dataclass(frozen=True)
class Alphabet:
    """Symmetric alphabet: involution pairs in declaration order.

    ``pairs`` lists (positive, negative) letters; the letter order used for
    shortlex comparisons is the order of appearance, positive member first.
    """

    pairs: tuple[tuple[str, str], ...]
    central_pair: tuple[str, str] | None = None

    def __post_init__(self):
        seen = set()
        for pair in self.all_pairs:
            for letter in pair:
                if len(letter) != 1 or letter.isspace() or letter == "#":
                    raise PresentationError(f"letters must be single characters, got {letter!r}")
                if letter in seen:
                    raise PresentationError(f"letter {letter!r} declared twice")
                seen.add(letter)

    @property
    def all_pairs(self):
        if self.central_pair is None:
            return self.pairs
        return self.pairs + (self.central_pair,)

    @cached_property
    def letters(self) -> tuple[str, ...]:
        return tuple(x for pair in self.all_pairs for x in pair)

    @cached_property
    def noncentral(self) -> tuple[str, ...]:
        return tuple(x for pair in self.pairs for x in pair)

    @cached_property
    def central(self) -> frozenset[str]:
        return frozenset(self.central_pair or ())

    @cached_property
    def inverse(self) -> dict[str, str]:
        inv = {}
        for x, y in self.all_pairs:
            inv[x] = y
            inv[y] = x
        return inv

    @cached_property
    def index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.letters)}

    @cached_property
    def _inv_table(self):
        return str.maketrans(self.inverse)

    def invert(self, word: str) -> str:
        """Formal inverse: reverse and invert each letter."""
        return word[::-1].translate(self._inv_table)

    def central_sign(self, letter: str) -> int:
        """+1 for the positive central letter, -1 for its inverse, 0 otherwise."""
        if self.central_pair is None:
            return 0
        if letter == self.central_pair[0]:
            return 1
        if letter == self.central_pair[1]:
            return -1
        return 0

    def shortlex_key(self, word: str):
        idx = self.index
        return (len(word), tuple(idx[x] for x in word))

    def check_word(self, word: str):
        for x in word:
            if x not in self.index:
                raise PresentationError(f"unknown letter {x!r} in word {word!r}")


@dataclass(frozen=True)
class HeightedRelator:
    word: str
    height: int


def free_reduce_word(word: str, inverse) -> str:
    out = []
    for x in word:
        if out and out[-1] == inverse[x]:
            out.pop()
        else:
            out.append(x)
    return "".join(out)


def is_cyclically_reduced(word: str, inverse) -> bool:
    if not word:
        return False
    if free_reduce_word(word, inverse) != word:
        return False
    return len(word) == 1 or word[0] != inverse[word[-1]]


def symmetrize(relators, alphabet: Alphabet) -> tuple[HeightedRelator, ...]:
    """Close relators under cyclic permutation and inversion.

    Heights are preserved by cyclic permutation and negated by inversion.
    The result is sorted shortlex and free of duplicates.
    """
    table: dict[str, int] = {}
    for rel in relators:
        if not is_cyclically_reduced(rel.word, alphabet.inverse):
            raise PresentationError(f"relator {rel.word!r} is not cyclically reduced")
        inv = alphabet.invert(rel.word)
        n = len(rel.word)
        for i in range(n):
            for word, height in ((rel.word[i:] + rel.word[:i], rel.height),
                                 (inv[i:] + inv[:i], -rel.height)):
                old = table.get(word)
                if old is not None and old != height:
                    raise PresentationError(
                        f"inconsistent heights for {word!r}: {old} and {height}")
                table[word] = height
    words = sorted(table, key=alphabet.shortlex_key)
    return tuple(HeightedRelator(w, table[w]) for w in words)


@dataclass(frozen=True)
class ExtensionSpec:
    """Validated extension data with the derived constants T, K, C, lambda.

    ``relators`` holds the symmetrized non-central relators; ``base_relators``
    keeps the relators as written, for serialization.
    """

    alphabet: Alphabet
    base_relators: tuple[HeightedRelator, ...]
    relators: tuple[HeightedRelator, ...]
    T: int
    K: int
    C: int
    unverified: bool = False
    name: str = field(default="", compare=False)

    @property
    def lam(self) -> Fraction:
        tk = self.T * self.K
        return Fraction(self.C + tk, self.C - tk)

    @property
    def central_relators(self) -> tuple[HeightedRelator, ...]:
        if self.alphabet.central_pair is None:
            return ()
        t, s = self.alphabet.central_pair
        return (HeightedRelator(t, 1), HeightedRelator(s, -1))

    @property
    def all_relators(self):
        return self.relators + self.central_relators

    @cached_property
    def dehn_rate(self) -> Fraction:
        """Bound on |height| per unit of length removed by one Dehn face.

        Replacing more than half of a relator r shortens a word by at least
        1 (|r| odd) or 2 (|r| even), so a non-central null word w has
        |height| <= dehn_rate * len(w) whenever Dehn's algorithm applies.
        """
        rate = Fraction(0)
        for rel in self.relators:
            drop = 1 if len(rel.word) % 2 else 2
            rate = max(rate, Fraction(abs(rel.height), drop))
        return rate

    def with_C(self, C: int) -> "ExtensionSpec":
        if C <= self.T * self.K:
            raise PresentationError(f"C = {C} must exceed T*K = {self.T * self.K}")
        return ExtensionSpec(self.alphabet, self.base_relators, self.relators,
                             self.T, self.K, C, self.unverified, self.name)

    def serialize(self) -> str:
        lines = ["generators: " + ", ".join(f"{x} {y}" for x, y in self.alphabet.pairs)]
        if self.alphabet.central_pair:
            lines.append("central: {} {}".format(*self.alphabet.central_pair))
        for rel in self.base_relators:
            lines.append(f"relator: {rel.word} height {rel.height}")
        lines.append(f"constant K = {self.K}")
        lines.append(f"constant C = {self.C}")
        return "\n".join(lines) + "\n"

    @cached_property
    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()

    @cached_property
    def group_digest(self) -> str:
        """Digest of the presentation without the constants K and C.

        Balls and step heights do not depend on the constants, so caches of
        them are keyed by this value.
        """
        text = "".join(line + "\n" for line in self.serialize().splitlines()
                       if not line.startswith("constant"))
        return hashlib.sha256(text.encode()).hexdigest()


_RELATOR = re.compile(r"^(\S+)\s+height\s+(-?\d+)$")
_CONSTANT = re.compile(r"^([CK])\s*=\s*(-?\d+)$")


def _parse_pairs(body, lineno):
    pairs = []
    for chunk in body.split(","):
        parts = chunk.split()
        if len(parts) != 2:
            raise PresentationError(f"expected a letter pair, got {chunk.strip()!r}", lineno)
        pairs.append((parts[0], parts[1]))
    return tuple(pairs)


def parse_spec(text: str, force: bool = False, name: str = "") -> ExtensionSpec:
    """Parse presentation-file text into a validated ExtensionSpec.

    Presentations failing C'(1/6) are rejected unless ``force`` is set, in
    which case the presentation is flagged ``unverified``.
    """
    gens = central = None
    relators = []
    constants = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, body = line.partition(":")
        key = key.strip()
        body = body.strip()
        if sep and key == "generators":
            if gens is not None:
                raise PresentationError("duplicate generators line", lineno)
            gens = _parse_pairs(body, lineno)
            gens_line = lineno
        elif sep and key == "central":
            if central is not None:
                raise PresentationError("duplicate central line", lineno)
            pairs = _parse_pairs(body, lineno)
            if len(pairs) != 1:
                raise PresentationError("central line needs exactly one letter pair", lineno)
            central = pairs[0]
        elif sep and key == "relator":
            m = _RELATOR.match(body)
            if not m:
                raise PresentationError(f"malformed relator {body!r}", lineno)
            relators.append((m.group(1), int(m.group(2)), lineno))
        elif line.startswith("constant"):
            m = _CONSTANT.match(line[len("constant"):].strip())
            if not m:
                raise PresentationError(f"malformed constant {line!r}", lineno)
            constants[m.group(1)] = (int(m.group(2)), lineno)
        else:
            raise PresentationError(f"unrecognised line {line!r}", lineno)
    if gens is None:
        raise PresentationError("missing generators line")
    if central is None:
        raise PresentationError("missing central line")

    try:
        alphabet = Alphabet(gens, central)
    except PresentationError as exc:
        raise PresentationError(str(exc), exc.line or gens_line) from None
    base = []
    for word, height, lineno in relators:
        for x in word:
            if x not in alphabet.index:
                raise PresentationError(f"relator uses undeclared letter {x!r}", lineno)
            if x in alphabet.central:
                raise PresentationError(f"central letter {x!r} appears in a relator", lineno)
        if not is_cyclically_reduced(word, alphabet.inverse):
            raise PresentationError(f"relator {word!r} is not cyclically reduced", lineno)
        base.append(HeightedRelator(word, height))
    sym = symmetrize(base, alphabet)
    return build_spec(alphabet, tuple(base), sym, constants, force=force, name=name)


def build_spec(alphabet, base, sym, constants=None, force=False, name=""):
    constants = constants or {}
    T = max([abs(r.height) for r in sym] + [1 if alphabet.central_pair else 0])
    K, k_line = constants.get("K", (1, None))
    if K < 1:
        raise PresentationError("K must be positive", k_line)
    default_C = T * K + 1
    C, c_line = constants.get("C", (default_C, None))
    if C <= T * K:
        raise PresentationError(f"C = {C} must exceed T*K = {T * K}", c_line)
    spec = ExtensionSpec(alphabet, base, sym, T, K, C, False, name)
    report = check_small_cancellation(spec)
    if not report["passes"]:
        if not force:
            raise SmallCancellationError(
                f"presentation fails C'(1/6): max piece ratio {report['max_piece_ratio']}")
        spec = ExtensionSpec(alphabet, base, sym, T, K, C, True, name)
    return spec


def check_small_cancellation(spec: ExtensionSpec) -> dict:
    """Largest piece-to-relator length ratio over the symmetrized relators."""
    words = [r.word for r in spec.relators]
    ratio = Fraction(0)
    for i, u in enumerate(words):
        for v in words[i + 1:]:
            n = 0
            for x, y in zip(u, v):
                if x != y:
                    break
                n += 1
            if n:
                ratio = max(ratio, Fraction(n, min(len(u), len(v))))
    return {"max_piece_ratio": ratio, "passes": ratio < Fraction(1, 6)}


def load_spec(path, force=False) -> ExtensionSpec:
    from pathlib import Path

    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), force=force, name=path.stem)
