"""Dehn's algorithm with height tracking.

Words are plain strings over the presentation's alphabet.  A word that is null in G
evaluates in E to a power of the central generator; ``null_height`` returns
that exponent by running Dehn's algorithm and summing the heights of the
relator faces it applies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .presentation import ExtensionSpec, free_reduce_word


class NotNull(ValueError):
    """The word does not represent the identity of G."""


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)
    accumulated_height: int = 0

    def add(self, kind, position, relator, delta):
        self.steps.append((kind, position, relator, delta))
        self.accumulated_height += delta

    def to_tsv(self) -> str:
        rows = ["kind\tposition\trelator\theight_delta"]
        for kind, pos, rel, delta in self.steps:
            rows.append(f"{kind}\t{pos}\t{'' if rel is None else rel}\t{delta}")
        return "\n".join(rows) + "\n"


class DehnSolver:
    """Word-problem solver bound to one spec; results are memoized."""

    def __init__(self, spec: ExtensionSpec):
        self.spec = spec
        self.alphabet = spec.alphabet
        self.inverse = spec.alphabet.inverse
        # every prefix u of a symmetrized relator r with 2|u| > |r| maps to
        # (inverse of the complement, height of r, index of r)
        self.table = {}
        for idx, rel in enumerate(spec.relators):
            r = rel.word
            for k in range(len(r) // 2 + 1, len(r) + 1):
                u = r[:k]
                if u not in self.table:
                    self.table[u] = (self.alphabet.invert(r[k:]), rel.height, idx)
        self.lengths = sorted({len(u) for u in self.table}, reverse=True)
        self.central = {x: spec.alphabet.central_sign(x) for x in spec.alphabet.central}
        self._cache = {}

    def free_reduce(self, word: str) -> str:
        return free_reduce_word(word, self.inverse)

    def _find(self, w):
        table = self.table
        n = len(w)
        for i in range(n):
            for k in self.lengths:
                if i + k <= n:
                    hit = table.get(w[i:i + k])
                    if hit is not None:
                        return i, k, hit
        return None

    def reduce(self, word: str, trace: ReductionTrace | None = None):
        """Deterministic reduction; returns (irreducible word, height)."""
        if trace is None:
            hit = self._cache.get(word)
            if hit is not None:
                return hit
        h = 0
        w = word
        if self.central:
            out = []
            for pos, x in enumerate(w):
                s = self.central.get(x)
                if s is None:
                    out.append(x)
                else:
                    h += s
                    if trace is not None:
                        trace.add("central-delete", pos, None, s)
            w = "".join(out)
        w = self._free(w, trace)
        while True:
            found = self._find(w)
            if found is None:
                break
            i, k, (repl, height, idx) = found
            w = w[:i] + repl + w[i + k:]
            h += height
            if trace is not None:
                trace.add("dehn-replace", i, idx, height)
            w = self._free(w, trace)
        if trace is None:
            if len(self._cache) > 2_000_000:
                self._cache.clear()
            self._cache[word] = (w, h)
        return w, h

    def _free(self, w, trace):
        if trace is None:
            return self.free_reduce(w)
        out = []
        inv = self.inverse
        for x in w:
            if out and out[-1] == inv[x]:
                out.pop()
                trace.add("free-cancel", len(out), None, 0)
            else:
                out.append(x)
        return "".join(out)

    def null_height(self, word: str, trace: ReductionTrace | None = None) -> int:
        w, h = self.reduce(word, trace)
        if w:
            raise NotNull(f"{word!r} is not the identity in G (reduced to {w!r})")
        return h

    def is_identity(self, word: str) -> bool:
        return not self.reduce(word)[0]

    def rel_height(self, w: str, c: str) -> int:
        return self.null_height(self.free_reduce(self.alphabet.invert(c) + w))

    def random_null_height(self, word: str, rng) -> int:
        """Reduce by uniformly random choices among all applicable moves."""
        inv = self.inverse
        w = word
        h = 0
        while True:
            moves = []
            for i, x in enumerate(w):
                s = self.central.get(x)
                if s is not None:
                    moves.append((i, 1, "", s))
                elif i + 1 < len(w) and w[i + 1] == inv[x]:
                    moves.append((i, 2, "", 0))
                for k in self.lengths:
                    if i + k <= len(w):
                        hit = self.table.get(w[i:i + k])
                        if hit is not None:
                            moves.append((i, k, hit[0], hit[1]))
            if not moves:
                break
            i, k, repl, delta = moves[rng.randbelow(len(moves))]
            w = w[:i] + repl + w[i + k:]
            h += delta
        if w:
            raise NotNull(f"{word!r} is not the identity in G (stuck at {w!r})")
        return h


@lru_cache(maxsize=None)
def solver(spec: ExtensionSpec) -> DehnSolver:
    return DehnSolver(spec)


def free_reduce(w: str, spec: ExtensionSpec) -> str:
    return free_reduce_word(w, spec.alphabet.inverse)


def null_height(w: str, spec: ExtensionSpec, trace: ReductionTrace | None = None) -> int:
    return solver(spec).null_height(w, trace)


def is_identity(w: str, spec: ExtensionSpec) -> bool:
    return solver(spec).is_identity(w)


def rel_height(w: str, c: str, spec: ExtensionSpec) -> int:
    """Height of the E-value of w relative to the E-value of c (same G-value)."""
    return solver(spec).rel_height(w, c)
