"""Homomorphisms from G to finite permutation groups and to free abelian groups.

Their images give a hash key for group elements: equal elements always get
equal keys, so a key lookup followed by an exact Dehn check locates an
element among the vertices of a ball.  Distinct elements may collide; that
costs a Dehn call, never correctness.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np

from .rng import SplitMix64

DEGREE = 16
COPIES = 3


def _random_perm(rng, n):
    return np.array(rng.sample_indices(n, n), dtype=np.int64)


def _word_perm(word, perms, n):
    p = np.arange(n)
    for x in word:
        p = perms[x][p]
    return p


def _cycles(p):
    seen = np.zeros(len(p), dtype=bool)
    out = []
    for i in range(len(p)):
        if not seen[i]:
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = p[j]
            out.append(cyc)
    return out


def _conjugator(src, dst, rng):
    """Permutation d with d[src[i]] = dst[d[i]] for all i, or None.

    Such d maps each cycle of ``src`` onto a cycle of ``dst`` of the same
    length, which exists iff both have the same cycle type.
    """
    a = _cycles(src)
    b = _cycles(dst)
    by_len = {}
    for cyc in b:
        by_len.setdefault(len(cyc), []).append(cyc)
    if sorted(len(c) for c in a) != sorted(len(c) for c in b):
        return None
    for cycs in by_len.values():
        order = rng.sample_indices(len(cycs), len(cycs))
        cycs[:] = [cycs[i] for i in order]
    d = np.empty(len(src), dtype=np.int64)
    for cyc in a:
        target = by_len[len(cyc)].pop()
        shift = rng.randbelow(len(cyc))
        for k, i in enumerate(cyc):
            d[i] = target[(k + shift) % len(cyc)]
    return d


def _solve_plan(spec):
    """Pick, per relator, a letter occurring once with each sign and nowhere else."""
    alph = spec.alphabet
    rels = [r.word for r in spec.base_relators]
    plan = []
    used = set()
    for j, r in enumerate(rels):
        choice = None
        for x, y in alph.pairs:
            if x in used:
                continue
            if r.count(x) == 1 and r.count(y) == 1 and not any(
                    x in s or y in s for k, s in enumerate(rels) if k != j):
                choice = (x, y)
                break
        if choice is None:
            return None
        used.add(choice[0])
        plan.append((r, choice))
    return plan


def find_permutation_reps(spec, degree=DEGREE, count=COPIES, seed=0x5EED, tries=4000):
    """Up to ``count`` homomorphisms G -> Sym(degree), as {letter: perm} dicts."""
    alph = spec.alphabet
    rng = SplitMix64(seed)
    rels = [r.word for r in spec.base_relators]
    plan = _solve_plan(spec) if rels else []
    reps = []
    if plan is None:
        return reps
    solved = {x for _, (x, _) in plan}
    for _ in range(tries):
        if len(reps) == count:
            break
        perms = {}
        for x, y in alph.pairs:
            if x not in solved:
                p = _random_perm(rng, degree)
                perms[x] = p
                perms[y] = np.argsort(p)
        ok = True
        for r, (x, y) in plan:
            # rotate r to x v y u, then x;v;x^-1 = u^-1 as maps
            if r.index(x) > r.index(y):
                r = alph.invert(r)
            i = r.index(x)
            r = r[i:] + r[:i]
            k = r.index(y)
            v, u = r[1:k], r[k + 1:]
            pv = _word_perm(v, perms, degree)
            pu_inv = np.argsort(_word_perm(u, perms, degree))
            # need d with pv[d[i]] = d[pu_inv[i]]
            d = _conjugator(pu_inv, pv, rng)
            if d is None:
                ok = False
                break
            perms[x] = d
            perms[y] = np.argsort(d)
        if not ok:
            continue
        ident = np.arange(degree)
        if all(np.array_equal(_word_perm(r, perms, degree), ident) for r in rels):
            reps.append(perms)
    return reps


def abelian_characters(spec):
    """Integer vectors phi (one entry per positive generator) killing every relator."""
    alph = spec.alphabet
    gens = [x for x, _ in alph.pairs]
    rows = []
    for rel in spec.base_relators:
        row = [0] * len(gens)
        for x in rel.word:
            for j, (p, q) in enumerate(alph.pairs):
                if x == p:
                    row[j] += 1
                elif x == q:
                    row[j] -= 1
        rows.append(row)
    if not rows:
        return [[int(i == j) for i in range(len(gens))] for j in range(len(gens))]
    import sympy

    basis = sympy.Matrix(rows).nullspace()
    out = []
    for vec in basis:
        vals = [Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in vec]
        m = lcm(*[f.denominator for f in vals]) if vals else 1
        out.append([int(f * m) for f in vals])
    return out


class Hasher:
    """Vectorized hash keys for group elements of G."""

    def __init__(self, spec):
        alph = spec.alphabet
        self.spec = spec
        reps = find_permutation_reps(spec)
        self.n_reps = len(reps)
        self.degree = DEGREE * len(reps)
        letters = alph.letters
        # block-diagonal sum of the permutation representations
        lp = np.tile(np.arange(max(self.degree, 1)), (len(letters), 1))
        for k, perms in enumerate(reps):
            off = k * DEGREE
            for i, x in enumerate(letters):
                if x in alph.central:
                    continue
                lp[i, off:off + DEGREE] = perms[x] + off
        self.pdtype = np.uint8 if lp.shape[1] <= 256 else np.int64
        self.letter_perm = lp.astype(self.pdtype)
        chars = abelian_characters(spec)
        self.n_chars = len(chars)
        la = np.zeros((len(letters), max(len(chars), 1)), dtype=np.int32)
        for c, phi in enumerate(chars):
            for j, (x, y) in enumerate(alph.pairs):
                la[alph.index[x], c] = phi[j]
                la[alph.index[y], c] = -phi[j]
        self.letter_ab = la
        wr = SplitMix64(0xC0FFEE)
        self.w_perm = np.array([wr.next_u64() | 1 for _ in range(lp.shape[1])], dtype=np.uint64)
        self.w_ab = np.array([wr.next_u64() | 1 for _ in range(la.shape[1])], dtype=np.uint64)

    def identity(self, n=1):
        perm = np.tile(np.arange(self.letter_perm.shape[1], dtype=self.pdtype), (n, 1))
        ab = np.zeros((n, self.letter_ab.shape[1]), dtype=np.int32)
        return perm, ab

    def step(self, perm, ab, letter_idx):
        """Images of g*x for rows g and per-row letter indices."""
        lp = self.letter_perm[letter_idx]
        child = np.take_along_axis(lp, perm, axis=1)
        return child, ab + self.letter_ab[letter_idx]

    def keys(self, perm, ab) -> np.ndarray:
        with np.errstate(over="ignore"):
            k = (perm.astype(np.uint64) * self.w_perm).sum(axis=1, dtype=np.uint64)
            k += (ab.astype(np.int64).astype(np.uint64) * self.w_ab).sum(axis=1, dtype=np.uint64)
        return k

    def word_key(self, word: str) -> int:
        idx = self.spec.alphabet.index
        perm, ab = self.identity()
        for x in word:
            i = np.array([idx[x]])
            perm, ab = self.step(perm, ab, i)
        return int(self.keys(perm, ab)[0])


@lru_cache(maxsize=None)
def hasher(spec) -> Hasher:
    return Hasher(spec)
