"""The maximising potential F and the language of maximising words.

For g in G, F(g) is the maximum over words w evaluating to g of
rel_height(w, canonical(g)) - C·len(w).  On a finite ball this is a
longest-path problem with edge weights step_height - C; all cycles have
negative weight, so Bellman-Ford value iteration converges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .cayley import BallIndex, OutOfBall, build_ball, DEFAULT_CAP
from .presentation import ExtensionSpec
from .wordproblem import solver

NEG = -(1 << 40)


class NonConvergence(RuntimeError):
    pass


class NotMaximising(ValueError):
    pass


def step_weight(ball: BallIndex, p: int, x: str, C: int | None = None) -> int:
    """Height gain minus C along the edge from p labelled x."""
    if C is None:
        C = ball.spec.C
    return ball.step_height(p, x) - C


def certified_radius(spec: ExtensionSpec, r: int, C: int | None = None, rate=None) -> int:
    """Smallest ball radius R on which longest paths give F exactly on B(r).

    A non-central word of length n from 1 to g has height at most rate·(n + |g|)
    relative to canonical(g), because each Dehn face removes at least one
    (odd relator) or two (even relator) letters.  Central letters only lower
    the score when C >= 1.  A word that leaves B(R) has length at least
    2R + 2 - |g|, so it scores at most -C|g| <= F(g) as soon as
    (C - rate)(2R + 2 - r) >= (C + rate)·r.
    """
    if C is None:
        C = spec.C
    if rate is None:
        rate = spec.dehn_rate
    rate = Fraction(rate)
    if C <= rate or C < 1:
        raise ValueError(f"C = {C} too small for the certificate (rate {rate})")
    R = r
    while (C - rate) * (2 * R + 2 - r) < (C + rate) * r:
        R += 1
    return R


def search_radius(spec: ExtensionSpec, r: int, C: int | None = None, rate=None) -> int:
    """Working radius: the certificate when available, else ceil(lambda·r)."""
    if C is None:
        C = spec.C
    if spec.unverified:
        tk = spec.T * spec.K
        return math.ceil(Fraction(C + tk, C - tk) * r)
    return certified_radius(spec, r, C, rate)


def longest_paths(ball: BallIndex, weight: np.ndarray, max_passes: int | None = None) -> np.ndarray:
    """Longest-path values from vertex 0 over non-central ball edges."""
    alph = ball.spec.alphabet
    cols = [alph.index[x] for x in alph.noncentral]
    n = ball.size
    src = np.repeat(np.arange(n), len(cols))
    dst = ball.adj[:, cols].ravel().astype(np.int64)
    w = weight[:, cols].ravel().astype(np.int64)
    keep = dst >= 0
    src, dst, w = src[keep], dst[keep], w[keep]
    order = np.argsort(dst, kind="stable")
    src, dst, w = src[order], dst[order], w[order]
    starts = np.flatnonzero(np.r_[True, dst[1:] != dst[:-1]])
    targets = dst[starts]
    F = np.full(n, NEG, dtype=np.int64)
    F[0] = 0
    if max_passes is None:
        max_passes = n * len(alph.letters) + 1
    for _ in range(max_passes):
        best = np.maximum.reduceat(F[src] + w, starts)
        new = F.copy()
        new[targets] = np.maximum(F[targets], best)
        new[0] = max(new[0], 0)
        if np.array_equal(new, F):
            return F
        if new[0] > 0:
            raise NonConvergence("positive cycle through the identity")
        F = new
    raise NonConvergence(f"no fixpoint after {max_passes} passes")


@dataclass
class PotentialTable:
    """F on a working ball, exact on elements of norm <= valid_radius."""

    ball: BallIndex
    C: int
    valid_radius: int
    F: np.ndarray
    weight: np.ndarray = field(repr=False)
    certified: bool = True

    @property
    def spec(self):
        return self.ball.spec

    def value(self, g: int) -> int:
        if self.ball.norm[g] > self.valid_radius:
            raise OutOfBall(f"F is only certified up to norm {self.valid_radius}")
        return int(self.F[g])

    def edge_weight(self, g: int, x: str) -> int:
        i = self.ball.letter_index(x)
        if self.ball.adj[g, i] < 0:
            raise OutOfBall(f"{self.ball.words[g]!r}·{x} leaves the ball")
        return int(self.weight[g, i])

    def scores(self, w: str):
        """Vertices and running scores along the path of w (OutOfBall if it leaves)."""
        g = 0
        s = 0
        out = [(0, 0)]
        for x in w:
            s += self.edge_weight(g, x)
            g = int(self.ball.adj[g, self.ball.letter_index(x)])
            out.append((g, s))
        return out


def compute_potential(spec: ExtensionSpec, target_radius: int, ball: BallIndex | None = None,
                      C: int | None = None, cap: int = DEFAULT_CAP) -> PotentialTable:
    """Exact F on B(target_radius) via longest paths over the working ball."""
    if C is None:
        C = spec.C
    if C <= spec.T * spec.K:
        raise ValueError(f"C = {C} must exceed T*K = {spec.T * spec.K}")
    R = search_radius(spec, target_radius, C)
    if ball is None or ball.radius < R:
        ball = build_ball(spec, R, cap=cap)
    weight = ball.step.astype(np.int64) - C
    return potential_from_weights(ball, C, target_radius, weight, not spec.unverified)


def potential_from_weights(ball, C, valid_radius, weight, certified=True) -> PotentialTable:
    F = longest_paths(ball, weight)
    return PotentialTable(ball, C, valid_radius, F, weight, certified)


def brute_force_table(spec: ExtensionSpec, ball: BallIndex, max_len: int, C: int | None = None,
                      targets=None) -> dict[int, int]:
    """Exhaustive maximum of rel_height(w, canonical(g)) - C·len(w) per target g.

    Heights come from Dehn's algorithm on whole words.  Words containing a
    cancelling pair x x⁻¹ or a central letter are skipped: deleting either
    gives a word to the same element with a strictly larger score (C > 1),
    so the maximum is attained among the remaining words.
    """
    if C is None:
        C = spec.C
    alph = spec.alphabet
    dehn = solver(spec)
    inv = alph.inverse
    if targets is None:
        targets = [g for g in range(ball.size) if ball.norm[g] <= max_len]
    targets = set(targets)
    best = {}

    def visit(w):
        g = ball.locate(w)
        if g is None or g not in targets:
            return
        s = dehn.rel_height(w, ball.words[g]) - C * len(w)
        if s > best.get(g, NEG):
            best[g] = s

    stack = [""]
    while stack:
        w = stack.pop()
        visit(w)
        if len(w) < max_len:
            for x in alph.noncentral:
                if not w or w[-1] != inv[x]:
                    stack.append(w + x)
    return best


def brute_force_potential(spec: ExtensionSpec, g_word: str, max_len: int, C: int | None = None) -> int:
    """Independent oracle for F at the element of ``g_word``."""
    if C is None:
        C = spec.C
    alph = spec.alphabet
    dehn = solver(spec)
    inv = alph.inverse
    best = NEG
    for n in range(max_len + 1):
        for tup in product(alph.noncentral, repeat=n):
            w = "".join(tup)
            if any(w[i + 1] == inv[w[i]] for i in range(n - 1)):
                continue
            probe = dehn.free_reduce(alph.invert(g_word) + w)
            if dehn.is_identity(probe):
                best = max(best, dehn.null_height(probe) - C * n)
    return best


def reconstruct_maximising(pt: PotentialTable, g: int) -> str:
    """A maximising word for g, by backtracking tight edges.

    At each step the smallest tight final letter (alphabet order) is taken,
    so the word is built right to left.
    """
    ball = pt.ball
    if ball.norm[g] > pt.valid_radius:
        raise OutOfBall(f"norm {ball.norm[g]} exceeds valid radius {pt.valid_radius}")
    alph = ball.spec.alphabet
    idx = alph.index
    out = []
    F = pt.F
    while g != 0:
        for x in alph.noncentral:
            p = int(ball.adj[g, idx[alph.inverse[x]]])
            if p >= 0 and F[p] + pt.weight[p, idx[x]] == F[g]:
                out.append(x)
                g = p
                break
        else:
            raise NonConvergence(f"no tight edge into {ball.words[g]!r}")
    return "".join(reversed(out))


def is_maximising(pt: PotentialTable, w: str) -> bool:
    """True iff every prefix of w scores exactly F at its endpoint."""
    ball = pt.ball
    g = 0
    s = 0
    for x in w:
        s += pt.edge_weight(g, x)
        g = int(ball.adj[g, ball.letter_index(x)])
        if ball.norm[g] > pt.valid_radius:
            raise OutOfBall(f"prefix endpoint {ball.words[g]!r} beyond valid radius {pt.valid_radius}")
        if s != pt.F[g]:
            return False
    return True


def quasigeodesic_violations(pt: PotentialTable, radius: int | None = None):
    """Reconstructed words w with len(w) > lambda·norm, over B(radius)."""
    if radius is None:
        radius = pt.valid_radius
    tk = pt.spec.T * pt.spec.K
    lam = Fraction(pt.C + tk, pt.C - tk)
    bad = []
    for g in range(int(pt.ball.level_start[radius + 1])):
        w = reconstruct_maximising(pt, g)
        if len(w) > lam * int(pt.ball.norm[g]):
            bad.append((pt.ball.words[g], w))
    return bad
