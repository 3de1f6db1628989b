"""Automata for the language L of maximising words.

The recogniser follows the falsification-by-fellow-traveller idea.  While
reading u it tracks, for every offset h in a small ball B(W) around the
current vertex, the best score ψ(h) of a competitor word ending at u·h,
measured relative to u's own score and transported along canonical words.
u stops being maximising as soon as a competitor reaches offset 1 with a
positive relative score.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .cayley import (BallIndex, ExtBallIndex, OutOfBall, left_steps, staircase_minimax)
from .maximise import NEG, NotMaximising, PotentialTable, reconstruct_maximising
from .rng import SplitMix64
from .wordproblem import solver

FAIL = 0
DEFAULT_STATE_CAP = 10**6


class StateCapExceeded(RuntimeError):
    pass


def _distance(ball: BallIndex, memo: dict, a: int, b: int) -> int:
    key = (a, b)
    d = memo.get(key)
    if d is None:
        d = ball.distance(a, b)
        memo[key] = d
    return d


def async_distance(ball: BallIndex, pu: list[int], pv: list[int], memo=None) -> int:
    memo = {} if memo is None else memo
    cost = np.array([[_distance(ball, memo, a, b) for b in pv] for a in pu], dtype=np.int64)
    return staircase_minimax(cost)


def estimate_delta(pt: PotentialTable, radius: int, ball: BallIndex | None = None) -> dict:
    """Max asynchronous distance between reconstructed maximising words.

    Ranges over all pairs of elements of B(radius) at distance <= 1 (pairs at
    distance 0 contribute 0).
    """
    ball = pt.ball if ball is None else ball
    alph = ball.spec.alphabet
    n = int(ball.level_start[radius + 1])
    paths = [ball.path(reconstruct_maximising(pt, g)) for g in range(n)]
    memo = {}
    best = 0
    argmax = None
    pairs = 0
    for g in range(n):
        for x in alph.noncentral:
            h = int(ball.adj[g, alph.index[x]])
            if h <= g or h >= n:
                continue
            pairs += 1
            d = async_distance(ball, paths[g], paths[h], memo)
            if d > best:
                best = d
                argmax = (ball.words[g], ball.words[h])
    return {"delta": int(best), "radius": radius, "pairs": pairs,
            "argmax": list(argmax) if argmax else None, "C": pt.C}


class MaximiserFsa:
    """Lazily built deterministic recogniser of maximising words.

    States are competitor profiles ψ over the window B(W), W = delta + 1,
    stored as tuples in the order of ball ids; state 0 is the fail state.
    In every live state the profile satisfies 0 <= C|h| - ψ(h) <= 2WC.
    """

    def __init__(self, ball: BallIndex, delta: int, C: int | None = None,
                 state_cap: int = DEFAULT_STATE_CAP):
        spec = ball.spec
        self.spec = spec
        self.alphabet = spec.alphabet
        self.letters = spec.alphabet.letters
        self.delta = delta
        self.W = delta + 1
        self.C = spec.C if C is None else C
        if ball.radius < self.W + 1:
            raise OutOfBall(f"the window needs a radius-{self.W + 1} ball")
        self.ball = ball
        self.state_cap = state_cap
        nW = int(ball.level_start[self.W + 1])
        self.n = nW
        self.norm = ball.norm[:nW].astype(np.int64)
        idx = spec.alphabet.index
        ladj, lsteps = left_steps(ball, nW)
        # shift on letter x: offset h becomes x̄⁻¹h, gaining C + k
        self.shift_to = {}
        self.shift_gain = {}
        for x in self.letters:
            j = idx[spec.alphabet.inverse[x]]
            to = ladj[:, j]
            ok = (to >= 0) & (to < nW)
            self.shift_to[x] = (np.nonzero(ok)[0], to[ok])
            self.shift_gain[x] = self.C + lsteps[ok, j]
        cols = [idx[y] for y in spec.alphabet.noncentral]
        src = np.repeat(np.arange(nW), len(cols))
        dst = ball.adj[:nW, cols].ravel().astype(np.int64)
        w = ball.step[:nW, cols].ravel().astype(np.int64) - self.C
        keep = (dst >= 0) & (dst < nW)
        self._src, self._dst, self._w = src[keep], dst[keep], w[keep]
        start = np.full(nW, NEG, dtype=np.int64)
        start[0] = 0
        self.states = [None]
        self.index = {}
        self.trans = {}
        self.start = self._intern(self._saturate(start))

    def _saturate(self, psi):
        src, dst, w = self._src, self._dst, self._w
        while True:
            new = psi.copy()
            np.maximum.at(new, dst, psi[src] + w)
            if np.array_equal(new, psi):
                return psi
            psi = new

    def _intern(self, psi) -> int:
        key = tuple(psi.tolist())
        s = self.index.get(key)
        if s is None:
            if len(self.states) > self.state_cap:
                raise StateCapExceeded(f"more than {self.state_cap} states")
            D = self.C * self.norm - psi
            if D.min() < 0 or D.max() > 2 * self.W * self.C:
                raise AssertionError("profile left [0, 2WC]")
            s = len(self.states)
            self.states.append(key)
            self.index[key] = s
        return s

    def step(self, state: int, x: str) -> int:
        if state == FAIL:
            return FAIL
        key = (state, x)
        t = self.trans.get(key)
        if t is not None:
            return t
        psi = np.array(self.states[state], dtype=np.int64)
        src, dst = self.shift_to[x]
        new = np.full(self.n, NEG, dtype=np.int64)
        new[dst] = psi[src] + self.shift_gain[x]
        new[0] = max(new[0], 0)
        new = self._saturate(new)
        t = FAIL if new[0] > 0 else self._intern(new)
        self.trans[key] = t
        return t

    def run(self, w: str) -> int:
        s = self.start
        for x in w:
            s = self.step(s, x)
        return s

    def accepts(self, w: str) -> bool:
        return self.run(w) != FAIL

    def explore(self) -> int:
        """Build every reachable state; returns the state count (fail included)."""
        seen = {self.start}
        queue = deque([self.start])
        while queue:
            s = queue.popleft()
            for x in self.letters:
                t = self.step(s, x)
                if t != FAIL and t not in seen:
                    seen.add(t)
                    queue.append(t)
        return len(seen) + 1

    def canonical_numbering(self) -> dict[int, int]:
        """BFS discovery order from the start state, fail state last."""
        order = {self.start: 0}
        queue = deque([self.start])
        while queue:
            s = queue.popleft()
            for x in self.letters:
                t = self.step(s, x)
                if t != FAIL and t not in order:
                    order[t] = len(order)
                    queue.append(t)
        order[FAIL] = len(order)
        return order

    def transition_table(self) -> list[list[int]]:
        num = self.canonical_numbering()
        rows = [None] * len(num)
        for s, i in num.items():
            rows[i] = [num[self.step(s, x)] for x in self.letters]
        return rows

    def to_dot(self) -> str:
        num = self.canonical_numbering()
        lines = ["digraph maximisers {", "  rankdir=LR;"]
        for s, i in sorted(num.items(), key=lambda kv: kv[1]):
            shape = "box" if s == FAIL else "circle"
            label = "fail" if s == FAIL else f"S{i}"
            lines.append(f'  q{i} [shape={shape}, label="{label}"];')
        for s, i in sorted(num.items(), key=lambda kv: kv[1]):
            if s == FAIL:
                continue
            for x in self.letters:
                lines.append(f'  q{i} -> q{num[self.step(s, x)]} [label="{x}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def profile(self, state: int) -> dict[str, int] | None:
        """The profile h -> C|h| - ψ(h), keyed by canonical offset words."""
        if state == FAIL:
            return None
        psi = np.array(self.states[state])
        D = self.C * self.norm - psi
        return {self.ball.words[h]: int(D[h]) for h in range(self.n)}


def build_fsa(pt: PotentialTable, delta: int, state_cap: int = DEFAULT_STATE_CAP,
              explore: bool = True) -> MaximiserFsa:
    fsa = MaximiserFsa(pt.ball, delta, pt.C, state_cap)
    if explore:
        fsa.explore()
    return fsa


def run_word(fsa: MaximiserFsa, w: str) -> bool:
    return fsa.accepts(w)


@dataclass
class AgreementReport:
    tested: int = 0
    disagreements: list = field(default_factory=list)

    def to_dict(self):
        return {"tested": self.tested, "disagreements": [list(d) for d in self.disagreements]}


def oracle_agreement(fsa: MaximiserFsa, pt: PotentialTable, max_len: int, mode: str = "exhaustive",
                     n: int = 1000, seed: int = 0, limit: int = 100) -> AgreementReport:
    """Compare FSA membership with is_maximising on words up to max_len.

    In exhaustive mode a subtree is skipped once both sides reject its root,
    since both languages are prefix closed; its words still count as tested.
    """
    ball = pt.ball
    letters = fsa.letters
    idx = fsa.alphabet.index
    L = len(letters)
    rep = AgreementReport()
    F, weight, adj = pt.F, pt.weight, ball.adj

    def subtree(depth):
        return sum(L ** j for j in range(max_len - depth + 1))

    def child(g, s, x):
        i = idx[x]
        h = int(adj[g, i])
        if h < 0 or ball.norm[h] > pt.valid_radius:
            raise OutOfBall("word leaves the certified radius")
        s2 = s + int(weight[g, i])
        return h, s2, s2 == F[h]

    if mode == "exhaustive":
        stack = [("", fsa.start, 0, 0, True)]
        while stack:
            w, st, g, s, ok = stack.pop()
            acc = st != FAIL
            if acc != ok:
                rep.tested += 1
                if len(rep.disagreements) < limit:
                    rep.disagreements.append((w, acc, ok))
                continue
            if not acc:
                rep.tested += subtree(len(w))
                continue
            rep.tested += 1
            if len(w) < max_len:
                for x in letters:
                    h, s2, tight = child(g, s, x)
                    stack.append((w + x, fsa.step(st, x), h, s2, tight))
        return rep
    if mode != "sample":
        raise ValueError(f"unknown mode {mode!r}")
    rng = SplitMix64(seed)
    for _ in range(n):
        k = rng.randint(0, max_len)
        w = "".join(letters[rng.randbelow(L)] for _ in range(k))
        g, s, ok = 0, 0, True
        for x in w:
            g, s, tight = child(g, s, x)
            ok = ok and tight
            if not ok:
                break
        acc = fsa.accepts(w)
        rep.tested += 1
        if acc != ok and len(rep.disagreements) < limit:
            rep.disagreements.append((w, acc, ok))
    return rep


def agree_with_retry(pt: PotentialTable, delta: int, max_len: int, retries: int = 2, **kw):
    """Build and check the FSA, retrying with delta + 1 on disagreement."""
    for d in range(delta, delta + retries + 1):
        fsa = build_fsa(pt, d, explore=False)
        rep = oracle_agreement(fsa, pt, max_len, **kw)
        if not rep.disagreements:
            break
    return fsa, rep


class FreeReductionDfa:
    """Reference automaton for freely reduced words over the non-central letters.

    States: 0 = start, 1 = dead, 2 + i = last letter was noncentral[i].
    """

    def __init__(self, alphabet):
        self.alphabet = alphabet
        self.letters = alphabet.letters
        self.nc = list(alphabet.noncentral)
        self.start = 0

    def step(self, s: int, x: str) -> int:
        if s == 1 or x in self.alphabet.central:
            return 1
        if s >= 2 and self.alphabet.inverse[self.nc[s - 2]] == x:
            return 1
        return 2 + self.nc.index(x)

    def accepts_state(self, s: int) -> bool:
        return s != 1


def product_equivalence(fsa: MaximiserFsa, ref, max_len: int) -> dict:
    """Breadth-first search of the product automaton up to depth max_len.

    Reports pairs of states reached by a common word on which acceptance
    differs.  If the search saturates before max_len, the languages agree
    (or differ) at every length.
    """
    start = (fsa.start, ref.start)
    depth = {start: 0}
    queue = deque([start])
    witness = {start: ""}
    bad = []
    while queue:
        pair = queue.popleft()
        a, b = pair
        if (a != FAIL) != ref.accepts_state(b):
            bad.append(witness[pair])
        if depth[pair] == max_len:
            continue
        for x in fsa.letters:
            nxt = (fsa.step(a, x), ref.step(b, x))
            if nxt not in depth:
                depth[nxt] = depth[pair] + 1
                witness[nxt] = witness[pair] + x
                queue.append(nxt)
    saturated = all(d < max_len for d in depth.values())
    return {"pairs": len(depth), "mismatches": bad, "saturated": saturated, "max_len": max_len}


def lift_eval(w: str, pt: PotentialTable) -> list[int]:
    """Fiber heights ρ-coordinates along w: the running score at each prefix."""
    ball = pt.ball
    out = []
    g, s = 0, 0
    for x in w:
        s += pt.edge_weight(g, x)
        g = int(ball.adj[g, ball.letter_index(x)])
        if ball.norm[g] > pt.valid_radius:
            raise OutOfBall("prefix beyond the valid radius")
        if s != pt.F[g]:
            raise NotMaximising(f"{w!r} is not maximising at prefix of length {len(out) + 1}")
        out.append(int(s))
    return out


def m_path(pt: PotentialTable, g: int, m: int) -> list[tuple[int, int]]:
    """E-vertices of the M-word for (g, m): the ρ-lift of canonical(g), then a central tail."""
    ball = pt.ball
    out = [(v, int(pt.F[v])) for v in ball.path(ball.words[g])]
    f = out[-1][1]
    step = 1 if m > f else -1
    for k in range(f + step, m + step, step) if m != f else []:
        out.append((g, k))
    return out


def _sync(ext: ExtBallIndex, p1, p2) -> int:
    n = max(len(p1), len(p2))
    return max(ext.d_E(p1[min(t, len(p1) - 1)], p2[min(t, len(p2) - 1)]) for t in range(n))


def biautomatic_lift_check(ext: ExtBallIndex, pt: PotentialTable, samples: int, seed: int = 0,
                           radius: int | None = None, fiber: int | None = None) -> dict:
    """Synchronous fellow travelling of M-words for E-elements at distance 1.

    An M-word for (g, m) is the ρ-lift of canonical(g) followed by a central
    tail.  Right side: the M-word of (g, m) against that of (g, m)·y.  Left
    side: the M-word of (g, m) translated by ē(y) against the M-word of
    ē(y)·(g, m).  Draws that leave B(radius) are redrawn, up to 20·samples.
    """
    ball = pt.ball
    alph = ball.spec.alphabet
    dehn = solver(ball.spec)
    if radius is None:
        radius = min(pt.valid_radius, ext.ball.radius) - 1
    if fiber is None:
        fiber = pt.C * radius
    n = int(ball.level_start[radius + 1])
    rng = SplitMix64(seed)
    right = left = 0
    used = 0
    letters = alph.letters
    tries = 0
    while used < samples and tries < 20 * samples:
        tries += 1
        g = rng.randbelow(n)
        m = rng.randint(-fiber, fiber)
        y = letters[rng.randbelow(len(letters))]
        i = alph.index[y]
        h = int(ball.adj[g, i])
        yg = ball.locate(y + ball.words[g])
        if h < 0 or ball.norm[h] > radius or yg is None or ball.norm[yg] > radius:
            continue
        p1 = m_path(pt, g, m)
        # right multiplication
        m2 = m + int(ball.step[g, i])
        right = max(right, _sync(ext, p1, m_path(pt, h, m2)))
        # left multiplication: ē(y)·(v, f) = (ȳv, f + left step)
        shifted = []
        for v, f in p1:
            yv = ball.element(y + ball.words[v])
            k = dehn.rel_height(y + ball.words[v], ball.words[yv])
            shifted.append((yv, f + k))
        mm = shifted[-1][1]
        left = max(left, _sync(ext, shifted, m_path(pt, yg, mm)))
        used += 1
    return {"max_sync_ft": int(max(right, left)), "right": int(right), "left": int(left),
            "samples": used, "C": pt.C}
