"""Balls in the Cayley graph of G, with canonical shortlex geodesics.

Elements are integer ids into a ``BallIndex``.  Ids are assigned in BFS
order, so they are sorted by norm and, within a sphere, by the shortlex
order of their canonical words.
"""

from __future__ import annotations

import struct
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .presentation import ExtensionSpec
from .quotients import hasher
from .rng import SplitMix64
from .wordproblem import solver

DEFAULT_CAP = 10**7
CHUNK = 400_000


class CapExceeded(RuntimeError):
    def __init__(self, message, radius_reached=None):
        super().__init__(message)
        self.radius_reached = radius_reached


class OutOfBall(LookupError):
    pass


class BallIndex:
    """Radius-r ball of G with adjacency, norms and canonical words.

    ``adj[g, i]`` is the id of g times letter i, or -1 when that product
    leaves the ball.  Central letters are loops.  ``step[g, i]`` is the step
    height of the edge: the height of ē(canonical(g)·x) over the base point
    ē(canonical(g·x)).
    """

    def __init__(self, spec, radius, words, adj, step=None, keys=None):
        self.spec = spec
        self.radius = radius
        self.words = words
        self.adj = adj
        self.norm = np.fromiter((len(w) for w in words), dtype=np.int32, count=len(words))
        self.level_start = np.searchsorted(self.norm, np.arange(radius + 2))
        if keys is None:
            keys = _recompute_keys(spec, words, adj)
        self.keys = keys
        self._key_order = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[self._key_order]
        self._step = step
        self._inverse = None

    def __len__(self):
        return len(self.words)

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def alphabet(self):
        return self.spec.alphabet

    def sphere(self, n) -> range:
        return range(int(self.level_start[n]), int(self.level_start[n + 1]))

    def canonical(self, g: int) -> str:
        return self.words[g]

    def letter_index(self, x: str) -> int:
        return self.spec.alphabet.index[x]

    def walk(self, word: str, start: int = 0):
        """Follow edges from ``start``; None as soon as the path leaves the ball."""
        idx = self.spec.alphabet.index
        g = start
        adj = self.adj
        for x in word:
            g = int(adj[g, idx[x]])
            if g < 0:
                return None
        return g

    def path(self, word: str, start: int = 0) -> list[int]:
        """Vertex ids of the path of ``word`` from ``start`` (OutOfBall if it leaves)."""
        idx = self.spec.alphabet.index
        out = [start]
        g = start
        for x in word:
            g = int(self.adj[g, idx[x]])
            if g < 0:
                raise OutOfBall(f"path of {word!r} leaves the radius-{self.radius} ball")
            out.append(g)
        return out

    def locate(self, word: str):
        """Id of the element represented by ``word``, or None outside the ball."""
        g = self.walk(word)
        if g is not None:
            return g
        key = np.uint64(hasher(self.spec).word_key(word))
        lo = np.searchsorted(self._sorted_keys, key, side="left")
        hi = np.searchsorted(self._sorted_keys, key, side="right")
        if lo == hi:
            return None
        dehn = solver(self.spec)
        inv = self.spec.alphabet.invert
        for j in range(lo, hi):
            c = int(self._key_order[j])
            if dehn.is_identity(dehn.free_reduce(inv(self.words[c]) + word)):
                return c
        return None

    def element(self, word: str) -> int:
        g = self.locate(word)
        if g is None:
            raise OutOfBall(f"{word!r} is outside the radius-{self.radius} ball")
        return g

    @property
    def inverse(self) -> np.ndarray:
        """inverse[g] is the id of g⁻¹ (balls are closed under inversion)."""
        if self._inverse is None:
            inv = self.spec.alphabet.invert
            out = np.empty(self.size, dtype=np.int64)
            for g, w in enumerate(self.words):
                out[g] = self.walk(inv(w))
            self._inverse = out
        return self._inverse

    def product(self, g: int, h: int):
        """Id of gh, or None if it is outside the ball."""
        r = self.walk(self.words[h], g)
        if r is None:
            r = self.locate(self.words[g] + self.words[h])
        return r

    def distance(self, g: int, h: int) -> int:
        w = self.spec.alphabet.invert(self.words[g]) + self.words[h]
        k = self.locate(w)
        if k is None:
            raise OutOfBall(f"g^-1 h for {self.words[g]!r}, {self.words[h]!r} is outside the ball")
        return int(self.norm[k])

    @property
    def step(self) -> np.ndarray:
        if self._step is None:
            self._step = _step_heights(self)
        return self._step

    def step_height(self, g: int, x: str) -> int:
        i = self.letter_index(x)
        if self.adj[g, i] < 0:
            raise OutOfBall(f"{self.words[g]!r}·{x} leaves the ball")
        return int(self.step[g, i])

    @cached_property
    def graph(self) -> csr_matrix:
        """Undirected adjacency of the non-central edges, for scipy.csgraph."""
        nc = [self.letter_index(x) for x in self.spec.alphabet.noncentral]
        sub = self.adj[:, nc]
        rows = np.repeat(np.arange(self.size), len(nc))
        cols = sub.ravel()
        keep = cols >= 0
        data = np.ones(int(keep.sum()), dtype=np.int8)
        return csr_matrix((data, (rows[keep], cols[keep])), shape=(self.size, self.size))


def _recompute_keys(spec, words, adj):
    H = hasher(spec)
    idx = spec.alphabet.index
    n = len(words)
    perm, ab = H.identity(n)
    keys = np.empty(n, dtype=np.uint64)
    keys[0] = H.keys(perm[:1], ab[:1])[0]
    norm = np.fromiter((len(w) for w in words), dtype=np.int64, count=n)
    last = np.fromiter((idx[w[-1]] if w else 0 for w in words), dtype=np.int64, count=n)
    inv_idx = np.array([idx[spec.alphabet.inverse[x]] for x in spec.alphabet.letters])
    parent = np.where(norm > 0, adj[np.arange(n), inv_idx[last]], -1)
    for r in range(1, int(norm.max()) + 1 if n else 0):
        sel = np.nonzero(norm == r)[0]
        p = parent[sel]
        perm[sel], ab[sel] = H.step(perm[p], ab[p], last[sel])
    keys[:] = H.keys(perm, ab)
    return keys


def _all_even(spec):
    return all(len(r.word) % 2 == 0 for r in spec.relators)


def build_ball(spec: ExtensionSpec, radius: int, cap: int = DEFAULT_CAP) -> BallIndex:
    """Exact BFS ball of G.

    Each BFS candidate g·x is hashed through finite and abelian quotients of
    G; a candidate is compared by Dehn's algorithm only with vertices of the
    same norm or candidates sharing its hash key, and the shortlex-first
    candidate of each class becomes the canonical representative.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    alph = spec.alphabet
    letters = alph.letters
    L = len(letters)
    idx = alph.index
    nc = np.array([idx[x] for x in alph.noncentral], dtype=np.int64)
    cen = [idx[x] for x in alph.central]
    inv_idx = np.array([idx[alph.inverse[x]] for x in letters], dtype=np.int64)
    H = hasher(spec)
    dehn = solver(spec)
    invert = alph.invert
    free = dehn.free_reduce
    same_level_possible = not _all_even(spec)

    adj = np.full((1024, L), -1, dtype=np.int32)
    words = [""]
    perm, ab = H.identity(1)
    level_keys = H.keys(perm, ab)
    all_keys = [level_keys]
    start, end = 0, 1

    def equal(w1, w2):
        return dehn.is_identity(free(invert(w1) + w2))

    for n in range(radius + 1):
        rows, cols = np.nonzero(adj[start:end][:, nc] == -1)
        lets = nc[cols]
        parents = rows + start
        ckeys = np.empty(len(rows), dtype=np.uint64)
        for a in range(0, len(rows), CHUNK):
            b = a + CHUNK
            cp, ca = H.step(perm[rows[a:b]], ab[rows[a:b]], lets[a:b])
            ckeys[a:b] = H.keys(cp, ca)
        target = np.full(len(rows), -1, dtype=np.int64)

        def cand_word(i):
            return words[parents[i]] + letters[lets[i]]

        if same_level_possible or n == 0:
            order = np.argsort(level_keys, kind="stable")
            sk = level_keys[order]
            pos = np.searchsorted(sk, ckeys)
            pos_c = np.minimum(pos, len(sk) - 1)
            for i in np.nonzero(sk[pos_c] == ckeys)[0]:
                w = cand_word(i)
                j = pos[i]
                while j < len(sk) and sk[j] == ckeys[i]:
                    q = start + int(order[j])
                    if equal(words[q], w):
                        target[i] = q
                        break
                    j += 1
        if n == radius:
            hit = np.nonzero(target >= 0)[0]
            adj[parents[hit], lets[hit]] = target[hit]
            adj[target[hit], inv_idx[lets[hit]]] = parents[hit]
            break

        rest = np.nonzero(target < 0)[0]
        _, inverse, counts = np.unique(ckeys[rest], return_inverse=True, return_counts=True)
        multi = counts[inverse] > 1
        is_new = ~multi
        rep_of = np.full(len(rest), -1, dtype=np.int64)
        groups = {}
        for i in np.nonzero(multi)[0]:
            reps = groups.setdefault(int(inverse[i]), [])
            w = cand_word(rest[i])
            for r in reps:
                if equal(cand_word(rest[r]), w):
                    rep_of[i] = r
                    break
            else:
                reps.append(i)
                is_new[i] = True
        n_new = int(is_new.sum())
        if end + n_new > cap:
            raise CapExceeded(
                f"ball of radius {n + 1} exceeds the cap of {cap} vertices", radius_reached=n)
        new_ids = end + np.cumsum(is_new) - 1
        tgt = np.where(is_new, new_ids, -1)
        merged = rep_of >= 0
        tgt[merged] = new_ids[rep_of[merged]]
        target[rest] = tgt

        while adj.shape[0] < end + n_new:
            adj = np.concatenate([adj, np.full_like(adj, -1)])
        adj[parents, lets] = target
        adj[target, inv_idx[lets]] = parents
        fresh = rest[is_new]
        words.extend(words[p] + letters[x] for p, x in zip(parents[fresh].tolist(), lets[fresh].tolist()))
        perm, ab = H.step(perm[rows[fresh]], ab[rows[fresh]], lets[fresh])
        level_keys = ckeys[fresh]
        all_keys.append(level_keys)
        start, end = end, end + n_new
        if n_new == 0:
            break

    adj = adj[:len(words)].copy()
    for c in cen:
        adj[:, c] = np.arange(len(words), dtype=np.int32)
    return BallIndex(spec, radius, words, adj, keys=np.concatenate(all_keys))


def _step_heights(ball: BallIndex) -> np.ndarray:
    spec = ball.spec
    alph = spec.alphabet
    dehn = solver(spec)
    invert = alph.invert
    free = dehn.free_reduce
    letters = alph.letters
    idx = alph.index
    inv_idx = np.array([idx[alph.inverse[x]] for x in letters])
    n = ball.size
    adj = ball.adj
    out = np.zeros(adj.shape, dtype=np.int32)
    for x in alph.central:
        out[:, idx[x]] = alph.central_sign(x)
    words = ball.words
    norm = ball.norm
    last = np.fromiter((idx[w[-1]] if w else -1 for w in words), dtype=np.int64, count=n)
    for i, x in enumerate(letters):
        if x in alph.central:
            continue
        q = adj[:, i].astype(np.int64)
        ok = q >= 0
        g = np.arange(n)
        qq = np.where(ok, q, 0)
        # tree edges, in either direction, have height 0
        tree = ok & (((norm[qq] == norm + 1) & (last[qq] == i) & (adj[qq, inv_idx[i]] == g))
                     | ((norm == norm[qq] + 1) & (last == inv_idx[i])))
        todo = np.nonzero(ok & ~tree & (g <= qq))[0]
        j = inv_idx[i]
        for p in todo.tolist():
            t = int(q[p])
            h = dehn.null_height(free(invert(words[t]) + words[p] + x))
            out[p, i] = h
            out[t, j] = -h
    return out


def fellow_travel_distance(u: str, v: str, ball: BallIndex, mode: str = "synchronous") -> int:
    """Fellow-traveller distance of the paths of u and v from 1."""
    pu = ball.path(u)
    pv = ball.path(v)
    if mode == "synchronous":
        n = max(len(pu), len(pv))
        return max(ball.distance(pu[min(t, len(pu) - 1)], pv[min(t, len(pv) - 1)])
                   for t in range(n))
    if mode != "asynchronous":
        raise ValueError(f"unknown mode {mode!r}")
    cost = np.array([[ball.distance(a, b) for b in pv] for a in pu], dtype=np.int64)
    return int(staircase_minimax(cost))


def staircase_minimax(cost: np.ndarray) -> int:
    """Min over monotone right/up/diagonal staircases of the max cost visited."""
    n, m = cost.shape
    best = np.empty_like(cost)
    for i in range(n):
        for j in range(m):
            if i == 0 and j == 0:
                prev = cost[0, 0]
            else:
                opts = []
                if i:
                    opts.append(best[i - 1, j])
                if j:
                    opts.append(best[i, j - 1])
                if i and j:
                    opts.append(best[i - 1, j - 1])
                prev = min(opts)
            best[i, j] = max(prev, cost[i, j])
    return int(best[-1, -1])


def thinness_sample(ball: BallIndex, samples: int, seed: int = 0) -> dict:
    """Sampled inscribed-centre constant of geodesic triangles (1, g, gh).

    Sides are the canonical words of g, h (translated by g) and gh.  For
    each triangle whose sides stay in the ball, k is the least value such
    that some vertex lies within k of all three sides, distances being
    measured in the ball graph.  Returns the maximum k over the samples.
    """
    if ball.radius < 2:
        raise ValueError("thinness sampling needs radius >= 2")
    rng = SplitMix64(seed)
    graph = ball.graph
    worst = 0
    used = 0
    # side lengths are drawn uniformly first, so short sides are not swamped
    # by the outer sphere; triangles leaving the ball are rejected
    ls = ball.level_start
    tries = 0
    while used < samples and tries < 50 * samples:
        tries += 1
        n1 = rng.randint(0, ball.radius)
        n2 = rng.randint(0, ball.radius)
        g = int(ls[n1]) + rng.randbelow(int(ls[n1 + 1] - ls[n1]))
        h = int(ls[n2]) + rng.randbelow(int(ls[n2 + 1] - ls[n2]))
        try:
            side_a = ball.path(ball.words[g])
            side_b = ball.path(ball.words[h], g)
        except OutOfBall:
            continue
        gh = side_b[-1]
        side_c = ball.path(ball.words[gh])
        used += 1
        k = triangle_centre_k(graph, (side_a, side_b, side_c))
        worst = max(worst, k)
    return {"max_inscribed_k": int(worst), "samples": used, "radius": ball.radius}


def triangle_centre_k(graph, sides) -> int:
    dist = np.stack([dijkstra(graph, directed=False, indices=list(s), unweighted=True,
                              min_only=True) for s in sides])
    return int(np.min(dist.max(axis=0)))


class ExtBallIndex:
    """Vertices (g, m) of E over a G-ball, with |m| <= clamp.

    (g, m) stands for s₀(g)·ι(m).  Non-central letters move along ball
    edges, adding the step height; central letters change m by ±1.
    """

    def __init__(self, ball: BallIndex, clamp: int):
        if clamp < 1:
            raise ValueError("fiber clamp must be >= 1")
        self.ball = ball
        self.clamp = clamp
        self.width = 2 * clamp + 1
        self._dist = None

    @property
    def size(self):
        return self.ball.size * self.width

    def vid(self, g: int, m: int) -> int:
        if abs(m) > self.clamp:
            raise OutOfBall(f"fiber height {m} outside clamp {self.clamp}")
        return g * self.width + m + self.clamp

    def move(self, g: int, m: int, x: str):
        """Vertex after letter x, or None when it leaves the window."""
        ball = self.ball
        i = ball.letter_index(x)
        q = int(ball.adj[g, i])
        if q < 0:
            return None
        m2 = m + int(ball.step[g, i])
        if abs(m2) > self.clamp:
            return None
        return q, m2

    @cached_property
    def graph(self) -> csr_matrix:
        ball = self.ball
        n, w, c = ball.size, self.width, self.clamp
        src, dst = [], []
        m = np.arange(-c, c + 1)
        for i, x in enumerate(ball.spec.alphabet.letters):
            q = ball.adj[:, i].astype(np.int64)
            s = ball.step[:, i].astype(np.int64)
            G = np.repeat(np.arange(n), w)
            M = np.tile(m, n)
            Q = np.repeat(q, w)
            M2 = M + np.repeat(s, w)
            ok = (Q >= 0) & (np.abs(M2) <= c)
            src.append((G * w + M + c)[ok])
            dst.append((Q * w + M2 + c)[ok])
        src = np.concatenate(src)
        dst = np.concatenate(dst)
        data = np.ones(len(src), dtype=np.int8)
        return csr_matrix((data, (src, dst)), shape=(self.size, self.size))

    @property
    def dist_from_origin(self) -> np.ndarray:
        if self._dist is None:
            self._dist = dijkstra(self.graph, directed=True, indices=self.vid(0, 0),
                                  unweighted=True)
        return self._dist

    def d_E(self, a, b) -> int:
        """Word-metric distance between vertices a=(g1,m1) and b=(g2,m2).

        Uses left invariance: the distance equals the distance from the
        origin to a⁻¹b, relocated into base coordinates.
        """
        (g1, m1), (g2, m2) = a, b
        ball = self.ball
        w = ball.spec.alphabet.invert(ball.words[g1]) + ball.words[g2]
        k = ball.element(w)
        m = solver(ball.spec).rel_height(w, ball.words[k]) + m2 - m1
        d = self.dist_from_origin[self.vid(k, m)]
        if not np.isfinite(d):
            raise OutOfBall("no path inside the extended ball window")
        return int(d)


def build_ext_ball(spec: ExtensionSpec, g_radius: int, fiber_clamp: int,
                   ball: BallIndex | None = None, cap: int = DEFAULT_CAP) -> ExtBallIndex:
    if ball is None or ball.radius != g_radius:
        ball = build_ball(spec, g_radius, cap=cap)
    if ball.size * (2 * fiber_clamp + 1) > cap:
        raise CapExceeded(f"extended ball exceeds the cap of {cap} vertices", radius_reached=g_radius)
    return ExtBallIndex(ball, fiber_clamp)


def left_adjacency(ball: BallIndex, rows=None) -> np.ndarray:
    """ladj[g, i] = id of x_i·g, or -1 outside the ball (via inverses)."""
    alph = ball.spec.alphabet
    idx = alph.index
    inv = ball.inverse
    if rows is None:
        rows = np.arange(ball.size)
    rows = np.asarray(rows)
    out = np.full((len(rows), len(alph.letters)), -1, dtype=np.int64)
    for i, x in enumerate(alph.letters):
        j = idx[alph.inverse[x]]
        # x·g = (g⁻¹·x⁻¹)⁻¹
        t = ball.adj[inv[rows], j].astype(np.int64)
        out[:, i] = np.where(t >= 0, inv[np.maximum(t, 0)], -1)
    return out


def left_steps(ball: BallIndex, n: int):
    """Left-Cayley edges g -> x̄g for g < n with step height h₀(inv(c_{x̄g})·x·c_g)."""
    alph = ball.spec.alphabet
    dehn = solver(ball.spec)
    invert = alph.invert
    ladj = left_adjacency(ball, np.arange(n))
    steps = np.zeros(ladj.shape, dtype=np.int64)
    for i, x in enumerate(alph.letters):
        if x in alph.central:
            steps[:, i] = alph.central_sign(x)
            continue
        for g in range(n):
            t = int(ladj[g, i])
            if t >= 0:
                steps[g, i] = dehn.null_height(dehn.free_reduce(invert(ball.words[t]) + x + ball.words[g]))
    return ladj, steps


def hash_state(ball: BallIndex, n: int):
    """Quotient images (perm, ab) of the first n ball elements."""
    spec = ball.spec
    H = hasher(spec)
    idx = spec.alphabet.index
    inv_idx = np.array([idx[spec.alphabet.inverse[x]] for x in spec.alphabet.letters])
    perm, ab = H.identity(n)
    words = ball.words
    for g in range(1, n):
        x = idx[words[g][-1]]
        p = int(ball.adj[g, inv_idx[x]])
        perm[g] = H.letter_perm[x][perm[p]]
        ab[g] = ab[p] + H.letter_ab[x]
    return perm, ab


def product_table(ball: BallIndex, r: int) -> np.ndarray:
    """M[g, h] = id of gh when g, h, gh all have norm <= r, else -1.

    Products are walked along ball edges; pairs whose walk leaves the ball
    are resolved through quotient hash keys and confirmed by Dehn.
    """
    n = int(ball.level_start[r + 1])
    idx = ball.spec.alphabet.index
    M = np.full((n, n), -1, dtype=np.int32)
    adj = ball.adj
    base = np.arange(n)
    lost_g, lost_h = [], []
    for h in range(n):
        G = base.copy()
        for x in ball.words[h]:
            i = idx[x]
            G = np.where(G >= 0, adj[np.maximum(G, 0), i], -1)
        lost = np.nonzero(G < 0)[0]
        if len(lost):
            lost_g.append(lost)
            lost_h.append(np.full(len(lost), h))
        M[:, h] = np.where((G >= 0) & (ball.norm[np.maximum(G, 0)] <= r), G, -1)
    if lost_g:
        gs = np.concatenate(lost_g)
        hs = np.concatenate(lost_h)
        H = hasher(ball.spec)
        perm, ab = hash_state(ball, n)
        keys = np.empty(len(gs), dtype=np.uint64)
        for a in range(0, len(gs), CHUNK // 4):
            g_, h_ = gs[a:a + CHUNK // 4], hs[a:a + CHUNK // 4]
            keys[a:a + len(g_)] = H.keys(np.take_along_axis(perm[h_], perm[g_], axis=1),
                                         ab[g_] + ab[h_])
        own = ball.keys[:n]
        order = np.argsort(own, kind="stable")
        sk = own[order]
        pos = np.minimum(np.searchsorted(sk, keys), n - 1)
        dehn = solver(ball.spec)
        invert = ball.spec.alphabet.invert
        words = ball.words
        for j in np.nonzero(sk[pos] == keys)[0].tolist():
            g, h = int(gs[j]), int(hs[j])
            k = int(pos[j])
            while k < n and sk[k] == keys[j]:
                c = int(order[k])
                if dehn.is_identity(dehn.free_reduce(invert(words[c]) + words[g] + words[h])):
                    M[g, h] = c
                    break
                k += 1
    return M


# -- disk cache ---------------------------------------------------------------

MAGIC = b"XCENT1"
_HEADER = struct.Struct("<6s32sIQHH")


def _record_dtype(L, maxlen):
    return np.dtype([("word", "u1", (max(maxlen, 1),)), ("norm", "<u2"),
                     ("adj", "<i4", (L,)), ("step", "<i4", (L,))])


def save_ball(ball: BallIndex, path) -> None:
    """Write the ball in the XCENT1 format (little-endian, fixed width)."""
    alph = ball.spec.alphabet
    idx = alph.index
    L = len(alph.letters)
    maxlen = int(ball.norm.max()) if ball.size else 0
    rec = np.zeros(ball.size, dtype=_record_dtype(L, maxlen))
    rec["word"] = 0xFF
    for g, w in enumerate(ball.words):
        if w:
            rec["word"][g, :len(w)] = [idx[x] for x in w]
    rec["norm"] = ball.norm
    rec["adj"] = ball.adj
    rec["step"] = ball.step
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, bytes.fromhex(ball.spec.group_digest), ball.radius,
                              ball.size, L, maxlen))
        fh.write(rec.tobytes())
    tmp.replace(path)


def load_ball(spec: ExtensionSpec, path, radius: int | None = None) -> BallIndex:
    data = Path(path).read_bytes()
    magic, digest, r, n, L, maxlen = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"{path}: not an XCENT1 ball cache")
    if digest.hex() != spec.group_digest:
        raise ValueError(f"{path}: cache belongs to a different presentation")
    if radius is not None and r != radius:
        raise ValueError(f"{path}: cache holds radius {r}, not {radius}")
    letters = spec.alphabet.letters
    if L != len(letters):
        raise ValueError(f"{path}: alphabet size mismatch")
    rec = np.frombuffer(data, dtype=_record_dtype(L, maxlen), count=n, offset=_HEADER.size)
    words = []
    for row, k in zip(rec["word"], rec["norm"]):
        words.append("".join(letters[i] for i in row[:k]))
    return BallIndex(spec, r, words, np.array(rec["adj"], dtype=np.int32),
                     step=np.array(rec["step"], dtype=np.int32))


def cache_path(cache_dir, spec: ExtensionSpec, radius: int) -> Path:
    return Path(cache_dir) / f"ball-{spec.group_digest[:16]}-r{radius}.xcent1"


def cached_ball(spec: ExtensionSpec, radius: int, cache_dir=None, cap: int = DEFAULT_CAP) -> BallIndex:
    """Load the ball from ``cache_dir`` if present, else build and store it."""
    if cache_dir is None:
        return build_ball(spec, radius, cap=cap)
    p = cache_path(cache_dir, spec, radius)
    if p.exists():
        try:
            return load_ball(spec, p, radius)
        except ValueError:
            pass
    ball = build_ball(spec, radius, cap=cap)
    save_ball(ball, p)
    return ball

