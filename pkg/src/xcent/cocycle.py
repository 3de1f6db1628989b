"""2-cocycles of G in fiber coordinates.

Every cocycle here is the base cocycle σ₀ of the canonical-word section plus
the coboundary of a potential.  Potentials and values are stored doubled, so
the half-integer heights of the averaged section q stay exact integers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cayley import (BallIndex, ExtBallIndex, OutOfBall, left_adjacency, left_steps,
                     product_table)
from .maximise import PotentialTable, longest_paths, search_radius
from .rng import SplitMix64
from .wordproblem import solver

EXHAUSTIVE_LIMIT = 10**6


class MissingPotential(LookupError):
    pass


class InputNotWeaklyBounded(ValueError):
    pass


def half(v2: int):
    """Doubled integer to an int, or to an 'n/2' string for odd values."""
    v2 = int(v2)
    return v2 // 2 if v2 % 2 == 0 else f"{v2}/2"


def sigma0(ball: BallIndex, g: int, h: int, gh: int | None = None) -> int:
    """h₀(inv(canonical(gh))·canonical(g)·canonical(h))."""
    if gh is None:
        gh = ball.product(g, h)
        if gh is None:
            raise OutOfBall("gh is outside the ball")
    dehn = solver(ball.spec)
    w = ball.spec.alphabet.invert(ball.words[gh]) + ball.words[g] + ball.words[h]
    return dehn.null_height(dehn.free_reduce(w))


@dataclass
class CocycleView:
    """σ(g,h) = σ₀(g,h) + ½(P(g) + P(h) - P(gh)) with P stored doubled."""

    ball: BallIndex
    potential: np.ndarray
    label: str
    valid_radius: int
    C: int | None = None
    _s0: dict = field(default_factory=dict, repr=False)

    def P(self, g: int) -> int:
        if self.ball.norm[g] > self.valid_radius:
            raise MissingPotential(f"no potential beyond norm {self.valid_radius}")
        return int(self.potential[g])

    def sigma0(self, g: int, h: int, gh: int) -> int:
        key = (g, h)
        v = self._s0.get(key)
        if v is None:
            v = sigma0(self.ball, g, h, gh)
            self._s0[key] = v
        return v

    def value2(self, g: int, h: int, gh: int | None = None) -> int:
        """Doubled value of σ(g, h)."""
        if gh is None:
            gh = self.ball.product(g, h)
            if gh is None:
                raise OutOfBall("gh is outside the ball")
        return 2 * self.sigma0(g, h, gh) + self.P(g) + self.P(h) - self.P(gh)

    def value(self, g: int, h: int) -> Fraction:
        return Fraction(self.value2(g, h), 2)


def sigma_of_section(view: CocycleView, g: int, h: int) -> int:
    return view.value2(g, h)


def base_view(ball: BallIndex) -> CocycleView:
    return CocycleView(ball, np.zeros(ball.size, dtype=np.int64), "sigma0", ball.radius)


def rho_view(pt: PotentialTable) -> CocycleView:
    return CocycleView(pt.ball, 2 * pt.F, "rho", pt.valid_radius, pt.C)


def inverse_offsets(ball: BallIndex, radius: int) -> np.ndarray:
    """m(g) = rel_height(inv(canonical(g⁻¹)), canonical(g)) for norm <= radius.

    ρ(g⁻¹)⁻¹ sits at fiber height m(g) - F(g⁻¹) over g.
    """
    n = int(ball.level_start[radius + 1])
    dehn = solver(ball.spec)
    invert = ball.spec.alphabet.invert
    inv = ball.inverse
    out = np.zeros(n, dtype=np.int64)
    for g in range(1, n):
        out[g] = dehn.rel_height(invert(ball.words[inv[g]]), ball.words[g])
    return out


def symmetrize_q(pt: PotentialTable, ball: BallIndex | None = None) -> CocycleView:
    """Section q(g) = ½(ρ(g) + ρ(g⁻¹)⁻¹) as a doubled potential."""
    ball = pt.ball if ball is None else ball
    r = pt.valid_radius
    n = int(ball.level_start[r + 1])
    m = inverse_offsets(ball, r)
    inv = ball.inverse[:n]
    Q = np.zeros(ball.size, dtype=np.int64)
    Q[:n] = pt.F[:n] + m - pt.F[inv]
    view = CocycleView(ball, Q, "q", r, pt.C)
    view.m = m
    return view


def floor_section(view: CocycleView) -> CocycleView:
    if view.label != "q":
        raise ValueError("floor_section expects a q view")
    P = 2 * np.floor_divide(view.potential, 2)
    return CocycleView(view.ball, P, "floor-q", view.valid_radius, view.C)


def custom_view(ball: BallIndex, potential2, valid_radius: int, label="custom") -> CocycleView:
    return CocycleView(ball, np.asarray(potential2, dtype=np.int64), label, valid_radius)


def inverse_q_violations(view: CocycleView, radius: int) -> list:
    """Elements g where Q(g) + Q(g⁻¹) != 2·m(g⁻¹), i.e. q(g⁻¹) != q(g)⁻¹.

    m is recomputed here by Dehn's algorithm, independently of the view.
    """
    ball = view.ball
    dehn = solver(ball.spec)
    invert = ball.spec.alphabet.invert
    inv = ball.inverse
    bad = []
    for g in range(int(ball.level_start[radius + 1])):
        gi = int(inv[g])
        m_gi = dehn.null_height(dehn.free_reduce(invert(ball.words[gi]) + invert(ball.words[g])))
        if view.P(g) + view.P(gi) != 2 * m_gi:
            bad.append(ball.words[g])
    return bad


@dataclass
class ScanReport:
    radius: int
    mode: str
    label: str
    C: int | None
    max_abs2: int = 0
    argmax: tuple | None = None
    histogram: Counter = field(default_factory=Counter)
    violations: int = 0
    sampled: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def max_abs(self) -> Fraction:
        return Fraction(self.max_abs2, 2)

    @property
    def pairs(self) -> int:
        return sum(self.histogram.values())

    def add(self, v2: int, where):
        self.histogram[int(v2)] += 1
        if self.argmax is None or abs(v2) > self.max_abs2:
            self.max_abs2 = abs(int(v2))
            self.argmax = where

    def to_dict(self) -> dict:
        d = {
            "mode": self.label,
            "scan": self.mode,
            "C": self.C,
            "radius": self.radius,
            "max_abs": half(self.max_abs2),
            "argmax": list(self.argmax) if self.argmax else None,
            "histogram": {str(half(k)): v for k, v in sorted(self.histogram.items())},
            "pairs": self.pairs,
            "sampled": self.sampled,
        }
        if self.mode == "identity":
            d["violations"] = self.violations
        d.update(self.extra)
        return d


def cocycle_identity_check(view: CocycleView, radius: int) -> ScanReport:
    """σ(g,h₁h₂) + σ(h₁,h₂) = σ(g,h₁) + σ(gh₁,h₂) on every triple inside B(radius)."""
    ball = view.ball
    M = product_table(ball, radius)
    n = M.shape[0]
    rep = ScanReport(radius, "identity", view.label, view.C)
    words = ball.words
    for g in range(n):
        for h1 in range(n):
            gh1 = int(M[g, h1])
            if gh1 < 0:
                continue
            for h2 in np.nonzero(M[h1] >= 0)[0].tolist():
                h12 = int(M[h1, h2])
                g12 = int(M[g, h12])
                if g12 < 0 or M[gh1, h2] != g12:
                    continue
                lhs = view.value2(g, h12, g12) + view.value2(h1, h2, h12)
                rhs = view.value2(g, h1, gh1) + view.value2(gh1, h2, g12)
                rep.histogram[lhs - rhs] += 1
                if lhs != rhs:
                    rep.violations += 1
                    rep.argmax = (words[g], words[h1], words[h2])
    rep.max_abs2 = max((abs(k) for k in rep.histogram), default=0)
    return rep


def _letter_offsets(ball: BallIndex):
    """rel_height(canonical(x̄), x) per non-central letter x."""
    dehn = solver(ball.spec)
    out = {}
    for x in ball.spec.alphabet.noncentral:
        xb = ball.walk(x)
        out[x] = (xb, dehn.rel_height(ball.words[xb], x))
    return out


def weak_bound_scan(view: CocycleView, radius: int, side: str = "both") -> ScanReport:
    """Weak-boundedness scan over g in B(radius) and non-central letters x.

    The scanned values are those of the cocycle normalized on generators,
    s(x̄) = ē(x): on the right s(g)ē(x) against s(g·x̄), on the left ē(x)s(g)
    against s(x̄·g).  For the maximising section both are within C.  The
    raw values σ(g, x̄) and σ(x̄, g) of the view are reported alongside.
    """
    ball = view.ball
    alph = ball.spec.alphabet
    n = int(ball.level_start[radius + 1])
    rep = ScanReport(radius, "weak", view.label, view.C)
    offs = _letter_offsets(ball)
    dehn = solver(ball.spec)
    invert = alph.invert
    right = left = raw = 0
    if side in ("both", "right"):
        for x in alph.noncentral:
            i = alph.index[x]
            xb, off = offs[x]
            for g in range(n):
                gx = int(ball.adj[g, i])
                if gx < 0:
                    raise OutOfBall("radius + 1 exceeds the ball")
                step = int(ball.step[g, i])
                v2 = 2 * step + view.P(g) - view.P(gx)
                rep.add(v2, (ball.words[g], x, "right"))
                right = max(right, abs(v2))
                raw = max(raw, abs(v2 + 2 * off + view.P(xb)))
    if side in ("both", "left"):
        ladj = left_adjacency(ball, np.arange(n))
        for x in alph.noncentral:
            i = alph.index[x]
            xb, off = offs[x]
            for g in range(n):
                xg = int(ladj[g, i])
                if xg < 0:
                    raise OutOfBall("radius + 1 exceeds the ball")
                step = dehn.null_height(dehn.free_reduce(invert(ball.words[xg]) + x + ball.words[g]))
                v2 = 2 * step + view.P(g) - view.P(xg)
                rep.add(v2, (x, ball.words[g], "left"))
                left = max(left, abs(v2))
                raw = max(raw, abs(v2 + 2 * off + view.P(xb)))
    rep.extra = {"max_abs_right": half(right), "max_abs_left": half(left),
                 "raw_max_abs": half(raw)}
    return rep


def valid_pairs(ball: BallIndex, radius: int):
    M = product_table(ball, radius)
    g, h = np.nonzero(M >= 0)
    return g, h, M[g, h]


def full_bound_scan(view: CocycleView, radius: int, sample: int = 10**5, seed: int = 0,
                    limit: int = EXHAUSTIVE_LIMIT) -> ScanReport:
    """max |σ(g,h)| over pairs with g, h, gh in B(radius).

    Exhaustive when there are at most ``limit`` such pairs, otherwise over
    ``sample`` pairs drawn uniformly (with replacement) by the seeded PRNG.
    """
    ball = view.ball
    G, H, GH = valid_pairs(ball, radius)
    rep = ScanReport(radius, "full", view.label, view.C)
    if len(G) <= limit:
        picks = range(len(G))
    else:
        rng = SplitMix64(seed)
        picks = [rng.randbelow(len(G)) for _ in range(sample)]
        rep.sampled = True
    words = ball.words
    for k in picks:
        g, h, gh = int(G[k]), int(H[k]), int(GH[k])
        rep.add(view.value2(g, h, gh), (words[g], words[h]))
    rep.extra = {"valid_pairs": int(len(G))}
    return rep


def inverse_pair_scan(view: CocycleView, radius: int) -> dict:
    """max |σ(g, g⁻¹)| per sphere up to ``radius`` (doubled values)."""
    ball = view.ball
    inv = ball.inverse
    out = {}
    for r in range(radius + 1):
        best = 0
        for g in ball.sphere(r):
            best = max(best, abs(view.value2(g, int(inv[g]), 0)))
        out[r] = best
    return out


def level_set(view: CocycleView, x: str, a2: int, radius: int) -> list[str]:
    """Canonical words of g in B(radius) with doubled σ(g, x̄) equal to a2."""
    ball = view.ball
    i = ball.letter_index(x)
    xb, off = _letter_offsets(ball)[x]
    out = []
    for g in range(int(ball.level_start[radius + 1])):
        gx = int(ball.adj[g, i])
        v2 = 2 * (int(ball.step[g, i]) + off) + view.P(g) + view.P(xb) - view.P(gx)
        if v2 == a2:
            out.append(ball.words[g])
    return out


def lemma32_scan(pt: PotentialTable, ext: ExtBallIndex, k: int, samples: int, seed: int = 0,
                 radius: int | None = None, exhaustive: bool = False) -> dict:
    """Empirical K(k): d_E(ρ(gh), ρ(g)ρ(h)) for g within k of the geodesic to gh.

    Both points lie over gh; their fiber gap is σ_ρ(g, h), so d_E is read
    off the extended ball as the distance from (1, 0) to (1, σ_ρ(g, h)).
    """
    ball = pt.ball
    view = rho_view(pt)
    if radius is None:
        radius = min(pt.valid_radius, ext.ball.radius)
    n = int(ball.level_start[radius + 1])
    kball = int(ball.level_start[k + 1])
    rng = SplitMix64(seed)
    worst = proxy = 0
    argmax = None
    used = 0

    def triples():
        if exhaustive:
            for gh in range(n):
                for p in ball.path(ball.words[gh]):
                    for u in range(kball):
                        yield gh, p, u
        else:
            for _ in range(samples * 50):
                gh = rng.randbelow(n)
                path = ball.path(ball.words[gh])
                yield gh, path[rng.randbelow(len(path))], rng.randbelow(kball)

    seen = set()
    for gh, p, u in triples():
        if not exhaustive and used >= samples:
            break
        g = ball.product(p, u)
        if g is None or ball.norm[g] > radius:
            continue
        h = ball.element(ball.spec.alphabet.invert(ball.words[g]) + ball.words[gh])
        if ball.norm[h] > radius or (exhaustive and (g, h) in seen):
            continue
        seen.add((g, h))
        used += 1
        s2 = view.value2(g, h, gh)
        s = s2 // 2
        d = ext.d_E((0, 0), (0, s))
        if d > worst or argmax is None:
            worst = max(worst, d)
            argmax = (ball.words[g], ball.words[h])
        proxy = max(proxy, abs(s))
    return {"k": k, "empirical_K_of_k": int(worst), "fiber_proxy": int(proxy),
            "samples": used, "argmax": list(argmax) if argmax else None, "C": pt.C}


# -- one-sided repair ------------------------------------------------------------

def perturbed_view(ball: BallIndex, P: np.ndarray, valid_radius: int) -> CocycleView:
    """σ_in = σ₀ + δP for an integer potential P with P(1) = 0."""
    P = np.asarray(P, dtype=np.int64)
    if P[0] != 0:
        raise ValueError("the perturbation must vanish at 1")
    return CocycleView(ball, 2 * P, "input", valid_radius)


def _left_longest_paths(ladj, weight, alph):
    cols = [alph.index[x] for x in alph.noncentral]
    n = ladj.shape[0]
    F = np.full(n, -(1 << 40), dtype=np.int64)
    F[0] = 0
    src = np.repeat(np.arange(n), len(cols))
    dst = ladj[:, cols].ravel()
    w = weight[:, cols].ravel()
    keep = (dst >= 0) & (dst < n)
    src, dst, w = src[keep], dst[keep], w[keep]
    for _ in range(n * len(cols) + 1):
        new = F.copy()
        np.maximum.at(new, dst, F[src] + w)
        if np.array_equal(new, F):
            return F
        F = new
    raise RuntimeError("left longest paths did not converge")


def repair_weakly_bounded(ball: BallIndex, P: np.ndarray, radius: int, side: str = "right",
                          declared_bound: int | None = None) -> dict:
    """Repair σ_in = σ₀ + δP into a cocycle weakly bounded on both sides.

    Words are weighted by σ_in(w(t-1), x̄_t) + c_x - C, where c_x locates ē(x)
    over s_in(x̄); for side='left' words are read by prepending letters and
    σ_in(x̄_t, ·) is used.  The longest-path potential F_in then defines the
    section s_in·ι(F_in), whose cocycle is returned as a view.
    """
    spec = ball.spec
    alph = spec.alphabet
    P = np.asarray(P, dtype=np.int64)
    scan_in = weak_bound_scan(perturbed_view(ball, P, ball.radius), radius, side=side)
    K_in = scan_in.max_abs2 // 2 + (scan_in.max_abs2 % 2)
    if declared_bound is not None and K_in > declared_bound:
        raise InputNotWeaklyBounded(f"scan found {K_in} > declared bound {declared_bound}")
    C = K_in + 1
    R = search_radius(spec, radius + 1, C)
    if ball.radius < R:
        raise OutOfBall(f"repair needs a radius-{R} ball, got {ball.radius}")
    n = ball.size if side == "right" else int(ball.level_start[R + 1])
    if side == "right":
        q = ball.adj.astype(np.int64)
        weight = ball.step.astype(np.int64) + P[:, None] - P[np.maximum(q, 0)] - C
        F_in = longest_paths(ball, weight)
    elif side == "left":
        ladj, steps = left_steps(ball, n)
        inside = (ladj >= 0) & (ladj < n)
        weight = steps + P[:n, None] - P[np.where(inside, ladj, 0)] - C
        F_in = _left_longest_paths(np.where(inside, ladj, -1), weight, alph)
    else:
        raise ValueError(f"unknown side {side!r}")
    pot = np.zeros(ball.size, dtype=np.int64)
    pot[:len(F_in)] = 2 * (P[:len(F_in)] + F_in)
    view = CocycleView(ball, pot, "repaired", radius + 1, C)
    return {"view": view, "K_in": K_in, "C": C, "input_scan": scan_in, "F_in": F_in,
            "search_radius": R}
