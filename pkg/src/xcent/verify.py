"""Verification suites over a presentation, and deterministic reports."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .automata import agree_with_retry, estimate_delta
from .cayley import DEFAULT_CAP, build_ball, cached_ball
from .cocycle import (base_view, cocycle_identity_check, floor_section, full_bound_scan,
                      half, inverse_pair_scan, inverse_q_violations, repair_weakly_bounded,
                      rho_view, symmetrize_q, weak_bound_scan)
from .maximise import (brute_force_table, compute_potential, quasigeodesic_violations,
                       search_radius)
from .rng import SplitMix64
from .wordproblem import solver

DEFAULT_SEED = 20240611

PROFILES = {
    "quick": {"identity": 1, "quasi": 3, "oracle": 1, "oracle_sample": (2, 10), "weak": 2,
              "inverse_q": 2, "plateau": (2, 3), "fsa_len": 4, "delta": (2, 3), "repair": 2,
              "heights": (20, 10, 16)},
    "full": {"identity": 2, "quasi": 5, "oracle": 2, "oracle_sample": (4, 50), "weak": 5,
             "inverse_q": 4, "plateau": (3, 4), "fsa_len": 6, "delta": (4, 5), "repair": 3,
             "heights": (200, 100, 24)},
}


@dataclass
class Check:
    name: str
    status: str
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_dict(self, timings: bool = True) -> dict:
        out = {"suite": self.name, "passed": self.passed, "constants": self.constants,
               "checks": []}
        for c in self.checks:
            d = {"name": c.name, "status": c.status, "detail": c.detail}
            if timings:
                d["seconds"] = round(c.seconds, 3)
            out["checks"].append(d)
        return out


class Context:
    """Shares balls and potential tables between checks."""

    def __init__(self, spec, cache_dir=None, cap: int = DEFAULT_CAP):
        self.spec = spec
        self.cache_dir = cache_dir
        self.cap = cap
        self._ball = None
        self._pts = {}

    def ball(self, radius: int):
        if self._ball is None or self._ball.radius < radius:
            if self.cache_dir is None:
                self._ball = build_ball(self.spec, radius, cap=self.cap)
            else:
                self._ball = cached_ball(self.spec, radius, self.cache_dir, cap=self.cap)
        return self._ball

    def potential(self, r: int, C: int | None = None):
        C = self.spec.C if C is None else C
        for (rr, cc), pt in self._pts.items():
            if cc == C and rr >= r:
                return pt
        ball = self.ball(search_radius(self.spec, r, C))
        pt = compute_potential(self.spec, r, ball=ball, C=C)
        self._pts[(r, C)] = pt
        return pt


def random_null_words(spec, count: int, max_len: int, seed: int) -> list[str]:
    """Null words built by inserting conjugates of relators, central letters
    and cancelling pairs at random positions."""
    rng = SplitMix64(seed)
    alph = spec.alphabet
    pieces = [r.word for r in spec.relators] + sorted(alph.central)
    pieces += [x + alph.inverse[x] for x in alph.noncentral]
    out = []
    while len(out) < count:
        w = ""
        target = rng.randint(1, max_len)
        for _ in range(50):
            r = rng.choice(pieces)
            u = "".join(rng.choice(alph.noncentral) for _ in range(rng.randint(0, 2)))
            piece = u + r + alph.invert(u)
            if len(w) + len(piece) > target:
                continue
            pos = rng.randint(0, len(w))
            w = w[:pos] + piece + w[pos:]
        if w:
            out.append(w)
    return out


def _timed(name, fn):
    t = time.perf_counter()
    try:
        ok, detail = fn()
        status = "pass" if ok else "fail"
    except Exception as exc:  # report and keep going
        status, detail = "fail", {"error": f"{type(exc).__name__}: {exc}"}
    return Check(name, status, detail, time.perf_counter() - t)


def run_suite(spec, profile: str = "quick", seed: int = DEFAULT_SEED, cache_dir=None,
              cap: int = DEFAULT_CAP) -> SuiteResult:
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    P = PROFILES[profile]
    ctx = Context(spec, cache_dir, cap)
    res = SuiteResult(f"{spec.name or 'spec'}:{profile}")
    tk = spec.T * spec.K
    res.constants = {"T": spec.T, "K": spec.K, "C": spec.C, "lambda": str(spec.lam),
                     "unverified_word_problem": spec.unverified}
    free = not spec.relators

    def identity():
        r = P["identity"]
        pt = ctx.potential(r)
        q = symmetrize_q(pt)
        views = [base_view(pt.ball), rho_view(pt), q, floor_section(q)]
        out = {v.label: cocycle_identity_check(v, r).violations for v in views}
        return all(v == 0 for v in out.values()), {"radius": r, "violations": out}

    def quasi():
        r = P["quasi"]
        out = {}
        for C in (tk + 1, 10):
            out[C] = len(quasigeodesic_violations(ctx.potential(r, C), r))
        return all(v == 0 for v in out.values()), {"radius": r, "violations": out}

    def oracle():
        r = P["oracle"]
        pt = ctx.potential(r)
        max_len = int(np.ceil(spec.lam * r))
        targets = list(range(int(pt.ball.level_start[r + 1])))
        bt = brute_force_table(spec, pt.ball, max_len, targets=targets)
        bad = [pt.ball.words[g] for g in targets if bt.get(g) != pt.F[g]]
        rs, n = P["oracle_sample"]
        pt10 = ctx.potential(rs, 10)
        rng = SplitMix64(seed)
        m = int(pt10.ball.level_start[rs + 1])
        picks = sorted({rng.randbelow(m) for _ in range(n)})
        lam10 = (10 + tk) / (10 - tk)
        bt10 = brute_force_table(spec, pt10.ball, int(np.ceil(lam10 * rs)), C=10, targets=picks)
        bad += [pt10.ball.words[g] for g in picks if bt10.get(g) != pt10.F[g]]
        return not bad, {"exhaustive_radius": r, "sampled": len(picks), "mismatches": bad}

    def weak():
        r = P["weak"]
        rep = weak_bound_scan(rho_view(ctx.potential(r + 1)), r)
        return rep.max_abs2 <= 2 * spec.C, {"radius": r, "max_abs": half(rep.max_abs2), "C": spec.C,
                                            **rep.extra}

    def inverse_q():
        r = P["inverse_q"]
        bad = inverse_q_violations(symmetrize_q(ctx.potential(r)), r)
        return not bad, {"radius": r, "violations": len(bad)}

    def plateau():
        r1, r2 = P["plateau"]
        q = symmetrize_q(ctx.potential(r2))
        a = full_bound_scan(q, r1, seed=seed)
        b = full_bound_scan(q, r2, seed=seed)
        res.constants["q_plateau"] = [half(a.max_abs2), half(b.max_abs2)]
        ok = a.max_abs2 == b.max_abs2 and (not free or b.max_abs2 == 0)
        return ok, {"radii": [r1, r2], "max_abs": [half(a.max_abs2), half(b.max_abs2)],
                    "sampled": [a.sampled, b.sampled]}

    def separation():
        pt = ctx.potential(3)
        per = inverse_pair_scan(rho_view(pt), 3)
        ok = all(per[r] == 2 * 2 * spec.C * r for r in per)
        return ok, {"max_abs_sigma_rho_g_ginv": {r: half(v) for r, v in per.items()}}

    def delta():
        r1, r2 = P["delta"]
        pt = ctx.potential(r2)
        d1 = estimate_delta(pt, r1)["delta"]
        d2 = estimate_delta(pt, r2)["delta"]
        res.constants["delta_hat"] = {r1: d1, r2: d2}
        return d1 == d2, {"radii": [r1, r2], "delta_hat": [d1, d2]}

    def fsa():
        n = P["fsa_len"] + (2 if free else 0)
        pt = ctx.potential(n)
        d = res.constants.get("delta_hat", {}).get(P["delta"][1])
        if d is None:
            d = estimate_delta(pt, P["delta"][1])["delta"]
        machine, rep = agree_with_retry(pt, d, n)
        res.constants["fsa_delta"] = machine.delta
        res.constants["fsa_states_seen"] = len(machine.states)
        return not rep.disagreements, {"max_len": n, "delta": machine.delta, **rep.to_dict()}

    def repair():
        r = P["repair"]
        C_guess = 200
        ball = ctx.ball(search_radius(spec, r + 1, C_guess))
        rng = SplitMix64(seed)
        Pp = np.array([0] + [rng.randint(-50, 50) for _ in range(ball.size - 1)], dtype=np.int64)
        out = repair_weakly_bounded(ball, Pp, r)
        scan = weak_bound_scan(out["view"], r)
        ok = out["K_in"] > 50 and scan.max_abs2 <= 2 * out["C"]
        return ok, {"radius": r, "K_in": out["K_in"], "C": out["C"], "output_max_abs": half(scan.max_abs2)}

    def heights():
        count, orders, max_len = P["heights"]
        dehn = solver(spec)
        rng = SplitMix64(seed)
        bad = 0
        for w in random_null_words(spec, count, max_len, seed):
            h = dehn.null_height(w)
            bad += sum(dehn.random_null_height(w, rng) != h for _ in range(orders))
        return bad == 0, {"words": count, "orders": orders, "mismatches": bad}

    checks = [("cocycle_identity", identity), ("quasigeodesic", quasi), ("oracle", oracle),
              ("weak_bound", weak), ("inverse_q", inverse_q), ("q_plateau", plateau)]
    if free:
        checks.append(("separation", separation))
    checks += [("delta_stable", delta), ("fsa_agreement", fsa), ("repair", repair),
               ("height_well_defined", heights)]
    for name, fn in checks:
        res.checks.append(_timed(name, fn))
    return res


def render(result: SuiteResult, spec, fmt: str = "json") -> str:
    """Deterministic rendering (no timings) with digest and tool version."""
    data = result.to_dict(timings=False)
    data["presentation_digest"] = spec.digest
    data["tool_version"] = __version__
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True, default=str) + "\n"
    if fmt != "tsv":
        raise ValueError(f"unknown format {fmt!r}")
    rows = ["key\tvalue"]

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj, key=str):
                walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
        elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
            for i, v in enumerate(obj):
                walk(f"{prefix}.{v.get('name', i)}", {k: x for k, x in v.items() if k != "name"})
        else:
            rows.append(f"{prefix}\t{json.dumps(obj, sort_keys=True, default=str)}")

    walk("", data)
    return "\n".join(rows) + "\n"
