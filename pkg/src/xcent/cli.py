"""Command-line entry point: ``xcent <subcommand> FILE ...``.

FILE is a presentation file path, or the name of a shipped presentation
(``free2``, ``genus2_e1``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .automata import StateCapExceeded, agree_with_retry, build_fsa, estimate_delta, oracle_agreement
from .cayley import CapExceeded, DEFAULT_CAP, OutOfBall, build_ball, cached_ball
from .cocycle import (base_view, cocycle_identity_check, floor_section, full_bound_scan,
                      level_set, repair_weakly_bounded, rho_view, symmetrize_q, weak_bound_scan)
from .maximise import compute_potential, search_radius
from .presentation import PresentationError, check_small_cancellation, load_spec
from .presentations import SHIPPED, path as shipped_path
from .rng import SplitMix64
from .verify import DEFAULT_SEED, PROFILES, render, run_suite
from .wordproblem import NotNull, ReductionTrace, solver

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

UNVERIFIED = "warning: presentation is not C'(1/6); word-problem results are unverified"


class UsageError(Exception):
    pass


def _dump(obj, out=None):
    out = out or sys.stdout
    out.write(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n")


def _load(args):
    p = Path(args.file)
    if not p.exists() and args.file in SHIPPED:
        p = shipped_path(args.file)
    if not p.exists():
        raise UsageError(f"{args.file}: no such file")
    spec = load_spec(p, force=args.force)
    if spec.unverified:
        print(UNVERIFIED, file=sys.stderr)
    return spec


def _ball(args, spec, radius):
    if args.no_cache:
        return build_ball(spec, radius, cap=args.cap)
    ball = cached_ball(spec, radius, args.cache_dir, cap=args.cap)
    if ball.size > args.cap:
        raise CapExceeded(f"cached ball has {ball.size} elements, cap is {args.cap}", radius)
    return ball


def _potential(args, spec, radius, C=None):
    C = spec.C if C is None else C
    ball = _ball(args, spec, search_radius(spec, radius, C))
    return compute_potential(spec, radius, ball=ball, C=C)


def _view(pt, mode):
    if mode == "base":
        return base_view(pt.ball)
    if mode == "rho":
        return rho_view(pt)
    q = symmetrize_q(pt)
    return q if mode == "q" else floor_section(q)


def _meta(spec, C=None):
    d = {"digest": spec.digest, "C": spec.C if C is None else C}
    if spec.unverified:
        d["unverified_word_problem"] = True
    return d


def cmd_check(args, spec):
    sc = check_small_cancellation(spec)
    _dump({"generators": [list(p) for p in spec.alphabet.pairs],
           "central": list(spec.alphabet.central_pair or ()),
           "relators": [{"word": r.word, "height": r.height} for r in spec.base_relators],
           "symmetrized_relators": len(spec.relators), "T": spec.T, "K": spec.K, "C": spec.C,
           "lambda": str(spec.lam), "max_piece_ratio": str(sc["max_piece_ratio"]),
           "small_cancellation": sc["passes"], "digest": spec.digest,
           "unverified_word_problem": spec.unverified})
    return EXIT_OK


def cmd_height(args, spec):
    dehn = solver(spec)
    trace = ReductionTrace() if args.trace else None
    try:
        h = dehn.null_height(args.word, trace=trace)
    except NotNull as exc:
        print(f"not null: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if trace is not None:
        sys.stdout.write(trace.to_tsv())
    else:
        _dump({"word": args.word, "null_height": h, **_meta(spec)})
    return EXIT_OK


def cmd_ball(args, spec):
    ball = _ball(args, spec, args.radius)
    if args.words:
        sys.stdout.write("word\tnorm\n")
        for w, n in zip(ball.words, ball.norm):
            sys.stdout.write(f"{w}\t{int(n)}\n")
        return EXIT_OK
    spheres = [len(ball.sphere(r)) for r in range(args.radius + 1)]
    _dump({"radius": args.radius, "size": ball.size, "spheres": spheres, "digest": spec.digest})
    return EXIT_OK


def cmd_maximise(args, spec):
    pt = _potential(args, spec, args.radius, args.big_c)
    n = int(pt.ball.level_start[args.radius + 1])
    sys.stdout.write("word\tnorm\tF\n")
    for g in range(n):
        sys.stdout.write(f"{pt.ball.words[g]}\t{int(pt.ball.norm[g])}\t{int(pt.F[g])}\n")
    return EXIT_OK


def cmd_cocycle(args, spec):
    pt = _potential(args, spec, args.radius + 1, args.big_c)
    view = _view(pt, args.mode)
    if args.scan == "weak":
        rep = weak_bound_scan(view, args.radius, side=args.side)
    elif args.scan == "full":
        rep = full_bound_scan(view, args.radius, sample=args.sample, seed=args.seed)
    else:
        rep = cocycle_identity_check(view, args.radius)
    d = rep.to_dict()
    d["digest"] = spec.digest
    _dump(d)
    return EXIT_FAIL if args.scan == "identity" and rep.violations else EXIT_OK


def cmd_level_set(args, spec):
    try:
        a2 = 2 * float(args.value)
    except ValueError:
        a2 = 0.5
    if a2 != int(a2):
        raise UsageError("--value must be an integer or half-integer")
    a2 = int(a2)
    pt = _potential(args, spec, args.radius + 1, args.big_c)
    view = _view(pt, args.mode)
    words = level_set(view, args.letter, a2, args.radius)
    _dump({"mode": view.label, "letter": args.letter, "value": args.value,
           "radius": args.radius, "count": len(words), "elements": words, **_meta(spec, pt.C)})
    return EXIT_OK


def cmd_fsa(args, spec):
    max_len = args.max_len if args.max_len is not None else args.radius
    pt = _potential(args, spec, max(args.radius, max_len), args.big_c)
    delta = args.delta
    if delta is None:
        delta = estimate_delta(pt, args.radius)["delta"]
    if args.retry:
        fsa, rep = agree_with_retry(pt, delta, max_len)
    else:
        fsa = build_fsa(pt, delta, explore=False)
        rep = oracle_agreement(fsa, pt, max_len)
    if args.explore:
        fsa.explore()
    if args.dot:
        Path(args.dot).write_text(fsa.to_dot())
    _dump({"delta": fsa.delta, "states": len(fsa.states), "explored": bool(args.explore),
           "max_len": max_len, "agreement": rep.to_dict(), **_meta(spec, pt.C)})
    return EXIT_FAIL if rep.disagreements else EXIT_OK


def cmd_repair(args, spec):
    rng = SplitMix64(args.seed)
    big = search_radius(spec, args.radius + 1, 2 * args.amplitude + 2 * spec.C + 2)
    ball = _ball(args, spec, big)
    P = np.array([0] + [rng.randint(-args.amplitude, args.amplitude) for _ in range(ball.size - 1)],
                 dtype=np.int64)
    out = repair_weakly_bounded(ball, P, args.radius, side=args.side)
    scan = weak_bound_scan(out["view"], args.radius)
    ok = 2 * out["C"] >= scan.max_abs2
    _dump({"radius": args.radius, "side": args.side, "amplitude": args.amplitude,
           "seed": args.seed, "K_in": out["K_in"], "C": out["C"],
           "input": out["input_scan"].to_dict(), "output": scan.to_dict(),
           "bounded_by_C": ok, "digest": spec.digest})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args, spec):
    cache = None if args.no_cache else args.cache_dir
    res = run_suite(spec, args.profile, seed=args.seed, cache_dir=cache, cap=args.cap)
    if args.json:
        _dump(res.to_dict())
    else:
        for c in res.checks:
            print(f"{c.status.upper():5s} {c.name:22s} {c.seconds:7.2f}s  "
                  f"{json.dumps(c.detail, sort_keys=True, default=str)[:160]}")
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}")
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_report(args, spec):
    cache = None if args.no_cache else args.cache_dir
    res = run_suite(spec, args.profile, seed=args.seed, cache_dir=cache, cap=args.cap)
    text = render(res, spec, args.format)
    try:
        if args.out == "-":
            sys.stdout.write(text)
        else:
            Path(args.out).write_text(text)
    except OSError as exc:
        print(f"cannot write report to {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if res.passed else EXIT_FAIL


def _global_flags(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--cache-dir", default=d(".xcent-cache"), help="ball cache directory")
    p.add_argument("--threads", type=int, default=d(os.cpu_count() or 1),
                   help="worker count (accepted; computations run in one process)")
    p.add_argument("--seed", type=int, default=d(DEFAULT_SEED), help="seed for sampled checks")
    p.add_argument("--no-cache", action="store_true", default=d(False), help="bypass the ball cache")
    p.add_argument("--force", action="store_true", default=d(False),
                   help="accept presentations failing C'(1/6), flagged unverified")
    p.add_argument("--cap", type=int, default=d(DEFAULT_CAP), help="ball size cap")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xcent", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"xcent {__version__}")
    _global_flags(ap, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("file", help="presentation file or shipped name")
        p.set_defaults(func=fn)
        return p

    add("check", cmd_check, "parse and validate a presentation")
    p = add("height", cmd_height, "null height of a word (--trace for TSV)")
    p.add_argument("word")
    p.add_argument("--trace", action="store_true")
    p = add("ball", cmd_ball, "build (or load) the ball of a radius")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--words", action="store_true", help="emit canonical words as TSV")
    p = add("maximise", cmd_maximise, "TSV of the potential F on a ball")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--big-c", type=int, default=None)
    for name, fn, help_ in (("cocycle", cmd_cocycle, "scan a cocycle view"),
                            ("level-set", cmd_level_set, "elements g with sigma(g, x) = a")):
        p = add(name, fn, help_)
        p.add_argument("--radius", type=int, required=True)
        p.add_argument("--mode", choices=["base", "rho", "q", "floor-q"], default="rho")
        p.add_argument("--big-c", type=int, default=None)
    sub.choices["cocycle"].add_argument("--scan", choices=["weak", "full", "identity"], default="weak")
    sub.choices["cocycle"].add_argument("--side", choices=["right", "left", "both"], default="both")
    sub.choices["cocycle"].add_argument("--sample", type=int, default=10**5)
    sub.choices["level-set"].add_argument("--letter", required=True)
    sub.choices["level-set"].add_argument("--value", required=True)
    p = add("fsa", cmd_fsa, "build the maximiser automaton and check it against the oracle")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--delta", type=int, default=None, help="default: estimated at --radius")
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--big-c", type=int, default=None)
    p.add_argument("--retry", action="store_true", help="retry with delta+1 on disagreement")
    p.add_argument("--explore", action="store_true", help="build every reachable state")
    p.add_argument("--dot", default=None, help="write the automaton in DOT format")
    p = add("repair", cmd_repair, "repair a seeded perturbation of the base cocycle")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--amplitude", type=int, default=50)
    p.add_argument("--side", choices=["right", "left"], default="right")
    for name, fn, help_ in (("verify", cmd_verify, "run a verification suite"),
                            ("report", cmd_report, "write a deterministic report")):
        p = add(name, fn, help_)
        p.add_argument("--profile", choices=sorted(PROFILES), default="quick")
    sub.choices["verify"].add_argument("--json", action="store_true")
    sub.choices["report"].add_argument("--out", default="-")
    sub.choices["report"].add_argument("--format", choices=["json", "tsv"], default="json")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = _load(args)
        return args.func(args, spec)
    except (PresentationError, UsageError) as exc:
        line = getattr(exc, "line", None)
        where = f"{args.file}:{line}: " if line else f"{args.file}: "
        print(f"error: {where}{exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapExceeded, StateCapExceeded, MemoryError) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (OutOfBall, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
