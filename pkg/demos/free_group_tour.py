"""Walk through the split extension F2 x Z: potentials, the separation witness,
the vanishing symmetrised cocycle and the repair of a scrambled coboundary."""

import numpy as np

from xcent.cayley import build_ball
from xcent.cocycle import (half, inverse_pair_scan, repair_weakly_bounded, rho_view,
                           symmetrize_q, weak_bound_scan)
from xcent.maximise import compute_potential, reconstruct_maximising
from xcent.presentations import load
from xcent.rng import SplitMix64

spec = load("free2")
print(f"free2: C={spec.C} lambda={spec.lam}")

ball = build_ball(spec, 6)
print("sphere sizes", [len(ball.sphere(r)) for r in range(7)])

pt = compute_potential(spec, 5, ball=ball)
for w in ("", "a", "ab", "abA"):
    g = ball.element(w)
    print(f"  F({w or '1'}) = {pt.F[g]}   maximising word {reconstruct_maximising(pt, g)!r}")

# sigma_rho is weakly bounded but grows along g, g^-1
per = inverse_pair_scan(rho_view(pt), 3)
print("max |sigma_rho(g, g^-1)| by radius:", {r: half(v) for r, v in per.items()})
print("symmetrised potential is zero:", not symmetrize_q(pt).potential.any())

rng = SplitMix64(7)
P = np.array([0] + [rng.randint(-20, 20) for _ in range(ball.size - 1)], dtype=np.int64)
out = repair_weakly_bounded(ball, P, 2)
scan = weak_bound_scan(out["view"], 2)
print(f"repair: input K={out['K_in']}, output max {half(scan.max_abs2)} <= C={out['C']}")
