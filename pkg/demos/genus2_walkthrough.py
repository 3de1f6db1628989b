"""Genus-2 surface group with relator height 1: heights of null words,
the quasigeodesic maximising language and its automaton."""

from xcent.automata import agree_with_retry, estimate_delta
from xcent.cayley import build_ball
from xcent.cocycle import full_bound_scan, half, symmetrize_q
from xcent.maximise import compute_potential, quasigeodesic_violations, reconstruct_maximising
from xcent.presentations import load
from xcent.wordproblem import null_height

spec = load("genus2_e1")
print(f"genus2_e1: T={spec.T} K={spec.K} C={spec.C} lambda={spec.lam}")

for w in ("abABcdCD", "tabABcdCD", "abABcdCDabABcdCD", "dcDCbaBA"):
    print(f"  height({w}) = {null_height(w, spec)}")

ball = build_ball(spec, 5)
pt = compute_potential(spec, 4, ball=ball)
print("quasigeodesic violations on B(4):", len(quasigeodesic_violations(pt, 4)))
for w in ("a", "aB", "aBAd"):
    g = ball.element(w)
    print(f"  F({w}) = {pt.F[g]}   maximising word {reconstruct_maximising(pt, g)!r}")

q = symmetrize_q(pt)
print("max |sigma_q| plateau:", [half(full_bound_scan(q, r).max_abs2) for r in (2, 3)])

d = estimate_delta(pt, 4)
print("delta_hat at radius 4:", d["delta"], "witness", d["argmax"])
fsa, rep = agree_with_retry(pt, d["delta"], 4)
print(f"automaton at delta {fsa.delta}: {rep.tested} words to length 4, "
      f"{len(rep.disagreements)} disagreements")
