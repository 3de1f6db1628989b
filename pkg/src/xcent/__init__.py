"""Maximising sections, regular cocycles and their automata for central
extensions of small-cancellation hyperbolic groups."""

__version__ = "0.1.0"

from .presentation import (Alphabet, ExtensionSpec, HeightedRelator, PresentationError,
                           SmallCancellationError, check_small_cancellation, load_spec,
                           parse_spec, symmetrize)
from .wordproblem import (NotNull, ReductionTrace, free_reduce, is_identity, null_height,
                          rel_height)
from .cayley import (BallIndex, CapExceeded, ExtBallIndex, OutOfBall, build_ball,
                     build_ext_ball, fellow_travel_distance, thinness_sample)
from .maximise import (PotentialTable, brute_force_potential, compute_potential,
                       is_maximising, reconstruct_maximising, step_weight)
from .cocycle import (CocycleView, ScanReport, cocycle_identity_check, floor_section,
                      full_bound_scan, lemma32_scan, repair_weakly_bounded, rho_view,
                      sigma0, sigma_of_section, symmetrize_q, weak_bound_scan)
from .automata import (MaximiserFsa, biautomatic_lift_check, build_fsa, estimate_delta,
                       lift_eval, oracle_agreement, run_word)
