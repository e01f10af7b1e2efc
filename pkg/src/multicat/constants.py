"""Numerical tolerances, size caps and physical constants used across the package.

Caps live in a mutable :data:`CAPS` instance so callers can raise or lower
them globally; every function that enforces a cap also accepts a keyword
override.
"""

from dataclasses import dataclass

import scipy.constants as _sc

# --- tolerances -------------------------------------------------------------
HERMITIAN_TOL = 1e-10       # max-abs deviation for Hermitian / unitary claims
SYMMETRIC_RESIDUAL_TOL = 1e-8  # weight outside the symmetric subspace
NORMALIZED_TOL = 1e-8       # |norm - 1| accepted as "normalized"
PROB_ZERO = 0.0             # branch probabilities at or below this are never sampled
DEPTH_NUDGE = 1e-9          # upward nudge before flooring F_Q / M
POSITIVITY_ABORT = -1e-6    # integrator aborts below this eigenvalue
TRACE_TOL = 1e-9


@dataclass
class Caps:
    full_spins: int = 14     # largest M handled in the 2**M tensor space
    enumerate_n: int = 20    # largest n for full record enumeration
    decompose_n: int = 16    # largest n for the multi-cat branch expansion
    brute_n: int = 12        # brute-force average QFI oracle
    brute_spins: int = 6
    lindblad_full_spins: int = 12


CAPS = Caps()

# --- physical constants (SI) -------------------------------------------------
# mu_0, hbar and gamma_e from CODATA via scipy; gamma_n is the 13C gyromagnetic
# ratio 2*pi * 10.7084 MHz/T.
MU_0 = _sc.mu_0
HBAR = _sc.hbar
GAMMA_E = _sc.physical_constants["electron gyromag. ratio"][0]
GAMMA_13C = 2 * _sc.pi * 10.7084e6
