"""Couplings of 13C spins around an NV centre.

Only the hyperfine component perpendicular to the NV axis enters. Spins on
a ring around the axis couple equally, which is the symmetric case; a random
cluster gives spread-out couplings.
"""

import numpy as np

from multicat.nv_model import NM, SpinGeometry, couplings_from_positions, init_pulse_time, ring_positions

tau = 2e-6  # seconds per cycle
ring = couplings_from_positions(SpinGeometry(ring_positions(4, 0.9 * NM, 0.6 * NM)), tau)
print("ring of 4 at r=0.9 nm, z=0.6 nm")
for b, ang, a in zip(ring.betas, ring.frame_angles, ring.alphas):
    print(f"  beta={b:10.1f} rad/s  frame={np.degrees(ang):6.1f} deg  alpha={a:.4f}")
print(f"  init pulse {init_pulse_time(ring.betas[0]) * 1e6:.2f} us")

rng = np.random.default_rng(3)
pos = rng.uniform(-1.5, 1.5, (6, 3)) * NM
cluster = couplings_from_positions(SpinGeometry(pos), tau)
print(f"\nrandom cluster: alpha mean {cluster.alphas.mean():.4f}, spread {cluster.alphas.std():.4f}")
