"""
Stable paths, their potential and the operator norm on the unit disc
====================================================================

Simulate an isotropic 1-stable path, compare its occupation density with the
0-potential c_1 |z|^-1, and compute the norm of the potential operator on
L^2 of the unit disc by a Nystrom discretisation under grid refinement.
"""

import math

import numpy as np

from thickpoints._binning import disc_sums
from thickpoints.operators import c_beta, lambda_beta, stable_potential
from thickpoints.planar_paths import simulate_stable
from thickpoints.rng import mix

beta, dt, T, delta, z = 1.0, 0.05, 50.0, 0.05, 0.7
ang = 2 * np.pi * np.arange(44) / 44
centers = np.stack([z * np.cos(ang), z * np.sin(ang)], axis=1)
dens = []
for i in range(2000):
    p = simulate_stable(mix(21, i), beta, dt, T)
    near = p.points[np.abs(np.hypot(*p.points.T) - z) < delta]
    occ = disc_sums(centers, near, 1.0, delta) * dt if len(near) else np.zeros(len(centers))
    dens.append(occ.mean() / (math.pi * delta**2))
print(f"c_1 = {c_beta(1.0):.6f} = 1/(2 pi)")
print(f"occupation density at |z| = {z}: {np.mean(dens):.4f} +- {np.std(dens, ddof=1) / math.sqrt(len(dens)):.4f}, "
      f"potential {stable_potential(beta, (z, 0.0)):.4f}")

for h in (1 / 16, 1 / 32, 1 / 64):
    res = lambda_beta(beta, h)
    print(f"h = 1/{round(1 / h)}: Lambda = {res.value:.6f} after {res.iterations} power iterations")
