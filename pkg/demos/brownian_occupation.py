"""
Occupation of small discs and K-sets by planar Brownian motion
==============================================================

Simulate Brownian motion up to its exit from the unit disc and measure the
time it spends in discs D(x, eps) and in scaled copies x + eps K of a set K,
normalised by eps^2 (log 1/eps)^2.
"""

import numpy as np

from thickpoints.planar_paths import ExitRadius, KSet, OccupationQuery, occupation_measure, occupation_profile, simulate_bm

path = simulate_bm(seed=5, dt=1e-5, stop=ExitRadius(1.0))
print(f"{len(path)} samples, exit time {(len(path) - 1) * path.dt:.3f}")

# one query: time spent in the disc of radius 0.1 around the origin
print("mu(D(0, 0.1)) =", occupation_measure(path, OccupationQuery((0.0, 0.0), 0.1)))

# a grid of centers and two scales; the sup of the ratio tends to 2 as eps -> 0
g = np.arange(-0.95, 0.96, 0.05)
X, Y = np.meshgrid(g, g)
centers = np.stack([X.ravel(), Y.ravel()], axis=1)
eps = [0.2, 0.1]
disc = occupation_profile(path, centers, eps)
half = occupation_profile(path, centers, eps, kset=KSet.half_disc())
for j, e in enumerate(eps):
    print(f"eps = {e}: sup ratio over discs {disc.sup[j]:.3f}, over half-discs {half.sup[j]:.3f}")

# a half-disc copy is inside the disc with the same center, so its occupation is never larger
assert np.all(half.occupation <= disc.occupation)

# K-sets can also come from a text file: "polygon n" then n vertex lines
tri = KSet.parse("polygon 3\n0 0\n0.9 0\n0 0.9\n")
tri_prof = occupation_profile(path, centers, eps, kset=tri)
print(f"triangle of area {tri.area:.3f}: sup ratios {np.round(tri_prof.sup, 3)}")
