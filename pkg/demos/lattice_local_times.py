"""
Local times of a planar lattice walk
====================================

Run a simple random walk, count its visits per lattice point and compare the
maximal local time with the (log n)^2 scale.  Then count visits to the origin
before the walk leaves a disc and check them against the exact lattice
Green's function.
"""

import math

import numpy as np

from thickpoints import spectra
from thickpoints.lattice_walk import (
    geometric_visit_moment,
    lattice_green_exact,
    local_time_field,
    local_time_prefixes,
    run_until_exit,
    simulate_srw,
)
from thickpoints.rng import mix

# a walk of 2^20 steps from the origin, read off at dyadic horizons
N = 2**20
run = simulate_srw(seed=1, steps=N)
horizons = [2**m for m in range(12, 21, 2)]
for n, field in zip(horizons, local_time_prefixes(run, horizons)):
    print(f"n = 2^{int(math.log2(n)):2d}: {len(field):7d} points visited, "
          f"max local time {field.max():3d}, ratio to (log n)^2 = {field.max() / math.log(n) ** 2:.3f}")
print(f"limit of the ratio: 1/pi = {spectra.single_max_constant():.3f} (reached only on log scales)")

# thick points of the single walk: L_n(x) >= a (log n)^2
field = local_time_field(run)
for a in (0.05, 0.1, 0.2):
    tc = spectra.single_walk_thick(field, a)
    print(f"a = {a}: {tc.count} points with L_n >= {tc.threshold_value:.1f}; "
          f"predicted growth n^{spectra.single_count_exponent(a):.3f}")

# visits to the origin before leaving the radius-20 disc, against G_20(0, 0)
R = 20.0
G = lattice_green_exact(R).origin_value
visits = np.array([run_until_exit(mix(7, i), R).visits_to_origin for i in range(5000)])
print(f"\nE V = {visits.mean():.3f} +- {visits.std(ddof=1) / math.sqrt(len(visits)):.3f}, G = {G:.3f}")
# V is geometric with mean G, so E V^2 = 2 G^2 - G rather than 2 G^2
print(f"E V^2 = {np.mean(visits ** 2.0):.2f}, geometric law {geometric_visit_moment(G, 2):.2f}, 2 G^2 = {2 * G * G:.2f}")
