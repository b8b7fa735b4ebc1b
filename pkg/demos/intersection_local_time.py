"""
Intersection local time of two Brownian paths
=============================================

Estimate the projected intersection local time of a small disc with a tent
kernel, and compare its mean with the Green's function integral it should
approach.  Then apply the excursion-count test for perfect points.
"""

import math

import numpy as np

from thickpoints.intersection import KernelSpec, intersection_local_time_continuum, make_schedule, perfect_point_test
from thickpoints.operators import intersection_first_moment_mc, intersection_first_moment_smoothed_mc
from thickpoints.planar_paths import ExitRadius, simulate_bm
from thickpoints.rng import mix

r1, dt, eps_f = 0.05, 1e-5, 0.01
x0, x0p = (r1, 0.0), (-r1, 0.0)
kernel = KernelSpec(eps_f)

values = []
for i in range(60):
    w = simulate_bm(mix(9, 2 * i), dt, ExitRadius(1.0), start=x0)
    w2 = simulate_bm(mix(9, 2 * i + 1), dt, ExitRadius(1.0), start=x0p)
    values.append(intersection_local_time_continuum(w, w2, (0.0, 0.0), r1, kernel))
values = np.array(values)
oracle, _ = intersection_first_moment_mc(1.0, r1, x0, x0p, 200_000, seed=1)
smooth, _ = intersection_first_moment_smoothed_mc(1.0, r1, x0, x0p, eps_f, 200_000, seed=1)
print(f"mean over {len(values)} pairs: {values.mean():.5f} +- {values.std(ddof=1) / math.sqrt(len(values)):.5f}")
print(f"Green's function integral: {oracle:.5f}; with the kernel smoothing folded in: {smooth:.5f}")
# most pairs never meet near the origin, so the estimator is heavy tailed
print(f"fraction of pairs with zero intersection in D(0, r1): {np.mean(values == 0):.2f}")

# perfect points: excursion counts between scales eps_k = eps1 / (k!)^3 match n_k = 3 a k^2 log k
schedule = make_schedule("factorial", eps1=1 / 8, a=0.5, n=2)
print("\nscale schedule:", [(e.k, round(e.inner, 5), round(e.target, 2)) for e in schedule.entries])
path = simulate_bm(mix(9, 999), 1.5e-5, ExitRadius(2.5))
rng = np.random.default_rng(4)
rad, ang = 0.25 * np.sqrt(rng.uniform(size=20)), rng.uniform(0, 2 * np.pi, 20)
results = [perfect_point_test(path, (r * np.cos(t), r * np.sin(t)), 2, 0.5) for r, t in zip(rad, ang)]
print(f"{sum(r.perfect for r in results)} of 20 random centers are 2-perfect; "
      f"excursion counts at k = 2: {[int(r.counts[0, 1]) for r in results]}")
