"""
Thick points of two independent walks
=====================================

The product of the local times of two walks is large at few points.  Count
the points where it exceeds b (log n)^4 and read the growth exponent off a
log-log fit over dyadic n.
"""

import math

from thickpoints import spectra
from thickpoints.intersection import product_local_time
from thickpoints.lattice_walk import local_time_prefixes, simulate_srw
from thickpoints.rng import mix

b = 0.05
ns = [2**m for m in range(12, 19)]
series, maxima = [], []
for rep in range(6):
    fx = local_time_prefixes(simulate_srw(mix(3, 2 * rep), ns[-1]), ns)
    fy = local_time_prefixes(simulate_srw(mix(3, 2 * rep + 1), ns[-1]), ns)
    for n, a, c in zip(ns, fx, fy):
        pf = product_local_time([a, c])
        series.append((n, spectra.count_thick_points(pf, b).count))
        maxima.append((n, pf.max() / math.log(n) ** 4))

fit = spectra.exponent_estimate(series)
print(f"b = {b}: fitted exponent {fit.slope:.3f} +- {fit.stderr:.3f}, "
      f"limit 1 - 2 pi b = {spectra.pair_count_exponent(b):.3f}")
if fit.excluded:
    print(f"horizons left out for zero counts: {fit.excluded}")
top = max(v for _, v in maxima)
print(f"largest T_n / (log n)^4 seen: {top:.4f}; limit 1/(4 pi^2) = {spectra.pair_max_constant():.4f}")
# the fit sits below the limit at these n: the counts converge on a log scale
