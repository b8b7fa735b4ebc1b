import math

import numpy as np
import pytest

from thickpoints import spectra
from thickpoints.errors import DomainError, PreconditionError
from thickpoints.intersection import KernelSpec, ProductField, product_local_time
from thickpoints.lattice_walk import local_time_field, local_time_prefixes, pack, simulate_srw
from thickpoints.planar_paths import ExitRadius, simulate_bm
from thickpoints.rng import mix


def _field(points_products, n):
    keys = pack(np.array([p for p, _ in points_products], dtype=np.int64).reshape(-1, 2))
    order = np.argsort(keys)
    prod = np.array([v for _, v in points_products], dtype=np.int64)[order]
    counts = np.stack([prod, np.ones_like(prod)], axis=1)
    return ProductField(keys[order], counts, prod, n, 2)


def _b_for_threshold(value, n):
    """A ``b`` whose threshold ``(b (log n)^2)^2`` rounds to exactly ``value``."""
    b = math.sqrt(value) / math.log(n) ** 2
    for _ in range(200):
        t = (b * math.log(n) ** 2) ** 2
        if t == value:
            return b
        b = np.nextafter(b, math.inf if t < value else -math.inf)
    raise AssertionError("no exact b found")


def test_threshold_is_inclusive():
    pf = _field([((0, 0), 9)], 2)
    b = _b_for_threshold(9.0, 2)
    tc = spectra.count_thick_points(pf, b)
    assert tc.threshold_value == 9.0 and tc.count == 1 and tc.max_value == 9
    up = b
    while spectra.count_thick_points(pf, up).threshold_value == 9.0:
        up = np.nextafter(up, math.inf)
    assert spectra.count_thick_points(pf, up).count == 0


def test_empty_field_and_bad_inputs():
    empty = ProductField(np.empty(0, np.int64), np.empty((0, 2), np.int64), np.empty(0, np.int64), 10, 2)
    tc = spectra.count_thick_points(empty, 0.05)
    assert tc.count == 0 and tc.max_value == 0
    with pytest.raises(PreconditionError):
        spectra.count_thick_points(_field([((0, 0), 1)], 1), 0.05)
    with pytest.raises(PreconditionError):
        spectra.count_thick_points(empty, 0.0)


def test_count_matches_rescan_and_monotone():
    n = 2**14
    a = local_time_field(simulate_srw(mix(1, 0), n))
    b = local_time_field(simulate_srw(mix(1, 1), n))
    pf = product_local_time([a, b])
    prods = list(pf.as_dict().values())
    counts = []
    for bb in (0.005, 0.01, 0.02, 0.05, 0.1):
        tc = spectra.count_thick_points(pf, bb)
        thr = (bb * math.log(n) ** 2) ** 2
        assert tc.count == sum(v >= thr for v in prods)
        if tc.count == 0:
            assert tc.max_value < thr
        counts.append(tc.count)
    assert all(x >= y for x, y in zip(counts, counts[1:]))


def test_pair_max_nondecreasing_along_prefixes():
    ns = [2**m for m in range(8, 16)]
    fa = local_time_prefixes(simulate_srw(5, ns[-1]), ns)
    fb = local_time_prefixes(simulate_srw(6, ns[-1]), ns)
    T = [product_local_time([x, y]).max() for x, y in zip(fa, fb)]
    assert all(s <= t for s, t in zip(T, T[1:]))


def test_single_walk_thick():
    z = local_time_field(simulate_srw(1, 0))
    for a in (0.5, 1 / math.log(2) ** 2, 2.5):
        tc = spectra.single_walk_thick(z, a, n=2)
        assert tc.count == int(a * math.log(2) ** 2 <= 1)
    f = local_time_field(simulate_srw(2, 50_000))
    m = [spectra.single_walk_thick(f, a).count for a in (0.02, 0.05, 0.1, 0.2)]
    assert all(x >= y for x, y in zip(m, m[1:]))
    assert spectra.single_walk_thick(f, 0.05).max_value == f.max()
    with pytest.raises(PreconditionError):
        spectra.single_walk_thick(z, 0.1)


def test_exponent_examples():
    e = math.e
    fit = spectra.exponent_estimate([(e, e), (e**2, e**2), (e**3, e**3)])
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    assert spectra.exponent_estimate([(2**m, 7) for m in range(5, 12)]).slope == pytest.approx(0.0, abs=1e-12)
    syn = [(2**m, round((2**m) ** 0.7)) for m in range(8, 20)]
    assert abs(spectra.exponent_estimate(syn).slope - 0.7) < 0.02


def test_exponent_zero_handling():
    fit = spectra.exponent_estimate([(2**m, 0) for m in range(4, 9)])
    assert not fit.defined and "zero" in fit.diagnostic
    fit = spectra.exponent_estimate([(16, 0), (32, 5), (64, 9), (128, 20), (16, 3)])
    assert fit.defined and fit.excluded == [(16.0, 1)]
    fit = spectra.exponent_estimate([(16, 0), (32, 0), (64, 9), (128, 20)])
    assert not fit.defined
    with pytest.raises(PreconditionError):
        spectra.exponent_estimate([(16, 2), (32, 3)])


def test_exponent_replica_averaging_and_reproducibility():
    series = [(n, c) for n, c in ((16, 2), (16, 8), (32, 5), (64, 9), (128, 20))]
    fit = spectra.exponent_estimate(series)
    # geometric mean at n = 16 is 4
    assert fit.mean_log_counts[0] == pytest.approx(math.log(4))
    again = spectra.exponent_estimate(series)
    assert (fit.slope, fit.stderr, fit.intercept) == (again.slope, again.stderr, again.intercept)


@pytest.fixture(scope="module")
def paths():
    return simulate_bm(41, 1e-4, ExitRadius(1.0)), simulate_bm(42, 1e-4, ExitRadius(1.0))


def test_coarse_spectrum_directions(paths):
    w, w2 = paths
    ker = KernelSpec(0.02)
    low = spectra.coarse_spectrum_lebesgue(w, w2, 0.01, [0.2, 0.1], 0.02, ker)
    assert low.predicted == pytest.approx(0.02)
    assert np.all(np.isfinite(low.estimates)) and np.all(low.estimates < 1.0)
    high = spectra.coarse_spectrum_lebesgue(w, w2, 0.99, [0.2, 0.1], 0.02, ker)
    flagged = [e for e, _ in high.flags]
    assert flagged and all(np.isneginf(high.estimates[list(high.params).index(e)]) for e in flagged)
    mid = spectra.coarse_spectrum_lebesgue(w, w2, 0.3, [0.2, 0.1], 0.02, ker)
    assert mid.predicted == pytest.approx(0.6)
    with pytest.raises(PreconditionError):
        spectra.coarse_spectrum_lebesgue(w, w2, 0.3, [0.01], 0.02, ker)
    with pytest.raises(DomainError):
        spectra.coarse_spectrum_lebesgue(w, w2, 1.0, [0.2], 0.02, ker)


def test_theory_values():
    t = spectra.theory_curves()
    assert t["pair_max_constant"] == pytest.approx(0.025330, abs=1e-6)
    assert t["single_max_constant"] == pytest.approx(0.31831, abs=1e-5)
    assert t["pair_count_exponent"](0.05) == pytest.approx(0.68584, abs=1e-5)
    assert t["single_count_exponent"](0.1) == pytest.approx(1 - math.pi * 0.1)
    assert t["mfold_sup"](1) == 2.0 == t["disc_occupation_sup"]
    assert t["mfold_sup"](2) == 1.0 == t["intersection_sup"]
    assert t["mfold_dimension"](0.5, 3) == pytest.approx(0.5)
    assert t["kset_occupation_sup"](math.pi / 2) == pytest.approx(1.0)
    assert t["kset_thick_dimension"](0.5, math.pi / 2) == pytest.approx(1.0)
    assert t["intersection_dimension"](0.25) == 1.5
    assert t["coarse_exponent"](0.3) == pytest.approx(0.6)
    assert t["stable_sup"](1.0) == 0.25 and t["stable_dimension"](0.25, 1.0) == 0.5
    assert t["disc_thick_dimension"](0.5) == 1.5


@pytest.mark.parametrize(
    "fn,args",
    [
        (spectra.pair_count_exponent, (1 / (2 * math.pi),)),
        (spectra.single_count_exponent, (0.4,)),
        (spectra.intersection_dimension, (1.2,)),
        (spectra.kset_thick_dimension, (1.1, math.pi / 2)),
        (spectra.stable_dimension, (0.6, 1.0)),
        (spectra.stable_sup, (2.0,)),
        (spectra.mfold_dimension, (1.1, 2)),
        (spectra.mfold_sup, (1.5,)),
        (spectra.coarse_exponent, (1.0,)),
        (spectra.disc_thick_dimension, (2.5,)),
    ],
)
def test_theory_ranges(fn, args):
    with pytest.raises(DomainError):
        fn(*args)
