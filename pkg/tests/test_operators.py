import math

import numpy as np
import pytest

from thickpoints.errors import ConvergenceError, DomainError, PreconditionError, SingularityError
from thickpoints.operators import (
    MeasureAtoms,
    NystromOperator,
    c_beta,
    disc_occupation_mean,
    green_disc,
    intersection_first_moment_mc,
    intersection_first_moment_smoothed_mc,
    kac_correction_budget,
    kac_moment_continuum,
    lambda_beta,
    moment_bound_curve,
    power_iteration,
    stable_potential,
)


def _disc_points(g, n, r):
    rad = r * np.sqrt(g.uniform(size=n))
    return rad * np.exp(1j * g.uniform(0, 2 * np.pi, n))


# ---------------------------------------------------------------------------
# disc Green's function


def test_green_examples():
    assert green_disc(1.0, 0j, 0.5 + 0j) == pytest.approx(math.log(2) / math.pi, abs=1e-15)
    assert abs(math.log(2) / math.pi - 0.22064) < 1e-5
    assert green_disc(1.0, (0.0, 0.0), (0.0, 0.5)) == pytest.approx(math.log(2) / math.pi)
    assert green_disc(1.0, 0j, 1 - 1e-12 + 0j) < 1e-11
    with pytest.raises(SingularityError):
        green_disc(1.0, 0.3j, 0.3j)
    with pytest.raises(DomainError):
        green_disc(1.0, 0j, 1.0 + 0j)
    with pytest.raises(DomainError):
        green_disc(0.0, 0j, 0.1 + 0j)


def test_green_log_bound():
    g = np.random.default_rng(3)
    for r in (1.0, 2.5):
        x, y = _disc_points(g, 10_000, r / 2), _disc_points(g, 10_000, r / 2)
        dev = np.abs(math.pi * green_disc(r, x, y) - np.log(r / np.abs(x - y)))
        assert dev.max() <= math.log(4 / 3) + 1e-12


def test_green_symmetry_and_positivity():
    g = np.random.default_rng(4)
    x, y = _disc_points(g, 5000, 0.999), _disc_points(g, 5000, 0.999)
    a, b = green_disc(1.0, x, y), green_disc(1.0, y, x)
    assert np.max(np.abs(a - b)) < 1e-12
    assert np.all(a > 0)


def test_green_decreases_along_rays():
    g = np.random.default_rng(5)
    t = np.linspace(0.3, 0.999999, 400)
    for x in _disc_points(g, 10, 0.1):
        for ang in g.uniform(0, 2 * np.pi, 5):
            v = green_disc(1.0, x, t * np.exp(1j * ang))
            assert np.all(np.diff(v) < 0) and v[-1] < 1e-5


# ---------------------------------------------------------------------------
# stable potential


def test_c_beta_values():
    assert c_beta(1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    assert abs(c_beta(1.0) - 0.159155) < 1e-6
    for b in (0.0, 2.0, -1.0):
        with pytest.raises(DomainError):
            c_beta(b)


def test_stable_potential_symmetry_and_homogeneity():
    g = np.random.default_rng(6)
    x = _disc_points(g, 200, 2.0)
    for beta in (0.5, 1.0, 1.7):
        base = stable_potential(beta, x)
        th = g.uniform(0, 2 * np.pi)
        assert np.allclose(stable_potential(beta, x * np.exp(1j * th)), base, rtol=1e-13, atol=0)
        for c in (0.5, 2.0, 4.0):
            assert np.allclose(stable_potential(beta, c * x), c ** (beta - 2) * base, rtol=1e-13, atol=0)
    with pytest.raises(SingularityError):
        stable_potential(1.0, (0.0, 0.0))


# ---------------------------------------------------------------------------
# Nystrom operator and its norm


def test_nystrom_matrix_structure():
    op = NystromOperator(1.0, 1 / 16)
    A = op.dense()
    assert np.array_equal(A, A.T)
    assert np.all(A > 0)
    heq = op.h / math.sqrt(math.pi)
    assert np.allclose(np.diag(A), c_beta(1.0) * 2 * heq ** -1 * op.h**2, rtol=1e-15)
    v = np.random.default_rng(7).normal(size=len(op))
    assert np.allclose(op.matvec(v), A @ v, rtol=1e-10, atol=1e-12)
    assert op.symmetry_defect(block=97) == 0.0


def test_nystrom_too_coarse():
    with pytest.raises(PreconditionError):
        NystromOperator(1.0, 1 / 4)
    with pytest.raises(PreconditionError):
        NystromOperator(1.0, 0.3)


def test_lambda_positive_and_rayleigh_nondecreasing():
    res = lambda_beta(1.0, 1 / 32)
    assert res.value > 0 and res.iterations < 10**5
    assert np.all(np.diff(res.rayleigh) >= -1e-14)
    v = res.vector
    op = NystromOperator(1.0, 1 / 32)
    assert float(v @ op.matvec(v)) > 0


def test_lambda_refinement():
    hs = (1 / 16, 1 / 32, 1 / 64, 1 / 128)
    vals = [lambda_beta(1.0, h).value for h in hs]
    diffs = np.abs(np.diff(vals))
    assert diffs[-1] / vals[-1] < 0.02
    # the center-in-disc cell rule makes the disc area jitter at O(h), so the
    # successive differences obey an O(h) envelope rather than a clean ratio
    assert np.all(diffs <= np.array(hs[:-1]) / 8)


def test_power_iteration_cap():
    # two eigenvalues of equal modulus and opposite sign never settle
    M = np.diag([1.0, -1.0])
    with pytest.raises(ConvergenceError):
        power_iteration(lambda v: M @ (v + np.array([0.0, 1e-3])), 2, max_iter=50)
    with pytest.raises(DomainError):
        lambda_beta(2.0, 1 / 16)


# ---------------------------------------------------------------------------
# Kac moments


def test_kac_single_atom_and_linearity():
    y, w = (0.2, -0.3), 0.7
    rho = MeasureAtoms([y], [w])
    assert kac_moment_continuum(rho, 1.0, (0.1, 0.1), 1) == pytest.approx(
        math.pi * w * green_disc(1.0, (0.1, 0.1), y), rel=1e-15
    )
    big = MeasureAtoms.uniform_disc(0.3, 0.02)
    twice = MeasureAtoms(big.points, 2 * big.weights, big.cell)
    for k in (1, 2):
        assert kac_moment_continuum(twice, 1.0, (0.5, 0.0), k) == pytest.approx(
            2**k * kac_moment_continuum(big, 1.0, (0.5, 0.0), k), rel=1e-12
        )


def test_kac_k1_matrix_equals_direct():
    rho = MeasureAtoms.uniform_disc(0.4, 0.01)
    x0 = np.array([0.45, 0.1])
    direct = math.fsum((math.pi * w * green_disc(1.0, x0, y) for y, w in zip(rho.points, rho.weights)))
    assert kac_moment_continuum(rho, 1.0, x0, 1) == pytest.approx(direct, rel=1e-12)


def test_kac_errors():
    rho = MeasureAtoms.uniform_disc(0.3, 0.05)
    with pytest.raises(DomainError):
        kac_moment_continuum(rho, 0.25, (0.0, 0.0), 1)
    with pytest.raises(DomainError):
        kac_moment_continuum(rho, 1.0, (1.0, 0.0), 1)
    with pytest.raises(PreconditionError):
        kac_moment_continuum(rho, 1.0, (0.5, 0.0), 4)
    with pytest.raises(PreconditionError):
        kac_moment_continuum(MeasureAtoms([(0.1, 0.1)], [1.0]), 1.0, (0.5, 0.0), 2)
    with pytest.raises(PreconditionError):
        MeasureAtoms([(0.0, 0.0)], [-1.0])


def test_kac_matches_log_law_for_small_disc():
    # mean-value property: for |x0| = r2 >= r1 the k = 1 value is rho(D) log(r / r2)
    r, r2, r1 = 1.0, 0.1, 0.01
    rho = MeasureAtoms.uniform_disc(r1, r1 / 20)
    v = kac_moment_continuum(rho, r, (r2, 0.0), 1)
    lead = rho.mass * math.log(r / r2)
    assert abs(v - lead) <= lead * kac_correction_budget(r1, 1.0, 1.0, 1.0)
    # k = 2: each inner Green integral over D(0, r1) is at most pi r1^2 (log(r/r1) + 1)
    v2 = kac_moment_continuum(rho, r, (r2, 0.0), 2)
    assert 0 < v2 < 2 * lead * math.pi * r1 * r1 * (math.log(r / r1) + 1)


# ---------------------------------------------------------------------------
# intersection moment quadrature


def test_intersection_moment_limit_study():
    ratios = []
    for r1 in (1e-2, 1e-3, 1e-4):
        est, se = intersection_first_moment_mc(1.0, r1, (r1, 0.0), (-r1, 0.0), 50_000, 1)
        assert est > 0 and se > 0
        ratios.append(est / (r1 * r1 * math.log(1 / r1) ** 2))
    assert all(abs(1 - b) < abs(1 - a) for a, b in zip(ratios, ratios[1:]))
    assert abs(ratios[-1] - 1) < 0.01


def test_intersection_moment_stderr_rate():
    se1 = intersection_first_moment_mc(1.0, 0.05, (0.05, 0), (0, 0.05), 40_000, 2)[1]
    se2 = intersection_first_moment_mc(1.0, 0.05, (0.05, 0), (0, 0.05), 80_000, 3)[1]
    assert se1 / se2 == pytest.approx(math.sqrt(2), rel=0.1)


def test_intersection_moment_seeds_agree():
    a, sa = intersection_first_moment_mc(1.0, 0.05, (0.05, 0), (-0.05, 0), 20_000, 10)
    b, sb = intersection_first_moment_mc(1.0, 0.05, (0.05, 0), (-0.05, 0), 20_000, 11)
    assert abs(a - b) < 4 * math.hypot(sa, sb)


def test_intersection_moment_preconditions():
    with pytest.raises(PreconditionError):
        intersection_first_moment_mc(1.0, 0.05, (0.1, 0), (-0.05, 0), 10, 1)
    with pytest.raises(PreconditionError):
        intersection_first_moment_mc(1.0, 0.6, (0.6, 0), (-0.6, 0), 10, 1)
    with pytest.raises(PreconditionError):
        intersection_first_moment_mc(1.0, 0.05, (0.05, 0), (-0.05, 0), 0, 1)


def test_smoothed_moment_tends_to_unsmoothed():
    args = (1.0, 0.05, (0.05, 0.0), (-0.05, 0.0))
    exact, se = intersection_first_moment_mc(*args, 200_000, 20)
    for eps_f in (0.02, 0.005):
        sm, sse = intersection_first_moment_smoothed_mc(*args, eps_f, 200_000, 21)
        assert sm > 0
        assert abs(sm / exact - 1) < 0.01 + 4 * math.hypot(se, sse) / exact


def test_disc_occupation_mean():
    assert disc_occupation_mean(1.0, 0.05, (0.05, 0.0)) == pytest.approx(0.0025 * math.log(20))
    assert disc_occupation_mean(2.0, 0.1, (0.0, 0.5)) == pytest.approx(0.01 * math.log(4))
    with pytest.raises(PreconditionError):
        disc_occupation_mean(1.0, 0.1, (0.05, 0.0))


# ---------------------------------------------------------------------------
# moment bound


def test_moment_bound_examples():
    e = math.e
    assert moment_bound_curve(1, e, 1.0, 0.0) == pytest.approx(1.0)
    assert moment_bound_curve(2, e, 1.0, 0.0) == pytest.approx(4.0)
    cs = [moment_bound_curve(2, 1.0, 0.01, c) for c in (0.0, 0.5, 1.0)]
    assert cs[0] < cs[1] < cs[2]
    rs = [moment_bound_curve(3, 1.0, r1, 0.2) for r1 in (0.5, 0.1, 0.01)]
    assert rs[0] < rs[1] < rs[2]
    with pytest.raises(PreconditionError):
        moment_bound_curve(0, 1.0, 0.1, 0.0)
