import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isotone_kit.capacity import Capacity, DistortionFn, distort, uniform
from isotone_kit.choquet import (
    are_comonotonic,
    check_integral_axioms,
    check_subadditivity,
    choquet_discrete,
    choquet_interval,
    choquet_sorted,
    level_breakdown,
)
from isotone_kit.errors import DomainError, PreconditionError, StructuralError

from oracles import riemann_choquet

SQRT = DistortionFn.power(0.5)
MU2 = distort(uniform(2), SQRT)


# -- choquet_discrete ---------------------------------------------------------


def test_calibration_on_subsets():
    c = distort([0.1, 0.2, 0.3, 0.4], SQRT)
    for A in range(16):
        assert choquet_discrete(np.ones(4), c, A) == pytest.approx(c(A), abs=1e-15)


def test_sqrt_uniform_values():
    assert choquet_discrete([1, 0], MU2) == pytest.approx(0.70710678, abs=1e-8)
    assert choquet_discrete([-1, 1], MU2) == pytest.approx(0.41421356, abs=1e-8)


def test_additive_matches_expectation():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    c = distort(p, DistortionFn.identity())
    f = np.array([3.0, -1.0, 0.5, 2.0])
    assert choquet_discrete(f, c) == pytest.approx(f @ p, abs=1e-12)


def test_empty_set_and_errors():
    assert choquet_discrete([1, 2], MU2, 0) == 0.0
    with pytest.raises(StructuralError):
        choquet_discrete([1, 2, 3], MU2)
    with pytest.raises(StructuralError):
        choquet_discrete([1, 2], MU2, 4)
    with pytest.raises(StructuralError):
        choquet_discrete([1, np.nan], MU2)


def test_riemann_oracle_random_instances():
    rng = np.random.default_rng(7)
    for _ in range(5):
        n = int(rng.integers(1, 5))
        c = distort(rng.dirichlet(np.ones(n)), DistortionFn.power(rng.uniform(0.2, 1.0)))
        f = rng.uniform(-1, 1, n)
        A = int(rng.integers(0, 1 << n))
        assert choquet_discrete(f, c, A) == pytest.approx(riemann_choquet(f, c.values, A, 200_000), abs=2e-5)


def test_strict_level_sets_agree():
    rng = np.random.default_rng(3)
    c = distort(rng.dirichlet(np.ones(5)), DistortionFn.power(0.4))
    for _ in range(50):
        f = rng.normal(size=5)
        A = int(rng.integers(1, 32))
        assert choquet_discrete(f, c, A, strict=True) == choquet_discrete(f, c, A)


def test_level_breakdown_invariants():
    c = distort([0.1, 0.2, 0.3, 0.4], SQRT)
    lv = level_breakdown([0.5, -1.0, 0.5, 2.0], c, 0b1011)
    assert lv.thresholds.tolist() == [-1.0, 0.5, 2.0]
    assert lv.survival[0] == c(0b1011)
    assert np.all(np.diff(lv.survival) <= 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4), st.integers(0, 15))
def test_sorted_form_agrees(f, A):
    c = distort([0.4, 0.1, 0.3, 0.2], DistortionFn.power(0.6))
    assert choquet_sorted(f, c, A) == pytest.approx(choquet_discrete(f, c, A), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4), st.permutations(range(4)))
def test_relabelling_invariance(f, perm):
    c = distort([0.4, 0.1, 0.3, 0.2], DistortionFn.power(0.6))
    f = np.asarray(f)
    g = np.empty(4)
    g[list(perm)] = f
    assert choquet_discrete(g, c.permuted(perm)) == pytest.approx(choquet_discrete(f, c), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 5), min_size=3, max_size=3))
def test_larger_capacity_larger_integral(f):
    small = distort([0.2, 0.3, 0.5], DistortionFn.identity())
    big = distort([0.2, 0.3, 0.5], DistortionFn.power(0.5))  # u(t) >= t
    assert choquet_discrete(f, small) <= choquet_discrete(f, big) + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4), st.floats(-10, 10), st.integers(1, 15))
def test_translation_invariance(f, k, A):
    c = distort([0.4, 0.1, 0.3, 0.2], DistortionFn.power(0.6))
    f = np.asarray(f)
    assert choquet_discrete(f + k, c, A) == pytest.approx(choquet_discrete(f, c, A) + k * c(A), abs=1e-10)


# -- choquet_interval ---------------------------------------------------------


@pytest.mark.parametrize("u", [DistortionFn.identity(), SQRT])
def test_interval_constant(u):
    assert choquet_interval(lambda t: np.full_like(t, 2.5), u, 0.2, 0.7, 100) == pytest.approx(
        2.5 * u(0.5), abs=1e-12
    )


def test_interval_identity_lebesgue():
    assert choquet_interval(lambda t: t, DistortionFn.identity(), 0.0, 1.0, 100_000) == pytest.approx(0.5, abs=1e-4)


def test_interval_sqrt_closed_form():
    # survival mu({t' >= t}) = sqrt(1 - t); integral of sqrt(1 - t) over [0, 1] is 2/3
    assert choquet_interval(lambda t: t, SQRT, 0.0, 1.0, 100_000) == pytest.approx(2 / 3, abs=1e-3)


@pytest.mark.parametrize("fn", [np.sin, lambda t: np.abs(t - 0.3), lambda t: np.exp(-t) - 0.5])
def test_interval_identity_matches_trapezoid(fn):
    m = 100_000
    x = np.linspace(0.1, 0.9, 200_001)
    y = fn(x)
    trap = float(np.sum((y[1:] + y[:-1]) / 2) * (x[1] - x[0]))
    assert choquet_interval(fn, DistortionFn.identity(), 0.1, 0.9, m) == pytest.approx(trap, abs=1e-3)


def test_interval_errors():
    with pytest.raises(DomainError):
        choquet_interval(lambda t: t, SQRT, 0.5, 0.5)
    with pytest.raises(DomainError):
        choquet_interval([1.0], SQRT, 0.0, 1.0)
    with pytest.raises(DomainError):
        choquet_interval([1.0, np.inf], SQRT, 0.0, 1.0)


# -- comonotonicity ------------------------------------------------------------


def test_comonotonic_examples():
    f = [1, 2, 3]
    assert are_comonotonic(f, f)
    assert are_comonotonic([1, 2, 3], [0, 5, 5])
    res = are_comonotonic([1, 2], [2, 1])
    assert not res and set(res.witness) == {0, 1}
    assert are_comonotonic([1, 2, 0], [2, 1, 0], 0b101)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=2, max_size=5))
def test_comonotonic_additivity_property(pairs):
    f = np.array([p[0] for p in pairs])
    g = np.array([p[1] for p in pairs])
    n = f.size
    c = distort(uniform(n), SQRT)
    if are_comonotonic(f, g):
        assert choquet_discrete(f + g, c) == pytest.approx(choquet_discrete(f, c) + choquet_discrete(g, c), abs=1e-10)
    # sorting both along one order always yields a comonotonic pair
    fs, gs = np.sort(f), np.sort(g)
    assert are_comonotonic(fs, gs)


# -- property suites ------------------------------------------------------------


def test_axioms_additive_exact():
    rep = check_integral_axioms(distort([0.1, 0.2, 0.3, 0.4], DistortionFn.identity()), 200, seed=1)
    assert rep.passed and rep.max_violation <= 1e-12


def test_axioms_sqrt_uniform():
    rep = check_integral_axioms(distort(uniform(6), SQRT), 1000, seed=42)
    assert rep.passed, rep.to_dict()
    assert set(rep.properties) == {
        "positivity", "monotonicity", "positive_homogeneity", "calibration",
        "translation_invariance", "comonotonic_additivity",
    }


def test_zero_homogeneity():
    assert choquet_discrete(0.0 * np.array([1.0, -2.0]), MU2) == 0.0


def test_subadditivity_additive_equality():
    c = distort([0.1, 0.2, 0.3, 0.4], DistortionFn.identity())
    rep = check_subadditivity(c, 200, seed=2)
    assert rep.passed
    rng = np.random.default_rng(0)
    f, g = rng.normal(size=4), rng.normal(size=4)
    assert choquet_discrete(f + g, c) == pytest.approx(choquet_discrete(f, c) + choquet_discrete(g, c), abs=1e-12)


def test_subadditivity_sqrt_uniform():
    rep = check_subadditivity(distort(uniform(6), SQRT), 1000, seed=42)
    assert rep.passed, rep.to_dict()


def test_f_plus_minus_f_nonnegative():
    c = distort(uniform(4), SQRT)
    rng = np.random.default_rng(5)
    for _ in range(100):
        f = rng.normal(size=4)
        assert choquet_discrete(f, c) + choquet_discrete(-f, c) >= -1e-12


def test_subadditivity_precondition():
    with pytest.raises(PreconditionError, match="A=1, B=2"):
        check_subadditivity(Capacity(2, [0, 0.1, 0.1, 1]), 10)


def test_supermodular_capacity_breaks_subadditivity():
    vals = [(bin(m).count("1") / 4) ** 2 for m in range(16)]
    rep = check_subadditivity(Capacity(4, vals), 200, seed=0, require_submodular=False)
    assert not rep["subadditivity"].passed
    assert rep["subadditivity"].witness is not None


def test_report_json():
    rep = check_integral_axioms(MU2, 10)
    d = rep.to_dict()
    assert all(set(v) >= {"pass", "max_violation"} for v in d.values())
