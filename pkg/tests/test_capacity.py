import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isotone_kit.capacity import (
    Capacity,
    DistortionFn,
    distort,
    is_submodular,
    mask_to_set,
    set_to_mask,
    subset_sums,
    uniform,
    validate_capacity,
)
from isotone_kit.errors import CapabilityError, DomainError, StructuralError

from oracles import brute_submodular

SQRT_HALF = math.sqrt(0.5)


# -- validate_capacity --------------------------------------------------------


def test_minimal_capacity_passes():
    assert validate_capacity(Capacity(1, [0, 1])).ok


def test_sqrt_uniform_n2_passes():
    # sqrt(|S|/2) evaluated directly
    vals = [math.sqrt(bin(m).count("1") / 2) for m in range(4)]
    assert vals[1] == pytest.approx(0.7071, abs=1e-4)
    assert validate_capacity(Capacity(2, [0, 0.7071, 0.7071, 1])).ok
    assert validate_capacity(Capacity(2, vals)).ok


def test_normalization_violation():
    rep = validate_capacity(Capacity(1, [0.1, 1]))
    assert not rep.ok
    assert not rep.normalized
    assert rep.monotone


def test_monotonicity_violation_reports_pair():
    rep = validate_capacity(Capacity(2, [0, 0.6, 0.3, 0.5]))
    assert not rep.ok and not rep.monotone
    a, b = rep.pair
    assert a | b == b and a != b  # subset / superset
    assert Capacity(2, [0, 0.6, 0.3, 0.5])(a) > Capacity(2, [0, 0.6, 0.3, 0.5])(b)


def test_length_mismatch_is_structural():
    with pytest.raises(StructuralError):
        Capacity(2, [0, 1])
    with pytest.raises(StructuralError):
        Capacity(21, np.zeros(1 << 21))


# -- is_submodular ------------------------------------------------------------


def test_additive_is_submodular():
    assert is_submodular(distort([0.2, 0.3, 0.5], DistortionFn.identity()))


def test_distorted_uniform_sqrt_n3_is_submodular():
    assert is_submodular(distort(uniform(3), DistortionFn.power(0.5))).ok


def test_submodularity_counterexample():
    res = is_submodular(Capacity(2, [0, 0.1, 0.1, 1]))
    assert not res
    assert res.counterexample == (1, 2)
    assert res.sets == (frozenset({0}), frozenset({1}))


def test_submodularity_refuses_large_n():
    c = distort(uniform(15), DistortionFn.identity())
    with pytest.raises(CapabilityError):
        is_submodular(c)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 1), min_size=16, max_size=16), st.integers(1, 4))
def test_scan_agrees_with_brute_force(raw, n):
    # random monotone set functions, submodular or not
    vals = np.zeros(1 << n)
    for m in range(1, 1 << n):
        vals[m] = max(vals[m & ~(1 << k)] for k in range(n) if m >> k & 1) + raw[m]
    vals /= vals[-1]
    res = is_submodular(Capacity(n, vals))
    oracle = brute_submodular(vals, n)
    assert res.ok == (oracle is None)
    if oracle is not None:
        a, b = res.counterexample
        assert vals[a | b] + vals[a & b] > vals[a] + vals[b] + 1e-12


# -- distort ------------------------------------------------------------------


def test_identity_distortion_uniform():
    np.testing.assert_allclose(distort(uniform(2), DistortionFn.identity()).values, [0, 0.5, 0.5, 1])


def test_sqrt_distortion_uniform():
    np.testing.assert_allclose(
        distort(uniform(2), DistortionFn.power(0.5)).values, [0, SQRT_HALF, SQRT_HALF, 1], atol=1e-12
    )


@pytest.mark.parametrize("u", [DistortionFn.identity(), DistortionFn.power(0.3),
                               DistortionFn.piecewise_linear([(0, 0), (0.2, 0.6), (1, 1)])])
def test_dirac_mass(u):
    c = distort([1.0, 0.0], u)
    for m in range(4):
        assert c(m) == (1.0 if m & 1 else 0.0)


def test_distort_rejects_non_probability():
    with pytest.raises(DomainError):
        distort([0.5, 0.6], DistortionFn.identity())
    with pytest.raises(DomainError):
        distort([1.5, -0.5], DistortionFn.identity())


# -- distortions --------------------------------------------------------------


def test_distortion_invariants_rejected():
    with pytest.raises(DomainError):
        DistortionFn.power(1.5)
    with pytest.raises(DomainError):
        DistortionFn.piecewise_linear([(0, 0), (0.5, 0.2), (1, 1)])  # convex
    with pytest.raises(DomainError):
        DistortionFn.from_table([0, 0.8, 0.7, 1])  # decreasing step
    with pytest.raises(DomainError):
        DistortionFn.from_table([0.1, 0.5, 1])


def test_distortion_round_trip_and_parse():
    for text in ["identity", "power:0.5", "pwl:0,0;0.5,0.8;1,1", "table:0,0.7,1"]:
        u = DistortionFn.parse(text)
        assert DistortionFn.from_dict(u.to_dict()) == u
    with pytest.raises(StructuralError):
        DistortionFn.parse("cubic:3")


def test_power_exact_endpoints():
    u = DistortionFn.power(0.37)
    assert u(0.0) == 0.0 and u(1.0) == 1.0


# -- invariants -----------------------------------------------------------------

probabilities = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=7).filter(lambda w: sum(w) > 0.1).map(
    lambda w: np.asarray(w) / np.sum(w)
)
distortions = st.one_of(
    st.floats(0.05, 1.0).map(DistortionFn.power),
    st.tuples(st.floats(0.01, 0.99), st.floats(0.0, 1.0)).map(
        # one interior knot above the diagonal keeps the polyline concave
        lambda p: DistortionFn.piecewise_linear([(0, 0), (p[0], p[0] + (1 - p[0]) * p[1]), (1, 1)])
    ),
)


@settings(max_examples=60, deadline=None)
@given(probabilities, distortions)
def test_distorted_probability_is_valid_submodular(p, u):
    c = distort(p, u)
    assert validate_capacity(c).ok
    assert is_submodular(c).ok


@settings(max_examples=40, deadline=None)
@given(probabilities)
def test_identity_distortion_is_additive(p):
    c = distort(p, DistortionFn.identity())
    v = c.values
    for a in range(1 << c.n):
        b = np.arange(1 << c.n)
        np.testing.assert_allclose(v[a | b] + v[a & b], v[a] + v[b], atol=1e-12)


def test_bitmask_helpers():
    assert subset_sums([1, 2, 4]).tolist() == list(range(8))
    assert set_to_mask({0, 2}) == 5
    assert mask_to_set(5) == {0, 2}


def test_json_round_trip_and_distorted_form():
    c = distort([0.2, 0.3, 0.5], DistortionFn.power(0.5))
    assert Capacity.from_json(c.to_json()) == c
    d = {"n": 3, "distorted": {"weights": [0.2, 0.3, 0.5], "distortion": {"kind": "power", "alpha": 0.5}}}
    assert Capacity.from_dict(d) == c
    with pytest.raises(StructuralError):
        Capacity.from_dict({"n": 2, "values": [0, 0.5, 0.5, 1], "encoding": "msb"})
