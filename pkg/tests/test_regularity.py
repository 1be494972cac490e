"""Regularity profiles: pinned values, monotonicity, the union rule, and an
empirical line-section count against the component bound."""

import math

import numpy as np
import pytest

from regcover.core import InputError, LogReal, RngSeed
from regcover.regularity import (
    RegularityProfile,
    pomt_components_log,
    profile_cp_tensor,
    profile_poly_image,
    profile_rational_image,
    profile_semialgebraic,
    profile_union,
    profile_variety,
)


def test_pomt_trivial_and_errors():
    assert pomt_components_log(1, 5).nats == 0.0
    with pytest.raises(InputError):
        pomt_components_log(0, 3)
    with pytest.raises(InputError):
        pomt_components_log(2, 0)


def test_pomt_monotone_in_d_and_N():
    prev = -1.0
    for d in range(1, 8):
        cur = pomt_components_log(d, 4).nats
        assert cur >= prev
        prev = cur
    prev = -1.0
    for N in range(1, 8):
        cur = pomt_components_log(3, N).nats
        assert cur >= prev
        prev = cur


def test_poly_image_variants():
    p = profile_poly_image(1, 3, "full")
    assert math.isclose(p.log_K.nats, math.log(6.0)) and p.n == 1
    p = profile_poly_image(1, 3, "ball")
    assert math.isclose(p.log_K.nats, 2.0 * math.log(12.0)) and p.n == 1
    p = profile_poly_image(1, 1, "sphere")
    assert math.isclose(p.log_K.nats, 2.0 * math.log(5.0)) and p.n == 1
    p = profile_poly_image(2, 1, "sphere_cone")
    assert math.isclose(p.log_K.nats, 3.0 * math.log(5.0)) and p.n == 1
    with pytest.raises(InputError):
        profile_poly_image(0, 2, "full")
    with pytest.raises(InputError):
        profile_poly_image(1, 2, "nonsense")


def test_variety_variants_and_degree_hypothesis():
    p = profile_variety(3, 1, 2, "full")
    assert math.isclose(p.log_K.nats, 3.0 * math.log(4.0)) and p.n == 1
    p = profile_variety(3, 1, 2, "ball")
    assert math.isclose(p.log_K.nats, 4.0 * math.log(4.0))
    p = profile_variety(3, 1, 2, "sphere")
    assert math.isclose(p.log_K.nats, 4.0 * math.log(5.0))
    p = profile_variety(3, 2, 2, "sphere_cone")
    assert p.n == 1
    with pytest.raises(InputError):
        profile_variety(3, 1, 1, "full")  # the variety route needs d >= 2
    with pytest.raises(InputError):
        profile_variety(3, 4, 2, "full")  # n > N


def test_semialgebraic_branches():
    # b = 0: no inequality contribution at all
    p = profile_semialgebraic(2, 1, 2, 0)
    assert math.isclose(p.log_K.nats, 2.0 * math.log(4.0))
    # third branch only participates when its constant is supplied
    base = profile_semialgebraic(4, 1, 2, 8)
    opted = profile_semialgebraic(4, 1, 2, 8, third_term_constant=1.0)
    assert opted.log_K.nats <= base.log_K.nats
    with pytest.raises(InputError):
        profile_semialgebraic(2, 1, 2, -1)


def test_union_rule():
    p = profile_union(RegularityProfile(LogReal(math.log(2.0)), 1),
                      RegularityProfile(LogReal(math.log(3.0)), 2))
    assert math.isclose(p.log_K.nats, math.log(5.0)) and p.n == 2
    p = profile_union(RegularityProfile(LogReal(0.0), 0),
                      RegularityProfile(LogReal(0.0), 0))
    assert math.isclose(p.log_K.nats, math.log(2.0)) and p.n == 0


def test_union_commutative_associative():
    rng = RngSeed(55).generator()
    for _ in range(25):
        ps = [RegularityProfile(LogReal(float(v)), int(n))
              for v, n in zip(rng.uniform(0, 50, 3), rng.integers(0, 9, 3))]
        ab = profile_union(ps[0], ps[1])
        ba = profile_union(ps[1], ps[0])
        assert abs(ab.log_K.nats - ba.log_K.nats) <= 1e-12
        left = profile_union(ab, ps[2])
        right = profile_union(ps[0], profile_union(ps[1], ps[2]))
        assert abs(left.log_K.nats - right.log_K.nats) <= 1e-12
        assert left.n == right.n


def test_cp_tensor_profile_delegation_and_errors():
    p = profile_cp_tensor((2, 2, 2), 1, "ball")
    q = profile_poly_image(6, 3, "ball")
    assert math.isclose(p.log_K.nats, q.log_K.nats) and p.n == q.n
    with pytest.raises(InputError):
        profile_cp_tensor((5,), 1, "ball")
    with pytest.raises(InputError):
        profile_cp_tensor((2, 2), 1, "full")


def test_profiles_monotone_in_every_parameter():
    rng = RngSeed(77).generator()
    for _ in range(50):
        n = int(rng.integers(1, 6))
        d = int(rng.integers(1, 6))
        base = profile_poly_image(n, d, "ball")
        assert profile_poly_image(n + 1, d, "ball").log_K.nats >= base.log_K.nats
        assert profile_poly_image(n, d + 1, "ball").log_K.nats >= base.log_K.nats

        N = int(rng.integers(n, n + 5))
        b = int(rng.integers(0, 5))
        base = profile_semialgebraic(N, n, d + 1, b)
        assert profile_semialgebraic(N + 1, n, d + 1, b).log_K.nats >= base.log_K.nats
        assert profile_semialgebraic(N, n, d + 1, b + 1).log_K.nats >= base.log_K.nats


def test_profile_domination():
    small = profile_poly_image(1, 2, "full")
    big = RegularityProfile(LogReal(small.log_K.nats + 1.0), small.n + 1)
    assert big.dominates(small)
    assert not small.dominates(big)


def test_parabola_line_sections_within_component_bound():
    # sections of im(t -> (t, t^2)) with 1000 random lines, components
    # counted by sign changes of a t + b t^2 - c on a fine grid, never
    # exceed the bound d (2d-1)^(N-1) for d = 2, N = 2
    cap = math.exp(pomt_components_log(2, 2).nats)
    rng = RngSeed(2024).generator()
    t = np.linspace(-1.0, 1.0, 20_001)
    parabola = np.stack([t, t * t], axis=1)
    worst = 0
    for _ in range(1000):
        direction = rng.standard_normal(2)
        direction /= np.linalg.norm(direction)
        offset = rng.uniform(-1.0, 1.0)
        g = parabola @ direction - offset
        signs = np.sign(g)
        keep = signs != 0
        crossings = int(np.count_nonzero(np.diff(signs[keep]) != 0))
        components = crossings + int(np.count_nonzero(g == 0.0))
        worst = max(worst, components)
    assert worst <= cap
    assert worst >= 1  # the sweep is not vacuous
