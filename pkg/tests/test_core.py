"""Shared numerics: log-domain scalars, the PRNG contract, polynomial maps."""

import math

import numpy as np
import pytest

from regcover.core import (
    InputError,
    LogReal,
    PolynomialMap,
    RngSeed,
    eval_poly_map,
    eval_poly_map_batch,
    jacobian,
    jacobian_batch,
    log_add,
    moment_curve,
    monomial_exponents,
    poly_map_from_json,
    poly_map_to_json,
    random_polynomial_map,
)


def test_logreal_addition_is_logsumexp():
    a = LogReal(math.log(4.0))
    b = LogReal(0.0)
    assert math.isclose((a + b).nats, math.log(5.0), rel_tol=1e-12)
    # no linear-domain overflow for huge exponents
    big = LogReal(1e6) + LogReal(1e6)
    assert math.isclose(big.nats, 1e6 + math.log(2.0), rel_tol=1e-12)
    assert math.isclose(log_add(-1e6, -1e6), -1e6 + math.log(2.0), rel_tol=1e-12)


def test_logreal_multiply_and_linear():
    x = LogReal.from_linear(3.0) * LogReal.from_linear(5.0)
    assert math.isclose(x.linear, 15.0, rel_tol=1e-12)
    with pytest.raises(InputError):
        LogReal.from_linear(-1.0)


def test_rng_seed_contract():
    a = RngSeed(123).generator(stream=0).standard_normal(8)
    b = RngSeed(123).generator(stream=0).standard_normal(8)
    assert np.array_equal(a, b)
    c = RngSeed(123).generator(stream=1).standard_normal(8)
    assert not np.array_equal(a, c)
    with pytest.raises(InputError):
        RngSeed(-1)
    with pytest.raises(InputError):
        RngSeed(2**64)


def test_derived_seeds_are_distinct_and_stable():
    root = RngSeed(9)
    d0 = root.derived(0).generator().standard_normal(4)
    d1 = root.derived(1).generator().standard_normal(4)
    assert not np.array_equal(d0, d1)
    assert np.array_equal(d0, RngSeed(9).derived(0).generator().standard_normal(4))


def test_poly_map_validation():
    with pytest.raises(InputError):
        PolynomialMap(2, 1, [[(1.0, (1,))]])  # exponent tuple too short
    with pytest.raises(InputError):
        PolynomialMap(1, 1, [[(1.0, (-1,))]])
    with pytest.raises(InputError):
        PolynomialMap(1, 2, [[(1.0, (1,))]])  # one coord list for N=2
    assert PolynomialMap(1, 1, [[(5.0, (0,))]]).degree == 0


def test_eval_trivial_and_dimension_error():
    cubic = moment_curve(3)
    assert np.allclose(eval_poly_map(cubic, [0.0]), 0.0)
    with pytest.raises(InputError):
        eval_poly_map(cubic, [1.0, 2.0])


def test_jacobian_constant_map():
    const = PolynomialMap(1, 1, [[(5.0, (0,))]])
    assert jacobian(const, [3.0])[0][0] == 0.0


def test_eval_linear_in_coefficients():
    # eval(a p + b q, x) = a eval(p, x) + b eval(q, x) on shared support
    rng = RngSeed(31).generator()
    exps = monomial_exponents(2, 3)
    for _ in range(20):
        cp = rng.standard_normal(len(exps))
        cq = rng.standard_normal(len(exps))
        a, b = rng.standard_normal(2)
        x = rng.uniform(-1, 1, size=2)
        p = PolynomialMap(2, 1, [[(c, e) for c, e in zip(cp, exps)]])
        q = PolynomialMap(2, 1, [[(c, e) for c, e in zip(cq, exps)]])
        s = PolynomialMap(2, 1, [[(a * c1 + b * c2, e) for c1, c2, e in zip(cp, cq, exps)]])
        lhs = eval_poly_map(s, x)[0]
        rhs = a * eval_poly_map(p, x)[0] + b * eval_poly_map(q, x)[0]
        assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12)


def test_jacobian_matches_finite_differences():
    # 100 random maps, central differences at step 1e-6, rel error <= 1e-5
    rng = RngSeed(888).generator()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        N = int(rng.integers(1, 7))
        d = int(rng.integers(1, 5))
        pmap = random_polynomial_map(n, N, d, rng)
        x = rng.uniform(-1.0, 1.0, size=n)
        J = jacobian(pmap, x)
        fd = np.empty_like(J)
        h = 1e-6
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            fd[:, j] = (eval_poly_map(pmap, x + e) - eval_poly_map(pmap, x - e)) / (2 * h)
        denom = np.maximum(np.abs(J), 1.0)
        worst = max(worst, float((np.abs(J - fd) / denom).max()))
    assert worst <= 1e-5


def test_batch_eval_and_jacobian_match_pointwise():
    rng = RngSeed(17).generator()
    pmap = random_polynomial_map(3, 4, 3, rng)
    X = rng.uniform(-1, 1, size=(50, 3))
    batch = eval_poly_map_batch(pmap, X)
    Jb = jacobian_batch(pmap, X)
    for i in range(50):
        assert np.allclose(batch[i], eval_poly_map(pmap, X[i]), rtol=1e-12, atol=1e-12)
        assert np.allclose(Jb[i], jacobian(pmap, X[i]), rtol=1e-12, atol=1e-12)


def test_json_round_trip():
    pmap = PolynomialMap(2, 2, [[(1.0, (1, 1))], [(1.0, (1, 0)), (1.0, (0, 1))]])
    doc = poly_map_to_json(pmap)
    assert doc["n"] == 2 and doc["N"] == 2
    back = poly_map_from_json(doc)
    x = [0.3, -0.7]
    assert np.allclose(eval_poly_map(back, x), eval_poly_map(pmap, x))


def test_monomial_exponents_counts():
    # number of monomials of total degree <= d in n variables is C(n+d, d)
    assert len(monomial_exponents(2, 3)) == 10
    assert len(monomial_exponents(3, 2)) == 10
    assert all(sum(e) <= 4 for e in monomial_exponents(2, 4))


def test_moment_curve_shape():
    p = moment_curve(4)
    assert (p.n, p.N, p.degree) == (1, 4, 4)
    assert np.allclose(eval_poly_map(p, [2.0]), [2.0, 4.0, 8.0, 16.0])
