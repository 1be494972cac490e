"""Covering bounds for bounded-CP-rank tensors and the probability that a
Gaussian tensor lies close in angle to the low-rank set.

Rank-r tensors of order d with side lengths n_1..n_d are the image of the
degree-d multilinear parametrization in r * sum(n_i) variables, which is
what drives all three bounds.  Everything is reported in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import InputError
from .bounds import BoundReport

__all__ = [
    "TensorShape",
    "cp_covering_log_general",
    "cp_covering_log_lowrank",
    "cp_angle_probability_log",
]


@dataclass(frozen=True)
class TensorShape:
    """Side lengths n_1..n_d of an order-d tensor space."""

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(v) for v in self.dims)
        if len(dims) < 2 or any(v < 2 for v in dims):
            raise InputError("tensor shape needs order >= 2 and every dim >= 2")
        object.__setattr__(self, "dims", dims)

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def ambient(self) -> int:
        out = 1
        for v in self.dims:
            out *= v
        return out

    @property
    def mean_dim(self) -> float:
        return sum(self.dims) / len(self.dims)


def _as_shape(shape) -> TensorShape:
    return shape if isinstance(shape, TensorShape) else TensorShape(tuple(shape))


def cp_covering_log_general(shape, r: int, t: float, eps: float, c: float = 3.0,
                            sphere: bool = False) -> BoundReport:
    """log covering bound for tensors of CP rank <= r with entries bounded
    by t, valid for any rank:

        log N(eps) <= r d nbar log(t/eps) + c r d nbar sum_i log(n_i),

    with d the order and nbar the mean side length.  With sphere=True the
    unit-sphere slice of the rank cone is covered instead (requires t = 1)
    and the coefficient of log(t/eps) drops from r d nbar to r d nbar - 1;
    the shift is flagged in constants_used.
    """
    ref = "cp-covering-general"
    shape = _as_shape(shape)
    if r < 1:
        raise InputError("CP rank must be at least 1", ref)
    if t <= 0 or eps <= 0:
        raise InputError("t and eps must be positive", ref)
    if eps > 2.0 * t:
        raise InputError("the bound needs eps <= 2t (set diameter envelope)", ref)
    if c <= 0:
        raise InputError("constant c must be positive", ref)
    if sphere and t != 1.0:
        raise InputError("the sphere variant is stated for t = 1", ref)
    rdn = r * shape.order * shape.mean_dim
    lead = rdn - 1.0 if sphere else rdn
    value = lead * math.log(t / eps) + c * rdn * sum(math.log(v) for v in shape.dims)
    constants = {"c": c}
    if sphere:
        constants["sphere_log_term_coefficient"] = lead
    return BoundReport(value, constants, ref)


def cp_covering_log_lowrank(shape, r: int, t: float, eps: float, c1: float = 3.0,
                            c2: float = 3.0, sphere: bool = False) -> BoundReport:
    """log covering bound specialized to low rank, r <= min_i n_i:

        log N(eps) <= r d nbar log(c1 d t / eps) + c2 d^2 r^2 log r
                      - d r^2 log c1.

    Sharper than the general bound when r is small against the side
    lengths.  sphere=True behaves as in cp_covering_log_general."""
    ref = "cp-covering-lowrank"
    shape = _as_shape(shape)
    if r < 1:
        raise InputError("CP rank must be at least 1", ref)
    if r > min(shape.dims):
        raise InputError("the low-rank bound needs r <= min side length", ref)
    if t <= 0 or eps <= 0:
        raise InputError("t and eps must be positive", ref)
    if eps > 2.0 * t:
        raise InputError("the bound needs eps <= 2t (set diameter envelope)", ref)
    if c1 < 1 or c2 < 1:
        raise InputError("constants c1, c2 must be at least 1", ref)
    if sphere and t != 1.0:
        raise InputError("the sphere variant is stated for t = 1", ref)
    d = shape.order
    rdn = r * d * shape.mean_dim
    lead = rdn - 1.0 if sphere else rdn
    value = (
        lead * math.log(c1 * d * t / eps)
        + c2 * d * d * r * r * math.log(r)
        - d * r * r * math.log(c1)
    )
    constants = {"c1": c1, "c2": c2}
    if sphere:
        constants["sphere_log_term_coefficient"] = lead
    return BoundReport(value, constants, ref)


def cp_angle_probability_log(shape, r: int, eps: float, c1: float = 3.0,
                             c2: float = 3.0) -> BoundReport:
    """log bound on the probability that a standard Gaussian tensor makes
    an angle at most eps with the set of CP rank <= r tensors, for
    r <= min_i n_i, eps <= pi/6 and ambient dimension >= 8."""
    ref = "cp-angle-probability"
    shape = _as_shape(shape)
    if r < 1:
        raise InputError("CP rank must be at least 1", ref)
    if r > min(shape.dims):
        raise InputError("the angle bound needs r <= min side length", ref)
    if not 0 < eps <= math.pi / 6 + 1e-12:
        raise InputError("the bound is stated for eps in (0, pi/6]", ref)
    if shape.ambient < 8:
        raise InputError("the bound needs ambient dimension N >= 8", ref)
    if c1 < 1 or c2 < 1:
        raise InputError("constants c1, c2 must be at least 1", ref)
    value = _cp_angle_log(shape, r, eps, c1, c2)
    return BoundReport(value, {"c1": c1, "c2": c2}, ref)


def _cp_angle_log(shape: TensorShape, r: int, eps: float, c1: float, c2: float) -> float:
    # Raw formula, shared with empirical cross-checks that probe shapes
    # below the N >= 8 hypothesis of the public operation.
    N = shape.ambient
    d = shape.order
    rdn = r * d * shape.mean_dim
    return (
        (N - 1) * math.log(math.sin(2.0 * eps))
        - (rdn - 1.0) * math.log(eps)
        + rdn * math.log(c1 * d)
        + c2 * d * d * r * r * math.log(r)
        - 0.5 * math.log(N)
        - d * r * r * math.log(c1)
    )
