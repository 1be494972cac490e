"""Regularity profiles (log K, n) for polynomially defined sets.

A profile certifies that generic plane sections of codimension up to n
meet the set in at most K path components, with log K carried in nats.
Profiles are upward closed: increasing either entry keeps a valid
certificate, which is what makes the union rule and the coarse variety /
semialgebraic branches sound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import InputError, LogReal

__all__ = [
    "RegularityProfile",
    "VARIANTS",
    "pomt_components_log",
    "profile_poly_image",
    "profile_variety",
    "profile_rational_image",
    "profile_semialgebraic",
    "profile_union",
    "profile_cp_tensor",
]

VARIANTS = ("full", "ball", "sphere", "sphere_cone")


@dataclass(frozen=True)
class RegularityProfile:
    """Certificate pair: log_K in nats, n the usable section codimension."""

    log_K: LogReal
    n: int

    def __post_init__(self):
        log_K = self.log_K
        if not isinstance(log_K, LogReal):
            log_K = LogReal(float(log_K))
        if not log_K.nats >= 0:
            raise InputError("a component-count certificate needs K >= 1")
        if int(self.n) < 0:
            raise InputError("profile dimension n must be nonnegative")
        object.__setattr__(self, "log_K", log_K)
        object.__setattr__(self, "n", int(self.n))

    def dominates(self, other: "RegularityProfile") -> bool:
        """Whether this certificate is at least as permissive (upward closure)."""
        return self.log_K.nats >= other.log_K.nats and self.n >= other.n


def pomt_components_log(d: int, N: int) -> LogReal:
    """log of the component-count bound d*(2d-1)^(N-1) for the common zero
    set of N-variable polynomials of degree at most d."""
    if d < 1 or N < 1:
        raise InputError("need d >= 1 and N >= 1")
    return LogReal(math.log(d) + (N - 1) * math.log(2 * d - 1))


def _check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise InputError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return variant


def profile_poly_image(n: int, d: int, variant: str = "full") -> RegularityProfile:
    """Profile of the image of a degree-d polynomial map on R^n.

    - full:        image of the whole parameter space, ((2d)^n, n)
    - ball:        image of a parameter ball, ((4d)^(n+1), n)
    - sphere:      image of a parameter sphere, ((4d+1)^(n+1), n)
    - sphere_cone: same count as sphere but the section dimension drops to
                   n-1, for images that are cones probed on the unit sphere.

    Degree-1 maps are accepted; the bounds are then coarse but valid.
    """
    _check_variant(variant)
    if n < 1 or d < 1:
        raise InputError("need n >= 1 and d >= 1")
    if variant == "full":
        return RegularityProfile(LogReal(n * math.log(2 * d)), n)
    if variant == "ball":
        return RegularityProfile(LogReal((n + 1) * math.log(4 * d)), n)
    log_K = LogReal((n + 1) * math.log(4 * d + 1))
    if variant == "sphere":
        return RegularityProfile(log_K, n)
    return RegularityProfile(log_K, n - 1)


def profile_variety(N: int, n: int, d: int, variant: str = "full") -> RegularityProfile:
    """Profile of an n-dimensional algebraic variety cut out in R^N by
    polynomials of degree at most d.  Requires d >= 2: the counting
    argument squares the defining equations, and degree-1 zero sets are
    affine planes better handled directly."""
    _check_variant(variant)
    if d < 2:
        raise InputError("variety profiles require degree d >= 2")
    if N < 1 or not 0 <= n <= N:
        raise InputError("need N >= 1 and 0 <= n <= N")
    if variant == "full":
        return RegularityProfile(LogReal(N * math.log(2 * d)), n)
    if variant == "ball":
        return RegularityProfile(LogReal((N + 1) * math.log(2 * d)), n)
    log_K = LogReal((N + 1) * math.log(2 * d + 1))
    if variant == "sphere":
        return RegularityProfile(log_K, n)
    if n < 1:
        raise InputError("sphere_cone lowers the section dimension; need n >= 1")
    return RegularityProfile(log_K, n - 1)


def profile_rational_image(n: int, N: int, d: int) -> RegularityProfile:
    """Profile ((2Nd+1)^(n+1), n) of the image of a rational map on a
    parameter ball, with numerators and denominators of degree <= d."""
    if n < 1 or N < 1 or d < 1:
        raise InputError("need n, N, d >= 1")
    return RegularityProfile(LogReal((n + 1) * math.log(2 * N * d + 1)), n)


def profile_semialgebraic(
    N: int,
    n: int,
    d: int,
    b: int,
    third_term_constant: float | None = None,
) -> RegularityProfile:
    """Profile of a semialgebraic set in R^N of dimension n, described by b
    polynomial inequalities of degree at most d.

    log K = N log(2d) plus the cheapest of three accountings of the
    inequality pattern:
      (a) b log(2d)            every inequality irredundant,
      (b) b log 7 + log N      sign-condition counting,
      (c) N log(const * b^2)   opt-in: pass third_term_constant (needs b >= 1).
    """
    if N < 1 or d < 1 or b < 0 or not 0 <= n <= N:
        raise InputError("need N >= 1, d >= 1, b >= 0, 0 <= n <= N")
    options = [b * math.log(2 * d), b * math.log(7) + math.log(N)]
    if third_term_constant is not None:
        if b < 1:
            raise InputError("the b^2 branch needs at least one inequality")
        if third_term_constant <= 0:
            raise InputError("third_term_constant must be positive")
        options.append(N * math.log(third_term_constant * b * b))
    return RegularityProfile(LogReal(N * math.log(2 * d) + min(options)), n)


def profile_union(p1: RegularityProfile, p2: RegularityProfile) -> RegularityProfile:
    """Profile of a union: component counts add (log-sum-exp in nats) and
    the section dimension is the larger of the two."""
    return RegularityProfile(p1.log_K + p2.log_K, max(p1.n, p2.n))


def profile_cp_tensor(shape, r: int, variant: str = "ball") -> RegularityProfile:
    """Profile of the set of tensors of CP rank <= r with side lengths
    `shape`: the image of the degree-d multilinear parametrization in
    r * sum(shape) variables, d = len(shape).  The sphere slice of this
    cone uses the cone rule, dropping the section dimension by one."""
    shape = tuple(int(v) for v in shape)
    if len(shape) < 2 or any(v < 2 for v in shape):
        raise InputError("tensor shape needs order >= 2 and every dim >= 2")
    if r < 1:
        raise InputError("CP rank must be at least 1")
    if variant not in ("ball", "sphere"):
        raise InputError("CP tensor profiles take variant 'ball' or 'sphere'")
    n_params = r * sum(shape)
    d = len(shape)
    if variant == "ball":
        return profile_poly_image(n_params, d, "ball")
    return profile_poly_image(n_params, d, "sphere_cone")
