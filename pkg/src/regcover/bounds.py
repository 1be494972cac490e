"""Covering-number, tube-volume, tube-hit and Gaussian-width bounds for
sets carrying a regularity profile.

All covering and probability bounds are returned in nats.  The Gaussian
width bound is the one linear-domain exception and is flagged as such in
its report.  Preconditions are hard errors: callers get an InputError, not
a clamped value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import InputError
from .regularity import RegularityProfile

__all__ = [
    "BoundReport",
    "covering_bound_log",
    "tube_volume_log",
    "tube_hit_probability_log",
    "dudley_term",
    "width_bound_regular",
    "subg_norm_dim",
    "log_ball_volume",
]

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class BoundReport:
    """A bound value with full provenance of the constants that shaped it.

    value is in nats unless log_domain is False; constants_used lists every
    tunable absolute constant that influenced the value; ref names the
    bound that produced the report.
    """

    value: float
    constants_used: dict = field(default_factory=dict)
    ref: str = ""
    log_domain: bool = True

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "constants_used": dict(self.constants_used),
            "ref": self.ref,
            "log_domain": self.log_domain,
        }


def _check_envelope(profile: RegularityProfile, N: int, t: float, eps: float, ref: str):
    if N < 1:
        raise InputError("ambient dimension N must be at least 1", ref)
    if t <= 0:
        raise InputError("coordinate bound t must be positive", ref)
    if eps <= 0:
        raise InputError("resolution eps must be positive", ref)
    diam = 2.0 * t * math.sqrt(N)
    if eps > diam:
        raise InputError(
            f"eps = {eps} exceeds the diameter envelope 2*t*sqrt(N) = {diam}", ref
        )
    if profile.n > N:
        raise InputError("profile dimension n cannot exceed the ambient dimension", ref)


def covering_bound_log(profile: RegularityProfile, N: int, t: float, eps: float) -> BoundReport:
    """log of the covering-number bound for a (K, n) regular set V in R^N
    with coordinates bounded by t:

        log N(V, eps) <= n log(2 t n N^(3/2) / eps) + log(2K),

    valid for eps in (0, 2 t sqrt(N)].  For n = 0 the set has at most K
    points and the bound log(2K) does not depend on eps.
    """
    ref = "regular-set-covering"
    _check_envelope(profile, N, t, eps, ref)
    n = profile.n
    value = LOG2 + profile.log_K.nats
    if n >= 1:
        value += n * math.log(2.0 * t * n * N**1.5 / eps)
    return BoundReport(value, {}, ref)


def tube_volume_log(profile: RegularityProfile, N: int, t: float, eps: float, c: float = 3.0) -> BoundReport:
    """log of the volume bound for the eps-tube around a (K, n) regular set:

        vol B^N * 2^N * eps^(N-n) * K * (c t N^(3/2) n)^n,

    with vol B^N the unit-ball volume.  The last factor is dropped when
    n = 0."""
    ref = "tube-volume"
    _check_envelope(profile, N, t, eps, ref)
    if c <= 0:
        raise InputError("constant c must be positive", ref)
    n = profile.n
    value = log_ball_volume(N) + N * LOG2 + (N - n) * math.log(eps) + profile.log_K.nats
    if n >= 1:
        value += n * math.log(c * t * N**1.5 * n)
    return BoundReport(value, {"c": c}, ref)


def tube_hit_probability_log(N: int, n: int, d: int, eps: float, sigma: float, c: float = 3.0) -> BoundReport:
    """log bound on the probability that a point drawn uniformly from a
    ball of radius sigma lands within eps of the image of a degree-d
    polynomial map R^n -> R^N:

        (eps/sigma)^(N-n) * 2^N * (d N)^(c n).
    """
    ref = "tube-hit-probability"
    if N < 1 or not 1 <= n <= N:
        raise InputError("need N >= 1 and 1 <= n <= N", ref)
    if d < 1:
        raise InputError("degree d must be at least 1", ref)
    if sigma <= 0 or eps <= 0:
        raise InputError("eps and sigma must be positive", ref)
    if eps > sigma:
        raise InputError("the bound needs eps <= sigma", ref)
    if c <= 0:
        raise InputError("constant c must be positive", ref)
    value = (N - n) * math.log(eps / sigma) + N * LOG2 + c * (n * math.log(d) + n * math.log(N))
    return BoundReport(value, {"c": c}, ref)


def dudley_term(a: float, b: float, c: float) -> float:
    """Closed-form upper bound for the entropy integral of log(c/eps):

        int_a^b sqrt(log(c/eps)) d(eps) <= b sqrt(pi) + b sqrt(log(c/b))
                                           - a sqrt(log(c/a)),

    for 0 <= a <= b <= c, with the convention 0 * sqrt(log(c/0)) = 0."""
    if not 0 <= a <= b <= c or c <= 0:
        raise InputError("dudley_term needs 0 <= a <= b <= c with c > 0", "dudley-term")

    def boundary(x: float) -> float:
        return 0.0 if x == 0 else x * math.sqrt(math.log(c / x))

    return b * math.sqrt(math.pi) + boundary(b) - boundary(a)


def width_bound_regular(profile: RegularityProfile, N: int, t: float) -> BoundReport:
    """Gaussian-width bound for a (K, n) regular set, by Dudley's entropy
    integral with the covering bound plugged in.  The value is a plain
    linear-domain real, not a log."""
    ref = "dudley-width"
    if N < 1:
        raise InputError("ambient dimension N must be at least 1", ref)
    if t <= 0:
        raise InputError("coordinate bound t must be positive", ref)
    if profile.n > N:
        raise InputError("profile dimension n cannot exceed the ambient dimension", ref)
    n = profile.n
    kappa = LOG2 + profile.log_K.nats
    diam = 2.0 * t * math.sqrt(N)
    if n == 0:
        value = 2.0 * diam * math.sqrt(kappa)
    else:
        # Effective entropy scale: log N(eps) <= n log(c_eff / eps) with
        # c_eff = 2 t n N^(3/2) e^(kappa/n); the integral is cut at the
        # diameter.  c_eff is handled in logs so huge K cannot overflow.
        log_ceff = math.log(2.0 * t * n * N**1.5) + kappa / n
        D = diam if log_ceff >= math.log(diam) else math.exp(log_ceff)
        value = 2.0 * math.sqrt(n) * (
            D * math.sqrt(math.pi) + D * math.sqrt(log_ceff - math.log(D))
        )
    return BoundReport(value, {}, ref, log_domain=False)


def subg_norm_dim(M: int, delta: float, u: float, c1: float, c2: float) -> int:
    """Smallest sketch dimension m for which c1 u^2 m - c2 (m + M) >=
    log(1/delta), i.e. a sub-Gaussian m x M matrix has operator norm at
    most u sqrt(m) with probability 1 - delta:

        m = ceil((c2 M + log(1/delta)) / (c1 u^2 - c2)).
    """
    ref = "subgaussian-norm-dim"
    if M < 1:
        raise InputError("M must be at least 1", ref)
    if not 0 < delta < 1:
        raise InputError("delta must lie in (0, 1)", ref)
    if u <= 0 or c1 <= 0 or c2 <= 0:
        raise InputError("u, c1, c2 must be positive", ref)
    gap = c1 * u * u - c2
    if gap <= 0:
        raise InputError("need c1 u^2 > c2 for the dimension to be finite", ref)
    return max(1, math.ceil((c2 * M + math.log(1.0 / delta)) / gap))


def log_ball_volume(N: int) -> float:
    """log vol of the unit ball in R^N: (N/2) log(pi) - log Gamma(N/2 + 1)."""
    if N < 1:
        raise InputError("dimension must be at least 1")
    return 0.5 * N * math.log(math.pi) - math.lgamma(0.5 * N + 1.0)
