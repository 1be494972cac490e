"""Randomized sketching operators and the dimension formulas that size them.

Two ensembles: dense sub-Gaussian matrices S = G / sqrt(m), and subsampled
randomized orthogonal systems S = sqrt(M_pad / m) P H D built from the
orthonormal Walsh-Hadamard transform, a random sign flip D and m rows
sampled with replacement.  Operators are frozen value objects; the dense
realization is regenerated from the seed on demand and is never part of
the serialized form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import InputError, RngSeed

__all__ = [
    "fwht",
    "SubGaussianSketch",
    "SorsSketch",
    "IdentitySketch",
    "apply_sketch",
    "sketch_to_json",
    "sketch_from_json",
    "subg_dim_poly",
    "sors_dim_poly",
    "subg_dim_lipschitz",
    "sors_dim_lipschitz",
]


def fwht(x) -> np.ndarray:
    """Orthonormal fast Walsh-Hadamard transform of a power-of-two vector.

    Involutive (applying twice gives back x) and norm preserving.  The
    input is not modified."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InputError("fwht expects a one-dimensional vector")
    return _fwht_axis0(x[:, None])[:, 0]


def _fwht_axis0(A) -> np.ndarray:
    """Transform along axis 0 of a (M, k) array; returns a new array."""
    A = np.array(A, dtype=float)
    M = A.shape[0]
    if M < 1 or (M & (M - 1)) != 0:
        raise InputError("transform length must be a power of two")
    if M == 1:
        return A
    k = A.shape[1]
    scratch = np.empty((M // 2, k))
    h = 1
    # classic butterfly; per stage (a, b) <- (a + b, a - b), no allocation
    # inside the loop beyond the reshaped views
    while h < M:
        V = A.reshape(-1, 2 * h, k)
        a = V[:, :h, :]
        b = V[:, h:, :]
        t = scratch.reshape(V.shape[0], h, k)
        np.subtract(a, b, out=t)
        np.add(a, b, out=a)
        b[:] = t
        h *= 2
    A *= 1.0 / math.sqrt(M)
    return A


def _coerce_seed(seed) -> RngSeed:
    return seed if isinstance(seed, RngSeed) else RngSeed(int(seed))


@dataclass(frozen=True)
class SubGaussianSketch:
    """Dense m x M sketch with iid gaussian or rademacher entries, scaled
    by 1/sqrt(m) so that E ||S x||^2 = ||x||^2."""

    m: int
    M: int
    seed: RngSeed
    distribution: str = "gaussian"

    def __post_init__(self):
        if self.m < 1 or self.M < 1:
            raise InputError("sketch dimensions must be positive")
        if self.distribution not in ("gaussian", "rademacher"):
            raise InputError("distribution must be 'gaussian' or 'rademacher'")
        object.__setattr__(self, "seed", _coerce_seed(self.seed))

    @cached_property
    def matrix(self) -> np.ndarray:
        rng = self.seed.generator()
        if self.distribution == "gaussian":
            G = rng.standard_normal((self.m, self.M))
        else:
            G = rng.integers(0, 2, size=(self.m, self.M)) * 2.0 - 1.0
        return G / math.sqrt(self.m)


@dataclass(frozen=True)
class SorsSketch:
    """Subsampled randomized orthogonal system sketch.

    Inputs of length M are zero-padded to the next power of two M_pad
    (padding preserves norms, so the distortion guarantees transfer), sign
    flipped, Walsh-Hadamard transformed, and m rows are kept, sampled with
    replacement from the seed.  Explicit row_indices override the sampling;
    full_sampling() uses all rows once, which makes the operator an exact
    isometry on the padded space."""

    m: int
    M: int
    seed: RngSeed
    row_indices: tuple | None = None

    def __post_init__(self):
        if self.m < 1 or self.M < 1:
            raise InputError("sketch dimensions must be positive")
        object.__setattr__(self, "seed", _coerce_seed(self.seed))
        if self.row_indices is not None:
            rows = tuple(int(i) for i in self.row_indices)
            if len(rows) != self.m:
                raise InputError("row_indices must have length m")
            if any(not 0 <= i < self.padded for i in rows):
                raise InputError("row_indices out of range for the padded length")
            object.__setattr__(self, "row_indices", rows)

    @property
    def padded(self) -> int:
        return 1 << (self.M - 1).bit_length() if self.M > 1 else 1

    @property
    def scale(self) -> float:
        return math.sqrt(self.padded / self.m)

    @cached_property
    def signs(self) -> np.ndarray:
        rng = self.seed.generator(stream=0)
        return rng.integers(0, 2, size=self.padded) * 2.0 - 1.0

    @cached_property
    def rows(self) -> np.ndarray:
        if self.row_indices is not None:
            return np.array(self.row_indices, dtype=np.int64)
        rng = self.seed.generator(stream=1)
        return rng.integers(0, self.padded, size=self.m)

    @classmethod
    def full_sampling(cls, M: int, seed) -> "SorsSketch":
        pad = 1 << (M - 1).bit_length() if M > 1 else 1
        return cls(m=pad, M=M, seed=seed, row_indices=tuple(range(pad)))


@dataclass(frozen=True)
class IdentitySketch:
    """Exact test double: applying it returns the input unchanged."""

    M: int

    def __post_init__(self):
        if self.M < 1:
            raise InputError("sketch dimensions must be positive")

    @property
    def m(self) -> int:
        return self.M


def apply_sketch(op, x) -> np.ndarray:
    """Apply a sketch operator to a vector of length M, or columnwise to an
    (M, k) array."""
    x = np.asarray(x, dtype=float)
    vector = x.ndim == 1
    if vector:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] != op.M:
        raise InputError(f"operator expects inputs of length {op.M}")
    if isinstance(op, IdentitySketch):
        out = x.copy()
    elif isinstance(op, SubGaussianSketch):
        out = op.matrix @ x
    elif isinstance(op, SorsSketch):
        padded = np.zeros((op.padded, x.shape[1]))
        padded[: op.M] = x
        padded *= op.signs[:, None]
        transformed = _fwht_axis0(padded)
        out = transformed[op.rows] * op.scale
    else:
        raise InputError(f"unknown sketch operator type {type(op).__name__}")
    return out[:, 0] if vector else out


def sketch_to_json(op) -> dict:
    """Serialized form: seeds and shapes only, never the dense matrix."""
    if isinstance(op, SubGaussianSketch):
        return {"kind": "subgaussian", "m": op.m, "M": op.M,
                "seed": op.seed.seed, "distribution": op.distribution}
    if isinstance(op, SorsSketch):
        return {"kind": "sors", "m": op.m, "M": op.M, "seed": op.seed.seed}
    if isinstance(op, IdentitySketch):
        return {"kind": "identity", "M": op.M}
    raise InputError(f"unknown sketch operator type {type(op).__name__}")


def sketch_from_json(doc: dict):
    try:
        kind = doc["kind"]
        if kind == "subgaussian":
            return SubGaussianSketch(m=doc["m"], M=doc["M"], seed=RngSeed(doc["seed"]),
                                     distribution=doc.get("distribution", "gaussian"))
        if kind == "sors":
            return SorsSketch(m=doc["m"], M=doc["M"], seed=RngSeed(doc["seed"]))
        if kind == "identity":
            return IdentitySketch(M=doc["M"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed sketch document: {exc}") from exc
    raise InputError(f"unknown sketch kind {kind!r}")


def _effective_cloud_dim(n: int, d: int, N: int) -> int:
    # N' = min(N, n^d) without forming n^d when it would overflow
    if n < 1 or d < 1 or N < 1:
        raise InputError("need n, d, N >= 1")
    if n == 1:
        return 1
    if d * math.log(n) >= math.log(N):
        return N
    return min(N, n**d)


def _check_probability_pair(eps: float, delta: float, ref: str):
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)", ref)
    if not 0 < delta < 1:
        raise InputError("delta must lie in (0, 1)", ref)


def subg_dim_poly(n: int, d: int, N: int, eps: float, delta: float,
                  alpha: float = 1.0, c: float = 1.0) -> int:
    """Sub-Gaussian sketch dimension with distortion eps and failure
    probability delta, uniformly over the image of a degree-d polynomial
    map R^n -> R^N:

        m = ceil(c alpha^2 eps^-2 (n log(n d N') + log(1/delta))),

    where N' = min(N, n^d) and alpha is the sub-Gaussian norm scale."""
    ref = "subgaussian-dim-poly"
    _check_probability_pair(eps, delta, ref)
    if alpha <= 0 or c <= 0:
        raise InputError("alpha and c must be positive", ref)
    Np = _effective_cloud_dim(n, d, N)
    m = c * alpha * alpha / (eps * eps) * (
        n * math.log(n * d * Np) + math.log(1.0 / delta)
    )
    return max(1, math.ceil(m))


def sors_dim_poly(n: int, d: int, N: int, eps: float, delta: float,
                  beta: float = 1.0, c: float = 1.0) -> int:
    """SORS sketch dimension for the image of a degree-d polynomial map:

        Delta = beta^2 eps^-2 n log(n d N') log(1/delta)
        m = ceil(c Delta log^2(Delta) log(N'/delta)),

    with log^2(Delta) floored at 1 when Delta <= e."""
    ref = "sors-dim-poly"
    _check_probability_pair(eps, delta, ref)
    if beta <= 0 or c <= 0:
        raise InputError("beta and c must be positive", ref)
    Np = _effective_cloud_dim(n, d, N)
    delta_term = beta * beta / (eps * eps) * n * math.log(n * d * Np) * math.log(1.0 / delta)
    log_sq = max(1.0, math.log(delta_term) ** 2) if delta_term > 0 else 1.0
    m = c * delta_term * log_sq * math.log(Np / delta)
    return max(1, math.ceil(m))


def _lipschitz_scale(d: int, N: int, t: float, lip: float, tau: float, c_lambda: float) -> float:
    return max(c_lambda, d * N * t * lip / tau)


def subg_dim_lipschitz(n: int, d: int, N: int, M: int, t: float, lip: float,
                       tau: float, eps: float, delta: float,
                       alpha: float = 1.0, c: float = 1.0,
                       c_lambda: float = 1.0) -> int:
    """Sub-Gaussian sketch dimension for Lipschitz images of a polynomial
    set, with guarantees only where the sketched norm exceeds tau:

        lam = max(c_lambda, d N t lip / tau)
        m = ceil(c alpha^2 eps^-2 (n log(lam alpha
              + lam eps sqrt((M + log(1/delta)) / n)) + log(1/delta))).
    """
    ref = "subgaussian-dim-lipschitz"
    _check_probability_pair(eps, delta, ref)
    if n < 1 or d < 1 or N < 1 or M < 1:
        raise InputError("need n, d, N, M >= 1", ref)
    if t <= 0 or lip <= 0 or tau <= 0 or alpha <= 0 or c <= 0 or c_lambda <= 0:
        raise InputError("scale parameters must be positive", ref)
    lam = _lipschitz_scale(d, N, t, lip, tau, c_lambda)
    inner = lam * alpha + lam * eps * math.sqrt((M + math.log(1.0 / delta)) / n)
    m = c * alpha * alpha / (eps * eps) * (n * math.log(inner) + math.log(1.0 / delta))
    return max(1, math.ceil(m))


def sors_dim_lipschitz(n: int, d: int, N: int, M: int, t: float, lip: float,
                       tau: float, eps: float, delta: float,
                       beta: float = 1.0, c: float = 1.0,
                       c_lambda: float = 1.0) -> int:
    """SORS sketch dimension for Lipschitz images of a polynomial set:

        Delta = beta^2 eps^-2 n log(lam sqrt(M)) log(1/delta)
        m = ceil(c Delta log^2(Delta) log(N/delta)),

    with lam as in subg_dim_lipschitz and log^2(Delta) floored at 1 when
    Delta <= e."""
    ref = "sors-dim-lipschitz"
    _check_probability_pair(eps, delta, ref)
    if n < 1 or d < 1 or N < 1 or M < 1:
        raise InputError("need n, d, N, M >= 1", ref)
    if t <= 0 or lip <= 0 or tau <= 0 or beta <= 0 or c <= 0 or c_lambda <= 0:
        raise InputError("scale parameters must be positive", ref)
    lam = _lipschitz_scale(d, N, t, lip, tau, c_lambda)
    delta_term = beta * beta / (eps * eps) * n * math.log(lam * math.sqrt(M)) * math.log(1.0 / delta)
    log_sq = max(1.0, math.log(delta_term) ** 2) if delta_term > 0 else 1.0
    m = c * delta_term * log_sq * math.log(N / delta)
    return max(1, math.ceil(m))
