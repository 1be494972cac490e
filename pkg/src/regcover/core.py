"""Core numeric conventions shared by the whole package.

Counts and probabilities that can dwarf double precision (covering numbers,
component counts, tail bounds) are always carried as natural logarithms;
the LogReal wrapper keeps that convention explicit.  Polynomial maps are
stored as dense monomial term lists with analytic, exponent-lowering
Jacobians.  Randomness flows through counter-based Philox streams keyed by
(seed, stream), so seeded experiments reproduce bit for bit no matter how
the work is scheduled.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "InputError",
    "LogReal",
    "log_add",
    "RngSeed",
    "Term",
    "PolynomialMap",
    "eval_poly_map",
    "eval_poly_map_batch",
    "jacobian",
    "jacobian_batch",
    "poly_map_to_json",
    "poly_map_from_json",
    "monomial_exponents",
    "random_polynomial_map",
    "moment_curve",
]


class InputError(ValueError):
    """A precondition on an operation's inputs was violated.

    `ref` names the bound or operation whose hypothesis failed; the CLI
    forwards it in error payloads.
    """

    def __init__(self, message: str, ref: str = ""):
        super().__init__(message)
        self.ref = ref


def log_add(a: float, b: float) -> float:
    """log(e^a + e^b) computed without leaving the log domain."""
    return float(np.logaddexp(a, b))


@dataclass(frozen=True, order=True)
class LogReal:
    """A nonnegative real stored as its natural logarithm, in nats.

    `+` adds in the linear domain via log-sum-exp and `*` multiplies there,
    so exponents of magnitude up to ~1e6 never materialize as linear
    floats.  Zero is representable as -inf nats; negatives are rejected.
    """

    nats: float

    @classmethod
    def from_linear(cls, x: float) -> "LogReal":
        x = float(x)
        if x < 0:
            raise InputError("LogReal cannot represent a negative number")
        return cls(-math.inf if x == 0 else math.log(x))

    @property
    def linear(self) -> float:
        return math.exp(self.nats)

    def __add__(self, other) -> "LogReal":
        return LogReal(log_add(self.nats, _nats(other)))

    __radd__ = __add__

    def __mul__(self, other) -> "LogReal":
        return LogReal(self.nats + _nats(other))

    __rmul__ = __mul__

    def __float__(self) -> float:
        return float(self.nats)


def _nats(x) -> float:
    if isinstance(x, LogReal):
        return x.nats
    return LogReal.from_linear(x).nats


@dataclass(frozen=True)
class RngSeed:
    """Seed for the counter-based Philox generator family.

    generator(stream) keys an independent stream by (seed, stream), and
    derived(i) mixes a fresh 64-bit seed for trial i.  Because streams are
    keyed rather than drawn sequentially, Monte-Carlo work scheduled by
    trial index gives identical results on one thread or many.
    """

    seed: int

    def __post_init__(self):
        s = int(self.seed)
        if not 0 <= s < 2**64:
            raise InputError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "seed", s)

    def generator(self, stream: int = 0) -> np.random.Generator:
        if stream < 0:
            raise InputError("stream index must be nonnegative")
        key = np.array([self.seed, stream], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def derived(self, index: int) -> "RngSeed":
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(int(index),))
        return RngSeed(int(ss.generate_state(1, np.uint64)[0]))


@dataclass(frozen=True)
class Term:
    """One monomial c * prod_j x_j**e[j]."""

    c: float
    e: tuple


@dataclass(frozen=True)
class PolynomialMap:
    """A polynomial map R^n -> R^N in the dense monomial basis.

    coords[i] is the term list of output coordinate i; terms may be Term
    instances or (coefficient, exponents) pairs.  Construction compiles the
    lists once into a shared exponent matrix E (K x n) and a coefficient
    matrix C (N x K), so batched evaluation is a power table and a matmul.
    """

    n: int
    N: int
    coords: tuple

    def __post_init__(self):
        if int(self.n) < 1 or int(self.N) < 1:
            raise InputError("polynomial map dimensions must be positive")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "N", int(self.N))
        coords = []
        for coord in self.coords:
            terms = []
            for t in coord:
                c, e = (t.c, t.e) if isinstance(t, Term) else (t[0], t[1])
                e = tuple(int(v) for v in e)
                if len(e) != self.n:
                    raise InputError("exponent vector length must equal the input dimension")
                if any(v < 0 for v in e):
                    raise InputError("exponents must be nonnegative integers")
                terms.append(Term(float(c), e))
            coords.append(tuple(terms))
        if len(coords) != self.N:
            raise InputError("coords must list one term sequence per output coordinate")
        object.__setattr__(self, "coords", tuple(coords))

    @cached_property
    def degree(self) -> int:
        degs = [sum(t.e) for coord in self.coords for t in coord]
        return max(degs, default=0)

    @cached_property
    def _compiled(self):
        index: dict = {}
        for coord in self.coords:
            for t in coord:
                index.setdefault(t.e, len(index))
        K = max(len(index), 1)
        E = np.zeros((K, self.n), dtype=np.int64)
        for e, k in index.items():
            E[k] = e
        C = np.zeros((self.N, K))
        for i, coord in enumerate(self.coords):
            for t in coord:
                C[i, index[t.e]] += t.c
        return E, C


def eval_poly_map(pmap: PolynomialMap, x) -> np.ndarray:
    """Evaluate the map at a single point x in R^n."""
    x = np.asarray(x, dtype=float)
    if x.shape != (pmap.n,):
        raise InputError(f"expected a length-{pmap.n} point, got shape {x.shape}")
    return eval_poly_map_batch(pmap, x[None, :])[0]


def eval_poly_map_batch(pmap: PolynomialMap, X, chunk: int = 8192) -> np.ndarray:
    """Evaluate the map at every row of X, shape (B, n) -> (B, N)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != pmap.n:
        raise InputError(f"expected points of shape (B, {pmap.n}), got {X.shape}")
    E, C = pmap._compiled
    out = np.empty((X.shape[0], pmap.N))
    for lo in range(0, X.shape[0], chunk):
        block = X[lo : lo + chunk]
        powers = block[:, None, :] ** E[None, :, :]
        out[lo : lo + chunk] = powers.prod(axis=2) @ C.T
    return out


def jacobian(pmap: PolynomialMap, x) -> np.ndarray:
    """Analytic Jacobian (N x n) at x, by exponent lowering."""
    x = np.asarray(x, dtype=float)
    if x.shape != (pmap.n,):
        raise InputError(f"expected a length-{pmap.n} point, got shape {x.shape}")
    return jacobian_batch(pmap, x[None, :])[0]


def jacobian_batch(pmap: PolynomialMap, X, chunk: int = 8192) -> np.ndarray:
    """Jacobians at every row of X, shape (B, n) -> (B, N, n)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != pmap.n:
        raise InputError(f"expected points of shape (B, {pmap.n}), got {X.shape}")
    E, C = pmap._compiled
    out = np.empty((X.shape[0], pmap.N, pmap.n))
    for j in range(pmap.n):
        Ej = E[:, j].astype(float)
        # d/dx_j x^e = e_j * x^(e - u_j); clamping the lowered exponent to 0
        # is safe because the e_j factor kills those terms anyway.
        El = E.copy()
        El[:, j] = np.maximum(El[:, j] - 1, 0)
        for lo in range(0, X.shape[0], chunk):
            block = X[lo : lo + chunk]
            powers = block[:, None, :] ** El[None, :, :]
            dbasis = Ej[None, :] * powers.prod(axis=2)
            out[lo : lo + chunk, :, j] = dbasis @ C.T
    return out


def poly_map_to_json(pmap: PolynomialMap) -> dict:
    return {
        "n": pmap.n,
        "N": pmap.N,
        "coords": [
            [{"c": t.c, "e": list(t.e)} for t in coord] for coord in pmap.coords
        ],
    }


def poly_map_from_json(doc: dict) -> PolynomialMap:
    try:
        coords = tuple(
            tuple(Term(float(t["c"]), tuple(t["e"])) for t in coord)
            for coord in doc["coords"]
        )
        return PolynomialMap(n=doc["n"], N=doc["N"], coords=coords)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed polynomial map document: {exc}") from exc


def monomial_exponents(n: int, degree: int) -> list:
    """All exponent tuples in n variables of total degree <= degree."""
    if n < 1 or degree < 0:
        raise InputError("need n >= 1 and degree >= 0")
    exps = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            e = [0] * n
            for j in combo:
                e[j] += 1
            exps.append(tuple(e))
    return exps


def random_polynomial_map(n: int, N: int, degree: int, rng: np.random.Generator) -> PolynomialMap:
    """Dense random map: every monomial of total degree <= degree gets an
    independent standard normal coefficient in every output coordinate."""
    exps = monomial_exponents(n, degree)
    C = rng.standard_normal((N, len(exps)))
    coords = tuple(
        tuple(Term(float(c), e) for c, e in zip(row, exps)) for row in C
    )
    return PolynomialMap(n=n, N=N, coords=coords)


def moment_curve(dim: int) -> PolynomialMap:
    """The moment curve t -> (t, t^2, ..., t^dim)."""
    if dim < 1:
        raise InputError("moment curve needs dim >= 1")
    coords = tuple(((1.0, (i + 1,)),) for i in range(dim))
    return PolynomialMap(n=1, N=dim, coords=coords)
