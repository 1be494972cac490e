"""Generalization-bound calculators for rational and ReLU networks.

Covers the activation-degree lemmas, covering-number bounds over a sample,
Rademacher-complexity bounds, the high-probability generalization bound,
and the degree cost of approximating ReLU layers by rational ones.  Bound
values are linear-domain reals except where a LogReal is returned; every
tunable absolute constant is an explicit argument echoed in the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import BoundReport
from .core import InputError, LogReal

__all__ = [
    "NetArchitecture",
    "LossSpec",
    "cross_entropy_loss",
    "rat_approx_degree",
    "ratnn_degree",
    "ratcnn_degree",
    "ratnn_covering_log",
    "ratnn_rademacher_bound",
    "relu_rademacher_bound",
    "generalization_bound",
    "relu_approx_degree",
    "relu_first_layer_tolerance",
]

KINDS = ("ratnn", "ratcnn", "relu")


def _log_pos(x: float) -> float:
    """log with a 0-cutoff: 0 for x <= 1."""
    return math.log(x) if x > 1 else 0.0


def _loglog_pos(x: float) -> float:
    return _log_pos(_log_pos(x))


@dataclass(frozen=True)
class NetArchitecture:
    """Network shape and the hypothesis-class caps the bounds depend on.

    dims are the layer widths d_0..d_L.  Rational kinds carry the
    activation degree s and a trainable flag (trainable activations add
    2(s+1) coefficients per layer); ratcnn additionally carries channel
    counts c_0..c_L and the kernel size k.  The relu kind carries the
    per-layer weight caps omegas, all required to be >= 2, with every
    width >= 2 as well.  t bounds the output range."""

    kind: str
    dims: tuple
    t: float = 1.0
    s: int | None = None
    trainable: bool = False
    channels: tuple | None = None
    kernel: int | None = None
    omegas: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"kind must be one of {KINDS}")
        dims = tuple(int(v) for v in self.dims)
        if len(dims) < 2 or any(v < 1 for v in dims):
            raise InputError("need depth L >= 1 and positive layer widths")
        object.__setattr__(self, "dims", dims)
        if self.t <= 0:
            raise InputError("output range bound t must be positive")
        if self.kind in ("ratnn", "ratcnn"):
            if self.s is None or int(self.s) < 1:
                raise InputError("rational kinds need activation degree s >= 1")
            object.__setattr__(self, "s", int(self.s))
        if self.kind == "ratcnn":
            if self.channels is None or self.kernel is None:
                raise InputError("ratcnn needs channels and a kernel size")
            channels = tuple(int(v) for v in self.channels)
            if len(channels) != len(dims) or any(v < 1 for v in channels):
                raise InputError("channels must list c_0..c_L, all positive")
            if int(self.kernel) < 2:
                raise InputError("the conv degree lemma needs kernel k >= 2")
            object.__setattr__(self, "channels", channels)
            object.__setattr__(self, "kernel", int(self.kernel))
        if self.kind == "relu":
            if self.omegas is None:
                raise InputError("relu kind needs per-layer weight caps omegas")
            omegas = tuple(float(v) for v in self.omegas)
            if len(omegas) != len(dims) - 1:
                raise InputError("omegas must list one cap per layer")
            if any(v < 2 for v in omegas) or any(v < 2 for v in dims):
                raise InputError("the relu bounds need all d_i >= 2 and omega_i >= 2")
            object.__setattr__(self, "omegas", omegas)

    @property
    def L(self) -> int:
        return len(self.dims) - 1

    @property
    def param_count(self) -> int:
        if self.kind == "ratcnn":
            count = sum(
                self.channels[i] * self.channels[i - 1] * self.kernel**2 + self.dims[i]
                for i in range(1, len(self.dims))
            )
        else:
            count = sum(
                self.dims[i] * (self.dims[i - 1] + 1) for i in range(1, len(self.dims))
            )
        if self.kind in ("ratnn", "ratcnn") and self.trainable:
            count += 2 * (self.s + 1) * self.L
        return count

    def to_json(self) -> dict:
        doc = {"kind": self.kind, "dims": list(self.dims), "t": self.t}
        if self.kind in ("ratnn", "ratcnn"):
            doc["s"] = self.s
            doc["trainable"] = self.trainable
        if self.kind == "ratcnn":
            doc["channels"] = list(self.channels)
            doc["kernel"] = self.kernel
        if self.kind == "relu":
            doc["omegas"] = list(self.omegas)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "NetArchitecture":
        try:
            return cls(
                kind=doc["kind"],
                dims=tuple(doc["dims"]),
                t=doc.get("t", 1.0),
                s=doc.get("s"),
                trainable=doc.get("trainable", False),
                channels=tuple(doc["channels"]) if "channels" in doc else None,
                kernel=doc.get("kernel"),
                omegas=tuple(doc["omegas"]) if "omegas" in doc else None,
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed architecture document: {exc}") from exc


@dataclass(frozen=True)
class LossSpec:
    """Loss with Lipschitz constant lip in the network output and range
    [0, H]."""

    lip: float
    H: float

    def __post_init__(self):
        if self.lip <= 0 or self.H <= 0:
            raise InputError("loss needs lip > 0 and H > 0")


def cross_entropy_loss(t: float, d_L: int) -> LossSpec:
    """Cross-entropy over d_L logits bounded by t: range [0, 2t + log d_L],
    Lipschitz constant sqrt(d_L)."""
    if t <= 0 or d_L < 1:
        raise InputError("need t > 0 and d_L >= 1")
    return LossSpec(lip=math.sqrt(d_L), H=2.0 * t + math.log(d_L))


def rat_approx_degree(t: float, eps: float) -> float:
    """Degree increment needed to approximate ReLU on [-t, t] to accuracy
    eps by a rational function: (6/pi^2) log+^2(4t/eps)."""
    if t <= 0 or eps <= 0:
        raise InputError("need t > 0 and eps > 0")
    return (6.0 / math.pi**2) * _log_pos(4.0 * t / eps) ** 2


def _degree_checks(hidden, s: int, L: int, what: str):
    if L < 1:
        raise InputError("depth L must be at least 1")
    if s < 1:
        raise InputError("activation degree s must be at least 1")
    hidden = tuple(int(v) for v in hidden)
    if len(hidden) != L - 1:
        raise InputError(f"expected {L - 1} hidden {what}, got {len(hidden)}")
    if any(v < 2 for v in hidden):
        raise InputError(f"the degree lemma needs hidden {what} >= 2")
    return hidden


def ratnn_degree(hidden_dims, s: int, L: int, trainable: bool = False) -> LogReal:
    """log of the output degree 2 d_1...d_(L-1) s^L of a depth-L rational
    network, times (1 + 1/s) when activations are trainable."""
    hidden = _degree_checks(hidden_dims, s, L, "widths")
    value = math.log(2.0) + sum(math.log(v) for v in hidden) + L * math.log(s)
    if trainable:
        value += math.log(1.0 + 1.0 / s)
    return LogReal(value)


def ratcnn_degree(hidden_channels, k: int, s: int, L: int, trainable: bool = False) -> LogReal:
    """log of the output degree 2 c_1...c_(L-1) s^L k^(2(L-1)) of a depth-L
    rational convolutional network with kernel size k >= 2."""
    hidden = _degree_checks(hidden_channels, s, L, "channels")
    if k < 2:
        raise InputError("the conv degree lemma needs kernel k >= 2")
    value = (
        math.log(2.0)
        + sum(math.log(v) for v in hidden)
        + L * math.log(s)
        + 2.0 * (L - 1) * math.log(k)
    )
    if trainable:
        value += math.log(1.0 + 1.0 / s)
    return LogReal(value)


def _check_rational(arch: NetArchitecture):
    if arch.kind not in ("ratnn", "ratcnn"):
        raise InputError("this bound applies to rational kinds only")


def _log_class_size(arch: NetArchitecture, n_samples: int, c: float) -> float:
    """log of (c N (n d_L)^(5/2) s^L prod) with prod = d_1..d_(L-1) for the
    dense class and k^(2(L-1)) c_1..c_(L-1) for the conv class; this is the
    argument of the second log in the covering bound."""
    N = arch.param_count
    d_L = arch.dims[-1]
    value = (
        math.log(c)
        + math.log(N)
        + 2.5 * math.log(n_samples * d_L)
        + arch.L * math.log(arch.s)
    )
    if arch.kind == "ratnn":
        value += sum(math.log(v) for v in arch.dims[1:-1])
    else:
        value += 2.0 * (arch.L - 1) * math.log(arch.kernel)
        value += sum(math.log(v) for v in arch.channels[1:-1])
    return value


def ratnn_covering_log(arch: NetArchitecture, n_samples: int, eps: float, c: float = 1.0) -> BoundReport:
    """log covering bound of a rational network class evaluated on
    n_samples inputs:

        log N(F(X), eps) <= N log(t/eps)
                            + (N+1) log(c N (n d_L)^(5/2) s^L prod),

    with prod the width (dense) or kernel/channel (conv) product."""
    ref = "rational-net-covering"
    _check_rational(arch)
    if n_samples < 1:
        raise InputError("need n_samples >= 1", ref)
    if c <= 0:
        raise InputError("constant c must be positive", ref)
    diam = 2.0 * arch.t * math.sqrt(n_samples * arch.dims[-1])
    if not 0 < eps <= diam:
        raise InputError(f"eps must lie in (0, {diam}] (diameter envelope)", ref)
    N = arch.param_count
    value = N * math.log(arch.t / eps) + (N + 1) * _log_class_size(arch, n_samples, c)
    return BoundReport(value, {"c": c}, ref)


def ratnn_rademacher_bound(arch: NetArchitecture, n_samples: int, loss: LossSpec, c: float = 1.0) -> BoundReport:
    """Rademacher-complexity bound for a Lipschitz loss over a rational
    network class (linear-domain value):

        c alpha sqrt(N/n) (sqrt(pi) + sqrt(log+(t W lip / (alpha sqrt(n))))),

    with alpha = min(H, t lip sqrt(d_L)) and W the class-size argument of
    the covering bound at unit constant."""
    ref = "rational-net-rademacher"
    _check_rational(arch)
    if n_samples < 1:
        raise InputError("need n_samples >= 1", ref)
    if c <= 0:
        raise InputError("constant c must be positive", ref)
    N = arch.param_count
    d_L = arch.dims[-1]
    alpha = min(loss.H, arch.t * loss.lip * math.sqrt(d_L))
    log_W = _log_class_size(arch, n_samples, 1.0)
    inner = math.log(arch.t) + log_W + math.log(loss.lip) - math.log(alpha * math.sqrt(n_samples))
    value = c * alpha * math.sqrt(N / n_samples) * (math.sqrt(math.pi) + math.sqrt(max(0.0, inner)))
    return BoundReport(value, {"c": c}, ref, log_domain=False)


def relu_rademacher_bound(arch: NetArchitecture, n_samples: int, loss: LossSpec, c: float = 1.0) -> BoundReport:
    """Rademacher-complexity bound for a Lipschitz loss over the ReLU class
    with weight caps omega (linear-domain value):

        c alpha sqrt(N/n) (log beta + log n + sum log d_i
                           + L log+log+(beta sqrt(n/d_L)))^(1/2),

    with alpha = min(H, lip sqrt(d_L) prod omega) and beta the ratio
    lip sqrt(d_L) prod omega / alpha."""
    ref = "relu-net-rademacher"
    if arch.kind != "relu":
        raise InputError("this bound applies to the relu kind only", ref)
    if n_samples < 1:
        raise InputError("need n_samples >= 1", ref)
    if c <= 0:
        raise InputError("constant c must be positive", ref)
    N = arch.param_count
    d_L = arch.dims[-1]
    omega_prod = math.prod(arch.omegas)
    scale = loss.lip * math.sqrt(d_L) * omega_prod
    alpha = min(loss.H, scale)
    beta = scale / alpha
    inner = (
        math.log(beta)
        + math.log(n_samples)
        + sum(math.log(v) for v in arch.dims[1:])
        + arch.L * _loglog_pos(beta * math.sqrt(n_samples / d_L))
    )
    value = c * alpha * math.sqrt(N / n_samples) * math.sqrt(inner)
    return BoundReport(value, {"c": c}, ref, log_domain=False)


def generalization_bound(rademacher: float, delta: float, n_samples: int) -> float:
    """High-probability generalization gap: 2 R + 3 sqrt(log(2/delta)/(2n))."""
    if not 0 < delta < 1:
        raise InputError("delta must lie in (0, 1)")
    if n_samples < 1:
        raise InputError("need n_samples >= 1")
    if rademacher < 0:
        raise InputError("the Rademacher term must be nonnegative")
    return 2.0 * rademacher + 3.0 * math.sqrt(math.log(2.0 / delta) / (2.0 * n_samples))


def relu_first_layer_tolerance(arch: NetArchitecture, loss: LossSpec, n_samples: int) -> float:
    """First-layer approximation tolerance eps solving
    lip * eps * prod_(i>=2)(1 + omega_i) = alpha / sqrt(n), the schedule
    under which a rational surrogate of the ReLU network shifts the
    empirical Rademacher complexity by at most alpha / sqrt(n)."""
    if arch.kind != "relu":
        raise InputError("the tolerance schedule applies to the relu kind only")
    if n_samples < 1:
        raise InputError("need n_samples >= 1")
    d_L = arch.dims[-1]
    alpha = min(loss.H, loss.lip * math.sqrt(d_L) * math.prod(arch.omegas))
    growth = math.prod(1.0 + w for w in arch.omegas[1:])
    return alpha / (loss.lip * math.sqrt(n_samples) * growth)


def relu_approx_degree(arch: NetArchitecture, eps_final: float) -> LogReal:
    """log of the parameter-count inflation theta_L incurred by replacing
    every ReLU by a rational activation so that the network output moves by
    at most the propagated tolerance.

    Layer i sees inputs bounded by lambda_(i-1) = prod_(j<i) omega_j and is
    approximated to eps_i = delta_(i-1), where delta_1 = eps_final and
    delta_i = (1 + omega_i) delta_(i-1); the degree increment is
    Delta_i = (6/pi^2) log+^2(4 omega_i lambda_(i-1) / delta_(i-1)), and

        log theta_L = sum_i log(1 + Delta_i) + sum_(j<L) log(1 + d_j).
    """
    if arch.kind != "relu":
        raise InputError("the degree recursion applies to the relu kind only")
    if eps_final <= 0:
        raise InputError("eps_final must be positive")
    value = 0.0
    lam = 1.0
    acc = eps_final
    for i, omega in enumerate(arch.omegas):
        # eps_1 = eps_final and delta_1 = eps_final; deeper layers take
        # eps_i = delta_(i-1) and accumulate delta_i = (1 + omega_i) delta_(i-1)
        tol = eps_final if i == 0 else acc
        increment = (6.0 / math.pi**2) * _log_pos(4.0 * omega * lam / tol) ** 2
        value += math.log(1.0 + increment)
        if i >= 1:
            acc *= 1.0 + omega
        lam *= omega
    value += sum(math.log(1.0 + v) for v in arch.dims[1:-1])
    return LogReal(value)
