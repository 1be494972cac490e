"""Command-line front end: every bound, sketch, optimizer and verification
oracle as a subcommand with JSON output.

Numeric imports happen lazily inside the handlers so that the
REGCOVER_THREADS cap can be applied to the BLAS thread pools before numpy
is first loaded.  All output numbers are printed with 10 significant
digits; exit code 0 means success, 1 an input or usage error, and 2 a
verify subcommand whose check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

__all__ = ["CommandResult", "dispatch", "main"]


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    payload: object


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so dispatch stays a function."""

    def error(self, message):
        raise _UsageError(message)


def _cap_threads():
    cap = os.environ.get("REGCOVER_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
        os.environ.setdefault(var, cap)


def _parse_angle(text: str) -> float:
    text = str(text).strip()
    if text.startswith("pi/"):
        return math.pi / float(text[3:])
    if text == "pi":
        return math.pi
    return float(text)


def _parse_shape(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    return tuple(int(v) for v in str(text).split(","))


def _parse_json_arg(text):
    """Inline JSON if the value looks like JSON, else a path to a file."""
    if isinstance(text, (dict, list)):
        return text
    text = str(text).strip()
    if text[:1] in ("{", "["):
        return json.loads(text)
    with open(text) as fh:
        return json.load(fh)


def _parse_vector(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    if text[:1] == "[":
        return [float(v) for v in json.loads(text)]
    return [float(v) for v in text.split(",")]


class _Cfg:
    """Parsed flags merged over an optional --config JSON document; flags
    win.  Handlers pull values by name and say which ones are required."""

    def __init__(self, args: argparse.Namespace):
        merged = {}
        config_path = getattr(args, "config", None)
        if config_path:
            with open(config_path) as fh:
                doc = json.load(fh)
            if not isinstance(doc, dict):
                raise _UsageError("--config must contain a JSON object")
            merged.update({k.replace("-", "_"): v for k, v in doc.items()})
        for key, value in vars(args).items():
            if key in ("config", "group", "action") or value is None:
                continue
            merged[key] = value
        self.values = merged

    def need(self, name: str):
        if name not in self.values:
            raise _UsageError(f"missing required value --{name.replace('_', '-')}")
        return self.values[name]

    def get(self, name: str, default=None):
        return self.values.get(name, default)


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.10g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _build_parser() -> _Parser:
    parser = _Parser(prog="regcover")
    parser.add_argument("--config", default=None)
    groups = parser.add_subparsers(dest="group")

    def sub(group, name, *flags):
        p = group.add_parser(name)
        for flag in flags:
            if flag in ("--sphere", "--trainable"):
                p.add_argument(flag, action=argparse.BooleanOptionalAction, default=None)
            else:
                p.add_argument(flag, default=None)
        p.add_argument("--config", default=None)
        return p

    bound = parser_group(groups, "bound")
    sub(bound, "regular", "--log-K", "--n", "--N", "--t", "--eps")
    sub(bound, "poly-image", "--n", "--d", "--variant", "--N", "--t", "--eps")
    sub(bound, "variety", "--N", "--n", "--d", "--variant", "--t", "--eps")
    sub(bound, "semialgebraic", "--N", "--n", "--d", "--b", "--third-constant", "--t", "--eps")
    sub(bound, "rational", "--n", "--N", "--d", "--t", "--eps")
    sub(bound, "tube", "--log-K", "--n", "--N", "--t", "--eps", "--c")
    sub(bound, "tube-prob", "--N", "--n", "--d", "--eps", "--sigma", "--c")
    sub(bound, "width", "--log-K", "--n", "--N", "--t")

    tensor = parser_group(groups, "tensor")
    sub(tensor, "cover", "--shape", "--r", "--t", "--eps", "--c", "--sphere")
    sub(tensor, "cover-lowrank", "--shape", "--r", "--t", "--eps", "--c1", "--c2", "--sphere")
    sub(tensor, "angle-prob", "--shape", "--r", "--eps", "--c1", "--c2")

    sketch = parser_group(groups, "sketch")
    sub(sketch, "dim-subg", "--n", "--d", "--N", "--eps", "--delta", "--alpha", "--c")
    sub(sketch, "dim-sors", "--n", "--d", "--N", "--eps", "--delta", "--beta", "--c")
    sub(sketch, "dim-subg-lip", "--n", "--d", "--N", "--M", "--t", "--lip", "--tau",
        "--eps", "--delta", "--alpha", "--c", "--c-lambda")
    sub(sketch, "dim-sors-lip", "--n", "--d", "--N", "--M", "--t", "--lip", "--tau",
        "--eps", "--delta", "--beta", "--c", "--c-lambda")
    sub(sketch, "apply", "--op", "--input")
    sub(sketch, "fwht", "--input")

    opt = parser_group(groups, "opt")
    sub(opt, "gn", "--map", "--x0", "--max-iters", "--grad-tol", "--step-tol",
        "--damping", "--line-search")
    sub(opt, "gn-sketched", "--map", "--x0", "--ensemble", "--m", "--seed",
        "--distribution", "--max-iters", "--grad-tol", "--step-tol", "--damping",
        "--line-search")

    nn = parser_group(groups, "nn")
    sub(nn, "rat-cover", "--arch", "--n-samples", "--eps", "--c")
    sub(nn, "rat-rademacher", "--arch", "--n-samples", "--lip", "--H", "--c")
    sub(nn, "relu-rademacher", "--arch", "--n-samples", "--lip", "--H", "--c")
    sub(nn, "gen-bound", "--rademacher", "--delta", "--n-samples")
    sub(nn, "degree", "--arch", "--eps-final")

    verify = parser_group(groups, "verify")
    sub(verify, "cover", "--map", "--box-radius", "--t", "--eps", "--count", "--seed")
    sub(verify, "distortion", "--map", "--box-radius", "--ensemble", "--eps",
        "--delta", "--trials", "--count", "--seed", "--c")
    sub(verify, "tube", "--map", "--box-radius", "--center", "--sigma", "--eps",
        "--mc-samples", "--grid-density", "--seed", "--c")
    sub(verify, "rademacher", "--values", "--sigma-draws", "--seed")

    return parser


def parser_group(groups, name):
    p = groups.add_parser(name)
    return p.add_subparsers(dest="action")


def _profile_payload(profile, bound):
    return {
        "log_bound": bound.value,
        "profile": {"log_K": profile.log_K.nats, "n": profile.n},
        "constants_used": dict(bound.constants_used),
        "ref": bound.ref,
    }


def _handle_bound(action: str, cfg: _Cfg) -> CommandResult:
    from . import bounds, regularity
    from .core import LogReal
    from .regularity import RegularityProfile

    if action == "regular":
        profile = RegularityProfile(LogReal(float(cfg.need("log_K"))), int(cfg.need("n")))
        report = bounds.covering_bound_log(profile, int(cfg.need("N")),
                                           float(cfg.need("t")), float(cfg.need("eps")))
        return CommandResult(0, _profile_payload(profile, report))
    if action == "poly-image":
        profile = regularity.profile_poly_image(int(cfg.need("n")), int(cfg.need("d")),
                                                cfg.get("variant", "full"))
        report = bounds.covering_bound_log(profile, int(cfg.need("N")),
                                           float(cfg.need("t")), float(cfg.need("eps")))
        return CommandResult(0, _profile_payload(profile, report))
    if action == "variety":
        profile = regularity.profile_variety(int(cfg.need("N")), int(cfg.need("n")),
                                             int(cfg.need("d")), cfg.get("variant", "full"))
        report = bounds.covering_bound_log(profile, int(cfg.need("N")),
                                           float(cfg.need("t")), float(cfg.need("eps")))
        return CommandResult(0, _profile_payload(profile, report))
    if action == "semialgebraic":
        third = cfg.get("third_constant")
        profile = regularity.profile_semialgebraic(
            int(cfg.need("N")), int(cfg.need("n")), int(cfg.need("d")),
            int(cfg.need("b")), None if third is None else float(third))
        report = bounds.covering_bound_log(profile, int(cfg.need("N")),
                                           float(cfg.need("t")), float(cfg.need("eps")))
        return CommandResult(0, _profile_payload(profile, report))
    if action == "rational":
        profile = regularity.profile_rational_image(int(cfg.need("n")), int(cfg.need("N")),
                                                    int(cfg.need("d")))
        report = bounds.covering_bound_log(profile, int(cfg.need("N")),
                                           float(cfg.need("t")), float(cfg.need("eps")))
        return CommandResult(0, _profile_payload(profile, report))
    if action == "tube":
        profile = RegularityProfile(LogReal(float(cfg.need("log_K"))), int(cfg.need("n")))
        report = bounds.tube_volume_log(profile, int(cfg.need("N")), float(cfg.need("t")),
                                        float(cfg.need("eps")), float(cfg.get("c", 3.0)))
        return CommandResult(0, _profile_payload(profile, report))
    if action == "tube-prob":
        report = bounds.tube_hit_probability_log(
            int(cfg.need("N")), int(cfg.need("n")), int(cfg.need("d")),
            float(cfg.need("eps")), float(cfg.need("sigma")), float(cfg.get("c", 3.0)))
        return CommandResult(0, {"log_prob_bound": report.value,
                                 "constants_used": dict(report.constants_used),
                                 "ref": report.ref})
    if action == "width":
        profile = RegularityProfile(LogReal(float(cfg.need("log_K"))), int(cfg.need("n")))
        report = bounds.width_bound_regular(profile, int(cfg.need("N")), float(cfg.need("t")))
        return CommandResult(0, {"width_bound": report.value,
                                 "constants_used": dict(report.constants_used),
                                 "ref": report.ref})
    raise _UsageError(f"unknown bound action {action!r}")


def _handle_tensor(action: str, cfg: _Cfg) -> CommandResult:
    from . import tensor

    shape = _parse_shape(cfg.need("shape"))
    r = int(cfg.need("r"))
    if action == "cover":
        report = tensor.cp_covering_log_general(
            shape, r, float(cfg.need("t")), _parse_angle(cfg.need("eps")),
            float(cfg.get("c", 3.0)), sphere=bool(cfg.get("sphere", False)))
        key = "log_bound"
    elif action == "cover-lowrank":
        report = tensor.cp_covering_log_lowrank(
            shape, r, float(cfg.need("t")), _parse_angle(cfg.need("eps")),
            float(cfg.get("c1", 3.0)), float(cfg.get("c2", 3.0)),
            sphere=bool(cfg.get("sphere", False)))
        key = "log_bound"
    elif action == "angle-prob":
        report = tensor.cp_angle_probability_log(
            shape, r, _parse_angle(cfg.need("eps")),
            float(cfg.get("c1", 3.0)), float(cfg.get("c2", 3.0)))
        key = "log_prob_bound"
    else:
        raise _UsageError(f"unknown tensor action {action!r}")
    return CommandResult(0, {key: report.value,
                             "constants_used": dict(report.constants_used),
                             "ref": report.ref})


def _handle_sketch(action: str, cfg: _Cfg) -> CommandResult:
    from . import sketch

    if action == "dim-subg":
        m = sketch.subg_dim_poly(int(cfg.need("n")), int(cfg.need("d")), int(cfg.need("N")),
                                 float(cfg.need("eps")), float(cfg.need("delta")),
                                 float(cfg.get("alpha", 1.0)), float(cfg.get("c", 1.0)))
        return CommandResult(0, {"m": m, "ref": "subgaussian-dim-poly"})
    if action == "dim-sors":
        m = sketch.sors_dim_poly(int(cfg.need("n")), int(cfg.need("d")), int(cfg.need("N")),
                                 float(cfg.need("eps")), float(cfg.need("delta")),
                                 float(cfg.get("beta", 1.0)), float(cfg.get("c", 1.0)))
        return CommandResult(0, {"m": m, "ref": "sors-dim-poly"})
    if action == "dim-subg-lip":
        m = sketch.subg_dim_lipschitz(
            int(cfg.need("n")), int(cfg.need("d")), int(cfg.need("N")), int(cfg.need("M")),
            float(cfg.need("t")), float(cfg.need("lip")), float(cfg.need("tau")),
            float(cfg.need("eps")), float(cfg.need("delta")),
            float(cfg.get("alpha", 1.0)), float(cfg.get("c", 1.0)),
            float(cfg.get("c_lambda", 1.0)))
        return CommandResult(0, {"m": m, "ref": "subgaussian-dim-lipschitz"})
    if action == "dim-sors-lip":
        m = sketch.sors_dim_lipschitz(
            int(cfg.need("n")), int(cfg.need("d")), int(cfg.need("N")), int(cfg.need("M")),
            float(cfg.need("t")), float(cfg.need("lip")), float(cfg.need("tau")),
            float(cfg.need("eps")), float(cfg.need("delta")),
            float(cfg.get("beta", 1.0)), float(cfg.get("c", 1.0)),
            float(cfg.get("c_lambda", 1.0)))
        return CommandResult(0, {"m": m, "ref": "sors-dim-lipschitz"})
    if action == "apply":
        op = sketch.sketch_from_json(_parse_json_arg(cfg.need("op")))
        out = sketch.apply_sketch(op, _parse_vector(cfg.need("input")))
        return CommandResult(0, [float(v) for v in out])
    if action == "fwht":
        out = sketch.fwht(_parse_vector(cfg.need("input")))
        return CommandResult(0, [float(v) for v in out])
    raise _UsageError(f"unknown sketch action {action!r}")


def _gn_options(cfg: _Cfg):
    from .polyopt import GNOptions

    defaults = GNOptions()
    return GNOptions(
        max_iters=int(cfg.get("max_iters", defaults.max_iters)),
        grad_tol=float(cfg.get("grad_tol", defaults.grad_tol)),
        step_tol=float(cfg.get("step_tol", defaults.step_tol)),
        damping=float(cfg.get("damping", defaults.damping)),
        line_search=cfg.get("line_search", defaults.line_search),
    )


def _handle_opt(action: str, cfg: _Cfg) -> CommandResult:
    from . import polyopt, sketch
    from .core import RngSeed, poly_map_from_json

    pmap = poly_map_from_json(_parse_json_arg(cfg.need("map")))
    x0 = _parse_vector(cfg.need("x0"))
    opts = _gn_options(cfg)
    if action == "gn":
        result = polyopt.gauss_newton(pmap, x0, opts)
        return CommandResult(0, result.to_json())
    if action == "gn-sketched":
        ensemble = cfg.need("ensemble")
        m = int(cfg.need("m"))
        seed = RngSeed(int(cfg.need("seed")))
        if ensemble == "subgaussian":
            op = sketch.SubGaussianSketch(m=m, M=pmap.N, seed=seed,
                                          distribution=cfg.get("distribution", "gaussian"))
        elif ensemble == "sors":
            op = sketch.SorsSketch(m=m, M=pmap.N, seed=seed)
        elif ensemble == "identity":
            op = sketch.IdentitySketch(M=pmap.N)
        else:
            raise _UsageError(f"unknown ensemble {ensemble!r}")
        result = polyopt.sketched_gauss_newton(pmap, op, x0, opts)
        return CommandResult(0, result.to_json())
    raise _UsageError(f"unknown opt action {action!r}")


def _handle_nn(action: str, cfg: _Cfg) -> CommandResult:
    from . import nnbound

    if action == "gen-bound":
        value = nnbound.generalization_bound(float(cfg.need("rademacher")),
                                             float(cfg.need("delta")),
                                             int(cfg.need("n_samples")))
        return CommandResult(0, {"bound": value, "ref": "generalization-gap"})

    arch = nnbound.NetArchitecture.from_json(_parse_json_arg(cfg.need("arch")))
    if action == "rat-cover":
        report = nnbound.ratnn_covering_log(arch, int(cfg.need("n_samples")),
                                            float(cfg.need("eps")), float(cfg.get("c", 1.0)))
        return CommandResult(0, {"log_bound": report.value,
                                 "constants_used": dict(report.constants_used),
                                 "ref": report.ref})
    if action in ("rat-rademacher", "relu-rademacher"):
        loss = nnbound.LossSpec(lip=float(cfg.need("lip")), H=float(cfg.need("H")))
        fn = (nnbound.ratnn_rademacher_bound if action == "rat-rademacher"
              else nnbound.relu_rademacher_bound)
        report = fn(arch, int(cfg.need("n_samples")), loss, float(cfg.get("c", 1.0)))
        return CommandResult(0, {"bound": report.value,
                                 "constants_used": dict(report.constants_used),
                                 "ref": report.ref})
    if action == "degree":
        if arch.kind == "ratnn":
            value = nnbound.ratnn_degree(arch.dims[1:-1], arch.s, arch.L, arch.trainable)
            return CommandResult(0, {"log_degree": value.nats, "ref": "rational-net-degree"})
        if arch.kind == "ratcnn":
            value = nnbound.ratcnn_degree(arch.channels[1:-1], arch.kernel, arch.s,
                                          arch.L, arch.trainable)
            return CommandResult(0, {"log_degree": value.nats, "ref": "rational-conv-degree"})
        value = nnbound.relu_approx_degree(arch, float(cfg.need("eps_final")))
        return CommandResult(0, {"log_theta": value.nats, "ref": "relu-approx-degree"})
    raise _UsageError(f"unknown nn action {action!r}")


def _handle_verify(action: str, cfg: _Cfg) -> CommandResult:
    from . import verify
    from .core import RngSeed, poly_map_from_json

    seed = RngSeed(int(cfg.need("seed")))
    if action == "rademacher":
        estimate = verify.rademacher_mc(_parse_json_arg(cfg.need("values")),
                                        int(cfg.need("sigma_draws")), seed)
        return CommandResult(0, {"estimate": estimate, "seed": seed.seed,
                                 "ref": "rademacher-grid-estimate"})

    pmap = poly_map_from_json(_parse_json_arg(cfg.need("map")))
    if action == "cover":
        report = verify.covering_check(pmap, float(cfg.need("box_radius")),
                                       float(cfg.need("t")), float(cfg.need("eps")),
                                       int(cfg.need("count")), seed)
    elif action == "distortion":
        report = verify.sketch_success_rate(
            pmap, float(cfg.need("box_radius")), cfg.need("ensemble"),
            float(cfg.need("eps")), float(cfg.need("delta")), int(cfg.need("trials")),
            int(cfg.need("count")), seed,
            c=float(cfg.get("c", verify.DEFAULT_SKETCH_CONSTANT)))
    elif action == "tube":
        report = verify.tube_probe(
            pmap, float(cfg.need("box_radius")), _parse_vector(cfg.need("center")),
            float(cfg.need("sigma")), float(cfg.need("eps")),
            int(cfg.need("mc_samples")), int(cfg.need("grid_density")), seed,
            c=float(cfg.get("c", 3.0)))
    else:
        raise _UsageError(f"unknown verify action {action!r}")
    return CommandResult(0 if report.passed else 2, report.to_json())


_HANDLERS = {
    "bound": _handle_bound,
    "tensor": _handle_tensor,
    "sketch": _handle_sketch,
    "opt": _handle_opt,
    "nn": _handle_nn,
    "verify": _handle_verify,
}


def dispatch(argv) -> CommandResult:
    """Parse argv, run the named operation, and return its payload; never
    raises on bad input, returning exit code 1 with an error object."""
    from .core import InputError

    try:
        args = _build_parser().parse_args(argv)
        if not getattr(args, "group", None) or not getattr(args, "action", None):
            raise _UsageError("expected a command group and action")
        cfg = _Cfg(args)
        result = _HANDLERS[args.group](args.action, cfg)
        return CommandResult(result.exit_code, _round_floats(result.payload))
    except _UsageError as exc:
        return CommandResult(1, {"code": "usage_error", "message": str(exc), "ref": ""})
    except InputError as exc:
        return CommandResult(1, {"code": "input_error", "message": str(exc),
                                 "ref": exc.ref})
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        return CommandResult(1, {"code": "input_error", "message": str(exc), "ref": ""})


def main(argv=None) -> int:
    _cap_threads()
    result = dispatch(sys.argv[1:] if argv is None else argv)
    json.dump(result.payload, sys.stdout)
    sys.stdout.write("\n")
    return result.exit_code
