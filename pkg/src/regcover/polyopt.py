"""Gauss-Newton for min ||p(x)|| over polynomial maps, unsketched and
sketch-and-solve.

The sketched variant replaces the residual f and Jacobian J by S f and
S J with one fixed operator S, reused in every iteration; its reported
objective is the sketched one, which callers compare against the
unsketched objective re-evaluated at the minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import InputError, PolynomialMap, eval_poly_map, jacobian
from .sketch import apply_sketch

__all__ = ["GNOptions", "GNResult", "ls_solve", "gauss_newton", "sketched_gauss_newton"]


@dataclass(frozen=True)
class GNOptions:
    """Loop controls.  grad_tol is tested against ||J^T r||, the gradient of
    the half-squared objective; step_tol against the accepted step norm."""

    max_iters: int = 200
    grad_tol: float = 1e-8
    step_tol: float = 1e-12
    damping: float = 1e-10
    line_search: str = "backtracking"
    ls_factor: float = 0.5
    ls_max_steps: int = 20

    def __post_init__(self):
        if self.max_iters < 1:
            raise InputError("max_iters must be at least 1")
        if self.grad_tol <= 0 or self.step_tol <= 0:
            raise InputError("tolerances must be positive")
        if self.damping < 0:
            raise InputError("damping must be nonnegative")
        if self.line_search not in ("backtracking", "none"):
            raise InputError("line_search must be 'backtracking' or 'none'")
        if not 0 < self.ls_factor < 1 or self.ls_max_steps < 1:
            raise InputError("need 0 < ls_factor < 1 and ls_max_steps >= 1")


@dataclass(frozen=True)
class GNResult:
    x_final: np.ndarray
    objective: float
    iterations: int
    converged: bool
    trace: tuple

    def to_json(self) -> dict:
        return {
            "x_final": [float(v) for v in self.x_final],
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": [float(v) for v in self.trace],
        }


def ls_solve(A, b, damping: float = 0.0) -> np.ndarray:
    """Minimize ||A z + b||^2 + damping ||z||^2.

    Solved through an orthogonal factorization of the stacked system
    [A; sqrt(damping) I], never the normal equations; with damping 0 and
    rank-deficient A the minimum-norm minimizer is returned."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise InputError("ls_solve needs A (m x k) and b of length m")
    if damping < 0:
        raise InputError("damping must be nonnegative")
    if damping > 0:
        k = A.shape[1]
        A = np.vstack([A, math.sqrt(damping) * np.eye(k)])
        b = np.concatenate([b, np.zeros(k)])
    z, *_ = np.linalg.lstsq(A, -b, rcond=None)
    return z


def _run_gauss_newton(residual, jac, x0, opts: GNOptions) -> GNResult:
    x = np.array(x0, dtype=float)
    r = residual(x)
    obj = float(np.linalg.norm(r))
    trace = [obj]
    iterations = 0
    converged = False
    for _ in range(opts.max_iters):
        J = jac(x)
        grad = J.T @ r
        if np.linalg.norm(grad) <= opts.grad_tol:
            converged = True
            break
        step = ls_solve(J, r, opts.damping)
        if opts.line_search == "none":
            alpha = 1.0
            x = x + step
            r = residual(x)
            obj = float(np.linalg.norm(r))
        else:
            alpha = 1.0
            accepted = False
            for _ in range(opts.ls_max_steps):
                x_try = x + alpha * step
                r_try = residual(x_try)
                obj_try = float(np.linalg.norm(r_try))
                if obj_try < obj:
                    x, r, obj = x_try, r_try, obj_try
                    accepted = True
                    break
                alpha *= opts.ls_factor
            if not accepted:
                # no descent along the GN direction at any tried scale;
                # treat the iterate as stalled rather than looping
                break
        iterations += 1
        trace.append(obj)
        if alpha * float(np.linalg.norm(step)) <= opts.step_tol:
            converged = True
            break
    return GNResult(x_final=x, objective=obj, iterations=iterations,
                    converged=converged, trace=tuple(trace))


def gauss_newton(pmap: PolynomialMap, x0, opts: GNOptions | None = None) -> GNResult:
    """Minimize ||p(x)|| by damped Gauss-Newton with backtracking."""
    opts = opts or GNOptions()
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (pmap.n,):
        raise InputError(f"x0 must have length {pmap.n}")
    return _run_gauss_newton(
        lambda x: eval_poly_map(pmap, x),
        lambda x: jacobian(pmap, x),
        x0,
        opts,
    )


def sketched_gauss_newton(pmap: PolynomialMap, op, x0, opts: GNOptions | None = None) -> GNResult:
    """Minimize ||S p(x)|| for a fixed sketch S, reused every iteration.

    The reported objective and trace are of the sketched problem; evaluate
    ||p(x_final)|| separately for the unsketched residual."""
    opts = opts or GNOptions()
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (pmap.n,):
        raise InputError(f"x0 must have length {pmap.n}")
    if op.M != pmap.N:
        raise InputError("sketch operator width must match the map's output dimension")
    return _run_gauss_newton(
        lambda x: apply_sketch(op, eval_poly_map(pmap, x)),
        lambda x: apply_sketch(op, jacobian(pmap, x)),
        x0,
        opts,
    )
