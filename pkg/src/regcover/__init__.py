"""Covering-number and tube bounds for polynomially defined sets, with
randomized sketching, sketched Gauss-Newton, network generalization
bounds, and Monte-Carlo verification oracles.

Submodules load lazily so the command-line entry point can cap BLAS
thread pools before any numerical import happens.
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = (
    "core",
    "regularity",
    "bounds",
    "tensor",
    "sketch",
    "polyopt",
    "nnbound",
    "verify",
    "cli",
)

__all__ = list(_SUBMODULES)


def __getattr__(name):
    if name in _SUBMODULES:
        module = importlib.import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | set(_SUBMODULES))
