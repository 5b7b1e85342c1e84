"""Blind image deblurring with a reweighted graph total variation prior.

Submodules load lazily so the command-line entry point can honor the
RGTV_THREADS cap before any numeric library initializes.
"""
import importlib

__version__ = "0.1.0"

_SUBMODULES = ("cli", "errors", "fileio", "fourier", "imagegraph", "kernelest",
               "metrics", "pipeline", "priors", "resample", "skeleton",
               "spectral", "synthetic")

__all__ = list(_SUBMODULES)


def __getattr__(name):
    if name in _SUBMODULES:
        module = importlib.import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | set(_SUBMODULES))
