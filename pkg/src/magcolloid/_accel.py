"""Numba switch.

Kernels are compiled with numba unless ``MAGCOLLOID_NUMBA=0`` is set in the
environment (or numba is missing), in which case the vectorised numpy
implementations are used instead.  Both implementations stay importable so
they can be cross-checked and benchmarked against each other.
"""
import os

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("MAGCOLLOID_NUMBA", "1").lower() not in ("0", "false", "no", "off")


def njit(*args, **kwargs):
    """``numba.njit`` with caching, or a no-op decorator without numba."""
    kwargs.setdefault("cache", True)
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def pick(compiled, fallback):
    return compiled if USE_NUMBA else fallback
