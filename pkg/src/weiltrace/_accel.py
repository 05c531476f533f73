"""Backend switch for the compiled kernels.

``WEILTRACE_BACKEND=numpy`` forces the vectorised numpy path; the default
uses numba when it imports cleanly.
"""
import functools
import os

BACKEND_ENV = "WEILTRACE_BACKEND"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def requested_backend():
    return os.environ.get(BACKEND_ENV, "numba").strip().lower()


USE_NUMBA = numba is not None and requested_backend() != "numpy"

if numba is not None:
    njit = functools.partial(numba.njit, cache=True, nogil=True)
else:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
