"""Kernel selection: compiled core when importable, Python otherwise.

Set ``GRASSPATH_PURE_PYTHON=1`` to force the fallback. The compiled core only
handles monomial masks below 2**64; wider masks are routed to Python per call.
"""

import os

from grasspath import _pykernels

try:
    if os.environ.get("GRASSPATH_PURE_PYTHON"):
        raise ImportError("pure-python backend requested")
    from grasspath import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "compiled" if _ckernels is not None else "python"


def _dispatch(name, *args):
    if _ckernels is not None:
        try:
            return getattr(_ckernels, name)(*args)
        except OverflowError:
            pass
    return getattr(_pykernels, name)(*args)


def mul(a, b, drop):
    return _dispatch("mul", a, b, drop)


def exp_nilpotent(n, drop):
    return _dispatch("exp_nilpotent", n, drop)


def integrate_pair(f, eta_bit, bar_bit, drop):
    return _dispatch("integrate_pair", f, eta_bit, bar_bit, drop)
