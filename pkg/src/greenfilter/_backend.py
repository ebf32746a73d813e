"""Selects the compiled recursion kernels, falling back to pure numpy.

Set ``GREENFILTER_BACKEND=python`` or ``=compiled`` to force a choice;
the default (``auto``) prefers the compiled extension when importable.
"""

import os

from . import _ensemble_np

_choice = os.environ.get("GREENFILTER_BACKEND", "auto").lower()

if _choice not in ("auto", "compiled", "python"):
    raise ImportError(f"GREENFILTER_BACKEND={_choice!r} not one of auto/compiled/python")

if _choice == "python":
    _impl = _ensemble_np
else:
    try:
        from . import _ensemble_cy as _impl
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _ensemble_np

backend_name = _impl.name

riccati_rk4 = _impl.riccati_rk4
fundamental_rk4 = _impl.fundamental_rk4
em_simulate = _impl.em_simulate
filter_pass = _impl.filter_pass
rts_pass = _impl.rts_pass


def thread_count() -> int:
    """Worker threads for Monte Carlo chunks (GREENFILTER_THREADS, 0 = auto)."""
    raw = os.environ.get("GREENFILTER_THREADS", "0")
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"GREENFILTER_THREADS={raw!r} is not an integer")
    if k < 0:
        raise ValueError("GREENFILTER_THREADS must be >= 0")
    if k == 0:
        return min(os.cpu_count() or 1, 8)
    return k
