"""Backend selection for the hot kernel-block loops.

Set ``SATURN_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
numba is also skipped when it is not importable or when numba's own
``NUMBA_DISABLE_JIT`` is set.
"""
import os

from . import _blocks_numpy

_FALSE = {"", "0", "false", "no", "off"}


def _numba_requested():
    return os.environ.get("SATURN_DISABLE_NUMBA", "0").strip().lower() in _FALSE


USE_NUMBA = False
if _numba_requested():
    try:
        import numba

        if not numba.config.DISABLE_JIT:
            from . import _blocks_numba

            USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

_impl = _blocks_numba if USE_NUMBA else _blocks_numpy
BACKEND = "numba" if USE_NUMBA else "numpy"

interval_block = _impl.interval_block
sphere_block = _impl.sphere_block
