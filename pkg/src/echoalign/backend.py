"""Hot-kernel backend selection.

The numeric inner loops (per-row cosine, KS distance, the SGD epoch, loss
evaluation) exist twice: numba-jitted in ``_kernels_numba`` and pure numpy
in ``_kernels_numpy``. ``ECHOALIGN_BACKEND`` picks one:

  auto   use numba when it imports, else numpy (default)
  numba  require numba, fail loudly if unavailable
  numpy  force the pure-numpy fallbacks

``ECHOALIGN_THREADS`` caps the numba threading layer (0 = leave the numba
default). All kernels are sequential reductions, so results are identical
for every thread count; the cap only keeps co-located runs polite.

Run ``benchmarks/bench_kernels.py`` to compare the two backends.
"""

from __future__ import annotations

import os

_cached = None


def _resolve(name: str):
    if name == "numpy":
        from . import _kernels_numpy
        return _kernels_numpy
    if name == "numba":
        from . import _kernels_numba
        return _kernels_numba
    if name == "auto":
        try:
            from . import _kernels_numba
            return _kernels_numba
        except ImportError:
            from . import _kernels_numpy
            return _kernels_numpy
    raise ValueError(
        f"ECHOALIGN_BACKEND must be auto, numba or numpy, not {name!r}")


def _apply_thread_cap() -> None:
    raw = os.environ.get("ECHOALIGN_THREADS", "0").strip()
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"ECHOALIGN_THREADS must be an integer, not {raw!r}")
    if cap < 0:
        raise ValueError("ECHOALIGN_THREADS must be >= 0")
    if cap > 0:
        try:
            import numba
            numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))
        except ImportError:
            pass  # numpy backend: nothing to cap


def kernels():
    """Return the active kernel module (resolved once per process)."""
    global _cached
    if _cached is None:
        name = os.environ.get("ECHOALIGN_BACKEND", "auto").strip().lower()
        _cached = _resolve(name)
        _apply_thread_cap()
    return _cached


def get_kernels(name: str):
    """Fetch a specific backend by name (used by parity tests and benchmarks)."""
    return _resolve(name)


def active_backend_name() -> str:
    return kernels().BACKEND_NAME


def _reset_for_tests() -> None:
    global _cached
    _cached = None
