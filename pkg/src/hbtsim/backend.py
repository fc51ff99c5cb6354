"""Select the compute backend at import time.

The compiled extension (``hbtsim._kernels``) is preferred; the NumPy
implementation (``hbtsim._pykernels``) is the fallback.  Set
``HBTSIM_BACKEND=python`` or ``HBTSIM_BACKEND=cython`` to force one.
"""

from __future__ import annotations

import os

from . import _pykernels

_requested = os.environ.get("HBTSIM_BACKEND", "auto").strip().lower()

if _requested in ("", "auto"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pykernels
elif _requested == "python":
    _impl = _pykernels
elif _requested == "cython":
    from . import _kernels as _impl  # type: ignore[attr-defined,no-redef]
else:
    raise ImportError(
        f"HBTSIM_BACKEND must be 'auto', 'python', or 'cython', got {_requested!r}"
    )

populate_streams = _impl.populate_streams
windowed_xcorr = _impl.windowed_xcorr


def backend_name() -> str:
    """Name of the active backend: 'cython' or 'python'."""
    return _impl.NAME
