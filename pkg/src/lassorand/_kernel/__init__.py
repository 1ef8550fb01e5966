"""Coordinate-descent kernel with backend selection at import.

The compiled Cython kernel is preferred; the pure-numpy fallback is
used when the extension is unavailable or when the environment variable
``LASSORAND_BACKEND`` is set to ``python``.
"""

import os

from . import _cd_numpy

_forced = os.environ.get("LASSORAND_BACKEND", "").strip().lower()
if _forced in ("python", "numpy"):
    _impl = _cd_numpy
elif _forced in ("", "auto", "compiled", "c"):
    try:
        from . import _cd_fast as _impl
    except ImportError:
        if _forced in ("compiled", "c"):
            raise
        _impl = _cd_numpy
else:
    raise ValueError(f"unknown LASSORAND_BACKEND value: {_forced!r}")

cd_path = _impl.cd_path
BACKEND = "compiled" if _impl is not _cd_numpy else "python"

__all__ = ["cd_path", "BACKEND"]
