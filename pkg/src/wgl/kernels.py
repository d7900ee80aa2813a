"""Backend selection for the hot loops.

The compiled extension ``wgl._kernels`` is used when it imports; otherwise,
or when ``WGL_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
NumPy fallback in ``wgl._kernels_py`` is used.  ``BACKEND`` names the choice.
"""

import os

from . import _kernels_py

_force_py = os.environ.get("WGL_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

nonlinear_phase = _impl.nonlinear_phase
abs_pow_sum = _impl.abs_pow_sum
level_counts = _impl.level_counts
weyl_direct = _impl.weyl_direct
r2_bruteforce = _impl.r2_bruteforce

python = _kernels_py

__all__ = [
    "BACKEND",
    "nonlinear_phase",
    "abs_pow_sum",
    "level_counts",
    "weyl_direct",
    "r2_bruteforce",
    "python",
]
