"""Backend selection for the hot kernels.

The compiled extension is used when it imports cleanly; otherwise, or when the
environment variable ``ABVORTEX_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the pure-Python implementations are used. Both backends
expose ``bessel_jy``, ``fourier_sum`` and ``gamma_terms`` with identical
signatures.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("ABVORTEX_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

bessel_jy = _impl.bessel_jy
fourier_sum = _impl.fourier_sum
gamma_terms = _impl.gamma_terms

__all__ = ["BACKEND", "bessel_jy", "fourier_sum", "gamma_terms"]
