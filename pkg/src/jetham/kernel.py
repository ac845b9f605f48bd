"""Kernel backend selection.

The compiled extension (``jetham._ckernel``) is optional; when it is
missing or the ``JETHAM_KERNEL=py`` environment variable is set, the
pure-Python implementation is used.  Both expose the same functions and
produce identical results; ``benchmarks/bench_kernel.py`` compares them.
"""

import os

_choice = os.environ.get("JETHAM_KERNEL", "").strip().lower()

if _choice in ("py", "python"):
    from . import _kernel_py as _impl
elif _choice in ("c", "ext", "compiled"):
    from . import _ckernel as _impl  # type: ignore[attr-defined]
else:
    try:
        from . import _ckernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as _impl

BACKEND = _impl.BACKEND
even_mul = _impl.even_mul
odd_mul = _impl.odd_mul
mono_mul = _impl.mono_mul
terms_mul = _impl.terms_mul
terms_add_inplace = _impl.terms_add_inplace
mono_pderiv_even = _impl.mono_pderiv_even
mono_pderiv_odd = _impl.mono_pderiv_odd
