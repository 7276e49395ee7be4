"""Gate-application and conjugation kernels with backend selection.

Two interchangeable implementations exist: a compiled Cython extension
(``_cykernels``) and a vectorized numpy fallback (``_pykernels``).  The
compiled backend is preferred when its extension module is importable.
Set ``FLOQMBL_KERNELS=py`` or ``FLOQMBL_KERNELS=cy`` to force a choice
(``cy`` raises if the extension was not built).

All kernels mutate their array argument in place.  Arrays must be
C-contiguous complex128; qubit 0 is the least significant index bit.
"""

import os

from . import _pykernels

_forced = os.environ.get("FLOQMBL_KERNELS", "").strip().lower()
if _forced not in ("", "py", "cy"):
    raise RuntimeError(
        f"FLOQMBL_KERNELS must be 'py' or 'cy', got {_forced!r}"
    )

if _forced == "py":
    _impl = _pykernels
else:
    try:
        from . import _cykernels as _impl
    except ImportError:
        if _forced == "cy":
            raise
        _impl = _pykernels

backend = _impl.BACKEND
apply_1q = _impl.apply_1q
apply_2q = _impl.apply_2q
conj_1q = _impl.conj_1q
conj_2q = _impl.conj_2q


def available_backends():
    """Names of the importable kernel implementations."""
    names = ["python"]
    try:
        from . import _cykernels  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return the kernel module for an explicit backend name."""
    if name in ("py", "python"):
        return _pykernels
    if name in ("cy", "cython"):
        from . import _cykernels
        return _cykernels
    raise ValueError(f"unknown kernel backend {name!r}")
