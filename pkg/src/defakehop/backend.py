"""Kernel backend selection.

The compiled Cython extension is used when it imported cleanly; otherwise
the pure-numpy fallback takes over.  Set ``DEFAKEHOP_FORCE_PURE=1`` to
force the fallback (used by the backend-equality tests and the
benchmark).  Both backends are bit-identical by contract.
"""
import os

from . import _pykernels


def _load_compiled():
    try:
        from . import _ckernels  # noqa: PLC0415

        return _ckernels
    except ImportError:
        return None


if os.environ.get("DEFAKEHOP_FORCE_PURE"):
    kernels = _pykernels
else:
    kernels = _load_compiled() or _pykernels

BACKEND_NAME = kernels.NAME


def available_backends():
    out = {"pure": _pykernels}
    compiled = _load_compiled()
    if compiled is not None:
        out["compiled"] = compiled
    return out
