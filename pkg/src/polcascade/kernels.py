"""Backend selection for the numeric kernels.

The compiled extension is optional.  Selection order:

* POLCASCADE_BACKEND=python forces the NumPy reference kernels.
* POLCASCADE_BACKEND=cython requires the compiled extension and raises
  ImportError if it is missing.
* unset or POLCASCADE_BACKEND=auto uses the compiled extension when it
  imports, otherwise falls back silently.

BACKEND names the active choice; both backends satisfy identical contracts
and agree to floating-point roundoff.
"""
import os

from . import _purekernels
from .errors import ValidationError

_choice = os.environ.get("POLCASCADE_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "python", "cython"):
    raise ValidationError(
        f"POLCASCADE_BACKEND must be auto, python or cython, got {_choice!r}")

if _choice == "python":
    _impl = _purekernels
    BACKEND = "python"
else:
    try:
        from . import _fastkernels as _impl
        BACKEND = "cython"
    except ImportError:
        if _choice == "cython":
            raise
        _impl = _purekernels
        BACKEND = "python"

overlap_integrand = _impl.overlap_integrand
midpoint_overlap = _impl.midpoint_overlap

__all__ = ["BACKEND", "overlap_integrand", "midpoint_overlap"]
