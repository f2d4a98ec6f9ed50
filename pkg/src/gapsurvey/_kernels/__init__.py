"""Solver kernels with a compiled core and a pure-Python fallback.

The compiled extension (``_native``, Cython) is preferred; if it is missing
or fails to import, the NumPy implementation in ``_fallback`` takes over.
Both produce bit-identical output, which the test suite checks. Set the
environment variable ``GAPSURVEY_FORCE_FALLBACK=1`` to skip the extension.
"""

import os

if os.environ.get("GAPSURVEY_FORCE_FALLBACK"):
    from . import _fallback as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

BACKEND = _impl.BACKEND_NAME

pencil_inertia = _impl.pencil_inertia
batch_gap = _impl.batch_gap

BRACKET_MARGIN = _impl.BRACKET_MARGIN
STATUS_OK = _impl.STATUS_OK
STATUS_NONPOSITIVE = _impl.STATUS_NONPOSITIVE
STATUS_BRACKET = _impl.STATUS_BRACKET
STATUS_NO_CONVERGENCE = _impl.STATUS_NO_CONVERGENCE

# human-readable failure reasons keyed by kernel status code; code 5 is
# produced by the survey layer (parameter on the quantile-domain boundary)
STATUS_PARAMETER_BOUNDARY = 5
STATUS_REASONS = {
    STATUS_NONPOSITIVE: "nonpositive_coefficient",
    STATUS_BRACKET: "bracket_failure",
    STATUS_NO_CONVERGENCE: "bisection_no_convergence",
    STATUS_PARAMETER_BOUNDARY: "parameter_boundary",
}
