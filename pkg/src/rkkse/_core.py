"""Backend selection for the hot numeric kernels.

Imports the compiled extension when present, otherwise the pure NumPy
fallback.  Set RKKSE_FORCE_PURE=1 to force the fallback (used by the
benchmark to compare both lanes).
"""

import os

if os.environ.get("RKKSE_FORCE_PURE"):
    from rkkse import _purecore as _impl
else:
    try:
        from rkkse import _native as _impl
    except ImportError:
        from rkkse import _purecore as _impl

BACKEND = _impl.BACKEND
pp_eval = _impl.pp_eval
pp_eval_array = _impl.pp_eval_array
caputo_pp = _impl.caputo_pp
r2_caputo = _impl.r2_caputo
r2_caputo_dt_array = _impl.r2_caputo_dt_array
