"""Select the interpolation kernel at import time.

Prefers the compiled extension; falls back to the pure-Python twin when the
extension was not built. Set AUTOSIMP_PURE_PY=1 to force the fallback (used
by the benchmark and by tests comparing the two paths).
"""

import os

_force_pure = os.environ.get("AUTOSIMP_PURE_PY", "") not in ("", "0")

if _force_pure:
    from ._scores_py import KERNEL_NAME, interpolated_scores
else:
    try:
        from ._scores import KERNEL_NAME, interpolated_scores  # type: ignore
    except ImportError:
        from ._scores_py import KERNEL_NAME, interpolated_scores

__all__ = ["interpolated_scores", "KERNEL_NAME"]
