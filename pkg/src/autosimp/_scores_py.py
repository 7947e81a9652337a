"""Pure-Python interpolation kernel (fallback when the extension is absent).

Performs exactly the same scalar operations in the same order as the
compiled kernel in ``_scores.pyx`` so the two produce identical doubles.
"""

import numpy as np

KERNEL_NAME = "python"


def interpolated_scores(ext_size, layers, lams, copy_ids, gamma):
    """Accumulate an interpolated distribution over the extended id space.

    ``layers`` holds one (word_ids, counts, total) triple per n-gram order
    whose context was observed; ``lams`` the matching (already renormalized)
    interpolation weights. ``copy_ids`` and ``gamma`` mix in the uniform
    copy distribution over the difficult sentence's distinct tokens.
    """
    out = np.zeros(ext_size, dtype=np.float64)
    for (ids, counts, _total), lam in zip(layers, lams):
        scale = lam / _total
        for j in range(len(ids)):
            out[ids[j]] += counts[j] * scale
    if gamma != 0.0:
        keep = 1.0 - gamma
        for i in range(ext_size):
            out[i] *= keep
        unit = gamma / len(copy_ids)
        for j in range(len(copy_ids)):
            out[copy_ids[j]] += unit
    return out
