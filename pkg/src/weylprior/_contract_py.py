"""Pure-NumPy fallback for the contraction kernels.

einsum does the accumulation; the results are symmetrized explicitly so
both backends return exactly symmetric arrays.
"""

import numpy as np


def pair_contract(w, s):
    g = np.einsum("n,ni,nj->ij", w, s, s)
    return 0.5 * (g + g.T)


def triple_contract(w, s):
    t = np.einsum("n,ni,nj,nk->ijk", w, s, s, s)
    m = t.shape[0]
    out = np.empty_like(t)
    # average over the ordered triangle and mirror, so the six symmetric
    # slots hold the same bit pattern
    for i in range(m):
        for j in range(i, m):
            for k in range(j, m):
                v = (t[i, j, k] + t[i, k, j] + t[j, i, k]
                     + t[j, k, i] + t[k, i, j] + t[k, j, i]) / 6.0
                out[i, j, k] = out[i, k, j] = v
                out[j, i, k] = out[j, k, i] = v
                out[k, i, j] = out[k, j, i] = v
    return out
