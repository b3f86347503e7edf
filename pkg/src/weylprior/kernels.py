"""Backend selection for the weighted contraction kernels.

The compiled extension is preferred when present; set WEYLPRIOR_PURE_PYTHON=1
to force the NumPy fallback (used by the benchmark for comparison).
"""

import os

from . import _contract_py

if os.environ.get("WEYLPRIOR_PURE_PYTHON"):
    _impl = _contract_py
    BACKEND = "python"
else:
    try:
        from . import _contract as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _contract_py
        BACKEND = "python"


def backend_name():
    return BACKEND


def pair_contract(w, s):
    """G[i,j] = sum_n w[n] s[n,i] s[n,j], exactly symmetric."""
    return _impl.pair_contract(w, s)


def triple_contract(w, s):
    """T[i,j,k] = sum_n w[n] s[n,i] s[n,j] s[n,k], exactly symmetric."""
    return _impl.triple_contract(w, s)
