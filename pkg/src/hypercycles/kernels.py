"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module. Setting ``HYPERCYCLES_PURE=1`` forces the
fallback.
"""

import os

from . import _pykernels

if os.environ.get("HYPERCYCLES_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
enumerate_cycles = _impl.enumerate_cycles
min_hitting_set = _impl.min_hitting_set
free_subset_stats = _impl.free_subset_stats
coverage_violations = _impl.coverage_violations


def backends():
    """Every importable backend module, fallback first."""
    mods = [_pykernels]
    try:
        from . import _ckernels

        mods.append(_ckernels)
    except ImportError:
        pass
    return mods
