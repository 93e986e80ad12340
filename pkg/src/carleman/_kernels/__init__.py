"""Backend selection for the hot grid kernels.

The compiled Cython extension is preferred when present; the NumPy
implementation is the fallback.  Set ``CARLEMAN_KERNELS=python`` to force
the fallback (useful for benchmarking and for bit-stable comparisons).
"""

import os

if os.environ.get("CARLEMAN_KERNELS", "").lower() in ("python", "numpy"):
    from . import _python as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _python as _impl

BACKEND = _impl.BACKEND_NAME
weighted_power_sum = _impl.weighted_power_sum
weighted_power_sum_complex = _impl.weighted_power_sum_complex
piecewise_power_values = _impl.piecewise_power_values
abs_magnitude = _impl.abs_magnitude


def backends():
    """Return the available kernel implementations keyed by name."""
    from . import _python

    table = {"python": _python}
    try:
        from . import _core  # type: ignore[attr-defined]

        table["cython"] = _core
    except ImportError:
        pass
    return table
