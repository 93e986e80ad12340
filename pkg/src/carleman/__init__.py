"""Numerical verification of weighted gradient, Carleman-type and
Pitt-type norm inequalities: condition constants on rearranged weights,
FFT-based evaluation of both sides on test-function families, tilt and
dilation sweeps, and unique-continuation threshold arithmetic."""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend  # noqa: F401
