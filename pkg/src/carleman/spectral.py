"""Grid-sampled functions, the continuous Fourier transform, tilts, gradients.

The transform convention is fhat(y) = int f(x) exp(-i<x,y>) dx, discretized
as h^n sum_j f(x_j) exp(-i<x_j, xi_k>) via the FFT with phase corrections
for the midpoint node offset.  Primal grids use midpoint-offset nodes
x_j = -L + (j + 1/2) h (singular radial weights are never evaluated at the
origin); the dual grid has nodes xi_k in [-pi/h, pi/h) with spacing pi/L
and contains xi = 0.

Gradients are spectral (multiply by i*xi_j and invert): the test-function
families in this package are band-limited to quadrature precision on their
grids, so no finite-difference error floor enters inequality ratios.
"""

import math
import warnings
from dataclasses import dataclass

from typing import Callable, Optional, Union

import numpy as np

from . import _kernels
from .errors import TiltSafetyError
from .weights import PiecewisePowerWeight, axis_nodes, radius_grid

__all__ = [
    "GridFunction",
    "Direction",
    "sample",
    "sample_radial",
    "fourier",
    "inverse_fourier",
    "tilt",
    "gradient",
    "gradient_magnitude",
    "weighted_norm",
    "weight_values",
]

#: relative boundary magnitude above which a sampled function is flagged
BOUNDARY_WARN = 1e-12
#: relative boundary magnitude above which a tilt is refused
BOUNDARY_REFUSE = 1e-10


@dataclass(frozen=True)
class Direction:
    """A unit direction a and offset b defining the linear form <a,x> + b."""

    a: np.ndarray
    b: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError("direction vector must be unit length (|a| = 1)")
        object.__setattr__(self, "a", a)

    @classmethod
    def axis(cls, n: int, k: int = 0, b: float = 0.0) -> "Direction":
        a = np.zeros(n)
        a[k] = 1.0
        return cls(a, b)


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on a uniform box grid with physical spacing.

    ``node_offset`` is 0.5 for primal (midpoint) grids and 0.0 for dual
    (frequency) grids produced by :func:`fourier`.
    """

    n: int
    L: float
    N: int
    values: np.ndarray
    node_offset: float = 0.5

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != (self.N,) * self.n:
            raise ValueError(f"values must have shape {(self.N,) * self.n}")
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise ValueError("grid function values must be finite")
        if self.N < 16:
            raise ValueError("need at least 16 samples per axis")
        object.__setattr__(self, "values", vals)

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    def nodes(self) -> np.ndarray:
        return axis_nodes(self.L, self.N, self.node_offset)

    def radius(self) -> np.ndarray:
        return radius_grid(self.n, self.L, self.N, self.node_offset)

    def boundary_rel_magnitude(self) -> float:
        """max |f| on the outermost cell layer relative to max |f|."""
        mags = np.abs(self.values)
        peak = mags.max()
        if peak == 0.0:
            return 0.0
        edge = 0.0
        for ax in range(self.n):
            sl_lo = [slice(None)] * self.n
            sl_hi = [slice(None)] * self.n
            sl_lo[ax] = 0
            sl_hi[ax] = -1
            edge = max(edge, mags[tuple(sl_lo)].max(), mags[tuple(sl_hi)].max())
        return float(edge / peak)

    def linear_form(self, direction: Direction) -> np.ndarray:
        """<a, x> + b at every node."""
        ax = self.nodes()
        out = np.full((self.N,) * self.n, direction.b, dtype=np.float64)
        for k in range(self.n):
            shape = [1] * self.n
            shape[k] = self.N
            out = out + direction.a[k] * ax.reshape(shape)
        return out


def sample(fn: Callable, n: int, L: float, N: int, check_boundary: bool = True) -> GridFunction:
    """Sample fn at the midpoint nodes; fn receives n broadcastable axes.

    Warns when the outermost cell layer is not numerically negligible
    (the grid is a surrogate for compact support).
    """
    ax = axis_nodes(L, N)
    grids = np.meshgrid(*([ax] * n), indexing="ij")
    vals = np.asarray(fn(*grids), dtype=np.complex128)
    gf = GridFunction(n=n, L=L, N=N, values=vals)
    if check_boundary:
        rel = gf.boundary_rel_magnitude()
        if rel > BOUNDARY_WARN:
            warnings.warn(
                f"sampled function is not negligible on the boundary layer "
                f"(relative magnitude {rel:.3e}); increase L", stacklevel=2)
    return gf


def sample_radial(f0: Callable, n: int, L: float, N: int,
                  check_boundary: bool = True) -> GridFunction:
    """Sample a radial profile f0(|x|) on the midpoint grid."""
    return sample(lambda *axes: f0(np.sqrt(sum(a * a for a in axes))),
                  n, L, N, check_boundary)


def _dual_phase(f: GridFunction):
    """Per-axis phase exp(-i xi_m x0) for the midpoint-offset DFT."""
    N, h = f.N, f.h
    x0 = -f.L + f.node_offset * h
    xi = (np.arange(N) - N // 2) * (math.pi / f.L)
    return xi, np.exp(-1j * xi * x0)


def fourier(f: GridFunction) -> GridFunction:
    """Discrete approximation of fhat(xi) = int f(x) exp(-i<x,xi>) dx.

    Returns samples on the dual grid xi in [-pi/h, pi/h)^n, spacing pi/L.
    """
    xi, phase = _dual_phase(f)
    out = np.fft.fftshift(np.fft.fftn(f.values))
    for ax in range(f.n):
        shape = [1] * f.n
        shape[ax] = f.N
        out = out * phase.reshape(shape)
    out *= f.h**f.n
    return GridFunction(n=f.n, L=math.pi / f.h, N=f.N, values=out, node_offset=0.0)


def inverse_fourier(g: GridFunction) -> GridFunction:
    """Exact inverse of :func:`fourier` (back to the midpoint primal grid)."""
    h_primal = math.pi / g.L  # dual half-width is pi/h of the primal grid
    L_primal = h_primal * g.N / 2.0
    x0 = -L_primal + 0.5 * h_primal
    xi = g.nodes()
    vals = g.values
    for ax in range(g.n):
        shape = [1] * g.n
        shape[ax] = g.N
        vals = vals * np.exp(1j * xi * x0).reshape(shape)
    vals = np.fft.ifftn(np.fft.ifftshift(vals)) / h_primal**g.n
    return GridFunction(n=g.n, L=L_primal, N=g.N, values=vals, node_offset=0.5)


def tilt(f: GridFunction, tau: float, direction: Direction) -> GridFunction:
    """Multiply by exp(-tau(<a,x> + b)); refuses when the tilted tail is
    no longer negligible at the box boundary (enlarge L or shrink tau)."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if tau == 0.0:
        return f
    ell = f.linear_form(direction)
    vals = f.values * np.exp(-tau * ell)
    out = GridFunction(n=f.n, L=f.L, N=f.N, values=vals, node_offset=f.node_offset)
    rel = out.boundary_rel_magnitude()
    if rel > BOUNDARY_REFUSE:
        raise TiltSafetyError(
            f"tilt tau={tau} leaves relative boundary magnitude {rel:.3e} > "
            f"{BOUNDARY_REFUSE:.0e}; increase L or decrease tau")
    return out


def gradient(f: GridFunction) -> tuple:
    """Spectral partial derivatives, one GridFunction per axis."""
    fhat = fourier(f)
    xi = fhat.nodes()
    comps = []
    for ax in range(f.n):
        shape = [1] * f.n
        shape[ax] = f.N
        ghat = GridFunction(n=f.n, L=fhat.L, N=f.N,
                            values=fhat.values * (1j * xi.reshape(shape)),
                            node_offset=0.0)
        comps.append(inverse_fourier(ghat))
    return tuple(comps)


def gradient_magnitude(f: GridFunction) -> GridFunction:
    """|grad f| = sqrt(sum_j |df/dx_j|^2) as a (real-valued) GridFunction."""
    comps = gradient(f)
    mag = _kernels.abs_magnitude([c.values for c in comps])
    return GridFunction(n=f.n, L=f.L, N=f.N, values=mag.astype(np.complex128),
                        node_offset=f.node_offset)


WeightLike = Union[None, float, int, np.ndarray, PiecewisePowerWeight, Callable]


def weight_values(f: GridFunction, w: WeightLike) -> Optional[np.ndarray]:
    """Evaluate a weight specification at the nodes of f.

    Accepts None / scalar (constant weight), an array of node values, a
    :class:`PiecewisePowerWeight` (applied to |x|), or a callable of the
    radius array.  Raises on non-finite values at any node.
    """
    if w is None:
        return None
    if isinstance(w, (int, float)):
        if w == 1.0:
            return None
        vals = np.full((f.N,) * f.n, float(w))
    elif isinstance(w, np.ndarray):
        if w.shape != f.values.shape:
            raise ValueError("weight array shape does not match the grid")
        vals = np.asarray(w, dtype=np.float64)
    else:
        vals = np.asarray(w(f.radius()), dtype=np.float64)
    if not np.all(np.isfinite(vals)):
        raise ValueError("weight is not finite at some grid node")
    return vals


def weighted_norm(f: GridFunction, w: WeightLike, exponent: float) -> float:
    """(sum_j w(x_j) |f(x_j)|^s h^n)^(1/s) for s in [1, inf)."""
    if exponent < 1.0:
        raise ValueError("norm exponent must be >= 1")
    wv = weight_values(f, w)
    wflat = None if wv is None else np.ascontiguousarray(wv).ravel()
    total = _kernels.weighted_power_sum_complex(f.values.ravel(), wflat, exponent)
    return (total * f.h**f.n) ** (1.0 / exponent)
