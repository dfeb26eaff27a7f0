"""Oversampling generator built from a smooth, compactly supported Fourier window.

The window is flat on the base band, falls off through an infinitely smooth
cosine taper, and vanishes outside a compact interval.  Its inverse Fourier
transform ``g`` has two properties everything downstream leans on: the shifts
``g(. - k/lam)`` are orthonormal (up to a fixed normalisation), and ``g``
decays faster than any polynomial, so finite truncations are quantifiably
accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

CACHE_FORMAT_VERSION = 1

# Safety factor applied on top of the measured grid maximum when estimating
# decay constants, covering values between grid nodes.
DECAY_SAFETY = 0.05

# Evaluation points per quadrature panel (Gauss-Legendre).
_PANEL_DEGREE = 64

# Chunk of grid points transformed per matrix product while filling the cache;
# bounds peak memory at roughly chunk * quad_points floats.
_BUILD_CHUNK = 4000


def _bump(x):
    """exp(-1/x) for x > 0 and 0 elsewhere, without overflow warnings."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def taper(x):
    """Smooth step: 0 for x <= 0, 1 for x >= 1, C-infinity in between.

    Built from the standard bump ratio w(x) / (w(x) + w(1 - x)); it satisfies
    taper(x) + taper(1 - x) = 1, which is what makes the window below exactly
    orthonormality-preserving.
    """
    x = np.asarray(x, dtype=float)
    wx = _bump(x)
    return wx / (wx + _bump(1.0 - x))


def ghat(xi, lam):
    """Fourier window of the generator.

    Real, even, and supported on ``|xi| <= (2 lam - 1) pi``: equal to
    ``1 / sqrt(2 lam pi)`` for ``|xi| <= pi``, tapered by
    ``cos(pi/2 * taper(...))`` on the transition band, zero beyond.
    """
    if lam <= 1:
        raise ValueError(f"oversampling ratio must exceed 1, got {lam}")
    xi_arr = np.abs(np.asarray(xi, dtype=float))
    scalar = xi_arr.ndim == 0
    xi_arr = np.atleast_1d(xi_arr)
    flat = 1.0 / math.sqrt(2.0 * lam * math.pi)
    out = np.where(xi_arr <= math.pi, flat, 0.0)
    mid = (xi_arr > math.pi) & (xi_arr <= (2.0 * lam - 1.0) * math.pi)
    if np.any(mid):
        s = (xi_arr[mid] - math.pi) / ((2.0 * lam - 2.0) * math.pi)
        out[mid] = flat * np.cos(0.5 * math.pi * taper(s))
    return float(out[0]) if scalar else out


def gamma_r(r, lam):
    """Closed-form bound on sums of ``(1 + |x - k/lam|)^-r`` over the lattice.

    Valid for r > 1; grows like lam/(r-1) for moderate r and is used to turn
    pointwise decay of the generator into summable kernel estimates.
    """
    if r <= 1:
        raise ValueError(f"decay exponent must exceed 1, got {r}")
    if lam <= 1:
        raise ValueError(f"oversampling ratio must exceed 1, got {lam}")
    return 1.0 + (lam / (r - 1.0)) * (1.0 + (lam / (lam - 1.0)) ** (r - 1.0))


def _quad_rule(lam, quad_points):
    """Composite Gauss-Legendre nodes/weights on [0, (2 lam - 1) pi].

    The integrand cos(t xi) ghat(xi) oscillates, so the range is split into
    panels with a fixed-degree rule per panel; quad_points is the total node
    count and must be a multiple of the panel degree.
    """
    if quad_points % _PANEL_DEGREE != 0:
        raise ValueError(
            f"quad_points must be a multiple of {_PANEL_DEGREE}, got {quad_points}"
        )
    panels = quad_points // _PANEL_DEGREE
    base_x, base_w = np.polynomial.legendre.leggauss(_PANEL_DEGREE)
    edges = np.linspace(0.0, (2.0 * lam - 1.0) * math.pi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    weights = (half[:, None] * base_w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class GeneratorParams:
    """Construction parameters for the cached generator."""

    lam: float
    quad_points: int = 2048
    grid_step: float = 1e-3
    tail_cut: float = 60.0

    def __post_init__(self):
        if self.lam <= 1:
            raise ValueError(f"oversampling ratio must exceed 1, got {self.lam}")
        if self.quad_points < _PANEL_DEGREE or self.quad_points % _PANEL_DEGREE != 0:
            raise ValueError(
                f"quad_points must be a positive multiple of {_PANEL_DEGREE}, "
                f"got {self.quad_points}"
            )
        if not 0 < self.grid_step <= 0.1:
            raise ValueError(f"grid_step out of range: {self.grid_step}")
        if self.tail_cut < 10.0:
            raise ValueError(f"tail_cut too small to certify decay: {self.tail_cut}")


class Generator:
    """Cached evaluator of the generator g.

    The inverse transform is computed once by quadrature on a uniform grid
    over [0, tail_cut] and interpolated with a cubic spline; evaluation reads
    the cache through |t|, so evenness is exact, and returns 0 beyond the
    tail cut.  Instances are immutable apart from the decay-constant cache.
    """

    def __init__(self, params: GeneratorParams, _table=None):
        self.params = params
        self.support_half_width = (2.0 * params.lam - 1.0) * math.pi
        if _table is None:
            grid, values = self._build_table(params)
        else:
            grid, values = _table
            grid = np.asarray(grid, dtype=float)
            values = np.asarray(values, dtype=float)
            if grid.shape != values.shape or grid.ndim != 1 or grid.size < 4:
                raise ValueError("malformed generator cache table")
        self.grid = grid
        self.values = values
        # Clamping the derivative at t = 0 encodes that g is even.
        self._spline = CubicSpline(grid, values, bc_type=((1, 0.0), "not-a-knot"))
        self._c_r_table: dict[int, float] = {}

    @staticmethod
    def _build_table(params):
        nodes, weights = _quad_rule(params.lam, params.quad_points)
        gh = ghat(nodes, params.lam)
        coeff = weights * gh * (2.0 / math.sqrt(2.0 * math.pi))
        n_grid = int(round(params.tail_cut / params.grid_step)) + 1
        grid = np.arange(n_grid) * params.grid_step
        values = np.empty(n_grid)
        for start in range(0, n_grid, _BUILD_CHUNK):
            block = grid[start : start + _BUILD_CHUNK]
            values[start : start + _BUILD_CHUNK] = np.cos(np.outer(block, nodes)) @ coeff
        return grid, values

    @property
    def lam(self):
        return self.params.lam

    @property
    def c_r_table(self):
        """Decay constants estimated so far, keyed by exponent."""
        return dict(self._c_r_table)

    def eval(self, t):
        """Evaluate g at scalar or array t (even, 0 beyond the tail cut)."""
        t_arr = np.abs(np.asarray(t, dtype=float))
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        out = np.zeros(t_arr.shape)
        inside = t_arr <= self.params.tail_cut
        if np.any(inside):
            out[inside] = self._spline(t_arr[inside])
        return float(out[0]) if scalar else out

    __call__ = eval

    def decay_constant(self, r):
        """Smallest certified C with |g(t)| <= C / (1 + |t|)^r on the cache grid.

        The grid maximum of (1 + t)^r |g(t)| is inflated by a fixed safety
        factor; the estimate is rejected when the weighted profile is still
        rising at the tail cut, since then no finite grid certifies decay.
        """
        r = int(r)
        if r < 2:
            raise ValueError(f"decay exponent must be at least 2, got {r}")
        if r in self._c_r_table:
            return self._c_r_table[r]
        weighted = np.abs(self.values) * (1.0 + self.grid) ** r
        peak = float(weighted.max())
        if peak <= 0.0:
            raise ValueError("generator cache is identically zero; cannot certify decay")
        tail = float(weighted[-1])
        if tail >= peak:
            raise ValueError(
                f"weighted profile still rising at the tail cut for exponent {r}; "
                "increase tail_cut"
            )
        c_r = (1.0 + DECAY_SAFETY) * max(1.0, peak)
        self._c_r_table[r] = c_r
        return c_r

    def shift_inner_product(self, k):
        """Inner product of g with its shift by k / lam, via the cache grid.

        Returns a value close to 1 for k = 0 and close to 0 otherwise; used to
        audit orthonormality of the lattice shifts.
        """
        k = int(k)
        shift = abs(k) / self.params.lam
        # g is supported (numerically) on [-tail_cut, tail_cut]; the product
        # g(t) g(t - shift) lives on [shift - tail_cut, tail_cut].
        lo = shift - self.params.tail_cut
        hi = self.params.tail_cut
        if lo >= hi:
            return 0.0
        n = int(math.ceil((hi - lo) / self.params.grid_step)) + 1
        t = np.linspace(lo, hi, n)
        return float(simpson(self.eval(t) * self.eval(t - shift), x=t))

    def export_cache(self, path):
        """Write the cached table as CSV with a versioned parameter header."""
        p = self.params
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(
                f"# bandquant-generator-cache v{CACHE_FORMAT_VERSION} "
                f"lam={p.lam:.17g} quad_points={p.quad_points} "
                f"grid_step={p.grid_step:.17g} tail_cut={p.tail_cut:.17g}\n"
            )
            fh.write("t,g\n")
            for t, v in zip(self.grid, self.values):
                fh.write(f"{t:.17g},{v:.17g}\n")

    @classmethod
    def from_cache(cls, path):
        """Rebuild a generator from an exported cache without re-integrating."""
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            prefix = "# bandquant-generator-cache "
            if not header.startswith(prefix):
                raise ValueError(f"not a generator cache file: {path}")
            fields = header[len(prefix) :].split()
            if not fields or fields[0] != f"v{CACHE_FORMAT_VERSION}":
                raise ValueError(f"unsupported cache version in {path}: {header}")
            kv = dict(item.split("=", 1) for item in fields[1:])
            params = GeneratorParams(
                lam=float(kv["lam"]),
                quad_points=int(kv["quad_points"]),
                grid_step=float(kv["grid_step"]),
                tail_cut=float(kv["tail_cut"]),
            )
            column_line = fh.readline().strip()
            if column_line != "t,g":
                raise ValueError(f"unexpected cache columns: {column_line}")
            data = np.loadtxt(fh, delimiter=",")
        return cls(params, _table=(data[:, 0], data[:, 1]))


@dataclass(frozen=True)
class KernelContext:
    """A generator together with the finite shift window spanning the model space."""

    generator: Generator
    k_max: int
    half_width: float

    @classmethod
    def from_box(cls, generator, R, eps):
        """Window large enough to reconstruct on [-R, R] with margin eps."""
        if R <= 0 or eps <= 0:
            raise ValueError(f"need positive R and eps, got R={R}, eps={eps}")
        half_width = (1.0 + 2.5 * eps) * R
        # The 1e-9 guard keeps exact boundary products (e.g. 22.5) stable
        # against floating-point representation of the factors.
        k_max = int(math.floor(generator.lam * half_width + 1e-9))
        return cls(generator=generator, k_max=k_max, half_width=half_width)

    @property
    def index_set(self):
        return np.arange(-self.k_max, self.k_max + 1)

    @property
    def dimension(self):
        return 2 * self.k_max + 1

    @property
    def shift_points(self):
        """Lattice points k / lam for k in the window."""
        return self.index_set / self.generator.lam

    def kernel_coefficients(self, x):
        """Vector (or stack of vectors) g(x - k/lam) over the index window."""
        x_arr = np.asarray(x, dtype=float)
        return self.generator.eval(x_arr[..., None] - self.shift_points)

    def kernel_eval(self, x, y):
        """Reproducing kernel of the finite span at (x, y)."""
        cx = self.kernel_coefficients(x)
        cy = self.kernel_coefficients(y)
        return cx @ cy


def kernel_eval(ctx: KernelContext, x, y):
    """Module-level alias of :meth:`KernelContext.kernel_eval`."""
    return ctx.kernel_eval(x, y)


def estimate_decay_constant(generator: Generator, r):
    """Module-level alias of :meth:`Generator.decay_constant`."""
    return generator.decay_constant(r)
