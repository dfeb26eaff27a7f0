"""Random frame assembly, canonical dual reconstruction and spectrum diagnostics.

The rows of the condensed, weighted, sign-flipped sample matrix act as a
random frame for the finite generator span: with enough samples the frame
operator concentrates around a multiple of the identity, and reconstruction
is a single symmetric solve against the frame operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .generator import KernelContext

# Smallest bottom eigenvalue of the frame operator considered invertible.
LAMBDA_MIN_FLOOR = 1e-10


class FrameFailure(RuntimeError):
    """Raised when the assembled frame operator is numerically singular."""


def sample_matrix(points, ctx: KernelContext):
    """Rows of generator translates evaluated at the sample points.

    Entry (i, k) is g(points[i] - k/lam) over the context's index window, so
    row i applied to a coefficient vector evaluates that span element at
    points[i].
    """
    points = np.atleast_1d(np.asarray(points, dtype=float))
    return ctx.kernel_coefficients(points)


def build_sample_matrix(binned, ctx: KernelContext):
    """Sample matrix for the retained, bin-ordered coordinates."""
    return sample_matrix(binned.coordinates(), ctx)


@dataclass(frozen=True)
class FrameSystem:
    """Assembled frame: the analysis matrix, frame operator and its spectrum."""

    analysis: np.ndarray
    operator: np.ndarray
    lam_min: float
    lam_max: float
    context: KernelContext

    @property
    def rows(self):
        return self.analysis.shape[0]


def assemble_frame(G, ctx: KernelContext, weight=None, condenser=None, signs=None):
    """Form the analysis matrix W V diag(signs) G and its frame operator.

    weight, condenser and signs default to identities, which is the plain
    per-sample (memoryless) path.  Raises FrameFailure when the frame
    operator's smallest eigenvalue falls below the invertibility floor.
    """
    B = np.asarray(G, dtype=float)
    if B.ndim != 2 or B.shape[1] != ctx.dimension:
        raise ValueError(
            f"sample matrix must have {ctx.dimension} columns, got shape {B.shape}"
        )
    if signs is not None:
        signs = np.asarray(signs, dtype=float)
        if signs.shape != (B.shape[0],):
            raise ValueError(
                f"expected {B.shape[0]} signs, got shape {signs.shape}"
            )
        B = signs[:, None] * B
    if condenser is not None:
        B = condenser.matrix(as_sparse=True) @ B
    if weight is not None:
        if weight.diagonal.shape != (B.shape[0],):
            raise ValueError(
                f"weight diagonal of shape {weight.diagonal.shape} does not "
                f"match {B.shape[0]} condensed rows"
            )
        B = weight.diagonal[:, None] * B
    S = B.T @ B
    eigvals = linalg.eigvalsh(S)
    lam_min = float(eigvals[0])
    lam_max = float(eigvals[-1])
    if lam_min <= LAMBDA_MIN_FLOOR:
        raise FrameFailure(
            f"frame operator is numerically singular: smallest eigenvalue "
            f"{lam_min:.3e} (rows={B.shape[0]}, dim={ctx.dimension})"
        )
    return FrameSystem(
        analysis=B, operator=S, lam_min=lam_min, lam_max=lam_max, context=ctx
    )


def reconstruct(system: FrameSystem, q, weight=None, condenser=None):
    """Canonical-dual coefficients from (possibly quantized) signed samples q.

    Applies the same condensation and weighting as the analysis matrix, then
    solves the frame operator against the analysis adjoint:
    c = S^{-1} B^T (W V q).
    """
    v = np.asarray(q, dtype=float)
    if condenser is not None:
        v = condenser.matrix(as_sparse=True) @ v
    if weight is not None:
        v = weight.apply(v)
    if v.shape != (system.rows,):
        raise ValueError(
            f"expected {system.rows} condensed measurements, got shape {v.shape}"
        )
    rhs = system.analysis.T @ v
    return linalg.cho_solve(linalg.cho_factor(system.operator), rhs)


@dataclass(frozen=True)
class FrameBandReport:
    """Observed frame-operator spectrum against the concentration band."""

    lam_min: float
    lam_max: float
    lower: float
    upper: float

    @property
    def lower_ok(self):
        return self.lam_min >= self.lower

    @property
    def upper_ok(self):
        return self.lam_max <= self.upper


def frame_bound_report(system: FrameSystem, nu, gamma, t):
    """Concentration band for the frame spectrum at confidence parameters.

    The band is (||nu||_2 / ||nu||_1)^2 * [1 - gamma - 3t, 1 + 3t]; the
    report records whether the observed extreme eigenvalues respect it.
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    ratio = (nu.l2 / nu.l1) ** 2
    return FrameBandReport(
        lam_min=system.lam_min,
        lam_max=system.lam_max,
        lower=ratio * (1.0 - gamma - 3.0 * t),
        upper=ratio * (1.0 + 3.0 * t),
    )
