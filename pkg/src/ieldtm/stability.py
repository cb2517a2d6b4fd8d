"""Stability toolkit: rational stability function, region sampling,
A-/L-stability certificates, matrix stability function and the
logarithmic-norm contraction predicate.

The scalar stability function is the ratio of two truncated exponentials,

    R(z) = T_K((1 - theta) z) / T_K(-theta z),   T_K(w) = sum_{k<=K} w^k / k!,

so R(z) approximates e^z near the origin and the classical theta-method is
recovered at K = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import IeldtmError, PoleError, SingularMatrixError

__all__ = [
    "StabilityGrid",
    "scalar_R",
    "sample_region",
    "unstable_fraction",
    "is_A_stable",
    "is_L_stable",
    "matrix_R",
    "log_norm_euclid",
    "contraction_certificate",
]

_POLE_FLOOR = 1e-300
A_STABLE_SLACK = 1e-10


def _trunc_exp(w, order: int):
    """Horner evaluation of the degree-``order`` Taylor polynomial of e^w;
    works elementwise on complex arrays."""
    acc = np.full_like(np.asarray(w, dtype=complex), 1.0 / math.factorial(order))
    for k in range(order - 1, -1, -1):
        acc = acc * w + 1.0 / math.factorial(k)
    return acc


def scalar_R(z: complex, theta: float, order: int) -> complex:
    """Scalar stability function R(z) for one (theta, K)."""
    num = _trunc_exp((1.0 - theta) * z, order)
    den = _trunc_exp(-theta * z, order)
    if abs(den) < _POLE_FLOOR:
        raise PoleError(f"denominator vanishes at z = {z!r}")
    return complex(num / den)


def _abs_R_array(z, theta: float, order: int) -> np.ndarray:
    """|R| over a complex array; poles map to +inf."""
    num = np.abs(_trunc_exp((1.0 - theta) * z, order))
    den = np.abs(_trunc_exp(-theta * z, order))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den < _POLE_FLOOR, np.inf, num / np.maximum(den, _POLE_FLOOR))
    return out


@dataclass(frozen=True)
class StabilityGrid:
    """|R(z)| sampled on a complex-plane rectangle; values[i, j] belongs to
    re_values[i] + 1j * im_values[j]."""

    theta: float
    order: int
    re_values: np.ndarray
    im_values: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.re_values.size, self.im_values.size):
            raise ValueError("values shape must match the axis resolutions")
        if np.nanmin(self.values) < 0:
            raise ValueError("|R| samples must be non-negative")


def sample_region(theta: float, order: int, re_range=(-10.0, 5.0),
                  im_range=(-10.0, 10.0), resolution=(400, 400)) -> StabilityGrid:
    """Sample |R| on a uniform grid for region plotting."""
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    n_re, n_im = resolution
    if n_re < 2 or n_im < 2:
        raise ValueError("resolution must be >= 2 per axis")
    re = np.linspace(re_range[0], re_range[1], n_re)
    im = np.linspace(im_range[0], im_range[1], n_im)
    z = re[:, None] + 1j * im[None, :]
    return StabilityGrid(theta, order, re, im, _abs_R_array(z, theta, order))


def unstable_fraction(grid: StabilityGrid, slack: float = 1e-10) -> float:
    """Fraction of left-half-plane grid cells with |R| > 1 + slack.

    Quantifies "almost stable" schemes: high-order central/backward variants
    violate |R| <= 1 only on a small left-half-plane region, and this measures
    how small on the sampled window.
    """
    lhp = grid.re_values < 0.0
    if not lhp.any():
        return 0.0
    vals = grid.values[lhp, :]
    return float(np.mean(vals > 1.0 + slack))


def _lhp_pole(theta: float, order: int) -> Optional[complex]:
    """A pole of R in the closed left half-plane, or None.

    The denominator is the polynomial T_K(-theta z); its roots are found
    directly rather than hunted by sampling.
    """
    if theta == 0.0:
        return None
    coeffs = [(-theta) ** k / math.factorial(k) for k in range(order + 1)]
    roots = np.roots(coeffs[::-1])
    lhp = [r for r in roots if r.real <= 1e-9]
    if not lhp:
        return None
    return complex(max(lhp, key=lambda r: r.real))


def is_A_stable(theta: float, order: int, boundary_points: int = 10000,
                interior_resolution: int = 121, window: float = 50.0,
                ) -> Tuple[bool, Optional[complex]]:
    """Numerical A-stability certificate: |R| <= 1 (within slack) on a dense
    imaginary-axis sample plus an interior left-half-plane grid, with the
    denominator checked for left-half-plane poles.

    Returns (stable, witness); the witness is a violating z when unstable.
    This is a certificate by sampling, not a proof.
    """
    pole = _lhp_pole(theta, order)
    if pole is not None:
        # |R| blows up next to the pole; report a concrete violating point.
        witness = pole - 1e-6
        step = 1e-6
        while _abs_R_array(np.array([witness]), theta, order)[0] <= 1.0 + A_STABLE_SLACK:
            step *= 10.0
            witness = pole - step
            if step > 1.0:
                break
        return False, witness

    # Far negative real axis first: catches the polynomial growth of the
    # explicit schemes with a real witness.
    far = -np.logspace(0.0, 8.0, 200) + 0.0j
    vals = _abs_R_array(far, theta, order)
    bad = vals > 1.0 + A_STABLE_SLACK
    if bad.any():
        return False, complex(far[int(np.argmax(bad))])

    half = max(boundary_points // 2, 100)
    y = np.concatenate([[0.0], np.logspace(-6, 6, half)])
    y = np.concatenate([-y[::-1], y])
    boundary = 1j * y
    vals = _abs_R_array(boundary, theta, order)
    bad = vals > 1.0 + A_STABLE_SLACK
    if bad.any():
        return False, complex(boundary[int(np.argmax(bad))])

    re = np.linspace(-window, 0.0, interior_resolution)
    im = np.linspace(-window, window, 2 * interior_resolution - 1)
    z = re[:, None] + 1j * im[None, :]
    vals = _abs_R_array(z, theta, order)
    if (vals > 1.0 + A_STABLE_SLACK).any():
        idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
        return False, complex(z[idx])

    return True, None


def is_L_stable(theta: float, order: int) -> bool:
    """A-stability plus decay of |R| along the far negative real axis."""
    stable, _ = is_A_stable(theta, order)
    if not stable:
        return False
    return (abs(scalar_R(-1e6, theta, order)) <= 1e-4
            and abs(scalar_R(-1e8, theta, order)) <= 1e-6)


def matrix_R(theta: float, dtA, order: int) -> np.ndarray:
    """Matrix stability function: the implicit-step propagator of a linear
    homogeneous system x' = A x over one step (dtA = dt * A)."""
    dtA = np.asarray(dtA, dtype=float)
    m = dtA.shape[0]
    if dtA.shape != (m, m):
        raise ValueError("dtA must be square")
    eye = np.eye(m)

    def matrix_trunc_exp(W):
        acc = eye / math.factorial(order)
        for k in range(order - 1, -1, -1):
            acc = acc @ W + eye / math.factorial(k)
        return acc

    num = matrix_trunc_exp((1.0 - theta) * dtA)
    den = matrix_trunc_exp(-theta * dtA)
    try:
        return np.linalg.solve(den, num)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("stability denominator is singular") from exc


def log_norm_euclid(A) -> float:
    """Logarithmic norm in the Euclidean inner product: the largest
    eigenvalue of the symmetric part (A + A^T)/2."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    sym = 0.5 * (A + A.T)
    return float(np.linalg.eigvalsh(sym)[-1])


def contraction_certificate(theta: float, order: int, A, dt: float) -> bool:
    """True when the linear flow is contractive (log-norm <= 0) and the
    scheme is A-stable; then the one-step propagator is verified to be
    non-expansive in the 2-norm."""
    if log_norm_euclid(A) > 0.0:
        return False
    stable, _ = is_A_stable(theta, order)
    if not stable:
        return False
    A = np.asarray(A, dtype=float)
    norm = float(np.linalg.norm(matrix_R(theta, dt * A, order), 2))
    if norm > 1.0 + 1e-8:
        raise IeldtmError(
            f"contraction hypothesis held but ||R||_2 = {norm!r} > 1"
        )
    return True
