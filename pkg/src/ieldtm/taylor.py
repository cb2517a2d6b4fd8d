"""Coefficient-sequence algebra for local Taylor (differential transform) methods.

A node of the integration carries the scaled derivatives X(k) = x^(k)(t_i)/k!
of the solution at its expansion point.  Everything downstream (stepping,
error control, stability evaluation) is built from convolution products and
truncated series evaluation of these sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteStateError

__all__ = ["CoeffTable", "SeriesEvalPoint", "cauchy_product", "triple_product", "horner_eval"]


@dataclass(frozen=True)
class CoeffTable:
    """Dense Taylor coefficients of one expansion node.

    ``coeffs[k]`` is the length-``dim`` vector X(k); ``coeffs[0]`` is the state
    itself.  Tables are values: never mutated after construction.
    """

    base_time: float
    coeffs: np.ndarray  # shape (depth+1, dim)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
            raise ValueError("coeffs must be a (depth+1, dim) array with depth >= 0, dim >= 1")
        if not np.isfinite(c).all():
            raise NonFiniteStateError(
                f"non-finite Taylor coefficient at t = {self.base_time!r}"
            )
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def depth(self) -> int:
        """Highest stored coefficient index."""
        return self.coeffs.shape[0] - 1

    @property
    def state(self) -> np.ndarray:
        return self.coeffs[0]

    def component(self, j: int) -> np.ndarray:
        """Coefficient sequence of one solution component."""
        return self.coeffs[:, j]


@dataclass(frozen=True)
class SeriesEvalPoint:
    """Where and how deep to evaluate a truncated series: signed offset from
    the expansion point and the truncation order."""

    offset: float
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be non-negative")


def cauchy_product(a, b, k: int) -> float:
    """Convolution sum sum_{j=0}^{k} a(j) * b(k-j).

    This is the transform of a pointwise product of two scalar series.
    Raises IndexError if either sequence is shorter than k+1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[0] < k + 1 or b.shape[0] < k + 1:
        raise IndexError(f"sequences must be defined up to index {k}")
    return float(np.dot(a[: k + 1], b[k::-1]))


def triple_product(a, b, c, k: int) -> float:
    """Nested convolution sum_{l=0}^{k} sum_{n=0}^{l} a(n) b(l-n) c(k-l).

    Equals the Cauchy product applied twice; the transform of a*b*c.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if a.shape[0] < k + 1 or b.shape[0] < k + 1 or c.shape[0] < k + 1:
        raise IndexError(f"sequences must be defined up to index {k}")
    ab = np.array([np.dot(a[: l + 1], b[l::-1]) for l in range(k + 1)])
    return float(np.dot(ab, c[k::-1]))


def horner_eval(table: CoeffTable, pt: SeriesEvalPoint) -> np.ndarray:
    """Evaluate sum_{k=0}^{order} X(k) * offset^k componentwise, highest
    order first for stability."""
    if pt.order > table.depth:
        raise IndexError(
            f"order {pt.order} exceeds stored coefficient depth {table.depth}"
        )
    c = table.coeffs
    acc = c[pt.order].copy()
    for k in range(pt.order - 1, -1, -1):
        acc *= pt.offset
        acc += c[k]
    return acc
