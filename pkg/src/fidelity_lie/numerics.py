"""Central differences with Richardson extrapolation and Brillouin-zone quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

MAX_RICHARDSON_LEVELS = 4


@dataclass(frozen=True)
class DiffSpec:
    """Step and extrapolation depth for :func:`central_diff`.

    ``step=None`` selects ``1e-4 * max(1, |x|)`` at the evaluation point.
    """

    step: float | None = None
    richardson_levels: int = 1

    def __post_init__(self):
        if self.step is not None and not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive and finite, got {self.step}")
        if not 0 <= self.richardson_levels <= MAX_RICHARDSON_LEVELS:
            raise ValueError(
                f"richardson_levels must be in [0, {MAX_RICHARDSON_LEVELS}], "
                f"got {self.richardson_levels}"
            )

    def step_at(self, x: float) -> float:
        if self.step is not None:
            return self.step
        return 1e-4 * max(1.0, abs(x))


@dataclass(frozen=True)
class QuadratureSpec:
    rule: Literal["midpoint", "gauss_legendre"] = "gauss_legendre"
    points_per_axis: int = 64

    def __post_init__(self):
        if self.rule not in ("midpoint", "gauss_legendre"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if int(self.points_per_axis) < 2:
            raise ValueError(
                f"points_per_axis must be >= 2, got {self.points_per_axis}"
            )


def _central(f: Callable[[float], float], x: float, h: float) -> float:
    fp, fm = f(x + h), f(x - h)
    if not (math.isfinite(fp) and math.isfinite(fm)):
        raise ValueError(f"non-finite function value on stencil around x={x} (h={h})")
    return (fp - fm) / (2.0 * h)


def central_diff(f: Callable[[float], float], x: float, spec: DiffSpec = DiffSpec()) -> float:
    """Derivative of ``f`` at ``x`` by central differences.

    Each Richardson level halves the step and cancels the next even power of
    the truncation error, so the result is accurate to ``O(h**(2 + 2*levels))``.
    """
    h = spec.step_at(x)
    levels = spec.richardson_levels
    # row[j] holds the j-times extrapolated estimate for the current step
    prev = [_central(f, x, h)]
    for i in range(1, levels + 1):
        row = [_central(f, x, h / 2**i)]
        for j in range(1, i + 1):
            factor = 4.0**j
            row.append((factor * row[j - 1] - prev[j - 1]) / (factor - 1.0))
        prev = row
    return prev[-1]


def quadrature_nodes(spec: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on [-pi, pi] and weights normalized to sum to one."""
    n = int(spec.points_per_axis)
    if spec.rule == "midpoint":
        nodes = -np.pi + (np.arange(n) + 0.5) * (2.0 * np.pi / n)
        weights = np.full(n, 1.0 / n)
    else:
        x, w = np.polynomial.legendre.leggauss(n)
        nodes = np.pi * x
        weights = w / 2.0
    return nodes, weights


def bz_integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Integrate ``f(kx, ky)`` over [-pi, pi]^2 with measure dk/(2 pi)^2.

    ``f`` is called once on broadcast 2D node arrays; scalar-only callables are
    vectorized automatically. Summation uses ``math.fsum`` so the result does
    not depend on evaluation or thread order.
    """
    nodes, weights = quadrature_nodes(spec)
    kx, ky = np.meshgrid(nodes, nodes, indexing="ij")
    try:
        values = np.asarray(f(kx, ky), dtype=float)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape != kx.shape:
        values = np.vectorize(lambda a, b: float(f(a, b)))(kx, ky)
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite integrand sample in Brillouin-zone quadrature")
    return math.fsum((np.outer(weights, weights) * values).ravel())
