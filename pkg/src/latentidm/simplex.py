"""Geometry and measure on the probability simplex.

Points, regular lattice grids, Dirichlet densities, and a brute-force grid
integrator.  The integrator is the validation oracle for every closed form
in this repository, so its measure convention is fixed once, here:

    All integrals are taken with respect to Lebesgue measure on the simplex
    projected onto its first k-1 coordinates.  The total measure of the
    k-simplex under this convention is 1/(k-1)!, and Dirichlet densities as
    evaluated by :func:`dirichlet_log_density` integrate to exactly 1.

The alternative convention (surface measure of the simplex embedded in R^k,
total measure sqrt(k)/(k-1)!) differs only by the constant factor sqrt(k).
Every downstream use of the integrator is a ratio of two integrals over the
same grid, so the choice is contract-irrelevant as long as it is consistent;
the projected convention is used because it makes densities normalize to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .special import log_gamma

INCLUDE_BOUNDARY = "include-boundary"
CLAMP_TO_EPSILON = "clamp-to-epsilon"

_SUM_TOL = 1e-12
_MAX_GRID_POINTS = 30_000_000


@dataclass(frozen=True, eq=False)
class SimplexPoint:
    """A chance vector on the k-simplex: nonnegative coordinates summing to 1.

    Also used for hyperparameter vectors t, in which case interior points
    (all coordinates strictly positive) are required by the consumer.
    """

    coords: np.ndarray

    def __init__(self, coords) -> None:
        arr = np.asarray(coords, dtype=float).copy()
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("a simplex point needs k >= 2 coordinates")
        if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
            raise ValueError(f"coordinates must be finite and >= 0, got {arr}")
        total = float(arr.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"coordinates must sum to 1 within {_SUM_TOL}, got {total!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def k(self) -> int:
        return self.coords.size

    @property
    def is_interior(self) -> bool:
        return bool(self.coords.min() > 0.0)

    def __getitem__(self, i: int) -> float:
        return float(self.coords[i])

    def __iter__(self):
        return iter(self.coords.tolist())

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplexPoint) and np.array_equal(self.coords, other.coords)

    def __repr__(self) -> str:
        inside = ", ".join(f"{c:.12g}" for c in self.coords)
        return f"SimplexPoint([{inside}])"

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(self.coords.tolist())

    @staticmethod
    def uniform(k: int) -> "SimplexPoint":
        return SimplexPoint(np.full(k, 1.0 / k))

    @staticmethod
    def vertex(k: int, j: int) -> "SimplexPoint":
        coords = np.zeros(k)
        coords[j] = 1.0
        return SimplexPoint(coords)


@dataclass(frozen=True)
class DirichletParams:
    """Parameters (s, t) of a Dirichlet density with strength s and mean t.

    t must lie in the open simplex: boundary values of t are treated as
    limits everywhere in this package, never as members.
    """

    s: float
    t: SimplexPoint

    def __post_init__(self) -> None:
        if not (math.isfinite(self.s) and self.s > 0.0):
            raise ValueError(f"prior strength s must be positive, got {self.s}")
        if not self.t.is_interior:
            raise ValueError("t must lie in the open simplex (all coordinates > 0)")

    @property
    def k(self) -> int:
        return self.t.k

    @property
    def alpha(self) -> np.ndarray:
        """Conventional Dirichlet parameter vector s*t."""
        return self.s * self.t.coords


def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length `parts` summing to `total`."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    if parts == 2:
        first = np.arange(total + 1, dtype=np.int64)
        return np.column_stack([first, total - first])
    blocks = []
    for first in range(total + 1):
        rest = _compositions(total - first, parts - 1)
        blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


@dataclass(frozen=True)
class SimplexGrid:
    """Regular lattice grid on the k-simplex: points (i_1/m, ..., i_k/m).

    The point count is binomial(m+k-1, k-1).  Under the clamp-to-epsilon
    boundary policy each point p is replaced by (1 - k*eps)*p + eps, which
    keeps the coordinate sum at 1 exactly while bounding every coordinate
    below by eps.  Densities with negative exponents must never be
    evaluated at boundary points, so clamping is the default.
    """

    k: int
    resolution: int
    boundary_policy: str = CLAMP_TO_EPSILON
    eps_clamp: float = 1e-9
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.k < 2 or self.k > 6:
            raise ValueError(f"grid dimension k must be in [2, 6], got {self.k}")
        if self.resolution < 1:
            raise ValueError("grid resolution must be a positive integer")
        if self.boundary_policy not in (INCLUDE_BOUNDARY, CLAMP_TO_EPSILON):
            raise ValueError(f"unknown boundary policy {self.boundary_policy!r}")
        if self.boundary_policy == CLAMP_TO_EPSILON:
            if not (0.0 < self.eps_clamp < 1.0 / self.k):
                raise ValueError("eps_clamp must satisfy 0 < eps_clamp < 1/k")
        expected = math.comb(self.resolution + self.k - 1, self.k - 1)
        if expected > _MAX_GRID_POINTS:
            raise ValueError(f"grid would hold {expected} points; refusing")
        pts = _compositions(self.resolution, self.k).astype(float) / self.resolution
        if self.boundary_policy == CLAMP_TO_EPSILON:
            pts = pts * (1.0 - self.k * self.eps_clamp) + self.eps_clamp
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def point_count(self) -> int:
        return self.points.shape[0]

    @property
    def simplex_volume(self) -> float:
        """Total measure of the simplex under the projected-coordinate convention."""
        return 1.0 / math.factorial(self.k - 1)

    @property
    def cell_measure(self) -> float:
        return self.simplex_volume / self.point_count


SimplexFunction = Callable[[np.ndarray], Union[float, np.ndarray]]


def integrate_on_simplex(f: SimplexFunction, grid: SimplexGrid, vectorized: bool = False) -> float:
    """Riemann-type grid approximation of the integral of f over the simplex.

    Returns (simplex volume / point count) * sum of f over the grid points,
    with the measure convention documented in the module docstring.  When
    `vectorized` is true, f is called once with the full (N, k) point array
    and must return N values; otherwise it is called once per point with a
    length-k coordinate array.  Evaluation failures of f propagate.
    """
    if grid.resolution < 2:
        raise ValueError("integration requires grid resolution m >= 2")
    if vectorized:
        values = np.asarray(f(grid.points), dtype=float)
        if values.shape != (grid.point_count,):
            raise ValueError("vectorized integrand returned wrong shape")
    else:
        values = np.fromiter((f(p) for p in grid.points), dtype=float, count=grid.point_count)
    return float(grid.simplex_volume * values.mean())


def _dirichlet_log_density_matrix(params: DirichletParams, points: np.ndarray) -> np.ndarray:
    """Log density at each row of an (N, k) point matrix.

    Rows with a zero coordinate get -inf when the matching exponent is
    positive and a zero contribution when the exponent is zero; a zero
    coordinate against a negative exponent is a domain error (the density
    diverges there).
    """
    exponents = params.alpha - 1.0
    log_norm = log_gamma(params.s) - sum(log_gamma(a) for a in params.alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(points)
        terms = exponents[None, :] * logs
    zero_mask = points == 0.0
    if np.any(zero_mask):
        bad = zero_mask & (exponents[None, :] < 0.0)
        if np.any(bad):
            raise ValueError(
                "density diverges: zero coordinate where the exponent s*t_i - 1 is negative"
            )
        # 0 * log(0) is taken as 0 (the coordinate's factor is theta^0 = 1).
        terms = np.where(zero_mask & (exponents[None, :] == 0.0), 0.0, terms)
    return log_norm + terms.sum(axis=1)


def dirichlet_log_density(params: DirichletParams, theta) -> float:
    """Log of the Dirichlet density at theta.

    Computes log Gamma(s) - sum_i log Gamma(s t_i) + sum_i (s t_i - 1) log theta_i.
    theta may be a :class:`SimplexPoint` or a plain length-k coordinate array.
    Raises ValueError if theta has a zero coordinate where the corresponding
    exponent s t_i - 1 is negative.
    """
    coords = theta.coords if isinstance(theta, SimplexPoint) else np.asarray(theta, dtype=float)
    if coords.shape != (params.k,):
        raise ValueError(f"theta must have {params.k} coordinates")
    return float(_dirichlet_log_density_matrix(params, coords[None, :])[0])


def dirichlet_density_values(params: DirichletParams, grid: SimplexGrid) -> np.ndarray:
    """Density values at every grid point (vectorized convenience)."""
    return np.exp(_dirichlet_log_density_matrix(params, grid.points))


def dirichlet_mean(params: DirichletParams) -> SimplexPoint:
    """Mean of the Dirichlet: the hyperparameter t itself, returned exactly."""
    return params.t
