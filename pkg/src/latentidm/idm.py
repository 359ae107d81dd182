"""Dirichlet-multinomial conjugate machinery.

Closed-form posterior update, the log marginal probability of an ordered
dataset, and the classic fully-observable predictive bounds obtained from a
near-ignorance set of Dirichlet priors with fixed strength s.

Throughout, marginal probabilities refer to an ordered dataset: no
multinomial coefficient is included.  Multiplicity factors are applied only
where a caller collapses a sum over ordered sequences.  Empty products are 1
and 0**0 is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simplex import DirichletParams, SimplexPoint


@dataclass(frozen=True)
class FrequencyVector:
    """Outcome counts (a_1, ..., a_k) of a categorical dataset."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) < 2:
            raise ValueError("a frequency vector needs k >= 2 outcome counts")
        for c in self.counts:
            if not isinstance(c, int) or c < 0:
                raise ValueError(f"counts must be nonnegative integers, got {self.counts}")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)

    def __getitem__(self, i: int) -> int:
        return self.counts[i]


@dataclass(frozen=True)
class BoundaryLimit:
    """Marks a bound attained only in the limit t[coordinate] -> value.

    The hyperparameter set is the open simplex, so such bounds are suprema
    or infima approached at its boundary, not attained values.
    """

    coordinate: int
    value: float

    def __post_init__(self) -> None:
        if self.value not in (0.0, 1.0):
            raise ValueError("boundary limits are t_j -> 0 or t_j -> 1")

    def __str__(self) -> str:
        return f"t[{self.coordinate}]->{self.value:g}"


@dataclass(frozen=True)
class PredictiveBounds:
    """A lower/upper probability pair with the extremizing t recorded.

    argmin_t / argmax_t hold either the grid point where the extremum was
    found (a SimplexPoint) or a BoundaryLimit descriptor when the extremum
    is attained only in the limit.
    """

    lower: float
    upper: float
    argmin_t: SimplexPoint | BoundaryLimit | None = None
    argmax_t: SimplexPoint | BoundaryLimit | None = None

    def __post_init__(self) -> None:
        slack = 1e-12
        if not (-slack <= self.lower <= self.upper <= 1.0 + slack):
            raise ValueError(f"need 0 <= lower <= upper <= 1, got ({self.lower}, {self.upper})")
        object.__setattr__(self, "lower", min(max(self.lower, 0.0), 1.0))
        object.__setattr__(self, "upper", min(max(self.upper, 0.0), 1.0))

    @property
    def width(self) -> float:
        return self.upper - self.lower


def log_marginal_probability(prior: DirichletParams, freq: FrequencyVector) -> float:
    """Log probability of an ordered dataset with the given frequencies.

    log P(x) = sum_h sum_{j=1..a_h} log(s t_h + j - 1) - sum_{j=1..n} log(s + j - 1),
    with empty products equal to 1.  Evaluated in log space so ascending
    factorials cannot overflow.
    """
    if freq.k != prior.k:
        raise ValueError(f"frequency vector has k={freq.k}, prior has k={prior.k}")
    s = prior.s
    total = 0.0
    for h, a_h in enumerate(freq.counts):
        st_h = s * prior.t[h]
        for j in range(1, a_h + 1):
            total += math.log(st_h + j - 1)
    for j in range(1, freq.n + 1):
        total -= math.log(s + j - 1)
    return total


def posterior_update(
    prior: DirichletParams, freq: FrequencyVector
) -> tuple[DirichletParams, float]:
    """Conjugate update: posterior parameters and the dataset's log marginal.

    The posterior has strength n + s and mean (a_h + s t_h) / (n + s).
    """
    if freq.k != prior.k:
        raise ValueError(f"frequency vector has k={freq.k}, prior has k={prior.k}")
    n = freq.n
    if n == 0:
        return prior, 0.0
    counts = np.asarray(freq.counts, dtype=float)
    post_t = SimplexPoint((counts + prior.s * prior.t.coords) / (n + prior.s))
    posterior = DirichletParams(s=n + prior.s, t=post_t)
    return posterior, log_marginal_probability(prior, freq)


def standard_idm_predictive_bounds(
    s: float, freq: FrequencyVector, j: int
) -> PredictiveBounds:
    """Predictive bounds for the next outcome when the data are fully observed.

    Sweeping t over the open simplex, the posterior predictive
    (a_j + s t_j)/(n + s) approaches a_j/(n + s) as t_j -> 0 and
    (a_j + s)/(n + s) as t_j -> 1; both are limits, recorded as such.
    """
    if not s > 0.0:
        raise ValueError("s must be positive")
    if not 0 <= j < freq.k:
        raise ValueError(f"outcome index {j} out of range for k={freq.k}")
    denom = freq.n + s
    return PredictiveBounds(
        lower=freq[j] / denom,
        upper=(freq[j] + s) / denom,
        argmin_t=BoundaryLimit(j, 0.0),
        argmax_t=BoundaryLimit(j, 1.0),
    )


def vacuous_prior_upper_predictive(freq_next: FrequencyVector) -> float:
    """Upper prior probability of a future dataset under total ignorance.

    This is the supremum over the simplex of prod_i theta_i^{n_i'}, namely
    prod_i (n_i'/n')^{n_i'} with 0**0 = 1, attained at the relative
    frequencies.  The matching vacuous lower probability is always 0.
    """
    n = freq_next.n
    if n < 1:
        raise ValueError("the future dataset must contain at least one outcome")
    value = 1.0
    for c in freq_next.counts:
        if c > 0:
            value *= (c / n) ** c
    return value
