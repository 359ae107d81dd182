"""Inference about a categorical latent variable observed through noisy channels.

A manifest observation carries information about the hidden outcome through a
known column-stochastic emission matrix.  The observed sequence's likelihood
factorizes per index, a dynamic program collapses the sum over hidden
assignments into weights on frequency vectors, and the posterior predictive
for the next hidden outcome becomes a convex combination of conjugate-update
fractions.  Sweeping the prior mean t over the open simplex then yields
lower/upper predictive bounds, and a purely combinatorial scan of the
observed emission entries diagnoses whether those bounds can move off 0/1
at all.

The key bookkeeping split: the probability of the observed sequence given a
hidden assignment depends on the full ordered assignment, while the prior
probability of an assignment depends only on its frequencies.  The dynamic
program therefore aggregates ordered assignments into frequency weights
W(a), after which no further multiplicity factor is needed.  Brute-force
enumeration over all k^n assignments is kept as a test oracle, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import SizeCapError
from .idm import BoundaryLimit, FrequencyVector, PredictiveBounds, log_marginal_probability
from .simplex import CLAMP_TO_EPSILON, DirichletParams, SimplexGrid, SimplexPoint

DP_MAX_N = 20
DP_MAX_K = 4
ENUMERATION_MAX_N = 10

_COLUMN_SUM_TOL = 1e-12
_DEFAULT_T_RESOLUTION = {2: 2000, 3: 220, 4: 60}
_REFINEMENT_SHRINKS = (0.02, 5e-4, 1e-5)
_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class EmissionMatrix:
    """Conditional observation probabilities, one column per hidden outcome.

    entries[h, j] = P(observe row h | hidden outcome j).  Every column must
    sum to 1; rows enumerate the possible manifest outcomes.
    """

    entries: np.ndarray

    def __init__(self, entries) -> None:
        arr = np.asarray(entries, dtype=float).copy()
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 2:
            raise ValueError("emission matrix must be 2-D with k >= 2 columns")
        if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
            raise ValueError("emission entries must lie in [0, 1]")
        sums = arr.sum(axis=0)
        for j, s in enumerate(sums):
            if abs(s - 1.0) > _COLUMN_SUM_TOL:
                raise ValueError(f"emission column {j} sums to {s!r}, expected 1")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def manifest_count(self) -> int:
        return self.entries.shape[0]

    @property
    def k(self) -> int:
        return self.entries.shape[1]

    @staticmethod
    def identity(k: int) -> "EmissionMatrix":
        return EmissionMatrix(np.eye(k))

    def all_entries_positive(self) -> bool:
        return bool(np.all(self.entries > 0.0))


@dataclass(frozen=True)
class ManifestDataset:
    """An ordered sequence of observations, each an (emission, row) pair."""

    observations: tuple[tuple[EmissionMatrix, int], ...]
    k: int

    def __post_init__(self) -> None:
        obs = tuple(self.observations)
        object.__setattr__(self, "observations", obs)
        if self.k < 2:
            raise ValueError("k must be >= 2")
        for i, (emission, row) in enumerate(obs):
            if emission.k != self.k:
                raise ValueError(f"observation {i}: emission has k={emission.k}, expected {self.k}")
            if not 0 <= row < emission.manifest_count:
                raise ValueError(f"observation {i}: row {row} out of range")

    @property
    def n(self) -> int:
        return len(self.observations)

    @staticmethod
    def from_rows(emission: EmissionMatrix, rows: Sequence[int]) -> "ManifestDataset":
        """Shorthand for one emission matrix shared by every index."""
        return ManifestDataset(tuple((emission, int(r)) for r in rows), k=emission.k)


@dataclass(frozen=True)
class OutcomeDiagnosis:
    """Learnability flags for one hidden outcome, with witnessing indices."""

    outcome: int
    upper_strictly_below_one: bool
    upper_witnesses: tuple[int, ...]
    lower_strictly_above_zero: bool
    lower_witnesses: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.upper_strictly_below_one != bool(self.upper_witnesses):
            raise ValueError("upper flag must mirror its witness list")
        if self.lower_strictly_above_zero != bool(self.lower_witnesses):
            raise ValueError("lower flag must mirror its witness list")


@dataclass(frozen=True)
class VacuityDiagnosis:
    per_outcome: tuple[OutcomeDiagnosis, ...]

    @property
    def fully_vacuous(self) -> bool:
        """True when no outcome's bounds can move off (0, 1)."""
        return all(
            not d.upper_strictly_below_one and not d.lower_strictly_above_zero
            for d in self.per_outcome
        )

    def __getitem__(self, j: int) -> OutcomeDiagnosis:
        return self.per_outcome[j]


@dataclass(frozen=True)
class SearchSpec:
    """Grid-search settings for the sweep over the prior mean t.

    resolution defaults per dimension (2000 for k=2, coarser above), the
    grid is clamped to the open simplex, and each refinement pass re-sweeps
    a shrunken copy of the grid centered on the incumbent extremizer.
    """

    resolution: int | None = None
    clamp: float = 1e-6
    refinement_passes: int = 1

    def __post_init__(self) -> None:
        if self.resolution is not None and self.resolution < 2:
            raise ValueError("search resolution must be >= 2")
        if not 0.0 < self.clamp < 0.1:
            raise ValueError("clamp must be a small positive number")
        if not 0 <= self.refinement_passes <= len(_REFINEMENT_SHRINKS):
            raise ValueError(f"refinement_passes must be in [0, {len(_REFINEMENT_SHRINKS)}]")

    def resolution_for(self, k: int) -> int:
        if self.resolution is not None:
            return self.resolution
        try:
            return _DEFAULT_T_RESOLUTION[k]
        except KeyError:
            raise ValueError(f"no default search resolution for k={k}") from None


def manifest_given_latent(data: ManifestDataset, assignment: Sequence[int]) -> float:
    """Probability of the observed sequence given a full hidden assignment."""
    if len(assignment) != data.n:
        raise ValueError(f"assignment length {len(assignment)} != dataset size {data.n}")
    prob = 1.0
    for (emission, row), j in zip(data.observations, assignment):
        if not 0 <= j < data.k:
            raise ValueError(f"hidden outcome {j} out of range for k={data.k}")
        prob *= emission.entries[row, j]
        if prob == 0.0:
            return 0.0
    return prob


def latent_likelihood(data: ManifestDataset, theta) -> float | np.ndarray:
    """Likelihood of the observed sequence as a function of the chances.

    Computed through the per-index factorization prod_i sum_j lambda_{h_i j}
    theta_j, which equals the sum over all hidden assignments of
    P(observations | assignment) * P(assignment | theta).  Accepts a single
    point (returns float) or an (N, k) matrix of points (returns N values).
    """
    coords = theta.coords if isinstance(theta, SimplexPoint) else np.asarray(theta, dtype=float)
    single = coords.ndim == 1
    pts = coords[None, :] if single else coords
    if pts.shape[1] != data.k:
        raise ValueError(f"theta must have k={data.k} coordinates")
    acc = np.ones(pts.shape[0])
    for emission, row in data.observations:
        acc = acc * (pts @ emission.entries[row, :])
    return float(acc[0]) if single else acc


def frequency_weights(data: ManifestDataset) -> dict[FrequencyVector, float]:
    """Total observation probability per hidden frequency vector.

    W(a) = sum over ordered hidden assignments with frequencies a of
    P(observations | assignment).  Computed by a forward pass over the
    observations whose state is the running count vector, costing
    O(n * binomial(n+k-1, k-1) * k) instead of the k^n enumeration.
    Frequency vectors whose weight is exactly zero are omitted.
    """
    if data.n > DP_MAX_N or data.k > DP_MAX_K:
        raise SizeCapError(
            f"frequency-weight pass capped at n <= {DP_MAX_N}, k <= {DP_MAX_K}; "
            f"got n={data.n}, k={data.k}"
        )
    k = data.k
    states: dict[tuple[int, ...], float] = {(0,) * k: 1.0}
    for emission, row in data.observations:
        lam = emission.entries[row, :]
        nxt: dict[tuple[int, ...], float] = {}
        for counts, w in states.items():
            for j in range(k):
                contribution = w * lam[j]
                if contribution == 0.0:
                    continue
                key = counts[:j] + (counts[j] + 1,) + counts[j + 1 :]
                nxt[key] = nxt.get(key, 0.0) + contribution
        states = nxt
    return {FrequencyVector(counts): w for counts, w in states.items()}


def _log_weighted_marginals(
    weights: Mapping[FrequencyVector, float], prior: DirichletParams
) -> tuple[np.ndarray, np.ndarray]:
    """log(W(a) * P(a)) and the predictive numerators a_j, per frequency vector."""
    counts = np.array([fv.counts for fv in weights], dtype=float)
    scores = np.array(
        [math.log(w) + log_marginal_probability(prior, fv) for fv, w in weights.items()]
    )
    return counts, scores


def posterior_predictive_at_t(data: ManifestDataset, prior: DirichletParams, j: int) -> float:
    """Posterior probability that the next hidden outcome is x_j, at a fixed prior.

    A convex combination over frequency vectors: the weight of a is
    proportional to W(a) * P(a) and the combined value is the conjugate
    fraction (a_j + s t_j) / (n + s).  W already aggregates ordered
    assignments, so the ordered-dataset marginal P(a) needs no multiplicity
    factor.
    """
    if prior.k != data.k:
        raise ValueError(f"prior has k={prior.k}, dataset has k={data.k}")
    if not 0 <= j < data.k:
        raise ValueError(f"outcome index {j} out of range for k={data.k}")
    weights = frequency_weights(data)
    assert weights, "every observation row has zero probability under all hidden outcomes"
    counts, scores = _log_weighted_marginals(weights, prior)
    shifted = np.exp(scores - scores.max())
    fractions = (counts[:, j] + prior.s * prior.t[j]) / (data.n + prior.s)
    return float((shifted * fractions).sum() / shifted.sum())


def _predictive_values(
    counts: np.ndarray,
    log_w: np.ndarray,
    s: float,
    n: int,
    j: int,
    t_points: np.ndarray,
) -> np.ndarray:
    """Posterior predictive for outcome j at every row of a t-point matrix.

    The dataset-marginal term only needs the ascending-factorial part
    sum_h sum_{l<=a_h} log(s t_h + l - 1); the shared denominator cancels in
    the convex weights.  Work is chunked to bound the (points x datasets)
    intermediate.
    """
    n_points = t_points.shape[0]
    n_sets, k = counts.shape
    max_count = int(counts.max(initial=0))
    out = np.empty(n_points)
    chunk = max(1, _CHUNK_CELLS // max(1, n_sets * max(1, max_count)))
    icounts = counts.astype(int)
    for start in range(0, n_points, chunk):
        t_block = t_points[start : start + chunk]
        log_p = np.zeros((t_block.shape[0], n_sets))
        for h in range(k):
            if max_count == 0:
                break
            ladder = s * t_block[:, h, None] + np.arange(max_count)[None, :]
            prefix = np.concatenate(
                [np.zeros((t_block.shape[0], 1)), np.cumsum(np.log(ladder), axis=1)], axis=1
            )
            log_p += prefix[:, icounts[:, h]]
        scores = log_w[None, :] + log_p
        scores -= scores.max(axis=1, keepdims=True)
        w = np.exp(scores)
        fractions = (counts[None, :, j] + s * t_block[:, j, None]) / (n + s)
        out[start : start + t_block.shape[0]] = (w * fractions).sum(axis=1) / w.sum(axis=1)
    return out


def predictive_bounds(
    data: ManifestDataset, s: float, j: int, search: SearchSpec | None = None
) -> PredictiveBounds:
    """Lower/upper posterior predictive for the next hidden outcome over all t.

    Sweeps the clamped t-grid, refines locally around each incumbent, and
    evaluates the two boundary limits analytically: as t_j -> 1 the
    all-x_j frequency vector dominates, so the supremum is exactly 1
    whenever that vector has positive observation weight; as t_j -> 0 the
    combination collapses onto the a_j = 0 vectors, so the infimum is
    exactly 0 whenever one of those has positive weight.  Whichever of grid
    optimum and analytic limit is more extreme is reported, with boundary
    limits recorded as such.
    """
    if not s > 0.0:
        raise ValueError("s must be positive")
    if not 0 <= j < data.k:
        raise ValueError(f"outcome index {j} out of range for k={data.k}")
    search = search or SearchSpec()
    weights = frequency_weights(data)
    assert weights, "every observation row has zero probability under all hidden outcomes"
    counts = np.array([fv.counts for fv in weights], dtype=float)
    log_w = np.array([math.log(w) for w in weights.values()])
    n = data.n

    grid = SimplexGrid(
        k=data.k,
        resolution=search.resolution_for(data.k),
        boundary_policy=CLAMP_TO_EPSILON,
        eps_clamp=search.clamp,
    )
    values = _predictive_values(counts, log_w, s, n, j, grid.points)
    lo_idx, hi_idx = int(values.argmin()), int(values.argmax())
    lower, t_lower = float(values[lo_idx]), grid.points[lo_idx]
    upper, t_upper = float(values[hi_idx]), grid.points[hi_idx]

    for shrink in _REFINEMENT_SHRINKS[: search.refinement_passes]:
        for minimize in (True, False):
            center = t_lower if minimize else t_upper
            local = (1.0 - shrink) * center[None, :] + shrink * grid.points
            local_values = _predictive_values(counts, log_w, s, n, j, local)
            if minimize:
                i = int(local_values.argmin())
                if local_values[i] < lower:
                    lower, t_lower = float(local_values[i]), local[i]
            else:
                i = int(local_values.argmax())
                if local_values[i] > upper:
                    upper, t_upper = float(local_values[i]), local[i]

    argmin_t: SimplexPoint | BoundaryLimit = SimplexPoint(t_lower)
    argmax_t: SimplexPoint | BoundaryLimit = SimplexPoint(t_upper)
    if any(fv[j] == 0 for fv in weights):
        lower, argmin_t = 0.0, BoundaryLimit(j, 0.0)
    all_j = tuple(n if h == j else 0 for h in range(data.k))
    if FrequencyVector(all_j) in weights:
        upper, argmax_t = 1.0, BoundaryLimit(j, 1.0)
    return PredictiveBounds(lower=lower, upper=upper, argmin_t=argmin_t, argmax_t=argmax_t)


def vacuity_diagnosis(data: ManifestDataset) -> VacuityDiagnosis:
    """Combinatorial learnability check from the observed emission entries.

    For each hidden outcome j: the upper predictive moves strictly below 1
    iff some observed (emission, row h) has lambda_{hj} = 0, and the lower
    moves strictly above 0 iff some observed row certifies x_j, i.e. has
    lambda_{hj} != 0 while lambda_{hr} = 0 for every r != j.  If every
    entry of every observed matrix is nonzero, both flags are false for all
    outcomes and the posterior predictive stays vacuous.  Zero tests are
    exact comparisons on the user-supplied entries.

    The diagnosis is stated for the fixed-strength Dirichlet near-ignorance
    set; other near-ignorance sets are only covered by the generic
    positivity condition checked in the vacuity lab.
    """
    rows = [emission.entries[row, :] for emission, row in data.observations]
    per_outcome = []
    for j in range(data.k):
        upper_witnesses = tuple(i for i, lam in enumerate(rows) if lam[j] == 0.0)
        lower_witnesses = tuple(
            i
            for i, lam in enumerate(rows)
            if lam[j] != 0.0 and all(lam[r] == 0.0 for r in range(data.k) if r != j)
        )
        per_outcome.append(
            OutcomeDiagnosis(
                outcome=j,
                upper_strictly_below_one=bool(upper_witnesses),
                upper_witnesses=upper_witnesses,
                lower_strictly_above_zero=bool(lower_witnesses),
                lower_witnesses=lower_witnesses,
            )
        )
    return VacuityDiagnosis(per_outcome=tuple(per_outcome))
