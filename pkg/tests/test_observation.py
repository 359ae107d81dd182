import numpy as np
import pytest

from latentidm import (
    BinaryChannel,
    BoundaryLimit,
    DirichletParams,
    EmissionMatrix,
    FrequencyVector,
    ManifestDataset,
    SearchSpec,
    SimplexGrid,
    SimplexPoint,
    SizeCapError,
    dirichlet_log_density,
    frequency_weights,
    latent_likelihood,
    manifest_given_latent,
    posterior_predictive_at_t,
    predictive_bounds,
    standard_idm_predictive_bounds,
    vacuity_diagnosis,
)
from oracles import brute_frequency_weights, random_interior_params

CHANNEL = BinaryChannel(0.1, 0.1)
IDENTITY2 = EmissionMatrix.identity(2)


def random_emission(rng, rows, k, all_positive=True):
    raw = rng.uniform(0.05 if all_positive else 0.0, 1.0, size=(rows, k))
    if not all_positive:
        raw[rng.integers(0, rows), rng.integers(0, k)] = 0.0
    return EmissionMatrix(raw / raw.sum(axis=0, keepdims=True))


def random_dataset(rng, k, n, all_positive=True):
    obs = []
    for _ in range(n):
        emission = random_emission(rng, int(rng.integers(2, 4)), k, all_positive)
        obs.append((emission, int(rng.integers(0, emission.manifest_count))))
    return ManifestDataset(tuple(obs), k=k)


class TestEmissionMatrix:
    def test_channel_matrix_layout(self):
        em = CHANNEL.emission()
        assert em.entries[0, 0] == 0.9  # observe row 0 given outcome 0
        assert em.entries[0, 1] == 0.1
        assert em.manifest_count == 2 and em.k == 2

    def test_rejects_bad_column_sum(self):
        with pytest.raises(ValueError, match="column 1"):
            EmissionMatrix([[0.9, 0.3], [0.1, 0.6]])

    def test_rejects_out_of_range_entries(self):
        with pytest.raises(ValueError):
            EmissionMatrix([[1.2, 0.5], [-0.2, 0.5]])

    def test_rectangular_allowed(self):
        em = EmissionMatrix([[0.5, 0.2], [0.3, 0.3], [0.2, 0.5]])
        assert em.manifest_count == 3

    def test_all_entries_positive(self):
        assert CHANNEL.emission().all_entries_positive()
        assert not IDENTITY2.all_entries_positive()


class TestManifestDataset:
    def test_from_rows(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0, 1, 0])
        assert data.n == 3 and data.k == 2

    def test_rejects_bad_row(self):
        with pytest.raises(ValueError):
            ManifestDataset.from_rows(IDENTITY2, [0, 2])

    def test_rejects_k_mismatch(self):
        em3 = EmissionMatrix.identity(3)
        with pytest.raises(ValueError):
            ManifestDataset(((IDENTITY2, 0), (em3, 0)), k=2)

    def test_empty_dataset(self):
        data = ManifestDataset((), k=2)
        assert data.n == 0


class TestManifestGivenLatent:
    def test_identity_exact_match(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0, 1, 0])
        assert manifest_given_latent(data, [0, 1, 0]) == 1.0

    def test_identity_mismatch_is_zero(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0, 1])
        assert manifest_given_latent(data, [0, 0]) == 0.0

    def test_channel_two_observations(self):
        # observations (+, -) with both hidden outcomes = 0: 0.9 * 0.1
        data = ManifestDataset.from_rows(CHANNEL.emission(), [0, 1])
        assert manifest_given_latent(data, [0, 0]) == pytest.approx(0.09, abs=1e-15)

    def test_length_check(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0])
        with pytest.raises(ValueError):
            manifest_given_latent(data, [0, 1])


class TestLatentLikelihood:
    def test_channel_single_positive(self):
        data = ManifestDataset.from_rows(CHANNEL.emission(), [0])
        # 0.9 * theta + 0.1 * (1 - theta) at theta = 0.5
        assert latent_likelihood(data, SimplexPoint([0.5, 0.5])) == pytest.approx(0.5)

    def test_identity_reduces_to_multinomial(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0, 0, 1])
        theta = SimplexPoint([0.3, 0.7])
        assert latent_likelihood(data, theta) == pytest.approx(0.3**2 * 0.7, abs=1e-15)

    def test_all_positive_emissions_give_positive_likelihood(self):
        data = ManifestDataset.from_rows(CHANNEL.emission(), [0, 1, 0, 0])
        grid = np.linspace(0.0, 1.0, 50)
        values = latent_likelihood(data, np.column_stack([grid, 1.0 - grid]))
        assert np.all(values > 0.0)

    def test_matrix_input_matches_scalar(self):
        data = ManifestDataset.from_rows(CHANNEL.emission(), [0, 1])
        pts = np.array([[0.2, 0.8], [0.6, 0.4]])
        values = latent_likelihood(data, pts)
        for row, expected in zip(pts, values):
            assert latent_likelihood(data, row) == pytest.approx(expected, abs=1e-15)

    def test_equals_assignment_sum(self):
        # factorized form against the explicit sum over hidden assignments
        rng = np.random.default_rng(3)
        for k in (2, 3):
            for _ in range(10):
                data = random_dataset(rng, k, int(rng.integers(1, 6)))
                theta = rng.dirichlet(np.ones(k))
                direct = latent_likelihood(data, theta)
                import itertools

                total = sum(
                    manifest_given_latent(data, x) * np.prod(theta ** np.bincount(x, minlength=k))
                    for x in itertools.product(range(k), repeat=data.n)
                )
                assert direct == pytest.approx(total, rel=1e-12)


class TestFrequencyWeights:
    def test_identity_concentrates(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0, 0, 1])
        weights = frequency_weights(data)
        assert weights == {FrequencyVector((2, 1)): 1.0}

    def test_channel_two_positives(self):
        data = ManifestDataset.from_rows(CHANNEL.emission(), [0, 0])
        weights = frequency_weights(data)
        assert weights[FrequencyVector((2, 0))] == pytest.approx(0.81, abs=1e-15)
        assert weights[FrequencyVector((1, 1))] == pytest.approx(0.18, abs=1e-15)
        assert weights[FrequencyVector((0, 2))] == pytest.approx(0.01, abs=1e-15)

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            data = random_dataset(rng, 2, int(rng.integers(1, 9)))
            dp = {fv.counts: w for fv, w in frequency_weights(data).items()}
            brute = brute_frequency_weights(data)
            assert set(dp) == set(brute)
            for key, w in brute.items():
                assert dp[key] == pytest.approx(w, rel=1e-12)

    def test_weights_sum_to_assignment_total(self):
        # factorized likelihood equals sum_a W(a) * prod theta^a
        rng = np.random.default_rng(19)
        for trial in range(20):
            k = 2 if trial % 2 == 0 else 3
            data = random_dataset(rng, k, int(rng.integers(1, 7)))
            theta = rng.dirichlet(np.ones(k))
            weights = frequency_weights(data)
            via_weights = sum(
                w * np.prod(theta ** np.asarray(fv.counts)) for fv, w in weights.items()
            )
            assert via_weights == pytest.approx(latent_likelihood(data, theta), rel=1e-12)

    def test_size_cap(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0] * 21)
        with pytest.raises(SizeCapError):
            frequency_weights(data)

    def test_empty_dataset(self):
        weights = frequency_weights(ManifestDataset((), k=2))
        assert weights == {FrequencyVector((0, 0)): 1.0}


class TestPosteriorPredictiveAtT:
    def test_identity_single_term(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0, 0, 1])
        prior = DirichletParams(2.0, SimplexPoint([0.5, 0.5]))
        assert posterior_predictive_at_t(data, prior, 0) == pytest.approx(0.6, abs=1e-14)

    def test_empty_data_gives_prior_mean(self):
        data = ManifestDataset((), k=2)
        prior = DirichletParams(3.0, SimplexPoint([0.3, 0.7]))
        assert posterior_predictive_at_t(data, prior, 0) == pytest.approx(0.3, abs=1e-14)
        assert posterior_predictive_at_t(data, prior, 1) == pytest.approx(0.7, abs=1e-14)

    def test_channel_matches_integration_oracle(self):
        data = ManifestDataset.from_rows(CHANNEL.emission(), [0, 0])
        prior = DirichletParams(2.0, SimplexPoint([0.5, 0.5]))
        grid = SimplexGrid(k=2, resolution=2000)
        dens = np.exp(np.array([dirichlet_log_density(prior, p) for p in grid.points]))
        like = latent_likelihood(data, grid.points)
        oracle = float((grid.points[:, 0] * like * dens).sum() / (like * dens).sum())
        assert posterior_predictive_at_t(data, prior, 0) == pytest.approx(oracle, abs=1e-3)

    def test_coherence_across_outcomes(self):
        rng = np.random.default_rng(31)
        for k in (2, 3):
            for _ in range(10):
                data = random_dataset(rng, k, int(rng.integers(0, 6)))
                prior = random_interior_params(rng, k, nonneg_exponents=False)
                total = sum(posterior_predictive_at_t(data, prior, j) for j in range(k))
                assert total == pytest.approx(1.0, abs=1e-12)


class TestPredictiveBounds:
    def test_all_positive_emissions_fully_vacuous(self):
        for rows in ([0], [0, 1], [0, 0, 1], [1, 1, 0, 0, 1], [0] * 6):
            data = ManifestDataset.from_rows(CHANNEL.emission(), rows)
            b = predictive_bounds(data, 2.0, 0)
            assert b.lower <= 1e-3 and b.upper >= 1.0 - 1e-3
            assert b.argmin_t == BoundaryLimit(0, 0.0)
            assert b.argmax_t == BoundaryLimit(0, 1.0)

    def test_vacuity_persists_for_tiny_imperfection(self):
        for eps in (0.2, 0.05, 0.01, 0.001):
            channel = BinaryChannel(eps, eps)
            data = ManifestDataset.from_rows(channel.emission(), [0, 0, 1])
            b = predictive_bounds(data, 2.0, 0)
            assert b.lower <= 1e-3 and b.upper >= 1.0 - 1e-3

    def test_identity_reduces_to_standard_bounds(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0, 0, 1])
        b = predictive_bounds(data, 2.0, 0)
        std = standard_idm_predictive_bounds(2.0, FrequencyVector((2, 1)), 0)
        assert b.lower == pytest.approx(std.lower, abs=2e-3)
        assert b.upper == pytest.approx(std.upper, abs=2e-3)

    def test_one_outcome_identity_dataset(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0, 0, 0])
        b = predictive_bounds(data, 2.0, 0)
        assert b.lower == pytest.approx(0.6, abs=2e-3)
        assert b.upper == 1.0
        assert b.argmax_t == BoundaryLimit(0, 1.0)

    def test_partial_zero_upper_margin(self):
        # one emission zero in column 0, that row observed: the convex
        # combination argument caps the upper bound at (n-1+s)/(n+s)
        emission = EmissionMatrix([[0.0, 0.4], [1.0, 0.6]])
        data = ManifestDataset(
            ((emission, 0), (CHANNEL.emission(), 0), (CHANNEL.emission(), 1)), k=2
        )
        s = 2.0
        b = predictive_bounds(data, s, 0)
        n = data.n
        assert b.upper < 1.0 - 1e-6
        assert b.upper <= (n - 1 + s) / (n + s) + 1e-12

    def test_statement3_floor(self):
        # an observation certifying outcome 0 keeps the lower bound >= 1/(n+s)
        certifying = EmissionMatrix([[1.0, 0.0], [0.0, 1.0]])
        data = ManifestDataset(
            ((certifying, 0), (CHANNEL.emission(), 1)), k=2
        )
        s = 2.0
        b = predictive_bounds(data, s, 0)
        assert b.lower >= 1.0 / (data.n + s) - 1e-6
        assert b.lower > 1e-6

    def test_search_spec_respected(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0, 1])
        b = predictive_bounds(data, 2.0, 0, SearchSpec(resolution=50, refinement_passes=2))
        std = standard_idm_predictive_bounds(2.0, FrequencyVector((1, 1)), 0)
        assert b.lower == pytest.approx(std.lower, abs=5e-3)
        assert b.upper == pytest.approx(std.upper, abs=5e-3)

    def test_size_cap_propagates(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0] * 21)
        with pytest.raises(SizeCapError):
            predictive_bounds(data, 2.0, 0)


class TestVacuityDiagnosis:
    def test_channel_fully_vacuous(self):
        data = ManifestDataset.from_rows(CHANNEL.emission(), [0, 1, 0])
        diagnosis = vacuity_diagnosis(data)
        assert diagnosis.fully_vacuous
        for d in diagnosis.per_outcome:
            assert not d.upper_witnesses and not d.lower_witnesses

    def test_identity_observation_flags(self):
        data = ManifestDataset.from_rows(IDENTITY2, [0])
        diagnosis = vacuity_diagnosis(data)
        assert diagnosis[0].lower_strictly_above_zero
        assert diagnosis[0].lower_witnesses == (0,)
        assert not diagnosis[0].upper_strictly_below_one
        assert diagnosis[1].upper_strictly_below_one
        assert diagnosis[1].upper_witnesses == (0,)
        assert not diagnosis[1].lower_strictly_above_zero

    def test_shared_row_mass_unsets_lower_flag(self):
        # column 0 puts all its mass on row 0, but row 0 also serves column 1:
        # observing row 0 cannot certify outcome 0, and excludes nothing
        emission = EmissionMatrix([[1.0, 0.5], [0.0, 0.5]])
        data = ManifestDataset.from_rows(emission, [0])
        diagnosis = vacuity_diagnosis(data)
        assert not diagnosis[0].lower_strictly_above_zero
        assert not diagnosis[0].upper_strictly_below_one
        assert not diagnosis[1].upper_strictly_below_one
        assert not diagnosis[1].lower_strictly_above_zero
        # the unobserved row 1 would have excluded outcome 0
        other = ManifestDataset.from_rows(emission, [1])
        assert vacuity_diagnosis(other)[0].upper_strictly_below_one

    def test_flags_agree_with_grid_bounds(self):
        # threshold 1e-6 agreement between the combinatorial flags and the
        # numeric bounds, k=2, n <= 6
        rng = np.random.default_rng(41)
        for trial in range(12):
            data = random_dataset(rng, 2, int(rng.integers(1, 7)), all_positive=(trial % 2 == 0))
            diagnosis = vacuity_diagnosis(data)
            for j in range(2):
                b = predictive_bounds(data, 2.0, j)
                assert (b.upper < 1.0 - 1e-6) == diagnosis[j].upper_strictly_below_one
                assert (b.lower > 1e-6) == diagnosis[j].lower_strictly_above_zero
