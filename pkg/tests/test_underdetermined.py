import numpy as np
import pytest

from beliefscape import (
    NotInHullError,
    Prior,
    StateBeliefMatrix,
    generate_landscape,
    identify_underdetermined,
    min_norm_solution,
    null_space_basis,
    reconstruct_from_prior,
    restore_feasibility,
    sample_environment,
)
from beliefscape import fixtures
from beliefscape.linalg import NullSpaceBasis


class TestTwoSignalThreeState:
    def test_full_identification(self):
        land = fixtures.two_signal_three_state_landscape()
        result = identify_underdetermined(land)
        np.testing.assert_allclose(
            result.ridge_limit, fixtures.TWO_SIGNAL_THREE_STATE_RIDGE_LIMIT, atol=1e-12
        )
        assert result.null_basis.dimension == 1
        v = result.null_basis.vectors[0]
        d = fixtures.TWO_SIGNAL_THREE_STATE_NULL_DIRECTION
        assert abs(v @ d) / (np.linalg.norm(v) * np.linalg.norm(d)) >= 1 - 1e-10
        assert result.prior.kind == "unique"
        np.testing.assert_allclose(
            result.prior.unique_prior.entries, fixtures.TWO_SIGNAL_THREE_STATE_PRIOR, atol=1e-12
        )
        assert result.residual <= 1e-12

    def test_ridge_accuracy_matrix_and_its_fixed_point(self):
        land = fixtures.two_signal_three_state_landscape()
        result = identify_underdetermined(land)
        accuracy = land.B.entries.T @ result.ridge_limit.T
        np.testing.assert_allclose(
            accuracy, fixtures.TWO_SIGNAL_THREE_STATE_RIDGE_ACCURACY, atol=1e-12
        )
        np.testing.assert_allclose(
            accuracy @ fixtures.TWO_SIGNAL_THREE_STATE_PRIOR,
            fixtures.TWO_SIGNAL_THREE_STATE_PRIOR,
            atol=1e-12,
        )

    def test_restoration_reaches_the_generating_structure(self):
        land = fixtures.two_signal_three_state_landscape()
        result = identify_underdetermined(land)
        assert result.restored.kind == "family"
        np.testing.assert_allclose(
            result.restored.structure, fixtures.TWO_SIGNAL_THREE_STATE_STRUCTURE, atol=1e-9
        )
        restored = result.restored_structure
        assert restored is not None
        regenerated = generate_landscape(
            fixtures.two_signal_three_state_environment()
        )
        np.testing.assert_allclose(regenerated.B.entries, land.B.entries, atol=1e-12)
        np.testing.assert_allclose(regenerated.Q.entries, land.Q.entries, atol=1e-12)


class TestRestoreFeasibility:
    def test_already_stochastic_with_empty_basis(self):
        structure = fixtures.TWO_SIGNAL_THREE_STATE_STRUCTURE
        result = restore_feasibility(structure, NullSpaceBasis(vectors=(), dimension=0))
        assert result.kind == "unique"
        np.testing.assert_allclose(result.structure, structure, atol=1e-15)

    def test_nonstochastic_with_empty_basis_is_infeasible(self):
        bad = np.array([[1.5, -0.5], [0.5, 0.5]])
        result = restore_feasibility(bad, NullSpaceBasis(vectors=(), dimension=0))
        assert result.kind == "infeasible"

    def test_unfixable_entry_off_the_null_direction(self):
        ridge = np.array([[0.5, 0.5], [-1.0, 2.0]])
        basis = NullSpaceBasis(vectors=(np.array([1.0, 0.0]),), dimension=1)
        result = restore_feasibility(ridge, basis)
        assert result.kind == "infeasible"

    def test_partition_restoration_pins_a_unique_point(self):
        p2, p3 = 1 / 6, 1 / 3
        land = fixtures.coarse_partition_landscape([0.25, p2, p3, 0.25])
        result = identify_underdetermined(land)
        assert result.restored.kind == "unique"
        np.testing.assert_allclose(
            result.restored.structure, fixtures.COARSE_PARTITION_STRUCTURE, atol=1e-9
        )

    def test_single_signal_column_is_forced_to_ones(self):
        # With one signal every structure row has a single entry, so the row
        # sums pin the whole matrix.
        b = np.array([[0.2, 0.5, 0.3]])
        q = np.array([[1.0]])
        result = restore_feasibility(min_norm_solution(b, q), null_space_basis(b))
        assert result.kind == "unique"
        np.testing.assert_allclose(result.structure, np.ones((3, 1)), atol=1e-9)

    def test_two_free_directions_solved_by_feasibility_program(self):
        b = np.array([[0.4, 0.3, 0.2, 0.1], [0.1, 0.2, 0.3, 0.4]])
        planted = np.array([[0.5, 0.5], [0.2, 0.8], [0.7, 0.3], [0.4, 0.6]])
        q = b @ planted
        ridge = min_norm_solution(b, q)
        basis = null_space_basis(b)
        assert basis.dimension == 2
        result = restore_feasibility(ridge, basis)
        assert result.kind == "family"
        x = result.structure
        np.testing.assert_allclose(b @ x, q, atol=1e-9)
        assert x.min() >= -1e-9
        np.testing.assert_allclose(x.sum(axis=1), 1.0, atol=1e-9)


class TestPartitionFixture:
    def test_identity_regularizer_limit_mixes_the_middle_block(self):
        p2, p3 = 1 / 6, 1 / 3
        land = fixtures.coarse_partition_landscape([0.25, p2, p3, 0.25])
        result = identify_underdetermined(land)
        denominator = p2**2 + p3**2
        expected = np.array(
            [
                [1.0, 0.0, 0.0],
                [0.0, p2 * (p2 + p3) / denominator, 0.0],
                [0.0, p3 * (p2 + p3) / denominator, 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        np.testing.assert_allclose(result.ridge_limit, expected, atol=1e-12)
        assert np.max(np.abs(result.ridge_limit - fixtures.COARSE_PARTITION_STRUCTURE)) > 0.1
        assert result.residual <= 1e-12  # an exact solution all the same

    def test_prior_family_has_three_classes(self):
        p2, p3 = 1 / 6, 1 / 3
        land = fixtures.coarse_partition_landscape([0.25, p2, p3, 0.25])
        result = identify_underdetermined(land)
        assert result.prior.kind == "family"
        assert [cp.states for cp in result.prior.class_priors] == [(0,), (1, 2), (3,)]
        np.testing.assert_allclose(
            result.prior.class_priors[1].weights,
            [p2 / (p2 + p3), p3 / (p2 + p3)],
            atol=1e-12,
        )


class TestRandomRoundTrips:
    def test_prior_survives_the_wrong_structure(self):
        rng = np.random.default_rng(1234)
        for _ in range(60):
            n_states = int(rng.integers(3, 7))
            env = sample_environment(rng, n_states, n_states - 1)
            land = generate_landscape(env)
            result = identify_underdetermined(land)
            assert result.residual <= 1e-8
            assert result.prior.kind == "unique"
            np.testing.assert_allclose(
                result.prior.unique_prior.entries, env.prior.entries, atol=1e-8
            )
            # the true structure differs from the limit only inside null(B)
            v = result.null_basis.as_matrix(n_states)
            gap = env.structure.entries - result.ridge_limit
            np.testing.assert_allclose(gap - v @ (v.T @ gap), 0.0, atol=1e-8)

    def test_any_two_exact_solutions_differ_inside_the_null_space(self):
        rng = np.random.default_rng(4321)
        for _ in range(20):
            env = sample_environment(rng, 4, 3)
            land = generate_landscape(env)
            b = land.B.entries
            basis = null_space_basis(b).as_matrix(4)
            x = min_norm_solution(b, land.Q.entries)
            shift = basis @ rng.standard_normal((basis.shape[1], 3))
            other = x + shift  # still solves exactly
            np.testing.assert_allclose(b @ other, land.Q.entries, atol=1e-10)
            diff = other - x
            np.testing.assert_allclose(diff - basis @ (basis.T @ diff), 0.0, atol=1e-10)


class TestReconstructFromPrior:
    def test_two_signal_three_state(self):
        structure = reconstruct_from_prior(
            StateBeliefMatrix(fixtures.TWO_SIGNAL_THREE_STATE_B),
            Prior(fixtures.TWO_SIGNAL_THREE_STATE_PRIOR),
        )
        np.testing.assert_allclose(
            structure.entries, fixtures.TWO_SIGNAL_THREE_STATE_STRUCTURE, atol=1e-10
        )

    def test_identity_beliefs(self):
        structure = reconstruct_from_prior(
            StateBeliefMatrix(np.eye(3)), Prior([0.2, 0.3, 0.5])
        )
        np.testing.assert_allclose(structure.entries, np.eye(3), atol=1e-12)

    def test_symmetric_binary_with_even_prior(self):
        structure = reconstruct_from_prior(
            StateBeliefMatrix(fixtures.SYMMETRIC_BINARY_BELIEFS), Prior([0.5, 0.5])
        )
        np.testing.assert_allclose(
            structure.entries, fixtures.SYMMETRIC_BINARY_BELIEFS, atol=1e-12
        )
        # and it regenerates the a = b = 5/8 hypotheticals
        q = fixtures.SYMMETRIC_BINARY_BELIEFS @ structure.entries
        np.testing.assert_allclose(q, [[5 / 8, 3 / 8], [3 / 8, 5 / 8]], atol=1e-12)

    def test_prior_outside_the_belief_hull(self):
        beliefs = StateBeliefMatrix([[0.25, 0.75], [0.3, 0.7]])
        with pytest.raises(NotInHullError):
            reconstruct_from_prior(beliefs, Prior([0.9, 0.1]))

    def test_boundary_prior_rejected(self):
        with pytest.raises(NotInHullError, match="positive mass"):
            reconstruct_from_prior(StateBeliefMatrix(np.eye(2)), Prior([1.0, 0.0]))
