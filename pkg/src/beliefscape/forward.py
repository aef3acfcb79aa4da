"""Forward map: from an informational environment to the belief landscape it generates.

This is the ground-truth oracle every inverse procedure is tested against.
"""

from __future__ import annotations

import warnings

import numpy as np

from .core import (
    DEFAULT_TOLERANCES,
    BeliefLandscape,
    DegenerateEnvironmentError,
    DroppedSignalWarning,
    HypotheticalBeliefMatrix,
    InformationStructure,
    InformationalEnvironment,
    Prior,
    SignalMarginal,
    StateBeliefMatrix,
    StructuralError,
    Tolerances,
)


def signal_marginal(env: InformationalEnvironment) -> SignalMarginal:
    """Ex-ante probability of each signal: prior-weighted column sums of the structure."""
    marginal = env.structure.entries.T @ env.prior.entries
    return SignalMarginal(marginal, signal_labels=env.signal_labels)


def _surviving_signals(env: InformationalEnvironment, tol: Tolerances) -> np.ndarray:
    marginal = env.structure.entries.T @ env.prior.entries
    keep = marginal > tol.tol_entry
    if not keep.any():
        raise DegenerateEnvironmentError("every signal has zero marginal probability")
    dropped = [label for label, kept in zip(env.signal_labels, keep) if not kept]
    if dropped:
        warnings.warn(
            f"dropped zero-marginal signals: {', '.join(dropped)}", DroppedSignalWarning
        )
    return keep


def posterior_matrix(
    env: InformationalEnvironment, tol: Tolerances = DEFAULT_TOLERANCES
) -> StateBeliefMatrix:
    """Posterior over states after each signal, one row per surviving signal.

    Signals with zero marginal probability would give 0/0 rows; they are
    dropped with a warning, shrinking the signal set.
    """
    keep = _surviving_signals(env, tol)
    joint = env.prior.entries[:, None] * env.structure.entries  # states x signals
    marginal = joint.sum(axis=0)
    beliefs = joint[:, keep].T / marginal[keep][:, None]
    labels = tuple(l for l, k in zip(env.signal_labels, keep) if k)
    return StateBeliefMatrix(beliefs, state_labels=env.state_labels, signal_labels=labels)


def hypothetical_matrix(
    structure: InformationStructure, beliefs: StateBeliefMatrix
) -> HypotheticalBeliefMatrix:
    """Each type's predicted distribution of peer types: the product beliefs @ structure."""
    if beliefs.n_states != structure.n_states:
        raise StructuralError(
            f"state axis: beliefs have {beliefs.n_states} states,"
            f" structure has {structure.n_states}"
        )
    if beliefs.state_labels != structure.state_labels:
        raise StructuralError("state axis: beliefs and structure carry different state labels")
    if beliefs.signal_labels != structure.signal_labels:
        raise StructuralError("signal axis: beliefs and structure carry different signal labels")
    return HypotheticalBeliefMatrix(
        beliefs.entries @ structure.entries, signal_labels=beliefs.signal_labels
    )


def generate_landscape(
    env: InformationalEnvironment, tol: Tolerances = DEFAULT_TOLERANCES
) -> BeliefLandscape:
    """Generate the belief landscape of an environment (posteriors, then peer predictions).

    Zero-marginal signals are dropped from both matrices; their hypothetical
    columns are identically zero anyway.
    """
    keep = _surviving_signals(env, tol)
    joint = env.prior.entries[:, None] * env.structure.entries
    marginal = joint.sum(axis=0)
    beliefs = joint[:, keep].T / marginal[keep][:, None]
    labels = tuple(l for l, k in zip(env.signal_labels, keep) if k)
    hypotheticals = beliefs @ env.structure.entries[:, keep]
    return BeliefLandscape(
        StateBeliefMatrix(beliefs, state_labels=env.state_labels, signal_labels=labels),
        HypotheticalBeliefMatrix(hypotheticals, signal_labels=labels),
    )


def _interior_simplex_point(rng: np.random.Generator, n: int, min_mass: float) -> np.ndarray:
    # Uniform on the simplex slice {x : x_i >= min_mass}: shift and shrink.
    if n * min_mass >= 1.0:
        raise ValueError(f"cannot put mass {min_mass} on each of {n} cells")
    return min_mass + (1.0 - n * min_mass) * rng.dirichlet(np.ones(n))


def sample_environment(
    rng: np.random.Generator,
    n_states: int,
    n_signals: int,
    min_mass: float = 0.02,
) -> InformationalEnvironment:
    """Random interior environment for round-trip tests.

    The prior and every structure row are drawn uniformly from the simplex
    truncated to entries >= min_mass, keeping samples away from the
    reducible and rank-deficient boundaries.
    """
    prior = _interior_simplex_point(rng, n_states, min_mass)
    rows = np.array([_interior_simplex_point(rng, n_signals, min_mass) for _ in range(n_states)])
    return InformationalEnvironment(InformationStructure(rows), Prior(prior))
