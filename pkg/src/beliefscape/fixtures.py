"""Small worked examples shipped with the library.

These are exact desk-scale instances used across the test suite and the CLI
self-test. Where an example has a known closed-form answer (target structure,
prior, accuracy matrices), the companion constants live here too, written as
exact fractions.
"""

from __future__ import annotations

import numpy as np

from .core import (
    BeliefLandscape,
    HypotheticalBeliefMatrix,
    InformationStructure,
    InformationalEnvironment,
    Prior,
    StateBeliefMatrix,
)

# --------------------------------------------------------------------------
# Truth-or-noise: three states; with probability epsilon a null signal is
# drawn, otherwise the state is revealed.
# --------------------------------------------------------------------------

TRUTH_OR_NOISE_SIGNALS = ("null", "reveal-th1", "reveal-th2", "reveal-th3")


def truth_or_noise_environment(epsilon: float, prior=None) -> InformationalEnvironment:
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    p = np.full(3, 1.0 / 3.0) if prior is None else np.asarray(prior, dtype=float)
    e = epsilon
    structure = np.array(
        [
            [e, 1 - e, 0.0, 0.0],
            [e, 0.0, 1 - e, 0.0],
            [e, 0.0, 0.0, 1 - e],
        ]
    )
    return InformationalEnvironment(
        InformationStructure(structure, signal_labels=TRUTH_OR_NOISE_SIGNALS),
        Prior(p),
    )


def truth_or_noise_landscape(epsilon: float, prior=None) -> BeliefLandscape:
    """The landscape written out in closed form (not via the forward map)."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    p = np.full(3, 1.0 / 3.0) if prior is None else np.asarray(prior, dtype=float)
    e = epsilon
    beliefs = np.array(
        [
            [p[0], p[1], p[2]],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    hypotheticals = np.array(
        [
            [e, (1 - e) * p[0], (1 - e) * p[1], (1 - e) * p[2]],
            [e, 1 - e, 0.0, 0.0],
            [e, 0.0, 1 - e, 0.0],
            [e, 0.0, 0.0, 1 - e],
        ]
    )
    return BeliefLandscape(
        StateBeliefMatrix(beliefs, signal_labels=TRUTH_OR_NOISE_SIGNALS),
        HypotheticalBeliefMatrix(hypotheticals, signal_labels=TRUTH_OR_NOISE_SIGNALS),
    )


def truth_or_noise_rogue_hypotheticals() -> BeliefLandscape:
    """Plausible hypotheticals that no common-prior environment can generate.

    Pairs the epsilon = 1/2, uniform-prior belief matrix with a row-stochastic
    Q whose regression output contains negative entries (-1/48).
    """
    beliefs = truth_or_noise_landscape(0.5).B
    hypotheticals = np.array(
        [
            [1 / 2, 1 / 6, 1 / 6, 1 / 6],
            [1 / 2, 1 / 2, 0.0, 0.0],
            [1 / 2, 0.0, 1 / 2, 0.0],
            [1 / 4, 1 / 4, 1 / 4, 1 / 4],
        ]
    )
    return BeliefLandscape(
        beliefs, HypotheticalBeliefMatrix(hypotheticals, signal_labels=TRUTH_OR_NOISE_SIGNALS)
    )


# --------------------------------------------------------------------------
# Symmetric binary example: two states, two signals, hypotheticals free in
# (a, b). Only a one-parameter slice of (a, b) is attainable.
# --------------------------------------------------------------------------

SYMMETRIC_BINARY_BELIEFS = np.array([[1 / 4, 3 / 4], [3 / 4, 1 / 4]])


def symmetric_binary_landscape(a: float, b: float) -> BeliefLandscape:
    hypotheticals = np.array([[a, 1 - a], [1 - b, b]])
    return BeliefLandscape(
        StateBeliefMatrix(SYMMETRIC_BINARY_BELIEFS),
        HypotheticalBeliefMatrix(hypotheticals),
    )


# --------------------------------------------------------------------------
# Two signals, three states: the underdetermined worked example. The ridge
# limit solves Q = B X but is not itself an information structure; shifting
# its columns along the null direction restores the generating structure.
# --------------------------------------------------------------------------

TWO_SIGNAL_THREE_STATE_B = np.array([[2 / 3, 1 / 3, 0.0], [4 / 9, 1 / 9, 4 / 9]])
TWO_SIGNAL_THREE_STATE_Q = np.array([[7 / 18, 11 / 18], [11 / 54, 43 / 54]])

TWO_SIGNAL_THREE_STATE_RIDGE_LIMIT = np.array(
    [
        [29 / 63, 52 / 63],
        [31 / 126, 23 / 126],
        [-4 / 63, 58 / 63],
    ]
)
TWO_SIGNAL_THREE_STATE_NULL_DIRECTION = np.array([-2.0, 4.0, 1.0])
TWO_SIGNAL_THREE_STATE_STRUCTURE = np.array([[1 / 3, 2 / 3], [1 / 2, 1 / 2], [0.0, 1.0]])
TWO_SIGNAL_THREE_STATE_PRIOR = np.array([1 / 2, 1 / 6, 1 / 3])
TWO_SIGNAL_THREE_STATE_ACCURACY = np.array(
    [
        [14 / 27, 5 / 9, 4 / 9],
        [5 / 27, 2 / 9, 1 / 9],
        [8 / 27, 2 / 9, 4 / 9],
    ]
)
TWO_SIGNAL_THREE_STATE_RIDGE_ACCURACY = (
    np.array(
        [
            [382.0, 139.0, 208.0],
            [139.0, 58.0, 46.0],
            [208.0, 46.0, 232.0],
        ]
    )
    / 567.0
)


def two_signal_three_state_landscape() -> BeliefLandscape:
    return BeliefLandscape(
        StateBeliefMatrix(TWO_SIGNAL_THREE_STATE_B),
        HypotheticalBeliefMatrix(TWO_SIGNAL_THREE_STATE_Q),
    )


def two_signal_three_state_environment() -> InformationalEnvironment:
    return InformationalEnvironment(
        InformationStructure(TWO_SIGNAL_THREE_STATE_STRUCTURE),
        Prior(TWO_SIGNAL_THREE_STATE_PRIOR),
    )


# --------------------------------------------------------------------------
# Split state: four states whose third belief column is half the first plus
# half the second, so the belief matrix has rank three. Removing the
# dependent state and rescaling the kept columns gives a full-rank instance.
# --------------------------------------------------------------------------

SPLIT_STATE_B = np.array(
    [
        [2 / 3, 0.0, 1 / 3, 0.0],
        [1 / 3, 1 / 3, 1 / 3, 0.0],
        [0.0, 2 / 5, 1 / 5, 2 / 5],
        [0.0, 0.0, 0.0, 1.0],
    ]
)
SPLIT_STATE_Q = np.array(
    [
        [1 / 2, 1 / 2, 0.0, 0.0],
        [1 / 4, 1 / 2, 1 / 4, 0.0],
        [0.0, 3 / 10, 1 / 2, 1 / 5],
        [0.0, 0.0, 1 / 2, 1 / 2],
    ]
)

SPLIT_STATE_REDUCED_B = np.array(
    [
        [1.0, 0.0, 0.0],
        [1 / 2, 1 / 2, 0.0],
        [0.0, 3 / 5, 2 / 5],
        [0.0, 0.0, 1.0],
    ]
)
SPLIT_STATE_REDUCED_STRUCTURE = np.array(
    [
        [1 / 2, 1 / 2, 0.0, 0.0],
        [0.0, 1 / 2, 1 / 2, 0.0],
        [0.0, 0.0, 1 / 2, 1 / 2],
    ]
)
SPLIT_STATE_REDUCED_PRIOR = np.array([3 / 8, 3 / 8, 1 / 4])
SPLIT_STATE_EMBEDDED_STRUCTURE = np.array(
    [
        [1 / 2, 1 / 2, 0.0, 0.0],
        [0.0, 1 / 2, 1 / 2, 0.0],
        [1 / 4, 1 / 2, 1 / 4, 0.0],
        [0.0, 0.0, 1 / 2, 1 / 2],
    ]
)
SPLIT_STATE_EMBEDDED_PRIOR = np.full(4, 1 / 4)
SPLIT_STATE_MARGINAL = np.array([3 / 16, 3 / 8, 5 / 16, 1 / 8])


def split_state_landscape() -> BeliefLandscape:
    return BeliefLandscape(
        StateBeliefMatrix(SPLIT_STATE_B), HypotheticalBeliefMatrix(SPLIT_STATE_Q)
    )


def split_state_embedded_environment() -> InformationalEnvironment:
    return InformationalEnvironment(
        InformationStructure(SPLIT_STATE_EMBEDDED_STRUCTURE),
        Prior(SPLIT_STATE_EMBEDDED_PRIOR),
    )


# --------------------------------------------------------------------------
# Coarse partition: four states, and the signal reveals which cell of
# {{th1}, {th2, th3}, {th4}} the state falls in. Q is the identity and the
# prior is identified only within cells.
# --------------------------------------------------------------------------

COARSE_PARTITION_CELLS = ((0,), (1, 2), (3,))
COARSE_PARTITION_STRUCTURE = np.array(
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ]
)


def coarse_partition_environment(prior) -> InformationalEnvironment:
    p = np.asarray(prior, dtype=float)
    if p.size != 4:
        raise ValueError("the partition example has four states")
    return InformationalEnvironment(InformationStructure(COARSE_PARTITION_STRUCTURE), Prior(p))


def coarse_partition_landscape(prior) -> BeliefLandscape:
    p = np.asarray(prior, dtype=float)
    if p.size != 4:
        raise ValueError("the partition example has four states")
    middle = p[1] + p[2]
    beliefs = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, p[1] / middle, p[2] / middle, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    return BeliefLandscape(
        StateBeliefMatrix(beliefs), HypotheticalBeliefMatrix(np.eye(3))
    )
