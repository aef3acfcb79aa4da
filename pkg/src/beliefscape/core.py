"""Domain types: belief matrices, information structures, priors, and their validation.

Orientation conventions are fixed here once and inherited by every other
module:

* state belief matrix ``B``: rows are belief types (signals), columns are states;
* information structure: rows are states, columns are signals;
* hypothetical belief matrix ``Q``: square, rows are the conditioning belief type.

All values are immutable after construction and every operation is a pure
function, so concurrent use needs no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class BeliefscapeError(Exception):
    """Base class for all library errors."""


class StructuralError(BeliefscapeError):
    """Dimension or label mismatch; the input cannot be interpreted at all."""


class RankDeficientError(BeliefscapeError):
    """The belief matrix has linearly dependent columns.

    Use the dependency-reduction path, or the ridge path if there are more
    states than signals.
    """


class UnderdeterminedError(BeliefscapeError):
    """More states than signals; the plain regression path does not apply."""


class NotModelGeneratedError(BeliefscapeError):
    """No eigenvalue-1 eigenvector exists; the data cannot come from the model."""


class NotInHullError(BeliefscapeError):
    """The prior is not a convex combination of the observed belief rows."""


class NotConvexDependentError(BeliefscapeError):
    """A dependent belief column is not a convex combination of the kept ones."""


class StructureSupportError(BeliefscapeError):
    """The structure puts no probability where beliefs are positive.

    Raised by the per-type prior construction when it would divide by a
    (near-)zero or negative structure entry.
    """


class InconsistentLandscapeError(BeliefscapeError):
    """The landscape violates an identity it would have to satisfy."""


class DegenerateEnvironmentError(BeliefscapeError):
    """Every signal has zero marginal probability; no beliefs can form."""


class DroppedSignalWarning(UserWarning):
    """A signal with zero marginal probability was removed from the landscape."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical slack used throughout; the model itself is exact.

    ``tol_rank`` is relative: the cutoff on singular values is
    ``tol_rank * largest_singular_value``.
    """

    tol_stochastic: float = 1e-9
    tol_entry: float = 1e-9
    tol_rank: float = 1e-10
    tol_match: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("tol_stochastic", "tol_entry", "tol_rank", "tol_match"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    def rank_cutoff(self, singular_values: np.ndarray) -> float:
        s = np.asarray(singular_values, dtype=float)
        return self.tol_rank * (float(s.max()) if s.size else 0.0)


DEFAULT_TOLERANCES = Tolerances()


def _freeze(values, shape_hint: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise StructuralError(f"{shape_hint} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError(f"{shape_hint} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def state_labels_for(n: int) -> tuple[str, ...]:
    return tuple(f"th{i + 1}" for i in range(n))


def signal_labels_for(n: int) -> tuple[str, ...]:
    return tuple(f"s{i + 1}" for i in range(n))


def _check_labels(labels: Sequence[str] | None, n: int, axis: str, default) -> tuple[str, ...]:
    if labels is None:
        return default(n)
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise StructuralError(f"{axis}: {len(labels)} labels for {n} entries")
    if len(set(labels)) != len(labels):
        raise StructuralError(f"{axis}: duplicate labels")
    return labels


@dataclass(frozen=True)
class StateBeliefMatrix:
    """Belief types by states; row ``s`` is type ``s``'s distribution over states."""

    entries: np.ndarray
    state_labels: tuple[str, ...] = None  # type: ignore[assignment]
    signal_labels: tuple[str, ...] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        entries = _freeze(self.entries, "state belief matrix", 2)
        object.__setattr__(self, "entries", entries)
        n_signals, n_states = entries.shape
        object.__setattr__(
            self, "state_labels", _check_labels(self.state_labels, n_states, "states", state_labels_for)
        )
        object.__setattr__(
            self, "signal_labels", _check_labels(self.signal_labels, n_signals, "signals", signal_labels_for)
        )

    @property
    def n_signals(self) -> int:
        return self.entries.shape[0]

    @property
    def n_states(self) -> int:
        return self.entries.shape[1]

    def rank(self, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
        s = np.linalg.svd(self.entries, compute_uv=False)
        return int(np.sum(s > tol.rank_cutoff(s)))

    def has_full_column_rank(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        return self.rank(tol) == self.n_states


@dataclass(frozen=True)
class HypotheticalBeliefMatrix:
    """Each row is that belief type's expected distribution of a random peer's type."""

    entries: np.ndarray
    signal_labels: tuple[str, ...] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        entries = _freeze(self.entries, "hypothetical belief matrix", 2)
        if entries.shape[0] != entries.shape[1]:
            raise StructuralError(
                f"hypothetical belief matrix must be square, got shape {entries.shape}"
            )
        object.__setattr__(self, "entries", entries)
        object.__setattr__(
            self,
            "signal_labels",
            _check_labels(self.signal_labels, entries.shape[0], "signals", signal_labels_for),
        )

    @property
    def n_signals(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class InformationStructure:
    """States by signals; row ``theta`` is the signal distribution in state ``theta``."""

    entries: np.ndarray
    state_labels: tuple[str, ...] = None  # type: ignore[assignment]
    signal_labels: tuple[str, ...] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        entries = _freeze(self.entries, "information structure", 2)
        object.__setattr__(self, "entries", entries)
        n_states, n_signals = entries.shape
        object.__setattr__(
            self, "state_labels", _check_labels(self.state_labels, n_states, "states", state_labels_for)
        )
        object.__setattr__(
            self, "signal_labels", _check_labels(self.signal_labels, n_signals, "signals", signal_labels_for)
        )

    @property
    def n_states(self) -> int:
        return self.entries.shape[0]

    @property
    def n_signals(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class Prior:
    """Probability vector over states."""

    entries: np.ndarray
    state_labels: tuple[str, ...] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        entries = _freeze(self.entries, "prior", 1)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(
            self, "state_labels", _check_labels(self.state_labels, entries.size, "states", state_labels_for)
        )

    @property
    def n_states(self) -> int:
        return self.entries.size

    def is_interior(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        return bool(np.all(self.entries > tol.tol_entry))


@dataclass(frozen=True)
class SignalMarginal:
    """Ex-ante probability of observing each signal."""

    entries: np.ndarray
    signal_labels: tuple[str, ...] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        entries = _freeze(self.entries, "signal marginal", 1)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(
            self, "signal_labels", _check_labels(self.signal_labels, entries.size, "signals", signal_labels_for)
        )


@dataclass(frozen=True)
class BeliefLandscape:
    """The observed ex-post data: state beliefs paired with hypothetical beliefs."""

    B: StateBeliefMatrix
    Q: HypotheticalBeliefMatrix

    def __post_init__(self) -> None:
        if self.B.n_signals != self.Q.n_signals:
            raise StructuralError(
                f"signal axis: B has {self.B.n_signals} rows, Q has {self.Q.n_signals}"
            )
        if self.B.signal_labels != self.Q.signal_labels:
            raise StructuralError("signal axis: B and Q carry different signal labels")

    @property
    def n_signals(self) -> int:
        return self.B.n_signals

    @property
    def n_states(self) -> int:
        return self.B.n_states

    @property
    def state_labels(self) -> tuple[str, ...]:
        return self.B.state_labels

    @property
    def signal_labels(self) -> tuple[str, ...]:
        return self.B.signal_labels


@dataclass(frozen=True)
class InformationalEnvironment:
    """The ex-ante ground truth: an information structure plus a common prior."""

    structure: InformationStructure
    prior: Prior

    def __post_init__(self) -> None:
        if self.structure.n_states != self.prior.n_states:
            raise StructuralError(
                f"state axis: structure has {self.structure.n_states} states,"
                f" prior has {self.prior.n_states}"
            )
        if self.structure.state_labels != self.prior.state_labels:
            raise StructuralError("state axis: structure and prior carry different state labels")

    @property
    def n_states(self) -> int:
        return self.structure.n_states

    @property
    def n_signals(self) -> int:
        return self.structure.n_signals

    @property
    def state_labels(self) -> tuple[str, ...]:
        return self.structure.state_labels

    @property
    def signal_labels(self) -> tuple[str, ...]:
        return self.structure.signal_labels


@dataclass(frozen=True)
class Violation:
    """One plausibility failure, located by row/column label."""

    kind: str
    where: str
    value: float

    def describe(self) -> str:
        return f"{self.kind} at {self.where}: {self.value:.6g}"


@dataclass(frozen=True)
class PlausibilityReport:
    """Outcome of validating a landscape or an environment.

    ``rank`` and ``full_column_rank`` are filled for landscapes,
    ``prior_interior`` for environments; the rest are None.
    """

    plausible: bool
    violations: tuple[Violation, ...]
    rank: int | None = None
    full_column_rank: bool | None = None
    prior_interior: bool | None = None


def _row_violations(matrix: np.ndarray, row_labels, col_labels, name: str, tol: Tolerances):
    found = []
    for i, row in enumerate(matrix):
        for j, value in enumerate(row):
            if value < -tol.tol_entry:
                found.append(
                    Violation("negative entry", f"{name}[{row_labels[i]}, {col_labels[j]}]", float(value))
                )
        total = float(row.sum())
        if abs(total - 1.0) > tol.tol_stochastic:
            found.append(Violation("row sum", f"{name} row {row_labels[i]}", total))
    return found


def validate_landscape(
    B: StateBeliefMatrix,
    Q: HypotheticalBeliefMatrix,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> PlausibilityReport:
    """Check that (B, Q) is plausible: nonnegative, row stochastic, no zero column of B.

    Entries within ``tol_entry`` below zero count as zero, so exact inputs
    survive float noise. Reports every violation rather than stopping at the
    first one.
    """
    if B.n_signals != Q.n_signals:
        raise StructuralError(f"signal axis: B has {B.n_signals} rows, Q has {Q.n_signals}")
    violations = _row_violations(B.entries, B.signal_labels, B.state_labels, "B", tol)
    violations += _row_violations(Q.entries, Q.signal_labels, Q.signal_labels, "Q", tol)
    for j in range(B.n_states):
        column = B.entries[:, j]
        if np.all(np.abs(column) <= tol.tol_entry):
            violations.append(Violation("zero column", f"B column {B.state_labels[j]}", 0.0))
    rank = B.rank(tol)
    return PlausibilityReport(
        plausible=not violations,
        violations=tuple(violations),
        rank=rank,
        full_column_rank=rank == B.n_states,
    )


def validate_environment(
    env: InformationalEnvironment,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> PlausibilityReport:
    """Check row-stochasticity of the structure and simplex membership of the prior."""
    violations = _row_violations(
        env.structure.entries, env.state_labels, env.signal_labels, "structure", tol
    )
    prior = env.prior.entries
    for i, value in enumerate(prior):
        if value < -tol.tol_entry:
            violations.append(Violation("negative entry", f"prior[{env.state_labels[i]}]", float(value)))
    total = float(prior.sum())
    if abs(total - 1.0) > tol.tol_stochastic:
        violations.append(Violation("sum", "prior", total))
    return PlausibilityReport(
        plausible=not violations,
        violations=tuple(violations),
        prior_interior=env.prior.is_interior(tol),
    )
