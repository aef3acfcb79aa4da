"""Inverse procedures: recover the informational environment from a belief landscape.

The regression route identifies the structure column by column (each
hypothetical column regressed on the state beliefs) and the prior as the
eigenvalue-1 eigenvector of the peer-accuracy matrix. The minimum-norm route
covers more states than signals; the signal-priors route starts from the
stationary vector of the hypothetical matrix instead. Dependency reduction,
partition detection, non-common-prior rationalization, consistency
diagnostics, and crowd-wisdom state inference round out the toolbox.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .core import (
    DEFAULT_TOLERANCES,
    BeliefLandscape,
    InconsistentLandscapeError,
    InformationStructure,
    InformationalEnvironment,
    NotConvexDependentError,
    NotInHullError,
    NotModelGeneratedError,
    Prior,
    RankDeficientError,
    SignalMarginal,
    StateBeliefMatrix,
    StructuralError,
    StructureSupportError,
    Tolerances,
    UnderdeterminedError,
)
from .forward import generate_landscape
from .linalg import (
    NullSpaceBasis,
    least_squares_coefficients,
    min_norm_solution,
    null_space_basis,
    regression_operator,
    unit_eigenvector_eigenvalue_one,
)

# --------------------------------------------------------------------------
# Prior families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassPrior:
    """The identified prior restricted to one closed class of states."""

    states: tuple[int, ...]
    state_labels: tuple[str, ...]
    weights: np.ndarray

    def full_vector(self, n_states: int) -> np.ndarray:
        full = np.zeros(n_states)
        full[list(self.states)] = self.weights
        return full


@dataclass(frozen=True)
class PriorFamily:
    """Either one prior, or one Perron vector per closed class.

    In the family case the identified set is every convex combination of the
    class vectors; relative weight across classes cannot be determined from
    ex-post data.
    """

    kind: str  # "unique" | "family"
    state_labels: tuple[str, ...]
    unique_prior: Prior | None = None
    class_priors: tuple[ClassPrior, ...] = ()

    @property
    def n_states(self) -> int:
        return len(self.state_labels)

    def members(self) -> tuple[np.ndarray, ...]:
        """Extreme points of the identified set, as full-length vectors."""
        if self.kind == "unique":
            return (self.unique_prior.entries,)
        return tuple(cp.full_vector(self.n_states) for cp in self.class_priors)

    def representative(self) -> Prior:
        """The unique prior, or the balanced mixture of the class extremes."""
        if self.kind == "unique":
            return self.unique_prior
        mean = np.mean(np.stack(self.members()), axis=0)
        return Prior(mean, state_labels=self.state_labels)


def identify_prior(
    beliefs: StateBeliefMatrix,
    structure: InformationStructure,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> PriorFamily:
    """Prior as the eigenvalue-1 eigenvector of the peer-accuracy matrix.

    Unique when that matrix has a single fixed direction; otherwise one
    Perron vector per closed class of its positive-entry pattern.
    """
    if beliefs.n_states != structure.n_states:
        raise StructuralError(
            f"state axis: beliefs have {beliefs.n_states} states,"
            f" structure has {structure.n_states}"
        )
    accuracy = peer_accuracy_matrix(beliefs, structure)
    result = unit_eigenvector_eigenvalue_one(accuracy, tol)
    if result.kind == "none":
        raise NotModelGeneratedError(
            "the peer-accuracy matrix has no eigenvalue-1 eigenvector"
        )
    labels = beliefs.state_labels
    if result.kind == "unique":
        return PriorFamily(
            kind="unique",
            state_labels=labels,
            unique_prior=Prior(result.vector, state_labels=labels),
        )
    class_priors = tuple(
        ClassPrior(
            states=members,
            state_labels=tuple(labels[i] for i in members),
            weights=vector[list(members)],
        )
        for members, vector in zip(result.family_classes, result.family)
    )
    return PriorFamily(kind="family", state_labels=labels, class_priors=class_priors)


def peer_accuracy_matrix(beliefs: StateBeliefMatrix, structure: InformationStructure) -> np.ndarray:
    """Entry (i, j): expected peer probability on state i when the true state is j."""
    return beliefs.entries.T @ structure.entries.T


# --------------------------------------------------------------------------
# Regression identification (at least as many signals as states)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StructureDiagnostics:
    """Numerical health of an identified structure.

    ``residual`` is the largest absolute entry of beliefs @ structure minus
    the hypotheticals; round-trip errors compare the forward-generated
    landscape against the observed one and are filled by :func:`identify`.
    """

    residual: float
    negative_entries: tuple[tuple[str, str, float], ...]
    max_row_sum_error: float
    clipped_entries: int
    roundtrip_belief_error: float | None = None
    roundtrip_hypothetical_error: float | None = None


@dataclass(frozen=True)
class IdentificationResult:
    structure: InformationStructure
    prior: PriorFamily | None
    peer_accuracy: np.ndarray | None
    diagnostics: StructureDiagnostics
    consistent_structure: bool


def _tidy_structure(raw: np.ndarray, tol: Tolerances) -> tuple[np.ndarray, bool, int, tuple]:
    """Clip float noise outside [0, 1]; anything larger flags inconsistency untouched."""
    negatives = [
        (int(i), int(j), float(raw[i, j]))
        for i, j in zip(*np.where(raw < -tol.tol_entry))
    ]
    overshoots = raw > 1.0 + tol.tol_entry
    if negatives or overshoots.any():
        return raw, False, 0, tuple(negatives)
    clipped = np.clip(raw, 0.0, 1.0)
    n_clipped = int(np.sum(clipped != raw))
    out = clipped.copy()
    for i, row in enumerate(clipped):
        total = row.sum()
        if total > 0:
            renormalized = row / total
            if np.max(np.abs(renormalized - row)) <= tol.tol_entry:
                out[i] = renormalized
    return out, True, n_clipped, ()


def identify_structure(
    beliefs: StateBeliefMatrix,
    hypotheticals,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> IdentificationResult:
    """Recover the structure by regressing each hypothetical column on the beliefs.

    Requires at least as many signals as states and full column rank. Entries
    within tolerance of [0, 1] are snapped; genuinely negative output is left
    untouched and flagged: such hypotheticals lie outside the family any
    common-prior environment can produce.
    """
    q = hypotheticals.entries if hasattr(hypotheticals, "entries") else np.asarray(hypotheticals)
    if beliefs.n_states > beliefs.n_signals:
        raise UnderdeterminedError(
            f"{beliefs.n_states} states but only {beliefs.n_signals} signals;"
            " use the minimum-norm path"
        )
    if not beliefs.has_full_column_rank(tol):
        raise RankDeficientError(
            "belief matrix has dependent columns; reduce dependencies first"
        )
    raw = regression_operator(beliefs.entries, tol) @ q
    tidy, consistent, n_clipped, negative_ij = _tidy_structure(raw, tol)
    structure = InformationStructure(
        tidy, state_labels=beliefs.state_labels, signal_labels=beliefs.signal_labels
    )
    negative_entries = tuple(
        (beliefs.state_labels[i], beliefs.signal_labels[j], value)
        for i, j, value in negative_ij
    )
    diagnostics = StructureDiagnostics(
        residual=float(np.max(np.abs(beliefs.entries @ raw - q))),
        negative_entries=negative_entries,
        max_row_sum_error=float(np.max(np.abs(tidy.sum(axis=1) - 1.0))),
        clipped_entries=n_clipped,
    )
    return IdentificationResult(
        structure=structure,
        prior=None,
        peer_accuracy=None,
        diagnostics=diagnostics,
        consistent_structure=consistent,
    )


def _roundtrip_errors(
    landscape: BeliefLandscape,
    structure: InformationStructure,
    prior: Prior,
    tol: Tolerances,
) -> tuple[float, float]:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            regenerated = generate_landscape(
                InformationalEnvironment(structure, prior), tol
            )
    except Exception:
        return float("inf"), float("inf")
    if regenerated.B.entries.shape != landscape.B.entries.shape:
        return float("inf"), float("inf")
    return (
        float(np.max(np.abs(regenerated.B.entries - landscape.B.entries))),
        float(np.max(np.abs(regenerated.Q.entries - landscape.Q.entries))),
    )


def identify(
    landscape: BeliefLandscape, tol: Tolerances = DEFAULT_TOLERANCES
) -> IdentificationResult:
    """Full regression identification: structure, prior, accuracy, round trip."""
    partial = identify_structure(landscape.B, landscape.Q, tol)
    prior = identify_prior(landscape.B, partial.structure, tol)
    accuracy = peer_accuracy_matrix(landscape.B, partial.structure)
    b_err, q_err = _roundtrip_errors(landscape, partial.structure, prior.representative(), tol)
    diagnostics = StructureDiagnostics(
        residual=partial.diagnostics.residual,
        negative_entries=partial.diagnostics.negative_entries,
        max_row_sum_error=partial.diagnostics.max_row_sum_error,
        clipped_entries=partial.diagnostics.clipped_entries,
        roundtrip_belief_error=b_err,
        roundtrip_hypothetical_error=q_err,
    )
    return IdentificationResult(
        structure=partial.structure,
        prior=prior,
        peer_accuracy=accuracy,
        diagnostics=diagnostics,
        consistent_structure=partial.consistent_structure,
    )


# --------------------------------------------------------------------------
# Consistency verdict
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyVerdict:
    """Whether some common-prior environment generates the landscape, and why not.

    ``failed`` can contain "nonnegative_structure", "prior", "reproduction".
    """

    consistent: bool
    failed: tuple[str, ...]
    identification: IdentificationResult | None


def consistency_check(
    landscape: BeliefLandscape, tol: Tolerances = DEFAULT_TOLERANCES
) -> ConsistencyVerdict:
    """Judge a landscape: nonnegative structure, a nonnegative prior, and a round trip.

    Plausibility of the inputs is nowhere near sufficient; most row-stochastic
    hypothetical matrices fail the round trip.
    """
    partial = identify_structure(landscape.B, landscape.Q, tol)
    failed = []
    if not partial.consistent_structure:
        failed.append("nonnegative_structure")
    prior = None
    try:
        prior = identify_prior(landscape.B, partial.structure, tol)
    except NotModelGeneratedError:
        failed.append("prior")
    if prior is not None and any(m.min() < -tol.tol_entry for m in prior.members()):
        failed.append("prior")
        prior = None
    if prior is None:
        failed.append("reproduction")
        return ConsistencyVerdict(False, tuple(failed), partial)
    b_err, q_err = _roundtrip_errors(landscape, partial.structure, prior.representative(), tol)
    if b_err > tol.tol_match or q_err > tol.tol_match:
        failed.append("reproduction")
    diagnostics = StructureDiagnostics(
        residual=partial.diagnostics.residual,
        negative_entries=partial.diagnostics.negative_entries,
        max_row_sum_error=partial.diagnostics.max_row_sum_error,
        clipped_entries=partial.diagnostics.clipped_entries,
        roundtrip_belief_error=b_err,
        roundtrip_hypothetical_error=q_err,
    )
    full = IdentificationResult(
        structure=partial.structure,
        prior=prior,
        peer_accuracy=peer_accuracy_matrix(landscape.B, partial.structure),
        diagnostics=diagnostics,
        consistent_structure=partial.consistent_structure,
    )
    return ConsistencyVerdict(not failed, tuple(failed), full)


# --------------------------------------------------------------------------
# More states than signals: minimum-norm route plus feasibility restoration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RestorationResult:
    """Row-stochastic solutions reached from the minimum-norm matrix.

    The candidates are the minimum-norm matrix plus per-column combinations
    of the null basis; row sums pin the total coefficient per basis vector,
    the box [0, 1] does the rest. ``kind`` is "unique", "family" (the
    representative is the point found by shifting each column as little as
    possible, earlier columns first), or "infeasible".
    """

    kind: str
    structure: np.ndarray | None
    null_basis: NullSpaceBasis
    affine_dimension: int


def _sequential_point(lo: np.ndarray, hi: np.ndarray, total: float, minimal: bool) -> np.ndarray:
    point = np.empty_like(lo)
    remaining = total
    for j in range(lo.size):
        tail_hi = hi[j + 1 :].sum()
        tail_lo = lo[j + 1 :].sum()
        if minimal:
            value = max(lo[j], remaining - tail_hi)
        else:
            value = min(hi[j], remaining - tail_lo)
        value = min(max(value, lo[j]), hi[j])
        point[j] = value
        remaining -= value
    return point


def _restore_one_direction(
    ridge_limit: np.ndarray, direction: np.ndarray, total: float, tol: Tolerances
) -> tuple[str, np.ndarray | None]:
    # Exact box [0, 1] so the representative lands on the true vertex;
    # feasibility decisions get tol_match slack.
    n_states, n_signals = ridge_limit.shape
    lo = np.full(n_signals, -np.inf)
    hi = np.full(n_signals, np.inf)
    for j in range(n_signals):
        for i in range(n_states):
            v = direction[i]
            base = ridge_limit[i, j]
            if v > tol.tol_entry:
                lo[j] = max(lo[j], -base / v)
                hi[j] = min(hi[j], (1.0 - base) / v)
            elif v < -tol.tol_entry:
                lo[j] = max(lo[j], (1.0 - base) / v)
                hi[j] = min(hi[j], -base / v)
            elif base < -tol.tol_entry or base > 1.0 + tol.tol_entry:
                return "infeasible", None
    if np.any(lo > hi + tol.tol_match):
        return "infeasible", None
    if not (lo.sum() - tol.tol_match <= total <= hi.sum() + tol.tol_match):
        return "infeasible", None
    lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
    minimal = _sequential_point(lo, hi, total, minimal=True)
    maximal = _sequential_point(lo, hi, total, minimal=False)
    kind = "unique" if np.max(np.abs(minimal - maximal)) <= tol.tol_match else "family"
    return kind, ridge_limit + np.outer(direction, minimal)


def _restore_general(
    ridge_limit: np.ndarray, basis: np.ndarray, totals: np.ndarray, tol: Tolerances
) -> tuple[str, np.ndarray | None]:
    n_states, n_signals = ridge_limit.shape
    k = basis.shape[1]
    n_vars = k * n_signals  # coefficient r for column j sits at index j * k + r
    a_eq = np.zeros((k, n_vars))
    for r in range(k):
        a_eq[r, r::k] = 1.0
    rows = []
    rhs = []
    slack = tol.tol_entry
    for j in range(n_signals):
        block = np.zeros((n_states, n_vars))
        block[:, j * k : (j + 1) * k] = basis
        rows.append(block)
        rhs.append(1.0 + slack - ridge_limit[:, j])
        rows.append(-block)
        rhs.append(ridge_limit[:, j] + slack)
    a_ub = np.vstack(rows)
    b_ub = np.concatenate(rhs)
    cost = 1.0 + np.arange(n_vars) / n_vars
    solutions = []
    for sign in (1.0, -1.0):
        res = scipy.optimize.linprog(
            sign * cost,
            A_ub=a_ub,
            b_ub=b_ub,
            A_eq=a_eq,
            b_eq=totals,
            bounds=[(None, None)] * n_vars,
            method="highs",
        )
        if not res.success:
            return "infeasible", None
        solutions.append(res.x)
    kind = "unique" if np.max(np.abs(solutions[0] - solutions[1])) <= tol.tol_match else "family"
    coeff = solutions[0].reshape(n_signals, k).T
    return kind, ridge_limit + basis @ coeff


def restore_feasibility(
    ridge_limit: np.ndarray,
    basis: NullSpaceBasis,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> RestorationResult:
    """Shift the minimum-norm matrix along the null basis into a stochastic matrix.

    Row sums force the per-basis-vector coefficient totals (a consistent
    linear system whenever the inputs came from row-stochastic data);
    nonnegativity is a box. Infeasibility means no environment over this
    state space generates the data.
    """
    ridge_limit = np.asarray(ridge_limit, dtype=float)
    n_states, n_signals = ridge_limit.shape
    v = basis.as_matrix(n_states)
    deficit = 1.0 - ridge_limit.sum(axis=1)
    affine_dimension = basis.dimension * max(n_signals - 1, 0)
    if basis.dimension == 0:
        ok = (
            np.max(np.abs(deficit)) <= tol.tol_match
            and ridge_limit.min() >= -tol.tol_entry
            and ridge_limit.max() <= 1.0 + tol.tol_entry
        )
        structure = np.clip(ridge_limit, 0.0, 1.0) if ok else None
        return RestorationResult("unique" if ok else "infeasible", structure, basis, 0)
    totals = v.T @ deficit
    if np.max(np.abs(v @ totals - deficit)) > tol.tol_match * max(1.0, np.abs(deficit).max()):
        return RestorationResult("infeasible", None, basis, affine_dimension)
    if basis.dimension == 1:
        kind, structure = _restore_one_direction(ridge_limit, v[:, 0], float(totals[0]), tol)
    else:
        kind, structure = _restore_general(ridge_limit, v, totals, tol)
    if structure is not None:
        structure = np.clip(structure, 0.0, 1.0)
    return RestorationResult(kind, structure, basis, affine_dimension)


@dataclass(frozen=True)
class UnderdeterminedResult:
    """Everything the minimum-norm route identifies when signals are scarce.

    The ridge limit solves hypotheticals = beliefs @ X but need not be a
    stochastic matrix; any true structure differs from it column-wise by
    null-basis combinations only, and the prior survives regardless.
    """

    ridge_limit: np.ndarray
    null_basis: NullSpaceBasis
    prior: PriorFamily
    restored: RestorationResult
    residual: float
    state_labels: tuple[str, ...]
    signal_labels: tuple[str, ...]

    @property
    def restored_structure(self) -> InformationStructure | None:
        if self.restored.structure is None:
            return None
        return InformationStructure(
            self.restored.structure,
            state_labels=self.state_labels,
            signal_labels=self.signal_labels,
        )


def identify_underdetermined(
    landscape: BeliefLandscape, tol: Tolerances = DEFAULT_TOLERANCES, reg=None
) -> UnderdeterminedResult:
    """Minimum-norm identification for more states than signals (or dependent columns).

    With ``reg``, the small-penalty limit minimizes the reg-weighted norm
    instead; the prior interpretation holds for any exact solution.
    """
    b = landscape.B.entries
    q = landscape.Q.entries
    ridge_limit = min_norm_solution(b, q, tol, reg=reg)
    basis = null_space_basis(b, tol)
    accuracy = b.T @ ridge_limit.T
    eigen = unit_eigenvector_eigenvalue_one(accuracy, tol)
    if eigen.kind == "none":
        raise NotModelGeneratedError(
            "the ridge-limit accuracy matrix has no eigenvalue-1 eigenvector"
        )
    labels = landscape.state_labels
    if eigen.kind == "unique":
        prior = PriorFamily(
            kind="unique",
            state_labels=labels,
            unique_prior=Prior(eigen.vector, state_labels=labels),
        )
    else:
        prior = PriorFamily(
            kind="family",
            state_labels=labels,
            class_priors=tuple(
                ClassPrior(
                    states=members,
                    state_labels=tuple(labels[i] for i in members),
                    weights=vector[list(members)],
                )
                for members, vector in zip(eigen.family_classes, eigen.family)
            ),
        )
    restored = restore_feasibility(ridge_limit, basis, tol)
    return UnderdeterminedResult(
        ridge_limit=ridge_limit,
        null_basis=basis,
        prior=prior,
        restored=restored,
        residual=float(np.max(np.abs(b @ ridge_limit - q))),
        state_labels=labels,
        signal_labels=landscape.signal_labels,
    )


def reconstruct_from_prior(
    beliefs: StateBeliefMatrix, prior: Prior, tol: Tolerances = DEFAULT_TOLERANCES
) -> InformationStructure:
    """Rebuild the structure from the beliefs and a known prior.

    Finds nonnegative signal weights mixing the belief rows into the prior
    (they are the signal marginals), then rescales: structure[state, signal]
    = belief * weight / prior.
    """
    if beliefs.n_states != prior.n_states:
        raise StructuralError(
            f"state axis: beliefs have {beliefs.n_states} states, prior has {prior.n_states}"
        )
    p = prior.entries
    if p.min() <= tol.tol_entry:
        raise NotInHullError("the prior must put positive mass on every state")
    weights, residual = scipy.optimize.nnls(beliefs.entries.T, p)
    if residual > tol.tol_match:
        raise NotInHullError(
            f"the prior is not a nonnegative mixture of the belief rows (residual {residual:.3g})"
        )
    structure = (beliefs.entries * weights[:, None]).T / p[:, None]
    return InformationStructure(
        structure, state_labels=beliefs.state_labels, signal_labels=beliefs.signal_labels
    )


# --------------------------------------------------------------------------
# Signal-priors route: start from the stationary vector of the hypotheticals
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SignalPriorsResult:
    """Identification that first pulls the signal marginal out of the hypotheticals.

    When the hypothetical matrix is reducible the marginal is only identified
    per closed class; the induced priors are reported as a family and no
    single structure is singled out.
    """

    kind: str  # "unique" | "family"
    marginal: SignalMarginal | None
    marginal_family: tuple[np.ndarray, ...]
    prior: PriorFamily
    structure: InformationStructure | None


def signal_priors_identify(
    landscape: BeliefLandscape, tol: Tolerances = DEFAULT_TOLERANCES
) -> SignalPriorsResult:
    """Marginal from the hypotheticals' stationary vector, then prior, then structure."""
    b = landscape.B.entries
    eigen = unit_eigenvector_eigenvalue_one(landscape.Q.entries.T, tol)
    if eigen.kind == "none":
        raise NotModelGeneratedError(
            "the hypothetical matrix has no stationary signal distribution"
        )
    state_labels = landscape.state_labels
    if eigen.kind == "unique":
        marginal = eigen.vector
        prior_vector = b.T @ marginal
        prior = PriorFamily(
            kind="unique",
            state_labels=state_labels,
            unique_prior=Prior(prior_vector, state_labels=state_labels),
        )
        structure = None
        if prior_vector.min() > tol.tol_entry:
            structure = InformationStructure(
                (b * marginal[:, None]).T / prior_vector[:, None],
                state_labels=state_labels,
                signal_labels=landscape.signal_labels,
            )
        return SignalPriorsResult(
            kind="unique",
            marginal=SignalMarginal(marginal, signal_labels=landscape.signal_labels),
            marginal_family=(),
            prior=prior,
            structure=structure,
        )
    class_priors = []
    for members, vector in zip(eigen.family_classes, eigen.family):
        induced = b.T @ vector
        support = tuple(int(i) for i in np.where(induced > tol.tol_entry)[0])
        class_priors.append(
            ClassPrior(
                states=support,
                state_labels=tuple(state_labels[i] for i in support),
                weights=induced[list(support)],
            )
        )
    return SignalPriorsResult(
        kind="family",
        marginal=None,
        marginal_family=eigen.family,
        prior=PriorFamily(
            kind="family", state_labels=state_labels, class_priors=tuple(class_priors)
        ),
        structure=None,
    )


def identify_single_column(
    beliefs: StateBeliefMatrix, hypothetical_column, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Per-state probabilities of one signal from its hypothetical column alone."""
    if beliefs.n_states > beliefs.n_signals:
        raise UnderdeterminedError(
            f"{beliefs.n_states} states but only {beliefs.n_signals} signals;"
            " a single column identifies nothing here"
        )
    column = np.asarray(hypothetical_column, dtype=float)
    if column.shape != (beliefs.n_signals,):
        raise StructuralError(
            f"signal axis: column has length {column.size}, expected {beliefs.n_signals}"
        )
    return least_squares_coefficients(beliefs.entries, column, tol)


@dataclass(frozen=True)
class StateInference:
    """Which state matches an observed signal share; None when ambiguous."""

    state_index: int | None
    ambiguous: bool
    gaps: tuple[float, ...]


def infer_state(
    structure_column, observed_share: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> StateInference:
    """Match the observed population share of one signal against its per-state probabilities.

    Ambiguous when the two best matches are within tolerance of each other,
    or when the winning entry has a near-duplicate.
    """
    column = np.asarray(structure_column, dtype=float)
    gaps = np.abs(column - float(observed_share))
    order = np.argsort(gaps, kind="stable")
    best = int(order[0])
    ambiguous = False
    if column.size > 1:
        if gaps[order[1]] - gaps[best] < tol.tol_match:
            ambiguous = True
        duplicates = np.abs(column - column[best]) <= 2 * tol.tol_match
        if int(duplicates.sum()) > 1:
            ambiguous = True
    return StateInference(
        state_index=None if ambiguous else best,
        ambiguous=ambiguous,
        gaps=tuple(float(g) for g in gaps),
    )


def infer_state_from_profile(
    structure: InformationStructure, observed_distribution, tol: Tolerances = DEFAULT_TOLERANCES
) -> StateInference:
    """Whole-profile variant: nearest structure row to the observed type distribution."""
    observed = np.asarray(observed_distribution, dtype=float)
    if observed.shape != (structure.n_signals,):
        raise StructuralError(
            f"signal axis: distribution has length {observed.size},"
            f" expected {structure.n_signals}"
        )
    gaps = np.linalg.norm(structure.entries - observed[None, :], axis=1)
    order = np.argsort(gaps, kind="stable")
    best = int(order[0])
    ambiguous = structure.n_states > 1 and gaps[order[1]] - gaps[best] < tol.tol_match
    return StateInference(
        state_index=None if ambiguous else best,
        ambiguous=ambiguous,
        gaps=tuple(float(g) for g in gaps),
    )


# --------------------------------------------------------------------------
# Non-common-prior rationalization
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NonCommonPriorRationalization:
    """One prior per belief type that reproduces that type's rows exactly.

    Every plausible landscape whose regression output is a valid structure
    can be rationalized this way even when no single common prior works.
    """

    structure: InformationStructure
    type_priors: tuple[Prior, ...]
    belief_residuals: tuple[float, ...]
    hypothetical_residuals: tuple[float, ...]


def rationalize_noncommon(
    landscape: BeliefLandscape, tol: Tolerances = DEFAULT_TOLERANCES
) -> NonCommonPriorRationalization:
    """Per-type priors under the regression structure.

    For each belief type, the prior is proportional to belief / structure
    entry by entry; it exists whenever the structure supports the beliefs.
    """
    partial = identify_structure(landscape.B, landscape.Q, tol)
    structure = partial.structure.entries
    b = landscape.B.entries
    q = landscape.Q.entries
    type_priors = []
    belief_residuals = []
    hypothetical_residuals = []
    for s in range(landscape.n_signals):
        ratios = np.zeros(landscape.n_states)
        for theta in range(landscape.n_states):
            belief = b[s, theta]
            weight = structure[theta, s]
            if weight > tol.tol_entry:
                ratios[theta] = max(belief, 0.0) / weight
            elif abs(belief) <= tol.tol_entry:
                ratios[theta] = 0.0
            else:
                raise StructureSupportError(
                    f"structure puts no probability on signal {landscape.signal_labels[s]}"
                    f" in state {landscape.state_labels[theta]}, but the belief there"
                    f" is {belief:.6g}"
                )
        prior = ratios / ratios.sum()
        reproduced_b = prior * structure[:, s]
        reproduced_b = reproduced_b / reproduced_b.sum()
        reproduced_q = b[s, :] @ structure
        type_priors.append(Prior(prior, state_labels=landscape.state_labels))
        belief_residuals.append(float(np.max(np.abs(reproduced_b - b[s, :]))))
        hypothetical_residuals.append(float(np.max(np.abs(reproduced_q - q[s, :]))))
    return NonCommonPriorRationalization(
        structure=partial.structure,
        type_priors=tuple(type_priors),
        belief_residuals=tuple(belief_residuals),
        hypothetical_residuals=tuple(hypothetical_residuals),
    )


# --------------------------------------------------------------------------
# Removing linear dependencies: a dependent state is one "split apart" from
# the states whose belief columns mix to its own.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionResult:
    """A full-rank reduced landscape plus the recipe to embed results back.

    Each removed belief column equals a nonnegative mixture of kept columns;
    kept columns are rescaled by one plus their total mixture weight, which
    keeps rows summing to one. Embedding spreads the identified prior back
    and rebuilds removed structure rows as prior-weighted mixtures of kept
    rows.
    """

    reduced: BeliefLandscape
    kept_states: tuple[int, ...]
    removed_states: tuple[int, ...]
    mixing_weights: tuple[np.ndarray, ...]
    column_scale: np.ndarray
    state_labels: tuple[str, ...]

    @property
    def trivial(self) -> bool:
        return not self.removed_states

    def embed(
        self, structure: InformationStructure, prior: Prior
    ) -> tuple[InformationStructure, Prior]:
        """Map a reduced structure and prior back onto the full state space."""
        n_full = len(self.state_labels)
        n_kept = len(self.kept_states)
        if structure.n_states != n_kept or prior.n_states != n_kept:
            raise StructuralError(
                f"state axis: expected {n_kept} reduced states,"
                f" got structure {structure.n_states} and prior {prior.n_states}"
            )
        full_prior = np.zeros(n_full)
        kept = list(self.kept_states)
        full_prior[kept] = prior.entries / self.column_scale
        rows = np.zeros((n_full, structure.n_signals))
        rows[kept] = structure.entries
        for removed, weights in zip(self.removed_states, self.mixing_weights):
            mass = weights * full_prior[kept]
            total = mass.sum()
            full_prior[removed] = total
            if total > 0:
                mixture = mass / total
            else:
                mixture = weights / weights.sum()
            rows[removed] = mixture @ structure.entries
        return (
            InformationStructure(
                rows, state_labels=self.state_labels, signal_labels=structure.signal_labels
            ),
            Prior(full_prior, state_labels=self.state_labels),
        )


def reduce_dependencies(
    landscape: BeliefLandscape, tol: Tolerances = DEFAULT_TOLERANCES
) -> ReductionResult:
    """Drop dependent belief columns and rescale so the reduced matrix is full rank.

    Columns are kept greedily in index order while they increase the rank;
    each dropped column must be a nonnegative mixture of the kept ones,
    otherwise the split-state reading does not apply.
    """
    b = landscape.B.entries
    n_states = landscape.n_states
    target_rank = landscape.B.rank(tol)
    kept: list[int] = []
    for j in range(n_states):
        if len(kept) == target_rank:
            break
        candidate = b[:, kept + [j]]
        s = np.linalg.svd(candidate, compute_uv=False)
        if int(np.sum(s > tol.rank_cutoff(s))) == len(kept) + 1:
            kept.append(j)
    removed = [j for j in range(n_states) if j not in kept]
    if not removed:
        return ReductionResult(
            reduced=landscape,
            kept_states=tuple(range(n_states)),
            removed_states=(),
            mixing_weights=(),
            column_scale=np.ones(n_states),
            state_labels=landscape.state_labels,
        )
    kept_matrix = b[:, kept]
    weights = []
    for j in removed:
        w = least_squares_coefficients(kept_matrix, b[:, j], tol)
        residual = float(np.max(np.abs(kept_matrix @ w - b[:, j])))
        if residual > tol.tol_match:
            raise NotConvexDependentError(
                f"column {landscape.state_labels[j]} is not in the span of the kept columns"
            )
        if w.min() < -tol.tol_entry:
            raise NotConvexDependentError(
                f"column {landscape.state_labels[j]} needs negative weight"
                f" {w.min():.6g} on a kept column"
            )
        weights.append(np.clip(w, 0.0, None))
    scale = 1.0 + np.sum(np.stack(weights), axis=0)
    reduced_b = kept_matrix * scale[None, :]
    kept_labels = tuple(landscape.state_labels[j] for j in kept)
    reduced = BeliefLandscape(
        StateBeliefMatrix(
            reduced_b, state_labels=kept_labels, signal_labels=landscape.signal_labels
        ),
        landscape.Q,
    )
    return ReductionResult(
        reduced=reduced,
        kept_states=tuple(kept),
        removed_states=tuple(removed),
        mixing_weights=tuple(weights),
        column_scale=scale,
        state_labels=landscape.state_labels,
    )


# --------------------------------------------------------------------------
# Partitional structures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionResult:
    """Partition read off a landscape whose hypothetical matrix is the identity.

    Signals are then generated deterministically: each cell is the support of
    one belief row; states outside every support carry prior zero.
    """

    partitional: bool
    cells: tuple[tuple[int, ...], ...]
    zero_prior_states: tuple[int, ...]


def detect_partitional(
    landscape: BeliefLandscape, tol: Tolerances = DEFAULT_TOLERANCES
) -> PartitionResult:
    """Identity hypotheticals characterize deterministic (partitional) signals."""
    q = landscape.Q.entries
    if np.max(np.abs(q - np.eye(landscape.n_signals))) > tol.tol_match:
        return PartitionResult(partitional=False, cells=(), zero_prior_states=())
    cells = []
    seen: set[int] = set()
    for s in range(landscape.n_signals):
        support = tuple(int(i) for i in np.where(landscape.B.entries[s] > tol.tol_entry)[0])
        overlap = seen.intersection(support)
        if overlap:
            labels = ", ".join(landscape.state_labels[i] for i in sorted(overlap))
            raise InconsistentLandscapeError(
                f"identity hypotheticals with overlapping belief supports ({labels})"
            )
        seen.update(support)
        cells.append(support)
    zero_prior = tuple(i for i in range(landscape.n_states) if i not in seen)
    return PartitionResult(partitional=True, cells=tuple(cells), zero_prior_states=zero_prior)
