"""Numerical kernels on small dense matrices.

Least squares, minimum-norm and ridge solves with general regularizers, null
spaces, eigenvalue-1 eigenvector extraction, and irreducibility analysis.
Solves go through orthogonal factorizations (QR for full-rank least squares,
SVD for pseudoinverses and null spaces); the normal-equation formulas define
the values, not the algorithms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import DEFAULT_TOLERANCES, RankDeficientError, Tolerances


@dataclass(frozen=True)
class NullSpaceBasis:
    """Orthonormal basis of the right null space of a matrix."""

    vectors: tuple[np.ndarray, ...]
    dimension: int

    def as_matrix(self, n: int) -> np.ndarray:
        """Basis as an (n, dimension) matrix; n disambiguates the empty case."""
        if self.dimension == 0:
            return np.zeros((n, 0))
        return np.column_stack(self.vectors)


@dataclass(frozen=True)
class ClassDecomposition:
    """Strongly connected components of the positive-entry pattern.

    ``classes`` partitions the index set; a class is closed when no mass
    leaves it. ``class_edges`` holds (from, to) pairs between class indices.
    """

    classes: tuple[tuple[int, ...], ...]
    closed: tuple[bool, ...]
    irreducible: bool
    class_edges: tuple[tuple[int, int], ...]

    def closed_classes(self) -> tuple[tuple[int, ...], ...]:
        return tuple(c for c, is_closed in zip(self.classes, self.closed) if is_closed)


@dataclass(frozen=True)
class EigenvalueOneResult:
    """Eigenvalue-1 eigenvectors of a square matrix, simplex-normalized.

    ``kind`` is "unique" (one direction), "family" (one Perron vector per
    closed class, as full-length vectors supported on the class), or "none".
    ``family_classes`` holds, per family member, the index set it lives on.
    """

    kind: str
    vector: np.ndarray | None = None
    family: tuple[np.ndarray, ...] = ()
    family_classes: tuple[tuple[int, ...], ...] = ()
    classes: ClassDecomposition | None = None

    def members(self) -> tuple[np.ndarray, ...]:
        if self.kind == "unique":
            return (self.vector,)
        return self.family


@dataclass(frozen=True)
class Regularizer:
    """Symmetric positive-definite matrix added (scaled) to the normal equations."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"regularizer must be square, got shape {m.shape}")
        if not np.allclose(m, m.T, atol=DEFAULT_TOLERANCES.tol_match):
            raise ValueError("regularizer must be symmetric")
        if np.linalg.eigvalsh(m).min() <= 0:
            raise ValueError("regularizer must be positive definite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> "Regularizer":
        return cls(np.eye(n))


def _as_regularizer_matrix(reg, n: int) -> np.ndarray | None:
    if reg is None:
        return None
    if isinstance(reg, Regularizer):
        m = reg.matrix
    else:
        m = Regularizer(np.asarray(reg, dtype=float)).matrix
    if m.shape != (n, n):
        raise ValueError(f"regularizer shape {m.shape} does not match {n} columns")
    return m


def _require_full_column_rank(matrix: np.ndarray, tol: Tolerances) -> None:
    s = np.linalg.svd(matrix, compute_uv=False)
    cutoff = tol.rank_cutoff(s)
    rank = int(np.sum(s > cutoff))
    if rank < matrix.shape[1]:
        raise RankDeficientError(
            f"matrix has column rank {rank} < {matrix.shape[1]}; remove dependent"
            " columns or use the minimum-norm path"
        )


def least_squares_coefficients(
    matrix: np.ndarray, target: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Coefficients beta minimizing ||target - matrix @ beta||, via QR.

    Requires full column rank; rank deficiency raises instead of silently
    picking one of many minimizers.
    """
    matrix = np.asarray(matrix, dtype=float)
    target = np.asarray(target, dtype=float)
    _require_full_column_rank(matrix, tol)
    q, r = scipy.linalg.qr(matrix, mode="economic")
    return scipy.linalg.solve_triangular(r, q.T @ target)


def regression_operator(matrix: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """The operator mapping a target vector to its least-squares coefficients.

    Requires full column rank, in which case it equals the pseudoinverse.
    """
    matrix = np.asarray(matrix, dtype=float)
    _require_full_column_rank(matrix, tol)
    return np.linalg.pinv(matrix, rcond=tol.tol_rank)


def min_norm_solution(
    matrix: np.ndarray,
    targets: np.ndarray,
    tol: Tolerances = DEFAULT_TOLERANCES,
    reg=None,
) -> np.ndarray:
    """Minimum-norm least-squares solution X of targets = matrix @ X.

    Always defined; equals the small-penalty limit of the ridge solution.
    With ``reg``, minimizes the reg-weighted norm x.T @ reg @ x per column
    instead of the Euclidean one (computed by whitening through the Cholesky
    factor of reg).
    """
    matrix = np.asarray(matrix, dtype=float)
    targets = np.asarray(targets, dtype=float)
    reg_matrix = _as_regularizer_matrix(reg, matrix.shape[1])
    if reg_matrix is None:
        return np.linalg.pinv(matrix, rcond=tol.tol_rank) @ targets
    chol = np.linalg.cholesky(reg_matrix)
    whitened = scipy.linalg.solve_triangular(chol, matrix.T, lower=True).T
    y = np.linalg.pinv(whitened, rcond=tol.tol_rank) @ targets
    return scipy.linalg.solve_triangular(chol.T, y, lower=False)


def ridge_solution_at(
    matrix: np.ndarray,
    targets: np.ndarray,
    lam: float,
    reg=None,
) -> np.ndarray:
    """Ridge solution (matrix.T @ matrix + lam * reg)^-1 matrix.T @ targets.

    Well-defined for every lam > 0 since the regularized normal matrix is
    positive definite. ``reg`` defaults to the identity.
    """
    if lam <= 0:
        raise ValueError("lam must be strictly positive")
    matrix = np.asarray(matrix, dtype=float)
    targets = np.asarray(targets, dtype=float)
    n = matrix.shape[1]
    reg_matrix = _as_regularizer_matrix(reg, n)
    if reg_matrix is None:
        reg_matrix = np.eye(n)
    gram = matrix.T @ matrix + lam * reg_matrix
    return scipy.linalg.solve(gram, matrix.T @ targets, assume_a="pos")


def null_space_basis(matrix: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> NullSpaceBasis:
    """Orthonormal basis of {v : matrix @ v = 0}; empty when full column rank."""
    matrix = np.asarray(matrix, dtype=float)
    basis = scipy.linalg.null_space(matrix, rcond=tol.tol_rank)
    vectors = tuple(np.ascontiguousarray(basis[:, j]) for j in range(basis.shape[1]))
    return NullSpaceBasis(vectors=vectors, dimension=basis.shape[1])


def irreducibility(matrix: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> ClassDecomposition:
    """Communicating-class structure of a nonnegative square matrix.

    Index j has an edge to i when matrix[i, j] exceeds the entry tolerance
    (columns read as outgoing mass). Classes are reported in ascending order
    of their smallest member.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    adjacency = (matrix > tol.tol_entry).T  # row j -> column i
    n_components, labels = connected_components(
        csr_matrix(adjacency), directed=True, connection="strong"
    )
    groups: dict[int, list[int]] = {}
    for index, label in enumerate(labels):
        groups.setdefault(int(label), []).append(index)
    classes = sorted((tuple(members) for members in groups.values()), key=lambda c: c[0])
    class_of = {index: k for k, members in enumerate(classes) for index in members}
    edges = set()
    for j in range(n):
        for i in range(n):
            if adjacency[j, i] and class_of[j] != class_of[i]:
                edges.add((class_of[j], class_of[i]))
    closed = tuple(
        all(start != k for start, _ in edges) for k in range(len(classes))
    )
    return ClassDecomposition(
        classes=tuple(classes),
        closed=closed,
        irreducible=n_components == 1,
        class_edges=tuple(sorted(edges)),
    )


def _simplex_normalize(vector: np.ndarray) -> np.ndarray | None:
    total = float(vector.sum())
    if abs(total) < 1e-12 * max(1.0, float(np.abs(vector).max())):
        return None
    return vector / total


def unit_eigenvector_eigenvalue_one(
    matrix: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> EigenvalueOneResult:
    """Eigenvectors with eigenvalue 1, normalized so entries sum to 1.

    Found as the null space of (matrix - identity) via SVD, which gives a
    clean multiplicity test. A one-dimensional space yields kind "unique";
    a larger one is resolved through the class structure, returning one
    Perron vector per closed class; an empty one yields kind "none",
    signalling that the input was not generated by the model.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    basis = scipy.linalg.null_space(matrix - np.eye(n), rcond=tol.tol_rank)
    dimension = basis.shape[1]
    if dimension == 0:
        return EigenvalueOneResult(kind="none")
    if dimension == 1:
        vector = _simplex_normalize(basis[:, 0])
        if vector is None:
            return EigenvalueOneResult(kind="none")
        return EigenvalueOneResult(kind="unique", vector=vector)

    decomposition = irreducibility(matrix, tol)
    family = []
    family_classes = []
    for members, is_closed in zip(decomposition.classes, decomposition.closed):
        if not is_closed:
            continue
        idx = np.array(members)
        sub = matrix[np.ix_(idx, idx)]
        sub_basis = scipy.linalg.null_space(sub - np.eye(len(members)), rcond=tol.tol_rank)
        if sub_basis.shape[1] == 0:
            continue
        local = _simplex_normalize(sub_basis[:, 0])
        if local is None:
            continue
        full = np.zeros(n)
        full[idx] = local
        family.append(full)
        family_classes.append(members)
    if not family:
        return EigenvalueOneResult(kind="none")
    return EigenvalueOneResult(
        kind="family",
        family=tuple(family),
        family_classes=tuple(family_classes),
        classes=decomposition,
    )
