"""Subspaces of C^n with orthonormal stored bases.

A :class:`Subspace` is immutable; every constructor canonicalizes the basis
through the kernel's SVD orthonormalization, so two subspaces are compared by
the operator-norm gap between their orthogonal projectors.  All set
arithmetic (sum, intersection, complement) reduces to the kernel's rank
decisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernel
from .errors import DimensionMismatchError, InvarianceViolatedError
from .kernel import DEFAULT_TOL, Tolerances

__all__ = ["Subspace", "InvarianceReport", "invariance_report", "require_invariant"]


class Subspace:
    """A linear subspace of C^n, stored as an orthonormal column basis."""

    def __init__(self, ambient_dim: int, basis: np.ndarray):
        if ambient_dim < 0:
            raise DimensionMismatchError("ambient_dim must be nonnegative")
        basis = kernel.as_matrix(basis)
        if basis.shape[0] != ambient_dim:
            raise DimensionMismatchError(
                f"basis rows {basis.shape[0]} != ambient_dim {ambient_dim}"
            )
        self.ambient_dim = int(ambient_dim)
        self.basis = basis

    # -- constructors ------------------------------------------------------

    @classmethod
    def span(cls, vectors, ambient_dim: int, tol: Tolerances = DEFAULT_TOL) -> "Subspace":
        """Subspace spanned by the given vectors (columns or list of vectors)."""
        m = np.asarray(vectors, dtype=np.complex128)
        if m.ndim == 1:
            m = m.reshape(-1, 1)
        if m.size == 0:
            m = m.reshape(ambient_dim, -1)
        elif m.shape[0] != ambient_dim and m.shape[1] == ambient_dim:
            # accept a list of vectors as rows
            m = m.T
        return cls(ambient_dim, kernel.orthonormal_columns(m, tol))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=np.complex128))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=np.complex128))

    # -- basic queries -----------------------------------------------------

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def projector(self) -> np.ndarray:
        """Orthogonal projector onto this subspace, as an n x n matrix."""
        return self.basis @ self.basis.conj().T

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"

    def _check_ambient(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError(
                f"ambient dims differ: {self.ambient_dim} vs {other.ambient_dim}"
            )

    # -- arithmetic --------------------------------------------------------

    def complement(self) -> "Subspace":
        """Orthogonal complement; dims add up to the ambient dim exactly."""
        return Subspace(self.ambient_dim, kernel.full_complement(self.basis))

    def add(self, other: "Subspace", tol: Tolerances = DEFAULT_TOL) -> "Subspace":
        """Subspace sum (span of the union)."""
        self._check_ambient(other)
        stacked = np.hstack([self.basis, other.basis])
        return Subspace(self.ambient_dim, kernel.orthonormal_columns(stacked, tol))

    def intersect(self, other: "Subspace", tol: Tolerances = DEFAULT_TOL) -> "Subspace":
        """Intersection, via the joint kernel of the two complement projectors."""
        self._check_ambient(other)
        n = self.ambient_dim
        eye = np.eye(n, dtype=np.complex128)
        stacked = np.vstack([eye - self.projector, eye - other.projector])
        return Subspace(n, kernel.null_space(stacked, tol))

    def gap(self, other: "Subspace") -> float:
        """Operator-norm distance between the two projectors."""
        self._check_ambient(other)
        return kernel.opnorm(self.projector - other.projector)

    def equals(self, other: "Subspace", tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.gap(other) <= tol.eq_abs

    def contains_vector(self, v, tol: Tolerances = DEFAULT_TOL) -> bool:
        v = np.asarray(v, dtype=np.complex128).reshape(-1)
        if v.shape[0] != self.ambient_dim:
            raise DimensionMismatchError("vector length does not match ambient dim")
        resid = v - self.projector @ v
        return float(np.linalg.norm(resid)) <= tol.eq_abs * (1.0 + float(np.linalg.norm(v)))

    def contains(self, other: "Subspace", tol: Tolerances = DEFAULT_TOL) -> bool:
        """True when ``other`` is a subset of this subspace."""
        return self.containment_defect(other) <= tol.eq_abs

    def containment_defect(self, other: "Subspace") -> float:
        """Norm of the part of ``other`` sticking out of this subspace."""
        self._check_ambient(other)
        if other.dim == 0:
            return 0.0
        resid = other.basis - self.projector @ other.basis
        return kernel.opnorm(resid)

    def apply(self, matrix: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> "Subspace":
        """Image of this subspace under a matrix (rows give the new ambient)."""
        matrix = kernel.as_matrix(matrix)
        if matrix.shape[1] != self.ambient_dim:
            raise DimensionMismatchError("matrix columns must match ambient dim")
        return Subspace(matrix.shape[0], kernel.orthonormal_columns(matrix @ self.basis, tol))


@dataclass(frozen=True)
class InvarianceReport:
    """Outcome of the three equivalent invariance conditions for (M, S).

    The conditions characterize when the orthogonal projection onto S maps M
    into itself:

    1. ``projects_into``: P_S(M) is a subset of M;
    2. ``splits``: M = (S meet M) + (S-perp meet M) as an orthogonal sum;
    3. ``projection_matches``: span(P_S(M)) equals S meet M.

    ``residuals`` records the numerical defect of each condition.
    """

    projects_into: bool
    splits: bool
    projection_matches: bool
    residuals: tuple[float, float, float]
    witness: np.ndarray | None

    @property
    def invariant(self) -> bool:
        return self.projects_into

    @property
    def consistent(self) -> bool:
        return self.projects_into == self.splits == self.projection_matches

    def __bool__(self) -> bool:
        return self.invariant


def invariance_report(m: Subspace, s: Subspace, tol: Tolerances = DEFAULT_TOL) -> InvarianceReport:
    """Check whether P_S maps the subspace ``m`` into itself.

    Evaluates all three equivalent formulations and reports them separately;
    disagreement between them flags borderline rank decisions.
    """
    m._check_ambient(s)
    s_perp = s.complement()

    # condition 1: columns of P_S @ basis(M) stay inside M
    projected = s.projector @ m.basis
    resid_mat = projected - m.projector @ projected
    r1 = kernel.opnorm(resid_mat)
    witness = None
    if r1 > tol.eq_abs and m.dim > 0:
        worst = int(np.argmax(np.linalg.norm(resid_mat, axis=0)))
        witness = m.basis[:, worst].copy()

    sm = s.intersect(m, tol)
    spm = s_perp.intersect(m, tol)

    # condition 2: the two slices recombine to all of M
    recombined = sm.add(spm, tol)
    r2 = recombined.gap(m)
    splits = r2 <= tol.eq_abs and sm.dim + spm.dim == m.dim

    # condition 3: span of the projected basis equals the slice S meet M
    proj_span = Subspace(s.ambient_dim, kernel.orthonormal_columns(projected, tol))
    r3 = proj_span.gap(sm)

    return InvarianceReport(
        projects_into=r1 <= tol.eq_abs,
        splits=splits,
        projection_matches=r3 <= tol.eq_abs,
        residuals=(r1, r2, r3),
        witness=witness,
    )


def require_invariant(m: Subspace, s: Subspace, tol: Tolerances = DEFAULT_TOL) -> InvarianceReport:
    """Like :func:`invariance_report` but raises when the projection escapes."""
    report = invariance_report(m, s, tol)
    if not report.invariant:
        raise InvarianceViolatedError(
            f"projection leaves the subspace (defect {report.residuals[0]:.3e})",
            witness=report.witness,
        )
    return report
