"""Dense complex matrix kernel: tolerances, rank decisions, factorizations.

All numerical rank decisions in the package go through this module and use a
single policy: a singular value counts as nonzero when it exceeds
``rank_rel * sigma_max``.  Equality of subspaces and relations is judged by
projector gap against the absolute tolerance ``eq_abs``.  Keeping both knobs
in one :class:`Tolerances` object and threading it through every operation is
what makes results reproducible across the whole pipeline.

Matrices are plain numpy arrays in complex double precision; real input is
promoted on entry.  Zero-sized matrices (0 rows or 0 columns) are legal
everywhere and denote maps to or from the trivial space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotPsdError,
    UnsolvableError,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "as_matrix",
    "opnorm",
    "hermitian_part",
    "hermitian_eig",
    "orthonormal_columns",
    "null_space",
    "full_complement",
    "psd_sqrt",
    "pseudo_inverse",
    "pseudo_apply_inverse",
    "nearest_isometry",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical policy knobs shared by every operation.

    ``rank_rel``: relative singular value cutoff for rank decisions.
    ``eq_abs``: absolute tolerance for equality of subspaces, relations,
    residuals and eigenvalue sign checks.
    """

    rank_rel: float = 1e-10
    eq_abs: float = 1e-8

    def __post_init__(self):
        if not (0.0 < self.rank_rel < 1.0):
            raise ValueError(f"rank_rel must lie in (0, 1), got {self.rank_rel}")
        if not (0.0 < self.eq_abs < 1.0):
            raise ValueError(f"eq_abs must lie in (0, 1), got {self.eq_abs}")


DEFAULT_TOL = Tolerances()


def as_matrix(data, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce ``data`` to a complex128 matrix, rejecting non-finite entries."""
    m = np.asarray(data, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-d array, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if shape is not None and m.shape != shape:
        raise DimensionMismatchError(f"expected shape {shape}, got {m.shape}")
    return m


def opnorm(m: np.ndarray) -> float:
    """Operator 2-norm; zero for empty matrices."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def hermitian_eig(h, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with real eigenvalues ``w`` ascending and unitary ``v``
    such that ``h = v @ diag(w) @ v.conj().T``.  Raises
    :class:`NotHermitianError` when the anti-Hermitian part exceeds
    ``eq_abs * (1 + ||h||)``.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionMismatchError(f"square matrix required, got {h.shape}")
    if h.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    defect = opnorm(h - h.conj().T)
    if defect > tol.eq_abs * (1.0 + opnorm(h)):
        raise NotHermitianError(f"anti-Hermitian defect {defect:.3e} exceeds tolerance")
    w, v = np.linalg.eigh(hermitian_part(h))
    return w, v


def _svd(m: np.ndarray):
    return np.linalg.svd(m, full_matrices=False)


def rank_cutoff(s: np.ndarray, tol: Tolerances) -> float:
    """Singular value cutoff: ``rank_rel * max(sigma_max, 1)``.

    Relative to the top singular value, with an absolute floor at 1.  All
    graph and projector constructions in this library are at unit scale, so
    a matrix whose largest singular value sits below ``rank_rel`` is
    cancellation noise, not data; without the floor its noise directions
    would count as full rank.
    """
    top = float(s[0]) if s.size else 0.0
    return tol.rank_rel * max(top, 1.0)


def orthonormal_columns(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis for the column span of ``m``.

    Rank is decided by the shared cutoff :func:`rank_cutoff`.  An input with
    no numerically independent columns yields an ``(n, 0)`` result.
    """
    m = as_matrix(m)
    n = m.shape[0]
    if m.size == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    u, s, _ = _svd(m)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((n, 0), dtype=np.complex128)
    r = int(np.sum(s > rank_cutoff(s, tol)))
    return np.ascontiguousarray(u[:, :r])


def null_space(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis for the kernel of ``m`` (an ``(ncols, k)`` matrix)."""
    m = as_matrix(m)
    rows, cols = m.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    if rows == 0 or m.size == 0 or not m.any():
        return np.eye(cols, dtype=np.complex128)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    r = int(np.sum(s > rank_cutoff(s, tol))) if s.size else 0
    return np.ascontiguousarray(vh[r:].conj().T)


def full_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of orthonormal ``basis``.

    Exact dimension count: an ``(n, k)`` input yields an ``(n, n-k)`` result.
    """
    basis = as_matrix(basis)
    n, k = basis.shape
    if k == 0:
        return np.eye(n, dtype=np.complex128)
    if k == n:
        return np.zeros((n, 0), dtype=np.complex128)
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return np.ascontiguousarray(u[:, k:])


def psd_sqrt(h, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-eq_abs, 0)`` are clamped to zero; roundoff from Gram
    constructions lands there.  An eigenvalue below ``-eq_abs`` raises
    :class:`NotPsdError` with the witness value.

    Eigenvalues below the shared rank cutoff are zeroed outright, not
    square-rooted: the root would amplify eigenvalue noise eps to sqrt(eps),
    promoting a numerically-zero block to a visible spurious action.
    """
    w, v = hermitian_eig(h, tol)
    if w.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    wmin = float(w[0])
    if wmin < -tol.eq_abs:
        raise NotPsdError(f"eigenvalue {wmin:.3e} below -eq_abs", witness=wmin)
    w = np.clip(w, 0.0, None)
    w[w < rank_cutoff(w[::-1], tol)] = 0.0
    root = (v * np.sqrt(w)) @ v.conj().T
    return hermitian_part(root)


def pseudo_inverse(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse with the shared rank cutoff."""
    m = as_matrix(m)
    if m.size == 0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    u, s, vh = _svd(m)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    keep = s > rank_cutoff(s, tol)
    inv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    return vh.conj().T @ (inv[:, None] * u.conj().T)


def pseudo_apply_inverse(r, b, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Minimal-norm solution ``y`` of ``r @ y = b``.

    Every column of ``b`` must lie in the column span of ``r`` within
    ``eq_abs * (1 + ||column||)``; otherwise :class:`UnsolvableError`.  The
    solution columns lie in the row-space support of ``r``.
    """
    r = as_matrix(r)
    b = as_matrix(b)
    if r.shape[0] != b.shape[0]:
        raise DimensionMismatchError(
            f"row counts differ: {r.shape[0]} vs {b.shape[0]}"
        )
    y = pseudo_inverse(r, tol) @ b
    resid = r @ y - b
    for j in range(b.shape[1]):
        scale = 1.0 + float(np.linalg.norm(b[:, j]))
        if float(np.linalg.norm(resid[:, j])) > tol.eq_abs * scale:
            raise UnsolvableError(
                f"column {j} leaves the span of the coefficient matrix"
            )
    return y


def nearest_isometry(w: np.ndarray) -> np.ndarray:
    """Polar factor of ``w``: the nearest matrix with orthonormal columns.

    Used to restore exact isometry after constructions that divide by small
    singular values; keeps operator norms at 1 up to machine precision.
    """
    w = as_matrix(w)
    if w.size == 0:
        return w.copy()
    u, _, vh = _svd(w)
    return u @ vh
