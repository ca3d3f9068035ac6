"""Linear relations (multivalued linear operators) between C^n spaces.

A linear relation from C^din to C^dout is any subspace of the product space
C^(din+dout); an ordinary operator is the special case whose multivalued part
is trivial.  The relation is stored as its graph, a :class:`Subspace` whose
vectors carry the input components first.  Domain, range, kernel and
multivalued part are projections or slices of the graph, and the whole
calculus (adjoint, sum, product, restriction, operator part) reduces to
subspace arithmetic.

Everything here is finite dimensional, so every relation is closed and
``closure`` is the identity.  A separate notion of a core is pointless for
the same reason: a dense subspace of a finite-dimensional domain is the
domain itself, so none is provided.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernel
from .errors import (
    ComponentMismatchError,
    DimensionMismatchError,
    InternalInconsistencyError,
)
from .kernel import DEFAULT_TOL, Tolerances
from .subspace import Subspace

__all__ = [
    "LinearRelation",
    "OperatorPartDecomposition",
    "identity_relation",
    "zero_operator_on",
    "mul_only",
]


class LinearRelation:
    """A linear relation from C^dim_in to C^dim_out, stored as its graph.

    The tolerance a relation is constructed under is kept on the instance so
    the lazily derived subspaces (dom, ran, ker, mul) use the same rank
    policy as the operation that produced the relation.
    """

    def __init__(self, dim_in: int, dim_out: int, graph: Subspace,
                 tol: Tolerances = DEFAULT_TOL):
        if graph.ambient_dim != dim_in + dim_out:
            raise DimensionMismatchError(
                f"graph ambient {graph.ambient_dim} != dim_in + dim_out = {dim_in + dim_out}"
            )
        self.dim_in = int(dim_in)
        self.dim_out = int(dim_out)
        self.graph = graph
        self._tol = tol

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_graph(cls, vectors, dim_in: int, dim_out: int,
                   tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Relation spanned by (input, output) pairs stacked as vectors."""
        g = Subspace.span(vectors, dim_in + dim_out, tol)
        return cls(dim_in, dim_out, g, tol=tol)

    @classmethod
    def from_matrix(cls, m, tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Graph of an everywhere-defined matrix operator."""
        m = kernel.as_matrix(m)
        dout, din = m.shape
        stacked = np.vstack([np.eye(din, dtype=np.complex128), m])
        return cls(din, dout, Subspace(din + dout, kernel.orthonormal_columns(stacked, tol)), tol=tol)

    @classmethod
    def from_operator_and_mul(cls, domain: Subspace, matrix_on_domain, mul: Subspace,
                              tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Single-valued part plus multivalued part, for square relations.

        ``matrix_on_domain`` is a ``dim(domain) x dim(domain)`` matrix in the
        coordinates of the stored domain basis, so the single-valued part maps
        the domain into itself; the graph is its span together with
        ``{0} x mul``.
        """
        if domain.ambient_dim != mul.ambient_dim:
            raise DimensionMismatchError("domain and mul must share the ambient space")
        k = domain.dim
        m = kernel.as_matrix(matrix_on_domain, (k, k)) if k else np.zeros((0, 0), np.complex128)
        images = domain.basis @ m
        return cls.from_images_and_mul(domain, images, mul, tol=tol)

    @classmethod
    def from_images_and_mul(cls, domain: Subspace, images, mul: Subspace,
                            tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Graph through ambient image vectors: pairs (basis column, image column).

        ``images`` has one column per domain basis vector, rows in the output
        space; the multivalued part ``mul`` is appended as ``{0} x mul``.
        """
        din = domain.ambient_dim
        dout = mul.ambient_dim
        images = kernel.as_matrix(images) if np.size(images) else np.zeros((dout, domain.dim), np.complex128)
        if images.shape != (dout, domain.dim):
            raise DimensionMismatchError(
                f"images shape {images.shape} != ({dout}, {domain.dim})"
            )
        op_cols = np.vstack([domain.basis, images])
        mul_cols = np.vstack([np.zeros((din, mul.dim), dtype=np.complex128), mul.basis])
        g = kernel.orthonormal_columns(np.hstack([op_cols, mul_cols]), tol)
        return cls(din, dout, Subspace(din + dout, g), tol=tol)

    # -- slices of the graph -------------------------------------------------

    @property
    def _gin(self) -> np.ndarray:
        return self.graph.basis[: self.dim_in]

    @property
    def _gout(self) -> np.ndarray:
        return self.graph.basis[self.dim_in:]

    @cached_property
    def dom(self) -> Subspace:
        """Domain: first components of the graph."""
        return Subspace(self.dim_in, kernel.orthonormal_columns(self._gin, self._tol))

    @cached_property
    def ran(self) -> Subspace:
        """Range: second components of the graph."""
        return Subspace(self.dim_out, kernel.orthonormal_columns(self._gout, self._tol))

    @cached_property
    def mul(self) -> Subspace:
        """Multivalued part: values paired with input zero."""
        coeff = kernel.null_space(self._gin, self._tol)
        vecs = self._gout @ coeff
        return Subspace(self.dim_out, kernel.orthonormal_columns(vecs, self._tol))

    @cached_property
    def ker(self) -> Subspace:
        """Kernel: inputs paired with output zero."""
        coeff = kernel.null_space(self._gout, self._tol)
        vecs = self._gin @ coeff
        return Subspace(self.dim_in, kernel.orthonormal_columns(vecs, self._tol))

    def is_operator(self) -> bool:
        """True when the multivalued part is trivial."""
        return self.mul.dim == 0

    def __repr__(self):
        return (
            f"LinearRelation(dim_in={self.dim_in}, dim_out={self.dim_out}, "
            f"graph_dim={self.graph.dim})"
        )

    # -- calculus ------------------------------------------------------------

    def closure(self) -> "LinearRelation":
        """Identity in finite dimension; present so formulas read naturally."""
        return self

    def adjoint(self) -> "LinearRelation":
        """Adjoint relation: flip of the orthogonal complement of the graph.

        The complement of the graph inside the product space is rotated by
        (x, y) -> (y, -x), which lands in the product taken in the opposite
        order.  Both steps are unitary, so no rank decision is involved.
        """
        comp = kernel.full_complement(self.graph.basis)
        flipped = np.vstack([comp[self.dim_in:], -comp[: self.dim_in]])
        return LinearRelation(self.dim_out, self.dim_in,
                              Subspace(self.dim_in + self.dim_out, flipped),
                              tol=self._tol)

    def add(self, other: "LinearRelation", tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Relation sum: pairs (x, y + z) with (x, y) here and (x, z) there.

        The domain of the sum is the intersection of the domains.
        """
        self._check_same_spaces(other)
        gt, gs = self.graph.basis, other.graph.basis
        r = gt.shape[1]
        constraint = np.hstack([gt[: self.dim_in], -gs[: self.dim_in]])
        coeff = kernel.null_space(constraint, tol)
        x = gt[: self.dim_in] @ coeff[:r]
        y = gt[self.dim_in:] @ coeff[:r] + gs[self.dim_in:] @ coeff[r:]
        g = kernel.orthonormal_columns(np.vstack([x, y]), tol)
        return LinearRelation(self.dim_in, self.dim_out,
                              Subspace(self.dim_in + self.dim_out, g), tol=tol)

    def cw_sum(self, other: "LinearRelation", tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Componentwise sum: span of the two graphs inside the product space."""
        self._check_same_spaces(other)
        g = self.graph.add(other.graph, tol)
        return LinearRelation(self.dim_in, self.dim_out, g, tol=tol)

    def compose(self, inner: "LinearRelation", tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Product self o inner: pairs (x, y) with (x, z) in inner, (z, y) in self."""
        if inner.dim_out != self.dim_in:
            raise DimensionMismatchError(
                f"cannot compose: inner dim_out {inner.dim_out} != outer dim_in {self.dim_in}"
            )
        gi, go = inner.graph.basis, self.graph.basis
        r = gi.shape[1]
        mid = inner.dim_out
        constraint = np.hstack([gi[inner.dim_in:], -go[:mid]])
        coeff = kernel.null_space(constraint, tol)
        x = gi[: inner.dim_in] @ coeff[:r]
        y = go[mid:] @ coeff[r:]
        g = kernel.orthonormal_columns(np.vstack([x, y]), tol)
        return LinearRelation(inner.dim_in, self.dim_out,
                              Subspace(inner.dim_in + self.dim_out, g), tol=tol)

    def restrict(self, s: Subspace, tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Pairs of the relation whose input lies in ``s``."""
        if s.ambient_dim != self.dim_in:
            raise DimensionMismatchError("restriction subspace must live in the input space")
        g = self.graph.basis
        outside = (np.eye(self.dim_in, dtype=np.complex128) - s.projector) @ g[: self.dim_in]
        coeff = kernel.null_space(outside, tol)
        basis = kernel.orthonormal_columns(g @ coeff, tol)
        return LinearRelation(self.dim_in, self.dim_out,
                              Subspace(self.dim_in + self.dim_out, basis), tol=tol)

    def image(self, s: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
        """Values taken over inputs in ``s``.

        Since 0 always lies in ``s``, the image always contains the
        multivalued part.
        """
        return self.restrict(s, tol).ran

    def scale_output(self, c: complex, tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Relation of pairs (x, c*y).  For c = 0 this collapses to the zero
        operator on the domain and forgets the multivalued part."""
        g = self.graph.basis.copy()
        g[self.dim_in:] *= c
        basis = kernel.orthonormal_columns(g, tol)
        return LinearRelation(self.dim_in, self.dim_out,
                              Subspace(self.dim_in + self.dim_out, basis), tol=tol)

    # -- comparisons ---------------------------------------------------------

    def equals(self, other: "LinearRelation", tol: Tolerances = DEFAULT_TOL) -> bool:
        self._check_same_spaces(other)
        return self.graph.equals(other.graph, tol)

    def graph_gap(self, other: "LinearRelation") -> float:
        self._check_same_spaces(other)
        return self.graph.gap(other.graph)

    def includes(self, other: "LinearRelation", tol: Tolerances = DEFAULT_TOL) -> bool:
        """True when ``other`` is a subrelation (its graph is contained here)."""
        self._check_same_spaces(other)
        return self.graph.contains(other.graph, tol)

    def _check_same_spaces(self, other: "LinearRelation"):
        if self.dim_in != other.dim_in or self.dim_out != other.dim_out:
            raise DimensionMismatchError(
                f"relations act between different spaces: "
                f"({self.dim_in},{self.dim_out}) vs ({other.dim_in},{other.dim_out})"
            )

    # -- operator part -------------------------------------------------------

    def operator_part(self, tol: Tolerances = DEFAULT_TOL) -> "OperatorPartDecomposition":
        """Split a closed relation into a single-valued operator plus its mul.

        The operator part keeps the pairs whose output component is orthogonal
        to the multivalued part; together with ``{0} x mul`` it spans the
        original graph.  The returned matrix holds ambient images of the
        domain basis vectors.
        """
        m = self.mul
        g = self.graph.basis
        # keep graph directions whose output has no component along mul
        coeff = kernel.null_space(m.projector @ g[self.dim_in:], tol)
        g0 = kernel.orthonormal_columns(g @ coeff, tol)
        gin0, gout0 = g0[: self.dim_in], g0[self.dim_in:]
        if kernel.null_space(gin0, tol).shape[1] != 0:
            raise InternalInconsistencyError(
                "operator part is not single-valued; rank decisions disagree"
            )
        domain = self.dom
        if domain.dim != g0.shape[1]:
            raise InternalInconsistencyError(
                "operator part domain dimension disagrees with the relation domain"
            )
        # solve for the image of each domain basis vector
        c = kernel.pseudo_inverse(gin0, tol) @ domain.basis
        resid = kernel.opnorm(gin0 @ c - domain.basis)
        if resid > tol.eq_abs:
            raise InternalInconsistencyError(
                f"operator part solve residual {resid:.3e} exceeds tolerance"
            )
        images = gout0 @ c
        return OperatorPartDecomposition(domain=domain, images=images, mul=m,
                                         dim_in=self.dim_in, dim_out=self.dim_out)

    # -- viewing a relation inside component subspaces -----------------------

    def compress_to(self, u: Subspace, v: Subspace,
                    tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Coordinates of a relation whose graph lives inside ``u x v``.

        Rewrites the graph in the orthonormal bases of ``u`` and ``v``; the
        result is a relation between C^dim(u) and C^dim(v).  Raises when the
        graph actually leaves the product.
        """
        if u.ambient_dim != self.dim_in or v.ambient_dim != self.dim_out:
            raise DimensionMismatchError("component subspaces live in the wrong spaces")
        gin, gout = self._gin, self._gout
        defect = max(
            kernel.opnorm(gin - u.projector @ gin),
            kernel.opnorm(gout - v.projector @ gout),
        )
        if defect > tol.eq_abs:
            raise ComponentMismatchError(
                f"graph leaves the component product (defect {defect:.3e})"
            )
        basis = np.vstack([u.basis.conj().T @ gin, v.basis.conj().T @ gout])
        basis = kernel.orthonormal_columns(basis, tol)
        return LinearRelation(u.dim, v.dim, Subspace(u.dim + v.dim, basis), tol=tol)

    def embed_from(self, u: Subspace, v: Subspace) -> "LinearRelation":
        """Inverse of :meth:`compress_to`: map coordinates back into ambient."""
        if u.dim != self.dim_in or v.dim != self.dim_out:
            raise DimensionMismatchError("coordinate dims do not match the subspaces")
        basis = np.vstack([u.basis @ self._gin, v.basis @ self._gout])
        n = u.ambient_dim + v.ambient_dim
        return LinearRelation(u.ambient_dim, v.ambient_dim, Subspace(n, basis),
                              tol=self._tol)

    def adjoint_between(self, u: Subspace, v: Subspace,
                        tol: Tolerances = DEFAULT_TOL) -> "LinearRelation":
        """Adjoint of the relation viewed as acting from ``u`` to ``v``.

        The ambient adjoint of a relation squeezed into ``u x v`` picks up a
        huge multivalued part from the ambient complement of ``u``; taking the
        adjoint in coordinates and embedding back gives the adjoint relative
        to the component spaces instead.
        """
        compressed = self.compress_to(u, v, tol)
        return compressed.adjoint().embed_from(v, u)


@dataclass(frozen=True)
class OperatorPartDecomposition:
    """Operator part of a closed relation: domain basis images plus mul.

    ``images`` holds ambient vectors, one column per domain basis vector, all
    orthogonal to ``mul``.  ``as_relation`` rebuilds the single-valued graph;
    componentwise-summing it with ``{0} x mul`` recovers the original
    relation.
    """

    domain: Subspace
    images: np.ndarray
    mul: Subspace
    dim_in: int
    dim_out: int

    def as_relation(self, tol: Tolerances = DEFAULT_TOL) -> LinearRelation:
        return LinearRelation.from_images_and_mul(
            self.domain, self.images, Subspace.zero(self.dim_out), tol=tol
        )

    def reassemble(self, tol: Tolerances = DEFAULT_TOL) -> LinearRelation:
        return LinearRelation.from_images_and_mul(self.domain, self.images, self.mul, tol=tol)

    def ambient_matrix(self) -> np.ndarray:
        """The operator extended by zero off the domain, as a full matrix."""
        return self.images @ self.domain.basis.conj().T

    def compressed(self) -> np.ndarray:
        """Matrix of the operator part in the domain basis coordinates.

        Only faithful when the images stay inside the domain closure, as they
        do for selfadjoint relations.
        """
        return self.domain.basis.conj().T @ self.images


def identity_relation(n: int) -> LinearRelation:
    return LinearRelation.from_matrix(np.eye(n, dtype=np.complex128))

def zero_operator_on(domain: Subspace, dim_out: int | None = None) -> LinearRelation:
    """Everywhere-defined-on-``domain`` zero operator into C^dim_out."""
    dout = domain.ambient_dim if dim_out is None else dim_out
    images = np.zeros((dout, domain.dim), dtype=np.complex128)
    return LinearRelation.from_images_and_mul(domain, images, Subspace.zero(dout))

def mul_only(values: Subspace, dim_in: int | None = None) -> LinearRelation:
    """The purely multivalued relation {0} x values."""
    din = values.ambient_dim if dim_in is None else dim_in
    return LinearRelation.from_images_and_mul(
        Subspace.zero(din), np.zeros((values.ambient_dim, 0), np.complex128), values
    )
