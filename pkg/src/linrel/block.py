"""Block representation of a nonnegative selfadjoint relation along S + S-perp.

Given a closed subspace S whose orthogonal projection leaves the domain of A
invariant, the domain and multivalued part split as dom(A) = D1 + D2 and
mul(A) = M1 + M2 with D1, M1 inside S and D2, M2 inside the complement.  The
four corner relations obtained by restricting A and projecting its values

    a = P_S A|_S,   b = P_S A|_Sp,   c = P_Sp A|_S,   d = P_Sp A|_Sp

regenerate A: the block assembly of (a, b, c, d) equals A, and the diagonal
corners are nonnegative selfadjoint within their component spaces.  The
off-diagonal corners are controlled by one contraction: partial isometries
V1, V2 identify the roots of the diagonal corners with the root of A's
operator part, f = V1* V2 is a contraction between the domain closures, and

    b = a^(1/2) g d^(1/2)|_D2,   c = d^(1/2) g* a^(1/2)|_D1,

where g extends f by zero on M2.  This module computes all of those objects
numerically and records the residuals of every identity it relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .errors import ComponentMismatchError, InternalInconsistencyError
from .kernel import DEFAULT_TOL, Tolerances
from .nonneg import NonnegSelfAdjointRelation, friedrichs
from .relation import LinearRelation, mul_only
from .subspace import Subspace, require_invariant

__all__ = ["BlockRepresentation", "assemble", "analyze", "operator_block", "factorize"]


@dataclass
class BlockRepresentation:
    """All structure extracted from one (relation, subspace) pair.

    Subspaces: ``s`` and its complement split the domain into ``d1, d2``, the
    multivalued part into ``m1, m2``; ``n1, n2`` are the domain-slice
    closures (equal to the slices here).  Corner relations ``a, b, c, d``
    live in the ambient space with graphs inside the component products.
    Coordinate blocks ``a0, b0, c0, d0`` express A's operator part in the
    bases of ``n1`` and ``n2``.  The matrices ``v1, v2, f, g, df, dg`` are
    ambient-sized, supported on the component subspaces.
    """

    relation: NonnegSelfAdjointRelation
    s: Subspace
    s_perp: Subspace
    d1: Subspace
    d2: Subspace
    m1: Subspace
    m2: Subspace
    n1: Subspace
    n2: Subspace
    a: LinearRelation
    b: LinearRelation
    c: LinearRelation
    d: LinearRelation
    a0: np.ndarray
    b0: np.ndarray
    c0: np.ndarray
    d0: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    f: np.ndarray
    g: np.ndarray
    df: np.ndarray
    dg: np.ndarray
    a_diag: NonnegSelfAdjointRelation
    d_diag: NonnegSelfAdjointRelation
    a_sqrt: LinearRelation
    d_sqrt: LinearRelation
    a0_sqrt: np.ndarray
    d0_sqrt: np.ndarray
    tol: Tolerances
    diagnostics: dict = field(default_factory=dict)


def _check_component(rel: LinearRelation, dom_space: Subspace, ran_space: Subspace,
                     name: str, tol: Tolerances):
    gin = rel.graph.basis[: rel.dim_in]
    gout = rel.graph.basis[rel.dim_in:]
    din = kernel.opnorm(gin - dom_space.projector @ gin)
    dout = kernel.opnorm(gout - ran_space.projector @ gout)
    if max(din, dout) > tol.eq_abs:
        raise ComponentMismatchError(
            f"block '{name}' leaves its component product "
            f"(input defect {din:.3e}, output defect {dout:.3e})"
        )


def assemble(a: LinearRelation, b: LinearRelation, c: LinearRelation,
             d: LinearRelation, s: Subspace,
             tol: Tolerances = DEFAULT_TOL) -> LinearRelation:
    """Relation generated by a 2x2 block of relations along S + S-perp.

    The result pairs x = x1 + x2 with y = (w1 + z1) + (w2 + z2) where
    (x1, w1) in a, (x2, z1) in b, (x1, w2) in c, (x2, z2) in d.  Its domain
    is (dom a meet dom c) + (dom b meet dom d) and its multivalued part is
    (mul a + mul b) + (mul c + mul d).
    """
    n = s.ambient_dim
    for rel in (a, b, c, d):
        if rel.dim_in != n or rel.dim_out != n:
            raise ComponentMismatchError("blocks must be relations on the ambient space")
    sp = s.complement()
    _check_component(a, s, s, "a", tol)
    _check_component(b, sp, s, "b", tol)
    _check_component(c, s, sp, "c", tol)
    _check_component(d, sp, sp, "d", tol)

    ga, gb, gc, gd = (r.graph.basis for r in (a, b, c, d))
    ra, rb, rc, rd = (g.shape[1] for g in (ga, gb, gc, gd))
    zeros = np.zeros
    # shared inputs: the S-input of a and c agree, likewise b and d in S-perp
    top = np.hstack([ga[:n], zeros((n, rb), complex), -gc[:n], zeros((n, rd), complex)])
    bottom = np.hstack([zeros((n, ra), complex), gb[:n], zeros((n, rc), complex), -gd[:n]])
    coeff = kernel.null_space(np.vstack([top, bottom]), tol)
    ca, cb, cc, cd = np.split(coeff, [ra, ra + rb, ra + rb + rc])
    x = ga[:n] @ ca + gb[:n] @ cb
    y = ga[n:] @ ca + gb[n:] @ cb + gc[n:] @ cc + gd[n:] @ cd
    basis = kernel.orthonormal_columns(np.vstack([x, y]), tol)
    return LinearRelation(n, n, Subspace(2 * n, basis), tol=tol)


def _partial_isometry(corner: np.ndarray, frame: np.ndarray, root_ambient: np.ndarray,
                      tol: Tolerances) -> np.ndarray:
    """Partial isometry sending (corner root) h to (A root) h on the frame.

    ``corner`` is the compressed PSD block in the ``frame`` coordinates.  The
    eigenvectors with nonzero eigenvalue span the initial space; their images
    under the ambient root, scaled back by the root eigenvalues, are
    orthonormal in exact arithmetic.  A polar correction restores exact
    isometry, which keeps downstream contractions at norm <= 1 even for
    ill-conditioned corners.
    """
    n = root_ambient.shape[0]
    k = corner.shape[0]
    if k == 0:
        return np.zeros((n, n), dtype=np.complex128)
    w, q = np.linalg.eigh(kernel.hermitian_part(corner))
    # same floor as kernel.rank_cutoff: a corner below rank_rel is noise
    top = float(w[-1]) if w.size else 0.0
    keep = w > max(top, 1.0) * tol.rank_rel
    if not np.any(keep):
        return np.zeros((n, n), dtype=np.complex128)
    initial = frame @ q[:, keep]
    images = (root_ambient @ initial) / np.sqrt(w[keep])
    return kernel.nearest_isometry(images) @ initial.conj().T


def analyze(a_rel: NonnegSelfAdjointRelation, s: Subspace,
            tol: Tolerances = DEFAULT_TOL) -> BlockRepresentation:
    """Decompose a nonnegative selfadjoint relation along S + S-perp.

    Requires the orthogonal projection onto ``s`` to leave dom(A) invariant;
    raises :class:`InvarianceViolatedError` with a witness vector otherwise.
    The returned representation carries every derived object plus a
    diagnostics dict of identity residuals; the assembled corners are checked
    against A before returning.
    """
    big = a_rel
    n = big.dim
    if s.ambient_dim != n:
        raise ComponentMismatchError("subspace must live in the relation's space")
    require_invariant(big.dom, s, tol)
    sp = s.complement()

    d1 = s.intersect(big.dom, tol)
    d2 = sp.intersect(big.dom, tol)
    m1 = s.intersect(big.mul, tol)
    m2 = sp.intersect(big.mul, tol)
    n1, n2 = d1, d2

    diagnostics = {
        "dom_split": d1.add(d2, tol).gap(big.dom),
        "mul_split": m1.add(m2, tol).gap(big.mul),
        "s_split": n1.add(m1, tol).gap(s),
        "s_perp_split": n2.add(m2, tol).gap(sp),
    }

    ps = LinearRelation.from_matrix(s.projector, tol)
    psp = LinearRelation.from_matrix(sp.projector, tol)
    restricted_s = big.rel.restrict(s, tol)
    restricted_sp = big.rel.restrict(sp, tol)
    a = ps.compose(restricted_s, tol)
    b = ps.compose(restricted_sp, tol)
    c = psp.compose(restricted_s, tol)
    d = psp.compose(restricted_sp, tol)

    # diagonal corners are nonnegative selfadjoint within their components;
    # route through the Friedrichs extension, a no-op here, to pin that down
    a_diag = friedrichs(a.compress_to(s, s, tol), tol)
    d_diag = friedrichs(d.compress_to(sp, sp, tol), tol)
    a_f = a_diag.rel.embed_from(s, s)
    d_f = d_diag.rel.embed_from(sp, sp)
    diagnostics["a_friedrichs"] = a_f.graph_gap(a)
    diagnostics["d_friedrichs"] = d_f.graph_gap(d)

    op_amb = big.op_ambient
    b1, b2 = n1.basis, n2.basis
    a0 = b1.conj().T @ op_amb @ b1
    b0 = b1.conj().T @ op_amb @ b2
    c0 = b2.conj().T @ op_amb @ b1
    d0 = b2.conj().T @ op_amb @ b2

    a_sqrt = a_diag.sqrt().rel.embed_from(s, s)
    d_sqrt = d_diag.sqrt().rel.embed_from(sp, sp)
    a0_sqrt = s.basis @ a_diag.sqrt_ambient @ s.basis.conj().T
    d0_sqrt = sp.basis @ d_diag.sqrt_ambient @ sp.basis.conj().T

    root_amb = big.sqrt_ambient
    v1 = _partial_isometry(a0, b1, root_amb, tol)
    v2 = _partial_isometry(d0, b2, root_amb, tol)
    diagnostics["v1_intertwines"] = kernel.opnorm((v1 @ a0_sqrt - root_amb) @ b1)
    diagnostics["v2_intertwines"] = kernel.opnorm((v2 @ d0_sqrt - root_amb) @ b2)

    f = v1.conj().T @ v2
    g = f.copy()
    fc = b1.conj().T @ f @ b2
    df_c = kernel.psd_sqrt(np.eye(n2.dim, dtype=np.complex128) - fc.conj().T @ fc, tol)
    df = b2 @ df_c @ b2.conj().T
    gc = s.basis.conj().T @ g @ sp.basis
    dg_c = kernel.psd_sqrt(np.eye(sp.dim, dtype=np.complex128) - gc.conj().T @ gc, tol)
    dg = sp.basis @ dg_c @ sp.basis.conj().T
    diagnostics["f_norm_excess"] = max(0.0, kernel.opnorm(f) - 1.0)
    diagnostics["g_norm_excess"] = max(0.0, kernel.opnorm(g) - 1.0)

    rep = BlockRepresentation(
        relation=big, s=s, s_perp=sp, d1=d1, d2=d2, m1=m1, m2=m2, n1=n1, n2=n2,
        a=a_f, b=b, c=c, d=d_f, a0=a0, b0=b0, c0=c0, d0=d0,
        v1=v1, v2=v2, f=f, g=g, df=df, dg=dg,
        a_diag=a_diag, d_diag=d_diag, a_sqrt=a_sqrt, d_sqrt=d_sqrt,
        a0_sqrt=a0_sqrt, d0_sqrt=d0_sqrt, tol=tol, diagnostics=diagnostics,
    )

    assembled = assemble(rep.a, rep.b, rep.c, rep.d, s, tol)
    diagnostics["assemble_roundtrip"] = assembled.graph_gap(big.rel)
    if diagnostics["assemble_roundtrip"] > tol.eq_abs:
        raise InternalInconsistencyError(
            f"block corners do not regenerate the relation "
            f"(gap {diagnostics['assemble_roundtrip']:.3e})"
        )
    return rep


def reconstruct_b(rep: BlockRepresentation, tol: Tolerances | None = None) -> LinearRelation:
    """The relation a^(1/2) g d^(1/2)|_D2, which must equal corner b."""
    tol = tol or rep.tol
    g_rel = LinearRelation.from_matrix(rep.g, tol)
    chain = g_rel.compose(rep.d_sqrt.restrict(rep.d2, tol), tol)
    return rep.a_sqrt.compose(chain, tol)


def reconstruct_c(rep: BlockRepresentation, tol: Tolerances | None = None) -> LinearRelation:
    """The relation d^(1/2) g* a^(1/2)|_D1, which must equal corner c."""
    tol = tol or rep.tol
    gstar_rel = LinearRelation.from_matrix(rep.g.conj().T, tol)
    chain = gstar_rel.compose(rep.a_sqrt.restrict(rep.d1, tol), tol)
    return rep.d_sqrt.compose(chain, tol)


def operator_block(rep: BlockRepresentation,
                   tol: Tolerances | None = None) -> tuple[np.ndarray, ...]:
    """Coordinate blocks of A's operator part, with decomposition checks.

    Verifies that each corner splits into its single-valued part plus the
    matching multivalued slice: a and b carry {0} x M1, c and d carry
    {0} x M2.  Returns (a0, b0, c0, d0); residuals are stored in the
    representation's diagnostics.
    """
    tol = tol or rep.tol
    b1, b2 = rep.n1.basis, rep.n2.basis

    def split_gap(corner, block, dom, out_frame, in_frame, mul_slice):
        images = out_frame @ block @ in_frame.conj().T @ dom.basis
        single = LinearRelation.from_images_and_mul(
            dom, images, Subspace.zero(dom.ambient_dim), tol=tol
        )
        rebuilt = single.cw_sum(mul_only(mul_slice), tol)
        return corner.graph_gap(rebuilt)

    gaps = {
        "a_decomposed": split_gap(rep.a, rep.a0, rep.d1, b1, b1, rep.m1),
        "b_decomposed": split_gap(rep.b, rep.b0, rep.d2, b1, b2, rep.m1),
        "c_decomposed": split_gap(rep.c, rep.c0, rep.d1, b2, b1, rep.m2),
        "d_decomposed": split_gap(rep.d, rep.d0, rep.d2, b2, b2, rep.m2),
    }
    rep.diagnostics.update(gaps)
    worst = max(gaps.values())
    if worst > tol.eq_abs:
        name = max(gaps, key=gaps.get)
        raise InternalInconsistencyError(
            f"corner decomposition '{name}' gap {gaps[name]:.3e} exceeds tolerance"
        )
    return rep.a0, rep.b0, rep.c0, rep.d0


def factorize(rep: BlockRepresentation,
              tol: Tolerances | None = None) -> tuple[np.ndarray, LinearRelation]:
    """Column-operator factorization A = (W Z)* (W Z).

    Z is the diagonal relation acting as the root of a0 on D1 and the root of
    d0 on D2; W is the upper-triangular matrix with identity on N1, the
    contraction f in the corner and the defect root of f on N2.  The product
    of the adjoint flips reproduces A; the residual is recorded and enforced.
    """
    tol = tol or rep.tol
    big = rep.relation
    m_z = rep.a0_sqrt + rep.d0_sqrt
    z = LinearRelation.from_images_and_mul(
        big.dom, m_z @ big.dom.basis, Subspace.zero(big.dim), tol=tol
    )
    w = rep.n1.projector + rep.f + rep.df
    wz = LinearRelation.from_matrix(w, tol).compose(z, tol)
    product = wz.adjoint().compose(wz, tol)
    gap = product.graph_gap(big.rel)
    rep.diagnostics["factorize_gap"] = gap
    if gap > tol.eq_abs:
        raise InternalInconsistencyError(
            f"(WZ)*(WZ) differs from the relation (gap {gap:.3e})"
        )
    return w, z
