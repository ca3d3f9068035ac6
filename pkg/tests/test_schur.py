"""Complements, compressions, membership, and the independent matrix oracle.

The shorted-matrix oracle tests come first: everything else in this file is
allowed to lean on them.
"""

import numpy as np
import pytest

from linrel.errors import NotPsdError
from linrel.nonneg import leq, validate
from linrel.relation import LinearRelation, identity_relation, mul_only, zero_operator_on
from linrel.schur import (
    additive_decomposition,
    anderson_trapp,
    compress,
    is_member,
    maximality_probe,
    pekarev,
    schur_analysis,
    schur_complement,
)
from linrel.subspace import Subspace

E1 = np.array([1.0, 0.0], dtype=complex)
E2 = np.array([0.0, 1.0], dtype=complex)
SPAN_E1 = Subspace.span([E1], 2)
SPAN_E2 = Subspace.span([E2], 2)


def _psd(rows):
    return np.array(rows, dtype=complex)


def _e2_relation():
    return validate(LinearRelation.from_matrix(_psd([[2.0, 1.0], [1.0, 1.0]])))


def _e3_relation():
    return validate(LinearRelation.from_operator_and_mul(
        SPAN_E1, np.eye(1, dtype=complex), SPAN_E2))


def _e4_relation():
    return validate(mul_only(Subspace.full(2)))


# ---------------------------------------------------------------- the oracle


def test_shorted_identity():
    assert np.allclose(anderson_trapp(np.eye(2), SPAN_E1), np.diag([0.0, 1.0]),
                       atol=1e-12)


def test_shorted_dense():
    out = anderson_trapp(_psd([[2.0, 1.0], [1.0, 1.0]]), SPAN_E1)
    assert np.allclose(out, [[0.0, 0.0], [0.0, 0.5]], atol=1e-12)


def test_shorted_block_diagonal():
    out = anderson_trapp(np.diag([3.0, 7.0]).astype(complex), SPAN_E1)
    assert np.allclose(out, np.diag([0.0, 7.0]), atol=1e-12)


def test_shorted_matches_classical_formula():
    c = np.array([[1.0, 2.0, 0.0],
                  [0.0, 1.0 + 1.0j, 1.0],
                  [1.0, 0.0, 1.0 - 0.5j]], dtype=complex)
    m = c.conj().T @ c
    s = Subspace.span([np.eye(3)[0].astype(complex), np.eye(3)[1].astype(complex)], 3)
    a, b, d = m[:2, :2], m[:2, 2:], m[2:, 2:]
    classical = d - b.conj().T @ np.linalg.pinv(a) @ b
    out = anderson_trapp(m, s)
    assert np.allclose(out[2:, 2:], classical, atol=1e-10)
    assert np.allclose(out[:2, :], 0.0, atol=1e-10)


def test_shorted_rejects_indefinite():
    with pytest.raises(NotPsdError):
        anderson_trapp(_psd([[1.0, 2.0], [2.0, 1.0]]), SPAN_E1)


# ------------------------------------------------- frozen complement values


def test_complement_of_identity():
    res = schur_analysis(validate(identity_relation(2)), SPAN_E1)
    assert np.allclose(res.schur.to_matrix(), np.diag([0.0, 1.0]), atol=1e-12)
    assert np.allclose(res.compression.to_matrix(), np.diag([1.0, 0.0]), atol=1e-12)
    assert res.l_space.equals(SPAN_E1)


def test_complement_of_dense_matrix():
    res = schur_analysis(_e2_relation(), SPAN_E1)
    assert np.allclose(res.schur.to_matrix(), [[0.0, 0.0], [0.0, 0.5]], atol=1e-12)
    assert np.allclose(res.compression.to_matrix(), [[2.0, 1.0], [1.0, 0.5]], atol=1e-12)
    assert max(res.diagnostics.values()) < 1e-10


def test_complement_with_mul():
    res = schur_analysis(_e3_relation(), SPAN_E1)
    expected = zero_operator_on(SPAN_E1, 2).cw_sum(mul_only(SPAN_E2))
    assert res.schur.rel.graph_gap(expected) < 1e-10
    assert res.compression.rel.graph_gap(_e3_relation().rel) < 1e-10
    assert res.l_space.equals(SPAN_E1)


def test_complement_of_pure_mul():
    res = schur_analysis(_e4_relation(), SPAN_E1)
    assert res.schur.dom.equals(SPAN_E1)
    assert res.schur.mul.equals(SPAN_E2)
    assert np.allclose(res.schur.op_compressed, [[0.0]], atol=1e-12)
    assert res.compression.rel.equals(_e4_relation().rel)


def test_complement_matches_oracle_on_matrices():
    rng = np.random.default_rng(321)
    for n in (2, 3, 5):
        c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        m = c.conj().T @ c
        s = Subspace.span([rng.standard_normal(n) + 1j * rng.standard_normal(n)], n)
        a = validate(LinearRelation.from_matrix(m))
        formula = schur_complement(a, s)
        assert np.allclose(formula.to_matrix(), anderson_trapp(m, s), atol=1e-8)


def test_compression_shares_dom_and_mul(battery_analyses):
    for _, a, _, _, res in battery_analyses[:30]:
        assert res.compression.dom.gap(a.dom) < 1e-8
        assert res.compression.mul.gap(a.mul) < 1e-8


# -------------------------------------------------------- membership and max


def test_member_zero_and_complement():
    a = _e2_relation()
    zero = validate(LinearRelation.from_matrix(np.zeros((2, 2), dtype=complex)))
    assert is_member(a, SPAN_E1, zero)
    assert is_member(a, SPAN_E1, schur_complement(a, SPAN_E1))


def test_member_boundary():
    a = _e2_relation()
    assert is_member(a, SPAN_E1, validate(LinearRelation.from_matrix(np.diag([0.0, 0.5]))))
    assert not is_member(a, SPAN_E1, validate(LinearRelation.from_matrix(np.diag([0.0, 0.6]))))


def test_member_needs_range_in_complement():
    a = _e2_relation()
    sideways = validate(LinearRelation.from_matrix(np.diag([0.5, 0.0])))
    assert not is_member(a, SPAN_E1, sideways)


def test_maximality_identity():
    a = validate(identity_relation(2))
    report = maximality_probe(a, SPAN_E1, seed=5, samples=50)
    assert report.ok
    assert report.members + report.rejected == 50
    assert report.members >= 25


def test_maximality_dense():
    report = maximality_probe(_e2_relation(), SPAN_E1, seed=11, samples=100)
    assert report.ok and report.members >= 50


def test_scaled_complement_is_member():
    a = _e2_relation()
    res = schur_analysis(a, SPAN_E1)
    assert is_member(a, SPAN_E1, res.schur.scale(1.0))
    assert is_member(a, SPAN_E1, res.schur.scale(0.3))


# ------------------------------------------------------------ decompositions


def test_additive_identity():
    dec = additive_decomposition(validate(identity_relation(2)), SPAN_E1)
    assert dec.verified and dec.sum_gap < 1e-12
    total = dec.compression.rel.add(dec.schur.rel)
    assert total.equals(identity_relation(2))


def test_additive_dense():
    dec = additive_decomposition(_e2_relation(), SPAN_E1)
    assert dec.verified
    assert np.allclose(dec.compression.to_matrix() + dec.schur.to_matrix(),
                       [[2.0, 1.0], [1.0, 1.0]], atol=1e-10)


def test_additive_absorbs_mul():
    dec = additive_decomposition(_e3_relation(), SPAN_E1)
    assert dec.verified
    assert dec.compression.rel.add(dec.schur.rel).graph_gap(_e3_relation().rel) < 1e-10


def test_complement_idempotent():
    a = _e2_relation()
    first = schur_complement(a, SPAN_E1)
    second = schur_complement(first, SPAN_E1)
    assert second.rel.equals(first.rel)


def test_complement_idempotent_on_battery(battery_analyses):
    for _, _, s, _, res in battery_analyses[:15]:
        again = schur_complement(res.schur, s)
        assert again.rel.graph_gap(res.schur.rel) < 1e-8


def test_complement_below_and_ranged(battery_analyses):
    for _, a, s, _, res in battery_analyses[:30]:
        assert leq(res.schur, a)
        assert res.rep.s_perp.containment_defect(res.schur.rel.ran) < 1e-8


# ------------------------------------------------------- projection route


def test_projection_route_matches_formula():
    for rel in (_e2_relation(), _e3_relation(), _e4_relation(),
                validate(identity_relation(2))):
        out = pekarev(rel, SPAN_E1)
        assert out.diagnostics["schur_gap"] < 1e-10
        assert out.diagnostics["compression_gap"] < 1e-10
        assert max(out.diagnostics["condition_residuals"]) < 1e-10


def test_projection_route_pivot_spaces():
    out = pekarev(_e3_relation(), SPAN_E1)
    assert out.l_space.equals(SPAN_E1)
    out = pekarev(_e4_relation(), SPAN_E1)
    assert out.l_space.dim == 0


def test_projection_route_on_battery(battery_analyses):
    for _, a, s, _, res in battery_analyses[:30]:
        out = pekarev(a, s, result=res)
        assert out.diagnostics["schur_gap"] < 1e-8
        assert out.diagnostics["compression_gap"] < 1e-8
