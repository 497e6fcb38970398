"""The deformation operator on invariant Q-sections and its adjoint.

Two independent routes exist for the adjoint (the Gram-matrix route and the
closed index formulas), and two independent routes exist for the operator
matrix itself (direct application versus the block split), so each pair acts
as an oracle for the other.
"""

import pytest

from hetmod import qcomplex as qc
from hetmod.exterior import EndForm, InvariantForm, VectorForm
from hetmod.scalars import GaussRat, S_ONE, Scalar


def test_q_basis_dimensions(iwasawa, calabi_eckmann):
    # value fiber: n covector slots + (r^2 - 1) gauge slots + n vector slots
    assert qc.q_basis(iwasawa, 0).dim == 9
    assert qc.q_basis(iwasawa, 1).dim == 27
    assert qc.q_basis(iwasawa, 2).dim == 27
    assert qc.q_basis(iwasawa, 3).dim == 9
    assert qc.q_basis(calabi_eckmann, 1).dim == 42


def test_coordinates_round_trip(builtins):
    for m in builtins:
        basis = qc.q_basis(m, 1)
        for i, s in enumerate(basis.sections):
            coords = qc.q_coordinates(s)
            assert coords[i] == S_ONE
            assert sum(1 for c in coords if c) == 1
            assert qc.section_from_coordinates(m, 1, coords) == s


def test_matrix_matches_direct_application(iwasawa, calabi_eckmann):
    for m in (iwasawa, calabi_eckmann):
        for p in (0, 1):
            op = qc.assemble_Dbar(m, p)
            basis = qc.q_basis(m, p)
            for j, s in enumerate(basis.sections):
                col = qc.q_coordinates(qc.apply_Dbar(s, m))
                for i in range(len(op.target_labels)):
                    assert op.entries[i][j] == col[i]


def test_block_reassembly(iwasawa, calabi_eckmann):
    for m in (iwasawa, calabi_eckmann):
        for p in (0, 1, 2):
            res = qc.reassembly_residuals(m, p)
            assert res == {"split": True, "dual": True}, (m.name, p)


def test_adjoint_formula_matches_gram_route(builtins):
    for m in builtins:
        for p in (1, 2, 3):
            via_gram = qc.assemble_Dstar(m, p)
            via_formula = qc.assemble_Dstar_formula(m, p)
            assert via_gram.entries == via_formula.entries, (m.name, p)


def test_adjoint_identity_symbolic(iwasawa):
    # <Dbar x, y> = <x, D* y> as polynomials in a, for all basis pairs
    p = 0
    D = qc.assemble_Dbar(iwasawa, p)
    Ds = qc.assemble_Dstar(iwasawa, p + 1)
    src = qc.q_basis(iwasawa, p)
    tgt = qc.q_basis(iwasawa, p + 1)
    for i in range(src.dim):
        x = [Scalar() for _ in range(src.dim)]
        x[i] = S_ONE
        Dx = [D.entries[k][i] for k in range(tgt.dim)]
        for j in range(tgt.dim):
            y = [Scalar() for _ in range(tgt.dim)]
            y[j] = S_ONE
            Dsy = [Ds.entries[k][j] for k in range(src.dim)]
            lhs = qc.gram_pair(iwasawa, p + 1, Dx, y)
            rhs = qc.gram_pair(iwasawa, p, x, Dsy)
            assert lhs == rhs


def test_gram_is_hermitian_positive_diagonal(builtins):
    for m in builtins:
        G = qc.gram(m, 1)
        ct = [[G[j][i].conjugate() for j in range(len(G))]
              for i in range(len(G))]
        assert G == ct
        for i in range(len(G)):
            assert G[i][i].im == 0 and G[i][i].re > 0


def test_nilpotency_report(iwasawa, torus, calabi_eckmann):
    # flat torus and the balanced-anomaly gauge-trivial model square to zero
    # identically in a; the nilmanifold square is confined to the covector
    # row and vanishes exactly at the model's own coupling
    assert qc.nilpotency_report(torus)["square_zero"]
    assert qc.nilpotency_report(calabi_eckmann)["square_zero"]
    rep = qc.nilpotency_report(iwasawa)
    assert not rep["square_zero"]
    assert rep["e1_only"]
    a0 = GaussRat.of(-4)
    for s in rep["residuals"]:
        assert all(not c.evaluate(a0)
                   for c in qc.q_coordinates(s)), "residual survives at a=-4"


def test_square_matches_anomaly_contraction(iwasawa):
    basis = qc.q_basis(iwasawa, 0)
    for s in basis.sections:
        dd = qc.apply_Dbar(qc.apply_Dbar(s, iwasawa), iwasawa)
        want = qc.expected_square_residual(iwasawa, s)
        assert dd.kappa == want
        assert not dd.gamma and not dd.w


def test_gauge_scaling_breaks_nilpotency(iwasawa):
    m2 = qc.scale_gauge(iwasawa, GaussRat.of(2))
    rep = qc.nilpotency_report(m2)
    assert not rep["square_zero"]
    assert rep["e1_only"]
    # the rescaled curvature moves the balancing coupling away from the
    # model's own value, so the square no longer vanishes at a = -4
    a0 = GaussRat.of(-4)
    survives = any(c.evaluate(a0)
                   for s in rep["residuals"]
                   for c in qc.q_coordinates(s))
    assert survives


def test_commutation_identity_on_vector_fields(builtins):
    for m in builtins:
        for j in range(m.n):
            comps = [InvariantForm.monomial(m.n, [], [])
                     if t == j else InvariantForm.zero(m.n, 0, 0)
                     for t in range(m.n)]
            w = VectorForm.build(m.n, 0, 0, comps)
            for l in range(m.n):
                assert not qc.commutation_residual(m, w, l), (m.name, j, l)


def test_duality_residual_flat_model(torus):
    # on the flat torus every constant section is closed, so the pairing
    # identity must hold for arbitrary constant inputs
    n, r = torus.n, torus.rank
    beta = EndForm.build(n, r, 0, 2, [
        [InvariantForm.monomial(n, [], [1, 2]) if (i, j) == (0, 1)
         else InvariantForm.zero(n, 0, 2) for j in range(r)]
        for i in range(r)])
    v = VectorForm.build(n, 0, 2, [
        InvariantForm.monomial(n, [], [1, 3]),
        InvariantForm.zero(n, 0, 2),
        InvariantForm.monomial(n, [], [2, 3]),
    ])
    w = VectorForm.build(n, 0, 0, [
        InvariantForm.monomial(n, [], []),
        InvariantForm.zero(n, 0, 0),
        InvariantForm.monomial(n, [], []),
    ])
    assert not qc.duality_residual(torus, beta, v, w, Scalar.of(1))
    assert not qc.duality_residual(torus, beta, v, w, Scalar.var())
