"""Coordinate-chart side: polynomial forms, the radial primitive, potential
construction and the conjugation identity for the deformation operator."""

import random

import pytest

from hetmod import chartlocal as cl
from hetmod.geometry import ModelError
from hetmod.scalars import GR_ONE, GR_ZERO, GaussRat


MC = 3


def zp(k):
    return cl.Poly.coord(MC, k)


def zbp(k):
    return cl.Poly.coord(MC, k, anti=True)


def cp(c):
    return cl.Poly.const(MC, GaussRat.of(c))


def test_poly_algebra():
    f = zp(0) * zbp(1) + cp(2)
    g = zp(0) - zbp(1)
    assert f * g == g * f
    assert f.diff_z(0) == zbp(1)
    assert f.diff_zbar(1) == zp(0)
    assert f.diff_zbar(0) == cl.Poly.zero(MC)
    assert f.conjugate() == zbp(0) * zp(1) + cp(2)
    assert not f.is_holomorphic()
    assert (zp(0) * zp(2) + cp(1)).is_holomorphic()


def test_poly_antiholomorphic_split():
    f = zp(0) + zp(1) * zbp(0) + zbp(0) * zbp(1)
    split = f.antiholomorphic_split()
    assert sorted(split) == [0, 1, 2]
    assert split[0] == zp(0)
    assert split[2] == zbp(0) * zbp(1)


def _random_form(rng, p, q):
    acc = cl.ChartForm.zero(MC, p, q)
    pool = [cp(1), cp(-1), zp(0), zp(1), zbp(2), zp(2) * zbp(0)]
    for _ in range(4):
        holo = rng.sample(range(1, MC + 1), p)
        anti = rng.sample(range(1, MC + 1), q)
        acc = acc + cl.ChartForm.monomial(MC, holo, anti, rng.choice(pool))
    return acc


def test_chart_differentials_square_to_zero():
    rng = random.Random(7)
    for p, q in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)]:
        x = _random_form(rng, p, q)
        assert not cl.dbar_chart(cl.dbar_chart(x))
        assert not cl.partial_chart(cl.partial_chart(x))
        mixed = (cl.partial_chart(cl.dbar_chart(x))
                 + cl.dbar_chart(cl.partial_chart(x)))
        assert not mixed


def test_homotopy_inverts_dbar_on_exact_forms():
    rng = random.Random(11)
    for p, q in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1)]:
        y = _random_form(rng, p, q)
        x = cl.dbar_chart(y)
        if not x:
            continue
        eta = cl.dbar_homotopy(x)
        assert cl.dbar_chart(eta) == x, (p, q)


def test_homotopy_rejects_functions():
    with pytest.raises(cl.FormError):
        cl.dbar_homotopy(cl.ChartForm.func(zp(0)))


def test_one_form_parser():
    parsed = cl._parse_one_form(3, "-dz3 + z1 dz2")
    assert parsed == [(cp(-1), 3), (zp(0), 2)]
    parsed = cl._parse_one_form(3, "1/2 z1 z2 dz1")
    assert parsed == [(zp(0) * zp(1) * cp("1/2"), 1)]
    with pytest.raises(ModelError):
        cl._parse_one_form(3, "z1 z2")
    with pytest.raises(ModelError):
        cl._parse_one_form(3, "dz9")


def test_chart_data_iwasawa(iwasawa):
    cd = cl.chart_data(iwasawa)
    assert (cd.m_coords, cd.n, cd.rank) == (3, 3, 2)
    # the only nonzero holomorphic-frame Christoffel entries
    gam = [(a, c, b) for a in range(3) for c in range(3) for b in range(3)
           if cd.Gamma[a][c][b]]
    assert gam == [(0, 2, 1)]
    assert cd.Gamma[0][2][1] == cp(-1)
    gamp = [(a, c, b) for a in range(3) for c in range(3) for b in range(3)
            if cd.GammaPlus[a][c][b]]
    assert gamp == [(1, 2, 0)]
    assert cd.GammaPlus[1][2][0] == cp(-1)
    # torsion in coordinates: dz1^dz2^(1/2 dzbar3 - 1/2 zbar1 dzbar2)
    assert cd.T_chart.coeff([1, 2], [3]) == cp("1/2")
    assert cd.T_chart.coeff([1, 2], [2]) == zbp(0).scale(GaussRat.of("-1/2"))


def test_chartless_models_refuse(torus, calabi_eckmann):
    for m in (torus, calabi_eckmann):
        with pytest.raises(ModelError):
            cl.chart_data(m)


def test_gauge_potential_value(iwasawa):
    t = cl.build_trivialization(iwasawa)
    i4 = GaussRat.of(0, "1/4")
    want00 = (cl.ChartForm.monomial(MC, (1,), (), zbp(0).scale(-i4))
              + cl.ChartForm.monomial(MC, (2,), (), zbp(1).scale(i4)))
    assert t.A[0][0] == want00
    assert t.A[1][1] == -want00
    assert not t.A[0][1] and not t.A[1][0]


def test_potential_residuals(iwasawa):
    t = cl.build_trivialization(iwasawa)
    assert cl.potential_residuals(t) == {"gauge_potential": True,
                                         "torsion_potential": True}
    t1 = cl.build_trivialization(iwasawa, shift=1)
    assert cl.potential_residuals(t1) == {"gauge_potential": True,
                                          "torsion_potential": True}


def test_chern_simons_transgression(iwasawa):
    t = cl.build_trivialization(iwasawa)
    A = [[t.A[u][v] for v in range(2)] for u in range(2)]
    F = [[t.cd.F_chart[u][v] for v in range(2)] for u in range(2)]
    res = cl.cs_transgression_residual(A, F)
    assert not any(res)


def test_operator_identity_low_degree(iwasawa):
    t = cl.build_trivialization(iwasawa)
    sections = cl.monomial_sections(t, 1)
    assert sections
    for s in sections:
        assert not cl.trivialization_residual(t, s)


def test_transitions(iwasawa):
    t0 = cl.build_trivialization(iwasawa, shift=0)
    t1 = cl.build_trivialization(iwasawa, shift=1)
    t2 = cl.build_trivialization(iwasawa, shift=2)
    for a, b in [(t0, t1), (t0, t2), (t1, t2)]:
        assert cl.transition_holomorphic(cl.transition(a, b))
    assert cl.transition_cocycle_residual(t0, t1, t2)
    # a transition with itself is trivial
    tr = cl.transition(t0, t0)
    assert not any(f for row in tr.a_diff for f in row)
    assert not any(p for row in tr.top for p in row)


def test_trivialization_report_shape(iwasawa):
    rep = cl.trivialization_report(iwasawa, degree=1)
    assert rep["model"] == "iwasawa"
    assert rep["alpha_prime"] == "-4"
    assert rep["potentials"] == {"gauge_potential": True,
                                 "torsion_potential": True}
    assert rep["chern_simons_transgression"] is True
    assert rep["operator_identity"]["passed"] is True
    assert rep["transitions"]["holomorphic"] is True
    assert rep["transitions"]["cocycle"] is True
