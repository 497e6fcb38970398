"""Homogeneous Hermitian models: exterior calculus on the invariant coframe,
connections (Levi-Civita / Chern / Bismut), curvature, torsion, and the
coupled-system checker.

Conventions fixed here once and used everywhere downstream:

* metric matrix h[a][b] is the Hermitian pairing of frame vectors V_a, V_b
  (i.e. g(V_a, conj V_b)); omega = i * sum h[a][b] alpha^a ^ abar^b.
* connection blocks: gamma[a][b][c] means nabla_{V_a} V_c = gamma[a][b][c] V_b,
  mu[a][b][c] means nabla_{Vbar_a} V_c = mu[a][b][c] V_b (all 0-based).
* curvature array R[k][j][l][m] carries the index picture "antiholomorphic
  derivative first": it is minus the coefficient of alpha^{j+1} ^ abar^{k+1}
  in the curvature 2-form entry (l,m), so that the commutator of a (1,0) and
  a (0,1) covariant derivative acts as -R on vector components.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import linalg
from .exterior import (
    EndForm,
    FormError,
    InvariantForm,
    MixedForm,
    normalize_key,
)
from .scalars import GR_ONE, GR_ZERO, GaussRat, S_A, S_I, S_ONE, S_ZERO, Scalar


class ModelError(ValueError):
    pass


@dataclass
class HomogeneousModel:
    name: str
    n: int
    coframe_names: List[str]
    d_coframe: List[MixedForm]          # d(alpha^a), total degree 2
    metric: List[List[GaussRat]]        # Hermitian positive h[a][b]
    omega_coeff: GaussRat               # Omega = omega_coeff * alpha^{1..n}
    rank: int
    curvature_F: EndForm                # gauge curvature, (1,1), trace-free
    alpha_prime: Optional[GaussRat]
    chart: Optional[dict] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def cached(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]


# ---------------------------------------------------------------------------
# exterior calculus


def exterior_derivative(x: InvariantForm, m: HomogeneousModel) -> MixedForm:
    """Leibniz extension of the coframe differentials (coefficients are
    constant on invariant forms)."""
    n = m.n
    total = MixedForm.zero(n, x.p + x.q + 1)
    for (holo, anti), c in x.terms:
        legs = [("h", i) for i in holo] + [("a", i) for i in anti]
        for pos, (kind, idx) in enumerate(legs):
            dleg = m.d_coframe[idx - 1]
            if kind == "a":
                dleg = dleg.conjugate()
            rest = legs[:pos] + legs[pos + 1:]
            rest_form = InvariantForm.monomial(
                n,
                [i for k, i in rest if k == "h"],
                [i for k, i in rest if k == "a"],
            )
            # sign: d of the leg at `pos` commutes to the front past pos legs
            piece = dleg.wedge(MixedForm.of(rest_form))
            coeff = c if pos % 2 == 0 else -c
            total = total + piece.scale(coeff)
    return total


def dolbeault_split(x: InvariantForm, m: HomogeneousModel):
    """(dx_{p+1,q}, dx_{p,q+1}); raises if an off-type component appears."""
    dx = exterior_derivative(x, m)
    hol = dx.part(x.p + 1, x.q)
    anti = dx.part(x.p, x.q + 1)
    for (p, q), f in dx.parts:
        if (p, q) not in ((x.p + 1, x.q), (x.p, x.q + 1)) and f:
            raise ModelError(
                f"non-integrable model: d of a ({x.p},{x.q}) form has a "
                f"({p},{q}) component"
            )
    return hol, anti


def partial_form(x: InvariantForm, m: HomogeneousModel) -> InvariantForm:
    return dolbeault_split(x, m)[0]


def dbar_form(x: InvariantForm, m: HomogeneousModel) -> InvariantForm:
    return dolbeault_split(x, m)[1]


def omega_form(m: HomogeneousModel) -> InvariantForm:
    def build():
        acc = InvariantForm.zero(m.n, 1, 1)
        for a in range(m.n):
            for b in range(m.n):
                h = m.metric[a][b]
                if h:
                    acc = acc + InvariantForm.monomial(
                        m.n, [a + 1], [b + 1], S_I * Scalar.const(h)
                    )
        return acc
    return m.cached("omega", build)


def torsion(m: HomogeneousModel) -> InvariantForm:
    """T = i * (2,1)-part of d(omega)."""
    return m.cached(
        "torsion",
        lambda: partial_form(omega_form(m), m).scale(S_I),
    )


def omega_top(m: HomogeneousModel) -> InvariantForm:
    """omega^n (volume multiple)."""
    w = omega_form(m)
    acc = w
    for _ in range(m.n - 1):
        acc = acc.wedge(w)
    return acc


def holomorphic_volume(m: HomogeneousModel) -> InvariantForm:
    return InvariantForm.monomial(
        m.n, list(range(1, m.n + 1)), [], Scalar.const(m.omega_coeff)
    )


# ---------------------------------------------------------------------------
# frame, brackets, metric helpers


def _basis_vector(n: int, idx: int):
    """Unit vector in the complexified frame basis (V_1..V_n, Vbar_1..Vbar_n)."""
    return [S_ONE if i == idx else S_ZERO for i in range(2 * n)]


def _as_gauss(s: Scalar, what: str) -> GaussRat:
    if s.degree > 0:
        raise ModelError(f"{what} is not constant in a")
    return s.coefficient(0)


def bracket_table(m: HomogeneousModel):
    """brackets[u][w]: components of [e_u, e_w] on the complexified frame,
    via alpha^c([X,Y]) = -d(alpha^c)(X,Y)."""
    def build():
        n = m.n
        basis = [_basis_vector(n, i) for i in range(2 * n)]
        d_all = [m.d_coframe[c] for c in range(n)] + [
            m.d_coframe[c].conjugate() for c in range(n)
        ]
        table = [[None] * (2 * n) for _ in range(2 * n)]
        for u in range(2 * n):
            for w in range(2 * n):
                comps = []
                for c in range(2 * n):
                    val = d_all[c].evaluate([basis[u], basis[w]])
                    comps.append(-_as_gauss(val, "structure constant"))
                table[u][w] = comps
        return table
    return m.cached("brackets", build)


def metric_inverse(m: HomogeneousModel):
    return m.cached("hinv", lambda: linalg.inverse(m.metric))


def complexified_metric(m: HomogeneousModel):
    """Bilinear extension of g on the complexified frame basis."""
    n = m.n
    G = linalg.zeros(2 * n, 2 * n)
    for a in range(n):
        for b in range(n):
            G[a][n + b] = m.metric[a][b]
            G[n + a][b] = m.metric[b][a]
    return G


@dataclass(frozen=True)
class LeviCivitaData:
    """Full complexified connection table: nabla_{e_u} e_w = C[u][w][y] e_y."""

    n: int
    table: tuple


def levi_civita(m: HomogeneousModel) -> LeviCivitaData:
    def build():
        n = m.n
        br = bracket_table(m)
        G = complexified_metric(m)
        Ginv = linalg.inverse(G)

        def g_of(vec, x):
            return sum((vec[y] * G[y][x] for y in range(2 * n) if vec[y]),
                       start=GR_ZERO)

        table = []
        for u in range(2 * n):
            row = []
            for w in range(2 * n):
                half = GaussRat.of("1/2")
                k = [
                    half * (g_of(br[u][w], x) - g_of(br[w][x], u)
                            + g_of(br[x][u], w))
                    for x in range(2 * n)
                ]
                coeffs = tuple(
                    sum((k[x] * Ginv[x][y] for x in range(2 * n) if k[x]),
                        start=GR_ZERO)
                    for y in range(2 * n)
                )
                row.append(coeffs)
            table.append(tuple(row))
        return LeviCivitaData(n, tuple(table))
    return m.cached("levi_civita", build)


@dataclass(frozen=True)
class ConnectionData:
    """Connection on T^{1,0} in the invariant frame (see module docstring)."""

    kind: str
    n: int
    gamma: tuple  # gamma[a][b][c], GaussRat
    mu: tuple     # mu[a][b][c], GaussRat

    def is_zero(self) -> bool:
        return all(
            not self.gamma[a][b][c] and not self.mu[a][b][c]
            for a in range(self.n)
            for b in range(self.n)
            for c in range(self.n)
        )


def frame_dbar_matrix(m: HomogeneousModel):
    """mu[a][b][c]: the (0,1)-block of the Chern connection, read off from
    the (1,1) structure constants (the holomorphic structure of T^{1,0})."""
    n = m.n
    mu = [[[GR_ZERO] * n for _ in range(n)] for _ in range(n)]
    for c in range(n):
        part = m.d_coframe[c].part(1, 1)
        for b in range(n):
            for a in range(n):
                # alpha^c([Vbar_a, V_b]) = coeff of alpha^b ^ abar^a in d alpha^c
                val = part.coeff((b + 1,), (a + 1,))
                mu[a][c][b] = _as_gauss(val, "structure constant")
    return mu


def chern_connection(m: HomogeneousModel) -> ConnectionData:
    """Chern connection, computed two ways (metric/holomorphic-structure route
    and the Levi-Civita route) which must agree."""
    def build():
        n = m.n
        mu = frame_dbar_matrix(m)
        hinv = metric_inverse(m)
        # h-compatibility: sum_d gamma[a][d][b] h[d][c]
        #                  = - sum_e conj(mu[a][e][c]) h[b][e]
        gamma = [[[GR_ZERO] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                rhs = [
                    -sum((mu[a][e][c].conjugate() * m.metric[b][e]
                          for e in range(n)), start=GR_ZERO)
                    for c in range(n)
                ]
                for d in range(n):
                    gamma[a][d][b] = sum(
                        (rhs[c] * hinv[c][d] for c in range(n)), start=GR_ZERO
                    )
        conn = ConnectionData(
            "chern", n,
            tuple(tuple(tuple(r) for r in g) for g in gamma),
            tuple(tuple(tuple(r) for r in g) for g in mu),
        )
        other = _chern_via_levi_civita(m)
        if conn.gamma != other.gamma or conn.mu != other.mu:
            raise ModelError(
                "Chern connection routes disagree (convention bug)"
            )
        return conn
    return m.cached("chern", build)


def _dc_omega(m: HomogeneousModel) -> MixedForm:
    """d^c omega = i(dbar - partial) omega."""
    hol, anti = dolbeault_split(omega_form(m), m)
    return (MixedForm.of(anti) - MixedForm.of(hol)).scale(S_I)


def _g_pair(m, vec, x):
    G = complexified_metric(m)
    return sum((vec[y] * G[y][x] for y in range(2 * m.n) if vec[y]),
               start=GR_ZERO)


def _solve_gamma_rows(m, pairings):
    """Given values sum_d x[d] h[d][c] = pairings[c], return x."""
    hinv = metric_inverse(m)
    n = m.n
    return [
        sum((pairings[c] * hinv[c][d] for c in range(n)), start=GR_ZERO)
        for d in range(n)
    ]


def _chern_via_levi_civita(m: HomogeneousModel) -> ConnectionData:
    """g(nabla_X Y, Z) = g(nabla^g_X Y, Z) - 1/2 d omega(JX, Y, Z)."""
    n = m.n
    lc = levi_civita(m)
    dw = exterior_derivative(omega_form(m), m)
    basis = [_basis_vector(n, i) for i in range(2 * n)]
    half = GaussRat.of("1/2")
    i_gr = GaussRat.of(0, 1)
    gamma = []
    mu = []
    for a in range(n):
        grow = [[GR_ZERO] * n for _ in range(n)]
        mrow = [[GR_ZERO] * n for _ in range(n)]
        for b in range(n):
            # (1,0) direction V_a: J V_a = i V_a
            pair_h = []
            pair_a = []
            for c in range(n):
                lc_term = _g_pair(m, lc.table[a][b], n + c)
                dval = _as_gauss(
                    dw.evaluate([basis[a], basis[b], basis[n + c]]), "d omega"
                )
                pair_h.append(lc_term - half * (i_gr * dval))
                lc_term2 = _g_pair(m, lc.table[n + a][b], n + c)
                dval2 = _as_gauss(
                    dw.evaluate([basis[n + a], basis[b], basis[n + c]]),
                    "d omega",
                )
                pair_a.append(lc_term2 - half * (-i_gr * dval2))
            xs = _solve_gamma_rows(m, pair_h)
            ys = _solve_gamma_rows(m, pair_a)
            for d in range(n):
                grow[d][b] = xs[d]
                mrow[d][b] = ys[d]
        gamma.append(tuple(tuple(r) for r in grow))
        mu.append(tuple(tuple(r) for r in mrow))
    return ConnectionData("chern", n, tuple(gamma), tuple(mu))


def torsion_lower(m: HomogeneousModel):
    """T[mm][k][l] with the antiholomorphic leg first and the holomorphic pair
    antisymmetrized from the stored (2,1) form (0-based)."""
    def build():
        n = m.n
        T = torsion(m)
        arr = [[[GR_ZERO] * n for _ in range(n)] for _ in range(n)]
        for mm in range(n):
            for k in range(n):
                for l in range(n):
                    if k == l:
                        continue
                    val = T.coeff((k + 1, l + 1), (mm + 1,))
                    arr[mm][k][l] = _as_gauss(val, "torsion")
        return arr
    return m.cached("torsion_lower", build)


def torsion_raised(m: HomogeneousModel):
    """T^j_{kl} = sum_m h^{j mbar} T_{mbar k l}; raising uses h inverse."""
    def build():
        n = m.n
        low = torsion_lower(m)
        hinv = metric_inverse(m)
        arr = [[[GR_ZERO] * n for _ in range(n)] for _ in range(n)]
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    arr[j][k][l] = sum(
                        (hinv[mm][j] * low[mm][k][l] for mm in range(n)),
                        start=GR_ZERO,
                    )
        return arr
    return m.cached("torsion_raised", build)


def bismut(m: HomogeneousModel) -> ConnectionData:
    """Bismut connection: Chern shifted by the raised torsion on the (1,0)
    block; cross-checked against nabla^g - 1/2 g^{-1} d^c omega."""
    def build():
        n = m.n
        ch = chern_connection(m)
        tr_raised = torsion_raised(m)
        gamma = tuple(
            tuple(
                tuple(ch.gamma[a][j][b] + tr_raised[j][a][b] for b in range(n))
                for j in range(n)
            )
            for a in range(n)
        )
        # second route from the Levi-Civita connection
        lc = levi_civita(m)
        dcw = _dc_omega(m)
        basis = [_basis_vector(n, i) for i in range(2 * n)]
        half = GaussRat.of("1/2")
        gamma2 = []
        mu2 = []
        for a in range(n):
            grow = [[GR_ZERO] * n for _ in range(n)]
            mrow = [[GR_ZERO] * n for _ in range(n)]
            for b in range(n):
                pair_h = []
                pair_a = []
                for c in range(n):
                    lc_term = _g_pair(m, lc.table[a][b], n + c)
                    dval = _as_gauss(
                        dcw.evaluate([basis[a], basis[b], basis[n + c]]),
                        "d^c omega",
                    )
                    pair_h.append(lc_term - half * dval)
                    lc_term2 = _g_pair(m, lc.table[n + a][b], n + c)
                    dval2 = _as_gauss(
                        dcw.evaluate([basis[n + a], basis[b], basis[n + c]]),
                        "d^c omega",
                    )
                    pair_a.append(lc_term2 - half * dval2)
                xs = _solve_gamma_rows(m, pair_h)
                ys = _solve_gamma_rows(m, pair_a)
                for d in range(n):
                    grow[d][b] = xs[d]
                    mrow[d][b] = ys[d]
            gamma2.append(tuple(tuple(r) for r in grow))
            mu2.append(tuple(tuple(r) for r in mrow))
        if tuple(gamma2) != gamma:
            raise ModelError("Bismut connection routes disagree")
        return ConnectionData("bismut", n, gamma, tuple(mu2))
    return m.cached("bismut", build)


def connection_form(conn: ConnectionData, n: int):
    """Matrix of connection 1-forms: theta[b][c] with
    nabla e_c = theta[b][c] e_b."""
    out = []
    for b in range(n):
        row = []
        for c in range(n):
            acc = MixedForm.zero(n, 1)
            for a in range(n):
                g = conn.gamma[a][b][c]
                if g:
                    acc = acc + MixedForm.of(
                        InvariantForm.monomial(n, [a + 1], [], Scalar.const(g))
                    )
                mu = conn.mu[a][b][c]
                if mu:
                    acc = acc + MixedForm.of(
                        InvariantForm.monomial(n, [], [a + 1],
                                               Scalar.const(mu))
                    )
            row.append(acc)
        out.append(row)
    return out


def curvature_mixed(conn: ConnectionData, m: HomogeneousModel):
    """R = d theta + theta ^ theta as a matrix of MixedForms."""
    n = m.n
    theta = connection_form(conn, n)
    out = []
    for b in range(n):
        row = []
        for c in range(n):
            acc = MixedForm.zero(n, 2)
            for key, f in theta[b][c].parts:
                acc = acc + exterior_derivative(f, m)
            for k in range(n):
                acc = acc + theta[b][k].wedge(theta[k][c])
            row.append(acc)
        out.append(row)
    return out


def curvature(conn: ConnectionData, m: HomogeneousModel) -> EndForm:
    """Curvature as an End(T)-valued (1,1) form; raises if any other
    bidegree appears (always pure (1,1) for Chern; used for Bismut too,
    where flatness is a model fact, not a convention)."""
    n = m.n
    mixed = curvature_mixed(conn, m)
    grid = []
    for b in range(n):
        row = []
        for c in range(n):
            for (p, q), f in mixed[b][c].parts:
                if (p, q) != (1, 1) and f:
                    raise ModelError(
                        f"curvature of kind={conn.kind} has a ({p},{q}) part"
                    )
            row.append(mixed[b][c].part(1, 1))
        grid.append(tuple(row))
    return EndForm(n, n, 1, 1, tuple(grid))


def chern_curvature(m: HomogeneousModel) -> EndForm:
    return m.cached("chern_R", lambda: curvature(chern_connection(m), m))


def curvature_array(m: HomogeneousModel):
    """R[k][j][l][mm] = R with antiholomorphic index k first (0-based); equals
    minus the coefficient of alpha^{j+1} ^ abar^{k+1} in entry (l, mm)."""
    def build():
        n = m.n
        R = chern_curvature(m)
        arr = [[[[GR_ZERO] * n for _ in range(n)] for _ in range(n)]
               for _ in range(n)]
        for l in range(n):
            for mm in range(n):
                f = R.entry(l, mm)
                for (holo, anti), c in f.terms:
                    j, k = holo[0] - 1, anti[0] - 1
                    arr[k][j][l][mm] = -_as_gauss(c, "curvature")
        return arr
    return m.cached("chern_R_array", build)


# ---------------------------------------------------------------------------
# system checker and symmetry identity


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    residual: str


@dataclass(frozen=True)
class SystemReport:
    model: str
    alpha_label: str
    degenerate: bool
    conditions: Tuple[ConditionResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def condition(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def _mixed_str(x: MixedForm) -> str:
    if not x:
        return "0"
    return " + ".join(str(f) for _, f in x.parts)


def _end_str(x: EndForm) -> str:
    if not x:
        return "0"
    bits = []
    for i in range(x.r):
        for j in range(x.r):
            if x.comps[i][j]:
                bits.append(f"[{i + 1},{j + 1}]: {x.comps[i][j]}")
    return "; ".join(bits)


def anomaly_residual(m: HomogeneousModel,
                     alpha: Optional[GaussRat]) -> InvariantForm:
    """2i d-del-bar omega - alpha' (tr F^F - tr R^R) as a (2,2) form; when
    alpha is None the result is symbolic in a."""
    w = omega_form(m)
    ddbar = partial_form(dbar_form(w, m), m)
    lhs = ddbar.scale(S_I + S_I)
    F = m.curvature_F
    trFF = F.mat_wedge(F).trace()
    R = chern_curvature(m)
    trRR = R.mat_wedge(R).trace()
    rhs = trFF - trRR
    factor = Scalar.const(alpha) if alpha is not None else S_A
    return lhs - rhs.scale(factor)


def check_heterotic_system(m: HomogeneousModel,
                           alpha_override: Optional[GaussRat] = None
                           ) -> SystemReport:
    alpha = alpha_override if alpha_override is not None else m.alpha_prime
    if alpha is None:
        alpha_label = "arbitrary"
        degenerate = False
    else:
        alpha_label = str(alpha)
        degenerate = not alpha
    n = m.n
    w = omega_form(m)

    f1 = exterior_derivative(holomorphic_volume(m), m)
    f2 = anomaly_residual(m, alpha)
    w2 = w.wedge(w)
    d1_grid = []
    for i in range(m.rank):
        d1_grid.append(tuple(
            m.curvature_F.entry(i, j).wedge(w2) for j in range(m.rank)
        ))
    d1 = EndForm(n, m.rank, 3, 3, tuple(d1_grid))
    # |Omega|_omega is constant on invariant data, so the conformally
    # balanced condition reduces to d(omega^2) = 0
    d2 = exterior_derivative(w2, m)
    conds = (
        ConditionResult("F1", not f1, _mixed_str(f1)),
        ConditionResult("F2", not f2, str(f2)),
        ConditionResult("D1", not d1, _end_str(d1)),
        ConditionResult("D2", not d2, _mixed_str(d2)),
    )
    return SystemReport(m.name, alpha_label, degenerate, conds)


def chern_symmetry_residual(m: HomogeneousModel):
    """Residuals of the first-Bianchi-type symmetry of the Chern curvature
    against the (0,1) covariant derivative of the raised torsion, evaluated
    on every index tuple in the invariant frame."""
    n = m.n
    R = curvature_array(m)
    Tr = torsion_raised(m)
    ch = chern_connection(m)
    mu = ch.mu
    residuals = {}
    for k in range(n):
        for q in range(n):
            for mm in range(n):
                for l in range(n):
                    # (0,1)-covariant derivative of T^mm_{l q} in direction k
                    dT = sum(
                        (mu[k][mm][c] * Tr[c][l][q]
                         - mu[k][c][l] * Tr[mm][c][q]
                         - mu[k][c][q] * Tr[mm][l][c]
                         for c in range(n)),
                        start=GR_ZERO,
                    )
                    res = R[k][q][mm][l] - R[k][l][mm][q] - dT
                    if res:
                        residuals[(k + 1, q + 1, mm + 1, l + 1)] = res
    return {
        "zero": not residuals,
        "nonzero_count": len(residuals),
        "entries": {str(k): str(v) for k, v in residuals.items()},
    }


# ---------------------------------------------------------------------------
# model validation


def validate_model(m: HomogeneousModel) -> List[str]:
    """Full validation; returns a list of failure messages (empty = valid)."""
    errors = []
    n = m.n
    if len(m.coframe_names) != n:
        errors.append("coframe has wrong length")
    if len(m.d_coframe) != n:
        errors.append("dCoframe has wrong length")
        return errors
    # integrability and d^2 = 0
    for a in range(n):
        if m.d_coframe[a].part(0, 2):
            errors.append(
                f"non-integrable: d {m.coframe_names[a]} has a (0,2) part"
            )
        dd = MixedForm.zero(n, 3)
        for _, f in m.d_coframe[a].parts:
            dd = dd + exterior_derivative(f, m)
        if dd:
            errors.append(f"d^2 {m.coframe_names[a]} != 0")
    # metric
    if len(m.metric) != n or any(len(r) != n for r in m.metric):
        errors.append("metric has wrong shape")
    else:
        for a in range(n):
            for b in range(n):
                if m.metric[a][b] != m.metric[b][a].conjugate():
                    errors.append("metric is not Hermitian")
                    break
        # leading principal minors must be positive rationals
        for k in range(1, n + 1):
            minor = _det_gauss([row[:k] for row in m.metric[:k]])
            if minor.im or minor.re <= 0:
                errors.append(
                    f"metric leading minor {k} is not positive ({minor})"
                )
    # gauge curvature
    F = m.curvature_F
    if (F.p, F.q) != (1, 1):
        errors.append("gauge curvature F is not of bidegree (1,1)")
    if F.r != m.rank:
        errors.append("gauge curvature F has wrong rank")
    if not F.is_trace_free():
        errors.append("gauge curvature F is not trace-free")
    if not m.omega_coeff:
        errors.append("omega_coeff must be nonzero")
    return errors


def _det_gauss(rows) -> GaussRat:
    k = len(rows)
    if k == 0:
        return GR_ONE
    if k == 1:
        return rows[0][0]
    total = GR_ZERO
    for j in range(k):
        c = rows[0][j]
        if not c:
            continue
        minor = [[r[t] for t in range(k) if t != j] for r in rows[1:]]
        term = c * _det_gauss(minor)
        total = total + term if j % 2 == 0 else total - term
    return total
