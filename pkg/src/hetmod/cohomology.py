"""Cohomology of the deformation operator on the invariant complex.

All dimensions are exact and refer to the finite-dimensional invariant
subcomplex: kernels and ranks are computed over the Gaussian rationals after
specializing the coupling constant.  The module also implements the principal
symbol of Dbar + Dbar* and an injectivity scan over a lattice of nonzero
cotangent samples, which is the effective content of ellipticity here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import linalg, qcomplex
from .geometry import (
    HomogeneousModel,
    ModelError,
    SystemReport,
    anomaly_residual,
    check_heterotic_system,
    curvature_array,
)
from .scalars import GR_ZERO, GaussRat


def q_value_dimension(m: HomogeneousModel) -> int:
    return 2 * m.n + m.rank * m.rank - 1


def q_space_dimension(m: HomogeneousModel, p: int) -> int:
    from math import comb
    return q_value_dimension(m) * comb(m.n, p)


def _resolve_alpha(m: HomogeneousModel, alpha0: Optional[GaussRat]
                   ) -> GaussRat:
    if alpha0 is not None:
        return alpha0
    if m.alpha_prime is not None:
        return m.alpha_prime
    # unconstrained coupling (both anomaly sides vanish): any value gives the
    # same dimensions when F = 0; pick 1 for definiteness
    return GaussRat.of(1)


def _operator_chain(m: HomogeneousModel, alpha0: GaussRat,
                    diagonal: bool = False):
    """Specialized matrices D_p: degree p -> p+1 for p = 0..n-1."""
    return [qcomplex.assemble_Dbar(m, p, diagonal).specialize(alpha0)
            for p in range(m.n)]


def _require_nilpotent(m: HomogeneousModel, chain, alpha0: GaussRat) -> None:
    for p in range(len(chain) - 1):
        prod = linalg.mat_mul(chain[p + 1], chain[p])
        if any(x for row in prod for x in row):
            res = anomaly_residual(m, alpha0)
            raise ModelError(
                "cohomology is undefined: the operator does not square to "
                f"zero at coupling {alpha0} (failure first seen on degree "
                f"{p}); the anomaly residual is {res}"
            )


@dataclass(frozen=True)
class DegreeData:
    p: int
    dim: int
    kernel_dim: int
    rank: int
    h: int
    harmonic: int


@dataclass(frozen=True)
class CohomologyData:
    model: str
    alpha0: GaussRat
    degrees: Tuple[DegreeData, ...]

    @property
    def h(self) -> List[int]:
        return [d.h for d in self.degrees]

    @property
    def harmonic(self) -> List[int]:
        return [d.harmonic for d in self.degrees]

    @property
    def euler(self) -> int:
        return sum((-1) ** d.p * d.h for d in self.degrees)

    @property
    def serre_pairs(self) -> List[Tuple[int, int, bool]]:
        n = len(self.degrees) - 1
        return [(p, n - p, self.degrees[p].h == self.degrees[n - p].h)
                for p in range(n + 1)]

    @property
    def serre(self) -> bool:
        return all(ok for _, _, ok in self.serre_pairs)


def cohomology_data(m: HomogeneousModel, alpha0: Optional[GaussRat] = None,
                    diagonal: bool = False) -> CohomologyData:
    """Exact h^{0,p} and harmonic dimensions for p = 0..n.

    Refuses (with the anomaly residual in the message) when the operator does
    not square to zero at the chosen coupling.
    """
    a0 = _resolve_alpha(m, alpha0)
    n = m.n
    chain = _operator_chain(m, a0, diagonal)
    if not diagonal:
        _require_nilpotent(m, chain, a0)
    adjoints = [qcomplex.gram_adjoint(
        m, qcomplex.assemble_Dbar(m, p, diagonal)).specialize(a0)
        for p in range(n)]
    degrees = []
    prev_rank = 0
    for p in range(n + 1):
        dim = q_space_dimension(m, p)
        if p < n:
            ker = len(linalg.kernel_basis(chain[p], cols=dim))
        else:
            ker = dim
        rank = dim - ker
        h = ker - prev_rank
        # harmonic space: ker of Dbar stacked over ker of the adjoint
        stacked: List[List[GaussRat]] = []
        if p < n:
            stacked.extend(chain[p])
        if p > 0:
            stacked.extend(adjoints[p - 1])
        harm = len(linalg.kernel_basis(stacked, cols=dim)) if stacked else dim
        degrees.append(DegreeData(p, dim, ker, rank, h, harm))
        prev_rank = rank
    return CohomologyData(m.name, a0, tuple(degrees))


def betti(m: HomogeneousModel, p: int,
          alpha0: Optional[GaussRat] = None) -> int:
    return cohomology_data(m, alpha0).degrees[p].h


def harmonic_dimension(m: HomogeneousModel, p: int,
                       alpha0: Optional[GaussRat] = None) -> int:
    return cohomology_data(m, alpha0).degrees[p].harmonic


def euler_char(m: HomogeneousModel,
               alpha0: Optional[GaussRat] = None) -> int:
    return cohomology_data(m, alpha0).euler


def serre_report(m: HomogeneousModel,
                 alpha0: Optional[GaussRat] = None) -> Dict:
    data = cohomology_data(m, alpha0)
    return {
        "h": data.h,
        "pairs": [[p, q, ok] for p, q, ok in data.serre_pairs],
        "symmetric": data.serre,
        "euler": data.euler,
    }


# ---------------------------------------------------------------------------
# principal symbol


def symbol_matrix(m: HomogeneousModel, xi: List[GaussRat],
                  alpha0: GaussRat) -> List[List[GaussRat]]:
    """Symbol of Dbar + Dbar* at the cotangent sample xi, acting from
    Q-valued (0,1) data to Q-valued (0,2) data plus Q-valued scalars.

    Conventions: xi_kbar means the conjugate of xi_k; the coupling terms
    contract the Chern curvature with the unconjugated xi and no metric
    factors appear (symbols are computed in a local coordinate gauge).
    """
    n, r = m.n, m.rank
    if len(xi) != n:
        raise ModelError("cotangent sample has the wrong length")
    R = curvature_array(m)
    xib = [x.conjugate() for x in xi]
    ne = r * r - 1
    vals = 2 * n + ne
    pairs = list(itertools.combinations(range(n), 2))
    rows = vals * len(pairs) + vals
    cols = vals * n
    M = linalg.zeros(rows, cols)

    def col(slot: int, leg: int) -> int:
        # slot: value index in [0, vals); leg: the single (0,1) leg
        return slot * n + leg

    def wedge_row(slot: int, k: int, l: int) -> int:
        return slot * len(pairs) + pairs.index((min(k, l), max(k, l)))

    def scal_row(slot: int) -> int:
        return vals * len(pairs) + slot

    def add(row, c, v):
        M[row][c] = M[row][c] + v

    ap = alpha0
    # covector slots 0..n-1, gauge slots n..n+ne-1 (coordinates in the
    # trace-free basis; the symbol acts diagonally on them), vector slots
    # n+ne..2n+ne-1
    for j in range(n):
        # wedge part: xi_kbar kappa_{j lbar} on dzbar^{k,l}
        for l in range(n):
            for k in range(n):
                if k == l or not xib[k]:
                    continue
                sgn = GaussRat.of(1) if k < l else GaussRat.of(-1)
                add(wedge_row(j, k, l), col(j, l), sgn * xib[k])
        # contraction part pairs against the conjugate of the wedge
        # covector: xi_k kappa_{j kbar}
        for k in range(n):
            if xi[k]:
                add(scal_row(j), col(j, k), xi[k])
        # coupling into the covector wedge rows from the vector slots:
        # alpha' R_{kbar j}{}^m{}_n xi_m W^n_{lbar}
        if ap:
            for k in range(n):
                for l in range(n):
                    if k == l:
                        continue
                    sgn = GaussRat.of(1) if k < l else GaussRat.of(-1)
                    for mm in range(n):
                        if not xi[mm]:
                            continue
                        for nn in range(n):
                            v = ap * R[k][j][mm][nn] * xi[mm]
                            if v:
                                add(wedge_row(j, k, l), col(n + ne + nn, l),
                                    sgn * v)
    for s in range(ne):
        slot = n + s
        for l in range(n):
            for k in range(n):
                if k == l or not xib[k]:
                    continue
                sgn = GaussRat.of(1) if k < l else GaussRat.of(-1)
                add(wedge_row(slot, k, l), col(slot, l), sgn * xib[k])
        for k in range(n):
            if xi[k]:
                add(scal_row(slot), col(slot, k), xi[k])
    for j in range(n):
        slot = n + ne + j
        for l in range(n):
            for k in range(n):
                if k == l or not xib[k]:
                    continue
                sgn = GaussRat.of(1) if k < l else GaussRat.of(-1)
                add(wedge_row(slot, k, l), col(slot, l), sgn * xib[k])
        for k in range(n):
            if xi[k]:
                add(scal_row(slot), col(slot, k), xi[k])
    # coupling into the vector contraction rows from the covector slots:
    # - alpha' R_{lbar j}{}^m{}_n xi_m kappa_{j lbar}
    if ap:
        for nn in range(n):
            for l in range(n):
                for j in range(n):
                    for mm in range(n):
                        v = ap * R[l][j][mm][nn] * xi[mm]
                        if v:
                            add(scal_row(n + ne + nn), col(j, l), -v)
    return M


def symbol_samples(n: int, extras: Optional[List[List[GaussRat]]] = None):
    """All cotangent samples with components in {0, +-1, +-i, 1+-i},
    excluding zero, plus caller extras."""
    alphabet = [
        GR_ZERO,
        GaussRat.of(1),
        GaussRat.of(-1),
        GaussRat.of(0, 1),
        GaussRat.of(0, -1),
        GaussRat.of(1, 1),
        GaussRat.of(1, -1),
    ]
    out = [list(xi) for xi in itertools.product(alphabet, repeat=n)
           if any(xi)]
    if extras:
        out.extend([list(x) for x in extras])
    return out


def injectivity_scan(m: HomogeneousModel, alpha0: GaussRat,
                     samples: Optional[List[List[GaussRat]]] = None,
                     limit: Optional[int] = None) -> Dict:
    """Check injectivity of the symbol for every sample; reports the count
    and the first failing sample if any."""
    if samples is None:
        samples = symbol_samples(m.n)
    if limit is not None:
        samples = samples[:limit]
    cols = (2 * m.n + m.rank * m.rank - 1) * m.n
    first_failure = None
    for xi in samples:
        M = symbol_matrix(m, xi, alpha0)
        if linalg.rank(M) != cols:
            first_failure = "(" + ", ".join(str(x) for x in xi) + ")"
            break
    return {
        "samples": len(samples),
        "injective": first_failure is None,
        **({"first_failure": first_failure} if first_failure else {}),
    }


# ---------------------------------------------------------------------------
# reports


def _system_report_dict(rep: SystemReport) -> Dict:
    return {
        "model": rep.model,
        "alpha_prime": rep.alpha_label,
        "degenerate": rep.degenerate,
        "passed": rep.all_passed,
        "conditions": {
            c.name: {"passed": c.passed, "residual": c.residual}
            for c in rep.conditions
        },
    }


def system_report(m: HomogeneousModel,
                  alpha0: Optional[GaussRat] = None) -> Dict:
    """JSON-ready result of the coupled-system checker."""
    return _system_report_dict(check_heterotic_system(m, alpha0))


def _alpha_label(m: HomogeneousModel, alpha0: Optional[GaussRat]) -> str:
    if alpha0 is None and m.alpha_prime is None:
        return "arbitrary"
    return str(_resolve_alpha(m, alpha0))


def cohomology_report(m: HomogeneousModel,
                      alpha0: Optional[GaussRat] = None,
                      symbol_limit: Optional[int] = None,
                      diagonal: bool = False) -> Dict:
    """Full JSON-ready report: dimensions, Serre symmetry, Euler number,
    symbol scan and the coupled-system check."""
    a0 = _resolve_alpha(m, alpha0)
    data = cohomology_data(m, alpha0, diagonal)
    scan = injectivity_scan(m, a0, limit=symbol_limit)
    label = _alpha_label(m, alpha0)
    return {
        "model": m.name,
        "alpha_prime": label,
        "degenerate": a0 == GR_ZERO or not a0,
        "dims": {
            "basis": "invariant",
            "h": data.h,
            "harmonic": data.harmonic,
        },
        "serre": data.serre,
        "euler": data.euler,
        "symbol": scan,
        "checks": _system_report_dict(check_heterotic_system(m, alpha0)),
    }
