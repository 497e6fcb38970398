"""Built-in homogeneous models and JSON model files.

Three built-ins:

* ``iwasawa``: nilmanifold with d(a3) = a1^a2, diagonal metric, a rank-2
  diagonal gauge field, and coupling -4.
* ``calabi-eckmann``: S^3 x S^3 with the product round metric; the complex
  coframe is assembled here from the real su(2)+su(2) structure constants.
* ``torus``: abelian baseline, every structure constant zero.

The JSON schema (see ``model_to_json``) mirrors the model fields; holomorphic
coframe legs are referenced by name ("a1") and antiholomorphic ones by the
conjugate name ("ab1").
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import linalg
from .exterior import EndForm, FormError, InvariantForm, MixedForm
from .geometry import HomogeneousModel, ModelError, validate_model
from .scalars import (
    GR_ONE,
    GR_ZERO,
    GaussRat,
    S_ONE,
    Scalar,
    ScalarError,
    format_scalar,
    parse_scalar,
)

BUILTIN_NAMES = ("iwasawa", "calabi-eckmann", "torus")


def _half_identity(n: int) -> List[List[GaussRat]]:
    half = GaussRat.of("1/2")
    return [[half if a == b else GR_ZERO for b in range(n)] for a in range(n)]


def _closed_coframe(n: int) -> List[MixedForm]:
    return [MixedForm.zero(n, 2) for _ in range(n)]


def build_torus() -> HomogeneousModel:
    n = 3
    return HomogeneousModel(
        name="torus",
        n=n,
        coframe_names=["a1", "a2", "a3"],
        d_coframe=_closed_coframe(n),
        metric=_half_identity(n),
        omega_coeff=GR_ONE,
        rank=2,
        curvature_F=EndForm.zero(n, 2, 1, 1),
        alpha_prime=None,
    )


def build_iwasawa() -> HomogeneousModel:
    n = 3
    d = _closed_coframe(n)
    d[2] = MixedForm.of(InvariantForm.monomial(n, [1, 2], []))
    quarter_i = Scalar.of(0, "1/4")
    f11 = InvariantForm.monomial(n, [1], [1], quarter_i) + \
        InvariantForm.monomial(n, [2], [2], -quarter_i)
    z = InvariantForm.zero(n, 1, 1)
    F = EndForm.build(n, 2, 1, 1, [[f11, z], [z, -f11]])
    return HomogeneousModel(
        name="iwasawa",
        n=n,
        coframe_names=["a1", "a2", "a3"],
        d_coframe=d,
        metric=_half_identity(n),
        omega_coeff=GR_ONE,
        rank=2,
        curvature_F=F,
        alpha_prime=GaussRat.of(-4),
        chart={
            "coords": 3,
            "coframe_pullback": {
                "a1": "dz1",
                "a2": "dz2",
                "a3": "-dz3 + z1 dz2",
            },
        },
    )


# -- Calabi-Eckmann: complex coframe from the real structure constants -------

# d(e_i) for two copies of su(2): de1 = e2^e3 (cyclic), de4 = e5^e6 (cyclic).
_SU2X2_D = {
    1: ((2, 3),),
    2: ((3, 1),),
    3: ((1, 2),),
    4: ((5, 6),),
    5: ((6, 4),),
    6: ((4, 5),),
}

# complex coframe: a1 = e1 + i e4, a2 = e2 + i e3, a3 = e5 + i e6
_CE_COFRAME = (
    ((1, GR_ONE), (4, GaussRat.of(0, 1))),
    ((2, GR_ONE), (3, GaussRat.of(0, 1))),
    ((5, GR_ONE), (6, GaussRat.of(0, 1))),
)


def _ce_basis_change(n: int):
    """M with (a^1..a^n, ab^1..ab^n) = M e, and its inverse."""
    M = linalg.zeros(2 * n, 2 * n)
    for a, combo in enumerate(_CE_COFRAME):
        for i, c in combo:
            M[a][i - 1] = c
            M[n + a][i - 1] = c.conjugate()
    return M, linalg.inverse(M)


def _real_leg_as_complex(i: int, minv, n: int) -> List[GaussRat]:
    """e_i expanded on the complex basis (a^1..a^n, ab^1..ab^n)."""
    return [minv[i - 1][t] for t in range(2 * n)]


def _ce_d_coframe(n: int) -> List[MixedForm]:
    _, minv = _ce_basis_change(n)
    out = []
    for combo in _CE_COFRAME:
        acc = MixedForm.zero(n, 2)
        for i, c in combo:
            for (j, k) in _SU2X2_D[i]:
                vj = _real_leg_as_complex(j, minv, n)
                vk = _real_leg_as_complex(k, minv, n)
                for t in range(2 * n):
                    if not vj[t]:
                        continue
                    for u in range(2 * n):
                        if not vk[u]:
                            continue
                        cc = c * vj[t] * vk[u]
                        if t < n and u < n:
                            holo, anti = [t + 1, u + 1], []
                        elif t < n <= u:
                            holo, anti = [t + 1], [u - n + 1]
                        elif u < n <= t:
                            # put the holomorphic leg first; one transposition
                            holo, anti = [u + 1], [t - n + 1]
                            cc = -cc
                        else:
                            holo, anti = [], [t - n + 1, u - n + 1]
                        mono = InvariantForm.monomial(n, holo, anti,
                                                      Scalar.const(cc))
                        if mono:
                            acc = acc + MixedForm.of(mono)
        out.append(acc)
    return out


def build_calabi_eckmann() -> HomogeneousModel:
    n = 3
    return HomogeneousModel(
        name="calabi-eckmann",
        n=n,
        coframe_names=["a1", "a2", "a3"],
        d_coframe=_ce_d_coframe(n),
        metric=_half_identity(n),
        omega_coeff=GR_ONE,
        rank=3,
        curvature_F=EndForm.zero(n, 3, 1, 1),
        alpha_prime=None,
    )


def builtin_model(name: str) -> HomogeneousModel:
    builders = {
        "iwasawa": build_iwasawa,
        "calabi-eckmann": build_calabi_eckmann,
        "torus": build_torus,
    }
    if name not in builders:
        raise ModelError(
            f"unknown built-in model {name!r}; choose from {BUILTIN_NAMES}"
        )
    return builders[name]()


# ---------------------------------------------------------------------------
# JSON ingestion / serialization


def _conj_name(name: str) -> str:
    return "ab" + name[1:] if name.startswith("a") else name + "_bar"


def _parse_wedge(legs, names: Dict[str, int], where: str):
    holo, anti = [], []
    conj = {_conj_name(nm): idx for nm, idx in names.items()}
    for leg in legs:
        if leg in names:
            holo.append(names[leg])
        elif leg in conj:
            anti.append(conj[leg])
        else:
            raise ModelError(f"{where}: unknown coframe leg {leg!r}")
    return holo, anti


def _parse_const(text, where: str) -> GaussRat:
    try:
        s = parse_scalar(str(text))
    except ScalarError as exc:
        raise ModelError(f"{where}: {exc}") from exc
    if s.degree > 0:
        raise ModelError(f"{where}: coefficient must not involve a")
    return s.coefficient(0)


def parse_model_text(text: str) -> HomogeneousModel:
    """Build and fully validate a model from its JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ModelError("model file must contain a JSON object")
    for key in ("name", "n", "coframe", "d", "metric", "omega_coeff",
                "bundle"):
        if key not in data:
            raise ModelError(f"missing required key {key!r}")
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise ModelError("n must be a positive integer")
    coframe = data["coframe"]
    if (not isinstance(coframe, list) or len(coframe) != n
            or len(set(coframe)) != n):
        raise ModelError("coframe must list n distinct names")
    names = {nm: idx + 1 for idx, nm in enumerate(coframe)}

    d_coframe = []
    dmap = data["d"]
    if not isinstance(dmap, dict):
        raise ModelError("d must map coframe names to term lists")
    for nm in dmap:
        if nm not in names:
            raise ModelError(f"d.{nm}: not a coframe name")
    for nm in coframe:
        acc = MixedForm.zero(n, 2)
        for pos, term in enumerate(dmap.get(nm, [])):
            where = f"d.{nm}[{pos}]"
            if not isinstance(term, dict) or set(term) != {"coeff", "wedge"}:
                raise ModelError(f"{where}: expected coeff/wedge keys")
            holo, anti = _parse_wedge(term["wedge"], names, where)
            if len(holo) + len(anti) != 2:
                raise ModelError(f"{where}: wedge must have two legs")
            c = Scalar.const(_parse_const(term["coeff"], where))
            mono = InvariantForm.monomial(n, holo, anti, c)
            if mono:
                acc = acc + MixedForm.of(mono)
        d_coframe.append(acc)

    metric_rows = data["metric"]
    if (not isinstance(metric_rows, list) or len(metric_rows) != n
            or any(not isinstance(r, list) or len(r) != n
                   for r in metric_rows)):
        raise ModelError("metric must be an n x n array")
    metric = [
        [_parse_const(metric_rows[a][b], f"metric[{a}][{b}]")
         for b in range(n)]
        for a in range(n)
    ]

    bundle = data["bundle"]
    if not isinstance(bundle, dict) or "rank" not in bundle:
        raise ModelError("bundle must be an object with a rank")
    rank = bundle["rank"]
    if not isinstance(rank, int) or rank < 1:
        raise ModelError("bundle.rank must be a positive integer")
    fgrid = [[InvariantForm.zero(n, 1, 1) for _ in range(rank)]
             for _ in range(rank)]
    for mono_name, rows in bundle.get("F", {}).items():
        where = f"bundle.F[{mono_name!r}]"
        legs = mono_name.split("^")
        holo, anti = _parse_wedge(legs, names, where)
        if len(holo) != 1 or len(anti) != 1:
            raise ModelError(f"{where}: key must name one a and one ab leg")
        if (not isinstance(rows, list) or len(rows) != rank
                or any(len(r) != rank for r in rows)):
            raise ModelError(f"{where}: expected a rank x rank array")
        for i in range(rank):
            for j in range(rank):
                c = _parse_const(rows[i][j], f"{where}[{i}][{j}]")
                if c:
                    fgrid[i][j] = fgrid[i][j] + InvariantForm.monomial(
                        n, holo, anti, Scalar.const(c))
    F = EndForm.build(n, rank, 1, 1, fgrid)

    alpha_raw = data.get("alpha_prime")
    alpha = (None if alpha_raw is None
             else _parse_const(alpha_raw, "alpha_prime"))
    if alpha is not None and alpha.im:
        raise ModelError("alpha_prime must be a real rational")

    chart = data.get("chart")
    if chart is not None:
        if (not isinstance(chart, dict) or "coords" not in chart
                or "coframe_pullback" not in chart):
            raise ModelError("chart needs coords and coframe_pullback")
        missing = [nm for nm in coframe
                   if nm not in chart["coframe_pullback"]]
        if missing:
            raise ModelError(f"chart.coframe_pullback missing {missing}")

    try:
        model = HomogeneousModel(
            name=str(data["name"]),
            n=n,
            coframe_names=list(coframe),
            d_coframe=d_coframe,
            metric=metric,
            omega_coeff=_parse_const(data["omega_coeff"], "omega_coeff"),
            rank=rank,
            curvature_F=F,
            alpha_prime=alpha,
            chart=chart,
        )
    except FormError as exc:
        raise ModelError(str(exc)) from exc
    problems = validate_model(model)
    if problems:
        raise ModelError("; ".join(problems))
    return model


def parse_model_file(path: str) -> HomogeneousModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model_text(fh.read())


def _mono_name(key, coframe) -> str:
    holo, anti = key
    legs = [coframe[i - 1] for i in holo]
    legs += [_conj_name(coframe[i - 1]) for i in anti]
    return "^".join(legs)


def model_to_json(m: HomogeneousModel) -> dict:
    """Plain-JSON description; ``parse_model_text`` inverts it exactly."""
    d = {}
    for a, mf in enumerate(m.d_coframe):
        terms = []
        for _, f in mf.parts:
            for key, c in f.terms:
                terms.append({
                    "coeff": format_scalar(c),
                    "wedge": _mono_name(key, m.coframe_names).split("^"),
                })
        if terms:
            d[m.coframe_names[a]] = terms
    fmap: Dict[str, list] = {}
    for i in range(m.rank):
        for j in range(m.rank):
            for key, c in m.curvature_F.entry(i, j).terms:
                nm = _mono_name(key, m.coframe_names)
                if nm not in fmap:
                    fmap[nm] = [["0"] * m.rank for _ in range(m.rank)]
                fmap[nm][i][j] = format_scalar(c)
    out = {
        "name": m.name,
        "n": m.n,
        "coframe": list(m.coframe_names),
        "d": d,
        "metric": [[str(x) for x in row] for row in m.metric],
        "omega_coeff": str(m.omega_coeff),
        "bundle": {"rank": m.rank, "F": fmap},
        "alpha_prime": (None if m.alpha_prime is None
                        else str(m.alpha_prime)),
    }
    if m.chart is not None:
        out["chart"] = m.chart
    return out


def print_model(m: HomogeneousModel) -> str:
    return json.dumps(model_to_json(m), indent=2, sort_keys=True) + "\n"
