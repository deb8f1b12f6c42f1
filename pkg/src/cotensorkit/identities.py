"""A battery of structural identities run on one pair D ⊆ E.

Each check carries a short tag naming the identity it exercises; the CLI
prints these tags.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .coalg import Coalgebra, CoalgebraMap
from .comod import (cotensor, cotensor_map, quotient_bicomodule, regular, rho_bar,
                    rho_bar_left)
from .cotensorcoalg import (CotensorModel, fi_trivial_check, gamma_check, induction_phi_check,
                            phi_f_M_check, phi_xi_check, quotient_square_check, rel3_check,
                            rel6_check, rel7_check, relation_table_check, varphi_check)
from .exactla import LinMap, factor_through_epi, kernel, same_subobject
from .filtration import d_alla_n_check, dn
from .wedge import (HypothesisFails, delta_bar_into, diagram_eta_check, epi_exactness_check,
                    eta_naturality_check, eta_reduced_check, left_E_comodule, wedge_map)


@dataclass
class IdentityResult:
    tag: str
    passed: bool
    instances: int = 0
    detail: list = field(default_factory=list)   # failing (or skipped) instances

    def to_dict(self) -> dict:
        return {"tag": self.tag, "passed": self.passed, "instances": self.instances,
                "detail": [str(d) for d in self.detail]}


class _Suite:
    def __init__(self):
        self.results: dict[str, IdentityResult] = {}

    def record(self, tag: str, ok: bool, where=None):
        r = self.results.setdefault(tag, IdentityResult(tag, True))
        r.instances += 1
        if not ok:
            r.passed = False
            r.detail.append(where)

    def run(self, tag: str, fn, where=None):
        try:
            ok = bool(fn())
        except AssertionError as exc:
            ok, where = False, f"{where}: {exc}"
        self.record(tag, ok, where)


def _chain(model: CotensorModel):
    """E1 = D^2 → E2 = D^3 → E3 = E with the inclusions as coalgebra maps."""
    f = model.filt
    E1, E2 = f.stage(2).coalgebra, f.stage(3).coalgebra
    e = CoalgebraMap(E1, E2, f.xi(2, 3))
    e2 = CoalgebraMap(E2, model.E, f.delta(3))
    return E1, E2, e, e2


def _wedge_composition(model: CotensorModel, case: int) -> bool:
    f = model.filt
    E1, E2, e, e2 = _chain(model)
    idD = model.D.id
    if case == 0:
        X = (f.xi(1, 2), f.xi(1, 3), f.delta(1))
        x, x2 = idD, idD
    else:
        X = (f.xi(1, 2), f.xi(2, 3), f.delta(2))
        x, x2 = f.xi(1, 2), f.stage(2).coalgebra.id
    Y = (f.xi(1, 2), f.xi(1, 3), f.delta(1))
    first = wedge_map(x, idD, e, X[0], Y[0], X[1], Y[1])
    second = wedge_map(x2, idD, e2, X[1], Y[1], X[2], Y[2])
    direct = wedge_map(x2 @ x, idD, e2 @ e, X[0], Y[0], X[2], Y[2])
    return second @ first == direct


def _cotensor_composition(model: CotensorModel) -> bool:
    f = model.filt
    E1, E2, e, e2 = _chain(model)
    Ds = (f.xi(1, 2), f.xi(1, 3), f.delta(1))
    Es = (E1, E2, model.E)
    Vs, ps, Ws = [], [], []
    for C, inc in zip(Es, Ds):
        V, p = quotient_bicomodule(C, inc, "right", name=f"{C.name}/D")
        Vs.append(V)
        ps.append(p)
        Ws.append(left_E_comodule(C, inc, "D"))
    X = [cotensor(V, W) for V, W in zip(Vs, Ws)]
    v1 = factor_through_epi(ps[1] @ e.map, ps[0])
    v2 = factor_through_epi(ps[2] @ e2.map, ps[1])
    idD = model.D.id
    first = cotensor_map(v1, idD, X[0], X[1], e=e)
    second = cotensor_map(v2, idD, X[1], X[2], e=e2)
    direct = cotensor_map(v2 @ v1, idD, X[0], X[2], e=e2 @ e)
    return second @ first == direct


def _rho_bar_round_trips(model: CotensorModel) -> bool:
    ok = True
    for V in (model.Q(1), regular(model.E), model.M):
        fwd, inv, _ = rho_bar(V)
        ok &= inv @ fwd == V.id
    for W in (model.D_bi, model.M, regular(model.E)):
        fwd, inv, _ = rho_bar_left(W)
        ok &= inv @ fwd == W.id
    return ok


def _naturality(model: CotensorModel, case: int) -> bool:
    f = model.filt
    k = min(3, model.s)
    Ek = f.stage(k).coalgebra
    e = CoalgebraMap(Ek, model.E, f.delta(k))
    names1 = (dn(1), dn(1), "0") if case == 0 else (dn(1), dn(2), dn(1))
    if case == 0:
        return eta_naturality_check(e, model.D.id, model.D.id, None,
                                    f.xi(1, k), f.xi(1, k), None,
                                    f.delta(1), f.delta(1), None, names1, names1)[0]
    D2 = f.stage(2).coalgebra
    return eta_naturality_check(e, model.D.id, D2.id, model.D.id,
                                f.xi(1, k), f.xi(2, k), f.xi(1, 2),
                                f.delta(1), f.delta(2), f.xi(1, 2), names1, names1)[0]


def _lem_utile(model: CotensorModel, m: int, n: int) -> bool:
    E, f = model.E, model.filt
    Qm, pm = quotient_bicomodule(E, f.delta(m), "right", name=f"{E.name}/{dn(m)}")
    Qn, pn = quotient_bicomodule(E, f.delta(n), "left", name=f"{E.name}/{dn(n)}")
    box = cotensor(Qm, Qn)
    _, inc = kernel(delta_bar_into(E, pm, pn, box))
    return same_subobject(inc, f.delta(m + n))


def _ef_exact(model: CotensorModel, m: int, n: int):
    try:
        r = epi_exactness_check(model.E, model.filt.delta(m), model.filt.delta(n),
                                names=(dn(m), dn(n)))
    except HypothesisFails:
        return None
    return r["surjective"] and r["exact_at_E"]


def identity_suite(E: Coalgebra, D, bound: int = 5, model: CotensorModel | None = None) -> list[IdentityResult]:
    """Run every identity for D ⊆ E with indices up to ``bound``."""
    if model is None:
        probe = CotensorModel(E, D)
        model = CotensorModel(E, D, filt=probe.filt, degree_bound=max(bound, probe.s) + 1)
    s = model.s
    top_n = max(2, min(bound, s + 1))
    S = _Suite()

    S.run("claim 4.2", lambda: relation_table_check(model.T, bound)[0], "relation table")
    for case in (0, 1):
        S.run("formula compos of wedge", lambda: _wedge_composition(model, case), case)
    S.run("formula compos of cotensor", lambda: _cotensor_composition(model), "E/D□D chain")
    S.run("rho bar is iso", lambda: _rho_bar_round_trips(model), "E/D, E, M, D")
    for case in (0, 1):
        S.run("naturality of eta", lambda: _naturality(model, case), case)
    f = model.filt
    triples = [((1, 2, 1), (f.delta(1), f.delta(2), f.xi(1, 2))),
               ((2, 2, 1), (f.delta(2), f.delta(2), f.xi(1, 2))),
               ((1, 3, 2), (f.delta(1), f.delta(3), f.xi(2, 3)))]
    for idx, (F, B, A) in triples:
        names = tuple(dn(i) for i in idx)
        S.run("diagram eta", lambda: (lambda r: r["triangle"] and r["exact_sequence"] is not False)(
            diagram_eta_check(E, F, B, A, names=names)), idx)
        S.run("formula eta ridotta", lambda: eta_reduced_check(E, F, B, A, names=names), idx)
        S.run("formula eta ridotta", lambda: eta_reduced_check(E, F, B, None, names=names[:2] + ("0",)),
              idx[:2] + (0,))
    for m in range(1, bound):
        for n in range(1, bound + 1 - m):
            S.run("lem utile 1", lambda: _lem_utile(model, m, n), (m, n))
    S.run("D alla n", lambda: d_alla_n_check(E, f.base, bound)[0], f"n ≤ {bound}")
    S.run("formula Fi trivial", lambda: fi_trivial_check(model), "Φ(D,D,0)")
    for n in range(1, min(3, bound) + 1):
        for k in range(1, bound - n + 1):
            for sx in range(k, bound - n + 1):
                S.run("formula Phi - xi", lambda: phi_xi_check(model, n, k, sx), (n, k, sx))
    for n in range(2, top_n + 1):
        S.run("formula Phi - f_M", lambda: phi_f_M_check(model, n), n)
        S.run("formula gamma", lambda: gamma_check(model, n), n)
        S.run("formula varphi", lambda: varphi_check(model, n), n)
        S.run("formula induction Phi", lambda: induction_phi_check(model, n), n)
        S.run("quotient square", lambda: quotient_square_check(model, n), n)
    for n in range(1, bound + 1):
        S.run("rel 3", lambda: rel3_check(model, n), n)
    for m in range(1, bound - 1):
        S.run("rel 6", lambda: rel6_check(model, m), m)
        S.run("rel 7", lambda: rel7_check(model, m), m)
    premise = 0
    for m in range(1, bound):
        for n in range(1, bound + 1 - m):
            r = _ef_exact(model, m, n)
            if r is None:
                continue
            premise += 1
            S.record("E/F exact", r, (m, n))
    if premise == 0:
        S.results["E/F exact"] = IdentityResult("E/F exact", True, 0, ["premise never holds"])
    return list(S.results.values())
