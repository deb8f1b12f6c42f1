"""The cotensor coalgebra T^c_C(M) truncated at a degree bound, its index maps,
the universal morphism f: D̃ → T^c_D(D²/D) and the maps Φ(D^n, D^k, 0)."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

from .coalg import Coalgebra, CoalgebraMap, Quiver, iterated_delta, subcoalgebra
from .comod import (Comodule, cotensor, cotensor_map, cotensor_power, induced_comodule,
                    quotient_bicomodule, regular, validate_comodule)
from .exactla import (
    LinAlgError,
    LinMap,
    Space,
    direct_sum_space,
    factor_through_epi,
    factor_through_mono,
    hstack,
    left_inverse,
    tensor,
    tensor_all,
    tensor_space,
)
from .filtration import WedgeFiltration, compute_filtration, dn
from .wedge import EtaResult, eta, gamma_map, into_cotensor, left_E_comodule


class PreconditionFailed(LinAlgError):
    pass


class TruncationWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# the graded object

@dataclass
class GradedCotensorCoalgebra:
    base: Coalgebra
    M: Comodule
    degree_bound: int
    pieces: list            # pieces[n] = M^{□n} as a C-bicomodule
    chis: list              # χ_n: M^{□n} → M^{⊗n}
    complete: bool
    total: Coalgebra
    warning: str | None = None
    _spaces: dict = field(default_factory=dict, repr=False)

    @property
    def top_degree(self) -> int:
        """Last degree carried by ``total``."""
        return len(self.pieces) - 1

    def dims(self) -> list[int]:
        return [P.dim for P in self.pieces]

    # objects are ("P", m), ("C", n) or ("T",)
    def _degrees(self, obj) -> list[int]:
        if obj[0] == "P":
            return [obj[1]] if obj[1] <= self.top_degree else []
        if obj[0] == "C":
            n = obj[1]
            if n > self.top_degree + 1 and not self.complete:
                raise ValueError(f"C^{n}(M) is not represented: the degree bound is {self.degree_bound}")
            return list(range(min(n, self.top_degree + 1)))
        return list(range(self.top_degree + 1))

    def space(self, obj) -> Space:
        if obj[0] == "P":
            return self.pieces[obj[1]].space if obj[1] <= self.top_degree else Space.zero()
        key = obj if obj[0] == "C" else ("T",)
        if key not in self._spaces:
            degs = self._degrees(key)
            self._spaces[key] = direct_sum_space([self.pieces[d].space for d in degs],
                                                 [str(d) for d in degs])
        return self._spaces[key]

    def _tagged(self, obj) -> list[str]:
        if obj[0] == "P":
            m = obj[1]
            return [f"{m}:{lab}" for lab in self.space(obj).labels]
        return list(self.space(obj).labels)

    def coordinate_map(self, src, dst) -> LinMap:
        """Identity on the common graded pieces, zero elsewhere."""
        tgt = {lab: i for i, lab in enumerate(self._tagged(dst))}
        cols = [{tgt[lab]: Fraction(1)} if lab in tgt else {} for lab in self._tagged(src)]
        return LinMap(self.space(src), self.space(dst), cols)

    def _zero(self, src, dst) -> LinMap:
        return LinMap.zero(self.space(src), self.space(dst))

    # index maps with the zero conventions for out-of-range indices
    def sigma(self, m: int, n: int | None = None) -> LinMap:
        """σ_m^n: C^m → C^n (0 if n < m); σ_m: C^m → T when n is None."""
        if n is None:
            return self.coordinate_map(("C", m), ("T",))
        if n < m:
            return self._zero(("C", m), ("C", n))
        return self.coordinate_map(("C", m), ("C", n))

    def pi(self, n: int | None, m: int) -> LinMap:
        """π_n^m: C^n → C^m (0 if n < m); π_m: T → C^m when n is None."""
        if n is None:
            return self.coordinate_map(("T",), ("C", m))
        if n < m:
            return self._zero(("C", n), ("C", m))
        return self.coordinate_map(("C", n), ("C", m))

    def p(self, n: int | None, m: int) -> LinMap:
        """p_n^m: C^n → M^{□m} (0 if n ≤ m); p_m: T → M^{□m} when n is None."""
        if n is None:
            return self.coordinate_map(("T",), ("P", m))
        if n <= m:
            return self._zero(("C", n), ("P", m))
        return self.coordinate_map(("C", n), ("P", m))

    def i(self, m: int, n: int | None = None) -> LinMap:
        """i_m^n: M^{□m} → C^n (0 if n ≤ m); i_m: M^{□m} → T when n is None."""
        if n is None:
            return self.coordinate_map(("P", m), ("T",))
        if n <= m:
            return self._zero(("P", m), ("C", n))
        return self.coordinate_map(("P", m), ("C", n))

    def stage(self, n: int):
        """C^n(M) as a subcoalgebra of the total coalgebra via σ_n."""
        return subcoalgebra(self.total, self.sigma(n), name=f"C^{n}")

    def to_dict(self) -> dict:
        return {"dims": self.dims(), "degree_bound": self.degree_bound,
                "complete": self.complete, "total_dim": self.total.dim,
                "warning": self.warning}


def build(C: Coalgebra, M: Comodule, N: int) -> GradedCotensorCoalgebra:
    """Pieces M^{□0..N} and the total coalgebra on ⊕_{n≤N′} M^{□n}.

    Δ on M^{□n} is Σ_{a+b=n} Δ_{a,b}: the left and right coactions for
    (0, n) and (n, 0), and for a, b ≥ 1 the factorisation of χ_n through
    χ_a⊗χ_b.  N′ is the last nonzero degree ≤ N.
    """
    if N < 1:
        raise ValueError("the degree bound must be at least 1")
    if M.left != C or M.right != C:
        raise LinAlgError("M must be a C-bicomodule")
    rep = validate_comodule(M)
    if not rep.ok:
        raise LinAlgError(f"M is not a bicomodule: {rep}")
    pieces, chis = [], []
    for n in range(N + 1):
        P, chi = cotensor_power(M, n)
        pieces.append(P)
        chis.append(chi)
    complete = pieces[N].dim == 0
    last = max([n for n, P in enumerate(pieces) if P.dim > 0], default=0)
    pieces, chis = pieces[:last + 1], chis[:last + 1]
    warning = None
    if not complete:
        warning = f"M^□{N} ≠ 0: only degrees ≤ {N} are represented"
    T = GradedCotensorCoalgebra(C, M, N, pieces, chis, complete, None, warning)
    S = T.space(("T",))
    inc = [T.coordinate_map(("P", n), ("T",)) for n in range(len(pieces))]
    blocks = []
    for n, P in enumerate(pieces):
        terms = []
        for a in range(n + 1):
            b = n - a
            if n == 0:
                d = C.delta
            elif a == 0:
                d = P.rho_l
            elif b == 0:
                d = P.rho_r
            else:
                d = factor_through_mono(chis[n], tensor(chis[a], chis[b]))
            terms.append(tensor(inc[a], inc[b]) @ d)
        total = terms[0]
        for t in terms[1:]:
            total = total + t
        blocks.append(total)
    delta = hstack(blocks, domain=S)
    eps = C.epsilon @ T.coordinate_map(("T",), ("P", 0))
    T.total = Coalgebra(S, delta, eps, name=f"T^c_{C.name}({M.name})")
    rep = T.total.validate()
    if not rep.ok:
        raise AssertionError(f"the graded comultiplication is not a coalgebra: {rep}")
    return T


RELATIONS = (
    "p_n σ_k = p_k^n",
    "p_n i_k = δ_nk id",
    "π_n i_k = i_k^n",
    "π_n^m σ_k^n",
    "p_n^m π_k^n",
    "σ_n^m i_k^n",
    "p_n^m σ_k^n",
    "π_n^m i_k^n",
    "p_n^m π_n",
    "σ_n i_m^n",
    "π_n σ_k",
    "p_n^m i_m^n",
)


def relation_table_check(T: GradedCotensorCoalgebra, bound: int = 5) -> tuple[bool, list]:
    """Every index-map relation, with the zero cases, for indices ≤ bound.

    Returns (all hold, failures) where a failure is (relation, indices).
    """
    if not T.complete:
        bound = min(bound, T.top_degree + 1)
    rng = range(bound + 1)
    pr = [m for m in rng if m <= T.top_degree or T.complete]
    fails = []

    def eq(name, idx, lhs, rhs):
        if lhs != rhs:
            fails.append((name, idx))

    def zero(a, b):
        return T._zero(a, b)

    for n in pr:
        for k in rng:
            eq(RELATIONS[0], (n, k), T.p(None, n) @ T.sigma(k), T.p(k, n))
            eq(RELATIONS[2], (n, k), T.pi(None, k) @ T.i(n), T.i(n, k))
            ident = T.pieces[k].id if (k == n and k <= T.top_degree) else zero(("P", k), ("P", n))
            if k in pr:
                eq(RELATIONS[1], (n, k), T.p(None, n) @ T.i(k), ident)
    for n in rng:
        for m in rng:
            for k in rng:
                if k <= m <= n:
                    rhs = T.sigma(k, m)
                elif m <= k <= n:
                    rhs = T.pi(k, m)
                else:
                    rhs = zero(("C", k), ("C", m))
                eq(RELATIONS[3], (n, m, k), T.pi(n, m) @ T.sigma(k, n), rhs)
                # π_n^m with n ≤ m is only meaningful as a zero or an identity
                if m in pr:
                    rhs = T.p(k, m) if m < n <= k else zero(("C", k), ("P", m))
                    eq(RELATIONS[4], (n, m, k), T.p(n, m) @ T.pi(k, n), rhs)
                    rhs = T.p(k, m) if m < k <= n else zero(("C", k), ("P", m))
                    eq(RELATIONS[6], (n, m, k), T.p(n, m) @ T.sigma(k, n), rhs)
                if k in pr:
                    rhs = T.i(k, m) if k < n <= m else zero(("P", k), ("C", m))
                    eq(RELATIONS[5], (n, m, k), T.sigma(n, m) @ T.i(k, n), rhs)
                    rhs = T.i(k, m) if k < m <= n else zero(("P", k), ("C", m))
                    eq(RELATIONS[7], (n, m, k), T.pi(n, m) @ T.i(k, n), rhs)
            if m in pr:
                rhs = T.p(None, m) if m < n else zero(("T",), ("P", m))
                eq(RELATIONS[8], (n, m), T.p(n, m) @ T.pi(None, n), rhs)
                rhs = T.i(m) if m < n else zero(("P", m), ("T",))
                eq(RELATIONS[9], (n, m), T.sigma(n) @ T.i(m, n), rhs)
                rhs = T.pieces[m].id if (m < n and m <= T.top_degree) else zero(("P", m), ("P", m))
                eq(RELATIONS[11], (n, m), T.p(n, m) @ T.i(m, n), rhs)
        for k in rng:
            rhs = T.sigma(k, n) if k <= n else T.pi(k, n)
            eq(RELATIONS[10], (n, k), T.pi(None, n) @ T.sigma(k), rhs)
    return not fails, fails


def stages_are_subcoalgebras(T: GradedCotensorCoalgebra, upto: int | None = None) -> bool:
    """C^n(M) is a subcoalgebra and σ_m^n is a coalgebra map."""
    upto = T.top_degree + 1 if upto is None else upto
    stages = [T.stage(n) for n in range(upto + 1)]
    for m in range(upto + 1):
        for n in range(m, upto + 1):
            f = CoalgebraMap(stages[m].coalgebra, stages[n].coalgebra, T.sigma(m, n))
            if not f.is_valid():
                return False
    return True


# ---------------------------------------------------------------------------
# quiver examples

def quiver_bicomodule(q: Quiver) -> tuple[Coalgebra, Comodule]:
    """(span of the vertices, the arrows) with ρ_l(a) = s(a)⊗a, ρ_r(a) = a⊗t(a)."""
    V = Space(tuple(f"e{v}" for v in q.vertices))
    nv = V.dim
    C = Coalgebra(V, LinMap(V, tensor_space(V, V), [{i * nv + i: Fraction(1)} for i in range(nv)]),
                  LinMap(V, Space.ground(), [{0: Fraction(1)}] * nv), name="kQ0")
    A = Space(tuple(a for a, _, _ in q.arrows))
    na = A.dim
    vi = {v: i for i, v in enumerate(q.vertices)}
    rho_l = LinMap(A, tensor_space(V, A), [{vi[s] * na + j: Fraction(1)} for j, (_, s, _) in enumerate(q.arrows)])
    rho_r = LinMap(A, tensor_space(A, V), [{j * nv + vi[t]: Fraction(1)} for j, (_, _, t) in enumerate(q.arrows)])
    return C, Comodule(A, C, rho_l, C, rho_r, name="kQ1")


def path_identification(q: Quiver, T: GradedCotensorCoalgebra, P: Coalgebra) -> LinMap:
    """T → path coalgebra: a composable a1⊗…⊗an goes to the path a1·…·an."""
    pidx = {lab: i for i, lab in enumerate(P.space.labels)}
    blocks = []
    for n, piece in enumerate(T.pieces):
        flat = T.chis[n]
        rows = {}
        for r, lab in enumerate(flat.codomain.labels):
            key = lab if n == 0 else "·".join(lab.split("⊗"))
            if key in pidx:
                rows[r] = pidx[key]
        cols = []
        for col in flat.cols:
            out = {}
            for r, v in col.items():
                if r in rows:
                    out[rows[r]] = out.get(rows[r], 0) + v
            cols.append(out)
        blocks.append(LinMap(piece.space, P.space, cols))
    return hstack(blocks, domain=T.total.space)


# ---------------------------------------------------------------------------
# the model D ⊆ E, M = E/D□_E D ≅ D²/D, and the maps f_D, f_M, f, Φ

@dataclass
class UniversalMorphismResult:
    f: CoalgebraMap | None
    f_D: CoalgebraMap | None
    f_M: LinMap | None
    per_degree: list            # f_n, n = 0, 1, ...
    verdict: str                # "Isomorphism", "MonoNotEpi" or "Failure"
    failing_degree: int | None = None
    reason: str | None = None
    checks: dict = field(default_factory=dict)
    certificate: dict | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "failing_degree": self.failing_degree,
            "reason": self.reason,
            "per_degree": [{"degree": n, "rank": fn.rank, "source_dim": fn.domain.dim,
                            "target_dim": fn.codomain.dim, "injective": fn.is_injective(),
                            "surjective": fn.is_surjective()}
                           for n, fn in enumerate(self.per_degree)],
            "checks": dict(self.checks),
        }


class LiftFailed(LinAlgError):
    def __init__(self, msg, degree=None, certificate=None):
        super().__init__(msg)
        self.degree = degree
        self.certificate = certificate


def lift_retraction(filt: WedgeFiltration) -> CoalgebraMap:
    """A coalgebra map f_D: D̃ → D with f_D∘ξ_1 = id, built stage by stage.

    At D^n → D^{n+1} the candidate G0 = f∘λ is corrected by an h vanishing
    on D^n.  Since Δ(D^{n+1}) ⊆ D⊗E + E⊗D^n, (h⊗h)∘Δ = 0 and the coalgebra
    equations for G0 + h are linear in h.
    """
    from .homcheck import FeasibilityProblem

    D = filt.stage(1).coalgebra
    cur = D.id
    for n in range(1, filt.top):
        Cn1 = filt.stage(n + 1).coalgebra
        xi = filt.xi(n, n + 1)
        G0 = cur @ left_inverse(xi)
        prob = FeasibilityProblem(Cn1.space, D.space)
        prob.add("vanishes on the previous stage", lambda h, xi=xi: h @ xi)
        prob.add("comultiplicative",
                 lambda h, G0=G0, Cn1=Cn1: D.delta @ (G0 + h)
                 - (tensor(G0, G0) + tensor(G0, h) + tensor(h, G0)) @ Cn1.delta)
        prob.add("counital", lambda h, G0=G0, Cn1=Cn1: D.epsilon @ (G0 + h) - Cn1.epsilon)
        res = prob.solve()
        if not res.feasible:
            raise LiftFailed(f"no coalgebra retraction extends to {dn(n + 1)}",
                             degree=n + 1, certificate=res.certificate)
        cur = G0 + res.solution
        assert CoalgebraMap(Cn1, D, cur).is_valid()
    return CoalgebraMap(filt.dtilde.coalgebra, D, cur)


class CotensorModel:
    """Everything built from a subcoalgebra D ⊆ E that the universal morphism
    and the Φ identities need.

    M is kept in three guises that share one space: ``M_E`` = E/D□_E D with
    left E- and right D-coactions, ``M`` with the left coaction induced to D,
    and the presentation (M_E, η(D,D,0)) of D²/D.
    """

    def __init__(self, E: Coalgebra, D, filt: WedgeFiltration | None = None,
                 degree_bound: int | None = None):
        self.E = E
        self.filt = filt if filt is not None else compute_filtration(E, D)
        self.D = self.filt.stage(1).coalgebra
        self.delta1 = self.filt.delta(1)
        self.s = self.filt.top
        bound = degree_bound if degree_bound is not None else self.s
        if bound < self.s:
            # D̃ = D^s only maps into C^s(M), which needs the degrees below s
            warnings.warn(f"degree bound {bound} raised to the stabilization index {self.s}",
                          TruncationWarning, stacklevel=2)
            bound = self.s
        self.degree_bound = max(bound, 1)
        self.D_bi = left_E_comodule(E, self.delta1, "D", right=(self.D, self.D.delta))
        Q1 = self.Q(1)
        self.M_E = cotensor(Q1, self.D_bi)
        M = induced_comodule(CoalgebraMap(self.D, E, self.delta1), self.M_E, side="left")
        self.M = replace(M, chi=self.M_E.chi, factors=self.M_E.factors, name="M")
        self._eta: dict = {}
        self._B: dict = {}
        self._phi: dict = {}

    # -- quotients and η ------------------------------------------------------
    def Q(self, n: int) -> Comodule:
        return quotient_bicomodule(self.E, self.filt.delta(n), "both", name=f"{self.E.name}/{dn(n)}")[0]

    def pQ(self, n: int) -> LinMap:
        return quotient_bicomodule(self.E, self.filt.delta(n), "both", name=f"{self.E.name}/{dn(n)}")[1]

    def B(self, k: int) -> Comodule:
        """D^k as a left E-comodule (D also carries its right D-coaction)."""
        if k == 1:
            return self.D_bi
        if k not in self._B:
            self._B[k] = left_E_comodule(self.E, self.filt.delta(k), dn(k))
        return self._B[k]

    def eta(self, n: int, k: int) -> EtaResult:
        """η(D^n, D^k, 0): D^{n+k} → E/D^n □_E D^k."""
        key = (n, k)
        if key not in self._eta:
            f = self.filt
            self._eta[key] = eta(self.E, f.delta(n), f.delta(k), None,
                                 names=(dn(n), dn(k), "0"), wedge_incl=f.delta(n + k),
                                 B_comodule=self.B(k))
        return self._eta[key]

    @cached_property
    def eta_DD(self) -> LinMap:
        h = self.eta(1, 1).map
        assert h.codomain == self.M.space
        return h

    def eta_D2D(self, m: int) -> EtaResult:
        """η(D^m, D², D): D^{m+2} → E/D^m □_E M, with D²/D presented by η(D,D,0)."""
        key = ("D2D", m)
        if key not in self._eta:
            f = self.filt
            self._eta[key] = eta(self.E, f.delta(m), f.delta(2), f.xi(1, 2),
                                 names=(dn(m), "D^2", "D"), wedge_incl=f.delta(m + 2),
                                 quotient=(self.M_E, self.eta_DD))
        return self._eta[key]

    # -- f_D, f_M -----------------------------------------------------------
    @cached_property
    def f_D(self) -> CoalgebraMap:
        return lift_retraction(self.filt)

    @cached_property
    def dtilde(self) -> Coalgebra:
        return self.filt.dtilde.coalgebra

    def solve_f_M(self):
        """FeasibilityResult for a D-bicomodule map X: D̃ → M with X∘ξ_2 = η(D,D,0)."""
        from .homcheck import FeasibilityProblem

        Dt, fD, M = self.dtilde, self.f_D.map, self.M
        prob = FeasibilityProblem(Dt.space, M.space)
        prob.add("left colinear", lambda X: M.rho_l @ X - tensor(fD, X) @ Dt.delta)
        prob.add("right colinear", lambda X: M.rho_r @ X - tensor(X, fD) @ Dt.delta)
        prob.add("extends η(D,D,0)", lambda X: X @ self.filt.xi(2) - self.eta_DD)
        return prob.solve()

    @cached_property
    def f_M(self) -> LinMap:
        res = self.solve_f_M()
        if not res.feasible:
            raise LiftFailed("no bicomodule map D̃ → M extends η(D,D,0)", certificate=res.certificate)
        return res.solution

    @cached_property
    def T(self) -> GradedCotensorCoalgebra:
        return build(self.D, self.M, self.degree_bound)

    def g(self, t: int) -> LinMap:
        """p_t∘f = f_M^{□t}∘Δ̄^{t-1}: D̃ → M^{□t} (f_D for t = 0)."""
        if t == 0:
            return self.f_D.map
        T = self.T
        if t > T.top_degree:
            if not T.complete:
                raise ValueError(f"M^□{t} is past the degree bound {T.degree_bound}")
            return LinMap.zero(self.dtilde.space, T.space(("P", t)))
        return factor_through_mono(tensor_all(*([self.f_M] * t)) @ iterated_delta(self.dtilde, t - 1),
                                   T.chis[t])

    def f_n(self, n: int) -> LinMap:
        """f_n = Σ_{t<n} i_t^n∘g_t∘ξ_n: D^n → C^n(M)."""
        T = self.T
        out = LinMap.zero(self.filt.stage(n).coalgebra.space if n else Space.zero(), T.space(("C", n)))
        if n == 0:
            return out
        xi = self.filt.xi(n)
        for t in range(min(n, T.top_degree + 1)):
            out = out + T.i(t, n) @ self.g(t) @ xi
        return out

    # -- Φ --------------------------------------------------------------------
    def phi(self, n: int, k: int) -> LinMap:
        """Φ(D^n,D^k,0): E/D^n□_E D^k → M^{□n} with Φ∘η(D^n,D^k,0) = g_n∘ξ_{n+k}."""
        key = (n, k)
        if key not in self._phi:
            r = self.eta(n, k)
            self._phi[key] = factor_through_epi(self.g(n) @ self.filt.xi(n + k), r.map)
        return self._phi[key]

    def power(self, n: int) -> Comodule:
        return cotensor_power(self.M, n)[0]


def check_preconditions(model: CotensorModel) -> dict:
    """The hypotheses of the universal property, each named by its equation."""
    fD, fM, Dt, M = model.f_D, model.f_M, model.dtilde, model.M
    xi1 = model.filt.xi(1)
    return {
        "f_D∘ξ_1 = id": fD.map @ xi1 == model.D.id,
        "f_D coalgebra map": fD.is_valid(),
        "f_M left colinear": M.rho_l @ fM == tensor(fD.map, fM) @ Dt.delta,
        "f_M right colinear": M.rho_r @ fM == tensor(fM, fD.map) @ Dt.delta,
        "f_M∘ξ_1 = 0": (fM @ xi1).is_zero(),
        "f_M∘ξ_2 = η(D,D,0)": fM @ model.filt.xi(2) == model.eta_DD,
    }


def universal_morphism(model: CotensorModel) -> UniversalMorphismResult:
    """Assemble f = Σ i_t g_t and classify it degreewise."""
    try:
        fD = model.f_D
    except LiftFailed as exc:
        return UniversalMorphismResult(None, None, None, [], "Failure", exc.degree,
                                       f"f_D: {exc}", certificate=exc.certificate)
    res = model.solve_f_M()
    if not res.feasible:
        return UniversalMorphismResult(None, fD, None, [], "Failure", None,
                                       "f_M: no bicomodule map extends η(D,D,0)",
                                       certificate=res.certificate)
    pre = check_preconditions(model)
    bad = [k for k, v in pre.items() if not v]
    if bad:
        raise PreconditionFailed(f"violated: {', '.join(bad)}")
    T = model.T
    Dt = model.dtilde
    f = LinMap.zero(Dt.space, T.total.space)
    for t in range(T.top_degree + 1):
        f = f + T.i(t) @ model.g(t)
    fmap = CoalgebraMap(Dt, T.total, f)
    checks = dict(pre)
    checks["f coalgebra map"] = fmap.is_valid()
    checks["p_0 f = f_D"] = T.p(None, 0) @ f == fD.map
    checks["p_1 f = f_M"] = T.top_degree < 1 or T.p(None, 1) @ f == model.f_M
    last = T.top_degree + 1 if not T.complete else max(model.s + 1, T.top_degree + 1)
    per = [model.f_n(n) for n in range(last + 1)]
    checks["f ξ_n = σ_n f_n"] = all(
        f @ model.filt.xi(n) == T.sigma(n) @ per[n] for n in range(1, last + 1))
    if not all(checks.values()):
        failed = [k for k, v in checks.items() if not v]
        return UniversalMorphismResult(fmap, fD, model.f_M, per, "Failure", None,
                                       f"failed: {', '.join(failed)}", checks)
    nonmono = [n for n, fn in enumerate(per) if not fn.is_injective()]
    if nonmono:
        return UniversalMorphismResult(fmap, fD, model.f_M, per, "Failure", nonmono[0],
                                       f"f_{nonmono[0]} is not injective", checks)
    nonepi = [n for n, fn in enumerate(per) if not fn.is_surjective()]
    if not nonepi and T.complete and f.is_isomorphism():
        return UniversalMorphismResult(fmap, fD, model.f_M, per, "Isomorphism", None, None, checks)
    deg = nonepi[0] if nonepi else None
    reason = None if nonepi else "T^c is truncated at the degree bound"
    return UniversalMorphismResult(fmap, fD, model.f_M, per, "MonoNotEpi", deg, reason, checks)


def quotient_square_check(model: CotensorModel, n: int) -> bool:
    """Φ(D^{n-1},D,0)∘η(D^{n-1},D,0) = p_n^{n-1}∘f_n (n ≥ 2)."""
    T = model.T
    return model.phi(n - 1, 1) @ model.eta(n - 1, 1).map == T.p(n, n - 1) @ model.f_n(n)


# ---------------------------------------------------------------------------
# identities for Φ

def _reassociate(X1: Comodule, X2: Comodule) -> LinMap:
    """The identification of two bracketings, read off the flat embeddings."""
    h = factor_through_mono(X1.flat, X2.flat)
    assert h.is_isomorphism(), "bracketings are not identified"
    return h


def fi_trivial_check(model: CotensorModel) -> bool:
    """Φ(D,D,0) = id_M."""
    return model.phi(1, 1) == model.M.id


def rel3_check(model: CotensorModel, n: int) -> bool:
    """(E/D□ξ_1^n)∘η(D,D,0) = η(D,D^n,0)∘ξ_2^{n+1}."""
    a, b = model.eta(1, 1), model.eta(1, n)
    v = cotensor_map(model.Q(1).id, model.filt.xi(1, n), a.target, b.target)
    return v @ a.map == b.map @ model.filt.xi(2, n + 1)


def rel6_check(model: CotensorModel, m: int) -> bool:
    """η(D^m,D²,D) = (E/D^m□η(D,D,0))∘η(D^m,D²,0)."""
    a, b = model.eta(m, 2), model.eta_D2D(m)
    v = cotensor_map(model.Q(m).id, model.eta_DD, a.target, b.target)
    return b.map == v @ a.map


def rel7_check(model: CotensorModel, m: int) -> bool:
    """(E/D^m□ξ_2^{m+2})∘η(D^m,D²,0) = (p_{D^m}∘δ_{m+2} ⊗ id)∘Δ, into E/D^m□D^{m+2}."""
    f = model.filt
    a = model.eta(m, 2)
    W = cotensor(model.Q(m).forget_left(), model.B(m + 2))
    v = cotensor_map(model.Q(m).id, f.xi(2, m + 2), a.target, W)
    Cm2 = f.stage(m + 2).coalgebra
    rhs = into_cotensor(tensor(model.pQ(m) @ f.delta(m + 2), Cm2.id) @ Cm2.delta, W)
    return v @ a.map == rhs


def gamma_check(model: CotensorModel, n: int) -> bool:
    """(γ_n□_E D)∘η(D^n,D,0) = η(D^{n-1},D²,D) (n ≥ 2), compared on flats."""
    E, f = model.E, model.filt
    gam, Qn, tgt = gamma_map(E, f.delta(n), f.delta(n - 1), f.delta(1), names=(dn(n), dn(n - 1), "D"))
    a = model.eta(n, 1)
    X2 = cotensor(tgt.forget_left(), model.D_bi)
    lhs = X2.flat @ cotensor_map(gam, model.D_bi.id, a.target, X2) @ a.map
    b = model.eta_D2D(n - 1)
    return lhs == b.target.flat @ b.map


def _phi_map(model: CotensorModel, m: int):
    """φ = (E/D^m□^Dρ̄_M)∘η(D^m,D²,D): D^{m+2} → E/D^m□_E(D□_D M)."""
    M = model.M
    Z = cotensor(model.D_bi, M)
    rb = factor_through_mono(M.rho_l, Z.chi)
    b = model.eta_D2D(m)
    Y1 = cotensor(model.Q(m).forget_left(), Z)
    return cotensor_map(model.Q(m).id, rb, b.target, Y1), b, Y1


def varphi_check(model: CotensorModel, n: int) -> bool:
    """(E/D^{n-1}□ξ_1^2 ⊗ E/D□ξ_1^n)∘φ = (η(D^{n-1},D²,0) ⊗ η(D,D^n,0))∘Δ_{D^{n+1}} on flats."""
    f = model.filt
    m = n - 1
    rb, b, Y1 = _phi_map(model, m)
    phi = rb @ b.map
    lhs = tensor_all(model.Q(m).id, f.xi(1, 2), model.Q(1).id, f.xi(1, n)) @ Y1.flat @ phi
    a1, a2 = model.eta(m, 2), model.eta(1, n)
    Cn1 = f.stage(n + 1).coalgebra
    rhs = tensor(a1.target.flat @ a1.map @ f.xi(m + 2, n + 1),
                 a2.target.flat @ a2.map @ f.xi(n + 1, n + 1)) @ Cn1.delta
    return lhs == rhs


def _box_M(model: CotensorModel, m: int):
    """[Φ(D^m,D,0)□_D M]∘reassociation: E/D^m□_E(D□_D M) → M^{□m+1}."""
    M = model.M
    Z = cotensor(model.D_bi, M)
    Y1 = cotensor(model.Q(m).forget_left(), Z)
    X = model.eta(m, 1).target
    Y2 = cotensor(X, M)
    Pm1 = model.power(m + 1)
    return cotensor_map(model.phi(m, 1), M.id, Y2, Pm1) @ _reassociate(Y1, Y2)


def phi_f_M_check(model: CotensorModel, n: int) -> bool:
    """[Φ(D^{n-1},D,0)□_D M]∘φ = f_M^{□n}∘Δ̄^{n-1}∘ξ_{n+1} (n ≥ 2)."""
    m = n - 1
    rb, b, _ = _phi_map(model, m)
    lhs = _box_M(model, m) @ rb @ b.map
    return lhs == model.g(n) @ model.filt.xi(n + 1)


def induction_phi_check(model: CotensorModel, n: int) -> bool:
    """Φ(D^n,D,0) = [Φ(D^{n-1},D,0)□_D M]∘[E/D^{n-1}□_E ^Dρ̄_M]∘(γ_n□_E D) (n ≥ 2)."""
    E, f = model.E, model.filt
    m = n - 1
    gam, Qn, tgt = gamma_map(E, f.delta(n), f.delta(m), f.delta(1), names=(dn(n), dn(m), "D"))
    X0 = model.eta(n, 1).target
    X2 = cotensor(tgt.forget_left(), model.D_bi)
    step_a = cotensor_map(gam, model.D_bi.id, X0, X2)
    Y0 = model.eta_D2D(m).target
    step_b = _reassociate(X2, Y0) if X2.dim == Y0.dim else factor_through_mono(X2.flat, Y0.flat)
    rb, _, _ = _phi_map(model, m)
    rhs = _box_M(model, m) @ rb @ step_b @ step_a
    return rhs == model.phi(n, 1)


def phi_xi_check(model: CotensorModel, n: int, k: int, s: int) -> bool:
    """Φ(D^n,D^s,0)∘(E/D^n□ξ_k^s) = Φ(D^n,D^k,0) for s ≥ k ≥ 1."""
    a, b = model.eta(n, k), model.eta(n, s)
    v = cotensor_map(model.Q(n).id, model.filt.xi(k, s), a.target, b.target)
    return model.phi(n, s) @ v == model.phi(n, k)


def phi_recursion_check(model: CotensorModel, n: int) -> dict:
    """The recursion for Φ(D^n,D,0) and the identities supporting it.

    Returns {identity name: holds}; the recursion itself needs n ≥ 2 and
    reduces to Φ(D,D,0) = id for n = 1.
    """
    if n == 1:
        return {"Fi trivial": fi_trivial_check(model)}
    out = {
        "rel 3": rel3_check(model, n),
        "rel 6": rel6_check(model, n - 1),
        "rel 7": rel7_check(model, n - 1),
        "formula gamma": gamma_check(model, n),
        "formula varphi": varphi_check(model, n),
        "Phi - f_M": phi_f_M_check(model, n),
        "induction Phi": induction_phi_check(model, n),
    }
    return out


def super_phi_check(model: CotensorModel, upto: int | None = None) -> list[dict]:
    """For each n: is Φ(D^n,D,0) mono, does E/D^n□p_D stay epi, is Φ iso."""
    from .homcheck import condition4

    upto = model.s if upto is None else upto
    c4 = condition4(model.E, model.filt)
    per = c4.details["per_degree"]
    out = []
    for n in range(1, upto + 1):
        ph = model.phi(n, 1)
        hyp = all(per.get(j, True) for j in range(1, n + 1))
        out.append({"degree": n, "mono": ph.is_injective(), "epi_hypothesis": hyp,
                    "iso": ph.is_isomorphism()})
    return out
