"""Coalgebras given by structure constants, their maps, subcoalgebras and builders."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactla import (
    LinAlgError,
    LinMap,
    NoFactorization,
    Space,
    direct_sum,
    factor_through_mono,
    image,
    tensor,
    tensor_space,
    twist,
)

K = Space.ground()


class NotASubcoalgebra(LinAlgError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class NonAcyclicQuiver(ValueError):
    pass


class InvalidStructure(ValueError):
    """A structure failed validation where validity is required."""

    def __init__(self, report: "ValidationReport"):
        super().__init__(str(report))
        self.report = report


@dataclass
class AxiomCheck:
    name: str
    passed: bool
    witness: str | None = None


@dataclass
class ValidationReport:
    checks: list[AxiomCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, lhs: LinMap, rhs: LinMap):
        j = lhs.first_difference(rhs)
        witness = None if j is None else lhs.domain.labels[j]
        self.checks.append(AxiomCheck(name, j is None, witness))

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def __str__(self):
        return "; ".join(
            f"{c.name}: {'ok' if c.passed else 'FAIL at ' + str(c.witness)}" for c in self.checks)

    def to_dict(self) -> dict:
        return {"ok": self.ok,
                "checks": [{"name": c.name, "passed": c.passed, "witness": c.witness}
                           for c in self.checks]}


@dataclass(frozen=True)
class Coalgebra:
    space: Space
    delta: LinMap
    epsilon: LinMap
    name: str = field(default="C", compare=False)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def id(self) -> LinMap:
        return LinMap.identity(self.space)

    def validate(self) -> ValidationReport:
        return validate(self)

    def iterated_delta(self, n: int) -> LinMap:
        return iterated_delta(self, n)

    def __repr__(self):
        return f"Coalgebra({self.name}, dim={self.dim})"


def validate(c: Coalgebra) -> ValidationReport:
    """Check coassociativity and both counit laws, with witness basis vectors."""
    rep = ValidationReport()
    C, I = c.space, c.id
    CC = tensor_space(C, C)
    shape_ok = c.delta.domain == C and c.delta.codomain == CC \
        and c.epsilon.domain == C and c.epsilon.codomain == K
    rep.checks.append(AxiomCheck("shapes", shape_ok))
    if not shape_ok:
        return rep
    rep.add("coassociativity", tensor(c.delta, I) @ c.delta, tensor(I, c.delta) @ c.delta)
    # k⊗C = C strictly
    rep.add("left counit", (tensor(c.epsilon, I) @ c.delta).relabel(codomain=C), I)
    rep.add("right counit", (tensor(I, c.epsilon) @ c.delta).relabel(codomain=C), I)
    return rep


def iterated_delta(c: Coalgebra, n: int) -> LinMap:
    """Δ^0 = id, Δ^n = (Δ^{n-1}⊗id)∘Δ : C → C^{⊗(n+1)}."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return c.id
    out = c.delta
    for _ in range(n - 1):
        out = tensor(out, c.id) @ c.delta
    return out


def iterated_delta_right(c: Coalgebra, n: int) -> LinMap:
    """The other bracketing (id⊗Δ^{n-1})∘Δ."""
    if n == 0:
        return c.id
    return tensor(c.id, iterated_delta_right(c, n - 1)) @ c.delta


@dataclass(frozen=True)
class CoalgebraMap:
    source: Coalgebra
    target: Coalgebra
    map: LinMap

    def check(self) -> ValidationReport:
        rep = ValidationReport()
        f = self.map
        rep.add("comultiplicative", self.target.delta @ f, tensor(f, f) @ self.source.delta)
        rep.add("counital", self.target.epsilon @ f, self.source.epsilon)
        return rep

    def is_valid(self) -> bool:
        return self.check().ok

    def __matmul__(self, other: "CoalgebraMap") -> "CoalgebraMap":
        return CoalgebraMap(other.source, self.target, self.map @ other.map)


def coopposite(c: Coalgebra) -> Coalgebra:
    """Same space and counit, comultiplication followed by the flip."""
    return Coalgebra(c.space, twist(c.space, c.space) @ c.delta, c.epsilon, name=f"{c.name}^cop")


def identity_map(c: Coalgebra) -> CoalgebraMap:
    return CoalgebraMap(c, c, c.id)


@dataclass(frozen=True)
class Subcoalgebra:
    """A subcoalgebra of ``ambient``; ``inclusion`` is injective and comultiplicative."""

    ambient: Coalgebra
    inclusion: LinMap
    coalgebra: Coalgebra

    @property
    def dim(self) -> int:
        return self.coalgebra.dim

    @property
    def as_map(self) -> CoalgebraMap:
        return CoalgebraMap(self.coalgebra, self.ambient, self.inclusion)


def subcoalgebra(c: Coalgebra, inclusion: LinMap, name: str = "D", prefix: str | None = None) -> Subcoalgebra:
    """Induce the coalgebra structure on the image of an injective ``inclusion``."""
    if not inclusion.is_injective():
        raise LinAlgError("inclusion is not injective")
    target = tensor(inclusion, inclusion)
    try:
        d = factor_through_mono(c.delta @ inclusion, target)
    except NoFactorization as exc:
        w = exc.witness
        raise NotASubcoalgebra(
            "Δ of the span escapes span⊗span",
            witness=None if w is None else inclusion.domain.labels[w]) from exc
    sub = Coalgebra(inclusion.domain, d, c.epsilon @ inclusion, name=name)
    return Subcoalgebra(c, inclusion, sub)


def subcoalgebra_from_span(c: Coalgebra, vectors, name: str = "D", prefix: str | None = None) -> Subcoalgebra:
    """Subcoalgebra spanned by coefficient vectors (lists over the basis of c) or labels.

    The basis of the result is the reduced echelon basis of the span; when it
    consists of basis vectors of c their labels are kept.
    """
    vecs = []
    for v in vectors:
        if isinstance(v, str):
            vecs.append({c.space.index(v): Fraction(1)})
        else:
            if len(v) != c.dim:
                raise ValueError("span vector has the wrong length")
            vecs.append({i: Fraction(x) for i, x in enumerate(v) if Fraction(x)})
    gen = LinMap(Space.basis("g", len(vecs)), c.space, vecs)
    _, inc = image(gen, prefix=prefix or name.lower())
    labs = []
    for col in inc.cols:
        if len(col) == 1 and next(iter(col.values())) == 1:
            labs.append(c.space.labels[next(iter(col))])
    if len(labs) == inc.domain.dim:
        inc = inc.relabel(domain=Space(tuple(labs)))
    return subcoalgebra(c, inc, name=name)


def zero_subcoalgebra(c: Coalgebra) -> Subcoalgebra:
    Z = Space.zero()
    return Subcoalgebra(c, LinMap.zero(Z, c.space),
                        Coalgebra(Z, LinMap.zero(Z, tensor_space(Z, Z)), LinMap.zero(Z, K), name="0"))


def whole(c: Coalgebra) -> Subcoalgebra:
    return Subcoalgebra(c, c.id, c)


# ---------------------------------------------------------------------------
# builders

def grouplike(g: int) -> Coalgebra:
    """GL(g): basis g0..g_{g-1} with Δg = g⊗g and εg = 1."""
    S = Space.basis("g", g)
    CC = tensor_space(S, S)
    delta = LinMap(S, CC, [{i * g + i: Fraction(1)} for i in range(g)])
    eps = LinMap(S, K, [{0: Fraction(1)} for _ in range(g)])
    return Coalgebra(S, delta, eps, name=f"GL({g})")


def divided_power(N: int) -> Coalgebra:
    """DP(N): basis c0..c_{N-1}, Δc_k = Σ_{i+j=k} c_i⊗c_j, εc_k = δ_{k,0}."""
    S = Space.basis("c", N)
    CC = tensor_space(S, S)
    cols = [{i * N + (k - i): Fraction(1) for i in range(k + 1)} for k in range(N)]
    eps = LinMap(S, K, [{0: Fraction(1)} if k == 0 else {} for k in range(N)])
    return Coalgebra(S, LinMap(S, CC, cols), eps, name=f"DP({N})")


def ground_field() -> Coalgebra:
    return divided_power(1)


@dataclass(frozen=True)
class Quiver:
    """Vertices and named arrows ``(name, source, target)``."""

    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...]

    @classmethod
    def from_edges(cls, vertices, edges) -> "Quiver":
        """``edges`` as (source, target) pairs; arrows get names a0, a1, ..."""
        vertices = tuple(str(v) for v in vertices)
        arrows = tuple((f"a{i}", str(s), str(t)) for i, (s, t) in enumerate(edges))
        return cls(vertices, arrows)

    def is_acyclic(self) -> bool:
        indeg = {v: 0 for v in self.vertices}
        for _, _, t in self.arrows:
            indeg[t] += 1
        stack = [v for v, d in indeg.items() if d == 0]
        seen = 0
        while stack:
            v = stack.pop()
            seen += 1
            for _, s, t in self.arrows:
                if s == v:
                    indeg[t] -= 1
                    if indeg[t] == 0:
                        stack.append(t)
        return seen == len(self.vertices)

    def paths(self, max_len: int | None = None) -> list[tuple[str, tuple[int, ...]]]:
        """All paths as (start vertex, arrow index sequence), ordered by length."""
        if max_len is None:
            if not self.is_acyclic():
                raise NonAcyclicQuiver("max_len is required for a quiver with cycles")
            max_len = len(self.vertices)
        out = [(v, ()) for v in self.vertices]
        layer = [(self.arrows[a][1], (a,)) for a in range(len(self.arrows))]
        length = 1
        while layer and length <= max_len:
            out.extend(layer)
            nxt = []
            for v, seq in layer:
                end = self.arrows[seq[-1]][2]
                for a, (_, s, _) in enumerate(self.arrows):
                    if s == end:
                        nxt.append((v, seq + (a,)))
            layer = nxt
            length += 1
        return out


def _path_label(q: Quiver, v: str, seq: tuple[int, ...]) -> str:
    if not seq:
        return f"e{v}"
    return "·".join(q.arrows[a][0] for a in seq)


def path_coalgebra(q: Quiver, max_len: int | None = None) -> Coalgebra:
    """Path coalgebra: Δp = Σ over splittings p = p1 p2, including vertex ends."""
    paths = q.paths(max_len)
    labels = [_path_label(q, v, s) for v, s in paths]
    S = Space(tuple(labels))
    CC = tensor_space(S, S)
    idx = {(v, s): i for i, (v, s) in enumerate(paths)}
    n = S.dim
    cols = []
    for v, seq in paths:
        col: dict[int, Fraction] = {}
        if not seq:
            col[idx[(v, ())] * n + idx[(v, ())]] = Fraction(1)
        else:
            start = v
            cuts = []
            cuts.append(((start, ()), (start, seq)))
            for k in range(1, len(seq)):
                mid = q.arrows[seq[k - 1]][2]
                cuts.append(((start, seq[:k]), (mid, seq[k:])))
            end = q.arrows[seq[-1]][2]
            cuts.append(((start, seq), (end, ())))
            for a, b in cuts:
                key = idx[a] * n + idx[b]
                col[key] = col.get(key, 0) + Fraction(1)
        cols.append(col)
    eps = LinMap(S, K, [{0: Fraction(1)} if not s else {} for _, s in paths])
    return Coalgebra(S, LinMap(S, CC, cols), eps, name="kQ")


def path_lengths(q: Quiver, max_len: int | None = None) -> list[int]:
    return [len(s) for _, s in q.paths(max_len)]


def direct_sum_coalgebra(c1: Coalgebra, c2: Coalgebra, tags=("L", "R")) -> Coalgebra:
    """Block diagonal Δ and concatenated ε."""
    S, (i1, i2), (p1, p2) = direct_sum([c1.space, c2.space], tags)
    delta = tensor(i1, i1) @ c1.delta @ p1 + tensor(i2, i2) @ c2.delta @ p2
    eps = c1.epsilon @ p1 + c2.epsilon @ p2
    return Coalgebra(S, delta, eps, name=f"{c1.name}⊕{c2.name}")


def A_quiver(n: int) -> Quiver:
    """Linear quiver 1 → 2 → ... → n."""
    return Quiver.from_edges(range(1, n + 1), [(i, i + 1) for i in range(1, n)])


def branched_quiver() -> Quiver:
    """Three vertices, arrows 1→2, 1→3, 2→3."""
    return Quiver.from_edges([1, 2, 3], [(1, 2), (1, 3), (2, 3)])


def build(kind: str, **params) -> Coalgebra:
    """Builder dispatch used by the file format and the CLI."""
    if kind == "grouplike":
        c = grouplike(int(params["g"]))
    elif kind == "divided_power":
        c = divided_power(int(params["N"]))
    elif kind == "path_coalgebra":
        qp = params["quiver"]
        if "arrows" in qp:
            q = Quiver(tuple(str(v) for v in qp["vertices"]),
                       tuple((str(a), str(s), str(t)) for a, s, t in qp["arrows"]))
        else:
            q = Quiver.from_edges(qp["vertices"], qp["edges"])
        c = path_coalgebra(q, params.get("max_len"))
    elif kind == "direct_sum":
        c = direct_sum_coalgebra(build(**params["c1"]), build(**params["c2"]))
    else:
        raise ValueError(f"unknown builder kind {kind!r}")
    rep = validate(c)
    if not rep.ok:
        raise InvalidStructure(rep)
    return c


def permute_basis(c: Coalgebra, perm: Sequence[int]) -> tuple[Coalgebra, LinMap]:
    """Reorder the basis: new basis vector k is old basis vector perm[k].

    Returns the new coalgebra and the isomorphism old → new.
    """
    new = Space(tuple(c.space.labels[p] for p in perm))
    cols = [dict() for _ in range(c.dim)]
    for k, p in enumerate(perm):
        cols[p] = {k: Fraction(1)}
    P = LinMap(c.space, new, cols)
    Pinv = P.transpose()
    delta = tensor(P, P) @ c.delta @ Pinv
    return Coalgebra(new, delta, c.epsilon @ Pinv, name=c.name), P
