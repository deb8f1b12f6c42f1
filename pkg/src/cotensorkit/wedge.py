"""Wedge products of subobjects, the connecting morphism η, γ_n, and the Snake Lemma.

Subobjects of a coalgebra E are passed around as injective LinMaps into
E.space.  Quotients E/X are built by :func:`comod.quotient_bicomodule` and
cached, so repeated calls return identical spaces.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .coalg import Coalgebra, CoalgebraMap, Subcoalgebra, subcoalgebra, NotASubcoalgebra
from .comod import (
    Comodule,
    cotensor,
    is_left_coideal,
    is_right_coideal,
    quotient_bicomodule,
    regular,
)
from .exactla import (
    LinAlgError,
    LinMap,
    NoFactorization,
    Space,
    cokernel,
    factor_through_epi,
    factor_through_mono,
    image,
    kernel,
    pullback,
    random_map,
    right_inverse,
    same_subobject,
    contained_in,
    tensor,
)


class SquareDoesNotCommute(LinAlgError):
    pass


class InvalidDiagram(LinAlgError):
    pass


class HypothesisFails(LinAlgError):
    pass


def unit_labels(iota: LinMap, prefix: str) -> Space:
    """Labels for the domain of an inclusion: ambient labels when the basis is
    made of ambient basis vectors, else ``prefix`` + index."""
    labs = []
    for col in iota.cols:
        if len(col) == 1 and next(iter(col.values())) == 1:
            labs.append(iota.codomain.labels[next(iter(col))])
        else:
            break
    if len(labs) == iota.domain.dim:
        return Space(tuple(labs))
    return Space.basis(prefix, iota.domain.dim)


def named_kernel(f: LinMap, prefix: str) -> LinMap:
    _, iota = kernel(f, prefix=prefix)
    return iota.relabel(domain=unit_labels(iota, prefix))


def into_cotensor(g: LinMap, X: Comodule) -> LinMap:
    """Factor a map into V⊗W through the equalizer inclusion of X = V□W."""
    return factor_through_mono(g, X.chi)


def delta_bar_into(E: Coalgebra, pX: LinMap, pY: LinMap, X: Comodule) -> LinMap:
    """(p_X□p_Y)∘Δ̄_E as a map E → X where X is the cotensor of the targets."""
    return into_cotensor(tensor(pX, pY) @ E.delta, X)


@dataclass
class WedgeResult:
    inclusion: LinMap
    as_coalgebra: Subcoalgebra | None = None
    box_form_checked: bool = False

    @property
    def dim(self) -> int:
        return self.inclusion.domain.dim


def wedge(E: Coalgebra, X: LinMap, Y: LinMap, prefix: str = "w") -> WedgeResult:
    """X∧_E Y = Ker[(p_X⊗p_Y)∘Δ_E].

    If X is a right coideal and Y a left coideal the kernel of
    (p_X□p_Y)∘Δ̄_E is also computed and asserted to be the same subobject.
    """
    _, pX = cokernel(X)
    _, pY = cokernel(Y)
    inc = named_kernel(tensor(pX, pY) @ E.delta, prefix)
    checked = False
    if is_right_coideal(E, X) and is_left_coideal(E, Y):
        QX, px = quotient_bicomodule(E, X, "right", name=f"{E.name}/{prefix}X")
        QY, py = quotient_bicomodule(E, Y, "left", name=f"{E.name}/{prefix}Y")
        box = cotensor(QX, QY)
        _, inc2 = kernel(delta_bar_into(E, px, py, box))
        assert same_subobject(inc, inc2), "⊗-form and □-form of the wedge differ"
        checked = True
    sub = None
    try:
        sub = subcoalgebra(E, inc, name=prefix)
    except NotASubcoalgebra:
        pass
    return WedgeResult(inc, sub, checked)


def wedge_map(x: LinMap, y: LinMap, e: CoalgebraMap,
              X1: LinMap, Y1: LinMap, X2: LinMap, Y2: LinMap,
              W1: LinMap | None = None, W2: LinMap | None = None) -> LinMap:
    """x∧_e y : X1∧Y1 → X2∧Y2, the unique map commuting with the inclusions."""
    if e.map @ X1 != X2 @ x:
        raise SquareDoesNotCommute("e∘i_X1 ≠ i_X2∘x")
    if e.map @ Y1 != Y2 @ y:
        raise SquareDoesNotCommute("e∘i_Y1 ≠ i_Y2∘y")
    if W1 is None:
        W1 = wedge(e.source, X1, Y1).inclusion
    if W2 is None:
        W2 = wedge(e.target, X2, Y2).inclusion
    return factor_through_mono(e.map @ W1, W2)


# ---------------------------------------------------------------------------
# the connecting morphism η(F, B, A)

@dataclass
class EtaResult:
    map: LinMap
    wedge: LinMap             # i_{F∧B}: F∧B → E
    target: Comodule          # E/F □_E B/A
    EF: Comodule              # E/F
    pF: LinMap
    BA: Comodule              # B/A as a left E-comodule
    pBA: LinMap               # p_A^B: B → B/A
    iBA: LinMap               # i_{B/A}: B/A → E/A
    EA: Comodule
    pA: LinMap
    kernel_ok: bool = True


def left_E_comodule(E: Coalgebra, B: LinMap, name: str, right: tuple | None = None) -> Comodule:
    """A subcoalgebra B ⊆ E regarded as a left E-comodule via its inclusion.

    ``right`` optionally supplies (coalgebra, right coaction).
    """
    dB = factor_through_mono(E.delta @ B, tensor(B, B))
    rho_l = tensor(B, LinMap.identity(B.domain)) @ dB
    r_c, r_rho = right if right is not None else (None, None)
    return Comodule(B.domain, E, rho_l, r_c, r_rho, name=name)


def quotient_of_sub(E: Coalgebra, B: LinMap, A: LinMap, name: str) -> tuple[Comodule, LinMap]:
    """B/A with the left E-coaction induced from B (A given as a map into B)."""
    Q, p = cokernel(A, prefix=name)
    dB = factor_through_mono(E.delta @ B, tensor(B, B))
    rho = factor_through_epi(tensor(B, p) @ dB, p)
    return Comodule(Q, E, rho, name=name), p


def eta(E: Coalgebra, F: LinMap, B: LinMap, A: LinMap | None = None, *,
        names: tuple[str, str, str] = ("F", "B", "A"),
        wedge_incl: LinMap | None = None,
        quotient: tuple[Comodule, LinMap] | None = None,
        B_comodule: Comodule | None = None,
        check_kernel: bool = True) -> EtaResult:
    """η(F,B,A): F∧_E B → E/F □_E B/A.

    ``A`` is an inclusion A → B (None means A = 0).  Defined by
    (E/F□i_{B/A})∘η = (p_F□p_A)∘Δ̄_E∘i_{F∧B} and obtained by factoring
    through the monomorphism E/F□i_{B/A}.  ``quotient`` may present B/A as
    any left E-comodule with a surjection from B; ``B_comodule`` overrides the
    comodule used for B when A = 0.  ``check_kernel`` verifies that ker η is
    F∧_E A.
    """
    nF, nB, nA = names
    if wedge_incl is None:
        wedge_incl = wedge(E, F, B, prefix=f"{nF}∧{nB}").inclusion
    else:
        assert same_subobject(wedge_incl, wedge(E, F, B).inclusion), "given wedge is wrong"
    EF, pF = quotient_bicomodule(E, F, "both", name=f"{E.name}/{nF}")
    if A is None or A.domain.dim == 0:
        EA, pA = regular(E), E.id
        if quotient is not None:
            BA, pBA = quotient
        else:
            BA = B_comodule if B_comodule is not None else left_E_comodule(E, B, nB)
            pBA = LinMap.identity(B.domain)
        iBA = factor_through_epi(B, pBA)
    else:
        A_E = B @ A
        EA, pA = quotient_bicomodule(E, A_E, "both", name=f"{E.name}/{nA}")
        if quotient is not None:
            BA, pBA = quotient
        else:
            BA, pBA = quotient_of_sub(E, B, A, name=f"{nB}/{nA}")
        iBA = factor_through_epi(pA @ B, pBA)
    # left E-comodule structures must match for E/F□i_{B/A} to exist
    assert EA.rho_l @ iBA == tensor(E.id, iBA) @ BA.rho_l, "i_{B/A} is not colinear"
    target = cotensor(EF.forget_left(), BA)
    big = cotensor(EF.forget_left(), EA.forget_right())
    mono = into_cotensor(tensor(EF.id, iBA) @ target.chi, big)
    rhs = delta_bar_into(E, pF, pA, big) @ wedge_incl
    h = factor_through_mono(rhs, mono)
    ok = True
    if check_kernel:
        _, kinc = kernel(h)
        if A is None or A.domain.dim == 0:
            expected = F
        else:
            expected = wedge(E, F, B @ A).inclusion
        ok = same_subobject(wedge_incl @ kinc, expected)
        assert ok, "kernel of η is not F∧A"
    return EtaResult(h, wedge_incl, target, EF, pF, BA, pBA, iBA, EA, pA, ok)


def eta_naturality_check(e: CoalgebraMap, f: LinMap, b: LinMap, a: LinMap | None,
                         F1: LinMap, B1: LinMap, A1: LinMap | None,
                         F2: LinMap, B2: LinMap, A2: LinMap | None,
                         names1=("F1", "B1", "A1"), names2=("F2", "B2", "A2")) -> tuple[bool, str | None]:
    """η^{E2}(F2,B2,A2)∘(f∧_e b) = (e/f □_e b/a)∘η^{E1}(F1,B1,A1).

    Returns (holds, witness label).
    """
    E1, E2 = e.source, e.target
    r1 = eta(E1, F1, B1, A1, names=names1)
    r2 = eta(E2, F2, B2, A2, names=names2)
    fb = wedge_map(f, b, e, F1, B1, F2, B2, r1.wedge, r2.wedge)
    # induced maps on quotients
    e_f = factor_through_epi(r2.pF @ e.map, r1.pF)
    b_a = factor_through_epi(r2.pBA @ b, r1.pBA)
    rhs_map = into_cotensor(tensor(e_f, b_a) @ r1.target.chi, r2.target)
    lhs = r2.map @ fb
    rhs = rhs_map @ r1.map
    j = lhs.first_difference(rhs)
    return j is None, None if j is None else lhs.domain.labels[j]


def eta_reduced_check(E: Coalgebra, F: LinMap, B: LinMap, A: LinMap | None,
                      names=("F", "B", "A")) -> bool:
    """(E/F □ i_B^{F∧B}/A)∘η = (p_F∘i_{F∧B} □ p_A^{F∧B})∘Δ̄_{F∧B}."""
    r = eta(E, F, B, A, names=names)
    W = r.wedge
    iB_W = factor_through_mono(B, W)          # B → F∧B
    if A is None or A.domain.dim == 0:
        WA_space, pA_W = W.domain, LinMap.identity(W.domain)
        WA_rho = None
        QW = left_E_comodule(E, W, f"{names[0]}∧{names[1]}")
    else:
        QW, pA_W = quotient_of_sub(E, W, iB_W @ A, name=f"({names[0]}∧{names[1]})/{names[2]}")
    # i_B^{F∧B}/A : B/A → (F∧B)/A
    ind = factor_through_epi(pA_W @ iB_W, r.pBA)
    X2 = cotensor(r.EF.forget_left(), QW)
    lhs = into_cotensor(tensor(r.EF.id, ind) @ r.target.chi, X2) @ r.map
    dW = factor_through_mono(E.delta @ W, tensor(W, W))
    rhs = into_cotensor(tensor(r.pF @ W, pA_W) @ dW, X2)
    return lhs == rhs


def diagram_eta_check(E: Coalgebra, F: LinMap, B: LinMap, A: LinMap,
                      names=("F", "B", "A")) -> dict:
    """η(F,B,A) = (E/F□p_A^B)∘η(F,B,0), plus the exact sequence when E/F□p_A^B is epi."""
    r0 = eta(E, F, B, None, names=(names[0], names[1], "0"))
    rA = eta(E, F, B, A, names=names)
    pmap = into_cotensor(tensor(r0.EF.id, rA.pBA) @ r0.target.chi, rA.target)
    triangle = rA.map == pmap @ r0.map
    epi = pmap.is_surjective()
    seq = None
    if epi:
        seq = rA.map.is_surjective() and rA.kernel_ok
    return {"triangle": triangle, "premise_epi": epi, "exact_sequence": seq}


# ---------------------------------------------------------------------------
# γ_n and the exactness of 0 → X∧Y → E → E/X□E/Y → 0

def gamma_map(E: Coalgebra, Xn: LinMap, Xprev: LinMap, X1: LinMap,
              names=("D^n", "D^n-1", "D")) -> tuple[LinMap, Comodule, Comodule]:
    """γ with γ∘p_{Xn} = (p_{Xprev}□p_{X1})∘Δ̄_E; returns (γ, E/Xn, target)."""
    Qn, pn = quotient_bicomodule(E, Xn, "both", name=f"{E.name}/{names[0]}")
    Qa, pa = quotient_bicomodule(E, Xprev, "both", name=f"{E.name}/{names[1]}")
    Qb, pb = quotient_bicomodule(E, X1, "both", name=f"{E.name}/{names[2]}")
    target = cotensor(Qa, Qb)
    g = factor_through_epi(delta_bar_into(E, pa, pb, target), pn)
    assert g.is_injective(), "γ is not a monomorphism"
    return g, Qn, target


def epi_exactness_check(E: Coalgebra, X: LinMap, Y: LinMap, names=("X", "Y")) -> dict:
    """Test the premise that E/X□p_Y is epi; when it is, confirm
    0 → X∧Y → E → E/X□E/Y → 0 is exact.  Raises HypothesisFails otherwise."""
    QX, pX = quotient_bicomodule(E, X, "right", name=f"{E.name}/{names[0]}")
    QY, pY = quotient_bicomodule(E, Y, "left", name=f"{E.name}/{names[1]}")
    XE = cotensor(QX, regular(E).forget_right())
    XY = cotensor(QX, QY)
    prem = into_cotensor(tensor(QX.id, pY) @ XE.chi, XY)
    if not prem.is_surjective():
        raise HypothesisFails("E/X□p_Y is not an epimorphism")
    g = delta_bar_into(E, pX, pY, XY)
    W = wedge(E, X, Y).inclusion
    _, kinc = kernel(g)
    exact_mid = same_subobject(kinc, W)
    return {"premise_epi": True, "surjective": g.is_surjective(), "exact_at_E": exact_mid,
            "dims": (W.domain.dim, E.dim, XY.dim)}


# ---------------------------------------------------------------------------
# Snake Lemma

@dataclass
class SnakeDiagram:
    a12: LinMap
    a23: LinMap
    b12: LinMap
    b23: LinMap
    f1: LinMap
    f2: LinMap
    f3: LinMap

    def check(self):
        if self.f2 @ self.a12 != self.b12 @ self.f1:
            raise InvalidDiagram("left square does not commute")
        if self.f3 @ self.a23 != self.b23 @ self.f2:
            raise InvalidDiagram("right square does not commute")
        if not self.a23.is_surjective():
            raise InvalidDiagram("α23 is not an epimorphism")
        if not self.b12.is_injective():
            raise InvalidDiagram("β12 is not a monomorphism")
        if not (self.a23 @ self.a12).is_zero() or not exact_at(self.a12, self.a23):
            raise InvalidDiagram("top row is not exact at A2")
        if not (self.b23 @ self.b12).is_zero() or not exact_at(self.b12, self.b23):
            raise InvalidDiagram("bottom row is not exact at B2")


def exact_at(f: LinMap, g: LinMap) -> bool:
    """im f = ker g, decided by mutual factorisation of the two subobjects."""
    if not (g @ f).is_zero():
        return False
    _, ki = kernel(g)
    _, ii = image(f)
    return same_subobject(ii, ki) if ii.domain.dim or ki.domain.dim else True


@dataclass
class SnakeResult:
    omega_bar: LinMap
    maps: list                # k12, k23, ω̄, c12, c23
    objects: list             # Ker f1, Ker f2, Ker f3, Coker f1, Coker f2, Coker f3
    exact: list = field(default_factory=list)   # at Ker f2, Ker f3, Coker f1, Coker f2

    @property
    def ok(self) -> bool:
        return all(self.exact)


def snake(d: SnakeDiagram) -> SnakeResult:
    """Connecting map via the pullback P(α23, k3), then six-term exactness."""
    d.check()
    _, k1 = kernel(d.f1, "k1_")
    _, k2 = kernel(d.f2, "k2_")
    _, k3 = kernel(d.f3, "k3_")
    _, c1 = cokernel(d.f1, "c1_")
    _, c2 = cokernel(d.f2, "c2_")
    _, c3 = cokernel(d.f3, "c3_")
    P, k3p, a23p = pullback(d.a23, k3)
    omega = factor_through_mono(d.f2 @ k3p, d.b12)
    omega_bar = factor_through_epi(c1 @ omega, a23p)
    k12 = factor_through_mono(d.a12 @ k1, k2)
    k23 = factor_through_mono(d.a23 @ k2, k3)
    c12 = factor_through_epi(c2 @ d.b12, c1)
    c23 = factor_through_epi(c3 @ d.b23, c2)
    maps = [k12, k23, omega_bar, c12, c23]
    exact = [exact_at(maps[i], maps[i + 1]) for i in range(4)]
    objs = [k1.domain, k2.domain, k3.domain, c1.codomain, c2.codomain, c3.codomain]
    return SnakeResult(omega_bar, maps, objs, exact)


def element_chase(d: SnakeDiagram, k3: LinMap, c1: LinMap) -> LinMap:
    """Connecting map by chasing each basis vector of Ker f3: lift along α23,
    push by f2, pull back along β12, project to Coker f1."""
    s = right_inverse(d.a23)
    cols = []
    for j in range(k3.domain.dim):
        x = {j: Fraction(1)}
        a3 = k3.apply(x)
        a2 = s.apply(a3)
        b2 = d.f2.apply(a2)
        col_b2 = LinMap(Space(("x",)), d.b12.codomain, [b2])
        b1 = factor_through_mono(col_b2, d.b12)
        cols.append(c1.apply(b1.cols[0]))
    return LinMap(k3.domain, c1.codomain, cols)


def _random_injective(rng, dom: Space, cod: Space, lo=-2, hi=2) -> LinMap:
    while True:
        m = random_map(rng, dom, cod, lo, hi)
        if m.is_injective():
            return m


def _random_surjective(rng, dom: Space, cod: Space, lo=-2, hi=2) -> LinMap:
    while True:
        m = random_map(rng, dom, cod, lo, hi)
        if m.is_surjective():
            return m


def random_snake_diagram(rng: random.Random, max_dim: int = 4, a1_zero: bool = False) -> SnakeDiagram:
    """A random diagram satisfying the hypotheses, entries of the free data in [-2, 2]."""
    n2 = rng.randint(0, max_dim)
    n3 = rng.randint(0, n2)
    A2, A3 = Space.basis("a2_", n2), Space.basis("a3_", n3)
    a23 = _random_surjective(rng, A2, A3)
    _, ker23 = kernel(a23)
    kd = ker23.domain.dim
    if a1_zero:
        if kd:
            # A1 = 0 needs α23 injective: redo with a square invertible map
            A3 = Space.basis("a3_", n2)
            a23 = _random_injective(rng, A2, A3)
            _, ker23 = kernel(a23)
            kd = 0
        A1 = Space.zero()
        a12 = LinMap.zero(A1, A2)
    else:
        A1 = Space.basis("a1_", rng.randint(kd, max(kd, max_dim)))
        a12 = ker23 @ _random_surjective(rng, A1, ker23.domain)
    m1 = rng.randint(0, max_dim)
    m2 = rng.randint(m1, max(m1, max_dim))
    B1, B2 = Space.basis("b1_", m1), Space.basis("b2_", m2)
    b12 = _random_injective(rng, B1, B2)
    Q, q = cokernel(b12)
    m3 = rng.randint(Q.dim, max(Q.dim, max_dim))
    B3 = Space.basis("b3_", m3)
    b23 = _random_injective(rng, Q, B3) @ q
    # f2 must send ker α23 into im β12: prescribe it on an adapted basis
    basis_cols = list(ker23.cols)
    R = LinMap(Space.basis("t", len(basis_cols)), A2, basis_cols)
    for j in range(n2):
        if R.domain.dim == n2:
            break
        cand = basis_cols + [{j: Fraction(1)}]
        Rc = LinMap(Space.basis("t", len(cand)), A2, cand)
        if Rc.is_injective():
            basis_cols = cand
            R = Rc
    T = R  # invertible: adapted basis → A2
    Tinv = factor_through_mono(LinMap.identity(A2), T)
    on_kernel = b12 @ random_map(rng, Space.basis("t", kd), B1)
    free = random_map(rng, Space.basis("u", n2 - kd), B2)
    F_adapted = LinMap(T.domain, B2, list(on_kernel.cols) + list(free.cols))
    f2 = F_adapted @ Tinv
    f1 = factor_through_mono(f2 @ a12, b12)
    f3 = factor_through_epi(b23 @ f2, a23)
    return SnakeDiagram(a12, a23, b12, b23, f1, f2, f3)
