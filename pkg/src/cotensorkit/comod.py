"""Comodules, bicomodules and cotensor products computed as equalizers.

A single :class:`Comodule` type carries an optional left coaction and an
optional right coaction (possibly over different coalgebras), so right
comodules, left comodules and bicomodules share one code path.  Cotensor
products remember their equalizer inclusion ``chi`` into V⊗W and a flattened
embedding ``flat`` into a plain tensor product, which is what lets nested
cotensors be compared regardless of bracketing.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

from .coalg import Coalgebra, CoalgebraMap, ValidationReport, InvalidStructure
from .exactla import (
    LinAlgError,
    LinMap,
    NoFactorization,
    Space,
    cokernel,
    factor_through_epi,
    factor_through_mono,
    kernel,
    tensor,
    tensor_all,
)


class CoalgebraMismatch(LinAlgError):
    pass


class NotACoideal(LinAlgError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class FactorizationMismatch(LinAlgError):
    pass


@dataclass(frozen=True)
class Comodule:
    space: Space
    left: Coalgebra | None = None
    rho_l: LinMap | None = None
    right: Coalgebra | None = None
    rho_r: LinMap | None = None
    # equalizer inclusion into V⊗W when this object is a cotensor product
    chi: LinMap | None = field(default=None, compare=False)
    factors: tuple | None = field(default=None, compare=False, repr=False)
    name: str = field(default="V", compare=False)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def id(self) -> LinMap:
        return LinMap.identity(self.space)

    @property
    def is_bicomodule(self) -> bool:
        return self.rho_l is not None and self.rho_r is not None

    @property
    def flat(self) -> LinMap:
        """Embedding into the plain tensor product of the innermost factors."""
        if self.chi is None:
            return self.id
        V, W = self.factors
        return tensor(V.flat, W.flat) @ self.chi

    def forget_left(self) -> "Comodule":
        return replace(self, left=None, rho_l=None)

    def forget_right(self) -> "Comodule":
        return replace(self, right=None, rho_r=None)

    def __repr__(self):
        sides = []
        if self.left is not None:
            sides.append(f"left {self.left.name}")
        if self.right is not None:
            sides.append(f"right {self.right.name}")
        return f"Comodule({self.name}, dim={self.dim}, {', '.join(sides) or 'no coaction'})"


def regular(C: Coalgebra, name: str | None = None) -> Comodule:
    """C as a C-bicomodule via Δ on both sides."""
    return Comodule(C.space, C, C.delta, C, C.delta, name=name or C.name)


def zero_comodule(C: Coalgebra, left=True, right=True) -> Comodule:
    Z = Space.zero()
    return Comodule(Z, C if left else None, LinMap.zero(Z, Z) if left else None,
                    C if right else None, LinMap.zero(Z, Z) if right else None, name="0")


def validate_comodule(V: Comodule) -> ValidationReport:
    rep = ValidationReport()
    I = V.id
    if V.rho_r is not None:
        C = V.right
        rep.add("right coassociativity", tensor(V.rho_r, C.id) @ V.rho_r,
                tensor(I, C.delta) @ V.rho_r)
        rep.add("right counit", tensor(I, C.epsilon) @ V.rho_r, I)
    if V.rho_l is not None:
        C = V.left
        rep.add("left coassociativity", tensor(C.id, V.rho_l) @ V.rho_l,
                tensor(C.delta, I) @ V.rho_l)
        rep.add("left counit", tensor(C.epsilon, I) @ V.rho_l, I)
    if V.is_bicomodule:
        rep.add("bicomodule compatibility", tensor(V.left.id, V.rho_r) @ V.rho_l,
                tensor(V.rho_l, V.right.id) @ V.rho_r)
    return rep


def require_valid(V: Comodule) -> Comodule:
    rep = validate_comodule(V)
    if not rep.ok:
        raise InvalidStructure(rep)
    return V


def is_comodule_map(f: LinMap, V: Comodule, W: Comodule, side: str = "both") -> bool:
    """Whether f: V → W intertwines the requested coactions exactly."""
    ok = True
    if side in ("both", "right") and V.rho_r is not None and W.rho_r is not None:
        ok &= W.rho_r @ f == tensor(f, W.right.id) @ V.rho_r
    if side in ("both", "left") and V.rho_l is not None and W.rho_l is not None:
        ok &= W.rho_l @ f == tensor(W.left.id, f) @ V.rho_l
    return bool(ok)


def _key(V: Comodule) -> tuple:
    # equality of comodules ignores the cotensor embedding and the name
    return V, V.chi, V.name, V.factors and tuple(_key(F) for F in V.factors)


_COTENSOR_CACHE: dict = {}


def cotensor(V: Comodule, W: Comodule, name: str | None = None) -> Comodule:
    """V□_C W as the kernel of ρ_V⊗W − V⊗ρ_W, with its outer coactions."""
    key = (_key(V), _key(W), name)
    out = _COTENSOR_CACHE.get(key)
    if out is None:
        if len(_COTENSOR_CACHE) > 4096:
            _COTENSOR_CACHE.clear()
        out = _COTENSOR_CACHE[key] = _cotensor(V, W, name)
    return out


def _cotensor(V: Comodule, W: Comodule, name: str | None) -> Comodule:
    if V.rho_r is None or W.rho_l is None:
        raise CoalgebraMismatch("cotensor needs a right comodule and a left comodule")
    if V.right != W.left:
        raise CoalgebraMismatch("cotensor factors are comodules over different coalgebras")
    name = name or f"({V.name}□{W.name})"
    diff = tensor(V.rho_r, W.id) - tensor(V.id, W.rho_l)
    X, chi = kernel(diff, prefix=f"{name}:")
    rho_l = rho_r = None
    try:
        if V.rho_l is not None:
            rho_l = factor_through_mono(tensor(V.rho_l, W.id) @ chi, tensor(V.left.id, chi))
        if W.rho_r is not None:
            rho_r = factor_through_mono(tensor(V.id, W.rho_r) @ chi, tensor(chi, W.right.id))
    except NoFactorization as exc:  # cannot happen for valid inputs
        raise AssertionError("outer coaction does not restrict to the cotensor product") from exc
    return Comodule(X, V.left if rho_l is not None else None, rho_l,
                    W.right if rho_r is not None else None, rho_r,
                    chi=chi, factors=(V, W), name=name)


def cotensor_map(v: LinMap, w: LinMap, X1: Comodule, X2: Comodule,
                 e: CoalgebraMap | None = None) -> LinMap:
    """v□_e w: the unique map with χ2∘(v□w) = (v⊗w)∘χ1.

    When ``e`` is given, v and w are checked to be E2-comodule maps with the
    sources regarded as E2-comodules via e.
    """
    V1, W1 = X1.factors
    V2, W2 = X2.factors
    if e is not None:
        if V2.rho_r @ v != tensor(v, e.map) @ V1.rho_r:
            raise LinAlgError("v is not a comodule map along e")
        if W2.rho_l @ w != tensor(e.map, w) @ W1.rho_l:
            raise LinAlgError("w is not a comodule map along e")
    return factor_through_mono(tensor(v, w) @ X1.chi, X2.chi)


def rho_bar(V: Comodule) -> tuple[LinMap, LinMap, Comodule]:
    """ρ̄: V → V□_E E and its inverse r_V∘(V⊗ε)∘χ; both round trips asserted."""
    E = V.right
    VE = cotensor(V, regular(E))
    fwd = factor_through_mono(V.rho_r, VE.chi)
    inv = tensor(V.id, E.epsilon) @ VE.chi
    inv = inv.relabel(codomain=V.space)
    assert inv @ fwd == V.id and fwd @ inv == VE.id, "ρ̄ is not an isomorphism"
    return fwd, inv, VE


def rho_bar_left(W: Comodule) -> tuple[LinMap, LinMap, Comodule]:
    """^Eρ̄: W → E□_E W and its inverse."""
    E = W.left
    EW = cotensor(regular(E), W)
    fwd = factor_through_mono(W.rho_l, EW.chi)
    inv = (tensor(E.epsilon, W.id) @ EW.chi).relabel(codomain=W.space)
    assert inv @ fwd == W.id and fwd @ inv == EW.id, "ρ̄ is not an isomorphism"
    return fwd, inv, EW


@lru_cache(maxsize=256)
def quotient_bicomodule(E: Coalgebra, X: LinMap, sides: str = "both",
                        name: str | None = None) -> tuple[Comodule, LinMap]:
    """E/X with the coactions inherited from Δ_E, plus the projection p.

    A right coaction exists iff Δ(X) ⊆ X⊗E and a left one iff Δ(X) ⊆ E⊗X;
    ``sides`` says which are required.
    """
    name = name or f"{E.name}/{X.domain.dim}"
    Q, p = cokernel(X, prefix=name)
    Q = Space(tuple(lab if lab.startswith(name + "[") else f"{name}:{lab[len(name):]}"
                    for lab in Q.labels))
    p = p.relabel(codomain=Q)
    rho_l = rho_r = None
    if sides in ("both", "left"):
        g = tensor(E.id, p) @ E.delta
        bad = (g @ X).first_difference(LinMap.zero(X.domain, g.codomain))
        if bad is not None:
            raise NotACoideal("Δ(X) is not contained in E⊗X", witness=X.domain.labels[bad])
        rho_l = factor_through_epi(g, p)
    if sides in ("both", "right"):
        g = tensor(p, E.id) @ E.delta
        bad = (g @ X).first_difference(LinMap.zero(X.domain, g.codomain))
        if bad is not None:
            raise NotACoideal("Δ(X) is not contained in X⊗E", witness=X.domain.labels[bad])
        rho_r = factor_through_epi(g, p)
    M = Comodule(Q, E if rho_l is not None else None, rho_l,
                 E if rho_r is not None else None, rho_r, name=name)
    return M, p


def is_right_coideal(E: Coalgebra, X: LinMap) -> bool:
    Q, p = cokernel(X)
    return (tensor(p, E.id) @ E.delta @ X).is_zero()


def is_left_coideal(E: Coalgebra, X: LinMap) -> bool:
    Q, p = cokernel(X)
    return (tensor(E.id, p) @ E.delta @ X).is_zero()


def induced_comodule(alpha: CoalgebraMap, W: Comodule, candidate: LinMap | None = None,
                     side: str = "left", check_bar: bool = True) -> Comodule:
    """Factor the E-coaction of W through α⊗W (or W⊗α) to get an A-coaction.

    With ``candidate=None`` the factorisation is computed.  The result is
    validated and, for the left side, the bar lift W → A□_A W is checked to
    be a map of left E-comodules.
    """
    A, a = alpha.source, alpha.map
    if side == "left":
        target = tensor(a, W.id)
        rho = W.rho_l
    else:
        target = tensor(W.id, a)
        rho = W.rho_r
    if candidate is None:
        try:
            candidate = factor_through_mono(rho, target)
        except NoFactorization as exc:
            raise FactorizationMismatch("the coaction does not factor through the subcoalgebra") from exc
    elif target @ candidate != rho:
        raise FactorizationMismatch("candidate does not reproduce the given coaction")
    if side == "left":
        out = replace(W, left=A, rho_l=candidate, chi=None, factors=None)
    else:
        out = replace(W, right=A, rho_r=candidate, chi=None, factors=None)
    rep = validate_comodule(out)
    if not rep.ok:
        raise FactorizationMismatch(str(rep))
    if check_bar and side == "left":
        bar, _, AW = rho_bar_left(out.forget_right())
        lhs = tensor(a, AW.id) @ AW.rho_l @ bar
        rhs = tensor(W.left.id, bar) @ W.rho_l
        assert lhs == rhs, "bar lift is not a map of left comodules"
    return out


def corestrict(e: CoalgebraMap, V: Comodule, side: str = "right") -> Comodule:
    """Regard a comodule over E1 as one over E2 via e: coaction (id⊗e)∘ρ."""
    if side == "right":
        out = replace(V, right=e.target, rho_r=tensor(V.id, e.map) @ V.rho_r)
    else:
        out = replace(V, left=e.target, rho_l=tensor(e.map, V.id) @ V.rho_l)
    return require_valid(out)


def restrict_to_subcomodule(V: Comodule, iota: LinMap, name: str | None = None) -> Comodule:
    """Sub(bi)comodule on the image of iota (coactions must restrict)."""
    rho_l = rho_r = None
    if V.rho_l is not None:
        rho_l = factor_through_mono(V.rho_l @ iota, tensor(V.left.id, iota))
    if V.rho_r is not None:
        rho_r = factor_through_mono(V.rho_r @ iota, tensor(iota, V.right.id))
    return Comodule(iota.domain, V.left, rho_l, V.right, rho_r, name=name or V.name)


def cotensor_power(M: Comodule, n: int) -> tuple[Comodule, LinMap]:
    """M^{□n} with its flattened embedding χ_n into M^{⊗n}.

    M^{□0} is the base coalgebra (χ_0 = id), M^{□1} = M, and
    M^{□n} = M^{□n-1}□M.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    key = (_key(M), n)
    if key not in _POWER_CACHE:
        _POWER_CACHE[key] = _power(M, n)
    return _POWER_CACHE[key]


_POWER_CACHE: dict = {}


def _power(M: Comodule, n: int) -> tuple[Comodule, LinMap]:
    if n == 0:
        C = M.left
        return regular(C), C.id
    if n == 1:
        return M, M.id
    prev, chi_prev = cotensor_power(M, n - 1)
    X = cotensor(prev, M, name=f"{M.name}^□{n}")
    return X, tensor(chi_prev, M.id) @ X.chi


def tensor_power_map(f: LinMap, n: int) -> LinMap:
    if n == 0:
        return LinMap.identity(Space.ground())
    return tensor_all(*([f] * n))
