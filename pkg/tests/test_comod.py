import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cotensorkit.coalg import (A_quiver, CoalgebraMap, divided_power, grouplike, ground_field,
                               path_coalgebra, subcoalgebra_from_span)
from cotensorkit.comod import (CoalgebraMismatch, Comodule, FactorizationMismatch, NotACoideal,
                               corestrict, cotensor, cotensor_map, cotensor_power,
                               induced_comodule, is_comodule_map, quotient_bicomodule, regular,
                               restrict_to_subcomodule, rho_bar, rho_bar_left, validate_comodule)
from cotensorkit.cotensorcoalg import quiver_bicomodule
from cotensorkit.exactla import LinAlgError, LinMap, Space, tensor, tensor_space

from oracles import cotensor_dim, dense


def graded(C, weights, side, prefix="v"):
    """GL(g)-comodule with basis vectors of the given weights."""
    V = Space.basis(prefix, len(weights))
    if side == "right":
        cod = tensor_space(V, C.space)
        rho = LinMap(V, cod, [{i * C.dim + w: Fraction(1)} for i, w in enumerate(weights)])
        return Comodule(V, None, None, C, rho, name=prefix)
    cod = tensor_space(C.space, V)
    rho = LinMap(V, cod, [{w * len(weights) + i: Fraction(1)} for i, w in enumerate(weights)])
    return Comodule(V, C, rho, None, None, name=prefix)


def weight_map(rng, src_w, dst_w, src, dst):
    """A random map preserving weights, hence a comodule map."""
    cols = []
    for w in src_w:
        col = {}
        for i, u in enumerate(dst_w):
            if u == w:
                x = rng.randint(-2, 2)
                if x:
                    col[i] = Fraction(x)
        cols.append(col)
    return LinMap(src, dst, cols)


weights = st.lists(st.integers(0, 2), min_size=0, max_size=4)


@given(weights, weights)
def test_cotensor_over_grouplikes_counts_weights(vw, ww):
    C = grouplike(3)
    V, W = graded(C, vw, "right", "v"), graded(C, ww, "left", "w")
    X = cotensor(V, W)
    expected = sum(vw.count(h) * ww.count(h) for h in range(3))
    assert X.dim == expected
    assert X.dim == cotensor_dim(dense(V.rho_r), dense(W.rho_l))
    assert X.chi.is_injective()


def test_regular_cotensor_regular_is_regular():
    E = divided_power(3)
    fwd, inv, EE = rho_bar(regular(E))
    assert EE.dim == 3
    assert inv @ fwd == E.id and fwd @ inv == EE.id
    fwd, inv, _ = rho_bar_left(regular(E))
    assert inv @ fwd == E.id


def test_arrow_bicomodule_cotensor_square():
    C, M = quiver_bicomodule(A_quiver(3))
    assert validate_comodule(M).ok
    assert cotensor(M, M).dim == 1
    assert cotensor_power(M, 3)[0].dim == 0
    fwd, inv, _ = rho_bar(M.forget_left())
    assert inv @ fwd == M.id


def test_one_dimensional_over_ground_field():
    k = ground_field()
    one = Space(("m",))
    rho = LinMap(one, tensor_space(one, k.space), [{0: Fraction(1)}])
    rho_l = LinMap(one, tensor_space(k.space, one), [{0: Fraction(1)}])
    M = Comodule(one, k, rho_l, k, rho, name="m")
    assert validate_comodule(M).ok
    for n in range(1, 6):
        P, chi = cotensor_power(M, n)
        assert P.dim == 1 and chi.is_injective()


def test_cotensor_power_chi_lands_in_tensor_power():
    C, M = quiver_bicomodule(A_quiver(4))
    for n, expected in enumerate([4, 3, 2, 1, 0]):
        P, chi = cotensor_power(M, n)
        assert P.dim == expected
        if n >= 1:
            assert chi.codomain.dim == M.dim ** n
        assert validate_comodule(P).ok


def test_cotensor_of_mismatched_coalgebras():
    V = regular(grouplike(2))
    W = regular(grouplike(3))
    with pytest.raises(CoalgebraMismatch):
        cotensor(V, W)
    with pytest.raises(CoalgebraMismatch):
        cotensor(V.forget_right(), V)


def test_cotensor_map_composition_law():
    C = grouplike(2)
    rng = random.Random(4)
    e = CoalgebraMap(C, C, C.id)
    for _ in range(10):
        vws = [[rng.randint(0, 1) for _ in range(rng.randint(1, 3))] for _ in range(3)]
        wws = [[rng.randint(0, 1) for _ in range(rng.randint(1, 3))] for _ in range(3)]
        Vs = [graded(C, w, "right", f"v{i}_") for i, w in enumerate(vws)]
        Ws = [graded(C, w, "left", f"w{i}_") for i, w in enumerate(wws)]
        X = [cotensor(V, W) for V, W in zip(Vs, Ws)]
        v1 = weight_map(rng, vws[0], vws[1], Vs[0].space, Vs[1].space)
        v2 = weight_map(rng, vws[1], vws[2], Vs[1].space, Vs[2].space)
        w1 = weight_map(rng, wws[0], wws[1], Ws[0].space, Ws[1].space)
        w2 = weight_map(rng, wws[1], wws[2], Ws[1].space, Ws[2].space)
        first = cotensor_map(v1, w1, X[0], X[1], e=e)
        second = cotensor_map(v2, w2, X[1], X[2], e=e)
        assert second @ first == cotensor_map(v2 @ v1, w2 @ w1, X[0], X[2], e=e @ e)
        assert X[2].chi @ second @ first == tensor(v2 @ v1, w2 @ w1) @ X[0].chi


def test_cotensor_map_rejects_non_colinear():
    C = grouplike(2)
    V = graded(C, [0, 1], "right", "v")
    W = graded(C, [0], "left", "w")
    X = cotensor(V, W)
    swap = LinMap(V.space, V.space, [{1: 1}, {0: 1}])
    with pytest.raises(LinAlgError):
        cotensor_map(swap, W.id, X, X, e=CoalgebraMap(C, C, C.id))


def test_quotient_by_grouplikes_of_a3():
    E = path_coalgebra(A_quiver(3))
    D = subcoalgebra_from_span(E, ["e1", "e2", "e3"])
    Q, p = quotient_bicomodule(E, D.inclusion, "both", name="E/D")
    assert Q.dim == 3
    assert validate_comodule(Q).ok
    assert is_comodule_map(p, regular(E), Q)


def test_quotient_rejects_non_coideal():
    E = divided_power(3)
    X = LinMap(Space(("x",)), E.space, [{2: Fraction(1)}])
    with pytest.raises(NotACoideal):
        quotient_bicomodule(E, X, "right")


def test_induced_comodule_and_bar_lift():
    E = path_coalgebra(A_quiver(3))
    D = subcoalgebra_from_span(E, ["e1", "e2", "e3"])
    alpha = CoalgebraMap(D.coalgebra, E, D.inclusion)
    W = Comodule(D.coalgebra.space, E, tensor(D.inclusion, D.coalgebra.id) @ D.coalgebra.delta,
                 None, None, name="D")
    induced = induced_comodule(alpha, W)
    assert validate_comodule(induced).ok
    assert induced.left == D.coalgebra
    with pytest.raises(FactorizationMismatch):
        induced_comodule(alpha, regular(E).forget_right())
    wrong = LinMap.zero(W.space, tensor_space(D.coalgebra.space, W.space))
    with pytest.raises(FactorizationMismatch):
        induced_comodule(alpha, W, candidate=wrong)


def test_corestriction_along_inclusion():
    E = path_coalgebra(A_quiver(3))
    D = subcoalgebra_from_span(E, ["e1", "e2", "e3"])
    V = regular(D.coalgebra).forget_left()
    out = corestrict(D.as_map, V)
    assert out.right == E
    assert validate_comodule(out).ok


def test_restriction_to_subcomodule():
    E = path_coalgebra(A_quiver(3))
    D = subcoalgebra_from_span(E, ["e1", "e2", "e3"])
    sub = restrict_to_subcomodule(regular(E), D.inclusion, name="D")
    assert validate_comodule(sub).ok and sub.dim == 3


@given(st.integers(2, 5))
def test_rho_bar_round_trip_on_divided_power_quotients(N):
    E = divided_power(N)
    D = subcoalgebra_from_span(E, ["c0"])
    Q, _ = quotient_bicomodule(E, D.inclusion, "both", name="E/D")
    fwd, inv, _ = rho_bar(Q)
    assert inv @ fwd == Q.id
    fwd, inv, _ = rho_bar_left(Q)
    assert inv @ fwd == Q.id
