import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cotensorkit.exactla import (LinMap, NoFactorization, ShapeMismatch, Space, cokernel,
                                 contained_in, direct_sum, factor_through_epi, factor_through_mono,
                                 image, kernel, left_inverse, pullback, random_map, right_inverse,
                                 same_subobject, serialize_map, solve, tensor, tensor_all,
                                 tensor_space, twist)

from oracles import dense, kron, rank as oracle_rank

small = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def linmaps(draw, rows=None, cols=None, max_dim=4):
    m = draw(st.integers(0, max_dim)) if rows is None else rows
    n = draw(st.integers(0, max_dim)) if cols is None else cols
    entries = draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m))
    return LinMap.from_rows(Space.basis("x", n), Space.basis("y", m), entries)


# -- rank and kernels -----------------------------------------------------------

@given(linmaps())
def test_rank_matches_dense_oracle(f):
    assert f.rank == oracle_rank(dense(f))


@given(linmaps())
def test_rank_nullity(f):
    K, k = kernel(f)
    assert K.dim + f.rank == f.domain.dim
    assert (f @ k).is_zero()
    assert k.is_injective()


@given(linmaps())
def test_cokernel_is_epi_and_kills_image(f):
    Q, p = cokernel(f)
    assert (p @ f).is_zero()
    assert p.is_surjective()
    assert Q.dim == f.codomain.dim - f.rank


@given(linmaps())
def test_image_factorisation(f):
    _, inc = image(f)
    assert inc.is_injective()
    assert inc.domain.dim == f.rank
    h = factor_through_mono(f, inc)
    assert inc @ h == f


def test_kernel_of_random_3x5():
    rng = random.Random(3)
    f = random_map(rng, Space.basis("x", 5), Space.basis("y", 3))
    K, k = kernel(f)
    assert K.dim == 5 - oracle_rank(dense(f))


def test_cokernel_of_rank2_4x2():
    f = LinMap.from_rows(Space.basis("x", 2), Space.basis("y", 4),
                         [[1, 0], [0, 1], [1, 1], [2, -1]])
    Q, p = cokernel(f)
    assert Q.dim == 2 and (p @ f).is_zero()


# -- universal properties -------------------------------------------------------

def test_kernel_universal_property_random():
    rng = random.Random(11)
    for _ in range(20):
        f = random_map(rng, Space.basis("x", 4), Space.basis("y", 2))
        _, k = kernel(f)
        g = k @ random_map(rng, Space.basis("z", 3), k.domain)
        h = factor_through_mono(g, k)
        assert k @ h == g


def test_cokernel_universal_property_random():
    rng = random.Random(12)
    for _ in range(20):
        f = random_map(rng, Space.basis("x", 2), Space.basis("y", 4))
        _, p = cokernel(f)
        g = random_map(rng, p.codomain, Space.basis("z", 3)) @ p
        h = factor_through_epi(g, p)
        assert h @ p == g


def test_factor_through_mono_rejects_outside_image():
    iota = LinMap.from_rows(Space.basis("x", 1), Space.basis("y", 2), [[1], [0]])
    g = LinMap.from_rows(Space.basis("z", 1), Space.basis("y", 2), [[0], [1]])
    with pytest.raises(NoFactorization):
        factor_through_mono(g, iota)


def test_factor_through_epi_rejects_non_constant_on_fibres():
    p = LinMap.from_rows(Space.basis("x", 2), Space.basis("y", 1), [[1, 1]])
    g = LinMap.from_rows(Space.basis("x", 2), Space.basis("z", 1), [[1, 0]])
    with pytest.raises(NoFactorization):
        factor_through_epi(g, p)


@given(linmaps(rows=3, cols=3))
def test_solve_when_consistent(A):
    rng = random.Random(0)
    X = random_map(rng, Space.basis("u", 2), A.domain)
    B = A @ X
    Y = solve(A, B)
    assert A @ Y == B


@given(linmaps())
def test_one_sided_inverses(f):
    _, inc = image(f)
    assert left_inverse(inc) @ inc == LinMap.identity(inc.domain)
    _, p = cokernel(f)
    assert p @ right_inverse(p) == LinMap.identity(p.codomain)


@given(linmaps())
def test_same_subobject_ignores_basis(f):
    _, k = kernel(f)
    if k.domain.dim:
        # a change of basis of the kernel gives the same subobject
        shear = LinMap.identity(k.domain)
        cols = [dict(c) for c in shear.cols]
        cols[0][k.domain.dim - 1] = cols[0].get(k.domain.dim - 1, 0) + Fraction(2)
        if k.domain.dim == 1:
            cols = [{0: Fraction(3)}]
        k2 = k @ LinMap(k.domain, k.domain, cols)
        assert same_subobject(k, k2)
        assert contained_in(k, k2) and contained_in(k2, k)


def test_pullback_universal_property():
    rng = random.Random(5)
    f = random_map(rng, Space.basis("x", 3), Space.basis("z", 2))
    g = random_map(rng, Space.basis("y", 2), Space.basis("z", 2))
    P, pf, pg = pullback(f, g)
    assert f @ pf == g @ pg
    # dimension: dim P = dim X + dim Y − rank[f, −g]
    from cotensorkit.exactla import hstack
    S, _, _ = direct_sum([f.domain, g.domain])
    assert P.dim == 5 - hstack([f, -g], domain=S).rank


# -- tensor products --------------------------------------------------------------

@given(st.lists(small, min_size=16, max_size=16))
def test_mixed_product(xs):
    S = Space.basis("s", 2)
    A, B, C, D = (LinMap.from_rows(S, S, [xs[4 * k:4 * k + 2], xs[4 * k + 2:4 * k + 4]])
                  for k in range(4))
    assert tensor(A, B) @ tensor(C, D) == tensor(A @ C, B @ D)


@given(linmaps(max_dim=3), linmaps(max_dim=3))
def test_tensor_matches_kronecker(f, g):
    assert dense(tensor(f, g)) == kron(dense(f), dense(g))


def test_tensor_associativity_is_strict():
    U, V, W = Space.basis("u", 2), Space.basis("v", 1), Space.basis("w", 2)
    assert tensor_space(tensor_space(U, V), W) == tensor_space(U, tensor_space(V, W))
    assert tensor_space(Space.ground(), U) == U


def test_tensor_all_and_twist():
    rng = random.Random(2)
    A, B = Space.basis("a", 2), Space.basis("b", 3)
    f = random_map(rng, A, A)
    g = random_map(rng, B, B)
    t = twist(A, B)
    assert t @ tensor(f, g) == tensor(g, f) @ t
    assert twist(B, A) @ t == LinMap.identity(tensor_space(A, B))
    assert tensor_all(f, g) == tensor(f, g)


# -- construction and guards -------------------------------------------------------

def test_shape_mismatch():
    f = LinMap.identity(Space.basis("x", 2))
    g = LinMap.identity(Space.basis("y", 3))
    with pytest.raises(ShapeMismatch):
        f + g
    with pytest.raises(ShapeMismatch):
        LinMap.from_rows(Space.basis("x", 2), Space.basis("y", 1), [[1]])


def test_labels_must_be_unique():
    with pytest.raises(ValueError):
        Space(("a", "a"))


def test_exactness_of_fraction_arithmetic():
    f = LinMap.from_rows(Space.basis("x", 2), Space.basis("y", 2), [["1/3", "1/6"], [1, "1/2"]])
    assert f.rank == 1
    assert dense(f)[0, 0] == Fraction(1, 3)


def test_serialize_map_shape():
    f = LinMap.from_rows(Space.basis("x", 2), Space.basis("y", 1), [["1/2", -1]])
    out = serialize_map(f)
    assert out["shape"] == [1, 2]
    assert out["dense"] == [["1/2", "-1"]]
