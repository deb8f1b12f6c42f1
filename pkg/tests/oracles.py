"""Independent reference computations on dense sympy matrices.

Nothing here imports the package's linear algebra: structures are read off
through their matrices only, so a bug in the sparse elimination cannot
hide in both sides of a comparison.
"""
from fractions import Fraction
from itertools import product

import sympy as sp


def dense(f) -> sp.Matrix:
    """A LinMap as a sympy matrix (rows index the codomain)."""
    rows, cols = f.codomain.dim, f.domain.dim
    M = sp.zeros(rows, cols)
    for j, col in enumerate(f.cols):
        for i, v in col.items():
            M[i, j] = sp.Rational(v.numerator, v.denominator)
    return M


def _kron2(A, B):
    # written out: sympy's kronecker_product fails on empty matrices
    out = sp.zeros(A.rows * B.rows, A.cols * B.cols)
    for i in range(A.rows):
        for j in range(A.cols):
            if A[i, j]:
                out[i * B.rows:(i + 1) * B.rows, j * B.cols:(j + 1) * B.cols] = A[i, j] * B
    return out


def kron(*ms):
    out = ms[0]
    for m in ms[1:]:
        out = _kron2(out, m)
    return out


def rank(M) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return M.rank()


def nullity(M) -> int:
    return M.cols - rank(M)


def iterated(delta, n: int, k: int) -> sp.Matrix:
    """Δ^{k}: C → C^{⊗k+1} from the n²×n matrix of Δ."""
    out = sp.eye(n)
    for t in range(k):
        out = kron(delta, sp.eye(n ** t)) @ out if t else delta @ out
    return out


def annihilator_projection(span_cols: sp.Matrix, n: int) -> sp.Matrix:
    """Rows form a basis of the linear forms vanishing on the column span."""
    if span_cols.cols == 0:
        return sp.eye(n)
    ns = span_cols.T.nullspace()
    if not ns:
        return sp.zeros(0, n)
    return sp.Matrix.hstack(*ns).T


def wedge_power_dim(delta, n: int, span_cols: sp.Matrix, k: int) -> int:
    """dim Ker(p^{⊗k}Δ^{k-1}) for D spanned by the given columns.

    Uses p^{⊗k}Δ^{k-1} = (p^{⊗k-1}Δ^{k-2} ⊗ p)∘Δ and replaces each partial
    product by a basis of its row space, which leaves the kernel unchanged.
    """
    p = annihilator_projection(span_cols, n)
    if p.rows == 0:
        return n
    G = p
    for _ in range(k - 1):
        G = _row_basis(kron(G, p) @ delta)
    return nullity(G)


def _row_basis(M):
    R, piv = M.rref()
    return R[:len(piv), :] if piv else sp.zeros(0, M.cols)


def filtration_dims(C, span_cols: sp.Matrix, upto: int) -> list[int]:
    delta = dense(C.delta)
    return [0] + [wedge_power_dim(delta, C.dim, span_cols, k) for k in range(1, upto + 1)]


def unit_columns(C, labels) -> sp.Matrix:
    idx = [C.space.labels.index(lab) for lab in labels]
    M = sp.zeros(C.dim, len(idx))
    for j, i in enumerate(idx):
        M[i, j] = 1
    return M


def path_counts(n_vertices: int, edges, upto: int) -> list[int]:
    """Number of paths of each length 0..upto via powers of the adjacency matrix."""
    A = sp.zeros(n_vertices, n_vertices)
    for s, t in edges:
        A[s - 1, t - 1] += 1
    out, P = [], sp.eye(n_vertices)
    for _ in range(upto + 1):
        out.append(int(sum(P)))
        P = P @ A
    return out


def cotensor_dim(rho_r_V, rho_l_W) -> int:
    """dim of the equalizer of ρ_V⊗W and V⊗ρ_W."""
    nV, nW = rho_r_V.cols, rho_l_W.cols
    diff = kron(rho_r_V, sp.eye(nW)) - kron(sp.eye(nV), rho_l_W)
    return nullity(diff)


def coseparable_oracle(C) -> bool:
    """Brute-force solve for a bicomodule retraction R: C⊗C → C of Δ."""
    n = C.dim
    d = dense(C.delta)
    I = sp.eye(n)
    eqs = [
        (lambda R: R @ d, I),
        (lambda R: d @ R - kron(I, R) @ kron(d, I), sp.zeros(n * n, n * n)),
        (lambda R: d @ R - kron(R, I) @ kron(I, d), sp.zeros(n * n, n * n)),
    ]
    A = sp.Matrix.vstack(*[_vec_of_linear(n, fn) for fn, _ in eqs])
    b = sp.Matrix.vstack(*[_colvec(rhs) for _, rhs in eqs])
    return rank(A) == rank(sp.Matrix.hstack(A, b))


def _colvec(M):
    return sp.Matrix([M[i, j] for j in range(M.cols) for i in range(M.rows)])


def _vec_of_linear(n, build):
    """Matrix of the linear map vec(R) ↦ vec(build(R)) for R of shape n × n²."""
    cols = []
    for j, i in product(range(n * n), range(n)):
        R = sp.zeros(n, n * n)
        R[i, j] = 1
        cols.append(_colvec(build(R)))
    return sp.Matrix.hstack(*cols)


def snake_omega_a1_zero(d, k3) -> sp.Matrix:
    """ω̄ = β12^{-1} f2 α23^{-1} k3 when A1 = 0 (α23 invertible, β12 injective)."""
    a23 = dense(d.a23)
    b12 = dense(d.b12)
    target = dense(d.f2) @ (a23.inv() if a23.rows else a23) @ dense(k3)
    if b12.cols == 0:
        return sp.zeros(0, target.cols)
    return (b12.T @ b12).inv() @ b12.T @ target


def chase_column(d, k3, j) -> sp.Matrix:
    """Chase basis vector j of Ker f3 by solving linear systems directly."""
    a23, f2, b12 = dense(d.a23), dense(d.f2), dense(d.b12)
    x3 = dense(k3)[:, j]
    sol = a23.gauss_jordan_solve(x3)[0]
    sol = sol.subs({s: 0 for s in sol.free_symbols})
    y2 = f2 @ sol
    if b12.cols == 0:
        return sp.zeros(0, 1)
    y1 = b12.gauss_jordan_solve(y2)[0]
    return y1.subs({s: 0 for s in y1.free_symbols})


def to_fraction(x) -> Fraction:
    x = sp.Rational(x)
    return Fraction(int(x.p), int(x.q))


def trivial_line_injective_oracle(C, g: int = 0) -> bool:
    """Is the line with both coactions m ↦ g⊗m (resp. m⊗g) I-injective?

    Brute force: a row R on C⊗C with R(g⊗g) = 1 that is left and right colinear.
    """
    n = C.dim
    d = dense(C.delta)
    I = sp.eye(n)
    u = sp.zeros(n, 1)
    u[g, 0] = 1
    syms = sp.symbols(f"r0:{n * n}")
    R = sp.Matrix([list(syms)])
    eqs = list(R @ kron(u, u) - sp.eye(1))
    eqs += list(u @ R - kron(R, I) @ kron(I, d))
    eqs += list(u @ R - kron(I, R) @ kron(d, I))
    return bool(sp.linsolve([e for e in eqs if e != 0], syms))
