"""Exact rational linear algebra on labelled bases.

Every morphism in the package is a :class:`LinMap` between two :class:`Space`
objects.  Matrices are stored column-sparse: column ``j`` is a dict
``{row_index: Fraction}`` holding the image of the j-th basis vector.  All
elimination runs on integer rows (fraction-free) with content normalisation,
so no rounding can ever occur and the reduced row echelon form is canonical.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

# dimension above which serialisation switches from dense rows to triplets
SPARSE_THRESHOLD = 64


class LinAlgError(Exception):
    """Base error for the linear algebra layer."""


class ShapeMismatch(LinAlgError):
    pass


class NoFactorization(LinAlgError):
    """Raised when a requested factorisation does not exist.

    ``witness`` is the index of a domain basis vector for which the
    factorisation fails (when known).
    """

    def __init__(self, msg: str, witness: int | None = None):
        super().__init__(msg)
        self.witness = witness


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and strings like ``"3/4"`` exactly.  Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"refusing inexact scalar {x!r}")


@dataclass(frozen=True)
class Space:
    """A finite dimensional space with an ordered basis of unique labels."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.labels, tuple):
            object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label: str) -> int:
        return self._index[label]

    @classmethod
    def basis(cls, prefix: str, n: int) -> "Space":
        return cls(tuple(f"{prefix}{i}" for i in range(n)))

    @classmethod
    def zero(cls) -> "Space":
        return cls(())

    @classmethod
    def ground(cls) -> "Space":
        """The one dimensional ground field, the unit object for tensor."""
        return cls(("1",))

    def __repr__(self):
        if self.dim <= 8:
            return f"Space({list(self.labels)})"
        return f"Space(dim={self.dim})"


def tensor_space(*spaces: Space) -> Space:
    """Tensor product with lexicographically ordered paired labels.

    Labels are joined with ``⊗`` so that (U⊗V)⊗W and U⊗(V⊗W) get the same
    labels: tensor associativity is strict.  The ground field is a strict unit.
    """
    out = Space.ground()
    for sp in spaces:
        if sp == Space.ground():
            continue
        if out == Space.ground():
            out = sp
            continue
        out = Space(tuple(f"{a}⊗{b}" for a in out.labels for b in sp.labels))
    return out


def direct_sum_space(spaces: Sequence[Space], tags: Sequence[str] | None = None) -> Space:
    if tags is None:
        tags = [str(i) for i in range(len(spaces))]
    return Space(tuple(f"{t}:{lab}" for t, sp in zip(tags, spaces) for lab in sp.labels))


def _clean(col: Mapping[int, Fraction]) -> dict[int, Fraction]:
    return {i: v for i, v in col.items() if v}


class LinMap:
    """Exact rational matrix ``codomain.dim x domain.dim`` between labelled spaces.

    Instances are treated as immutable.  ``f @ g`` is composition f∘g.
    """

    __slots__ = ("domain", "codomain", "cols", "_hash", "_rank")

    def __init__(self, domain: Space, codomain: Space, cols: Sequence[Mapping[int, Fraction]]):
        if len(cols) != domain.dim:
            raise ShapeMismatch(f"{len(cols)} columns for domain of dim {domain.dim}")
        self.domain = domain
        self.codomain = codomain
        self.cols = tuple(_clean(c) for c in cols)
        for c in self.cols:
            for i in c:
                if not 0 <= i < codomain.dim:
                    raise ShapeMismatch(f"row index {i} out of range {codomain.dim}")
        self._hash = None
        self._rank = None

    # constructors
    @classmethod
    def from_rows(cls, domain: Space, codomain: Space, rows) -> "LinMap":
        rows = [[as_fraction(x) for x in r] for r in rows]
        if len(rows) != codomain.dim or any(len(r) != domain.dim for r in rows):
            raise ShapeMismatch("dense rows do not match shape")
        cols = [{i: rows[i][j] for i in range(codomain.dim)} for j in range(domain.dim)]
        return cls(domain, codomain, cols)

    @classmethod
    def from_triplets(cls, domain: Space, codomain: Space, triplets) -> "LinMap":
        """``triplets`` of (row, col, value); repeated positions are summed."""
        cols: list[dict[int, Fraction]] = [{} for _ in range(domain.dim)]
        for i, j, v in triplets:
            v = as_fraction(v)
            cols[j][i] = cols[j].get(i, 0) + v
        return cls(domain, codomain, cols)

    @classmethod
    def from_function(cls, domain: Space, codomain: Space, fn) -> "LinMap":
        """Build from ``fn(label) -> {codomain_label: coefficient}``."""
        cols = []
        for lab in domain.labels:
            col: dict[int, Fraction] = {}
            for clab, v in fn(lab).items():
                i = codomain.index(clab)
                col[i] = col.get(i, 0) + as_fraction(v)
            cols.append(col)
        return cls(domain, codomain, cols)

    @classmethod
    def identity(cls, space: Space) -> "LinMap":
        return cls(space, space, [{j: Fraction(1)} for j in range(space.dim)])

    @classmethod
    def zero(cls, domain: Space, codomain: Space) -> "LinMap":
        return cls(domain, codomain, [{} for _ in range(domain.dim)])

    # basic accessors
    @property
    def shape(self) -> tuple[int, int]:
        return (self.codomain.dim, self.domain.dim)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    @property
    def storage(self) -> str:
        return "sparse" if max(self.shape, default=0) > SPARSE_THRESHOLD else "dense"

    def entry(self, i: int, j: int) -> Fraction:
        return self.cols[j].get(i, Fraction(0))

    def rows(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [{} for _ in range(self.codomain.dim)]
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                out[i][j] = v
        return out

    def to_dense(self) -> list[list[Fraction]]:
        m = [[Fraction(0)] * self.domain.dim for _ in range(self.codomain.dim)]
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                m[i][j] = v
        return m

    def triplets(self) -> list[tuple[int, int, Fraction]]:
        return sorted((i, j, v) for j, c in enumerate(self.cols) for i, v in c.items())

    def apply(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Image of a sparse vector given as {domain_index: coefficient}."""
        out: dict[int, Fraction] = {}
        for j, a in vec.items():
            for i, v in self.cols[j].items():
                out[i] = out.get(i, 0) + a * v
        return _clean(out)

    # algebra
    def __matmul__(self, other: "LinMap") -> "LinMap":
        if other.codomain != self.domain:
            raise ShapeMismatch(
                f"cannot compose: {other.codomain!r} is not {self.domain!r}")
        return LinMap(other.domain, self.codomain, [self.apply(c) for c in other.cols])

    def _check_same(self, other: "LinMap"):
        if self.domain != other.domain or self.codomain != other.codomain:
            raise ShapeMismatch("maps live between different spaces")

    def __add__(self, other: "LinMap") -> "LinMap":
        self._check_same(other)
        cols = []
        for a, b in zip(self.cols, other.cols):
            c = dict(a)
            for i, v in b.items():
                c[i] = c.get(i, 0) + v
            cols.append(c)
        return LinMap(self.domain, self.codomain, cols)

    def __neg__(self) -> "LinMap":
        return LinMap(self.domain, self.codomain, [{i: -v for i, v in c.items()} for c in self.cols])

    def __sub__(self, other: "LinMap") -> "LinMap":
        return self + (-other)

    def scale(self, a) -> "LinMap":
        a = as_fraction(a)
        return LinMap(self.domain, self.codomain, [{i: a * v for i, v in c.items()} for c in self.cols])

    def __rmul__(self, a) -> "LinMap":
        return self.scale(a)

    def transpose(self) -> "LinMap":
        return LinMap(self.codomain, self.domain, self.rows())

    @property
    def T(self) -> "LinMap":
        return self.transpose()

    def tensor(self, other: "LinMap") -> "LinMap":
        return tensor(self, other)

    def relabel(self, domain: Space | None = None, codomain: Space | None = None) -> "LinMap":
        """Same matrix, different (equal-dimensional) spaces."""
        domain = self.domain if domain is None else domain
        codomain = self.codomain if codomain is None else codomain
        if domain.dim != self.domain.dim or codomain.dim != self.codomain.dim:
            raise ShapeMismatch("relabel must preserve dimensions")
        return LinMap(domain, codomain, self.cols)

    # predicates
    def is_zero(self) -> bool:
        return not any(self.cols)

    @property
    def rank(self) -> int:
        if self._rank is None:
            self._rank = len(rref(self.rows()))
        return self._rank

    def is_injective(self) -> bool:
        return self.rank == self.domain.dim

    def is_surjective(self) -> bool:
        return self.rank == self.codomain.dim

    def is_isomorphism(self) -> bool:
        return self.domain.dim == self.codomain.dim and self.is_injective()

    def first_difference(self, other: "LinMap") -> int | None:
        """Index of the first domain basis vector on which two maps differ."""
        self._check_same(other)
        for j, (a, b) in enumerate(zip(self.cols, other.cols)):
            if a != b:
                return j
        return None

    def __eq__(self, other):
        if not isinstance(other, LinMap):
            return NotImplemented
        return self.domain == other.domain and self.codomain == other.codomain and self.cols == other.cols

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.domain, self.codomain,
                               tuple(tuple(sorted(c.items())) for c in self.cols)))
        return self._hash

    def __repr__(self):
        if self.domain.dim * self.codomain.dim <= 36:
            body = [[str(x) for x in r] for r in self.to_dense()]
            return f"LinMap({self.codomain.dim}x{self.domain.dim}, {body})"
        return f"LinMap({self.codomain.dim}x{self.domain.dim}, nnz={self.nnz})"


# ---------------------------------------------------------------------------
# fraction-free elimination

def _int_row(row: Mapping[int, Fraction]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row (content 1)."""
    if not row:
        return {}
    den = lcm(*(Fraction(v).denominator for v in row.values()))
    r = {k: int(Fraction(v) * den) for k, v in row.items() if v}
    return _primitive(r)


def _primitive(r: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in r.values():
        g = gcd(g, v)
        if g == 1:
            return r
    if g > 1:
        r = {k: v // g for k, v in r.items()}
    return r


def _eliminate(r: dict[int, int], p: dict[int, int], c: int) -> dict[int, int]:
    """Cancel column ``c`` of ``r`` using pivot row ``p`` without fractions."""
    a, b = p[c], r[c]
    g = gcd(a, b)
    a, b = a // g, b // g
    out = {k: a * v for k, v in r.items()} if a != 1 else dict(r)
    for k, v in p.items():
        nv = out.get(k, 0) - b * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return _primitive(out)


def echelon(rows: Iterable[Mapping[int, Fraction]]) -> dict[int, dict[int, int]]:
    """Integer reduced echelon form, keyed by pivot column.

    Pivot rows are kept mutually reduced: each has zeros in every other
    pivot column, and its pivot entry is positive.  Since the reduced form of
    a matrix is unique, the result only depends on the row space.
    """
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        r = _int_row(row)
        for c in [c for c in r if c in pivots]:
            if c in r:
                r = _eliminate(r, pivots[c], c)
        if not r:
            continue
        c_new = min(r)
        if r[c_new] < 0:
            r = {k: -v for k, v in r.items()}
        for c, p in pivots.items():
            if c_new in p:
                pivots[c] = _eliminate(p, r, c_new)
                if pivots[c][c] < 0:
                    pivots[c] = {k: -v for k, v in pivots[c].items()}
        pivots[c_new] = r
    return pivots


def rref(rows: Iterable[Mapping[int, Fraction]]) -> dict[int, dict[int, Fraction]]:
    """Rational reduced row echelon form with unit pivots."""
    out = {}
    for c, r in sorted(echelon(rows).items()):
        d = r[c]
        out[c] = {k: Fraction(v, d) for k, v in r.items()}
    return out


def rank(f: LinMap) -> int:
    return f.rank


# ---------------------------------------------------------------------------
# kernels, cokernels, factorisations

def _kernel_vectors(rows, ncols: int) -> list[dict[int, Fraction]]:
    R = rref(rows)
    vecs = []
    for j in range(ncols):
        if j in R:
            continue
        v = {j: Fraction(1)}
        for c, r in R.items():
            if j in r:
                v[c] = -r[j]
        vecs.append(v)
    return vecs


def kernel(f: LinMap, prefix: str = "k") -> tuple[Space, LinMap]:
    """Kernel (K, ι) with basis indexed by the free columns of the rref of f."""
    vecs = _kernel_vectors(f.rows(), f.domain.dim)
    K = Space.basis(prefix, len(vecs))
    return K, LinMap(K, f.domain, vecs)


def _quotient_labels(vecs, codomain: Space, prefix: str) -> Space:
    labs = []
    for k, v in enumerate(vecs):
        if len(v) == 1 and next(iter(v.values())) == 1:
            labs.append(f"{prefix}[{codomain.labels[next(iter(v))]}]")
        else:
            labs.append(f"{prefix}{k}")
    if len(set(labs)) != len(labs):
        labs = [f"{prefix}{k}" for k in range(len(vecs))]
    return Space(tuple(labs))


def cokernel(f: LinMap, prefix: str = "q") -> tuple[Space, LinMap]:
    """Cokernel (Q, p); rows of p span the left null space of f.

    When the image of f is a coordinate subspace, p is the coordinate
    projection onto the complementary coordinates and Q gets labels
    ``q[label]``.
    """
    vecs = _kernel_vectors(f.cols, f.codomain.dim)
    Q = _quotient_labels(vecs, f.codomain, prefix)
    # vecs are rows of p
    return Q, LinMap(Q, f.codomain, vecs).transpose()


def image(f: LinMap, prefix: str = "im") -> tuple[Space, LinMap]:
    """Image (I, ι) with a canonical basis: the rref rows of fᵀ."""
    R = rref(f.cols)
    vecs = [r for _, r in sorted(R.items())]
    I = Space.basis(prefix, len(vecs))
    return I, LinMap(I, f.codomain, vecs)


def solve(A: LinMap, B: LinMap) -> LinMap:
    """Return X with A∘X = B, choosing all free variables zero.

    Raises NoFactorization (witness = first column of B outside im A).
    """
    if A.codomain != B.codomain:
        raise ShapeMismatch("solve needs a common codomain")
    n = A.domain.dim
    Arows = A.rows()
    Brows = B.rows()
    aug = []
    for ra, rb in zip(Arows, Brows):
        r = dict(ra)
        for j, v in rb.items():
            r[n + j] = v
        aug.append(r)
    R = rref(aug)
    bad = [c - n for c in R if c >= n]
    if bad:
        raise NoFactorization("right hand side is not in the image", witness=min(bad))
    cols: list[dict[int, Fraction]] = [{} for _ in range(B.domain.dim)]
    for c, r in R.items():
        for k, v in r.items():
            if k >= n:
                cols[k - n][c] = v
    return LinMap(B.domain, A.domain, cols)


def factor_through_mono(g: LinMap, iota: LinMap) -> LinMap:
    """Unique h with iota∘h = g.  iota must be injective."""
    if g.codomain != iota.codomain:
        raise ShapeMismatch("factor_through_mono: codomains differ")
    if not iota.is_injective():
        raise LinAlgError("factor_through_mono: the given map is not injective")
    return solve(iota, g)


def factor_through_epi(g: LinMap, p: LinMap) -> LinMap:
    """Unique h with h∘p = g.  p must be surjective."""
    if g.domain != p.domain:
        raise ShapeMismatch("factor_through_epi: domains differ")
    if not p.is_surjective():
        raise LinAlgError("factor_through_epi: the given map is not surjective")
    try:
        h = solve(p.transpose(), g.transpose())
    except NoFactorization as exc:
        raise NoFactorization("map does not vanish on the kernel of the epimorphism") from exc
    return h.transpose()


def left_inverse(iota: LinMap) -> LinMap:
    """Some r with r∘iota = id (iota injective); deterministic choice."""
    return solve(iota.transpose(), LinMap.identity(iota.domain)).transpose()


def right_inverse(p: LinMap) -> LinMap:
    """Some s with p∘s = id (p surjective)."""
    return solve(p, LinMap.identity(p.codomain))


def is_in_image(g: LinMap, f: LinMap) -> bool:
    try:
        solve(f, g)
    except NoFactorization:
        return False
    return True


def same_subobject(i1: LinMap, i2: LinMap) -> bool:
    """Subobject equality by mutual factorisation."""
    return i1.codomain == i2.codomain and is_in_image(i1, i2) and is_in_image(i2, i1)


def contained_in(i1: LinMap, i2: LinMap) -> bool:
    return is_in_image(i1, i2)


def tensor(f: LinMap, g: LinMap) -> LinMap:
    """Kronecker product f⊗g on lexicographically paired bases."""
    dom = tensor_space(f.domain, g.domain)
    cod = tensor_space(f.codomain, g.codomain)
    cg = g.codomain.dim
    cols = []
    for cf in f.cols:
        for cgc in g.cols:
            col = {}
            for i1, v1 in cf.items():
                base = i1 * cg
                for i2, v2 in cgc.items():
                    col[base + i2] = v1 * v2
            cols.append(col)
    return LinMap(dom, cod, cols)


def tensor_all(*maps: LinMap) -> LinMap:
    out = maps[0]
    for m in maps[1:]:
        out = tensor(out, m)
    return out


def twist(A: Space, B: Space) -> LinMap:
    """The flip A⊗B → B⊗A."""
    nb = B.dim
    cols = [{j * A.dim + i: Fraction(1)} for i in range(A.dim) for j in range(nb)]
    return LinMap(tensor_space(A, B), tensor_space(B, A), cols)


def hstack(maps: Sequence[LinMap], domain: Space | None = None) -> LinMap:
    """[f1 f2 ...] : ⊕ domains → common codomain."""
    cod = maps[0].codomain
    if any(m.codomain != cod for m in maps):
        raise ShapeMismatch("hstack needs a common codomain")
    if domain is None:
        domain = direct_sum_space([m.domain for m in maps])
    cols = [c for m in maps for c in m.cols]
    return LinMap(domain, cod, cols)


def vstack(maps: Sequence[LinMap], codomain: Space | None = None) -> LinMap:
    """[f1; f2; ...] : common domain → ⊕ codomains."""
    dom = maps[0].domain
    if any(m.domain != dom for m in maps):
        raise ShapeMismatch("vstack needs a common domain")
    if codomain is None:
        codomain = direct_sum_space([m.codomain for m in maps])
    cols = []
    for j in range(dom.dim):
        col, off = {}, 0
        for m in maps:
            for i, v in m.cols[j].items():
                col[off + i] = v
            off += m.codomain.dim
        cols.append(col)
    return LinMap(dom, codomain, cols)


def direct_sum(spaces: Sequence[Space], tags: Sequence[str] | None = None):
    """Return (S, injections, projections) for S = ⊕ spaces."""
    S = direct_sum_space(spaces, tags)
    injections, projections = [], []
    off = 0
    for sp in spaces:
        inj = LinMap(sp, S, [{off + j: Fraction(1)} for j in range(sp.dim)])
        injections.append(inj)
        projections.append(inj.transpose())
        off += sp.dim
    return S, injections, projections


def pullback(f: LinMap, g: LinMap, prefix: str = "pb") -> tuple[Space, LinMap, LinMap]:
    """Pullback (P, p_f, p_g) of f: X → Z and g: Y → Z, as ker[f, −g]."""
    if f.codomain != g.codomain:
        raise ShapeMismatch("pullback needs a common codomain")
    S, _, (px, py) = direct_sum([f.domain, g.domain])
    P, iota = kernel(hstack([f, -g], domain=S), prefix=prefix)
    return P, px @ iota, py @ iota


def random_map(rng, domain: Space, codomain: Space, lo: int = -2, hi: int = 2,
               density: float = 1.0) -> LinMap:
    """Random integer matrix; ``rng`` is a ``random.Random``."""
    cols = []
    for _ in range(domain.dim):
        col = {}
        for i in range(codomain.dim):
            if density >= 1.0 or rng.random() < density:
                v = rng.randint(lo, hi)
                if v:
                    col[i] = Fraction(v)
        cols.append(col)
    return LinMap(domain, codomain, cols)


def serialize_map(f: LinMap) -> dict:
    """JSON friendly form; dense rows below the threshold, triplets above."""
    if f.storage == "dense":
        return {"shape": list(f.shape), "dense": [[str(x) for x in r] for r in f.to_dense()]}
    return {"shape": list(f.shape), "triplets": [[i, j, str(v)] for i, j, v in f.triplets()]}
