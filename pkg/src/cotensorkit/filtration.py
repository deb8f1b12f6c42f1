"""The wedge filtration D = D^1 ⊆ D^2 ⊆ ... of a subcoalgebra, its limit D̃ and
the retraction family of the structural maps."""
from __future__ import annotations

from dataclasses import dataclass, field

from .coalg import (Coalgebra, CoalgebraMap, Subcoalgebra, iterated_delta, subcoalgebra,
                    zero_subcoalgebra)
from .exactla import (
    LinAlgError,
    LinMap,
    Space,
    cokernel,
    factor_through_mono,
    left_inverse,
    same_subobject,
    tensor,
    tensor_all,
)
from .wedge import named_kernel, wedge


class NotACosplitting(LinAlgError):
    pass


def dn(n: int) -> str:
    """Display name of the n-th stage."""
    return "D" if n == 1 else f"D^{n}"


def wedge_power(E: Coalgebra, D: LinMap, n: int) -> LinMap:
    """Ker(p^{⊗n}∘Δ^{n-1}) as an inclusion into E (n ≥ 1)."""
    _, p = cokernel(D)
    return named_kernel(tensor_all(*([p] * n)) @ iterated_delta(E, n - 1), f"{dn(n)}:")


@dataclass
class WedgeFiltration:
    ambient: Coalgebra
    base: Subcoalgebra
    stages: list                       # stages[n-1] is D^n as a Subcoalgebra
    stabilization_index: int | None
    max_n: int
    _xi: dict = field(default_factory=dict, repr=False)

    # -- stages ------------------------------------------------------------
    @property
    def top(self) -> int:
        return self.stabilization_index if self.stabilization_index is not None else len(self.stages)

    def stage(self, n: int) -> Subcoalgebra:
        """D^n; D^0 = 0 and stages past the last computed one are the top stage."""
        if n <= 0:
            return zero_subcoalgebra(self.ambient)
        return self.stages[min(n, len(self.stages)) - 1]

    def delta(self, n: int) -> LinMap:
        """δ_n: D^n → E."""
        return self.stage(n).inclusion

    def dims(self, upto: int | None = None) -> list[int]:
        upto = self.top if upto is None else upto
        return [self.stage(n).dim for n in range(0, upto + 1)]

    @property
    def dtilde(self) -> Subcoalgebra:
        return self.stage(self.top)

    @property
    def delta_tilde(self) -> CoalgebraMap:
        return self.dtilde.as_map

    # -- the direct system -------------------------------------------------
    def xi(self, i: int, j: int | None = None) -> LinMap:
        """ξ_i^j: D^i → D^j (i ≤ j); ξ_i = ξ_i^top when j is None."""
        j = self.top if j is None else j
        # stages past the top coincide with it
        i, j = min(i, len(self.stages)), min(j, len(self.stages))
        if i > j:
            raise ValueError("ξ_i^j needs i ≤ j")
        key = (i, j)
        if key not in self._xi:
            self._xi[key] = factor_through_mono(self.delta(i), self.delta(j))
        return self._xi[key]

    def xi_map(self, i: int, j: int | None = None) -> CoalgebraMap:
        j = self.top if j is None else j
        return CoalgebraMap(self.stage(i).coalgebra, self.stage(j).coalgebra, self.xi(i, j))

    def to_dict(self) -> dict:
        return {
            "dims": [s.dim for s in self.stages],
            "stabilization_index": self.stabilization_index,
            "dtilde_dim": self.dtilde.dim,
            "bases": [list(s.coalgebra.space.labels) for s in self.stages],
        }


def compute_filtration(E: Coalgebra, D: Subcoalgebra | LinMap, max_n: int | None = None) -> WedgeFiltration:
    """Stages D^n = Ker(p^{⊗n}Δ^{n-1}) until D^s = D^{s+1} is witnessed."""
    if isinstance(D, LinMap):
        D = subcoalgebra(E, D, name="D")
    max_n = E.dim + 1 if max_n is None else max_n
    stages = [Subcoalgebra(E, D.inclusion, D.coalgebra)]
    s = None
    for n in range(2, max_n + 1):
        inc = wedge_power(E, D.inclusion, n)
        if same_subobject(inc, stages[-1].inclusion):
            s = n - 1
            break
        # nested by construction
        assert factor_through_mono(stages[-1].inclusion, inc) is not None
        stages.append(subcoalgebra(E, inc, name=dn(n)))
    if s is None and len(stages) == max_n and max_n >= E.dim + 1:
        s = len(stages)
    return WedgeFiltration(E, D, stages, s, max_n)


def comultiplication_bound_check(filt: WedgeFiltration, max_n: int) -> tuple[bool, tuple | None]:
    """Δ(D^{a+b}) ⊆ D^a⊗E + E⊗D^b for a + b ≤ max_n, a, b ≥ 1."""
    E = filt.ambient
    for total in range(2, max_n + 1):
        for a in range(1, total):
            b = total - a
            _, pa = cokernel(filt.delta(a))
            _, pb = cokernel(filt.delta(b))
            if not (tensor(pa, pb) @ E.delta @ filt.delta(total)).is_zero():
                return False, (a, b)
    return True, None


def wedge_alternative_check(filt: WedgeFiltration, max_n: int = 5) -> tuple[bool, tuple | None]:
    """D^{m+n} = D^m ∧_E D^n for all m + n ≤ max_n (both ⊗- and □-forms)."""
    E = filt.ambient
    for total in range(2, max_n + 1):
        for m in range(1, total):
            w = wedge(E, filt.delta(m), filt.delta(total - m))
            if not same_subobject(w.inclusion, filt.delta(total)):
                return False, (m, total - m)
    return True, None


def default_cosplit(filt: WedgeFiltration, i: int) -> LinMap:
    """λ_{i+1}^i by extending a basis of D^i to D^{i+1} and projecting."""
    return left_inverse(filt.xi(i, i + 1))


def retraction_family(filt: WedgeFiltration, r: int, cosplits: dict | None = None) -> LinMap:
    """λ: D̃ → D^r with λ∘ξ_r = id.

    ``cosplits`` maps i to λ_{i+1}^i; missing ones use the default.
    """
    cosplits = dict(cosplits or {})
    top = filt.top
    for i, lam in cosplits.items():
        if lam @ filt.xi(i, i + 1) != LinMap.identity(filt.stage(i).coalgebra.space):
            raise NotACosplitting(f"λ_{i + 1}^{i} is not a retraction of ξ_{i}^{i + 1}")
    if r >= top:
        lam = factor_through_mono(filt.delta(top), filt.delta(r))
    else:
        lam = LinMap.identity(filt.stage(top).coalgebra.space)
        for i in range(top - 1, r - 1, -1):
            step = cosplits.get(i)
            if step is None:
                step = default_cosplit(filt, i)
            lam = step @ lam
    assert lam @ filt.xi(r, top) == LinMap.identity(filt.stage(r).coalgebra.space)
    return lam


def d_alla_n_check(E: Coalgebra, D: Subcoalgebra | LinMap, max_n: int = 5) -> tuple[bool, int | None]:
    """D^{∧_E n} = D^{∧_D̃ n} under δ̃ for n ≤ max_n, from two independent runs."""
    outer = compute_filtration(E, D)
    Dt = outer.dtilde
    inner_base = factor_through_mono(outer.delta(1), Dt.inclusion)
    inner = compute_filtration(Dt.coalgebra, inner_base, max_n=max(max_n, Dt.dim + 1))
    for n in range(1, max_n + 1):
        if not same_subobject(Dt.inclusion @ inner.delta(n), outer.delta(n)):
            return False, n
    return True, None
