"""Exterior algebras on a subset-bitmask basis, Clifford modules built from them,
graded tensor products and the Koszul reordering sign.

Basis convention: bit ``l`` of a mask stands for ``e_{l+1}``; monomials are
ordered by mask value and written with increasing indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Optional, Sequence, Tuple

import sympy

from .linops import Op, SemiLinear, coerce, conj_scalar, to_plain

__all__ = [
    "InnerProductSpace",
    "GradedElement",
    "CliffordModule",
    "wedge",
    "contract",
    "clifford_action",
    "hermitian_action",
    "wedge_op",
    "contract_op",
    "clifford_op",
    "hermitian_op",
    "grading_op",
    "exterior_module",
    "trivial_module",
    "graded_tensor",
    "reorder_operator",
    "permutation_op",
    "permuted_module",
    "popcount",
]


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _wedge_sign(a: int, b: int) -> int:
    """Sign of e_A ∧ e_B -> e_{A|B}: one factor -1 per pair i in A, j in B with i > j."""
    swaps, bits = 0, b
    while bits:
        low = bits & -bits
        swaps += popcount(a & ~((low << 1) - 1))
        bits ^= low
    return -1 if swaps & 1 else 1


@dataclass(frozen=True)
class InnerProductSpace:
    """Finite-dimensional space with a rational metric.

    ``negative=True`` marks a negative-definite metric, as needed for the
    V⁻ summand of Cl(V ⊕ V⁻).
    """

    dim: int
    metric: Tuple[Tuple[Fraction, ...], ...] = ()
    scalar_field: str = "real"
    negative: bool = False

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dimension must be non-negative")
        if self.scalar_field not in ("real", "complex"):
            raise ValueError("scalar_field must be 'real' or 'complex'")
        if not self.metric:
            sign = -1 if self.negative else 1
            g = tuple(tuple(Fraction(sign if i == j else 0) for j in range(self.dim)) for i in range(self.dim))
            object.__setattr__(self, "metric", g)
        else:
            g = tuple(tuple(Fraction(x) for x in row) for row in self.metric)
            if len(g) != self.dim or any(len(r) != self.dim for r in g):
                raise ValueError("metric shape does not match dimension")
            if any(g[i][j] != g[j][i] for i in range(self.dim) for j in range(self.dim)):
                raise ValueError("metric must be symmetric")
            m = sympy.Matrix(self.dim, self.dim, [sympy.Rational(x.numerator, x.denominator) for r in g for x in r])
            definite = (-m if self.negative else m).is_positive_definite if self.dim else True
            if not definite:
                kind = "negative" if self.negative else "positive"
                raise ValueError(f"metric is not {kind}-definite as flagged")
            object.__setattr__(self, "metric", g)

    @classmethod
    def standard(cls, dim: int, scalar_field: str = "real") -> "InnerProductSpace":
        return cls(dim, scalar_field=scalar_field)

    def pairing(self, v: Sequence, w: Sequence, exact: bool = True):
        """g(v, w); conjugate-linear in v over the complex field."""
        self._check_vec(v)
        self._check_vec(w)
        total = coerce(0, exact)
        for i, vi in enumerate(v):
            vi = coerce(vi, exact)
            if self.scalar_field == "complex":
                vi = conj_scalar(vi, exact)
            for j, wj in enumerate(w):
                gij = self.metric[i][j]
                if gij:
                    total = total + vi * coerce(gij, exact) * coerce(wj, exact)
        return total

    def basis(self, k: int) -> Tuple[int, ...]:
        return tuple(1 if i == k else 0 for i in range(self.dim))

    def _check_vec(self, v: Sequence):
        if len(v) != self.dim:
            raise ValueError(f"vector of length {len(v)} does not live in a {self.dim}-dimensional space")


@dataclass(frozen=True)
class GradedElement:
    """Element of the exterior algebra: {mask: coefficient}."""

    coefficients: Dict[int, object]
    ambient: InnerProductSpace
    exact: bool = True

    def __post_init__(self):
        top = (1 << self.ambient.dim) - 1
        clean = {}
        for m, c in self.coefficients.items():
            if not 0 <= m <= top:
                raise ValueError(f"mask {m:#b} exceeds the ambient dimension")
            c = coerce(c, self.exact)
            if c:
                clean[m] = c
        object.__setattr__(self, "coefficients", clean)

    @classmethod
    def basis(cls, ambient: InnerProductSpace, *indices: int, exact: bool = True) -> "GradedElement":
        """e_{i1} ∧ ... with 1-based indices (no indices gives the unit 1)."""
        el = cls({0: 1}, ambient, exact)
        for i in indices:
            el = wedge(el, cls({1 << (i - 1): 1}, ambient, exact))
        return el

    @property
    def degree(self) -> Optional[int]:
        degs = {popcount(m) for m in self.coefficients}
        return degs.pop() if len(degs) == 1 else None

    @property
    def parity(self) -> Optional[int]:
        pars = {popcount(m) & 1 for m in self.coefficients}
        return pars.pop() if len(pars) == 1 else None

    def __add__(self, other: "GradedElement") -> "GradedElement":
        _same_ambient(self, other)
        out = dict(self.coefficients)
        for m, c in other.coefficients.items():
            out[m] = out[m] + c if m in out else c
        return GradedElement(out, self.ambient, self.exact)

    def scale(self, s) -> "GradedElement":
        s = coerce(s, self.exact)
        return GradedElement({m: s * c for m, c in self.coefficients.items()}, self.ambient, self.exact)

    def __neg__(self) -> "GradedElement":
        return self.scale(-1)

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedElement)
            and self.ambient == other.ambient
            and not (self - other).coefficients
        )

    __hash__ = None

    def as_vector(self) -> Dict[int, object]:
        return dict(self.coefficients)

    def plain(self) -> Dict[int, object]:
        """Coefficients as Fractions (real) or complex numbers, for display and comparison."""
        return {m: to_plain(c) for m, c in self.coefficients.items()}


def _same_ambient(a: GradedElement, b: GradedElement):
    if a.ambient != b.ambient:
        raise ValueError("elements live in different exterior algebras")
    if a.exact != b.exact:
        raise ValueError("cannot mix exact and numeric elements")


def wedge(a: GradedElement, b: GradedElement) -> GradedElement:
    _same_ambient(a, b)
    out: Dict[int, object] = {}
    for ma, ca in a.coefficients.items():
        for mb, cb in b.coefficients.items():
            if ma & mb:
                continue
            term = ca * cb if _wedge_sign(ma, mb) > 0 else -(ca * cb)
            m = ma | mb
            out[m] = out[m] + term if m in out else term
    return GradedElement(out, a.ambient, a.exact)


def _covector(v: Sequence, space: InnerProductSpace, exact: bool):
    """Components g(v, e_i), the weights of the contraction by v."""
    space._check_vec(v)
    return [space.pairing(v, space.basis(i), exact) for i in range(space.dim)]


def _contract_mask(mask: int, weights) -> Dict[int, object]:
    out = {}
    below = 0
    for i in range(mask.bit_length()):
        if mask >> i & 1:
            w = weights[i]
            if w:
                out[mask ^ (1 << i)] = -w if below & 1 else w
            below += 1
    return out


def contract(v: Sequence, a: GradedElement, metric: Optional[InnerProductSpace] = None) -> GradedElement:
    """Interior product v⌟a, a degree -1 graded derivation.

    ``metric`` overrides the ambient metric (used for deformed metrics); it
    must have the ambient dimension.
    """
    space = metric or a.ambient
    if space.dim != a.ambient.dim:
        raise ValueError("metric dimension does not match the exterior algebra")
    weights = _covector(v, space, a.exact)
    out: Dict[int, object] = {}
    for m, c in a.coefficients.items():
        for m2, w in _contract_mask(m, weights).items():
            out[m2] = out[m2] + w * c if m2 in out else w * c
    return GradedElement(out, a.ambient, a.exact)


def _vector_element(v: Sequence, ambient: InnerProductSpace, exact: bool) -> GradedElement:
    ambient._check_vec(v)
    return GradedElement({1 << i: x for i, x in enumerate(v)}, ambient, exact)


def clifford_action(v: Sequence, a: GradedElement) -> GradedElement:
    """c(v) = v∧ − v⌟."""
    return wedge(_vector_element(v, a.ambient, a.exact), a) - contract(v, a)


def hermitian_action(v: Sequence, a: GradedElement) -> GradedElement:
    """h(v) = v∧ + v⌟."""
    return wedge(_vector_element(v, a.ambient, a.exact), a) + contract(v, a)


# operator forms ---------------------------------------------------------------


def wedge_op(space: InnerProductSpace, v: Sequence, exact: bool = True) -> Op:
    space._check_vec(v)
    n = 1 << space.dim
    comps = [(1 << i, coerce(x, exact)) for i, x in enumerate(v)]
    rows: Dict[int, Dict[int, object]] = {}
    for m in range(n):
        for bit, x in comps:
            if not x or m & bit:
                continue
            val = x if _wedge_sign(bit, m) > 0 else -x
            rows.setdefault(m | bit, {})[m] = val
    return Op((n, n), rows, exact)


def contract_op(space: InnerProductSpace, v: Sequence, exact: bool = True, metric: Optional[InnerProductSpace] = None) -> Op:
    g = metric or space
    weights = _covector(v, g, exact)
    n = 1 << space.dim
    rows: Dict[int, Dict[int, object]] = {}
    for m in range(n):
        for m2, w in _contract_mask(m, weights).items():
            rows.setdefault(m2, {})[m] = w
    return Op((n, n), rows, exact)


def clifford_op(space: InnerProductSpace, v: Sequence, exact: bool = True, metric=None) -> Op:
    return wedge_op(space, v, exact) - contract_op(space, v, exact, metric)


def hermitian_op(space: InnerProductSpace, v: Sequence, exact: bool = True, metric=None) -> Op:
    return wedge_op(space, v, exact) + contract_op(space, v, exact, metric)


def grading_op(dim: int, exact: bool = True) -> Op:
    return Op.diag([(-1) ** popcount(m) for m in range(1 << dim)], exact)


# modules ----------------------------------------------------------------------

OpFamily = Callable[[Sequence], Op]


@dataclass(frozen=True)
class CliffordModule:
    """Graded module with Clifford family c, Hermitian family h and symmetry τ.

    ``vector_space`` is the real parameter space of c and h.  ``degrees``
    lists the ℤ/2 degree of each basis vector; ``factors`` holds the atomic
    modules of a tensor product (a module is its own single factor).
    """

    dim: int
    vector_space: InnerProductSpace
    degrees: Tuple[int, ...]
    clifford: OpFamily
    hermitian: OpFamily
    tau: Optional[SemiLinear] = None
    exact: bool = True
    name: str = "module"
    factors: Tuple["CliffordModule", ...] = field(default=(), compare=False)

    @property
    def epsilon(self) -> Op:
        return Op.diag([(-1) ** d for d in self.degrees], self.exact)

    @property
    def atoms(self) -> Tuple["CliffordModule", ...]:
        return self.factors or (self,)

    def identity(self) -> Op:
        return Op.identity(self.dim, self.exact)

    def clifford_relations(self, v: Sequence, w: Sequence) -> Dict[str, bool]:
        """Exact (or tol-free numeric) checks of the Clifford relations at (v, w)."""
        I = self.identity()
        g = self.vector_space.pairing(v, w, self.exact)
        two_g = I.scale(2 * g)
        cv, cw, hv, hw = self.clifford(v), self.clifford(w), self.hermitian(v), self.hermitian(w)
        eps = self.epsilon
        return {
            "cc": (cv @ cw + cw @ cv).equals(-two_g),
            "hh": (hv @ hw + hw @ hv).equals(two_g),
            "ch": (cv @ hw + hw @ cv).is_zero(),
            "eps_c": (eps @ cv + cv @ eps).is_zero(),
            "eps_h": (eps @ hv + hv @ eps).is_zero(),
        }


def exterior_module(space: InnerProductSpace, exact: bool = True, tau: Optional[SemiLinear] = None, name: str = "Λ") -> CliffordModule:
    """Λ*V ⊗ ℂ with c = v∧ − v⌟ and h = v∧ + v⌟."""
    return CliffordModule(
        dim=1 << space.dim,
        vector_space=space,
        degrees=tuple(popcount(m) & 1 for m in range(1 << space.dim)),
        clifford=lambda v: clifford_op(space, v, exact),
        hermitian=lambda v: hermitian_op(space, v, exact),
        tau=tau,
        exact=exact,
        name=name,
    )


def trivial_module(exact: bool = True) -> CliffordModule:
    zero = InnerProductSpace(0)
    return CliffordModule(
        dim=1,
        vector_space=zero,
        degrees=(0,),
        clifford=lambda v: Op.zeros(1, exact=exact),
        hermitian=lambda v: Op.zeros(1, exact=exact),
        tau=SemiLinear(Op.identity(1, exact), True),
        exact=exact,
        name="1",
    )


def _direct_sum_space(a: InnerProductSpace, b: InnerProductSpace) -> InnerProductSpace:
    n = a.dim + b.dim
    g = [[Fraction(0)] * n for _ in range(n)]
    for i in range(a.dim):
        for j in range(a.dim):
            g[i][j] = a.metric[i][j]
    for i in range(b.dim):
        for j in range(b.dim):
            g[a.dim + i][a.dim + j] = b.metric[i][j]
    return InnerProductSpace(n, tuple(map(tuple, g)) if n else (), "real")


def graded_tensor(m1: CliffordModule, m2: CliffordModule) -> CliffordModule:
    """c = c₁⊗1 + ε₁⊗c₂, h = h₁⊗1 + ε₁⊗h₂, τ = τ₁⊗τ₂, ε = ε₁⊗ε₂."""
    if m1.exact != m2.exact:
        raise ValueError("cannot mix exact and numeric modules")
    exact = m1.exact
    d1 = m1.vector_space.dim
    I1, I2, e1 = m1.identity(), m2.identity(), m1.epsilon

    def split(v):
        if len(v) != d1 + m2.vector_space.dim:
            raise ValueError("vector does not live in the direct-sum parameter space")
        return v[:d1], v[d1:]

    def cliff(v):
        a, b = split(v)
        return m1.clifford(a).kron(I2) + e1.kron(m2.clifford(b))

    def herm(v):
        a, b = split(v)
        return m1.hermitian(a).kron(I2) + e1.kron(m2.hermitian(b))

    tau = m1.tau.kron(m2.tau) if (m1.tau is not None and m2.tau is not None) else None
    degrees = tuple((x + y) & 1 for x in m1.degrees for y in m2.degrees)
    return CliffordModule(
        dim=m1.dim * m2.dim,
        vector_space=_direct_sum_space(m1.vector_space, m2.vector_space),
        degrees=degrees,
        clifford=cliff,
        hermitian=herm,
        tau=tau,
        exact=exact,
        name=f"({m1.name}⊗{m2.name})",
        factors=m1.atoms + m2.atoms,
    )


def _tensor_all(mods: Sequence[CliffordModule]) -> CliffordModule:
    out = mods[0]
    for m in mods[1:]:
        out = graded_tensor(out, m)
    return out


def _check_perm(perm: Sequence[int], k: int) -> Tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(k)):
        raise ValueError(f"{perm} is not a permutation of {k} factors")
    return perm


def _digits(index: int, dims: Sequence[int]) -> Tuple[int, ...]:
    out = []
    for d in reversed(dims):
        index, r = divmod(index, d)
        out.append(r)
    return tuple(reversed(out))


def _undigits(digits: Sequence[int], dims: Sequence[int]) -> int:
    index = 0
    for x, d in zip(digits, dims):
        index = index * d + x
    return index


def permutation_op(m: CliffordModule, permutation: Sequence[int]) -> Op:
    """Unsigned regrouping x₁⊗…⊗x_k ↦ x_{π(1)}⊗…⊗x_{π(k)}; new slot p holds old factor π(p)."""
    atoms = m.atoms
    perm = _check_perm(permutation, len(atoms))
    dims = [a.dim for a in atoms]
    new_dims = [dims[p] for p in perm]
    rows = {}
    for idx in range(m.dim):
        dig = _digits(idx, dims)
        rows[_undigits([dig[p] for p in perm], new_dims)] = {idx: 1}
    return Op((m.dim, m.dim), rows, m.exact)


def reorder_operator(m: CliffordModule, permutation: Sequence[int]) -> Op:
    """Koszul sign operator G on the original basis.

    G is diagonal with entry ∏(−1)^{|x_a||x_b|} over the factor pairs whose
    order the permutation reverses, so that G·c·G⁻¹ equals the operator
    assembled in permuted order and pulled back by the unsigned regrouping.
    """
    atoms = m.atoms
    perm = _check_perm(permutation, len(atoms))
    dims = [a.dim for a in atoms]
    inversions = [(perm[p], perm[q]) for p, q in combinations(range(len(perm)), 2) if perm[p] > perm[q]]
    signs = []
    for idx in range(m.dim):
        dig = _digits(idx, dims)
        deg = [atoms[f].degrees[dig[f]] for f in range(len(atoms))]
        s = sum(deg[a] * deg[b] for a, b in inversions)
        signs.append(-1 if s & 1 else 1)
    return Op.diag(signs, m.exact)


def permuted_module(m: CliffordModule, permutation: Sequence[int]) -> CliffordModule:
    """Module assembled in permuted factor order, pulled back to the original basis.

    The parameter vector keeps the original factor order.
    """
    atoms = m.atoms
    perm = _check_perm(permutation, len(atoms))
    other = _tensor_all([atoms[p] for p in perm])
    P = permutation_op(m, perm)
    Pinv = P.T
    offsets, acc = [], 0
    for a in atoms:
        offsets.append(acc)
        acc += a.vector_space.dim

    def reorder_vec(v):
        return tuple(x for p in perm for x in v[offsets[p] : offsets[p] + atoms[p].vector_space.dim])

    tau = None
    if other.tau is not None:
        tau = SemiLinear(Pinv @ other.tau.mat @ P, other.tau.anti)
    return CliffordModule(
        dim=m.dim,
        vector_space=m.vector_space,
        degrees=m.degrees,
        clifford=lambda v: Pinv @ other.clifford(reorder_vec(v)) @ P,
        hermitian=lambda v: Pinv @ other.hermitian(reorder_vec(v)) @ P,
        tau=tau,
        exact=m.exact,
        name=f"perm{perm}{m.name}",
        factors=(),
    )
