"""The two spinor models of Cl(V_ℍ ⊕ V_ℍ⁻) and the intertwiner between them.

S₀ = Λ_ℂV ⊗ Λ_ℂV treats V_ℍ as ℂ²ⁿ through right multiplication by i, with
complex basis f_{2l} = e_l, f_{2l+1} = e_l·j.  A real vector
a·e + b·ei + c·ej + d·ek has complex coordinates (a + bi, c − di), and right
multiplication by j becomes the anti-linear map (z₁, z₂) ↦ (−z̄₂, z̄₁).

S₁ = Λ_ℝV ⊗ ℂ uses the real basis (e_l, e_l i, e_l j, e_l k).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from .exterior import (
    CliffordModule,
    GradedElement,
    InnerProductSpace,
    clifford_op,
    hermitian_op,
    popcount,
    wedge,
    _wedge_sign,
)
from .linops import Op, SemiLinear, coerce, to_complex
from .quat import right_mult_matrix

__all__ = [
    "QuaternionicSpace",
    "build_s0",
    "build_s1",
    "Intertwiner",
    "canonical_intertwiner",
    "vacuum_s1",
    "verify_intertwiner",
    "intertwiner_space_dim",
    "direct_sum_compatibility",
    "exterior_power_op",
]


@dataclass(frozen=True)
class QuaternionicSpace:
    """ℍⁿ as a right ℍ-module with the standard Pin(2)-invariant metric."""

    quat_dim: int

    def __post_init__(self):
        if self.quat_dim < 0:
            raise ValueError("quaternionic dimension must be non-negative")

    @property
    def real_dim(self) -> int:
        return 4 * self.quat_dim

    @property
    def complex_dim(self) -> int:
        return 2 * self.quat_dim

    @property
    def real_space(self) -> InnerProductSpace:
        return InnerProductSpace.standard(self.real_dim)

    @property
    def complex_space(self) -> InnerProductSpace:
        return InnerProductSpace(self.complex_dim, scalar_field="complex")

    def R(self, unit: str) -> np.ndarray:
        q = {"i": (0, 1, 0, 0), "j": (0, 0, 1, 0), "k": (0, 0, 0, 1)}[unit]
        return right_mult_matrix(q, self.quat_dim).astype(int)

    def times(self, v: Sequence, unit: str) -> tuple:
        """v·unit for a real coordinate vector (exact for integer/Fraction input)."""
        R = self.R(unit)
        return tuple(sum(int(R[a, b]) * v[b] for b in range(self.real_dim) if R[a, b]) for a in range(self.real_dim))

    def complex_coords(self, v: Sequence, exact: bool = True) -> tuple:
        out = []
        for l in range(self.quat_dim):
            a, b, c, d = v[4 * l : 4 * l + 4]
            if exact:
                out += [coerce((a, b), True), coerce((c, -d), True)]
            else:
                out += [complex(a, b), complex(c, -d)]
        return tuple(out)

    def complex_basis_real(self, m: int) -> tuple:
        """Real coordinates of the complex basis vector f_m."""
        l, r = divmod(m, 2)
        return tuple(1 if idx == 4 * l + 2 * r else 0 for idx in range(self.real_dim))

    def j_complex_matrix(self) -> np.ndarray:
        """J with (v·j) ↔ J·conj(z)."""
        return np.kron(np.eye(self.quat_dim, dtype=int), np.array([[0, -1], [1, 0]]))


def exterior_power_op(A: np.ndarray, exact: bool = True) -> Op:
    """Λ(A): e_I ↦ ∧_{i∈I} A e_i."""
    A = np.asarray(A)
    d = A.shape[0]
    cols = [{r: A[r, c].item() for r in range(d) if A[r, c] != 0} for c in range(d)]
    rows: Dict[int, Dict[int, object]] = {}
    for mask in range(1 << d):
        acc = {0: coerce(1, exact)}
        for c in range(d):
            if not mask >> c & 1:
                continue
            nxt: Dict[int, object] = {}
            for m, x in acc.items():
                for r, a in cols[c].items():
                    bit = 1 << r
                    if m & bit:
                        continue
                    term = x * coerce(a, exact)
                    if _wedge_sign(m, bit) < 0:
                        term = -term
                    key = m | bit
                    nxt[key] = nxt[key] + term if key in nxt else term
            acc = {m: x for m, x in nxt.items() if x}
        for m, x in acc.items():
            rows.setdefault(m, {})[mask] = x
    return Op((1 << d, 1 << d), rows, exact)


def _j_on_complex_exterior(V: QuaternionicSpace, exact: bool) -> SemiLinear:
    return SemiLinear(exterior_power_op(V.j_complex_matrix(), exact), True)


def build_s0(V: QuaternionicSpace, exact: bool = True, tau_convention: str = "graded") -> CliffordModule:
    """S₀ with c₀(v) = ε⊗c(v), h₀(v) = i·c(v)⊗1.

    ``tau_convention="graded"`` (default) uses τ₀ = (ε∘j)⊗j, which satisfies
    both compatibility squares.  ``"literal"`` gives j⊗j; it satisfies the
    c-square but anticommutes in the h-square because τ₀ is anti-linear and
    h₀ carries a factor i.
    """
    Vc = V.complex_space
    d = V.complex_dim
    size = 1 << d
    I = Op.identity(size, exact)
    eps = Op.diag([(-1) ** popcount(m) for m in range(size)], exact)
    i_unit = coerce((0, 1), exact) if exact else 1j

    def c(v):
        return eps.kron(clifford_op(Vc, V.complex_coords(v, exact), exact))

    def h(v):
        return clifford_op(Vc, V.complex_coords(v, exact), exact).scale(i_unit).kron(I)

    j = _j_on_complex_exterior(V, exact)
    if tau_convention == "graded":
        first = eps @ j.mat
    elif tau_convention == "literal":
        first = j.mat
    else:
        raise ValueError("tau_convention must be 'graded' or 'literal'")
    tau = SemiLinear(first.kron(j.mat), True)
    return CliffordModule(
        dim=size * size,
        vector_space=V.real_space,
        degrees=tuple((popcount(a) + popcount(b)) & 1 for a in range(size) for b in range(size)),
        clifford=c,
        hermitian=h,
        tau=tau,
        exact=exact,
        name=f"S0(H^{V.quat_dim})",
    )


def build_s1(V: QuaternionicSpace, exact: bool = True) -> CliffordModule:
    """S₁ with c₁ = v∧ − v⌟, h₁ = v∧ + v⌟, τ₁(ω⊗z) = (ω·j)⊗z̄."""
    Vr = V.real_space
    tau = SemiLinear(exterior_power_op(V.R("j"), exact), True)
    return CliffordModule(
        dim=1 << V.real_dim,
        vector_space=Vr,
        degrees=tuple(popcount(m) & 1 for m in range(1 << V.real_dim)),
        clifford=lambda v: clifford_op(Vr, v, exact),
        hermitian=lambda v: hermitian_op(Vr, v, exact),
        tau=tau,
        exact=exact,
        name=f"S1(H^{V.quat_dim})",
    )


def vacuum_s1(V: QuaternionicSpace, basis: Optional[np.ndarray] = None, exact: Optional[bool] = None) -> GradedElement:
    """∧_l (e_l⊗1 + e_l i⊗i) ∧ (e_l j⊗1 + e_l j i⊗i) for a quaternionic basis.

    ``basis`` has shape (n, n, 4): row l holds the quaternion components of e_l.
    """
    n = V.quat_dim
    if basis is None:
        basis = np.zeros((n, n, 4), dtype=int)
        for l in range(n):
            basis[l, l, 0] = 1
    basis = np.asarray(basis)
    if exact is None:
        exact = np.issubdtype(basis.dtype, np.integer)
    Vr = V.real_space
    i_unit = coerce((0, 1), exact) if exact else 1j
    out = GradedElement({0: 1}, Vr, exact)

    def as_element(vec, coeff):
        return GradedElement({1 << a: coeff * coerce(x, exact) for a, x in enumerate(vec) if x}, Vr, exact)

    for l in range(n):
        e = tuple(basis[l].reshape(-1).tolist())
        ei = V.times(e, "i")
        ej = V.times(e, "j")
        eji = V.times(ej, "i")
        one = coerce(1, exact)
        out = wedge(out, as_element(e, one) + as_element(ei, i_unit))
        out = wedge(out, as_element(ej, one) + as_element(eji, i_unit))
    return out


@dataclass(frozen=True)
class Intertwiner:
    F: Op
    s0: CliffordModule
    s1: CliffordModule
    vacuum: GradedElement
    space: QuaternionicSpace
    basis: Optional[np.ndarray] = field(default=None, compare=False)


def _creators(module: CliffordModule, V: QuaternionicSpace, m: int, exact: bool):
    """First- and second-factor creation operators for f_m, built from c and h alone.

    K = (−i·h(v) − h(v·i))/2 creates in the first factor, C = (c(v) − i·c(v·i))/2 in the second.
    """
    v = V.complex_basis_real(m)
    vi = V.times(v, "i")
    i_unit = coerce((0, 1), exact) if exact else 1j
    half = coerce((0.5, 0), exact) if exact else 0.5
    K = (module.hermitian(v).scale(-i_unit) - module.hermitian(vi)).scale(half)
    C = (module.clifford(v) - module.clifford(vi).scale(i_unit)).scale(half)
    return K, C


def canonical_intertwiner(
    V: QuaternionicSpace,
    basis: Optional[np.ndarray] = None,
    exact: Optional[bool] = None,
    tau_convention: str = "graded",
) -> Intertwiner:
    """F: S₀ → S₁ sending 1⊗1 to the vacuum built from ``basis``.

    Column f_I⊗f_J is K¹_I C¹_J Ω₁, mirroring f_I⊗f_J = K⁰_I C⁰_J (1⊗1).
    """
    if exact is None:
        exact = basis is None or np.issubdtype(np.asarray(basis).dtype, np.integer)
    s0 = build_s0(V, exact, tau_convention)
    s1 = build_s1(V, exact)
    omega = vacuum_s1(V, basis, exact)
    d = V.complex_dim
    creators = [_creators(s1, V, m, exact) for m in range(d)]
    size = 1 << d
    rows: Dict[int, Dict[int, object]] = {}
    for I in range(size):
        for Jm in range(size):
            vec = omega.as_vector()
            for m in reversed([b for b in range(d) if Jm >> b & 1]):
                vec = creators[m][1].apply(vec)
            for m in reversed([b for b in range(d) if I >> b & 1]):
                vec = creators[m][0].apply(vec)
            col = I * size + Jm
            for r, x in vec.items():
                rows.setdefault(r, {})[col] = x
    F = Op((s1.dim, s0.dim), rows, exact)
    return Intertwiner(F, s0, s1, omega, V, basis)


def verify_intertwiner(itw: Intertwiner, tol: float = 0.0) -> Dict[str, object]:
    """Residuals of F c₀ = c₁ F, F h₀ = h₁ F, F τ₀ = τ₁ F and grading preservation."""
    F, s0, s1, V = itw.F, itw.s0, itw.s1, itw.space
    res = {"c": 0.0, "h": 0.0}
    for a in range(V.real_dim):
        v = V.real_space.basis(a)
        res["c"] = max(res["c"], (F @ s0.clifford(v) - s1.clifford(v) @ F).max_abs())
        res["h"] = max(res["h"], (F @ s0.hermitian(v) - s1.hermitian(v) @ F).max_abs())
    res["tau"] = (F @ s0.tau.mat - s1.tau.mat @ F.conj()).max_abs()
    res["grading"] = (s1.epsilon @ F - F @ s0.epsilon).max_abs()
    gram = F.H @ F
    norm_sq = sum(abs(to_complex(x)) ** 2 for x in itw.vacuum.coefficients.values())
    scalar = round(norm_sq) if s0.exact else norm_sq
    res["gram_minus_scalar"] = (gram - Op.identity(s0.dim, s0.exact).scale(scalar)).max_abs()
    res["vacuum_norm_sq"] = norm_sq
    res["ok"] = all(res[k] <= tol for k in ("c", "h", "tau", "grading"))
    return res


def intertwiner_space_dim(V: QuaternionicSpace, tol: float = 1e-9) -> int:
    """dim of {X : X c₀(v) = c₁(v) X, X h₀(v) = h₁(v) X for all v} (numeric)."""
    s0, s1 = build_s0(V, exact=False), build_s1(V, exact=False)
    n0, n1 = s0.dim, s1.dim
    blocks = []
    for a in range(V.real_dim):
        v = V.real_space.basis(a)
        for A, B in ((s0.clifford(v), s1.clifford(v)), (s0.hermitian(v), s1.hermitian(v))):
            A, B = A.to_numpy(), B.to_numpy()
            # row-major vec(X A − B X) = (I ⊗ Aᵀ − B ⊗ I) vec(X)
            blocks.append(np.kron(np.eye(n1), A.T) - np.kron(B, np.eye(n0)))
    M = np.vstack(blocks)
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s < tol * max(1.0, s[0])))


# direct sums --------------------------------------------------------------------


def _split_s1(dv: int, dw: int, exact: bool) -> Op:
    """Λ(V⊕W) → ΛV⊗ΛW, e_I∧e'_J ↦ e_I⊗e'_J (no sign: V-indices come first)."""
    rows = {}
    for I in range(1 << dv):
        for Jm in range(1 << dw):
            rows[I * (1 << dw) + Jm] = {I | (Jm << dv): 1}
    n = 1 << (dv + dw)
    return Op((n, n), rows, exact)


def _split_s0(cv: int, cw: int, exact: bool) -> Op:
    """(ΛV⊗ΛW)⊗(ΛV⊗ΛW) → (ΛV⊗ΛV)⊗(ΛW⊗ΛW) with Koszul sign (−1)^{|b||c|}."""
    nv, nw = 1 << cv, 1 << cw
    whole = 1 << (cv + cw)
    rows = {}
    for a in range(nv):
        for b in range(nw):
            for c in range(nv):
                for d in range(nw):
                    src = (a | (b << cv)) * whole + (c | (d << cv))
                    dst = ((a * nv + c) * nw + b) * nw + d
                    sign = -1 if (popcount(b) * popcount(c)) & 1 else 1
                    rows[dst] = {src: sign}
    return Op((whole * whole, whole * whole), rows, exact)


def direct_sum_compatibility(V: QuaternionicSpace, W: QuaternionicSpace, exact: bool = True) -> Dict[str, object]:
    """Check S_k^{V⊕W} ≅ S_k^V ⊗ S_k^W on c, h, τ and F^{V⊕W} = F^V ⊗ F^W."""
    total = V.real_dim + W.real_dim
    if total > 12:
        raise ValueError(f"total real dimension {total} exceeds the cap of 12")
    VW = QuaternionicSpace(V.quat_dim + W.quat_dim)
    report: Dict[str, object] = {"real_dim": total}
    if W.quat_dim == 0 or V.quat_dim == 0:
        report.update(c=True, h=True, tau=True, F=True, trivial=True)
        return report
    Fv = canonical_intertwiner(V, exact=exact)
    Fw = canonical_intertwiner(W, exact=exact)
    Fvw = canonical_intertwiner(VW, exact=exact)
    phi = {
        0: _split_s0(V.complex_dim, W.complex_dim, exact),
        1: _split_s1(V.real_dim, W.real_dim, exact),
    }
    mods = {0: (Fvw.s0, Fv.s0, Fw.s0), 1: (Fvw.s1, Fv.s1, Fw.s1)}
    ok = {"c": True, "h": True, "tau": True}
    for k, (big, a, b) in mods.items():
        P = phi[k]
        Pinv = P.T
        Ia, Ib = a.identity(), b.identity()
        for idx in range(total):
            vec = tuple(1 if t == idx else 0 for t in range(total))
            va, vb = vec[: V.real_dim], vec[V.real_dim :]
            for key, fam in (("c", "clifford"), ("h", "hermitian")):
                lhs = P @ getattr(big, fam)(vec) @ Pinv
                rhs = getattr(a, fam)(va).kron(Ib) + a.epsilon.kron(getattr(b, fam)(vb))
                ok[key] &= lhs.equals(rhs)
        ok["tau"] &= (P @ big.tau.mat @ Pinv).equals(a.tau.mat.kron(b.tau.mat))
    report.update(ok)
    report["F"] = (phi[1] @ Fvw.F @ phi[0].T).equals(Fv.F.kron(Fw.F))
    report["trivial"] = False
    return report
