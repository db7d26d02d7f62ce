"""Finite-dimensional models of the Seiberg–Witten map over a point.

A model is (E, V_ℍ ⊕ V_ℝ, W_ℍ ⊕ W_ℝ, i, D, F).  Quaternionic vectors are
(n, 4) arrays acted on by Pin(2) = U(1) ∪ j·U(1) from the right; real
spaces (E included) see Pin(2) through the sign g ↦ ±1.

The families invariant c(𝓕) ∈ H²(S(E)) = ℤ is computed in two independent
ways: symbolically, as the ω-coefficient of the index integrand in
ℚ[ω, x]/(ω², x^{m+1}), and numerically, as a signed count of zeros of the
reparametrized map over S(E) × (hyperplane in ℂPᵐ) × (−1, 1) × B(V_ℝ).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import sympy
from scipy.optimize import root

from .cutoffs import squeeze
from .quat import qconj, qmul
from .torsor import from_quaternion, to_quaternion

__all__ = [
    "DegreeError",
    "FdaModel",
    "sw_toy",
    "linear_toy",
    "load_fda_model",
    "stabilize",
    "pin2_element",
    "check_axioms",
    "split_VW",
    "reparametrize_F",
    "CohomologyRing",
    "DegreeData",
    "index_integrand_degree2",
    "direct_degree2",
    "families_degree",
    "mapping_degree",
    "hk3_conditions",
]

I_UNIT = np.array([0.0, 1.0, 0.0, 0.0])


class DegreeError(RuntimeError):
    """A degree or zero count could not be certified."""


def pin2_element(theta: float, coset: int = 0) -> np.ndarray:
    """e^{iθ} (coset 0) or j·e^{iθ} (coset 1) as a unit quaternion."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([c, s, 0.0, 0.0]) if coset == 0 else np.array([0.0, 0.0, c, -s])


def _sign(g) -> float:
    return 1.0 if abs(g[2]) + abs(g[3]) < 1e-12 else -1.0


def _mu(v) -> np.ndarray:
    """Σ v_k i v̄_k, read in ℝ³ through the (i, j, k) coordinates."""
    v = np.asarray(v, dtype=float).reshape(-1, 4)
    return qmul(qmul(v, I_UNIT), qconj(v)).sum(axis=0)[1:]


def _left_apply(M, v) -> np.ndarray:
    """(M v)_k = Σ_l M_kl v_l for a quaternion matrix M of shape (a, n, 4)."""
    M = np.asarray(M, dtype=float)
    if M.shape[0] == 0:
        return np.zeros((0, 4))
    return qmul(M, np.asarray(v, dtype=float)[None, :, :]).sum(axis=1)


@dataclass
class FdaModel:
    """One fiber of a model of FDA.

    ``F(e, v_H, v_R) -> (w_H, w_R)`` with v_H of shape (n, 4) and w_H of
    shape (a, 4).  ``actions`` may override how j acts on a factor; this is
    only useful for building deliberately broken models.
    """

    E_dim: int
    n: int
    r: int
    a: int
    i_map: np.ndarray
    D_R: np.ndarray
    D_H: np.ndarray
    F: Callable
    orientation: Optional[int] = 1
    name: str = "custom"
    actions: Dict[str, Callable] = field(default_factory=dict)
    spec: Optional[dict] = None

    def __post_init__(self):
        self.i_map = np.asarray(self.i_map, dtype=float).reshape(-1, self.E_dim)
        self.D_R = np.asarray(self.D_R, dtype=float).reshape(len(self.i_map), self.r)
        self.D_H = np.asarray(self.D_H, dtype=float).reshape(self.a, self.n, 4)

    @property
    def w(self) -> int:
        return self.i_map.shape[0]

    @property
    def m(self) -> int:
        """Complex dimension of P(V_ℍ)."""
        return 2 * self.n - 1

    def act(self, factor: str, g, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if factor in self.actions and _sign(g) < 0:
            # the override replaces j; the U(1) part still acts normally
            jg = qmul(qconj(np.array([0.0, 0.0, 1.0, 0.0])), g)
            return self._act_standard(factor, jg, self.actions[factor](x))
        return self._act_standard(factor, g, x)

    def _act_standard(self, factor, g, x):
        if factor in ("V_H", "W_H"):
            return qmul(x.reshape(-1, 4), np.asarray(g)).reshape(x.shape)
        return _sign(g) * x

    def D(self, vH, vR) -> Tuple[np.ndarray, np.ndarray]:
        return _left_apply(self.D_H, vH), self.D_R @ np.asarray(vR, dtype=float)

    def w_frame(self) -> np.ndarray:
        """Oriented basis of W_ℝ: i of the oriented E basis, then D_ℝ of the standard V_ℝ basis."""
        P = np.eye(self.E_dim)
        if self.orientation == -1 and self.E_dim:
            P[:, 0] *= -1
        return np.hstack([self.i_map @ P, self.D_R])

    def to_json(self) -> dict:
        if self.spec is None:
            raise ValueError("model has a custom F and cannot be serialized")
        return self.spec


# builders ----------------------------------------------------------------------------


def _blocks(n, r, a):
    w = 3 + r
    i_map = np.vstack([np.eye(3), np.zeros((r, 3))])
    D_R = np.vstack([np.zeros((3, r)), np.eye(r)])
    D_H = np.zeros((a, n, 4))
    for k in range(min(a, n)):
        D_H[k, k, 0] = 1.0
    return w, i_map, D_R, D_H


def _sw_F(i_map, D_R, D_H, potential, kappa):
    def F(e, vH, vR):
        vH = np.asarray(vH, dtype=float).reshape(-1, 4)
        vR = np.asarray(vR, dtype=float)
        wH = _left_apply(D_H, vH)
        if len(wH) and len(vR) and kappa:
            # a·φ-type coupling: v_R[0] · v_{k+1} · i lands in row k
            shifted = np.zeros_like(wH)
            upto = min(len(wH), len(vH) - 1)
            shifted[:upto] = qmul(vH[1 : upto + 1], I_UNIT)
            wH = wH + kappa * vR[0] * shifted
        norm2 = float((vH**2).sum())
        wR = D_R @ vR + i_map @ (_mu(vH) - potential(norm2) * np.asarray(e, dtype=float))
        return wH, wR

    return F


def sw_toy(n: int = 1, r: int = 1, a: Optional[int] = None, delta: float = 0.25, kappa: float = 0.5, polynomial=None) -> FdaModel:
    """F = D + Q − δ·i(e) with Q(v_H, v_R) = (κ v_R v i, i(μ(v_H))).

    The quaternionic index n − a should be 1 for c(𝓕) to land in H²(S(E)).
    Zeros sit at v_R = 0, |v_H|² = δ, e = μ(v_H)/δ.  ``polynomial`` replaces
    the constant δ by p(|v_H|²).
    """
    a = n - 1 if a is None else a
    if not 0 < delta < 1 and polynomial is None:
        raise ValueError("delta must lie in (0, 1) to keep zeros off the boundary")
    coeffs = [delta] if polynomial is None else [float(c) for c in polynomial]
    w, i_map, D_R, D_H = _blocks(n, r, a)
    potential = np.polynomial.Polynomial(coeffs)
    spec = {
        "dims": {"E": 3, "V_H": n, "V_R": r, "W_H": a},
        "nonlinearity": {"name": "polynomial", "coefficients": coeffs, "kappa": kappa},
    }
    if polynomial is None:
        spec["nonlinearity"] = {"name": "sw_quadratic", "delta": delta, "kappa": kappa}
    return FdaModel(3, n, r, a, i_map, D_R, D_H, _sw_F(i_map, D_R, D_H, potential, kappa), name="sw_toy", spec=spec)


def linear_toy(n: int = 1, r: int = 1, a: Optional[int] = None) -> FdaModel:
    """F = D.  Vanishes at v = 0, so the v_H = 0 condition fails there."""
    a = n - 1 if a is None else a
    w, i_map, D_R, D_H = _blocks(n, r, a)

    def F(e, vH, vR):
        return _left_apply(D_H, vH), D_R @ np.asarray(vR, dtype=float)

    spec = {"dims": {"E": 3, "V_H": n, "V_R": r, "W_H": a}, "nonlinearity": {"name": "linear"}}
    return FdaModel(3, n, r, a, i_map, D_R, D_H, F, name="linear", spec=spec)


def load_fda_model(source) -> FdaModel:
    """Model from a JSON file or dict: dims, optional matrices, a registry nonlinearity."""
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    try:
        dims = data["dims"]
        n, r, a = int(dims["V_H"]), int(dims["V_R"]), int(dims["W_H"])
        nl = data["nonlinearity"]
        name = nl["name"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"model file is missing field {exc}") from None
    if int(dims.get("E", 3)) != 3:
        raise ValueError("only rank-3 E is supported by the registry nonlinearities")
    if name == "linear":
        model = linear_toy(n, r, a)
    elif name == "sw_quadratic":
        model = sw_toy(n, r, a, delta=float(nl.get("delta", 0.25)), kappa=float(nl.get("kappa", 0.5)))
    elif name == "polynomial":
        model = sw_toy(n, r, a, kappa=float(nl.get("kappa", 0.5)), polynomial=nl["coefficients"])
    else:
        raise ValueError(f"unknown nonlinearity {name!r}")
    if "orientation" in data:
        model.orientation = data["orientation"]
    return model


def stabilize(model: FdaModel, k: int) -> FdaModel:
    """Direct sum with the identity ℝᵏ → ℝᵏ on both real parts."""
    r, w = model.r, model.w
    i_map = np.vstack([model.i_map, np.zeros((k, model.E_dim))])
    D_R = np.block([[model.D_R, np.zeros((w, k))], [np.zeros((k, r)), np.eye(k)]])
    base = model.F

    def F(e, vH, vR):
        vR = np.asarray(vR, dtype=float)
        wH, wR = base(e, vH, vR[:r])
        return wH, np.concatenate([wR, vR[r:]])

    spec = None
    if model.spec is not None:
        spec = json.loads(json.dumps(model.spec))
        spec["stabilization"] = spec.get("stabilization", 0) + k
    return FdaModel(
        model.E_dim, model.n, r + k, model.a, i_map, D_R, model.D_H, F,
        orientation=model.orientation, name=f"{model.name}+R{k}", actions=dict(model.actions), spec=spec,
    )


# axioms ------------------------------------------------------------------------------


def _random_point(rng, model, where="interior"):
    e = rng.standard_normal(model.E_dim)
    e /= np.linalg.norm(e)
    vH = rng.standard_normal((model.n, 4))
    vR = rng.standard_normal(model.r)
    vH *= rng.uniform(0, 1) / max(np.linalg.norm(vH), 1e-300)
    vR *= rng.uniform(0, 1) / max(np.linalg.norm(vR), 1e-300)
    if where == "sphere_H":
        vH /= np.linalg.norm(vH)
    elif where == "sphere_R" and model.r:
        vR /= np.linalg.norm(vR)
    elif where == "slice":
        vH = np.zeros_like(vH)
    return e, vH, vR


def _pin2_samples(count: int) -> List[np.ndarray]:
    thetas = 2 * np.pi * np.arange(count) / count
    return [pin2_element(t, c) for c in (0, 1) for t in thetas]


def split_VW(E_dim: int, i_map, D_R, tol: float = 1e-12) -> dict:
    """Certify that i + D_ℝ : E ⊕ V_ℝ → W_ℝ is a metric-preserving isomorphism."""
    D_R = np.atleast_2d(np.asarray(D_R, dtype=float))
    i_map = np.asarray(i_map, dtype=float).reshape(len(D_R), E_dim)
    M = np.hstack([i_map, D_R])
    if M.shape[0] != M.shape[1] or (M.size and np.linalg.matrix_rank(M) < M.shape[0]):
        raise ValueError(f"i + D_R with shape {M.shape} is not an isomorphism")
    gram = M.T @ M - np.eye(M.shape[1])
    out = {"matrix": M, "ok": True, "gram_defect": float(np.abs(gram).max()) if gram.size else 0.0}
    if out["gram_defect"] > tol:
        idx = np.unravel_index(np.abs(gram).argmax(), gram.shape)
        out.update(ok=False, witness={"entry": [int(idx[0]), int(idx[1])], "value": float(gram[idx] + (idx[0] == idx[1]))})
    return out


def _finite(x) -> bool:
    return bool(np.all(np.isfinite(x)))


def check_axioms(model: FdaModel, samples: int = 200, seed: int = 0, tol: float = 1e-10, margin_floor: float = 1e-6) -> Dict[str, dict]:
    """Sampled check of the nine defining conditions, keyed "1" … "9"."""
    rng = np.random.default_rng(seed)
    group = _pin2_samples(8)
    rep: Dict[str, dict] = {}
    rep["1"] = {"ok": True, "base": "point"}
    rep["2"] = {"ok": model.E_dim >= 0, "rank": model.E_dim}

    shapes_ok = model.D_H.shape == (model.a, model.n, 4) and model.i_map.shape == (model.w, model.E_dim) and model.D_R.shape == (model.w, model.r)
    rep["3"] = {"ok": shapes_ok, "dims": {"V_H": model.n, "V_R": model.r, "W_H": model.a, "W_R": model.w}}

    worst, witness = 0.0, None
    for _ in range(max(samples // 10, 5)):
        e, vH, vR = _random_point(rng, model)
        wH, wR = model.F(e, vH, vR)
        for g in group:
            for factor, x in (("E", e), ("V_H", vH), ("V_R", vR), ("W_H", wH), ("W_R", wR)):
                d = abs(np.linalg.norm(model.act(factor, g, x)) - np.linalg.norm(x))
                if d > worst:
                    worst, witness = d, {"factor": factor, "g": g.tolist()}
    rep["4"] = {"ok": worst < tol, "residual": worst}
    if witness and worst >= tol:
        rep["4"]["witness"] = witness

    def equivariance(name, fn, factor_in, factor_out, dim_in):
        worst, wit = 0.0, None
        for _ in range(max(samples // 10, 5)):
            x = rng.standard_normal(dim_in)
            for g in group:
                d = float(np.abs(fn(model.act(factor_in, g, x)) - model.act(factor_out, g, fn(x))).max(initial=0.0))
                if d > worst:
                    worst, wit = d, {"g": g.tolist(), "x": x.tolist()}
        return worst, wit

    inj = model.E_dim == 0 or np.linalg.matrix_rank(model.i_map) == model.E_dim
    res, wit = equivariance("i", lambda x: model.i_map @ x, "E", "W_R", model.E_dim)
    rep["5"] = {"ok": inj and res < tol, "injective": bool(inj), "residual": res}
    if res >= tol:
        rep["5"]["witness"] = wit

    rR, witR = equivariance("D_R", lambda x: model.D_R @ x, "V_R", "W_R", model.r)
    rH, witH = equivariance("D_H", lambda x: _left_apply(model.D_H, x.reshape(-1, 4)).ravel(), "V_H", "W_H", 4 * model.n)
    rep["6"] = {"ok": max(rR, rH) < tol, "residual": max(rR, rH)}
    if max(rR, rH) >= tol:
        rep["6"]["witness"] = witR if rR >= rH else witH

    try:
        split = split_VW(model.E_dim, model.i_map, model.D_R)
        rep["7"] = {"ok": split["ok"], "gram_defect": split["gram_defect"]}
        if not split["ok"]:
            rep["7"]["witness"] = split["witness"]
    except ValueError as exc:
        rep["7"] = {"ok": False, "witness": str(exc)}

    worst, wit, finite = 0.0, None, True
    for _ in range(samples):
        e, vH, vR = _random_point(rng, model)
        wH, wR = model.F(e, vH, vR)
        finite &= _finite(wH) and _finite(wR) and np.shape(wH) == (model.a, 4) and np.shape(wR) == (model.w,)
        for g in group[::4]:
            gH, gR = model.F(model.act("E", g, e), model.act("V_H", g, vH), model.act("V_R", g, vR))
            d = max(float(np.abs(gH - model.act("W_H", g, wH)).max(initial=0.0)), float(np.abs(gR - model.act("W_R", g, wR)).max()))
            if d > worst:
                worst, wit = d, {"g": g.tolist(), "e": e.tolist(), "v_H": vH.tolist(), "v_R": vR.tolist()}
    rep["8"] = {"ok": bool(finite) and worst < tol, "equivariance_residual": worst}
    if worst >= tol:
        rep["8"]["witness"] = wit

    margin, wit = np.inf, None
    kinds = ["sphere_H", "slice"] + (["sphere_R"] if model.r else [])
    for kind in kinds:
        for _ in range(samples):
            e, vH, vR = _random_point(rng, model, kind)
            wH, wR = model.F(e, vH, vR)
            size = float(np.sqrt((np.asarray(wH) ** 2).sum() + (np.asarray(wR) ** 2).sum()))
            if size < margin:
                margin, wit = size, {"where": kind, "e": e.tolist(), "v_H": vH.tolist(), "v_R": vR.tolist()}
    # the slice contains v = 0 exactly; sample it explicitly
    e0 = np.eye(model.E_dim)[0] if model.E_dim else np.zeros(0)
    wH, wR = model.F(e0, np.zeros((model.n, 4)), np.zeros(model.r))
    size = float(np.sqrt((np.asarray(wH) ** 2).sum() + (np.asarray(wR) ** 2).sum()))
    if size < margin:
        margin, wit = size, {"where": "slice", "e": e0.tolist(), "v_H": 0, "v_R": 0}
    rep["9"] = {"ok": margin > margin_floor, "margin": margin}
    if margin <= margin_floor:
        rep["9"]["witness"] = wit
    return rep


# the reparametrized map --------------------------------------------------------------


def reparametrize_F(model: FdaModel, mode: str = "radial", extend: bool = False) -> Callable:
    """F′(e, u, t, v_R) with u ∈ S(V_ℍ) and t ∈ [−1, 1].

    ``radial`` puts s = (t+1)/2 on the quaternionic part, F(e, s·u, v_R), so
    t is the radius of V_ℍ in polar coordinates.  ``literal`` puts s on v_R
    instead, F(e, u, s·v_R); since |u| = 1 that map never vanishes and its
    zero count is always 0.  ``extend`` precomposes with the length cutoff so
    that F′ is defined for all t and v_R.
    """
    if mode not in ("radial", "literal"):
        raise ValueError(f"unknown mode {mode!r}")

    def Fp(e, u, t, vR):
        vR = np.asarray(vR, dtype=float)
        if extend:
            t = float(squeeze(np.array([t]))[0])
            vR = squeeze(vR)
        s = (t + 1.0) / 2.0
        u = np.asarray(u, dtype=float).reshape(-1, 4)
        if mode == "radial":
            return model.F(e, s * u, vR)
        return model.F(e, u, s * vR)

    return Fp


# the truncated cohomology ring -------------------------------------------------------


class CohomologyRing:
    """ℚ[ω, x]/(ω², x^{m+1}); elements are 2 × (m+1) tables of Fractions."""

    def __init__(self, m: int):
        if m < 0:
            raise ValueError("m must be non-negative")
        self.m = m

    def element(self, terms: Dict[Tuple[int, int], object]) -> "RingElement":
        c = [[Fraction(0)] * (self.m + 1) for _ in range(2)]
        for (p, q), v in terms.items():
            if p < 2 and q <= self.m:
                c[p][q] += Fraction(v)
        return RingElement(self, c)

    def one(self) -> "RingElement":
        return self.element({(0, 0): 1})

    def series(self, expr, var: str) -> "RingElement":
        """Taylor expansion of a sympy expression in x or ω, truncated by the relations."""
        sym = sympy.Symbol(var)
        order = self.m + 1 if var == "x" else 2
        poly = sympy.series(expr, sym, 0, order).removeO()
        coeffs = sympy.Poly(poly, sym).all_coeffs()[::-1] if poly != 0 else []
        terms = {}
        for k, c in enumerate(coeffs):
            c = sympy.Rational(c)
            key = (0, k) if var == "x" else (k, 0)
            terms[key] = Fraction(int(c.p), int(c.q))
        return self.element(terms)


@dataclass
class RingElement:
    ring: CohomologyRing
    coeffs: List[List[Fraction]]

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        p, q = key
        return self.coeffs[p][q] if p < 2 and q <= self.ring.m else Fraction(0)

    def _check(self, other):
        if self.ring.m != other.ring.m:
            raise ValueError("elements of different rings")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        return RingElement(self.ring, [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other) -> "RingElement":
        if not isinstance(other, RingElement):
            f = Fraction(other)
            return RingElement(self.ring, [[f * a for a in row] for row in self.coeffs])
        self._check(other)
        m = self.ring.m
        out = [[Fraction(0)] * (m + 1) for _ in range(2)]
        for p1 in range(2):
            for q1, a in enumerate(self.coeffs[p1]):
                if not a:
                    continue
                for p2 in range(2 - p1):
                    for q2 in range(m + 1 - q1):
                        b = other.coeffs[p2][q2]
                        if b:
                            out[p1 + p2][q1 + q2] += a * b
        return RingElement(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RingElement":
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, RingElement) and self.ring.m == other.ring.m and self.coeffs == other.coeffs

    def fiber_integral(self) -> Tuple[Fraction, Fraction]:
        """Coefficient of the top class xᵐ, split as (ω⁰ part, ω¹ part)."""
        return self.coeffs[0][self.ring.m], self.coeffs[1][self.ring.m]


@dataclass(frozen=True)
class DegreeData:
    """The pushed-forward class F*τ on S(E) × P(V_ℍ) as α·xᵐ + β·ω·xᵐ⁻¹."""

    beta: int
    alpha: int = 0

    def as_class(self, ring: CohomologyRing) -> RingElement:
        m = ring.m
        terms = {(0, m): self.alpha}
        if m >= 1:
            terms[(1, m - 1)] = self.beta
        elif self.beta:
            raise ValueError("β needs m ≥ 1")
        return ring.element(terms)


@lru_cache(maxsize=None)
def _factors_cached(m: int, n: int, a: int) -> RingElement:
    return _factors(CohomologyRing(m), n, a)


def _factors(ring: CohomologyRing, n: int, a: int) -> RingElement:
    x, w = sympy.Symbol("x"), sympy.Symbol("ω")
    out = ring.series((1 - sympy.exp(2 * w)) / (2 * w), "ω")
    out = out * ring.series((1 - sympy.exp(x)) / x, "x") ** (2 * a)
    out = out * ring.series(x / (sympy.exp(x / 2) - sympy.exp(-x / 2)), "x") ** (2 * n)
    return out * ring.series(1 - sympy.exp(x), "x")


def index_integrand_degree2(n: int, a: int, degree: DegreeData, ring: Optional[CohomologyRing] = None) -> int:
    """ω-coefficient of the fiber integral of the families index integrand.

    The exponents are complex dimensions, 2n and 2a.
    """
    if n < 1 or a < 0:
        raise ValueError("need n ≥ 1 and a ≥ 0")
    ring = CohomologyRing(2 * n - 1) if ring is None else ring
    if ring.m != 2 * n - 1:
        raise ValueError(f"ring truncates at x^{ring.m + 1} but n = {n} needs m = {2 * n - 1}")
    total = _factors_cached(ring.m, n, a) * degree.as_class(ring)
    _, c = total.fiber_integral()
    if c.denominator != 1:
        raise DegreeError(f"non-integral degree-2 coefficient {c}")
    return int(c)


def direct_degree2(n: int, degree: DegreeData) -> int:
    """ω-coefficient of ∫ x · F*τ over the projective fiber."""
    ring = CohomologyRing(2 * n - 1)
    _, c = (ring.element({(0, 1): 1}) * degree.as_class(ring)).fiber_integral()
    return int(c)


# signed zero counts ------------------------------------------------------------------


def _oriented_tangent(p: np.ndarray, rng=None) -> np.ndarray:
    """Columns T with det[p, T] > 0 spanning the tangent space of the sphere at p."""
    k1 = len(p)
    A = np.column_stack([p, np.eye(k1)[:, np.argsort(np.abs(p))[: k1 - 1]]])
    Q, _ = np.linalg.qr(A)
    Q[:, 0] *= np.sign(Q[:, 0] @ p)
    if np.linalg.det(Q) < 0:
        Q[:, -1] *= -1
    return Q[:, 1:]


def _fibonacci_sphere(count: int) -> np.ndarray:
    k = np.arange(count) + 0.5
    z = 1 - 2 * k / count
    phi = np.pi * (1 + 5**0.5) * k
    rho = np.sqrt(1 - z * z)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def _jacobian(fun, p, h=1e-6) -> np.ndarray:
    cols = []
    for k in range(len(p)):
        dp = np.zeros_like(p)
        dp[k] = h
        cols.append((fun(p + dp) - fun(p - dp)) / (2 * h))
    return np.column_stack(cols)


def _wH_coords(wH) -> np.ndarray:
    # complex coordinates (z, w) of each row, in the order Re z, Im z, Re w, Im w
    zw = from_quaternion(np.asarray(wH, dtype=float).reshape(-1, 4))
    return np.stack([zw[:, 0].real, zw[:, 0].imag, zw[:, 1].real, zw[:, 1].imag], axis=1).ravel()


def families_degree(model: FdaModel, part: str = "beta", mode: str = "radial", seed: int = 0, e_fixed=None, det_floor: float = 1e-8) -> dict:
    """Signed zero count of F′ giving one coefficient of F*τ.

    ``beta``: zeros over S(E) × H × (−1, 1) × B(V_ℝ) with H a generic
    hyperplane of P(V_ℍ); this is c(𝓕).  ``alpha``: zeros over
    {e} × P(V_ℍ) × (−1, 1) × B(V_ℝ).  Orientation: S(E) outward for the
    orientation of E, complex on the projective part, then t, then V_ℝ; the
    target W_ℝ is oriented by i + D_ℝ.
    """
    if model.E_dim != 3:
        raise ValueError("zero counting needs rank E = 3")
    if part not in ("beta", "alpha"):
        raise ValueError(f"unknown part {part!r}")
    rng = np.random.default_rng(seed)
    Fp = reparametrize_F(model, mode)
    orient = 1 if model.orientation in (1, None) else -1
    frame_inv = np.linalg.inv(model.w_frame())
    two_n = 2 * model.n

    # projective chart: u = normalize(b0 + Σ z_k b_k)
    U, _ = np.linalg.qr(rng.standard_normal((two_n, two_n)) + 1j * rng.standard_normal((two_n, two_n)))
    basis = U[:, : two_n - 1] if part == "beta" else U
    d = basis.shape[1] - 1
    e_free = part == "beta"
    if not e_free:
        e_fixed = _fibonacci_sphere(1)[0] if e_fixed is None else np.asarray(e_fixed, dtype=float) / np.linalg.norm(e_fixed)

    n_unknown = (2 if e_free else 0) + 2 * d + 1 + model.r
    n_eq = 4 * model.a + model.w
    if n_unknown != n_eq:
        raise ValueError(f"dimension mismatch: {n_unknown} unknowns against {n_eq} equations (need n − a = 1)")

    def unpack(p, e0, T):
        k = 0
        if e_free:
            e = e0 + T @ p[:2]
            e = e / np.linalg.norm(e)
            k = 2
        else:
            e = e_fixed
        z = p[k : k + 2 * d : 2] + 1j * p[k + 1 : k + 2 * d : 2]
        k += 2 * d
        u = basis[:, 0] + basis[:, 1:] @ z
        u = u / np.linalg.norm(u)
        t, vR = p[k], p[k + 1 :]
        return e, u, t, vR

    def residual(p, e0, T):
        e, u, t, vR = unpack(p, e0, T)
        wH, wR = Fp(e, to_quaternion(u.reshape(-1, 2)), t, vR)
        return np.concatenate([_wH_coords(wH), frame_inv @ wR])

    def frame(e0):
        T = _oriented_tangent(e0)
        return T if orient == 1 else T[:, ::-1]

    starts_e = _fibonacci_sphere(16) if e_free else [None]
    roots: List[dict] = []
    for e0 in starts_e:
        T = frame(e0) if e_free else None
        for t0 in (-0.6, 0.0, 0.6):
            for trial in range(2):
                p0 = np.zeros(n_unknown)
                p0[-1 - model.r] = t0
                if trial:
                    p0[(2 if e_free else 0) : (2 if e_free else 0) + 2 * d] = 0.5 * rng.standard_normal(2 * d)
                    if model.r:
                        p0[-model.r :] = 0.2 * rng.standard_normal(model.r)
                sol = root(residual, p0, args=(e0, T), method="hybr", options={"xtol": 1e-13})
                if not np.linalg.norm(residual(sol.x, e0, T)) < 1e-10:
                    continue
                e, u, t, vR = unpack(sol.x, e0, T)
                if not (-1 < t < 1 and np.linalg.norm(vR) < 1):
                    continue
                proj = np.outer(u, u.conj())
                if any(np.linalg.norm(e - q["e"]) < 1e-6 and np.abs(proj - q["proj"]).max() < 1e-6 and abs(t - q["t"]) < 1e-6 and np.linalg.norm(vR - q["v_R"]) < 1e-6 for q in roots):
                    continue
                # recentre the charts on the root before reading the sign
                ec, Tc = (e, frame(e)) if e_free else (None, None)
                pc = sol.x.copy()
                if e_free:
                    pc[:2] = 0.0
                det = float(np.linalg.det(_jacobian(lambda p: residual(p, ec, Tc), pc)))
                if abs(det) < det_floor:
                    raise DegreeError(f"degenerate zero at e={e}, t={t}: det {det:.3g}")
                roots.append({"e": e, "proj": proj, "t": float(t), "v_R": vR, "sign": int(np.sign(det)), "det": det})
    count = sum(q["sign"] for q in roots)
    return {"degree": int(count), "roots": [{"e": q["e"].tolist(), "t": q["t"], "v_R": q["v_R"].tolist(), "sign": q["sign"]} for q in roots]}


def mapping_degree(f: Callable, k: int, jac: Optional[Callable] = None, seed: int = 0, attempts: int = 5, n_starts: Optional[int] = None, det_floor: float = 1e-6) -> int:
    """Degree of a map Sᵏ → Sᵏ (k ≤ 3) as a signed preimage count.

    f takes and returns vectors in ℝ^{k+1}; the output is normalized.  Two
    independent regular values must give the same count.
    """
    if not 1 <= k <= 3:
        raise ValueError("k must be 1, 2 or 3")
    rng = np.random.default_rng(seed)
    n_starts = 60 * k * k if n_starts is None else n_starts
    fhat = lambda p: (lambda y: y / np.linalg.norm(y))(np.asarray(f(p), dtype=float))

    def count(y):
        Ty = _oriented_tangent(y)
        found, total = [], 0
        for _ in range(n_starts):
            p0 = rng.standard_normal(k + 1)
            p0 /= np.linalg.norm(p0)
            T0 = _oriented_tangent(p0)
            g = lambda xi, p0=p0, T0=T0: Ty.T @ fhat((p0 + T0 @ xi) / np.linalg.norm(p0 + T0 @ xi))
            sol = root(g, np.zeros(k), method="hybr", options={"xtol": 1e-13})
            p = (p0 + T0 @ sol.x) / np.linalg.norm(p0 + T0 @ sol.x)
            if np.linalg.norm(g(sol.x)) > 1e-10 or fhat(p) @ y < 0:
                continue
            if any(np.linalg.norm(p - q) < 1e-7 for q in found):
                continue
            Tp = _oriented_tangent(p)
            if jac is not None:
                J = Ty.T @ np.asarray(jac(p)) @ Tp
                # derivative of the normalization is tangent-projection at a preimage
                J = J / np.linalg.norm(f(p))
            else:
                J = _jacobian(lambda xi: Ty.T @ fhat((p + Tp @ xi) / np.linalg.norm(p + Tp @ xi)), np.zeros(k))
            det = np.linalg.det(J)
            if abs(det) < det_floor:
                return None
            found.append(p)
            total += int(np.sign(det))
        return total

    for _ in range(attempts):
        y1, y2 = rng.standard_normal((2, k + 1))
        c1 = count(y1 / np.linalg.norm(y1))
        c2 = count(y2 / np.linalg.norm(y2))
        if c1 is not None and c1 == c2:
            return c1
    raise DegreeError(f"no consistent regular value after {attempts} attempts")


# the three extra conditions ----------------------------------------------------------


def hk3_conditions(model: FdaModel, seed: int = 0, samples: int = 200) -> dict:
    """Rank 3, an orientation, and c(𝓕) = +1 with cross-checks."""
    axioms = check_axioms(model, samples=samples, seed=seed)
    rep: Dict[str, object] = {"axioms_ok": all(v["ok"] for v in axioms.values())}
    rep["1"] = {"ok": model.E_dim == 3, "rank": model.E_dim}
    rep["2"] = {"ok": model.orientation in (1, -1), "orientation": model.orientation}
    if not (rep["1"]["ok"] and rep["2"]["ok"] and rep["axioms_ok"]):
        rep["3"] = {"ok": False, "reason": "earlier conditions fail"}
        rep["ok"] = False
        return rep
    beta = families_degree(model, "beta", seed=seed)
    alpha = families_degree(model, "alpha", seed=seed)
    data = DegreeData(beta["degree"], alpha["degree"])
    c = index_integrand_degree2(model.n, model.a, data)
    direct = direct_degree2(model.n, data)
    if c != direct:
        raise DegreeError(f"integrand gives {c} but ∫x·F*τ gives {direct}")
    rep["3"] = {"ok": c == 1, "c": c, "direct": direct, "beta": data.beta, "alpha": data.alpha, "zeros": beta["roots"]}
    rep["parity_odd"] = c % 2 == 1
    rep["ok"] = rep["3"]["ok"]
    return rep
