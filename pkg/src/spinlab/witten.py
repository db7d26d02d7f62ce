"""Quantitative Witten deformation on one-dimensional models.

A model is the rank-2 bundle over an interval [a, b] with

    D = [[0, −∂], [∂, 0]],   h = diag(V, −V),

so that (D + t h)² = −∂² + t²V² + t·V′·σ_x and {D, h} = V′·σ_x.  The first
component lives on grid nodes and the second on half-nodes.  Interleaving
them (u₀, w₀, u₁, …, u_N) and rescaling by square roots of the quadrature
weights turns D + t h into a symmetric tridiagonal matrix, so the
eigenvectors below λ̄ come straight out of ``eigh_tridiagonal``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import eigh, eigh_tridiagonal, eigvalsh_tridiagonal, expm, subspace_angles
from scipy.optimize import minimize

from .cutoffs import bump, bump_prime

__all__ = [
    "TameTupleModel",
    "EigenPacket",
    "SpectralCollision",
    "standard_models",
    "load_model",
    "check_tame",
    "localization_bounds",
    "verify_localization",
    "eigenpacket",
    "grassmann_distance",
    "grassmann_distance_bounds",
    "localizing_cutoff",
    "phi_map",
    "search_T0",
    "phi_coherence",
    "eigenvalue_to_distance",
]


class SpectralCollision(ValueError):
    """λ lies within the safety margin of the spectrum of (D + t h)²."""


@dataclass(frozen=True)
class TameTupleModel:
    """Interval model with potential V = polynomial · (1 + stretch·(1 − bump(|x|/stretch_radius))).

    ``F`` is a tuple of closed intervals.  ``stretch`` modifies V only where
    |x| > stretch_radius/2, which is how two models agreeing near F are built.
    """

    name: str
    interval: Tuple[float, float]
    N: int
    coefficients: Tuple[float, ...]
    F: Tuple[Tuple[float, float], ...]
    lam_bar: float = 1.0
    T: float = 5.0
    stretch: float = 0.0
    stretch_radius: float = 1.0
    h_scale: float = 1.0

    def __post_init__(self):
        a, b = self.interval
        if not b > a:
            raise ValueError("empty interval")
        if self.N < 4:
            raise ValueError("need at least 4 cells")
        if self.lam_bar <= 0 or self.T <= 0:
            raise ValueError("λ̄ and T must be positive")
        for lo, hi in self.F:
            if hi < lo:
                raise ValueError(f"bad interval in F: {(lo, hi)}")

    # grid ------------------------------------------------------------------
    @property
    def spacing(self) -> float:
        a, b = self.interval
        return (b - a) / self.N

    @property
    def positions(self) -> np.ndarray:
        """Interleaved node / half-node coordinates, length 2N + 1."""
        a, b = self.interval
        return a + 0.5 * self.spacing * np.arange(2 * self.N + 1)

    @property
    def weights(self) -> np.ndarray:
        w = np.full(2 * self.N + 1, self.spacing)
        w[[0, -1]] *= 0.5  # trapezoid on the node component
        return w

    @property
    def component_sign(self) -> np.ndarray:
        s = np.ones(2 * self.N + 1)
        s[1::2] = -1.0
        return s

    def in_F(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        mask = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.F:
            mask |= (x >= lo) & (x <= hi)
        return mask

    def dist_to_F(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.F:
            return np.full(x.shape, np.inf)
        d = np.stack([np.maximum(np.maximum(lo - x, x - hi), 0.0) for lo, hi in self.F])
        return d.min(axis=0)

    # potential ---------------------------------------------------------------
    def V(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p = Polynomial(self.coefficients)(x)
        if self.stretch:
            p = p * (1.0 + self.stretch * (1.0 - bump(np.abs(x) / self.stretch_radius)))
        return self.h_scale * p

    def dV(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        P = Polynomial(self.coefficients)
        out = P.deriv()(x)
        if self.stretch:
            beta = 1.0 - bump(np.abs(x) / self.stretch_radius)
            dbeta = -bump_prime(np.abs(x) / self.stretch_radius) * np.sign(x) / self.stretch_radius
            out = out * (1.0 + self.stretch * beta) + P(x) * self.stretch * dbeta
        return self.h_scale * out

    # operators ---------------------------------------------------------------
    def dirac_offdiag(self) -> np.ndarray:
        """Off-diagonal of the symmetrized D (its diagonal is zero).

        Edge (u_k, w_k) carries −1/h and edge (w_k, u_{k+1}) carries +1/h,
        each rescaled by √(w_half / w_node).
        """
        nodes = self.weights[0::2]
        node_w = np.empty(2 * self.N)
        node_w[0::2] = nodes[:-1]
        node_w[1::2] = nodes[1:]
        sign = np.ones(2 * self.N)
        sign[0::2] = -1.0
        return sign * np.sqrt(self.spacing / node_w) / self.spacing

    def h_diag(self) -> np.ndarray:
        return self.component_sign * self.V(self.positions)

    def anticommutator_offdiag(self) -> np.ndarray:
        hd = self.h_diag()
        return self.dirac_offdiag() * (hd[:-1] + hd[1:])

    def anticommutator_norm(self) -> float:
        """max of the discrete ‖{D, h}‖ and sup|V′| over the interval."""
        e = self.anticommutator_offdiag()
        ev = eigvalsh_tridiagonal(np.zeros(len(e) + 1), e)
        fine = np.linspace(*self.interval, 20 * self.N + 1)
        return float(max(np.abs(ev).max(), np.abs(self.dV(fine)).max()))

    def h_inverse_norm(self) -> float:
        """sup of |V|⁻¹ on grid positions outside F (∞ if h vanishes there)."""
        x = self.positions[~self.in_F(self.positions)]
        if x.size == 0:
            return 0.0
        m = np.abs(self.V(x)).min()
        return float("inf") if m == 0 else float(1.0 / m)

    def operator(self, t: float) -> Tuple[np.ndarray, np.ndarray]:
        """(diagonal, off-diagonal) of the symmetrized D + t h."""
        return t * self.h_diag(), self.dirac_offdiag()

    def dense(self, t: float) -> np.ndarray:
        d, e = self.operator(t)
        return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)

    def to_json(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "interval": list(self.interval),
            "N": self.N,
            "potential": list(self.coefficients),
            "F": [list(f) for f in self.F],
            "lambda_bar": self.lam_bar,
            "T": self.T,
            "stretch": self.stretch,
            "stretch_radius": self.stretch_radius,
        }


def load_model(source) -> TameTupleModel:
    """Model from a JSON file path or dict: interval, N, potential (ascending coefficients), F, lambda_bar, T."""
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    try:
        return TameTupleModel(
            name=str(data.get("name", "model")),
            interval=tuple(map(float, data["interval"])),
            N=int(data.get("N", 1200)),
            coefficients=tuple(map(float, data["potential"])),
            F=tuple(tuple(map(float, f)) for f in data["F"]),
            lam_bar=float(data.get("lambda_bar", 1.0)),
            T=float(data.get("T", 5.0)),
            stretch=float(data.get("stretch", 0.0)),
            stretch_radius=float(data.get("stretch_radius", 1.0)),
        )
    except KeyError as exc:
        raise ValueError(f"model is missing field {exc}") from None


def standard_models(N_per_unit: int = 100) -> Dict[str, Dict[str, object]]:
    """The three reference models, each with a partner differing only away from F.

    Entries: model, partner, margin (ρ = 1 within margin/2 of F, 0 beyond
    margin), λ.
    """
    out = {}
    specs = [
        ("linear", (0.0, 1.0), 6.0, ((-0.5, 0.5),), 5.0, 1.0, 3.0, 8.0),
        ("quadratic", (-1.0, 0.0, 1.0), 4.0, ((-1.5, -0.5), (0.5, 1.5)), 5.0, 0.6, 4.4, 5.0),
        ("cubic", (0.0, -1.0, 0.0, 1.0), 3.0, ((-1.4, -0.6), (-0.4, 0.4), (0.6, 1.4)), 10.0, 0.5, 4.0, 3.5),
    ]
    for name, coeffs, L, F, T, margin, R, L2 in specs:
        m1 = TameTupleModel(name, (-L, L), int(2 * L * N_per_unit), coeffs, F, 1.0, T)
        m2 = TameTupleModel(name + "'", (-L2, L2), int(2 * L2 * N_per_unit), coeffs, F, 1.0, T, stretch=0.5, stretch_radius=R)
        out[name] = {"model": m1, "partner": m2, "margin": margin, "lam": 0.5}
    return out


# tameness ----------------------------------------------------------------------


@dataclass
class EigenPacket:
    """Eigenvectors of (D + t h)² with eigenvalue ≤ threshold (orthonormal columns)."""

    threshold: float
    eigenvalues: np.ndarray
    vectors: np.ndarray
    t: float
    residuals: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        idx = np.nonzero(np.abs(col) > 1e-8 * np.abs(col).max())[0]
        if idx.size and col[idx[0]] < 0:
            vecs[:, j] = -col
    return vecs


def eigenpacket(model: TameTupleModel, t: float, threshold: Optional[float] = None) -> EigenPacket:
    """Orthonormal eigenvectors of (D + t h)² with eigenvalue ≤ threshold (default λ̄)."""
    threshold = model.lam_bar if threshold is None else threshold
    d, e = model.operator(t)
    r = np.sqrt(threshold)
    mu, vecs = eigh_tridiagonal(d, e, select="v", select_range=(-r, r))
    if vecs.shape[1] and np.abs(vecs.T @ vecs - np.eye(vecs.shape[1])).max() > 1e-9:
        full = model.dense(t)
        mu, vecs = eigh(full, subset_by_value=(-r, r))
    lam = mu**2
    order = np.argsort(lam, kind="stable")
    lam, vecs = lam[order], _fix_signs(vecs[:, order].copy())
    res = _residuals(d, e, vecs, mu[order])
    return EigenPacket(threshold, lam, vecs, t, res)


def _apply_tridiag(d, e, X):
    Y = d[:, None] * X
    Y[:-1] += e[:, None] * X[1:]
    Y[1:] += e[:, None] * X[:-1]
    return Y


def _residuals(d, e, vecs, mu) -> np.ndarray:
    if not vecs.shape[1]:
        return np.zeros(0)
    Y = _apply_tridiag(d, e, _apply_tridiag(d, e, vecs))
    return np.linalg.norm(Y - vecs * (mu**2)[None, :], axis=0) / max(1.0, float(np.max(mu**2)))


def check_tame(model: TameTupleModel, t: Optional[float] = None, trial_threshold: Optional[float] = None) -> Dict[str, Dict[str, object]]:
    """Per-condition pass/fail for the six tameness conditions, at t (default T).

    (1) ‖c‖ is bounded; (2) ‖{D,h}‖ bounded; (3) h invertible off F with
    witness; (4) the eigenspace below λ̄ is finite and its complement has
    Rayleigh quotient ≥ λ̄; (5) pointwise t·V′·σ_x + t²V² ≥ λ̄ off F;
    (6) a trial subspace with Rayleigh quotients ≤ λ forces that many
    eigenvalues ≤ λ.
    """
    t = model.T if t is None else t
    x = model.positions
    off = ~model.in_F(x)
    report: Dict[str, Dict[str, object]] = {}

    report["1"] = {"ok": True, "c_norm": 1.0}
    K = model.anticommutator_norm()
    report["2"] = {"ok": bool(np.isfinite(K)), "anticommutator_norm": K}

    Vabs = np.abs(model.V(x))
    bad = off & (Vabs == 0.0)
    if bad.any():
        report["3"] = {"ok": False, "witness": float(x[np.argmax(bad)]), "h_inverse_norm": float("inf")}
    else:
        report["3"] = {"ok": True, "h_inverse_norm": model.h_inverse_norm()}

    d, e = model.operator(t)
    lam_bar = model.lam_bar
    packet = eigenpacket(model, t)
    # the complement of the packet: smallest eigenvalue of (D+th)² above λ̄
    above = _next_eigenvalue_above(d, e, lam_bar)
    report["4"] = {"ok": bool(above >= lam_bar), "dim": packet.dim, "next_eigenvalue": above, "max_residual": float(packet.residuals.max(initial=0.0))}

    pointwise = t * t * model.V(x) ** 2 - t * np.abs(model.dV(x))
    if off.any():
        worst = int(np.argmin(np.where(off, pointwise, np.inf)))
        margin = float(pointwise[worst] - lam_bar)
        report["5"] = {"ok": margin >= 0, "margin": margin, "witness": float(x[worst])}
    else:
        report["5"] = {"ok": True, "margin": float("inf")}

    lam = 0.5 * lam_bar if trial_threshold is None else trial_threshold
    report["6"] = _minmax_check(model, t, lam)
    return report


def _next_eigenvalue_above(d, e, lam_bar: float) -> float:
    r = np.sqrt(lam_bar)
    mu = eigvalsh_tridiagonal(d, e)
    outside = np.abs(mu[np.abs(mu) >= r])
    return float(outside.min() ** 2) if outside.size else float("inf")


def _minmax_check(model: TameTupleModel, t: float, lam: float) -> Dict[str, object]:
    # trial space: cut-off copies of the low eigenvectors
    packet = eigenpacket(model, t, lam)
    rho = localizing_cutoff(model, 0.5)
    E = rho[:, None] * packet.vectors
    if not E.shape[1]:
        return {"ok": True, "trial_dim": 0}
    Q, _ = np.linalg.qr(E)
    d, e = model.operator(t)
    AQ = _apply_tridiag(d, e, Q)
    rayleigh = np.linalg.eigvalsh(AQ.T @ AQ)
    top = float(rayleigh.max())
    count = int(np.sum(eigenpacket(model, t, max(top, 1e-300) * (1 + 1e-12)).eigenvalues <= top * (1 + 1e-12)))
    below = eigenpacket(model, t, lam).eigenvalues
    ok = count >= Q.shape[1] and (below.size == 0 or below.max() <= top * (1 + 1e-9) + 1e-14)
    return {"ok": bool(ok), "trial_dim": int(Q.shape[1]), "trial_max": top, "count": count}


# localization -------------------------------------------------------------------


def localization_bounds(model_or_norms, t: float) -> Tuple[float, float]:
    """(A(t), B(t)) with A² = (λ̄ + 2t‖{D,h}‖)‖h⁻¹‖²/t² and B = max(0, 1 − A).

    Accepts a model or a dict with keys lam_bar, anticommutator, h_inverse, T.
    """
    if isinstance(model_or_norms, TameTupleModel):
        m = model_or_norms
        lam_bar, K, hinv, T = m.lam_bar, m.anticommutator_norm(), m.h_inverse_norm(), m.T
    else:
        n = model_or_norms
        lam_bar, K, hinv, T = n["lam_bar"], n["anticommutator"], n["h_inverse"], n.get("T", 0.0)
    if t < T:
        raise ValueError(f"t = {t} is below T = {T}")
    A = float(np.sqrt((lam_bar + 2.0 * t * K) * hinv**2) / t)
    return A, max(0.0, 1.0 - A)


def localizing_cutoff(model: TameTupleModel, margin: float) -> np.ndarray:
    """ρ on the grid: 1 within margin/2 of F, 0 beyond margin."""
    return bump(model.dist_to_F(model.positions) / margin)


def verify_localization(model: TameTupleModel, t: float, lam: Optional[float] = None, margin: float = 0.5) -> Dict[str, object]:
    """Check ‖φ‖_{M∖F} ≤ A‖φ‖ and B‖φ‖ ≤ ‖ρφ‖ ≤ ‖φ‖ for every eigenvector below λ̄."""
    lam = model.lam_bar if lam is None else lam
    if lam > model.lam_bar:
        raise ValueError("λ must not exceed λ̄")
    A, B = localization_bounds(model, t)
    packet = eigenpacket(model, t)
    off = ~model.in_F(model.positions)
    rho = localizing_cutoff(model, margin)
    rows = []
    for j in range(packet.dim):
        phi = packet.vectors[:, j]
        outside = float(np.linalg.norm(phi[off]))
        cut = float(np.linalg.norm(rho * phi))
        rows.append(
            {
                "eigenvalue": float(packet.eigenvalues[j]),
                "outside": outside,
                "cut": cut,
                "slack_A": A - outside,
                "slack_B": cut - B,
            }
        )
    ok = all(r["slack_A"] >= -1e-12 and r["slack_B"] >= -1e-12 and r["cut"] <= 1 + 1e-12 for r in rows)
    return {
        "t": t,
        "A": A,
        "B": B,
        "ok": ok,
        "count_below_lambda": int(np.sum(packet.eigenvalues <= lam)),
        "eigenvectors": rows,
    }


# Grassmannian distance ---------------------------------------------------------------


def _orthonormal(E: np.ndarray) -> np.ndarray:
    E = np.asarray(E)
    if E.ndim == 1:
        E = E[:, None]
    Q, R = np.linalg.qr(E)
    if np.any(np.abs(np.diag(R)) <= 1e-12 * max(1.0, np.abs(R).max())):
        raise ValueError("basis is rank deficient")
    return Q


def grassmann_distance(E1: np.ndarray, E2: np.ndarray) -> float:
    """d_H between the column spans, 2·sqrt(Σ sin²(θᵢ/2)) over the principal angles θᵢ.

    For any orthonormal basis of E₁ the best matching basis of E₂ is the
    orthogonal Procrustes solution, and the residual √(2r − 2Σcos θᵢ) does not
    depend on the basis chosen, so both halves of the definition give this value.
    """
    E1, E2 = np.asarray(E1), np.asarray(E2)
    if E1.ndim == 1:
        E1 = E1[:, None]
    if E2.ndim == 1:
        E2 = E2[:, None]
    if E1.shape != E2.shape:
        raise ValueError(f"dimension mismatch: {E1.shape} vs {E2.shape}")
    theta = subspace_angles(E1, E2)
    return float(2.0 * np.sqrt(np.sum(np.sin(theta / 2.0) ** 2)))


def _orthogonal_group_min(Q1: np.ndarray, Q2: np.ndarray, seeds: int = 8) -> float:
    r = Q1.shape[1]
    if r == 1:
        return float(min(np.linalg.norm(Q1 - Q2), np.linalg.norm(Q1 + Q2)))
    iu = np.triu_indices(r, 1)
    best = np.inf
    rng = np.random.default_rng(0)
    for det in (1.0, -1.0):
        flip = np.eye(r)
        flip[-1, -1] = det

        def cost(p):
            S = np.zeros((r, r))
            S[iu] = p
            S -= S.T
            return np.linalg.norm(Q1 - Q2 @ (expm(S) @ flip)) ** 2

        starts = [np.zeros(len(iu[0]))] + [rng.uniform(-np.pi, np.pi, len(iu[0])) for _ in range(seeds)]
        if r == 2:
            grid = np.linspace(-np.pi, np.pi, 721)
            starts = [np.array([grid[np.argmin([cost(np.array([g])) for g in grid])]])]
        for s in starts:
            res = minimize(cost, s, method="BFGS", options={"gtol": 1e-12})
            best = min(best, res.fun)
    return float(np.sqrt(max(best, 0.0)))


def grassmann_distance_bounds(E1: np.ndarray, E2: np.ndarray, samples: int = 4) -> Dict[str, float]:
    """Principal-angle value next to a direct search over matchings.

    The search minimizes ‖e − e′U‖ over U ∈ O(r) for several random
    orthonormal bases e of E₁ (and symmetrically) and returns the largest of
    these minima.  It is exact up to optimizer tolerance for r ≤ 3.
    """
    Q1, Q2 = _orthonormal(E1), _orthonormal(E2)
    if Q1.shape != Q2.shape:
        raise ValueError(f"dimension mismatch: {Q1.shape} vs {Q2.shape}")
    r = Q1.shape[1]
    closed = grassmann_distance(Q1, Q2)
    if r > 3:
        return {"principal": closed, "lower": closed, "upper": closed, "search": float("nan")}
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(samples):
        U, _ = np.linalg.qr(rng.normal(size=(r, r)))
        worst = max(worst, _orthogonal_group_min(Q1 @ U, Q2), _orthogonal_group_min(Q2 @ U, Q1))
    return {"principal": closed, "lower": min(closed, worst), "upper": max(closed, worst), "search": worst}


# comparison map Φ ---------------------------------------------------------------------


def _glue(model1: TameTupleModel, model2: TameTupleModel, vectors: np.ndarray) -> np.ndarray:
    """Transport sections supported in U from model1's grid to model2's (same spacing)."""
    if not np.isclose(model1.spacing, model2.spacing, rtol=1e-12):
        raise ValueError("glue needs equal grid spacing")
    offset = (model1.interval[0] - model2.interval[0]) / (0.5 * model1.spacing)
    k = int(round(offset))
    if abs(offset - k) > 1e-8:
        raise ValueError("grids are not aligned")
    out = np.zeros((2 * model2.N + 1, vectors.shape[1]))
    lo, hi = max(0, -k), min(vectors.shape[0], out.shape[0] - k)
    out[lo + k : hi + k] = vectors[lo:hi]
    lost = np.linalg.norm(vectors[:lo]) + np.linalg.norm(vectors[hi:])
    if lost > 1e-12:
        raise ValueError("cut-off sections leave the glued region")
    return out


def _glue_defect(model1: TameTupleModel, model2: TameTupleModel, margin: float) -> float:
    """How far V differs between the models on supp ρ (must vanish for a valid glue)."""
    x = model1.positions[localizing_cutoff(model1, margin) > 0]
    return float(np.abs(model1.V(x) - model2.V(x)).max(initial=0.0))


def phi_map(model1: TameTupleModel, model2: TameTupleModel, margin: float, lam: float, t: float) -> Dict[str, object]:
    """Φ_{λ,t}(φ) = Π′(ρφ) as a matrix between orthonormal eigenpacket bases."""
    if lam >= min(model1.lam_bar, model2.lam_bar):
        raise ValueError("λ must be below both λ̄")
    if _glue_defect(model1, model2, margin) > 1e-12:
        raise ValueError("the models do not agree on the support of ρ")
    P1 = eigenpacket(model1, t, model1.lam_bar)
    P2 = eigenpacket(model2, t, model2.lam_bar)
    guard = 1e-6 * min(model1.lam_bar, model2.lam_bar)
    for P in (P1, P2):
        if np.any(np.abs(P.eigenvalues - lam) < guard):
            raise SpectralCollision(f"λ = {lam} is within {guard:g} of the spectrum at t = {t}")
    E1 = P1.vectors[:, P1.eigenvalues <= lam]
    E2 = P2.vectors[:, P2.eigenvalues <= lam]
    rho = localizing_cutoff(model1, margin)
    moved = _glue(model1, model2, rho[:, None] * E1)
    Phi = E2.T @ moved
    sv = np.linalg.svd(Phi, compute_uv=False) if Phi.size else np.zeros(0)
    same = E1.shape[1] == E2.shape[1]
    injective = bool(same and (sv.size == 0 or sv.min() > 1e-8))
    dist = grassmann_distance(moved, E2) if same and E1.shape[1] else (0.0 if same else float("nan"))
    x = model1.positions[model1.in_F(model1.positions)]
    slope = float(np.abs(model1.dV(x)).max(initial=1.0))
    resolved = bool(0.5 * model1.spacing * np.sqrt(t * slope) <= 0.25)
    return {
        "t": t,
        "matrix": Phi,
        "singular_values": sv,
        "dims": (E1.shape[1], E2.shape[1]),
        "injective": injective,
        "distance": dist,
        "resolved": resolved,
    }


def search_T0(
    model1: TameTupleModel,
    model2: TameTupleModel,
    margin: float,
    lam: float,
    eps: float = 0.1,
    sv_floor: float = 0.9,
    max_doublings: int = 10,
) -> Dict[str, object]:
    """Double t from max(T, T′) until dims match, min σ(Φ) ≥ sv_floor and d < eps."""
    t0 = max(model1.T, model2.T)
    sweep = []
    for k in range(max_doublings + 1):
        t = t0 * 2**k
        rep = phi_map(model1, model2, margin, lam, t)
        loc = [verify_localization(m, t, lam, margin) for m in (model1, model2)]
        sv = rep["singular_values"]
        good = rep["injective"] and (sv.size == 0 or sv.min() >= sv_floor) and rep["distance"] < eps
        sweep.append(
            {
                "t": t,
                "dims": rep["dims"],
                "min_singular_value": float(sv.min()) if sv.size else 1.0,
                "distance": rep["distance"],
                "localization_ok": all(l["ok"] for l in loc),
                "resolved": rep["resolved"],
            }
        )
        if good:
            return {"found": True, "T0": t, "sweep": sweep}
    return {"found": False, "T0": None, "sweep": sweep}


def phi_coherence(models: Sequence[TameTupleModel], margin: float, lam: float, t: float) -> float:
    """‖Φ₃₁ − Φ₃₂Φ₂₁‖ for three mutually glued models."""
    m1, m2, m3 = models
    p21 = phi_map(m1, m2, margin, lam, t)["matrix"]
    p32 = phi_map(m2, m3, margin, lam, t)["matrix"]
    p31 = phi_map(m1, m3, margin, lam, t)["matrix"]
    if p31.shape != (p32 @ p21).shape:
        return float("inf")
    return float(np.linalg.norm(p31 - p32 @ p21, 2))


# eigenvalue closeness to subspace distance ------------------------------------------------


def eigenvalue_to_distance(lam: float, Lambda: Sequence[float], perturbed: Sequence[float], delta: Optional[float] = None) -> Dict[str, float]:
    """Turn eigenvalue closeness into a bound on d_H(E, E_{≤λ}(A)).

    ``Lambda`` are the eigenvalues of A below λ and ``perturbed`` the
    Rayleigh–Ritz values of A on an r-dimensional trial space E.  The
    per-step bound is ‖f(v)‖² ≤ 2δ/(λ − max Λ) for the graph map f.  The
    aggregate uses the trace inequality
    Σ sin²θᵢ ≤ Σ(λₖ(E) − λₖ)/(λ − max Λ) and d_H² ≤ 2 Σ sin²θᵢ.
    """
    Lambda = np.sort(np.asarray(Lambda, dtype=float))
    perturbed = np.sort(np.asarray(perturbed, dtype=float))
    if Lambda.shape != perturbed.shape:
        raise ValueError("need one perturbed value per reference eigenvalue")
    gaps = np.abs(perturbed - Lambda)
    delta = float(gaps.max(initial=0.0)) if delta is None else float(delta)
    if np.any(gaps > delta):
        raise ValueError("perturbation exceeds δ")
    top = float(Lambda.max(initial=0.0))
    if not lam - top > 2 * delta:
        raise ValueError("gap condition λ − max Λ > 2δ fails")
    step = 2.0 * delta / (lam - top)
    excess = float(np.sum(np.maximum(perturbed - Lambda, 0.0)))
    sin2 = excess / (lam - top)
    return {"per_step": step, "sin_squared_sum": sin2, "distance_bound": float(np.sqrt(2.0 * sin2))}
