"""Supersymmetric and pseudo-supersymmetric harmonic oscillators D + t·h.

Everything reduces to first-order operators M = ∂ + t·r acting from a
function sampled on nodes to a function sampled on half-nodes (a staggered
grid), so that

    D + t h = [[0, M†], [M, 0]],   (D + t h)² = M†M ⊕ MM†

with M† the adjoint for the quadrature weights.  In symmetrized
coordinates M becomes a bidiagonal matrix B and both squares are tridiagonal.
The node grid has one more point than the half-node grid, which makes the
Gaussian kernel of M exact at the discrete level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import eigsh

from .cutoffs import bump, bump_prime, length_cutoff
from .exterior import InnerProductSpace, exterior_module, graded_tensor
from .linops import Op

__all__ = [
    "SpectralResult",
    "Bidiagonal",
    "flat_susy_spectrum",
    "line_operator",
    "line_spectrum",
    "gaussian_overlap",
    "supersymmetric_pairing",
    "RadialProblem",
    "pseudo_susy_spectrum",
    "pseudo_threshold",
    "kernel_correspondence",
    "real_stabilization_homotopy",
    "stabilization_tau",
    "anticommutator_report",
    "product_kernel_check",
]


@dataclass
class SpectralResult:
    """Low spectrum of (D + t h)² with kernel vectors.

    ``degrees`` gives the ℤ/2 degree of each eigenvalue's sector.  Kernel
    vectors are columns, L²-normalized for the grid weights, and oriented so
    the degree-0 value at the origin (or the largest entry) is positive.
    """

    eigenvalues: np.ndarray
    degrees: np.ndarray
    kernel: np.ndarray
    kernel_dim: int
    gap: float
    t: float
    diagnostics: List[str] = field(default_factory=list)
    grid: Dict[str, object] = field(default_factory=dict)
    converged: bool = True

    def to_json(self) -> Dict[str, object]:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "degrees": [int(d) for d in self.degrees],
            "kernel_dim": int(self.kernel_dim),
            "gap": float(self.gap),
            "t": float(self.t),
            "diagnostics": list(self.diagnostics),
            "converged": bool(self.converged),
            "grid": self.grid,
        }


# exact flat spectrum -----------------------------------------------------------


def flat_susy_spectrum(m: int, t: float, k_max: int = 6) -> SpectralResult:
    """Spectrum of (D + t h)² on Λ*ℝᵐ ⊗ L²(ℝᵐ) from the one-dimensional ladder.

    In one dimension (D + t h)² is −∂² + t²x² ∓ t on degree 0/1, with
    eigenvalues 2t·n and 2t·(n + 1).  On ℝᵐ the graded tensor product makes
    the squares add, so a level is 2t·Σ(nᵢ + dᵢ) with form degree Σdᵢ.
    Returned eigenvalues cover all levels ≤ 2t·k_max; the kernel is the
    coefficient vector of ψ₀^{⊗m} ⊗ 1 in the Hermite ⊗ form basis.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if not 1 <= m <= 4:
        raise ValueError("flat spectrum supports 1 ≤ m ≤ 4")
    if k_max < 1:
        raise RuntimeError("level cap excludes the first excited level; internal error")
    values, degrees, labels = [], [], []
    for ns in itertools.product(range(k_max + 1), repeat=m):
        for ds in itertools.product((0, 1), repeat=m):
            level = sum(ns) + sum(ds)
            if level <= k_max:
                values.append(2.0 * t * level)
                degrees.append(sum(ds))
                labels.append((ns, ds))
    order = np.argsort(values, kind="stable")
    values = np.asarray(values)[order]
    degrees = np.asarray(degrees)[order]
    labels = [labels[i] for i in order]
    kernel_idx = [i for i, v in enumerate(values) if v == 0.0]
    if len(kernel_idx) != 1:
        raise RuntimeError("kernel is not one-dimensional; internal error")
    kernel = np.zeros((len(values), 1))
    kernel[kernel_idx[0], 0] = 1.0
    nonzero = values[values > 0]
    return SpectralResult(
        eigenvalues=values,
        degrees=degrees,
        kernel=kernel,
        kernel_dim=1,
        gap=float(nonzero.min()),
        t=t,
        grid={"kind": "hermite", "m": m, "k_max": k_max, "labels": [list(map(list, l)) for l in labels[:8]]},
    )


def supersymmetric_pairing(result: SpectralResult, tol: float = 1e-8) -> Dict[float, Tuple[int, int]]:
    """Multiplicities of each nonzero eigenvalue in even and odd degree.

    Entries that are not paired are reported with their counts; an empty dict
    means perfect pairing.
    """
    vals, degs = result.eigenvalues, result.degrees
    nonzero = vals > tol
    clusters: Dict[float, List[int]] = {}
    for v, d in sorted(zip(vals[nonzero], degs[nonzero])):
        key = next((k for k in clusters if abs(k - v) <= tol * max(1.0, abs(v))), v)
        clusters.setdefault(key, [0, 0])[d & 1] += 1
    return {k: tuple(c) for k, c in clusters.items() if c[0] != c[1]}


# staggered grids ---------------------------------------------------------------


@dataclass
class Bidiagonal:
    """B = W_half^{1/2} M W_node^{-1/2} stored by diagonals.

    ``kind="upper"``: B is N×(N+1) with B[k,k] = diag[k], B[k,k+1] = off[k].
    ``kind="lower"``: B is N×N with B[k,k] = diag[k], B[k,k−1] = off[k−1].
    """

    diag: np.ndarray
    off: np.ndarray
    kind: str
    node_weights: np.ndarray
    half_weights: np.ndarray
    nodes: np.ndarray
    halves: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        n = len(self.diag)
        return (n, n + 1) if self.kind == "upper" else (n, n)

    def dense(self) -> np.ndarray:
        n, m = self.shape
        B = np.zeros((n, m))
        B[np.arange(n), np.arange(n)] = self.diag
        if self.kind == "upper":
            B[np.arange(n), np.arange(1, n + 1)] = self.off
        else:
            B[np.arange(1, n), np.arange(n - 1)] = self.off
        return B

    def to_sparse(self):
        n, m = self.shape
        if self.kind == "upper":
            return sparse.diags([self.diag, self.off], [0, 1], shape=(n, m), format="csr")
        return sparse.diags([self.diag, self.off], [0, -1], shape=(n, m), format="csr")

    def node_square(self):
        """Diagonals of BᵀB (the degree-0 sector of (D + t h)²)."""
        a, b = self.diag, self.off
        if self.kind == "upper":
            d = np.concatenate([a**2, [0.0]])
            d[1:] += b**2
            return d, a * b
        d = a**2
        d[:-1] += b**2
        return d, a[1:] * b

    def half_square(self):
        """Diagonals of BBᵀ (the degree-1 sector)."""
        a, b = self.diag, self.off
        if self.kind == "upper":
            return a**2 + b**2, b[:-1] * a[1:]
        d = a**2
        d[1:] += b**2
        return d, a[:-1] * b


def _tridiag_low(d, e, count: int):
    count = min(count, len(d))
    if len(d) == 1:
        return d.copy(), np.ones((1, 1))
    return eigh_tridiagonal(d, e, select="i", select_range=(0, count - 1))


def _staggered(nodes, halves, node_w, half_w, potential_half, t, kind) -> Bidiagonal:
    """Assemble B for M u = u' + t·V·(average of u), V sampled on half-nodes."""
    h = np.diff(nodes) if kind == "upper" else None
    if kind == "upper":
        lo = -1.0 / h + 0.5 * t * potential_half
        hi = 1.0 / h + 0.5 * t * potential_half
        sl = np.sqrt(half_w)
        diag = sl * lo / np.sqrt(node_w[:-1])
        off = sl * hi / np.sqrt(node_w[1:])
        return Bidiagonal(diag, off, kind, node_w, half_w, nodes, halves)
    raise ValueError(kind)


def line_operator(t: float, L: float = 8.0, N: int = 2000) -> Bidiagonal:
    """M = ∂ + t·x on [−L, L]; nodes carry trapezoid weights, half-nodes midpoint weights."""
    nodes = np.linspace(-L, L, N + 1)
    h = nodes[1] - nodes[0]
    halves = 0.5 * (nodes[:-1] + nodes[1:])
    node_w = np.full(N + 1, h)
    node_w[[0, -1]] = 0.5 * h
    half_w = np.full(N, h)
    return _staggered(nodes, halves, node_w, half_w, halves, t, "upper")


def _orient(vec: np.ndarray, weights: np.ndarray, anchor: int) -> np.ndarray:
    vec = vec / np.sqrt(np.sum(weights * np.abs(vec) ** 2))
    ref = vec[anchor] if abs(vec[anchor]) > 1e-300 else vec[np.argmax(np.abs(vec))]
    return vec * np.sign(ref)


def _spectrum_from_blocks(blocks, t, n_eig, kernel_tol):
    """Low eigenvalues, degrees and node-space kernel vectors from bidiagonal sectors.

    ``blocks`` lists (B, degree_of_node_side).  Kernel vectors are returned
    in unsymmetrized coordinates (function values).
    """
    vals, degs, kernels = [], [], []
    cap = np.inf
    for B, deg in blocks:
        for square, d, weights in ((B.node_square(), deg, B.node_weights), (B.half_square(), deg + 1, B.half_weights)):
            w, v = _tridiag_low(*square, n_eig)
            if len(w) < len(square[0]):
                cap = min(cap, float(w.max()))
            vals.append(w)
            degs.append(np.full(len(w), d % 2))
            for idx in np.nonzero(np.abs(w) < kernel_tol)[0]:
                kernels.append((d, v[:, idx] / np.sqrt(weights[: v.shape[0]])))
    # each sector is truncated separately; keep only levels below every cap
    vals = np.concatenate(vals)
    degs = np.concatenate(degs)
    keep = vals < cap - 1e-9 * max(1.0, abs(cap)) if np.isfinite(cap) else np.ones(len(vals), bool)
    vals, degs = vals[keep], degs[keep]
    order = np.argsort(vals, kind="stable")
    return vals[order], degs[order], kernels


def line_spectrum(t: float, L: float = 8.0, N: int = 2000, n_eig: int = 20, kernel_tol: Optional[float] = None) -> SpectralResult:
    """Finite-difference spectrum of the one-dimensional oscillator on [−L, L]."""
    if t <= 0:
        raise ValueError("t must be positive")
    B = line_operator(t, L, N)
    tol = 1e-6 * t if kernel_tol is None else kernel_tol
    vals, degs, kernels = _spectrum_from_blocks([(B, 0)], t, n_eig, tol)
    anchor = int(np.argmin(np.abs(B.nodes)))
    kernel = np.stack([_orient(k, B.node_weights, anchor) for _, k in kernels], axis=1) if kernels else np.zeros((N + 1, 0))
    h = B.nodes[1] - B.nodes[0]
    diags = []
    converged = h * np.sqrt(t) <= 0.25 and L * np.sqrt(t) >= 5.0
    if not converged:
        diags.append("grid too coarse or box too small for the Gaussian width 1/sqrt(t)")
    nonzero = vals[vals > tol]
    return SpectralResult(
        eigenvalues=vals,
        degrees=degs,
        kernel=kernel,
        kernel_dim=len(kernels),
        gap=float(nonzero.min()) if len(nonzero) else float("nan"),
        t=t,
        diagnostics=diags,
        grid={"kind": "line", "L": L, "N": N, "h": float(h)},
        converged=converged,
    )


def gaussian_overlap(result: SpectralResult, t: Optional[float] = None) -> float:
    """|⟨kernel, e^{−t x²/2}⟩| / norms on the line grid (trapezoid weights)."""
    t = result.t if t is None else t
    L, N = result.grid["L"], result.grid["N"]
    x = np.linspace(-L, L, N + 1)
    w = np.full(N + 1, x[1] - x[0])
    w[[0, -1]] *= 0.5
    g = np.exp(-0.5 * t * x**2)
    k = result.kernel[:, 0]
    return float(abs(np.sum(w * k * g)) / np.sqrt(np.sum(w * k * k) * np.sum(w * g * g)))


# pseudo-supersymmetric oscillator ---------------------------------------------


@dataclass(frozen=True)
class RadialProblem:
    """Rotation-invariant sector of the oscillator on ℝᵐ, m ≥ 2.

    The metric is dr² + f(r)²·g_S with f = r (flat) or f² = ρr² + 1 − ρ
    (cylindrical end, ρ the bump), which is the round cylinder for r ≥ 1.
    Degree 0/1 forms u(r), w(r)dr and degree m−1/m forms p̃(r)ν, q̃(r)dr∧ν
    (ν the round volume form of the sphere) give two decoupled sectors with
    M = ∂ + t·r in each.  The second sector carries p̃(0) = 0.
    """

    m: int
    t: float
    metric: str = "cylindrical"
    R_max: float = 6.0
    N: int = 1200

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.m < 2:
            raise ValueError("radial reduction needs m ≥ 2; use line_spectrum for m = 1")
        if self.metric not in ("flat", "cylindrical"):
            raise ValueError("metric must be 'flat' or 'cylindrical'")

    def f(self, r):
        r = np.asarray(r, dtype=float)
        if self.metric == "flat":
            return r
        rho = bump(r)
        return np.sqrt(rho * r * r + 1.0 - rho)

    def f_prime(self, r):
        r = np.asarray(r, dtype=float)
        if self.metric == "flat":
            return np.ones_like(r)
        rho, drho = bump(r), bump_prime(r)
        return (drho * (r * r - 1.0) / 2.0 + rho * r) / self.f(r)

    @property
    def h(self) -> float:
        return self.R_max / self.N

    def _cell_integral(self, power: float, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        x, w = np.polynomial.legendre.leggauss(8)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        pts = mid[:, None] + half[:, None] * x[None, :]
        return half * np.sum(w[None, :] * self.f(pts) ** power, axis=1)

    def sectors(self) -> List[Tuple[Bidiagonal, int]]:
        m, t, N, h = self.m, self.t, self.N, self.h
        nodes = np.arange(N + 1) * h
        halves = (np.arange(N) + 0.5) * h
        lo = np.maximum(nodes - h / 2, 0.0)
        hi = np.minimum(nodes + h / 2, self.R_max)
        # sector (u, w): volume density f^{m−1}
        node_w = self._cell_integral(m - 1, lo, hi)
        half_w = self.f(halves) ** (m - 1) * h
        B0 = _staggered(nodes, halves, node_w, half_w, halves, t, "upper")
        # sector (p̃, q̃): density f^{1−m}, p̃ on nodes 1..N
        node_w1 = self._cell_integral(1 - m, lo[1:], hi[1:])
        half_w1 = self.f(halves) ** (1 - m) * h
        sl = np.sqrt(half_w1)
        diag = sl * (1.0 / h + 0.5 * t * halves) / np.sqrt(node_w1)
        off = sl[1:] * (-1.0 / h + 0.5 * t * halves[1:]) / np.sqrt(node_w1[:-1])
        B1 = Bidiagonal(diag, off, "lower", node_w1, half_w1, nodes[1:], halves)
        return [(B0, 0), (B1, m - 1)]

    def dirac_blocks(self) -> Tuple[np.ndarray, np.ndarray]:
        """Symmetrized D-part (t = 0) of sector 0 as a dense N×(N+1) matrix, with nodes."""
        B0 = RadialProblem(self.m, 1e-300, self.metric, self.R_max, self.N).sectors()[0][0]
        return B0.dense(), B0.nodes

    def anticommutator_sup(self) -> float:
        """sup over the grid of |±1 − (m−1)·r f′/f|, the pointwise norm of {D, h}."""
        r = np.arange(1, self.N + 1) * self.h
        x = (self.m - 1) * r * self.f_prime(r) / self.f(r)
        return float(max(np.max(np.abs(-1.0 - x)), np.max(np.abs(1.0 - x))))


def pseudo_threshold(K: float, lam_bar: float = 1.0, h_inv: float = 2.0) -> float:
    """Smallest t with A(t) ≤ ½, A(t)² = (λ̄ + 2tK)‖h⁻¹‖²/t²."""
    # t² − 8K‖h⁻¹‖² t − 4λ̄‖h⁻¹‖² ≥ 0
    a = 4.0 * K * h_inv**2
    return float(a + np.sqrt(a * a + 4.0 * lam_bar * h_inv**2))


def pseudo_susy_spectrum(
    m: int,
    t: float,
    metric: str = "cylindrical",
    R_max: float = 6.0,
    N: int = 1200,
    n_eig: int = 12,
    lam_bar: float = 1.0,
) -> SpectralResult:
    """Low spectrum and kernel of the (pseudo-)supersymmetric oscillator.

    m = 1 is the line (the cylindrical metric coincides with the flat one in
    one dimension).  For m ≥ 2 the rotation-invariant sector is solved.  Below
    the localization threshold the result carries a diagnostic instead of
    raising.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if m == 1:
        res = line_spectrum(t, L=R_max, N=2 * N, n_eig=n_eig)
        K = 1.0
    else:
        prob = RadialProblem(m, t, metric, R_max, N)
        tol = 1e-6 * t
        vals, degs, kernels = _spectrum_from_blocks(prob.sectors(), t, n_eig, tol)
        B0 = prob.sectors()[0][0]
        kern = [(d, k) for d, k in kernels]
        kernel = (
            np.stack([_orient(k, B0.node_weights, 0) for d, k in kern if len(k) == len(B0.nodes)], axis=1)
            if kern
            else np.zeros((len(B0.nodes), 0))
        )
        nonzero = vals[vals > tol]
        converged = prob.h * np.sqrt(t) <= 0.25 and R_max * np.sqrt(t) >= 5.0
        res = SpectralResult(
            eigenvalues=vals,
            degrees=degs,
            kernel=kernel,
            kernel_dim=len(kern),
            gap=float(nonzero.min()) if len(nonzero) else float("nan"),
            t=t,
            grid={"kind": "radial", "m": m, "metric": metric, "R_max": R_max, "N": N, "h": prob.h},
            converged=converged,
        )
        if not converged:
            res.diagnostics.append("grid too coarse or box too small for the Gaussian width 1/sqrt(t)")
        K = prob.anticommutator_sup()
    t_min = pseudo_threshold(K, lam_bar)
    res.grid.update(anticommutator_sup=K, t_min=t_min)
    if t < t_min:
        res.diagnostics.append(f"kernel not localized: t = {t:g} is below the certified threshold {t_min:.3f}")
    return res


def kernel_correspondence(flat: SpectralResult, pseudo: SpectralResult, radius: float = 0.5) -> Dict[str, float]:
    """Positive scalar c with pseudo = c·flat on the ball of the given radius.

    Both results must come from the same radial (or line) grid.  Returns c,
    the normalized overlap on the ball, and the standard solution (the
    unit-norm pseudo kernel with c > 0) as ``b_bar``.
    """
    if flat.kernel_dim != 1 or pseudo.kernel_dim != 1:
        raise ValueError("both kernels must be one-dimensional")
    if flat.grid.get("N") != pseudo.grid.get("N") or flat.grid.get("kind") != pseudo.grid.get("kind"):
        raise ValueError("results live on different grids")
    g = flat.grid
    if g["kind"] == "radial":
        prob = RadialProblem(g["m"], flat.t, "flat", g["R_max"], g["N"])
        r = np.arange(g["N"] + 1) * prob.h
        B0 = prob.sectors()[0][0]
        w = B0.node_weights
    else:
        r = np.abs(np.linspace(-g["L"], g["L"], g["N"] + 1))
        w = np.full(len(r), g["h"])
        w[[0, -1]] *= 0.5
    ball = r <= radius
    a, b = flat.kernel[:, 0], pseudo.kernel[:, 0]
    ab = float(np.sum(w[ball] * a[ball] * np.conj(b[ball])).real)
    aa = float(np.sum(w[ball] * np.abs(a[ball]) ** 2))
    bb = float(np.sum(w[ball] * np.abs(b[ball]) ** 2))
    c = ab / aa
    b_bar = b * np.sign(c)
    return {
        "coefficient": abs(c),
        "overlap": abs(ab) / np.sqrt(aa * bb),
        "tau_defect": float(np.max(np.abs(np.conj(b_bar) - b_bar))),
        "b_bar": b_bar,
    }


# stabilization homotopy --------------------------------------------------------


def _hermitian_numeric(dim: int):
    return exterior_module(InnerProductSpace.standard(dim), exact=False)


def real_stabilization_homotopy(s: float, v: Sequence[float], v_prime: Sequence[float]):
    """H(s, 𝒗) = (h⊗1)(ρ(a_s)v/a_s) + (ε⊗h̄)(ρ(b_s)v′/b_s) on Λ(V)⊗Λ(V′)⊗ℂ.

    a_s = (1−s)|𝒗| + s|v|, b_s = (1−s)|𝒗| + s|v′| with |𝒗|² = |v|² + |v′|².
    When a radius vanishes its vector vanishes too, and ρ(r)/r → 1 is used.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    v = np.asarray(v, dtype=float)
    vp = np.asarray(v_prime, dtype=float)
    joint = float(np.hypot(np.linalg.norm(v), np.linalg.norm(vp)))
    a = (1 - s) * joint + s * float(np.linalg.norm(v))
    b = (1 - s) * joint + s * float(np.linalg.norm(vp))
    module = graded_tensor(_hermitian_numeric(len(v)), _hermitian_numeric(len(vp)))
    x = _scaled(v, a)
    y = _scaled(vp, b)
    return module.hermitian(tuple(np.concatenate([x, y]).tolist()))


def _scaled(v: np.ndarray, radius: float) -> np.ndarray:
    if radius == 0.0:
        if np.any(v):
            raise ValueError("degenerate radius with a nonzero vector")
        return v.copy()
    if radius <= 0.25:
        return v.copy()
    return float(length_cutoff(radius)) / radius * v


def stabilization_tau(dim: int, dim_prime: int) -> Tuple[np.ndarray, bool]:
    """τ′ = τ_V ⊗ τ_{V′} with τ(ω⊗z) = (−1)^{deg ω} ω⊗z̄, as (matrix, anti-linear flag).

    τ′ covers 𝒗 ↦ −𝒗: τ′ H(s, 𝒗) = H(s, −𝒗) τ′.
    """
    module = graded_tensor(_hermitian_numeric(dim), _hermitian_numeric(dim_prime))
    return module.epsilon.to_numpy(), True


# order-0 anticommutator and product kernels -----------------------------------


def anticommutator_report(N: int, L: float = 6.0) -> Dict[str, float]:
    """{D, h} on the line grid compared with −ε.

    The discrete anticommutator is a zeroth-order (bounded) operator that
    agrees with −ε on smooth functions; the defect on a Gaussian and the
    norm of [{D, h}, χ] for a smooth cutoff χ both shrink under refinement.
    """
    B1 = line_operator(1.0, L, N)
    B0 = line_operator(1e-300, L, N)
    G = B0.dense()
    H = B1.dense() - G
    n0 = G.shape[1]
    anti = np.block([[G.T @ H + H.T @ G, np.zeros((n0, N))], [np.zeros((N, n0)), G @ H.T + H @ G.T]])
    eps = np.concatenate([np.ones(n0), -np.ones(N)])
    pos = np.concatenate([B0.nodes, B0.halves])
    sq = np.sqrt(np.concatenate([B0.node_weights, B0.half_weights]))
    smooth = np.exp(-pos**2) * sq
    inner = np.abs(pos) < L - 2.0 * (B0.nodes[1] - B0.nodes[0])
    chi = bump(np.abs(pos) / 3.0)
    comm = anti * chi[None, :] - chi[:, None] * anti
    return {
        "smooth_defect": float(np.linalg.norm(anti @ smooth + eps * smooth) / np.linalg.norm(smooth)),
        "interior_norm": float(np.linalg.norm(anti[np.ix_(inner, inner)], 2)),
        "commutator_norm": float(np.linalg.norm(comm, 2)),
        "h": float(B0.nodes[1] - B0.nodes[0]),
    }


def _line_dirac(t: float, L: float, N: int) -> sparse.csr_matrix:
    B = line_operator(t, L, N).to_sparse()
    return sparse.bmat([[None, B.T], [B, None]], format="csr")


def product_kernel_check(t: float = 1.0, L: float = 6.0, N: int = 60) -> Dict[str, float]:
    """Kernel on ℝ² from the graded tensor of two line operators versus the outer product of line kernels."""
    A = _line_dirac(t, L, N)
    n = A.shape[0]
    eps = sparse.diags(np.concatenate([np.ones(N + 1), -np.ones(N)]))
    I = sparse.identity(n)
    A2 = (sparse.kron(A, I) + sparse.kron(eps, A)).tocsc()
    vals, vecs = eigsh(A2, k=3, sigma=1e-3, which="LM")
    order = np.argsort(np.abs(vals))
    vals, vecs = vals[order], vecs[:, order]
    one = line_spectrum(t, L, N, n_eig=2)
    B = line_operator(t, L, N)
    k1 = np.concatenate([one.kernel[:, 0] * np.sqrt(B.node_weights), np.zeros(N)])
    k1 /= np.linalg.norm(k1)
    outer = np.kron(k1, k1)
    k2 = vecs[:, 0] * np.sign(vecs[:, 0] @ outer)
    return {
        "kernel_eigenvalue": float(abs(vals[0])),
        "next_eigenvalue": float(abs(vals[1])),
        "outer_product_defect": float(np.linalg.norm(k2 - outer)),
    }
