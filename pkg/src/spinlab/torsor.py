"""The standard triple (ℝ³, L₀, ι̃₀) on triangulated spheres.

Points of L₀ are classes [q, α] with q ∈ S³ ⊂ ℂ² and α ∈ ℂ, modulo
(λq, λᵏα) ~ (q, α) for |λ| = 1 (k = 1 is the standard model; other weights
give the c₁ = k variants).  ℂ² is identified with ℍ through q = z + j·w,
so SU(2) acts by left quaternion multiplication and the antipodal lift
[(z, w), α] ↦ [(−w̄, z̄), ᾱ] is q ↦ q·j on the first slot.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .quat import qconj, qmul

__all__ = [
    "MeshError",
    "TriangulatedSphere",
    "icosphere",
    "load_off",
    "save_off",
    "StandardTriple",
    "antipodal_lift_square",
    "chern_number",
    "EquivariantFunction",
    "component_invariant",
    "SU2Action",
    "su2_action",
    "local_square_root_correction",
    "hopf",
    "to_quaternion",
    "from_quaternion",
]


class MeshError(ValueError):
    """The mesh is too coarse for a lattice computation (refine it)."""


# meshes ----------------------------------------------------------------------------


@dataclass
class TriangulatedSphere:
    """Centrally symmetric triangulation of S² with outward-oriented faces."""

    vertices: np.ndarray
    faces: np.ndarray
    antipode: np.ndarray = field(default=None)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.vertices /= np.linalg.norm(self.vertices, axis=1, keepdims=True)
        self.faces = np.asarray(self.faces, dtype=int)
        v, f = self.vertices, self.faces
        normal = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
        flip = np.einsum("ij,ij->i", normal, v[f].sum(axis=1)) < 0
        self.faces[flip] = self.faces[flip][:, [0, 2, 1]]
        if self.antipode is None:
            dist, idx = cKDTree(v).query(-v)
            if dist.max() > 1e-9:
                raise ValueError("mesh is not centrally symmetric")
            self.antipode = idx
        self.antipode = np.asarray(self.antipode, dtype=int)
        if self.euler_characteristic() != 2:
            raise ValueError("mesh is not a sphere")
        if not self.antipodal_faces_reversed():
            raise ValueError("antipodal map does not carry faces to faces")

    def edges(self) -> np.ndarray:
        f = self.faces
        e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges()) + len(self.faces)

    def antipodal_faces_reversed(self) -> bool:
        """The image of each outward face is a face listed with the opposite cyclic order."""
        keys = {tuple(np.roll(f, -int(np.argmin(f)))) for f in self.faces}
        for f in self.faces:
            g = self.antipode[f][[0, 2, 1]]
            if tuple(np.roll(g, -int(np.argmin(g)))) not in keys:
                return False
        return True

    def neighbours(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in range(len(self.vertices))]
        for a, b in self.edges():
            adj[a].append(int(b))
            adj[b].append(int(a))
        return adj


def icosphere(level: int = 2) -> TriangulatedSphere:
    """Subdivided icosahedron with 20·4^level faces."""
    p = (1 + 5**0.5) / 2
    verts = [(-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0), (0, -1, p), (0, 1, p), (0, -1, -p), (0, 1, -p), (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1)]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]  # fmt: skip
    V = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        cache: Dict[Tuple[int, int], int] = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = V[a] + V[b]
                V.append(m / np.linalg.norm(m))
                cache[key] = len(V) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return TriangulatedSphere(np.array(V), np.array(faces))


def load_off(path) -> TriangulatedSphere:
    """Triangle mesh from an OFF file (vertices are projected to the unit sphere)."""
    tokens = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise ValueError("not an OFF file")
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    verts = np.array(tokens[pos : pos + 3 * nv], dtype=float).reshape(nv, 3)
    pos += 3 * nv
    faces = []
    for _ in range(nf):
        k = int(tokens[pos])
        if k != 3:
            raise ValueError("only triangular faces are supported")
        faces.append(tuple(int(x) for x in tokens[pos + 1 : pos + 4]))
        pos += 4
    return TriangulatedSphere(verts, np.array(faces))


def save_off(mesh: TriangulatedSphere, path) -> None:
    lines = ["OFF", f"{len(mesh.vertices)} {len(mesh.faces)} 0"]
    lines += [" ".join(f"{c:.17g}" for c in v) for v in mesh.vertices]
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.faces]
    Path(path).write_text("\n".join(lines) + "\n")


# ℂ² ≅ ℍ and the Hopf map -----------------------------------------------------------


def to_quaternion(zw) -> np.ndarray:
    """(z, w) ↦ z + j·w = (Re z, Im z, Re w, −Im w)."""
    zw = np.asarray(zw, dtype=complex)
    z, w = zw[..., 0], zw[..., 1]
    return np.stack([z.real, z.imag, w.real, -w.imag], axis=-1)


def from_quaternion(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.stack([q[..., 0] + 1j * q[..., 1], q[..., 2] - 1j * q[..., 3]], axis=-1)


def _imh_to_r3(x) -> np.ndarray:
    # inverse of (a, b, c) ↦ c·i + b·j − a·k
    x = np.asarray(x)
    return np.stack([-x[..., 3], x[..., 2], x[..., 1]], axis=-1)


def _r3_to_imh(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.stack([np.zeros(v.shape[:-1]), v[..., 2], v[..., 1], -v[..., 0]], axis=-1)


# q ↦ q·i·q̄ gives the complex orientation of ℂP¹ the opposite sign to the
# outward orientation of S²; the minus sign makes the identification
# orientation preserving, so that L₀ (the bundle O(1)) has c₁ = +1.
HOPF_SIGN = -1.0


def hopf(zw) -> np.ndarray:
    """S³ → S²: HOPF_SIGN · (q i q̄) read in ℝ³.  Equivariant for SU(2) and for the antipodes."""
    q = to_quaternion(zw)
    return HOPF_SIGN * _imh_to_r3(qmul(qmul(q, np.array([0.0, 1.0, 0.0, 0.0])), qconj(q)))


def hopf_section(x) -> np.ndarray:
    """Some unit (z, w) over each point x ∈ S² (a discontinuous choice is fine for gauge-invariant uses)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.empty((len(x), 2), dtype=complex)
    for n, v in enumerate(x):
        # ±(q i q̄) = v: solve on ℍ via the half-angle rotation taking i to ±v
        target = HOPF_SIGN * _r3_to_imh(v)[1:]
        a = np.array([1.0, 0.0, 0.0])
        c = np.cross(a, target)
        d = float(a @ target)
        if d < -1 + 1e-12:
            q = np.array([0.0, 0.0, 1.0, 0.0])  # j i j̄ = −i
        else:
            q = np.array([1.0 + d, *c])
            q /= np.linalg.norm(q)
        out[n] = from_quaternion(q)
    return out


# the standard triple -----------------------------------------------------------------


@dataclass(frozen=True)
class StandardTriple:
    """(ℝ³, L₀, ι̃₀) with U(1) weight k on the fiber (k = 1 is the standard model)."""

    weight: int = 1

    def iota(self, zw) -> np.ndarray:
        zw = np.asarray(zw, dtype=complex)
        return np.stack([-np.conj(zw[..., 1]), np.conj(zw[..., 0])], axis=-1)

    def iota_tilde(self, point: Tuple[np.ndarray, complex]) -> Tuple[np.ndarray, complex]:
        zw, alpha = point
        return self.iota(zw), np.conj(alpha)

    def same_class_scalar(self, p1, p2) -> complex:
        """μ with [p2] = [q₁, μ·α₁]; requires q₂ = λ q₁ for a unit λ."""
        (q1, a1), (q2, a2) = p1, p2
        lam = complex(np.vdot(q1, q2))
        if abs(abs(lam) - 1.0) > 1e-12 or np.linalg.norm(q2 - lam * np.asarray(q1)) > 1e-12:
            raise ValueError("points lie over different base points")
        if lam in (1.0, -1.0):
            lam = complex(lam.real, 0.0)  # keep ±1 exact
        return (lam ** (-self.weight)) * a2 / a1

    def chart_section(self, x, chart: str) -> np.ndarray:
        """Section over chart 'N' (w ≠ 0, w > 0 real) or 'S' (z ≠ 0, z > 0 real)."""
        zw = hopf_section(x)[0]
        if chart == "N":
            if abs(zw[1]) < 1e-12:
                raise ValueError("point is outside chart N")
            return zw * np.conj(zw[1]) / abs(zw[1])
        if chart == "S":
            if abs(zw[0]) < 1e-12:
                raise ValueError("point is outside chart S")
            return zw * np.conj(zw[0]) / abs(zw[0])
        raise ValueError(f"unknown chart {chart!r}")

    def transition(self, x) -> complex:
        """g_{SN}(x): [s_N(x), α] = [s_S(x), g·α]."""
        return self.same_class_scalar((self.chart_section(x, "S"), 1.0), (self.chart_section(x, "N"), 1.0))


def antipodal_lift_square(triple: StandardTriple, zw=None) -> int:
    """The fiber scalar of ι̃₀², computed in the chart containing the given point.

    ι̃₀²[q, α] = [−q, α] = [q, (−1)ᵏα]: the scalar is exactly (−1)^weight.
    """
    zw = np.array([1.0, 0.0], dtype=complex) if zw is None else np.asarray(zw, dtype=complex)
    start = (zw, 1.0 + 0.0j)
    end = triple.iota_tilde(triple.iota_tilde(start))
    mu = triple.same_class_scalar(start, end)
    if mu.imag != 0 or mu.real not in (1.0, -1.0):
        raise ValueError("inconsistent chart data")
    return int(mu.real)


def _links(triple: StandardTriple, reps: np.ndarray, a, b) -> np.ndarray:
    """Parallel transport of fiber coordinates along edges a → b: (⟨q_a, q_b⟩/|·|)ᵏ."""
    ov = np.einsum("ij,ij->i", np.conj(reps[a]), reps[b])
    mag = np.abs(ov)
    if np.any(mag < 1e-3):
        raise MeshError("adjacent fibers nearly orthogonal; refine the mesh")
    return (ov / mag) ** triple.weight


def chern_number(triple: StandardTriple, mesh: TriangulatedSphere, return_residue: bool = False):
    """c₁ from the plaquette sum of Berry holonomies over outward-oriented faces."""
    if len(mesh.faces) < 80:
        raise MeshError("need at least 80 faces")
    reps = hopf_section(mesh.vertices)
    f = mesh.faces
    hol = _links(triple, reps, f[:, 0], f[:, 1]) * _links(triple, reps, f[:, 1], f[:, 2]) * _links(triple, reps, f[:, 2], f[:, 0])
    phase = np.angle(hol)
    if np.abs(phase).max() > 0.75 * np.pi:
        raise MeshError("plaquette phase close to π; refine the mesh")
    total = phase.sum() / (2 * np.pi)
    n = int(round(total))
    residue = abs(total - n)
    if residue > 1e-6:
        raise MeshError(f"plaquette sum is not integral (residue {residue:.2e})")
    return (n, residue) if return_residue else n


# the component invariant ------------------------------------------------------------


@dataclass
class EquivariantFunction:
    """Samples of φ: S² → ℂ^× with φ(x) = conj(φ(−x)) on the mesh vertices."""

    mesh: TriangulatedSphere
    values: np.ndarray
    tol: float = 1e-12

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (len(self.mesh.vertices),):
            raise ValueError("one value per vertex is required")
        if np.any(self.values == 0):
            raise ValueError("φ vanishes at a vertex")
        defect = np.abs(self.values - np.conj(self.values[self.mesh.antipode])).max()
        if defect > self.tol * max(1.0, np.abs(self.values).max()):
            raise ValueError(f"antipodal relation fails (defect {defect:.2e})")

    @classmethod
    def from_callable(cls, mesh: TriangulatedSphere, fn, tol: float = 1e-12) -> "EquivariantFunction":
        return cls(mesh, np.array([fn(v) for v in mesh.vertices]), tol)


def _phase_lift(values: np.ndarray, adj: Sequence[Sequence[int]], root: int, rng=None, vertices: Optional[Iterable[int]] = None) -> np.ndarray:
    """Continuous arg along a (randomized) BFS tree; every edge must turn by < π/2."""
    allowed = set(range(len(values))) if vertices is None else set(vertices)
    theta = np.full(len(values), np.nan)
    theta[root] = np.angle(values[root])
    queue = deque([root])
    while queue:
        a = queue.popleft()
        nb = [b for b in adj[a] if b in allowed]
        if rng is not None:
            rng.shuffle(nb)
        for b in nb:
            step = np.angle(values[b] / values[a])
            if abs(step) >= np.pi / 2:
                raise MeshError("phase jumps by more than π/2 along an edge; refine the mesh")
            if np.isnan(theta[b]):
                theta[b] = theta[a] + step
                queue.append(b)
            elif abs(theta[b] - theta[a] - step) > 1e-9:
                raise MeshError("phase lift is not single valued on this patch")
    if np.isnan(theta[list(allowed)]).any():
        raise ValueError("patch is not connected")
    return theta


def component_invariant(phi: EquivariantFunction, root: int = 0, seed: Optional[int] = None) -> int:
    """(−1)ⁿ with θ(x) + θ(−x) = 2πn for a continuous lift θ of arg φ."""
    rng = None if seed is None else np.random.default_rng(seed)
    theta = _phase_lift(phi.values, phi.mesh.neighbours(), root, rng)
    n = (theta + theta[phi.mesh.antipode]) / (2 * np.pi)
    k = np.round(n)
    if np.abs(n - k).max() > 1e-6 or np.ptp(k) != 0:
        raise MeshError("θ(x) + θ(−x) is not a constant multiple of 2π")
    return 1 if int(k[0]) % 2 == 0 else -1


def local_square_root_correction(psi: np.ndarray, mesh: TriangulatedSphere, vertices: Optional[Sequence[int]] = None) -> np.ndarray:
    """φ = χ/|χ|² with χ² = ψ, for ψ(x)·conj(ψ(−x)) = 1.

    χ is the continuous root whose value at the first vertex is the principal
    one.  The result satisfies conj(φ(x))/φ(−x)·ψ(x) = 1.
    """
    psi = np.asarray(psi, dtype=complex)
    verts = list(range(len(psi))) if vertices is None else list(vertices)
    anti = mesh.antipode
    pairs = [v for v in verts if anti[v] in set(verts)]
    if np.abs(psi[pairs] * np.conj(psi[anti[pairs]]) - 1).max(initial=0.0) > 1e-9:
        raise ValueError("ψ(x)·conj(ψ(−x)) ≠ 1")
    theta = _phase_lift(psi, mesh.neighbours(), verts[0], vertices=verts)
    chi = np.sqrt(np.abs(psi)) * np.exp(0.5j * theta)
    phi = np.zeros_like(psi)
    phi[verts] = chi[verts] / np.abs(chi[verts]) ** 2
    check = np.conj(phi[pairs]) / phi[anti[pairs]] * psi[pairs]
    if np.abs(check - 1).max(initial=0.0) > 1e-9:
        raise ValueError("square root is not compatible with the antipodal relation")
    return phi


# the SU(2) action --------------------------------------------------------------------


@dataclass(frozen=True)
class SU2Action:
    """φ_B[q, α] = [Bq, α] for B = [[a, −b̄], [b, ā]] ∈ SU(2), i.e. q ↦ u·q with u = a + j·b."""

    B: np.ndarray
    triple: StandardTriple = StandardTriple()

    @property
    def quaternion(self) -> np.ndarray:
        return to_quaternion(self.B[:, 0])

    def apply(self, point):
        zw, alpha = point
        return self.B @ np.asarray(zw, dtype=complex), alpha

    def rotation(self) -> np.ndarray:
        """The SO(3) matrix covered, via the adjoint action on Im ℍ and (a, b, c) ↦ ci + bj − ak."""
        u = self.quaternion
        cols = []
        for e in np.eye(3):
            cols.append(_imh_to_r3(qmul(qmul(u, _r3_to_imh(e)), qconj(u))))
        return np.array(cols).T

    def compose(self, other: "SU2Action") -> "SU2Action":
        return SU2Action(self.B @ other.B, self.triple)

    def commutes_with_iota(self, point) -> float:
        """|φ_B ι̃₀ p − ι̃₀ φ_B p| measured as representatives (both exact formulas)."""
        a = self.apply(self.triple.iota_tilde(point))
        b = self.triple.iota_tilde(self.apply(point))
        return float(np.linalg.norm(a[0] - b[0]) + abs(a[1] - b[1]))


def su2_action(B, triple: StandardTriple = StandardTriple(), tol: float = 1e-12) -> SU2Action:
    B = np.asarray(B, dtype=complex)
    if B.shape != (2, 2):
        raise ValueError("B must be 2×2")
    if np.abs(B.conj().T @ B - np.eye(2)).max() > tol or abs(np.linalg.det(B) - 1) > tol:
        raise ValueError("B is not special unitary")
    if abs(B[1, 1] - np.conj(B[0, 0])) > tol or abs(B[0, 1] + np.conj(B[1, 0])) > tol:
        raise ValueError("B is not special unitary")
    return SU2Action(B, triple)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    a, b = complex(v[0], v[1]), complex(v[2], v[3])
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])
