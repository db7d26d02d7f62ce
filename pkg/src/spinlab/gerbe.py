"""O(1)-gerbes on finite nerves as ℤ/2 Čech cochains.

Values are ±1 and written multiplicatively.  Internally a cochain is also a
bit vector over 𝔽₂ (−1 ↔ 1), so coboundaries, trivializations and
obstruction certificates are all linear algebra over 𝔽₂.  Rows are Python
ints used as bitsets.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .quat import qconj, qmul

__all__ = [
    "FiniteNerve",
    "O1Gerbe",
    "coboundary",
    "verify_cocycle",
    "trivialize",
    "trivialize_bruteforce",
    "verify_certificate",
    "gerbe_isomorphism",
    "gerbe_from_lifts",
    "rp2_nerve",
    "rp2_extension_gerbe",
    "load_nerve",
    "load_cochain",
]

Simplex = Tuple[int, ...]
MAX_BRUTE_FORCE = 20


class FiniteNerve:
    """Simplices of dimension ≤ 3 of a finite cover's nerve, as sorted tuples."""

    def __init__(self, simplices: Iterable[Sequence[int]], closed: bool = False):
        given = {tuple(sorted(int(v) for v in s)) for s in simplices}
        if any(len(s) == 0 or len(set(s)) != len(s) for s in given):
            raise ValueError("simplices must be nonempty with distinct vertices")
        given = {s for s in given if len(s) <= 4}
        if closed:
            faces = set()
            for s in given:
                for k in range(1, len(s) + 1):
                    faces.update(itertools.combinations(s, k))
            given = faces
        else:
            for s in given:
                for face in itertools.combinations(s, len(s) - 1):
                    if face and face not in given:
                        raise ValueError(f"nerve is not downward closed: {face} missing below {s}")
        self.simplices: Dict[int, List[Simplex]] = {k: sorted(s for s in given if len(s) == k + 1) for k in range(4)}
        self.index = {k: {s: n for n, s in enumerate(v)} for k, v in self.simplices.items()}

    @classmethod
    def from_maximal(cls, simplices: Iterable[Sequence[int]]) -> "FiniteNerve":
        return cls(simplices, closed=True)

    def __len__(self) -> int:
        return sum(len(v) for v in self.simplices.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteNerve) and self.simplices == other.simplices

    def count(self, k: int) -> int:
        return len(self.simplices.get(k, []))

    def boundary_rows(self, k: int) -> List[int]:
        """For each (k+1)-simplex, the bitset of its k-faces."""
        idx = self.index[k]
        rows = []
        for s in self.simplices[k + 1]:
            bits = 0
            for face in itertools.combinations(s, k + 1):
                bits |= 1 << idx[face]
            rows.append(bits)
        return rows

    def to_json(self) -> dict:
        return {"simplices": [list(s) for k in range(4) for s in self.simplices[k]]}


def _bits(values: Dict[Simplex, int], simplices: Sequence[Simplex]) -> int:
    out = 0
    for n, s in enumerate(simplices):
        v = values.get(s, 1)
        if v not in (1, -1):
            raise ValueError(f"cochain value {v!r} on {s} is not ±1")
        if v == -1:
            out |= 1 << n
    return out


def _values(bits: int, simplices: Sequence[Simplex]) -> Dict[Simplex, int]:
    return {s: -1 if bits >> n & 1 else 1 for n, s in enumerate(simplices)}


def coboundary(nerve: FiniteNerve, k: int, cochain: Dict[Simplex, int]) -> Dict[Simplex, int]:
    """(δs)(σ) = Π over the codimension-one faces of σ; inverses are invisible for ±1."""
    if k not in (0, 1, 2):
        raise ValueError("k must be 0, 1 or 2")
    bits = _bits(cochain, nerve.simplices[k])
    return _values(sum(((bin(row & bits).count("1") & 1) << n) for n, row in enumerate(nerve.boundary_rows(k))), nerve.simplices[k + 1])


@dataclass
class O1Gerbe:
    """Section data s_ijk ∈ {±1} on the triples of a nerve (torsors P_ij trivialized)."""

    nerve: FiniteNerve
    s: Dict[Simplex, int]

    def __post_init__(self):
        s = {tuple(sorted(k)): int(v) for k, v in self.s.items()}
        unknown = set(s) - set(self.nerve.simplices[2])
        if unknown:
            raise ValueError(f"cochain lives on simplices not in the nerve: {sorted(unknown)[:3]}")
        self.s = {t: s.get(t, 1) for t in self.nerve.simplices[2]}
        _bits(self.s, self.nerve.simplices[2])

    @property
    def bits(self) -> int:
        return _bits(self.s, self.nerve.simplices[2])

    def twisted(self, u: Dict[Simplex, int]) -> "O1Gerbe":
        """s · δu."""
        du = coboundary(self.nerve, 1, u)
        return O1Gerbe(self.nerve, {t: self.s[t] * du[t] for t in self.s})

    def to_json(self) -> dict:
        return {"degree": 2, "values": [[list(t), v] for t, v in self.s.items() if v == -1]}


def verify_cocycle(g: O1Gerbe) -> dict:
    ds = coboundary(g.nerve, 2, g.s)
    failures = [list(q) for q, v in ds.items() if v == -1]
    return {"ok": not failures, "checked": len(ds), "failures": failures}


def _eliminate(rows: List[int], width: int):
    """Row-reduce over 𝔽₂ tracking combinations; rows carry a right-hand-side bit at position ``width``."""
    work = [(r, 1 << n) for n, r in enumerate(rows)]
    pivots: List[Tuple[int, int, int]] = []  # (column, row, combination)
    for col in range(width):
        hit = next((k for k, (r, _) in enumerate(work) if r >> col & 1), None)
        if hit is None:
            continue
        pr, pc = work.pop(hit)
        work = [((r ^ pr, c ^ pc) if r >> col & 1 else (r, c)) for r, c in work]
        pivots = [((pcol, r ^ pr, c ^ pc) if r >> col & 1 else (pcol, r, c)) for pcol, r, c in pivots]
        pivots.append((col, pr, pc))
    return pivots, work


def trivialize(g: O1Gerbe, check: bool = True) -> dict:
    """Solve δu = s over 𝔽₂, or return a 2-cycle z with ⟨s, z⟩ = −1.

    Rows are triples, columns edges, and the right-hand side is s.
    """
    if check and not verify_cocycle(g)["ok"]:
        raise ValueError("s is not a cocycle")
    nerve = g.nerve
    width = nerve.count(1)
    s_bits = g.bits
    rows = [row | ((s_bits >> n & 1) << width) for n, row in enumerate(nerve.boundary_rows(1))]
    pivots, rest = _eliminate(rows, width)
    for r, comb in rest:
        if r >> width & 1:
            z = [t for n, t in enumerate(nerve.simplices[2]) if comb >> n & 1]
            return {"trivial": False, "certificate": z, "pairing": -1}
    u_bits = 0
    for col, r, _ in pivots:
        # reduced form: each pivot row has its column alone among pivot columns; free variables are 0
        if r >> width & 1:
            u_bits |= 1 << col
    u = _values(u_bits, nerve.simplices[1])
    if coboundary(nerve, 1, u) != g.s:
        raise RuntimeError("elimination produced a wrong solution")
    return {"trivial": True, "u": u}


def trivialize_bruteforce(g: O1Gerbe) -> Optional[Dict[Simplex, int]]:
    """Enumerate all 1-cochains; None when none works."""
    edges = g.nerve.simplices[1]
    if len(edges) > MAX_BRUTE_FORCE:
        raise ValueError(f"{len(edges)} unknowns exceed the exhaustive limit of {MAX_BRUTE_FORCE}")
    rows = g.nerve.boundary_rows(1)
    target = g.bits
    for u in range(1 << len(edges)):
        if all((bin(row & u).count("1") & 1) == (target >> n & 1) for n, row in enumerate(rows)):
            return _values(u, edges)
    return None


def verify_certificate(g: O1Gerbe, z: Sequence[Sequence[int]]) -> bool:
    """z is a mod-2 cycle (every edge met an even number of times) with ⟨s, z⟩ = −1."""
    z = [tuple(sorted(t)) for t in z]
    if any(t not in g.nerve.index[2] for t in z):
        return False
    counts: Dict[Simplex, int] = {}
    for t in z:
        for e in itertools.combinations(t, 2):
            counts[e] = counts.get(e, 0) + 1
    cycle = all(c % 2 == 0 for c in counts.values())
    return cycle and int(np.prod([g.s[t] for t in z])) == -1


def gerbe_isomorphism(g1: O1Gerbe, g2: O1Gerbe, edge_map: Optional[Dict[Simplex, int]] = None) -> dict:
    """Check s1 = s2 · δ(edge_map); without an edge map, search for one."""
    if g1.nerve != g2.nerve:
        raise ValueError("gerbes live on different nerves")
    if edge_map is None:
        quotient = O1Gerbe(g1.nerve, {t: g1.s[t] * g2.s[t] for t in g1.s})
        out = trivialize(quotient, check=False)
        return {"ok": out["trivial"], "edge_map": out.get("u"), "certificate": out.get("certificate")}
    edge_map = {tuple(sorted(e)): v for e, v in edge_map.items()}
    moved = g2.twisted(edge_map)
    bad = [list(t) for t in g1.s if g1.s[t] != moved.s[t]]
    return {"ok": not bad, "mismatches": bad}


# gerbes from central extensions -------------------------------------------------------


def gerbe_from_lifts(nerve: FiniteNerve, lifts: Dict[Simplex, np.ndarray]) -> O1Gerbe:
    """s_ijk = u_ij u_jk u_ki for chosen SU(2) lifts u_ij (i < j) of SO(3) transitions.

    Quaternions with integer entries keep the product exact; a non-central
    product means the underlying transitions were not a cocycle.
    """
    one = np.array([1, 0, 0, 0])
    s = {}
    for i, j, k in nerve.simplices[2]:
        q = qmul(qmul(lifts[(i, j)], lifts[(j, k)]), qconj(lifts[(i, k)]))
        if np.array_equal(q, one):
            s[(i, j, k)] = 1
        elif np.array_equal(q, -one):
            s[(i, j, k)] = -1
        else:
            raise ValueError(f"lifts around {(i, j, k)} multiply to {q}, which is not central")
    return O1Gerbe(nerve, s)


def rp2_nerve() -> Tuple[FiniteNerve, Dict[Simplex, int]]:
    """The 6-vertex ℝP² as the icosahedron modulo antipodes, with the transition cocycle of its tautological line bundle.

    σ_ij = +1 when the chosen representatives of i and j are adjacent on
    the icosahedron, −1 when a representative is adjacent to the other's
    antipode.
    """
    from .torsor import icosphere

    ico = icosphere(0)
    reps = sorted({min(v, int(ico.antipode[v])) for v in range(len(ico.vertices))})
    label = {}
    for n, v in enumerate(reps):
        label[v] = label[int(ico.antipode[v])] = n
    tris = {tuple(sorted(label[int(v)] for v in f)) for f in ico.faces}
    nerve = FiniteNerve.from_maximal(tris)
    adjacent = {tuple(sorted(map(int, e))) for e in ico.edges()}
    sigma = {(i, j): 1 if tuple(sorted((reps[i], reps[j]))) in adjacent else -1 for i, j in nerve.simplices[1]}
    return nerve, sigma


def rp2_extension_gerbe() -> Tuple[O1Gerbe, Dict[Simplex, int]]:
    """The SU(2) → SO(3) obstruction gerbe of L ⊕ L ⊕ ℝ over ℝP².

    Transitions diag(σ, σ, 1) are rotations by 0 or π about the third axis;
    they lift to 1 and to the quaternion k.
    """
    nerve, sigma = rp2_nerve()
    k = np.array([0, 0, 0, 1])
    lifts = {e: (k if v == -1 else np.array([1, 0, 0, 0])) for e, v in sigma.items()}
    return gerbe_from_lifts(nerve, lifts), sigma


# files ---------------------------------------------------------------------------


def load_nerve(source) -> FiniteNerve:
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    if "simplices" not in data:
        raise ValueError("nerve file needs a 'simplices' list")
    return FiniteNerve(data["simplices"], closed=bool(data.get("closed", True)))


def load_cochain(source, nerve: FiniteNerve) -> O1Gerbe:
    """{"degree": 2, "values": [[[i, j, k], ±1], ...]}; unlisted triples are +1."""
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    if data.get("degree", 2) != 2 or "values" not in data:
        raise ValueError("cochain file needs degree 2 and a 'values' list")
    return O1Gerbe(nerve, {tuple(sorted(t)): int(v) for t, v in data["values"]})
