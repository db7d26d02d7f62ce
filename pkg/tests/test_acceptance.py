"""Acceptance suite: one PASS/FAIL line per criterion, with wall time against its limit."""

import itertools
from contextlib import contextmanager
from fractions import Fraction
from time import perf_counter

import numpy as np
import pytest

from spinlab.exterior import InnerProductSpace, exterior_module
from spinlab.fda import DegreeData, check_axioms, direct_degree2, families_degree, hk3_conditions, index_integrand_degree2, stabilize, sw_toy
from spinlab.gerbe import (
    FiniteNerve,
    O1Gerbe,
    coboundary,
    rp2_extension_gerbe,
    trivialize,
    trivialize_bruteforce,
    verify_certificate,
    verify_cocycle,
)
from spinlab.linops import to_plain
from spinlab.oscillator import gaussian_overlap, kernel_correspondence, line_spectrum, pseudo_susy_spectrum, supersymmetric_pairing
from spinlab.quat import random_unit
from spinlab.quaternionic import QuaternionicSpace, build_s0, build_s1, canonical_intertwiner, direct_sum_compatibility, verify_intertwiner
from spinlab.torsor import (
    EquivariantFunction,
    StandardTriple,
    antipodal_lift_square,
    chern_number,
    component_invariant,
    icosphere,
    random_su2,
    su2_action,
)
from spinlab.witten import phi_map, standard_models, verify_localization

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(capsys, number, title, limit):
    checks = {}
    start = perf_counter()
    try:
        yield checks
    except Exception as exc:  # report, then fail below
        checks[f"raised {type(exc).__name__}: {exc}"] = False
    elapsed = perf_counter() - start
    checks["runtime"] = elapsed < limit
    bad = [k for k, ok in checks.items() if not ok]
    verdict = "PASS" if not bad else "FAIL"
    line = f"{verdict} criterion {number} ({title}): {elapsed:.2f}s of {limit:g}s"
    if bad:
        line += " | failed: " + "; ".join(bad)
    with capsys.disabled():
        print("\n" + line)
    assert not bad, line


def _relations_hold(module, vectors):
    return all(all(module.clifford_relations(v, w).values()) for v, w in itertools.combinations_with_replacement(vectors, 2))


def _rational_vectors(rng, dim, count):
    return [tuple(Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for _ in range(dim)) for _ in range(count)]


def test_1_clifford_identities(capsys):
    rng = np.random.default_rng(1)
    with criterion(capsys, 1, "exact Clifford identities", 5.0) as checks:
        for d in range(1, 7):
            basis = [tuple(int(a == b) for b in range(d)) for a in range(d)]
            checks[f"exterior dim {d}"] = _relations_hold(exterior_module(InnerProductSpace.standard(d)), basis + _rational_vectors(rng, d, 2))
        H1 = QuaternionicSpace(1)
        vectors = [H1.real_space.basis(a) for a in range(4)] + _rational_vectors(rng, 4, 2)
        checks["S0 at n=1"] = _relations_hold(build_s0(H1), vectors)
        checks["S1 at n=1"] = _relations_hold(build_s1(H1), vectors)


def test_2_canonical_intertwiner(capsys):
    rng = np.random.default_rng(2)
    with criterion(capsys, 2, "canonical intertwiner", 30.0) as checks:
        H1 = QuaternionicSpace(1)
        itw = canonical_intertwiner(H1)
        checks["intertwines c, h, tau exactly"] = verify_intertwiner(itw, tol=0.0)["ok"]
        image = {k: to_plain(v) for k, v in itw.F.apply({0: 1}).items()}
        # (e + i·ei)∧(ej − i·ek), bits e, ei, ej, ek = 1, 2, 4, 8
        checks["generator rule"] = image == {0b0101: 1, 0b1001: -1j, 0b0110: 1j, 0b1010: 1}
        ref = itw.F.to_numpy()
        deviation = max(
            float(np.abs(canonical_intertwiner(H1, basis=random_unit(rng)[None, None, :]).F.to_numpy() - ref).max()) for _ in range(25)
        )
        checks[f"25 Sp(1) bases (deviation {deviation:.1e})"] = deviation < 1e-12
        ds = direct_sum_compatibility(H1, H1)
        checks["direct sum at real dim 8"] = ds["real_dim"] == 8 and all(ds[k] for k in ("c", "h", "tau", "F"))


def test_3_susy_oscillator(capsys):
    with criterion(capsys, 3, "supersymmetric oscillator", 60.0) as checks:
        for t in (0.5, 1.0, 2.0, 8.0):
            res = line_spectrum(t)
            refined = line_spectrum(t, N=4000)
            overlap = min(gaussian_overlap(res), gaussian_overlap(refined))
            checks[f"t={t:g} kernel dim 1"] = res.kernel_dim == 1 == refined.kernel_dim
            checks[f"t={t:g} overlap {overlap:.6f}"] = overlap >= 0.9999
            checks[f"t={t:g} pairing"] = supersymmetric_pairing(res, 1e-8) == {}


def test_4_pseudo_susy(capsys):
    with criterion(capsys, 4, "pseudo-supersymmetric oscillator", 60.0) as checks:
        t_min = pseudo_susy_spectrum(4, 1.0).grid["t_min"]
        for t in (t_min, 1.5 * t_min, 2 * t_min):
            res = pseudo_susy_spectrum(4, t)
            flat = pseudo_susy_spectrum(4, t, metric="flat")
            checks[f"t={t:.1f} kernel dim 1"] = res.kernel_dim == 1 and not res.diagnostics
            if res.kernel_dim == 1 == flat.kernel_dim:
                overlap = kernel_correspondence(flat, res)["overlap"]
                checks[f"t={t:.1f} overlap on B_1/2 {overlap:.6f}"] = overlap >= 0.999


def test_5_witten_localization(capsys):
    with criterion(capsys, 5, "Witten localization", 300.0) as checks:
        for name, d in standard_models().items():
            m1, m2 = d["model"], d["partner"]
            sv_best, dist = 0.0, np.inf
            for k in range(7):
                t = max(m1.T, m2.T) * 2**k
                loc = [verify_localization(m, t, d["lam"], d["margin"]) for m in (m1, m2)]
                checks[f"{name} A/B bounds at t={t:g}"] = all(r["ok"] for r in loc)
                rep = phi_map(m1, m2, d["margin"], d["lam"], t)
                if rep["injective"]:
                    sv_best = max(sv_best, float(rep["singular_values"].min(initial=1.0)))
                dist = rep["distance"]
            checks[f"{name} min singular value {sv_best:.4f}"] = sv_best >= 0.9
            checks[f"{name} final distance {dist:.1e}"] = dist < 0.1


def _odd_phase(rng):
    A, c = 0.3 * rng.normal(size=(3, 3)), 0.5 * rng.normal(size=3)

    def g(x):
        return c @ x + x @ A @ x + 0.5 * x[0] * x[1] * x[2]

    return lambda x: g(x) - g(-x)


def test_6_torsor(capsys):
    rng = np.random.default_rng(6)
    with criterion(capsys, 6, "Spin(3) torsor", 60.0) as checks:
        L0 = StandardTriple()
        for level in (2, 3):
            mesh = icosphere(level)
            n, residue = chern_number(L0, mesh, return_residue=True)
            checks[f"chern on {len(mesh.faces)} faces (residue {residue:.1e})"] = n == 1 and residue < 1e-6
        checks["iota squared is -1"] = antipodal_lift_square(L0) == -1
        checks["weight 2 gives +1"] = antipodal_lift_square(StandardTriple(2)) == 1
        mesh = icosphere(3)
        nv = len(mesh.vertices)
        plus = component_invariant(EquivariantFunction(mesh, np.ones(nv)))
        minus = component_invariant(EquivariantFunction(mesh, -np.ones(nv)))
        checks["separates constants"] = (plus, minus) == (1, -1)
        stable = True
        for trial in range(20):
            n = int(rng.integers(-3, 4))
            phase = _odd_phase(rng)
            expected = (-1) ** (n % 2)
            # e^{i(πn + (1−s)·phase)} runs from a random member to the constant (−1)^n
            for s in np.linspace(0.0, 1.0, 6):
                phi = EquivariantFunction.from_callable(mesh, lambda x: np.exp(1j * (np.pi * n + (1 - s) * phase(x))))
                stable &= component_invariant(phi, root=int(rng.integers(nv)), seed=trial) == expected
        checks["stable over 20 paths"] = stable
        law = iota = 0.0
        for _ in range(100):
            A, B = su2_action(random_su2(rng)), su2_action(random_su2(rng))
            zw = rng.normal(size=2) + 1j * rng.normal(size=2)
            p = (zw / np.linalg.norm(zw), complex(*rng.normal(size=2)))
            lhs, rhs = A.apply(B.apply(p)), A.compose(B).apply(p)
            law = max(law, float(np.abs(lhs[0] - rhs[0]).max()), abs(lhs[1] - rhs[1]))
            iota = max(iota, A.commutes_with_iota(p))
        checks[f"group law over 100 B ({law:.1e})"] = law < 1e-14
        checks[f"iota commutation over 100 B ({iota:.1e})"] = iota < 1e-14


def test_7_fda_pipeline(capsys):
    with criterion(capsys, 7, "FDA pipeline", 120.0) as checks:
        toy = sw_toy()
        checks["toy passes nine axioms"] = all(v["ok"] for v in check_axioms(toy).values())
        rep = hk3_conditions(toy)
        checks["hk3 c = +1"] = rep["ok"] and rep["3"]["c"] == 1 == rep["3"]["direct"]
        beta = families_degree(toy, "beta")["degree"]
        alpha = families_degree(toy, "alpha")["degree"]
        for n, a in itertools.product((1, 2), repeat=2):
            data = DegreeData(beta, alpha)
            checks[f"integrand vs direct at (n,a)=({n},{a})"] = index_integrand_degree2(n, a, data) == direct_degree2(n, data) == 1
        checks["hk3 c = +1 at n=2"] = hk3_conditions(sw_toy(2, 1))["3"]["c"] == 1
        for k in (1, 2):
            stab = stabilize(toy, k)
            checks[f"stabilized by {k}"] = all(v["ok"] for v in check_axioms(stab).values()) and hk3_conditions(stab)["3"]["c"] == 1


def _random_nerve(rng, max_vertices, top):
    n = int(rng.integers(3, max_vertices + 1))
    pool = list(itertools.combinations(range(n), min(top, n)))
    picks = rng.choice(len(pool), size=int(rng.integers(1, len(pool) + 1)), replace=False)
    return FiniteNerve.from_maximal([pool[p] for p in picks])


def _random_cochain(rng, nerve, k):
    return {s: int(rng.choice([-1, 1])) for s in nerve.simplices[k]}


def test_8_gerbe(capsys):
    rng = np.random.default_rng(8)
    with criterion(capsys, 8, "O(1) gerbes", 30.0) as checks:
        ok = True
        for i in range(1000):
            nerve, k = _random_nerve(rng, 7, 4), i % 2
            dd = coboundary(nerve, k + 1, coboundary(nerve, k, _random_cochain(rng, nerve, k)))
            ok &= all(v == 1 for v in dd.values())
        checks["delta squared on 1000 cochains"] = ok
        agree, tried = True, 0
        while tried < 300:
            nerve = _random_nerve(rng, 6, int(rng.integers(3, 5)))
            if nerve.count(1) > 12:
                continue
            g = O1Gerbe(nerve, _random_cochain(rng, nerve, 2))
            if not verify_cocycle(g)["ok"]:
                g = O1Gerbe(nerve, coboundary(nerve, 1, _random_cochain(rng, nerve, 1)))
            out = trivialize(g)
            agree &= out["trivial"] == (trivialize_bruteforce(g) is not None)
            agree &= coboundary(nerve, 1, out["u"]) == g.s if out["trivial"] else verify_certificate(g, out["certificate"])
            tried += 1
        checks["solver agrees with brute force on 300 nerves"] = agree
        g, _ = rp2_extension_gerbe()
        out = trivialize(g)
        checks["RP2 cocycle certified non-trivializable"] = (
            verify_cocycle(g)["ok"] and not out["trivial"] and verify_certificate(g, out["certificate"]) and trivialize_bruteforce(g) is None
        )
