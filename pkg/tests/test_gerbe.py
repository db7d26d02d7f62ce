import itertools
import json

import numpy as np
import pytest

from spinlab.gerbe import (
    FiniteNerve,
    O1Gerbe,
    coboundary,
    gerbe_from_lifts,
    gerbe_isomorphism,
    load_cochain,
    load_nerve,
    rp2_extension_gerbe,
    rp2_nerve,
    trivialize,
    trivialize_bruteforce,
    verify_certificate,
    verify_cocycle,
)

TET = FiniteNerve.from_maximal([(0, 1, 2, 3)])
BOUNDARY = FiniteNerve.from_maximal(itertools.combinations(range(4), 3))
OCTAHEDRON = FiniteNerve.from_maximal([(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)])


def random_cochain(rng, nerve, k):
    return {s: int(rng.choice([-1, 1])) for s in nerve.simplices[k]}


def random_nerve(rng, max_vertices=7, top=4):
    n = int(rng.integers(3, max_vertices + 1))
    pool = list(itertools.combinations(range(n), min(top, n)))
    picks = rng.choice(len(pool), size=int(rng.integers(1, len(pool) + 1)), replace=False)
    return FiniteNerve.from_maximal([pool[p] for p in picks])


# nerves


def test_downward_closure_enforced():
    with pytest.raises(ValueError):
        FiniteNerve([(0,), (1,), (0, 1), (0, 1, 2)])
    n = FiniteNerve.from_maximal([(0, 1, 2)])
    assert n.count(0) == 3 and n.count(1) == 3 and n.count(2) == 1


def test_nerve_json_roundtrip():
    assert load_nerve(OCTAHEDRON.to_json()) == OCTAHEDRON
    with pytest.raises(ValueError):
        load_nerve({"faces": []})


# coboundary


def test_delta_squared_is_one():
    rng = np.random.default_rng(0)
    checked = 0
    while checked < 1000:
        nerve = random_nerve(rng)
        for k in (0, 1):
            c = random_cochain(rng, nerve, k)
            dd = coboundary(nerve, k + 1, coboundary(nerve, k, c))
            assert all(v == 1 for v in dd.values())
            checked += 1


def test_flipped_triple_fails_on_its_quadruple():
    s = {t: 1 for t in TET.simplices[2]}
    assert verify_cocycle(O1Gerbe(TET, s))["ok"]
    s[(0, 1, 3)] = -1
    rep = verify_cocycle(O1Gerbe(TET, s))
    assert not rep["ok"] and rep["failures"] == [[0, 1, 2, 3]]


def test_coboundaries_are_cocycles():
    rng = np.random.default_rng(1)
    for _ in range(50):
        nerve = random_nerve(rng)
        g = O1Gerbe(nerve, coboundary(nerve, 1, random_cochain(rng, nerve, 1)))
        assert verify_cocycle(g)["ok"]


def test_bad_values_rejected():
    with pytest.raises(ValueError):
        O1Gerbe(BOUNDARY, {(0, 1, 2): 2})
    with pytest.raises(ValueError):
        O1Gerbe(BOUNDARY, {(0, 1, 5): -1})


# trivialization


def test_trivial_gerbe_on_sphere():
    out = trivialize(O1Gerbe(BOUNDARY, {}))
    assert out["trivial"] and all(v == 1 for v in out["u"].values())


def test_recovers_some_trivialization():
    rng = np.random.default_rng(2)
    for _ in range(100):
        nerve = random_nerve(rng)
        s = coboundary(nerve, 1, random_cochain(rng, nerve, 1))
        out = trivialize(O1Gerbe(nerve, s))
        assert out["trivial"] and coboundary(nerve, 1, out["u"]) == s


def test_non_cocycle_rejected():
    with pytest.raises(ValueError):
        trivialize(O1Gerbe(TET, {(0, 1, 2): -1}))


def test_agrees_with_brute_force():
    rng = np.random.default_rng(3)
    nerves = [BOUNDARY, OCTAHEDRON, TET]
    while len(nerves) < 300:
        nerve = random_nerve(rng, max_vertices=6, top=int(rng.integers(3, 5)))
        if nerve.count(1) <= 12:
            nerves.append(nerve)
    seen = {True: 0, False: 0}
    for nerve in nerves:
        for _ in range(3):
            s = random_cochain(rng, nerve, 2)
            g = O1Gerbe(nerve, s)
            if not verify_cocycle(g)["ok"]:
                continue
            out = trivialize(g)
            brute = trivialize_bruteforce(g)
            assert out["trivial"] == (brute is not None)
            if out["trivial"]:
                assert coboundary(nerve, 1, out["u"]) == g.s
            else:
                assert verify_certificate(g, out["certificate"])
            seen[out["trivial"]] += 1
    assert seen[True] and seen[False]


def test_brute_force_limit():
    big = FiniteNerve.from_maximal(itertools.combinations(range(8), 3))
    with pytest.raises(ValueError):
        trivialize_bruteforce(O1Gerbe(big, {}))


# RP^2


def test_rp2_nerve_shape():
    nerve, sigma = rp2_nerve()
    assert (nerve.count(0), nerve.count(1), nerve.count(2)) == (6, 15, 10)
    assert all(sigma[(i, j)] * sigma[(j, k)] * sigma[(i, k)] == 1 for i, j, k in nerve.simplices[2])
    # every edge in exactly two triangles: a closed surface
    for e in nerve.simplices[1]:
        assert sum(set(e) <= set(t) for t in nerve.simplices[2]) == 2


def test_rp2_extension_not_trivializable():
    g, _ = rp2_extension_gerbe()
    assert verify_cocycle(g)["ok"]
    out = trivialize(g)
    assert not out["trivial"]
    assert verify_certificate(g, out["certificate"])
    assert len(out["certificate"]) == 10  # the mod-2 fundamental class
    assert trivialize_bruteforce(g) is None


def test_rp2_untwisted_lift_is_trivial():
    nerve, sigma = rp2_nerve()
    one = np.array([1, 0, 0, 0])
    assert trivialize(gerbe_from_lifts(nerve, {e: one for e in sigma}))["trivial"]


def test_lifts_must_be_central():
    nerve = FiniteNerve.from_maximal([(0, 1, 2)])
    i, j = np.array([0, 1, 0, 0]), np.array([0, 0, 1, 0])
    with pytest.raises(ValueError):
        gerbe_from_lifts(nerve, {(0, 1): i, (1, 2): j, (0, 2): i})


# isomorphisms


def test_isomorphism_identity_and_gauge():
    rng = np.random.default_rng(4)
    g, _ = rp2_extension_gerbe()
    assert gerbe_isomorphism(g, g, {e: 1 for e in g.nerve.simplices[1]})["ok"]
    u = random_cochain(rng, g.nerve, 1)
    h = g.twisted(u)
    assert gerbe_isomorphism(h, g, u)["ok"]
    assert gerbe_isomorphism(h, g)["ok"]


def test_isomorphism_distinct_classes():
    g, _ = rp2_extension_gerbe()
    trivial = O1Gerbe(g.nerve, {})
    rep = gerbe_isomorphism(g, trivial)
    assert not rep["ok"] and rep["certificate"]
    assert not gerbe_isomorphism(g, trivial, {e: 1 for e in g.nerve.simplices[1]})["ok"]


def test_isomorphism_nerve_mismatch():
    with pytest.raises(ValueError):
        gerbe_isomorphism(O1Gerbe(BOUNDARY, {}), O1Gerbe(OCTAHEDRON, {}))


def test_cochain_json(tmp_path):
    g, _ = rp2_extension_gerbe()
    path = tmp_path / "s.json"
    path.write_text(json.dumps(g.to_json()))
    assert load_cochain(path, g.nerve).s == g.s
    with pytest.raises(ValueError):
        load_cochain({"degree": 1, "values": []}, g.nerve)
