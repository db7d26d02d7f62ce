import numpy as np
import pytest

from spinlab.torsor import (
    EquivariantFunction,
    MeshError,
    StandardTriple,
    antipodal_lift_square,
    chern_number,
    component_invariant,
    hopf,
    icosphere,
    load_off,
    save_off,
    local_square_root_correction,
    random_su2,
    su2_action,
)

L0 = StandardTriple()
MESH = icosphere(2)


@pytest.fixture(scope="module")
def fine():
    return icosphere(3)


# meshes


def test_icosphere_counts():
    for level in range(3):
        m = icosphere(level)
        assert len(m.faces) == 20 * 4**level
        assert m.euler_characteristic() == 2
        assert np.all(m.antipode[m.antipode] == np.arange(len(m.vertices)))


def test_off_roundtrip(tmp_path):
    m = icosphere(1)
    path = tmp_path / "s.off"
    save_off(m, path)
    back = load_off(path)
    assert np.allclose(back.vertices, m.vertices) and len(back.faces) == len(m.faces)


def test_off_rejects_asymmetric(tmp_path):
    path = tmp_path / "t.off"
    path.write_text("OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n")
    with pytest.raises(ValueError):
        load_off(path)


# the triple


def test_iota_square():
    assert antipodal_lift_square(L0) == -1
    assert antipodal_lift_square(L0, np.array([0.6, 0.8j])) == -1
    assert antipodal_lift_square(StandardTriple(2)) == 1
    assert antipodal_lift_square(StandardTriple(3)) == -1


def test_iota_fourth_power():
    p = (np.array([0.6, 0.8j]), 0.3 + 0.4j)
    q = p
    for _ in range(4):
        q = L0.iota_tilde(q)
    assert L0.same_class_scalar(p, q) == 1


def test_iota_covers_antipode():
    rng = np.random.default_rng(0)
    for _ in range(20):
        zw = rng.normal(size=2) + 1j * rng.normal(size=2)
        zw /= np.linalg.norm(zw)
        assert np.allclose(hopf(L0.iota(zw)), -hopf(zw))


def test_chart_transition_is_unit():
    x = np.array([0.0, 0.6, 0.8])
    g = L0.transition(x)
    assert abs(abs(g) - 1) < 1e-12
    pole = hopf(np.array([0.0, 1.0]))  # z = 0 here
    with pytest.raises(ValueError):
        L0.chart_section(pole, "S")


# Chern numbers


def test_chern_standard(fine):
    n, residue = chern_number(L0, fine, return_residue=True)
    assert n == 1 and residue < 1e-9


def test_chern_mesh_independent(fine):
    assert chern_number(L0, MESH) == chern_number(L0, fine) == 1


def test_chern_trivial_and_square():
    assert chern_number(StandardTriple(0), MESH) == 0
    assert chern_number(StandardTriple(2), MESH) == 2
    assert chern_number(StandardTriple(-1), MESH) == -1


def test_chern_needs_faces():
    with pytest.raises(MeshError):
        chern_number(L0, icosphere(0))


# component invariant


def test_constants():
    assert component_invariant(EquivariantFunction(MESH, np.ones(len(MESH.vertices)))) == 1
    assert component_invariant(EquivariantFunction(MESH, -np.ones(len(MESH.vertices)))) == -1


def test_winding_example(fine):
    phi = EquivariantFunction.from_callable(fine, lambda x: -np.exp(1j * np.pi * x[2]))
    assert component_invariant(phi) == -1


def test_equivariance_enforced():
    with pytest.raises(ValueError):
        EquivariantFunction.from_callable(MESH, lambda x: 2.0 + x[2])


def _random_member(rng, mesh, n):
    A = rng.normal(size=(3, 3)) * 0.3
    c = rng.normal(size=3) * 0.5

    def g(x):
        return c @ x + x @ A @ x + 0.5 * x[0] * x[1] * x[2]

    def s(x):
        return 0.3 * np.sin(c @ x)

    def phi(x):
        return np.exp(s(x) + s(-x)) * np.exp(1j * (np.pi * n + g(x) - g(-x)))

    return phi


def test_invariant_stable_over_paths_and_homotopies(fine):
    rng = np.random.default_rng(5)
    for trial in range(20):
        n = int(rng.integers(-3, 4))
        fn = _random_member(rng, fine, n)
        phi = EquivariantFunction.from_callable(fine, fn)
        root = int(rng.integers(len(fine.vertices)))
        expected = 1 if n % 2 == 0 else -1
        assert component_invariant(phi, root=root, seed=trial) == expected
        # straight-line path in the phase to the constant (−1)^n
        for s in (0.25, 0.5, 0.75, 1.0):
            vals = np.abs(phi.values) ** (1 - s) * np.exp(1j * ((1 - s) * np.angle(phi.values * np.exp(-1j * np.pi * n)) + np.pi * n))
            assert component_invariant(EquivariantFunction(fine, vals, tol=1e-9)) == expected


def test_coarse_mesh_refuses():
    phi = EquivariantFunction.from_callable(icosphere(0), lambda x: np.exp(1j * 20 * x[0]))
    with pytest.raises(MeshError):
        component_invariant(phi)


# SU(2)


def test_su2_identity_and_minus_identity():
    p = (np.array([0.6, 0.8j]), 1.5 - 0.5j)
    I = su2_action(np.eye(2))
    assert np.allclose(I.rotation(), np.eye(3))
    assert L0.same_class_scalar(p, I.apply(p)) == 1
    M = su2_action(-np.eye(2))
    assert np.allclose(M.rotation(), np.eye(3))
    assert L0.same_class_scalar(p, M.apply(p)) == -1


def test_su2_quarter_turn():
    th = np.pi / 2
    A = su2_action(np.diag([np.exp(1j * th / 2), np.exp(-1j * th / 2)]))
    R = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    assert np.allclose(A.rotation(), R)
    rng = np.random.default_rng(2)
    for _ in range(10):
        zw = rng.normal(size=2) + 1j * rng.normal(size=2)
        zw /= np.linalg.norm(zw)
        assert np.allclose(hopf(A.B @ zw), R @ hopf(zw))


def test_su2_group_law_and_iota():
    rng = np.random.default_rng(9)
    for _ in range(100):
        A, B = su2_action(random_su2(rng)), su2_action(random_su2(rng))
        zw = rng.normal(size=2) + 1j * rng.normal(size=2)
        zw /= np.linalg.norm(zw)
        p = (zw, complex(*rng.normal(size=2)))
        lhs = A.apply(B.apply(p))
        rhs = A.compose(B).apply(p)
        assert np.abs(lhs[0] - rhs[0]).max() < 1e-14 and lhs[1] == rhs[1]
        assert A.commutes_with_iota(p) < 1e-14
        assert np.allclose(A.compose(B).rotation(), A.rotation() @ B.rotation())
        assert np.isclose(np.linalg.det(A.rotation()), 1.0)


def test_su2_rejects_nonunitary():
    with pytest.raises(ValueError):
        su2_action(np.array([[2, 0], [0, 0.5]]))


# square roots


def test_sqrt_constants():
    ones = np.ones(len(MESH.vertices), dtype=complex)
    assert np.allclose(local_square_root_correction(ones, MESH), 1)
    th = 0.7
    # any unit constant satisfies ψ(x)·conj(ψ(−x)) = 1
    out = local_square_root_correction(np.exp(2j * th) * ones, MESH)
    assert np.allclose(out, np.exp(1j * th))


def test_sqrt_recovers_compatible_root():
    rng = np.random.default_rng(4)
    c, A = rng.normal(size=3), 0.3 * rng.normal(size=(3, 3))
    chi0 = np.array([np.exp(0.4 * (c @ x) + 1j * (x @ A @ x)) for x in MESH.vertices])
    psi = chi0**2
    phi = local_square_root_correction(psi, MESH)
    anti = MESH.antipode
    assert np.abs(np.conj(phi) / phi[anti] * psi - 1).max() < 1e-10


def test_sqrt_rejects_bad_psi():
    psi = np.full(len(MESH.vertices), 2.0, dtype=complex)
    with pytest.raises(ValueError):
        local_square_root_correction(psi, MESH)
