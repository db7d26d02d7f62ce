import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spinlab.exterior import (
    GradedElement,
    InnerProductSpace,
    clifford_action,
    clifford_op,
    contract,
    exterior_module,
    graded_tensor,
    hermitian_action,
    hermitian_op,
    permutation_op,
    permuted_module,
    reorder_operator,
    trivial_module,
    wedge,
)
from spinlab.linops import Op


def e(space, *idx):
    return GradedElement.basis(space, *idx)


R2 = InnerProductSpace.standard(2)
R3 = InnerProductSpace.standard(3)


class TestWedgeContract:
    def test_basis_product(self):
        assert wedge(e(R2, 1), e(R2, 2)).plain() == {0b11: 1}

    def test_alternation(self):
        assert wedge(e(R2, 1), e(R2, 1)).coefficients == {}

    def test_bilinear_expansion(self):
        assert wedge(e(R2, 1) + e(R2, 2), e(R2, 2)) == e(R2, 1, 2)

    def test_contract_examples(self):
        assert contract((1, 0), e(R2, 1, 2)) == e(R2, 2)
        assert contract((1, 0), e(R2)).coefficients == {}
        assert contract((1, 0), e(R2, 2, 1)) == -e(R2, 2)

    def test_mismatched_ambient(self):
        with pytest.raises(ValueError):
            wedge(e(R2, 1), e(R3, 1))
        with pytest.raises(ValueError):
            contract((1, 0, 0), e(R2, 1))

    def test_graded_commutative_and_associative(self):
        monos = [e(R3, *I) for k in range(4) for I in itertools.combinations((1, 2, 3), k)]
        for a, b in itertools.product(monos, repeat=2):
            sign = (-1) ** (a.degree * b.degree)
            assert wedge(a, b) == wedge(b, a).scale(sign)
        for a, b, c in itertools.product(monos[:5], repeat=3):
            assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))

    def test_contract_is_a_derivation(self):
        v = (2, -1, 3)
        monos = [e(R3, *I) for k in range(4) for I in itertools.combinations((1, 2, 3), k)]
        for a, b in itertools.product(monos, repeat=2):
            lhs = contract(v, wedge(a, b))
            rhs = wedge(contract(v, a), b) + wedge(a, contract(v, b)).scale((-1) ** a.degree)
            assert lhs == rhs

    def test_deformed_metric_contraction(self):
        g = InnerProductSpace(2, ((2, 1), (1, 3)))
        # e1 ⌟_g e1 = g(e1, e1) = 2
        assert contract((1, 0), e(R2, 1), metric=g).plain() == {0: 2}
        assert contract((0, 1), e(R2, 1), metric=g).plain() == {0: 1}


class TestActions:
    def test_clifford_examples(self):
        V = InnerProductSpace.standard(1)
        assert clifford_action((1,), e(V)) == e(V, 1)
        assert clifford_action((1,), e(V, 1)) == -e(V)

    def test_hermitian_examples(self):
        V = InnerProductSpace.standard(1)
        assert hermitian_action((1,), e(V)) == e(V, 1)
        assert hermitian_action((1,), e(V, 1)) == e(V)
        assert hermitian_op(V, (0,)).is_zero()

    def test_c_squared_dim3(self):
        c = clifford_op(R3, (1, 0, 0))
        assert (c @ c).equals(-Op.identity(8))

    def test_anticommutators_r2(self):
        c1, c2 = clifford_op(R2, (1, 0)), clifford_op(R2, (0, 1))
        assert (c1 @ c2 + c2 @ c1).is_zero()
        V = InnerProductSpace.standard(1)
        assert (clifford_op(V, (1,)) @ hermitian_op(V, (1,)) + hermitian_op(V, (1,)) @ clifford_op(V, (1,))).is_zero()

    def test_h_self_adjoint(self):
        h = hermitian_op(R3, (1, Fraction(1, 2), -2))
        assert h.equals(h.H)

    @settings(max_examples=25, deadline=None)
    @given(
        st.integers(1, 6),
        st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=12, max_size=12),
    )
    def test_clifford_relations_random(self, dim, coeffs):
        V = InnerProductSpace.standard(dim)
        m = exterior_module(V)
        v, w = tuple(coeffs[:dim]), tuple(coeffs[6 : 6 + dim])
        assert all(m.clifford_relations(v, w).values())

    def test_negative_metric(self):
        Vm = InnerProductSpace(2, negative=True)
        c = clifford_op(Vm, (1, 0))
        assert (c @ c).equals(Op.identity(4))  # c(v)² = −g(v,v) = +|v|²
        with pytest.raises(ValueError):
            InnerProductSpace(2, ((1, 0), (0, 1)), negative=True)

    def test_metric_validation(self):
        with pytest.raises(ValueError):
            InnerProductSpace(2, ((1, 2), (0, 1)))
        with pytest.raises(ValueError):
            InnerProductSpace(2, ((1, 2), (2, 1)))


def line():
    return exterior_module(InnerProductSpace.standard(1))


class TestGradedTensor:
    def test_two_lines_give_r2(self):
        t = graded_tensor(line(), line())
        for v, w in itertools.product([(1, 0), (0, 1), (1, 2)], repeat=2):
            assert all(t.clifford_relations(v, w).values())

    def test_trivial_factor(self):
        m = exterior_module(R2)
        t = graded_tensor(m, trivial_module())
        for v in [(1, 0), (3, -2)]:
            assert t.clifford(v) == m.clifford(v)
            assert t.hermitian(v) == m.hermitian(v)

    def test_three_factors(self):
        mods = [exterior_module(InnerProductSpace.standard(d)) for d in (1, 2, 1)]
        t = graded_tensor(graded_tensor(mods[0], mods[1]), mods[2])
        for a, b in itertools.product(range(4), repeat=2):
            v = tuple(int(k == a) for k in range(4))
            w = tuple(int(k == b) for k in range(4))
            assert all(t.clifford_relations(v, w).values())

    def test_associative(self):
        mods = [exterior_module(InnerProductSpace.standard(d)) for d in (1, 2, 1)]
        left = graded_tensor(graded_tensor(mods[0], mods[1]), mods[2])
        right = graded_tensor(mods[0], graded_tensor(mods[1], mods[2]))
        for v in [(1, 0, 0, 0), (0, 1, 2, 0), (1, -1, 1, 3)]:
            assert left.clifford(v) == right.clifford(v)
            assert left.hermitian(v) == right.hermitian(v)
        assert left.epsilon == right.epsilon


class TestReorder:
    def test_identity_permutation(self):
        t = graded_tensor(line(), line())
        assert reorder_operator(t, (0, 1)) == Op.identity(4)

    def test_swap_sign(self):
        t = graded_tensor(line(), line())
        assert reorder_operator(t, (1, 0)) == Op.diag([1, 1, 1, -1])

    def test_swap_conjugation(self):
        t = graded_tensor(line(), line())
        G = reorder_operator(t, (1, 0))
        p = permuted_module(t, (1, 0))
        for v in [(1, 0), (0, 1), (2, -3)]:
            assert G @ t.hermitian(v) @ G == p.hermitian(v)
            assert G @ t.clifford(v) @ G == p.clifford(v)

    def test_invalid_permutation(self):
        t = graded_tensor(line(), line())
        with pytest.raises(ValueError):
            reorder_operator(t, (0, 0))

    @pytest.mark.parametrize("perm", list(itertools.permutations(range(3))))
    def test_intertwines_three_factors(self, perm):
        mods = [exterior_module(InnerProductSpace.standard(d)) for d in (1, 2, 1)]
        t = graded_tensor(graded_tensor(mods[0], mods[1]), mods[2])
        G = reorder_operator(t, perm)
        p = permuted_module(t, perm)
        assert G @ t.epsilon == t.epsilon @ G
        for v in [(1, 0, 0, 0), (0, 0, 1, 0), (1, 2, -1, 3)]:
            assert G @ t.clifford(v) @ G == p.clifford(v)
            assert G @ t.hermitian(v) @ G == p.hermitian(v)

    @pytest.mark.parametrize("sigma,pi", [((1, 0, 2), (0, 2, 1)), ((2, 0, 1), (1, 2, 0)), ((1, 2, 0), (1, 0, 2))])
    def test_composition_law(self, sigma, pi):
        mods = [exterior_module(InnerProductSpace.standard(d)) for d in (1, 2, 1)]
        t = graded_tensor(graded_tensor(mods[0], mods[1]), mods[2])
        # apply π first, then σ on the regrouped product
        composite = tuple(pi[s] for s in sigma)
        moved = graded_tensor(graded_tensor(*[t.atoms[p] for p in pi][:2]), t.atoms[pi[2]])
        P = permutation_op(t, pi)
        lhs = reorder_operator(t, composite)
        rhs = reorder_operator(t, pi) @ P.T @ reorder_operator(moved, sigma) @ P
        assert lhs == rhs
