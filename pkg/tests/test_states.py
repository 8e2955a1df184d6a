from __future__ import annotations

import numpy as np
import pytest

from cuntzkit import sampling
from cuntzkit.states import (
    CuntzStateSpec,
    ProductStateSpec,
    StateHandle,
    compose_endo,
    cuntz_restriction,
    disjointness_defect,
    eval_cuntz,
    eval_product,
    eval_product_embedded,
    evaluate_state,
    purity_defect_level,
)
from cuntzkit.words import (
    AlgebraElement,
    DimensionMismatch,
    adjoint,
    apply_endo,
    canonical_endo,
    expect_uhf,
    gauge_rotate,
    multiply,
    unitary_rotate,
)

from oracles import cuntz_word_value


def W(left, right, d=2, c=1.0):
    return AlgebraElement.word(left, right, d, c)


class TestCuntzStates:
    def test_f0_values(self):
        f0 = CuntzStateSpec.f0(2)
        assert eval_cuntz(f0, W((1, 1), (1,))) == 1
        assert eval_cuntz(f0, W((1, 2), ())) == 0
        assert eval_cuntz(f0, AlgebraElement.unit(2)) == 1

    def test_word_formula(self, rng):
        for d in (2, 3):
            xi = sampling.unit_vector(d, rng)
            s = CuntzStateSpec(d, xi)
            for w in sampling.all_words(d, 3):
                assert abs(eval_cuntz(s, W(w.left, w.right, d)) - cuntz_word_value(xi, w.left, w.right)) < 1e-14

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            CuntzStateSpec(2, np.array([1.0, 1.0]))
        with pytest.raises(DimensionMismatch):
            eval_cuntz(CuntzStateSpec.f0(2), AlgebraElement.unit(3))

    def test_positive_and_well_defined(self, rng):
        # positivity on a*a and agreement on equal elements written differently
        rel = W((1,), (1,)) + W((2,), (2,))
        for _ in range(30):
            s = CuntzStateSpec(2, sampling.unit_vector(2, rng))
            a = sampling.random_element(2, rng)
            val = eval_cuntz(s, multiply(adjoint(a), a))
            assert val.real >= -1e-12 and abs(val.imag) < 1e-12
            assert abs(eval_cuntz(s, multiply(rel, a)) - eval_cuntz(s, a)) < 1e-12

    def test_invariant_under_canonical_endo(self, rng):
        # f_xi(s_j x s_j*) summed over j equals f_xi(x) because sum |xi_j|^2 = 1
        for _ in range(20):
            s = CuntzStateSpec(3, sampling.unit_vector(3, rng))
            a = sampling.random_element(3, rng)
            assert abs(eval_cuntz(s, canonical_endo(a)) - eval_cuntz(s, a)) < 1e-12

    def test_unitary_rotation_moves_vector(self, rng):
        # f_xi o gamma_g = f_{g^T xi}
        for _ in range(20):
            g = sampling.haar_unitary(2, rng)
            xi = sampling.unit_vector(2, rng)
            a = sampling.random_element(2, rng)
            lhs = eval_cuntz(CuntzStateSpec(2, xi), unitary_rotate(g, a))
            rhs = eval_cuntz(CuntzStateSpec(2, g.T @ xi), a)
            assert abs(lhs - rhs) < 1e-12

    def test_restriction_to_uhf(self, rng):
        for _ in range(20):
            s = CuntzStateSpec(3, sampling.unit_vector(3, rng))
            a = expect_uhf(sampling.random_element(3, rng))
            assert abs(eval_product(cuntz_restriction(s), a) - eval_cuntz(s, a)) < 1e-12


class TestProductStates:
    @pytest.mark.parametrize("head_level", [0, 1, 2])
    def test_symbolic_matches_matrix_route(self, head_level, rng):
        for _ in range(20):
            psi = sampling.random_product_state(2, rng, sites=3, head_level=head_level)
            a = sampling.random_element(2, rng, terms=6, max_length=4)
            assert abs(eval_product(psi, a) - eval_product_embedded(psi, a)) < 1e-12

    def test_gauge_invariance(self, rng):
        psi = sampling.random_product_state(2, rng, sites=3)
        for _ in range(20):
            z = np.exp(2j * np.pi * rng.random())
            a = sampling.random_element(2, rng, max_length=4)
            assert abs(eval_product(psi, gauge_rotate(z, a)) - eval_product(psi, a)) < 1e-12

    def test_unflagged_state_rejects_nonzero_degree(self, rng):
        psi = sampling.random_product_state(2, rng, gauge_invariant=False)
        with pytest.raises(ValueError):
            eval_product(psi, W((1,), ()))
        assert abs(eval_product(psi, AlgebraElement.unit(2)) - 1) < 1e-12

    def test_site_layout(self):
        a, b, c = np.array([1, 0]), np.array([0, 1]), np.array([1, 1]) / np.sqrt(2)
        psi = ProductStateSpec(2, prefix=(a,), period=(b, c))
        assert [tuple(psi.site_vector(k)) for k in (1, 2, 3, 4)] == [
            tuple(a), tuple(b), tuple(c), tuple(b)
        ]
        np.testing.assert_allclose(psi.state_vector(2), np.kron(a, b))
        with pytest.raises(ValueError):
            ProductStateSpec(2, head=np.ones(4) / 2).site_vector(1)

    def test_purity_and_disjointness(self, rng):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        psi = ProductStateSpec(2, head=bell, period=(np.array([1, 0]),))
        assert abs(purity_defect_level(psi, 1) - 0.5) < 1e-12
        assert purity_defect_level(psi, 2) == 0
        up = ProductStateSpec.constant([1, 0])
        tilted = ProductStateSpec.constant([np.cos(0.3), np.sin(0.3)])
        assert disjointness_defect(up, up, 0, 10) == 1.0
        small = disjointness_defect(up, tilted, 0, 40)
        assert abs(small - np.cos(0.3) ** 40) < 1e-12


class TestPrecomposition:
    def test_compose_endo_is_lazy_and_ordered(self, rng):
        f0 = CuntzStateSpec.f0(2)
        u = sampling.random_word_unitary(2, rng)
        v = sampling.random_word_unitary(2, rng)
        h = compose_endo(compose_endo(f0, u), v)
        assert isinstance(h, StateHandle) and h.precompositions == (u, v)
        for _ in range(10):
            a = sampling.random_element(2, rng, terms=3, max_length=2)
            want = eval_cuntz(f0, apply_endo(u, apply_endo(v, a)))
            assert abs(evaluate_state(h, a) - want) < 1e-12

    def test_generator_values(self, rng):
        f0 = CuntzStateSpec.f0(2)
        u = sampling.random_word_unitary(2, rng)
        h = compose_endo(f0, u, verify=True)
        s1 = W((1,), ())
        assert abs(evaluate_state(h, s1) - eval_cuntz(f0, multiply(u, s1))) < 1e-14

    def test_verify_rejects(self):
        with pytest.raises(ValueError):
            compose_endo(CuntzStateSpec.f0(2), W((1,), ()), verify=True)
