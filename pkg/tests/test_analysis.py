import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from chm import analysis, catalogue
from chm.analysis import (
    Isolation, Outcome, Verdict, circulant_decompose, defect, dephase, equivalence_search,
    fourier_defect_formula, haagerup_invariants, inequivalent_by_invariants, is_hadamard,
    is_isolated_certificate, is_unbiased_pair, log_phases, orthogonality_system, trivial_kernel_basis,
)
from chm.construct import tensor
from chm.core import DiagonalPhase, EquivalenceWitness, HadamardMatrix, PermutationVector, PhaseValue, apply_equivalence

F = catalogue.fourier


def random_witness(n, rng, exact=False):
    def diag():
        if exact:
            return DiagonalPhase(tuple(PhaseValue.exact(Fraction(int(k), 12)) for k in rng.integers(0, 12, n)))
        return DiagonalPhase.from_radians(rng.uniform(0, 2 * math.pi, n))
    return EquivalenceWitness(diag(), PermutationVector(tuple(rng.permutation(n))),
                              PermutationVector(tuple(rng.permutation(n))), diag())


class TestIsHadamard:
    def test_fourier(self):
        assert is_hadamard(F(5)).passed

    def test_perturbed_entry(self):
        V = F(6).values.copy()
        V[1, 1] *= np.exp(1e-3j)
        rep = is_hadamard(V)
        assert not rep.passed
        assert 1e-4 < rep.gram_deviation < 1e-2
        assert rep.gram_deviation == pytest.approx(oracles.gram_deviation(V), rel=1e-12)

    def test_all_ones(self):
        rep = is_hadamard(np.ones((2, 2)))
        assert not rep.passed and rep.gram_deviation == pytest.approx(2)

    def test_default_tolerance_scales(self):
        assert is_hadamard(F(7)).tol == pytest.approx(7e-10)


class TestDephase:
    TILDE_F4 = [[1j, -1, -1j, 1], [-1, 1, -1, 1], [-1j, -1, 1j, 1], [1, 1, 1, 1]]

    def test_exact_dephasing(self):
        # entries exp(2 pi i jk / 4) for j, k = 1..4
        M = HadamardMatrix.from_turns([[j * k % 4 for k in range(1, 5)] for j in range(1, 5)], 4)
        assert np.array_equal(M.values, self.TILDE_F4)
        assert np.array_equal(log_phases(M).integer_matrix(4),
                              [[1, 2, 3, 0], [2, 0, 2, 0], [3, 2, 1, 0], [0, 0, 0, 0]])
        H = dephase(M).h
        assert H.is_exact
        assert H.same_phases(F(4))

    def test_fixed_point(self):
        D = dephase(F(6))
        assert all(p.turns == 0 for p in D.d_r.phases + D.d_c.phases)
        assert D.h.same_phases(F(6))

    def test_formulas(self):
        rng = np.random.default_rng(5)
        M = apply_equivalence(F(5), random_witness(5, rng))
        D = dephase(M)
        assert np.allclose(D.d_r.matrix() @ M.values @ D.d_c.matrix(), D.h.values, atol=1e-13)
        assert np.allclose(D.h.values, oracles.dephase(M.values), atol=1e-13)

    def test_recovers_fourier_exactly(self):
        rng = np.random.default_rng(6)
        ds = [PhaseValue.exact(Fraction(int(k), 8)) for k in rng.integers(0, 8, 10)]
        w = EquivalenceWitness(DiagonalPhase(tuple(ds[:5])), PermutationVector.identity(5),
                               PermutationVector.identity(5), DiagonalPhase((PhaseValue.zero(),) + tuple(ds[6:])))
        assert dephase(apply_equivalence(F(5), w)).h.same_phases(F(5))

    @given(st.integers(0, 2**32 - 1))
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        H = dephase(apply_equivalence(catalogue.get("F6", [0.3, 1.2]), random_witness(6, rng))).h
        again = dephase(H)
        assert all(p.angle == 0 for p in again.d_r.phases + again.d_c.phases)
        assert np.array_equal(again.h.values, H.values)


class TestLogPhases:
    def test_f4(self):
        assert np.array_equal(log_phases(F(4)).integer_matrix(4),
                              [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 0, 2], [0, 3, 2, 1]])

    def test_f2(self):
        assert np.array_equal(log_phases(F(2)).integer_matrix(2), [[0, 0], [0, 1]])

    @pytest.mark.parametrize("eid, q", [("S6", 3), ("F12A", 12)])
    def test_butson_integral(self, eid, q):
        M = catalogue.get(eid) if eid == "S6" else catalogue.get(eid, [0] * 9)
        k = log_phases(M).turns() * q
        assert np.max(np.abs(k - np.round(k))) <= 1e-9

    def test_non_butson_raises(self):
        with pytest.raises(ValueError):
            log_phases(catalogue.get("C6")).integer_matrix(12)


class TestDefect:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 14, 15, 16])
    def test_fourier(self, n):
        rep = defect(F(n))
        assert rep.method == "exact"
        assert rep.defect == rep.svd_defect == fourier_defect_formula(n) == oracles.defect(F(n).values)

    @pytest.mark.parametrize("eid, d", [("S6", 0), ("C6", 4), ("N11", 0), ("C7A", 0), ("C11A", 0), ("C13A", 0)])
    def test_catalogue(self, eid, d):
        rep = defect(catalogue.get(eid))
        assert rep.defect == d == rep.svd_defect == oracles.defect(catalogue.get(eid).values)

    @pytest.mark.parametrize("n, d", [(9, 4), (8, 5), (7, 0), (4, 1), (16, 17), (6, 4), (15, 16)])
    def test_formula(self, n, d):
        assert fourier_defect_formula(n) == d

    def test_formula_gap(self):
        assert fourier_defect_formula(12) is None
        assert defect(F(12)).defect == oracles.defect(F(12).values)

    def test_kernel_vectors_solve_system(self):
        rep = defect(F(6))
        A = analysis.defect_system(F(6))
        for B in rep.kernel_basis:
            assert np.max(np.abs(A @ B.ravel())) < 1e-9

    @pytest.mark.parametrize("n", [3, 4, 6, 8])
    def test_trivial_kernel(self, n):
        A = orthogonality_system(F(n))
        basis = trivial_kernel_basis(n)
        assert len(basis) == 2 * n - 1
        assert np.linalg.matrix_rank(np.array([B.ravel() for B in basis])) == 2 * n - 1
        for B in basis:
            assert np.max(np.abs(A @ B.ravel())) < 1e-12
        assert n * n - np.linalg.matrix_rank(A) >= 2 * n - 1

    def test_rejects_non_hadamard(self):
        with pytest.raises(analysis.NotHadamardError):
            defect(np.ones((3, 3)))

    @pytest.mark.parametrize("eid, verdict", [("F5", Isolation.ISOLATED), ("F13", Isolation.ISOLATED),
                                              ("C6", Isolation.UNKNOWN)])
    def test_isolation(self, eid, verdict):
        assert is_isolated_certificate(catalogue.get(eid)) is verdict


class TestInvariants:
    def test_f2(self):
        inv = haagerup_invariants(F(2))
        assert set(inv.values) == {1, -1}
        assert oracles.rounded_set(oracles.quadruple_products(F(2).values)) == {(1.0, 0.0), (-1.0, 0.0)}

    def test_f4_vs_tensor(self):
        f4, f22 = haagerup_invariants(F(4)), haagerup_invariants(tensor(F(2), F(2)))
        assert 1j in f4 and -1j in f4
        assert set(f22.values) <= {1, -1}

    @pytest.mark.parametrize("eid", ["F4", "F6", "S6", "C6", "D6"])
    def test_matches_brute_force(self, eid):
        M = catalogue.fourier(4) if eid == "F4" else catalogue.get(eid, [0.4] * catalogue.entry(eid).param_count)
        inv = haagerup_invariants(M)
        assert sum(inv.counts) == M.n ** 4
        brute = oracles.rounded_set(oracles.quadruple_products(M.values))
        assert {(round(z.real, 8) + 0.0, round(z.imag, 8) + 0.0) for z in inv.values} == brute

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20)
    def test_conjugation_closed_and_contains_one(self, seed):
        rng = np.random.default_rng(seed)
        e = catalogue.entry(["F6", "D6", "F8", "P7"][seed % 4])
        inv = haagerup_invariants(catalogue.get(e.id, list(rng.uniform(0, 6.3, e.param_count))))
        assert 1 in inv
        assert all(z.conjugate() in inv for z in inv.values)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20)
    def test_invariant_under_equivalence(self, seed):
        rng = np.random.default_rng(seed)
        M = catalogue.get("F6", list(rng.uniform(0, 6.3, 2)))
        N = apply_equivalence(M, random_witness(6, rng))
        assert haagerup_invariants(M).matches(haagerup_invariants(N))
        assert inequivalent_by_invariants(M, N) is Verdict.INCONCLUSIVE

    def test_verdicts(self):
        assert inequivalent_by_invariants(F(4), tensor(F(2), F(2))) is Verdict.INEQUIVALENT
        C = catalogue.get("C6")
        assert inequivalent_by_invariants(C, C.transpose()) is Verdict.INCONCLUSIVE


class TestEquivalenceSearch:
    def test_f4_shift(self):
        a = 0.3
        res = equivalence_search(catalogue.get("F4", [a]), catalogue.get("F4", [a + math.pi]))
        assert res.outcome is Outcome.FOUND
        assert res.witness.p2.perm == (0, 3, 2, 1)
        assert res.witness.p1.is_identity()

    def test_self(self):
        M = catalogue.get("F6", [0.2, 0.9])
        res = equivalence_search(M, M)
        w = res.witness
        assert res.found and w.p1.is_identity() and w.p2.is_identity()
        assert all(p.angle == 0 for p in w.d1.phases + w.d2.phases)

    def test_f4_not_tensor(self):
        res = equivalence_search(F(4), tensor(F(2), F(2)))
        assert res.outcome is Outcome.NOT_FOUND
        assert not oracles.brute_equivalent(F(4).values, tensor(F(2), F(2)).values)

    def test_budget(self):
        rng = np.random.default_rng(0)
        M = catalogue.get("D6", [0.3])
        N = apply_equivalence(M, random_witness(6, rng))
        assert equivalence_search(M, N, budget=1).outcome is Outcome.EXHAUSTED
        assert equivalence_search(M, N).found

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=15)
    def test_finds_random_transform(self, seed):
        rng = np.random.default_rng(seed)
        M = catalogue.get("D6", [rng.uniform(0, 6.3)])
        N = apply_equivalence(M, random_witness(6, rng))
        res = equivalence_search(N, M)
        assert res.found
        assert np.max(np.abs(apply_equivalence(M, res.witness).values - N.values)) < 1e-9

    def test_s6_not_c6(self):
        assert equivalence_search(catalogue.get("S6"), catalogue.get("C6")).outcome is Outcome.NOT_FOUND


class TestUnbiased:
    H2 = np.array([[1, 1], [1j, -1j]])

    def test_pairs(self):
        assert is_unbiased_pair(F(2), self.H2) and oracles.unbiased(F(2).values, self.H2)
        assert not is_unbiased_pair(F(2), F(2)) and not oracles.unbiased(F(2).values, F(2).values)

    @given(st.lists(st.floats(0, 6.3), min_size=4, max_size=4))
    def test_diagonal_phase_invariance(self, xs):
        D = np.diag(np.exp(1j * np.array(xs)))
        H = F(4).values
        assert is_unbiased_pair(H, H @ D) == is_unbiased_pair(H, H) is False
        G = catalogue.get("F4", [xs[0]]).values
        assert is_unbiased_pair(H, G @ D) == oracles.unbiased(H, G @ D, 1e-9)


class TestCirculant:
    def test_c6_vector(self):
        d = catalogue.CONSTANTS.d_C6
        x = circulant_decompose(catalogue.circulant_form("C6"))
        assert np.allclose(x, [1, 1j / d, -1 / d, -1j, -d, 1j * d], atol=1e-15)

    def test_c13_sign_pattern(self):
        c = catalogue.CONSTANTS.c_C13
        x = circulant_decompose(catalogue.circulant_form("C13A"))
        shape = [1, c, c.conjugate(), c, c, c.conjugate(), c.conjugate(), c.conjugate(), c.conjugate(),
                 c, c, c.conjugate(), c]
        assert np.allclose(x, shape, atol=1e-15)

    def test_not_circulant(self):
        assert circulant_decompose(F(4)) is None
