import math
import zlib

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
import printed
from chm import catalogue
from chm.analysis import circulant_decompose, is_hadamard, log_phases
from chm.catalogue import CONSTANTS, Kind
from chm.construct import ArityError, affine_eval

ALL = catalogue.list_entries()
angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False)


def random_member(e, rng):
    return catalogue.get(e.id, list(rng.uniform(0, 2 * math.pi, e.param_count)))


class TestFourier:
    def test_small(self):
        assert np.array_equal(catalogue.fourier(1).values, [[1]])
        assert np.array_equal(catalogue.fourier(2).values, [[1, 1], [1, -1]])
        assert np.array_equal(catalogue.fourier(4).values,
                              [[1, 1, 1, 1], [1, 1j, -1, -1j], [1, -1, 1, -1], [1, -1j, -1, 1j]])

    @pytest.mark.parametrize("n", range(1, 17))
    def test_matches_oracle(self, n):
        F = catalogue.fourier(n)
        assert F.is_exact
        assert np.allclose(F.values, oracles.fourier(n), atol=1e-13)

    def test_rejects_zero(self):
        with pytest.raises(catalogue.CatalogueError):
            catalogue.fourier(0)


class TestIndex:
    def test_seven_f12_families(self):
        ids = {e.id for e in ALL if e.n == 12 and e.id.startswith("F12")}
        assert ids == {"F12A", "F12B", "F12C", "F12D", "F12BT", "F12CT", "F12DT"}

    def test_cc14_pairs(self):
        ids = {e.id for e in ALL if e.id.startswith("CC14")}
        letters = "ABCD"
        assert ids == {f"CC14{letters[i]}{letters[j]}" for i in range(4) for j in range(i, 4)}

    @pytest.mark.parametrize("eid, count", [
        ("F4", 1), ("F6", 2), ("F8", 5), ("F9", 4), ("F10", 4), ("F16", 17), ("D6", 1), ("P7", 1),
        ("F12A", 9), ("FD12", 8), ("FC12", 7), ("DD12", 7), ("CC12", 5), ("PP14", 8), ("CC14AB", 6),
        ("S6", 0), ("C6", 0), ("N11", 0), ("P13", 2),
    ])
    def test_param_counts(self, eid, count):
        assert catalogue.entry(eid).param_count == count

    def test_sorted_by_size(self):
        sizes = [e.n for e in ALL]
        assert sizes == sorted(sizes)

    def test_unknown_id(self):
        with pytest.raises(catalogue.UnknownEntryError):
            catalogue.get("F99")

    def test_bad_arity(self):
        with pytest.raises(ArityError):
            catalogue.get("F6", [0.1])

    def test_family_only_for_affine(self):
        with pytest.raises(catalogue.CatalogueError):
            catalogue.get_family("P13")
        with pytest.raises(catalogue.CatalogueError):
            catalogue.get_family("S6")

    def test_c6_makes_no_isolation_claim(self):
        e = catalogue.entry("C6")
        assert e.kind is Kind.ISOLATED_CANDIDATE
        assert "not known" in e.notes


class TestEveryEntry:
    @pytest.mark.parametrize("e", ALL, ids=lambda e: e.id)
    def test_hadamard_and_dephased(self, e):
        rng = np.random.default_rng(zlib.crc32(e.id.encode()))
        for _ in range(5):
            M = random_member(e, rng)
            assert M.n == e.n
            assert is_hadamard(M, e.hadamard_tol).passed
            assert oracles.is_hadamard(M.values, e.hadamard_tol)
            assert M.is_dephased()
            assert all(M.exact_turn(0, k) == 0 and M.exact_turn(k, 0) == 0 for k in range(M.n))

    def test_strict_tolerance_except_printed_approximations(self):
        loose = {e.id for e in ALL if e.tolerance is not None}
        built_on_c7cd = {"FC14C", "FC14D", "PC14C", "PC14D", "CC14AC", "CC14AD", "CC14BC", "CC14BD",
                         "CC14CC", "CC14CD", "CC14DD"}
        assert loose == {"C7C", "C7D"} | built_on_c7cd
        for e in ALL:
            if e.tolerance is None:
                assert e.hadamard_tol == pytest.approx(1e-10 * e.n)


class TestPatterns:
    def test_f4_pattern(self):
        (R,) = catalogue.get_family("F4").patterns
        expected = np.zeros((4, 4))
        expected[np.ix_([1, 3], [1, 3])] = 1
        assert np.array_equal(R, expected)

    def test_f9_block_repetition(self):
        F = catalogue.get_family("F9")
        assert F.dimension == 4
        for R in F.patterns:
            # the same cell pattern repeats across the 3x3 grid of 3x3 blocks
            assert R.any()
            for r in range(1, 3):
                for c in range(1, 3):
                    cells = R[np.ix_([r, r + 3, r + 6], [c, c + 3, c + 6])]
                    assert np.array_equal(cells, np.full((3, 3), R[r, c]))

    def test_f16_patterns(self):
        F = catalogue.get_family("F16")
        assert F.dimension == 17
        stack = np.array([R.ravel() for R in F.patterns])
        assert np.linalg.matrix_rank(stack) == 17
        # some cells combine three parameters, such as e - a + k
        assert np.max(np.sum(stack != 0, axis=0)) >= 3

    def test_f16_ambiguous_cell(self):
        """Row 8, column 16 reads g-c+m+r-k; flipping the sign of m breaks unitarity."""
        F = catalogue.get_family("F16")
        names = catalogue.entry("F16").param_names
        coeffs = {n: F.patterns[k][7, 15] for k, n in enumerate(names) if F.patterns[k][7, 15]}
        assert coeffs == {"g": 1, "c": -1, "m": 1, "r": 1, "k": -1}
        patterns = [R.copy() for R in F.patterns]
        patterns[names.index("m")][7, 15] = -1
        rng = np.random.default_rng(3)
        x = rng.uniform(0, 2 * math.pi, 17)
        R = sum(a * P for a, P in zip(x, patterns))
        assert not oracles.is_hadamard(F.base.values * np.exp(1j * R), 1e-6)

    def test_f8_dependent_cell(self):
        F = catalogue.get_family("F8")
        names = catalogue.entry("F8").param_names
        cell = {n: F.patterns[k][3, 3] for k, n in enumerate(names) if F.patterns[k][3, 3]}
        assert cell == {"c": 1, "a": -1, "e": 1}

    def test_zero_parameters_give_base(self):
        assert catalogue.get("F6", [0, 0]).same_phases(catalogue.fourier(6))
        assert catalogue.get("F16", [0] * 17).same_phases(catalogue.fourier(16))

    @given(angles, angles)
    def test_transposed_f6(self, a, b):
        A = catalogue.get("F6T", [a, b])
        B = catalogue.get("F6", [a, b]).transpose()
        assert np.array_equal(A.values, B.values)


class TestStructure:
    def test_d6_printed(self):
        assert catalogue.get("D6", [0]).allclose(printed.matrix(printed.D6, {}), atol=1e-15)

    @given(angles)
    def test_d6_transpose(self, c):
        assert np.max(np.abs(catalogue.get("D6", [-c]).values - catalogue.get("D6", [c]).values.T)) <= 1e-12

    def test_s6_log_phases(self):
        S6 = catalogue.get("S6")
        assert S6.is_exact
        assert np.array_equal(log_phases(S6).integer_matrix(3), printed.S6_THIRDS)

    def test_p7_sixth_roots(self):
        assert np.array_equal(log_phases(catalogue.get("P7", [0])).integer_matrix(6), printed.P7_SIXTHS)

    @given(angles)
    def test_p7_symmetric(self, a):
        P = catalogue.get("P7", [a])
        assert np.array_equal(P.values, P.values.T)

    @pytest.mark.parametrize("cid", ["C13A", "C13B"])
    def test_c13_symmetric(self, cid):
        C = catalogue.get(cid)
        assert np.array_equal(C.values, C.values.T)

    def test_c7b_conjugate(self):
        assert catalogue.get("C7B").same_phases(catalogue.get("C7A").conjugate())


class TestConstants:
    @pytest.mark.parametrize("name, b, c, upper", [
        ("d_C6", -(1 - math.sqrt(3)), 1, True),
        ("d_C7", 1.5, 1, True),
        ("e_C11", 5 / 3, 1, True),
        ("a_N11", 1.5, 1, False),
        ("c_C13", -(-1 + math.sqrt(13)) / 6, 1, True),
        ("d_C13", -(-1 - math.sqrt(13)) / 6, 1, True),
    ])
    def test_roots(self, name, b, c, upper):
        assert abs(getattr(CONSTANTS, name) - oracles.quadratic_root(b, c, upper)) < 1e-14

    def test_residuals(self):
        assert all(r < 1e-14 for r in CONSTANTS.residuals().values())
        assert all(abs(m - 1) < 1e-15 for m in CONSTANTS.moduli().values())

    def test_petrescu_g(self):
        assert catalogue.petrescu_G(0) == pytest.approx(0, abs=1e-15)
        assert catalogue.petrescu_G(math.pi) == pytest.approx(-math.pi / 3, abs=1e-15)

    @given(angles, angles)
    def test_p13_hadamard(self, e, f):
        assert oracles.is_hadamard(catalogue.get("P13", [e, f]).values, 13e-10)


C = CONSTANTS
PRINTED_TABLES = [
    ("C6", printed.C6, {"d": C.d_C6}, 1e-14),
    ("C7A", printed.C7A, {"d": C.d_C7}, 1e-14),
    ("C7B", printed.C7B, {"d": C.d_C7}, 1e-14),
    ("C7C", printed.C7C, dict(zip("abc", C.abc_C7C)), 1e-14),
    ("C11A", printed.C11A, {"e": C.e_C11}, 1e-14),
    ("C11B", printed.C11B, {"e": C.e_C11}, 1e-14),
    ("C13A", printed.C13A, {"c": C.c_C13}, 1e-14),
    ("C13B", printed.C13B, {"d": C.d_C13}, 1e-14),
]


@pytest.mark.parametrize("cid, rows, symbols, tol", PRINTED_TABLES, ids=[t[0] for t in PRINTED_TABLES])
def test_printed_tables(cid, rows, symbols, tol):
    assert np.max(np.abs(catalogue.get(cid).values - printed.matrix(rows, symbols))) <= tol


@pytest.mark.parametrize("cid, text, symbols", [
    ("C7A", printed.X_C7A, {"d": C.d_C7}),
    ("C11A", printed.X_C11A, {"e": C.e_C11}),
    ("C13A", printed.X_C13A, {"c": C.c_C13}),
])
def test_circulant_seeds(cid, text, symbols):
    x = np.array([printed.cell_value(t, symbols) for t in text.split()])
    assert np.allclose(circulant_decompose(catalogue.circulant_form(cid)), x, atol=1e-14)


def test_affine_eval_matches_get():
    F = catalogue.get_family("F10")
    p = [0.1, 0.2, 0.3, 0.4]
    assert np.array_equal(affine_eval(F, p).values, catalogue.get("F10", p).values)
