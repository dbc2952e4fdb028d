import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chm import analysis, catalogue
from chm import io as chmio
from chm.construct import enumerate_patterns
from chm.core import DiagonalPhase, EquivalenceWitness, HadamardMatrix, PermutationVector, PhaseValue

angle = st.floats(min_value=-10, max_value=10, allow_nan=False)


def doc(**fields):
    base = {"format_version": "1", "kind": "matrix", "n": 1, "representation": "phases_turns",
            "phases_turns": [["0/1"]]}
    base.update(fields)
    return json.dumps({k: v for k, v in base.items() if v is not None})


class TestMatrix:
    def test_f2(self):
        body = json.loads(chmio.serialize(catalogue.fourier(2)))
        assert body["representation"] == "phases_turns"
        assert body["phases_turns"] == [["0/1", "0/1"], ["0/1", "1/2"]]
        assert "entries" not in body

    def test_c6_uses_entries(self):
        body = json.loads(chmio.serialize(catalogue.get("C6")))
        assert body["representation"] == "entries" and "phases_turns" not in body

    @given(st.lists(angle, min_size=17, max_size=17))
    def test_f16_bit_exact(self, xs):
        M = catalogue.get("F16", xs)
        text = chmio.serialize(M)
        back = chmio.load_matrix(text)
        assert np.array_equal(back.values, M.values)
        assert chmio.serialize(back) == text

    @pytest.mark.parametrize("eid", ["S6", "F12A", "P7", "C13A", "FC12"])
    @pytest.mark.parametrize("exact", [True, False])
    def test_round_trip(self, eid, exact):
        e = catalogue.entry(eid)
        params = [PhaseValue.exact(k, 24) if exact else 0.2 * k for k in range(e.param_count)]
        M = catalogue.get(eid, params)
        back = chmio.load_matrix(chmio.serialize(M))
        assert np.array_equal(back.values, M.values)
        assert back.meta.name == M.meta.name
        # partly exact matrices are written as entries, so per-cell turns survive only when all are known
        assert back.is_exact == M.is_exact
        if M.is_exact:
            assert back.turns == M.turns

    @given(st.lists(st.lists(st.fractions(0, 1, max_denominator=100).filter(lambda t: t < 1),
                             min_size=3, max_size=3), min_size=3, max_size=3))
    def test_rationals_exact(self, grid):
        M = HadamardMatrix.from_phases(grid)
        assert chmio.load_matrix(chmio.serialize(M)).turns == M.turns

    def test_minimal(self):
        assert chmio.load_matrix(doc()).values.tolist() == [[1]]

    def test_unimodularity(self):
        with pytest.raises(chmio.DocumentUnimodularityError) as err:
            chmio.load_matrix(doc(representation="entries", phases_turns=None,
                                  entries=[[{"re": 1.1, "im": 0.0}]]))
        assert err.value.path == "entries[0][0]"

    def test_both_representations(self):
        with pytest.raises(chmio.DocumentError):
            chmio.load_matrix(doc(entries=[[{"re": 1.0, "im": 0.0}]]))

    @pytest.mark.parametrize("cell, message", [("2/4", "lowest terms"), ("1/1", ""), ("-1/3", ""), ("x", "")])
    def test_bad_turns(self, cell, message):
        with pytest.raises(chmio.DocumentError) as err:
            chmio.load_matrix(doc(phases_turns=[[cell]]))
        assert message in str(err.value)
        assert err.value.path.startswith("phases_turns[0][0]")

    def test_bad_version(self):
        with pytest.raises(chmio.DocumentError) as err:
            chmio.parse(doc(format_version="2"))
        assert err.value.path == "format_version"

    def test_shape(self):
        with pytest.raises(chmio.DocumentError):
            chmio.load_matrix(doc(n=2))

    def test_malformed(self):
        with pytest.raises(chmio.DocumentError):
            chmio.parse("{")

    def test_deterministic(self):
        M = catalogue.get("D6", [0.25])
        assert chmio.serialize(M) == chmio.serialize(catalogue.get("D6", [0.25]))


class TestOtherDocuments:
    def test_family(self):
        F = catalogue.get_family("F6")
        G = chmio.load_family(chmio.serialize(F))
        assert G.param_names == F.param_names
        assert all(np.array_equal(a, b) for a, b in zip(G.patterns, F.patterns))
        assert G.base.same_phases(F.base)

    @given(st.permutations(range(5)), st.permutations(range(5)), st.lists(angle, min_size=5, max_size=5))
    def test_witness(self, p1, p2, xs):
        w = EquivalenceWitness(DiagonalPhase.from_radians(xs), PermutationVector(tuple(p1)),
                               PermutationVector(tuple(p2)),
                               DiagonalPhase(tuple(PhaseValue.exact(Fraction(k, 5)) for k in range(5))))
        assert chmio.load_witness(chmio.serialize(w)) == w

    def test_search_result(self):
        a = 1.1
        res = analysis.equivalence_search(catalogue.get("F4", [a]), catalogue.get("F4", [a + math.pi]))
        text = chmio.serialize(res)
        report = chmio.parse(text)
        assert chmio.search_outcome(report) is analysis.Outcome.FOUND
        assert chmio.load_witness(text) == res.witness

    def test_reports(self):
        M = catalogue.get("S6")
        for obj, kind in [(analysis.is_hadamard(M), "hadamard_report"), (analysis.defect(M), "defect_report"),
                          (analysis.haagerup_invariants(M), "invariants"),
                          ([S for _, S in enumerate_patterns(catalogue.fourier(4))], "pattern_spaces")]:
            text = chmio.serialize(obj)
            report = chmio.parse(text)
            assert report.kind == kind
            assert chmio.serialize(report) == text

    def test_defect_report_body(self):
        report = chmio.parse(chmio.serialize(analysis.defect(catalogue.fourier(6))))
        assert report.get("defect") == 4 and report.get("method") == "exact"

    def test_unknown_kind(self):
        with pytest.raises(chmio.DocumentError):
            chmio.parse(doc(kind="spreadsheet"))
