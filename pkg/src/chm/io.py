"""JSON interchange documents (``.chm.json``, format version "1").

A matrix document stores either exact phases in turns (``"p/q"`` strings in
lowest terms, or floats for approximate turns) or complex entries as
``{"re": .., "im": ..}``.  Floats are written with Python's shortest
round-trip repr, so values survive a round trip bit for bit.  Indices in all
documents are 0-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

import numpy as np

from .analysis import DefectReport, HadamardReport, InvariantSet, Outcome, SearchResult
from .construct import PatternSpace
from .core import (EPS_UNIMOD, TWO_PI, AffineFamily, DiagonalPhase, EquivalenceWitness,
                   HadamardMatrix, Meta, PermutationVector, PhaseValue)

FORMAT_VERSION = "1"
FILE_SUFFIX = ".chm.json"
REPRESENTATIONS = ("phases_turns", "entries")

__all__ = [
    "DocumentError", "FORMAT_VERSION", "MatrixDocument", "FamilyDocument", "ReportDocument",
    "WitnessDocument", "dumps", "parse", "serialize", "load_matrix", "load_family",
    "load_witness", "to_document",
]


class DocumentError(ValueError):
    """Invalid document; ``path`` locates the offending field (e.g. ``entries[1][2].re``)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class DocumentUnimodularityError(DocumentError):
    pass


TurnCell = Union[Fraction, float]


@dataclass(frozen=True)
class DocumentMeta:
    name: str = ""
    params: tuple[tuple[str, Any], ...] = ()
    notes: str = ""


@dataclass(frozen=True)
class MatrixDocument:
    n: int
    representation: str
    phases_turns: tuple[tuple[TurnCell, ...], ...] | None = None
    entries: tuple[tuple[complex, ...], ...] | None = None
    meta: DocumentMeta = field(default_factory=DocumentMeta)
    format_version: str = FORMAT_VERSION

    @classmethod
    def from_matrix(cls, M: HadamardMatrix, notes: str = "") -> MatrixDocument:
        meta = DocumentMeta(M.meta.name, tuple(M.meta.params), notes or " > ".join(M.meta.trace))
        if M.is_exact:
            return cls(M.n, "phases_turns", phases_turns=M.turns, meta=meta)
        entries = tuple(tuple(complex(z) for z in row) for row in M.values)
        return cls(M.n, "entries", entries=entries, meta=meta)

    def to_matrix(self, eps: float = EPS_UNIMOD) -> HadamardMatrix:
        trace = tuple(self.meta.notes.split(" > ")) if self.meta.notes else ()
        meta = Meta(self.meta.name, self.meta.params, trace)
        if self.representation == "entries":
            return HadamardMatrix(self.entries, None, meta, eps)
        values = [[PhaseValue(turns=t).to_complex() if isinstance(t, Fraction) else _turn_value(t)
                   for t in row] for row in self.phases_turns]
        turns = tuple(tuple(t if isinstance(t, Fraction) else None for t in row) for row in self.phases_turns)
        return HadamardMatrix(values, turns, meta, eps)


@dataclass(frozen=True)
class FamilyDocument:
    base: MatrixDocument
    patterns: tuple[tuple[tuple[float, ...], ...], ...]
    param_names: tuple[str, ...]
    name: str = ""
    format_version: str = FORMAT_VERSION

    def to_family(self) -> AffineFamily:
        return AffineFamily(self.base.to_matrix(), tuple(np.array(P, dtype=float) for P in self.patterns),
                            self.param_names, self.name)


@dataclass(frozen=True)
class WitnessDocument:
    n: int
    d1: tuple[PhaseValue, ...]
    p1: tuple[int, ...]
    p2: tuple[int, ...]
    d2: tuple[PhaseValue, ...]
    format_version: str = FORMAT_VERSION

    def to_witness(self) -> EquivalenceWitness:
        return EquivalenceWitness(DiagonalPhase(self.d1), PermutationVector(self.p1),
                                  PermutationVector(self.p2), DiagonalPhase(self.d2))


@dataclass(frozen=True)
class ReportDocument:
    """A report with a ``kind`` tag and a plain JSON body (kept as parsed)."""

    kind: str
    body: tuple[tuple[str, Any], ...]
    format_version: str = FORMAT_VERSION

    def get(self, key: str, default=None):
        return dict(self.body).get(key, default)


Document = Union[MatrixDocument, FamilyDocument, WitnessDocument, ReportDocument]

REPORT_KINDS = ("hadamard_report", "defect_report", "invariants", "search_result", "pattern_spaces")


# -- encoding ----------------------------------------------------------------

def _turn_str(t: Fraction) -> str:
    return f"{t.numerator}/{t.denominator}"


def _turn_value(t: TurnCell) -> complex:
    return complex(math.cos(TWO_PI * float(t)), math.sin(TWO_PI * float(t)))


def _cell(t: TurnCell):
    return _turn_str(t) if isinstance(t, Fraction) else float(t)


def _phase(p: PhaseValue):
    return _turn_str(p.turns) if p.is_exact else {"radians": float(p.radians)}


def _meta(meta: DocumentMeta) -> dict:
    return {"name": meta.name,
            "params": [{"name": k, "value": v} for k, v in meta.params],
            "notes": meta.notes}


def _matrix_body(doc: MatrixDocument) -> dict:
    body = {"format_version": doc.format_version, "kind": "matrix", "n": doc.n,
            "representation": doc.representation, "meta": _meta(doc.meta)}
    if doc.representation == "phases_turns":
        body["phases_turns"] = [[_cell(t) for t in row] for row in doc.phases_turns]
    else:
        body["entries"] = [[{"re": z.real, "im": z.imag} for z in row] for row in doc.entries]
    return body


def _encode(doc: Document) -> dict:
    if isinstance(doc, MatrixDocument):
        return _matrix_body(doc)
    if isinstance(doc, FamilyDocument):
        return {"format_version": doc.format_version, "kind": "family", "name": doc.name,
                "param_names": list(doc.param_names), "base": _matrix_body(doc.base),
                "patterns": [[list(r) for r in P] for P in doc.patterns]}
    if isinstance(doc, WitnessDocument):
        return {"format_version": doc.format_version, "kind": "witness", "n": doc.n,
                "d1": [_phase(p) for p in doc.d1], "p1": list(doc.p1),
                "p2": list(doc.p2), "d2": [_phase(p) for p in doc.d2]}
    if isinstance(doc, ReportDocument):
        return {"format_version": doc.format_version, "kind": doc.kind, **dict(doc.body)}
    raise TypeError(f"cannot encode {type(doc).__name__}")


def _floats(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def to_document(obj) -> Document:
    """Wrap a library object in its document type."""
    if isinstance(obj, (MatrixDocument, FamilyDocument, WitnessDocument, ReportDocument)):
        return obj
    if isinstance(obj, HadamardMatrix):
        return MatrixDocument.from_matrix(obj)
    if isinstance(obj, AffineFamily):
        pats = tuple(tuple(tuple(float(x) for x in r) for r in P) for P in obj.patterns)
        return FamilyDocument(MatrixDocument.from_matrix(obj.base), pats, tuple(obj.param_names), obj.name)
    if isinstance(obj, EquivalenceWitness):
        return WitnessDocument(obj.n, obj.d1.phases, obj.p1.perm, obj.p2.perm, obj.d2.phases)
    if isinstance(obj, HadamardReport):
        return ReportDocument("hadamard_report", (
            ("passed", bool(obj.passed)), ("unimodular_deviation", float(obj.unimodular_deviation)),
            ("gram_deviation", float(obj.gram_deviation)), ("tol", float(obj.tol)),
            ("eps_unimod", float(obj.eps_unimod))))
    if isinstance(obj, DefectReport):
        exact = None
        if obj.exact_basis is not None:
            exact = [[[_turn_str(Fraction(x)) for x in row] for row in B] for B in obj.exact_basis]
        return ReportDocument("defect_report", (
            ("defect", int(obj.defect)), ("method", obj.method), ("svd_defect", int(obj.svd_defect)),
            ("threshold", float(obj.threshold)), ("singular_values", _floats(obj.singular_values)),
            ("kernel_basis", [_floats(B) for B in obj.kernel_basis]), ("exact_basis", exact)))
    if isinstance(obj, InvariantSet):
        return ReportDocument("invariants", (
            ("tol", float(obj.tol)),
            ("values", [{"re": v.real, "im": v.imag} for v in obj.values]),
            ("counts", [int(c) for c in obj.counts])))
    if isinstance(obj, SearchResult):
        w = None if obj.witness is None else _encode(to_document(obj.witness))
        return ReportDocument("search_result", (
            ("outcome", obj.outcome.value), ("nodes", int(obj.nodes)), ("witness", w)))
    if isinstance(obj, (list, tuple)) and all(isinstance(s, PatternSpace) for s in obj):
        return ReportDocument("pattern_spaces", (
            ("spaces", [{"dimension": s.dimension,
                         "basis": [[[str(Fraction(x)) for x in row] for row in B] for B in s.basis]}
                        for s in obj]),))
    raise TypeError(f"no document type for {type(obj).__name__}")


def serialize(obj) -> str:
    """Deterministic JSON text for a matrix, family, witness, report or document."""
    return json.dumps(_encode(to_document(obj)), sort_keys=True, indent=1, allow_nan=False) + "\n"


dumps = serialize


# -- decoding ----------------------------------------------------------------

def _require(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise DocumentError(_join(path, key), "missing field")
    value = obj[key]
    if (kind is not None and not isinstance(value, kind)) or (isinstance(value, bool) and kind is not bool):
        raise DocumentError(_join(path, key), f"expected {_kind_name(kind)}")
    return value


def _kind_name(kind) -> str:
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return kind.__name__


def _join(path: str, key) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def _parse_turn(cell, path: str) -> TurnCell:
    if isinstance(cell, str):
        try:
            num, den = cell.split("/")
            p, q = int(num), int(den)
        except ValueError:
            raise DocumentError(path, f"expected a rational 'p/q', got {cell!r}") from None
        if q <= 0:
            raise DocumentError(path, "denominator must be positive")
        if math.gcd(p, q) != 1:
            raise DocumentError(path, f"{cell!r} is not in lowest terms")
        t = Fraction(p, q)
        if not 0 <= t < 1:
            raise DocumentError(path, f"turn {cell!r} is outside [0, 1)")
        return t
    if isinstance(cell, (int, float)) and not isinstance(cell, bool):
        if not math.isfinite(cell):
            raise DocumentError(path, "turn must be finite")
        return float(cell)
    raise DocumentError(path, "expected a 'p/q' string or a number")


def _parse_number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise DocumentError(path, "expected a finite number")
    return float(x)


def _square(grid, n: int, path: str) -> list:
    if not isinstance(grid, list) or len(grid) != n:
        raise DocumentError(path, f"expected {n} rows")
    for i, row in enumerate(grid):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(_join(path, i), f"expected {n} cells")
    return grid


def _parse_meta(obj, path: str) -> DocumentMeta:
    if obj is None:
        return DocumentMeta()
    if not isinstance(obj, dict):
        raise DocumentError(path, "expected an object")
    name = obj.get("name", "")
    notes = obj.get("notes", "")
    if not isinstance(name, str):
        raise DocumentError(_join(path, "name"), "expected a string")
    if not isinstance(notes, str):
        raise DocumentError(_join(path, "notes"), "expected a string")
    params = obj.get("params", [])
    if not isinstance(params, list):
        raise DocumentError(_join(path, "params"), "expected a list")
    pairs = []
    for k, item in enumerate(params):
        p = _join(_join(path, "params"), k)
        if not isinstance(item, dict) or not isinstance(item.get("name"), str) or "value" not in item:
            raise DocumentError(p, "expected {name, value}")
        pairs.append((item["name"], item["value"]))
    return DocumentMeta(name, tuple(pairs), notes)


def _parse_matrix(obj: dict, path: str, eps: float) -> MatrixDocument:
    n = _require(obj, "n", int, path)
    if n < 1:
        raise DocumentError(_join(path, "n"), "dimension must be positive")
    rep = _require(obj, "representation", str, path)
    if rep not in REPRESENTATIONS:
        raise DocumentError(_join(path, "representation"), f"unknown representation {rep!r}")
    present = [k for k in REPRESENTATIONS if obj.get(k) is not None]
    if len(present) != 1:
        raise DocumentError(path, f"exactly one of {', '.join(REPRESENTATIONS)} must be set, found {present}")
    if present[0] != rep:
        raise DocumentError(_join(path, rep), "representation names a field that is not populated")
    meta = _parse_meta(obj.get("meta"), _join(path, "meta"))
    fpath = _join(path, rep)
    grid = _square(obj[rep], n, fpath)
    if rep == "phases_turns":
        cells = tuple(tuple(_parse_turn(c, _join(_join(fpath, i), j)) for j, c in enumerate(row))
                      for i, row in enumerate(grid))
        doc = MatrixDocument(n, rep, phases_turns=cells, meta=meta)
    else:
        rows = []
        for i, row in enumerate(grid):
            out = []
            for j, c in enumerate(row):
                cp = _join(_join(fpath, i), j)
                if not isinstance(c, dict) or set(c) != {"re", "im"}:
                    raise DocumentError(cp, "expected {re, im}")
                z = complex(_parse_number(c["re"], _join(cp, "re")), _parse_number(c["im"], _join(cp, "im")))
                if abs(abs(z) - 1) > eps:
                    raise DocumentUnimodularityError(cp, f"|entry| = {abs(z):.12g} is not 1")
                out.append(z)
            rows.append(tuple(out))
        doc = MatrixDocument(n, rep, entries=tuple(rows), meta=meta)
    return doc


def _parse_phase(x, path: str) -> PhaseValue:
    if isinstance(x, str):
        t = _parse_turn(x, path)
        return PhaseValue(turns=t)
    if isinstance(x, dict) and set(x) == {"radians"}:
        return PhaseValue.approx(_parse_number(x["radians"], _join(path, "radians")))
    raise DocumentError(path, "expected a 'p/q' string or {radians}")


def _parse_perm(x, n: int, path: str) -> tuple[int, ...]:
    if not isinstance(x, list) or sorted(x) != list(range(n)) or any(isinstance(v, bool) for v in x):
        raise DocumentError(path, f"expected a permutation of 0..{n - 1}")
    return tuple(x)


def _parse_witness(obj: dict, path: str) -> WitnessDocument:
    n = _require(obj, "n", int, path)
    parts = {}
    for key in ("d1", "d2"):
        seq = _require(obj, key, list, path)
        if len(seq) != n:
            raise DocumentError(_join(path, key), f"expected {n} phases")
        parts[key] = tuple(_parse_phase(x, _join(_join(path, key), i)) for i, x in enumerate(seq))
    for key in ("p1", "p2"):
        parts[key] = _parse_perm(_require(obj, key, list, path), n, _join(path, key))
    return WitnessDocument(n, parts["d1"], parts["p1"], parts["p2"], parts["d2"])


def _parse_family(obj: dict, path: str, eps: float) -> FamilyDocument:
    base_obj = _require(obj, "base", dict, path)
    base = _parse_matrix(base_obj, _join(path, "base"), eps)
    names = _require(obj, "param_names", list, path)
    pats = _require(obj, "patterns", list, path)
    if len(names) != len(pats) or not all(isinstance(s, str) for s in names):
        raise DocumentError(_join(path, "param_names"), "one string name per pattern is required")
    parsed = []
    for k, P in enumerate(pats):
        pp = _join(_join(path, "patterns"), k)
        _square(P, base.n, pp)
        parsed.append(tuple(tuple(_parse_number(x, _join(_join(pp, i), j)) for j, x in enumerate(row))
                            for i, row in enumerate(P)))
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise DocumentError(_join(path, "name"), "expected a string")
    return FamilyDocument(base, tuple(parsed), tuple(names), name)


def parse(text: str, eps: float = EPS_UNIMOD) -> Document:
    """Parse and validate a document; unimodularity of entries is re-checked."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("", f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise DocumentError("", "top level must be an object")
    version = _require(obj, "format_version", str, "")
    if version != FORMAT_VERSION:
        raise DocumentError("format_version", f"unsupported version {version!r}")
    kind = obj.get("kind", "matrix")
    if kind == "matrix":
        return _parse_matrix(obj, "", eps)
    if kind == "family":
        return _parse_family(obj, "", eps)
    if kind == "witness":
        return _parse_witness(obj, "")
    if kind in REPORT_KINDS:
        body = tuple((k, v) for k, v in obj.items() if k not in ("format_version", "kind"))
        return ReportDocument(kind, body)
    raise DocumentError("kind", f"unknown document kind {kind!r}")


def load_matrix(text: str, eps: float = EPS_UNIMOD) -> HadamardMatrix:
    doc = parse(text, eps)
    if not isinstance(doc, MatrixDocument):
        raise DocumentError("kind", "expected a matrix document")
    try:
        return doc.to_matrix(eps)
    except ValueError as exc:
        raise DocumentUnimodularityError("phases_turns", str(exc)) from None


def load_family(text: str) -> AffineFamily:
    doc = parse(text)
    if not isinstance(doc, FamilyDocument):
        raise DocumentError("kind", "expected a family document")
    return doc.to_family()


def load_witness(text: str) -> EquivalenceWitness:
    doc = parse(text)
    if isinstance(doc, ReportDocument) and doc.kind == "search_result" and doc.get("witness"):
        return _parse_witness(doc.get("witness"), "witness").to_witness()
    if not isinstance(doc, WitnessDocument):
        raise DocumentError("kind", "expected a witness document")
    return doc.to_witness()


def search_outcome(doc: ReportDocument) -> Outcome:
    return Outcome(doc.get("outcome"))
