"""Named complex Hadamard matrices and families for N = 1..16.

Every generator returns a dephased matrix.  Phases are exact rationals of a
turn wherever the entry is a root of unity; entries built from the algebraic
constants below carry floating values only.

Pattern grids are written as whitespace-separated cells, ``.`` for zero and
linear expressions such as ``c-a+e`` otherwise.
"""

from __future__ import annotations

import cmath
import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .analysis import dephase
from .construct import ArityError, affine_eval, circulant, constant_family, dita_family
from .core import TWO_PI, AffineFamily, HadamardMatrix, Meta, PhaseValue

__all__ = [
    "AlgebraicConstants", "CONSTANTS", "CatalogueEntry", "CatalogueError", "Kind",
    "UnknownEntryError", "circulant_form", "circulant_vector", "entry", "fourier", "get",
    "get_family", "list_entries", "petrescu_G",
]


class CatalogueError(ValueError):
    pass


class UnknownEntryError(CatalogueError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class Kind(str, enum.Enum):
    ISOLATED_CANDIDATE = "isolated-candidate"
    AFFINE_FAMILY = "affine-family"
    NONLINEAR_FAMILY = "nonlinear-family"


APPROXIMATE_TOL = 1e-4


@dataclass(frozen=True)
class CatalogueEntry:
    id: str
    n: int
    param_count: int
    kind: Kind
    param_names: tuple[str, ...] = ()
    description: str = ""
    notes: str = ""
    # Hadamard tolerance the entry is guaranteed to meet; None means 1e-10 * n
    tolerance: float | None = None

    @property
    def hadamard_tol(self) -> float:
        return self.tolerance if self.tolerance is not None else 1e-10 * self.n


# -- algebraic constants ------------------------------------------------------

_C7C_ANGLES = (4.312839, 1.356228, 1.900668)


@dataclass(frozen=True)
class AlgebraicConstants:
    """Non-root-of-unity constants used by the catalogue, with their defining relations."""

    d_C6: complex = complex((1 - math.sqrt(3)) / 2, math.sqrt(math.sqrt(3) / 2))
    d_C7: complex = complex(-3 / 4, math.sqrt(7) / 4)
    abc_C7C: tuple[complex, complex, complex] = tuple(cmath.exp(1j * t) for t in _C7C_ANGLES)
    e_C11: complex = complex(-5 / 6, math.sqrt(11) / 6)
    a_N11: complex = complex(-3 / 4, -math.sqrt(7) / 4)
    c_C13: complex = complex((-1 + math.sqrt(13)) / 12, math.sqrt(130 + 2 * math.sqrt(13)) / 12)
    d_C13: complex = complex((-1 - math.sqrt(13)) / 12, math.sqrt(130 - 2 * math.sqrt(13)) / 12)

    @property
    def ABC_C7C(self) -> tuple[complex, complex, complex]:
        a, b, c = self.abc_C7C
        return a, a * b, a * b * c

    def residuals(self) -> dict[str, float]:
        """Absolute residual of each defining relation."""
        s13 = math.sqrt(13)
        d6, d7, e, a, c, d = self.d_C6, self.d_C7, self.e_C11, self.a_N11, self.c_C13, self.d_C13
        A, B, C = self.ABC_C7C
        ra, rb, rc = self.abc_C7C
        return {
            "d_C6": abs(d6 * d6 - (1 - math.sqrt(3)) * d6 + 1),
            "d_C7": abs(d7 * d7 + 1.5 * d7 + 1),
            "ABC_C7C": max(abs(A - ra), abs(B - ra * rb), abs(C - ra * rb * rc)),
            "e_C11": abs(e * e + (5 / 3) * e + 1),
            "a_N11": abs(a * a + 1.5 * a + 1),
            "c_C13": abs(c * c - ((-1 + s13) / 6) * c + 1),
            "d_C13": abs(d * d - ((-1 - s13) / 6) * d + 1),
        }

    def moduli(self) -> dict[str, float]:
        return {name: abs(getattr(self, name))
                for name in ("d_C6", "d_C7", "e_C11", "a_N11", "c_C13", "d_C13")}


CONSTANTS = AlgebraicConstants()


def petrescu_G(f: float) -> float:
    """``arg(-cos(f)/2 + i (sqrt 2 / 4) sqrt(7 - cos 2f)) - 2 pi / 3``, principal branch."""
    z = complex(-math.cos(f) / 2, math.sqrt(2) / 4 * math.sqrt(7 - math.cos(2 * f)))
    return cmath.phase(z) - TWO_PI / 3


# -- grid parsing ------------------------------------------------------------

_TERM = re.compile(r"([+-]?)([A-Za-z]\w*)")


def _linear(cell: str) -> dict[str, int]:
    """``"c-a+e"`` -> {"c": 1, "a": -1, "e": 1}; ``"."`` -> {}."""
    cell = cell.replace(" ", "")
    if cell == ".":
        return {}
    out: dict[str, int] = {}
    pos = 0
    for m in _TERM.finditer(cell):
        if m.start() != pos:
            raise ValueError(f"cannot parse pattern cell {cell!r}")
        out[m.group(2)] = out.get(m.group(2), 0) + (-1 if m.group(1) == "-" else 1)
        pos = m.end()
    if pos != len(cell):
        raise ValueError(f"cannot parse pattern cell {cell!r}")
    return out


def _grid(rows: Sequence[str], down: int = 1, across: int = 1) -> list[list[str]]:
    tile = [r.split() for r in rows]
    return [row * across for _ in range(down) for row in tile]


def _patterns(cells: list[list[str]], names: Sequence[str]) -> tuple[np.ndarray, ...]:
    n = len(cells)
    mats = {k: np.zeros((n, n)) for k in names}
    for i, row in enumerate(cells):
        if len(row) != n:
            raise ValueError(f"pattern row {i} has {len(row)} cells, expected {n}")
        for j, cell in enumerate(row):
            for name, coeff in _linear(cell).items():
                mats[name][i, j] += coeff
    return tuple(mats[k] for k in names)


def _turn_grid(rows: Sequence[Sequence[int]], q: int, meta: Meta) -> HadamardMatrix:
    return HadamardMatrix.from_turns(rows, q, meta)


_POWER = re.compile(r"^(-)?(i)?\*?(?:([a-z])(?:\^(-?\d+))?|1)?$")


def _symbolic(rows: Sequence[str], symbols: dict[str, complex], meta: Meta) -> HadamardMatrix:
    """Rows of cells like ``1``, ``-1``, ``-i``, ``a^-2``, ``-a^-1``; exact where no symbol occurs."""
    values, turns = [], []
    for row in rows:
        vrow, trow = [], []
        for cell in row.split():
            if cell == "1":
                vrow.append(1)
                trow.append(Fraction(0))
                continue
            m = _POWER.match(cell)
            if not m:
                raise ValueError(f"cannot parse entry {cell!r}")
            sign, unit, sym, exp = m.groups()
            t = Fraction(1, 2) * bool(sign) + Fraction(1, 4) * bool(unit)
            if sym is None:
                vrow.append(0)
                trow.append(t % 1)
            else:
                v = (-1 if sign else 1) * (1j if unit else 1) * symbols[sym] ** int(exp or 1)
                vrow.append(v)
                trow.append(None)
        values.append(vrow)
        turns.append(trow)
    vals = np.array(values, dtype=complex)
    for i, trow in enumerate(turns):
        for j, t in enumerate(trow):
            if t is not None:
                vals[i, j] = PhaseValue(turns=t).to_complex()
    return HadamardMatrix(vals, tuple(map(tuple, turns)), meta)


# -- base matrices -------------------------------------------------------------

@lru_cache(maxsize=None)
def fourier(n: int) -> HadamardMatrix:
    """Unscaled Fourier matrix with entries ``w^(jk)``, ``w = exp(2 pi i / n)``."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise CatalogueError(f"Fourier dimension must be a positive integer, got {n!r}")
    n = int(n)
    return _turn_grid([[(j * k) % n for k in range(n)] for j in range(n)], n, Meta(f"F{n}"))


_D6_QUARTERS = [
    [0, 0, 0, 0, 0, 0],
    [0, 2, 1, 3, 3, 1],
    [0, 1, 2, 1, 3, 3],
    [0, 3, 1, 2, 1, 3],
    [0, 3, 3, 1, 2, 1],
    [0, 1, 3, 3, 1, 2],
]

_S6_THIRDS = [
    [0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 2, 2],
    [0, 1, 0, 2, 2, 1],
    [0, 1, 2, 0, 1, 2],
    [0, 2, 2, 1, 0, 1],
    [0, 2, 1, 2, 1, 0],
]

_P7_SIXTHS = [
    [0, 0, 0, 0, 0, 0, 0],
    [0, 1, 4, 5, 3, 3, 1],
    [0, 4, 1, 3, 5, 3, 1],
    [0, 5, 3, 1, 4, 1, 3],
    [0, 3, 5, 4, 1, 1, 3],
    [0, 3, 3, 1, 1, 4, 5],
    [0, 1, 1, 3, 3, 5, 4],
]

# cells are [-][i]t<k> with t = exp(2 pi i / 30)
_P13_CELLS = [
    "1 1 1 1 1 1 1 1 1 1 1 1 1",
    "1 -1 t10 -t5 t5 it5 -it5 it15 -it15 t16 t4 t22 t28",
    "1 t10 -1 t5 -t5 -it5 it5 -it15 it15 t16 t4 t22 t28",
    "1 -t5 t5 -1 t10 it15 -it15 it5 -it5 t4 t16 t28 t22",
    "1 t5 -t5 t10 -1 -it15 it15 -it5 it5 t4 t16 t28 t22",
    "1 it5 -it5 it25 -it25 -1 t10 -t5 t5 t22 t28 t4 t16",
    "1 -it5 it5 -it25 it25 t10 -1 t5 -t5 t22 t28 t4 t16",
    "1 it25 -it25 it5 -it5 -t5 t5 -1 t10 t28 t22 t16 t4",
    "1 -it25 it25 -it5 it5 t5 -t5 t10 -1 t28 t22 t16 t4",
    "1 t4 t4 t16 t16 t28 t28 t22 t22 t20 t10 t10 t10",
    "1 t16 t16 t4 t4 t22 t22 t28 t28 t10 t20 t10 t10",
    "1 t28 t28 t22 t22 t16 t16 t4 t4 t10 t10 t20 t10",
    "1 t22 t22 t28 t28 t4 t4 t16 t16 t10 t10 t10 t20",
]

_P13_CELL = re.compile(r"^(-)?(i)?t(\d+)$")


def _p13_turns() -> list[list[Fraction]]:
    rows = []
    for line in _P13_CELLS:
        row = []
        for cell in line.split():
            if cell in ("1", "-1"):
                row.append(Fraction(0 if cell == "1" else 1, 2))
                continue
            sign, unit, k = _P13_CELL.match(cell).groups()
            row.append((Fraction(int(k), 30) + Fraction(1, 2) * bool(sign) + Fraction(1, 4) * bool(unit)) % 1)
        rows.append(row)
    return rows


_N11_CELLS = [
    "1 1 1 1 1 1 1 1 1 1 1",
    "1 a -a -a -a -1 -1 -a^-1 -a^-1 -1 -1",
    "1 -a a -a -a -1 -1 -1 -1 -a^-1 -a^-1",
    "1 -a -a -1 a -1 -a -a^-1 -1 -a^-1 -1",
    "1 -a -a a -1 -a -1 -1 -a^-1 -1 -a^-1",
    "1 -1 -1 -1 -a -a 1 -a^-1 -1 -1 -a^-1",
    "1 -1 -1 -a -1 1 -a -1 -a^-1 -a^-1 -1",
    "1 -a^-1 -1 -a^-1 -1 -a^-1 -1 -a^-1 a^-1 -a^-2 -a^-2",
    "1 -a^-1 -1 -1 -a^-1 -1 -a^-1 a^-1 -a^-1 -a^-2 -a^-2",
    "1 -1 -a^-1 -a^-1 -1 -1 -a^-1 -a^-2 -a^-2 -a^-2 a^-2",
    "1 -1 -a^-1 -1 -a^-1 -a^-1 -1 -a^-2 -a^-2 a^-2 -a^-2",
]


def _conj_all(xs):
    return [complex(x).conjugate() for x in xs]


def _circulant_vectors() -> dict[str, list[complex]]:
    k = CONSTANTS
    d6 = k.d_C6
    d7 = k.d_C7
    A, B, C = k.ABC_C7C
    e = k.e_C11
    c13, d13 = k.c_C13, k.d_C13
    out = {
        "C6": [1, 1j / d6, -1 / d6, -1j, -d6, 1j * d6],
        "C7A": [1, 1, 1, d7, 1, d7, d7],
        "C7C": [1, A, B, C, C, B, A],
        "C11A": [1, 1, e, 1, 1, 1, e, e, e, 1, e],
    }
    out["C7B"] = _conj_all(out["C7A"])
    out["C7D"] = _conj_all(out["C7C"])
    out["C11B"] = _conj_all(out["C11A"])
    shape13 = [0, 1, -1, 1, 1, -1, -1, -1, -1, 1, 1, -1, 1]
    for key, z in (("C13A", c13), ("C13B", d13)):
        out[key] = [1 if s == 0 else (z if s > 0 else z.conjugate()) for s in shape13]
    return out


_CIRCULANTS = _circulant_vectors()


def circulant_vector(id: str) -> np.ndarray:
    """The defining vector x of a circulant entry (``C_ij = x[(i - j) mod N]``)."""
    try:
        return np.array(_CIRCULANTS[id], dtype=complex)
    except KeyError:
        raise UnknownEntryError(f"{id!r} is not a circulant catalogue entry") from None


def circulant_form(id: str) -> HadamardMatrix:
    """The circulant (not dephased) representative of a circulant entry."""
    return circulant(circulant_vector(id), Meta(id + "~"))


def _dephased_circulant(id: str) -> HadamardMatrix:
    return dephase(circulant_form(id)).h.with_meta(name=id, trace=())


# -- phase patterns -------------------------------------------------------------

_LETTERS = "abcdefghijklmnopr"

_F_PATTERNS: dict[int, tuple[list[list[str]], tuple[str, ...]]] = {
    4: (_grid([". .", ". a"], 2, 2), ("a",)),
    6: (_grid([". . .", ". a b"], 3, 2), tuple("ab")),
    8: (_grid([". . . .", ". a b c", ". d . d", ". e b c-a+e"], 2, 2), tuple("abcde")),
    9: (_grid([". . .", ". a b", ". c d"], 3, 3), tuple("abcd")),
    10: (_grid([". . . . .", ". a b c d"], 5, 2), tuple("abcd")),
    14: (_grid([". . . . . . .", ". a b c d e f"], 7, 2), tuple("abcdef")),
    15: (_grid([". . . . .", ". a b c d", ". e f g h"], 5, 3), tuple("abcdefgh")),
    16: (_grid([
        ". . . . . . . .",
        ". a b c d e f g",
        ". h i j . h i j",
        ". k l m d e-a+k f-b+l g-c+m",
        ". n . n . n . n",
        ". o b c-a+o d e-a+o f g-a+o",
        ". p i j-h+p . p i j-h+p",
        ". r l m-k+r d e-a+r f-b+l g-c+m+r-k",
    ], 2, 2), tuple(_LETTERS)),
}

_F12_PATTERNS: dict[str, list[list[str]]] = {
    "A": _grid([
        ". . . . . .",
        ". a b c d e",
        ". f . f . f",
        ". g b c-a+g d e-a+g",
        ". h . h . h",
        ". i b c-a+i d e-a+i",
    ], 2, 2),
    "B": _grid([
        ". . . . . .",
        ". a b c d e",
        ". f g . f g",
        ". h i c d-a+h e-b+i",
    ], 3, 2),
    "C": _grid([
        ". . . . . . . . . . . .",
        ". a b c . d b a . c b d",
        ". e f e . e f e . e f e",
        ". g . c-a+g . d-a+g . g . c-a+g . d-a+g",
        ". h b h . h b h . h b h",
        ". i f c-a+i . d-a+i f i . c-a+i f d-a+i",
    ], 2, 1),
    "D": _grid([
        ". . . . . . . . . . . .",
        ". a b c d a . c b a d c",
        ". e . f . e . f . e . f",
        ". g b g d g . g b g d g",
        ". h . c-a+h . h . c-a+h . h . c-a+h",
        ". i b f-e+i d i . f-e+i b i d f-e+i",
    ], 2, 1),
}

_D6_PATTERN = _grid([
    ". . . . . .",
    ". . . . . .",
    ". . . c c .",
    ". . -c . . -c",
    ". . -c . . -c",
    ". . . c c .",
])

_P7_PATTERN = _grid([
    ". . . . . . .",
    ". a a . . . .",
    ". a a . . . .",
    ". . . -a -a . .",
    ". . . -a -a . .",
    ". . . . . . .",
    ". . . . . . .",
])

_P13_PATTERN = _grid([
    ". . . . . . . . . . . . .",
    ". . . f f e e e+G e+G . . . .",
    ". . . f f e e e+G e+G . . . .",
    ". f f . . e+G e+G e e . . . .",
    ". f f . . e+G e+G e e . . . .",
    ". -e -e -e-G -e-G . . -f -f . . . .",
    ". -e -e -e-G -e-G . . -f -f . . . .",
    ". -e-G -e-G -e -e -f -f . . . . . .",
    ". -e-G -e-G -e -e -f -f . . . . . .",
    ". . . . . . . . . . . . .",
    ". . . . . . . . . . . . .",
    ". . . . . . . . . . . . .",
    ". . . . . . . . . . . . .",
])


# -- registry --------------------------------------------------------------------

@dataclass(frozen=True)
class _Spec:
    entry: CatalogueEntry
    family: Callable[[], AffineFamily] | None = None
    matrix: Callable[[], HadamardMatrix] | None = None


_REGISTRY: dict[str, _Spec] = {}


def _register(entry: CatalogueEntry, family=None, matrix=None) -> None:
    _REGISTRY[entry.id] = _Spec(entry, family and lru_cache(maxsize=None)(family),
                                matrix and lru_cache(maxsize=None)(matrix))


def _affine(id: str, n: int, make: Callable[[], AffineFamily], count: int, description: str,
            notes: str = "", tolerance: float | None = None) -> None:
    def build() -> AffineFamily:
        F = make()
        if F.dimension != count:
            raise AssertionError(f"{id}: built {F.dimension} parameters, expected {count}")
        return F

    names = tuple(make().param_names) if count else ()
    kind = Kind.AFFINE_FAMILY if count else Kind.ISOLATED_CANDIDATE
    _register(CatalogueEntry(id, n, count, kind, names, description, notes, tolerance), family=build)


def _named(M: HadamardMatrix, name: str) -> HadamardMatrix:
    return M.with_meta(name=name, trace=())


def _fourier_family(n: int, transposed: bool = False) -> AffineFamily:
    base = fourier(n)
    if n not in _F_PATTERNS:
        return constant_family(base)
    cells, names = _F_PATTERNS[n]
    F = AffineFamily(base, _patterns(cells, names), names, f"F{n}")
    return F.transpose() if transposed else F


def _f12_family(letter: str, transposed: bool = False) -> AffineFamily:
    names = tuple("abcdefghi")
    F = AffineFamily(fourier(12), _patterns(_F12_PATTERNS[letter], names), names, f"F12{letter}")
    return F.transpose() if transposed else F


def _d6_family() -> AffineFamily:
    base = _turn_grid(_D6_QUARTERS, 4, Meta("D6"))
    return AffineFamily(base, _patterns(_D6_PATTERN, ("c",)), ("c",), "D6")


def _p7_family() -> AffineFamily:
    base = _turn_grid(_P7_SIXTHS, 6, Meta("P7"))
    return AffineFamily(base, _patterns(_P7_PATTERN, ("a",)), ("a",), "P7")


def _fixed(make: Callable[[], HadamardMatrix]) -> Callable[[], AffineFamily]:
    return lambda: constant_family(make())


def _s6() -> HadamardMatrix:
    return _turn_grid(_S6_THIRDS, 3, Meta("S6"))


def _n11() -> HadamardMatrix:
    return _symbolic(_N11_CELLS, {"a": CONSTANTS.a_N11}, Meta("N11"))


def _p13_base() -> HadamardMatrix:
    return HadamardMatrix.from_phases(_p13_turns(), Meta("P13"))


def _ingredient(id: str) -> AffineFamily:
    spec = _REGISTRY[id]
    return spec.family()


def _dita_entry(id: str, n: int, a: str, bs: Sequence[str], count: int, notes: str = "",
                tolerance: float | None = None) -> None:
    description = f"Dita composition of {a} with blocks {', '.join(bs)}"
    _affine(id, n, lambda: dita_family(_ingredient(a), [_ingredient(b) for b in bs], id),
            count, description, notes, tolerance)


_APPROX_NOTE = "built from six-digit printed constants; Hadamard only to about 1e-6"


def _populate() -> None:
    for n in range(1, 17):
        if n == 12:
            continue
        count = len(_F_PATTERNS[n][1]) if n in _F_PATTERNS else 0
        _affine(f"F{n}", n, (lambda n=n: _fourier_family(n)), count, f"Fourier matrix F{n}"
                + (" with its maximal affine family" if count else ""))
        if n in (6, 10, 14, 15):
            _affine(f"F{n}T", n, (lambda n=n: _fourier_family(n, True)), count,
                    f"transposed affine family through F{n}")
    for letter in "ABCD":
        _affine(f"F12{letter}", 12, (lambda l=letter: _f12_family(l)), 9,
                f"affine family {letter} through F12")
    for letter in "BCD":
        _affine(f"F12{letter}T", 12, (lambda l=letter: _f12_family(l, True)), 9,
                f"transpose of affine family {letter} through F12")

    _affine("D6", 6, _d6_family, 1, "symmetric one-parameter family through D6")
    _affine("C6", 6, _fixed(lambda: _dephased_circulant("C6")), 0,
            "dephased cyclic 6-roots matrix", "defect 4; whether it is isolated is not known")
    _affine("S6", 6, _fixed(_s6), 0, "spectral-set Butson matrix H(3,6)", "defect 0, isolated")
    _affine("P7", 7, _p7_family, 1, "one-parameter family through a Butson H(6,7) matrix")
    for k in ("C7A", "C7B"):
        _affine(k, 7, _fixed(lambda k=k: _dephased_circulant(k)), 0, f"dephased cyclic 7-roots matrix {k[-1]}")
    for k in ("C7C", "C7D"):
        _affine(k, 7, _fixed(lambda k=k: _dephased_circulant(k)), 0,
                f"dephased cyclic 7-roots matrix {k[-1]}", _APPROX_NOTE, APPROXIMATE_TOL)
    for k in ("C11A", "C11B"):
        _affine(k, 11, _fixed(lambda k=k: _dephased_circulant(k)), 0, f"dephased cyclic 11-roots matrix {k[-1]}")
    _affine("N11", 11, _fixed(_n11), 0, "isolated 11x11 matrix with constant a", "defect 0")
    _register(CatalogueEntry("P13", 13, 2, Kind.NONLINEAR_FAMILY, ("e", "f"),
                             "two-parameter family through a Butson H(60,13) matrix",
                             "phase G(f) enters nonlinearly"))
    for k in ("C13A", "C13B"):
        _affine(k, 13, _fixed(lambda k=k: _dephased_circulant(k)), 0, f"dephased cyclic 13-roots matrix {k[-1]}")

    for id, b1, b2, count in (("FD12", "F6", "D6", 8), ("FC12", "F6", "C6", 7), ("FS12", "F6", "S6", 7),
                              ("DD12", "D6", "D6", 7), ("DC12", "D6", "C6", 6), ("DS12", "D6", "S6", 6),
                              ("CC12", "C6", "C6", 5), ("CS12", "C6", "S6", 5), ("SS12", "S6", "S6", 5)):
        _dita_entry(id, 12, "F2", (b1, b2), count)

    def approx(*ids):
        return APPROXIMATE_TOL if any(i in ("C7C", "C7D") for i in ids) else None

    _dita_entry("FP14", 14, "F2", ("F7", "P7"), 7)
    _dita_entry("PP14", 14, "F2", ("P7", "P7"), 8)
    for k in "ABCD":
        c = "C7" + k
        note = "inherits " + _APPROX_NOTE if approx(c) else ""
        _dita_entry("FC14" + k, 14, "F2", ("F7", c), 6, note, approx(c))
        _dita_entry("PC14" + k, 14, "F2", ("P7", c), 7, note, approx(c))
    letters = "ABCD"
    for i, l in enumerate(letters):
        for m in letters[i:]:
            cl, cm = "C7" + l, "C7" + m
            note = "inherits " + _APPROX_NOTE if approx(cl, cm) else ""
            _dita_entry(f"CC14{l}{m}", 14, "F2", (cl, cm), 6, note, approx(cl, cm))


_populate()


# -- public API -------------------------------------------------------------------

def _spec(id: str) -> _Spec:
    try:
        return _REGISTRY[id]
    except KeyError:
        raise UnknownEntryError(f"unknown catalogue id {id!r}") from None


def list_entries() -> list[CatalogueEntry]:
    """All entries, ordered by dimension and then by registration order."""
    order = {k: t for t, k in enumerate(_REGISTRY)}
    return sorted((s.entry for s in _REGISTRY.values()), key=lambda e: (e.n, order[e.id]))


def entry(id: str) -> CatalogueEntry:
    return _spec(id).entry


def get_family(id: str) -> AffineFamily:
    """The affine family behind a parametric entry."""
    spec = _spec(id)
    if spec.entry.kind is not Kind.AFFINE_FAMILY:
        raise CatalogueError(f"{id} is {spec.entry.kind.value}, not an affine family")
    return spec.family()


@lru_cache(maxsize=None)
def _p13_family() -> AffineFamily:
    names = ("e", "f", "G")
    return AffineFamily(_p13_base(), _patterns(_P13_PATTERN, names), names, "P13")


def _p13(params: Sequence) -> HadamardMatrix:
    e, f = (p.angle if isinstance(p, PhaseValue) else float(p) for p in params)
    g = petrescu_G(f)
    M = affine_eval(_p13_family(), [e, f, g if g != 0 else 0.0])
    return M.with_meta(params=(("e", e), ("f", f)))


def get(id: str, params: Sequence = ()) -> HadamardMatrix:
    """The dephased matrix of entry ``id`` at ``params`` (radians, or PhaseValue)."""
    spec = _spec(id)
    params = list(params)
    if len(params) != spec.entry.param_count:
        raise ArityError(f"{id} takes {spec.entry.param_count} parameters, got {len(params)}")
    if spec.entry.kind is Kind.NONLINEAR_FAMILY:
        return _p13(params)
    F = spec.family()
    if not params:
        return F.base.with_meta(name=id)
    return affine_eval(F, params).with_meta(name=id)
