"""Phase arithmetic, matrix containers and the diagonal/permutation transforms.

Angles are kept either as exact rationals in turns (fractions of a full turn)
or as floating radians.  Matrices are stored unscaled: every entry has modulus
one and the Hadamard property reads ``H H^dagger = N I``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

EPS_UNIMOD = 1e-12
EPS_EQUIV = 1e-9
TWO_PI = 2.0 * math.pi

# denominators evaluated through closed-form constants
CLOSED_FORM_DENOMINATORS = frozenset({1, 2, 3, 4, 6, 8, 12})


class UnimodularityError(ValueError):
    """An entry is not of modulus one within tolerance."""


def _normalize_radians(x: float) -> float:
    r = math.fmod(float(x), TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r + 0.0


@dataclass(frozen=True)
class PhaseValue:
    """An angle held exactly in turns or approximately in radians.

    Exactly one of ``turns`` and ``radians`` is set.  Exact values are reduced
    to ``0 <= turns < 1``; approximate values to ``0 <= radians < 2 pi``.
    """

    turns: Fraction | None = None
    radians: float | None = None

    def __post_init__(self):
        if (self.turns is None) == (self.radians is None):
            raise ValueError("a phase is either exact (turns) or approximate (radians)")
        if self.turns is not None:
            object.__setattr__(self, "turns", Fraction(self.turns) % 1)
        else:
            r = float(self.radians)
            if not math.isfinite(r):
                raise ValueError(f"phase must be finite, got {r!r}")
            object.__setattr__(self, "radians", _normalize_radians(r))

    @classmethod
    def exact(cls, p: int | Fraction | str, q: int = 1) -> PhaseValue:
        return cls(turns=Fraction(p) / q)

    @classmethod
    def approx(cls, radians: float) -> PhaseValue:
        return cls(radians=radians)

    @classmethod
    def zero(cls) -> PhaseValue:
        return cls(turns=Fraction(0))

    @classmethod
    def of(cls, z: complex) -> PhaseValue:
        """Approximate phase of a nonzero complex number."""
        return cls(radians=cmath.phase(z))

    @property
    def is_exact(self) -> bool:
        return self.turns is not None

    @property
    def angle(self) -> float:
        """The angle in radians, in ``[0, 2 pi)``."""
        if self.turns is not None:
            return _normalize_radians(TWO_PI * float(self.turns))
        return self.radians

    @property
    def turns_float(self) -> float:
        if self.turns is not None:
            return float(self.turns)
        return self.radians / TWO_PI

    def __add__(self, other: PhaseValue) -> PhaseValue:
        if not isinstance(other, PhaseValue):
            return NotImplemented
        if self.turns is not None and other.turns is not None:
            return PhaseValue(turns=self.turns + other.turns)
        return PhaseValue(radians=self.angle + other.angle)

    def __neg__(self) -> PhaseValue:
        if self.turns is not None:
            return PhaseValue(turns=-self.turns)
        return PhaseValue(radians=-self.radians)

    def __sub__(self, other: PhaseValue) -> PhaseValue:
        if not isinstance(other, PhaseValue):
            return NotImplemented
        return self + (-other)

    def scale(self, k: int | Fraction | float) -> PhaseValue:
        """Multiply the angle by a real coefficient."""
        if self.turns is not None and isinstance(k, (int, Fraction)):
            return PhaseValue(turns=self.turns * k)
        if self.turns is not None and float(k).is_integer():
            return PhaseValue(turns=self.turns * int(k))
        return PhaseValue(radians=self.angle * float(k))

    def to_complex(self) -> complex:
        return phase_to_complex(self)

    def __str__(self) -> str:
        if self.turns is not None:
            return f"{self.turns.numerator}/{self.turns.denominator}"
        return repr(self.radians)


PhaseLike = Union[PhaseValue, Fraction, int, str]


def as_phase(x: PhaseLike | float) -> PhaseValue:
    """Coerce to a phase: rationals and "p/q" strings are turns, floats radians."""
    if isinstance(x, PhaseValue):
        return x
    if isinstance(x, (Fraction, int, str)) and not isinstance(x, bool):
        return PhaseValue(turns=Fraction(x))
    return PhaseValue(radians=float(x))


def _closed_form_table() -> dict[Fraction, complex]:
    h = 0.5
    r3 = math.sqrt(3.0) / 2.0
    r2 = math.sqrt(2.0) / 2.0
    first_quadrant = {0: (1.0, 0.0), 30: (r3, h), 45: (r2, r2), 60: (h, r3)}
    table = {}
    for q in CLOSED_FORM_DENOMINATORS:
        for p in range(q):
            deg = 360 * p // q
            c, s = first_quadrant[deg % 90]
            for _ in range(deg // 90):
                c, s = -s, c
            table[Fraction(p, q)] = complex(c + 0.0, s + 0.0)
    return table


_CLOSED_FORMS = _closed_form_table()


def phase_to_complex(p: PhaseValue) -> complex:
    """``exp(i * angle)``, through closed-form constants for small denominators."""
    if p.turns is not None:
        hit = _CLOSED_FORMS.get(p.turns)
        if hit is not None:
            return hit
        return cmath.exp(1j * TWO_PI * float(p.turns))
    return cmath.exp(1j * p.radians)


@dataclass(frozen=True)
class Meta:
    name: str = ""
    params: tuple[tuple[str, object], ...] = ()
    trace: tuple[str, ...] = ()

    def params_dict(self) -> dict[str, object]:
        return dict(self.params)


TurnsGrid = tuple[tuple[Union[Fraction, None], ...], ...]


class HadamardMatrix:
    """Square matrix of unimodular entries with optional exact phases.

    ``turns`` holds, per entry, the exact phase in turns or ``None`` when only
    the floating value is known.  The Hadamard property itself is checked by
    :func:`chm.analysis.is_hadamard`, not here.
    """

    __slots__ = ("_values", "_turns", "meta")

    def __init__(self, values, turns: TurnsGrid | None = None, meta: Meta | None = None,
                 eps: float = EPS_UNIMOD):
        arr = np.array(values, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"expected a nonempty square matrix, got shape {arr.shape}")
        dev = float(np.max(np.abs(np.abs(arr) - 1.0)))
        if dev > eps:
            raise UnimodularityError(f"entries deviate from modulus one by {dev:.3e}")
        n = arr.shape[0]
        if turns is not None:
            turns = tuple(tuple(None if t is None else Fraction(t) % 1 for t in row) for row in turns)
            if len(turns) != n or any(len(row) != n for row in turns):
                raise ValueError("turns grid does not match the matrix shape")
            if all(t is None for row in turns for t in row):
                turns = None
        arr.setflags(write=False)
        self._values = arr
        self._turns = turns
        self.meta = meta if meta is not None else Meta()

    @classmethod
    def from_phases(cls, grid: Sequence[Sequence[PhaseLike | float]], meta: Meta | None = None) -> HadamardMatrix:
        """Build from a grid of phases (rationals and "p/q" strings mean turns)."""
        phases = [[as_phase(x) for x in row] for row in grid]
        values = [[phase_to_complex(p) for p in row] for row in phases]
        turns = tuple(tuple(p.turns for p in row) for row in phases)
        return cls(values, turns, meta)

    @classmethod
    def from_turns(cls, grid, denominator: int = 1, meta: Meta | None = None) -> HadamardMatrix:
        """Build from integer (or rational) phases measured in ``1/denominator`` turns."""
        return cls.from_phases([[Fraction(x) / denominator for x in row] for row in grid], meta)

    @property
    def n(self) -> int:
        return self._values.shape[0]

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def turns(self) -> TurnsGrid | None:
        return self._turns

    @property
    def is_exact(self) -> bool:
        return self._turns is not None and all(t is not None for row in self._turns for t in row)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._values.copy()
        return self._values.astype(dtype)

    def exact_turn(self, i: int, j: int) -> Fraction | None:
        return None if self._turns is None else self._turns[i][j]

    def phase(self, i: int, j: int) -> PhaseValue:
        t = self.exact_turn(i, j)
        if t is not None:
            return PhaseValue(turns=t)
        return PhaseValue.of(self._values[i, j])

    def phases(self) -> list[list[PhaseValue]]:
        return [[self.phase(i, j) for j in range(self.n)] for i in range(self.n)]

    def with_meta(self, **changes) -> HadamardMatrix:
        meta = Meta(**{**self.meta.__dict__, **changes})
        return HadamardMatrix._trusted(self._values, self._turns, meta)

    @classmethod
    def _trusted(cls, values, turns, meta) -> HadamardMatrix:
        obj = cls.__new__(cls)
        arr = np.array(values, dtype=complex)
        arr.setflags(write=False)
        obj._values = arr
        obj._turns = turns
        obj.meta = meta
        return obj

    def transpose(self) -> HadamardMatrix:
        turns = None if self._turns is None else tuple(zip(*self._turns))
        return HadamardMatrix._trusted(self._values.T, turns, self._derived("transpose"))

    def conjugate(self) -> HadamardMatrix:
        turns = None
        if self._turns is not None:
            turns = tuple(tuple(None if t is None else (-t) % 1 for t in row) for row in self._turns)
        return HadamardMatrix._trusted(np.conj(self._values), turns, self._derived("conjugate"))

    def hermitian_transpose(self) -> HadamardMatrix:
        return self.conjugate().transpose().with_meta(trace=self.meta.trace + ("hermitian_transpose",))

    @property
    def T(self) -> HadamardMatrix:
        return self.transpose()

    def _derived(self, op: str) -> Meta:
        return Meta(self.meta.name, self.meta.params, self.meta.trace + (op,))

    def same_phases(self, other: HadamardMatrix) -> bool:
        """Exact equality: exact phases compared as rationals, the rest bitwise."""
        if self.n != other.n:
            return False
        for i in range(self.n):
            for j in range(self.n):
                a, b = self.exact_turn(i, j), other.exact_turn(i, j)
                if a is not None and b is not None:
                    if a != b:
                        return False
                elif self._values[i, j] != other._values[i, j]:
                    return False
        return True

    def allclose(self, other, atol: float = EPS_EQUIV) -> bool:
        other = np.asarray(other, dtype=complex)
        return other.shape == self._values.shape and bool(np.max(np.abs(self._values - other)) <= atol)

    def is_dephased(self) -> bool:
        first = [(0, j) for j in range(self.n)] + [(i, 0) for i in range(1, self.n)]
        for i, j in first:
            t = self.exact_turn(i, j)
            if t is None:
                if self._values[i, j] != 1:
                    return False
            elif t != 0:
                return False
        return True

    def __repr__(self) -> str:
        name = self.meta.name or "unnamed"
        kind = "exact" if self.is_exact else "approx"
        return f"HadamardMatrix({name!r}, n={self.n}, {kind})"


@dataclass(frozen=True)
class DiagonalPhase:
    phases: tuple[PhaseValue, ...]

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(as_phase(p) for p in self.phases))
        if not self.phases:
            raise ValueError("empty diagonal")

    @classmethod
    def identity(cls, n: int) -> DiagonalPhase:
        return cls((PhaseValue.zero(),) * n)

    @classmethod
    def from_radians(cls, xs: Iterable[float]) -> DiagonalPhase:
        return cls(tuple(PhaseValue.approx(x) for x in xs))

    @property
    def n(self) -> int:
        return len(self.phases)

    @property
    def leading_zero(self) -> bool:
        p = self.phases[0]
        return p.turns == 0 if p.is_exact else p.radians == 0.0

    def values(self) -> np.ndarray:
        return np.array([phase_to_complex(p) for p in self.phases], dtype=complex)

    def matrix(self) -> np.ndarray:
        return np.diag(self.values())

    def inverse(self) -> DiagonalPhase:
        return DiagonalPhase(tuple(-p for p in self.phases))

    def reindexed(self, index: Sequence[int]) -> DiagonalPhase:
        """Diagonal whose entry ``a`` is this diagonal's entry ``index[a]``."""
        return DiagonalPhase(tuple(self.phases[k] for k in index))

    def __add__(self, other: DiagonalPhase) -> DiagonalPhase:
        if self.n != other.n:
            raise ValueError("diagonal size mismatch")
        return DiagonalPhase(tuple(a + b for a, b in zip(self.phases, other.phases)))


@dataclass(frozen=True)
class PermutationVector:
    """Permutation matrix P with ``P[i, perm[i]] = 1`` (0-based).

    Left multiplication picks rows, ``(P X)[i] = X[perm[i]]``.
    """

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(k) for k in self.perm)
        if sorted(perm) != list(range(len(perm))) or not perm:
            raise ValueError(f"not a permutation of 0..n-1: {perm}")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, n: int) -> PermutationVector:
        return cls(tuple(range(n)))

    @classmethod
    def from_columns(cls, columns: Sequence[int]) -> PermutationVector:
        """P = [e_{c_1}, ..., e_{c_n}] with 1-based unit-vector labels."""
        cols = [c - 1 for c in columns]
        inv = [0] * len(cols)
        for j, a in enumerate(cols):
            inv[a] = j
        return cls(tuple(inv))

    @property
    def n(self) -> int:
        return len(self.perm)

    def inverse(self) -> PermutationVector:
        inv = [0] * self.n
        for i, k in enumerate(self.perm):
            inv[k] = i
        return PermutationVector(tuple(inv))

    def transpose(self) -> PermutationVector:
        return self.inverse()

    def __matmul__(self, other: PermutationVector) -> PermutationVector:
        """Matrix product ``self @ other``."""
        return PermutationVector(tuple(other.perm[k] for k in self.perm))

    def matrix(self) -> np.ndarray:
        P = np.zeros((self.n, self.n))
        P[np.arange(self.n), self.perm] = 1.0
        return P

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.n))


@dataclass(frozen=True)
class EquivalenceWitness:
    """``A = D1 P1 B P2 D2``; the witness maps B onto A."""

    d1: DiagonalPhase
    p1: PermutationVector
    p2: PermutationVector
    d2: DiagonalPhase

    def __post_init__(self):
        if len({self.d1.n, self.p1.n, self.p2.n, self.d2.n}) != 1:
            raise ValueError("witness components have different sizes")

    @classmethod
    def identity(cls, n: int) -> EquivalenceWitness:
        return cls(DiagonalPhase.identity(n), PermutationVector.identity(n),
                   PermutationVector.identity(n), DiagonalPhase.identity(n))

    @property
    def n(self) -> int:
        return self.p1.n

    def inverse(self) -> EquivalenceWitness:
        inv1 = self.p1.inverse()
        return EquivalenceWitness(
            self.d1.inverse().reindexed(inv1.perm),
            inv1,
            self.p2.inverse(),
            self.d2.inverse().reindexed(self.p2.perm),
        )

    def then(self, other: EquivalenceWitness) -> EquivalenceWitness:
        """Witness of applying ``self`` first and ``other`` second."""
        return EquivalenceWitness(
            other.d1 + self.d1.reindexed(other.p1.perm),
            other.p1 @ self.p1,
            self.p2 @ other.p2,
            self.d2.reindexed(other.p2.inverse().perm) + other.d2,
        )

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.d1.matrix(), self.p1.matrix(), self.p2.matrix(), self.d2.matrix()


def apply_equivalence(M: HadamardMatrix, w: EquivalenceWitness) -> HadamardMatrix:
    """``D1 P1 M P2 D2`` with phases added entrywise."""
    if not isinstance(M, HadamardMatrix):
        M = HadamardMatrix(M)
    n = M.n
    if w.n != n:
        raise ValueError(f"witness of size {w.n} applied to a {n}x{n} matrix")
    rows = w.p1.perm
    cols = w.p2.inverse().perm
    base = M.values[np.ix_(rows, cols)]
    values = w.d1.values()[:, None] * base * w.d2.values()[None, :]
    turns = None
    if M.turns is not None:
        grid = []
        for i in range(n):
            a = w.d1.phases[i].turns
            row = []
            for j in range(n):
                t = M.turns[rows[i]][cols[j]]
                b = w.d2.phases[j].turns
                if t is None or a is None or b is None:
                    row.append(None)
                else:
                    s = (a + t + b) % 1
                    values[i, j] = phase_to_complex(PhaseValue(turns=s))
                    row.append(s)
            grid.append(tuple(row))
        turns = tuple(grid)
    return HadamardMatrix(values, turns, Meta(M.meta.name, M.meta.params, M.meta.trace + ("equivalence",)))


class Variants(NamedTuple):
    transpose: HadamardMatrix
    conjugate: HadamardMatrix
    hermitian_transpose: HadamardMatrix


def matrix_variants(M: HadamardMatrix) -> Variants:
    return Variants(M.transpose(), M.conjugate(), M.hermitian_transpose())


@dataclass(frozen=True)
class AffineFamily:
    """A dephased base matrix with real phase patterns ``R_1..R_m``.

    The member at ``(a_1..a_m)`` is ``base * exp(i * sum a_k R_k)`` entrywise.
    """

    base: HadamardMatrix
    patterns: tuple[np.ndarray, ...]
    param_names: tuple[str, ...] = field(default=())
    name: str = ""

    def __post_init__(self):
        n = self.base.n
        pats = []
        for R in self.patterns:
            R = np.array(R, dtype=float)
            if R.shape != (n, n):
                raise ValueError(f"pattern shape {R.shape} does not match n={n}")
            if np.any(R[0, :] != 0) or np.any(R[:, 0] != 0):
                raise ValueError("patterns must vanish on the first row and column")
            R.setflags(write=False)
            pats.append(R)
        object.__setattr__(self, "patterns", tuple(pats))
        if pats:
            stacked = np.array([R.ravel() for R in pats])
            if np.linalg.matrix_rank(stacked) != len(pats):
                raise ValueError("patterns are linearly dependent")
        names = tuple(self.param_names) or tuple(f"p{k + 1}" for k in range(len(pats)))
        if len(names) != len(pats):
            raise ValueError("one parameter name per pattern is required")
        object.__setattr__(self, "param_names", names)
        if not self.base.is_dephased():
            raise ValueError("the base matrix of a family must be dephased")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def dimension(self) -> int:
        return len(self.patterns)

    def transpose(self) -> AffineFamily:
        return AffineFamily(self.base.transpose(), tuple(R.T for R in self.patterns),
                            self.param_names, self.name + "T" if self.name else "")
