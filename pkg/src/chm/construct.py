"""Constructions: tensor, Dita composition, doubling, quadrupling, affine
families, circulants, and the closed-subchain pattern solver."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (AffineFamily, DiagonalPhase, HadamardMatrix, Meta, PhaseValue, as_phase,
                   phase_to_complex)
from .exact import RowSpace

HALF = Fraction(1, 2)


class ArityError(ValueError):
    pass


class PatternError(ValueError):
    pass


def _add_turns(*ts):
    if any(t is None for t in ts):
        return None
    return sum(ts, Fraction(0)) % 1


def _turn(M: HadamardMatrix, i: int, j: int):
    return M.exact_turn(i, j)


def _assemble(values: np.ndarray, turns, meta: Meta) -> HadamardMatrix:
    values = np.array(values, dtype=complex)
    for i, row in enumerate(turns):
        for j, t in enumerate(row):
            if t is not None:
                values[i, j] = phase_to_complex(PhaseValue(turns=t))
    return HadamardMatrix(values, tuple(tuple(r) for r in turns), meta)


def _name(*parts) -> str:
    return "(" + ", ".join(p.meta.name or "?" for p in parts) + ")"


def tensor(A: HadamardMatrix, B: HadamardMatrix) -> HadamardMatrix:
    """Kronecker product ``A (x) B``."""
    m = B.n
    n = A.n * m
    turns = [[_add_turns(_turn(A, i // m, j // m), _turn(B, i % m, j % m)) for j in range(n)]
             for i in range(n)]
    meta = Meta(f"{A.meta.name or '?'}*{B.meta.name or '?'}", (), ("tensor" + _name(A, B),))
    return _assemble(np.kron(A.values, B.values), turns, meta)


def _check_diagonal(E: DiagonalPhase, size: int, what: str) -> None:
    if E.n != size:
        raise ValueError(f"{what} has size {E.n}, expected {size}")
    if not E.leading_zero:
        raise ValueError(f"{what} must have leading phase 0")


def dita_compose(A: HadamardMatrix, Bs: Sequence[HadamardMatrix], Es: Sequence[DiagonalPhase]) -> HadamardMatrix:
    """Block matrix with block ``(j, k) = A_jk E_k B_k`` and ``E_1 = I``."""
    K = A.n
    if len(Bs) != K:
        raise ValueError(f"need {K} inner matrices, got {len(Bs)}")
    M = Bs[0].n
    if any(B.n != M for B in Bs):
        raise ValueError("inner matrices must share one size")
    if len(Es) != K - 1:
        raise ValueError(f"need {K - 1} diagonal phase matrices, got {len(Es)}")
    for k, E in enumerate(Es, start=2):
        _check_diagonal(E, M, f"E_{k}")
    Es = [DiagonalPhase.identity(M)] + list(Es)
    n = K * M
    values = np.empty((n, n), dtype=complex)
    turns = [[None] * n for _ in range(n)]
    for j in range(K):
        for k in range(K):
            e = Es[k]
            ev = e.values()
            values[j * M:(j + 1) * M, k * M:(k + 1) * M] = A.values[j, k] * ev[:, None] * Bs[k].values
            for r in range(M):
                for s in range(M):
                    turns[j * M + r][k * M + s] = _add_turns(_turn(A, j, k), e.phases[r].turns, _turn(Bs[k], r, s))
    meta = Meta("dita" + _name(A, *Bs), (), ("dita_compose",))
    return _assemble(values, turns, meta)


def dita_parameter_count(a: int, bs: Sequence[int], K: int, M: int) -> int:
    """``a + sum(bs) + (K-1)(M-1)`` free parameters of a Dita family."""
    if a < 0 or K < 0 or M < 0 or any(b < 0 for b in bs):
        raise ValueError("counts must be nonnegative")
    return a + sum(bs) + (K - 1) * (M - 1)


def _sign_blocks(signs: Sequence[Sequence[int]], blocks: Sequence[HadamardMatrix], name: str) -> HadamardMatrix:
    m = blocks[0].n
    rows, cols = len(signs), len(signs[0])
    n = rows * m
    values = np.empty((n, n), dtype=complex)
    turns = [[None] * n for _ in range(n)]
    for r in range(rows):
        for c in range(cols):
            X = blocks[c]
            flip = Fraction(0) if signs[r][c] > 0 else HALF
            values[r * m:(r + 1) * m, c * m:(c + 1) * m] = signs[r][c] * X.values
            for i in range(m):
                for j in range(m):
                    turns[r * m + i][c * m + j] = _add_turns(_turn(X, i, j), flip)
    return _assemble(values, turns, Meta(name + _name(*blocks), (), (name,)))


def _premultiply(E: DiagonalPhase, B: HadamardMatrix) -> HadamardMatrix:
    values = E.values()[:, None] * B.values
    turns = [[_add_turns(E.phases[i].turns, _turn(B, i, j)) for j in range(B.n)] for i in range(B.n)]
    return _assemble(values, turns, B.meta)


def double(A: HadamardMatrix, B: HadamardMatrix, E: DiagonalPhase | None = None) -> HadamardMatrix:
    """``[[A, E B], [A, -E B]]``."""
    if A.n != B.n:
        raise ValueError("A and B must have the same size")
    E = E if E is not None else DiagonalPhase.identity(A.n)
    _check_diagonal(E, A.n, "E")
    return _sign_blocks([[1, 1], [1, -1]], [A, _premultiply(E, B)], "double")


QUADRUPLE_SIGNS = ((1, 1, 1, 1), (1, -1, 1, -1), (1, 1, -1, -1), (1, -1, -1, 1))


def quadruple(A, B, C, D, E1: DiagonalPhase | None = None, E2: DiagonalPhase | None = None,
              E3: DiagonalPhase | None = None) -> HadamardMatrix:
    """Williamson-like 4x4 sign-block matrix with B, C, D premultiplied by E1, E2, E3."""
    n = A.n
    if any(X.n != n for X in (B, C, D)):
        raise ValueError("all four blocks must have the same size")
    Es = [E if E is not None else DiagonalPhase.identity(n) for E in (E1, E2, E3)]
    for k, E in enumerate(Es, start=1):
        _check_diagonal(E, n, f"E{k}")
    blocks = [A] + [_premultiply(E, X) for E, X in zip(Es, (B, C, D))]
    return _sign_blocks(QUADRUPLE_SIGNS, blocks, "quadruple")


def affine_eval(F: AffineFamily, params: Sequence) -> HadamardMatrix:
    """``base * exp(i * sum params[k] R_k)`` entrywise.

    Float parameters are radians.  Exact parameters (PhaseValue, or a float
    zero) keep an entry exact when its pattern coefficients are integers.
    """
    if len(params) != F.dimension:
        raise ArityError(f"{F.name or 'family'} takes {F.dimension} parameters, got {len(params)}")
    n = F.n
    base = F.base
    involved = np.zeros((n, n), dtype=bool)
    for R in F.patterns:
        involved |= R != 0
    # a float zero is as exact as PhaseValue.zero()
    exact_turns = [p.turns if isinstance(p, PhaseValue) else (Fraction(0) if p == 0 else None)
                   for p in params]
    radians = [p.angle if isinstance(p, PhaseValue) else float(p) for p in params]
    R = np.zeros((n, n))
    for a, P in zip(radians, F.patterns):
        R += a * P
    values = base.values * np.exp(1j * R)
    turns = []
    for i in range(n):
        row = []
        for j in range(n):
            t = base.exact_turn(i, j)
            if involved[i, j] and t is not None:
                for c, p in zip((P[i, j] for P in F.patterns), exact_turns):
                    if c == 0:
                        continue
                    if p is None or not float(c).is_integer():
                        t = None
                        break
                    t += int(c) * p
                if t is not None:
                    t %= 1
            row.append(t)
        turns.append(row)
    bound = tuple((name, str(p) if isinstance(p, PhaseValue) else float(p))
                  for name, p in zip(F.param_names, params))
    meta = Meta(F.name or base.meta.name, bound, base.meta.trace + ("affine_eval",))
    return _assemble(values, turns, meta)


def constant_family(M: HadamardMatrix) -> AffineFamily:
    return AffineFamily(M, (), (), M.meta.name)


def dita_family(A: AffineFamily, Bs: Sequence[AffineFamily], name: str = "",
                param_names: Sequence[str] | None = None) -> AffineFamily:
    """The affine family of Dita compositions with free E phases.

    Parameter order: those of A, then of each B_k in turn, then the M-1 free
    phases of each E_2..E_K.
    """
    K, M = A.n, Bs[0].n
    zero_es = [DiagonalPhase.identity(M) for _ in range(K - 1)]
    base = dita_compose(A.base, [B.base for B in Bs], zero_es)
    n = K * M
    patterns = []
    for P in A.patterns:
        patterns.append(np.kron(P, np.ones((M, M))))
    for k, B in enumerate(Bs):
        for P in B.patterns:
            R = np.zeros((n, n))
            for j in range(K):
                R[j * M:(j + 1) * M, k * M:(k + 1) * M] = P
            patterns.append(R)
    for k in range(1, K):
        for r in range(1, M):
            R = np.zeros((n, n))
            for j in range(K):
                R[j * M + r, k * M:(k + 1) * M] = 1.0
            patterns.append(R)
    if param_names is None:
        param_names = [f"alpha{t + 1}" for t in range(len(patterns))]
    base = base.with_meta(name=name)
    return AffineFamily(base, tuple(patterns), tuple(param_names), name)


def circulant(x: Sequence[complex], meta: Meta | None = None) -> HadamardMatrix:
    """``C_ij = x[(i - j) mod N]``."""
    x = np.asarray(x, dtype=complex)
    n = x.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return HadamardMatrix(x[idx], None, meta)


# -- chains and closed subchain patterns -------------------------------------

def chains(M, i: int, j: int) -> np.ndarray:
    """The chain ``M_ik conj(M_jk)``, k = 0..N-1, of rows i < j (0-based)."""
    V = M.values if isinstance(M, HadamardMatrix) else np.asarray(M, dtype=complex)
    n = V.shape[0]
    if not (0 <= i < j < n):
        raise IndexError(f"need 0 <= i < j < {n}, got ({i}, {j})")
    return V[i] * np.conj(V[j])


Block = tuple[int, ...]


@dataclass(frozen=True)
class SubchainPattern:
    """For every row pair i < j a partition of the column indices into blocks."""

    n: int
    partitions: tuple[tuple[tuple[int, int], tuple[Block, ...]], ...]

    def __post_init__(self):
        seen = set()
        normalized = []
        for (i, j), blocks in self.partitions:
            if not (0 <= i < j < self.n):
                raise ValueError(f"bad row pair ({i}, {j})")
            blocks = tuple(sorted(tuple(sorted(b)) for b in blocks))
            cover = sorted(k for b in blocks for k in b)
            if cover != list(range(self.n)) or any(not b for b in blocks):
                raise ValueError(f"blocks of pair ({i}, {j}) do not partition the columns")
            seen.add((i, j))
            normalized.append(((i, j), blocks))
        if len(seen) != len(normalized):
            raise ValueError("a row pair appears twice")
        missing = [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if (i, j) not in seen]
        normalized.extend(((i, j), (tuple(range(self.n)),)) for i, j in missing)
        object.__setattr__(self, "partitions", tuple(sorted(normalized)))

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[tuple[int, int], Iterable[Iterable[int]]]) -> SubchainPattern:
        return cls(n, tuple((pair, tuple(tuple(b) for b in blocks)) for pair, blocks in mapping.items()))

    @classmethod
    def trivial(cls, n: int) -> SubchainPattern:
        """Every chain is a single block."""
        return cls(n, ())

    def blocks(self, i: int, j: int) -> tuple[Block, ...]:
        return dict(self.partitions)[(i, j)]


@dataclass(frozen=True)
class PatternSpace:
    """Rational basis of phase patterns solving a closed-subchain system."""

    n: int
    basis: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def arrays(self) -> list[np.ndarray]:
        return [np.array([[float(x) for x in row] for row in B]) for B in self.basis]

    def _span(self) -> RowSpace:
        space = RowSpace(self.n * self.n)
        for B in self.basis:
            space.add([x for row in B for x in row])
        return space

    def key(self) -> tuple:
        return self._span().key()

    def contains(self, other: PatternSpace) -> bool:
        span = self._span()
        return all(span.contains([x for row in B for x in row]) for B in other.basis)

    def same_space(self, other: PatternSpace) -> bool:
        return self.n == other.n and self.key() == other.key()


def pattern_space_of(n: int, patterns: Iterable) -> PatternSpace:
    """Span of given pattern matrices as a PatternSpace (rational RREF basis)."""
    space = RowSpace(n * n)
    for R in patterns:
        space.add([Fraction(x).limit_denominator(10**6) for x in np.asarray(R, dtype=float).ravel()])
    basis = tuple(tuple(tuple(v[a * n:(a + 1) * n]) for a in range(n)) for v in space.rows())
    return PatternSpace(n, basis)


def _core_index(n: int, a: int, b: int) -> int | None:
    if a == 0 or b == 0:
        return None
    return (a - 1) * (n - 1) + (b - 1)


def _block_rows(n: int, i: int, j: int, block: Block) -> list[dict[int, Fraction]]:
    """Rows stating that ``R_ik - R_jk`` is constant over the block."""

    def diff(k):
        row: dict[int, Fraction] = {}
        for a, s in ((i, 1), (j, -1)):
            c = _core_index(n, a, k)
            if c is not None:
                row[c] = row.get(c, 0) + s
        return row

    out = []
    first = diff(block[0])
    for k in block[1:]:
        row = dict(first)
        for c, v in diff(k).items():
            row[c] = row.get(c, 0) - v
        row = {c: Fraction(v) for c, v in row.items() if v}
        if row:
            out.append(row)
    return out


def _space_from_constraints(n: int, constraints: RowSpace) -> PatternSpace:
    basis = []
    for v in constraints.nullspace():
        mat = [[Fraction(0)] * n for _ in range(n)]
        for a in range(1, n):
            for b in range(1, n):
                mat[a][b] = v[_core_index(n, a, b)]
        basis.append(tuple(tuple(r) for r in mat))
    return PatternSpace(n, tuple(basis))


def solve_pattern(M, pattern: SubchainPattern, tol: float = 1e-10) -> PatternSpace:
    """Solve the dephasing and equal-difference constraints of a closed pattern."""
    V = M.values if isinstance(M, HadamardMatrix) else np.asarray(M, dtype=complex)
    n = V.shape[0]
    if pattern.n != n:
        raise ValueError("pattern and matrix sizes differ")
    constraints = RowSpace((n - 1) ** 2)
    for (i, j), blocks in pattern.partitions:
        chain = chains(V, i, j)
        for block in blocks:
            total = chain[list(block)].sum()
            if abs(total) > tol:
                raise PatternError(f"block {block} of pair ({i}, {j}) is not closed (sum {total:.3g})")
            for row in _block_rows(n, i, j, block):
                constraints.add(row)
    return _space_from_constraints(n, constraints)


def induced_pattern(M, patterns: Sequence, tol: float = 1e-10) -> SubchainPattern:
    """Coarsest pattern whose blocks group columns with equal row differences.

    For the patterns of an affine family every block found this way is closed.
    """
    V = M.values if isinstance(M, HadamardMatrix) else np.asarray(M, dtype=complex)
    n = V.shape[0]
    stack = np.array([np.asarray(R, dtype=float) for R in patterns]).reshape(-1, n, n)
    parts = []
    for i in range(n):
        for j in range(i + 1, n):
            groups: dict[tuple, list[int]] = {}
            for k in range(n):
                key = tuple(np.round(stack[:, i, k] - stack[:, j, k], 9))
                groups.setdefault(key, []).append(k)
            chain = chains(V, i, j)
            for block in groups.values():
                if abs(chain[block].sum()) > tol:
                    raise PatternError(f"patterns induce an open block {tuple(block)} for pair ({i}, {j})")
            parts.append(((i, j), tuple(tuple(b) for b in groups.values())))
    return SubchainPattern(n, tuple(parts))


def _minimal_closed_partitions(chain: np.ndarray, tol: float) -> list[tuple[Block, ...]]:
    """All partitions of the chain into closed blocks with no closed proper part."""
    n = chain.size
    closed = set()
    for mask in range(1, 1 << n):
        members = [k for k in range(n) if mask >> k & 1]
        if abs(chain[members].sum()) <= tol:
            closed.add(mask)
    minimal = [m for m in closed if not any(s != m and s & m == s for s in closed)]
    out = []

    def extend(remaining: int, acc: list[Block]):
        if not remaining:
            out.append(tuple(acc))
            return
        low = remaining & -remaining
        for m in sorted(minimal, key=lambda m: [k for k in range(n) if m >> k & 1]):
            if m & low and m & remaining == m:
                extend(remaining & ~m, acc + [tuple(k for k in range(n) if m >> k & 1)])

    extend((1 << n) - 1, [])
    return out


MAX_PATTERN_N = 6


def enumerate_patterns(M, max_nodes: int = 10**6, tol: float = 1e-10) -> list[tuple[SubchainPattern, PatternSpace]]:
    """Maximal nonzero pattern spaces of a Hadamard matrix with N <= 6.

    Chains are split into minimal closed blocks (every closed pattern is
    coarsened from such a split, so no maximal space is lost).  Row pairs are
    processed in order while partial constraint systems are deduplicated by
    their reduced row echelon form.
    """
    V = M.values if isinstance(M, HadamardMatrix) else np.asarray(M, dtype=complex)
    n = V.shape[0]
    if n > MAX_PATTERN_N:
        raise ValueError(f"pattern enumeration is limited to N <= {MAX_PATTERN_N}, got {n}")
    ncols = (n - 1) ** 2
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    options = []
    for i, j in pairs:
        opts = []
        for partition in _minimal_closed_partitions(chains(V, i, j), tol):
            rows = [r for block in partition for r in _block_rows(n, i, j, block)]
            opts.append((partition, rows))
        options.append(opts)

    states: dict[tuple, tuple[RowSpace, tuple]] = {RowSpace(ncols).key(): (RowSpace(ncols), ())}
    nodes = 0
    for (i, j), opts in zip(pairs, options):
        nxt: dict[tuple, tuple[RowSpace, tuple]] = {}
        for space, chosen in states.values():
            for partition, rows in opts:
                nodes += 1
                if nodes > max_nodes:
                    raise RuntimeError(f"pattern enumeration exceeded {max_nodes} nodes")
                s = space.copy()
                for r in rows:
                    s.add(r)
                if s.rank == ncols:
                    continue
                key = s.key()
                if key not in nxt:
                    nxt[key] = (s, chosen + (((i, j), partition),))
        states = nxt

    found = []
    for space, chosen in states.values():
        found.append((SubchainPattern(n, chosen), _space_from_constraints(n, space)))
    found.sort(key=lambda item: (-item[1].dimension, item[1].key()))
    maximal = []
    for k, (pat, sp) in enumerate(found):
        if any(other.dimension > sp.dimension and other.contains(sp) for _, other in found):
            continue
        maximal.append((pat, sp))
    return maximal
